pub mod cgo;
pub mod dnmap;
pub mod faddeev;
pub mod geometry;
pub mod numeric;
pub mod phantom;
pub mod recon;
pub mod scattering;
pub mod sphharm;
