//! Validated run configuration.

use std::path::PathBuf;

use eit3d_core::cgo::Grid3;
use eit3d_core::phantom::SmoothBump;
use eit3d_core::recon::ReconConfig;
use eit3d_core::scattering::ScatterConfig;

use crate::args::CommonArgs;
use crate::CliError;

/// Largest harmonic degree accepted for `--bandwidth`.
pub const MAX_BANDWIDTH: usize = 64;

/// The resolved flag values shared by every subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub alpha: f64,
    pub d: f64,
    pub n: usize,
    pub zeta_mag: f64,
    pub xi_max: f64,
    pub xi_step: f64,
    pub bandwidth: usize,
    pub truncation: Option<f64>,
    pub out: PathBuf,
    pub threads: Option<usize>,
}

fn invalid(message: String) -> CliError {
    CliError::Validation(message)
}

impl RunConfig {
    /// Checks the ranges of every flag.
    pub fn from_args(args: &CommonArgs) -> Result<Self, CliError> {
        if !(args.alpha.is_finite() && args.alpha > -1.0) {
            return Err(invalid(format!("--alpha must be finite and greater than -1, got {}", args.alpha)));
        }
        if !(args.d > 0.0 && args.d <= 1.0) {
            return Err(invalid(format!("--d must lie in (0, 1], got {}", args.d)));
        }
        Grid3::new(args.n).map_err(|_| invalid(format!("--n must be a power of two and at least 4, got {}", args.n)))?;
        if !(args.zeta_mag.is_finite() && args.zeta_mag > 0.0) {
            return Err(invalid(format!("--zeta-mag must be positive, got {}", args.zeta_mag)));
        }
        if !(args.xi_max.is_finite() && args.xi_max >= 0.0) {
            return Err(invalid(format!("--xi-max must be non-negative, got {}", args.xi_max)));
        }
        if !(args.xi_step.is_finite() && args.xi_step > 0.0) {
            return Err(invalid(format!("--xi-step must be positive, got {}", args.xi_step)));
        }
        if args.bandwidth > MAX_BANDWIDTH {
            return Err(invalid(format!("--bandwidth must be at most {MAX_BANDWIDTH}, got {}", args.bandwidth)));
        }
        if let Some(b) = args.truncation {
            if !(b.is_finite() && b > 0.0) {
                return Err(invalid(format!("--truncation must be positive, got {b}")));
            }
        }
        if args.threads == Some(0) {
            return Err(invalid("--threads must be at least 1".into()));
        }
        Ok(Self {
            alpha: args.alpha,
            d: args.d,
            n: args.n,
            zeta_mag: args.zeta_mag,
            xi_max: args.xi_max,
            xi_step: args.xi_step,
            bandwidth: args.bandwidth,
            truncation: args.truncation,
            out: args.out.clone(),
            threads: args.threads,
        })
    }

    pub fn phantom(&self) -> Result<SmoothBump, CliError> {
        SmoothBump::new(self.alpha, self.d).map_err(|e| invalid(e.to_string()))
    }

    pub fn scatter_config(&self) -> ScatterConfig {
        ScatterConfig {
            n: self.n,
            truncation: self.bandwidth,
            ..ScatterConfig::default()
        }
    }

    pub fn recon_config(&self) -> ReconConfig {
        ReconConfig {
            scatter: self.scatter_config(),
            zeta_magnitude: self.zeta_mag,
            xi_step: self.xi_step,
            xi_max: self.xi_max,
            truncation: self.truncation,
            ..ReconConfig::default()
        }
    }

    /// `key = value` lines for the sidecar file, including internal solver settings.
    pub fn describe(&self) -> Vec<(String, String)> {
        let recon = self.recon_config();
        let scatter = &recon.scatter;
        let mut entries = vec![
            ("alpha", format!("{}", self.alpha)),
            ("d", format!("{}", self.d)),
            ("n", format!("{}", self.n)),
            ("zeta_mag", format!("{}", self.zeta_mag)),
            ("xi_max", format!("{}", self.xi_max)),
            ("xi_step", format!("{}", self.xi_step)),
            ("bandwidth", format!("{}", self.bandwidth)),
            (
                "truncation",
                self.truncation.map_or_else(|| "method default".to_string(), |b| format!("{b}")),
            ),
            ("out", self.out.display().to_string()),
            (
                "threads",
                self.threads.map_or_else(|| "rayon default".to_string(), |t| t.to_string()),
            ),
            ("gmres_tol", format!("{:e}", scatter.gmres.tol)),
            ("gmres_max_iter", scatter.gmres.max_iter.to_string()),
            ("green_n_quad", scatter.green.n_quad.to_string()),
            ("green_density", format!("{}", scatter.green.density)),
            ("green_underflow_cut", format!("{}", scatter.green.underflow_cut)),
            ("green_rule", format!("{:?}", scatter.green.rule)),
            ("kernel_support", format!("{:?}", scatter.support)),
            ("texp_sphere_bandwidth", scatter.bandwidth.to_string()),
            ("dn_shells", scatter.shells.to_string()),
            ("divergence_rel", format!("{}", scatter.divergence.rel)),
            ("divergence_abs", format!("{}", scatter.divergence.abs)),
            ("ray", format!("{:?}", scatter.ray)),
            ("azimuth", format!("{}", scatter.azimuth)),
            ("radial_nodes", recon.nodes.to_string()),
            ("fixed_point_tol", format!("{:e}", recon.tol)),
            ("fixed_point_max_iter", recon.max_iter.to_string()),
            ("deterministic", "true".to_string()),
        ];
        entries.sort_by(|a, b| a.0.cmp(b.0));
        entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }
}
