//! Command-line syntax.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "eit3d", version, about = "Radial conductivity reconstruction in the unit ball from DN data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Bump amplitude; the conductivity at the origin is (1 + alpha)².
    #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Support radius of the bump.
    #[arg(long, default_value_t = 0.9)]
    pub d: f64,
    /// Grid nodes per axis for CGO solves (power of two).
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    /// Magnitude of the complex frequency.
    #[arg(long = "zeta-mag", default_value_t = 50.0)]
    pub zeta_mag: f64,
    /// Largest |xi| sampled along the ray.
    #[arg(long = "xi-max", default_value_t = 50.0)]
    pub xi_max: f64,
    /// Spacing of the |xi| samples.
    #[arg(long = "xi-step", default_value_t = 2.0)]
    pub xi_step: f64,
    /// Highest spherical-harmonic degree L retained in t^exp.
    #[arg(long, default_value_t = 30)]
    pub bandwidth: usize,
    /// Fourier truncation B of the inversion; method default when omitted.
    #[arg(long)]
    pub truncation: Option<f64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads for curve sweeps.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate γ and q of the smooth bump.
    Phantom(CommonArgs),
    /// Tabulate DN eigenvalues with staircase bounds.
    Eigenvalues {
        #[arg(long, value_enum, default_value_t = GammaChoice::Bump)]
        gamma: GammaChoice,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Tabulate Faddeev's Green's function along the real part of zeta.
    Faddeev(CommonArgs),
    /// Sample one scattering curve along xi = s·e1.
    Scatter {
        #[arg(long, value_enum, default_value_t = KindChoice::Nonlinear)]
        kind: KindChoice,
        #[arg(long, value_enum, default_value_t = RuleChoice::Fixed)]
        rule: RuleChoice,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Reconstruct the conductivity.
    Reconstruct {
        #[arg(long, value_enum, default_value_t = MethodChoice::Nonlinear)]
        method: MethodChoice,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Produce the data behind one figure preset.
    Figure {
        #[arg(value_enum)]
        figure: FigureChoice,
        #[command(flatten)]
        common: CommonArgs,
    },
}

impl Command {
    pub fn common(&self) -> &CommonArgs {
        match self {
            Command::Phantom(c) | Command::Faddeev(c) => c,
            Command::Eigenvalues { common, .. }
            | Command::Scatter { common, .. }
            | Command::Reconstruct { common, .. }
            | Command::Figure { common, .. } => common,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GammaChoice {
    /// γ ≡ 1.
    Const,
    /// The smooth bump set by --alpha and --d.
    Bump,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindChoice {
    Nonlinear,
    Texp,
    Qhat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleChoice {
    /// |zeta| fixed at --zeta-mag.
    Fixed,
    /// The minimal admissible zeta for each xi.
    Minimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodChoice {
    Nonlinear,
    Texp,
    Calderon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureChoice {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
}

impl FigureChoice {
    pub fn name(&self) -> &'static str {
        match self {
            FigureChoice::Fig1 => "fig1",
            FigureChoice::Fig2 => "fig2",
            FigureChoice::Fig3 => "fig3",
            FigureChoice::Fig4 => "fig4",
            FigureChoice::Fig5 => "fig5",
        }
    }
}
