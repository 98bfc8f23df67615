//! Subcommands and figure presets.

use std::f64::consts::SQRT_2;
use std::path::PathBuf;

use eit3d_core::dnmap::{eigen_bounds, DnSpectrum};
use eit3d_core::faddeev::{g_zeta, GreenEvalConfig};
use eit3d_core::geometry::{make_zeta, ComplexFrequency, Xi};
use eit3d_core::phantom::{RadialProfile, SmoothBump};
use eit3d_core::recon::{
    inverse_radial_fourier, pipeline, solve_conductivity_radial, Method, ReconConfig, ReconResult,
};
use eit3d_core::scattering::{
    qhat_radial, sweep_curve, t_exp_radial, ScatterConfig, ScatterCurve, ScatterKind, ZetaRule,
};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::args::{Command, FigureChoice, GammaChoice, KindChoice, MethodChoice, RuleChoice};
use crate::config::RunConfig;
use crate::output::{fmt_num, write_sidecar, Table};
use crate::CliError;

/// `|ξ|` of the fixed frequency in the `|ζ|` sweep of `fig1`.
pub const FIG1_XI: f64 = 10.0;
/// Spacing of the `|ζ|` sweep of `fig1`; the sweep starts here and ends at `--zeta-mag`.
pub const FIG1_ZETA_STEP: f64 = 8.0;
/// Truncations compared in `fig4`.
pub const FIG4_TRUNCATIONS: [f64; 3] = [15.0, 25.0, 50.0];
/// `|ξ|` spacing of the exact data in `fig4`, fine enough for the smallest truncation.
pub const FIG4_XI_STEP: f64 = 0.5;
/// Support radii of the `fig5` sweep.
pub const FIG5_SUPPORTS: [f64; 3] = [0.3, 0.6, 0.9];
/// Amplitudes of the `fig5` sweep.
pub const FIG5_AMPLITUDES: [f64; 3] = [0.1, 0.5, 0.9];

const SCATTER_HEADER: [&str; 6] = ["xi_mag", "kind", "re", "im", "diverged", "solver_iterations"];
const RECON_HEADER: [&str; 7] = ["r", "gamma_true", "gamma_rec", "q_true", "q_rec", "method", "B"];

/// Runs one command and returns the files written.
pub fn run(command: &Command) -> Result<Vec<PathBuf>, CliError> {
    let cfg = RunConfig::from_args(command.common())?;
    if let Some(threads) = cfg.threads {
        // A second initialisation in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let (dir_name, mut extra, tables) = match command {
        Command::Phantom(_) => ("phantom", vec![], vec![phantom_table(&cfg)?]),
        Command::Eigenvalues { gamma, .. } => (
            "eigenvalues",
            vec![("gamma", format!("{gamma:?}").to_lowercase())],
            vec![eigenvalue_table(&cfg, *gamma)?],
        ),
        Command::Faddeev(_) => ("faddeev", vec![], vec![faddeev_table(&cfg)?]),
        Command::Scatter { kind, rule, .. } => (
            "scatter",
            vec![
                ("kind", format!("{kind:?}").to_lowercase()),
                ("rule", format!("{rule:?}").to_lowercase()),
            ],
            vec![scatter_table(&cfg, *kind, *rule)?],
        ),
        Command::Reconstruct { method, .. } => (
            "reconstruct",
            vec![("method", format!("{method:?}").to_lowercase())],
            vec![reconstruct_table(&cfg, *method)?],
        ),
        Command::Figure { figure, .. } => {
            let (extra, tables) = figure_tables(&cfg, *figure)?;
            (figure.name(), extra, tables)
        }
    };
    let dir = cfg.out.join(dir_name);
    let mut entries = vec![("command".to_string(), dir_name.to_string())];
    entries.extend(cfg.describe());
    entries.extend(extra.drain(..).map(|(k, v)| (k.to_string(), v)));
    let mut written = Vec::new();
    for table in &tables {
        written.push(table.write(&dir)?);
    }
    written.push(write_sidecar(&dir, &entries)?);
    Ok(written)
}

fn radial_nodes(cfg: &RunConfig) -> Vec<f64> {
    RadialProfile::uniform_nodes(cfg.recon_config().nodes).expect("default node count is valid")
}

fn phantom_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let bump = cfg.phantom()?;
    let mut table = Table::new("phantom", &["r", "gamma", "q"]);
    for r in radial_nodes(cfg) {
        table.push(vec![fmt_num(r), fmt_num(bump.gamma(r)), fmt_num(bump.q(r))]);
    }
    Ok(table)
}

fn eigenvalue_table(cfg: &RunConfig, gamma: GammaChoice) -> Result<Table, CliError> {
    let bump = cfg.phantom()?;
    let shells = ScatterConfig::default().shells;
    let mut table = Table::new("eigenvalues", &["l", "lambda", "lower_bound", "upper_bound"]);
    let rows: Vec<Result<[f64; 3], CliError>> = match gamma {
        GammaChoice::Const => {
            let spectrum = DnSpectrum::constant(cfg.bandwidth);
            spectrum.lambdas().iter().map(|&l| Ok([l, l, l])).collect()
        }
        GammaChoice::Bump => {
            let g = |r: f64| bump.gamma(r);
            let spectrum = DnSpectrum::from_smooth(&g, cfg.bandwidth, shells).map_err(CliError::solver)?;
            (0..=cfg.bandwidth)
                .into_par_iter()
                .map(|l| {
                    let (lo, hi) = eigen_bounds(&g, l, shells).map_err(CliError::solver)?;
                    Ok([spectrum.lambdas()[l], lo, hi])
                })
                .collect()
        }
    };
    for (l, row) in rows.into_iter().enumerate() {
        let [lambda, lo, hi] = row?;
        table.push(vec![l.to_string(), fmt_num(lambda), fmt_num(lo), fmt_num(hi)]);
    }
    Ok(table)
}

/// `g_ζ(t e₁)` for `ζ = κ(e₁ + i e₂)`, `κ = |ζ|/√2`, at `t = 2k/n`, `k = 1..n`.
fn faddeev_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let kappa = cfg.zeta_mag / SQRT_2;
    let zeta = ComplexFrequency::new([kappa, 0.0, 0.0], [0.0, kappa, 0.0]).map_err(CliError::solver)?;
    let green = GreenEvalConfig::default();
    let values: Vec<(f64, Result<Complex64, CliError>)> = (1..=cfg.n)
        .into_par_iter()
        .map(|k| {
            let t = 2.0 * k as f64 / cfg.n as f64;
            (t, g_zeta([t, 0.0, 0.0], &zeta, &green).map_err(CliError::solver))
        })
        .collect();
    let mut table = Table::new("faddeev", &["t", "re", "im"]);
    for (t, v) in values {
        let v = v?;
        table.push(vec![fmt_num(t), fmt_num(v.re), fmt_num(v.im)]);
    }
    Ok(table)
}

fn xi_samples(cfg: &RunConfig, step: f64) -> Vec<f64> {
    ReconConfig {
        xi_step: step,
        ..cfg.recon_config()
    }
    .xi_samples()
}

fn scatter_kind(kind: KindChoice) -> ScatterKind {
    match kind {
        KindChoice::Nonlinear => ScatterKind::Nonlinear,
        KindChoice::Texp => ScatterKind::Texp,
        KindChoice::Qhat => ScatterKind::Qhat,
    }
}

fn curve_table(name: &str, curve: &ScatterCurve) -> Table {
    let mut table = Table::new(name, &SCATTER_HEADER);
    for p in &curve.points {
        table.push(vec![
            fmt_num(p.xi_mag),
            curve.kind.name().to_string(),
            fmt_num(p.value.re),
            fmt_num(p.value.im),
            p.diverged.to_string(),
            p.iterations.map_or_else(String::new, |i| i.to_string()),
        ]);
    }
    table
}

fn sweep(cfg: &RunConfig, bump: &SmoothBump, kind: ScatterKind, rule: ZetaRule, xis: &[f64]) -> Result<ScatterCurve, CliError> {
    sweep_curve(kind, bump, xis, rule, &cfg.scatter_config()).map_err(CliError::solver)
}

fn scatter_table(cfg: &RunConfig, kind: KindChoice, rule: RuleChoice) -> Result<Table, CliError> {
    let bump = cfg.phantom()?;
    let kind = scatter_kind(kind);
    let rule = match rule {
        RuleChoice::Fixed => ZetaRule::Fixed {
            magnitude: cfg.zeta_mag,
        },
        RuleChoice::Minimal => ZetaRule::Minimal,
    };
    let curve = sweep(cfg, &bump, kind, rule, &xi_samples(cfg, cfg.xi_step))?;
    Ok(curve_table(kind.name(), &curve))
}

fn method(choice: MethodChoice) -> Method {
    match choice {
        MethodChoice::Nonlinear => Method::Nonlinear,
        MethodChoice::Texp => Method::Texp,
        MethodChoice::Calderon => Method::Calderon,
    }
}

/// One row per radial node; `q_rec` is left empty when the method has none.
fn recon_table(
    name: &str,
    bump: &SmoothBump,
    label: &str,
    truncation: f64,
    gamma_rec: &RadialProfile,
    q_rec: Option<&RadialProfile>,
) -> Table {
    let mut table = Table::new(name, &RECON_HEADER);
    for (i, &r) in gamma_rec.r.iter().enumerate() {
        table.push(vec![
            fmt_num(r),
            fmt_num(bump.gamma(r)),
            fmt_num(gamma_rec.values[i]),
            fmt_num(bump.q(r)),
            q_rec.map_or_else(String::new, |q| fmt_num(q.values[i])),
            label.to_string(),
            fmt_num(truncation),
        ]);
    }
    table
}

fn result_table(name: &str, bump: &SmoothBump, res: &ReconResult) -> Table {
    let q = (!res.q_rec.is_empty()).then_some(&res.q_rec);
    recon_table(name, bump, res.method.name(), res.truncation, &res.gamma_rec, q)
}

fn run_pipeline(cfg: &RunConfig, bump: &SmoothBump, m: Method) -> Result<ReconResult, CliError> {
    let res = pipeline(m, bump, &cfg.recon_config()).map_err(CliError::solver)?;
    if res.reality_warning() {
        eprintln!(
            "warning: {} reconstruction has imaginary residue {:.3e} relative to its real part",
            m.name(),
            res.imag_ratio
        );
    }
    Ok(res)
}

fn reconstruct_table(cfg: &RunConfig, choice: MethodChoice) -> Result<Table, CliError> {
    let bump = cfg.phantom()?;
    let m = method(choice);
    Ok(result_table(m.name(), &bump, &run_pipeline(cfg, &bump, m)?))
}

type Extra = Vec<(&'static str, String)>;

fn figure_tables(cfg: &RunConfig, figure: FigureChoice) -> Result<(Extra, Vec<Table>), CliError> {
    let bump = cfg.phantom()?;
    match figure {
        FigureChoice::Fig1 => fig1(cfg, &bump),
        FigureChoice::Fig2 => {
            let xis = xi_samples(cfg, cfg.xi_step);
            let fixed = ZetaRule::Fixed {
                magnitude: cfg.zeta_mag,
            };
            let tables = vec![
                curve_table("nonlinear", &sweep(cfg, &bump, ScatterKind::Nonlinear, fixed, &xis)?),
                curve_table("texp", &sweep(cfg, &bump, ScatterKind::Texp, fixed, &xis)?),
                curve_table("qhat", &sweep(cfg, &bump, ScatterKind::Qhat, fixed, &xis)?),
            ];
            Ok((vec![], tables))
        }
        FigureChoice::Fig3 => {
            let mut tables = Vec::new();
            for m in [Method::Nonlinear, Method::Texp, Method::Calderon] {
                tables.push(result_table(m.name(), &bump, &run_pipeline(cfg, &bump, m)?));
            }
            Ok((vec![], tables))
        }
        FigureChoice::Fig4 => fig4(cfg, &bump),
        FigureChoice::Fig5 => {
            let mut tables = Vec::new();
            for d in FIG5_SUPPORTS {
                for alpha in FIG5_AMPLITUDES {
                    let b = SmoothBump::new(alpha, d).map_err(|e| CliError::Validation(e.to_string()))?;
                    let res = run_pipeline(cfg, &b, Method::Calderon)?;
                    tables.push(result_table(&format!("calderon_d{d}_alpha{alpha}"), &b, &res));
                }
            }
            let extra = vec![
                ("fig5_supports", format!("{FIG5_SUPPORTS:?}")),
                ("fig5_amplitudes", format!("{FIG5_AMPLITUDES:?}")),
            ];
            Ok((extra, tables))
        }
    }
}

/// `t`, `t^exp` and `q̂` at `ξ = (10, 0, 0)` as `|ζ|` grows.
fn fig1(cfg: &RunConfig, bump: &SmoothBump) -> Result<(Extra, Vec<Table>), CliError> {
    let xi = Xi::along_e1(FIG1_XI).map_err(CliError::solver)?;
    let minimum = FIG1_XI / SQRT_2;
    let mut mags: Vec<f64> = (1..)
        .map(|k| k as f64 * FIG1_ZETA_STEP)
        .take_while(|m| *m < cfg.zeta_mag)
        .filter(|m| *m >= minimum)
        .collect();
    mags.push(cfg.zeta_mag);
    let scatter = cfg.scatter_config();
    let spectrum = DnSpectrum::from_smooth(&|r| bump.gamma(r), scatter.truncation, scatter.shells)
        .map_err(CliError::solver)?;
    let grid = eit3d_core::cgo::Grid3::new(cfg.n).map_err(CliError::solver)?;
    let q = bump.sample_q_on_cube(&grid);
    let qhat = qhat_radial(&|r| bump.q(r), FIG1_XI);
    let rows: Vec<Result<Vec<Vec<String>>, CliError>> = mags
        .par_iter()
        .map(|&m| {
            let pair = make_zeta(&xi, m, scatter.azimuth).map_err(CliError::solver)?;
            let problem = eit3d_core::cgo::CgoProblem::new(grid, pair.zeta, &scatter.green, scatter.support)
                .map_err(CliError::solver)?;
            let sol = problem.solve(&q, scatter.gmres).map_err(CliError::solver)?;
            let t = eit3d_core::scattering::t_nonlinear(&pair, &q, &sol).map_err(CliError::solver)?;
            let texp = t_exp_radial(&spectrum, &pair, scatter.truncation).map_err(CliError::solver)?;
            Ok(vec![
                row_zeta(m, ScatterKind::Nonlinear, t, false, Some(sol.iterations)),
                row_zeta(m, ScatterKind::Texp, texp.value, texp.diverged, None),
                row_zeta(m, ScatterKind::Qhat, Complex64::new(qhat, 0.0), false, None),
            ])
        })
        .collect();
    let mut table = Table::new("zeta_sweep", &["zeta_mag", "kind", "re", "im", "diverged", "solver_iterations"]);
    for r in rows {
        for row in r? {
            table.push(row);
        }
    }
    Ok((vec![("fig1_xi", format!("[{FIG1_XI}, 0, 0]")), ("fig1_zeta_mags", format!("{mags:?}"))], vec![table]))
}

fn row_zeta(m: f64, kind: ScatterKind, v: Complex64, diverged: bool, iterations: Option<usize>) -> Vec<String> {
    vec![
        fmt_num(m),
        kind.name().to_string(),
        fmt_num(v.re),
        fmt_num(v.im),
        diverged.to_string(),
        iterations.map_or_else(String::new, |i| i.to_string()),
    ]
}

/// Reconstructions from exact `q̂` data truncated at each of [`FIG4_TRUNCATIONS`].
fn fig4(cfg: &RunConfig, bump: &SmoothBump) -> Result<(Extra, Vec<Table>), CliError> {
    let recon = cfg.recon_config();
    let b_max = FIG4_TRUNCATIONS.iter().cloned().fold(0.0, f64::max);
    let xis = ReconConfig {
        xi_step: FIG4_XI_STEP,
        xi_max: b_max,
        ..recon.clone()
    }
    .xi_samples();
    let curve = sweep(cfg, bump, ScatterKind::Qhat, ZetaRule::Minimal, &xis)?;
    let r = radial_nodes(cfg);
    let mut tables = vec![curve_table("qhat", &curve)];
    for b in FIG4_TRUNCATIONS {
        let q = inverse_radial_fourier(&curve, b, &r).map_err(CliError::solver)?;
        let (gamma, _) = solve_conductivity_radial(&q.real, recon.tol, recon.max_iter).map_err(CliError::solver)?;
        tables.push(recon_table(&format!("truncation_{b}"), bump, "qhat", b, &gamma, Some(&q.real)));
    }
    let extra = vec![
        ("fig4_truncations", format!("{FIG4_TRUNCATIONS:?}")),
        ("fig4_xi_step", format!("{FIG4_XI_STEP}")),
    ];
    Ok((extra, tables))
}
