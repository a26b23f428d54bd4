//! Subcommand implementations: scenario loading, analysis dispatch and
//! report/CSV emission.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

use blowup::bounds::envelope_bounds_with;
use blowup::dynamics::{explosion_time_bbar, solve_noisy, SolveControls, StopReason, Trajectory};
use blowup::osgood::{osgood_test_ignoring_noise_with, osgood_test_with, ExplosionReport};
use blowup::stochastic::{
    crossing_prob_bound_with, explosion_prob_bound_with, mc_explosion, phi, phi_inverse,
    conditional_explosion_prob_bound_with, McControls, McResult, NormalConvention,
};
use blowup::transforms::{Noise, ProblemSpec};

use crate::config::{Controls, ScenarioConfig};
use crate::CommonArgs;

pub enum Kind {
    Osgood,
    Bounds,
    Simulate,
    Paris,
}

/// CLI error with its process exit code: 1 for configuration problems,
/// 2 for precondition failures, 3 for numerical non-convergence.
pub struct CliError {
    source: anyhow::Error,
    code: u8,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        self.code
    }

    fn config(err: anyhow::Error) -> Self {
        CliError { source: err, code: 1 }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.source)
    }
}

impl fmt::Debug for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.source, f)
    }
}

impl From<blowup::Error> for CliError {
    fn from(err: blowup::Error) -> Self {
        let code = err.exit_code() as u8;
        CliError { source: anyhow::Error::new(err), code }
    }
}

pub fn run(args: &CommonArgs, kind: Kind) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading config {}", args.config.display()))
        .map_err(CliError::config)?;
    let mut cfg: ScenarioConfig = serde_json::from_str(&text)
        .map_err(|e| {
            CliError::config(anyhow::anyhow!(
                "parsing {} (line {}, column {}): {e}",
                args.config.display(),
                e.line(),
                e.column()
            ))
        })?;
    if let Some(seed) = args.seed {
        cfg.controls.seed = seed;
    }
    if let Some(conv) = args.convention {
        cfg.controls.convention = conv;
    }
    if let Some(q) = args.quantile {
        cfg.controls.quantile = q;
    }
    let out = Output::new(args.out.as_deref()).map_err(CliError::config)?;
    match kind {
        Kind::Osgood => cmd_osgood(&cfg, &out),
        Kind::Bounds => cmd_bounds(&cfg, &out),
        Kind::Simulate => cmd_simulate(&cfg, &out),
        Kind::Paris => cmd_paris(&cfg, &out),
    }
}

struct Output {
    dir: Option<PathBuf>,
}

impl Output {
    fn new(dir: Option<&Path>) -> anyhow::Result<Self> {
        if let Some(dir) = dir {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        Ok(Output { dir: dir.map(Path::to_path_buf) })
    }

    /// Print the report to stdout and, when an output directory was given,
    /// also write it there.
    fn emit_json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value)
            .context("serializing report")
            .map_err(CliError::config)?;
        text.push('\n');
        print!("{text}");
        if let Some(dir) = &self.dir {
            let path = dir.join(format!("{name}.json"));
            fs::write(&path, &text)
                .with_context(|| format!("writing {}", path.display()))
                .map_err(CliError::config)?;
            eprintln!("wrote {}", path.display());
        }
        Ok(())
    }

    /// Write a CSV artifact (only when an output directory was given).
    fn write_csv(&self, name: &str, header: &str, rows: &[String]) -> Result<(), CliError> {
        let Some(dir) = &self.dir else {
            eprintln!("note: no --out directory, skipping {name}.csv");
            return Ok(());
        };
        let mut text = String::with_capacity(rows.len() * 32 + header.len() + 1);
        text.push_str(header);
        text.push('\n');
        for row in rows {
            text.push_str(row);
            text.push('\n');
        }
        let path = dir.join(format!("{name}.csv"));
        fs::write(&path, text)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(CliError::config)?;
        eprintln!("wrote {}", path.display());
        Ok(())
    }
}

fn solve_controls(c: &Controls, t_max: f64) -> SolveControls {
    let mut controls = SolveControls::new(t_max).with_tol(c.ode_tol).with_y_cap(c.y_cap);
    if let Some(h0) = c.h0 {
        controls = controls.with_h0(h0);
    }
    controls
}

/// Default deterministic-simulation horizon: past the noiseless explosion
/// time when it exists, clamped to the noise horizon for sampled paths.
fn default_t_max(p: &ProblemSpec, baseline: &ExplosionReport, c: &Controls) -> f64 {
    let mut t_max = c.t_max.unwrap_or(if baseline.explodes { 1.5 * baseline.t_point } else { 10.0 });
    if let Noise::Fixed(g) = p.g() {
        if g.domain_hi().is_finite() {
            t_max = t_max.min(g.domain_hi());
        }
    }
    t_max
}

#[derive(Serialize)]
struct OsgoodCmdReport {
    baseline: ExplosionReport,
    /// Blow-up bracket from a numeric cross-check of the noisy problem.
    numeric_bracket: Option<(f64, f64)>,
    warning: Option<String>,
}

fn cmd_osgood(cfg: &ScenarioConfig, out: &Output) -> Result<(), CliError> {
    let p = &cfg.problem;
    let tol = cfg.controls.tolerances();
    let baseline = if p.g().is_zero() {
        osgood_test_with(p, tol)?
    } else {
        osgood_test_ignoring_noise_with(p, tol)?
    };
    let mut numeric_bracket = None;
    let mut warning = None;
    if matches!(p.g(), Noise::Fixed(f) if !f.is_zero()) {
        let t_max = default_t_max(p, &baseline, &cfg.controls);
        match solve_noisy(p, &solve_controls(&cfg.controls, t_max)) {
            Ok(traj) => {
                if let Some(b) = traj.blow_up() {
                    numeric_bracket = Some((b.t_lo, b.t_hi));
                    if !baseline.explodes {
                        warning = Some(format!(
                            "the noiseless test reports no explosion (B(∞) ≥ A(∞)), but numeric \
                             simulation of the noisy problem detects blow-up in [{:.6}, {:.6}]; \
                             the dichotomy only covers g ≡ 0",
                            b.t_lo, b.t_hi
                        ));
                    }
                }
            }
            Err(e) => warning = Some(format!("numeric cross-check failed: {e}")),
        }
    }
    out.emit_json("osgood_report", &OsgoodCmdReport { baseline, numeric_bracket, warning })
}

fn cmd_bounds(cfg: &ScenarioConfig, out: &Output) -> Result<(), CliError> {
    let report = envelope_bounds_with(&cfg.problem, cfg.controls.tolerances())?;
    out.emit_json("bounds_report", &report)
}

fn trajectory_rows(traj: &Trajectory) -> Vec<String> {
    traj.grid()
        .iter()
        .zip(traj.values())
        .zip(traj.local_errors())
        .map(|((t, y), e)| format!("{t},{y},{e}"))
        .collect()
}

#[derive(Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
enum SimulateReport {
    Deterministic {
        stop: StopReason,
        bracket: Option<(f64, f64)>,
        /// Explosion time from the trajectory identity `A⁻¹(B̄(∞))`,
        /// when its hypotheses hold.
        t_explosion_identity: Option<f64>,
        steps: usize,
        warning: Option<String>,
    },
    MonteCarlo {
        n_paths: usize,
        n_censored: usize,
        horizon: f64,
        dt: f64,
        seed: u64,
        convention: NormalConvention,
        t_upper: f64,
    },
}

fn cmd_simulate(cfg: &ScenarioConfig, out: &Output) -> Result<(), CliError> {
    let p = &cfg.problem;
    let c = &cfg.controls;
    match p.g() {
        Noise::Fixed(_) => {
            let tol = c.tolerances();
            let baseline = osgood_test_ignoring_noise_with(p, tol)?;
            let t_max = default_t_max(p, &baseline, c);
            let traj = solve_noisy(p, &solve_controls(c, t_max))?;
            out.write_csv("trajectory", "t,y,local_error", &trajectory_rows(&traj))?;
            let mut warning = None;
            let t_identity = if traj.blow_up().is_some() && p.b_nondecreasing() {
                match explosion_time_bbar(p, &traj) {
                    Ok(r) => Some(r.t_point),
                    Err(e) => {
                        warning = Some(format!("explosion-time identity unavailable: {e}"));
                        None
                    }
                }
            } else {
                None
            };
            out.emit_json(
                "simulate_report",
                &SimulateReport::Deterministic {
                    stop: traj.stop(),
                    bracket: traj.blow_up().map(|b| (b.t_lo, b.t_hi)),
                    t_explosion_identity: t_identity,
                    steps: traj.grid().len() - 1,
                    warning,
                },
            )
        }
        Noise::Brownian => {
            let tol = c.tolerances();
            let tr = p.transforms_with(tol);
            let b_inf = tr.b_infinity(0.0)?;
            let t_upper = if b_inf.is_finite() { tr.a_inverse(b_inf)? } else { f64::INFINITY };
            let horizon = match (c.horizon, t_upper.is_finite()) {
                (Some(h), _) => h,
                (None, true) => 1.1 * t_upper,
                (None, false) => {
                    return Err(blowup::Error::Precondition(
                        "the baseline does not explode; specify an explicit horizon".into(),
                    )
                    .into())
                }
            };
            let mc = mc_explosion(
                p,
                c.n_paths,
                horizon,
                c.dt,
                c.seed,
                &McControls { solver_tol: c.ode_tol, y_cap: c.y_cap },
            )?;
            write_ecdf_csv(out, &mc, horizon, c.curve_points)?;
            if t_upper.is_finite() {
                write_bound_curves_csv(out, p, &mc, t_upper, c)?;
            }
            // One representative trajectory, from the base seed.
            let path = blowup::stochastic::NoisePath::sample(horizon, c.dt, c.seed)?;
            let traj = solve_noisy(&p.with_noise_path(path.into()), &solve_controls(c, horizon))?;
            out.write_csv("trajectory", "t,y,local_error", &trajectory_rows(&traj))?;
            out.emit_json(
                "simulate_report",
                &SimulateReport::MonteCarlo {
                    n_paths: c.n_paths,
                    n_censored: mc.cdf.n_censored,
                    horizon,
                    dt: c.dt,
                    seed: c.seed,
                    convention: c.convention,
                    t_upper,
                },
            )
        }
    }
}

fn write_ecdf_csv(out: &Output, mc: &McResult, horizon: f64, points: usize) -> Result<(), CliError> {
    let n = points.max(2);
    let rows: Vec<String> = (0..n)
        .map(|i| {
            let t = horizon * i as f64 / (n - 1) as f64;
            let cdf = mc.cdf.value_at(t);
            let w = mc.cdf.wilson_halfwidth(t, 1.96);
            format!("{t},{cdf},{w}")
        })
        .collect();
    out.write_csv("ecdf", "t,empirical_cdf,wilson_halfwidth", &rows)
}

fn write_bound_curves_csv(
    out: &Output,
    p: &ProblemSpec,
    mc: &McResult,
    t_upper: f64,
    c: &Controls,
) -> Result<(), CliError> {
    let tol = c.tolerances();
    let conv = c.convention;
    let conv_name = match conv {
        NormalConvention::Centered => "centered",
        NormalConvention::Cdf => "cdf",
    };
    let n = c.curve_points.max(2);
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let t = 0.98 * t_upper * i as f64 / (n - 1) as f64;
        let empirical = mc.cdf.value_at(t);
        let tail = explosion_prob_bound_with(p, t, t_upper, conv, tol)?;
        let conditional = match c.level_r {
            Some(r) => conditional_explosion_prob_bound_with(p, t, r, t_upper, conv, tol)?
                .to_string(),
            None => String::new(),
        };
        let crossing = match c.crack_length {
            Some(level) => crossing_prob_bound_with(p, t, level, t_upper, conv, tol)?.to_string(),
            None => String::new(),
        };
        rows.push(format!("{t},{empirical},{tail},{conditional},{crossing},{conv_name}"));
    }
    out.write_csv(
        "bound_curves",
        "t,empirical_cdf,bound_tail,bound_conditional,bound_crossing,convention",
        &rows,
    )
}

#[derive(Serialize)]
struct ParisReport {
    alpha: f64,
    /// Effective intensity constant `a0·k` after folding the drift scale
    /// into the intensity.
    a0_effective: f64,
    x0: f64,
    /// Explosion time computed through the transforms.
    t_explosion: f64,
    /// Closed form `(α·a0·x0^α)^{-1}`.
    t_explosion_closed_form: f64,
    quantile: f64,
    /// Convention under which the quantile is representable.
    maintenance_convention: NormalConvention,
    /// Time below which the explosion probability stays under `1 − quantile`.
    maintenance_time: f64,
    /// Tail bound evaluated at the maintenance time; equals `1 − quantile`
    /// by construction.
    maintenance_bound_check: f64,
    /// Convention used for the bound-comparison curves.
    convention: NormalConvention,
}

fn cmd_paris(cfg: &ScenarioConfig, out: &Output) -> Result<(), CliError> {
    use blowup::funcat::FunctionKind;
    let p = &cfg.problem;
    let c = &cfg.controls;
    let tol = c.tolerances();
    let (a0, kb, pow) = match (p.a().kind(), p.b().kind()) {
        (FunctionKind::Constant { k: a0 }, FunctionKind::Power { k, p: pow }) => (*a0, *k, *pow),
        _ => {
            return Err(blowup::Error::Precondition(
                "the crack-growth scenario needs a constant intensity and a power-law drift".into(),
            )
            .into())
        }
    };
    if pow <= 1.0 {
        return Err(blowup::Error::Precondition(format!(
            "the power-law drift exponent must exceed 1 for finite-time blow-up, got {pow}"
        ))
        .into());
    }
    let alpha = pow - 1.0;
    let a0_eff = a0 * kb;
    let x0 = p.x0();

    let tr = p.transforms_with(tol);
    let t_explosion = tr.a_inverse(tr.b_infinity(0.0)?)?;
    let t_closed = 1.0 / (alpha * a0_eff * x0.powf(alpha));

    let q = c.quantile;
    if !(q > 0.0 && q < 1.0) {
        return Err(blowup::Error::Domain(format!("quantile must be in (0, 1), got {q}")).into());
    }
    // Φ⁻¹(q) exists only in the convention whose range contains q.
    let maintenance_convention =
        if q < 0.5 { NormalConvention::Centered } else { NormalConvention::Cdf };
    let z = phi_inverse(q, maintenance_convention)?;
    let maintenance_time =
        (x0 + t_explosion.sqrt() * z).powf(-alpha) / (alpha * a0_eff);
    let maintenance_bound_check =
        explosion_prob_bound_with(p, maintenance_time, t_explosion, maintenance_convention, tol)?;

    // Bound comparison curves: the tail bound against the closed-form
    // sub-multiplicative estimate, reporting which is smaller at each t.
    let n = c.curve_points.max(2);
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let t = t_explosion * (0.05 + 0.90 * i as f64 / (n - 1) as f64);
        let tail = explosion_prob_bound_with(p, t, t_explosion, c.convention, tol)?;
        let arg = x0 / t.sqrt() * ((alpha * a0_eff * x0.powf(alpha) * t).powf(-1.0 / (1.0 + alpha)) - 1.0);
        let submult = (1.0 - phi(arg.max(0.0), c.convention)?).clamp(0.0, 1.0);
        let smaller = if submult < tail {
            "submult"
        } else if tail < submult {
            "tail"
        } else {
            "equal"
        };
        rows.push(format!("{t},{tail},{submult},{smaller}"));
    }
    out.write_csv("paris_curves", "t,bound_tail,bound_submult,smaller", &rows)?;

    out.emit_json(
        "paris_report",
        &ParisReport {
            alpha,
            a0_effective: a0_eff,
            x0,
            t_explosion,
            t_explosion_closed_form: t_closed,
            quantile: q,
            maintenance_convention,
            maintenance_time,
            maintenance_bound_check,
            convention: c.convention,
        },
    )
}
