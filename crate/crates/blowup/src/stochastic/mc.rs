//! Monte Carlo estimation of the explosion-time distribution under
//! reflected Brownian noise.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{solve_noisy, SolveControls, StopReason};
use crate::error::{Error, Result};
use crate::stochastic::NoisePath;
use crate::transforms::{Noise, ProblemSpec};

/// Solver controls for each Monte Carlo path.
#[derive(Debug, Clone, Copy)]
pub struct McControls {
    pub solver_tol: f64,
    pub y_cap: f64,
}

impl Default for McControls {
    fn default() -> Self {
        McControls { solver_tol: 1e-8, y_cap: 1e10 }
    }
}

/// Per-path outcome. The path itself is reproducible from its seed.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PathOutcome {
    pub seed: u64,
    /// Blow-up bracket, or `None` when censored at the horizon.
    pub bracket: Option<(f64, f64)>,
    pub stop: StopReason,
}

impl PathOutcome {
    pub fn explosion_time(&self) -> Option<f64> {
        self.bracket.map(|(lo, hi)| 0.5 * (lo + hi))
    }
}

/// Empirical distribution of explosion times, censored at the horizon.
#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalCdf {
    /// Sorted uncensored explosion times (bracket midpoints).
    times: Vec<f64>,
    pub n_total: usize,
    pub n_censored: usize,
    pub horizon: f64,
}

impl EmpiricalCdf {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn all_censored(&self) -> bool {
        self.times.is_empty()
    }

    /// `P̂(T_e ≤ t)`, with censored paths counted as `> horizon`.
    pub fn value_at(&self, t: f64) -> f64 {
        let count = self.times.partition_point(|&x| x <= t);
        count as f64 / self.n_total as f64
    }

    /// Wilson confidence half-width for `P̂(T_e ≤ t)` at normal score `z`.
    pub fn wilson_halfwidth(&self, t: f64, z: f64) -> f64 {
        let n = self.n_total as f64;
        let p_hat = self.value_at(t);
        z * (p_hat * (1.0 - p_hat) / n + z * z / (4.0 * n * n)).sqrt() / (1.0 + z * z / n)
    }
}

/// Full Monte Carlo result: ordered per-path outcomes plus the empirical CDF.
#[derive(Debug, Clone, Serialize)]
pub struct McResult {
    pub outcomes: Vec<PathOutcome>,
    pub cdf: EmpiricalCdf,
}

/// Run `n_paths` independent simulations of the problem with `g = |W|`
/// sampled per seed (`base_seed`, `base_seed + 1`, …), solving each to the
/// blow-up cap or the horizon and collecting bracket midpoints.
///
/// The problem must carry the Brownian noise placeholder. Results are
/// deterministic for fixed inputs: paths are simulated in parallel but
/// aggregated in seed order.
pub fn mc_explosion(
    p: &ProblemSpec,
    n_paths: usize,
    horizon: f64,
    dt: f64,
    base_seed: u64,
    controls: &McControls,
) -> Result<McResult> {
    if *p.g() != Noise::Brownian {
        return Err(Error::Precondition(
            "mc_explosion requires the Brownian noise placeholder".into(),
        ));
    }
    if n_paths == 0 {
        return Err(Error::Domain("n_paths must be at least 1".into()));
    }
    let outcomes: Vec<PathOutcome> = (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let seed = base_seed + i as u64;
            let path = NoisePath::sample(horizon, dt, seed)?;
            let with_path = p.with_noise_path(Arc::new(path));
            let solve = SolveControls::new(horizon)
                .with_tol(controls.solver_tol)
                .with_y_cap(controls.y_cap);
            let traj = solve_noisy(&with_path, &solve)?;
            Ok(PathOutcome {
                seed,
                bracket: traj.blow_up().map(|b| (b.t_lo, b.t_hi)),
                stop: traj.stop(),
            })
        })
        .collect::<Result<_>>()?;

    let mut times: Vec<f64> = outcomes.iter().filter_map(|o| o.explosion_time()).collect();
    times.sort_by(f64::total_cmp);
    let n_censored = n_paths - times.len();
    Ok(McResult {
        outcomes,
        cdf: EmpiricalCdf { times, n_total: n_paths, n_censored, horizon },
    })
}
