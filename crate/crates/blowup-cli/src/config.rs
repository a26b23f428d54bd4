//! Scenario configuration: a problem instance plus analysis controls.

use serde::{Deserialize, Serialize};

use blowup::stochastic::NormalConvention;
use blowup::transforms::{ProblemSpec, Tolerances};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub problem: ProblemSpec,
    #[serde(default)]
    pub controls: Controls,
}

/// Analysis controls. Every field has a default so configs stay minimal;
/// unknown keys are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Controls {
    /// Absolute tolerance for proper integrals.
    pub quad_tol: f64,
    /// Absolute tolerance for improper integrals.
    pub improper_tol: f64,
    /// Function-space tolerance for monotone inversions.
    pub invert_tol: f64,
    /// Local error tolerance for the trajectory solver.
    pub ode_tol: f64,
    /// Initial step size (chosen automatically when absent).
    pub h0: Option<f64>,
    /// Blow-up detection cap.
    pub y_cap: f64,
    /// Time horizon for deterministic simulation (defaults per command).
    pub t_max: Option<f64>,
    /// Brownian path step.
    pub dt: f64,
    /// Number of Monte Carlo paths.
    pub n_paths: usize,
    /// Base seed; all randomness flows from it.
    pub seed: u64,
    /// Monte Carlo horizon (default 1.1·T).
    pub horizon: Option<f64>,
    /// Φ convention for probability bounds.
    pub convention: NormalConvention,
    /// Maintenance quantile.
    pub quantile: f64,
    /// Hitting level for the conditional explosion bound column.
    pub level_r: Option<f64>,
    /// Crossing level for the crack-length bound column.
    pub crack_length: Option<f64>,
    /// Number of grid points for CDF and bound-curve output.
    pub curve_points: usize,
}

impl Default for Controls {
    fn default() -> Self {
        Controls {
            quad_tol: 1e-9,
            improper_tol: 1e-7,
            invert_tol: 1e-8,
            ode_tol: 1e-8,
            h0: None,
            y_cap: 1e10,
            t_max: None,
            dt: 1e-3,
            n_paths: 1000,
            seed: 1,
            horizon: None,
            convention: NormalConvention::Centered,
            quantile: 0.95,
            level_r: None,
            crack_length: None,
            curve_points: 41,
        }
    }
}

impl Controls {
    pub fn tolerances(&self) -> Tolerances {
        Tolerances { quad: self.quad_tol, improper: self.improper_tol, invert: self.invert_tol }
    }
}
