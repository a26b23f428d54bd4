//! Adaptive numerical integration of the noisy differential form
//! `dY/dt = a(t)·b(Y + g(t))`, `Y(0) = x0`, with finite-time blow-up
//! detection, plus the trajectory-based explosion-time identity
//! `t_e = A⁻¹(B̄(∞))` where `B̄(y) = ∫_{x0}^y ds / b(s + g(Y⁻¹(s)))`.

mod bbar;
pub(crate) mod interp;

pub use bbar::{bbar_infinity, bbar_of, explosion_time_bbar, small_noise_hypothesis_holds};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcat::{integrate_improper, DEFAULT_IMPROPER_TOL};
use crate::transforms::ProblemSpec;

/// Controls for [`solve_noisy`].
#[derive(Debug, Clone, Copy)]
pub struct SolveControls {
    /// Initial step size; chosen from the initial slope when `None`.
    pub h0: Option<f64>,
    /// Local error tolerance (used as both absolute and relative).
    pub tol: f64,
    /// Blow-up detection cap: integration stops once `Y ≥ y_cap`.
    pub y_cap: f64,
    /// Time horizon: integration stops at `t_max` if the cap is not hit.
    pub t_max: f64,
}

impl SolveControls {
    pub fn new(t_max: f64) -> Self {
        SolveControls { h0: None, tol: 1e-8, y_cap: 1e10, t_max }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_y_cap(mut self, y_cap: f64) -> Self {
        self.y_cap = y_cap;
        self
    }

    pub fn with_h0(mut self, h0: f64) -> Self {
        self.h0 = Some(h0);
        self
    }
}

/// Why integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// `Y` reached the cap: blow-up candidate with a certified bracket.
    CapHit,
    /// The time horizon was reached without hitting the cap.
    ReachedTMax,
    /// The step size underflowed before the cap (stiff failure); the
    /// partial trajectory up to that point is returned.
    StepUnderflow,
}

/// Certified blow-up bracket.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BlowUp {
    /// Last computed time; `Y(t_lo) ≥ y_cap`.
    pub t_lo: f64,
    /// Upper end: `t_lo` plus the remaining-time tail correction
    /// `∫_{y_cap}^∞ ds/(a(t_lo)·b(s))` plus the accumulated time-error budget.
    pub t_hi: f64,
    /// Value of `Y` at `t_lo` (at least `y_cap`).
    pub y_at_stop: f64,
}

/// Solver diagnostics accumulated over a run.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct ResidualStats {
    pub steps_accepted: usize,
    pub steps_rejected: usize,
    pub max_local_error: f64,
    /// Local y-errors converted to time via the local slope and summed; an
    /// a-posteriori bound on how far the computed stopping time can drift.
    pub time_error_budget: f64,
    /// Remaining-time integral past the cap, when a blow-up was detected.
    pub tail_correction: Option<f64>,
}

/// Discretized solution path with an adaptive grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    grid: Vec<f64>,
    values: Vec<f64>,
    local_errors: Vec<f64>,
    blow_up: Option<BlowUp>,
    stop: StopReason,
    stats: ResidualStats,
    x0: f64,
}

impl Trajectory {
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn local_errors(&self) -> &[f64] {
        &self.local_errors
    }

    pub fn blow_up(&self) -> Option<&BlowUp> {
        self.blow_up.as_ref()
    }

    pub fn stop(&self) -> StopReason {
        self.stop
    }

    pub fn stats(&self) -> &ResidualStats {
        &self.stats
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn end_time(&self) -> f64 {
        *self.grid.last().expect("trajectory has at least the initial point")
    }

    pub fn end_value(&self) -> f64 {
        *self.values.last().expect("trajectory has at least the initial point")
    }

    /// Linear interpolation of `Y` at `t ∈ [0, end_time]`.
    pub fn value_at(&self, t: f64) -> Result<f64> {
        if !t.is_finite() || t < 0.0 || t > self.end_time() * (1.0 + 1e-12) + 1e-300 {
            return Err(Error::Domain(format!(
                "time {t} outside trajectory range [0, {}]",
                self.end_time()
            )));
        }
        let t = t.min(self.end_time());
        let i = match self.grid.binary_search_by(|v| v.total_cmp(&t)) {
            Ok(i) => return Ok(self.values[i]),
            Err(i) => i - 1,
        };
        let frac = (t - self.grid[i]) / (self.grid[i + 1] - self.grid[i]);
        Ok(self.values[i] + frac * (self.values[i + 1] - self.values[i]))
    }

    /// First time `Y` reaches `level` (linear interpolation within the
    /// bracketing step), or `None` if the trajectory never does.
    pub fn crossing_time(&self, level: f64) -> Option<f64> {
        if self.values[0] >= level {
            return Some(self.grid[0]);
        }
        for i in 1..self.values.len() {
            if self.values[i] >= level {
                let frac = (level - self.values[i - 1]) / (self.values[i] - self.values[i - 1]);
                return Some(self.grid[i - 1] + frac * (self.grid[i] - self.grid[i - 1]));
            }
        }
        None
    }

    /// Monotone interpolant of the inverse map `Y ↦ t`.
    pub(crate) fn inverse_interpolator(&self) -> Result<interp::MonotoneCubic> {
        // Deduplicate values that coincide to the last ulp.
        let mut xs = Vec::with_capacity(self.values.len());
        let mut ys = Vec::with_capacity(self.values.len());
        for (v, t) in self.values.iter().zip(&self.grid) {
            if xs.last().is_none_or(|last| v > last) {
                xs.push(*v);
                ys.push(*t);
            }
        }
        interp::MonotoneCubic::new(xs, ys)
    }
}

// Dormand–Prince 5(4) coefficients.
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B5: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
// Error weights: 5th-order minus embedded 4th-order coefficients.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrate the noisy differential form with an explicit embedded
/// Dormand–Prince 5(4) pair under PI step-size control.
///
/// Integration stops when `Y ≥ y_cap` (blow-up candidate: the returned
/// bracket is `[t_lo, t_lo + tail + budget]` with
/// `tail = ∫_{y_cap}^∞ ds/(a(t_lo) b(s))`), when `t` reaches `t_max`, or on
/// step-size underflow (stiff failure, reported via [`StopReason`] with the
/// partial trajectory).
pub fn solve_noisy(p: &ProblemSpec, controls: &SolveControls) -> Result<Trajectory> {
    let g = p.g().as_fixed()?.clone();
    if !(controls.t_max > 0.0) || !controls.t_max.is_finite() {
        return Err(Error::Domain(format!("t_max must be positive and finite, got {}", controls.t_max)));
    }
    if !(controls.tol > 0.0) {
        return Err(Error::Domain(format!("tol must be positive, got {}", controls.tol)));
    }
    if !(controls.y_cap > p.x0()) {
        return Err(Error::Domain(format!(
            "y_cap = {} must exceed x0 = {}",
            controls.y_cap,
            p.x0()
        )));
    }
    if g.domain_hi() < controls.t_max * (1.0 - 1e-12) {
        return Err(Error::Domain(format!(
            "noise is only evaluable up to {}, below t_max = {}",
            g.domain_hi(),
            controls.t_max
        )));
    }

    let a = p.a().clone();
    let b = p.b().clone();
    let rhs = move |t: f64, y: f64| -> f64 { a.eval_raw(t) * b.eval_raw(y + g.eval_raw(t)) };

    let tol = controls.tol;
    let t_max = controls.t_max;
    let y_cap = controls.y_cap;

    let mut t = 0.0_f64;
    let mut y = p.x0();
    let mut k1 = rhs(t, y);
    if !k1.is_finite() || k1 < 0.0 {
        return Err(Error::Domain(format!("right-hand side not finite/positive at start: {k1}")));
    }

    let mut h = controls
        .h0
        .unwrap_or_else(|| (0.01 * (1.0 + y.abs()) / (1.0 + k1.abs())).min(t_max / 10.0))
        .min(t_max);
    let mut grid = vec![0.0];
    let mut values = vec![y];
    let mut local_errors = vec![0.0];
    let mut stats = ResidualStats::default();
    let mut prev_ratio: f64 = 1.0;
    #[allow(unused_assignments)]
    let mut stop = StopReason::ReachedTMax;

    const SAFETY: f64 = 0.9;
    const ALPHA: f64 = 0.7 / 5.0;
    const BETA: f64 = 0.4 / 5.0;

    loop {
        if t >= t_max * (1.0 - 1e-14) {
            stop = StopReason::ReachedTMax;
            break;
        }
        h = h.min(t_max - t);
        // Underflow: the step no longer advances time in f64.
        let h_floor = (4.0 * f64::EPSILON * t.abs()).max(1e-300);
        if h < h_floor || t + h == t {
            stop = StopReason::StepUnderflow;
            break;
        }

        // Stage evaluations (k1 carried over: first-same-as-last).
        let k2 = rhs(t + C[0] * h, y + h * A2[0] * k1);
        let k3 = rhs(t + C[1] * h, y + h * (A3[0] * k1 + A3[1] * k2));
        let k4 = rhs(t + C[2] * h, y + h * (A4[0] * k1 + A4[1] * k2 + A4[2] * k3));
        let k5 = rhs(
            t + C[3] * h,
            y + h * (A5[0] * k1 + A5[1] * k2 + A5[2] * k3 + A5[3] * k4),
        );
        let k6 = rhs(
            t + C[4] * h,
            y + h * (A6[0] * k1 + A6[1] * k2 + A6[2] * k3 + A6[3] * k4 + A6[4] * k5),
        );
        let y_new = y
            + h * (B5[0] * k1 + B5[2] * k3 + B5[3] * k4 + B5[4] * k5 + B5[5] * k6);
        let t_new = t + h;

        if !y_new.is_finite() {
            // Overflow inside the stages near blow-up: shrink and retry.
            stats.steps_rejected += 1;
            h *= 0.5;
            continue;
        }

        let k7 = rhs(t_new, y_new);
        let err = h
            * (E[0] * k1 + E[2] * k3 + E[3] * k4 + E[4] * k5 + E[5] * k6 + E[6] * k7);
        let scale = tol * (1.0 + y.abs().max(y_new.abs()));
        let ratio = if err.is_finite() { (err.abs() / scale).max(1e-12) } else { f64::INFINITY };

        if ratio > 1.0 {
            stats.steps_rejected += 1;
            let fac = (SAFETY * ratio.powf(-0.2)).clamp(0.1, 0.9);
            h *= fac;
            continue;
        }

        // Accepted step; before committing, handle a cap crossing.
        if y_new >= y_cap {
            let overshoot_ok = y_new <= 1e3 * y_cap;
            if !overshoot_ok && h * 0.5 >= h_floor {
                stats.steps_rejected += 1;
                h *= 0.5;
                continue;
            }
            stats.steps_accepted += 1;
            stats.max_local_error = stats.max_local_error.max(err.abs());
            stats.time_error_budget += err.abs() / k7.abs().max(1e-300);
            grid.push(t_new);
            values.push(y_new);
            local_errors.push(err.abs());
            t = t_new;
            y = y_new;
            stop = StopReason::CapHit;
            break;
        }

        stats.steps_accepted += 1;
        stats.max_local_error = stats.max_local_error.max(err.abs());
        stats.time_error_budget += err.abs() / k7.abs().max(1e-300);
        grid.push(t_new);
        values.push(y_new);
        local_errors.push(err.abs());
        t = t_new;
        y = y_new;
        k1 = k7;

        let fac = (SAFETY * ratio.powf(-ALPHA) * prev_ratio.powf(BETA)).clamp(0.2, 5.0);
        prev_ratio = ratio;
        h *= fac;
    }

    let blow_up = if stop == StopReason::CapHit {
        let a_end = p.a().eval_raw(t);
        let recip_b = p.b().reciprocal().expect("validated drift has a reciprocal");
        let tail_res = integrate_improper(&recip_b, y_cap, DEFAULT_IMPROPER_TOL)?;
        let tail = if tail_res.value.is_finite() && tail_res.converged {
            Some((tail_res.value + tail_res.abs_error_estimate) / a_end)
        } else {
            None
        };
        stats.tail_correction = tail;
        let t_hi = match tail {
            Some(tail) => (t + tail + stats.time_error_budget).max(t * (1.0 + 1e-15) + 1e-300),
            None => t_max,
        };
        Some(BlowUp { t_lo: t, t_hi, y_at_stop: y })
    } else {
        None
    };

    Ok(Trajectory { grid, values, local_errors, blow_up, stop, stats, x0: p.x0() })
}
