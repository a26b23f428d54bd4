//! The generalized Osgood explosion test, the noiseless closed-form
//! solution, and a comparison check between computed trajectories.
//!
//! For the noiseless initial-value problem `y' = a(t) b(y)`, `y(0) = x0`,
//! the solution is `y(t) = B⁻¹(A(t))` and it explodes in finite time if and
//! only if `B(∞) < A(∞)`, with explosion time `T = A⁻¹(B(∞))`.

use serde::Serialize;

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::transforms::{ProblemSpec, Tolerances};

/// How an explosion verdict or time was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Exact transform identity (`A⁻¹(B(∞))` or its noise-adjusted form).
    OsgoodExact,
    /// Numeric integration with cap detection.
    NumericBlowup,
    /// Two-sided envelope bounds.
    EnvelopeBounds,
    /// Sub-multiplicative lower bound.
    SubmultBound,
}

/// Verdict on finite-time explosion, with a point estimate and an optional
/// certified bracket for the explosion time.
#[derive(Debug, Clone, Serialize)]
pub struct ExplosionReport {
    pub explodes: bool,
    /// Explosion time; `+∞` when the solution does not explode
    /// (serialized as `null` by JSON writers).
    pub t_point: f64,
    /// Bracket `[lo, hi]` certified to contain the explosion time.
    pub t_bracket: Option<(f64, f64)>,
    pub method: Method,
    pub tolerances: Tolerances,
}

impl ExplosionReport {
    /// Midpoint of the bracket if present, else the point estimate.
    pub fn t_estimate(&self) -> f64 {
        match self.t_bracket {
            Some((lo, hi)) => 0.5 * (lo + hi),
            None => self.t_point,
        }
    }
}

/// Osgood's test for a noiseless problem: explosion iff `B(∞) < A(∞)`.
///
/// Requires `g ≡ 0`; use [`osgood_test_ignoring_noise`] to run the same
/// baseline on a noisy instance (the verdict then concerns the noiseless
/// comparison problem, not the noisy one — see the counterexample tests).
pub fn osgood_test(p: &ProblemSpec) -> Result<ExplosionReport> {
    osgood_test_with(p, Tolerances::default())
}

/// [`osgood_test`] with explicit tolerances.
pub fn osgood_test_with(p: &ProblemSpec, tol: Tolerances) -> Result<ExplosionReport> {
    if !p.g().is_zero() {
        return Err(Error::Precondition(
            "osgood_test requires g ≡ 0; call osgood_test_ignoring_noise for the baseline".into(),
        ));
    }
    osgood_test_ignoring_noise_with(p, tol)
}

/// The Osgood dichotomy computed from `a` and `b` alone, ignoring any noise.
pub fn osgood_test_ignoring_noise(p: &ProblemSpec) -> Result<ExplosionReport> {
    osgood_test_ignoring_noise_with(p, Tolerances::default())
}

/// [`osgood_test_ignoring_noise`] with explicit tolerances.
pub fn osgood_test_ignoring_noise_with(p: &ProblemSpec, tol: Tolerances) -> Result<ExplosionReport> {
    let tr = p.transforms_with(tol);
    let b_inf = tr.b_infinity(0.0)?;
    let a_inf = tr.a_infinity()?;
    if b_inf < a_inf {
        let t = tr.a_inverse(b_inf)?;
        Ok(ExplosionReport {
            explodes: true,
            t_point: t,
            t_bracket: None,
            method: Method::OsgoodExact,
            tolerances: tr.tolerances(),
        })
    } else {
        Ok(ExplosionReport {
            explodes: false,
            t_point: f64::INFINITY,
            t_bracket: None,
            method: Method::OsgoodExact,
            tolerances: tr.tolerances(),
        })
    }
}

/// Closed-form solution `y(t) = B⁻¹(A(t))` of the noiseless problem.
///
/// Defined for `0 ≤ t < T`. Within the last quadrature-tolerance sliver
/// before `T` the inversion target is capped at `B(∞) − tol` (pre-blow-up
/// saturation), which avoids spurious root-finder failures there.
pub fn noiseless_solution(p: &ProblemSpec, t: f64) -> Result<f64> {
    let tr = p.transforms();
    let a_t = tr.a_of(t)?;
    if a_t == 0.0 {
        return Ok(p.x0());
    }
    let b_inf = tr.b_infinity(0.0)?;
    let target = if b_inf.is_finite() {
        let cap = b_inf - tr.tolerances().improper;
        if a_t >= b_inf {
            return Err(Error::Domain(format!(
                "t = {t} is at or past the explosion time (A(t) = {a_t} ≥ B(∞) = {b_inf})"
            )));
        }
        a_t.min(cap)
    } else {
        a_t
    };
    tr.b_r_inverse(0.0, target)
}

/// A pointwise ordering violation between two trajectories.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonViolation {
    pub t: f64,
    pub u: f64,
    pub v: f64,
}

/// Result of scanning two trajectories for order violations.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub points_checked: usize,
    pub violations: Vec<ComparisonViolation>,
    /// Whether the explosion-time ordering `T_e(v) ≤ T_e(u)` could be
    /// verified: `None` when neither side gives enough information.
    pub explosion_order_ok: Option<bool>,
}

impl ComparisonReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty() && self.explosion_order_ok != Some(false)
    }
}

/// Relative slack below which an ordering violation is attributed to
/// discretization noise and ignored.
const COMPARISON_TOL: f64 = 1e-6;

/// Check the comparison property between a base trajectory `u` (initial
/// value `x0`) and a dominating trajectory `v` (initial value `x1 ≥ x0`,
/// same non-decreasing drift, nonnegative extra forcing): `v ≥ u` pointwise
/// on the common time range, and `v` explodes no later than `u`.
///
/// Grids are merged and both trajectories are resampled by monotone
/// interpolation before comparison.
pub fn check_comparison(
    problem_u: &ProblemSpec,
    u: &Trajectory,
    problem_v: &ProblemSpec,
    v: &Trajectory,
) -> Result<ComparisonReport> {
    if problem_u.b() != problem_v.b() {
        return Err(Error::Precondition(
            "comparison requires both problems to share the same drift b".into(),
        ));
    }
    if !problem_u.b_nondecreasing() {
        return Err(Error::Precondition("comparison requires a non-decreasing drift".into()));
    }
    if problem_v.x0() < problem_u.x0() {
        return Err(Error::Precondition(format!(
            "comparison requires x1 = {} ≥ x0 = {}",
            problem_v.x0(),
            problem_u.x0()
        )));
    }

    let t_end = u.end_time().min(v.end_time());
    let mut grid: Vec<f64> = u
        .grid()
        .iter()
        .chain(v.grid().iter())
        .copied()
        .filter(|&t| t <= t_end)
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let mut violations = Vec::new();
    for &t in &grid {
        let uv = u.value_at(t)?;
        let vv = v.value_at(t)?;
        if vv < uv - COMPARISON_TOL * (1.0 + uv.abs()) {
            violations.push(ComparisonViolation { t, u: uv, v: vv });
        }
    }

    let explosion_order_ok = match (u.blow_up(), v.blow_up()) {
        (Some(bu), Some(bv)) => {
            // Midpoints compared with both widths as slack.
            let mu = 0.5 * (bu.t_lo + bu.t_hi);
            let mv = 0.5 * (bv.t_lo + bv.t_hi);
            let slack = (bu.t_hi - bu.t_lo) + (bv.t_hi - bv.t_lo) + COMPARISON_TOL;
            Some(mv <= mu + slack)
        }
        // v outlived u's certified explosion: ordering violated.
        (Some(bu), None) => {
            if v.end_time() > bu.t_hi + COMPARISON_TOL {
                Some(false)
            } else {
                None
            }
        }
        _ => None,
    };

    Ok(ComparisonReport { points_checked: grid.len(), violations, explosion_order_ok })
}
