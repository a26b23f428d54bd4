//! Deterministic two-sided explosion-time bounds.
//!
//! With `T = A⁻¹(B(∞))` and `ĝ` the running maximum of the noise, the
//! envelope bound is
//!
//! ```text
//! A⁻¹(β(ĝ(T))) ≤ T_e ≤ T
//! ```
//!
//! and, when the drift is sub-multiplicative (`b(xy) ≤ c·b(x)·b(y)`), the
//! refinement `T_e ≥ Ã⁻¹(B(∞))` holds with
//! `Ã(t) = c ∫₀ᵗ a(s)·b(g(s)/x0 + 1) ds`.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcat::{invert_monotone, integrate_fn, Direction, FunctionKind, FunctionSpec, DEFAULT_QUAD_TOL};
use crate::transforms::{ProblemSpec, DEFAULT_INVERT_TOL};

/// Which of the two lower bounds is tighter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TighterLower {
    Envelope,
    Submult,
}

/// Two-sided bounds on the explosion time of a noisy instance.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    /// `A⁻¹(β(ĝ(T)))`.
    pub lower_envelope: f64,
    /// `T = A⁻¹(B(∞))`.
    pub upper: f64,
    /// `Ã⁻¹(B(∞))`, when the drift admits a sub-multiplicative constant.
    pub lower_submult: Option<f64>,
    /// The constant used for the sub-multiplicative bound.
    pub c_used: Option<f64>,
    pub tighter_lower: TighterLower,
}

/// Envelope bounds plus, when available, the sub-multiplicative refinement.
///
/// Requires a non-decreasing drift with `B(∞) < A(∞)` (so the upper bound
/// is finite) and a concrete noise (closed form or sampled path) so that
/// `ĝ(T)` is computable.
pub fn envelope_bounds(p: &ProblemSpec) -> Result<BoundReport> {
    envelope_bounds_with(p, crate::transforms::Tolerances::default())
}

/// [`envelope_bounds`] with explicit tolerances.
pub fn envelope_bounds_with(
    p: &ProblemSpec,
    tol: crate::transforms::Tolerances,
) -> Result<BoundReport> {
    if !p.b_nondecreasing() {
        return Err(Error::Precondition("envelope bounds require a non-decreasing drift".into()));
    }
    let tr = p.transforms_with(tol);
    let b_inf = tr.b_infinity(0.0)?;
    let a_inf = tr.a_infinity()?;
    if !(b_inf < a_inf) {
        return Err(Error::Precondition(format!(
            "upper bound is infinite: B(∞) = {b_inf} vs A(∞) = {a_inf}"
        )));
    }
    let upper = tr.a_inverse(b_inf)?;
    let g_hat = p.noise_sup(upper)?;
    let beta_at_ghat = tr.beta(g_hat)?;
    let lower_envelope = match tr.a_inverse(beta_at_ghat) {
        Ok(v) => v,
        Err(Error::TargetOutOfRange { .. }) => 0.0,
        Err(e) => return Err(e),
    };

    let (lower_submult, c_used) = match submult_constant(p.b(), &default_probe_grid(48, 0x5eed)) {
        Ok(c) => (Some(submult_lower_bound(p, c, upper)?), Some(c)),
        Err(Error::Precondition(_)) => (None, None),
        Err(e) => return Err(e),
    };

    let tighter_lower = match lower_submult {
        Some(ls) if ls > lower_envelope => TighterLower::Submult,
        _ => TighterLower::Envelope,
    };
    Ok(BoundReport { lower_envelope, upper, lower_submult, c_used, tighter_lower })
}

/// Deterministic probe values in `(0, 50]`, clustered toward small
/// arguments, for verifying sub-multiplicativity on a grid.
pub fn default_probe_grid(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut grid = vec![0.1, 0.5, 1.0, 2.0, 10.0];
    for _ in 0..n.saturating_sub(grid.len()) {
        let u = ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64);
        grid.push(50.0 * u * u);
    }
    grid
}

/// The analytic sub-multiplicative constant of a catalog drift, verified
/// against `b(xy) ≤ c·b(x)·b(y)` on all pairs from the probe grid.
///
/// Power kinds give `c = 1/k` exactly. Exponentials are rejected: no finite
/// `c` satisfies the pointwise inequality for all `x, y ≥ 0` (take `x = y`
/// large), and the grid verification would fail.
pub fn submult_constant(b: &FunctionSpec, probe_grid: &[f64]) -> Result<f64> {
    let c = match b.kind() {
        FunctionKind::Constant { k } if *k > 0.0 => 1.0 / k,
        FunctionKind::Power { k, .. } if *k > 0.0 => 1.0 / k,
        FunctionKind::ShiftedPower { k, p, s0 } if *k > 0.0 => {
            if *s0 == 0.0 {
                1.0 / k
            } else if *s0 < 0.0 && *p >= 0.0 {
                let u = -s0;
                (1.0_f64.max(1.0 / u)).powf(*p) / k
            } else {
                return Err(Error::Precondition(format!(
                    "no sub-multiplicative constant derived for shifted power with s0 = {s0}, p = {p}"
                )));
            }
        }
        FunctionKind::Exponential { .. } => {
            return Err(Error::Precondition(
                "exponential drifts admit no finite sub-multiplicative constant on all x, y ≥ 0"
                    .into(),
            ))
        }
        other => {
            return Err(Error::Precondition(format!(
                "no sub-multiplicative constant for kind {other:?}"
            )))
        }
    };
    for &x in probe_grid {
        for &y in probe_grid {
            if !b.in_domain(x) || !b.in_domain(y) || !b.in_domain(x * y) {
                continue;
            }
            let lhs = b.eval_raw(x * y);
            let rhs = c * b.eval_raw(x) * b.eval_raw(y);
            if !(lhs <= rhs * (1.0 + 1e-9) + 1e-12) {
                return Err(Error::Inconsistent(format!(
                    "sub-multiplicativity fails at x = {x}, y = {y}: b(xy) = {lhs} > c·b(x)·b(y) = {rhs}"
                )));
            }
        }
    }
    Ok(c)
}

// Gauss–Legendre 4-point nodes/weights on [-1, 1], for per-cell integration
// of sampled-path integrands (smooth within a cell).
const GL4_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GL4_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_85,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_85,
];

/// `Ã(t) = c ∫₀ᵗ a(s)·b(g(s)/x0 + 1) ds`, precomputed for fast repeated
/// evaluation and inversion.
///
/// For sampled-path noise the integral is accumulated cell by cell with a
/// fixed Gauss rule (the integrand is smooth within each path cell); for
/// closed-form noise each evaluation is an adaptive quadrature.
pub struct ATilde<'p> {
    p: &'p ProblemSpec,
    c: f64,
    g: FunctionSpec,
    /// Prefix integrals on the path grid, when the noise is a sampled path.
    prefix: Option<(f64, Vec<f64>)>,
}

impl<'p> ATilde<'p> {
    pub fn new(p: &'p ProblemSpec, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::Domain(format!("c must be positive and finite, got {c}")));
        }
        let g = p.g().as_fixed()?.clone();
        let prefix = if let FunctionKind::AbsBrownianSample { path } = g.kind() {
            let dt = path.dt();
            let n = path.samples().len() - 1;
            let mut acc = 0.0;
            let mut prefix = Vec::with_capacity(n + 1);
            prefix.push(0.0);
            for i in 0..n {
                let lo = i as f64 * dt;
                acc += Self::cell_integral(p, &g, c, lo, lo + dt);
                prefix.push(acc);
            }
            Some((dt, prefix))
        } else {
            None
        };
        Ok(ATilde { p, c, g, prefix })
    }

    fn cell_integral(p: &ProblemSpec, g: &FunctionSpec, c: f64, lo: f64, hi: f64) -> f64 {
        let center = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let mut sum = 0.0;
        for (node, w) in GL4_NODES.iter().zip(&GL4_WEIGHTS) {
            let s = center + half * node;
            let arg = g.eval_raw(s) / p.x0() + 1.0;
            sum += w * p.a().eval_raw(s) * p.b().eval_raw(arg);
        }
        c * sum * half
    }

    /// `Ã(t)`.
    pub fn value(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("t must be nonnegative, got {t}")));
        }
        match &self.prefix {
            Some((dt, prefix)) => {
                let horizon = (prefix.len() - 1) as f64 * dt;
                if t > horizon * (1.0 + 1e-12) + 1e-300 {
                    return Err(Error::Domain(format!(
                        "t = {t} beyond the sampled-noise horizon {horizon}"
                    )));
                }
                let t = t.min(horizon);
                let i = ((t / dt).floor() as usize).min(prefix.len() - 2);
                let cell_lo = i as f64 * dt;
                let partial = if t > cell_lo {
                    Self::cell_integral(self.p, &self.g, self.c, cell_lo, t)
                } else {
                    0.0
                };
                Ok(prefix[i] + partial)
            }
            None => {
                let p = self.p;
                let g = &self.g;
                let integrand =
                    |s: f64| p.a().eval_raw(s) * p.b().eval_raw(g.eval_raw(s) / p.x0() + 1.0);
                Ok(self.c * integrate_fn(integrand, 0.0, t, DEFAULT_QUAD_TOL)?.value)
            }
        }
    }

    /// Solve `Ã(t) = y` on `[0, t_cap]` (the bracket expands upward while
    /// the noise stays evaluable).
    pub fn inverse(&self, y: f64, t_cap: f64) -> Result<f64> {
        invert_monotone(|t| self.value(t), y, (0.0, t_cap), DEFAULT_INVERT_TOL, Direction::Increasing)
    }
}

/// `Ã(t)` as a one-shot call.
pub fn a_tilde_of(p: &ProblemSpec, c: f64, t: f64) -> Result<f64> {
    ATilde::new(p, c)?.value(t)
}

/// The sub-multiplicative lower bound `Ã⁻¹(B(∞))`.
///
/// Returns `0` when `B(∞)` exceeds the attained range of `Ã` on
/// `[0, t_cap]` — a vacuous but valid lower bound.
pub fn submult_lower_bound(p: &ProblemSpec, c: f64, t_cap: f64) -> Result<f64> {
    let tr = p.transforms();
    let b_inf = tr.b_infinity(0.0)?;
    if !b_inf.is_finite() {
        return Err(Error::Precondition(
            "B(∞) is infinite: the baseline does not explode, nothing to bound".into(),
        ));
    }
    let atilde = ATilde::new(p, c)?;
    match atilde.inverse(b_inf, t_cap) {
        Ok(v) => Ok(v),
        Err(Error::TargetOutOfRange { .. }) => Ok(0.0),
        Err(e) => Err(e),
    }
}
