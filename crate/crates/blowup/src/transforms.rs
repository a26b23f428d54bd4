//! Integral transforms of a problem instance and their inverses.
//!
//! For a problem `X_t = x0 + ∫₀ᵗ a(s) b(X_s) ds + g(t)` the transforms are
//!
//! ```text
//! A(t)    = ∫₀ᵗ a(s) ds
//! B_r(x)  = ∫_{x0−r}^x ds/b(s)          0 ≤ r ≤ x0,  B = B_0
//! B̃_r(x)  = ∫_{x0+r}^x ds/b(s)          r ≥ −x0      (equals B_{−r})
//! B̃^x(r)  = B̃_r(x)                      r ∈ [−x0, x−x0], decreasing in r
//! β(r)    = ∫_{x0+r}^∞ ds/b(s)          r ≥ −x0      (equals B̃^∞(r))
//! ```
//!
//! `A`, `B_r` and `B̃_r(·)` are nonnegative, continuous and increasing;
//! `B̃^x` and `β` are decreasing. All inverses are computed numerically by
//! bracketed monotone inversion with automatic upward bracket expansion.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::funcat::{
    integrate, integrate_improper, invert_monotone, Direction, FunctionSpec, Monotonicity,
    QuadratureResult, DEFAULT_IMPROPER_TOL, DEFAULT_QUAD_TOL,
};
use crate::stochastic::NoisePath;

/// Default function-space tolerance for the monotone inversions.
pub const DEFAULT_INVERT_TOL: f64 = 1e-8;

/// Noise component of a problem: a fixed function (closed form or a sampled
/// path) or a placeholder for Brownian noise to be sampled per seed.
#[derive(Debug, Clone, PartialEq)]
pub enum Noise {
    Fixed(FunctionSpec),
    Brownian,
}

impl Noise {
    pub fn zero() -> Self {
        Noise::Fixed(FunctionSpec::constant(0.0).expect("constant 0"))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Noise::Fixed(f) if f.is_zero())
    }

    /// The concrete noise function; errors on the Brownian placeholder.
    pub fn as_fixed(&self) -> Result<&FunctionSpec> {
        match self {
            Noise::Fixed(f) => Ok(f),
            Noise::Brownian => Err(Error::Precondition(
                "noise is a Brownian placeholder; sample a path first".into(),
            )),
        }
    }
}

/// A full problem instance `(x0, a, b, g)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    x0: f64,
    a: FunctionSpec,
    b: FunctionSpec,
    g: Noise,
    b_nondecreasing: bool,
}

impl ProblemSpec {
    pub fn new(x0: f64, a: FunctionSpec, b: FunctionSpec, g: Noise) -> Result<Self> {
        if !x0.is_finite() || x0 <= 0.0 {
            return Err(Error::Domain(format!("x0 must be positive, got {x0}")));
        }
        if !a.strictly_positive_interior() {
            return Err(Error::Domain(
                "intensity a must be a strictly positive closed-form function".into(),
            ));
        }
        a.evaluate(0.0).map_err(|_| {
            Error::Domain("intensity a must be finite at t = 0".into())
        })?;
        if !b.strictly_positive_interior() {
            return Err(Error::Domain(
                "drift b must be a strictly positive closed-form function".into(),
            ));
        }
        if let Noise::Fixed(f) = &g {
            if !f.valid_noise() {
                return Err(Error::Domain(
                    "noise g must be nonnegative and finite on its domain".into(),
                ));
            }
        }
        let b_nondecreasing = b.monotonicity() == Monotonicity::NonDecreasing;
        Ok(ProblemSpec { x0, a, b, g, b_nondecreasing })
    }

    /// Noiseless instance (`g ≡ 0`).
    pub fn noiseless(x0: f64, a: FunctionSpec, b: FunctionSpec) -> Result<Self> {
        Self::new(x0, a, b, Noise::zero())
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn a(&self) -> &FunctionSpec {
        &self.a
    }

    pub fn b(&self) -> &FunctionSpec {
        &self.b
    }

    pub fn g(&self) -> &Noise {
        &self.g
    }

    pub fn b_nondecreasing(&self) -> bool {
        self.b_nondecreasing
    }

    /// Same problem with the noise replaced by a concrete sampled path.
    pub fn with_noise_path(&self, path: Arc<NoisePath>) -> ProblemSpec {
        ProblemSpec {
            x0: self.x0,
            a: self.a.clone(),
            b: self.b.clone(),
            g: Noise::Fixed(FunctionSpec::sampled(path)),
            b_nondecreasing: self.b_nondecreasing,
        }
    }

    /// Same problem with a different initial value.
    pub fn with_x0(&self, x0: f64) -> Result<ProblemSpec> {
        Self::new(x0, self.a.clone(), self.b.clone(), self.g.clone())
    }

    /// Same problem with the noise dropped.
    pub fn without_noise(&self) -> ProblemSpec {
        ProblemSpec {
            x0: self.x0,
            a: self.a.clone(),
            b: self.b.clone(),
            g: Noise::zero(),
            b_nondecreasing: self.b_nondecreasing,
        }
    }

    /// Running maximum of the noise over `[0, t]` (`ĝ(t)`).
    pub fn noise_sup(&self, t: f64) -> Result<f64> {
        self.g.as_fixed()?.sup_on_prefix(t)
    }

    pub fn transforms(&self) -> Transforms<'_> {
        self.transforms_with(Tolerances::default())
    }

    pub fn transforms_with(&self, tol: Tolerances) -> Transforms<'_> {
        let recip_b = self.b.reciprocal().expect("validated drift has a reciprocal");
        Transforms { p: self, tol, recip_b }
    }
}

/// Tolerance bundle shared by the transform operations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Absolute tolerance for proper integrals.
    pub quad: f64,
    /// Absolute tolerance for improper integrals.
    pub improper: f64,
    /// Function-space tolerance for monotone inversions.
    pub invert: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            quad: DEFAULT_QUAD_TOL,
            improper: DEFAULT_IMPROPER_TOL,
            invert: DEFAULT_INVERT_TOL,
        }
    }
}

/// Transform view over a problem. Pure and thread-safe; values of `+∞`
/// indicate a certified divergent integral.
pub struct Transforms<'p> {
    p: &'p ProblemSpec,
    tol: Tolerances,
    recip_b: FunctionSpec,
}

fn finite_or_divergent(r: QuadratureResult, what: &str) -> Result<f64> {
    if r.converged {
        Ok(r.value)
    } else {
        Err(Error::QuadratureNonConvergence {
            lo: f64::NAN,
            hi: r.cutoff_used.unwrap_or(f64::NAN),
            estimate: r.value,
            error: r.abs_error_estimate,
            tol: f64::NAN,
        })
        .map_err(|e| match e {
            Error::QuadratureNonConvergence { estimate, error, .. } => Error::Inconsistent(format!(
                "{what}: improper integral ambiguous (estimate {estimate}, error {error})"
            )),
            other => other,
        })
    }
}

impl<'p> Transforms<'p> {
    pub fn tolerances(&self) -> Tolerances {
        self.tol
    }

    pub fn problem(&self) -> &ProblemSpec {
        self.p
    }

    /// `A(t) = ∫₀ᵗ a(s) ds`.
    pub fn a_of(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("t must be nonnegative, got {t}")));
        }
        Ok(integrate(&self.p.a, 0.0, t, self.tol.quad)?.value)
    }

    /// `A(∞)`, possibly `+∞`.
    pub fn a_infinity(&self) -> Result<f64> {
        let r = integrate_improper(&self.p.a, 0.0, self.tol.improper)?;
        finite_or_divergent(r, "A(∞)")
    }

    /// Inverse of `A`; defined for `0 ≤ y < A(∞)`.
    pub fn a_inverse(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0) {
            return Err(Error::Domain(format!("target must be nonnegative, got {y}")));
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        let a_inf = self.a_infinity()?;
        if y >= a_inf {
            return Err(Error::TargetOutOfRange { target: y, attained_lo: 0.0, attained_hi: a_inf });
        }
        invert_monotone(|t| self.a_of(t), y, (0.0, 1.0), self.tol.invert, Direction::Increasing)
    }

    /// `B_r(x) = ∫_{x0−r}^x ds/b(s)` for `0 ≤ r ≤ x0`; `B = B_0`.
    pub fn b_r(&self, r: f64, x: f64) -> Result<f64> {
        if !(0.0..=self.p.x0).contains(&r) {
            return Err(Error::Domain(format!("need 0 ≤ r ≤ x0 = {}, got r = {r}", self.p.x0)));
        }
        self.inv_b_integral(self.p.x0 - r, x)
    }

    /// `B_r(∞)`, possibly `+∞`.
    pub fn b_infinity(&self, r: f64) -> Result<f64> {
        if !(0.0..=self.p.x0).contains(&r) {
            return Err(Error::Domain(format!("need 0 ≤ r ≤ x0 = {}, got r = {r}", self.p.x0)));
        }
        let res = integrate_improper(&self.recip_b, self.p.x0 - r, self.tol.improper)?;
        finite_or_divergent(res, "B_r(∞)")
    }

    /// Inverse of `x ↦ B_r(x)`; defined for `0 ≤ y < B_r(∞)`.
    pub fn b_r_inverse(&self, r: f64, y: f64) -> Result<f64> {
        if !(y >= 0.0) {
            return Err(Error::Domain(format!("target must be nonnegative, got {y}")));
        }
        let lo = self.p.x0 - r;
        if y == 0.0 {
            return Ok(lo);
        }
        let b_inf = self.b_infinity(r)?;
        if y >= b_inf {
            return Err(Error::TargetOutOfRange { target: y, attained_lo: 0.0, attained_hi: b_inf });
        }
        invert_monotone(
            |x| self.b_r(r, x),
            y,
            (lo, lo + 1.0),
            self.tol.invert,
            Direction::Increasing,
        )
    }

    /// `B̃_r(x) = ∫_{x0+r}^x ds/b(s)` for `r ≥ −x0` (identically `B_{−r}`).
    pub fn tilde_b(&self, r: f64, x: f64) -> Result<f64> {
        if !(r >= -self.p.x0) {
            return Err(Error::Domain(format!("need r ≥ −x0 = {}, got r = {r}", -self.p.x0)));
        }
        self.inv_b_integral(self.p.x0 + r, x)
    }

    /// Inverse of `x ↦ B̃_r(x)` on `[x0+r, ∞)`.
    pub fn tilde_b_inverse_in_x(&self, r: f64, y: f64) -> Result<f64> {
        if !(y >= 0.0) {
            return Err(Error::Domain(format!("target must be nonnegative, got {y}")));
        }
        let lo = self.p.x0 + r;
        if y == 0.0 {
            return Ok(lo);
        }
        let beta_r = self.beta_allow_infinite(r)?;
        if y >= beta_r {
            return Err(Error::TargetOutOfRange { target: y, attained_lo: 0.0, attained_hi: beta_r });
        }
        invert_monotone(
            |x| self.tilde_b(r, x),
            y,
            (lo, lo + 1.0),
            self.tol.invert,
            Direction::Increasing,
        )
    }

    /// Inverse of `r ↦ B̃^x(r) = B̃_r(x)` on `[−x0, x−x0]` (decreasing).
    pub fn tilde_b_inverse_in_r(&self, x: f64, y: f64) -> Result<f64> {
        if !(x >= self.p.x0) {
            return Err(Error::Domain(format!("need x ≥ x0 = {}, got x = {x}", self.p.x0)));
        }
        if !(y >= 0.0) {
            return Err(Error::Domain(format!("target must be nonnegative, got {y}")));
        }
        if y == 0.0 {
            return Ok(x - self.p.x0);
        }
        if x == self.p.x0 {
            // B̃^x degenerates to the single point r = 0 with value 0.
            return Err(Error::TargetOutOfRange { target: y, attained_lo: 0.0, attained_hi: 0.0 });
        }
        invert_monotone(
            |r| self.tilde_b(r, x),
            y,
            (-self.p.x0, x - self.p.x0),
            self.tol.invert,
            Direction::Decreasing,
        )
    }

    /// `β(r) = ∫_{x0+r}^∞ ds/b(s)`; requires a convergent `1/b` tail.
    /// May be `+∞` at the left endpoint `r = −x0` when `1/b` is singular at 0.
    pub fn beta(&self, r: f64) -> Result<f64> {
        if self.recip_b.tail_decay() == crate::funcat::quad::TailDecay::Diverges {
            return Err(Error::Precondition(
                "β is identically infinite: ∫^∞ ds/b(s) diverges".into(),
            ));
        }
        self.beta_allow_infinite(r)
    }

    fn beta_allow_infinite(&self, r: f64) -> Result<f64> {
        if !(r >= -self.p.x0) {
            return Err(Error::Domain(format!("need r ≥ −x0 = {}, got r = {r}", -self.p.x0)));
        }
        let res = integrate_improper(&self.recip_b, self.p.x0 + r, self.tol.improper)?;
        finite_or_divergent(res, "β(r)")
    }

    /// Inverse of `β`; defined for `0 < y ≤ β(−x0)`.
    pub fn beta_inverse(&self, y: f64) -> Result<f64> {
        if self.recip_b.tail_decay() == crate::funcat::quad::TailDecay::Diverges {
            return Err(Error::Precondition(
                "β is identically infinite: ∫^∞ ds/b(s) diverges".into(),
            ));
        }
        if !(y > 0.0) || !y.is_finite() {
            let hi = self.beta(-self.p.x0).unwrap_or(f64::INFINITY);
            return Err(Error::TargetOutOfRange { target: y, attained_lo: 0.0, attained_hi: hi });
        }
        let lo = -self.p.x0;
        invert_monotone(
            |r| self.beta_allow_infinite(r),
            y,
            (lo, lo + 1.0),
            self.tol.invert,
            Direction::Decreasing,
        )
    }

    fn inv_b_integral(&self, lo: f64, x: f64) -> Result<f64> {
        if !(x >= lo - 1e-12 * lo.abs().max(1.0)) {
            return Err(Error::Domain(format!("need x ≥ {lo}, got x = {x}")));
        }
        let x = x.max(lo);
        Ok(integrate(&self.recip_b, lo, x, self.tol.quad)?.value)
    }
}

// --- serde ---

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case", deny_unknown_fields)]
enum NoiseRepr {
    Constant { k: f64 },
    Power { k: f64, p: f64 },
    ShiftedPower { k: f64, p: f64, s0: f64 },
    Exponential { k: f64, c: f64 },
    Brownian,
}

impl Serialize for Noise {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Noise::Fixed(f) => f.serialize(serializer),
            Noise::Brownian => NoiseRepr::Brownian.serialize(serializer),
        }
    }
}

impl<'de> Deserialize<'de> for Noise {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = NoiseRepr::deserialize(deserializer)?;
        let fixed = match repr {
            NoiseRepr::Brownian => return Ok(Noise::Brownian),
            NoiseRepr::Constant { k } => FunctionSpec::constant(k),
            NoiseRepr::Power { k, p } => FunctionSpec::power(k, p),
            NoiseRepr::ShiftedPower { k, p, s0 } => FunctionSpec::shifted_power(k, p, s0),
            NoiseRepr::Exponential { k, c } => FunctionSpec::exponential(k, c),
        };
        fixed.map(Noise::Fixed).map_err(|e| D::Error::custom(e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemRepr {
    x0: f64,
    a: FunctionSpec,
    b: FunctionSpec,
    g: Noise,
}

impl Serialize for ProblemSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ProblemRepr {
            x0: self.x0,
            a: self.a.clone(),
            b: self.b.clone(),
            g: self.g.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ProblemSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ProblemRepr::deserialize(deserializer)?;
        ProblemSpec::new(repr.x0, repr.a, repr.b, repr.g)
            .map_err(|e| D::Error::custom(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic_problem() -> ProblemSpec {
        // a = 1, b = s², x0 = 1: the workhorse instance with T = 1.
        ProblemSpec::noiseless(
            1.0,
            FunctionSpec::constant(1.0).unwrap(),
            FunctionSpec::power(1.0, 2.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn validates_problem_construction() {
        let a = FunctionSpec::constant(1.0).unwrap();
        let b = FunctionSpec::power(1.0, 2.0).unwrap();
        assert!(ProblemSpec::noiseless(0.0, a.clone(), b.clone()).is_err());
        assert!(ProblemSpec::noiseless(-1.0, a.clone(), b.clone()).is_err());
        let neg = FunctionSpec::constant(-1.0).unwrap();
        assert!(ProblemSpec::noiseless(1.0, neg.clone(), b.clone()).is_err());
        assert!(ProblemSpec::noiseless(1.0, a.clone(), neg.clone()).is_err());
        assert!(ProblemSpec::new(
            1.0,
            a.clone(),
            b.clone(),
            Noise::Fixed(FunctionSpec::constant(-0.5).unwrap())
        )
        .is_err());
        assert!(ProblemSpec::new(1.0, a, b, Noise::Brownian).is_ok());
    }

    #[test]
    fn a_transform_closed_forms() {
        let p = ProblemSpec::noiseless(
            1.0,
            FunctionSpec::constant(2.0).unwrap(),
            FunctionSpec::power(1.0, 2.0).unwrap(),
        )
        .unwrap();
        let tr = p.transforms();
        assert!((tr.a_of(3.0).unwrap() - 6.0).abs() < 1e-12);
        assert_eq!(tr.a_of(0.0).unwrap(), 0.0);
        assert!((tr.a_inverse(1.0).unwrap() - 0.5).abs() < 1e-8);
        assert_eq!(tr.a_inverse(0.0).unwrap(), 0.0);

        let decaying = ProblemSpec::noiseless(
            1.0,
            FunctionSpec::exponential(1.0, -1.0).unwrap(),
            FunctionSpec::power(1.0, 2.0).unwrap(),
        )
        .unwrap();
        let tr = decaying.transforms();
        assert!((tr.a_infinity().unwrap() - 1.0).abs() < 1e-7);
        assert!((tr.a_inverse(0.5).unwrap() - 2.0f64.ln()).abs() < 1e-7);
        // y at/above A(∞) is out of range: the no-finite-explosion branch.
        assert!(matches!(tr.a_inverse(1.0), Err(Error::TargetOutOfRange { .. })));
    }

    #[test]
    fn b_transform_closed_forms() {
        let p = quadratic_problem();
        let tr = p.transforms();
        // ∫₁² s⁻² ds = 1 − 1/2
        assert!((tr.b_r(0.0, 2.0).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(tr.b_r(0.3, 0.7).unwrap(), 0.0);
        assert!((tr.b_infinity(0.0).unwrap() - 1.0).abs() < 1e-7);
        assert!((tr.b_r_inverse(0.0, 0.5).unwrap() - 2.0).abs() < 1e-7);

        // Power-law drift closed form: B_r(x) = (1/α)[(x0−r)^{−α} − x^{−α}],
        // checked at α = 1, x0 = 1, r = 0, x = 4.
        assert!((tr.b_r(0.0, 4.0).unwrap() - 0.75).abs() < 1e-12);

        // Cubic drift: B(∞) = ∫₁^∞ 4 s^{-3} ds = 2.
        let cubic = ProblemSpec::noiseless(
            1.0,
            FunctionSpec::constant(1.0).unwrap(),
            FunctionSpec::power(0.25, 3.0).unwrap(),
        )
        .unwrap();
        assert!((cubic.transforms().b_infinity(0.0).unwrap() - 2.0).abs() < 1e-7);

        // Linear drift never explodes: B(∞) = ∞.
        let linear = ProblemSpec::noiseless(
            1.0,
            FunctionSpec::constant(1.0).unwrap(),
            FunctionSpec::constant(1.0).unwrap(),
        )
        .unwrap();
        assert!(linear.transforms().b_infinity(0.0).unwrap().is_infinite());
    }

    #[test]
    fn tilde_b_and_its_two_inverses() {
        let p = quadratic_problem();
        let tr = p.transforms();
        // ∫₂⁴ s⁻² ds = 1/2 − 1/4
        assert!((tr.tilde_b(1.0, 4.0).unwrap() - 0.25).abs() < 1e-12);
        // Definitional coincidence at r = 0.
        let x = 3.7;
        assert_eq!(tr.tilde_b(0.0, x).unwrap(), tr.b_r(0.0, x).unwrap());
        // Inverse in x.
        assert!((tr.tilde_b_inverse_in_x(1.0, 0.25).unwrap() - 4.0).abs() < 1e-6);
        // Inverse in r, same numbers in the other coordinate.
        assert!((tr.tilde_b_inverse_in_r(4.0, 0.25).unwrap() - 1.0).abs() < 1e-6);
        // Round trip at r = 0.
        let y = tr.tilde_b(0.0, x).unwrap();
        assert!(tr.tilde_b_inverse_in_r(x, y).unwrap().abs() < 1e-6);
    }

    #[test]
    fn beta_and_its_inverse() {
        let p = quadratic_problem();
        let tr = p.transforms();
        // β(r) = ∫_{1+r}^∞ s⁻² ds = 1/(1+r)
        assert!((tr.beta(0.0).unwrap() - 1.0).abs() < 1e-7);
        assert!((tr.beta(1.0).unwrap() - 0.5).abs() < 1e-7);
        assert!((tr.beta_inverse(0.5).unwrap() - 1.0).abs() < 1e-6);
        // At the left endpoint β(−x0) = ∫₀^∞ s⁻² ds = ∞ for this drift.
        assert!(tr.beta(-1.0).unwrap().is_infinite());
        // Divergent tail: constant drift has β ≡ ∞.
        let linear = ProblemSpec::noiseless(
            1.0,
            FunctionSpec::constant(1.0).unwrap(),
            FunctionSpec::constant(1.0).unwrap(),
        )
        .unwrap();
        assert!(matches!(linear.transforms().beta(0.0), Err(Error::Precondition(_))));

        // Endpoint round trip for a drift with finite β(−x0):
        // b = (s+1)², β(r) = 1/(2+r), β(−x0) = 1.
        let shifted = ProblemSpec::noiseless(
            1.0,
            FunctionSpec::constant(1.0).unwrap(),
            FunctionSpec::shifted_power(1.0, 2.0, -1.0).unwrap(),
        )
        .unwrap();
        let ts = shifted.transforms();
        let top = ts.beta(-1.0).unwrap();
        assert!((top - 1.0).abs() < 1e-7);
        assert!((ts.beta_inverse(top).unwrap() + 1.0).abs() < 1e-6);
    }

    #[test]
    fn domain_violations_are_rejected() {
        let p = quadratic_problem();
        let tr = p.transforms();
        assert!(matches!(tr.b_r(-0.1, 2.0), Err(Error::Domain(_))), "r below 0");
        assert!(matches!(tr.b_r(1.5, 2.0), Err(Error::Domain(_))), "r above x0");
        assert!(matches!(tr.b_r(0.0, 0.5), Err(Error::Domain(_))), "x below x0 - r");
        assert!(matches!(tr.tilde_b(-1.5, 2.0), Err(Error::Domain(_))), "r below -x0");
        assert!(matches!(tr.tilde_b(1.0, 1.5), Err(Error::Domain(_))), "x below x0 + r");
        assert!(matches!(tr.a_of(-0.1), Err(Error::Domain(_))));
        // For a drift finite at 0 the range of r ↦ B̃_r(x) is bounded and
        // targets above it are rejected with the attained range.
        let shifted = ProblemSpec::noiseless(
            1.0,
            FunctionSpec::constant(1.0).unwrap(),
            FunctionSpec::shifted_power(1.0, 2.0, -1.0).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            shifted.transforms().tilde_b_inverse_in_r(4.0, 5.0),
            Err(Error::TargetOutOfRange { .. })
        ), "target above the attained range of B̃^x");
    }

    #[test]
    fn tilde_b_equals_b_of_negated_r_exactly() {
        let p = quadratic_problem();
        let tr = p.transforms();
        for r in [-0.8, -0.5, -0.25, 0.0] {
            for x in [1.2, 2.0, 5.0] {
                assert_eq!(tr.tilde_b(r, x).unwrap(), tr.b_r(-r, x).unwrap());
            }
        }
    }

    #[test]
    fn problem_serde_round_trip() {
        let p = ProblemSpec::new(
            1.0,
            FunctionSpec::exponential(1.0, -1.0).unwrap(),
            FunctionSpec::power(0.25, 3.0).unwrap(),
            Noise::Fixed(FunctionSpec::exponential(1.0, 1.0).unwrap()),
        )
        .unwrap();
        let json = serde_json::to_string(&p).unwrap();
        let back: ProblemSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);

        let brownian: ProblemSpec = serde_json::from_str(
            r#"{"x0": 1.0,
                "a": {"kind": "constant", "params": {"k": 1.0}},
                "b": {"kind": "power", "params": {"k": 1.0, "p": 2.0}},
                "g": {"kind": "brownian"}}"#,
        )
        .unwrap();
        assert_eq!(*brownian.g(), Noise::Brownian);

        // Invalid instances are rejected during deserialization.
        let bad: std::result::Result<ProblemSpec, _> = serde_json::from_str(
            r#"{"x0": -1.0,
                "a": {"kind": "constant", "params": {"k": 1.0}},
                "b": {"kind": "power", "params": {"k": 1.0, "p": 2.0}},
                "g": {"kind": "brownian"}}"#,
        );
        assert!(bad.is_err());
    }
}
