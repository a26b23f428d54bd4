//! Probability bounds on the explosion time when the noise is `|W|`.

use crate::error::{Error, Result};
use crate::stochastic::normal::{phi, NormalConvention};
use crate::transforms::{ProblemSpec, Tolerances};

fn clamp01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// Upper bound on `P(T_e ≤ t)` for `0 ≤ t < t_upper`:
/// `1 − Φ(β⁻¹(A(t)) / √t_upper)`, where `t_upper = T = A⁻¹(B(∞))`.
///
/// At `t = 0` the inner inverse is `+∞` and the bound degenerates to
/// `1 − Φ(∞)` (0.5 under the centered convention, 0 under the CDF one).
pub fn explosion_prob_bound(
    p: &ProblemSpec,
    t: f64,
    t_upper: f64,
    convention: NormalConvention,
) -> Result<f64> {
    explosion_prob_bound_with(p, t, t_upper, convention, Tolerances::default())
}

/// [`explosion_prob_bound`] with explicit tolerances.
pub fn explosion_prob_bound_with(
    p: &ProblemSpec,
    t: f64,
    t_upper: f64,
    convention: NormalConvention,
    tol: Tolerances,
) -> Result<f64> {
    if !(t >= 0.0) || !(t < t_upper) {
        return Err(Error::Domain(format!("need 0 ≤ t < T = {t_upper}, got t = {t}")));
    }
    let tr = p.transforms_with(tol);
    let a_t = tr.a_of(t)?;
    let arg = if a_t <= 0.0 { f64::INFINITY } else { tr.beta_inverse(a_t)? / t_upper.sqrt() };
    Ok(clamp01(1.0 - phi(arg.max(0.0), convention)?))
}

/// Upper bound on the conditional probability `P(T_e ≤ t | T_r < T)` for a
/// hitting level `r ≥ 0`:
///
/// ```text
/// [1 − Φ(r / √(A⁻¹(B(B̃_r⁻¹(A(t))))))] / [1 − Φ(r / √T)]
/// ```
///
/// When `A(t)` reaches the range supremum `β(r)` of `B̃_r`, the inner chain
/// tends to `T` and the ratio tends to 1; that saturation value is returned.
pub fn conditional_explosion_prob_bound(
    p: &ProblemSpec,
    t: f64,
    r: f64,
    t_upper: f64,
    convention: NormalConvention,
) -> Result<f64> {
    conditional_explosion_prob_bound_with(p, t, r, t_upper, convention, Tolerances::default())
}

/// [`conditional_explosion_prob_bound`] with explicit tolerances.
pub fn conditional_explosion_prob_bound_with(
    p: &ProblemSpec,
    t: f64,
    r: f64,
    t_upper: f64,
    convention: NormalConvention,
    tol: Tolerances,
) -> Result<f64> {
    if !(t >= 0.0) || !(t <= t_upper) {
        return Err(Error::Domain(format!("need 0 ≤ t ≤ T = {t_upper}, got t = {t}")));
    }
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("need r ≥ 0, got r = {r}")));
    }
    if r == 0.0 {
        // Numerator and denominator coincide: vacuous conditioning.
        return Ok(1.0);
    }
    let denominator = 1.0 - phi(r / t_upper.sqrt(), convention)?;
    if denominator < 1e-12 {
        return Err(Error::Domain(format!(
            "conditioning event has vanishing bound mass: 1 − Φ(r/√T) = {denominator}"
        )));
    }
    let tr = p.transforms_with(tol);
    let a_t = tr.a_of(t)?;
    let beta_r = tr.beta(r)?;
    let inner_time = if a_t >= beta_r {
        // Saturation: B̃_r⁻¹(A(t)) → ∞, B(∞) = B(∞), inner time → T.
        t_upper
    } else {
        let x_inner = tr.tilde_b_inverse_in_x(r, a_t)?;
        let b_of_x = tr.b_r(0.0, x_inner)?;
        tr.a_inverse(b_of_x)?
    };
    let numerator = if inner_time <= 0.0 {
        1.0 - phi(f64::INFINITY, convention)?
    } else {
        1.0 - phi(r / inner_time.sqrt(), convention)?
    };
    Ok(clamp01(numerator / denominator))
}

/// Upper bound on `P(first time Y reaches L ≤ t)` for a crossing level
/// `L > x0`: `1 − Φ(B̃⁻¹-in-r(L, A(t)) / √T)`.
///
/// Returns 1 when `A(t)` exceeds the attained range of `r ↦ B̃_r(L)` —
/// under the bound's logic the crossing is then certain before `t`.
pub fn crossing_prob_bound(
    p: &ProblemSpec,
    t: f64,
    level: f64,
    t_upper: f64,
    convention: NormalConvention,
) -> Result<f64> {
    crossing_prob_bound_with(p, t, level, t_upper, convention, Tolerances::default())
}

/// [`crossing_prob_bound`] with explicit tolerances.
pub fn crossing_prob_bound_with(
    p: &ProblemSpec,
    t: f64,
    level: f64,
    t_upper: f64,
    convention: NormalConvention,
    tol: Tolerances,
) -> Result<f64> {
    if !(level > p.x0()) {
        return Err(Error::Domain(format!(
            "crossing level must exceed x0 = {}, got {level}",
            p.x0()
        )));
    }
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("need t ≥ 0, got t = {t}")));
    }
    let tr = p.transforms_with(tol);
    let a_t = tr.a_of(t)?;
    let r = match tr.tilde_b_inverse_in_r(level, a_t) {
        Ok(r) => r,
        Err(Error::TargetOutOfRange { .. }) => return Ok(1.0),
        Err(e) => return Err(e),
    };
    Ok(clamp01(1.0 - phi(r.max(0.0) / t_upper.sqrt(), convention)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcat::FunctionSpec;
    use crate::transforms::Noise;

    /// The power-law instance with α = 1, a0 = 1, x0 = 1 (T = 1).
    fn power_law() -> ProblemSpec {
        ProblemSpec::new(
            1.0,
            FunctionSpec::constant(1.0).unwrap(),
            FunctionSpec::power(1.0, 2.0).unwrap(),
            Noise::Brownian,
        )
        .unwrap()
    }

    #[test]
    fn tail_bound_at_zero_is_the_degenerate_limit() {
        let p = power_law();
        let centered = explosion_prob_bound(&p, 0.0, 1.0, NormalConvention::Centered).unwrap();
        assert_eq!(centered, 0.5);
        let cdf = explosion_prob_bound(&p, 0.0, 1.0, NormalConvention::Cdf).unwrap();
        assert_eq!(cdf, 0.0);
    }

    #[test]
    fn tail_bound_matches_closed_form_shape() {
        // For this instance β⁻¹(A(t)) = 1/t − 1, so the bound is
        // 1 − Φ(1/t − 1) for every 0 < t < 1.
        let p = power_law();
        for conv in [NormalConvention::Centered, NormalConvention::Cdf] {
            for t in [0.2, 0.5, 0.8] {
                let got = explosion_prob_bound(&p, t, 1.0, conv).unwrap();
                let expected = 1.0 - phi(1.0 / t - 1.0, conv).unwrap();
                assert!((got - expected).abs() < 1e-6, "t = {t}: {got} vs {expected}");
            }
        }
    }

    #[test]
    fn conditional_bound_trivial_cases() {
        let p = power_law();
        // r = 0: vacuous conditioning, ratio 1.
        let v = conditional_explosion_prob_bound(&p, 0.25, 0.0, 1.0, NormalConvention::Cdf).unwrap();
        assert_eq!(v, 1.0);
        // t = 0 with r > 0: inner chain starts at B̃_r⁻¹(0) = x0 + r, finite bound.
        let v =
            conditional_explosion_prob_bound(&p, 0.0, 0.5, 1.0, NormalConvention::Cdf).unwrap();
        assert!((0.0..=1.0).contains(&v));
    }

    #[test]
    fn conditional_bound_inner_chain() {
        // a = 1, b = s², x0 = 1, r = 0.5, t = 0.25:
        // B̃_r⁻¹(0.25) solves ∫_{1.5}^x s⁻² = 0.25 → x = 1/(2/3 − 1/4) = 2.4;
        // B(2.4) = 1 − 1/2.4 = 7/12; A⁻¹ = 7/12; bound = [1 − Φ(0.5/√(7/12))]/[1 − Φ(0.5)].
        let p = power_law();
        for conv in [NormalConvention::Centered, NormalConvention::Cdf] {
            let v = conditional_explosion_prob_bound(&p, 0.25, 0.5, 1.0, conv).unwrap();
            let inner: f64 = 7.0 / 12.0;
            let expected = (1.0 - phi(0.5 / inner.sqrt(), conv).unwrap())
                / (1.0 - phi(0.5, conv).unwrap());
            assert!((v - expected.clamp(0.0, 1.0)).abs() < 1e-6, "{v} vs {expected}");
        }
    }

    #[test]
    fn crossing_bound_boundary_algebra() {
        let p = power_law();
        // t = 0: the inner inverse solves B̃_r(L) = 0, i.e. r = L − x0.
        for conv in [NormalConvention::Centered, NormalConvention::Cdf] {
            let v = crossing_prob_bound(&p, 0.0, 4.0, 1.0, conv).unwrap();
            let expected = 1.0 - phi(3.0, conv).unwrap();
            assert!((v - expected).abs() < 1e-6);
        }
        // Hand-computed interior value: L = 4, t = 0.2 →
        // 1/(1+r) − 1/4 = 0.2 → r = 1/0.45 − 1 ≈ 1.2222.
        let v = crossing_prob_bound(&p, 0.2, 4.0, 1.0, NormalConvention::Cdf).unwrap();
        let r = 1.0 / 0.45 - 1.0;
        let expected = 1.0 - phi(r, NormalConvention::Cdf).unwrap();
        assert!((v - expected).abs() < 1e-6, "{v} vs {expected}");
        // Level at or below x0 is rejected.
        assert!(crossing_prob_bound(&p, 0.1, 1.0, 1.0, NormalConvention::Cdf).is_err());
    }
}
