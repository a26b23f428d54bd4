//! The noise-adjusted drift integral `B̄` along a computed trajectory and
//! the explosion-time identity built on it.

use crate::dynamics::{StopReason, Trajectory};
use crate::error::{Error, Result};
use crate::funcat::{integrate_fn, integrate_improper, DEFAULT_IMPROPER_TOL, DEFAULT_QUAD_TOL};
use crate::osgood::{ExplosionReport, Method};
use crate::transforms::ProblemSpec;

/// `B̄(y) = ∫_{x0}^y ds / b(s + g(Y⁻¹(s)))`, with `Y⁻¹` obtained by
/// monotone-cubic interpolation of the trajectory.
pub fn bbar_of(p: &ProblemSpec, traj: &Trajectory, y: f64) -> Result<f64> {
    let g = p.g().as_fixed()?.clone();
    if !(y >= p.x0()) {
        return Err(Error::Domain(format!("need y ≥ x0 = {}, got y = {y}", p.x0())));
    }
    if y > traj.end_value() * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "y = {y} beyond the attained trajectory range (max {})",
            traj.end_value()
        )));
    }
    if y == p.x0() {
        return Ok(0.0);
    }
    let y_inverse = traj.inverse_interpolator()?;
    let b = p.b().clone();
    let integrand = move |s: f64| 1.0 / b.eval_raw(s + g.eval_raw(y_inverse.eval(s)));
    Ok(integrate_fn(integrand, p.x0(), y.min(traj.end_value()), DEFAULT_QUAD_TOL)?.value)
}

/// `B̄(∞)`: the integral along the attained trajectory range plus the exact
/// catalog tail with the noise frozen at its final trajectory value (past
/// the cap the frozen-noise error is `O(g / y)` and negligible).
pub fn bbar_infinity(p: &ProblemSpec, traj: &Trajectory) -> Result<f64> {
    let g = p.g().as_fixed()?;
    let y_top = traj.end_value();
    let head = bbar_of(p, traj, y_top)?;
    let g_top = g.eval_raw(traj.end_time());
    let shifted_recip = p
        .b()
        .shift_left(g_top)
        .and_then(|f| f.reciprocal())
        .ok_or_else(|| Error::Precondition("drift does not admit a closed-form tail".into()))?;
    let tail = integrate_improper(&shifted_recip, y_top, DEFAULT_IMPROPER_TOL)?;
    if !tail.converged {
        return Err(Error::Inconsistent("B̄ tail integral did not converge".into()));
    }
    Ok(head + tail.value)
}

/// Explosion time of the noisy problem from the identity `t_e = A⁻¹(B̄(∞))`,
/// cross-checked against the trajectory's blow-up bracket.
///
/// Hypotheses: `b` non-decreasing and `B(∞) < A(∞)`. A trajectory that did
/// not blow up contradicts them and is reported as inconsistent.
pub fn explosion_time_bbar(p: &ProblemSpec, traj: &Trajectory) -> Result<ExplosionReport> {
    if !p.b_nondecreasing() {
        return Err(Error::Precondition("explosion_time_bbar requires a non-decreasing drift".into()));
    }
    let tr = p.transforms();
    let b_inf = tr.b_infinity(0.0)?;
    let a_inf = tr.a_infinity()?;
    if !(b_inf < a_inf) {
        return Err(Error::Precondition(format!(
            "hypothesis B(∞) < A(∞) fails: B(∞) = {b_inf}, A(∞) = {a_inf}"
        )));
    }
    let blow = match (traj.stop(), traj.blow_up()) {
        (StopReason::CapHit, Some(b)) => b,
        _ => {
            return Err(Error::Inconsistent(
                "hypotheses guarantee finite-time blow-up but the trajectory did not reach the cap; \
                 extend t_max or lower y_cap"
                    .into(),
            ))
        }
    };
    let bbar_inf = bbar_infinity(p, traj)?;
    let t_e = tr.a_inverse(bbar_inf)?;

    let mid = 0.5 * (blow.t_lo + blow.t_hi);
    let half_width = 0.5 * (blow.t_hi - blow.t_lo);
    let slack = half_width + 1e-5 * (1.0 + t_e.abs());
    if (t_e - mid).abs() > slack {
        return Err(Error::Inconsistent(format!(
            "explosion-time identity t_e = {t_e} disagrees with the numeric bracket \
             [{}, {}]",
            blow.t_lo, blow.t_hi
        )));
    }
    Ok(ExplosionReport {
        explodes: true,
        t_point: t_e,
        t_bracket: Some((blow.t_lo.min(t_e), blow.t_hi.max(t_e))),
        method: Method::OsgoodExact,
        tolerances: tr.tolerances(),
    })
}

/// Checks `ĝ(t) < b(x0) · ∫_t^∞ a(s) ds`, the smallness condition under
/// which finite-time blow-up of the noisy solution forces `B(∞) < A(∞)`.
/// Trivially true when `A(∞) = ∞`.
pub fn small_noise_hypothesis_holds(p: &ProblemSpec, t: f64) -> Result<bool> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("t must be nonnegative, got {t}")));
    }
    let tr = p.transforms();
    let a_inf = tr.a_infinity()?;
    if a_inf.is_infinite() {
        return Ok(true);
    }
    let g_hat = p.noise_sup(t)?;
    let b_at_x0 = p.b().evaluate(p.x0())?;
    Ok(g_hat < b_at_x0 * (a_inf - tr.a_of(t)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{solve_noisy, SolveControls};
    use crate::funcat::FunctionSpec;
    use crate::transforms::Noise;

    fn with_constant_noise(gamma: f64) -> ProblemSpec {
        ProblemSpec::new(
            1.0,
            FunctionSpec::constant(1.0).unwrap(),
            FunctionSpec::power(1.0, 2.0).unwrap(),
            Noise::Fixed(FunctionSpec::constant(gamma).unwrap()),
        )
        .unwrap()
    }

    #[test]
    fn bbar_collapses_to_b_without_noise() {
        let p = with_constant_noise(0.0);
        let traj = solve_noisy(&p, &SolveControls::new(0.9)).unwrap();
        let tr = p.transforms();
        for y in [1.0, 2.0, 5.0, 9.0] {
            let lhs = bbar_of(&p, &traj, y).unwrap();
            let rhs = tr.b_r(0.0, y).unwrap();
            assert!((lhs - rhs).abs() < 1e-7, "y = {y}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn bbar_infinity_matches_hand_integral_for_unit_noise() {
        // ∫₁^∞ ds/(s+1)² = 1/2 and A⁻¹(1/2) = 1/2 matches the observed blow-up.
        let p = with_constant_noise(1.0);
        let traj = solve_noisy(&p, &SolveControls::new(1.0)).unwrap();
        assert_eq!(bbar_of(&p, &traj, 1.0).unwrap(), 0.0);
        let bb = bbar_infinity(&p, &traj).unwrap();
        assert!((bb - 0.5).abs() < 1e-6, "B̄(∞) = {bb}");
        let t_e = p.transforms().a_inverse(bb).unwrap();
        let blow = traj.blow_up().unwrap();
        assert!((t_e - 0.5).abs() < 1e-6);
        assert!(blow.t_lo <= t_e + 1e-9 && t_e <= blow.t_hi + 1e-9);
    }

    #[test]
    fn explosion_time_identity_agrees_with_bracket() {
        let p = with_constant_noise(1.0);
        let traj = solve_noisy(&p, &SolveControls::new(1.0)).unwrap();
        let report = explosion_time_bbar(&p, &traj).unwrap();
        assert!(report.explodes);
        assert!((report.t_point - 0.5).abs() < 1e-4, "t_e = {}", report.t_point);
        let (lo, hi) = report.t_bracket.unwrap();
        assert!(lo <= report.t_point && report.t_point <= hi);
    }

    #[test]
    fn identity_reduces_to_osgood_without_noise() {
        let p = with_constant_noise(0.0);
        let traj = solve_noisy(&p, &SolveControls::new(1.5)).unwrap();
        let report = explosion_time_bbar(&p, &traj).unwrap();
        assert!((report.t_point - 1.0).abs() < 1e-5);
    }

    #[test]
    fn identity_rejects_instances_failing_the_hypothesis() {
        // The counterexample blows up but has B(∞) = 2 ≥ 1 = A(∞).
        let p = ProblemSpec::new(
            1.0,
            FunctionSpec::exponential(1.0, -1.0).unwrap(),
            FunctionSpec::power(0.25, 3.0).unwrap(),
            Noise::Fixed(FunctionSpec::exponential(1.0, 1.0).unwrap()),
        )
        .unwrap();
        let traj = solve_noisy(&p, &SolveControls::new(5.0).with_y_cap(1e6)).unwrap();
        assert!(traj.blow_up().is_some());
        assert!(matches!(explosion_time_bbar(&p, &traj), Err(Error::Precondition(_))));
    }

    #[test]
    fn small_noise_condition_examples() {
        // g ≡ 0 with A(∞) finite and positive remainder: trivially true.
        let p0 = ProblemSpec::noiseless(
            1.0,
            FunctionSpec::exponential(1.0, -1.0).unwrap(),
            FunctionSpec::power(0.25, 3.0).unwrap(),
        )
        .unwrap();
        assert!(small_noise_hypothesis_holds(&p0, 1.0).unwrap());

        // Counterexample at t = 1: ĝ(1) = e, b(1)·∫₁^∞ e^{-s} ds = e^{-1}/4.
        let p = ProblemSpec::new(
            1.0,
            FunctionSpec::exponential(1.0, -1.0).unwrap(),
            FunctionSpec::power(0.25, 3.0).unwrap(),
            Noise::Fixed(FunctionSpec::exponential(1.0, 1.0).unwrap()),
        )
        .unwrap();
        assert!(!small_noise_hypothesis_holds(&p, 1.0).unwrap());

        // Constant noise: the condition is γ < b(x0)(A(∞) − A(t)).
        let gamma = 0.05;
        let pq = ProblemSpec::new(
            1.0,
            FunctionSpec::exponential(1.0, -1.0).unwrap(),
            FunctionSpec::power(0.25, 3.0).unwrap(),
            Noise::Fixed(FunctionSpec::constant(gamma).unwrap()),
        )
        .unwrap();
        let tr = pq.transforms();
        for t in [0.0, 0.5, 2.0, 5.0] {
            let expected = gamma < 0.25 * (tr.a_infinity().unwrap() - tr.a_of(t).unwrap());
            assert_eq!(small_noise_hypothesis_holds(&pq, t).unwrap(), expected, "t = {t}");
        }

        // Infinite intensity mass: trivially true.
        let pinf = with_constant_noise(3.0);
        assert!(small_noise_hypothesis_holds(&pinf, 2.0).unwrap());
    }

    #[test]
    fn small_noise_blowup_implies_the_osgood_inequality() {
        // Contrapositive check: a decaying intensity with a steep drift and
        // small constant noise satisfies the hypothesis at all sampled times
        // up to blow-up, the trajectory explodes, and indeed B(∞) < A(∞).
        let p = ProblemSpec::new(
            1.0,
            FunctionSpec::exponential(1.0, -1.0).unwrap(),
            FunctionSpec::power(4.0, 2.0).unwrap(),
            Noise::Fixed(FunctionSpec::constant(0.1).unwrap()),
        )
        .unwrap();
        let traj = solve_noisy(&p, &SolveControls::new(1.0)).unwrap();
        let blow = traj.blow_up().expect("explodes");
        for k in 0..=10 {
            let t = blow.t_lo * k as f64 / 10.0;
            assert!(small_noise_hypothesis_holds(&p, t).unwrap(), "hypothesis fails at t = {t}");
        }
        let tr = p.transforms();
        let b_inf = tr.b_infinity(0.0).unwrap();
        let a_inf = tr.a_infinity().unwrap();
        assert!(b_inf < a_inf, "B(∞) = {b_inf} must be below A(∞) = {a_inf}");
    }
}
