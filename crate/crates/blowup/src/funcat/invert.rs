//! Bracketed inversion of monotone functions.

use crate::error::{Error, Result};

/// Declared direction of a monotone function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
}

const MAX_EXPANSIONS: u32 = 200;
const MAX_ITERS: u32 = 400;

/// Solve `f(x) = target` for monotone `f` on `bracket`, to absolute
/// tolerance `tol` in function space.
///
/// The bracket expands upward by doubling when the target lies beyond
/// `f(hi)` but inside the attained range of `f`; expansion stops at the
/// first evaluation error, so callers with a bounded domain simply pass the
/// full domain. Probes combine bisection with a secant candidate clamped to
/// the current bracket interior; when the function is flat around the root
/// the returned point is the midpoint of the final bracket.
///
/// Infinite function values at the bracket ends (e.g. a singular transform
/// endpoint) are handled; `target` itself must be finite.
pub fn invert_monotone<F>(
    f: F,
    target: f64,
    bracket: (f64, f64),
    tol: f64,
    direction: Direction,
) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if !target.is_finite() {
        return Err(Error::Domain(format!("target must be finite, got {target}")));
    }
    let (lo0, hi0) = bracket;
    if !lo0.is_finite() || !hi0.is_finite() || lo0 >= hi0 {
        return Err(Error::Domain(format!("bad bracket [{lo0}, {hi0}]")));
    }

    // Work on an increasing problem: negate for decreasing direction.
    let sign = match direction {
        Direction::Increasing => 1.0,
        Direction::Decreasing => -1.0,
    };
    let g = |x: f64| -> Result<f64> { f(x).map(|v| sign * v) };
    let t = sign * target;

    let mut lo = lo0;
    let mut hi = hi0;
    let mut g_lo = g(lo)?;
    let mut g_hi = g(hi)?;
    let slack = tol;

    if t < g_lo - slack {
        return Err(out_of_range(target, sign, g_lo, g_hi));
    }
    if t > g_hi {
        // Expand upward by doubling the bracket width.
        let mut width = hi - lo;
        let mut expansions = 0;
        while t > g_hi {
            if expansions >= MAX_EXPANSIONS {
                return Err(out_of_range(target, sign, g_lo, g_hi));
            }
            let new_hi = hi + width;
            width *= 2.0;
            match g(new_hi) {
                Ok(v) => {
                    if v < g_hi - slack {
                        return Err(Error::NonMonotone { x: new_hi });
                    }
                    lo = hi;
                    g_lo = g_hi;
                    hi = new_hi;
                    g_hi = v;
                }
                // Domain edge reached: the attained range ends here.
                Err(_) => return Err(out_of_range(target, sign, g_lo, g_hi)),
            }
            expansions += 1;
        }
    }

    // Invariant: g_lo - slack <= t <= g_hi (either value may be infinite).
    let mut last_mid = 0.5 * (lo + hi);
    for iter in 0..MAX_ITERS {
        // Secant candidate from the bracket endpoints every other iteration,
        // clamped into the interior; plain bisection otherwise.
        let mid = 0.5 * (lo + hi);
        let x = if iter % 2 == 1 && g_lo.is_finite() && g_hi.is_finite() && g_hi > g_lo {
            let s = lo + (t - g_lo) * (hi - lo) / (g_hi - g_lo);
            let margin = 0.125 * (hi - lo);
            s.clamp(lo + margin, hi - margin)
        } else {
            mid
        };
        let gx = g(x)?;
        if gx < g_lo - slack || gx > g_hi + slack {
            return Err(Error::NonMonotone { x });
        }
        if gx.is_finite() && (gx - t).abs() <= tol {
            return Ok(x);
        }
        if gx < t {
            lo = x;
            g_lo = gx;
        } else {
            hi = x;
            g_hi = gx;
        }
        last_mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(1.0) {
            // Bracket exhausted in x; accept the midpoint if f is within a
            // loose multiple of tol there, otherwise the function jumps.
            let gm = g(last_mid)?;
            if gm.is_finite() && (gm - t).abs() <= 1e3 * tol {
                return Ok(last_mid);
            }
            return Err(Error::Inconsistent(format!(
                "inversion stalled at x = {last_mid}: residual {} exceeds tolerance {tol}",
                (gm - t).abs()
            )));
        }
    }
    Err(Error::Inconsistent(format!(
        "inversion did not converge within {MAX_ITERS} iterations (x ≈ {last_mid})"
    )))
}

fn out_of_range(target: f64, sign: f64, g_lo: f64, g_hi: f64) -> Error {
    let (a, b) = if sign > 0.0 { (g_lo, g_hi) } else { (-g_hi, -g_lo) };
    Error::TargetOutOfRange { target, attained_lo: a.min(b), attained_hi: a.max(b) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverts_simple_monotone_functions() {
        // f(x) = 1 - 1/x on [1, ∞), target 0.5 -> x = 2
        let x = invert_monotone(|x| Ok(1.0 - 1.0 / x), 0.5, (1.0, 4.0), 1e-12, Direction::Increasing)
            .unwrap();
        assert!((x - 2.0).abs() < 1e-9);

        // Identity, target 7 (bracket must expand).
        let x = invert_monotone(Ok, 7.0, (0.0, 1.0), 1e-12, Direction::Increasing).unwrap();
        assert!((x - 7.0).abs() < 1e-9);

        // A(t) = 2t, target 1 -> 0.5
        let x = invert_monotone(|x| Ok(2.0 * x), 1.0, (0.0, 1.0), 1e-12, Direction::Increasing).unwrap();
        assert!((x - 0.5).abs() < 1e-9);
    }

    #[test]
    fn inverts_decreasing_functions() {
        // β-like shape: f(r) = 1/(1+r), target 0.5 -> r = 1
        let x = invert_monotone(
            |r| Ok(1.0 / (1.0 + r)),
            0.5,
            (0.0, 0.5),
            1e-12,
            Direction::Decreasing,
        )
        .unwrap();
        assert!((x - 1.0).abs() < 1e-9);
    }

    #[test]
    fn reports_target_out_of_range_with_attained_range() {
        let err = invert_monotone(
            |x| Ok(1.0 - 1.0 / x),
            2.0,
            (1.0, 8.0),
            1e-12,
            Direction::Increasing,
        )
        .unwrap_err();
        match err {
            Error::TargetOutOfRange { target, attained_hi, .. } => {
                assert_eq!(target, 2.0);
                assert!(attained_hi < 1.0 + 1e-9);
            }
            other => panic!("expected TargetOutOfRange, got {other:?}"),
        }
    }

    #[test]
    fn detects_non_monotone_samples() {
        // A parabola is not monotone over [-1, 2]; probes inside the
        // bracket fall below f(lo) and trip the three-point check.
        let err = invert_monotone(
            |x| Ok(x * x),
            2.0,
            (-1.0, 2.0),
            1e-12,
            Direction::Increasing,
        );
        assert!(matches!(err, Err(Error::NonMonotone { .. }) | Err(Error::Inconsistent(_))));
    }

    #[test]
    fn tolerates_infinite_bracket_end() {
        // Decreasing with f(lo) = ∞, as for a singular transform endpoint.
        let f = |x: f64| {
            if x <= 0.0 {
                Ok(f64::INFINITY)
            } else {
                Ok(1.0 / x)
            }
        };
        let x = invert_monotone(f, 4.0, (0.0, 3.0), 1e-12, Direction::Decreasing).unwrap();
        assert!((x - 0.25).abs() < 1e-9);
    }

    #[test]
    fn expansion_stops_at_domain_edges() {
        // f only defined on [0, 2]; target beyond f(2) is out of range.
        let f = |x: f64| {
            if x > 2.0 {
                Err(Error::Domain("beyond".into()))
            } else {
                Ok(x)
            }
        };
        let err = invert_monotone(f, 5.0, (0.0, 2.0), 1e-12, Direction::Increasing).unwrap_err();
        assert!(matches!(err, Error::TargetOutOfRange { .. }));
    }
}
