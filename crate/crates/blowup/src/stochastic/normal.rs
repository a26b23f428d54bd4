//! The normal-distribution function Φ under its two reading conventions.
//!
//! The probability bounds use `Φ(x)` for `x ≥ 0`, a notation with two
//! common incompatible readings: the probability that a standard normal
//! lands in `[0, x]` (the "centered" reading, range `[0, 0.5)`) and the
//! usual CDF `P(Z ≤ x)` (range `[0.5, 1)` for `x ≥ 0`). Quantiles like
//! `Φ⁻¹(0.95)` exist only under the second reading. Both are implemented,
//! every bound takes the convention explicitly, and the Monte Carlo suites
//! arbitrate which one yields valid bounds.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use crate::error::{Error, Result};
use crate::funcat::{invert_monotone, Direction};

/// Which reading of Φ to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormalConvention {
    /// `Φ(x) = P(0 ≤ Z ≤ x)`, mapping `[0, ∞)` onto `[0, 0.5)`.
    Centered,
    /// `Φ(x) = P(Z ≤ x)`, mapping `[0, ∞)` onto `[0.5, 1)`.
    Cdf,
}

impl NormalConvention {
    /// Half-open range of Φ over `x ≥ 0` under this convention.
    pub fn range(&self) -> (f64, f64) {
        match self {
            NormalConvention::Centered => (0.0, 0.5),
            NormalConvention::Cdf => (0.5, 1.0),
        }
    }
}

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// `Φ(x)` for `x ≥ 0` (`x = +∞` allowed and maps to the range supremum).
pub fn phi(x: f64, convention: NormalConvention) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain(format!("phi requires x ≥ 0, got {x}")));
    }
    if x.is_infinite() {
        return Ok(match convention {
            NormalConvention::Centered => 0.5,
            NormalConvention::Cdf => 1.0,
        });
    }
    let half_erf = 0.5 * erf(x / SQRT_2);
    Ok(match convention {
        NormalConvention::Centered => half_erf,
        NormalConvention::Cdf => 0.5 + half_erf,
    })
}

/// Inverse of Φ on `x ≥ 0`, by monotone inversion of [`phi`].
/// `p` must lie in the convention's range.
pub fn phi_inverse(p: f64, convention: NormalConvention) -> Result<f64> {
    let (lo, hi) = convention.range();
    if !(p >= lo && p < hi) {
        return Err(Error::TargetOutOfRange { target: p, attained_lo: lo, attained_hi: hi });
    }
    if p == lo {
        return Ok(0.0);
    }
    invert_monotone(
        |x| phi(x, convention),
        p,
        (0.0, 1.0),
        1e-12,
        Direction::Increasing,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: Maclaurin series for erf, accurate to double
    /// precision for the argument sizes used here.
    fn erf_series(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        let x2 = x * x;
        for n in 1..200 {
            term *= -x2 / n as f64;
            let contrib = term / (2 * n + 1) as f64;
            sum += contrib;
            if contrib.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum * 2.0 / std::f64::consts::PI.sqrt()
    }

    #[test]
    fn phi_matches_series_oracle() {
        for x in [0.0, 0.1, 0.5, 1.0, 1.386, 2.0, 3.5] {
            let oracle_centered = 0.5 * erf_series(x / SQRT_2);
            let got = phi(x, NormalConvention::Centered).unwrap();
            assert!((got - oracle_centered).abs() < 1e-10, "x = {x}");
            let got_cdf = phi(x, NormalConvention::Cdf).unwrap();
            assert!((got_cdf - (0.5 + oracle_centered)).abs() < 1e-10, "x = {x}");
        }
    }

    #[test]
    fn boundary_and_limit_values() {
        assert_eq!(phi(0.0, NormalConvention::Centered).unwrap(), 0.0);
        assert_eq!(phi(0.0, NormalConvention::Cdf).unwrap(), 0.5);
        assert_eq!(phi(f64::INFINITY, NormalConvention::Centered).unwrap(), 0.5);
        assert_eq!(phi(f64::INFINITY, NormalConvention::Cdf).unwrap(), 1.0);
        assert!(phi(-0.1, NormalConvention::Cdf).is_err());
    }

    #[test]
    fn quantiles_match_tabulated_values() {
        // Standard normal 97.5% point, recomputed from the series oracle.
        let x = phi_inverse(0.975, NormalConvention::Cdf).unwrap();
        assert!((x - 1.959964).abs() < 1e-5, "x = {x}");
        // P(0 ≤ Z ≤ x) = 0.45 at the 95% one-sided point.
        let x = phi_inverse(0.45, NormalConvention::Centered).unwrap();
        assert!((x - 1.644854).abs() < 1e-5, "x = {x}");
    }

    #[test]
    fn phi_inverse_round_trips() {
        for p in [0.0, 0.05, 0.2, 0.4, 0.49] {
            let x = phi_inverse(p, NormalConvention::Centered).unwrap();
            let back = phi(x, NormalConvention::Centered).unwrap();
            assert!((back - p).abs() < 1e-11);
        }
        for p in [0.5, 0.6, 0.9, 0.95, 0.999] {
            let x = phi_inverse(p, NormalConvention::Cdf).unwrap();
            let back = phi(x, NormalConvention::Cdf).unwrap();
            assert!((back - p).abs() < 1e-11);
        }
        // Out-of-range quantiles are rejected per convention.
        assert!(phi_inverse(0.6, NormalConvention::Centered).is_err());
        assert!(phi_inverse(0.4, NormalConvention::Cdf).is_err());
    }
}
