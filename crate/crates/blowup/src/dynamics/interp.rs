//! Piecewise-monotone cubic interpolation (Fritsch–Butland tangents).

use crate::error::{Error, Result};

/// Monotone C¹ interpolant through strictly increasing `(x, y)` data.
/// Evaluation clamps to the data range.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    tangents: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::Domain("interpolation needs at least two points".into()));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("interpolation abscissae must be strictly increasing".into()));
        }
        let n = xs.len();
        let mut secants = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            secants.push((ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]));
        }
        let mut tangents = vec![0.0; n];
        tangents[0] = secants[0];
        tangents[n - 1] = secants[n - 2];
        for i in 1..n - 1 {
            let (d0, d1) = (secants[i - 1], secants[i]);
            // Harmonic mean of same-sign secants keeps the cubic monotone.
            tangents[i] = if d0 * d1 > 0.0 { 2.0 * d0 * d1 / (d0 + d1) } else { 0.0 };
        }
        Ok(MonotoneCubic { xs, ys, tangents })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let i = match self.xs.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => return self.ys[i],
            Err(i) => i - 1,
        };
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (m0, m1) = (self.tangents[i] * h, self.tangents[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        y0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + m0 * (t3 - 2.0 * t2 + t)
            + y1 * (-2.0 * t3 + 3.0 * t2)
            + m1 * (t3 - t2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_nodes_exactly_and_monotonically() {
        let xs = vec![0.0, 1.0, 2.0, 5.0, 10.0];
        let ys = vec![0.0, 0.5, 0.6, 4.0, 4.5];
        let interp = MonotoneCubic::new(xs.clone(), ys.clone()).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert!((interp.eval(*x) - y).abs() < 1e-14);
        }
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=1000 {
            let x = 10.0 * i as f64 / 1000.0;
            let y = interp.eval(x);
            assert!(y >= prev - 1e-12, "not monotone at x = {x}");
            prev = y;
        }
    }

    #[test]
    fn clamps_outside_range() {
        let interp = MonotoneCubic::new(vec![1.0, 2.0], vec![3.0, 4.0]).unwrap();
        assert_eq!(interp.eval(0.0), 3.0);
        assert_eq!(interp.eval(7.0), 4.0);
    }

    #[test]
    fn rejects_non_increasing_abscissae() {
        assert!(MonotoneCubic::new(vec![0.0, 0.0, 1.0], vec![1.0, 2.0, 3.0]).is_err());
    }
}
