//! Reflected Brownian sample paths and the probabilistic layer built on them:
//! running maxima, hitting times, normal-distribution conventions, probability
//! bounds on the explosion time and Monte Carlo estimation.

mod mc;
mod normal;
mod prob_bounds;

pub use mc::{mc_explosion, EmpiricalCdf, McControls, McResult, PathOutcome};
pub use normal::{phi, phi_inverse, NormalConvention};
pub use prob_bounds::{
    conditional_explosion_prob_bound, conditional_explosion_prob_bound_with,
    crossing_prob_bound, crossing_prob_bound_with, explosion_prob_bound,
    explosion_prob_bound_with,
};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Discretized sample path of `|W|` for a standard Brownian motion `W`,
/// on the uniform grid `0, dt, 2·dt, …`, with cached prefix maxima.
///
/// Paths are immutable once built; identical `(horizon, dt, seed)` inputs
/// reproduce bit-identical samples.
#[derive(Debug, Clone)]
pub struct NoisePath {
    dt: f64,
    samples: Vec<f64>,
    running_max: Vec<f64>,
    seed: u64,
}

/// Standard-normal quantile for `u ∈ (0, 1)` (inverse-CDF sampling).
fn normal_inv_cdf(u: f64) -> f64 {
    -std::f64::consts::SQRT_2 * statrs::function::erf::erfc_inv(2.0 * u)
}

impl NoisePath {
    /// Sample `|W|` on `[0, horizon]` with step `dt` from the given seed.
    ///
    /// Increments are mean-zero Gaussians of variance `dt`, produced by the
    /// inverse-CDF transform of uniforms from a seeded ChaCha stream, so the
    /// same inputs give the same path on every platform.
    pub fn sample(horizon: f64, dt: f64, seed: u64) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::Domain(format!("horizon must be positive, got {horizon}")));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Domain(format!("dt must be positive, got {dt}")));
        }
        if dt > horizon {
            return Err(Error::Domain(format!("dt = {dt} exceeds horizon = {horizon}")));
        }
        let n_steps = ((horizon / dt - 1e-9).ceil() as usize).max(1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sqrt_dt = dt.sqrt();
        let mut w = 0.0_f64;
        let mut samples = Vec::with_capacity(n_steps + 1);
        samples.push(0.0);
        for _ in 0..n_steps {
            // Uniform in the open interval (0, 1): 53 mantissa bits, offset by half an ulp.
            let u = ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64);
            w += sqrt_dt * normal_inv_cdf(u);
            samples.push(w.abs());
        }
        Ok(Self::build(dt, samples, seed))
    }

    /// Wrap externally supplied `|W|` samples on a uniform grid.
    pub fn from_samples(dt: f64, samples: Vec<f64>, seed: u64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Domain(format!("dt must be positive, got {dt}")));
        }
        if samples.len() < 2 {
            return Err(Error::Domain("path needs at least two samples".into()));
        }
        if samples[0] != 0.0 {
            return Err(Error::Domain("path must start at 0".into()));
        }
        if samples.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(Error::Domain("path samples must be finite and nonnegative".into()));
        }
        Ok(Self::build(dt, samples, seed))
    }

    /// The identically-zero path (a degenerate, variance-0 sample).
    pub fn zeros(horizon: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || dt > horizon {
            return Err(Error::Domain(format!("need 0 < dt <= horizon, got dt = {dt}")));
        }
        let n_steps = ((horizon / dt - 1e-9).ceil() as usize).max(1);
        Ok(Self::build(dt, vec![0.0; n_steps + 1], 0))
    }

    fn build(dt: f64, samples: Vec<f64>, seed: u64) -> Self {
        let mut running_max = Vec::with_capacity(samples.len());
        let mut m = 0.0_f64;
        for &s in &samples {
            m = m.max(s);
            running_max.push(m);
        }
        NoisePath { dt, samples, running_max, seed }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Last grid time of the path.
    pub fn horizon(&self) -> f64 {
        (self.samples.len() - 1) as f64 * self.dt
    }

    /// Linear interpolation of `|W|` at `t`, clamping half-ulp overshoots of
    /// the grid ends. Callers must keep `t` within `[0, horizon]`.
    pub(crate) fn eval_raw(&self, t: f64) -> f64 {
        let pos = (t / self.dt).clamp(0.0, (self.samples.len() - 1) as f64);
        let i = pos.floor() as usize;
        if i + 1 >= self.samples.len() {
            return self.samples[self.samples.len() - 1];
        }
        let frac = pos - i as f64;
        self.samples[i] + frac * (self.samples[i + 1] - self.samples[i])
    }

    /// Value of `|W|` at `t` (linear interpolation between grid points).
    pub fn value_at(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(self.eval_raw(t))
    }

    /// Prefix maximum of the interpolated path on `[0, t]`.
    pub fn running_max_at(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        let pos = (t / self.dt).clamp(0.0, (self.samples.len() - 1) as f64);
        let i = pos.floor() as usize;
        Ok(self.running_max[i].max(self.eval_raw(t)))
    }

    /// First time the interpolated path reaches level `r`, or `None` if it
    /// never does within the horizon.
    pub fn hitting_time(&self, r: f64) -> Result<Option<f64>> {
        if !(r >= 0.0) {
            return Err(Error::Domain(format!("level must be nonnegative, got {r}")));
        }
        if r == 0.0 {
            return Ok(Some(0.0));
        }
        for i in 1..self.samples.len() {
            if self.samples[i] >= r {
                let s_prev = self.samples[i - 1];
                let t = (i - 1) as f64 * self.dt + self.dt * (r - s_prev) / (self.samples[i] - s_prev);
                return Ok(Some(t));
            }
        }
        Ok(None)
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !t.is_finite() || t < 0.0 || t > self.horizon() * (1.0 + 1e-12) + 1e-15 {
            return Err(Error::Domain(format!(
                "time {t} outside path domain [0, {}]",
                self.horizon()
            )));
        }
        Ok(())
    }

    /// Exact integral of the piecewise-linear interpolant over `[lo, hi]`.
    pub(crate) fn integral(&self, lo: f64, hi: f64) -> Result<f64> {
        self.check_time(lo)?;
        self.check_time(hi)?;
        if hi < lo {
            return Err(Error::Domain(format!("integral bounds reversed: [{lo}, {hi}]")));
        }
        // Trapezoid over the cut points {lo, grid points in (lo, hi), hi};
        // exact because the interpolant is linear between consecutive cuts.
        let first_cell = (lo / self.dt).floor() as usize;
        let mut total = 0.0;
        let mut t_prev = lo;
        let mut v_prev = self.eval_raw(lo);
        let mut i = first_cell + 1;
        while (i as f64) * self.dt < hi && i < self.samples.len() {
            let t = i as f64 * self.dt;
            if t > t_prev {
                total += 0.5 * (v_prev + self.samples[i]) * (t - t_prev);
                t_prev = t;
                v_prev = self.samples[i];
            }
            i += 1;
        }
        total += 0.5 * (v_prev + self.eval_raw(hi)) * (hi - t_prev);
        Ok(total)
    }
}

impl PartialEq for NoisePath {
    fn eq(&self, other: &Self) -> bool {
        self.dt == other.dt && self.seed == other.seed && self.samples == other.samples
    }
}
