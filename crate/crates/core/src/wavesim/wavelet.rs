use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct SourceWavelet<T> {
    pub samples: Vec<T>,
    pub f0: f64,
    pub t0: f64,
}

impl<T: Real> SourceWavelet<T> {
    pub fn scaled(&self, s: T) -> Self {
        Self {
            samples: self.samples.iter().map(|&v| v * s).collect(),
            ..self.clone()
        }
    }

    pub fn max_abs(&self) -> T {
        self.samples.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

/// Ricker wavelet `(1 − 2π²f0²τ²)·exp(−π²f0²τ²)` sampled at `τ = k·dt − t0`.
pub fn ricker<T: Real>(f0: f64, dt: f64, n_t: usize, t0: f64) -> Result<SourceWavelet<T>> {
    if !(f0 > 0.0) {
        return Err(Error::Config(format!("Ricker frequency must be positive, got {f0}")));
    }
    if !(t0 >= 0.0) || !(dt > 0.0) {
        return Err(Error::Config(format!("invalid Ricker timing dt={dt}, t0={t0}")));
    }
    let samples = (0..n_t)
        .map(|k| {
            let a = (std::f64::consts::PI * f0 * (k as f64 * dt - t0)).powi(2);
            T::lit((1.0 - 2.0 * a) * (-a).exp())
        })
        .collect();
    Ok(SourceWavelet { samples, f0, t0 })
}
