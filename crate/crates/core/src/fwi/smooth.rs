use ndarray::{Array2, ArrayView2};

use crate::scalar::Real;

/// Normalized Gaussian taps on `[-r, r]`, `r = ceil(4σ)`.
pub fn gaussian_taps(sigma: f64) -> Vec<f64> {
    let r = (4.0 * sigma).ceil() as i64;
    let w: Vec<f64> = (-r..=r).map(|k| (-(k * k) as f64 / (2.0 * sigma * sigma)).exp()).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

/// Separable Gaussian blur with edge replication; `sigma = 0` is identity.
pub fn gaussian_smooth<T: Real>(grid: ArrayView2<T>, sigma: f64) -> Array2<T> {
    if !(sigma > 0.0) {
        return grid.to_owned();
    }
    let taps = gaussian_taps(sigma);
    let r = (taps.len() / 2) as i64;
    let (h, w) = grid.dim();
    let clamp = |i: i64, n: usize| i.clamp(0, n as i64 - 1) as usize;
    let rows = Array2::from_shape_fn((h, w), |(z, x)| {
        taps.iter()
            .enumerate()
            .map(|(k, &t)| t * grid[[z, clamp(x as i64 + k as i64 - r, w)]].as_f64())
            .sum::<f64>()
    });
    Array2::from_shape_fn((h, w), |(z, x)| {
        T::lit(
            taps.iter()
                .enumerate()
                .map(|(k, &t)| t * rows[[clamp(z as i64 + k as i64 - r, h), x]])
                .sum::<f64>(),
        )
    })
}
