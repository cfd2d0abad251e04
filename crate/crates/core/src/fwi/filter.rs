use ndarray::{Array2, ArrayView2, Axis};
use rustfft::{num_complex::Complex, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Zero-phase amplitude response: 1 up to `0.8·fc`, cosine taper to 0 at
/// `1.2·fc`.
pub fn taper_response(f: f64, cutoff: f64) -> f64 {
    let (lo, hi) = (0.8 * cutoff, 1.2 * cutoff);
    if f <= lo {
        1.0
    } else if f >= hi {
        0.0
    } else {
        0.5 * (1.0 + (std::f64::consts::PI * (f - lo) / (hi - lo)).cos())
    }
}

/// Reusable low-pass for traces of one length. The operator is a symmetric
/// matrix on the trace samples.
pub struct Lowpass {
    n: usize,
    gains: Vec<f64>,
    fft: std::sync::Arc<dyn rustfft::Fft<f64>>,
    ifft: std::sync::Arc<dyn rustfft::Fft<f64>>,
}

impl Lowpass {
    pub fn new(n: usize, cutoff: f64, dt: f64) -> Result<Self> {
        let nyquist = 0.5 / dt;
        if !(cutoff > 0.0 && cutoff < nyquist) {
            return Err(Error::Parameter(format!("cutoff {cutoff} Hz outside (0, {nyquist}) Hz")));
        }
        // even extension to 2n avoids wrap-around jumps
        let m = 2 * n.max(1);
        let gains = (0..m)
            .map(|k| {
                let f = k.min(m - k) as f64 / (m as f64 * dt);
                taper_response(f, cutoff)
            })
            .collect();
        let mut planner = FftPlanner::new();
        Ok(Self { n, gains, fft: planner.plan_fft_forward(m), ifft: planner.plan_fft_inverse(m) })
    }

    pub fn apply(&self, trace: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(trace.len(), n, "trace length");
        if n == 0 {
            return Vec::new();
        }
        let m = 2 * n;
        let mut buf: Vec<Complex<f64>> = trace
            .iter()
            .chain(trace.iter().rev())
            .map(|&v| Complex::new(v, 0.0))
            .collect();
        self.fft.process(&mut buf);
        for (b, g) in buf.iter_mut().zip(&self.gains) {
            *b *= g;
        }
        self.ifft.process(&mut buf);
        buf[..n].iter().map(|c| c.re / m as f64).collect()
    }

    /// Filters every column of `[n_t, n_traces]` data.
    pub fn apply_columns<T: Real>(&self, data: ArrayView2<T>) -> Array2<T> {
        let mut out = Array2::zeros(data.dim());
        for (src, mut dst) in data.axis_iter(Axis(1)).zip(out.axis_iter_mut(Axis(1))) {
            let col: Vec<f64> = src.iter().map(|v| v.as_f64()).collect();
            for (d, v) in dst.iter_mut().zip(self.apply(&col)) {
                *d = T::lit(v);
            }
        }
        out
    }
}

/// Low-passes one trace.
pub fn lowpass(trace: &[f64], cutoff: f64, dt: f64) -> Result<Vec<f64>> {
    Ok(Lowpass::new(trace.len(), cutoff, dt)?.apply(trace))
}

/// Low-passes every column (`[n_t, n_traces]`).
pub fn lowpass_columns<T: Real>(data: ArrayView2<T>, cutoff: f64, dt: f64) -> Result<Array2<T>> {
    Ok(Lowpass::new(data.nrows(), cutoff, dt)?.apply_columns(data))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn response_shape() {
        assert_eq!(taper_response(8.0, 10.0), 1.0);
        assert!((taper_response(10.0, 10.0) - 0.5).abs() < 1e-12);
        assert_eq!(taper_response(12.0, 10.0), 0.0);
    }

    #[test]
    fn nyquist_cutoff_is_rejected() {
        assert!(lowpass(&[0.0; 8], 500.0, 0.001).is_err());
        assert!(lowpass(&[0.0; 8], 0.0, 0.001).is_err());
    }
}
