//! Gaussian-window SSIM and its multi-scale variant.

use ndarray::{Array2, ArrayView2, Zip};

use crate::error::{Error, Result};

pub const WINDOW: usize = 11;
pub const SIGMA: f64 = 1.5;
pub const C1: f64 = 1e-4;
pub const C2: f64 = 9e-4;
/// Leading four of the canonical five-scale weights.
pub const MS_WEIGHTS: [f64; 4] = [0.0448, 0.2856, 0.3001, 0.2363];

fn gaussian_window() -> [f64; WINDOW] {
    let mut w = [0.0; WINDOW];
    let c = (WINDOW / 2) as f64;
    for (i, v) in w.iter_mut().enumerate() {
        *v = (-((i as f64 - c).powi(2)) / (2.0 * SIGMA * SIGMA)).exp();
    }
    let s: f64 = w.iter().sum();
    w.map(|v| v / s)
}

/// Valid-mode separable filtering with the SSIM window.
fn filter_valid(x: ArrayView2<f64>, w: &[f64; WINDOW]) -> Array2<f64> {
    let (h, wd) = x.dim();
    let (oh, ow) = (h + 1 - WINDOW, wd + 1 - WINDOW);
    let mut rows = Array2::<f64>::zeros((h, ow));
    for z in 0..h {
        for c in 0..ow {
            rows[[z, c]] = (0..WINDOW).map(|k| w[k] * x[[z, c + k]]).sum();
        }
    }
    let mut out = Array2::<f64>::zeros((oh, ow));
    for z in 0..oh {
        for c in 0..ow {
            out[[z, c]] = (0..WINDOW).map(|k| w[k] * rows[[z + k, c]]).sum();
        }
    }
    out
}

/// Means of the luminance·contrast-structure map and of the
/// contrast-structure map alone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsimParts {
    pub ssim: f64,
    pub cs: f64,
}

pub fn ssim_parts(a: ArrayView2<f64>, b: ArrayView2<f64>) -> Result<SsimParts> {
    if a.dim() != b.dim() {
        return Err(Error::shape(&[a.nrows(), a.ncols()], &[b.nrows(), b.ncols()]));
    }
    let (h, w) = a.dim();
    if h < WINDOW || w < WINDOW {
        return Err(Error::shape(&[WINDOW, WINDOW], &[h, w]));
    }
    let win = gaussian_window();
    let mu_a = filter_valid(a, &win);
    let mu_b = filter_valid(b, &win);
    let aa = filter_valid((&a * &a).view(), &win);
    let bb = filter_valid((&b * &b).view(), &win);
    let ab = filter_valid((&a * &b).view(), &win);
    let n = mu_a.len() as f64;
    let (mut s_sum, mut cs_sum) = (0.0, 0.0);
    Zip::from(&mu_a).and(&mu_b).and(&aa).and(&bb).and(&ab).for_each(|&ma, &mb, &xx, &yy, &xy| {
        let va = xx - ma * ma;
        let vb = yy - mb * mb;
        let cov = xy - ma * mb;
        let l = (2.0 * ma * mb + C1) / (ma * ma + mb * mb + C1);
        let cs = (2.0 * cov + C2) / (va + vb + C2);
        s_sum += l * cs;
        cs_sum += cs;
    });
    Ok(SsimParts { ssim: s_sum / n, cs: cs_sum / n })
}

pub fn ssim(a: ArrayView2<f64>, b: ArrayView2<f64>) -> Result<f64> {
    ssim_parts(a, b).map(|p| p.ssim)
}

/// 2×2 average pooling, dropping a trailing odd row or column.
pub fn downsample(x: ArrayView2<f64>) -> Array2<f64> {
    let (h, w) = (x.nrows() / 2, x.ncols() / 2);
    Array2::from_shape_fn((h, w), |(z, c)| {
        0.25 * (x[[2 * z, 2 * c]] + x[[2 * z + 1, 2 * c]] + x[[2 * z, 2 * c + 1]] + x[[2 * z + 1, 2 * c + 1]])
    })
}

/// Per-scale factors of [`mssim`]: `cs` at the finer scales, full SSIM at
/// the coarsest.
pub fn mssim_factors(a: ArrayView2<f64>, b: ArrayView2<f64>) -> Result<Vec<f64>> {
    let scales = MS_WEIGHTS.len();
    let min_side = a.nrows().min(a.ncols()) >> (scales - 1);
    if min_side < WINDOW {
        let need = WINDOW << (scales - 1);
        return Err(Error::shape(&[need, need], &[a.nrows(), a.ncols()]));
    }
    let (mut x, mut y) = (a.to_owned(), b.to_owned());
    let mut out = Vec::with_capacity(scales);
    for s in 0..scales {
        let p = ssim_parts(x.view(), y.view())?;
        out.push(if s + 1 == scales { p.ssim } else { p.cs });
        if s + 1 < scales {
            x = downsample(x.view());
            y = downsample(y.view());
        }
    }
    Ok(out)
}

/// Multi-scale SSIM over four dyadic scales with renormalized weights.
/// Negative factors are clamped to zero before exponentiation.
pub fn mssim(a: ArrayView2<f64>, b: ArrayView2<f64>) -> Result<f64> {
    let f = mssim_factors(a, b)?;
    let total: f64 = MS_WEIGHTS.iter().sum();
    Ok(f.iter().zip(MS_WEIGHTS).map(|(&v, w)| v.max(0.0).powf(w / total)).product())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_is_normalized_and_symmetric() {
        let w = gaussian_window();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        for i in 0..WINDOW {
            assert_eq!(w[i], w[WINDOW - 1 - i]);
        }
    }

    #[test]
    fn downsample_averages_blocks() {
        let x = Array2::from_shape_fn((5, 4), |(z, c)| (z * 4 + c) as f64);
        let d = downsample(x.view());
        assert_eq!(d.dim(), (2, 2));
        assert_eq!(d[[0, 0]], 2.5);
        assert_eq!(d[[1, 1]], 12.5);
    }

    #[test]
    fn small_fields_are_rejected() {
        let x = Array2::<f64>::zeros((8, 8));
        assert!(matches!(mssim(x.view(), x.view()), Err(Error::Shape { .. })));
        assert!(ssim(x.view(), x.view()).is_err());
        let y = Array2::<f64>::zeros((87, 100));
        assert!(mssim(y.view(), y.view()).is_err());
        let z = Array2::<f64>::zeros((88, 100));
        assert!(mssim(z.view(), z.view()).is_ok());
    }
}
