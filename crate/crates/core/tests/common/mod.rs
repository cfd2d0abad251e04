#![allow(dead_code)]

use ndarray::Array2;
use svinv_core::geomodel::LayerSpec;
use svinv_core::wavesim::{pad_model, Propagator, SimConfig, SourceWavelet};
use svinv_core::VelocityModel;

/// Cell-by-cell layer filling: cell `(z, x)` takes the velocity of the
/// deepest layer `i` whose band `[top_i(x), top_i(x) + d_i + L_i(x))` holds
/// `z`, where `top_i(x)` sums the thicknesses and interface offsets of the
/// layers above. The deepest layer is unbounded below.
pub fn layer_fill_oracle(layers: &[LayerSpec], rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |(z, x)| {
        let z = z as i64;
        let mut tops = Vec::with_capacity(layers.len());
        let mut top = 0i64;
        for l in layers {
            tops.push(top);
            top += l.thickness as i64 + l.interface.samples[x] as i64;
        }
        (0..layers.len())
            .rev()
            .find(|&i| {
                let bottom = if i + 1 == layers.len() {
                    i64::MAX
                } else {
                    tops[i] + layers[i].thickness as i64 + layers[i].interface.samples[x] as i64
                };
                tops[i] <= z && z < bottom
            })
            .map_or(0.0, |i| layers[i].velocity)
    })
}

pub fn ricker_at(t: f64, f0: f64, t0: f64) -> f64 {
    let a = (std::f64::consts::PI * f0 * (t - t0)).powi(2);
    (1.0 - 2.0 * a) * (-a).exp()
}

/// 2D line-source response `dx²/(2π) ∫ w(t − τ) / √(τ² − r²/c²) dτ`, evaluated
/// with `τ = (r/c)·cosh u` so the integrand is smooth.
pub fn green_2d(t: f64, r: f64, c: f64, cell: f64, f0: f64, t0: f64) -> f64 {
    let tr = r / c;
    if t <= tr {
        return 0.0;
    }
    let umax = (t / tr).acosh();
    let n = 4000;
    let h = umax / n as f64;
    let f = |u: f64| ricker_at(t - tr * u.cosh(), f0, t0);
    // composite Simpson
    let mut acc = f(0.0) + f(umax);
    for i in 1..n {
        acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    cell * cell / (2.0 * std::f64::consts::PI) * acc * h / 3.0
}

/// Homogeneous half-space trace: direct wave minus the free-surface image.
pub fn analytic_trace(offset: f64, depth: f64, cfg: &SimConfig, c: f64) -> Vec<f64> {
    let r1 = offset;
    let r2 = (offset * offset + 4.0 * depth * depth).sqrt();
    (0..cfg.n_t)
        .map(|k| {
            let t = k as f64 * cfg.dt;
            green_2d(t, r1, c, cfg.dx, cfg.source_freq, cfg.t0) - green_2d(t, r2, c, cfg.dx, cfg.source_freq, cfg.t0)
        })
        .collect()
}

pub fn first_break(trace: &[f64], frac: f64) -> usize {
    let max = trace.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    trace.iter().position(|v| v.abs() >= frac * max).unwrap()
}

pub fn xcorr_lag(a: &[f64], b: &[f64], max_lag: i64) -> i64 {
    let score = |lag: i64| -> f64 {
        (0..a.len() as i64)
            .filter_map(|k| {
                let j = k - lag;
                (j >= 0 && (j as usize) < b.len()).then(|| a[k as usize] * b[j as usize])
            })
            .sum()
    };
    (-max_lag..=max_lag).max_by(|&x, &y| score(x).total_cmp(&score(y))).unwrap()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Interior energy `ΣP²` over the unpadded model per step.
pub fn interior_energy(model: &VelocityModel<f64>, cfg: &SimConfig, src_col: usize) -> Vec<f64> {
    let prop = Propagator::new(pad_model(model.grid.view(), cfg.pad).view(), cfg).unwrap();
    let w: SourceWavelet<f64> = cfg.wavelet().unwrap();
    let (nz, nx) = prop.shape();
    let mut energy = Vec::new();
    prop.observe(prop.cell(1, src_col), &w.samples, |_, state| {
        let mut e = 0.0;
        for z in 0..nz - cfg.pad {
            for x in cfg.pad..nx - cfg.pad {
                e += state[z * nx + x].powi(2);
            }
        }
        energy.push(e);
    })
    .unwrap();
    energy
}
