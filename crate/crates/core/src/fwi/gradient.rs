use ndarray::Array2;
use rayon::prelude::*;

use super::Lowpass;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::wavesim::{
    build_propagator, fold_padding, precheck, AcquisitionGeometry, Propagator, SeismicRecord, SimConfig,
    SourceWavelet,
};
use crate::VelocityModel;

/// `½·Σ(d_syn − d_obs)²` over every shot, time and receiver.
pub fn misfit<T: Real>(d_syn: &SeismicRecord<T>, d_obs: &SeismicRecord<T>) -> Result<f64> {
    if d_syn.shape() != d_obs.shape() {
        return Err(Error::shape(&d_obs.shape(), &d_syn.shape()));
    }
    Ok(0.5 * d_syn.data.iter().zip(&d_obs.data).map(|(a, b)| (a.as_f64() - b.as_f64()).powi(2)).sum::<f64>())
}

#[derive(Debug, Clone)]
pub struct GradientOutput<T> {
    pub misfit: f64,
    /// `∂J/∂v` on the model grid.
    pub gradient: Array2<T>,
}

fn shot_gradient<T: Real>(
    prop: &Propagator<T>,
    geom: &AcquisitionGeometry,
    wavelet: &SourceWavelet<T>,
    d_obs: &SeismicRecord<T>,
    filter: Option<&Lowpass>,
    shot: usize,
) -> Result<(f64, Array2<T>)> {
    let (src, recs) = prop.shot_cells(geom, shot);
    let wf = prop.forward(src, &wavelet.samples, &recs, true)?;
    let syn = match filter {
        Some(f) => f.apply_columns(wf.traces.view()),
        None => wf.traces,
    };
    let residual = &syn - &d_obs.gather(shot);
    let j = 0.5 * residual.iter().map(|r| r.as_f64().powi(2)).sum::<f64>();
    // the filter is symmetric, so it is its own adjoint
    let source = match filter {
        Some(f) => f.apply_columns(residual.view()),
        None => residual,
    };
    let sens = wf.sensitivity.expect("stored sensitivity");
    let g = prop.adjoint_gradient(&sens, &recs, source.view());
    Ok((j, fold_padding(g.view(), prop.pad())))
}

/// Misfit and adjoint-state gradient with respect to model velocities.
/// Shots run in parallel; their contributions are summed in shot order.
pub fn gradient<T: Real>(
    model: &VelocityModel<T>,
    d_obs: &SeismicRecord<T>,
    geom: &AcquisitionGeometry,
    wavelet: &SourceWavelet<T>,
    cfg: &SimConfig,
) -> Result<GradientOutput<T>> {
    filtered_gradient(model, d_obs, geom, wavelet, cfg, None)
}

/// [`gradient`] of `½‖F·d_syn − d_obs‖²` for a trace filter `F`; `d_obs`
/// is expected to be filtered already.
pub fn filtered_gradient<T: Real>(
    model: &VelocityModel<T>,
    d_obs: &SeismicRecord<T>,
    geom: &AcquisitionGeometry,
    wavelet: &SourceWavelet<T>,
    cfg: &SimConfig,
    filter: Option<&Lowpass>,
) -> Result<GradientOutput<T>> {
    let expect = [geom.n_sources(), cfg.n_t, geom.n_receivers()];
    if d_obs.shape() != expect {
        return Err(Error::shape(&expect, &d_obs.shape()));
    }
    precheck(model, cfg)?;
    let prop = build_propagator(model, geom, cfg)?;
    let parts = (0..geom.n_sources())
        .into_par_iter()
        .map(|s| shot_gradient(&prop, geom, wavelet, d_obs, filter, s))
        .collect::<Result<Vec<_>>>()?;
    let mut total = 0.0;
    let mut grad = Array2::zeros(model.grid.dim());
    for (j, g) in parts {
        total += j;
        grad += &g;
    }
    Ok(GradientOutput { misfit: total, gradient: grad })
}
