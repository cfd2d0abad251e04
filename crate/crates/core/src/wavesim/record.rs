use ndarray::{s, Array2, Array3, ArrayView2};
use rayon::prelude::*;

use super::{
    dispersion_check, pad_model, stability_check, AcquisitionGeometry, Propagator, SimConfig,
    SourceWavelet,
};
use crate::error::{Error, Result};
use crate::geomodel::VelocityModel;
use crate::scalar::Real;

/// Traces of one shot, `[n_t, n_receivers]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotGather<T> {
    pub traces: Array2<T>,
    pub source_index: usize,
}

/// All shots of one model, `[n_sources, n_t, n_receivers]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeismicRecord<T> {
    pub data: Array3<T>,
}

impl<T: Real> SeismicRecord<T> {
    pub fn zeros(n_src: usize, n_t: usize, n_rec: usize) -> Self {
        Self { data: Array3::zeros((n_src, n_t, n_rec)) }
    }

    pub fn from_gathers(gathers: &[ShotGather<T>]) -> Result<Self> {
        let Some(first) = gathers.first() else {
            return Err(Error::Parameter("record needs at least one gather".into()));
        };
        let (n_t, n_rec) = first.traces.dim();
        let mut data = Array3::zeros((gathers.len(), n_t, n_rec));
        for (i, g) in gathers.iter().enumerate() {
            if g.traces.dim() != (n_t, n_rec) {
                return Err(Error::shape(&[n_t, n_rec], g.traces.shape()));
            }
            data.slice_mut(s![i, .., ..]).assign(&g.traces);
        }
        Ok(Self { data })
    }

    pub fn shape(&self) -> [usize; 3] {
        let (a, b, c) = self.data.dim();
        [a, b, c]
    }

    pub fn n_shots(&self) -> usize {
        self.data.dim().0
    }

    pub fn gather(&self, shot: usize) -> ArrayView2<'_, T> {
        self.data.slice(s![shot, .., ..])
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn cast<U: Real>(&self) -> SeismicRecord<U> {
        SeismicRecord { data: self.data.mapv(crate::scalar::cast::<T, U>) }
    }
}

/// Runs the stability and dispersion pre-checks for a model.
pub fn precheck<T: Real>(model: &VelocityModel<T>, cfg: &SimConfig) -> Result<()> {
    stability_check(cfg, model.v_max().as_f64()).into_result()?;
    dispersion_check(cfg, model.v_min().as_f64()).into_result()?;
    Ok(())
}

fn check_geometry(geom: &AcquisitionGeometry, rows: usize, cols: usize) -> Result<()> {
    let bad = geom.source_cols.iter().chain(&geom.receiver_cols).find(|&&c| c >= cols);
    if let Some(c) = bad {
        return Err(Error::Config(format!("geometry column {c} outside a {cols}-column model")));
    }
    if geom.effective_source_row() >= rows || geom.effective_receiver_row() >= rows {
        return Err(Error::Config("geometry row outside the model".into()));
    }
    Ok(())
}

pub(crate) fn build_propagator<T: Real>(
    model: &VelocityModel<T>,
    geom: &AcquisitionGeometry,
    cfg: &SimConfig,
) -> Result<Propagator<T>> {
    check_geometry(geom, model.rows(), model.cols())?;
    Propagator::new(pad_model(model.grid.view(), cfg.pad).view(), cfg)
}

/// Forward-models shot `source_index` of `model`.
pub fn simulate_shot<T: Real>(
    model: &VelocityModel<T>,
    geom: &AcquisitionGeometry,
    wavelet: &SourceWavelet<T>,
    cfg: &SimConfig,
    source_index: usize,
) -> Result<ShotGather<T>> {
    if source_index >= geom.n_sources() {
        return Err(Error::Parameter(format!(
            "source index {source_index} out of range (0..{})",
            geom.n_sources()
        )));
    }
    precheck(model, cfg)?;
    let prop = build_propagator(model, geom, cfg)?;
    run_shot(&prop, geom, wavelet, source_index)
}

pub(crate) fn run_shot<T: Real>(
    prop: &Propagator<T>,
    geom: &AcquisitionGeometry,
    wavelet: &SourceWavelet<T>,
    shot: usize,
) -> Result<ShotGather<T>> {
    let (src, recs) = prop.shot_cells(geom, shot);
    let wf = prop.forward(src, &wavelet.samples, &recs, false)?;
    Ok(ShotGather { traces: wf.traces, source_index: shot })
}

/// Forward-models every shot of `geom`; shots run in parallel.
pub fn simulate_record<T: Real>(
    model: &VelocityModel<T>,
    geom: &AcquisitionGeometry,
    wavelet: &SourceWavelet<T>,
    cfg: &SimConfig,
) -> Result<SeismicRecord<T>> {
    precheck(model, cfg)?;
    let prop = build_propagator(model, geom, cfg)?;
    record_with(&prop, geom, wavelet)
}

pub(crate) fn record_with<T: Real>(
    prop: &Propagator<T>,
    geom: &AcquisitionGeometry,
    wavelet: &SourceWavelet<T>,
) -> Result<SeismicRecord<T>> {
    let gathers = (0..geom.n_sources())
        .into_par_iter()
        .map(|i| run_shot(prop, geom, wavelet, i))
        .collect::<Result<Vec<_>>>()?;
    SeismicRecord::from_gathers(&gathers)
}
