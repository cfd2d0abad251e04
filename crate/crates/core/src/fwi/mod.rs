//! Multiscale full-waveform inversion with adjoint-state gradients.

mod filter;
mod gradient;
mod smooth;

pub use filter::{lowpass, lowpass_columns, taper_response, Lowpass};
pub use gradient::{filtered_gradient, gradient, misfit, GradientOutput};
pub use smooth::{gaussian_smooth, gaussian_taps};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::wavesim::{
    build_propagator, precheck, record_with, AcquisitionGeometry, SeismicRecord, SimConfig, SourceWavelet,
};
use crate::VelocityModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LineSearch {
    /// First trial step (m/s) applied to the max-abs-normalized gradient.
    pub initial_step: f64,
    pub shrink: f64,
    pub max_backtracks: usize,
}

impl Default for LineSearch {
    fn default() -> Self {
        Self { initial_step: 30.0, shrink: 0.5, max_backtracks: 8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FwiConfig {
    /// Standard deviation (cells) used to build a smoothed starting model.
    pub smoothing_sigma: f64,
    /// Low-pass cutoff per stage (Hz), strictly increasing.
    pub cutoffs: Vec<f64>,
    pub v_bounds: (f64, f64),
    pub total_iterations: usize,
    pub line_search: LineSearch,
}

impl Default for FwiConfig {
    fn default() -> Self {
        Self {
            smoothing_sigma: 5.0,
            cutoffs: vec![10.0, 15.0, 20.0, 25.0, 30.0],
            v_bounds: (1000.0, 5000.0),
            total_iterations: 50,
            line_search: LineSearch::default(),
        }
    }
}

impl FwiConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cutoffs.is_empty() || self.cutoffs.windows(2).any(|w| !(w[0] < w[1])) || !(self.cutoffs[0] > 0.0) {
            return Err(Error::Config(format!("cutoffs must be positive and strictly increasing: {:?}", self.cutoffs)));
        }
        if !(self.v_bounds.0 < self.v_bounds.1) || !(self.v_bounds.0 > 0.0) {
            return Err(Error::Config(format!("invalid velocity bounds {:?}", self.v_bounds)));
        }
        if self.total_iterations < self.cutoffs.len() {
            return Err(Error::Config(format!(
                "{} iterations cannot cover {} stages",
                self.total_iterations,
                self.cutoffs.len()
            )));
        }
        let ls = &self.line_search;
        if !(ls.initial_step > 0.0) || !(ls.shrink > 0.0 && ls.shrink < 1.0) {
            return Err(Error::Config("line search needs a positive step and shrink in (0,1)".into()));
        }
        Ok(())
    }

    /// Iterations per stage: an even split, remainder to the first stages.
    pub fn stage_iterations(&self) -> Vec<usize> {
        let n = self.cutoffs.len();
        let (base, extra) = (self.total_iterations / n, self.total_iterations % n);
        (0..n).map(|i| base + usize::from(i < extra)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StageStatus {
    Completed,
    /// Every backtrack of some iteration failed to lower the misfit.
    LineSearchExhausted,
    /// The gradient vanished.
    Stationary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageLog {
    pub cutoff: f64,
    pub planned_iterations: usize,
    pub iterations: usize,
    pub start_misfit: f64,
    pub end_misfit: f64,
    pub status: StageStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationLog {
    pub iteration: usize,
    pub stage: usize,
    /// Stage-filtered misfit after the accepted update.
    pub misfit: f64,
    pub step: f64,
    pub backtracks: usize,
}

#[derive(Debug, Clone)]
pub struct FwiResult<T> {
    pub model: VelocityModel<T>,
    pub misfit_history: Vec<IterationLog>,
    pub stages: Vec<StageLog>,
    /// Unfiltered misfit of the starting and final models.
    pub initial_misfit: f64,
    pub final_misfit: f64,
}

/// Starting model: the true model blurred with `sigma`.
pub fn smoothed_start<T: Real>(model: &VelocityModel<T>, sigma: f64) -> VelocityModel<T> {
    model.with_grid(gaussian_smooth(model.grid.view(), sigma))
}

fn filter_record<T: Real>(rec: &SeismicRecord<T>, filter: Option<&Lowpass>) -> SeismicRecord<T> {
    let Some(f) = filter else { return rec.clone() };
    let mut out = rec.clone();
    for s in 0..rec.n_shots() {
        let g = f.apply_columns(rec.gather(s));
        out.data.index_axis_mut(ndarray::Axis(0), s).assign(&g);
    }
    out
}

/// Filtered misfit of `model` against (filtered) `d_obs`, or `None` when
/// the model fails the simulation pre-checks.
fn trial_misfit<T: Real>(
    model: &VelocityModel<T>,
    d_obs: &SeismicRecord<T>,
    geom: &AcquisitionGeometry,
    wavelet: &SourceWavelet<T>,
    cfg: &SimConfig,
    filter: Option<&Lowpass>,
) -> Result<Option<f64>> {
    if precheck(model, cfg).is_err() {
        return Ok(None);
    }
    let prop = build_propagator(model, geom, cfg)?;
    let syn = record_with(&prop, geom, wavelet)?;
    misfit(&filter_record(&syn, filter), d_obs).map(Some)
}

/// Steepest descent with max-abs gradient normalization, backtracking line
/// search and box clipping, over a sequence of low-pass stages. Each stage
/// compares low-passed synthetic traces with low-passed observed traces.
#[allow(clippy::too_many_arguments)]
pub fn invert<T: Real>(
    d_obs: &SeismicRecord<T>,
    model0: &VelocityModel<T>,
    fwi: &FwiConfig,
    sim: &SimConfig,
    geom: &AcquisitionGeometry,
    wavelet: &SourceWavelet<T>,
) -> Result<FwiResult<T>> {
    fwi.validate()?;
    if !d_obs.is_finite() {
        return Err(Error::Range("observed data contains non-finite samples".into()));
    }
    let full_misfit = |m: &VelocityModel<T>| -> Result<f64> {
        trial_misfit(m, d_obs, geom, wavelet, sim, None)?
            .ok_or_else(|| Error::Config("model fails simulation pre-checks".into()))
    };
    precheck(model0, sim)?;
    let initial_misfit = full_misfit(model0)?;
    let (lo, hi) = (T::lit(fwi.v_bounds.0), T::lit(fwi.v_bounds.1));
    let mut model = model0.with_grid(model0.grid.mapv(|v| v.max(lo).min(hi)));
    let mut history = Vec::new();
    let mut stages = Vec::new();
    let mut iteration = 0;

    for (stage, (&cutoff, planned)) in fwi.cutoffs.iter().zip(fwi.stage_iterations()).enumerate() {
        let lp = Lowpass::new(sim.n_t, cutoff, sim.dt)?;
        let obs = filter_record(d_obs, Some(&lp));
        let mut log = StageLog {
            cutoff,
            planned_iterations: planned,
            iterations: 0,
            start_misfit: f64::NAN,
            end_misfit: f64::NAN,
            status: StageStatus::Completed,
        };
        for _ in 0..planned {
            let g = filtered_gradient(&model, &obs, geom, wavelet, sim, Some(&lp))?;
            if log.iterations == 0 {
                log.start_misfit = g.misfit;
                log.end_misfit = g.misfit;
            }
            let gmax = g.gradient.iter().fold(0.0f64, |m, v| m.max(v.as_f64().abs()));
            if !(gmax > 0.0) {
                log.status = StageStatus::Stationary;
                break;
            }
            let mut step = fwi.line_search.initial_step;
            let mut accepted = None;
            for b in 0..=fwi.line_search.max_backtracks {
                let scale = T::lit(step / gmax);
                let grid = ndarray::Zip::from(&model.grid)
                    .and(&g.gradient)
                    .map_collect(|&v, &d| (v - scale * d).max(lo).min(hi));
                let trial = model.with_grid(grid);
                if let Some(j) = trial_misfit(&trial, &obs, geom, wavelet, sim, Some(&lp))? {
                    if j < g.misfit {
                        accepted = Some((trial, j, b));
                        break;
                    }
                }
                step *= fwi.line_search.shrink;
            }
            let Some((trial, j, backtracks)) = accepted else {
                log.status = StageStatus::LineSearchExhausted;
                break;
            };
            model = trial;
            iteration += 1;
            log.iterations += 1;
            log.end_misfit = j;
            history.push(IterationLog { iteration, stage, misfit: j, step, backtracks });
        }
        stages.push(log);
    }
    let final_misfit = full_misfit(&model)?;
    Ok(FwiResult { model, misfit_history: history, stages, initial_misfit, final_misfit })
}
