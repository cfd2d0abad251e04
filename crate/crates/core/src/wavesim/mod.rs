//! Constant-density 2D acoustic finite-difference modeling.

mod checks;
mod geometry;
mod propagator;
mod record;
mod wavelet;

pub use checks::{dispersion_check, stability_check, CheckKind, CheckResult};
pub use geometry::{default_geometry, AcquisitionGeometry};
pub use propagator::{fold_padding, pad_model, Propagator, ShotWavefield};
pub use record::{precheck, simulate_record, simulate_shot, SeismicRecord, ShotGather};
pub(crate) use record::{build_propagator, record_with};
pub use wavelet::{ricker, SourceWavelet};

use serde::{Deserialize, Serialize};

/// Spatial order of the Laplacian stencil.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum StencilOrder {
    Two,
    Four,
}

impl TryFrom<u8> for StencilOrder {
    type Error = String;
    fn try_from(v: u8) -> Result<Self, String> {
        match v {
            2 => Ok(StencilOrder::Two),
            4 => Ok(StencilOrder::Four),
            o => Err(format!("unsupported stencil order {o} (expected 2 or 4)")),
        }
    }
}

impl From<StencilOrder> for u8 {
    fn from(o: StencilOrder) -> u8 {
        match o {
            StencilOrder::Two => 2,
            StencilOrder::Four => 4,
        }
    }
}

/// Discretization of the forward problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    /// Lateral spacing (m).
    pub dx: f64,
    /// Vertical spacing (m); the kernels require `dz == dx`.
    pub dz: f64,
    /// Time step (s).
    pub dt: f64,
    pub n_t: usize,
    /// Absorbing pad width on the left, right and bottom (cells).
    pub pad: usize,
    pub order: StencilOrder,
    /// Dominant source frequency (Hz).
    pub source_freq: f64,
    /// Ricker peak delay (s).
    pub t0: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dx: 7.0,
            dz: 7.0,
            dt: 0.001,
            n_t: 1000,
            pad: 20,
            order: StencilOrder::Two,
            source_freq: 20.0,
            t0: 1.5 / 20.0,
        }
    }
}

impl SimConfig {
    pub fn wavelet<T: crate::Real>(&self) -> crate::Result<SourceWavelet<T>> {
        ricker(self.source_freq, self.dt, self.n_t, self.t0)
    }
}
