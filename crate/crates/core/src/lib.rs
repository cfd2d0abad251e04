//! Seismic velocity-inversion benchmark toolkit.
//!
//! The crate covers the data path of a velocity-inversion benchmark:
//! stochastic layered/fault/salt velocity models ([`geomodel`]), constant-density
//! acoustic finite-difference shot gathers ([`wavesim`]), coherent and stochastic
//! noise ([`noise`]), the L1/L2/SSIM/MS-SSIM evaluation suite ([`metrics`]), a
//! multiscale full-waveform-inversion baseline ([`fwi`]) and the flat-binary
//! dataset container with its train/test split protocol ([`dataset`]).
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the aliases at the
//! crate root fix the common instantiations.

pub mod dataset;
pub mod error;
pub mod fwi;
pub mod geomodel;
pub mod metrics;
pub mod noise;
pub mod rng;
pub mod scalar;
pub mod wavesim;

pub use error::{Error, ErrorCategory, Result};
pub use geomodel::{Category, VelocityModel};
pub use scalar::Real;
pub use wavesim::{SeismicRecord, ShotGather};

/// Single-precision velocity model, the on-disk precision.
pub type VelocityModelF32 = geomodel::VelocityModel<f32>;
/// Double-precision velocity model.
pub type VelocityModelF64 = geomodel::VelocityModel<f64>;
/// Single-precision seismic record.
pub type SeismicRecordF32 = wavesim::SeismicRecord<f32>;
/// Double-precision seismic record.
pub type SeismicRecordF64 = wavesim::SeismicRecord<f64>;
/// Double-precision FWI result.
pub type FwiResultF64 = fwi::FwiResult<f64>;
