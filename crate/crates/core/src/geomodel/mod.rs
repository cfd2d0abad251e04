//! Stochastic layered, faulted and salt-dome velocity models.

mod fault;
mod interface;
mod layered;
mod salt;
mod suite;
mod validate;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::scalar::{cast, Real};

pub use fault::{apply_fault, FaultKind, FaultParams};
pub use interface::{
    sample_interface, CurveFamily, InterfaceCurve, InterfaceEntry, InterfaceRegistry,
};
pub use layered::{fill_layers, LayerSpec};
pub use salt::{deformation_lift, dome_envelope, insert_salt_dome, GaussianBump, SaltParams};
pub use suite::{generate_model_suite, subgroup_keys, SuiteSpec};
pub use validate::{validate_model, RuleOutcome, ValidationReport};

/// Lateral and vertical size of generated models, in grid cells.
pub const MODEL_SIZE: usize = 100;
/// Lowest sedimentary velocity (m/s).
pub const V_SED_MIN: f64 = 1500.0;
/// Highest sedimentary velocity (m/s).
pub const V_SED_MAX: f64 = 4000.0;
pub const V_SALT_MIN: f64 = 4350.0;
pub const V_SALT_MAX: f64 = 4550.0;
/// Minimum velocity step between vertically adjacent layers (m/s).
pub const MIN_CONTRAST: f64 = 200.0;
/// Peak-to-trough bound on a single interface curve before quantization.
pub const INTERFACE_PTP_MAX: f64 = 15.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Layered,
    Fault,
    Salt,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::Layered, Category::Fault, Category::Salt];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Layered => "layered",
            Category::Fault => "fault",
            Category::Salt => "salt",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "layered" => Some(Category::Layered),
            "fault" => Some(Category::Fault),
            "salt" => Some(Category::Salt),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Category::Layered => 0,
            Category::Fault => 1,
            Category::Salt => 2,
        }
    }
}

impl std::fmt::Display for Category {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A 2D acoustic velocity field (m/s), `grid[[row, col]]` with row = depth.
///
/// Generated models carry the layer stack they were filled from, so the
/// layered parent of a fault or salt model can always be rebuilt.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityModel<T> {
    pub grid: Array2<T>,
    pub category: Category,
    pub n_layers: usize,
    pub seed: u64,
    pub layers: Vec<LayerSpec>,
    pub fault: Option<FaultParams>,
    pub salt: Option<SaltParams>,
}

impl<T: Real> VelocityModel<T> {
    /// Wraps an arbitrary grid as a layered model without layer metadata.
    pub fn from_grid(grid: Array2<T>) -> Self {
        Self {
            grid,
            category: Category::Layered,
            n_layers: 0,
            seed: 0,
            layers: Vec::new(),
            fault: None,
            salt: None,
        }
    }

    pub fn homogeneous(rows: usize, cols: usize, velocity: T) -> Self {
        Self::from_grid(Array2::from_elem((rows, cols), velocity))
    }

    pub fn rows(&self) -> usize {
        self.grid.nrows()
    }

    pub fn cols(&self) -> usize {
        self.grid.ncols()
    }

    pub fn v_min(&self) -> T {
        self.grid.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn v_max(&self) -> T {
        self.grid.iter().copied().fold(T::neg_infinity(), T::max)
    }

    /// Same model with the grid converted to another scalar type.
    pub fn cast<U: Real>(&self) -> VelocityModel<U> {
        VelocityModel {
            grid: self.grid.mapv(cast::<T, U>),
            category: self.category,
            n_layers: self.n_layers,
            seed: self.seed,
            layers: self.layers.clone(),
            fault: self.fault.clone(),
            salt: self.salt.clone(),
        }
    }

    pub fn with_grid(&self, grid: Array2<T>) -> Self {
        Self {
            grid,
            ..self.clone()
        }
    }

    /// Rebuilds the layered parent from the stored layer stack.
    pub fn layered_parent(&self) -> Option<Array2<f64>> {
        if self.layers.is_empty() {
            return None;
        }
        Some(fill_layers(&self.layers, self.rows(), self.cols()))
    }
}

/// Parameters of the stochastic model generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeoConfig {
    pub rows: usize,
    pub cols: usize,
    /// Nominal layer thickness range `[lo, hi]` in cells. The upper bound is
    /// additionally capped at `rows / n_layers` so deep stacks fit.
    pub thickness_range: (usize, usize),
    pub velocity_range: (f64, f64),
    pub min_contrast: f64,
    pub max_retries: usize,
    pub fault_angle_range: (f64, f64),
    pub fault_throw_range: (usize, usize),
    pub fault_pivot_range: (usize, usize),
    pub salt_bumps_range: (usize, usize),
    pub salt_center_range: (f64, f64),
    pub salt_width_range: (f64, f64),
    pub salt_amplitude_range: (f64, f64),
    /// Maximum dome height above the base, in cells.
    pub salt_max_height: f64,
    /// Deformation width multiplier relative to each dome bump.
    pub salt_deformation_factor_range: (f64, f64),
    pub salt_lift_scale_range: (f64, f64),
    pub salt_velocity_range: (f64, f64),
}

impl Default for GeoConfig {
    fn default() -> Self {
        Self {
            rows: MODEL_SIZE,
            cols: MODEL_SIZE,
            thickness_range: (6, 25),
            velocity_range: (V_SED_MIN, V_SED_MAX),
            min_contrast: MIN_CONTRAST,
            max_retries: 100,
            fault_angle_range: (45.0, 90.0),
            fault_throw_range: (3, 12),
            fault_pivot_range: (20, 80),
            salt_bumps_range: (4, 6),
            salt_center_range: (25.0, 75.0),
            salt_width_range: (4.0, 10.0),
            salt_amplitude_range: (8.0, 28.0),
            salt_max_height: 60.0,
            salt_deformation_factor_range: (2.0, 3.0),
            salt_lift_scale_range: (0.3, 0.6),
            salt_velocity_range: (V_SALT_MIN, V_SALT_MAX),
        }
    }
}

/// Model generator bundling the configuration and interface registry.
#[derive(Debug, Clone)]
pub struct GeoModeler {
    pub config: GeoConfig,
    pub registry: InterfaceRegistry,
}

impl Default for GeoModeler {
    fn default() -> Self {
        Self::new(GeoConfig::default())
    }
}

impl GeoModeler {
    pub fn new(config: GeoConfig) -> Self {
        Self {
            config,
            registry: InterfaceRegistry::standard(),
        }
    }
}
