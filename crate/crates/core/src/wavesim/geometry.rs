use serde::{Deserialize, Serialize};

/// Source and receiver placement on the model grid (0-based columns).
///
/// Row 0 is the free surface; sources and receivers placed there are moved
/// to row 1 by the solver, since pressure vanishes on the surface itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcquisitionGeometry {
    pub receiver_cols: Vec<usize>,
    pub source_cols: Vec<usize>,
    pub source_row: usize,
    pub receiver_row: usize,
}

impl AcquisitionGeometry {
    pub fn n_sources(&self) -> usize {
        self.source_cols.len()
    }

    pub fn n_receivers(&self) -> usize {
        self.receiver_cols.len()
    }

    /// Row actually used by the solver for sources.
    pub fn effective_source_row(&self) -> usize {
        self.source_row.max(1)
    }

    pub fn effective_receiver_row(&self) -> usize {
        self.receiver_row.max(1)
    }

    /// Evenly spaced layout: receivers every `rec_step` from column 0 and
    /// `n_src` sources every `src_step` starting at `src_start`.
    pub fn uniform(width: usize, rec_step: usize, src_start: usize, src_step: usize, n_src: usize) -> Self {
        Self {
            receiver_cols: (0..width).step_by(rec_step.max(1)).collect(),
            source_cols: (0..n_src).map(|i| src_start + i * src_step).collect(),
            source_row: 0,
            receiver_row: 0,
        }
    }
}

/// 34 receivers every 3 cells (columns 0..=99) and 20 sources every 5 cells
/// starting at column 2, all on the surface of a 100-column model.
pub fn default_geometry() -> AcquisitionGeometry {
    AcquisitionGeometry::uniform(100, 3, 2, 5, 20)
}
