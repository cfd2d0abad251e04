use ndarray::Array2;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Category, GeoModeler, VelocityModel};
use crate::error::{Error, Result};
use crate::rng::SampleRng;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FaultKind {
    /// Hanging wall moves down.
    Normal,
    /// Hanging wall moves up.
    Reverse,
}

/// A planar fault through `(row 0, col pivot)` dipping toward increasing column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaultParams {
    /// Dip from horizontal, degrees in (0, 90].
    pub angle_deg: f64,
    pub kind: FaultKind,
    /// Vertical displacement of the hanging wall, cells.
    pub throw: usize,
    pub pivot: usize,
}

impl FaultParams {
    /// Number of hanging-wall cells at the top of column `x`.
    pub fn hanging_wall_rows(&self, x: usize, rows: usize) -> usize {
        let dx = x as f64 - self.pivot as f64;
        if (self.angle_deg - 90.0).abs() < 1e-9 {
            return if x >= self.pivot { rows } else { 0 };
        }
        if dx <= 0.0 {
            return 0;
        }
        let depth = dx * self.angle_deg.to_radians().tan();
        (depth.ceil().max(0.0) as usize).min(rows)
    }
}

/// Displaces the hanging wall of a layered model vertically by `throw` cells.
///
/// Cells vacated by the motion copy the nearest surviving cell of the same
/// column (shallower one on ties), so no new velocity values appear.
pub fn apply_fault<T: Real>(model: &VelocityModel<T>, params: &FaultParams) -> Result<VelocityModel<T>> {
    if model.category != Category::Layered {
        return Err(Error::Parameter(format!(
            "faults apply to layered models, got {}",
            model.category
        )));
    }
    let (rows, cols) = model.grid.dim();
    if params.throw < 1 || params.throw >= rows {
        return Err(Error::Parameter(format!(
            "fault throw must be in [1, {}), got {}",
            rows, params.throw
        )));
    }
    if !(params.angle_deg > 0.0 && params.angle_deg <= 90.0) {
        return Err(Error::Parameter(format!(
            "fault angle must be in (0, 90], got {}",
            params.angle_deg
        )));
    }
    let parent = &model.grid;
    let mut out: Array2<T> = parent.clone();
    let mut valid = vec![true; rows];
    let t = params.throw;
    for x in 0..cols {
        let hw = params.hanging_wall_rows(x, rows);
        if hw == 0 {
            continue;
        }
        valid.iter_mut().for_each(|v| *v = true);
        for z in 0..hw {
            let src = match params.kind {
                FaultKind::Normal => z.checked_sub(t),
                FaultKind::Reverse => Some(z + t).filter(|&s| s < hw),
            };
            match src {
                Some(s) => out[[z, x]] = parent[[s, x]],
                None => valid[z] = false,
            }
        }
        for z in 0..hw {
            if valid[z] {
                continue;
            }
            let up = (0..z).rev().find(|&k| valid[k]).map(|k| (z - k, k));
            let down = (z + 1..rows).find(|&k| valid[k]).map(|k| (k - z, k));
            let pick = match (up, down) {
                (Some(u), Some(d)) => if u.0 <= d.0 { u.1 } else { d.1 },
                (Some(u), None) => u.1,
                (None, Some(d)) => d.1,
                (None, None) => continue,
            };
            out[[z, x]] = out[[pick, x]];
        }
    }
    Ok(VelocityModel {
        grid: out,
        category: Category::Fault,
        fault: Some(params.clone()),
        ..model.clone()
    })
}

impl GeoModeler {
    pub fn random_fault_params(&self, rng: &mut SampleRng) -> FaultParams {
        let c = &self.config;
        FaultParams {
            angle_deg: rng.random_range(c.fault_angle_range.0..=c.fault_angle_range.1),
            kind: if rng.random_bool(0.5) {
                FaultKind::Normal
            } else {
                FaultKind::Reverse
            },
            throw: rng.random_range(c.fault_throw_range.0..=c.fault_throw_range.1),
            pivot: rng.random_range(c.fault_pivot_range.0..=c.fault_pivot_range.1),
        }
    }
}
