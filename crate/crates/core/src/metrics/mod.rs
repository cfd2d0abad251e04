//! Evaluation metrics on normalized velocity fields.

mod ssim;

pub use ssim::{downsample, mssim, mssim_factors, ssim, ssim_parts, SsimParts, C1, C2, MS_WEIGHTS, SIGMA, WINDOW};

use std::collections::BTreeMap;

use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geomodel::{V_SALT_MAX, V_SED_MIN};
use crate::scalar::Real;
use crate::VelocityModel;

/// Lower end of the normalization range (m/s).
pub const NORM_LO: f64 = V_SED_MIN;
/// Upper end of the normalization range (m/s).
pub const NORM_HI: f64 = V_SALT_MAX;

/// `(v − 1500) / 3050`; every cell must lie in `[1500, 4550]`.
pub fn normalize_velocity<T: Real>(grid: ArrayView2<T>) -> Result<Array2<f64>> {
    let span = NORM_HI - NORM_LO;
    let mut out = Array2::zeros(grid.dim());
    for ((idx, &v), o) in grid.indexed_iter().zip(out.iter_mut()) {
        let v = v.as_f64();
        if !(NORM_LO..=NORM_HI).contains(&v) {
            return Err(Error::Range(format!("cell {idx:?} = {v} m/s outside [{NORM_LO}, {NORM_HI}]")));
        }
        *o = (v - NORM_LO) / span;
    }
    Ok(out)
}

pub fn denormalize_velocity(field: ArrayView2<f64>) -> Array2<f64> {
    field.mapv(|u| NORM_LO + u * (NORM_HI - NORM_LO))
}

fn same_shape(a: ArrayView2<f64>, b: ArrayView2<f64>) -> Result<()> {
    if a.dim() == b.dim() {
        Ok(())
    } else {
        Err(Error::shape(&[a.nrows(), a.ncols()], &[b.nrows(), b.ncols()]))
    }
}

/// Mean absolute difference.
pub fn l1(a: ArrayView2<f64>, b: ArrayView2<f64>) -> Result<f64> {
    same_shape(a, b)?;
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.len() as f64)
}

/// Mean squared difference.
pub fn l2(a: ArrayView2<f64>, b: ArrayView2<f64>) -> Result<f64> {
    same_shape(a, b)?;
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.len() as f64)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricValues {
    pub l1: f64,
    pub l2: f64,
    pub ssim: f64,
    pub mssim: f64,
}

impl MetricValues {
    /// All four metrics for a pair of normalized fields.
    pub fn compute(a: ArrayView2<f64>, b: ArrayView2<f64>) -> Result<Self> {
        Ok(Self { l1: l1(a, b)?, l2: l2(a, b)?, ssim: ssim(a, b)?, mssim: mssim(a, b)? })
    }

    fn mean(items: &[MetricValues]) -> Self {
        let n = items.len().max(1) as f64;
        let mut m = Self::default();
        for v in items {
            m.l1 += v.l1;
            m.l2 += v.l2;
            m.ssim += v.ssim;
            m.mssim += v.mssim;
        }
        Self { l1: m.l1 / n, l2: m.l2 / n, ssim: m.ssim / n, mssim: m.mssim / n }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleMetrics {
    pub id: usize,
    pub subgroup: String,
    #[serde(flatten)]
    pub values: MetricValues,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupMetrics {
    pub count: usize,
    #[serde(flatten)]
    pub values: MetricValues,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub overall: GroupMetrics,
    /// Keyed `"<n_layers>-<category>"`, e.g. `"4-layered"`.
    pub subgroups: BTreeMap<String, GroupMetrics>,
    pub samples: Vec<SampleMetrics>,
}

impl MetricsReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

pub fn subgroup_key(n_layers: usize, category: crate::Category) -> String {
    format!("{n_layers}-{category}")
}

/// Scores `preds[i]` against `targets[i]`. Both sides carry sample ids that
/// must agree position by position; subgroups come from the targets.
pub fn evaluate_batch<T: Real>(
    pred_ids: &[usize],
    preds: &[VelocityModel<T>],
    target_ids: &[usize],
    targets: &[VelocityModel<T>],
) -> Result<MetricsReport> {
    if preds.len() != targets.len() || pred_ids.len() != preds.len() || target_ids.len() != targets.len() {
        return Err(Error::shape(&[targets.len(), target_ids.len()], &[preds.len(), pred_ids.len()]));
    }
    if let Some(i) = (0..pred_ids.len()).find(|&i| pred_ids[i] != target_ids[i]) {
        return Err(Error::IdMismatch(format!(
            "position {i}: prediction id {} vs target id {}",
            pred_ids[i], target_ids[i]
        )));
    }
    let samples = (0..preds.len())
        .into_par_iter()
        .map(|i| {
            let p = normalize_velocity(preds[i].grid.view())?;
            let t = normalize_velocity(targets[i].grid.view())?;
            Ok(SampleMetrics {
                id: target_ids[i],
                subgroup: subgroup_key(targets[i].n_layers, targets[i].category),
                values: MetricValues::compute(p.view(), t.view())?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut groups: BTreeMap<String, Vec<MetricValues>> = BTreeMap::new();
    for s in &samples {
        groups.entry(s.subgroup.clone()).or_default().push(s.values);
    }
    let all: Vec<MetricValues> = samples.iter().map(|s| s.values).collect();
    Ok(MetricsReport {
        overall: GroupMetrics { count: all.len(), values: MetricValues::mean(&all) },
        subgroups: groups
            .into_iter()
            .map(|(k, v)| (k, GroupMetrics { count: v.len(), values: MetricValues::mean(&v) }))
            .collect(),
        samples,
    })
}
