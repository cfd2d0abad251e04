use rayon::prelude::*;

use super::{apply_fault, insert_salt_dome, Category, GeoModeler, VelocityModel};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed};
use crate::scalar::Real;

/// Which subgroups of the benchmark to generate and how many of each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteSpec {
    pub min_layers: usize,
    pub max_layers: usize,
    pub categories: Vec<Category>,
    pub per_subgroup: usize,
    pub seed: u64,
}

impl SuiteSpec {
    /// All 15 `(layers 4..=8) × (layered, fault, salt)` subgroups.
    pub fn full(per_subgroup: usize, seed: u64) -> Self {
        Self {
            min_layers: 4,
            max_layers: 8,
            categories: Category::ALL.to_vec(),
            per_subgroup,
            seed,
        }
    }
}

/// `(n_layers, category)` in suite order.
pub fn subgroup_keys(spec: &SuiteSpec) -> Vec<(usize, Category)> {
    (spec.min_layers..=spec.max_layers)
        .flat_map(|n| spec.categories.iter().map(move |&c| (n, c)))
        .collect()
}

impl GeoModeler {
    /// Generates one model of a subgroup from its own seed.
    pub fn generate_one<T: Real>(
        &self,
        n_layers: usize,
        category: Category,
        seed: u64,
    ) -> Result<VelocityModel<T>> {
        let mut rng = rng_from_seed(seed);
        let mut model: VelocityModel<T> = self.build_layered(n_layers, &mut rng)?;
        model.seed = seed;
        match category {
            Category::Layered => Ok(model),
            Category::Fault => {
                let p = self.random_fault_params(&mut rng);
                apply_fault(&model, &p)
            }
            Category::Salt => {
                let p = self.random_salt_params(&mut rng);
                insert_salt_dome(&model, &p)
            }
        }
    }
}

/// Generates `per_subgroup` models for every subgroup of `spec`.
///
/// Model seeds derive from `(spec.seed, global index)`, where the global index
/// enumerates the full 15-subgroup suite; a subset of subgroups therefore
/// reproduces exactly the same models as the full suite.
pub fn generate_model_suite<T: Real>(gm: &GeoModeler, spec: &SuiteSpec) -> Result<Vec<VelocityModel<T>>> {
    if spec.per_subgroup < 1 {
        return Err(Error::Parameter("per-subgroup count must be at least 1".into()));
    }
    if spec.min_layers < 4 || spec.max_layers > 8 || spec.min_layers > spec.max_layers {
        return Err(Error::Parameter(format!(
            "layer range {}..={} must lie in 4..=8",
            spec.min_layers, spec.max_layers
        )));
    }
    let jobs: Vec<(usize, Category, u64)> = subgroup_keys(spec)
        .into_iter()
        .flat_map(|(n, c)| {
            let group = ((n - 4) * Category::ALL.len() + c.index()) as u64;
            (0..spec.per_subgroup as u64).map(move |j| (n, c, group * spec.per_subgroup as u64 + j))
        })
        .collect();
    jobs.par_iter()
        .map(|&(n, c, idx)| gm.generate_one(n, c, derive_seed(spec.seed, idx)))
        .collect()
}
