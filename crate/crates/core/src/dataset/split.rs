use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::SampleMeta;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, stream_rng};
use crate::Category;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub test_per_subgroup: usize,
    /// Per-subgroup training counts, one per level (TD-I, TD-II, ...).
    pub train_sizes: Vec<usize>,
    pub seed: u64,
    /// Draw every level as a prefix of one permutation, so TD-i ⊆ TD-j.
    pub nested: bool,
}

impl SplitSpec {
    /// 800 test models per subgroup and TD-I..V of 50..400 per subgroup.
    pub fn benchmark(seed: u64) -> Self {
        Self { test_per_subgroup: 800, train_sizes: vec![50, 100, 200, 300, 400], seed, nested: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Splits {
    pub spec: SplitSpec,
    /// Sorted test ids.
    pub test: Vec<usize>,
    /// Sorted ids per level, keyed by [`td_level_name`].
    pub train: BTreeMap<String, Vec<usize>>,
}

impl Splits {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Level names in increasing size order.
    pub fn levels(&self) -> Vec<String> {
        (0..self.spec.train_sizes.len()).map(td_level_name).collect()
    }
}

/// `"TD-I"`, `"TD-II"`, ... for level 0, 1, ...
pub fn td_level_name(level: usize) -> String {
    const TABLE: [(usize, &str); 13] = [
        (1000, "M"),
        (900, "CM"),
        (500, "D"),
        (400, "CD"),
        (100, "C"),
        (90, "XC"),
        (50, "L"),
        (40, "XL"),
        (10, "X"),
        (9, "IX"),
        (5, "V"),
        (4, "IV"),
        (1, "I"),
    ];
    let mut n = level + 1;
    let mut s = String::from("TD-");
    for (v, sym) in TABLE {
        while n >= v {
            s.push_str(sym);
            n -= v;
        }
    }
    s
}

/// Per-subgroup random test selection plus training levels drawn from the
/// remainder. Deterministic in `spec.seed`; every subgroup contributes
/// exactly its quota to every list.
pub fn split(samples: &[SampleMeta], spec: &SplitSpec) -> Result<Splits> {
    if spec.nested && spec.train_sizes.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Split(format!("nested train sizes must be non-decreasing: {:?}", spec.train_sizes)));
    }
    let mut groups: BTreeMap<(usize, Category), Vec<usize>> = BTreeMap::new();
    for s in samples {
        groups.entry((s.n_layers, s.subtype)).or_default().push(s.id);
    }
    let max_train = spec.train_sizes.iter().copied().max().unwrap_or(0);
    let mut test = Vec::new();
    let mut train: Vec<Vec<usize>> = vec![Vec::new(); spec.train_sizes.len()];
    for (&(n, cat), ids) in &groups {
        if spec.test_per_subgroup + max_train > ids.len() {
            return Err(Error::Split(format!(
                "subgroup {n}-{cat} has {} samples, needs {} test + {max_train} train",
                ids.len(),
                spec.test_per_subgroup
            )));
        }
        let stream = derive_seed(spec.seed, (n * 8 + cat.index()) as u64);
        let mut ids = ids.clone();
        ids.sort_unstable();
        ids.shuffle(&mut stream_rng(stream, 0));
        let (t, rest) = ids.split_at(spec.test_per_subgroup);
        test.extend_from_slice(t);
        for (level, &size) in spec.train_sizes.iter().enumerate() {
            if spec.nested {
                train[level].extend_from_slice(&rest[..size]);
            } else {
                let mut pool = rest.to_vec();
                pool.shuffle(&mut stream_rng(stream, 1 + level as u64));
                train[level].extend_from_slice(&pool[..size]);
            }
        }
    }
    test.sort_unstable();
    let train = train
        .into_iter()
        .enumerate()
        .map(|(level, mut ids)| {
            ids.sort_unstable();
            (td_level_name(level), ids)
        })
        .collect();
    Ok(Splits { spec: spec.clone(), test, train })
}
