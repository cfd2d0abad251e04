use ndarray::{Array2, ArrayView2};
use serde::Serialize;

use super::{Category, VelocityModel, MIN_CONTRAST, V_SALT_MAX, V_SALT_MIN, V_SED_MAX, V_SED_MIN};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuleOutcome {
    pub rule: &'static str,
    pub passed: bool,
    /// `(row, col)` of the first violating cell in column-major scan order.
    pub first_offender: Option<(usize, usize)>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub rules: Vec<RuleOutcome>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.rules.iter().all(|r| r.passed)
    }

    pub fn rule(&self, name: &str) -> Option<&RuleOutcome> {
        self.rules.iter().find(|r| r.rule == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &RuleOutcome> {
        self.rules.iter().filter(|r| !r.passed)
    }
}

fn outcome(rule: &'static str, hit: Option<((usize, usize), String)>) -> RuleOutcome {
    match hit {
        None => RuleOutcome { rule, passed: true, first_offender: None, detail: String::new() },
        Some((cell, detail)) => RuleOutcome { rule, passed: false, first_offender: Some(cell), detail },
    }
}

fn scan<F>(grid: ArrayView2<f64>, mut bad: F) -> Option<((usize, usize), String)>
where
    F: FnMut(usize, usize) -> Option<String>,
{
    let (rows, cols) = grid.dim();
    for x in 0..cols {
        for z in 0..rows {
            if let Some(d) = bad(z, x) {
                return Some(((z, x), d));
            }
        }
    }
    None
}

/// Checks the generator invariants on a model. Never fails; reports instead.
pub fn validate_model<T: Real>(model: &VelocityModel<T>) -> ValidationReport {
    let grid: Array2<f64> = model.grid.mapv(|v| v.as_f64());
    let g = grid.view();
    let mut rules = Vec::with_capacity(5);

    rules.push(outcome(
        "range",
        scan(g, |z, x| {
            let v = g[[z, x]];
            (!(V_SED_MIN..=V_SALT_MAX).contains(&v)).then(|| format!("{v} m/s outside [{V_SED_MIN}, {V_SALT_MAX}]"))
        }),
    ));

    let parent = match model.category {
        Category::Layered => Some(grid.clone()),
        _ => model.layered_parent(),
    };
    rules.push(match &parent {
        Some(p) => {
            let p = p.view();
            outcome(
                "monotone",
                scan(p, |z, x| {
                    (z > 0 && p[[z, x]] < p[[z - 1, x]])
                        .then(|| format!("{} m/s below {} m/s", p[[z, x]], p[[z - 1, x]]))
                }),
            )
        }
        None => RuleOutcome {
            rule: "monotone",
            passed: true,
            first_offender: None,
            detail: "no layered parent available; skipped".into(),
        },
    });

    rules.push(outcome(
        "contrast",
        scan(g, |z, x| {
            if z == 0 {
                return None;
            }
            let d = (g[[z, x]] - g[[z - 1, x]]).abs();
            (d > 0.0 && d < MIN_CONTRAST).then(|| format!("{d} m/s step"))
        }),
    ));

    let is_salt = model.category == Category::Salt;
    rules.push(outcome(
        "salt-range",
        scan(g, |z, x| {
            let v = g[[z, x]];
            if v <= V_SED_MAX {
                None
            } else if !is_salt {
                Some(format!("{v} m/s exceeds sedimentary maximum in a {} model", model.category))
            } else {
                (!(V_SALT_MIN..=V_SALT_MAX).contains(&v)).then(|| format!("salt {v} m/s outside [{V_SALT_MIN}, {V_SALT_MAX}]"))
            }
        }),
    ));

    let mut sed: Vec<f64> = grid.iter().copied().filter(|&v| v <= V_SED_MAX).collect();
    sed.sort_by(f64::total_cmp);
    sed.dedup();
    rules.push(if model.n_layers == 0 || sed.len() == model.n_layers {
        outcome("layer-count", None)
    } else {
        RuleOutcome {
            rule: "layer-count",
            passed: false,
            first_offender: None,
            detail: format!("{} distinct sedimentary velocities, expected {}", sed.len(), model.n_layers),
        }
    });

    ValidationReport { rules }
}
