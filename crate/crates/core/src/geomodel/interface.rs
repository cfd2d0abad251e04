//! Registry of parametric interface-curve families.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::INTERFACE_PTP_MAX;
use crate::error::{Error, Result};
use crate::rng::{stream_rng, SampleRng};

/// Closed-form curve families. `x` is the lateral grid index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveFamily {
    Flat,
    /// `c0·√x + c1·ln(c2·x + 1)·sin(c3·x)·cos(c4·x + c5)`
    TrigProduct,
    /// `c0·x² − c1·sin(c2·x + c3) + c4·(x + c5) − c6·x`
    PolyTrig,
    /// `exp(c0·x − c1) − c2·sin(x − c3) + c4·x/(x + c5)`
    ExpRational,
    /// `c0·sin(c1·x + c2)`
    Sinusoid,
    /// `c0·x + c1`
    Incline,
}

impl CurveFamily {
    pub fn eval(self, c: &[f64], x: f64) -> f64 {
        match self {
            CurveFamily::Flat => 0.0,
            CurveFamily::TrigProduct => {
                c[0] * x.sqrt() + c[1] * (c[2] * x + 1.0).ln() * (c[3] * x).sin() * (c[4] * x + c[5]).cos()
            }
            CurveFamily::PolyTrig => {
                c[0] * x * x - c[1] * (c[2] * x + c[3]).sin() + c[4] * (x + c[5]) - c[6] * x
            }
            CurveFamily::ExpRational => {
                (c[0] * x - c[1]).exp() - c[2] * (x - c[3]).sin() + c[4] * x / (x + c[5])
            }
            CurveFamily::Sinusoid => c[0] * (c[1] * x + c[2]).sin(),
            CurveFamily::Incline => c[0] * x + c[1],
        }
    }

    fn base_coefficients(self) -> &'static [f64] {
        match self {
            CurveFamily::Flat => &[],
            CurveFamily::TrigProduct => &[1.0, 5.0, 15.0, 0.14, 0.3, 20.0],
            CurveFamily::PolyTrig => &[0.09, 3.6, 0.6, 2.0, 5.0, 1.5, 0.8],
            CurveFamily::ExpRational => &[0.1, 0.11, 1.5, 6.0, 2.1, 3.0],
            CurveFamily::Sinusoid => &[6.0, 0.08, 0.0],
            CurveFamily::Incline => &[0.1, 0.0],
        }
    }

    fn name(self) -> &'static str {
        match self {
            CurveFamily::Flat => "flat",
            CurveFamily::TrigProduct => "trig",
            CurveFamily::PolyTrig => "polytrig",
            CurveFamily::ExpRational => "exprat",
            CurveFamily::Sinusoid => "sine",
            CurveFamily::Incline => "incline",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterfaceEntry {
    pub id: String,
    pub family: CurveFamily,
    pub coeffs: Vec<f64>,
    /// Randomized entries draw a per-sample amplitude, mirror and polarity.
    pub randomized: bool,
}

/// Integer depth offsets (cells) of one interface, one per lateral column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterfaceCurve {
    pub samples: Vec<i32>,
    pub family_id: String,
}

impl InterfaceCurve {
    pub fn flat(width: usize) -> Self {
        Self {
            samples: vec![0; width],
            family_id: "flat".into(),
        }
    }

    pub fn min(&self) -> i32 {
        self.samples.iter().copied().min().unwrap_or(0)
    }

    pub fn max(&self) -> i32 {
        self.samples.iter().copied().max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceRegistry {
    entries: Vec<InterfaceEntry>,
}

/// Seed of the fixed coefficient table of variant entries.
const REGISTRY_SEED: u64 = 0x1F_ACE5;

const STANDARD_VARIANTS: [(CurveFamily, usize); 5] = [
    (CurveFamily::TrigProduct, 28),
    (CurveFamily::PolyTrig, 28),
    (CurveFamily::ExpRational, 28),
    (CurveFamily::Sinusoid, 16),
    (CurveFamily::Incline, 14),
];

impl InterfaceRegistry {
    /// Flat, the three closed-form reference curves, and 114 variants.
    pub fn standard() -> Self {
        Self::with_variants(&STANDARD_VARIANTS)
    }

    pub fn with_variants(counts: &[(CurveFamily, usize)]) -> Self {
        let mut entries = vec![
            exact("flat", CurveFamily::Flat),
            exact("l1", CurveFamily::TrigProduct),
            exact("l2", CurveFamily::PolyTrig),
            exact("l3", CurveFamily::ExpRational),
        ];
        for (fi, &(family, n)) in counts.iter().enumerate() {
            let mut rng = stream_rng(REGISTRY_SEED, fi as u64);
            for k in 0..n {
                let coeffs = family
                    .base_coefficients()
                    .iter()
                    .map(|&c| {
                        // Jitter multiplicatively; zero coefficients get an additive phase.
                        if c == 0.0 {
                            rng.random_range(-3.0..3.0)
                        } else {
                            c * rng.random_range(0.5..1.5)
                        }
                    })
                    .collect();
                entries.push(InterfaceEntry {
                    id: format!("{}-{:03}", family.name(), k),
                    family,
                    coeffs,
                    randomized: true,
                });
            }
        }
        Self { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[InterfaceEntry] {
        &self.entries
    }

    pub fn get(&self, id: &str) -> Option<&InterfaceEntry> {
        self.entries.iter().find(|e| e.id == id)
    }
}

fn exact(id: &str, family: CurveFamily) -> InterfaceEntry {
    InterfaceEntry {
        id: id.into(),
        family,
        coeffs: family.base_coefficients().to_vec(),
        randomized: false,
    }
}

/// Evaluates registry entry `family_id` over `width` columns and quantizes it.
///
/// Curves are rescaled about zero so their peak-to-trough span is at most
/// [`INTERFACE_PTP_MAX`] cells before rounding.
pub fn sample_interface(
    registry: &InterfaceRegistry,
    family_id: &str,
    width: usize,
    rng: &mut SampleRng,
) -> Result<InterfaceCurve> {
    let entry = registry
        .get(family_id)
        .ok_or_else(|| Error::Config(format!("unknown interface family `{family_id}`")))?;
    let mut values: Vec<f64> = (0..width)
        .map(|x| entry.family.eval(&entry.coeffs, x as f64))
        .collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config(format!(
            "interface family `{family_id}` is not finite on the grid"
        )));
    }
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let ptp = hi - lo;
    let mut scale = if ptp > INTERFACE_PTP_MAX {
        INTERFACE_PTP_MAX / ptp
    } else {
        1.0
    };
    if entry.randomized {
        scale *= rng.random_range(0.25..1.0);
        if rng.random_bool(0.5) {
            scale = -scale;
        }
        if rng.random_bool(0.5) {
            values.reverse();
        }
    }
    let samples = values.iter().map(|v| (v * scale).round() as i32).collect();
    Ok(InterfaceCurve {
        samples,
        family_id: family_id.to_string(),
    })
}
