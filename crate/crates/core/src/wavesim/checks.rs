use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use super::{SimConfig, StencilOrder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Stability,
    Dispersion,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub kind: CheckKind,
    pub passed: bool,
    /// Courant number or points per wavelength.
    pub value: f64,
    /// Maximum Courant number or minimum points per wavelength.
    pub limit: f64,
}

impl CheckResult {
    pub fn into_result(self) -> crate::Result<Self> {
        if self.passed {
            return Ok(self);
        }
        Err(match self.kind {
            CheckKind::Stability => crate::Error::Stability { courant: self.value, limit: self.limit },
            CheckKind::Dispersion => crate::Error::Dispersion {
                points_per_wavelength: self.value,
                required: self.limit,
            },
        })
    }
}

/// Exact rational value of a binary floating-point number.
fn exact(v: f64) -> BigRational {
    BigRational::from_float(v).unwrap_or_else(|| BigRational::from_integer(BigInt::from(0)))
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Lines condition `v_max·dt·√(1/dx² + 1/dz²) ≤ C`, with `C = 1` for the
/// second-order stencil and `√3/2` for the fourth-order one.
///
/// Pass/fail is decided exactly on the squared inequality over the rationals.
pub fn stability_check(cfg: &SimConfig, v_max: f64) -> CheckResult {
    let courant = v_max * cfg.dt * (1.0 / (cfg.dx * cfg.dx) + 1.0 / (cfg.dz * cfg.dz)).sqrt();
    let limit_sq = match cfg.order {
        StencilOrder::Two => int(1),
        StencilOrder::Four => int(3) / int(4),
    };
    let vdt = exact(v_max) * exact(cfg.dt);
    let (dx, dz) = (exact(cfg.dx), exact(cfg.dz));
    let valid = cfg.dx > 0.0 && cfg.dz > 0.0 && cfg.dt > 0.0 && v_max >= 0.0 && v_max.is_finite();
    let passed = valid && {
        let inv = int(1) / (dx.clone() * dx) + int(1) / (dz.clone() * dz);
        vdt.clone() * vdt * inv <= limit_sq
    };
    CheckResult {
        kind: CheckKind::Stability,
        passed,
        value: courant,
        limit: match cfg.order {
            StencilOrder::Two => 1.0,
            StencilOrder::Four => 3f64.sqrt() / 2.0,
        },
    }
}

/// Alford condition: `v_min / (f0·dx) ≥ 10` points per dominant wavelength.
pub fn dispersion_check(cfg: &SimConfig, v_min: f64) -> CheckResult {
    let ppw = v_min / (cfg.source_freq * cfg.dx);
    let valid = cfg.source_freq > 0.0 && cfg.dx > 0.0 && v_min.is_finite();
    let passed = valid && exact(v_min) >= int(10) * exact(cfg.source_freq) * exact(cfg.dx);
    CheckResult {
        kind: CheckKind::Dispersion,
        passed,
        value: ppw,
        limit: 10.0,
    }
}
