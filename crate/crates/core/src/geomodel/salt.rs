use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Category, GeoModeler, VelocityModel, V_SALT_MAX, V_SALT_MIN};
use crate::error::{Error, Result};
use crate::rng::SampleRng;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianBump {
    /// Height above the model base, cells.
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
}

impl GaussianBump {
    fn eval(&self, x: f64, width: f64) -> f64 {
        let d = (x - self.center) / width;
        self.amplitude * (-0.5 * d * d).exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaltParams {
    pub gaussians: Vec<GaussianBump>,
    pub dome_velocity: f64,
    /// Width of the deformation Gaussian paired with each dome bump.
    pub deformation_widths: Vec<f64>,
    /// Lift of the overburden relative to the dome height.
    pub lift_scale: f64,
}

/// Summed dome height above the base at column `x`.
pub fn dome_envelope(params: &SaltParams, x: f64) -> f64 {
    params.gaussians.iter().map(|g| g.eval(x, g.width)).sum()
}

/// Upward displacement of the overburden at the dome top in column `x`.
pub fn deformation_lift(params: &SaltParams, x: f64) -> f64 {
    params.lift_scale
        * params
            .gaussians
            .iter()
            .zip(&params.deformation_widths)
            .map(|(g, &w)| g.eval(x, w))
            .sum::<f64>()
}

/// Intrudes a salt dome rising from the base of a layered model.
///
/// Dome cells are set to `dome_velocity`. Above the dome each column samples
/// its parent from `z + lift(x)·z/top(x)`, which lifts the overlying interfaces
/// by up to `lift(x)` at the dome top while keeping the surface fixed.
pub fn insert_salt_dome<T: Real>(model: &VelocityModel<T>, params: &SaltParams) -> Result<VelocityModel<T>> {
    if model.category != Category::Layered {
        return Err(Error::Parameter(format!(
            "salt domes apply to layered models, got {}",
            model.category
        )));
    }
    if params.gaussians.len() < 4 {
        return Err(Error::Parameter(format!(
            "salt dome needs at least 4 Gaussians, got {}",
            params.gaussians.len()
        )));
    }
    if params.deformation_widths.len() != params.gaussians.len() {
        return Err(Error::Parameter("one deformation width per dome Gaussian required".into()));
    }
    if !(V_SALT_MIN..=V_SALT_MAX).contains(&params.dome_velocity) {
        return Err(Error::Parameter(format!(
            "dome velocity {} outside [{V_SALT_MIN}, {V_SALT_MAX}]",
            params.dome_velocity
        )));
    }
    let (rows, cols) = model.grid.dim();
    let heights: Vec<usize> = (0..cols)
        .map(|x| (dome_envelope(params, x as f64).round().max(0.0) as usize).min(rows - 1))
        .collect();
    if heights.iter().all(|&h| h == 0) {
        return Err(Error::Parameter("salt dome region is empty".into()));
    }
    let parent = &model.grid;
    let mut out = parent.clone();
    let salt = T::lit(params.dome_velocity);
    for x in 0..cols {
        let top = rows - heights[x];
        let lift = deformation_lift(params, x as f64);
        for z in 0..top {
            let shift = (lift * z as f64 / top as f64).round() as usize;
            out[[z, x]] = parent[[(z + shift).min(rows - 1), x]];
        }
        for z in top..rows {
            out[[z, x]] = salt;
        }
    }
    Ok(VelocityModel {
        grid: out,
        category: Category::Salt,
        salt: Some(params.clone()),
        ..model.clone()
    })
}

impl GeoModeler {
    pub fn random_salt_params(&self, rng: &mut SampleRng) -> SaltParams {
        let c = &self.config;
        let n = rng.random_range(c.salt_bumps_range.0..=c.salt_bumps_range.1.max(4)).max(4);
        let mut gaussians: Vec<GaussianBump> = (0..n)
            .map(|_| GaussianBump {
                amplitude: rng.random_range(c.salt_amplitude_range.0..=c.salt_amplitude_range.1),
                center: rng.random_range(c.salt_center_range.0..=c.salt_center_range.1),
                width: rng.random_range(c.salt_width_range.0..=c.salt_width_range.1),
            })
            .collect();
        let peak = (0..c.cols)
            .map(|x| gaussians.iter().map(|g| g.eval(x as f64, g.width)).sum::<f64>())
            .fold(0.0, f64::max);
        if peak > c.salt_max_height {
            let s = c.salt_max_height / peak;
            gaussians.iter_mut().for_each(|g| g.amplitude *= s);
        }
        let deformation_widths = gaussians
            .iter()
            .map(|g| {
                g.width
                    * rng.random_range(
                        c.salt_deformation_factor_range.0..=c.salt_deformation_factor_range.1,
                    )
            })
            .collect();
        SaltParams {
            gaussians,
            dome_velocity: rng.random_range(c.salt_velocity_range.0..=c.salt_velocity_range.1),
            deformation_widths,
            lift_scale: rng.random_range(c.salt_lift_scale_range.0..=c.salt_lift_scale_range.1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    fn centered(amplitude: f64) -> SaltParams {
        SaltParams {
            gaussians: (0..4)
                .map(|k| GaussianBump { amplitude, center: 45.0 + 3.0 * k as f64, width: 6.0 })
                .collect(),
            dome_velocity: 4450.0,
            deformation_widths: vec![15.0; 4],
            lift_scale: 0.5,
        }
    }

    fn parent() -> VelocityModel<f64> {
        GeoModeler::default().build_layered(6, &mut rng_from_seed(8)).unwrap()
    }

    #[test]
    fn dome_cells_take_dome_velocity() {
        let p = parent();
        let params = centered(12.0);
        let s = insert_salt_dome(&p, &params).unwrap();
        assert_eq!(s.category, Category::Salt);
        let n_salt = s.grid.iter().filter(|&&v| v == 4450.0).count();
        assert!(n_salt > 0);
        for x in 0..100 {
            let h = dome_envelope(&params, x as f64).round() as usize;
            for z in 100 - h..100 {
                assert_eq!(s.grid[[z, x]], 4450.0);
            }
        }
    }

    #[test]
    fn zero_amplitude_dome_is_rejected() {
        let r = insert_salt_dome(&parent(), &centered(0.0));
        assert!(matches!(r, Err(Error::Parameter(_))));
    }

    #[test]
    fn lift_peaks_over_the_apex() {
        let params = centered(12.0);
        let apex = (0..100)
            .max_by(|&a, &b| dome_envelope(&params, a as f64).total_cmp(&dome_envelope(&params, b as f64)))
            .unwrap() as f64;
        let at = |x: f64| {
            // independent evaluation of the deformation Gaussians
            0.5 * (0..4)
                .map(|k| 12.0 * (-0.5 * ((x - 45.0 - 3.0 * k as f64) / 15.0).powi(2)).exp())
                .sum::<f64>()
        };
        assert!((deformation_lift(&params, apex) - at(apex)).abs() < 1e-12);
        assert!(at(apex) >= at(apex - 30.0));
        assert!(at(apex) >= at(apex + 30.0));
    }

    #[test]
    fn columns_outside_deformation_zone_are_unchanged() {
        let p = parent();
        let params = centered(12.0);
        let s = insert_salt_dome(&p, &params).unwrap();
        let mut checked = 0;
        for x in 0..100 {
            if deformation_lift(&params, x as f64) < 0.5 && dome_envelope(&params, x as f64) < 0.5 {
                checked += 1;
                for z in 0..100 {
                    assert_eq!(s.grid[[z, x]], p.grid[[z, x]]);
                }
            }
        }
        assert!(checked > 10);
    }

    #[test]
    fn random_params_are_valid() {
        let gm = GeoModeler::default();
        let mut rng = rng_from_seed(0);
        for _ in 0..50 {
            let sp = gm.random_salt_params(&mut rng);
            assert!(sp.gaussians.len() >= 4);
            assert!((4350.0..=4550.0).contains(&sp.dome_velocity));
            for (g, w) in sp.gaussians.iter().zip(&sp.deformation_widths) {
                assert!(*w >= 2.0 * g.width);
            }
        }
    }
}
