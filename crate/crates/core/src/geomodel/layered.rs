use ndarray::Array2;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{sample_interface, Category, GeoModeler, InterfaceCurve, VelocityModel};
use crate::error::{Error, Result};
use crate::rng::SampleRng;
use crate::scalar::Real;

/// One sedimentary layer: velocity (m/s), nominal thickness (cells) and the
/// interface shape added to its base.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub velocity: f64,
    pub thickness: i32,
    pub interface: InterfaceCurve,
}

/// Fills a grid top-down from a layer stack.
///
/// Layer `i` occupies rows `[d_prev + L_prev(x), d_prev + L_prev(x) + d_i + L_i(x))`
/// in column `x`, where `d_prev` and `L_prev` accumulate the thicknesses and
/// interfaces of the layers above. The deepest layer extends to the base.
pub fn fill_layers(layers: &[LayerSpec], rows: usize, cols: usize) -> Array2<f64> {
    let mut grid = Array2::<f64>::zeros((rows, cols));
    let mut d_prev: i64 = 0;
    let mut l_prev = vec![0i64; cols];
    for (i, layer) in layers.iter().enumerate() {
        let last = i + 1 == layers.len();
        for (x, lp) in l_prev.iter_mut().enumerate() {
            let li = layer.interface.samples[x] as i64;
            let start = d_prev + *lp;
            let end = if last {
                rows as i64
            } else {
                start + layer.thickness as i64 + li
            };
            let (a, b) = (start.clamp(0, rows as i64), end.clamp(0, rows as i64));
            for z in a..b {
                grid[[z as usize, x]] = layer.velocity;
            }
            *lp += li;
        }
        d_prev += layer.thickness as i64;
    }
    grid
}

impl GeoModeler {
    /// Draws a layered model with `n_layers` bands (4..=8).
    pub fn build_layered<T: Real>(
        &self,
        n_layers: usize,
        rng: &mut SampleRng,
    ) -> Result<VelocityModel<T>> {
        if !(4..=8).contains(&n_layers) {
            return Err(Error::Parameter(format!(
                "n_layers must be in [4, 8], got {n_layers}"
            )));
        }
        self.build_layered_unchecked(n_layers, rng)
    }

    pub(crate) fn build_layered_unchecked<T: Real>(
        &self,
        n_layers: usize,
        rng: &mut SampleRng,
    ) -> Result<VelocityModel<T>> {
        let cfg = &self.config;
        if n_layers < 1 {
            return Err(Error::Parameter("n_layers must be positive".into()));
        }
        let mut last_reason = String::new();
        for _ in 0..cfg.max_retries.max(1) {
            match self.draw_stack(n_layers, rng) {
                Ok(layers) => {
                    let grid = fill_layers(&layers, cfg.rows, cfg.cols);
                    return Ok(VelocityModel {
                        grid: grid.mapv(T::lit),
                        category: Category::Layered,
                        n_layers,
                        seed: 0,
                        layers,
                        fault: None,
                        salt: None,
                    });
                }
                Err(reason) => last_reason = reason,
            }
        }
        Err(Error::GenerationExhausted {
            attempts: cfg.max_retries.max(1),
            reason: last_reason,
        })
    }

    /// One attempt at drawing a feasible stack; `Err` carries the reason.
    fn draw_stack(&self, n: usize, rng: &mut SampleRng) -> std::result::Result<Vec<LayerSpec>, String> {
        let cfg = &self.config;
        let velocities = draw_velocities(n, cfg.velocity_range, cfg.min_contrast, rng)?;
        let (t_lo, t_hi) = cfg.thickness_range;
        let t_lo = t_lo.max(1);
        let t_hi = t_hi.min(cfg.rows / n).max(t_lo);
        let ids: Vec<&str> = self.registry.entries().iter().map(|e| e.id.as_str()).collect();

        let mut layers = Vec::with_capacity(n);
        let mut base = vec![0i64; cfg.cols];
        let mut depth = 0i64;
        for (i, &velocity) in velocities.iter().enumerate() {
            if i + 1 == n {
                let room = base.iter().map(|&b| cfg.rows as i64 - b).min().unwrap_or(0);
                if room < t_lo as i64 {
                    return Err(format!("deepest layer only {room} cells thick"));
                }
                layers.push(LayerSpec {
                    velocity,
                    thickness: (cfg.rows as i64 - depth) as i32,
                    interface: InterfaceCurve::flat(cfg.cols),
                });
                break;
            }
            let thickness = rng.random_range(t_lo..=t_hi) as i32;
            let id = ids[rng.random_range(0..ids.len())];
            let interface = sample_interface(&self.registry, id, cfg.cols, rng)
                .map_err(|e| e.to_string())?;
            if thickness + interface.min() < 1 {
                return Err(format!("layer {i} pinches out (interface {id})"));
            }
            for (b, &l) in base.iter_mut().zip(&interface.samples) {
                *b += thickness as i64 + l as i64;
            }
            depth += thickness as i64;
            layers.push(LayerSpec {
                velocity,
                thickness,
                interface,
            });
        }
        Ok(layers)
    }
}

/// Increasing velocities with gaps of at least `contrast`, spread uniformly
/// over the admissible slack.
fn draw_velocities(
    n: usize,
    (lo, hi): (f64, f64),
    contrast: f64,
    rng: &mut SampleRng,
) -> std::result::Result<Vec<f64>, String> {
    let slack = (hi - lo) - (n as f64 - 1.0) * contrast;
    if slack < 0.0 {
        return Err(format!(
            "{n} layers with {contrast} m/s contrast do not fit in [{lo}, {hi}]"
        ));
    }
    // n + 1 exponential spacings normalized to a uniform point on the simplex.
    let gaps: Vec<f64> = (0..=n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = gaps.iter().sum();
    let mut out = Vec::with_capacity(n);
    let mut v = lo;
    for (i, g) in gaps.iter().take(n).enumerate() {
        if i > 0 {
            v += contrast;
        }
        v += slack * g / total;
        out.push(v);
    }
    Ok(out)
}
