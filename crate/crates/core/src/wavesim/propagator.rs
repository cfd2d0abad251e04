//! Second-order-in-time FD kernels for `P_tt = v²∇²P + S` on a padded grid.
//!
//! Cell roles on the padded `nz × nx` grid:
//! - row 0: free surface, `P = 0`;
//! - rows `1..nz-1`, columns `1..nx-1`: interior, leapfrog update;
//! - column 0, column `nx-1`, row `nz-1`: first-order Clayton–Engquist
//!   one-way update `P⁺ = P + r·(P_in − P)` with `r = v·dt/dx`;
//! - the two bottom corners average the two one-way conditions.
//!
//! Every update is linear in the wavefield, so the exact discrete adjoint is
//! available ([`Propagator::adjoint_gradient`]).

use ndarray::{Array2, ArrayView2};

use super::{AcquisitionGeometry, SimConfig, StencilOrder};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Pads a model by `pad` cells on the left, right and bottom, replicating the
/// nearest edge value. The top edge stays unpadded (free surface).
pub fn pad_model<T: Real>(grid: ArrayView2<T>, pad: usize) -> Array2<T> {
    let (h, w) = grid.dim();
    Array2::from_shape_fn((h + pad, w + 2 * pad), |(z, x)| {
        grid[[z.min(h - 1), x.saturating_sub(pad).min(w - 1)]]
    })
}

/// Adjoint of [`pad_model`]: sums every padded cell into the interior cell it
/// replicates.
pub fn fold_padding<T: Real>(padded: ArrayView2<T>, pad: usize) -> Array2<T> {
    let (ph, pw) = padded.dim();
    let (h, w) = (ph - pad, pw - 2 * pad);
    let mut out = Array2::zeros((h, w));
    for ((z, x), &v) in padded.indexed_iter() {
        out[[z.min(h - 1), x.saturating_sub(pad).min(w - 1)]] += v;
    }
    out
}

/// Traces recorded by one forward run plus, optionally, the per-step velocity
/// sensitivity of the state needed for the adjoint gradient.
#[derive(Debug, Clone)]
pub struct ShotWavefield<T> {
    /// `[n_t, n_receivers]`, `traces[k] = P(k·dt)`; row 0 is the quiescent start.
    pub traces: Array2<T>,
    /// `∂P((k+1)·dt)/∂v` through the local update, `(n_t − 1) × nz × nx`.
    pub sensitivity: Option<Vec<T>>,
}

#[derive(Debug, Clone)]
pub struct Propagator<T> {
    nz: usize,
    nx: usize,
    order: StencilOrder,
    /// `(v·dt/dx)²` on interior cells, `v·dt/dx` on absorbing cells.
    coef: Vec<T>,
    vel: Vec<T>,
    dt: T,
    n_t: usize,
    pad: usize,
}

const C4_NEAR: f64 = 4.0 / 3.0;
const C4_FAR: f64 = -1.0 / 12.0;
const C4_CENTER: f64 = -5.0;

impl<T: Real> Propagator<T> {
    /// Builds a propagator for a padded velocity grid.
    pub fn new(padded: ArrayView2<T>, cfg: &SimConfig) -> Result<Self> {
        if cfg.dx != cfg.dz {
            return Err(Error::Config(format!("dz ({}) must equal dx ({})", cfg.dz, cfg.dx)));
        }
        let (nz, nx) = padded.dim();
        if nz < 3 || nx < 3 {
            return Err(Error::Config(format!("padded grid {nz}x{nx} too small")));
        }
        if padded.iter().any(|&v| !(v > T::zero()) || !v.is_finite()) {
            return Err(Error::Range("velocities must be positive and finite".into()));
        }
        let dt = T::lit(cfg.dt);
        let dx = T::lit(cfg.dx);
        let vel: Vec<T> = padded.iter().copied().collect();
        let coef = vel
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let (z, x) = (i / nx, i % nx);
                let r = v * dt / dx;
                if z > 0 && z < nz - 1 && x > 0 && x < nx - 1 {
                    r * r
                } else {
                    r
                }
            })
            .collect();
        Ok(Self { nz, nx, order: cfg.order, coef, vel, dt, n_t: cfg.n_t, pad: cfg.pad })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nz, self.nx)
    }

    pub fn n_cells(&self) -> usize {
        self.nz * self.nx
    }

    pub fn pad(&self) -> usize {
        self.pad
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    /// Padded flat index of a model-grid position.
    pub fn cell(&self, row: usize, col: usize) -> usize {
        row * self.nx + col + self.pad
    }

    /// Flat source and receiver cells of `geom` for shot `shot`.
    pub fn shot_cells(&self, geom: &AcquisitionGeometry, shot: usize) -> (usize, Vec<usize>) {
        let src = self.cell(geom.effective_source_row(), geom.source_cols[shot]);
        let rec_row = geom.effective_receiver_row();
        let recs = geom.receiver_cols.iter().map(|&c| self.cell(rec_row, c)).collect();
        (src, recs)
    }

    #[inline]
    fn is_interior(&self, i: usize) -> bool {
        let (z, x) = (i / self.nx, i % self.nx);
        z > 0 && z < self.nz - 1 && x > 0 && x < self.nx - 1
    }

    #[inline]
    fn uses_order4(&self, z: usize, x: usize) -> bool {
        self.order == StencilOrder::Four && z >= 2 && z + 2 < self.nz && x >= 2 && x + 2 < self.nx
    }

    /// `next = A·cur − B·prev` (no source).
    fn step(&self, prev: &[T], cur: &[T], next: &mut [T]) {
        let (nz, nx) = (self.nz, self.nx);
        let two = T::lit(2.0);
        let four = T::lit(4.0);
        let half = T::lit(0.5);
        let coef = &self.coef;
        next[..nx].fill(T::zero());
        for z in 1..nz - 1 {
            let row = z * nx;
            if self.order == StencilOrder::Two || z < 2 || z + 2 >= nz {
                for i in row + 1..row + nx - 1 {
                    let lap = cur[i - 1] + cur[i + 1] + cur[i - nx] + cur[i + nx] - four * cur[i];
                    next[i] = two * cur[i] - prev[i] + coef[i] * lap;
                }
            } else {
                let (near, far, center) = (T::lit(C4_NEAR), T::lit(C4_FAR), T::lit(C4_CENTER));
                for x in 1..nx - 1 {
                    let i = row + x;
                    let lap = if self.uses_order4(z, x) {
                        near * (cur[i - 1] + cur[i + 1] + cur[i - nx] + cur[i + nx])
                            + far * (cur[i - 2] + cur[i + 2] + cur[i - 2 * nx] + cur[i + 2 * nx])
                            + center * cur[i]
                    } else {
                        cur[i - 1] + cur[i + 1] + cur[i - nx] + cur[i + nx] - four * cur[i]
                    };
                    next[i] = two * cur[i] - prev[i] + coef[i] * lap;
                }
            }
            let l = row;
            next[l] = cur[l] + coef[l] * (cur[l + 1] - cur[l]);
            let r = row + nx - 1;
            next[r] = cur[r] + coef[r] * (cur[r - 1] - cur[r]);
        }
        let row = (nz - 1) * nx;
        for i in row + 1..row + nx - 1 {
            next[i] = cur[i] + coef[i] * (cur[i - nx] - cur[i]);
        }
        let l = row;
        next[l] = cur[l] + half * coef[l] * ((cur[l + 1] - cur[l]) + (cur[l - nx] - cur[l]));
        let r = row + nx - 1;
        next[r] = cur[r] + half * coef[r] * ((cur[r - 1] - cur[r]) + (cur[r - nx] - cur[r]));
    }

    /// `out = Aᵀ·p1 − Bᵀ·p2`, the transpose of [`Self::step`].
    fn step_adjoint(&self, p1: &[T], p2: &[T], out: &mut [T]) {
        let (nz, nx) = (self.nz, self.nx);
        let two = T::lit(2.0);
        let four = T::lit(4.0);
        let half = T::lit(0.5);
        let one = T::one();
        let coef = &self.coef;
        out.fill(T::zero());
        for z in 1..nz - 1 {
            let row = z * nx;
            for x in 1..nx - 1 {
                let i = row + x;
                let a = coef[i] * p1[i];
                if self.uses_order4(z, x) {
                    let (near, far) = (T::lit(C4_NEAR) * a, T::lit(C4_FAR) * a);
                    out[i] += two * p1[i] + T::lit(C4_CENTER) * a - p2[i];
                    out[i - 1] += near;
                    out[i + 1] += near;
                    out[i - nx] += near;
                    out[i + nx] += near;
                    out[i - 2] += far;
                    out[i + 2] += far;
                    out[i - 2 * nx] += far;
                    out[i + 2 * nx] += far;
                } else {
                    out[i] += two * p1[i] - four * a - p2[i];
                    out[i - 1] += a;
                    out[i + 1] += a;
                    out[i - nx] += a;
                    out[i + nx] += a;
                }
            }
            let l = row;
            out[l] += (one - coef[l]) * p1[l];
            out[l + 1] += coef[l] * p1[l];
            let r = row + nx - 1;
            out[r] += (one - coef[r]) * p1[r];
            out[r - 1] += coef[r] * p1[r];
        }
        let row = (nz - 1) * nx;
        for i in row + 1..row + nx - 1 {
            out[i] += (one - coef[i]) * p1[i];
            out[i - nx] += coef[i] * p1[i];
        }
        for (i, inward) in [(row, row + 1), (row + nx - 1, row + nx - 2)] {
            let hr = half * coef[i] * p1[i];
            out[i] += (one - coef[i]) * p1[i];
            out[inward] += hr;
            out[i - nx] += hr;
        }
        out[..nx].fill(T::zero());
    }

    /// Time-steps one shot. `store` keeps the velocity sensitivity of every
    /// step for [`Self::adjoint_gradient`].
    pub fn forward(&self, src: usize, wavelet: &[T], receivers: &[usize], store: bool) -> Result<ShotWavefield<T>> {
        let mut traces = Array2::zeros((self.n_t, receivers.len()));
        let sensitivity = self.march(src, wavelet, store, |k, state| {
            for (r, &c) in receivers.iter().enumerate() {
                traces[[k, r]] = state[c];
            }
        })?;
        Ok(ShotWavefield { traces, sensitivity })
    }

    /// Time-steps one shot and hands every new state `P(k·dt)`, `k ≥ 1`, to
    /// `observe` as a flat padded field.
    pub fn observe(&self, src: usize, wavelet: &[T], observe: impl FnMut(usize, &[T])) -> Result<()> {
        self.march(src, wavelet, false, observe).map(|_| ())
    }

    fn march(
        &self,
        src: usize,
        wavelet: &[T],
        store: bool,
        mut observe: impl FnMut(usize, &[T]),
    ) -> Result<Option<Vec<T>>> {
        let n = self.n_cells();
        let mut prev = vec![T::zero(); n];
        let mut cur = vec![T::zero(); n];
        let mut next = vec![T::zero(); n];
        let n_steps = self.n_t.saturating_sub(1);
        let mut sens = if store { vec![T::zero(); n * n_steps] } else { Vec::new() };
        let src_max = wavelet.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let limit = T::lit(1e6) * src_max;
        let src_scale = self.vel[src] * self.vel[src] * self.dt * self.dt;
        let src_interior = self.is_interior(src);
        let two = T::lit(2.0);

        for k in 0..n_steps {
            self.step(&prev, &cur, &mut next);
            let inj = src_scale * wavelet.get(k).copied().unwrap_or_else(T::zero);
            next[src] += inj;

            if store {
                let g = &mut sens[k * n..(k + 1) * n];
                for (i, gi) in g.iter_mut().enumerate().skip(self.nx) {
                    *gi = if self.is_interior(i) {
                        two * (next[i] - two * cur[i] + prev[i]) / self.vel[i]
                    } else {
                        (next[i] - cur[i]) / self.vel[i]
                    };
                }
                if !src_interior {
                    g[src] += inj / self.vel[src];
                }
            }
            observe(k + 1, &next);
            if k % 16 == 0 || k + 1 == n_steps {
                let peak = next.iter().fold(T::zero(), |m, v| if v.abs() > m || v.is_nan() { v.abs() } else { m });
                if !(peak <= limit) {
                    return Err(Error::Diverged { step: k, amplitude: peak.as_f64() });
                }
            }
            std::mem::swap(&mut prev, &mut cur);
            std::mem::swap(&mut cur, &mut next);
        }
        Ok(store.then_some(sens))
    }

    /// Gradient on the padded grid of `½Σ(traces − observed)²` with respect
    /// to cell velocities, given the sensitivity stored by [`Self::forward`]
    /// and the residual `traces − observed` (`[n_t, n_receivers]`).
    pub fn adjoint_gradient(&self, sensitivity: &[T], receivers: &[usize], residual: ArrayView2<T>) -> Array2<T> {
        let n = self.n_cells();
        let n_t = self.n_t;
        let n_steps = n_t.saturating_sub(1);
        assert_eq!(sensitivity.len(), n * n_steps, "sensitivity size");
        let mut p2 = vec![T::zero(); n]; // p^{j+2}
        let mut p1 = vec![T::zero(); n]; // p^{j+1}
        let mut p = vec![T::zero(); n];
        let mut grad = vec![T::zero(); n];
        for j in (1..=n_steps).rev() {
            self.step_adjoint(&p1, &p2, &mut p);
            for (r, &c) in receivers.iter().enumerate() {
                p[c] += residual[[j, r]];
            }
            let g = &sensitivity[(j - 1) * n..j * n];
            for ((acc, &pi), &gi) in grad.iter_mut().zip(&p).zip(g) {
                *acc += pi * gi;
            }
            std::mem::swap(&mut p2, &mut p1);
            std::mem::swap(&mut p1, &mut p);
        }
        Array2::from_shape_vec((self.nz, self.nx), grad).expect("gradient shape")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn padding_replicates_edges() {
        let g = array![[1.0, 2.0], [3.0, 4.0]];
        let p = pad_model(g.view(), 2);
        assert_eq!(p.dim(), (4, 6));
        assert_eq!(p.row(0).to_vec(), vec![1.0, 1.0, 1.0, 2.0, 2.0, 2.0]);
        assert_eq!(p.row(3).to_vec(), vec![3.0, 3.0, 3.0, 4.0, 4.0, 4.0]);
        assert_eq!(pad_model(g.view(), 0), g);
        let model = Array2::from_shape_fn((100, 100), |(z, x)| (z * 100 + x) as f64);
        assert_eq!(pad_model(model.view(), 20).dim(), (120, 140));
    }

    #[test]
    fn fold_is_adjoint_of_padding() {
        let a = Array2::from_shape_fn((5, 4), |(z, x)| (z as f64 + 1.0) * (x as f64 - 1.5));
        let b = Array2::from_shape_fn((8, 10), |(z, x)| ((z * 7 + x * 3) % 5) as f64 - 2.0);
        let lhs: f64 = (&pad_model(a.view(), 3) * &b).sum();
        let rhs: f64 = (&a * &fold_padding(b.view(), 3)).sum();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    fn random_state(n: usize, seed: u64) -> Vec<f64> {
        use rand::Rng;
        let mut rng = crate::rng::rng_from_seed(seed);
        (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    #[test]
    fn step_adjoint_is_transpose_of_step() {
        for order in [StencilOrder::Two, StencilOrder::Four] {
            let vel = Array2::from_shape_fn((9, 11), |(z, x)| 1500.0 + 100.0 * z as f64 + 13.0 * x as f64);
            let cfg = SimConfig { order, ..SimConfig::default() };
            let p = Propagator::new(vel.view(), &cfg).unwrap();
            let n = p.n_cells();
            let (mut u1, mut u2, q1) = (random_state(n, 1), random_state(n, 2), random_state(n, 3));
            // states never carry energy on the free surface
            u1[..11].fill(0.0);
            u2[..11].fill(0.0);
            let mut au = vec![0.0; n];
            p.step(&u2, &u1, &mut au);
            // <A·u1 − B·u2, q> = <u1, Aᵀq> − <u2, B·q>; step_adjoint(q, q)
            // returns Aᵀq − B·q, so add B·q back for the u1 term.
            let mut atq = vec![0.0; n];
            p.step_adjoint(&q1, &q1, &mut atq);
            let lhs: f64 = au.iter().zip(&q1).map(|(a, b)| a * b).sum();
            let mut rhs = 0.0;
            for i in 0..n {
                let b = if p.is_interior(i) { q1[i] } else { 0.0 };
                rhs += u1[i] * (atq[i] + b) - u2[i] * b;
            }
            assert!((lhs - rhs).abs() < 1e-9 * lhs.abs().max(1.0), "{order:?}: {lhs} vs {rhs}");
        }
    }
}
