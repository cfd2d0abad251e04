//! Coherent (surface-wave-like) and stochastic noise gathers, and their
//! mixing into clean records.
//!
//! Noise gathers share the `[n_t, n_receivers]` layout of [`ShotGather`]
//! traces with time `k·dt` on row `k`.

use ndarray::{Array2, ArrayView1, Axis};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream_rng, SampleRng};
use crate::scalar::{cast, Real};
use crate::wavesim::{AcquisitionGeometry, SeismicRecord, ShotGather, SimConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseConfig {
    /// Apparent velocity of coherent events (m/s).
    pub coherent_velocity_range: (f64, f64),
    /// Ricker frequency of the coherent wavelet (Hz).
    pub coherent_f0_range: (f64, f64),
    pub coherent_events_range: (usize, usize),
    /// Onset time of a coherent event at the source position (s).
    pub coherent_onset_range: (f64, f64),
    /// `e`-folding time of the temporal attenuation (s).
    pub coherent_decay_time: f64,
    pub stochastic_sine_range: (f64, f64),
    /// Periods in the tapered sine kernel.
    pub stochastic_sine_periods: usize,
    pub stochastic_sigma_range: (f64, f64),
    pub stochastic_zero_fraction_range: (f64, f64),
    /// Zeroed segments per trace.
    pub stochastic_segments_range: (usize, usize),
    /// Each component's max-abs as a fraction of the clean gather's max-abs.
    pub mix_level_range: (f64, f64),
    pub seed: u64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            coherent_velocity_range: (250.0, 450.0),
            coherent_f0_range: (8.0, 17.0),
            coherent_events_range: (1, 3),
            coherent_onset_range: (0.0, 0.3),
            coherent_decay_time: 0.5,
            stochastic_sine_range: (13.0, 17.0),
            stochastic_sine_periods: 4,
            stochastic_sigma_range: (0.5, 2.0),
            stochastic_zero_fraction_range: (0.2, 0.6),
            stochastic_segments_range: (1, 3),
            mix_level_range: (0.05, 0.20),
            seed: 0,
        }
    }
}

fn check_range<T: PartialOrd + std::fmt::Debug>(name: &str, r: &(T, T)) -> Result<()> {
    if r.0 <= r.1 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name}: empty range {r:?}")))
    }
}

impl NoiseConfig {
    pub fn validate(&self) -> Result<()> {
        check_range("coherent_velocity_range", &self.coherent_velocity_range)?;
        check_range("coherent_f0_range", &self.coherent_f0_range)?;
        check_range("coherent_events_range", &self.coherent_events_range)?;
        check_range("coherent_onset_range", &self.coherent_onset_range)?;
        check_range("stochastic_sine_range", &self.stochastic_sine_range)?;
        check_range("stochastic_sigma_range", &self.stochastic_sigma_range)?;
        check_range("stochastic_zero_fraction_range", &self.stochastic_zero_fraction_range)?;
        check_range("stochastic_segments_range", &self.stochastic_segments_range)?;
        check_range("mix_level_range", &self.mix_level_range)?;
        if !(self.coherent_velocity_range.0 > 0.0) || !(self.coherent_f0_range.0 > 0.0) {
            return Err(Error::Config("coherent velocity and frequency must be positive".into()));
        }
        if !(self.stochastic_sine_range.0 > 0.0) || self.stochastic_sine_periods == 0 {
            return Err(Error::Config("sine kernel needs a positive frequency and period count".into()));
        }
        if !(self.coherent_decay_time > 0.0) || self.stochastic_sigma_range.0 < 0.0 {
            return Err(Error::Config("decay time must be positive and sigma non-negative".into()));
        }
        let (zl, zh) = self.stochastic_zero_fraction_range;
        let (ml, mh) = self.mix_level_range;
        if zl < 0.0 || zh > 1.0 || ml < 0.0 || mh >= 1.0 || self.stochastic_segments_range.0 == 0 {
            return Err(Error::Config("zero fractions must lie in [0,1], mix levels in [0,1)".into()));
        }
        Ok(())
    }
}

fn draw(rng: &mut SampleRng, r: (f64, f64)) -> f64 {
    if r.0 == r.1 {
        r.0
    } else {
        rng.random_range(r.0..r.1)
    }
}

/// One linear-moveout event of a coherent noise gather.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentEvent {
    /// Onset at zero offset (s).
    pub onset: f64,
    /// Apparent velocity (m/s).
    pub velocity: f64,
    /// Spike amplitude at zero offset and zero time.
    pub amplitude: f64,
}

impl CoherentEvent {
    pub fn time_at(&self, offset: f64) -> f64 {
        self.onset + offset.abs() / self.velocity
    }

    /// Spike amplitude: `exp(−t/τ)` times a `1/√(1 + offset/21 m)` spread.
    pub fn amplitude_at(&self, offset: f64, decay: f64) -> f64 {
        self.amplitude * (-self.time_at(offset) / decay).exp() / (1.0 + offset.abs() / 21.0).sqrt()
    }
}

#[derive(Debug, Clone)]
pub struct CoherentNoise {
    pub gather: Array2<f64>,
    /// Spike train before wavelet convolution.
    pub spikes: Array2<f64>,
    pub events: Vec<CoherentEvent>,
    pub f0: f64,
}

fn receiver_offsets(geom: &AcquisitionGeometry, source_index: usize, dx: f64) -> Vec<f64> {
    let sx = geom.source_cols[source_index] as f64;
    geom.receiver_cols.iter().map(|&c| (c as f64 - sx) * dx).collect()
}

/// Spike trains for `events` at the given receiver offsets.
pub fn spike_train(events: &[CoherentEvent], offsets: &[f64], n_t: usize, dt: f64, decay: f64) -> Array2<f64> {
    let mut out = Array2::zeros((n_t, offsets.len()));
    for ev in events {
        for (r, &off) in offsets.iter().enumerate() {
            let k = (ev.time_at(off) / dt).round();
            if k >= 0.0 && (k as usize) < n_t {
                out[[k as usize, r]] += ev.amplitude_at(off, decay);
            }
        }
    }
    out
}

/// Zero-phase Ricker kernel of odd length, centered.
fn ricker_kernel(f0: f64, dt: f64) -> Vec<f64> {
    let half = (1.5 / (f0 * dt)).ceil() as i64;
    (-half..=half)
        .map(|k| {
            let a = (std::f64::consts::PI * f0 * k as f64 * dt).powi(2);
            (1.0 - 2.0 * a) * (-a).exp()
        })
        .collect()
}

/// Hann-tapered sine of `periods` periods at `freq`, unit peak.
pub fn sine_kernel(freq: f64, periods: usize, dt: f64) -> Vec<f64> {
    let n = ((periods as f64 / (freq * dt)).round() as usize).max(3);
    let raw: Vec<f64> = (0..n)
        .map(|k| {
            let t = k as f64 * dt;
            let hann = 0.5 - 0.5 * (2.0 * std::f64::consts::PI * k as f64 / (n - 1) as f64).cos();
            hann * (2.0 * std::f64::consts::PI * freq * t).sin()
        })
        .collect();
    let peak = raw.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    raw.into_iter().map(|v| v / peak).collect()
}

/// Centered ("same") convolution of each column with `kernel`.
fn convolve_columns(data: &Array2<f64>, kernel: &[f64]) -> Array2<f64> {
    let (n_t, n_r) = data.dim();
    let c = (kernel.len() / 2) as i64;
    let mut out = Array2::zeros((n_t, n_r));
    for r in 0..n_r {
        let col: ArrayView1<f64> = data.column(r);
        for (k, &v) in col.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            for (j, &w) in kernel.iter().enumerate() {
                let t = k as i64 + j as i64 - c;
                if (0..n_t as i64).contains(&t) {
                    out[[t as usize, r]] += v * w;
                }
            }
        }
    }
    out
}

/// Coherent noise gather for shot `source_index`.
pub fn coherent_noise(
    geom: &AcquisitionGeometry,
    source_index: usize,
    sim: &SimConfig,
    cfg: &NoiseConfig,
    rng: &mut SampleRng,
) -> Result<CoherentNoise> {
    cfg.validate()?;
    if source_index >= geom.n_sources() {
        return Err(Error::Parameter(format!("source index {source_index} out of range")));
    }
    let (lo, hi) = cfg.coherent_events_range;
    let n_events = rng.random_range(lo..=hi);
    let events: Vec<CoherentEvent> = (0..n_events)
        .map(|_| CoherentEvent {
            onset: draw(rng, cfg.coherent_onset_range),
            velocity: draw(rng, cfg.coherent_velocity_range),
            amplitude: draw(rng, (0.5, 1.0)),
        })
        .collect();
    let f0 = draw(rng, cfg.coherent_f0_range);
    let offsets = receiver_offsets(geom, source_index, sim.dx);
    let spikes = spike_train(&events, &offsets, sim.n_t, sim.dt, cfg.coherent_decay_time);
    let gather = convolve_columns(&spikes, &ricker_kernel(f0, sim.dt));
    Ok(CoherentNoise { gather, spikes, events, f0 })
}

#[derive(Debug, Clone)]
pub struct StochasticNoise {
    pub gather: Array2<f64>,
    pub sigma: f64,
    pub sine_freq: f64,
    /// Zeroed fraction of every trace before convolution.
    pub zero_fractions: Vec<f64>,
}

/// Non-overlapping segment layout: `k` zero runs totalling `len` samples
/// inside `n` samples, as `(start, length)` pairs.
fn zero_segments(n: usize, len: usize, k: usize, rng: &mut SampleRng) -> Vec<(usize, usize)> {
    if len == 0 {
        return Vec::new();
    }
    let k = k.clamp(1, len);
    // split `len` into k positive parts and `n − len` into k+1 gaps
    let mut cuts: Vec<usize> = (0..k - 1).map(|_| rng.random_range(1..len)).collect();
    cuts.sort_unstable();
    let mut parts: Vec<usize> = Vec::with_capacity(k);
    let mut prev = 0;
    for c in cuts.into_iter().chain(std::iter::once(len)) {
        parts.push(c - prev);
        prev = c;
    }
    let free = n - len;
    let mut gcuts: Vec<usize> = (0..k).map(|_| rng.random_range(0..=free)).collect();
    gcuts.sort_unstable();
    let mut out = Vec::with_capacity(k);
    let (mut pos, mut used) = (0, 0);
    for (i, &p) in parts.iter().enumerate() {
        pos += gcuts[i] - used;
        used = gcuts[i];
        out.push((pos, p));
        pos += p;
    }
    out.retain(|&(_, l)| l > 0);
    out
}

/// Stochastic noise gather of shape `(n_t, n_receivers)`.
pub fn stochastic_noise(
    shape: (usize, usize),
    dt: f64,
    cfg: &NoiseConfig,
    rng: &mut SampleRng,
) -> Result<StochasticNoise> {
    cfg.validate()?;
    let (n_t, n_r) = shape;
    let sigma = draw(rng, cfg.stochastic_sigma_range);
    let sine_freq = draw(rng, cfg.stochastic_sine_range);
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::Config(e.to_string()))?;
    let mut white = Array2::from_shape_fn((n_t, n_r), |_| normal.sample(rng));
    let mut zero_fractions = Vec::with_capacity(n_r);
    for mut col in white.axis_iter_mut(Axis(1)) {
        let frac = draw(rng, cfg.stochastic_zero_fraction_range);
        let len = ((frac * n_t as f64).round() as usize).min(n_t);
        let (lo, hi) = cfg.stochastic_segments_range;
        let k = rng.random_range(lo..=hi);
        for (start, l) in zero_segments(n_t, len, k, rng) {
            col.slice_mut(ndarray::s![start..start + l]).fill(0.0);
        }
        zero_fractions.push(len as f64 / n_t.max(1) as f64);
    }
    let gather = convolve_columns(&white, &sine_kernel(sine_freq, cfg.stochastic_sine_periods, dt));
    Ok(StochasticNoise { gather, sigma, sine_freq, zero_fractions })
}

fn max_abs<'a>(v: impl IntoIterator<Item = &'a f64>) -> f64 {
    v.into_iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Both noise components of one shot and their mixing weights.
#[derive(Debug, Clone)]
pub struct NoiseComponents {
    pub coherent: CoherentNoise,
    pub stochastic: StochasticNoise,
    /// Drawn max-abs ratios.
    pub level_coherent: f64,
    pub level_stochastic: f64,
    /// Multipliers applied to the raw gathers.
    pub lambda_coherent: f64,
    pub lambda_stochastic: f64,
}

impl NoiseComponents {
    /// `λ_c·coherent + λ_s·stochastic`.
    pub fn combined(&self) -> Array2<f64> {
        &self.coherent.gather * self.lambda_coherent + &self.stochastic.gather * self.lambda_stochastic
    }
}

/// Draws the noise for one clean gather. An all-zero gather mixes against a
/// reference amplitude of 1.
pub fn noise_components<T: Real>(
    clean: &ShotGather<T>,
    geom: &AcquisitionGeometry,
    sim: &SimConfig,
    cfg: &NoiseConfig,
    rng: &mut SampleRng,
) -> Result<NoiseComponents> {
    let (n_t, n_r) = clean.traces.dim();
    if n_r != geom.n_receivers() || n_t != sim.n_t {
        return Err(Error::shape(&[sim.n_t, geom.n_receivers()], &[n_t, n_r]));
    }
    let coherent = coherent_noise(geom, clean.source_index, sim, cfg, rng)?;
    let stochastic = stochastic_noise((n_t, n_r), sim.dt, cfg, rng)?;
    let level_coherent = draw(rng, cfg.mix_level_range);
    let level_stochastic = draw(rng, cfg.mix_level_range);
    let mut reference = clean.traces.iter().fold(0.0f64, |m, v| m.max(v.as_f64().abs()));
    if reference == 0.0 {
        reference = 1.0;
    }
    let lambda = |level: f64, g: &Array2<f64>| {
        let m = max_abs(g);
        if m > 0.0 { level * reference / m } else { 0.0 }
    };
    Ok(NoiseComponents {
        lambda_coherent: lambda(level_coherent, &coherent.gather),
        lambda_stochastic: lambda(level_stochastic, &stochastic.gather),
        coherent,
        stochastic,
        level_coherent,
        level_stochastic,
    })
}

/// Adds coherent and stochastic noise to every gather of `record`. Shot `s`
/// draws from stream `s` of `seed`.
pub fn add_noise<T: Real>(
    record: &SeismicRecord<T>,
    geom: &AcquisitionGeometry,
    sim: &SimConfig,
    cfg: &NoiseConfig,
    seed: u64,
) -> Result<SeismicRecord<T>> {
    if !record.is_finite() {
        return Err(Error::Range("record contains non-finite samples".into()));
    }
    cfg.validate()?;
    let gathers = (0..record.n_shots())
        .into_par_iter()
        .map(|s| {
            let clean = ShotGather { traces: record.gather(s).to_owned(), source_index: s };
            let mut rng = stream_rng(seed, s as u64);
            let noise = noise_components(&clean, geom, sim, cfg, &mut rng)?;
            let traces = ndarray::Zip::from(&clean.traces)
                .and(&noise.combined())
                .map_collect(|&c, &n| c + cast::<f64, T>(n));
            Ok(ShotGather { traces, source_index: s })
        })
        .collect::<Result<Vec<_>>>()?;
    SeismicRecord::from_gathers(&gathers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use crate::wavesim::default_geometry;

    #[test]
    fn segments_cover_requested_length_without_overlap() {
        let mut rng = rng_from_seed(5);
        for (len, k) in [(0, 2), (1, 3), (400, 1), (400, 3), (1000, 2), (37, 37)] {
            let segs = zero_segments(1000, len, k, &mut rng);
            assert_eq!(segs.iter().map(|s| s.1).sum::<usize>(), len);
            let mut mask = vec![false; 1000];
            for (s, l) in segs {
                for m in &mut mask[s..s + l] {
                    assert!(!*m);
                    *m = true;
                }
            }
        }
    }

    #[test]
    fn sine_kernel_shape() {
        let k = sine_kernel(15.0, 4, 0.001);
        assert_eq!(k.len(), 267);
        assert_eq!(max_abs(&k), 1.0);
        assert_eq!(k[0], 0.0);
    }

    #[test]
    fn zero_mix_is_identity() {
        let cfg = NoiseConfig { mix_level_range: (0.0, 0.0), ..NoiseConfig::default() };
        let sim = SimConfig::default();
        let rec = SeismicRecord::<f64>::zeros(20, sim.n_t, 34);
        assert_eq!(add_noise(&rec, &default_geometry(), &sim, &cfg, 3).unwrap(), rec);
    }

    #[test]
    fn invalid_ranges_are_rejected() {
        let bad = NoiseConfig { mix_level_range: (0.3, 0.1), ..NoiseConfig::default() };
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        let bad = NoiseConfig { mix_level_range: (0.1, 1.0), ..NoiseConfig::default() };
        assert!(bad.validate().is_err());
        assert!(NoiseConfig::default().validate().is_ok());
    }
}
