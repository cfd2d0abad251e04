use ndarray::Array2;
use svinv_core::fwi::*;
use svinv_core::rng::rng_from_seed;
use svinv_core::wavesim::*;
use svinv_core::VelocityModel;

use rand::Rng;

fn small_setup() -> (VelocityModel<f64>, VelocityModel<f64>, AcquisitionGeometry, SimConfig) {
    let truth = VelocityModel::homogeneous(
        20,
        20,
        0.0,
    )
    .with_grid(Array2::from_shape_fn((20, 20), |(z, x)| {
        let base = 1800.0 + 30.0 * z as f64;
        if (8..13).contains(&z) && (6..14).contains(&x) { base + 250.0 } else { base }
    }));
    let start = truth.with_grid(Array2::from_shape_fn((20, 20), |(z, _)| 1800.0 + 30.0 * z as f64));
    let geom = AcquisitionGeometry {
        receiver_cols: (0..20).step_by(3).collect(),
        source_cols: vec![3, 10, 16],
        source_row: 0,
        receiver_row: 0,
    };
    let cfg = SimConfig { n_t: 500, pad: 10, ..SimConfig::default() };
    (truth, start, geom, cfg)
}

fn record(m: &VelocityModel<f64>, geom: &AcquisitionGeometry, cfg: &SimConfig) -> SeismicRecord<f64> {
    let w: SourceWavelet<f64> = cfg.wavelet().unwrap();
    simulate_record(m, geom, &w, cfg).unwrap()
}

#[test]
fn adjoint_gradient_matches_finite_differences() {
    let (truth, start, geom, cfg) = small_setup();
    let obs = record(&truth, &geom, &cfg);
    let w: SourceWavelet<f64> = cfg.wavelet().unwrap();
    let g = gradient(&start, &obs, &geom, &w, &cfg).unwrap();
    assert!((g.misfit - misfit(&record(&start, &geom, &cfg), &obs).unwrap()).abs() < 1e-12 * g.misfit);
    let mut rng = rng_from_seed(2024);
    let mut cells: Vec<(usize, usize)> = (0..8).map(|_| (rng.random_range(0..20), rng.random_range(0..20))).collect();
    // include an edge cell whose value is replicated into the pad
    cells[0] = (19, 0);
    let eps = 1.0;
    for (z, x) in cells {
        let mut plus = start.grid.clone();
        plus[[z, x]] += eps;
        let mut minus = start.grid.clone();
        minus[[z, x]] -= eps;
        let jp = misfit(&record(&start.with_grid(plus), &geom, &cfg), &obs).unwrap();
        let jm = misfit(&record(&start.with_grid(minus), &geom, &cfg), &obs).unwrap();
        let fd = (jp - jm) / (2.0 * eps);
        let adj = g.gradient[[z, x]];
        let err = (adj - fd).abs();
        assert!(err <= 1e-2 * fd.abs() + 1e-8, "cell ({z},{x}): adjoint {adj:e} vs fd {fd:e}");
    }
}

#[test]
fn zero_residual_gives_zero_gradient() {
    let (truth, _, geom, cfg) = small_setup();
    let obs = record(&truth, &geom, &cfg);
    let w: SourceWavelet<f64> = cfg.wavelet().unwrap();
    let g = gradient(&truth, &obs, &geom, &w, &cfg).unwrap();
    assert_eq!(g.misfit, 0.0);
    assert!(g.gradient.iter().all(|&v| v == 0.0));
}

#[test]
fn doubling_the_residual_doubles_the_gradient() {
    let (truth, start, geom, cfg) = small_setup();
    let obs = record(&truth, &geom, &cfg);
    let syn = record(&start, &geom, &cfg);
    // d_obs' = d_syn − 2·(d_syn − d_obs)
    let obs2 = SeismicRecord { data: &syn.data - &((&syn.data - &obs.data) * 2.0) };
    let w: SourceWavelet<f64> = cfg.wavelet().unwrap();
    let g1 = gradient(&start, &obs, &geom, &w, &cfg).unwrap();
    let g2 = gradient(&start, &obs2, &geom, &w, &cfg).unwrap();
    let scale = g1.gradient.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for (a, b) in g1.gradient.iter().zip(&g2.gradient) {
        assert!((2.0 * a - b).abs() <= 1e-9 * scale);
    }
}

#[test]
fn misfit_examples() {
    let a = SeismicRecord::<f64>::zeros(2, 10, 3);
    let b = SeismicRecord { data: a.data.mapv(|v| v + 0.5) };
    assert_eq!(misfit(&a, &a).unwrap(), 0.0);
    assert!((misfit(&b, &a).unwrap() - 0.5 * 60.0 * 0.25).abs() < 1e-12);
    assert_eq!(misfit(&a, &b).unwrap(), misfit(&b, &a).unwrap());
    assert!(misfit(&a, &SeismicRecord::zeros(2, 10, 4)).is_err());
}

#[test]
fn smoothed_step_has_gaussian_transition_width() {
    let step = Array2::from_shape_fn((100, 100), |(z, _)| if z < 50 { 0.0 } else { 1.0 });
    let s = gaussian_smooth(step.view(), 5.0);
    let col: Vec<f64> = s.column(50).to_vec();
    // linear interpolation of the 10% and 90% crossings
    let cross = |level: f64| {
        let i = col.iter().position(|&v| v >= level).unwrap();
        (i - 1) as f64 + (level - col[i - 1]) / (col[i] - col[i - 1])
    };
    let width = cross(0.9) - cross(0.1);
    assert!((width - 2.0 * 1.2816 * 5.0).abs() < 0.1, "width {width}");
}

#[test]
fn lowpass_passes_dc_and_rejects_high_frequencies() {
    let dt = 0.001;
    let dc = vec![3.0; 1000];
    let out = lowpass(&dc, 10.0, dt).unwrap();
    assert!(out.iter().all(|v| (v - 3.0).abs() <= 3e-3));
    let sine: Vec<f64> = (0..1000).map(|k| (2.0 * std::f64::consts::PI * 40.0 * k as f64 * dt).sin()).collect();
    let out = lowpass(&sine, 10.0, dt).unwrap();
    let rms = |v: &[f64]| (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt();
    let db = 20.0 * (rms(&out) / rms(&sine)).log10();
    assert!(db <= -20.0, "{db} dB");
}

#[test]
fn lowpass_is_zero_phase() {
    let w: SourceWavelet<f64> = ricker(20.0, 0.001, 1000, 0.3).unwrap();
    for cutoff in [10.0, 15.0, 30.0] {
        let out = lowpass(&w.samples, cutoff, 0.001).unwrap();
        let peak = (0..out.len()).max_by(|&a, &b| out[a].total_cmp(&out[b])).unwrap();
        assert!((peak as i64 - 300).abs() <= 1, "cutoff {cutoff}: peak {peak}");
    }
}

#[test]
fn invert_at_the_true_model_is_a_fixed_point() {
    let (truth, _, geom, cfg) = small_setup();
    let obs = record(&truth, &geom, &cfg);
    let w: SourceWavelet<f64> = cfg.wavelet().unwrap();
    let fwi = FwiConfig { total_iterations: 5, ..FwiConfig::default() };
    let r = invert(&obs, &truth, &fwi, &cfg, &geom, &w).unwrap();
    assert_eq!(r.initial_misfit, 0.0);
    assert_eq!(r.final_misfit, 0.0);
    assert_eq!(r.model.grid, truth.grid);
    assert_eq!(r.stages.len(), 5);
    assert!(r.stages.iter().all(|s| s.status == StageStatus::Stationary));
}

#[test]
fn small_inversion_reduces_misfit_monotonically_per_stage() {
    let (truth, start, geom, cfg) = small_setup();
    let obs = record(&truth, &geom, &cfg);
    let w: SourceWavelet<f64> = cfg.wavelet().unwrap();
    let fwi = FwiConfig { total_iterations: 10, ..FwiConfig::default() };
    let r = invert(&obs, &start, &fwi, &cfg, &geom, &w).unwrap();
    assert_eq!(r.stages.len(), 5);
    assert!(r.stages.iter().all(|s| s.planned_iterations == 2));
    for s in 0..5 {
        let h: Vec<f64> = r.misfit_history.iter().filter(|l| l.stage == s).map(|l| l.misfit).collect();
        assert!(h.windows(2).all(|p| p[1] <= p[0]));
        if let Some(first) = h.first() {
            assert!(*first < r.stages[s].start_misfit);
        }
    }
    assert!(r.final_misfit < r.initial_misfit);
    assert!(r.model.grid.iter().all(|&v| (1000.0..=5000.0).contains(&v)));
}

#[test]
fn filtered_gradient_matches_finite_differences() {
    let (truth, start, geom, cfg) = small_setup();
    let lp = Lowpass::new(cfg.n_t, 15.0, cfg.dt).unwrap();
    let filt = |r: &SeismicRecord<f64>| {
        let mut out = r.clone();
        for s in 0..r.n_shots() {
            out.data.index_axis_mut(ndarray::Axis(0), s).assign(&lp.apply_columns(r.gather(s)));
        }
        out
    };
    let obs = filt(&record(&truth, &geom, &cfg));
    let w: SourceWavelet<f64> = cfg.wavelet().unwrap();
    let g = filtered_gradient(&start, &obs, &geom, &w, &cfg, Some(&lp)).unwrap();
    for (z, x) in [(3, 4), (10, 10), (17, 15), (0, 19)] {
        let j = |d: f64| {
            let mut m = start.grid.clone();
            m[[z, x]] += d;
            misfit(&filt(&record(&start.with_grid(m), &geom, &cfg)), &obs).unwrap()
        };
        let fd = (j(1.0) - j(-1.0)) / 2.0;
        let adj = g.gradient[[z, x]];
        assert!((adj - fd).abs() <= 1e-2 * fd.abs() + 1e-8, "cell ({z},{x}): {adj:e} vs {fd:e}");
    }
}
