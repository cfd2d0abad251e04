mod common;

use std::time::Instant;

use ndarray::Array2;
use svinv_core::geomodel::GeoModeler;
use svinv_core::wavesim::*;
use svinv_core::{Category, Error, VelocityModel};

use common::*;

fn homogeneous(v: f64) -> VelocityModel<f64> {
    VelocityModel::homogeneous(100, 100, v)
}

fn geometry(source_cols: Vec<usize>, receiver_cols: Vec<usize>) -> AcquisitionGeometry {
    AcquisitionGeometry { receiver_cols, source_cols, source_row: 0, receiver_row: 0 }
}


#[test]
fn direct_arrival_matches_line_source_oracle() {
    let cfg = SimConfig::default();
    let geom = geometry(vec![2], vec![32]);
    let w: SourceWavelet<f64> = cfg.wavelet().unwrap();
    let start = Instant::now();
    let g = simulate_shot(&homogeneous(1500.0), &geom, &w, &cfg, 0).unwrap();
    assert!(start.elapsed().as_secs_f64() < 10.0);
    let fd: Vec<f64> = g.traces.column(0).to_vec();
    let an = analytic_trace(210.0, cfg.dx, &cfg, 1500.0);

    // 5% picks agree; both sit on the leading side lobe, ~40 ms before t0 + r/c
    let (pf, pa) = (first_break(&fd, 0.05) as i64, first_break(&an, 0.05) as i64);
    assert!((pf - pa).abs() <= 3, "fd {pf} analytic {pa}");
    // waveform lag is grid dispersion at ~10 points per wavelength
    let lag = xcorr_lag(&fd, &an, 60);
    assert!((0..=5).contains(&lag), "lag {lag}");
    let ratio = max_abs(&fd) / max_abs(&an);
    assert!((ratio - 1.0).abs() < 0.2, "amplitude ratio {ratio}");
}

#[test]
fn refined_grid_approaches_line_source_oracle() {
    let cfg = SimConfig { dx: 3.5, dz: 3.5, dt: 5e-4, n_t: 1000, pad: 40, ..SimConfig::default() };
    let geom = AcquisitionGeometry { receiver_cols: vec![64], source_cols: vec![4], source_row: 2, receiver_row: 2 };
    let w: SourceWavelet<f64> = cfg.wavelet().unwrap();
    // same physical source strength as a 7 m cell
    let w = w.scaled(4.0);
    let g = simulate_shot(&VelocityModel::homogeneous(200, 200, 1500.0), &geom, &w, &cfg, 0).unwrap();
    let fd: Vec<f64> = g.traces.column(0).to_vec();
    let an = analytic_trace(210.0, 7.0, &SimConfig { dx: 7.0, ..cfg.clone() }, 1500.0);
    let lag = xcorr_lag(&fd, &an, 60);
    assert!(lag.abs() <= 2, "lag {lag}");
    let ratio = max_abs(&fd) / max_abs(&an);
    assert!((ratio - 1.0).abs() < 0.06, "amplitude ratio {ratio}");
}

#[test]
fn zero_wavelet_gives_zero_gather() {
    let cfg = SimConfig { n_t: 200, ..SimConfig::default() };
    let w = SourceWavelet { samples: vec![0.0f64; 200], f0: 20.0, t0: 0.075 };
    let g = simulate_shot(&homogeneous(2000.0), &default_geometry(), &w, &cfg, 3).unwrap();
    assert!(g.traces.iter().all(|&v| v == 0.0));
}

#[test]
fn homogeneous_gather_is_mirror_symmetric() {
    let cfg = SimConfig { n_t: 600, ..SimConfig::default() };
    let geom = default_geometry();
    let shot = 11;
    let sc = geom.source_cols[shot];
    assert_eq!(sc, 57);
    let w: SourceWavelet<f64> = cfg.wavelet().unwrap();
    let g = simulate_shot(&homogeneous(1500.0), &geom, &w, &cfg, shot).unwrap();
    let max = g.traces.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let col = |c: usize| geom.receiver_cols.iter().position(|&x| x == c).unwrap();
    for d in (3..=42).step_by(3) {
        let (l, r) = (g.traces.column(col(sc - d)), g.traces.column(col(sc + d)));
        let diff = l.iter().zip(r).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(diff <= 0.01 * max, "offset {d}: {diff}");
    }
}

#[test]
fn reciprocity_between_colocated_positions() {
    let cfg = SimConfig { n_t: 700, ..SimConfig::default() };
    let gm = GeoModeler::default();
    let layered: VelocityModel<f64> = gm.generate_one(5, Category::Layered, 7).unwrap();
    for model in [homogeneous(1500.0), layered] {
        let w: SourceWavelet<f64> = cfg.wavelet().unwrap();
        let ab = simulate_shot(&model, &geometry(vec![12], vec![27]), &w, &cfg, 0).unwrap();
        let ba = simulate_shot(&model, &geometry(vec![27], vec![12]), &w, &cfg, 0).unwrap();
        let max = ab.traces.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let diff = ab.traces.iter().zip(&ba.traces).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(diff <= 1e-3 * max, "{diff} vs {max}");
    }
}

#[test]
fn absorbing_boundaries_drain_interior_energy() {
    let cfg = SimConfig { n_t: 1500, ..SimConfig::default() };
    let energy = interior_energy(&homogeneous(1500.0), &cfg, 50);
    let peak = energy.iter().cloned().fold(0.0, f64::max);
    // the farthest model corner is ~710 m away: the front has left by 0.65 s
    let after = energy[700..].iter().cloned().fold(0.0, f64::max);
    assert!(after <= 0.05 * peak, "residual {}", after / peak);
}

#[test]
fn free_surface_stays_zero() {
    let cfg = SimConfig { n_t: 400, dt: 5e-4, order: StencilOrder::Four, ..SimConfig::default() };
    let model: VelocityModel<f64> = GeoModeler::default().generate_one(6, Category::Salt, 3).unwrap();
    let prop = Propagator::new(pad_model(model.grid.view(), cfg.pad).view(), &cfg).unwrap();
    let w: SourceWavelet<f64> = cfg.wavelet().unwrap();
    let nx = prop.shape().1;
    let mut steps = 0;
    prop.observe(prop.cell(1, 40), &w.samples, |_, state| {
        assert!(state[..nx].iter().all(|&v| v == 0.0));
        steps += 1;
    })
    .unwrap();
    assert_eq!(steps, 399);
}

#[test]
fn gather_is_linear_in_the_source() {
    let cfg = SimConfig { n_t: 300, ..SimConfig::default() };
    let model: VelocityModel<f64> = GeoModeler::default().generate_one(4, Category::Fault, 1).unwrap();
    let geom = default_geometry();
    let w: SourceWavelet<f64> = cfg.wavelet().unwrap();
    let g1 = simulate_shot(&model, &geom, &w, &cfg, 5).unwrap();
    let g2 = simulate_shot(&model, &geom, &w.scaled(2.0), &cfg, 5).unwrap();
    assert_eq!(g2.traces, g1.traces.mapv(|v| 2.0 * v));
}

/// Reference trace at fixed physical positions for a grid spacing `dx`.
fn convergence_trace(dx: f64) -> Vec<f64> {
    let cells = |m: f64| (m / dx).round() as usize;
    let n = cells(700.0);
    let cfg = SimConfig {
        dx,
        dz: dx,
        dt: dx / 7000.0,
        n_t: cells(700.0) * 5 + 1,
        pad: cells(140.0),
        order: StencilOrder::Two,
        source_freq: 10.0,
        t0: 0.15,
    };
    let model = VelocityModel::homogeneous(n, n, 1500.0);
    let geom = AcquisitionGeometry {
        receiver_cols: vec![cells(350.0)],
        source_cols: vec![cells(140.0)],
        source_row: cells(28.0),
        receiver_row: cells(28.0),
    };
    let w: SourceWavelet<f64> = cfg.wavelet().unwrap();
    let w = w.scaled(1.0 / (dx * dx));
    simulate_shot(&model, &geom, &w, &cfg, 0).unwrap().traces.column(0).to_vec()
}

#[test]
fn grid_refinement_self_converges() {
    let (c, m, f) = (convergence_trace(14.0), convergence_trace(7.0), convergence_trace(3.5));
    // compare on the coarse time axis, 0.5 s window before edge reflections
    let n = 250;
    let e1: f64 = (0..n).map(|k| (c[k] - m[2 * k]).powi(2)).sum::<f64>().sqrt();
    let e2: f64 = (0..n).map(|k| (m[2 * k] - f[4 * k]).powi(2)).sum::<f64>().sqrt();
    let order = (e1 / e2).log2();
    assert!(e2 < e1, "{e1} {e2}");
    assert!((1.5..2.6).contains(&order), "observed order {order}");
}

#[test]
fn generated_models_simulate_without_nans() {
    let cfg = SimConfig { n_t: 500, ..SimConfig::default() };
    let gm = GeoModeler::default();
    let geom = default_geometry();
    for (i, cat) in Category::ALL.into_iter().enumerate() {
        let m: VelocityModel<f32> = gm.generate_one(8, cat, i as u64).unwrap();
        let w: SourceWavelet<f32> = cfg.wavelet().unwrap();
        let g = simulate_shot(&m, &geom, &w, &cfg, 19).unwrap();
        assert!(g.traces.iter().all(|v| v.is_finite()));
    }
}

#[test]
fn record_shape_and_shot_consistency() {
    let cfg = SimConfig::default();
    let geom = default_geometry();
    let m: VelocityModel<f64> = GeoModeler::default().generate_one(5, Category::Layered, 11).unwrap();
    let w: SourceWavelet<f64> = cfg.wavelet().unwrap();
    let rec = simulate_record(&m, &geom, &w, &cfg).unwrap();
    assert_eq!(rec.shape(), [20, 1000, 34]);
    assert!(rec.is_finite());
    let shot = simulate_shot(&m, &geom, &w, &cfg, 7).unwrap();
    assert_eq!(rec.gather(7), shot.traces.view());
    assert!(rec.gather(0).row(0).iter().all(|&v| v == 0.0));
}

#[test]
fn prechecks_reject_unstable_or_dispersive_setups() {
    let w: SourceWavelet<f64> = SimConfig::default().wavelet().unwrap();
    let fast = SimConfig { dt: 0.004, ..SimConfig::default() };
    match simulate_shot(&homogeneous(2000.0), &default_geometry(), &w, &fast, 0) {
        Err(e @ Error::Stability { .. }) => assert!(e.to_string().contains("stability")),
        other => panic!("expected stability error, got {other:?}"),
    }
    let slow = homogeneous(1000.0);
    assert!(matches!(
        simulate_shot(&slow, &default_geometry(), &w, &SimConfig::default(), 0),
        Err(Error::Dispersion { .. })
    ));
    assert!(matches!(
        simulate_shot(&homogeneous(2000.0), &default_geometry(), &w, &SimConfig::default(), 20),
        Err(Error::Parameter(_))
    ));
    let narrow = VelocityModel::from_grid(Array2::from_elem((100, 50), 2000.0));
    assert!(matches!(simulate_shot(&narrow, &default_geometry(), &w, &SimConfig::default(), 0), Err(Error::Config(_))));
}
