use std::fs;
use std::path::{Path, PathBuf};

use svinv_core::dataset::{read_dataset, split as split_ids, write_dataset, Dataset, DatasetManifest, DatasetWriter, SplitSpec};
use svinv_core::fwi::{invert, smoothed_start};
use svinv_core::geomodel::{generate_model_suite, GeoModeler, SuiteSpec};
use svinv_core::metrics::{evaluate_batch, MetricValues, normalize_velocity, NORM_HI, NORM_LO};
use svinv_core::noise::add_noise as noisy_record;
use svinv_core::rng::derive_seed;
use svinv_core::wavesim::{precheck, simulate_record, StencilOrder};
use svinv_core::{Category, VelocityModel};

use crate::config::{PipelineConfig, ECHO_FILE};
use crate::error::CliError;
use crate::export::{gather_pgm, gather_csv, pgm, profile_csv};
use crate::{
    AddNoiseArgs, EvaluateArgs, ExportGatherArgs, ExportProfileArgs, FwiArgs, GenerateArgs, SimulateArgs, SplitArgs,
};

fn open(dir: &Path) -> Result<Dataset, CliError> {
    if !dir.join(svinv_core::dataset::MANIFEST_FILE).exists() {
        return Err(CliError::validation("dataset", format!("{} is not a dataset directory", dir.display())));
    }
    Ok(read_dataset(dir)?)
}

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<(), CliError> {
    if let Some(p) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(p)?;
    }
    fs::write(path, bytes).map_err(|e| CliError::runtime("io", format!("{}: {e}", path.display())))
}

/// Echo location for single-file outputs: `<stem>.run_config.toml` beside it.
fn sibling_echo(file: &Path) -> PathBuf {
    let stem = file.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    file.with_file_name(format!("{stem}.{ECHO_FILE}"))
}

fn echo_dir(cfg: &PipelineConfig, dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    cfg.echo(&dir.join(ECHO_FILE))
}

fn parse_layers(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::validation("parameter", format!("--layers {s:?}: expected N or LO..HI"));
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    match s.split_once("..") {
        Some((lo, hi)) => Ok((parse(lo)?, parse(hi.trim_start_matches('='))?)),
        None => parse(s).map(|n| (n, n)),
    }
}

fn check_index(ds: &Dataset, k: usize, what: &str) -> Result<(), CliError> {
    if k >= ds.len() {
        return Err(CliError::validation("range", format!("{what} {k} out of range: dataset has {} samples", ds.len())));
    }
    Ok(())
}

fn require_records(ds: &Dataset) -> Result<(), CliError> {
    if !ds.has_records() {
        return Err(CliError::validation("dataset", format!("{} holds no seismic records", ds.dir.display())));
    }
    Ok(())
}

/// Loads the simulation settings a dataset was produced with into `cfg`.
fn adopt_simulation(cfg: &mut PipelineConfig, ds: &Dataset) -> Result<(), CliError> {
    require_records(ds)?;
    cfg.sim = ds.manifest.sim_config().ok_or_else(|| CliError::validation("dataset", "manifest lacks dt/n_t"))?;
    cfg.geometry = ds.manifest.geometry();
    Ok(())
}

pub fn generate(mut cfg: PipelineConfig, a: GenerateArgs) -> Result<(), CliError> {
    if let Some(l) = &a.layers {
        (cfg.suite.min_layers, cfg.suite.max_layers) = parse_layers(l)?;
    }
    if let Some(n) = a.per_subgroup {
        cfg.suite.per_subgroup = n;
    }
    if let Some(cats) = &a.categories {
        cfg.suite.categories = cats
            .iter()
            .map(|c| Category::parse(c.trim()).ok_or_else(|| CliError::validation("parameter", format!("unknown category {c:?}"))))
            .collect::<Result<_, _>>()?;
    }
    let seed = cfg.resolve_seed(a.seed)?;
    let spec = SuiteSpec {
        min_layers: cfg.suite.min_layers,
        max_layers: cfg.suite.max_layers,
        categories: cfg.suite.categories.clone(),
        per_subgroup: cfg.suite.per_subgroup,
        seed,
    };
    let models: Vec<VelocityModel<f64>> = generate_model_suite(&GeoModeler::new(cfg.geomodel.clone()), &spec)?;
    let manifest = DatasetManifest::for_models(&models, cfg.sim.dx, seed);
    write_dataset(&a.out, &models, None, &manifest)?;
    echo_dir(&cfg, &a.out)?;
    println!("generated {} models in {}", models.len(), a.out.display());
    Ok(())
}

pub fn simulate(mut cfg: PipelineConfig, a: SimulateArgs) -> Result<(), CliError> {
    let ds = open(&a.models)?;
    let sim = &mut cfg.sim;
    if let Some(dt) = a.dt {
        sim.dt = dt;
    }
    if let Some(dx) = a.dx {
        sim.dx = dx;
        sim.dz = dx;
    }
    if let Some(nt) = a.nt {
        sim.n_t = nt;
    }
    if let Some(f) = a.freq {
        sim.source_freq = f;
        sim.t0 = 1.5 / f;
    }
    if let Some(o) = a.order {
        sim.order = StencilOrder::try_from(o).map_err(|e| CliError::validation("parameter", e))?;
    }
    let (sim, geom) = (cfg.sim.clone(), cfg.geometry.clone());
    let [rows, cols] = ds.manifest.model_shape;
    let widest = geom.source_cols.iter().chain(&geom.receiver_cols).copied().max().unwrap_or(0);
    if widest >= cols || geom.source_row.max(geom.receiver_row) >= rows {
        return Err(CliError::validation("geometry", format!("acquisition exceeds the {rows}x{cols} model grid")));
    }
    let models: Vec<VelocityModel<f32>> = ds.models()?;
    for (k, m) in models.iter().enumerate() {
        precheck(&m.cast::<f64>(), &sim).map_err(|e| {
            let mut e = CliError::from(e);
            e.message = format!("sample {k}: {}", e.message);
            e
        })?;
    }
    let wavelet = sim.wavelet::<f64>()?;
    let mut w = DatasetWriter::create(&a.out, ds.manifest.model_shape, Some([geom.n_sources(), sim.n_t, geom.n_receivers()]))?;
    for m in &models {
        let rec = simulate_record(&m.cast::<f64>(), &geom, &wavelet, &sim)?;
        w.push(m, Some(&rec.cast::<f32>()))?;
    }
    let mut manifest = ds.manifest.clone().with_simulation(&sim, &geom);
    manifest.noise = false;
    manifest.noise_config = None;
    w.finish(manifest)?;
    echo_dir(&cfg, &a.out)?;
    println!("simulated {} samples into {}", models.len(), a.out.display());
    Ok(())
}

pub fn add_noise(mut cfg: PipelineConfig, a: AddNoiseArgs) -> Result<(), CliError> {
    let ds = open(&a.input)?;
    adopt_simulation(&mut cfg, &ds)?;
    if ds.manifest.noise {
        return Err(CliError::validation("dataset", format!("{} is already noisy", a.input.display())));
    }
    if let Some(v) = a.mix_low {
        cfg.noise.mix_level_range.0 = v;
    }
    if let Some(v) = a.mix_high {
        cfg.noise.mix_level_range.1 = v;
    }
    let seed = cfg.resolve_seed(a.seed)?;
    cfg.noise.seed = seed;
    cfg.noise.validate()?;
    let mut w = DatasetWriter::create(&a.out, ds.manifest.model_shape, ds.manifest.record_shape)?;
    for k in 0..ds.len() {
        let noisy = noisy_record(&ds.record(k)?, &cfg.geometry, &cfg.sim, &cfg.noise, derive_seed(seed, k as u64))?;
        w.push(&ds.model(k)?, Some(&noisy))?;
    }
    w.finish(ds.manifest.clone().with_noise(&cfg.noise))?;
    echo_dir(&cfg, &a.out)?;
    println!("added noise to {} samples into {}", ds.len(), a.out.display());
    Ok(())
}

pub fn split(mut cfg: PipelineConfig, a: SplitArgs) -> Result<(), CliError> {
    let ds = open(&a.dataset)?;
    if let Some(n) = a.test_per_subgroup {
        cfg.split.test_per_subgroup = n;
    }
    if let Some(t) = &a.train_sizes {
        cfg.split.train_sizes = t.clone();
    }
    if a.no_nest {
        cfg.split.nested = false;
    }
    let seed = cfg.resolve_seed(a.seed)?;
    let spec = SplitSpec {
        test_per_subgroup: cfg.split.test_per_subgroup,
        train_sizes: cfg.split.train_sizes.clone(),
        seed,
        nested: cfg.split.nested,
    };
    let s = split_ids(&ds.manifest.samples, &spec)?;
    write_file(&a.out, s.to_json()?)?;
    cfg.echo(&sibling_echo(&a.out))?;
    let levels: Vec<String> = s.levels().iter().map(|l| format!("{l}={}", s.train[l].len())).collect();
    println!("test={} {}", s.test.len(), levels.join(" "));
    Ok(())
}

fn column(m: &VelocityModel<f64>, c: usize) -> Vec<f32> {
    m.grid.column(c).iter().map(|&v| v as f32).collect()
}

fn clamped_metrics(pred: &VelocityModel<f64>, target: &VelocityModel<f64>) -> Result<MetricValues, CliError> {
    let p = normalize_velocity(pred.grid.mapv(|v| v.clamp(NORM_LO, NORM_HI)).view())?;
    let t = normalize_velocity(target.grid.view())?;
    Ok(MetricValues::compute(p.view(), t.view())?)
}

pub fn fwi(mut cfg: PipelineConfig, a: FwiArgs) -> Result<(), CliError> {
    let ds = open(&a.obs)?;
    adopt_simulation(&mut cfg, &ds)?;
    check_index(&ds, a.model_index, "--model-index")?;
    if ds.manifest.noise {
        eprintln!("warning: {} is a noisy dataset; the inversion assumes noise-free data", a.obs.display());
    }
    if let Some(s) = a.sigma {
        cfg.fwi.smoothing_sigma = s;
    }
    if let Some(c) = &a.cutoffs {
        cfg.fwi.cutoffs = c.clone();
    }
    if let Some(n) = a.iters {
        cfg.fwi.total_iterations = n;
    }
    if let Some(c) = a.profile_column {
        cfg.export.profile_column = c;
    }
    cfg.fwi.validate()?;
    let col = cfg.export.profile_column;
    let [_, cols] = ds.manifest.model_shape;
    if col >= cols {
        return Err(CliError::validation("range", format!("profile column {col} outside 0..{cols}")));
    }
    let truth: VelocityModel<f64> = ds.model(a.model_index)?.cast();
    let obs = ds.record(a.model_index)?.cast::<f64>();
    let start = smoothed_start(&truth, cfg.fwi.smoothing_sigma);
    let wavelet = cfg.sim.wavelet::<f64>()?;
    let r = invert(&obs, &start, &cfg.fwi, &cfg.sim, &cfg.geometry, &wavelet)?;

    let out = &a.out;
    fs::create_dir_all(out)?;
    let mut csv = String::from("iteration,stage,misfit\n");
    for l in &r.misfit_history {
        csv.push_str(&format!("{},{},{}\n", l.iteration, l.stage, l.misfit));
    }
    write_file(&out.join("misfit.csv"), csv)?;
    write_file(
        &out.join("profile.csv"),
        profile_csv(
            cfg.sim.dx,
            &["true_m_s", "initial_m_s", "inverted_m_s"],
            &[column(&truth, col), column(&start, col), column(&r.model, col)],
        ),
    )?;
    let inverted = r.model.cast::<f32>();
    write_file(&out.join("inverted.pgm"), pgm(inverted.grid.view(), NORM_LO as f32, NORM_HI as f32))?;
    let mut model = r.model.clone();
    (model.category, model.n_layers, model.seed) = (truth.category, truth.n_layers, truth.seed);
    write_dataset(&out.join("inverted"), &[model], None, &DatasetManifest::for_models(&[truth.clone()], cfg.sim.dx, ds.manifest.suite_seed))?;
    let summary = serde_json::json!({
        "model_index": a.model_index,
        "initial_misfit": r.initial_misfit,
        "final_misfit": r.final_misfit,
        "misfit_ratio": r.final_misfit / r.initial_misfit,
        "stages": r.stages,
        "metrics_initial": clamped_metrics(&start, &truth)?,
        "metrics_inverted": clamped_metrics(&r.model, &truth)?,
    });
    write_file(&out.join("summary.json"), serde_json::to_string_pretty(&summary)?)?;
    echo_dir(&cfg, out)?;
    println!(
        "misfit {:.6e} -> {:.6e} (ratio {:.4}) over {} iterations",
        r.initial_misfit,
        r.final_misfit,
        r.final_misfit / r.initial_misfit,
        r.misfit_history.len()
    );
    Ok(())
}

pub fn evaluate(cfg: PipelineConfig, a: EvaluateArgs) -> Result<(), CliError> {
    let pred = open(&a.pred)?;
    let target = open(&a.target)?;
    if pred.len() != target.len() {
        return Err(CliError::validation(
            "shape",
            format!("{} predictions for {} targets", pred.len(), target.len()),
        ));
    }
    let mut preds = pred.models()?;
    if a.clamp {
        for m in &mut preds {
            m.grid.mapv_inplace(|v| v.clamp(NORM_LO as f32, NORM_HI as f32));
        }
    }
    let targets = target.models()?;
    let ids = |d: &Dataset| d.manifest.samples.iter().map(|s| s.id).collect::<Vec<_>>();
    let report = evaluate_batch(&ids(&pred), &preds, &ids(&target), &targets)?;
    write_file(&a.report, report.to_json()?)?;
    cfg.echo(&sibling_echo(&a.report))?;
    let o = report.overall.values;
    println!("n={} l1={:.6} l2={:.6} ssim={:.6} mssim={:.6}", report.overall.count, o.l1, o.l2, o.ssim, o.mssim);
    Ok(())
}

pub fn export_profile(mut cfg: PipelineConfig, a: ExportProfileArgs) -> Result<(), CliError> {
    let ds = open(&a.dataset)?;
    check_index(&ds, a.model, "--model")?;
    if let Some(c) = a.column {
        cfg.export.profile_column = c;
    }
    let col = cfg.export.profile_column;
    let [_, cols] = ds.manifest.model_shape;
    if col >= cols {
        return Err(CliError::validation("range", format!("column {col} outside 0..{cols}")));
    }
    let m = ds.model(a.model)?;
    let values = m.grid.column(col).to_vec();
    let path = a.out.join(format!("profile_{}_col{col}.csv", a.model));
    write_file(&path, profile_csv(ds.manifest.dx_m, &["velocity_m_s"], &[values]))?;
    if a.pgm {
        write_file(&a.out.join(format!("model_{}.pgm", a.model)), pgm(m.grid.view(), NORM_LO as f32, NORM_HI as f32))?;
    }
    echo_dir(&cfg, &a.out)?;
    println!("{}", path.display());
    Ok(())
}

pub fn export_gather(mut cfg: PipelineConfig, a: ExportGatherArgs) -> Result<(), CliError> {
    let ds = open(&a.dataset)?;
    adopt_simulation(&mut cfg, &ds)?;
    check_index(&ds, a.sample, "--sample")?;
    let rec = ds.record(a.sample)?;
    if a.shot >= rec.n_shots() {
        return Err(CliError::validation("range", format!("shot {} outside 0..{}", a.shot, rec.n_shots())));
    }
    let g = rec.gather(a.shot);
    let stem = a.out.join(format!("gather_{}_shot{}", a.sample, a.shot));
    write_file(&stem.with_extension("csv"), gather_csv(cfg.sim.dt, &cfg.geometry.receiver_cols, g))?;
    write_file(&stem.with_extension("pgm"), gather_pgm(g, a.clip))?;
    echo_dir(&cfg, &a.out)?;
    println!("{}", stem.with_extension("csv").display());
    Ok(())
}
