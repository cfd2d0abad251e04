//! Flat-binary dataset container and the benchmark split protocol.
//!
//! A dataset directory holds
//!
//! - `manifest.json`: shapes, discretization, acquisition, noise settings and
//!   per-sample metadata ([`DatasetManifest`]);
//! - `models.f32`: little-endian `f32`, C order, `[N, rows, cols]`;
//! - `records.f32`: little-endian `f32`, C order, `[N, shots, n_t, receivers]`
//!   (absent for model-only datasets);
//! - `labels.csv`: `id,n_layers,subtype,seed`.
//!
//! Every file is written to a temporary name and renamed into place.

mod split;

pub use split::{split, td_level_name, SplitSpec, Splits};

use std::fs::{self, File};
use std::io::{BufWriter, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use ndarray::{Array2, Array3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::NoiseConfig;
use crate::scalar::Real;
use crate::wavesim::{AcquisitionGeometry, SeismicRecord, SimConfig, StencilOrder};
use crate::{Category, VelocityModel};

pub const FORMAT_VERSION: u32 = 1;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const MODELS_FILE: &str = "models.f32";
pub const RECORDS_FILE: &str = "records.f32";
pub const LABELS_FILE: &str = "labels.csv";
pub const LABELS_HEADER: &str = "id,n_layers,subtype,seed";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleMeta {
    pub id: usize,
    pub n_layers: usize,
    pub subtype: Category,
    pub seed: u64,
}

impl SampleMeta {
    pub fn of<T>(id: usize, model: &VelocityModel<T>) -> Self {
        Self { id, n_layers: model.n_layers, subtype: model.category, seed: model.seed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub format_version: u32,
    pub n_samples: usize,
    pub model_shape: [usize; 2],
    /// `None` for model-only datasets.
    pub record_shape: Option<[usize; 3]>,
    pub dx_m: f64,
    pub dt_s: Option<f64>,
    pub n_t: Option<usize>,
    pub source_freq_hz: Option<f64>,
    pub source_delay_s: Option<f64>,
    pub stencil_order: Option<StencilOrder>,
    pub pad_cells: Option<usize>,
    pub source_row: usize,
    pub receiver_row: usize,
    pub source_cols: Vec<usize>,
    pub receiver_cols: Vec<usize>,
    pub noise: bool,
    pub noise_config: Option<NoiseConfig>,
    pub suite_seed: u64,
    pub samples: Vec<SampleMeta>,
}

impl DatasetManifest {
    /// Manifest for a model-only dataset; ids are assigned in order.
    pub fn for_models<T: Real>(models: &[VelocityModel<T>], dx: f64, suite_seed: u64) -> Self {
        let model_shape = models.first().map_or([crate::geomodel::MODEL_SIZE; 2], |m| [m.rows(), m.cols()]);
        Self {
            format_version: FORMAT_VERSION,
            n_samples: models.len(),
            model_shape,
            record_shape: None,
            dx_m: dx,
            dt_s: None,
            n_t: None,
            source_freq_hz: None,
            source_delay_s: None,
            stencil_order: None,
            pad_cells: None,
            source_row: 0,
            receiver_row: 0,
            source_cols: Vec::new(),
            receiver_cols: Vec::new(),
            noise: false,
            noise_config: None,
            suite_seed,
            samples: models.iter().enumerate().map(|(i, m)| SampleMeta::of(i, m)).collect(),
        }
    }

    /// Adds the discretization and acquisition that produced the records.
    pub fn with_simulation(mut self, sim: &SimConfig, geom: &AcquisitionGeometry) -> Self {
        self.record_shape = Some([geom.n_sources(), sim.n_t, geom.n_receivers()]);
        self.dx_m = sim.dx;
        self.dt_s = Some(sim.dt);
        self.n_t = Some(sim.n_t);
        self.source_freq_hz = Some(sim.source_freq);
        self.source_delay_s = Some(sim.t0);
        self.stencil_order = Some(sim.order);
        self.pad_cells = Some(sim.pad);
        self.source_row = geom.source_row;
        self.receiver_row = geom.receiver_row;
        self.source_cols = geom.source_cols.clone();
        self.receiver_cols = geom.receiver_cols.clone();
        self
    }

    pub fn with_noise(mut self, cfg: &NoiseConfig) -> Self {
        self.noise = true;
        self.noise_config = Some(cfg.clone());
        self
    }

    /// Simulation settings, when the dataset carries records.
    pub fn sim_config(&self) -> Option<SimConfig> {
        let d = SimConfig::default();
        Some(SimConfig {
            dx: self.dx_m,
            dz: self.dx_m,
            dt: self.dt_s?,
            n_t: self.n_t?,
            pad: self.pad_cells.unwrap_or(d.pad),
            order: self.stencil_order.unwrap_or(d.order),
            source_freq: self.source_freq_hz.unwrap_or(d.source_freq),
            t0: self.source_delay_s.unwrap_or(d.t0),
        })
    }

    pub fn geometry(&self) -> AcquisitionGeometry {
        AcquisitionGeometry {
            receiver_cols: self.receiver_cols.clone(),
            source_cols: self.source_cols.clone(),
            source_row: self.source_row,
            receiver_row: self.receiver_row,
        }
    }

    pub fn model_len(&self) -> usize {
        self.model_shape.iter().product()
    }

    pub fn record_len(&self) -> usize {
        self.record_shape.map_or(0, |s| s.iter().product())
    }

    pub fn validate(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Version(self.format_version));
        }
        if self.samples.len() != self.n_samples {
            return Err(Error::Config(format!(
                "manifest lists {} samples but n_samples = {}",
                self.samples.len(),
                self.n_samples
            )));
        }
        if let Some(i) = self.samples.iter().enumerate().position(|(i, s)| s.id != i) {
            return Err(Error::Config(format!("sample ids must be contiguous from 0; entry {i} has id {}", self.samples[i].id)));
        }
        if let Some(s) = self.record_shape {
            if s[0] != self.source_cols.len() || s[2] != self.receiver_cols.len() || Some(s[1]) != self.n_t {
                return Err(Error::Config(format!(
                    "record shape {s:?} disagrees with {} sources, {:?} steps, {} receivers",
                    self.source_cols.len(),
                    self.n_t,
                    self.receiver_cols.len()
                )));
            }
        }
        if self.noise != self.noise_config.is_some() {
            return Err(Error::Config("noise flag and noise_config must be set together".into()));
        }
        Ok(())
    }
}

fn tmp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".tmp");
    path.with_file_name(name)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = tmp_path(path);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn push_f32s<T: Real>(out: &mut impl Write, values: impl Iterator<Item = T>) -> Result<()> {
    for v in values {
        out.write_all(&v.to_f32().unwrap_or(f32::NAN).to_le_bytes())?;
    }
    Ok(())
}

/// Streams samples into `dir` one at a time; nothing is visible under the
/// final names until [`DatasetWriter::finish`].
pub struct DatasetWriter {
    dir: PathBuf,
    models: BufWriter<File>,
    records: Option<BufWriter<File>>,
    model_shape: [usize; 2],
    record_shape: Option<[usize; 3]>,
    meta: Vec<SampleMeta>,
}

impl DatasetWriter {
    pub fn create(dir: &Path, model_shape: [usize; 2], record_shape: Option<[usize; 3]>) -> Result<Self> {
        fs::create_dir_all(dir)?;
        // an old manifest would make a half-replaced directory look complete
        let old = dir.join(MANIFEST_FILE);
        if old.exists() {
            fs::remove_file(old)?;
        }
        let open = |name: &str| -> Result<BufWriter<File>> { Ok(BufWriter::new(File::create(tmp_path(&dir.join(name)))?)) };
        Ok(Self {
            dir: dir.to_path_buf(),
            models: open(MODELS_FILE)?,
            records: record_shape.map(|_| open(RECORDS_FILE)).transpose()?,
            model_shape,
            record_shape,
            meta: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.meta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.meta.is_empty()
    }

    pub fn push<T: Real>(&mut self, model: &VelocityModel<T>, record: Option<&SeismicRecord<T>>) -> Result<()> {
        let shape = [model.rows(), model.cols()];
        if shape != self.model_shape {
            return Err(Error::shape(&self.model_shape, &shape));
        }
        match (&mut self.records, self.record_shape, record) {
            (Some(out), Some(expect), Some(r)) => {
                if r.shape() != expect {
                    return Err(Error::shape(&expect, &r.shape()));
                }
                push_f32s(out, r.data.iter().copied())?;
            }
            (None, None, None) => {}
            (_, _, Some(_)) => return Err(Error::Config("record given for a model-only dataset".into())),
            _ => return Err(Error::Config(format!("sample {} is missing its record", self.meta.len()))),
        }
        push_f32s(&mut self.models, model.grid.iter().copied())?;
        self.meta.push(SampleMeta::of(self.meta.len(), model));
        Ok(())
    }

    /// Writes the manifest and labels and moves every file into place.
    /// `manifest.samples` and `n_samples` are replaced by what was pushed.
    pub fn finish(mut self, mut manifest: DatasetManifest) -> Result<DatasetManifest> {
        manifest.n_samples = self.meta.len();
        manifest.samples = std::mem::take(&mut self.meta);
        manifest.model_shape = self.model_shape;
        if manifest.record_shape != self.record_shape {
            return Err(Error::Config(format!(
                "manifest record shape {:?} but {:?} was written",
                manifest.record_shape, self.record_shape
            )));
        }
        manifest.validate()?;
        self.models.flush()?;
        if let Some(r) = &mut self.records {
            r.flush()?;
        }
        drop(self.models);
        drop(self.records);
        let mut labels = String::from(LABELS_HEADER);
        labels.push('\n');
        for s in &manifest.samples {
            labels.push_str(&format!("{},{},{},{}\n", s.id, s.n_layers, s.subtype, s.seed));
        }
        let dir = &self.dir;
        write_atomic(&dir.join(LABELS_FILE), labels.as_bytes())?;
        fs::rename(tmp_path(&dir.join(MODELS_FILE)), dir.join(MODELS_FILE))?;
        let records = dir.join(RECORDS_FILE);
        if self.record_shape.is_some() {
            fs::rename(tmp_path(&records), &records)?;
        } else if records.exists() {
            fs::remove_file(&records)?;
        }
        // the manifest goes last: its presence marks a complete dataset
        write_atomic(&dir.join(MANIFEST_FILE), serde_json::to_string_pretty(&manifest)?.as_bytes())?;
        Ok(manifest)
    }
}

/// Writes a whole dataset. `records` must be given exactly when
/// `manifest.record_shape` is set.
pub fn write_dataset<T: Real>(
    dir: &Path,
    models: &[VelocityModel<T>],
    records: Option<&[SeismicRecord<T>]>,
    manifest: &DatasetManifest,
) -> Result<DatasetManifest> {
    if manifest.n_samples != models.len() || records.is_some_and(|r| r.len() != models.len()) {
        return Err(Error::shape(&[manifest.n_samples], &[models.len()]));
    }
    if let Some(m) = models.first() {
        if [m.rows(), m.cols()] != manifest.model_shape {
            return Err(Error::shape(&manifest.model_shape, &[m.rows(), m.cols()]));
        }
    }
    let mut w = DatasetWriter::create(dir, manifest.model_shape, manifest.record_shape)?;
    for (i, m) in models.iter().enumerate() {
        w.push(m, records.map(|r| &r[i]))?;
    }
    w.finish(manifest.clone())
}

/// Read-only handle; samples are loaded on demand.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub dir: PathBuf,
    pub manifest: DatasetManifest,
}

fn check_size(path: &Path, blob: &str, expect: u64) -> Result<()> {
    let found = fs::metadata(path)
        .map_err(|e| Error::Corruption { blob: blob.into(), reason: e.to_string() })?
        .len();
    if found != expect {
        return Err(Error::Corruption { blob: blob.into(), reason: format!("expected {expect} bytes, found {found}") });
    }
    Ok(())
}

/// Opens a dataset, validating the manifest and cross-checking every blob
/// size before any sample is read.
pub fn read_dataset(dir: &Path) -> Result<Dataset> {
    let text = fs::read_to_string(dir.join(MANIFEST_FILE))?;
    let raw: serde_json::Value = serde_json::from_str(&text)?;
    if let Some(v) = raw.get("format_version").and_then(|v| v.as_u64()) {
        if v != FORMAT_VERSION as u64 {
            return Err(Error::Version(v as u32));
        }
    }
    let manifest: DatasetManifest = serde_json::from_value(raw)?;
    manifest.validate()?;
    let n = manifest.n_samples as u64;
    check_size(&dir.join(MODELS_FILE), MODELS_FILE, 4 * n * manifest.model_len() as u64)?;
    if manifest.record_shape.is_some() {
        check_size(&dir.join(RECORDS_FILE), RECORDS_FILE, 4 * n * manifest.record_len() as u64)?;
    }
    check_labels(dir, &manifest)?;
    Ok(Dataset { dir: dir.to_path_buf(), manifest })
}

fn check_labels(dir: &Path, manifest: &DatasetManifest) -> Result<()> {
    let corrupt = |reason: String| Error::Corruption { blob: LABELS_FILE.into(), reason };
    let text = fs::read_to_string(dir.join(LABELS_FILE)).map_err(|e| corrupt(e.to_string()))?;
    let mut lines = text.lines();
    if lines.next() != Some(LABELS_HEADER) {
        return Err(corrupt(format!("missing header `{LABELS_HEADER}`")));
    }
    let rows: Vec<&str> = lines.filter(|l| !l.is_empty()).collect();
    if rows.len() != manifest.n_samples {
        return Err(corrupt(format!("{} rows for {} samples", rows.len(), manifest.n_samples)));
    }
    for (row, s) in rows.iter().zip(&manifest.samples) {
        let expect = format!("{},{},{},{}", s.id, s.n_layers, s.subtype, s.seed);
        if *row != expect {
            return Err(corrupt(format!("row `{row}` disagrees with manifest `{expect}`")));
        }
    }
    Ok(())
}

fn read_f32s(path: &Path, blob: &str, offset: usize, len: usize) -> Result<Vec<f32>> {
    let mut f = File::open(path)?;
    f.seek(SeekFrom::Start(4 * offset as u64))?;
    let mut bytes = vec![0u8; 4 * len];
    f.read_exact(&mut bytes).map_err(|e| Error::Corruption { blob: blob.into(), reason: e.to_string() })?;
    Ok(bytes.chunks_exact(4).map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]])).collect())
}

impl Dataset {
    pub fn open(dir: &Path) -> Result<Self> {
        read_dataset(dir)
    }

    pub fn len(&self) -> usize {
        self.manifest.n_samples
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn has_records(&self) -> bool {
        self.manifest.record_shape.is_some()
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k >= self.len() {
            return Err(Error::Range(format!("sample {k} out of range for {} samples", self.len())));
        }
        Ok(())
    }

    /// The `k`-th model with its label metadata.
    pub fn model(&self, k: usize) -> Result<VelocityModel<f32>> {
        self.check_index(k)?;
        let len = self.manifest.model_len();
        let data = read_f32s(&self.dir.join(MODELS_FILE), MODELS_FILE, k * len, len)?;
        let [r, c] = self.manifest.model_shape;
        let meta = &self.manifest.samples[k];
        let mut m = VelocityModel::from_grid(Array2::from_shape_vec((r, c), data).expect("sized read"));
        m.category = meta.subtype;
        m.n_layers = meta.n_layers;
        m.seed = meta.seed;
        Ok(m)
    }

    /// The `k`-th record, or an error for model-only datasets.
    pub fn record(&self, k: usize) -> Result<SeismicRecord<f32>> {
        self.check_index(k)?;
        let shape = self
            .manifest
            .record_shape
            .ok_or_else(|| Error::Config(format!("dataset {} has no records", self.dir.display())))?;
        let len = self.manifest.record_len();
        let data = read_f32s(&self.dir.join(RECORDS_FILE), RECORDS_FILE, k * len, len)?;
        Ok(SeismicRecord { data: Array3::from_shape_vec((shape[0], shape[1], shape[2]), data).expect("sized read") })
    }

    pub fn models(&self) -> Result<Vec<VelocityModel<f32>>> {
        (0..self.len()).map(|k| self.model(k)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tmp_names_stay_in_the_directory() {
        let p = tmp_path(Path::new("/a/b/models.f32"));
        assert_eq!(p, Path::new("/a/b/models.f32.tmp"));
    }
}
