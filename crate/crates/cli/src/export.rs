use std::fmt::Write as _;

use ndarray::ArrayView2;

/// `depth_m,<names...>` with one row per model row.
pub fn profile_csv<T: std::fmt::Display>(dx: f64, names: &[&str], columns: &[Vec<T>]) -> String {
    let mut s = String::from("depth_m");
    for n in names {
        s.push(',');
        s.push_str(n);
    }
    s.push('\n');
    let rows = columns.first().map_or(0, Vec::len);
    for z in 0..rows {
        write!(s, "{}", z as f64 * dx).unwrap();
        for c in columns {
            write!(s, ",{}", c[z]).unwrap();
        }
        s.push('\n');
    }
    s
}

/// `time_s,rx_<col>...` with one row per time sample.
pub fn gather_csv(dt: f64, receiver_cols: &[usize], gather: ArrayView2<f32>) -> String {
    let mut s = String::from("time_s");
    for c in receiver_cols {
        write!(s, ",rx_{c}").unwrap();
    }
    s.push('\n');
    for (k, row) in gather.outer_iter().enumerate() {
        write!(s, "{}", k as f64 * dt).unwrap();
        for v in row {
            write!(s, ",{v}").unwrap();
        }
        s.push('\n');
    }
    s
}

/// Binary 8-bit PGM; `lo..=hi` maps linearly onto 0..=255.
pub fn pgm(image: ArrayView2<f32>, lo: f32, hi: f32) -> Vec<u8> {
    let (h, w) = image.dim();
    let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
    let span = if hi > lo { hi - lo } else { 1.0 };
    out.extend(image.iter().map(|&v| (((v - lo) / span).clamp(0.0, 1.0) * 255.0).round() as u8));
    out
}

/// Gathers are shown symmetrically around zero, clipped at `clip`·max-abs.
pub fn gather_pgm(gather: ArrayView2<f32>, clip: f32) -> Vec<u8> {
    let m = gather.iter().fold(0.0f32, |m, v| m.max(v.abs())) * clip;
    let m = if m > 0.0 { m } else { 1.0 };
    pgm(gather, -m, m)
}
