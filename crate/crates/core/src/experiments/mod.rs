//! Experiment harness: the verify suite, the projection sweeps and their
//! CSV/JSON reporting.
//!
//! Determinism contract: a sweep is a pure function of its config. Per-plane
//! generators are derived from the master seed and the plane index through
//! [`plane_seed`], so results do not depend on scheduling; rows are gathered
//! and written in plane order, making output bytes independent of the rayon
//! thread count (set `RAYON_NUM_THREADS` to change it).

pub mod besfed;
pub mod interior;
pub mod marstrand;
pub mod verify;

use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::fractals::PointCloud;
use crate::grassmann::MPlane;
use crate::projection::hyp_project_coords;
use crate::scalar::Scalar;

/// Per-plane seed: SplitMix64 finalizer over `master ^ (index+1) * golden`.
/// Stable, documented, order-free.
pub fn plane_seed(master: u64, index: u64) -> u64 {
    const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
    let mut z = master ^ (index.wrapping_add(1)).wrapping_mul(GOLDEN);
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One CSV row; a single flat schema serves every sweep, with `NaN` in the
/// columns a sweep does not produce.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentRow {
    pub plane_id: u64,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub dim_est: f64,
    pub r2: f64,
    pub cover_delta: f64,
    pub cover_est: f64,
    pub occ_est: f64,
    pub pa: Vec<f64>,
}

/// Fixed header: `plane_id,seed,n,m,dim_est,r2,cover_delta,cover_est,occ_est,pa_1..pa_m`.
pub fn csv_header(m: usize) -> String {
    let mut h = String::from("plane_id,seed,n,m,dim_est,r2,cover_delta,cover_est,occ_est");
    for j in 1..=m {
        h.push_str(&format!(",pa_{j}"));
    }
    h
}

impl ExperimentRow {
    pub fn to_csv(&self) -> String {
        let mut s = format!(
            "{},{},{},{},{},{},{},{},{}",
            self.plane_id,
            self.seed,
            self.n,
            self.m,
            fmt_f64(self.dim_est),
            fmt_f64(self.r2),
            fmt_f64(self.cover_delta),
            fmt_f64(self.cover_est),
            fmt_f64(self.occ_est),
        );
        for a in &self.pa {
            s.push(',');
            s.push_str(&fmt_f64(*a));
        }
        s
    }
}

/// Shortest round-trip decimal; `NaN` spelled literally. Locale independent.
fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x}")
    }
}

/// Writes header plus rows; rows must already be sorted by the caller's key.
pub fn write_csv<W: Write>(mut w: W, m: usize, rows: &[ExperimentRow]) -> Result<()> {
    let mut text = csv_header(m);
    text.push('\n');
    for row in rows {
        text.push_str(&row.to_csv());
        text.push('\n');
    }
    w.write_all(text.as_bytes())?;
    Ok(())
}

/// CSV bytes for in-memory comparison (the determinism tests).
pub fn csv_bytes(m: usize, rows: &[ExperimentRow]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_csv(&mut buf, m, rows).expect("in-memory write");
    buf
}

/// Projects every cloud point and returns the in-plane coordinate cloud.
pub fn project_cloud<T: Scalar>(plane: &MPlane<T>, cloud: &PointCloud<T>) -> PointCloud<T> {
    let m = plane.plane_dim();
    let mut data = Vec::with_capacity(cloud.len() * m);
    for p in cloud.iter_points() {
        data.extend(hyp_project_coords(plane, p));
    }
    let mut meta = cloud.meta().clone();
    meta.source = format!("{} | projected(m={m})", meta.source);
    PointCloud::from_rows(m, data, meta).expect("projected cloud nonempty")
}

/// Median of a nonempty slice (ignores NaN entries; None if all NaN).
pub fn median(values: &[f64]) -> Option<f64> {
    percentile(values, 0.5)
}

/// Linear-interpolation percentile over the non-NaN entries.
pub fn percentile(values: &[f64], q: f64) -> Option<f64> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pos = q * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    Some(v[lo] * (1.0 - frac) + v[hi] * frac)
}

/// Footer appended to every sweep summary: thresholds are harness
/// calibrations, the theorems themselves are asymptotic a.e. statements
/// with no quantitative rate.
pub const SUMMARY_FOOTER: &str = "note: statistical thresholds are desk-scale harness calibrations; \
the underlying statements are almost-everywhere results without quantitative rates";
