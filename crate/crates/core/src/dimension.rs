//! Box-counting dimension estimation, grid pre-measure and
//! interior-occupancy diagnostics on point clouds in plane coordinates.
//!
//! Cells are half-open boxes `[k delta, (k+1) delta)` of the origin-anchored
//! grid: refinement by two nests exactly and counts are reproducible. A
//! randomized-offset average is available behind a flag to reduce anchoring
//! bias; the default stays deterministic.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fractals::PointCloud;
use crate::scalar::{real, Scalar};

/// Result of the log-log regression: `slope` estimates the dimension.
#[derive(Debug, Clone, Serialize)]
pub struct DimensionEstimate {
    pub slope: f64,
    pub r_squared: f64,
    pub scales_used: Vec<f64>,
    pub counts: Vec<usize>,
}

impl DimensionEstimate {
    fn new(slope: f64, r_squared: f64, scales_used: Vec<f64>, counts: Vec<usize>) -> Result<Self> {
        if !slope.is_finite() {
            return Err(Error::NoUsableScales(format!("regression slope not finite: {slope}")));
        }
        if scales_used.len() != counts.len() || scales_used.len() < 3 {
            return Err(Error::NoUsableScales(
                "a dimension estimate needs at least 3 usable scales".into(),
            ));
        }
        Ok(DimensionEstimate { slope, r_squared, scales_used, counts })
    }
}

/// Usable-scale filter: counts below this are coarse saturation.
pub const MIN_USABLE_COUNT: usize = 8;
/// Counts above this fraction of the point count are resolution saturation.
pub const MAX_USABLE_FRACTION: f64 = 0.2;

/// Number of distinct occupied cells of the origin-anchored grid of side
/// `delta`.
pub fn box_count<T: Scalar>(cloud: &PointCloud<T>, delta: T) -> Result<usize> {
    if !(delta > T::zero()) {
        return Err(Error::InvalidArgument("box size must be positive".into()));
    }
    Ok(count_cells(cloud, delta, &vec![T::zero(); cloud.dim()]))
}

/// Cell index of one coordinate. The quotient is nudged by a relative 1e-9
/// before flooring so points that sit mathematically on a cell boundary
/// (base-3 endpoints, say) land in their half-open cell despite rounding.
#[inline]
fn cell_index<T: Scalar>(coord: T, offset: T, delta: T) -> i64 {
    let q = ((coord - offset) / delta).to_f64().unwrap();
    (q + 1e-9 * q.abs().max(1.0)).floor() as i64
}

/// Cell count with the grid shifted by `offset` (same convention).
fn count_cells<T: Scalar>(cloud: &PointCloud<T>, delta: T, offset: &[T]) -> usize {
    let m = cloud.dim();
    if m <= 7 {
        // Pack indices into one u128 (18 bits signed each); sort + dedup.
        let mut keys: Vec<u128> = Vec::with_capacity(cloud.len());
        let bias = 1i64 << 17;
        for p in cloud.iter_points() {
            let mut key: u128 = 0;
            for (c, o) in p.iter().zip(offset) {
                let idx = cell_index(*c, *o, delta) + bias;
                debug_assert!((0..(1 << 18)).contains(&idx), "cell index out of packing range");
                key = (key << 18) | (idx as u128 & 0x3ffff);
            }
            keys.push(key);
        }
        keys.sort_unstable();
        keys.dedup();
        keys.len()
    } else {
        let mut keys: Vec<Vec<i64>> = cloud
            .iter_points()
            .map(|p| {
                p.iter()
                    .zip(offset)
                    .map(|(c, o)| cell_index(*c, *o, delta))
                    .collect()
            })
            .collect();
        keys.sort_unstable();
        keys.dedup();
        keys.len()
    }
}

/// Least-squares slope of `log(count)` against `log(1/delta)` over the
/// usable scales, with the default saturation filter.
pub fn box_dimension<T: Scalar>(cloud: &PointCloud<T>, deltas: &[T]) -> Result<DimensionEstimate> {
    box_dimension_filtered(cloud, deltas, MIN_USABLE_COUNT, MAX_USABLE_FRACTION, false)
}

/// [`box_dimension`] with explicit filter thresholds and optional 4-offset
/// grid averaging (counts become means over shifted grids; default off so
/// runs stay deterministic byte for byte — the offsets here are a fixed
/// lattice, not random, so "on" is deterministic too, merely anchored
/// differently).
pub fn box_dimension_filtered<T: Scalar>(
    cloud: &PointCloud<T>,
    deltas: &[T],
    min_count: usize,
    max_fraction: f64,
    offset_average: bool,
) -> Result<DimensionEstimate> {
    let n_points = cloud.len();
    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    let mut used_scales: Vec<f64> = Vec::new();
    let mut used_counts: Vec<usize> = Vec::new();
    let mut rejects: Vec<String> = Vec::new();
    for &delta in deltas {
        if !(delta > T::zero()) {
            return Err(Error::InvalidArgument("box size must be positive".into()));
        }
        let count = if offset_average {
            let mut acc = 0usize;
            for k in 0..4 {
                let shift = delta * real::<T>(k as f64 / 4.0);
                let offset = vec![shift; cloud.dim()];
                acc += count_cells(cloud, delta, &offset);
            }
            // Mean of the four counts, rounded: stays an integer count.
            (acc + 2) / 4
        } else {
            count_cells(cloud, delta, &vec![T::zero(); cloud.dim()])
        };
        let delta_f = delta.to_f64().unwrap();
        if count < min_count {
            rejects.push(format!("delta={delta_f:e}: count {count} < {min_count} (coarse saturation)"));
            continue;
        }
        if (count as f64) > max_fraction * n_points as f64 {
            rejects.push(format!(
                "delta={delta_f:e}: count {count} > {max_fraction} * {n_points} (resolution saturation)"
            ));
            continue;
        }
        xs.push((1.0 / delta_f).ln());
        ys.push((count as f64).ln());
        used_scales.push(delta_f);
        used_counts.push(count);
    }
    if xs.len() < 3 {
        return Err(Error::NoUsableScales(format!(
            "{} usable of {} scales; filtered: [{}]",
            xs.len(),
            deltas.len(),
            rejects.join("; ")
        )));
    }
    let (slope, r2) = least_squares(&xs, &ys);
    DimensionEstimate::new(slope, r2, used_scales, used_counts)
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let mean_y = sy / n;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - mean_y) * (y - mean_y)).sum();
    let r2 = if ss_tot < 1e-30 {
        if ss_res < 1e-30 {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 - ss_res / ss_tot
    };
    (slope, r2)
}

/// Grid pre-measure at scale `delta`: occupied cells times `delta^m`.
/// Decay under shrinking `delta` indicates measure zero; stabilization
/// indicates positive measure.
pub fn covering_measure<T: Scalar>(cloud: &PointCloud<T>, m: u32, delta: T) -> Result<f64> {
    let count = box_count(cloud, delta)?;
    Ok(count as f64 * delta.to_f64().unwrap().powi(m as i32))
}

/// An axis-aligned window, one `(lo, hi)` interval per plane coordinate.
#[derive(Debug, Clone)]
pub struct Window {
    pub intervals: Vec<(f64, f64)>,
}

impl Window {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.is_empty() || intervals.iter().any(|(lo, hi)| !(lo < hi)) {
            return Err(Error::InvalidArgument("window intervals must be nonempty".into()));
        }
        Ok(Window { intervals })
    }

    /// Central box covering `fraction` of each side of the cloud's bounding
    /// box (the sweeps use `fraction = 0.5`).
    pub fn central<T: Scalar>(cloud: &PointCloud<T>, fraction: f64) -> Result<Self> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::InvalidArgument("window fraction must lie in (0,1]".into()));
        }
        let (lo, hi) = cloud.bounding_box();
        let intervals = lo
            .iter()
            .zip(&hi)
            .map(|(&a, &b)| {
                let (a, b) = (a.to_f64().unwrap(), b.to_f64().unwrap());
                let c = 0.5 * (a + b);
                let h = 0.5 * (b - a) * fraction;
                (c - h, c + h)
            })
            .collect();
        Window::new(intervals)
    }
}

/// Fraction of grid cells lying entirely inside the window that contain at
/// least one point. Near 1 across shrinking `delta` supports nonempty
/// interior; errors when no cell fits in the window.
pub fn interior_occupancy<T: Scalar>(cloud: &PointCloud<T>, delta: T, window: &Window) -> Result<f64> {
    if window.intervals.len() != cloud.dim() {
        return Err(Error::DimensionMismatch {
            expected: cloud.dim(),
            actual: window.intervals.len(),
        });
    }
    if !(delta > T::zero()) {
        return Err(Error::InvalidArgument("box size must be positive".into()));
    }
    let d = delta.to_f64().unwrap();
    // Index ranges of cells [k d, (k+1) d) fully inside each interval.
    let mut ranges: Vec<(i64, i64)> = Vec::with_capacity(window.intervals.len());
    let mut total = 1u64;
    for &(lo, hi) in &window.intervals {
        let k0 = (lo / d).ceil() as i64;
        let k1 = (hi / d).floor() as i64 - 1;
        if k1 < k0 {
            return Err(Error::InvalidArgument(format!(
                "no delta={d} cell fits inside window [{lo}, {hi}]"
            )));
        }
        total *= (k1 - k0 + 1) as u64;
        ranges.push((k0, k1));
    }
    if total > 50_000_000 {
        return Err(Error::InvalidArgument(format!(
            "window spans {total} cells at delta={d}; refusing"
        )));
    }
    // Occupied in-window cells.
    let mut keys: Vec<Vec<i64>> = Vec::new();
    'points: for p in cloud.iter_points() {
        let mut key = Vec::with_capacity(p.len());
        for (c, (k0, k1)) in p.iter().zip(&ranges) {
            let idx = cell_index(*c, T::zero(), delta);
            if idx < *k0 || idx > *k1 {
                continue 'points;
            }
            key.push(idx);
        }
        keys.push(key);
    }
    keys.sort_unstable();
    keys.dedup();
    Ok(keys.len() as f64 / total as f64)
}
