//! Self-similar test sets with known similarity dimension, generated either
//! by exhaustive composition or by the chaos game, plus the affine embedding
//! that places a cloud inside the model ball.

use std::io::{BufRead, Write};
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grassmann;
use crate::scalar::{norm, real, Scalar};

/// One contracting similarity `x -> ratio * R x + t`.
#[derive(Debug, Clone)]
pub struct Similarity<T: Scalar> {
    ratio: T,
    rotation: Vec<T>, // row-major n x n, orthogonal
    translation: Vec<T>,
}

impl<T: Scalar> Similarity<T> {
    pub fn new(ratio: T, rotation: Vec<T>, translation: Vec<T>) -> Result<Self> {
        let n = translation.len();
        if !(ratio > T::zero() && ratio < T::one()) {
            return Err(Error::InvalidArgument(format!(
                "similarity ratio must lie in (0,1), got {ratio:?}"
            )));
        }
        if rotation.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, actual: rotation.len() });
        }
        // |R v| = |v| within 1e-12 means R^T R = I to the same order.
        let mut dev = T::zero();
        for i in 0..n {
            for j in 0..n {
                let mut d = T::zero();
                for k in 0..n {
                    d = d + rotation[k * n + i] * rotation[k * n + j];
                }
                let target = if i == j { T::one() } else { T::zero() };
                dev = dev.max((d - target).abs());
            }
        }
        if dev > real::<T>(1e-12) {
            return Err(Error::InvalidArgument(format!(
                "rotation not orthogonal: max |R^T R - I| = {dev:?}"
            )));
        }
        Ok(Similarity { ratio, rotation, translation })
    }

    /// Identity rotation shorthand.
    pub fn homothety(ratio: T, translation: Vec<T>) -> Result<Self> {
        let n = translation.len();
        let mut rotation = vec![T::zero(); n * n];
        for i in 0..n {
            rotation[i * n + i] = T::one();
        }
        Similarity::new(ratio, rotation, translation)
    }

    pub fn ratio(&self) -> T {
        self.ratio
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn apply(&self, x: &[T], out: &mut [T]) {
        let n = self.dim();
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.rotation[i * n..(i + 1) * n];
            let acc = row
                .iter()
                .zip(x)
                .fold(T::zero(), |acc, (&r, &c)| acc + r * c);
            *o = self.ratio * acc + self.translation[i];
        }
    }

    /// Fixed point `p = ratio R p + t`, solved directly.
    pub fn fixed_point(&self) -> Vec<T> {
        let n = self.dim();
        // (I - ratio R) p = t, dense Gaussian elimination with partial
        // pivoting; the matrix is well conditioned since ratio < 1.
        let mut a = vec![T::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                let id = if i == j { T::one() } else { T::zero() };
                a[i * n + j] = id - self.ratio * self.rotation[i * n + j];
            }
        }
        let mut b = self.translation.clone();
        for col in 0..n {
            let mut piv = col;
            for r in (col + 1)..n {
                if a[r * n + col].abs() > a[piv * n + col].abs() {
                    piv = r;
                }
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
                b.swap(col, piv);
            }
            let d = a[col * n + col];
            for r in (col + 1)..n {
                let factor = a[r * n + col] / d;
                for j in col..n {
                    a[r * n + j] = a[r * n + j] - factor * a[col * n + j];
                }
                b[r] = b[r] - factor * b[col];
            }
        }
        for col in (0..n).rev() {
            let mut acc = b[col];
            for j in (col + 1)..n {
                acc = acc - a[col * n + j] * b[j];
            }
            b[col] = acc / a[col * n + col];
        }
        b
    }
}

/// An iterated function system: at least two similarities of one dimension.
/// `open_set_condition` is caller-asserted; the similarity dimension is the
/// Hausdorff dimension only under it.
#[derive(Debug, Clone)]
pub struct Ifs<T: Scalar> {
    maps: Vec<Similarity<T>>,
    open_set_condition: bool,
}

impl<T: Scalar> Ifs<T> {
    pub fn new(maps: Vec<Similarity<T>>, open_set_condition: bool) -> Result<Self> {
        if maps.len() < 2 {
            return Err(Error::InvalidArgument("an IFS needs at least two maps".into()));
        }
        let n = maps[0].dim();
        if maps.iter().any(|m| m.dim() != n) {
            return Err(Error::DimensionMismatch { expected: n, actual: 0 });
        }
        Ok(Ifs { maps, open_set_condition })
    }

    pub fn maps(&self) -> &[Similarity<T>] {
        &self.maps
    }

    pub fn dim(&self) -> usize {
        self.maps[0].dim()
    }

    pub fn open_set_condition(&self) -> bool {
        self.open_set_condition
    }

    /// Cube-corner dust: `2^n` homotheties of ratio `lambda` toward the
    /// corners of the unit cube. Needs `0 < lambda < 1/2` so first-generation
    /// images separate.
    pub fn cantor_dust(n: usize, lambda: T) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("dust needs dimension >= 1".into()));
        }
        if n > 20 {
            return Err(Error::InvalidArgument("dust dimension too large".into()));
        }
        if !(lambda > T::zero() && lambda < real::<T>(0.5)) {
            return Err(Error::InvalidArgument(
                "corner dust needs 0 < lambda < 1/2".into(),
            ));
        }
        let mut maps = Vec::with_capacity(1 << n);
        for corner in 0..(1usize << n) {
            let t: Vec<T> = (0..n)
                .map(|bit| {
                    if corner >> bit & 1 == 1 {
                        T::one() - lambda
                    } else {
                        T::zero()
                    }
                })
                .collect();
            maps.push(Similarity::homothety(lambda, t)?);
        }
        Ifs::new(maps, true)
    }

    /// The planar four-corner set: ratio-`lambda` maps at the corners of the
    /// unit square. At `lambda = 1/4` this is the canonical purely
    /// 1-unrectifiable set (similarity dimension exactly 1).
    pub fn four_corner(lambda: T) -> Result<Self> {
        Ifs::cantor_dust(2, lambda)
    }
}

/// Unique `s > 0` with `sum_i ratio_i^s = 1`, by bisection to 1e-12 (or a
/// few ulps for narrower scalars). Meaningful as Hausdorff dimension only
/// under the open set condition.
pub fn similarity_dimension<T: Scalar>(ifs: &Ifs<T>) -> T {
    let g = |s: T| -> T {
        ifs.maps
            .iter()
            .fold(T::zero(), |acc, map| acc + map.ratio().powf(s))
    };
    let mut hi = T::one();
    while g(hi) > T::one() {
        hi = hi + hi;
    }
    let mut lo = T::zero();
    let tol = real::<T>(1e-12).max(T::epsilon() * real::<T>(4.0));
    let half = real::<T>(0.5);
    for _ in 0..200 {
        let mid = (lo + hi) * half;
        if g(mid) > T::one() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= tol {
            break;
        }
    }
    (lo + hi) * half
}

/// Affine map recorded by [`embed_in_ball`]: `x -> scale * (x - center)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbedMap {
    pub center: Vec<f64>,
    pub scale: f64,
}

/// Provenance carried by a cloud: construction, seed, depth or sample count,
/// and the embedding applied (if any).
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CloudMeta {
    pub source: String,
    pub seed: Option<u64>,
    pub depth: Option<u32>,
    pub sample_count: Option<usize>,
    pub embedding: Option<EmbedMap>,
}

/// A finite sample of a set: flat row-major storage, one point per row.
#[derive(Debug, Clone)]
pub struct PointCloud<T: Scalar> {
    dim: usize,
    data: Vec<T>,
    meta: CloudMeta,
}

impl<T: Scalar> PointCloud<T> {
    pub fn from_rows(dim: usize, data: Vec<T>, meta: CloudMeta) -> Result<Self> {
        if dim == 0 || data.is_empty() || !data.len().is_multiple_of(dim) {
            return Err(Error::InvalidArgument(format!(
                "cloud storage of length {} does not hold nonempty {dim}-vectors",
                data.len()
            )));
        }
        Ok(PointCloud { dim, data, meta })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn meta(&self) -> &CloudMeta {
        &self.meta
    }

    pub fn point(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter_points(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks_exact(self.dim)
    }

    /// Bounding box as (min, max) per coordinate.
    pub fn bounding_box(&self) -> (Vec<T>, Vec<T>) {
        let mut lo = self.point(0).to_vec();
        let mut hi = lo.clone();
        for p in self.iter_points() {
            for (i, &c) in p.iter().enumerate() {
                lo[i] = lo[i].min(c);
                hi[i] = hi[i].max(c);
            }
        }
        (lo, hi)
    }

    /// Writes one point per row, comma separated, 17 significant digits,
    /// locale independent.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let mut line = String::new();
        for p in self.iter_points() {
            line.clear();
            for (i, c) in p.iter().enumerate() {
                if i > 0 {
                    line.push(',');
                }
                line.push_str(&format_sig17(c.to_f64().unwrap_or(f64::NAN)));
            }
            line.push('\n');
            w.write_all(line.as_bytes())?;
        }
        Ok(())
    }

    pub fn write_csv_path<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(f))
    }

    /// Reads a cloud written by [`write_csv`]; dimension inferred from the
    /// first row.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut dim = 0usize;
        let mut data: Vec<T> = Vec::new();
        for (ln, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row: std::result::Result<Vec<f64>, _> =
                line.split(',').map(|tok| tok.trim().parse::<f64>()).collect();
            let row = row.map_err(|e| Error::Parse(format!("line {}: {e}", ln + 1)))?;
            if dim == 0 {
                dim = row.len();
            } else if row.len() != dim {
                return Err(Error::Parse(format!(
                    "line {}: expected {dim} fields, got {}",
                    ln + 1,
                    row.len()
                )));
            }
            data.extend(row.into_iter().map(real::<T>));
        }
        if data.is_empty() {
            return Err(Error::DegenerateInput("empty cloud file".into()));
        }
        PointCloud::from_rows(dim, data, CloudMeta { source: "csv".into(), ..Default::default() })
    }

    pub fn read_csv_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read_csv(std::io::BufReader::new(f))
    }
}

/// `{:.16e}` gives one leading digit plus sixteen more: 17 significant.
fn format_sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Generation cap for exhaustive enumeration.
pub const DEPTH_POINT_CAP: usize = 10_000_000;

/// One representative per length-`k` composition, applied to the fixed point
/// of the first map (the base point; recorded in the metadata).
pub fn generate_depth<T: Scalar>(ifs: &Ifs<T>, k: u32) -> Result<PointCloud<T>> {
    if k == 0 {
        return Err(Error::InvalidArgument("depth must be >= 1".into()));
    }
    let branches = ifs.maps.len();
    let mut total = 1usize;
    for _ in 0..k {
        total = total
            .checked_mul(branches)
            .filter(|&t| t <= DEPTH_POINT_CAP)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "{branches}^{k} points exceed the {DEPTH_POINT_CAP} cap; use chaos_game instead"
                ))
            })?;
    }
    let n = ifs.dim();
    let base = ifs.maps[0].fixed_point();
    let mut level = base.clone();
    let mut next: Vec<T> = Vec::new();
    let mut out = vec![T::zero(); n];
    for _ in 0..k {
        next.clear();
        next.reserve(level.len() * branches);
        for map in &ifs.maps {
            for p in level.chunks_exact(n) {
                map.apply(p, &mut out);
                next.extend_from_slice(&out);
            }
        }
        std::mem::swap(&mut level, &mut next);
    }
    PointCloud::from_rows(
        n,
        level,
        CloudMeta {
            source: format!(
                "generate_depth(k={k}, base = fixed point of map 0 at {:?})",
                ifs.maps[0]
                    .fixed_point()
                    .iter()
                    .map(|c| c.to_f64().unwrap_or(f64::NAN))
                    .collect::<Vec<_>>()
            ),
            depth: Some(k),
            sample_count: Some(total),
            ..Default::default()
        },
    )
}

/// `n` points of the random orbit after a 100-step burn-in; maps drawn
/// uniformly. Deterministic given the generator state.
pub fn chaos_game<T: Scalar, R: Rng + ?Sized>(
    ifs: &Ifs<T>,
    n_points: usize,
    rng: &mut R,
) -> Result<PointCloud<T>> {
    if n_points == 0 {
        return Err(Error::InvalidArgument("chaos game needs at least one point".into()));
    }
    let n = ifs.dim();
    let mut state = ifs.maps[0].fixed_point();
    let mut out = vec![T::zero(); n];
    for _ in 0..100 {
        let pick = rng.gen_range(0..ifs.maps.len());
        ifs.maps[pick].apply(&state, &mut out);
        std::mem::swap(&mut state, &mut out);
    }
    let mut data = Vec::with_capacity(n_points * n);
    for _ in 0..n_points {
        let pick = rng.gen_range(0..ifs.maps.len());
        ifs.maps[pick].apply(&state, &mut out);
        std::mem::swap(&mut state, &mut out);
        data.extend_from_slice(&state);
    }
    PointCloud::from_rows(
        n,
        data,
        CloudMeta {
            source: format!("chaos_game(n={n_points}, burn_in=100)"),
            sample_count: Some(n_points),
            ..Default::default()
        },
    )
}

/// Recenters the cloud's bounding box on the origin and rescales so it fits
/// exactly inside the Euclidean ball of `radius` (default 0.5 keeps clouds
/// clear of the zone where atanh amplifies rounding). Records the affine map
/// in the metadata.
pub fn embed_in_ball<T: Scalar>(cloud: &PointCloud<T>, radius: f64) -> Result<PointCloud<T>> {
    if !(radius > 0.0 && radius <= 0.9) {
        return Err(Error::InvalidArgument(format!(
            "embedding radius must lie in (0, 0.9], got {radius}"
        )));
    }
    let (lo, hi) = cloud.bounding_box();
    let half = real::<T>(0.5);
    let center: Vec<T> = lo.iter().zip(&hi).map(|(&a, &b)| (a + b) * half).collect();
    let mut max_norm = T::zero();
    let mut shifted = Vec::with_capacity(cloud.data.len());
    for p in cloud.iter_points() {
        let q: Vec<T> = p.iter().zip(&center).map(|(&c, &m)| c - m).collect();
        max_norm = max_norm.max(norm(&q));
        shifted.extend(q);
    }
    if max_norm < real::<T>(1e-300) {
        return Err(Error::DegenerateInput(
            "cannot embed a single-point (zero-extent) cloud".into(),
        ));
    }
    let scale = real::<T>(radius) / max_norm;
    for c in &mut shifted {
        *c = *c * scale;
    }
    let mut meta = cloud.meta.clone();
    meta.embedding = Some(EmbedMap {
        center: center.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect(),
        scale: scale.to_f64().unwrap_or(f64::NAN),
    });
    meta.source = format!("{} | embedded(radius={radius})", meta.source);
    PointCloud::from_rows(cloud.dim, shifted, meta)
}

/// Evenly spaced points along the first coordinate axis, spanning the
/// diameter segment `[-0.5, 0.5] e_1`: the rectifiable control (positive
/// length in every dimension count).
pub fn segment<T: Scalar>(n: usize) -> Result<PointCloud<T>> {
    segment_with_points(n, 10_000)
}

/// [`segment`] with an explicit sample count. Measuring a covering at cell
/// size `delta` needs spacing below `delta`, i.e. roughly `1/delta` points.
pub fn segment_with_points<T: Scalar>(n: usize, count: usize) -> Result<PointCloud<T>> {
    if n < 2 {
        return Err(Error::InvalidArgument("segment needs ambient dimension >= 2".into()));
    }
    if count < 2 {
        return Err(Error::InvalidArgument("segment needs at least 2 points".into()));
    }
    let mut data = vec![T::zero(); count * n];
    for i in 0..count {
        let t = -0.5 + i as f64 / (count - 1) as f64;
        data[i * n] = real::<T>(t);
    }
    PointCloud::from_rows(
        n,
        data,
        CloudMeta {
            source: format!("segment(n={n}, points={count}) on [-0.5,0.5] e1"),
            sample_count: Some(count),
            ..Default::default()
        },
    )
}

// ---------------------------------------------------------------------------
// JSON wire format
// ---------------------------------------------------------------------------

/// Serialized IFS: `{ "n": int, "maps": [ { "ratio", "rotation" (row-major
/// n*n), "translation" } ], "osc": bool }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IfsSpec {
    pub n: usize,
    pub maps: Vec<SimilaritySpec>,
    pub osc: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimilaritySpec {
    pub ratio: f64,
    pub rotation: Vec<f64>,
    pub translation: Vec<f64>,
}

impl IfsSpec {
    pub fn to_ifs<T: Scalar>(&self) -> Result<Ifs<T>> {
        let maps: Result<Vec<Similarity<T>>> = self
            .maps
            .iter()
            .map(|m| {
                if m.translation.len() != self.n {
                    return Err(Error::DimensionMismatch {
                        expected: self.n,
                        actual: m.translation.len(),
                    });
                }
                Similarity::new(
                    real::<T>(m.ratio),
                    m.rotation.iter().map(|&c| real::<T>(c)).collect(),
                    m.translation.iter().map(|&c| real::<T>(c)).collect(),
                )
            })
            .collect();
        Ifs::new(maps?, self.osc)
    }

    pub fn from_ifs<T: Scalar>(ifs: &Ifs<T>) -> Self {
        IfsSpec {
            n: ifs.dim(),
            maps: ifs
                .maps
                .iter()
                .map(|m| SimilaritySpec {
                    ratio: m.ratio.to_f64().unwrap(),
                    rotation: m.rotation.iter().map(|c| c.to_f64().unwrap()).collect(),
                    translation: m.translation.iter().map(|c| c.to_f64().unwrap()).collect(),
                })
                .collect(),
            osc: ifs.open_set_condition,
        }
    }

    pub fn from_json(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::Parse(format!("IFS JSON: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("IFS spec serializes")
    }
}

/// Convenience: random orthogonal similarity for harness-built sets.
pub fn rotated_similarity<T: Scalar, R: Rng + ?Sized>(
    ratio: T,
    translation: Vec<T>,
    rng: &mut R,
) -> Result<Similarity<T>> {
    let n = translation.len();
    let rot = grassmann::sample_orthogonal::<T, R>(n, rng);
    Similarity::new(ratio, rot, translation)
}
