//! Dimension-preservation sweep: sample planes, project an embedded
//! self-similar cloud, estimate box dimension and the grid pre-measure per
//! plane, and summarize against the ground truth `min(m, similarity dim)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dimension::{box_dimension_filtered, covering_measure, MAX_USABLE_FRACTION, MIN_USABLE_COUNT};
use crate::error::{Error, Result};
use crate::experiments::{plane_seed, project_cloud, ExperimentRow, SUMMARY_FOOTER};
use crate::fractals::{embed_in_ball, generate_depth, similarity_dimension, Ifs, PointCloud};
use crate::grassmann::{principal_angles, sample_haar, MPlane};

#[derive(Debug, Clone)]
pub struct MarstrandConfig {
    pub n: usize,
    pub m: usize,
    pub ifs: Ifs<f64>,
    pub depth: u32,
    pub num_planes: u64,
    pub seed: u64,
    pub deltas: Vec<f64>,
    pub embed_radius: f64,
    /// Usable-scale filter thresholds, exposed as CLI flags.
    pub min_count: usize,
    pub max_fraction: f64,
    pub offset_average: bool,
}

impl MarstrandConfig {
    pub fn new(n: usize, m: usize, ifs: Ifs<f64>, depth: u32, num_planes: u64, seed: u64) -> Self {
        MarstrandConfig {
            n,
            m,
            ifs,
            depth,
            num_planes,
            seed,
            deltas: (2..=7).map(|j| 2.0f64.powi(-j)).collect(),
            embed_radius: 0.5,
            min_count: MIN_USABLE_COUNT,
            max_fraction: MAX_USABLE_FRACTION,
            offset_average: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MarstrandSummary {
    pub ground_truth: f64,
    pub similarity_dim: f64,
    pub median_dim: Option<f64>,
    pub iqr: Option<(f64, f64)>,
    pub median_cover: Option<f64>,
    pub cover_delta: f64,
    pub planes: u64,
    pub planes_without_estimate: u64,
    pub footer: String,
}

#[derive(Debug)]
pub struct MarstrandOutput {
    pub rows: Vec<ExperimentRow>,
    pub summary: MarstrandSummary,
}

impl MarstrandSummary {
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "marstrand sweep: {} planes, ground truth min(m, s) = {:.6} (similarity dim {:.6})\n",
            self.planes, self.ground_truth, self.similarity_dim
        ));
        match (self.median_dim, self.iqr) {
            (Some(med), Some((lo, hi))) => s.push_str(&format!(
                "  projected box dimension: median {med:.4}, IQR [{lo:.4}, {hi:.4}]\n"
            )),
            _ => s.push_str("  projected box dimension: no usable estimates\n"),
        }
        if let Some(c) = self.median_cover {
            s.push_str(&format!(
                "  covering pre-measure at delta={:.6e}: median {c:.5}\n",
                self.cover_delta
            ));
        }
        if self.planes_without_estimate > 0 {
            s.push_str(&format!(
                "  {} plane(s) had too few usable scales and report dim_est=NaN\n",
                self.planes_without_estimate
            ));
        }
        s.push_str(&format!("  {}\n", self.footer));
        s
    }
}

/// Runs the sweep. Plane `i` uses the generator seeded by
/// `plane_seed(cfg.seed, i)`; rows come back sorted by `plane_id` so bytes
/// do not depend on the thread count.
pub fn run_marstrand(cfg: &MarstrandConfig) -> Result<MarstrandOutput> {
    validate(cfg)?;
    let cloud = embed_in_ball(&generate_depth(&cfg.ifs, cfg.depth)?, cfg.embed_radius)?;
    let sim_dim = similarity_dimension(&cfg.ifs);
    let ground_truth = sim_dim.min(cfg.m as f64);
    let reference = MPlane::<f64>::standard(cfg.n, cfg.m)?;
    let cover_delta = cfg
        .deltas
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);

    let rows: Vec<ExperimentRow> = (0..cfg.num_planes)
        .into_par_iter()
        .map(|i| plane_row(cfg, &cloud, &reference, cover_delta, i))
        .collect::<Result<Vec<_>>>()?;

    let dims: Vec<f64> = rows.iter().map(|r| r.dim_est).collect();
    let covers: Vec<f64> = rows.iter().map(|r| r.cover_est).collect();
    let missing = dims.iter().filter(|d| d.is_nan()).count() as u64;
    if missing == cfg.num_planes {
        return Err(Error::NoUsableScales(
            "every plane fell below 3 usable scales; widen the delta list".into(),
        ));
    }
    let summary = MarstrandSummary {
        ground_truth,
        similarity_dim: sim_dim,
        median_dim: super::median(&dims),
        iqr: match (super::percentile(&dims, 0.25), super::percentile(&dims, 0.75)) {
            (Some(lo), Some(hi)) => Some((lo, hi)),
            _ => None,
        },
        median_cover: super::median(&covers),
        cover_delta,
        planes: cfg.num_planes,
        planes_without_estimate: missing,
        footer: SUMMARY_FOOTER.into(),
    };
    Ok(MarstrandOutput { rows, summary })
}

fn plane_row(
    cfg: &MarstrandConfig,
    cloud: &PointCloud<f64>,
    reference: &MPlane<f64>,
    cover_delta: f64,
    index: u64,
) -> Result<ExperimentRow> {
    let seed = plane_seed(cfg.seed, index);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let plane = sample_haar::<f64, _>(cfg.n, cfg.m, &mut rng)?;
    let projected = project_cloud(&plane, cloud);
    let (dim_est, r2) = match box_dimension_filtered(
        &projected,
        &cfg.deltas,
        cfg.min_count,
        cfg.max_fraction,
        cfg.offset_average,
    ) {
        Ok(est) => (est.slope, est.r_squared),
        // Exceptional planes are reported, never filtered: a NaN row keeps
        // the plane visible in the table.
        Err(Error::NoUsableScales(_)) => (f64::NAN, f64::NAN),
        Err(e) => return Err(e),
    };
    let cover_est = covering_measure(&projected, cfg.m as u32, cover_delta)?;
    let pa = principal_angles(&plane, reference)?;
    Ok(ExperimentRow {
        plane_id: index,
        seed,
        n: cfg.n,
        m: cfg.m,
        dim_est,
        r2,
        cover_delta,
        cover_est,
        occ_est: f64::NAN,
        pa,
    })
}

fn validate(cfg: &MarstrandConfig) -> Result<()> {
    if cfg.m == 0 || cfg.m >= cfg.n {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= m < n, got n={}, m={}",
            cfg.n, cfg.m
        )));
    }
    if cfg.ifs.dim() != cfg.n {
        return Err(Error::DimensionMismatch { expected: cfg.n, actual: cfg.ifs.dim() });
    }
    if cfg.num_planes == 0 {
        return Err(Error::InvalidArgument("need at least one plane".into()));
    }
    if cfg.deltas.len() < 3 {
        return Err(Error::InvalidArgument("need at least 3 scales".into()));
    }
    Ok(())
}
