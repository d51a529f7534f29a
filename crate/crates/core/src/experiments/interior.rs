//! Interior sweep: occupancy of the central window of each projection at a
//! ladder of scales. Meaningful when the set's dimension exceeds twice the
//! plane dimension; the sweep warns (but still runs) otherwise.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dimension::{covering_measure, interior_occupancy, Window};
use crate::error::{Error, Result};
use crate::experiments::{plane_seed, project_cloud, ExperimentRow, SUMMARY_FOOTER};
use crate::fractals::{embed_in_ball, generate_depth, similarity_dimension, Ifs, PointCloud};
use crate::grassmann::{principal_angles, sample_haar, MPlane};

#[derive(Debug, Clone)]
pub struct InteriorConfig {
    pub n: usize,
    pub m: usize,
    pub ifs: Ifs<f64>,
    pub depth: u32,
    pub num_planes: u64,
    pub seed: u64,
    /// Occupancy scales; the ladder 2^-3..2^-5 by default.
    pub deltas: Vec<f64>,
    pub embed_radius: f64,
    /// Central window side, as a fraction of the projected bounding box.
    pub window_fraction: f64,
}

impl InteriorConfig {
    pub fn new(n: usize, m: usize, ifs: Ifs<f64>, depth: u32, num_planes: u64, seed: u64) -> Self {
        InteriorConfig {
            n,
            m,
            ifs,
            depth,
            num_planes,
            seed,
            deltas: (3..=5).map(|j| 2.0f64.powi(-j)).collect(),
            embed_radius: 0.5,
            window_fraction: 0.5,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InteriorSummary {
    pub similarity_dim: f64,
    /// Set when the hypothesis `dim > 2m` fails; the sweep still runs.
    pub hypothesis_warning: Option<String>,
    /// Median occupancy per scale, finest last.
    pub median_occupancy: Vec<(f64, f64)>,
    pub planes: u64,
    pub footer: String,
}

impl InteriorSummary {
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "interior sweep: {} planes, similarity dim {:.4}\n",
            self.planes, self.similarity_dim
        ));
        if let Some(w) = &self.hypothesis_warning {
            s.push_str(&format!("  warning: {w}\n"));
        }
        for (delta, occ) in &self.median_occupancy {
            s.push_str(&format!(
                "  occupancy of the central window at delta={delta:.6e}: median {occ:.4}\n"
            ));
        }
        s.push_str(&format!("  {}\n", self.footer));
        s
    }
}

#[derive(Debug)]
pub struct InteriorOutput {
    /// One row per (plane, delta), sorted by plane then delta (coarse first).
    pub rows: Vec<ExperimentRow>,
    pub summary: InteriorSummary,
}

pub fn run_interior(cfg: &InteriorConfig) -> Result<InteriorOutput> {
    if cfg.m == 0 || cfg.m >= cfg.n {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= m < n, got n={}, m={}",
            cfg.n, cfg.m
        )));
    }
    if cfg.ifs.dim() != cfg.n {
        return Err(Error::DimensionMismatch { expected: cfg.n, actual: cfg.ifs.dim() });
    }
    if cfg.num_planes == 0 || cfg.deltas.is_empty() {
        return Err(Error::InvalidArgument("need planes and scales".into()));
    }
    let sim_dim = similarity_dimension(&cfg.ifs);
    let hypothesis_warning = if sim_dim <= 2.0 * cfg.m as f64 {
        Some(format!(
            "similarity dimension {sim_dim:.4} does not exceed 2m = {}; interior is not predicted",
            2 * cfg.m
        ))
    } else {
        None
    };
    let cloud = embed_in_ball(&generate_depth(&cfg.ifs, cfg.depth)?, cfg.embed_radius)?;
    let reference = MPlane::<f64>::standard(cfg.n, cfg.m)?;

    let rows: Vec<ExperimentRow> = (0..cfg.num_planes)
        .into_par_iter()
        .map(|i| -> Result<Vec<ExperimentRow>> {
            let seed = plane_seed(cfg.seed, i);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let plane = sample_haar::<f64, _>(cfg.n, cfg.m, &mut rng)?;
            let projected: PointCloud<f64> = project_cloud(&plane, &cloud);
            let window = Window::central(&projected, cfg.window_fraction)?;
            let pa = principal_angles(&plane, &reference)?;
            cfg.deltas
                .iter()
                .map(|&delta| {
                    let occ = interior_occupancy(&projected, delta, &window)?;
                    Ok(ExperimentRow {
                        plane_id: i,
                        seed,
                        n: cfg.n,
                        m: cfg.m,
                        dim_est: f64::NAN,
                        r2: f64::NAN,
                        cover_delta: delta,
                        cover_est: covering_measure(&projected, cfg.m as u32, delta)?,
                        occ_est: occ,
                        pa: pa.clone(),
                    })
                })
                .collect()
        })
        .collect::<Result<Vec<Vec<_>>>>()?
        .into_iter()
        .flatten()
        .collect();

    let median_occupancy = cfg
        .deltas
        .iter()
        .map(|&delta| {
            let at_scale: Vec<f64> = rows
                .iter()
                .filter(|r| r.cover_delta == delta)
                .map(|r| r.occ_est)
                .collect();
            (delta, super::median(&at_scale).unwrap_or(f64::NAN))
        })
        .collect();

    Ok(InteriorOutput {
        rows,
        summary: InteriorSummary {
            similarity_dim: sim_dim,
            hypothesis_warning,
            median_occupancy,
            planes: cfg.num_planes,
            footer: SUMMARY_FOOTER.into(),
        },
    })
}
