//! Unrectifiability demo: covering pre-measures of the four-corner set's
//! projections across generations, against a rectifiable segment control.
//!
//! For each sampled line the pre-measure of the generation-k cloud is taken
//! at cell size `4^-k` (one point per generation piece, matching the piece
//! size); the reported decay ratio is `estimate_k / estimate_3`. Projections
//! of the purely unrectifiable set should decay; the segment control should
//! hold its length. The segment control is sampled densely enough to resolve
//! the finest measured scale (the 10^4-point default builtin would starve:
//! at `4^-7` its projected spacing already exceeds the cell size, capping
//! the pre-measure at points x delta and faking decay).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dimension::covering_measure;
use crate::error::{Error, Result};
use crate::experiments::{plane_seed, project_cloud, ExperimentRow, SUMMARY_FOOTER};
use crate::fractals::{embed_in_ball, generate_depth, segment_with_points, Ifs, PointCloud};
use crate::grassmann::{principal_angles, sample_haar, MPlane};

#[derive(Debug, Clone)]
pub struct BesfedConfig {
    /// Deepest generation measured; the sweep runs k = 3..=generations.
    pub generations: u32,
    pub num_planes: u64,
    pub seed: u64,
    /// Corner-map ratio; 1/4 is the canonical purely 1-unrectifiable set.
    pub lambda: f64,
    pub embed_radius: f64,
}

impl BesfedConfig {
    pub fn new(generations: u32, num_planes: u64, seed: u64) -> Self {
        BesfedConfig {
            generations,
            num_planes,
            seed,
            lambda: 0.25,
            embed_radius: 0.5,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PlaneDecay {
    pub plane_id: u64,
    /// Principal angle to the first coordinate axis, degrees.
    pub angle_deg: f64,
    pub four_corner_ratio: f64,
    pub segment_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BesfedSummary {
    pub generations: u32,
    pub planes: u64,
    pub median_four_corner_ratio: Option<f64>,
    pub fraction_below_half: f64,
    pub median_segment_ratio: Option<f64>,
    pub min_segment_ratio_below_80deg: Option<f64>,
    /// Slowest-decaying lines, reported (never filtered): the exceptional
    /// directions of the four-corner set sit here.
    pub slowest: Vec<PlaneDecay>,
    pub per_plane: Vec<PlaneDecay>,
    pub footer: String,
}

impl BesfedSummary {
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "four-corner decay sweep: generations 3..={}, {} lines\n",
            self.generations, self.planes
        ));
        if let Some(m) = self.median_four_corner_ratio {
            s.push_str(&format!(
                "  four-corner covering ratio est_{}/est_3: median {m:.4}, fraction below 0.5: {:.2}\n",
                self.generations, self.fraction_below_half
            ));
        }
        if let Some(m) = self.median_segment_ratio {
            s.push_str(&format!("  segment control ratio: median {m:.4}"));
            if let Some(worst) = self.min_segment_ratio_below_80deg {
                s.push_str(&format!(", min over lines with angle < 80 deg: {worst:.4}"));
            }
            s.push('\n');
        }
        s.push_str("  slowest-decaying lines (reported, not filtered):\n");
        for d in &self.slowest {
            s.push_str(&format!(
                "    line {:>3} at {:>6.2} deg: four-corner ratio {:.4}, segment ratio {:.4}\n",
                d.plane_id, d.angle_deg, d.four_corner_ratio, d.segment_ratio
            ));
        }
        s.push_str(&format!("  {}\n", SUMMARY_FOOTER));
        s
    }
}

#[derive(Debug)]
pub struct BesfedOutput {
    /// One row per (line, generation), sorted by line then generation.
    pub rows: Vec<ExperimentRow>,
    pub summary: BesfedSummary,
}

pub fn run_besfed(cfg: &BesfedConfig) -> Result<BesfedOutput> {
    if cfg.generations < 3 || cfg.generations > 8 {
        return Err(Error::InvalidArgument(
            "generations must lie in 3..=8 (the enumeration cap)".into(),
        ));
    }
    if cfg.num_planes == 0 {
        return Err(Error::InvalidArgument("need at least one line".into()));
    }
    if !(cfg.lambda > 0.0 && cfg.lambda < 0.5) {
        return Err(Error::InvalidArgument("four-corner ratio needs 0 < lambda < 1/2".into()));
    }

    let ifs = Ifs::four_corner(cfg.lambda)?;
    let clouds: Vec<(u32, PointCloud<f64>)> = (3..=cfg.generations)
        .map(|k| Ok((k, embed_in_ball(&generate_depth(&ifs, k)?, cfg.embed_radius)?)))
        .collect::<Result<Vec<_>>>()?;

    // Dense rectifiable control: spacing at most a quarter of the finest
    // cell, so its covering stabilizes instead of starving.
    let finest = 4.0f64.powi(-(cfg.generations as i32));
    let control_points = ((4.0 / finest).ceil() as usize).max(10_000) + 1;
    let control = segment_with_points::<f64>(2, control_points)?;

    let reference = MPlane::<f64>::standard(2, 1)?;

    struct PlaneResult {
        rows: Vec<ExperimentRow>,
        decay: PlaneDecay,
    }

    let per_plane: Vec<PlaneResult> = (0..cfg.num_planes)
        .into_par_iter()
        .map(|i| -> Result<PlaneResult> {
            let seed = plane_seed(cfg.seed, i);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let line = sample_haar::<f64, _>(2, 1, &mut rng)?;
            let angle = principal_angles(&line, &reference)?[0];
            let mut rows = Vec::with_capacity(clouds.len());
            let mut est3 = f64::NAN;
            let mut est_last = f64::NAN;
            for (k, cloud) in &clouds {
                let delta = 4.0f64.powi(-(*k as i32));
                let projected = project_cloud(&line, cloud);
                let est = covering_measure(&projected, 1, delta)?;
                if *k == 3 {
                    est3 = est;
                }
                est_last = est;
                rows.push(ExperimentRow {
                    plane_id: i,
                    seed,
                    n: 2,
                    m: 1,
                    dim_est: f64::NAN,
                    r2: f64::NAN,
                    cover_delta: delta,
                    cover_est: est,
                    occ_est: f64::NAN,
                    pa: vec![angle],
                });
            }
            let four_corner_ratio = est_last / est3;
            // Control measured at the same two scales.
            let proj_control = project_cloud(&line, &control);
            let c3 = covering_measure(&proj_control, 1, 4.0f64.powi(-3))?;
            let ck = covering_measure(&proj_control, 1, finest)?;
            Ok(PlaneResult {
                rows,
                decay: PlaneDecay {
                    plane_id: i,
                    angle_deg: angle.to_degrees(),
                    four_corner_ratio,
                    segment_ratio: ck / c3,
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::with_capacity(per_plane.len() * clouds.len());
    let mut decays = Vec::with_capacity(per_plane.len());
    for p in per_plane {
        rows.extend(p.rows);
        decays.push(p.decay);
    }

    let ratios: Vec<f64> = decays.iter().map(|d| d.four_corner_ratio).collect();
    let seg_ratios: Vec<f64> = decays.iter().map(|d| d.segment_ratio).collect();
    let below_half = ratios.iter().filter(|r| **r < 0.5).count() as f64 / ratios.len() as f64;
    let min_seg = decays
        .iter()
        .filter(|d| d.angle_deg < 80.0)
        .map(|d| d.segment_ratio)
        .fold(f64::INFINITY, f64::min);
    let mut slowest = decays.clone();
    slowest.sort_by(|a, b| b.four_corner_ratio.partial_cmp(&a.four_corner_ratio).unwrap());
    slowest.truncate(5);

    Ok(BesfedOutput {
        rows,
        summary: BesfedSummary {
            generations: cfg.generations,
            planes: cfg.num_planes,
            median_four_corner_ratio: super::median(&ratios),
            fraction_below_half: below_half,
            median_segment_ratio: super::median(&seg_ratios),
            min_segment_ratio_below_80deg: if min_seg.is_finite() { Some(min_seg) } else { None },
            slowest,
            per_plane: decays,
            footer: SUMMARY_FOOTER.into(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::csv_bytes;

    #[test]
    fn small_run_shapes_and_determinism() {
        let cfg = BesfedConfig::new(4, 6, 99);
        let out = run_besfed(&cfg).unwrap();
        assert_eq!(out.rows.len(), 6 * 2); // k = 3, 4
        let out2 = run_besfed(&cfg).unwrap();
        assert_eq!(csv_bytes(1, &out.rows), csv_bytes(1, &out2.rows));
        // Four-corner ratios do decay below 1 for most lines even this early.
        assert!(out.summary.median_four_corner_ratio.unwrap() < 1.0);
        // Control holds its measure at these coarse scales.
        assert!(out.summary.median_segment_ratio.unwrap() > 0.8);
    }

    #[test]
    fn generation_bounds_enforced() {
        assert!(run_besfed(&BesfedConfig::new(2, 4, 1)).is_err());
        assert!(run_besfed(&BesfedConfig::new(9, 4, 1)).is_err());
    }
}
