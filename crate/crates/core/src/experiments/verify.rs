//! The verify command: every library invariant rechecked at runtime against
//! independent oracles, with one residual per suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ball::{
    poincare_distance, psi_inv_with, psi_with, sample_geodesic_arc, sample_point_in_ball,
    Geodesic, Point, PsiConvention,
};
use crate::grassmann::{embed, orthonormal_complement, sample_haar};
use crate::projection::{angle_to_plane, hyp_project, oracle_project};
use crate::scalar::{dot, norm};

/// Configuration for a verify run.
#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Run at 10% of the full sample sizes.
    pub quick: bool,
    /// Conversion convention used by the conversion-sensitive suites.
    pub psi: PsiConvention,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: 7, quick: false, psi: PsiConvention::ChordModel }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub cases: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub quick: bool,
    pub printed_psi: bool,
    pub suites: Vec<SuiteResult>,
    pub all_passed: bool,
}

impl VerifyReport {
    pub fn failed_suites(&self) -> Vec<&str> {
        self.suites
            .iter()
            .filter(|s| !s.passed)
            .map(|s| s.name.as_str())
            .collect()
    }

    /// Plain-text table, one line per suite.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "verify: seed={} quick={} printed_psi={}\n",
            self.seed, self.quick, self.printed_psi
        ));
        for s in &self.suites {
            out.push_str(&format!(
                "  {:<24} {:>7} cases  max residual {:>12.3e}  tol {:>8.0e}  {}\n",
                s.name,
                s.cases,
                s.max_residual,
                s.tolerance,
                if s.passed { "pass" } else { "FAIL" }
            ));
        }
        out.push_str(if self.all_passed { "all suites passed\n" } else { "FAILURES present\n" });
        out
    }
}

fn scaled(full: usize, quick: bool) -> usize {
    if quick {
        (full / 10).max(10)
    } else {
        full
    }
}

/// Adaptive Simpson quadrature of the radial line element `2/(1 - t^2)`
/// from 0 to `r`: the independent route to `d(0, x)`.
pub fn radial_length_quadrature(r: f64, tol: f64) -> f64 {
    fn f(t: f64) -> f64 {
        2.0 / (1.0 - t * t)
    }
    fn simpson(a: f64, b: f64) -> f64 {
        let m = 0.5 * (a + b);
        (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b))
    }
    fn recurse(a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let left = simpson(a, m);
        let right = simpson(m, b);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            recurse(a, m, left, tol * 0.5, depth - 1) + recurse(m, b, right, tol * 0.5, depth - 1)
        }
    }
    recurse(0.0, r, simpson(0.0, r), tol, 40)
}

const PROJECTION_CASES: [(usize, usize); 4] = [(2, 1), (3, 1), (3, 2), (4, 2)];

/// Runs every suite and reports per-suite maxima.
pub fn run_verify(cfg: &VerifyConfig) -> VerifyReport {
    let suites = vec![
        metric_axioms(cfg),
        radial_line_element(cfg),
        psi_roundtrip(cfg),
        collinearity(cfg),
        geodesic_additivity(cfg),
        conjugation_vs_oracle(cfg),
        lipschitz(cfg),
        minimality(cfg),
        foot_angle_suite(cfg),
        equivariance(cfg),
    ];
    let all_passed = suites.iter().all(|s| s.passed);
    VerifyReport {
        seed: cfg.seed,
        quick: cfg.quick,
        printed_psi: cfg.psi == PsiConvention::Printed,
        suites,
        all_passed,
    }
}

fn finish(name: &str, cases: usize, max_residual: f64, tolerance: f64) -> SuiteResult {
    SuiteResult {
        name: name.into(),
        cases,
        max_residual,
        tolerance,
        passed: max_residual <= tolerance,
    }
}

fn metric_axioms(cfg: &VerifyConfig) -> SuiteResult {
    let cases = scaled(100_000, cfg.quick);
    let mut rng = ChaCha8Rng::seed_from_u64(plane_stream(cfg.seed, 1));
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let x = sample_point_in_ball::<f64, _>(3, 0.95, &mut rng);
        let y = sample_point_in_ball::<f64, _>(3, 0.95, &mut rng);
        let z = sample_point_in_ball::<f64, _>(3, 0.95, &mut rng);
        let dxy = poincare_distance(&x, &y).unwrap();
        let dyx = poincare_distance(&y, &x).unwrap();
        worst = worst.max((dxy - dyx).abs());
        worst = worst.max(poincare_distance(&x, &x).unwrap());
        if x != y && dxy <= 0.0 {
            worst = worst.max(1.0);
        }
        let dxz = poincare_distance(&x, &z).unwrap();
        let dyz = poincare_distance(&y, &z).unwrap();
        worst = worst.max(dxz - (dxy + dyz));
    }
    finish("metric_axioms", cases, worst, 1e-10)
}

fn radial_line_element(cfg: &VerifyConfig) -> SuiteResult {
    let cases = scaled(1_000, cfg.quick);
    let mut rng = ChaCha8Rng::seed_from_u64(plane_stream(cfg.seed, 2));
    let origin = Point::<f64>::origin(3);
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let x = sample_point_in_ball::<f64, _>(3, 0.99, &mut rng);
        let direct = poincare_distance(&origin, &x).unwrap();
        let quad = radial_length_quadrature(x.norm(), 1e-12);
        worst = worst.max((direct - quad).abs());
    }
    finish("radial_line_element", cases, worst, 1e-8)
}

fn psi_roundtrip(cfg: &VerifyConfig) -> SuiteResult {
    let cases = scaled(100_000, cfg.quick);
    let mut rng = ChaCha8Rng::seed_from_u64(plane_stream(cfg.seed, 3));
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let x = sample_point_in_ball::<f64, _>(3, 0.999, &mut rng);
        let rt = psi_inv_with(cfg.psi, &psi_with(cfg.psi, &x));
        for (a, b) in rt.coords().iter().zip(x.coords()) {
            worst = worst.max((a - b).abs());
        }
    }
    finish("psi_roundtrip", cases, worst, 1e-12)
}

/// Samples geodesics by the orthogonal-circle construction (independent of
/// the conversion) and checks the conversion straightens them.
fn collinearity(cfg: &VerifyConfig) -> SuiteResult {
    let cases = scaled(1_000, cfg.quick);
    let mut rng = ChaCha8Rng::seed_from_u64(plane_stream(cfg.seed, 4));
    let mut worst = 0.0f64;
    let mut done = 0usize;
    while done < cases {
        let a = sample_point_in_ball::<f64, _>(3, 0.9, &mut rng);
        let b = sample_point_in_ball::<f64, _>(3, 0.9, &mut rng);
        let Ok(samples) = sample_geodesic_arc(&a, &b, 20) else {
            continue; // near-diameter construction; resample
        };
        let ka = psi_with(cfg.psi, &samples[0]);
        let kb = psi_with(cfg.psi, &samples[19]);
        let dir: Vec<f64> = kb
            .coords()
            .iter()
            .zip(ka.coords())
            .map(|(v, u)| v - u)
            .collect();
        let len = norm(&dir);
        if len < 1e-9 {
            continue;
        }
        for s in &samples[1..19] {
            let img = psi_with(cfg.psi, s);
            let rel: Vec<f64> = img
                .coords()
                .iter()
                .zip(ka.coords())
                .map(|(v, u)| v - u)
                .collect();
            // Perpendicular component, kept in vector form: the squared-norm
            // route cancels catastrophically near zero residual.
            let along = dot(&rel, &dir) / (len * len);
            let perp: Vec<f64> = rel.iter().zip(&dir).map(|(&r, &d)| r - along * d).collect();
            worst = worst.max(norm(&perp));
        }
        done += 1;
    }
    finish("collinearity", cases, worst, 1e-9)
}

fn geodesic_additivity(cfg: &VerifyConfig) -> SuiteResult {
    let cases = scaled(1_000, cfg.quick);
    let mut rng = ChaCha8Rng::seed_from_u64(plane_stream(cfg.seed, 5));
    let mut worst = 0.0f64;
    let mut done = 0usize;
    while done < cases {
        let a = sample_point_in_ball::<f64, _>(3, 0.9, &mut rng);
        let b = sample_point_in_ball::<f64, _>(3, 0.9, &mut rng);
        if a == b {
            continue;
        }
        let g = Geodesic::new(a.clone(), b.clone()).unwrap();
        let t: f64 = rng.gen_range(0.0..1.0);
        let q = g.point_at(t).unwrap();
        let lhs = poincare_distance(&a, &q).unwrap() + poincare_distance(&q, &b).unwrap();
        worst = worst.max((lhs - g.length()).abs());
        done += 1;
    }
    finish("geodesic_additivity", cases, worst, 1e-8)
}

/// Conjugated Euclidean projection against the descent oracle. Runs the
/// conjugation with the configured conversion convention, so the printed
/// variant demonstrably breaks the identity.
fn conjugation_vs_oracle(cfg: &VerifyConfig) -> SuiteResult {
    let per_case = scaled(100, cfg.quick);
    let mut rng = ChaCha8Rng::seed_from_u64(plane_stream(cfg.seed, 6));
    let mut worst = 0.0f64;
    for (n, m) in PROJECTION_CASES {
        for _ in 0..per_case {
            let v = sample_haar::<f64, _>(n, m, &mut rng).unwrap();
            let x = sample_point_in_ball::<f64, _>(n, 0.9, &mut rng);
            let k = psi_with(cfg.psi, &x);
            let proj = crate::grassmann::euclid_project(&v, k.coords()).unwrap();
            let fast = psi_inv_with(cfg.psi, &Point::new(proj).unwrap());
            let slow = oracle_project(&v, &x, 1e-10).unwrap();
            worst = worst.max(poincare_distance(&fast, &slow).unwrap());
        }
    }
    finish("conjugation_vs_oracle", per_case * PROJECTION_CASES.len(), worst, 1e-6)
}

fn lipschitz(cfg: &VerifyConfig) -> SuiteResult {
    let per_case = scaled(100_000, cfg.quick) / PROJECTION_CASES.len();
    let mut rng = ChaCha8Rng::seed_from_u64(plane_stream(cfg.seed, 7));
    let mut worst = 0.0f64;
    for (n, m) in PROJECTION_CASES {
        for _ in 0..per_case {
            let v = sample_haar::<f64, _>(n, m, &mut rng).unwrap();
            let x = sample_point_in_ball::<f64, _>(n, 0.95, &mut rng);
            let y = sample_point_in_ball::<f64, _>(n, 0.95, &mut rng);
            let px = hyp_project(&v, &x).unwrap();
            let py = hyp_project(&v, &y).unwrap();
            let gap = poincare_distance(&px, &py).unwrap() - poincare_distance(&x, &y).unwrap();
            worst = worst.max(gap);
        }
    }
    finish("lipschitz", per_case * PROJECTION_CASES.len(), worst, 1e-12)
}

fn minimality(cfg: &VerifyConfig) -> SuiteResult {
    let configs = scaled(1_000, cfg.quick);
    let probes = scaled(10_000, cfg.quick);
    let mut rng = ChaCha8Rng::seed_from_u64(plane_stream(cfg.seed, 8));
    let mut worst = 0.0f64;
    for i in 0..configs {
        let (n, m) = PROJECTION_CASES[i % PROJECTION_CASES.len()];
        let v = sample_haar::<f64, _>(n, m, &mut rng).unwrap();
        let x = sample_point_in_ball::<f64, _>(n, 0.9, &mut rng);
        let d_foot = poincare_distance(&x, &hyp_project(&v, &x).unwrap()).unwrap();
        for _ in 0..probes {
            // Random in-plane competitor.
            let mut u: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let nu = norm(&u);
            let r: f64 = rng.gen_range(0.0..0.95f64).powf(1.0 / m as f64);
            for c in &mut u {
                *c *= r / nu.max(1e-12);
            }
            let probe = Point::new(embed(&v, &u).unwrap()).unwrap();
            worst = worst.max(d_foot - poincare_distance(&x, &probe).unwrap());
        }
    }
    finish("minimality", configs * probes, worst, 1e-8)
}

fn foot_angle_suite(cfg: &VerifyConfig) -> SuiteResult {
    let cases = scaled(1_000, cfg.quick);
    let mut rng = ChaCha8Rng::seed_from_u64(plane_stream(cfg.seed, 9));
    let mut worst = 0.0f64;
    let mut done = 0usize;
    while done < cases {
        let (n, m) = PROJECTION_CASES[done % PROJECTION_CASES.len()];
        let v = sample_haar::<f64, _>(n, m, &mut rng).unwrap();
        let x = sample_point_in_ball::<f64, _>(n, 0.85, &mut rng);
        let px = crate::grassmann::euclid_project(&v, x.coords()).unwrap();
        let mut res2 = 0.0;
        for (a, b) in x.coords().iter().zip(&px) {
            res2 += (a - b) * (a - b);
        }
        if res2.sqrt() < 1e-3 {
            continue; // too close to the plane for a stable direction
        }
        let q = hyp_project(&v, &x).unwrap();
        let ang = angle_to_plane(&v, &q, &x).unwrap();
        worst = worst.max((ang - std::f64::consts::FRAC_PI_2).abs());
        done += 1;
    }
    finish("foot_angle", cases, worst, 1e-6)
}

fn equivariance(cfg: &VerifyConfig) -> SuiteResult {
    let cases = scaled(1_000, cfg.quick);
    let mut rng = ChaCha8Rng::seed_from_u64(plane_stream(cfg.seed, 10));
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let v = sample_haar::<f64, _>(3, 1, &mut rng).unwrap();
        let comp = orthonormal_complement(&v);
        let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let (c, s) = (theta.cos(), theta.sin());
        let b = v.basis_column(0);
        let (u1, u2) = (&comp[0..3], &comp[3..6]);
        let rotate = |x: &[f64]| -> Vec<f64> {
            let a0 = dot(b, x);
            let a1 = dot(u1, x);
            let a2 = dot(u2, x);
            let (r1, r2) = (c * a1 - s * a2, s * a1 + c * a2);
            (0..3).map(|i| a0 * b[i] + r1 * u1[i] + r2 * u2[i]).collect()
        };
        let x = sample_point_in_ball::<f64, _>(3, 0.9, &mut rng);
        let rx = Point::new(rotate(x.coords())).unwrap();
        let lhs = hyp_project(&v, &rx).unwrap();
        let rhs = rotate(hyp_project(&v, &x).unwrap().coords());
        for (a, b) in lhs.coords().iter().zip(&rhs) {
            worst = worst.max((a - b).abs());
        }
    }
    finish("equivariance", cases, worst, 1e-10)
}

// Distinct deterministic streams per suite.
fn plane_stream(seed: u64, suite: u64) -> u64 {
    super::plane_seed(seed, suite.wrapping_mul(0x5151_5151))
}
