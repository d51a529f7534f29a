//! Harness-level behavior: schema, determinism across thread counts,
//! summaries, and the verify report surface.

use hyproj_core::experiments::besfed::{run_besfed, BesfedConfig};
use hyproj_core::experiments::interior::{run_interior, InteriorConfig};
use hyproj_core::experiments::marstrand::{run_marstrand, MarstrandConfig};
use hyproj_core::experiments::verify::{run_verify, VerifyConfig};
use hyproj_core::experiments::{csv_bytes, csv_header};
use hyproj_core::fractals::{similarity_dimension, Ifs};

fn in_pool<F: FnOnce() -> R + Send, R: Send>(threads: usize, f: F) -> R {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

#[test]
fn marstrand_bytes_identical_across_thread_counts() {
    let ifs = Ifs::cantor_dust(2, 1.0 / 3.0).unwrap();
    let cfg = MarstrandConfig::new(2, 1, ifs, 6, 12, 2024);
    let one = in_pool(1, || run_marstrand(&cfg)).unwrap();
    let eight = in_pool(8, || run_marstrand(&cfg)).unwrap();
    assert_eq!(csv_bytes(1, &one.rows), csv_bytes(1, &eight.rows));
}

#[test]
fn besfed_rows_cover_every_generation() {
    let cfg = BesfedConfig::new(5, 7, 31);
    let out = in_pool(4, || run_besfed(&cfg)).unwrap();
    assert_eq!(out.rows.len(), 7 * 3); // k = 3, 4, 5
    // Rows sorted by plane then generation; cover_delta descends per plane.
    for rows in out.rows.chunks(3) {
        assert!(rows.windows(2).all(|w| w[0].plane_id == w[1].plane_id));
        assert!(rows.windows(2).all(|w| w[0].cover_delta > w[1].cover_delta));
    }
    // Dimension columns stay NaN in this sweep.
    assert!(out.rows.iter().all(|r| r.dim_est.is_nan() && r.occ_est.is_nan()));
    assert_eq!(out.summary.per_plane.len(), 7);
}

#[test]
fn interior_rows_and_summary_shape() {
    let lambda = 0.4204482076268573; // similarity dimension 2.4
    let ifs = Ifs::cantor_dust(3, lambda).unwrap();
    let out = in_pool(4, || run_interior(&InteriorConfig::new(3, 1, ifs, 4, 5, 17))).unwrap();
    assert_eq!(out.rows.len(), 5 * 3);
    assert!(out.rows.iter().all(|r| (0.0..=1.0).contains(&r.occ_est)));
    assert_eq!(out.summary.median_occupancy.len(), 3);
}

#[test]
fn csv_schema_is_fixed() {
    assert_eq!(
        csv_header(1),
        "plane_id,seed,n,m,dim_est,r2,cover_delta,cover_est,occ_est,pa_1"
    );
    let ifs = Ifs::cantor_dust(2, 0.25).unwrap();
    let cfg = MarstrandConfig::new(2, 1, ifs, 4, 3, 5);
    let out = run_marstrand(&cfg).unwrap();
    let bytes = csv_bytes(1, &out.rows);
    let text = String::from_utf8(bytes).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), csv_header(1));
    assert_eq!(lines.count(), 3);
}

#[test]
fn summary_ground_truth_recomputed_from_ifs() {
    let ifs = Ifs::cantor_dust(3, 0.25).unwrap(); // s = 1.5
    let cfg = MarstrandConfig::new(3, 2, ifs.clone(), 4, 4, 9);
    let out = run_marstrand(&cfg).unwrap();
    assert_eq!(out.summary.ground_truth, similarity_dimension(&ifs).min(2.0));
    assert!((out.summary.similarity_dim - 1.5).abs() < 1e-12);
}

#[test]
fn verify_report_serializes_and_renders() {
    let report = run_verify(&VerifyConfig { quick: true, ..Default::default() });
    let json = serde_json::to_string(&report).unwrap();
    assert!(json.contains("\"suites\""));
    assert!(json.contains("metric_axioms"));
    let text = report.render_text();
    assert!(text.contains("collinearity"));
    assert!(text.contains("pass"));
    // All ten suites present.
    assert_eq!(report.suites.len(), 10);
}
