//! Property tests over the spec's invariants.

use proptest::prelude::*;

use hyproj_core::ball::{klein_distance, poincare_distance, psi, psi_inv, Point};
use hyproj_core::dimension::box_count;
use hyproj_core::fractals::{
    embed_in_ball, similarity_dimension, CloudMeta, Ifs, PointCloud, Similarity,
};
use hyproj_core::grassmann::{coords_in_plane, embed, euclid_project, MPlane};

/// Coordinates of a valid point strictly inside the ball of radius 0.95.
fn ball_point(dim: usize) -> impl Strategy<Value = Point<f64>> {
    prop::collection::vec(-1.0f64..1.0, dim).prop_map(move |mut v| {
        let norm: f64 = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 0.95 {
            let s = 0.95 / norm;
            for c in &mut v {
                *c *= s;
            }
        }
        Point::new(v).unwrap()
    })
}

proptest! {
    #[test]
    fn metric_symmetric_and_positive(x in ball_point(3), y in ball_point(3)) {
        let dxy = poincare_distance(&x, &y).unwrap();
        let dyx = poincare_distance(&y, &x).unwrap();
        prop_assert_eq!(dxy, dyx);
        prop_assert!(dxy >= 0.0);
        if x != y {
            prop_assert!(dxy > 0.0);
        }
    }

    #[test]
    fn metric_triangle(x in ball_point(3), y in ball_point(3), z in ball_point(3)) {
        let dxz = poincare_distance(&x, &z).unwrap();
        let dxy = poincare_distance(&x, &y).unwrap();
        let dyz = poincare_distance(&y, &z).unwrap();
        prop_assert!(dxz <= dxy + dyz + 1e-10);
    }

    #[test]
    fn conversion_roundtrips(x in ball_point(4)) {
        let there = psi_inv(&psi(&x));
        for (a, b) in there.coords().iter().zip(x.coords()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        let back = psi(&psi_inv(&x));
        for (a, b) in back.coords().iter().zip(x.coords()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn conversion_is_isometry(x in ball_point(3), y in ball_point(3)) {
        let lhs = klein_distance(&psi(&x), &psi(&y)).unwrap();
        let rhs = poincare_distance(&x, &y).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn plane_coordinates_roundtrip(u0 in -0.9f64..0.9, u1 in -0.9f64..0.9, angle in 0.0f64..std::f64::consts::PI) {
        // A rotated 2-plane of R^3.
        let (c, s) = (angle.cos(), angle.sin());
        let plane = MPlane::<f64>::from_basis(3, 2, vec![c, s, 0.0, 0.0, 0.0, 1.0]).unwrap();
        let q = embed(&plane, &[u0, u1]).unwrap();
        let norm_q: f64 = q.iter().map(|a| a * a).sum::<f64>().sqrt();
        let norm_u = (u0 * u0 + u1 * u1).sqrt();
        prop_assert!((norm_q - norm_u).abs() < 1e-12, "embed preserves norms");
        let back = coords_in_plane(&plane, &q).unwrap();
        prop_assert!((back[0] - u0).abs() < 1e-12 && (back[1] - u1).abs() < 1e-12);
        // Projection is idempotent and 1-Lipschitz at zero.
        let p = euclid_project(&plane, &q).unwrap();
        for (a, b) in p.iter().zip(&q) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn box_count_refinement_bounds(seed_pts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 5..120), j in 1i32..5) {
        let data: Vec<f64> = seed_pts.iter().flat_map(|(a, b)| [*a, *b]).collect();
        let cloud = PointCloud::from_rows(2, data, CloudMeta::default()).unwrap();
        let delta = 2.0f64.powi(-j);
        let coarse = box_count(&cloud, delta).unwrap();
        let fine = box_count(&cloud, delta / 2.0).unwrap();
        prop_assert!(coarse <= fine);
        prop_assert!(fine <= 4 * coarse);
        prop_assert!(fine <= cloud.len());
    }

    #[test]
    fn moran_root_solves_the_equation(ratios in prop::collection::vec(0.05f64..0.45, 2..6)) {
        let maps: Vec<Similarity<f64>> = ratios
            .iter()
            .map(|&r| Similarity::homothety(r, vec![0.0, 0.0]).unwrap())
            .collect();
        let ifs = Ifs::new(maps, false).unwrap();
        let s = similarity_dimension(&ifs);
        let residual: f64 = ratios.iter().map(|r| r.powf(s)).sum::<f64>() - 1.0;
        prop_assert!(residual.abs() < 1e-9, "Moran residual {residual} at s={s}");
    }

    #[test]
    fn embedding_preserves_distance_ratios(
        pts in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 4..40),
        radius in 0.1f64..0.9,
    ) {
        let data: Vec<f64> = pts.iter().flat_map(|(a, b)| [*a, *b]).collect();
        let cloud = PointCloud::from_rows(2, data, CloudMeta::default()).unwrap();
        let d01: f64 = dist(&cloud, 0, 1);
        let d23: f64 = dist(&cloud, 2, 3);
        prop_assume!(d01 > 1e-6 && d23 > 1e-6);
        let inside = embed_in_ball(&cloud, radius).unwrap();
        let e01 = dist(&inside, 0, 1);
        let e23 = dist(&inside, 2, 3);
        prop_assert!((d01 / d23 - e01 / e23).abs() < 1e-9 * (d01 / d23).max(1.0));
        // And the cloud actually fits.
        for p in inside.iter_points() {
            prop_assert!(p.iter().map(|c| c * c).sum::<f64>().sqrt() <= radius + 1e-12);
        }
    }
}

fn dist(c: &PointCloud<f64>, i: usize, j: usize) -> f64 {
    c.point(i)
        .iter()
        .zip(c.point(j))
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}
