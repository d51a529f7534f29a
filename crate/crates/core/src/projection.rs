//! Closest-point projection onto the hyperbolic m-plane `V ∩ D^n`.
//!
//! The production path conjugates the Euclidean projection by the radial
//! model conversion: straighten geodesics, project, pull back. It is exact
//! and fast. [`oracle_project`] reaches the same point by derivative-free
//! descent on the distance itself and exists purely to verify the
//! conjugation path (and to settle the conversion-orientation question
//! empirically); the two must agree or the build is wrong.

use crate::ball::{initial_direction, psi_inv_slice, psi_slice, Point};
use crate::error::{Error, Result};
use crate::grassmann::{coords_unchecked, embed_unchecked, MPlane};
use crate::scalar::{dot, norm, real, Scalar};

/// Closest point of `V ∩ D^n` in the hyperbolic metric. Idempotent; the
/// result lies on the plane exactly up to rounding (a radial rescaling of a
/// vector of `V` stays in `V`).
pub fn hyp_project<T: Scalar>(plane: &MPlane<T>, x: &Point<T>) -> Result<Point<T>> {
    check_dims(plane, x)?;
    let k = psi_slice(x.coords());
    let u = coords_unchecked(plane, &k);
    let p = embed_unchecked(plane, &u);
    Ok(Point::from_inside(psi_inv_slice(&p)))
}

/// In-plane coordinates `B^T q` of the projection foot, without
/// materializing the ambient point. Equals
/// `coords_in_plane(V, hyp_project(V, x))`; the bulk path sweeps use.
pub fn hyp_project_coords<T: Scalar>(plane: &MPlane<T>, x: &[T]) -> Vec<T> {
    let k = psi_slice(x);
    let u = coords_unchecked(plane, &k);
    // |B u| = |u|, so the radial pullback factor depends on u alone.
    let n2 = dot(&u, &u);
    let s = T::one() + (T::one() - n2).max(T::zero()).sqrt();
    u.into_iter().map(|c| c / s).collect()
}

/// Objective-evaluation cap for the descent oracle.
pub const ORACLE_EVAL_CAP: usize = 10_000;

/// Direct minimization of `u -> d(x, B u)` over the open unit m-ball by
/// cyclic golden-section line searches (restarted from the Euclidean
/// projection and from the origin). The distance to `V ∩ D^n` is
/// geodesically convex with round sublevel sets in plane coordinates, so
/// every line restriction is unimodal. Returns a point whose objective is
/// within `tol` of the minimum.
pub fn oracle_project<T: Scalar>(plane: &MPlane<T>, x: &Point<T>, tol: T) -> Result<Point<T>> {
    check_dims(plane, x)?;
    if !(tol > T::zero()) {
        return Err(Error::InvalidArgument("oracle tolerance must be positive".into()));
    }
    let m = plane.plane_dim();
    let mut evals = 0usize;
    let objective = |u: &[T], evals: &mut usize| -> T {
        *evals += 1;
        crate::ball::distance_slices(x.coords(), &embed_unchecked(plane, u))
    };

    // Restart set: clamped Euclidean coordinates of x, and the origin.
    let mut starts: Vec<Vec<T>> = Vec::new();
    let mut u0 = coords_unchecked(plane, x.coords());
    let n0 = norm(&u0);
    let cap = real::<T>(0.999);
    if n0 > cap {
        for c in &mut u0 {
            *c = *c * cap / n0;
        }
    }
    starts.push(u0);
    starts.push(vec![T::zero(); m]);

    let guard = real::<T>(1e-9);
    let width_floor = real::<T>(1e-9);
    let mut best_u: Option<Vec<T>> = None;
    let mut best_f = T::infinity();

    'starts: for mut u in starts {
        let mut f = objective(&u, &mut evals);
        loop {
            let f_before = f;
            for j in 0..m {
                // Coordinate bracket keeping |u| strictly inside the ball.
                let rest2 = dot(&u, &u) - u[j] * u[j];
                let room = (T::one() - guard - rest2).max(T::zero()).sqrt();
                if room.is_zero() {
                    continue;
                }
                let (uj, fj) = golden_section(
                    |v| {
                        let mut trial = u.clone();
                        trial[j] = v;
                        objective(&trial, &mut evals)
                    },
                    -room,
                    room,
                    width_floor,
                );
                if fj < f {
                    u[j] = uj;
                    f = fj;
                }
                if evals > ORACLE_EVAL_CAP {
                    // Keep the best point seen so far in the diagnostics.
                    if f < best_f {
                        best_f = f;
                        best_u = Some(u.clone());
                    }
                    break 'starts;
                }
            }
            if f_before - f <= tol * real::<T>(0.1) {
                break;
            }
        }
        if f < best_f {
            best_f = f;
            best_u = Some(u);
        }
    }

    match best_u {
        // The minimizer lives in plane coordinates; lift it back to the
        // ambient ball (|B u| = |u| < 1).
        Some(u) if evals <= ORACLE_EVAL_CAP => {
            Ok(Point::from_inside(embed_unchecked(plane, &u)))
        }
        _ => Err(Error::NoConvergence {
            evals,
            best: best_f.to_f64().unwrap_or(f64::NAN),
        }),
    }
}

/// Golden-section minimization of a unimodal function on `[a, b]`, shrinking
/// the bracket to `width`. Returns (argmin, min).
fn golden_section<T: Scalar>(mut f: impl FnMut(T) -> T, mut a: T, mut b: T, width: T) -> (T, T) {
    let inv_phi = real::<T>(0.618_033_988_749_894_9);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut steps = 0;
    while (b - a) > width {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
        steps += 1;
        if steps > 200 {
            break;
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Treat points this close to the plane (Euclidean residual) as on it.
pub const ON_PLANE_TOL: f64 = 1e-9;

/// Angle at the projection foot between the geodesic toward `x` and the
/// plane's tangent space (which, for `V ∩ D^n` in model coordinates, is `V`
/// itself). Conformality makes the Euclidean angle the hyperbolic one; the
/// connecting geodesic meets the plane at right angles, so the value is
/// `pi/2` up to rounding.
pub fn foot_angle<T: Scalar>(plane: &MPlane<T>, x: &Point<T>) -> Result<T> {
    check_dims(plane, x)?;
    let px = embed_unchecked(plane, &coords_unchecked(plane, x.coords()));
    let mut res2 = T::zero();
    for (a, b) in x.coords().iter().zip(&px) {
        let d = *a - *b;
        res2 = res2 + d * d;
    }
    if res2.sqrt() <= real::<T>(ON_PLANE_TOL) {
        return Err(Error::InvalidArgument(
            "foot_angle undefined on the plane (within 1e-9)".into(),
        ));
    }
    let q = hyp_project(plane, x)?;
    angle_to_plane(plane, &q, x)
}

/// Angle between the geodesic from `q` toward `x` and the plane; exposed so
/// perturbed feet can be probed off the optimum.
pub fn angle_to_plane<T: Scalar>(plane: &MPlane<T>, q: &Point<T>, x: &Point<T>) -> Result<T> {
    let dir = initial_direction(q, x)?;
    let in_plane = norm(&coords_unchecked(plane, &dir));
    Ok(in_plane.min(T::one()).acos())
}

fn check_dims<T: Scalar>(plane: &MPlane<T>, x: &Point<T>) -> Result<()> {
    if plane.ambient_dim() != x.dim() {
        return Err(Error::DimensionMismatch {
            expected: plane.ambient_dim(),
            actual: x.dim(),
        });
    }
    Ok(())
}
