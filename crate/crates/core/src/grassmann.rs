//! m-dimensional linear subspaces of R^n: rotation-invariant sampling,
//! Euclidean projection, in-plane coordinates and principal-angle
//! diagnostics.

use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::{dot, norm, real, Scalar};

/// Maximum entry of `B^T B - I` tolerated by the orthonormality invariant.
pub const ORTHONORMALITY_TOL: f64 = 1e-12;

/// An m-plane of R^n through the origin, stored as an orthonormal basis
/// (columns, flat column-major). Invariants: `1 <= m < n`, columns
/// orthonormal to [`ORTHONORMALITY_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct MPlane<T: Scalar> {
    n: usize,
    m: usize,
    basis: Vec<T>, // column-major n x m
}

impl<T: Scalar> MPlane<T> {
    /// Builds a plane from basis columns, verifying orthonormality.
    pub fn from_basis(n: usize, m: usize, basis: Vec<T>) -> Result<Self> {
        check_shape(n, m)?;
        if basis.len() != n * m {
            return Err(Error::DimensionMismatch { expected: n * m, actual: basis.len() });
        }
        let plane = MPlane { n, m, basis };
        let dev = plane.orthonormality_deviation();
        if dev > real::<T>(ORTHONORMALITY_TOL) {
            return Err(Error::InvalidArgument(format!(
                "basis not orthonormal: max |B^T B - I| entry = {dev:?}"
            )));
        }
        Ok(plane)
    }

    /// The span of the first `m` coordinate axes.
    pub fn standard(n: usize, m: usize) -> Result<Self> {
        check_shape(n, m)?;
        let mut basis = vec![T::zero(); n * m];
        for j in 0..m {
            basis[j * n + j] = T::one();
        }
        Ok(MPlane { n, m, basis })
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn plane_dim(&self) -> usize {
        self.m
    }

    pub fn basis_column(&self, j: usize) -> &[T] {
        &self.basis[j * self.n..(j + 1) * self.n]
    }

    /// Flat column-major basis, length `n * m`.
    pub fn basis(&self) -> &[T] {
        &self.basis
    }

    /// Max entry of `B^T B - I`.
    pub fn orthonormality_deviation(&self) -> T {
        let mut dev = T::zero();
        for i in 0..self.m {
            for j in i..self.m {
                let d = dot(self.basis_column(i), self.basis_column(j));
                let target = if i == j { T::one() } else { T::zero() };
                dev = dev.max((d - target).abs());
            }
        }
        dev
    }
}

fn check_shape(n: usize, m: usize) -> Result<()> {
    if m == 0 || m >= n {
        return Err(Error::InvalidArgument(format!(
            "plane dimensions need 1 <= m < n, got n={n}, m={m}"
        )));
    }
    Ok(())
}

fn check_vector<T: Scalar>(plane: &MPlane<T>, x: &[T]) -> Result<()> {
    if x.len() != plane.n {
        return Err(Error::DimensionMismatch { expected: plane.n, actual: x.len() });
    }
    Ok(())
}

/// Orthonormalizes `m` columns of length `n` in place by modified
/// Gram-Schmidt with one re-orthogonalization pass. Returns false when a
/// column is (numerically) dependent on its predecessors.
fn gram_schmidt<T: Scalar>(n: usize, m: usize, cols: &mut [T]) -> bool {
    for j in 0..m {
        for _ in 0..2 {
            for i in 0..j {
                let mut proj = T::zero();
                for r in 0..n {
                    proj = proj + cols[i * n + r] * cols[j * n + r];
                }
                for r in 0..n {
                    cols[j * n + r] = cols[j * n + r] - proj * cols[i * n + r];
                }
            }
        }
        let nrm = norm(&cols[j * n..(j + 1) * n]);
        if nrm < real::<T>(1e-12) {
            return false;
        }
        for r in 0..n {
            cols[j * n + r] = cols[j * n + r] / nrm;
        }
    }
    true
}

/// Draws a plane distributed by the rotation-invariant probability measure
/// on m-planes: fill an n x m matrix with independent standard normals and
/// orthonormalize. Gram-Schmidt fixes the sign convention (the implied
/// triangular factor has positive diagonal), so a given generator state maps
/// to exactly one plane, bit for bit.
///
/// Gaussians are drawn as `f64` and then cast, so `f32` and `f64`
/// instantiations consume the generator identically.
pub fn sample_haar<T: Scalar, R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<MPlane<T>> {
    check_shape(n, m)?;
    let mut cols = vec![T::zero(); n * m];
    loop {
        for c in cols.iter_mut() {
            *c = real::<T>(rng.sample::<f64, _>(rand_distr::StandardNormal));
        }
        // Dependent draws have probability zero; redraw on numerical ties.
        if gram_schmidt(n, m, &mut cols) {
            break;
        }
    }
    Ok(MPlane { n, m, basis: cols })
}

/// Haar-distributed orthogonal matrix (row-major n x n), same construction
/// as [`sample_haar`] with m = n. Test and harness plumbing.
pub fn sample_orthogonal<T: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<T> {
    let mut cols = vec![T::zero(); n * n];
    loop {
        for c in cols.iter_mut() {
            *c = real::<T>(rng.sample::<f64, _>(rand_distr::StandardNormal));
        }
        if gram_schmidt(n, n, &mut cols) {
            break;
        }
    }
    // Transpose column-major Q into a row-major matrix.
    let mut rows = vec![T::zero(); n * n];
    for j in 0..n {
        for i in 0..n {
            rows[i * n + j] = cols[j * n + i];
        }
    }
    rows
}

/// Euclidean orthogonal projection `B B^T x` onto the plane.
pub fn euclid_project<T: Scalar>(plane: &MPlane<T>, x: &[T]) -> Result<Vec<T>> {
    check_vector(plane, x)?;
    let u = coords_unchecked(plane, x);
    Ok(embed_unchecked(plane, &u))
}

/// In-plane coordinates `B^T q` of a vector lying on the plane (within
/// `tol = 1e-9` of it).
pub fn coords_in_plane<T: Scalar>(plane: &MPlane<T>, q: &[T]) -> Result<Vec<T>> {
    check_vector(plane, q)?;
    let u = coords_unchecked(plane, q);
    let back = embed_unchecked(plane, &u);
    let mut off2 = T::zero();
    for (a, b) in back.iter().zip(q) {
        let d = *a - *b;
        off2 = off2 + d * d;
    }
    if off2.sqrt() > real::<T>(1e-9) {
        return Err(Error::InvalidArgument(format!(
            "vector is off the plane by {:?} (tolerance 1e-9)",
            off2.sqrt()
        )));
    }
    Ok(u)
}

/// Lift of in-plane coordinates back to R^n: `B u`. Norm-preserving.
pub fn embed<T: Scalar>(plane: &MPlane<T>, u: &[T]) -> Result<Vec<T>> {
    if u.len() != plane.m {
        return Err(Error::DimensionMismatch { expected: plane.m, actual: u.len() });
    }
    Ok(embed_unchecked(plane, u))
}

#[inline]
pub(crate) fn coords_unchecked<T: Scalar>(plane: &MPlane<T>, x: &[T]) -> Vec<T> {
    (0..plane.m).map(|j| dot(plane.basis_column(j), x)).collect()
}

#[inline]
pub(crate) fn embed_unchecked<T: Scalar>(plane: &MPlane<T>, u: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); plane.n];
    for (j, &uj) in u.iter().enumerate() {
        for (o, &b) in out.iter_mut().zip(plane.basis_column(j)) {
            *o = *o + uj * b;
        }
    }
    out
}

/// Principal angles between two planes of the same shape, nonincreasing,
/// each in `[0, pi/2]`: arccos of the singular values of `B_v^T B_w`.
pub fn principal_angles<T: Scalar>(v: &MPlane<T>, w: &MPlane<T>) -> Result<Vec<T>> {
    if v.n != w.n || v.m != w.m {
        return Err(Error::InvalidArgument(format!(
            "plane shape mismatch: ({}, {}) vs ({}, {})",
            v.n, v.m, w.n, w.m
        )));
    }
    let m = v.m;
    // S[i][j] = <v_i, w_j>, row-major m x m.
    let mut s = vec![T::zero(); m * m];
    for i in 0..m {
        for j in 0..m {
            s[i * m + j] = dot(v.basis_column(i), w.basis_column(j));
        }
    }
    let mut sigma = singular_values(m, &mut s);
    sigma.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(sigma
        .into_iter()
        .map(|x| x.min(T::one()).max(T::zero()).acos())
        .collect())
}

/// Singular values of a row-major m x m matrix by one-sided Jacobi
/// rotations; adequate for the small m used here.
fn singular_values<T: Scalar>(m: usize, a: &mut [T]) -> Vec<T> {
    let eps = real::<T>(1e-30);
    let tol = real::<T>(1e-14);
    for _ in 0..60 {
        let mut off = T::zero();
        for p in 0..m {
            for q in (p + 1)..m {
                // Columns p and q of a.
                let mut app = T::zero();
                let mut aqq = T::zero();
                let mut apq = T::zero();
                for r in 0..m {
                    let (x, y) = (a[r * m + p], a[r * m + q]);
                    app = app + x * x;
                    aqq = aqq + y * y;
                    apq = apq + x * y;
                }
                off = off.max(apq.abs() / (app * aqq + eps).sqrt().max(eps));
                if apq.abs() <= tol * (app * aqq).sqrt() {
                    continue;
                }
                let tau = (aqq - app) / ((T::one() + T::one()) * apq);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for r in 0..m {
                    let (x, y) = (a[r * m + p], a[r * m + q]);
                    a[r * m + p] = c * x - s * y;
                    a[r * m + q] = s * x + c * y;
                }
            }
        }
        if off < tol {
            break;
        }
    }
    (0..m)
        .map(|j| {
            let col: Vec<T> = (0..m).map(|r| a[r * m + j]).collect();
            norm(&col)
        })
        .collect()
}

/// Orthonormal basis of the orthogonal complement, column-major
/// n x (n - m). Completes the plane basis through Gram-Schmidt.
pub fn orthonormal_complement<T: Scalar>(plane: &MPlane<T>) -> Vec<T> {
    let (n, m) = (plane.n, plane.m);
    // Seed with coordinate axes and strike the dependent ones.
    let mut out: Vec<T> = Vec::with_capacity(n * (n - m));
    for axis in 0..n {
        if out.len() == n * (n - m) {
            break;
        }
        let mut v = vec![T::zero(); n];
        v[axis] = T::one();
        for _ in 0..2 {
            for i in 0..m {
                let b = plane.basis_column(i);
                let proj = dot(b, &v);
                for (c, &bb) in v.iter_mut().zip(b) {
                    *c = *c - proj * bb;
                }
            }
            for i in 0..out.len() / n {
                let b = out[i * n..(i + 1) * n].to_vec();
                let proj = dot(&b, &v);
                for (c, &bb) in v.iter_mut().zip(&b) {
                    *c = *c - proj * bb;
                }
            }
        }
        let nrm = norm(&v);
        if nrm > real::<T>(1e-8) {
            for c in &mut v {
                *c = *c / nrm;
            }
            out.extend_from_slice(&v);
        }
    }
    debug_assert_eq!(out.len(), n * (n - m));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn shape_validation() {
        assert!(MPlane::<f64>::standard(3, 0).is_err());
        assert!(MPlane::<f64>::standard(3, 3).is_err());
        assert!(MPlane::<f64>::standard(3, 1).is_ok());
        assert!(sample_haar::<f64, _>(2, 2, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }

    #[test]
    fn from_basis_rejects_skewed_columns() {
        let skew = vec![1.0, 0.0, 0.6, 0.8]; // second column not orthogonal to first
        assert!(MPlane::<f64>::from_basis(2, 1, skew[..2].to_vec()).is_ok());
        assert!(MPlane::<f64>::from_basis(2, 2, skew).is_err());
    }

    #[test]
    fn sampled_planes_orthonormal_and_deterministic() {
        for seed in 0..50u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let v = sample_haar::<f64, _>(4, 2, &mut rng).unwrap();
            assert!(v.orthonormality_deviation() <= 1e-12);
            let mut rng2 = ChaCha8Rng::seed_from_u64(seed);
            let w = sample_haar::<f64, _>(4, 2, &mut rng2).unwrap();
            assert_eq!(v.basis(), w.basis(), "same seed, same plane, bit for bit");
        }
    }

    #[test]
    fn projection_examples() {
        let v = MPlane::<f64>::standard(2, 1).unwrap();
        assert_eq!(euclid_project(&v, &[0.3, 0.4]).unwrap(), vec![0.3, 0.0]);
        // x already on the plane.
        assert_eq!(euclid_project(&v, &[0.7, 0.0]).unwrap(), vec![0.7, 0.0]);
        assert!(euclid_project(&v, &[0.1, 0.2, 0.3]).is_err());
    }

    #[test]
    fn projection_idempotent_contractive_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let v = sample_haar::<f64, _>(4, 2, &mut rng).unwrap();
            let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let px = euclid_project(&v, &x).unwrap();
            let ppx = euclid_project(&v, &px).unwrap();
            for (a, b) in px.iter().zip(&ppx) {
                assert!((a - b).abs() < 1e-14);
            }
            assert!(norm(&px) <= norm(&x) + 1e-14);
            // Residual orthogonal to every basis vector.
            let res: Vec<f64> = x.iter().zip(&px).map(|(a, b)| a - b).collect();
            for j in 0..2 {
                assert!(dot(&res, v.basis_column(j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn coords_embed_roundtrip_and_offplane_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let v = sample_haar::<f64, _>(3, 2, &mut rng).unwrap();
        for _ in 0..200 {
            let u: Vec<f64> = (0..2).map(|_| rng.gen_range(-0.9..0.9)).collect();
            let q = embed(&v, &u).unwrap();
            assert!((norm(&q) - norm(&u)).abs() < 1e-13, "embed preserves norms");
            let u2 = coords_in_plane(&v, &q).unwrap();
            for (a, b) in u.iter().zip(&u2) {
                assert!((a - b).abs() < 1e-12);
            }
        }
        assert_eq!(embed(&v, &[0.0, 0.0]).unwrap(), vec![0.0, 0.0, 0.0]);
        let mut off = embed(&v, &[0.3, 0.1]).unwrap();
        off[0] += 1e-6; // push it off the plane beyond tolerance
        assert!(coords_in_plane(&v, &off).is_err());
    }

    #[test]
    fn principal_angle_examples() {
        let v = MPlane::<f64>::standard(3, 2).unwrap();
        let angles = principal_angles(&v, &v).unwrap();
        assert!(angles.iter().all(|a| a.abs() < 1e-12));

        let e1 = MPlane::<f64>::from_basis(2, 1, vec![1.0, 0.0]).unwrap();
        let e2 = MPlane::<f64>::from_basis(2, 1, vec![0.0, 1.0]).unwrap();
        let a = principal_angles(&e1, &e2).unwrap();
        assert!((a[0] - std::f64::consts::FRAC_PI_2).abs() < 1e-14);

        let w = MPlane::<f64>::standard(3, 1).unwrap();
        assert!(principal_angles(&v, &w).is_err());
    }

    #[test]
    fn principal_angles_invariant_under_basis_change() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let v = sample_haar::<f64, _>(4, 2, &mut rng).unwrap();
            let w = sample_haar::<f64, _>(4, 2, &mut rng).unwrap();
            let base = principal_angles(&v, &w).unwrap();
            // Re-span v with mixed columns, re-orthonormalized.
            let c0 = v.basis_column(0).to_vec();
            let c1 = v.basis_column(1).to_vec();
            let mut cols: Vec<f64> = Vec::new();
            cols.extend(c0.iter().zip(&c1).map(|(a, b)| 0.6 * a + 0.8 * b));
            cols.extend(c0.iter().zip(&c1).map(|(a, b)| -0.8 * a + 0.6 * b));
            let v2 = MPlane::from_basis(4, 2, cols).unwrap();
            let again = principal_angles(&v2, &w).unwrap();
            for (x, y) in base.iter().zip(&again) {
                assert!((x - y).abs() < 1e-10, "angles moved under basis change");
            }
        }
    }

    #[test]
    fn angles_nonincreasing_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..100 {
            let v = sample_haar::<f64, _>(5, 3, &mut rng).unwrap();
            let w = sample_haar::<f64, _>(5, 3, &mut rng).unwrap();
            let a = principal_angles(&v, &w).unwrap();
            assert_eq!(a.len(), 3);
            for pair in a.windows(2) {
                assert!(pair[0] >= pair[1] - 1e-15);
            }
            for &x in &a {
                assert!((0.0..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(&x));
            }
        }
    }

    #[test]
    fn complement_completes_the_basis() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let v = sample_haar::<f64, _>(4, 2, &mut rng).unwrap();
        let comp = orthonormal_complement(&v);
        assert_eq!(comp.len(), 8);
        for i in 0..2 {
            let c = &comp[i * 4..(i + 1) * 4];
            assert!((norm(c) - 1.0).abs() < 1e-12);
            for j in 0..2 {
                assert!(dot(c, v.basis_column(j)).abs() < 1e-12);
            }
        }
        assert!(dot(&comp[0..4], &comp[4..8]).abs() < 1e-12);
    }

    #[test]
    fn sample_orthogonal_is_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let r = sample_orthogonal::<f64, _>(3, &mut rng);
        for i in 0..3 {
            for j in 0..3 {
                let mut d = 0.0;
                for k in 0..3 {
                    d += r[i * 3 + k] * r[j * 3 + k];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((d - target).abs() < 1e-12);
            }
        }
    }
}
