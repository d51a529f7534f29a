//! Scalar abstraction: the geometry is written once over a floating-point
//! scalar and instantiated at `f32` or `f64`.

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar for ball-model computations: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + core::fmt::Debug + core::fmt::Display + Send + Sync + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Converts an `f64` constant into the working scalar.
#[inline]
pub(crate) fn real<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("constant representable in scalar type")
}

/// Dot product of two equal-length slices.
#[inline]
pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Euclidean norm of a slice.
#[inline]
pub(crate) fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// Euclidean distance between two equal-length slices.
#[inline]
pub(crate) fn euclid_dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (&x, &y)| {
            let d = x - y;
            acc + d * d
        })
        .sqrt()
}
