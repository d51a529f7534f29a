//! Orthogonal projections along geodesics in the Poincare ball, and a
//! desk-scale experiment harness for how they act on fractal sets:
//! dimension preservation, positive projected measure, nonempty interior,
//! and the covering-measure decay that separates purely unrectifiable sets
//! from rectifiable ones.
//!
//! The geometry modules are generic over the scalar ([`scalar::Scalar`],
//! `f32` or `f64`); the type aliases below fix the common instantiations.
//! The experiment harness runs in `f64`.

pub mod ball;
pub mod dimension;
pub mod error;
pub mod experiments;
pub mod fractals;
pub mod grassmann;
pub mod projection;
pub mod render;
pub mod scalar;

pub use error::{Error, Result};

pub type Point32 = ball::Point<f32>;
pub type Point64 = ball::Point<f64>;
pub type Geodesic32 = ball::Geodesic<f32>;
pub type Geodesic64 = ball::Geodesic<f64>;
pub type MPlane32 = grassmann::MPlane<f32>;
pub type MPlane64 = grassmann::MPlane<f64>;
pub type Similarity32 = fractals::Similarity<f32>;
pub type Similarity64 = fractals::Similarity<f64>;
pub type Ifs32 = fractals::Ifs<f32>;
pub type Ifs64 = fractals::Ifs<f64>;
pub type PointCloud32 = fractals::PointCloud<f32>;
pub type PointCloud64 = fractals::PointCloud<f64>;
