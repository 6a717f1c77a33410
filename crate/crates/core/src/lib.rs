//! Coverage analysis of satellite downlinks with satellites modeled as a
//! Poisson point process on a sphere concentric with the Earth.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod geometry;
pub mod ingest;
pub mod montecarlo;
pub mod numerics;
pub mod optimizer;
pub mod randomfield;
pub mod scalar;
pub mod stats;

pub use error::{Error, Result};
pub use geometry::{cap_area, chord_height, limited_visibility, partial_cap_area, CapGeometry, NetworkConfig, EARTH_RADIUS_KM};
pub use scalar::Real;

pub type NetworkConfigF64 = NetworkConfig<f64>;
pub type NetworkConfigF32 = NetworkConfig<f32>;
pub type CapGeometryF64 = CapGeometry<f64>;
pub type CapGeometryF32 = CapGeometry<f32>;
pub type CoverageCurveF64 = analytic::CoverageCurve<f64>;
pub type CoverageCurveF32 = analytic::CoverageCurve<f32>;
