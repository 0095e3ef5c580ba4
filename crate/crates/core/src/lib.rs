//! Weak scattering from random media whose correlations carry parity-time symmetry.
//!
//! The numerical core is generic over the float type; the aliases below fix it to `f64`,
//! which is what the oracle and the command-line tool use.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod born;
pub mod error;
pub mod geometry;
pub mod media;
pub mod oracle;
pub mod presets;
pub mod quadrature;
pub mod scalar;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use scalar::Scalar;

pub type Vec3 = geometry::Vec3<f64>;
pub type UnitDir = geometry::UnitDir<f64>;
pub type ScatteringGeometry = geometry::ScatteringGeometry<f64>;
pub type PtSchellLinear = media::PtSchellLinear<f64>;
pub type ClassicQuadratic = media::ClassicQuadratic<f64>;
pub type BochnerModel = media::BochnerModel<f64>;
pub type MediumModel = media::MediumModel<f64>;
pub type CorrelationValue = media::CorrelationValue<f64>;
pub type IncidentPlaneWave = born::IncidentPlaneWave<f64>;
pub type FarZonePoint = born::FarZonePoint<f64>;
pub type SpectralMap = born::SpectralMap<f64>;
