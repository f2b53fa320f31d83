//! Finite-gap solutions of the sine-Gordon equation on real hyperelliptic curves.
//!
//! The pipeline is: a [`SpectralCurve`] gives normalized periods
//! ([`homology::PeriodData`]), which feed the Riemann theta function
//! ([`theta::ThetaContext`]) and the field `e^{iu}` ([`solution::SolutionParams`]).
//! The [`charge`] module computes topological charges, and [`deformation`]
//! follows curves under scaling of their branch points.

// Checks are written as `!(x > bound)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod charge;
pub mod curve;
pub mod deformation;
pub mod error;
pub mod geometry;
pub mod homology;
pub mod quadrature;
pub mod solution;
pub mod theta;
pub mod tracking;

pub use curve::{SheetPoint, SpectralCurve, ValidationReport};
pub use error::{Error, Result};
pub use homology::{compute_periods, period_data, PeriodData};
pub use num_complex::Complex64 as C64;
pub use quadrature::QuadratureOptions;
pub use solution::{SolutionParams, TorusPoint};
pub use theta::ThetaContext;
