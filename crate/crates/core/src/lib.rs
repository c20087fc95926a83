//! Sharp constants of the Hardy, Caffarelli-Kohn-Nirenberg, Rellich and
//! Sobolev inequalities, together with the numerical machinery used to
//! cross-check them: Young-parameter objectives and their minimizers,
//! radial test functions, singular-weight quadrature and a Monte Carlo
//! oracle for the radial reduction.
//!
//! The crate is organised bottom-up:
//!
//! * [`cases`] validated parameter records for each inequality variant,
//! * [`constants`] Gamma function and every closed-form constant,
//! * [`optimize`] Young-parameter objectives and their minimization,
//! * [`quadrature`] adaptive Gauss-Kronrod and a seeded Monte Carlo oracle,
//! * [`radial`] radial profiles and the one-dimensional reduction of both sides,
//! * [`fields`] the radial vector fields with divergence checks,
//! * [`verify`] reports, sweeps and pointwise checks,
//! * [`cli`] the command-line front end.

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cases;
pub mod cli;
pub mod constants;
pub mod error;
pub mod fields;
pub mod optimize;
pub mod quadrature;
pub mod radial;
pub mod verify;

pub use cases::{InequalityCase, InterpolationExponents, Variant};
pub use constants::SharpConstant;
pub use error::{Error, Result};
pub use optimize::{Objective, OptimizationResult};
pub use quadrature::{McSpec, QuadratureSpec};
pub use radial::RadialProfile;
pub use verify::{SweepSeries, VerificationReport};
