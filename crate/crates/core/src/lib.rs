//! Critical dissipative SQG on Dirichlet rectangles: exact spectral calculus,
//! a pseudospectral Galerkin solver, and numerical checks of the pointwise
//! inequalities behind its interior regularity theory.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cutoff;
pub mod dissipation;
pub mod domain;
pub mod error;
pub mod fields;
pub mod galerkin;
pub mod halfspace;
pub mod heat;
pub mod interior;
pub mod quadrature;
pub mod report;
pub mod spectral;

pub use cutoff::Cutoff;
pub use dissipation::DissipationField;
pub use domain::{Domain, GridField};
pub use error::{Error, Result};
pub use fields::GaussianBump;
pub use galerkin::{Solver, SolverConfig, SolverState, Trajectory};
pub use report::{BoundFitReport, BoundKind, Verdict};
pub use spectral::{Parity, SineBasis, SpectralField, Spectrum, VelocityField};
