//! Numerical laboratory for the weighted extension problem of fractional
//! semilinear equations `(-Δ)^s u = f(u)`.
//!
//! The solution is represented through its extension `v(x, λ)` on a
//! truncated cylinder, solving `div(λ^{1-2s} ∇v) = 0` with the nonlinear
//! Neumann condition `-d_s lim λ^{1-2s} ∂_λ v = f(v)` at `λ = 0`.
//!
//! Every numerical type is generic over [`Real`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`.

// Negated comparisons are used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Tabulated coefficients are kept exactly as published.
#![allow(clippy::excessive_precision)]

pub mod analysis;
pub mod error;
pub mod fracnorm;
pub mod grid;
pub mod kernel;
pub mod output;
pub mod scalar;
pub mod solver;

pub use error::{CsxError, Result};
pub use scalar::Real;

pub type FractionalOrder = kernel::FractionalOrder<f64>;
pub type Nonlinearity = kernel::Nonlinearity<f64>;
pub type NonlinearitySpec = kernel::NonlinearitySpec<f64>;
pub type PotentialMin = kernel::PotentialMin<f64>;
pub type TensorGrid = grid::TensorGrid<f64>;
pub type CellWeights = grid::CellWeights<f64>;
pub type Field = grid::Field<f64>;
pub type BoundarySpec = solver::BoundarySpec<f64>;
pub type EnergyBreakdown = analysis::EnergyBreakdown<f64>;
pub type PohozaevReport = analysis::PohozaevReport<f64>;
pub type GrowthFit = analysis::GrowthFit<f64>;
pub type CylinderBoundary = fracnorm::CylinderBoundary<f64>;
pub type BoundaryTrace = fracnorm::BoundaryTrace<f64>;
pub type PsiReport = fracnorm::PsiReport<f64>;
pub type ComparisonReport = fracnorm::ComparisonReport<f64>;

pub use solver::SolveReport;
