//! Weighted fractional norms on the boundary of the unit cylinder, the
//! mollifier extension, and the comparison-function pipeline.

mod boundary;
mod comparison;
mod extension;
mod mollifier;
mod psi;

pub use boundary::{BoundaryTrace, CylinderBoundary, Face, IndexSets, Panel, PairSet};
pub use comparison::{comparison_function, comparison_trace, cutoff, ComparisonReport};
pub use extension::{extension_inequality_check, ExtensionCheck, ExtensionGrid};
pub use mollifier::{mollifier_extend, mollifier_gradient, mollifier_kernel, Padding, SampledFunction, SlabField};
pub use psi::{psi_s, PsiReport};
