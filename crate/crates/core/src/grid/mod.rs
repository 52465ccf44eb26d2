//! Graded tensor-product meshes on truncated cylinders, exact integrals of
//! the weight `λ^a`, and nodal fields.

mod field;
mod io;
mod tensor;
mod weights;

pub use field::{field_gradient, CellGradients, Field};
pub use io::{read_field, write_field, DumpFormat};
pub use tensor::{build_grid, default_grading, TensorGrid};
pub use weights::{power_integral, weight_integrals, CellWeights};
