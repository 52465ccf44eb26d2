//! Fractional-order constants, nonlinearities and their potentials.

mod gamma;
mod nonlinearity;
mod order;
mod potential;
pub mod quadrature;

pub use gamma::gamma;
pub use nonlinearity::{make_nonlinearity, Nonlinearity, NonlinearitySpec, ScalarFn};
pub use order::{ds_constant, FractionalOrder};
pub use potential::{potential_min, PotentialMin};
