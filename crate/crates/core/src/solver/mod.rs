//! Linear and nonlinear solvers for the weighted extension problem.

mod boundary;
mod diagnostics;
mod layer;
mod linear;
mod newton;
pub mod operator;
mod pcg;

use serde::{Deserialize, Serialize};

pub use boundary::{lateral_nodes, BottomCondition, BoundarySpec, TopCondition};
pub use diagnostics::{discrete_energy, gradient_bounds, neumann_defect, GradientBounds};
pub use layer::{layer_initial_guess, sliding_energy_profile, solve_layer, LayerOptions};
pub use linear::{solve_linear_dirichlet, solve_linear_dirichlet_with, LinearOptions};
pub use newton::{minimize_energy, minimize_energy_with, NewtonOptions};

/// Outcome of a solve, serializable as JSON.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    /// Newton (or CG, for linear solves) iterations performed.
    pub iterations: usize,
    pub final_energy: f64,
    /// Energy after each accepted step, starting with the initial energy.
    pub energy_history: Vec<f64>,
    /// Final gradient norm (nonlinear) or relative residual (linear).
    pub residual_norm: f64,
    pub converged: bool,
    /// Total inner CG iterations.
    pub linear_iterations: usize,
    /// Steps that fell back to preconditioned gradient descent.
    pub fallback_steps: usize,
    /// Trace values found outside the nonlinearity's range and clipped.
    pub clipped_evaluations: usize,
}

impl SolveReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
