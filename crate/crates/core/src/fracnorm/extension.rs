use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::boundary::{BoundaryTrace, CylinderBoundary};
use super::psi::{psi_s, PsiReport};
use crate::error::Result;
use crate::grid::{build_grid, default_grading, weight_integrals};
use crate::kernel::FractionalOrder;
use crate::scalar::Real;
use crate::solver::{solve_linear_dirichlet, BoundarySpec, SolveReport};

/// Volume mesh of `C_1` used for the weighted-harmonic extension.
#[derive(Debug, Clone, Copy)]
pub struct ExtensionGrid<T: Real> {
    pub nx: usize,
    pub nlambda: usize,
    /// `None` uses `clamp(1/(2s), 1, 4)`.
    pub q: Option<T>,
}

impl<T: Real> Default for ExtensionGrid<T> {
    fn default() -> Self {
        Self {
            nx: 64,
            nlambda: 64,
            q: None,
        }
    }
}

/// `lhs = ∫_{C_1} λ^{1-2s} |∇w̄|²` for the weighted-harmonic extension `w̄`
/// of `w`, against `rhs = Ψ_s(w)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ExtensionCheck<T: Real> {
    pub lhs: T,
    pub rhs: T,
    pub ratio: T,
    pub psi: PsiReport<T>,
    pub solve: SolveReport,
}

pub fn extension_inequality_check<T: Real>(
    boundary: &CylinderBoundary<T>,
    w: &BoundaryTrace<T>,
    s: T,
    mesh: &ExtensionGrid<T>,
) -> Result<ExtensionCheck<T>> {
    let order = FractionalOrder::new(s)?;
    let q = mesh.q.unwrap_or_else(|| default_grading(s));
    let grid = Arc::new(build_grid(boundary.n(), T::one(), T::one(), mesh.nx, mesh.nlambda, q)?);
    let bc = BoundarySpec::dirichlet_from_fn(&grid, |x, l| w.eval([x[0], x[1], l]));
    let (field, solve) = solve_linear_dirichlet(grid.clone(), order, &bc)?;
    let cw = weight_integrals(&grid, order.a())?;
    let lhs = field.dirichlet_integral(&cw);
    // ε only enters the reported bound, not the three terms
    let psi = psi_s(boundary, w, s, T::lit(0.25))?;
    let rhs = psi.total;
    Ok(ExtensionCheck {
        lhs,
        rhs,
        ratio: lhs / rhs,
        psi,
        solve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_trace_has_zero_ratio() {
        let b = CylinderBoundary::<f64>::new(1, 8).unwrap();
        let chk = extension_inequality_check(&b, &BoundaryTrace::constant(2.0), 0.3, &ExtensionGrid::default()).unwrap();
        assert!(chk.lhs.abs() < 1e-20);
        assert!((chk.rhs - 4.0 * 6.0).abs() < 1e-12);
        assert!(chk.ratio.abs() < 1e-20);
    }

    #[test]
    fn affine_trace_lhs_is_exact() {
        for &s in &[0.3, 0.7] {
            let b = CylinderBoundary::<f64>::new(1, 8).unwrap();
            let w = BoundaryTrace::from_fn(|z: [f64; 3]| z[0]);
            let chk = extension_inequality_check(&b, &w, s, &ExtensionGrid::default()).unwrap();
            let exact = 2.0 / (2.0 - 2.0 * s);
            assert!((chk.lhs - exact).abs() < 1e-9, "{} vs {exact}", chk.lhs);
            assert!(chk.ratio > 0.0);
        }
    }
}
