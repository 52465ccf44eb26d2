use std::sync::Arc;

use super::boundary::BoundarySpec;
use super::operator::{LinePreconditioner, Stiffness};
use super::pcg::pcg;
use super::SolveReport;
use crate::error::{domain, CsxError, Result};
use crate::grid::{weight_integrals, Field, TensorGrid};
use crate::kernel::FractionalOrder;
use crate::scalar::{norm2, Real};

#[derive(Debug, Clone, Copy)]
pub struct LinearOptions {
    /// Relative residual target.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for LinearOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 50_000,
        }
    }
}

/// Discrete weighted-harmonic extension of all-Dirichlet boundary data.
pub fn solve_linear_dirichlet<T: Real>(
    grid: Arc<TensorGrid<T>>,
    order: FractionalOrder<T>,
    bc: &BoundarySpec<T>,
) -> Result<(Field<T>, SolveReport)> {
    solve_linear_dirichlet_with(grid, order, bc, &LinearOptions::default())
}

pub fn solve_linear_dirichlet_with<T: Real>(
    grid: Arc<TensorGrid<T>>,
    order: FractionalOrder<T>,
    bc: &BoundarySpec<T>,
    opts: &LinearOptions,
) -> Result<(Field<T>, SolveReport)> {
    if bc.nonlinearity().is_some() {
        return domain("linear Dirichlet solve needs a Dirichlet bottom condition");
    }
    let cons = bc.constraints(&grid)?;
    let cw = weight_integrals(&grid, order.a())?;
    let k = Stiffness::assemble(&grid, &cw);
    let fixed = &cons.fixed;
    let mut v = cons.values.clone();
    let n = v.len();
    // Start free nodes at the mean of the data so constants are reproduced exactly.
    let nfixed = fixed.iter().filter(|&&f| f).count();
    if nfixed > 0 {
        let fixed_vals: Vec<T> = (0..n).filter(|&i| fixed[i]).map(|i| v[i]).collect();
        let mean = crate::scalar::det_sum(nfixed, |i| fixed_vals[i]) / T::from_usize_lossy(nfixed);
        for i in 0..n {
            if !fixed[i] {
                v[i] = mean;
            }
        }
    }

    let mut b = vec![T::zero(); n];
    k.apply(&v, &mut b);
    for i in 0..n {
        b[i] = if fixed[i] { T::zero() } else { -b[i] };
    }
    // Right-hand sides at roundoff level (constant data) count as zero.
    let scale: Vec<T> = (0..n).map(|i| k.diag(i) * v[i]).collect();
    let bnorm = norm2(&b).max(norm2(&scale) * T::epsilon().sqrt());
    let pre = LinePreconditioner::new(&k, T::one(), &[], fixed);
    let apply = |x: &[T], out: &mut [T]| {
        k.apply(x, out);
        for (o, &f) in out.iter_mut().zip(fixed) {
            if f {
                *o = T::zero();
            }
        }
    };
    let tol = T::lit(opts.tol) * bnorm;
    let out = pcg(apply, |r: &[T], z: &mut [T]| pre.apply(r, z), &b, tol, opts.max_iter);
    for i in 0..n {
        if !fixed[i] {
            v[i] += out.x[i];
        }
    }
    let rel = if bnorm > T::zero() { out.residual / bnorm } else { T::zero() };
    let energy = T::lit(0.5) * order.ds() * k.form(&v);
    let report = SolveReport {
        iterations: out.iterations,
        final_energy: energy.as_f64(),
        energy_history: vec![energy.as_f64()],
        residual_norm: rel.as_f64(),
        converged: out.converged,
        linear_iterations: out.iterations,
        ..Default::default()
    };
    if !out.converged {
        return Err(CsxError::SolverFailure {
            message: format!(
                "conjugate gradients stopped after {} iterations at relative residual {:e}",
                out.iterations,
                rel.as_f64()
            ),
            report: Some(Box::new(report)),
        });
    }
    Ok((Field::new(grid, order, v)?, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;
    use crate::solver::BottomCondition;

    #[test]
    fn affine_data_is_reproduced() {
        for &s in &[0.25, 0.5, 0.75] {
            let g = Arc::new(build_grid::<f64>(1, 2.0, 3.0, 16, 24, 2.0).unwrap());
            let o = FractionalOrder::<f64>::new(s).unwrap();
            // Affine in x alone is weighted-harmonic for every s.
            let bc = BoundarySpec::dirichlet_from_fn(&g, |x, _| 0.75 * x[0] + 1.0);
            let (f, rep) = solve_linear_dirichlet(g.clone(), o, &bc).unwrap();
            assert!(rep.converged);
            for i in 0..g.num_nodes() {
                let (x, _) = g.node_coords(i);
                assert!((f.values()[i] - (0.75 * x[0] + 1.0)).abs() < 1e-7, "s={s} i={i} {} vs {}", f.values()[i], 0.75 * x[0] + 1.0);
            }
        }
    }

    #[test]
    fn rejects_neumann_bottom() {
        let g = Arc::new(build_grid::<f64>(1, 1.0, 1.0, 4, 4, 1.0).unwrap());
        let nl = crate::kernel::make_nonlinearity(crate::kernel::NonlinearitySpec::AllenCahn).unwrap();
        let bc = BoundarySpec {
            lateral: vec![0.0; 10],
            top: super::super::TopCondition::Natural,
            bottom: BottomCondition::NonlinearNeumann(nl),
        };
        let o = FractionalOrder::<f64>::new(0.5).unwrap();
        assert!(solve_linear_dirichlet(g, o, &bc).is_err());
    }
}
