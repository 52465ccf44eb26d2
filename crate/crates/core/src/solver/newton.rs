use rayon::prelude::*;

use super::boundary::BoundarySpec;
use super::operator::{LinePreconditioner, Stiffness};
use super::pcg::pcg;
use super::SolveReport;
use crate::error::{domain, CsxError, Result};
use crate::grid::{weight_integrals, Field, TensorGrid};
use crate::kernel::Nonlinearity;
use crate::scalar::{det_sum, dot, norm2, Real};

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    pub max_iter: usize,
    /// Stop when `‖∇E‖ ≤ gtol·(1 + |E|)`; floored at `64·ε` of the scalar type.
    pub gtol: f64,
    /// Sufficient-decrease constant of the Armijo test.
    pub armijo: f64,
    pub max_backtracks: usize,
    pub cg_max_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            gtol: 1e-8,
            armijo: 1e-4,
            max_backtracks: 40,
            cg_max_iter: 20_000,
        }
    }
}

/// The discrete energy `d_s/2 · vᵀKv + Σ_i m_i G(v_i)` on the free nodes.
struct Objective<'a, T: Real> {
    k: Stiffness<T>,
    ds: T,
    mass: Vec<T>,
    nl: &'a Nonlinearity<T>,
    fixed: &'a [bool],
}

impl<T: Real> Objective<'_, T> {
    fn g_at(&self, u: T) -> T {
        self.nl.g(self.nl.clip(u))
    }

    fn f_at(&self, u: T) -> T {
        if self.nl.contains(u) {
            self.nl.f(u)
        } else {
            T::zero()
        }
    }

    fn energy(&self, v: &[T]) -> T {
        let pot = det_sum(self.mass.len(), |i| self.mass[i] * self.g_at(v[i]));
        T::lit(0.5) * self.ds * self.k.form(v) + pot
    }

    /// Gradient (zero on fixed nodes) and `K v`.
    fn gradient(&self, v: &[T]) -> (Vec<T>, Vec<T>) {
        let mut kv = vec![T::zero(); v.len()];
        self.k.apply(v, &mut kv);
        let mut g: Vec<T> = kv.par_iter().map(|&x| self.ds * x).collect();
        for (i, gi) in g.iter_mut().enumerate().take(self.mass.len()) {
            *gi -= self.mass[i] * self.f_at(v[i]);
        }
        for (gi, &f) in g.iter_mut().zip(self.fixed) {
            if f {
                *gi = T::zero();
            }
        }
        (g, kv)
    }

    fn hess_diag(&self, v: &[T], convex: bool) -> Vec<T> {
        (0..self.mass.len())
            .map(|i| {
                let h = if self.nl.contains(v[i]) {
                    -self.mass[i] * self.nl.fprime(v[i])
                } else {
                    T::zero()
                };
                if convex {
                    h.max(T::zero())
                } else {
                    h
                }
            })
            .collect()
    }

    fn hess_apply(&self, hd: &[T], p: &[T], out: &mut [T]) {
        self.k.apply(p, out);
        out.par_iter_mut().enumerate().with_min_len(1024).for_each(|(i, o)| {
            *o = if self.fixed[i] {
                T::zero()
            } else if i < hd.len() {
                self.ds * *o + hd[i] * p[i]
            } else {
                self.ds * *o
            }
        });
    }

    /// `E(v + αd) - E(v)` without cancellation against the full energy.
    fn delta(&self, v: &[T], d: &[T], dkv: T, dkd: T, alpha: T) -> T {
        let quad = self.ds * (alpha * dkv + T::lit(0.5) * alpha * alpha * dkd);
        let pot = det_sum(self.mass.len(), |i| {
            self.mass[i] * (self.g_at(v[i] + alpha * d[i]) - self.g_at(v[i]))
        });
        quad + pot
    }

    fn clipped(&self, v: &[T]) -> usize {
        v[..self.mass.len()].iter().filter(|&&u| !self.nl.contains(u)).count()
    }
}

fn base_masses<T: Real>(g: &TensorGrid<T>) -> Vec<T> {
    (0..g.base_nodes())
        .map(|b| {
            let (ix, iy, _) = g.node_ijk(b);
            g.base_mass(ix, iy)
        })
        .collect()
}

/// Minimizes the discrete energy with lateral/top Dirichlet data and the
/// nonlinear Neumann condition at `λ = 0`, starting from `init`.
/// Dirichlet nodes of `init` are overwritten with the boundary data.
pub fn minimize_energy<T: Real>(init: Field<T>, bc: &BoundarySpec<T>) -> Result<(Field<T>, SolveReport)> {
    minimize_energy_with(init, bc, &NewtonOptions::default())
}

pub fn minimize_energy_with<T: Real>(
    init: Field<T>,
    bc: &BoundarySpec<T>,
    opts: &NewtonOptions,
) -> Result<(Field<T>, SolveReport)> {
    let nl = match bc.nonlinearity() {
        Some(nl) => nl,
        None => return domain("energy minimization needs a nonlinear Neumann bottom condition"),
    };
    let grid = init.grid_arc().clone();
    let order = *init.order();
    let cons = bc.constraints(&grid)?;
    let cw = weight_integrals(&grid, order.a())?;
    let obj = Objective {
        k: Stiffness::assemble(&grid, &cw),
        ds: order.ds(),
        mass: base_masses(&grid),
        nl,
        fixed: &cons.fixed,
    };
    let mut v = init.into_values();
    for ((vi, &fixed), &val) in v.iter_mut().zip(&cons.fixed).zip(&cons.values) {
        if fixed {
            *vi = val;
        }
    }

    let n = v.len();
    let mut energy = obj.energy(&v);
    let mut report = SolveReport {
        energy_history: vec![energy.as_f64()],
        ..Default::default()
    };
    let c1 = T::lit(opts.armijo);
    // the requested tolerance cannot go below what the scalar type resolves
    let gtol = T::lit(opts.gtol).max(T::lit(64.0) * T::epsilon());
    let mut kd = vec![T::zero(); n];
    let mut converged = false;
    let mut stalled = false;
    let mut gnorm;

    loop {
        let (g, kv) = obj.gradient(&v);
        gnorm = norm2(&g);
        if gnorm <= gtol * (T::one() + energy.abs()) {
            converged = true;
            break;
        }
        if report.iterations >= opts.max_iter {
            break;
        }
        report.iterations += 1;

        let neg_g: Vec<T> = g.iter().map(|&x| -x).collect();
        let eta = T::lit(0.1).min(gnorm.sqrt());
        let mut convex = false;
        let mut dir = loop {
            let hd = obj.hess_diag(&v, convex);
            let pre = LinePreconditioner::new(&obj.k, obj.ds, &hd, obj.fixed);
            let out = pcg(
                |p: &[T], o: &mut [T]| obj.hess_apply(&hd, p, o),
                |r: &[T], z: &mut [T]| pre.apply(r, z),
                &neg_g,
                eta * gnorm,
                opts.cg_max_iter,
            );
            report.linear_iterations += out.iterations;
            if out.negative_curvature && !convex {
                convex = true;
                continue;
            }
            break out.x;
        };

        let mut accepted = false;
        for attempt in 0..2 {
            if attempt == 1 {
                // preconditioned steepest descent
                report.fallback_steps += 1;
                let hd = obj.hess_diag(&v, true);
                let pre = LinePreconditioner::new(&obj.k, obj.ds, &hd, obj.fixed);
                pre.apply(&neg_g, &mut dir);
            }
            let slope = dot(&g, &dir);
            if !(slope < T::zero()) {
                continue;
            }
            obj.k.apply(&dir, &mut kd);
            let dkv = dot(&dir, &kv);
            let dkd = dot(&dir, &kd);
            let mut alpha = T::one();
            for _ in 0..opts.max_backtracks {
                let de = obj.delta(&v, &dir, dkv, dkd, alpha);
                if de <= c1 * alpha * slope {
                    v.par_iter_mut().zip(&dir).for_each(|(vi, &di)| *vi += alpha * di);
                    energy = obj.energy(&v);
                    accepted = true;
                    break;
                }
                alpha *= T::lit(0.5);
            }
            if accepted {
                break;
            }
        }
        if !accepted {
            stalled = true;
            break;
        }
        report.energy_history.push(energy.as_f64());
        log::debug!(
            "newton {}: E = {:e}, |g| = {:e}",
            report.iterations,
            energy.as_f64(),
            gnorm.as_f64()
        );
    }

    report.final_energy = energy.as_f64();
    report.residual_norm = gnorm.as_f64();
    report.converged = converged;
    report.clipped_evaluations = obj.clipped(&v);
    if report.clipped_evaluations > 0 {
        log::warn!(
            "{} trace values outside the nonlinearity range were clipped",
            report.clipped_evaluations
        );
    }
    if !converged {
        let message = if stalled {
            format!("line search stalled at gradient norm {:e}", gnorm.as_f64())
        } else {
            format!(
                "no convergence in {} iterations (gradient norm {:e})",
                opts.max_iter,
                gnorm.as_f64()
            )
        };
        return Err(CsxError::SolverFailure {
            message,
            report: Some(Box::new(report)),
        });
    }
    Ok((Field::new(grid, order, v)?, report))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::grid::build_grid;
    use crate::kernel::{make_nonlinearity, FractionalOrder, NonlinearitySpec};

    #[test]
    fn constant_critical_point_is_kept() {
        let g = Arc::new(build_grid::<f64>(1, 2.0, 2.0, 8, 8, 1.0).unwrap());
        let o = FractionalOrder::<f64>::new(0.4).unwrap();
        let nl = make_nonlinearity(NonlinearitySpec::AllenCahn).unwrap();
        let bc = BoundarySpec::neumann_from_fn(&g, nl, false, |_, _| 1.0);
        let init = Field::constant(g, o, 1.0);
        let (f, rep) = minimize_energy(init, &bc).unwrap();
        assert!(rep.converged);
        assert_eq!(rep.iterations, 0);
        assert!(f.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn energy_history_decreases() {
        let g = Arc::new(build_grid::<f64>(1, 6.0, 6.0, 24, 16, 2.0).unwrap());
        let o = FractionalOrder::<f64>::new(0.3).unwrap();
        let nl = make_nonlinearity(NonlinearitySpec::AllenCahn).unwrap();
        let bc = BoundarySpec::neumann_from_fn(&g, nl, true, |x, _| x[0].signum());
        let init = Field::from_fn(g, o, |x, _| 0.9 * (3.0 * x[0]).sin());
        let (_, rep) = minimize_energy(init, &bc).unwrap();
        assert!(rep.converged);
        for w in rep.energy_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0));
        }
    }
}
