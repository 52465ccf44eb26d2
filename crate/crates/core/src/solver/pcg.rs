//! Preconditioned conjugate gradients on the free nodes.

use rayon::prelude::*;

use crate::scalar::{dot, norm2, Real};

#[derive(Debug, Clone)]
pub(crate) struct CgOutcome<T> {
    pub x: Vec<T>,
    pub iterations: usize,
    pub residual: T,
    pub converged: bool,
    pub negative_curvature: bool,
}

/// Solves `A x = b` from `x = 0` until `‖r‖ ≤ tol`. `apply` and `precond`
/// must leave fixed entries at zero; `b` must be zero there.
pub(crate) fn pcg<T, A, P>(apply: A, precond: P, b: &[T], tol: T, max_iter: usize) -> CgOutcome<T>
where
    T: Real,
    A: Fn(&[T], &mut [T]),
    P: Fn(&[T], &mut [T]),
{
    let n = b.len();
    let mut x = vec![T::zero(); n];
    let mut r = b.to_vec();
    let mut z = vec![T::zero(); n];
    let mut ap = vec![T::zero(); n];
    let mut rnorm = norm2(&r);
    if rnorm <= tol {
        return CgOutcome {
            x,
            iterations: 0,
            residual: rnorm,
            converged: true,
            negative_curvature: false,
        };
    }
    precond(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for it in 1..=max_iter {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= T::zero() {
            return CgOutcome {
                x,
                iterations: it,
                residual: rnorm,
                converged: false,
                negative_curvature: true,
            };
        }
        let alpha = rz / pap;
        x.par_iter_mut().zip(&p).for_each(|(xi, &pi)| *xi += alpha * pi);
        r.par_iter_mut().zip(&ap).for_each(|(ri, &api)| *ri -= alpha * api);
        rnorm = norm2(&r);
        if rnorm <= tol {
            return CgOutcome {
                x,
                iterations: it,
                residual: rnorm,
                converged: true,
                negative_curvature: false,
            };
        }
        precond(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        p.par_iter_mut().zip(&z).for_each(|(pi, &zi)| *pi = zi + beta * *pi);
    }
    CgOutcome {
        x,
        iterations: max_iter,
        residual: rnorm,
        converged: false,
        negative_curvature: false,
    }
}
