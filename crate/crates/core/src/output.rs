//! Plain-text emitters with full 17-significant-digit numbers.

use crate::analysis::{EnergyBreakdown, PohozaevReport};
use crate::fracnorm::PsiReport;
use crate::scalar::Real;

/// `x` with 17 significant digits, round-trip exact for `f64`.
pub fn fmt17<T: Real>(x: T) -> String {
    format!("{:.16e}", x.as_f64())
}

fn row(cols: &[String]) -> String {
    let mut s = cols.join(",");
    s.push('\n');
    s
}

/// `radius,dirichlet,potential,total`.
pub fn energy_csv<T: Real>(rows: &[(T, EnergyBreakdown<T>)]) -> String {
    let mut out = String::from("radius,dirichlet,potential,total\n");
    for (r, e) in rows {
        out += &row(&[fmt17(*r), fmt17(e.dirichlet), fmt17(e.potential), fmt17(e.total)]);
    }
    out
}

/// `R,phi`.
pub fn phi_csv<T: Real>(rows: &[(T, T)]) -> String {
    let mut out = String::from("R,phi\n");
    for (r, p) in rows {
        out += &row(&[fmt17(*r), fmt17(*p)]);
    }
    out
}

/// `R,lhs,rhs,residual`.
pub fn pohozaev_csv<T: Real>(rows: &[(T, PohozaevReport<T>)]) -> String {
    let mut out = String::from("R,lhs,rhs,residual\n");
    for (r, p) in rows {
        out += &row(&[fmt17(*r), fmt17(p.lhs()), fmt17(p.rhs()), fmt17(p.relative_residual)]);
    }
    out
}

/// `epsilon,l2,frac,weig,total,bound,ratio`.
pub fn psi_csv<T: Real>(rows: &[PsiReport<T>]) -> String {
    let mut out = String::from("epsilon,l2,frac,weig,total,bound,ratio\n");
    for p in rows {
        out += &row(&[
            fmt17(p.epsilon),
            fmt17(p.l2_term),
            fmt17(p.frac_term),
            fmt17(p.weig_term),
            fmt17(p.total),
            fmt17(p.bound_integral),
            fmt17(p.ratio),
        ]);
    }
    out
}

/// `x,u` for a one-dimensional trace.
pub fn trace_csv<T: Real>(x: &[T], u: &[T]) -> String {
    let mut out = String::from("x,u\n");
    for (a, b) in x.iter().zip(u) {
        out += &row(&[fmt17(*a), fmt17(*b)]);
    }
    out
}
