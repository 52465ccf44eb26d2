use serde::{Deserialize, Serialize};

use crate::analysis::{EnergyBreakdown, Region};
use crate::grid::{field_gradient, weight_integrals, Field};
use crate::kernel::Nonlinearity;
use crate::scalar::{det_sum, Real};

/// Full-cylinder energy `d_s/2 ∫ λ^a |∇v|² + ∫ (G(v(·,0)) - c_shift)`.
/// Trace values outside the range of `nl` are clipped (with a warning).
pub fn discrete_energy<T: Real>(field: &Field<T>, nl: &Nonlinearity<T>, c_shift: T) -> EnergyBreakdown<T> {
    let g = field.grid();
    let cw = weight_integrals(g, field.order().a()).expect("order has a valid weight");
    let dirichlet = T::lit(0.5) * field.order().ds() * field.dirichlet_integral(&cw);
    let trace = field.trace();
    let clipped = trace.iter().filter(|&&u| !nl.contains(u)).count();
    if clipped > 0 {
        log::warn!("{clipped} trace values outside the nonlinearity range were clipped");
    }
    let potential = det_sum(trace.len(), |b| {
        let (ix, iy, _) = g.node_ijk(b);
        g.base_mass(ix, iy) * (nl.g(nl.clip(trace[b])) - c_shift)
    });
    EnergyBreakdown::new(dirichlet, potential, Region::Cylinder(g.r()), field.order().s(), c_shift)
}

/// Empirical gradient constants over cell midpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct GradientBounds<T: Real> {
    /// `sup |∇_x v|`.
    pub grad_x: T,
    /// `sup λ |∇v|`.
    pub lambda_grad: T,
    /// `sup |λ^a ∂_λ v|`, from the harmonic flux `Δv / ∫ λ^{-a}` of each
    /// vertical edge, which is exact for `λ^{2s}`.
    pub flux: T,
}

impl<T: Real> GradientBounds<T> {
    pub fn as_tuple(&self) -> (T, T, T) {
        (self.grad_x, self.lambda_grad, self.flux)
    }
}

pub fn gradient_bounds<T: Real>(field: &Field<T>) -> GradientBounds<T> {
    let g = field.grid();
    let cw = weight_integrals(g, field.order().a()).expect("order has a valid weight");
    let grads = field_gradient(field);
    let n = g.n();
    let mut out = GradientBounds {
        grad_x: T::zero(),
        lambda_grad: T::zero(),
        flux: T::zero(),
    };
    let ln = g.lambda_nodes();
    for c in 0..g.num_cells() {
        let (ix, iy, j) = g.cell_ijk(c);
        let gr = grads.get(c);
        let gx2 = gr[..n].iter().fold(T::zero(), |a, &v| a + v * v);
        let mid = T::lit(0.5) * (ln[j] + ln[j + 1]);
        out.grad_x = out.grad_x.max(gx2.sqrt());
        out.lambda_grad = out.lambda_grad.max(mid * (gx2 + gr[n] * gr[n]).sqrt());
        let corners: &[(usize, usize)] = if n == 1 { &[(0, 0), (1, 0)] } else { &[(0, 0), (1, 0), (0, 1), (1, 1)] };
        let mut flux = T::zero();
        for &(dx, dy) in corners {
            flux += field.at(ix + dx, iy + dy, j + 1) - field.at(ix + dx, iy + dy, j);
        }
        flux /= T::from_usize_lossy(corners.len()) * cw.w_inv[j];
        out.flux = out.flux.max(flux.abs());
    }
    out
}

/// Strong-form residual `-d_s λ^a ∂_λ v - f(v)` at each bottom node, with the
/// flux taken from the first `λ`-cell; zero on lateral nodes.
pub fn neumann_defect<T: Real>(field: &Field<T>, nl: &Nonlinearity<T>) -> Vec<T> {
    let g = field.grid();
    let cw = weight_integrals(g, field.order().a()).expect("order has a valid weight");
    let ds = field.order().ds();
    let base = g.base_nodes();
    let v = field.values();
    (0..base)
        .map(|b| {
            if g.is_lateral(b) {
                return T::zero();
            }
            let flux = (v[b + base] - v[b]) / cw.w_inv[0];
            -ds * flux - nl.f(nl.clip(v[b]))
        })
        .collect()
}
