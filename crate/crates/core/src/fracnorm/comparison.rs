use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::boundary::BoundaryTrace;
use crate::analysis::EnergyBreakdown;
use crate::error::{domain, Result};
use crate::grid::Field;
use crate::kernel::{potential_min, FractionalOrder, Nonlinearity, PotentialMin};
use crate::scalar::Real;
use crate::solver::{discrete_energy, solve_linear_dirichlet, BottomCondition, BoundarySpec, SolveReport};

/// `η_R(x)`: 1 for `|x|_∞ ≤ R - 1`, 0 for `|x|_∞ ≥ R`, and the quintic
/// `1 - (6t⁵ - 15t⁴ + 10t³)` in between (C² at both ends).
pub fn cutoff<T: Real>(x: [T; 2], n: usize, r: T) -> T {
    let norm = if n == 2 { x[0].abs().max(x[1].abs()) } else { x[0].abs() };
    let t = (norm - (r - T::one())).max(T::zero()).min(T::one());
    let smooth = t * t * t * (T::lit(10.0) + t * (T::lit(-15.0) + T::lit(6.0) * t));
    T::one() - smooth
}

/// Energies of a minimizer and of its comparison function on `C_R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ComparisonReport<T: Real> {
    pub r: T,
    pub s: T,
    pub tau: T,
    pub c_u: T,
    pub e_v: EnergyBreakdown<T>,
    pub e_wbar: EnergyBreakdown<T>,
    /// `R^{n-2s} ∫_{1/R}^1 ρ^{-2s} dρ`.
    pub bound: T,
    /// `E(v) ≤ E(w̄) + 1e-8 (1 + E(w̄))`.
    pub minimality_ok: bool,
    pub solve: SolveReport,
}

impl<T: Real> ComparisonReport<T> {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// `c_u` and `τ` over the range of the trace of `v`.
fn trace_minimum<T: Real>(v: &Field<T>, nl: &Nonlinearity<T>) -> PotentialMin<T> {
    let lo = nl.clip(v.trace().iter().copied().fold(T::infinity(), T::min));
    let hi = nl.clip(v.trace().iter().copied().fold(T::neg_infinity(), T::max));
    match nl.with_range(lo, hi) {
        Ok(sub) => potential_min(&sub),
        Err(_) => PotentialMin { c_u: nl.g(lo), tau: lo },
    }
}

/// Builds `w̄`: the weighted-harmonic function on `C_R` with bottom data
/// `g = τ η_R + (1 - η_R) v(·, 0)` and the lateral/top data of `v`, and
/// compares energies (both shifted by `c_u`).
pub fn comparison_function<T: Real>(
    v: &Field<T>,
    nl: &Nonlinearity<T>,
    r: T,
) -> Result<(Field<T>, ComparisonReport<T>)> {
    let grid = v.grid();
    if !(r > T::lit(2.0)) {
        return domain(format!("comparison needs R > 2, got {r}"));
    }
    if (grid.r() - r).abs() > T::lit(1e-12) * r || grid.height() < r * (T::one() - T::lit(1e-12)) {
        return domain(format!(
            "field lives on (-{}, {})^n × (0, {}), not on C_{r}",
            grid.r(),
            grid.r(),
            grid.height()
        ));
    }
    let order: FractionalOrder<T> = *v.order();
    let pm = trace_minimum(v, nl);
    let trace = v.trace();
    let g: Vec<T> = (0..grid.base_nodes())
        .map(|b| {
            let (x, _) = grid.node_coords(b);
            let eta = cutoff(x, grid.n(), r);
            pm.tau * eta + (T::one() - eta) * trace[b]
        })
        .collect();
    let bc = BoundarySpec::from_field(v, BottomCondition::Dirichlet(g));
    let (wbar, solve) = solve_linear_dirichlet(v.grid_arc().clone(), order, &bc)?;
    let e_v = discrete_energy(v, nl, pm.c_u);
    let e_wbar = discrete_energy(&wbar, nl, pm.c_u);
    let n = T::from_usize_lossy(grid.n());
    let bound = r.powf(n - order.s() * T::lit(2.0)) * order.rho_integral(T::one() / r);
    let minimality_ok = e_v.total <= e_wbar.total + T::lit(1e-8) * (T::one() + e_wbar.total);
    let report = ComparisonReport {
        r,
        s: order.s(),
        tau: pm.tau,
        c_u: pm.c_u,
        e_v,
        e_wbar,
        bound,
        minimality_ok,
        solve,
    };
    Ok((wbar, report))
}

/// The rescaled trace `z ↦ w̄(R z)` on `∂C_1`.
pub fn comparison_trace<T: Real>(wbar: Arc<Field<T>>, r: T) -> BoundaryTrace<T> {
    BoundaryTrace::from_field(wbar, r)
}
