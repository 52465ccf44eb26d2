use std::sync::Arc;

use super::boundary::BoundarySpec;
use super::newton::{minimize_energy_with, NewtonOptions};
use super::SolveReport;
use crate::analysis::{energy_window, EnergyBreakdown};
use crate::error::{domain, CsxError, Result};
use crate::grid::{build_grid, default_grading, Field, TensorGrid};
use crate::kernel::{FractionalOrder, Nonlinearity};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy)]
pub struct LayerOptions<T: Real> {
    /// Grading exponent; `None` uses `clamp(1/(2s), 1, 4)`.
    pub q: Option<T>,
    /// Free (natural) top face instead of Dirichlet data `sign(x)`.
    pub natural_top: bool,
    pub newton: NewtonOptions,
}

impl<T: Real> Default for LayerOptions<T> {
    fn default() -> Self {
        Self {
            q: None,
            natural_top: true,
            newton: NewtonOptions::default(),
        }
    }
}

/// Odd starting guess `tanh(x / (1 + λ))`.
pub fn layer_initial_guess<T: Real>(grid: Arc<TensorGrid<T>>, order: FractionalOrder<T>) -> Field<T> {
    Field::from_fn(grid, order, |x, l| (x[0] / (T::one() + l)).tanh())
}

/// One-dimensional layer on `(-R, R) × (0, Λ)`: lateral data `±1`, odd
/// initial guess, nonlinear Neumann bottom. The trace must come out
/// strictly increasing.
pub fn solve_layer<T: Real>(
    s: T,
    nl: &Nonlinearity<T>,
    r: T,
    height: T,
    nx: usize,
    nlambda: usize,
    opts: &LayerOptions<T>,
) -> Result<(Field<T>, SolveReport)> {
    let order = FractionalOrder::new(s)?;
    let (lo, hi) = nl.range();
    if lo > -T::one() || hi < T::one() {
        return domain(format!("layer needs a nonlinearity defined on [-1, 1], got [{lo}, {hi}]"));
    }
    let q = opts.q.unwrap_or_else(|| default_grading(s));
    let grid = Arc::new(build_grid(1, r, height, nx, nlambda, q)?);
    let sign = |x: [T; 2], _l: T| {
        if x[0] > T::zero() {
            T::one()
        } else if x[0] < T::zero() {
            -T::one()
        } else {
            T::zero()
        }
    };
    let bc = BoundarySpec::neumann_from_fn(&grid, nl.clone(), opts.natural_top, sign);
    let init = layer_initial_guess(grid, order);
    let (field, report) = minimize_energy_with(init, &bc, &opts.newton)?;
    check_monotone(&field, &report)?;
    Ok((field, report))
}

fn check_monotone<T: Real>(field: &Field<T>, report: &SolveReport) -> Result<()> {
    let tr = field.trace();
    if let Some(i) = tr.windows(2).position(|w| !(w[1] > w[0])) {
        let x = field.grid().x_nodes()[i];
        log::warn!("layer trace not increasing at x = {x} ({} steps)", report.iterations);
        return Err(CsxError::Monotonicity(format!(
            "trace fails to increase between x = {x} and the next node ({:e} -> {:e}); refine the grid",
            tr[i].as_f64(),
            tr[i + 1].as_f64()
        )));
    }
    Ok(())
}

/// Energies `E_{C_{R_w}}(v^t)` of the translates `v^t(x, λ) = v(x + t, λ)`,
/// read off by sliding a window of half-width and height `r_window` along
/// the first base axis of a wider solution. `c_shift = 0`.
pub fn sliding_energy_profile<T: Real>(
    layer: &Field<T>,
    nl: &Nonlinearity<T>,
    r_window: T,
    shifts: &[T],
) -> Result<Vec<EnergyBreakdown<T>>> {
    let g = layer.grid();
    if r_window > g.height() {
        return domain(format!("window height {r_window} exceeds cylinder height {}", g.height()));
    }
    shifts
        .iter()
        .map(|&t| {
            if t.abs() + r_window > g.r() * (T::one() + T::lit(1e-12)) {
                return domain(format!(
                    "shift {t} with window {r_window} leaves the solved cylinder of half-width {}",
                    g.r()
                ));
            }
            energy_window(layer, nl, t, r_window, r_window, T::zero())
        })
        .collect()
}
