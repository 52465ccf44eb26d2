use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{domain, CsxError, Result};
use crate::grid::{power_integral, weight_integrals, CellWeights, Field, TensorGrid};
use crate::kernel::Nonlinearity;
use crate::scalar::{det_sum, Real};

/// Integration region of an energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", rename_all = "snake_case")]
pub enum Region<T: Real> {
    /// `(-R', R')^n × (0, R')`.
    Cylinder(T),
    /// `{|(x, λ)| < R', λ > 0}`.
    HalfBall(T),
}

/// Dirichlet and potential parts of `d_s/2 ∫ λ^a |∇v|² + ∫ (G(u) - c_shift)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct EnergyBreakdown<T: Real> {
    pub dirichlet: T,
    pub potential: T,
    pub total: T,
    pub region: Region<T>,
    pub s: T,
    pub c_shift: T,
}

impl<T: Real> EnergyBreakdown<T> {
    pub fn new(dirichlet: T, potential: T, region: Region<T>, s: T, c_shift: T) -> Self {
        Self {
            dirichlet,
            potential,
            total: dirichlet + potential,
            region,
            s,
            c_shift,
        }
    }
}

fn within<T: Real>(a: T, b: T) -> bool {
    a <= b * (T::one() + T::lit(1e-12))
}

fn clipped_g<T: Real>(nl: &Nonlinearity<T>, u: T) -> T {
    nl.g(nl.clip(u))
}

/// Energy over the node-snapped box `|x_1 - center| ≤ half_width`,
/// `|x_2| ≤ half_width`, `0 ≤ λ ≤ height`. The potential is the trapezoid
/// sum over the trace nodes of the box.
pub fn energy_window<T: Real>(
    field: &Field<T>,
    nl: &Nonlinearity<T>,
    center: T,
    half_width: T,
    height: T,
    c_shift: T,
) -> Result<EnergyBreakdown<T>> {
    let g = field.grid();
    let (i0, i1) = (g.nearest_x_node(center - half_width), g.nearest_x_node(center + half_width));
    let (k0, k1) = if g.n() == 2 {
        (g.nearest_x_node(-half_width), g.nearest_x_node(half_width))
    } else {
        (0, 1)
    };
    let jtop = g.nearest_lambda_node(height);
    if i1 <= i0 || k1 <= k0 || jtop == 0 {
        return domain(format!("window of half-width {half_width} covers no grid cells"));
    }
    let cw = weight_integrals(g, field.order().a())?;
    let ncx = i1 - i0;
    let ncy = k1 - k0;
    let d = det_sum(ncx * ncy * jtop, |t| {
        let ix = i0 + t % ncx;
        let iy = k0 + (t / ncx) % ncy;
        let j = t / (ncx * ncy);
        field.cell_dirichlet(&cw, g.cell(ix, iy, j))
    });
    let half = T::lit(0.5);
    let hx = g.hx();
    let dual = |i: usize, lo: usize, hi: usize| if i == lo || i == hi { half * hx } else { hx };
    let (ky0, ky1) = if g.n() == 2 { (k0, k1) } else { (0, 0) };
    let nyn = ky1 - ky0 + 1;
    let nxn = i1 - i0 + 1;
    let trace = field.trace();
    let pot = det_sum(nxn * nyn, |t| {
        let ix = i0 + t % nxn;
        let iy = ky0 + t / nxn;
        let mut m = dual(ix, i0, i1);
        if g.n() == 2 {
            m *= dual(iy, ky0, ky1);
        }
        m * (clipped_g(nl, trace[g.node(ix, iy, 0)]) - c_shift)
    });
    Ok(EnergyBreakdown::new(
        half * field.order().ds() * d,
        pot,
        Region::Cylinder(half_width),
        field.order().s(),
        c_shift,
    ))
}

/// Energy of the sub-cylinder `C_{R_sub}`, boundaries snapped to node planes.
pub fn energy_cylinder<T: Real>(
    field: &Field<T>,
    nl: &Nonlinearity<T>,
    r_sub: T,
    c_shift: T,
) -> Result<EnergyBreakdown<T>> {
    let g = field.grid();
    if !(r_sub > T::zero()) || !within(r_sub, g.r()) || !within(r_sub, g.height()) {
        return domain(format!(
            "sub-cylinder radius {r_sub} must be positive and fit in R = {}, Λ = {}",
            g.r(),
            g.height()
        ));
    }
    energy_window(field, nl, T::zero(), r_sub, r_sub, c_shift)
}

const SUB: usize = 8;

/// Fraction of the weighted measure `λ^a dx dλ` of a cell inside the half-ball.
fn halfball_fraction<T: Real>(g: &TensorGrid<T>, cw: &CellWeights<T>, cell: usize, r: T) -> T {
    let (ix, iy, j) = g.cell_ijk(cell);
    let xn = g.x_nodes();
    let ln = g.lambda_nodes();
    let (x0, x1) = (xn[ix], xn[ix + 1]);
    let (y0, y1) = if g.n() == 2 { (xn[iy], xn[iy + 1]) } else { (T::zero(), T::zero()) };
    let (l0, l1) = (ln[j], ln[j + 1]);
    let far = |a: T, b: T| a.abs().max(b.abs());
    let near = |a: T, b: T| {
        if a <= T::zero() && b >= T::zero() {
            T::zero()
        } else {
            a.abs().min(b.abs())
        }
    };
    let sq = |t: T| t * t;
    let rr = r * r;
    if sq(far(x0, x1)) + sq(far(y0, y1)) + sq(l1) <= rr {
        return T::one();
    }
    if sq(near(x0, x1)) + sq(near(y0, y1)) + sq(l0) >= rr {
        return T::zero();
    }
    // cut cell: sub-cell centre test, sub-cells weighted by their exact λ^a mass
    let k = T::from_usize_lossy(SUB);
    let a = cw.a();
    let ny = if g.n() == 2 { SUB } else { 1 };
    let mut inside = T::zero();
    let mut total = T::zero();
    for sl in 0..SUB {
        let la = l0 + (l1 - l0) * T::from_usize_lossy(sl) / k;
        let lb = l0 + (l1 - l0) * T::from_usize_lossy(sl + 1) / k;
        let wl = power_integral(a, la, lb);
        let lm = T::lit(0.5) * (la + lb);
        for sy in 0..ny {
            let ym = if g.n() == 2 {
                y0 + (y1 - y0) * (T::from_usize_lossy(sy) + T::lit(0.5)) / k
            } else {
                T::zero()
            };
            for sx in 0..SUB {
                let xm = x0 + (x1 - x0) * (T::from_usize_lossy(sx) + T::lit(0.5)) / k;
                total += wl;
                if xm * xm + ym * ym + lm * lm < rr {
                    inside += wl;
                }
            }
        }
    }
    if total > T::zero() {
        inside / total
    } else {
        T::zero()
    }
}

/// `∫_{half-ball} λ^a |∇v|²` with cut cells weighted by their inside fraction.
pub fn halfball_dirichlet_integral<T: Real>(field: &Field<T>, cw: &CellWeights<T>, r: T) -> T {
    let g = field.grid();
    det_sum(g.num_cells(), |c| {
        let f = halfball_fraction(g, cw, c, r);
        if f > T::zero() {
            f * field.cell_dirichlet(cw, c)
        } else {
            T::zero()
        }
    })
}

/// Measure of `[lo, hi] ∩ [-r, r]`.
fn overlap<T: Real>(lo: T, hi: T, r: T) -> T {
    (hi.min(r) - lo.max(-r)).max(T::zero())
}

/// Trapezoid potential over the base ball `|x| < r`: each node's dual cell is
/// clipped to the ball (exactly for `n = 1`, by sub-sampling for `n = 2`).
fn base_ball_potential<T: Real>(field: &Field<T>, nl: &Nonlinearity<T>, r: T, c_shift: T) -> T {
    let g = field.grid();
    let half = T::lit(0.5) * g.hx();
    let trace = field.trace();
    let dual = |i: usize| {
        let x = g.x_nodes()[i];
        let lo = if i == 0 { x } else { x - half };
        let hi = if i == g.nx() { x } else { x + half };
        (lo, hi)
    };
    det_sum(g.base_nodes(), |b| {
        let (ix, iy, _) = g.node_ijk(b);
        let (xl, xh) = dual(ix);
        let m = if g.n() == 1 {
            overlap(xl, xh, r)
        } else {
            let (yl, yh) = dual(iy);
            disc_area(xl, xh, yl, yh, r)
        };
        if m > T::zero() {
            m * (clipped_g(nl, trace[b]) - c_shift)
        } else {
            T::zero()
        }
    })
}

fn disc_area<T: Real>(x0: T, x1: T, y0: T, y1: T, r: T) -> T {
    let rr = r * r;
    let far = |a: T, b: T| a.abs().max(b.abs());
    let near = |a: T, b: T| {
        if a <= T::zero() && b >= T::zero() {
            T::zero()
        } else {
            a.abs().min(b.abs())
        }
    };
    let area = (x1 - x0) * (y1 - y0);
    let (fx, fy) = (far(x0, x1), far(y0, y1));
    if fx * fx + fy * fy <= rr {
        return area;
    }
    let (nx, ny) = (near(x0, x1), near(y0, y1));
    if nx * nx + ny * ny >= rr {
        return T::zero();
    }
    let k = 16;
    let kf = T::from_usize_lossy(k);
    let mut hits = 0usize;
    for a in 0..k {
        let y = y0 + (y1 - y0) * (T::from_usize_lossy(a) + T::lit(0.5)) / kf;
        for b in 0..k {
            let x = x0 + (x1 - x0) * (T::from_usize_lossy(b) + T::lit(0.5)) / kf;
            if x * x + y * y < rr {
                hits += 1;
            }
        }
    }
    area * T::from_usize_lossy(hits) / (kf * kf)
}

/// Energy of the half-ball of radius `R_sub`.
pub fn energy_halfball<T: Real>(
    field: &Field<T>,
    nl: &Nonlinearity<T>,
    r_sub: T,
    c_shift: T,
) -> Result<EnergyBreakdown<T>> {
    let g = field.grid();
    if !(r_sub > T::zero()) || !within(r_sub, g.r()) || !within(r_sub, g.height()) {
        return domain(format!(
            "half-ball radius {r_sub} must be positive and at most min(R, Λ) = {}",
            g.r().min(g.height())
        ));
    }
    let cw = weight_integrals(g, field.order().a())?;
    let d = halfball_dirichlet_integral(field, &cw, r_sub);
    let pot = base_ball_potential(field, nl, r_sub, c_shift);
    Ok(EnergyBreakdown::new(
        T::lit(0.5) * field.order().ds() * d,
        pot,
        Region::HalfBall(r_sub),
        field.order().s(),
        c_shift,
    ))
}

/// `φ(R) = E_{half-ball R}(v) / R^{n-2s}` with unshifted `G`, which must be
/// nonnegative on the trace values.
pub fn phi_profile<T: Real>(field: &Field<T>, nl: &Nonlinearity<T>, radii: &[T]) -> Result<Vec<(T, T)>> {
    let lo = field.trace().iter().copied().fold(T::infinity(), T::min);
    let hi = field.trace().iter().copied().fold(T::neg_infinity(), T::max);
    let (lo, hi) = (nl.clip(lo), nl.clip(hi));
    let probe = nl.with_range(lo, hi.max(lo + T::epsilon())).unwrap_or_else(|_| nl.clone());
    let gmin = crate::kernel::potential_min(&probe).c_u;
    if gmin < -T::lit(1e-14) {
        return Err(CsxError::Hypothesis(format!(
            "the monotonicity formula needs G ≥ 0 on the trace range, but min G = {gmin:e}"
        )));
    }
    let n = T::from_usize_lossy(field.grid().n());
    let expo = n - field.order().s() * T::lit(2.0);
    radii
        .iter()
        .map(|&r| {
            let e = energy_halfball(field, nl, r, T::zero())?;
            Ok((r, e.total / r.powf(expo)))
        })
        .collect()
}

/// `w_1(x, λ) = w(R x, R λ)` sampled on `target` by multilinear interpolation.
pub fn rescale_field<T: Real>(field: &Field<T>, r: T, target: Arc<TensorGrid<T>>) -> Result<Field<T>> {
    let g = field.grid();
    if !within(target.r() * r, g.r()) || !within(target.height() * r, g.height()) {
        return domain(format!(
            "rescaled grid (R = {}, Λ = {}) times {r} exceeds the source grid",
            target.r(),
            target.height()
        ));
    }
    Ok(Field::from_fn(target, *field.order(), |x, l| {
        field.interpolate([x[0] * r, x[1] * r], l * r)
    }))
}
