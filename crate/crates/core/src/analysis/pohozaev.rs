use serde::{Deserialize, Serialize};

use super::energy::halfball_dirichlet_integral;
use crate::error::{domain, Result};
use crate::grid::{field_gradient, weight_integrals, CellGradients, Field};
use crate::kernel::quadrature::gauss_legendre;
use crate::kernel::Nonlinearity;
use crate::scalar::Real;

/// Terms of the Pohozaev balance on the half-ball of radius `R`:
/// `lhs_bulk + lhs_potential = rhs_grad + rhs_normal + rhs_potential`, where
/// `rhs_normal` already carries its minus sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct PohozaevReport<T: Real> {
    /// `(n - 2s)/2 ∫ λ^a |∇v|²` over the half-ball.
    pub lhs_bulk: T,
    /// `n/d_s ∫_{|x|<R} G(u)`.
    pub lhs_potential: T,
    /// `R/2 ∫ λ^a |∇v|²` over the spherical cap.
    pub rhs_grad: T,
    /// `-R ∫ λ^a (∂_ν v)²` over the spherical cap.
    pub rhs_normal: T,
    /// `R/d_s ∫_{|x|=R} G(u)`.
    pub rhs_potential: T,
    pub relative_residual: T,
}

impl<T: Real> PohozaevReport<T> {
    pub fn lhs(&self) -> T {
        self.lhs_bulk + self.lhs_potential
    }

    pub fn rhs(&self) -> T {
        self.rhs_grad + self.rhs_normal + self.rhs_potential
    }
}

/// Gradient at an arbitrary point: nodal gradients (averages of the adjacent
/// cell-midpoint gradients) interpolated multilinearly. Returns
/// `(∂_x, ∂_y, ∂_λ)` with `∂_y = 0` when `n = 1`.
pub fn nodal_gradient_at<T: Real>(field: &Field<T>, grads: &CellGradients<T>, x: [T; 2], lambda: T) -> [T; 3] {
    let g = field.grid();
    let n = g.n();
    let nodal = |ix: usize, iy: usize, j: usize| -> [T; 3] {
        let mut acc = [T::zero(); 3];
        let mut count = 0usize;
        let ys: &[usize] = if n == 2 { &[0, 1] } else { &[0] };
        for dj in 0..2 {
            for &dy in ys {
                for dx in 0..2 {
                    if ix + dx == 0 || ix + dx > g.nx() || j + dj == 0 || j + dj > g.nlambda() {
                        continue;
                    }
                    if n == 2 && (iy + dy == 0 || iy + dy > g.nx()) {
                        continue;
                    }
                    let c = g.cell(ix + dx - 1, if n == 2 { iy + dy - 1 } else { 0 }, j + dj - 1);
                    let gr = grads.get(c);
                    acc[0] += gr[0];
                    if n == 2 {
                        acc[1] += gr[1];
                    }
                    acc[2] += gr[n];
                    count += 1;
                }
            }
        }
        let inv = T::one() / T::from_usize_lossy(count);
        [acc[0] * inv, acc[1] * inv, acc[2] * inv]
    };
    let unit = |v: T, lo: T, hi: T| ((v - lo) / (hi - lo)).max(T::zero()).min(T::one());
    let ix = g.x_cell(x[0]);
    let tx = unit(x[0], g.x_nodes()[ix], g.x_nodes()[ix + 1]);
    let (iy, ty) = if n == 2 {
        let iy = g.x_cell(x[1]);
        (iy, unit(x[1], g.x_nodes()[iy], g.x_nodes()[iy + 1]))
    } else {
        (0, T::zero())
    };
    let j = g.lambda_cell(lambda);
    let tl = unit(lambda, g.lambda_nodes()[j], g.lambda_nodes()[j + 1]);
    let one = T::one();
    let mut out = [T::zero(); 3];
    let ys: Vec<(usize, T)> = if n == 2 { vec![(0, one - ty), (1, ty)] } else { vec![(0, one)] };
    for (dj, wl) in [(0, one - tl), (1, tl)] {
        for &(dy, wy) in &ys {
            for (dx, wx) in [(0, one - tx), (1, tx)] {
                let w = wl * wy * wx;
                if w == T::zero() {
                    continue;
                }
                let gr = nodal(ix + dx, iy + dy, j + dj);
                for k in 0..3 {
                    out[k] += w * gr[k];
                }
            }
        }
    }
    out
}

/// Points in `(0, π/2]` and weights for `∫_0^{π/2} sin^a(ψ) F(ψ) dψ`, from the
/// substitution `ψ = (π/2) w^{1/(1+a)}` and the midpoint rule in `w`.
fn elevation_rule<T: Real>(a: T, m: usize) -> Vec<(T, T)> {
    let half_pi = T::FRAC_PI_2();
    let e = T::one() + a;
    let mf = T::from_usize_lossy(m);
    (0..m)
        .map(|k| {
            let w = (T::from_usize_lossy(k) + T::lit(0.5)) / mf;
            let psi = half_pi * w.powf(T::one() / e);
            let jac = half_pi.powf(e) / e * (psi.sin() / psi).powf(a) / mf;
            (psi, jac)
        })
        .collect()
}

fn trace_at<T: Real>(field: &Field<T>, x: [T; 2]) -> T {
    field.interpolate(x, T::zero())
}

/// `∫_{|x|<R} G(u)` for the interpolated trace, exact for constant `u`.
fn base_integral<T: Real>(field: &Field<T>, nl: &Nonlinearity<T>, r: T) -> T {
    let g = field.grid();
    let (xs, ws) = gauss_legendre::<T>(4);
    let half = T::lit(0.5);
    let gu = |x: [T; 2]| nl.g(nl.clip(trace_at(field, x)));
    let segments = ((r + r) / g.hx()).ceil().to_usize().unwrap_or(1).max(1);
    if g.n() == 1 {
        // composite rule on [-R, R] aligned with the grid where possible
        let mut cuts: Vec<T> = g.x_nodes().iter().copied().filter(|&x| x > -r && x < r).collect();
        cuts.insert(0, -r);
        cuts.push(r);
        let mut acc = T::zero();
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (m, h) = (half * (a + b), half * (b - a));
            for (&xi, &wi) in xs.iter().zip(&ws) {
                acc += h * wi * gu([m + h * xi, T::zero()]);
            }
        }
        acc
    } else {
        let nr = segments;
        let nt = (4 * segments * 4).max(64);
        let mut acc = T::zero();
        let dr = r / T::from_usize_lossy(nr);
        let dt = T::TAU() / T::from_usize_lossy(nt);
        for sr in 0..nr {
            let a = dr * T::from_usize_lossy(sr);
            for (&xi, &wi) in xs.iter().zip(&ws) {
                let rho = a + half * dr * (xi + T::one());
                let mut ring = T::zero();
                for t in 0..nt {
                    let th = dt * T::from_usize_lossy(t);
                    ring += gu([rho * th.cos(), rho * th.sin()]);
                }
                acc += half * dr * wi * rho * ring * dt;
            }
        }
        acc
    }
}

/// Evaluates the Pohozaev balance of `field` on the half-ball of radius `R_sub`.
pub fn pohozaev_residual<T: Real>(field: &Field<T>, nl: &Nonlinearity<T>, r_sub: T) -> Result<PohozaevReport<T>> {
    let g = field.grid();
    let slack = T::one() + T::lit(1e-12);
    if !(r_sub > T::zero()) || r_sub > g.height() * slack || r_sub > g.r() * slack {
        return domain(format!(
            "Pohozaev radius {r_sub} must be positive and at most min(R, Λ) = {}",
            g.r().min(g.height())
        ));
    }
    let order = field.order();
    let (a, ds) = (order.a(), order.ds());
    let n = g.n();
    let nf = T::from_usize_lossy(n);
    let cw = weight_integrals(g, a)?;
    let grads = field_gradient(field);
    let r = r_sub;

    let lhs_bulk = (nf - order.s() * T::lit(2.0)) * T::lit(0.5) * halfball_dirichlet_integral(field, &cw, r);
    let lhs_potential = nf / ds * base_integral(field, nl, r);

    // ∫ λ^a |∇v|² dσ and ∫ λ^a (∂_ν v)² dσ over the cap
    let (mut grad_sq, mut normal_sq) = (T::zero(), T::zero());
    let ra = r.powf(a);
    if n == 1 {
        for (psi, w) in elevation_rule(a, 128) {
            let (c, s) = (psi.cos(), psi.sin());
            for side in [-T::one(), T::one()] {
                let (x, l) = (side * r * c, r * s);
                let gr = nodal_gradient_at(field, &grads, [x, T::zero()], l);
                let nu = gr[0] * side * c + gr[2] * s;
                let wt = w * ra * r;
                grad_sq += wt * (gr[0] * gr[0] + gr[2] * gr[2]);
                normal_sq += wt * nu * nu;
            }
        }
    } else {
        let nt = 64;
        let dt = T::TAU() / T::from_usize_lossy(nt);
        for (psi, w) in elevation_rule(a, 64) {
            let (c, s) = (psi.cos(), psi.sin());
            for t in 0..nt {
                let th = dt * (T::from_usize_lossy(t) + T::lit(0.5));
                let dir = [c * th.cos(), c * th.sin(), s];
                let gr = nodal_gradient_at(field, &grads, [r * dir[0], r * dir[1]], r * dir[2]);
                let nu = gr[0] * dir[0] + gr[1] * dir[1] + gr[2] * dir[2];
                let wt = w * ra * r * r * c * dt;
                grad_sq += wt * (gr[0] * gr[0] + gr[1] * gr[1] + gr[2] * gr[2]);
                normal_sq += wt * nu * nu;
            }
        }
    }
    let rhs_grad = r * T::lit(0.5) * grad_sq;
    let rhs_normal = -r * normal_sq;

    let sphere = if n == 1 {
        nl.g(nl.clip(trace_at(field, [r, T::zero()]))) + nl.g(nl.clip(trace_at(field, [-r, T::zero()])))
    } else {
        let nt = 256;
        let dt = T::TAU() / T::from_usize_lossy(nt);
        (0..nt)
            .map(|t| {
                let th = dt * T::from_usize_lossy(t);
                nl.g(nl.clip(trace_at(field, [r * th.cos(), r * th.sin()]))) * r * dt
            })
            .fold(T::zero(), |acc, v| acc + v)
    };
    let rhs_potential = r / ds * sphere;

    let mut rep = PohozaevReport {
        lhs_bulk,
        lhs_potential,
        rhs_grad,
        rhs_normal,
        rhs_potential,
        relative_residual: T::zero(),
    };
    let (l, rr) = (rep.lhs(), rep.rhs());
    rep.relative_residual = (l - rr).abs() / (l.abs() + rr.abs() + T::epsilon());
    Ok(rep)
}
