use std::sync::Arc;

use super::tensor::TensorGrid;
use super::weights::CellWeights;
use crate::error::{domain, Result};
use crate::kernel::FractionalOrder;
use crate::scalar::{det_sum, Real};

/// Nodal values of an extension `v(x, λ)` on a tensor grid.
#[derive(Debug, Clone)]
pub struct Field<T: Real> {
    grid: Arc<TensorGrid<T>>,
    order: FractionalOrder<T>,
    values: Vec<T>,
}

impl<T: Real> Field<T> {
    pub fn new(grid: Arc<TensorGrid<T>>, order: FractionalOrder<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.num_nodes() {
            return domain(format!(
                "field has {} values, grid has {} nodes",
                values.len(),
                grid.num_nodes()
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return domain(format!("non-finite field value at node {i}"));
        }
        Ok(Self { grid, order, values })
    }

    /// Samples `f([x, y], λ)` at every node.
    pub fn from_fn<F>(grid: Arc<TensorGrid<T>>, order: FractionalOrder<T>, f: F) -> Self
    where
        F: Fn([T; 2], T) -> T,
    {
        let values = (0..grid.num_nodes())
            .map(|i| {
                let (x, l) = grid.node_coords(i);
                f(x, l)
            })
            .collect();
        Self { grid, order, values }
    }

    pub fn constant(grid: Arc<TensorGrid<T>>, order: FractionalOrder<T>, c: T) -> Self {
        let values = vec![c; grid.num_nodes()];
        Self { grid, order, values }
    }

    pub fn grid(&self) -> &TensorGrid<T> {
        &self.grid
    }

    pub fn grid_arc(&self) -> &Arc<TensorGrid<T>> {
        &self.grid
    }

    pub fn order(&self) -> &FractionalOrder<T> {
        &self.order
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    /// The `λ = 0` layer.
    pub fn trace(&self) -> &[T] {
        &self.values[..self.grid.base_nodes()]
    }

    #[inline]
    pub fn at(&self, ix: usize, iy: usize, j: usize) -> T {
        self.values[self.grid.node(ix, iy, j)]
    }

    /// Lumped `∫_cell λ^a |∇v|²`.
    ///
    /// `x`-differences are weighted by the shares of the weight attached to
    /// the lower and upper faces, `λ`-differences by the full weight split
    /// equally between the vertical edges. Exact for affine fields.
    pub fn cell_dirichlet(&self, cw: &CellWeights<T>, cell: usize) -> T {
        cell_dirichlet(&self.grid, cw, &self.values, cell)
    }

    /// Lumped `∫ λ^a |∇v|²` over the whole cylinder.
    pub fn dirichlet_integral(&self, cw: &CellWeights<T>) -> T {
        det_sum(self.grid.num_cells(), |c| self.cell_dirichlet(cw, c))
    }

    /// Multilinear interpolation at `([x, y], λ)`, clamped to the grid.
    pub fn interpolate(&self, x: [T; 2], lambda: T) -> T {
        let g = &*self.grid;
        let (ix, tx) = locate_x(g, x[0]);
        let j = g.lambda_cell(lambda);
        let tl = unit(lambda, g.lambda_nodes()[j], g.lambda_nodes()[j + 1]);
        let one = T::one();
        if g.n() == 1 {
            let v = |di: usize, dj: usize| self.at(ix + di, 0, j + dj);
            (one - tl) * ((one - tx) * v(0, 0) + tx * v(1, 0)) + tl * ((one - tx) * v(0, 1) + tx * v(1, 1))
        } else {
            let (iy, ty) = locate_x(g, x[1]);
            let mut acc = T::zero();
            for (dj, wl) in [(0, one - tl), (1, tl)] {
                for (dy, wy) in [(0, one - ty), (1, ty)] {
                    for (dx, wx) in [(0, one - tx), (1, tx)] {
                        acc += wl * wy * wx * self.at(ix + dx, iy + dy, j + dj);
                    }
                }
            }
            acc
        }
    }
}

fn unit<T: Real>(v: T, lo: T, hi: T) -> T {
    ((v - lo) / (hi - lo)).max(T::zero()).min(T::one())
}

fn locate_x<T: Real>(g: &TensorGrid<T>, x: T) -> (usize, T) {
    let i = g.x_cell(x);
    (i, unit(x, g.x_nodes()[i], g.x_nodes()[i + 1]))
}

pub(crate) fn cell_dirichlet<T: Real>(g: &TensorGrid<T>, cw: &CellWeights<T>, v: &[T], cell: usize) -> T {
    let (ix, iy, j) = g.cell_ijk(cell);
    let hx = g.hx();
    let hl = g.hlambda(j);
    let (w, lo, hi) = (cw.w[j], cw.w_lo[j], cw.w_hi[j]);
    let at = |dx: usize, dy: usize, dl: usize| v[g.node(ix + dx, iy + dy, j + dl)];
    let sq = |t: T| t * t;
    let half = T::lit(0.5);
    if g.n() == 1 {
        let xs = (lo * sq(at(1, 0, 0) - at(0, 0, 0)) + hi * sq(at(1, 0, 1) - at(0, 0, 1))) / hx;
        let ls = half * hx * w * (sq(at(0, 0, 1) - at(0, 0, 0)) + sq(at(1, 0, 1) - at(1, 0, 0))) / (hl * hl);
        xs + ls
    } else {
        let mut xs = T::zero();
        for d in 0..2 {
            xs += lo * (sq(at(1, d, 0) - at(0, d, 0)) + sq(at(d, 1, 0) - at(d, 0, 0)));
            xs += hi * (sq(at(1, d, 1) - at(0, d, 1)) + sq(at(d, 1, 1) - at(d, 0, 1)));
        }
        // (h_y / 2) / h_x with h_y = h_x
        xs *= half;
        let mut ls = T::zero();
        for dy in 0..2 {
            for dx in 0..2 {
                ls += sq(at(dx, dy, 1) - at(dx, dy, 0));
            }
        }
        xs + ls * T::lit(0.25) * hx * hx * w / (hl * hl)
    }
}

/// Cell-midpoint gradients `(∂_x, [∂_y,] ∂_λ)` of the multilinear interpolant.
#[derive(Debug, Clone, PartialEq)]
pub struct CellGradients<T: Real> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Real> CellGradients<T> {
    /// Components per cell: `n + 1`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, cell: usize) -> &[T] {
        &self.data[cell * self.dim..(cell + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks_exact(self.dim)
    }
}

pub fn field_gradient<T: Real>(field: &Field<T>) -> CellGradients<T> {
    let g = field.grid();
    let dim = g.n() + 1;
    let mut data = Vec::with_capacity(g.num_cells() * dim);
    let hx = g.hx();
    for c in 0..g.num_cells() {
        let (ix, iy, j) = g.cell_ijk(c);
        let hl = g.hlambda(j);
        let at = |dx: usize, dy: usize, dl: usize| field.at(ix + dx, iy + dy, j + dl);
        if g.n() == 1 {
            let half = T::lit(0.5);
            data.push(half * (at(1, 0, 0) + at(1, 0, 1) - at(0, 0, 0) - at(0, 0, 1)) / hx);
            data.push(half * (at(0, 0, 1) + at(1, 0, 1) - at(0, 0, 0) - at(1, 0, 0)) / hl);
        } else {
            let q = T::lit(0.25);
            let (mut gx, mut gy, mut gl) = (T::zero(), T::zero(), T::zero());
            for a in 0..2 {
                for b in 0..2 {
                    gx += at(1, a, b) - at(0, a, b);
                    gy += at(a, 1, b) - at(a, 0, b);
                    gl += at(a, b, 1) - at(a, b, 0);
                }
            }
            data.push(q * gx / hx);
            data.push(q * gy / hx);
            data.push(q * gl / hl);
        }
    }
    CellGradients { dim, data }
}
