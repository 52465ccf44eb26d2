//! The lumped weighted stiffness operator and its line preconditioner.

use rayon::prelude::*;

use crate::grid::{CellWeights, TensorGrid};
use crate::scalar::Real;

/// Edge conductances of the lumped form `D(v) = Σ_e c_e (Δ_e v)²`, stored at
/// the lower endpoint of each edge. `D` approximates `∫ λ^a |∇v|²`.
#[derive(Debug, Clone)]
pub struct Stiffness<T: Real> {
    px: usize,
    py: usize,
    pl: usize,
    cx: Vec<T>,
    cy: Vec<T>,
    cl: Vec<T>,
}

impl<T: Real> Stiffness<T> {
    pub fn assemble(g: &TensorGrid<T>, cw: &CellWeights<T>) -> Self {
        let n = g.num_nodes();
        let (mut cx, mut cy, mut cl) = (vec![T::zero(); n], vec![T::zero(); n], vec![T::zero(); n]);
        let hx = g.hx();
        let half = T::lit(0.5);
        // same per-cell split as `Field::cell_dirichlet`
        for c in 0..g.num_cells() {
            let (ix, iy, j) = g.cell_ijk(c);
            let hl = g.hlambda(j);
            let (w, lo, hi) = (cw.w[j], cw.w_lo[j], cw.w_hi[j]);
            if g.n() == 1 {
                cx[g.node(ix, 0, j)] += lo / hx;
                cx[g.node(ix, 0, j + 1)] += hi / hx;
                let v = half * hx * w / (hl * hl);
                cl[g.node(ix, 0, j)] += v;
                cl[g.node(ix + 1, 0, j)] += v;
            } else {
                for d in 0..2 {
                    cx[g.node(ix, iy + d, j)] += half * lo;
                    cx[g.node(ix, iy + d, j + 1)] += half * hi;
                    cy[g.node(ix + d, iy, j)] += half * lo;
                    cy[g.node(ix + d, iy, j + 1)] += half * hi;
                }
                let v = T::lit(0.25) * hx * hx * w / (hl * hl);
                for dy in 0..2 {
                    for dx in 0..2 {
                        cl[g.node(ix + dx, iy + dy, j)] += v;
                    }
                }
            }
        }
        Self {
            px: g.px(),
            py: g.py(),
            pl: g.nlambda() + 1,
            cx,
            cy,
            cl,
        }
    }

    pub fn len(&self) -> usize {
        self.cx.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cx.is_empty()
    }

    #[inline]
    fn strides(&self) -> (usize, usize) {
        (self.px, self.px * self.py)
    }

    /// Sum of the conductances at node `i` (the diagonal of `K`).
    #[inline]
    pub fn diag(&self, i: usize) -> T {
        let (sy, sl) = self.strides();
        let ix = i % self.px;
        let iy = (i / sy) % self.py;
        let j = i / sl;
        let mut d = self.cx[i] + self.cy[i] + self.cl[i];
        if ix > 0 {
            d += self.cx[i - 1];
        }
        if iy > 0 {
            d += self.cy[i - sy];
        }
        if j > 0 {
            d += self.cl[i - sl];
        }
        d
    }

    /// `(K v)_i = Σ_{e ∋ i} c_e (v_i - v_other)`, so `vᵀ K v = D(v)`.
    #[inline]
    pub fn row_apply(&self, v: &[T], i: usize) -> T {
        let (sy, sl) = self.strides();
        let ix = i % self.px;
        let iy = (i / sy) % self.py;
        let j = i / sl;
        let vi = v[i];
        let mut acc = T::zero();
        if ix + 1 < self.px {
            acc += self.cx[i] * (vi - v[i + 1]);
        }
        if ix > 0 {
            acc += self.cx[i - 1] * (vi - v[i - 1]);
        }
        if self.py > 1 {
            if iy + 1 < self.py {
                acc += self.cy[i] * (vi - v[i + sy]);
            }
            if iy > 0 {
                acc += self.cy[i - sy] * (vi - v[i - sy]);
            }
        }
        if j + 1 < self.pl {
            acc += self.cl[i] * (vi - v[i + sl]);
        }
        if j > 0 {
            acc += self.cl[i - sl] * (vi - v[i - sl]);
        }
        acc
    }

    pub fn apply(&self, v: &[T], out: &mut [T]) {
        out.par_iter_mut()
            .enumerate()
            .with_min_len(1024)
            .for_each(|(i, o)| *o = self.row_apply(v, i));
    }

    /// `D(v) = vᵀ K v`.
    pub fn form(&self, v: &[T]) -> T {
        crate::scalar::det_sum(self.len(), |i| v[i] * self.row_apply(v, i))
    }

    /// Conductance of the vertical edge from node `i` to the node above it.
    #[inline]
    pub fn c_lambda(&self, i: usize) -> T {
        self.cl[i]
    }

    pub(crate) fn columns(&self) -> usize {
        self.px * self.py
    }

    pub(crate) fn layers(&self) -> usize {
        self.pl
    }
}

/// Block preconditioner: exact solves of the tridiagonal `λ`-line blocks of
/// `scale·K + diag(extra)` restricted to free nodes.
#[derive(Debug, Clone)]
pub struct LinePreconditioner<T: Real> {
    cols: usize,
    layers: usize,
    // Thomas factors per column, stored column-major: (c', 1/denominator)
    cprime: Vec<T>,
    inv_den: Vec<T>,
    sub: Vec<T>,
    fixed: Vec<bool>,
}

impl<T: Real> LinePreconditioner<T> {
    pub fn new(k: &Stiffness<T>, scale: T, extra: &[T], fixed: &[bool]) -> Self {
        let cols = k.columns();
        let layers = k.layers();
        let n = cols * layers;
        let mut cprime = vec![T::zero(); n];
        let mut inv_den = vec![T::zero(); n];
        let mut sub = vec![T::zero(); n];
        let chunks: Vec<(Vec<T>, Vec<T>, Vec<T>)> = (0..cols)
            .into_par_iter()
            .map(|col| {
                let mut cp = vec![T::zero(); layers];
                let mut id = vec![T::zero(); layers];
                let mut sb = vec![T::zero(); layers];
                let mut prev_c = T::zero();
                for j in 0..layers {
                    let i = j * cols + col;
                    if fixed[i] {
                        cp[j] = T::zero();
                        id[j] = T::one();
                        sb[j] = T::zero();
                        prev_c = T::zero();
                        continue;
                    }
                    let e = extra.get(i).copied().unwrap_or(T::zero()).max(T::zero());
                    let d = scale * k.diag(i) + e;
                    let a = if j > 0 && !fixed[i - cols] { -scale * k.c_lambda(i - cols) } else { T::zero() };
                    let c = if j + 1 < layers && !fixed[i + cols] { -scale * k.c_lambda(i) } else { T::zero() };
                    let den = d - a * prev_c;
                    let inv = T::one() / den;
                    cp[j] = c * inv;
                    id[j] = inv;
                    sb[j] = a;
                    prev_c = cp[j];
                }
                (cp, id, sb)
            })
            .collect();
        for (col, (cp, id, sb)) in chunks.into_iter().enumerate() {
            for j in 0..layers {
                let i = j * cols + col;
                cprime[i] = cp[j];
                inv_den[i] = id[j];
                sub[i] = sb[j];
            }
        }
        Self {
            cols,
            layers,
            cprime,
            inv_den,
            sub,
            fixed: fixed.to_vec(),
        }
    }

    /// `z = P⁻¹ r`; fixed entries of `z` are zero.
    #[allow(clippy::needless_range_loop)]
    pub fn apply(&self, r: &[T], z: &mut [T]) {
        let (cols, layers) = (self.cols, self.layers);
        let columns: Vec<Vec<T>> = (0..cols)
            .into_par_iter()
            .with_min_len(64)
            .map(|col| {
                let mut y = vec![T::zero(); layers];
                let mut prev = T::zero();
                for j in 0..layers {
                    let i = j * cols + col;
                    if self.fixed[i] {
                        y[j] = T::zero();
                        prev = T::zero();
                        continue;
                    }
                    y[j] = (r[i] - self.sub[i] * prev) * self.inv_den[i];
                    prev = y[j];
                }
                for j in (0..layers.saturating_sub(1)).rev() {
                    let i = j * cols + col;
                    if !self.fixed[i] {
                        let next = y[j + 1];
                        y[j] -= self.cprime[i] * next;
                    }
                }
                y
            })
            .collect();
        for (col, y) in columns.into_iter().enumerate() {
            for (j, v) in y.into_iter().enumerate() {
                z[j * cols + col] = v;
            }
        }
    }
}
