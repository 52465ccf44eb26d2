use crate::error::{domain, Result};
use crate::scalar::Real;

/// Tensor mesh of `(-R, R)^n × (0, Λ)`: uniform in `x`, power-graded
/// towards `λ = 0` with `λ_j = Λ (j / N_λ)^q`.
///
/// Nodes are numbered with `x` fastest, then `y` (for `n = 2`), then `λ`,
/// so the first `base_nodes()` entries of a field are its trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorGrid<T: Real> {
    n: usize,
    r: T,
    height: T,
    nx: usize,
    nlambda: usize,
    q: T,
    x_nodes: Vec<T>,
    lambda_nodes: Vec<T>,
}

/// `clamp(1 / (2s), 1, 4)`.
pub fn default_grading<T: Real>(s: T) -> T {
    (T::one() / (s + s)).max(T::one()).min(T::lit(4.0))
}

pub fn build_grid<T: Real>(
    n: usize,
    r: T,
    height: T,
    nx: usize,
    nlambda: usize,
    q: T,
) -> Result<TensorGrid<T>> {
    if n != 1 && n != 2 {
        return domain(format!("base dimension n = {n} must be 1 or 2"));
    }
    if !(r > T::zero() && r.is_finite() && height > T::zero() && height.is_finite()) {
        return domain(format!("cylinder sizes R = {r}, Λ = {height} must be positive"));
    }
    if nx < 4 || nlambda < 4 {
        return domain(format!("need at least 4 cells per axis, got {nx} × {nlambda}"));
    }
    if !(q >= T::one() && q.is_finite()) {
        return domain(format!("grading exponent q = {q} must be ≥ 1"));
    }
    let hx = (r + r) / T::from_usize_lossy(nx);
    let x_nodes = (0..=nx)
        .map(|i| if i == nx { r } else { -r + hx * T::from_usize_lossy(i) })
        .collect();
    let nl = T::from_usize_lossy(nlambda);
    let lambda_nodes = (0..=nlambda)
        .map(|j| {
            if j == nlambda {
                height
            } else {
                height * (T::from_usize_lossy(j) / nl).powf(q)
            }
        })
        .collect();
    Ok(TensorGrid {
        n,
        r,
        height,
        nx,
        nlambda,
        q,
        x_nodes,
        lambda_nodes,
    })
}

impl<T: Real> TensorGrid<T> {
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Half-width of the base cube.
    #[inline]
    pub fn r(&self) -> T {
        self.r
    }

    /// Cylinder height `Λ`.
    #[inline]
    pub fn height(&self) -> T {
        self.height
    }

    #[inline]
    pub fn nx(&self) -> usize {
        self.nx
    }

    #[inline]
    pub fn nlambda(&self) -> usize {
        self.nlambda
    }

    #[inline]
    pub fn q(&self) -> T {
        self.q
    }

    pub fn x_nodes(&self) -> &[T] {
        &self.x_nodes
    }

    pub fn lambda_nodes(&self) -> &[T] {
        &self.lambda_nodes
    }

    #[inline]
    pub fn hx(&self) -> T {
        self.x_nodes[1] - self.x_nodes[0]
    }

    #[inline]
    pub fn hlambda(&self, j: usize) -> T {
        self.lambda_nodes[j + 1] - self.lambda_nodes[j]
    }

    /// Nodes along one base axis.
    #[inline]
    pub fn px(&self) -> usize {
        self.nx + 1
    }

    /// `y` node count: `nx + 1` for `n = 2`, otherwise 1.
    #[inline]
    pub fn py(&self) -> usize {
        if self.n == 2 {
            self.nx + 1
        } else {
            1
        }
    }

    #[inline]
    pub fn base_nodes(&self) -> usize {
        self.px() * self.py()
    }

    #[inline]
    pub fn num_nodes(&self) -> usize {
        self.base_nodes() * (self.nlambda + 1)
    }

    /// Cells per base layer.
    #[inline]
    pub fn base_cells(&self) -> usize {
        if self.n == 2 {
            self.nx * self.nx
        } else {
            self.nx
        }
    }

    #[inline]
    pub fn num_cells(&self) -> usize {
        self.base_cells() * self.nlambda
    }

    #[inline]
    pub fn node(&self, ix: usize, iy: usize, j: usize) -> usize {
        (j * self.py() + iy) * self.px() + ix
    }

    /// `(ix, iy, j)` of a node.
    #[inline]
    pub fn node_ijk(&self, idx: usize) -> (usize, usize, usize) {
        let b = self.base_nodes();
        let (j, rem) = (idx / b, idx % b);
        (rem % self.px(), rem / self.px(), j)
    }

    #[inline]
    pub fn cell(&self, ix: usize, iy: usize, j: usize) -> usize {
        (j * self.ny_cells() + iy) * self.nx + ix
    }

    #[inline]
    pub fn cell_ijk(&self, c: usize) -> (usize, usize, usize) {
        let b = self.base_cells();
        let (j, rem) = (c / b, c % b);
        (rem % self.nx, rem / self.nx, j)
    }

    #[inline]
    pub(crate) fn ny_cells(&self) -> usize {
        if self.n == 2 {
            self.nx
        } else {
            1
        }
    }

    /// Base coordinates and height of a node; `y` is 0 when `n = 1`.
    #[inline]
    pub fn node_coords(&self, idx: usize) -> ([T; 2], T) {
        let (ix, iy, j) = self.node_ijk(idx);
        let y = if self.n == 2 { self.x_nodes[iy] } else { T::zero() };
        ([self.x_nodes[ix], y], self.lambda_nodes[j])
    }

    /// Length of the dual interval of base node `i` along one axis.
    #[inline]
    pub fn dual_x(&self, i: usize) -> T {
        if i == 0 || i == self.nx {
            self.hx() * T::lit(0.5)
        } else {
            self.hx()
        }
    }

    /// Trapezoid weight of a base node (its dual-cell measure).
    #[inline]
    pub fn base_mass(&self, ix: usize, iy: usize) -> T {
        if self.n == 2 {
            self.dual_x(ix) * self.dual_x(iy)
        } else {
            self.dual_x(ix)
        }
    }

    /// Index of the `λ`-cell containing `lambda` (clamped to the grid).
    pub fn lambda_cell(&self, lambda: T) -> usize {
        if lambda <= T::zero() {
            return 0;
        }
        let guess = (T::from_usize_lossy(self.nlambda) * (lambda / self.height).powf(T::one() / self.q))
            .floor()
            .to_usize()
            .unwrap_or(0)
            .min(self.nlambda - 1);
        let mut j = guess;
        while j > 0 && self.lambda_nodes[j] > lambda {
            j -= 1;
        }
        while j + 1 < self.nlambda && self.lambda_nodes[j + 1] <= lambda {
            j += 1;
        }
        j
    }

    /// Index of the base cell containing coordinate `x` (clamped).
    pub fn x_cell(&self, x: T) -> usize {
        let t = ((x + self.r) / self.hx()).floor();
        if t <= T::zero() {
            0
        } else {
            t.to_usize().unwrap_or(0).min(self.nx - 1)
        }
    }

    /// Index of the base node nearest to `x`.
    pub fn nearest_x_node(&self, x: T) -> usize {
        let t = ((x + self.r) / self.hx()).round();
        if t <= T::zero() {
            0
        } else {
            t.to_usize().unwrap_or(0).min(self.nx)
        }
    }

    /// Index of the `λ` node nearest to `lambda`.
    pub fn nearest_lambda_node(&self, lambda: T) -> usize {
        let j = self.lambda_cell(lambda);
        let (lo, hi) = (self.lambda_nodes[j], self.lambda_nodes[j + 1]);
        if lambda - lo <= hi - lambda {
            j
        } else {
            j + 1
        }
    }

    /// Whether a node lies on the lateral faces `|x_i| = R`.
    #[inline]
    pub fn is_lateral(&self, idx: usize) -> bool {
        let (ix, iy, _) = self.node_ijk(idx);
        ix == 0 || ix == self.nx || (self.n == 2 && (iy == 0 || iy == self.nx))
    }

    #[inline]
    pub fn is_top(&self, idx: usize) -> bool {
        idx / self.base_nodes() == self.nlambda
    }

    #[inline]
    pub fn is_bottom(&self, idx: usize) -> bool {
        idx < self.base_nodes()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_and_quadratic_grading() {
        let g = build_grid::<f64>(1, 1.0, 1.0, 4, 4, 1.0).unwrap();
        assert_eq!(g.lambda_nodes(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        let g = build_grid::<f64>(1, 1.0, 1.0, 4, 4, 2.0).unwrap();
        assert_eq!(g.lambda_nodes(), &[0.0, 1.0 / 16.0, 0.25, 9.0 / 16.0, 1.0]);
        assert_eq!(g.x_nodes(), &[-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn node_counting() {
        let g = build_grid::<f64>(2, 8.0, 8.0, 64, 32, 2.0).unwrap();
        assert_eq!(g.num_nodes(), 65 * 65 * 33);
        assert_eq!(g.num_cells(), 64 * 64 * 32);
    }

    #[test]
    fn index_round_trip() {
        let g = build_grid::<f64>(2, 1.0, 2.0, 5, 6, 1.5).unwrap();
        for idx in 0..g.num_nodes() {
            let (i, k, j) = g.node_ijk(idx);
            assert_eq!(g.node(i, k, j), idx);
        }
        for c in 0..g.num_cells() {
            let (i, k, j) = g.cell_ijk(c);
            assert_eq!(g.cell(i, k, j), c);
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(build_grid::<f64>(1, 0.0, 1.0, 4, 4, 1.0).is_err());
        assert!(build_grid::<f64>(1, 1.0, -1.0, 4, 4, 1.0).is_err());
        assert!(build_grid::<f64>(1, 1.0, 1.0, 3, 4, 1.0).is_err());
        assert!(build_grid::<f64>(3, 1.0, 1.0, 4, 4, 1.0).is_err());
        assert!(build_grid::<f64>(1, 1.0, 1.0, 4, 4, 0.5).is_err());
    }

    #[test]
    fn locates_cells() {
        let g = build_grid::<f64>(1, 2.0, 3.0, 8, 16, 2.0).unwrap();
        for j in 0..16 {
            let mid = 0.5 * (g.lambda_nodes()[j] + g.lambda_nodes()[j + 1]);
            assert_eq!(g.lambda_cell(mid), j);
            assert_eq!(g.lambda_cell(g.lambda_nodes()[j]), j);
        }
        assert_eq!(g.lambda_cell(3.0), 15);
        assert_eq!(g.x_cell(-2.0), 0);
        assert_eq!(g.x_cell(2.0), 7);
        assert_eq!(g.nearest_x_node(0.1), 4);
    }

    #[test]
    fn default_grading_is_clamped() {
        assert_eq!(default_grading(0.5), 1.0);
        assert_eq!(default_grading(0.25), 2.0);
        assert_eq!(default_grading(0.05), 4.0);
        assert_eq!(default_grading(0.75), 1.0);
    }
}
