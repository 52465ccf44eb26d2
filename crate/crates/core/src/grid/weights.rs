use super::tensor::TensorGrid;
use crate::error::{domain, Result};
use crate::kernel::quadrature::gauss_legendre;
use crate::scalar::Real;

/// Exact integrals of the weight over each `λ`-interval `[λ_j, λ_{j+1}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CellWeights<T: Real> {
    a: T,
    /// `∫ λ^a`.
    pub w: Vec<T>,
    /// `∫ λ^a (λ_{j+1} - λ) / h_j`: the share attached to the lower node.
    pub w_lo: Vec<T>,
    /// `∫ λ^a (λ - λ_j) / h_j`: the share attached to the upper node.
    pub w_hi: Vec<T>,
    /// `∫ λ^{-a}`, used for the harmonic flux `Δv / ∫ λ^{-a}`.
    pub w_inv: Vec<T>,
}

impl<T: Real> CellWeights<T> {
    pub fn a(&self) -> T {
        self.a
    }

    /// Weight mass lumped at `λ`-node `j` (sum of the adjacent shares).
    pub fn nodal(&self, j: usize) -> T {
        let below = if j > 0 { self.w_hi[j - 1] } else { T::zero() };
        let above = self.w_lo.get(j).copied().unwrap_or(T::zero());
        below + above
    }
}

/// `∫_{l0}^{l1} λ^p dλ` for `p > -1` and `0 ≤ l0 ≤ l1`, free of cancellation.
pub fn power_integral<T: Real>(p: T, l0: T, l1: T) -> T {
    let e = p + T::one();
    if l1 <= l0 {
        return T::zero();
    }
    if l0 <= T::zero() {
        return l1.powf(e) / e;
    }
    let r = (l1 - l0) / l0;
    l0.powf(e) * (e * r.ln_1p()).exp_m1() / e
}

/// `∫_{l0}^{l1} λ^a (λ - l0) dλ / (l1 - l0)`.
fn upper_share<T: Real>(a: T, l0: T, l1: T, gl: &(Vec<T>, Vec<T>)) -> T {
    let h = l1 - l0;
    if l0 <= T::zero() {
        return h.powf(a + T::one()) / (a + T::lit(2.0));
    }
    if h / l0 >= T::lit(0.1) {
        let m1 = power_integral(a + T::one(), l0, l1);
        return (m1 - l0 * power_integral(a, l0, l1)) / h;
    }
    // h ∫_0^1 (l0 + h t)^a t dt: smooth, so Gauss–Legendre is exact to rounding
    let half = T::lit(0.5);
    let (xs, ws) = gl;
    let sum = xs
        .iter()
        .zip(ws)
        .map(|(&x, &w)| {
            let t = half * (x + T::one());
            w * (l0 + h * t).powf(a) * t
        })
        .fold(T::zero(), |acc, v| acc + v);
    h * half * sum
}

pub fn weight_integrals<T: Real>(grid: &TensorGrid<T>, a: T) -> Result<CellWeights<T>> {
    if !(a.abs() < T::one()) {
        return domain(format!("weight exponent a = {a} must lie in (-1, 1)"));
    }
    let gl = gauss_legendre::<T>(10);
    let ln = grid.lambda_nodes();
    let m = grid.nlambda();
    let mut out = CellWeights {
        a,
        w: Vec::with_capacity(m),
        w_lo: Vec::with_capacity(m),
        w_hi: Vec::with_capacity(m),
        w_inv: Vec::with_capacity(m),
    };
    for j in 0..m {
        let (l0, l1) = (ln[j], ln[j + 1]);
        let w = power_integral(a, l0, l1);
        let hi = upper_share(a, l0, l1, &gl);
        out.w.push(w);
        out.w_hi.push(hi);
        out.w_lo.push(w - hi);
        out.w_inv.push(power_integral(-a, l0, l1));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;
    use crate::kernel::quadrature::adaptive_simpson;

    #[test]
    fn closed_form_examples() {
        assert_eq!(power_integral::<f64>(0.0, 0.0, 0.5), 0.5);
        assert!((power_integral::<f64>(-0.5, 0.0, 1.0) - 2.0).abs() < 1e-15);
        assert!((power_integral::<f64>(0.5, 1.0, 4.0) - 14.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn shares_match_quadrature() {
        for &a in &[-0.8, -0.5, 0.0, 0.3, 0.9] {
            let g = build_grid::<f64>(1, 1.0, 3.0, 4, 40, 2.5).unwrap();
            let cw = weight_integrals(&g, a).unwrap();
            let ln = g.lambda_nodes();
            for j in 1..40 {
                let (l0, l1) = (ln[j], ln[j + 1]);
                let h = l1 - l0;
                let w = adaptive_simpson(&|l: f64| l.powf(a), l0, l1, 1e-15);
                let hi = adaptive_simpson(&|l: f64| l.powf(a) * (l - l0) / h, l0, l1, 1e-15);
                assert!((cw.w[j] - w).abs() <= 1e-12 * w, "a={a} j={j}");
                assert!((cw.w_hi[j] - hi).abs() <= 1e-12 * w, "a={a} j={j}");
                assert!(cw.w_lo[j] > 0.0 && cw.w_hi[j] > 0.0);
            }
            // first cell: λ^a (λ / h) integrates to h^{a+1}/(a+2)
            let h = ln[1];
            assert!((cw.w_hi[0] - h.powf(a + 1.0) / (a + 2.0)).abs() < 1e-15);
            assert!(cw.w[0].is_finite());
        }
    }

    #[test]
    fn total_weight_is_exact() {
        let g = build_grid::<f64>(1, 1.0, 2.0, 4, 17, 3.0).unwrap();
        let a = -0.4;
        let cw = weight_integrals(&g, a).unwrap();
        let total: f64 = cw.w.iter().sum();
        assert!((total - 2f64.powf(a + 1.0) / (a + 1.0)).abs() < 1e-13);
        let nodal: f64 = (0..=17).map(|j| cw.nodal(j)).sum();
        assert!((nodal - total).abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_exponent() {
        let g = build_grid::<f64>(1, 1.0, 1.0, 4, 4, 1.0).unwrap();
        assert!(weight_integrals(&g, 1.0).is_err());
        assert!(weight_integrals(&g, -1.2).is_err());
    }
}
