//! One-dimensional quadrature helpers.

use crate::scalar::Real;

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute tolerance
/// `tol`. The orientation is respected: `b < a` gives the negated integral.
pub fn adaptive_simpson<T, F>(f: &F, a: T, b: T, tol: T) -> T
where
    T: Real,
    F: Fn(T) -> T + ?Sized,
{
    if a == b {
        return T::zero();
    }
    let half = T::lit(0.5);
    let m = (a + b) * half;
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48)
}

fn simpson<T: Real>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<T, F>(f: &F, a: T, b: T, fa: T, fm: T, fb: T, whole: T, tol: T, depth: u32) -> T
where
    T: Real,
    F: Fn(T) -> T + ?Sized,
{
    let half = T::lit(0.5);
    let m = (a + b) * half;
    let lm = (a + m) * half;
    let rm = (m + b) * half;
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= T::lit(15.0) * tol {
        return left + right + delta / T::lit(15.0);
    }
    simpson_rec(f, a, m, fa, flm, fm, left, tol * half, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, tol * half, depth - 1)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1);
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0_f64, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = T::lit(-x);
        nodes[n - 1 - i] = T::lit(x);
        weights[i] = T::lit(w);
        weights[n - 1 - i] = T::lit(w);
    }
    (nodes, weights)
}
