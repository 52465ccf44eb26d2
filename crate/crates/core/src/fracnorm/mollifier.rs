use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::scalar::Real;

/// Values of a function on the uniform grid `origin + h·i` (per axis, `x`
/// fastest) in dimension `n ∈ {1, 2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction<T: Real> {
    pub n: usize,
    pub h: T,
    pub origin: T,
    /// Points per axis.
    pub dims: usize,
    pub values: Vec<T>,
}

impl<T: Real> SampledFunction<T> {
    pub fn from_fn(n: usize, h: T, origin: T, dims: usize, f: impl Fn([T; 2]) -> T) -> Result<Self> {
        if n != 1 && n != 2 {
            return domain(format!("dimension n = {n} must be 1 or 2"));
        }
        if !(h > T::zero()) || dims < 2 {
            return domain("need a positive spacing and at least 2 points per axis");
        }
        let ny = if n == 2 { dims } else { 1 };
        let mut values = Vec::with_capacity(dims * ny);
        for j in 0..ny {
            for i in 0..dims {
                let x = origin + h * T::from_usize_lossy(i);
                let y = if n == 2 { origin + h * T::from_usize_lossy(j) } else { T::zero() };
                values.push(f([x, y]));
            }
        }
        Ok(Self {
            n,
            h,
            origin,
            dims,
            values,
        })
    }

    /// Coordinates of sample `idx`.
    pub fn point(&self, idx: usize) -> [T; 2] {
        let i = idx % self.dims;
        let j = idx / self.dims;
        let y = if self.n == 2 {
            self.origin + self.h * T::from_usize_lossy(j)
        } else {
            T::zero()
        };
        [self.origin + self.h * T::from_usize_lossy(i), y]
    }

    /// Discrete `L²` norm `(Σ v² h^n)^{1/2}`.
    pub fn l2_norm(&self) -> T {
        l2(&self.values, self.h, self.n)
    }
}

fn l2<T: Real>(v: &[T], h: T, n: usize) -> T {
    (v.iter().map(|&x| x * x).fold(T::zero(), |a, b| a + b) * h.powi(n as i32)).sqrt()
}

/// How samples are continued outside the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Padding {
    /// Zero outside the sampled box.
    #[default]
    Zero,
    /// Periodic with period `dims·h`.
    Periodic,
}

/// Extension `ζ̃(·, λ)` on the sample grid at each requested height.
#[derive(Debug, Clone, PartialEq)]
pub struct SlabField<T: Real> {
    pub base: SampledFunction<T>,
    pub lambdas: Vec<T>,
    pub layers: Vec<Vec<T>>,
}

impl<T: Real> SlabField<T> {
    pub fn layer(&self, k: usize) -> &[T] {
        &self.layers[k]
    }

    pub fn l2_norm(&self, k: usize) -> T {
        l2(&self.layers[k], self.base.h, self.base.n)
    }
}

/// `K(x) = c_n (1 - |x|²)³` on `|x| < 1`, with `∫ K = 1`.
pub fn mollifier_kernel<T: Real>(n: usize, r2: T) -> T {
    if r2 >= T::one() {
        return T::zero();
    }
    let c = if n == 1 { T::lit(35.0 / 32.0) } else { T::lit(4.0) / T::PI() };
    let t = T::one() - r2;
    c * t * t * t
}

/// Offsets inside the kernel support at height `λ` with the kernel value,
/// its spatial gradient and its `λ`-derivative (all times `h^n`).
struct Stencil<T> {
    offsets: Vec<(isize, isize)>,
    k: Vec<T>,
    dx: Vec<T>,
    dy: Vec<T>,
    dl: Vec<T>,
}

fn stencil<T: Real>(n: usize, h: T, lambda: T) -> Stencil<T> {
    let reach = (lambda / h).ceil().to_isize().unwrap_or(0);
    let nf = T::from_usize_lossy(n);
    let hn = h.powi(n as i32);
    let c = if n == 1 { T::lit(35.0 / 32.0) } else { T::lit(4.0) / T::PI() };
    let mut st = Stencil {
        offsets: Vec::new(),
        k: Vec::new(),
        dx: Vec::new(),
        dy: Vec::new(),
        dl: Vec::new(),
    };
    let yr = if n == 2 { reach } else { 0 };
    for b in -yr..=yr {
        for a in -reach..=reach {
            let y = [h * T::from_isize(a).unwrap(), h * T::from_isize(b).unwrap()];
            let (u0, u1) = (y[0] / lambda, y[1] / lambda);
            let r2 = u0 * u0 + u1 * u1;
            if r2 >= T::one() {
                continue;
            }
            let t = T::one() - r2;
            let kval = c * t * t * t;
            // ∇K(u) = -6c (1 - |u|²)² u
            let g = -T::lit(6.0) * c * t * t;
            let scale = lambda.powf(-nf);
            st.offsets.push((a, b));
            st.k.push(scale * kval * hn);
            st.dx.push(scale / lambda * g * u0 * hn);
            st.dy.push(scale / lambda * g * u1 * hn);
            // ∂_λ [λ^{-n} K(y/λ)] = -λ^{-n-1} (n K(u) + u·∇K(u))
            st.dl.push(-scale / lambda * (nf * kval + g * r2) * hn);
        }
    }
    st
}

fn fetch<T: Real>(z: &SampledFunction<T>, pad: Padding, i: isize, j: isize) -> T {
    let d = z.dims as isize;
    let (i, j) = match pad {
        Padding::Periodic => (i.rem_euclid(d), if z.n == 2 { j.rem_euclid(d) } else { 0 }),
        Padding::Zero => {
            if i < 0 || i >= d || (z.n == 2 && (j < 0 || j >= d)) {
                return T::zero();
            }
            (i, j)
        }
    };
    z.values[(j * d + i) as usize]
}

fn check<T: Real>(zeta: &SampledFunction<T>, lambda: T) -> Result<()> {
    if !(lambda >= T::lit(2.0) * zeta.h) {
        return domain(format!(
            "λ = {lambda} is below two sample spacings ({}); the kernel is under-resolved",
            T::lit(2.0) * zeta.h
        ));
    }
    Ok(())
}

/// `ζ̃(x, λ) = ∫ λ^{-n} K((x - x̄)/λ) ζ(x̄) dx̄` by discrete convolution, with
/// the discrete kernel weights normalized to sum to one.
pub fn mollifier_extend<T: Real>(zeta: &SampledFunction<T>, lambdas: &[T], pad: Padding) -> Result<SlabField<T>> {
    for &l in lambdas {
        check(zeta, l)?;
    }
    let layers = lambdas
        .iter()
        .map(|&l| {
            let st = stencil(zeta.n, zeta.h, l);
            let total = st.k.iter().copied().fold(T::zero(), |a, b| a + b);
            (0..zeta.values.len())
                .into_par_iter()
                .map(|idx| {
                    let i = (idx % zeta.dims) as isize;
                    let j = (idx / zeta.dims) as isize;
                    let mut acc = T::zero();
                    for (o, &(a, b)) in st.offsets.iter().enumerate() {
                        acc += st.k[o] * fetch(zeta, pad, i - a, j - b);
                    }
                    acc / total
                })
                .collect()
        })
        .collect();
    Ok(SlabField {
        base: zeta.clone(),
        lambdas: lambdas.to_vec(),
        layers,
    })
}

/// `(∂_x, ∂_y, ∂_λ) ζ̃` at every sample for one height, differentiating the
/// normalized discrete convolution exactly.
pub fn mollifier_gradient<T: Real>(zeta: &SampledFunction<T>, lambda: T, pad: Padding) -> Result<Vec<[T; 3]>> {
    check(zeta, lambda)?;
    let st = stencil(zeta.n, zeta.h, lambda);
    let sum = |v: &[T]| v.iter().copied().fold(T::zero(), |a, b| a + b);
    let (s0, sl) = (sum(&st.k), sum(&st.dl));
    Ok((0..zeta.values.len())
        .into_par_iter()
        .map(|idx| {
            let i = (idx % zeta.dims) as isize;
            let j = (idx / zeta.dims) as isize;
            let (mut v, mut gx, mut gy, mut gl) = (T::zero(), T::zero(), T::zero(), T::zero());
            for (o, &(a, b)) in st.offsets.iter().enumerate() {
                let z = fetch(zeta, pad, i - a, j - b);
                v += st.k[o] * z;
                gx += st.dx[o] * z;
                gy += st.dy[o] * z;
                gl += st.dl[o] * z;
            }
            let val = v / s0;
            [gx / s0, gy / s0, (gl - val * sl) / s0]
        })
        .collect())
}
