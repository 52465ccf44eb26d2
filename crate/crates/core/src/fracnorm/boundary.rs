use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Result};
use crate::grid::Field;
use crate::scalar::Real;

/// Face of `∂C_1` a panel belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Face {
    /// `M = (-1, 1)^n × {0}`.
    Bottom,
    Lateral,
    Top,
}

/// Flat rectangular (or segment) surface cell `center + α t_1 + β t_2`,
/// `α, β ∈ [-1, 1]`. Points are `(x, y, λ)` with `y = 0` when `n = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel<T: Real> {
    pub center: [T; 3],
    pub half_edges: [[T; 3]; 2],
    pub measure: T,
    pub face: Face,
    /// `λ`-extent of the panel.
    pub lambda_range: (T, T),
}

/// Panel mesh of `A = ∂C_1` for the cube base `(-1, 1)^n`, with `m` panels
/// per unit length.
#[derive(Debug, Clone)]
pub struct CylinderBoundary<T: Real> {
    n: usize,
    m: usize,
    panels: Vec<Panel<T>>,
}

impl<T: Real> CylinderBoundary<T> {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n != 1 && n != 2 {
            return domain(format!("base dimension n = {n} must be 1 or 2"));
        }
        if m < 2 {
            return domain(format!("need at least 2 panels per unit length, got {m}"));
        }
        let h = T::one() / T::from_usize_lossy(m);
        let half = T::lit(0.5) * h;
        let z = T::zero();
        let one = T::one();
        let coord = |i: usize| -one + h * (T::from_usize_lossy(i) + T::lit(0.5));
        let lcoord = |j: usize| h * (T::from_usize_lossy(j) + T::lit(0.5));
        let mut panels = Vec::new();
        if n == 1 {
            for i in 0..2 * m {
                panels.push(Panel {
                    center: [coord(i), z, z],
                    half_edges: [[half, z, z], [z; 3]],
                    measure: h,
                    face: Face::Bottom,
                    lambda_range: (z, z),
                });
            }
            for side in [-one, one] {
                for j in 0..m {
                    let l = lcoord(j);
                    panels.push(Panel {
                        center: [side, z, l],
                        half_edges: [[z, z, half], [z; 3]],
                        measure: h,
                        face: Face::Lateral,
                        lambda_range: (l - half, l + half),
                    });
                }
            }
            for i in 0..2 * m {
                panels.push(Panel {
                    center: [coord(i), z, one],
                    half_edges: [[half, z, z], [z; 3]],
                    measure: h,
                    face: Face::Top,
                    lambda_range: (one, one),
                });
            }
        } else {
            let area = h * h;
            for (lam, face) in [(z, Face::Bottom), (one, Face::Top)] {
                for iy in 0..2 * m {
                    for ix in 0..2 * m {
                        panels.push(Panel {
                            center: [coord(ix), coord(iy), lam],
                            half_edges: [[half, z, z], [z, half, z]],
                            measure: area,
                            face,
                            lambda_range: (lam, lam),
                        });
                    }
                }
            }
            for side in [-one, one] {
                for j in 0..m {
                    let l = lcoord(j);
                    for i in 0..2 * m {
                        let t = coord(i);
                        // faces x = ±1 and y = ±1
                        panels.push(Panel {
                            center: [side, t, l],
                            half_edges: [[z, half, z], [z, z, half]],
                            measure: area,
                            face: Face::Lateral,
                            lambda_range: (l - half, l + half),
                        });
                        panels.push(Panel {
                            center: [t, side, l],
                            half_edges: [[half, z, z], [z, z, half]],
                            measure: area,
                            face: Face::Lateral,
                            lambda_range: (l - half, l + half),
                        });
                    }
                }
            }
        }
        Ok(Self { n, m, panels })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Panels per unit length.
    pub fn resolution(&self) -> usize {
        self.m
    }

    pub fn panel_size(&self) -> T {
        T::one() / T::from_usize_lossy(self.m)
    }

    pub fn panels(&self) -> &[Panel<T>] {
        &self.panels
    }

    /// `|A|`: `6` for `n = 1`, `16` for `n = 2`.
    pub fn area(&self) -> T {
        self.panels.iter().map(|p| p.measure).fold(T::zero(), |a, b| a + b)
    }

    /// Distance from `x` to the base cube `[-1, 1]^n` (zero inside).
    fn dist_to_cube(&self, z: &[T; 3]) -> T {
        let mut acc = T::zero();
        for &c in &z[..self.n] {
            let e = (c.abs() - T::one()).max(T::zero());
            acc += e * e;
        }
        acc.sqrt()
    }

    /// Distance to `M = [-1, 1]^n × {0}`.
    pub fn d_m(&self, z: &[T; 3]) -> T {
        let d = self.dist_to_cube(z);
        (d * d + z[2] * z[2]).sqrt()
    }

    /// Distance to `Γ = ∂[-1, 1]^n × {0}`, using the exact distance to the
    /// boundary of the base square.
    pub fn d_gamma(&self, z: &[T; 3]) -> T {
        let outside = self.dist_to_cube(z);
        let base = if outside > T::zero() {
            outside
        } else {
            z[..self.n]
                .iter()
                .map(|c| T::one() - c.abs())
                .fold(T::infinity(), T::min)
        };
        (base * base + z[2] * z[2]).sqrt()
    }
}

/// Pair region of a double integral over `A × A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSet {
    /// `A × A`.
    All,
    /// `M × M`.
    Bottom,
    /// `(A ∖ M) × (A ∖ M)`.
    OffBottom,
    /// `(A ∖ M) × A`.
    OffBottomFirst,
}

impl PairSet {
    #[inline]
    pub fn contains(self, z_in_m: bool, zbar_in_m: bool) -> bool {
        match self {
            PairSet::All => true,
            PairSet::Bottom => z_in_m && zbar_in_m,
            PairSet::OffBottom => !z_in_m && !zbar_in_m,
            PairSet::OffBottomFirst => !z_in_m,
        }
    }
}

/// Regions of the fractional and weighted double integrals; they switch at
/// `s = 1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexSets {
    pub frac: PairSet,
    pub weig: PairSet,
}

impl IndexSets {
    pub fn for_order<T: Real>(s: T) -> Self {
        if s <= T::lit(0.5) {
            Self {
                frac: PairSet::All,
                weig: PairSet::OffBottom,
            }
        } else {
            Self {
                frac: PairSet::Bottom,
                weig: PairSet::OffBottomFirst,
            }
        }
    }
}

/// A function on `∂C_1`, evaluated at `(x, y, λ)`.
#[derive(Clone)]
pub struct BoundaryTrace<T: Real> {
    f: Arc<dyn Fn([T; 3]) -> T + Send + Sync>,
}

impl<T: Real> fmt::Debug for BoundaryTrace<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("BoundaryTrace")
    }
}

impl<T: Real> BoundaryTrace<T> {
    pub fn from_fn(f: impl Fn([T; 3]) -> T + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f) }
    }

    pub fn constant(c: T) -> Self {
        Self::from_fn(move |_| c)
    }

    /// `z ↦ v(R z)` for a field on a cylinder of half-width and height at
    /// least `R`, interpolated multilinearly.
    pub fn from_field(field: Arc<Field<T>>, r: T) -> Self {
        Self::from_fn(move |z| field.interpolate([z[0] * r, z[1] * r], z[2] * r))
    }

    #[inline]
    pub fn eval(&self, z: [T; 3]) -> T {
        (self.f)(z)
    }
}
