use std::fmt;
use std::sync::Arc;

use super::quadrature::adaptive_simpson;
use crate::error::{domain, Result};
use crate::scalar::Real;

/// Shareable scalar function.
pub type ScalarFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Which nonlinearity to build.
#[derive(Clone)]
pub enum NonlinearitySpec<T: Real> {
    /// `f(u) = u - u³`, double well `G(u) = (1 - u²)² / 4` on `[-1, 1]`.
    AllenCahn,
    /// `f(u) = sin(πu) / π`, `G(u) = (1 + cos πu) / π²` on `[-1, 1]`.
    SineHalfs,
    Custom {
        f: ScalarFn<T>,
        fprime: ScalarFn<T>,
        range: (T, T),
    },
}

impl<T: Real> NonlinearitySpec<T> {
    /// Parses a built-in name (`allen_cahn`, `sine_halfs`).
    pub fn from_name(name: &str) -> Result<Self> {
        match name.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "allen_cahn" | "ac" => Ok(Self::AllenCahn),
            "sine_halfs" | "sine" => Ok(Self::SineHalfs),
            other => domain(format!("unknown nonlinearity '{other}'")),
        }
    }
}

/// A nonlinearity `f`, its derivative, and the potential `G(u) = ∫_u^1 f`
/// on a closed range of admissible values.
#[derive(Clone)]
pub struct Nonlinearity<T: Real> {
    name: String,
    f: ScalarFn<T>,
    fprime: ScalarFn<T>,
    // None: G is computed by quadrature of f.
    analytic_g: Option<ScalarFn<T>>,
    range: (T, T),
    regularity_exponent: Option<f64>,
}

impl<T: Real> fmt::Debug for Nonlinearity<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Nonlinearity")
            .field("name", &self.name)
            .field("range", &self.range)
            .field("analytic_potential", &self.analytic_g.is_some())
            .finish()
    }
}

pub fn make_nonlinearity<T: Real>(spec: NonlinearitySpec<T>) -> Result<Nonlinearity<T>> {
    let one = T::one();
    match spec {
        NonlinearitySpec::AllenCahn => Ok(Nonlinearity {
            name: "allen_cahn".into(),
            f: Arc::new(|u: T| u - u * u * u),
            fprime: Arc::new(|u: T| T::one() - T::lit(3.0) * u * u),
            analytic_g: Some(Arc::new(|u: T| {
                let w = T::one() - u * u;
                w * w / T::lit(4.0)
            })),
            range: (-one, one),
            regularity_exponent: None,
        }),
        NonlinearitySpec::SineHalfs => Ok(Nonlinearity {
            name: "sine_halfs".into(),
            f: Arc::new(|u: T| (T::PI() * u).sin() / T::PI()),
            fprime: Arc::new(|u: T| (T::PI() * u).cos()),
            analytic_g: Some(Arc::new(|u: T| {
                (T::one() + (T::PI() * u).cos()) / (T::PI() * T::PI())
            })),
            range: (-one, one),
            regularity_exponent: None,
        }),
        NonlinearitySpec::Custom { f, fprime, range } => {
            check_range(range)?;
            Ok(Nonlinearity {
                name: "custom".into(),
                f,
                fprime,
                analytic_g: None,
                range,
                regularity_exponent: None,
            })
        }
    }
}

fn check_range<T: Real>((lo, hi): (T, T)) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
        return domain(format!("range [{lo}, {hi}] is empty or inverted"));
    }
    Ok(())
}

impl<T: Real> Nonlinearity<T> {
    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn f(&self, u: T) -> T {
        (self.f)(u)
    }

    #[inline]
    pub fn fprime(&self, u: T) -> T {
        (self.fprime)(u)
    }

    /// Potential `G(u) = ∫_u^1 f`, so `G' = -f` and `G(1) = 0`.
    pub fn g(&self, u: T) -> T {
        match &self.analytic_g {
            Some(g) => g(u),
            None => adaptive_simpson(&*self.f, u, T::one(), T::lit(1e-14)),
        }
    }

    pub fn range(&self) -> (T, T) {
        self.range
    }

    pub fn contains(&self, u: T) -> bool {
        u >= self.range.0 && u <= self.range.1
    }

    pub fn clip(&self, u: T) -> T {
        u.max(self.range.0).min(self.range.1)
    }

    /// The same nonlinearity considered on a different range.
    pub fn with_range(&self, lo: T, hi: T) -> Result<Self> {
        check_range((lo, hi))?;
        Ok(Self {
            range: (lo, hi),
            ..self.clone()
        })
    }

    /// Records the Hölder exponent of `f'` (metadata only).
    pub fn with_regularity(mut self, gamma: f64) -> Self {
        self.regularity_exponent = Some(gamma);
        self
    }

    pub fn regularity_exponent(&self) -> Option<f64> {
        self.regularity_exponent
    }

    /// Whether `f` is odd about zero on a symmetric range (checked on samples).
    pub fn is_odd(&self) -> bool {
        let (lo, hi) = self.range;
        if (lo + hi).abs() > T::epsilon() {
            return false;
        }
        (0..=64).all(|k| {
            let u = hi * T::from_usize_lossy(k) / T::lit(64.0);
            (self.f(u) + self.f(-u)).abs() <= T::lit(1e-12).max(T::epsilon() * T::lit(8.0))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ac() -> Nonlinearity<f64> {
        make_nonlinearity(NonlinearitySpec::AllenCahn).unwrap()
    }

    fn sine() -> Nonlinearity<f64> {
        make_nonlinearity(NonlinearitySpec::SineHalfs).unwrap()
    }

    #[test]
    fn allen_cahn_values() {
        let nl = ac();
        assert_eq!(nl.g(0.0), 0.25);
        assert_eq!(nl.g(1.0), 0.0);
        assert_eq!(nl.g(-1.0), 0.0);
        assert_eq!(nl.range(), (-1.0, 1.0));
        assert!(nl.is_odd());
    }

    #[test]
    fn sine_halfs_value() {
        let nl = sine();
        let want = 2.0 / (std::f64::consts::PI * std::f64::consts::PI);
        assert!((nl.g(0.0) - want).abs() < 1e-15);
        // independent: quadrature of ∫_0^1 sin(πt)/π dt
        let q = adaptive_simpson(&|t: f64| (std::f64::consts::PI * t).sin() / std::f64::consts::PI, 0.0, 1.0, 1e-14);
        assert!((q - 0.202_642_367_284_675_5).abs() < 1e-12);
    }

    #[test]
    fn analytic_potential_matches_quadrature() {
        for nl in [ac(), sine()] {
            for k in 0..100 {
                let u = -1.0 + 2.0 * k as f64 / 99.0;
                let q = adaptive_simpson(&|t| nl.f(t), u, 1.0, 1e-14);
                assert!((nl.g(u) - q).abs() <= 1e-10, "{} at {u}", nl.name());
            }
        }
    }

    #[test]
    fn potential_derivative_is_minus_f() {
        let h = 1e-5;
        for nl in [ac(), sine()] {
            for k in 0..50 {
                let u = -0.98 + 1.96 * k as f64 / 49.0;
                let d = (nl.g(u + h) - nl.g(u - h)) / (2.0 * h);
                assert!((d + nl.f(u)).abs() < 1e-8, "{} at {u}", nl.name());
            }
        }
    }

    #[test]
    fn custom_uses_quadrature() {
        let nl = make_nonlinearity(NonlinearitySpec::Custom {
            f: Arc::new(|u: f64| 2.0 * u),
            fprime: Arc::new(|_| 2.0),
            range: (0.0, 1.0),
        })
        .unwrap();
        // ∫_u^1 2t dt = 1 - u²
        assert!((nl.g(0.3) - 0.91).abs() < 1e-12);
        assert!(nl.g(1.0).abs() < 1e-15);
    }

    #[test]
    fn bad_ranges_rejected() {
        for r in [(1.0, 0.0), (0.5, 0.5), (f64::NAN, 1.0)] {
            let spec = NonlinearitySpec::Custom {
                f: Arc::new(|u: f64| u),
                fprime: Arc::new(|_| 1.0),
                range: r,
            };
            assert!(make_nonlinearity(spec).is_err());
        }
        assert!(ac().with_range(0.2, -0.2).is_err());
        assert!(NonlinearitySpec::<f64>::from_name("cubic").is_err());
        assert!(NonlinearitySpec::<f64>::from_name("allen-cahn").is_ok());
    }
}
