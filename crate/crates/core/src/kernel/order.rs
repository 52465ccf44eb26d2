use serde::{Deserialize, Serialize};

use super::gamma::gamma;
use crate::error::{domain, Result};
use crate::scalar::Real;

/// The fractional power `s`, the weight exponent `a = 1 - 2s` of the
/// extension problem, and the Neumann normalization `d_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct FractionalOrder<T: Real> {
    s: T,
    a: T,
    ds: T,
}

impl<T: Real> FractionalOrder<T> {
    pub fn new(s: T) -> Result<Self> {
        let ds = ds_constant(s)?;
        Ok(Self {
            s,
            a: T::one() - s - s,
            ds,
        })
    }

    #[inline]
    pub fn s(&self) -> T {
        self.s
    }

    /// Weight exponent `1 - 2s`, in `(-1, 1)`.
    #[inline]
    pub fn a(&self) -> T {
        self.a
    }

    /// `2s - 1 = -a`.
    #[inline]
    pub fn b(&self) -> T {
        -self.a
    }

    #[inline]
    pub fn ds(&self) -> T {
        self.ds
    }

    /// `∫_ε^1 ρ^{-2s} dρ` in closed form (logarithm at `s = 1/2`).
    pub fn rho_integral(&self, eps: T) -> T {
        if self.a == T::zero() {
            -eps.ln()
        } else {
            (T::one() - eps.powf(self.a)) / self.a
        }
    }
}

/// `d_s = 2^{2s-1} Γ(s) / Γ(1-s)`.
pub fn ds_constant<T: Real>(s: T) -> Result<T> {
    if !(s > T::zero() && s < T::one()) {
        return domain(format!("fractional order s = {s} must lie in (0, 1)"));
    }
    let two = T::lit(2.0);
    Ok(two.powf(two * s - T::one()) * gamma(s) / gamma(T::one() - s))
}
