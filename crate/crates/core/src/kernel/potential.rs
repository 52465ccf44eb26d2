use serde::{Deserialize, Serialize};

use super::nonlinearity::Nonlinearity;
use crate::scalar::Real;

/// `c_u = min G` over a range and the point `τ` attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct PotentialMin<T: Real> {
    pub c_u: T,
    pub tau: T,
}

const SCAN_POINTS: usize = 4096;

/// Global minimum of `G` over `nl.range()`: a 4096-point scan followed by
/// golden-section refinement around every near-minimal sample. Ties go to
/// the smallest minimizer.
pub fn potential_min<T: Real>(nl: &Nonlinearity<T>) -> PotentialMin<T> {
    let (lo, hi) = nl.range();
    let n = SCAN_POINTS;
    let step = (hi - lo) / T::from_usize_lossy(n - 1);
    let at = |k: usize| if k == n - 1 { hi } else { lo + step * T::from_usize_lossy(k) };
    let values: Vec<T> = (0..n).map(|k| nl.g(at(k))).collect();
    let gmin = values.iter().copied().fold(T::infinity(), T::min);
    let tie = T::lit(1e-14) * (T::one() + gmin.abs());

    let mut best = PotentialMin { c_u: gmin, tau: hi };
    let mut found = false;
    for k in 0..n {
        // only local minima of the scan can hide a smaller value nearby
        let left = if k > 0 { values[k - 1] } else { T::infinity() };
        let right = if k + 1 < n { values[k + 1] } else { T::infinity() };
        if values[k] > left || values[k] > right {
            continue;
        }
        let (a, b) = (at(k.saturating_sub(1)), at((k + 1).min(n - 1)));
        let (mut t, mut g) = (at(k), values[k]);
        let (rt, rg) = golden_section(nl, a, b);
        if rg < g - tie {
            t = rt;
            g = rg;
        }
        if !found || g < best.c_u - tie || ((g - best.c_u).abs() <= tie && t < best.tau) {
            best = PotentialMin { c_u: g, tau: t };
            found = true;
        }
    }
    best
}

fn golden_section<T: Real>(nl: &Nonlinearity<T>, mut a: T, mut b: T) -> (T, T) {
    let inv_phi = T::lit(0.618_033_988_749_894_8);
    let mut c = b - (b - a) * inv_phi;
    let mut d = a + (b - a) * inv_phi;
    let (mut gc, mut gd) = (nl.g(c), nl.g(d));
    for _ in 0..200 {
        if (b - a).abs() <= T::epsilon() * (T::one() + a.abs()) {
            break;
        }
        if gc <= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - (b - a) * inv_phi;
            gc = nl.g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + (b - a) * inv_phi;
            gd = nl.g(d);
        }
    }
    if gc <= gd {
        (c, gc)
    } else {
        (d, gd)
    }
}
