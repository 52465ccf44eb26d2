use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::scalar::Real;

/// Growth law selected for `E(R)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `R^{n-2s}`.
    Subcritical,
    /// `R^{n-1} log R`.
    Critical,
    /// `R^{n-1}`.
    Supercritical,
    /// None of the three tests passed.
    Unclassified,
}

/// Least-squares fit of `log E` against `log R` and regime classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct GrowthFit<T: Real> {
    pub radii: Vec<T>,
    pub energies: Vec<T>,
    pub slope: T,
    pub regime: Regime,
    /// `max / min` of `E(R) / model(R)` for the selected regime (the
    /// subcritical model when unclassified).
    pub regime_stat: T,
    /// Classification thresholds used (artifact choices, not constants of
    /// the theory): slope tolerance and relative flatness band.
    pub slope_tolerance: T,
    pub flatness_band: T,
}

impl<T: Real> GrowthFit<T> {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fit serializes")
    }
}

const SLOPE_TOL: f64 = 0.15;
const FLAT_BAND: f64 = 0.2;

/// Ratios `E / model`; `(max/min, flat)` where flat means every ratio lies
/// within `±FLAT_BAND` of their mean.
fn ratio_stats<T: Real>(radii: &[T], energies: &[T], model: impl Fn(T) -> T) -> (T, bool) {
    let ratios: Vec<T> = radii.iter().zip(energies).map(|(&r, &e)| e / model(r)).collect();
    let mean = ratios.iter().copied().fold(T::zero(), |a, b| a + b) / T::from_usize_lossy(ratios.len());
    let max = ratios.iter().copied().fold(T::neg_infinity(), T::max);
    let min = ratios.iter().copied().fold(T::infinity(), T::min);
    let band = T::lit(FLAT_BAND);
    let flat = ratios.iter().all(|&q| (q - mean).abs() <= band * mean.abs());
    (max / min, flat)
}

pub fn growth_fit<T: Real>(radii: &[T], energies: &[T], s: T, n: usize) -> Result<GrowthFit<T>> {
    if radii.len() < 3 || radii.len() != energies.len() {
        return domain(format!(
            "growth fit needs at least 3 matching (R, E) pairs, got {} radii and {} energies",
            radii.len(),
            energies.len()
        ));
    }
    if radii.windows(2).any(|w| !(w[1] > w[0])) || !(radii[0] > T::zero()) {
        return domain("radii must be positive and strictly increasing");
    }
    if energies.iter().any(|&e| !(e > T::zero() && e.is_finite())) {
        return domain("energies must be positive");
    }
    let m = T::from_usize_lossy(radii.len());
    let lx: Vec<T> = radii.iter().map(|r| r.ln()).collect();
    let ly: Vec<T> = energies.iter().map(|e| e.ln()).collect();
    let mx = lx.iter().copied().fold(T::zero(), |a, b| a + b) / m;
    let my = ly.iter().copied().fold(T::zero(), |a, b| a + b) / m;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (x, y) in lx.iter().zip(&ly) {
        sxy += (*x - mx) * (*y - my);
        sxx += (*x - mx) * (*x - mx);
    }
    let slope = sxy / sxx;

    let nf = T::from_usize_lossy(n);
    let sub_exp = nf - s - s;
    let (sub_stat, _) = ratio_stats(radii, energies, |r| r.powf(sub_exp));
    let (regime, regime_stat) = if (slope - sub_exp).abs() <= T::lit(SLOPE_TOL) {
        (Regime::Subcritical, sub_stat)
    } else {
        let (crit_stat, crit_flat) = ratio_stats(radii, energies, |r| r.powf(nf - T::one()) * r.ln());
        let (sup_stat, sup_flat) = ratio_stats(radii, energies, |r| r.powf(nf - T::one()));
        if crit_flat && radii[0] > T::one() {
            (Regime::Critical, crit_stat)
        } else if sup_flat {
            (Regime::Supercritical, sup_stat)
        } else {
            (Regime::Unclassified, sub_stat)
        }
    };
    Ok(GrowthFit {
        radii: radii.to_vec(),
        energies: energies.to_vec(),
        slope,
        regime,
        regime_stat,
        slope_tolerance: T::lit(SLOPE_TOL),
        flatness_band: T::lit(FLAT_BAND),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_power_law() {
        let r = [2.0, 4.0, 8.0, 16.0];
        let e: Vec<f64> = r.iter().map(|x: &f64| x.powf(0.6)).collect();
        let fit = growth_fit(&r, &e, 0.2, 1).unwrap();
        assert!((fit.slope - 0.6).abs() < 1e-14);
        assert_eq!(fit.regime, Regime::Subcritical);
        assert!((fit.regime_stat - 1.0).abs() < 1e-12);
    }

    #[test]
    fn logarithmic_and_bounded_growth() {
        let r = [8.0, 16.0, 32.0, 64.0];
        let e: Vec<f64> = r.iter().map(|x: &f64| 3.0 * x.ln()).collect();
        assert_eq!(growth_fit(&r, &e, 0.5, 1).unwrap().regime, Regime::Critical);
        let e = [2.0, 2.1, 2.15, 2.17];
        assert_eq!(growth_fit(&r, &e, 0.75, 1).unwrap().regime, Regime::Supercritical);
        let e = [1.0, 10.0, 100.0, 1000.0];
        assert_eq!(growth_fit(&r, &e, 0.75, 1).unwrap().regime, Regime::Unclassified);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(growth_fit(&[1.0, 2.0], &[1.0, 2.0], 0.3, 1).is_err());
        assert!(growth_fit(&[1.0, 3.0, 2.0], &[1.0, 2.0, 3.0], 0.3, 1).is_err());
        assert!(growth_fit(&[1.0, 2.0, 3.0], &[1.0, -2.0, 3.0], 0.3, 1).is_err());
    }
}
