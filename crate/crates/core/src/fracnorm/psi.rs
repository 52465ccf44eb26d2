use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::boundary::{BoundaryTrace, CylinderBoundary, Face, IndexSets};
use crate::error::{domain, Result};
use crate::grid::power_integral;
use crate::kernel::FractionalOrder;
use crate::scalar::Real;

/// `Ψ_s(w)` split into its three terms, against `∫_ε^1 ρ^{-2s} dρ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct PsiReport<T: Real> {
    pub s: T,
    /// `‖w‖²_{L²(A)}`.
    pub l2_term: T,
    /// `∫∫_{B_frac} |w(z) - w(z̄)|² / |z - z̄|^{n+2s}`.
    pub frac_term: T,
    /// `∫∫_{B_weig} d_M(z)^{1-2s} |w(z) - w(z̄)|² / |z - z̄|^{n+1}`.
    pub weig_term: T,
    pub total: T,
    pub epsilon: T,
    pub bound_integral: T,
    pub ratio: T,
}

/// Sub-panels per panel edge used for near-diagonal pairs.
const SUB: usize = 4;

struct Sample<T> {
    z: [T; 3],
    w: T,
    /// Average of `d_M^{1-2s}` over the (sub-)panel.
    dma: T,
}

fn weight_avg<T: Real>(face: Face, lo: T, hi: T, a: T) -> T {
    match face {
        Face::Bottom => T::zero(),
        Face::Top => T::one(),
        Face::Lateral => power_integral(a, lo, hi) / (hi - lo),
    }
}

fn dist<T: Real>(a: &[T; 3], b: &[T; 3]) -> T {
    let (x, y, z) = (a[0] - b[0], a[1] - b[1], a[2] - b[2]);
    (x * x + y * y + z * z).sqrt()
}

pub fn psi_s<T: Real>(boundary: &CylinderBoundary<T>, w: &BoundaryTrace<T>, s: T, epsilon: T) -> Result<PsiReport<T>> {
    if !(epsilon > T::zero() && epsilon < T::lit(0.5)) {
        return domain(format!("ε = {epsilon} must lie in (0, 1/2)"));
    }
    let order = FractionalOrder::new(s)?;
    let a = order.a();
    let n = boundary.n();
    let sets = IndexSets::for_order(s);
    let panels = boundary.panels();
    let k = SUB;
    let kf = T::from_usize_lossy(k);
    let nsub = if n == 1 { k } else { k * k };

    let centers: Vec<Sample<T>> = panels
        .iter()
        .map(|p| Sample {
            z: p.center,
            w: w.eval(p.center),
            dma: weight_avg(p.face, p.lambda_range.0, p.lambda_range.1, a),
        })
        .collect();
    let subs: Vec<Vec<Sample<T>>> = panels
        .par_iter()
        .map(|p| {
            let mut out = Vec::with_capacity(nsub);
            let kb = if n == 1 { 1 } else { k };
            for jb in 0..kb {
                let beta = if n == 1 {
                    T::zero()
                } else {
                    (T::from_usize_lossy(2 * jb + 1)) / kf - T::one()
                };
                for ia in 0..k {
                    let alpha = T::from_usize_lossy(2 * ia + 1) / kf - T::one();
                    let mut z = p.center;
                    for (d, zd) in z.iter_mut().enumerate() {
                        *zd += alpha * p.half_edges[0][d] + beta * p.half_edges[1][d];
                    }
                    // λ-extent of the sub-panel
                    let (lo, hi) = p.lambda_range;
                    let (slo, shi) = if hi > lo {
                        let dl = T::from_usize_lossy(2) * p.half_edges[0][2].abs().max(p.half_edges[1][2].abs()) / kf;
                        (z[2] - T::lit(0.5) * dl, z[2] + T::lit(0.5) * dl)
                    } else {
                        (lo, hi)
                    };
                    out.push(Sample {
                        z,
                        w: w.eval(z),
                        dma: weight_avg(p.face, slo.max(T::zero()), shi, a),
                    });
                }
            }
            out
        })
        .collect();

    let l2 = panels
        .iter()
        .zip(&subs)
        .map(|(p, ss)| ss.iter().map(|q| q.w * q.w).fold(T::zero(), |x, y| x + y) * p.measure / T::from_usize_lossy(nsub))
        .fold(T::zero(), |x, y| x + y);

    let nf = T::from_usize_lossy(n);
    let e_frac = nf + s + s;
    let e_weig = nf + T::one();
    let near = T::lit(1.5) * boundary.panel_size();
    let sub_area = T::one() / T::from_usize_lossy(nsub * nsub);

    // per-row partial sums, reduced in row order for reproducibility
    let rows: Vec<(T, T)> = (0..panels.len())
        .into_par_iter()
        .map(|p| {
            let pm = panels[p].face == Face::Bottom;
            let (mut fr, mut we) = (T::zero(), T::zero());
            for q in 0..panels.len() {
                let qm = panels[q].face == Face::Bottom;
                let in_frac = sets.frac.contains(pm, qm);
                let in_weig = sets.weig.contains(pm, qm);
                if !in_frac && !in_weig {
                    continue;
                }
                let mass = panels[p].measure * panels[q].measure;
                let (cp, cq) = (&centers[p], &centers[q]);
                let d = dist(&cp.z, &cq.z);
                if d > near {
                    let dw = cp.w - cq.w;
                    let dw2 = dw * dw * mass;
                    if in_frac {
                        fr += dw2 / d.powf(e_frac);
                    }
                    if in_weig {
                        we += cp.dma * dw2 / d.powf(e_weig);
                    }
                    continue;
                }
                for (i, sp) in subs[p].iter().enumerate() {
                    for (j, sq) in subs[q].iter().enumerate() {
                        if p == q && i == j {
                            continue;
                        }
                        let d = dist(&sp.z, &sq.z);
                        let dw = sp.w - sq.w;
                        let dw2 = dw * dw * mass * sub_area;
                        if in_frac {
                            fr += dw2 / d.powf(e_frac);
                        }
                        if in_weig {
                            we += sp.dma * dw2 / d.powf(e_weig);
                        }
                    }
                }
            }
            (fr, we)
        })
        .collect();
    let (frac, weig) = rows
        .into_iter()
        .fold((T::zero(), T::zero()), |(a, b), (x, y)| (a + x, b + y));

    let total = l2 + frac + weig;
    let bound = order.rho_integral(epsilon);
    Ok(PsiReport {
        s,
        l2_term: l2,
        frac_term: frac,
        weig_term: weig,
        total,
        epsilon,
        bound_integral: bound,
        ratio: total / bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_have_only_l2() {
        for n in [1, 2] {
            let b = CylinderBoundary::<f64>::new(n, 4).unwrap();
            let rep = psi_s(&b, &BoundaryTrace::constant(1.5), 0.3, 0.25).unwrap();
            assert_eq!(rep.frac_term, 0.0);
            assert_eq!(rep.weig_term, 0.0);
            assert!((rep.total - 2.25 * b.area()).abs() < 1e-12);
        }
    }

    #[test]
    fn bound_integral_closed_form() {
        let b = CylinderBoundary::<f64>::new(1, 4).unwrap();
        let w = BoundaryTrace::constant(0.0);
        let r = psi_s(&b, &w, 0.25, 0.125).unwrap();
        assert!((r.bound_integral - (1.0 - 0.125f64.sqrt()) / 0.5).abs() < 1e-14);
        let r = psi_s(&b, &w, 0.5, 0.125).unwrap();
        assert!((r.bound_integral - 8f64.ln()).abs() < 1e-14);
        assert!(psi_s(&b, &w, 0.5, 0.5).is_err());
        assert!(psi_s(&b, &w, 0.5, 0.0).is_err());
    }

    #[test]
    fn shifts_only_change_l2() {
        let b = CylinderBoundary::<f64>::new(1, 16).unwrap();
        let w = BoundaryTrace::from_fn(|z: [f64; 3]| (2.0 * z[0]).sin() + z[2]);
        let w2 = BoundaryTrace::from_fn(|z: [f64; 3]| (2.0 * z[0]).sin() + z[2] + 3.0);
        for s in [0.3, 0.7] {
            let a = psi_s(&b, &w, s, 0.1).unwrap();
            let c = psi_s(&b, &w2, s, 0.1).unwrap();
            assert!((a.frac_term - c.frac_term).abs() <= 1e-9 * a.frac_term);
            assert!((a.weig_term - c.weig_term).abs() <= 1e-9 * a.weig_term);
            assert!((a.l2_term - c.l2_term).abs() > 1.0);
        }
    }
}
