//! Randomized invariants.

use std::sync::Arc;

use proptest::prelude::*;

use csx_core::analysis::energy_cylinder;
use csx_core::fracnorm::{
    mollifier_extend, psi_s, BoundaryTrace, CylinderBoundary, IndexSets, Padding, PairSet, SampledFunction,
};
use csx_core::grid::{build_grid, Field, TensorGrid};
use csx_core::kernel::{ds_constant, make_nonlinearity, potential_min, FractionalOrder, NonlinearitySpec};
use csx_core::solver::{lateral_nodes, solve_linear_dirichlet_with, BottomCondition, BoundarySpec, LinearOptions, TopCondition};

fn small_grid() -> Arc<TensorGrid<f64>> {
    Arc::new(build_grid(1, 2.0, 2.0, 8, 6, 1.5).unwrap())
}

/// All-Dirichlet data taken from the front of `vals`.
fn data_spec(g: &TensorGrid<f64>, vals: &[f64]) -> BoundarySpec<f64> {
    let nl = lateral_nodes(g).len();
    let nb = g.base_nodes();
    BoundarySpec {
        lateral: vals[..nl].to_vec(),
        top: TopCondition::Dirichlet(vals[nl..nl + nb].to_vec()),
        bottom: BottomCondition::Dirichlet(vals[nl + nb..nl + 2 * nb].to_vec()),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reflection_of_ds(s in 0.01f64..0.99) {
        let p = ds_constant(s).unwrap() * ds_constant(1.0 - s).unwrap();
        prop_assert!((p - 1.0).abs() < 1e-10, "{}", p);
    }

    #[test]
    fn linear_solve_preserves_order(
        s in 0.1f64..0.9,
        base in prop::collection::vec(-1.0f64..1.0, 64),
        bump in prop::collection::vec(0.0f64..1.0, 64),
    ) {
        let g = small_grid();
        let order = FractionalOrder::new(s).unwrap();
        let opts = LinearOptions { tol: 1e-13, ..LinearOptions::default() };
        let upper: Vec<f64> = base.iter().zip(&bump).map(|(a, b)| a + b).collect();
        let (lo, _) = solve_linear_dirichlet_with(g.clone(), order, &data_spec(&g, &base), &opts).unwrap();
        let (hi, _) = solve_linear_dirichlet_with(g.clone(), order, &data_spec(&g, &upper), &opts).unwrap();
        let used = lateral_nodes(&g).len() + 2 * g.base_nodes();
        let bmin = base[..used].iter().copied().fold(f64::INFINITY, f64::min);
        let bmax = base[..used].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for (a, b) in lo.values().iter().zip(hi.values()) {
            prop_assert!(*a <= *b + 1e-9);
            prop_assert!(*a >= bmin - 1e-9 && *a <= bmax + 1e-9);
        }
    }

    #[test]
    fn mollifier_is_linear_and_contracts(
        a in prop::collection::vec(-1.0f64..1.0, 64),
        b in prop::collection::vec(-1.0f64..1.0, 64),
        alpha in -2.0f64..2.0,
        lambda in 0.05f64..0.5,
    ) {
        let h = 1.0 / 64.0;
        let za = SampledFunction { n: 1, h, origin: 0.0, dims: 64, values: a.clone() };
        let zb = SampledFunction { n: 1, h, origin: 0.0, dims: 64, values: b.clone() };
        let comb: Vec<f64> = a.iter().zip(&b).map(|(x, y)| alpha * x + y).collect();
        let zc = SampledFunction { n: 1, h, origin: 0.0, dims: 64, values: comb };
        let ea = mollifier_extend(&za, &[lambda], Padding::Periodic).unwrap();
        let eb = mollifier_extend(&zb, &[lambda], Padding::Periodic).unwrap();
        let ec = mollifier_extend(&zc, &[lambda], Padding::Periodic).unwrap();
        for i in 0..64 {
            let lin = alpha * ea.layer(0)[i] + eb.layer(0)[i];
            prop_assert!((ec.layer(0)[i] - lin).abs() < 1e-12);
        }
        prop_assert!(ea.l2_norm(0) <= za.l2_norm() * (1.0 + 1e-12));
    }

    #[test]
    fn index_sets_switch_at_one_half(d in 1e-6f64..0.49) {
        let below = IndexSets::for_order(0.5 - d);
        let above = IndexSets::for_order(0.5 + d);
        prop_assert_eq!(below.frac, PairSet::All);
        prop_assert_eq!(below.weig, PairSet::OffBottom);
        prop_assert_eq!(above.frac, PairSet::Bottom);
        prop_assert_eq!(above.weig, PairSet::OffBottomFirst);
    }

    #[test]
    fn potential_is_antiderivative(u in -0.99f64..0.99) {
        for spec in [NonlinearitySpec::AllenCahn, NonlinearitySpec::SineHalfs] {
            let nl = make_nonlinearity::<f64>(spec).unwrap();
            let h = 1e-5;
            let dg = (nl.g(u + h) - nl.g(u - h)) / (2.0 * h);
            prop_assert!((dg + nl.f(u)).abs() < 1e-8);
            prop_assert!(potential_min(&nl).c_u <= nl.g(u) + 1e-14);
        }
    }

    #[test]
    fn cylinder_energy_is_nested(
        s in 0.1f64..0.9,
        vals in prop::collection::vec(-1.0f64..1.0, 17 * 9),
    ) {
        let g = Arc::new(build_grid(1, 4.0, 4.0, 16, 8, 1.0).unwrap());
        prop_assume!(g.num_nodes() == vals.len());
        let ac = make_nonlinearity::<f64>(NonlinearitySpec::AllenCahn).unwrap();
        let cu = potential_min(&ac).c_u;
        let f = Field::new(g, FractionalOrder::new(s).unwrap(), vals).unwrap();
        let mut prev = 0.0;
        for r in [1.0, 2.0, 3.0, 4.0] {
            let e = energy_cylinder(&f, &ac, r, cu).unwrap().total;
            prop_assert!(e >= prev - 1e-12);
            prev = e;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn psi_seminorm_terms_ignore_constants(s in 0.2f64..0.8, c in -3.0f64..3.0) {
        let bd = CylinderBoundary::<f64>::new(1, 6).unwrap();
        let w = BoundaryTrace::from_fn(|z: [f64; 3]| z[0] * z[0] + 0.5 * z[2]);
        let wc = BoundaryTrace::from_fn(move |z: [f64; 3]| z[0] * z[0] + 0.5 * z[2] + c);
        let p = psi_s(&bd, &w, s, 0.1).unwrap();
        let q = psi_s(&bd, &wc, s, 0.1).unwrap();
        prop_assert!((p.frac_term - q.frac_term).abs() <= 1e-9 * p.frac_term.abs().max(1.0));
        prop_assert!((p.weig_term - q.weig_term).abs() <= 1e-9 * p.weig_term.abs().max(1.0));
    }
}
