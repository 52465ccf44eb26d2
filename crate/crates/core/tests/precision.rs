//! Single-precision instantiation of the generic core.

use std::sync::Arc;

use csx_core::analysis::energy_cylinder;
use csx_core::grid::{build_grid, Field};
use csx_core::kernel::{ds_constant, make_nonlinearity, potential_min, FractionalOrder, NonlinearitySpec};
use csx_core::solver::{solve_layer, solve_linear_dirichlet, BoundarySpec, LayerOptions};

#[test]
fn ds_agrees_across_precisions() {
    for s in [0.2, 0.5, 0.8] {
        let lo = ds_constant(s as f32).unwrap() as f64;
        let hi = ds_constant(s).unwrap();
        assert!((lo - hi).abs() < 1e-5 * hi, "s={s}");
    }
}

#[test]
fn linear_solve_in_f32_matches_f64() {
    let data = |x: [f64; 2], l: f64| (0.5 * x[0]).sin() + 0.1 * l;
    let g64 = Arc::new(build_grid(1, 4.0, 4.0, 32, 16, 1.5).unwrap());
    let g32 = Arc::new(build_grid(1, 4.0f32, 4.0, 32, 16, 1.5).unwrap());
    let bc64 = BoundarySpec::dirichlet_from_fn(&g64, data);
    let bc32 = BoundarySpec::dirichlet_from_fn(&g32, |x: [f32; 2], l: f32| data([x[0] as f64, x[1] as f64], l as f64) as f32);
    let (v64, _) = solve_linear_dirichlet(g64, FractionalOrder::new(0.3).unwrap(), &bc64).unwrap();
    let (v32, _) = solve_linear_dirichlet(g32, FractionalOrder::new(0.3f32).unwrap(), &bc32).unwrap();
    let err = v64
        .values()
        .iter()
        .zip(v32.values())
        .map(|(a, b)| (a - *b as f64).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-4, "{err}");
}

#[test]
fn layer_in_f32() {
    let ac = make_nonlinearity::<f32>(NonlinearitySpec::AllenCahn).unwrap();
    let (f, rep) = solve_layer(0.5f32, &ac, 8.0, 8.0, 64, 32, &LayerOptions::default()).unwrap();
    assert!(rep.converged);
    let t = f.trace();
    assert!(t.windows(2).all(|w| w[1] > w[0]));
    let cu = potential_min(&ac).c_u;
    let e = energy_cylinder(&f, &ac, 4.0, cu).unwrap();
    assert!(e.total.is_finite() && e.total > 0.0);
    let c = Field::constant(f.grid_arc().clone(), *f.order(), 1.0f32);
    assert_eq!(energy_cylinder(&c, &ac, 4.0, cu).unwrap().dirichlet, 0.0);
}
