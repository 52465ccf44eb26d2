//! Layer solutions: symmetry, monotonicity, limits, Neumann consistency and
//! agreement with an independent periodic spectral solver.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use csx_core::analysis::energy_window;
use csx_core::grid::{build_grid, Field};
use csx_core::kernel::{make_nonlinearity, FractionalOrder, Nonlinearity, NonlinearitySpec};
use csx_core::solver::{minimize_energy, neumann_defect, sliding_energy_profile, solve_layer, BoundarySpec, LayerOptions};

fn allen_cahn() -> Nonlinearity<f64> {
    make_nonlinearity(NonlinearitySpec::AllenCahn).unwrap()
}

fn layer(s: f64, r: f64, nx: usize, nlambda: usize) -> Field<f64> {
    let (f, rep) = solve_layer(s, &allen_cahn(), r, r, nx, nlambda, &LayerOptions::default()).unwrap();
    assert!(rep.converged, "s={s} R={r}");
    f
}

/// Trace value at `x` by linear interpolation.
fn trace_at(f: &Field<f64>, x: f64) -> f64 {
    f.interpolate([x, 0.0], 0.0)
}

/// Allen–Cahn layer of `(-Δ)^s u = u - u³` on the periodic interval
/// `[-2L, 2L)` with odd-periodic initial data, by semi-implicit gradient flow
/// with the Fourier symbol `|k|^{2s}`.
fn spectral_layer(s: f64, half_len: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let period = 4.0 * half_len;
    let h = period / n as f64;
    let x: Vec<f64> = (0..n).map(|i| -2.0 * half_len + i as f64 * h).collect();
    let mut u: Vec<f64> = x
        .iter()
        .map(|&xi| xi.signum() * xi.abs().min(2.0 * half_len - xi.abs()).tanh())
        .collect();
    let symbol: Vec<f64> = (0..n)
        .map(|i| {
            let m = if i <= n / 2 { i as f64 } else { i as f64 - n as f64 };
            (2.0 * PI * m / period).abs().powf(2.0 * s)
        })
        .collect();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let dt = 0.2;
    for _ in 0..200_000 {
        let mut buf: Vec<Complex<f64>> = u.iter().map(|&v| Complex::new(v + dt * (v - v * v * v), 0.0)).collect();
        fwd.process(&mut buf);
        for (b, k) in buf.iter_mut().zip(&symbol) {
            *b /= 1.0 + dt * k;
        }
        inv.process(&mut buf);
        let next: Vec<f64> = buf.iter().map(|c| c.re / n as f64).collect();
        let change = next.iter().zip(&u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        u = next;
        if change < 1e-12 {
            break;
        }
    }
    (x, u)
}

#[test]
fn layer_matches_spectral_solution() {
    for s in [0.5, 0.75] {
        let f = layer(s, 40.0, 320, 128);
        let (x, u) = spectral_layer(s, 40.0, 4096);
        let err = x
            .iter()
            .zip(&u)
            .filter(|(xi, _)| xi.abs() <= 5.0)
            .map(|(&xi, &ui)| (trace_at(&f, xi) - ui).abs())
            .fold(0.0, f64::max);
        assert!(err < 2e-2, "s={s}: {err}");
    }
}

#[test]
fn layer_is_odd_and_increasing() {
    for s in [0.3, 0.5, 0.7] {
        let f = layer(s, 16.0, 128, 64);
        let t = f.trace();
        let n = t.len();
        let odd = (0..n).map(|i| (t[i] + t[n - 1 - i]).abs()).fold(0.0, f64::max);
        assert!(odd < 1e-9, "s={s}: {odd}");
        assert!(t.windows(2).all(|w| w[1] > w[0]), "s={s}");
        assert!(t[n / 2].abs() < 1e-9);
    }
}

#[test]
fn layer_approaches_wells() {
    for (s, tol) in [(0.5, 5e-2), (0.75, 5e-2)] {
        let r = 40.0;
        let f = layer(s, r, 320, 128);
        let hi = (trace_at(&f, r / 2.0) - 1.0).abs();
        let lo = (trace_at(&f, -r / 2.0) + 1.0).abs();
        assert!(hi <= tol && lo <= tol, "s={s}: {hi} {lo}");
    }
}

#[test]
fn neumann_defect_decreases_under_refinement() {
    let nl = make_nonlinearity::<f64>(NonlinearitySpec::SineHalfs).unwrap();
    let exact = |x: [f64; 2], l: f64| 2.0 / PI * (x[0] / (1.0 + l)).atan();
    let order = FractionalOrder::new(0.5).unwrap();
    let mut defects = Vec::new();
    for (nx, nlambda) in [(128, 64), (256, 128), (512, 256)] {
        let g = Arc::new(build_grid(1, 40.0, 40.0, nx, nlambda, 1.0).unwrap());
        let bc = BoundarySpec::neumann_from_fn(&g, nl.clone(), false, exact);
        let init = Field::from_fn(g.clone(), order, |x, l| (x[0] / (1.0 + l)).tanh());
        let (f, rep) = minimize_energy(init, &bc).unwrap();
        assert!(rep.converged);
        let d = neumann_defect(&f, &nl);
        let m = d
            .iter()
            .zip(g.x_nodes())
            .filter(|(_, x)| x.abs() <= 10.0)
            .map(|(v, _)| v.abs())
            .fold(0.0, f64::max);
        defects.push(m);
    }
    for w in defects.windows(2) {
        assert!(w[0] / w[1] >= 1.5, "{defects:?}");
    }
}

#[test]
fn sliding_profile_at_zero_shift_is_window_energy() {
    let ac = allen_cahn();
    let f = layer(0.5, 16.0, 128, 64);
    let prof = sliding_energy_profile(&f, &ac, 4.0, &[0.0, 2.0, 4.0]).unwrap();
    let direct = energy_window(&f, &ac, 0.0, 4.0, 4.0, 0.0).unwrap();
    assert!((prof[0].total - direct.total).abs() <= 1e-12 * direct.total.abs());
    assert!(sliding_energy_profile(&f, &ac, 4.0, &[13.0]).is_err());
}

#[test]
fn energy_history_is_nonincreasing() {
    let (_, rep) = solve_layer(0.4, &allen_cahn(), 16.0, 16.0, 128, 64, &LayerOptions::default()).unwrap();
    assert!(rep.energy_history.len() >= 2);
    for w in rep.energy_history.windows(2) {
        assert!(w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0), "{:?}", rep.energy_history);
    }
}

#[test]
fn constant_critical_point_is_kept() {
    let ac = allen_cahn();
    let g = Arc::new(build_grid(1, 8.0, 8.0, 32, 16, 1.0).unwrap());
    let order = FractionalOrder::new(0.6).unwrap();
    for c in [-1.0, 0.0, 1.0] {
        let bc = BoundarySpec::neumann_from_fn(&g, ac.clone(), true, |_, _| c);
        let (f, _) = minimize_energy(Field::constant(g.clone(), order, c), &bc).unwrap();
        let dev = f.values().iter().map(|v| (v - c).abs()).fold(0.0, f64::max);
        assert!(dev < 1e-12, "c={c}: {dev}");
    }
}
