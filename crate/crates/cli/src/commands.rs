//! Subcommand drivers. Each returns the files it produced and the invariant
//! checks that failed; writing and exit codes are handled by the caller.

use std::f64::consts::PI;
use std::fs::File;
use std::sync::Arc;

use anyhow::{Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use csx_core::analysis::{growth_fit, phi_profile, pohozaev_residual, Regime};
use csx_core::fracnorm::{
    comparison_function, comparison_trace, extension_inequality_check, psi_s, BoundaryTrace, CylinderBoundary,
    ExtensionGrid,
};
use csx_core::grid::{read_field, write_field, DumpFormat, Field};
use csx_core::kernel::{ds_constant, make_nonlinearity, Nonlinearity, NonlinearitySpec};
use csx_core::output::{energy_csv, fmt17, phi_csv, pohozaev_csv, psi_csv, trace_csv};
use csx_core::solver::{discrete_energy, solve_layer, LayerOptions, NewtonOptions, SolveReport};

use crate::config::{Format, RunConfig};
use crate::failure::ConfigError;

/// A named output file.
pub struct Artifact {
    pub name: String,
    pub body: String,
    /// Written only to an output directory, never to stdout.
    pub file_only: bool,
}

#[derive(Default)]
pub struct RunOutput {
    pub artifacts: Vec<Artifact>,
    pub violations: Vec<String>,
    /// Soft problems; violations under `--strict`.
    pub warnings: Vec<String>,
}

impl RunOutput {
    fn push(&mut self, name: String, body: String) {
        self.artifacts.push(Artifact {
            name,
            body,
            file_only: false,
        });
    }

    /// A table in the configured format: `csv` as given, else `json`.
    fn table<S: Serialize>(&mut self, cfg: &RunConfig, stem: String, csv: String, json: &S) {
        match cfg.format {
            Format::Csv => self.push(format!("{stem}.csv"), csv),
            Format::Json => self.push(format!("{stem}.json"), to_json(json)),
        }
    }
}

fn to_json<S: Serialize + ?Sized>(v: &S) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("output serializes");
    s.push('\n');
    s
}

fn spread(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    max / min
}

fn stem(prefix: &str, s: f64, r: Option<f64>) -> String {
    match r {
        Some(r) => format!("{prefix}_s{}_R{}", RunConfig::tag(s), RunConfig::tag(r)),
        None => format!("{prefix}_s{}", RunConfig::tag(s)),
    }
}

fn nonlinearity(cfg: &RunConfig) -> Result<Nonlinearity<f64>> {
    let spec = NonlinearitySpec::from_name(&cfg.nonlinearity).map_err(|e| ConfigError(e.to_string()))?;
    Ok(make_nonlinearity(spec)?)
}

fn layer_options(cfg: &RunConfig) -> LayerOptions<f64> {
    LayerOptions {
        q: cfg.q,
        natural_top: true,
        newton: NewtonOptions {
            gtol: cfg.tolerances.newton_gtol,
            max_iter: cfg.tolerances.newton_max_iter,
            ..NewtonOptions::default()
        },
    }
}

fn require_line(cfg: &RunConfig) -> Result<()> {
    if cfg.n != 1 {
        return Err(ConfigError(format!("layers are computed for n = 1 only, got n = {}", cfg.n)).into());
    }
    Ok(())
}

/// Layer on `(-R, R) × (0, Λ)` with the configured grid.
fn layer(cfg: &RunConfig, nl: &Nonlinearity<f64>, s: f64, r: f64) -> Result<(Field<f64>, SolveReport)> {
    let (f, rep) = solve_layer(
        s,
        nl,
        r,
        cfg.height_for(r),
        cfg.nx_for(r),
        cfg.nlambda,
        &layer_options(cfg),
    )
    .with_context(|| format!("layer s = {s}, R = {r}"))?;
    log::info!("layer s = {s}, R = {r}: {} Newton steps", rep.iterations);
    Ok((f, rep))
}

/// Every `(s, R)` pair, solved in parallel and returned in scan order.
fn layers_over(cfg: &RunConfig, nl: &Nonlinearity<f64>, radii: &[f64]) -> Result<Vec<(f64, f64, Field<f64>)>> {
    let points: Vec<(f64, f64)> = cfg.s.iter().flat_map(|&s| radii.iter().map(move |&r| (s, r))).collect();
    points
        .par_iter()
        .map(|&(s, r)| layer(cfg, nl, s, r).map(|(f, _)| (s, r, f)))
        .collect()
}

/// Fields to analyse on balls up to `max(R)`: the `--input` dump, or one
/// layer per `s` on a cylinder of twice that radius.
fn analysis_fields(cfg: &RunConfig, nl: &Nonlinearity<f64>) -> Result<Vec<Field<f64>>> {
    if let Some(path) = &cfg.input {
        let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
        return Ok(vec![read_field(file)?]);
    }
    require_line(cfg)?;
    let r = 2.0 * cfg.radii.last().copied().unwrap_or(1.0);
    Ok(layers_over(cfg, nl, &[r])?.into_iter().map(|(_, _, f)| f).collect())
}

pub fn dsconst(cfg: &RunConfig) -> Result<RunOutput> {
    #[derive(Serialize)]
    struct Row {
        s: f64,
        ds: f64,
        two_s_ds: f64,
        ds_over_two_one_minus_s: f64,
    }
    let rows: Vec<Row> = cfg
        .s
        .iter()
        .map(|&s| {
            let ds = ds_constant(s)?;
            Ok(Row {
                s,
                ds,
                two_s_ds: 2.0 * s * ds,
                ds_over_two_one_minus_s: ds / (2.0 * (1.0 - s)),
            })
        })
        .collect::<Result<_>>()?;
    let mut csv = String::from("s,ds,two_s_ds,ds_over_two_one_minus_s\n");
    for r in &rows {
        csv += &format!(
            "{},{},{},{}\n",
            fmt17(r.s),
            fmt17(r.ds),
            fmt17(r.two_s_ds),
            fmt17(r.ds_over_two_one_minus_s)
        );
    }
    let mut out = RunOutput::default();
    out.table(cfg, "dsconst".into(), csv, &rows);
    Ok(out)
}

pub fn layer_cmd(cfg: &RunConfig) -> Result<RunOutput> {
    require_line(cfg)?;
    let nl = nonlinearity(cfg)?;
    let points: Vec<(f64, f64)> = cfg.s.iter().flat_map(|&s| cfg.radii.iter().map(move |&r| (s, r))).collect();
    let solved: Vec<(f64, f64, Field<f64>, SolveReport)> = points
        .par_iter()
        .map(|&(s, r)| layer(cfg, &nl, s, r).map(|(f, rep)| (s, r, f, rep)))
        .collect::<Result<_>>()?;
    let mut out = RunOutput::default();
    for (s, r, f, rep) in solved {
        let name = stem("layer", s, Some(r));
        let x = f.grid().x_nodes();
        let u = f.trace();
        #[derive(Serialize)]
        struct Trace<'a> {
            x: &'a [f64],
            u: &'a [f64],
        }
        out.table(cfg, format!("{name}_trace"), trace_csv(x, u), &Trace { x, u });
        out.push(format!("{name}_report.json"), rep.to_json() + "\n");
        let mut dump = Vec::new();
        write_field(&f, DumpFormat::Text, &mut dump)?;
        out.artifacts.push(Artifact {
            name: format!("{name}.csx"),
            body: String::from_utf8(dump).expect("text dump is UTF-8"),
            file_only: true,
        });
    }
    Ok(out)
}

/// Growth law expected at `n = 1`.
fn expected_regime(s: f64) -> Regime {
    if (s - 0.5).abs() < 1e-12 {
        Regime::Critical
    } else if s < 0.5 {
        Regime::Subcritical
    } else {
        Regime::Supercritical
    }
}

pub fn energy_scan(cfg: &RunConfig) -> Result<RunOutput> {
    require_line(cfg)?;
    let nl = nonlinearity(cfg)?;
    let solved = layers_over(cfg, &nl, &cfg.radii)?;
    let mut out = RunOutput::default();
    for &s in &cfg.s {
        let rows: Vec<(f64, _)> = solved
            .iter()
            .filter(|(si, _, _)| *si == s)
            .map(|(_, r, f)| (*r, discrete_energy(f, &nl, 0.0)))
            .collect();
        let json: Vec<_> = rows
            .iter()
            .map(|(r, e)| json!({ "radius": r, "dirichlet": e.dirichlet, "potential": e.potential, "total": e.total }))
            .collect();
        out.table(cfg, stem("energy", s, None), energy_csv(&rows), &json);
        let energies: Vec<f64> = rows.iter().map(|(_, e)| e.total).collect();
        let fit = growth_fit(&cfg.radii, &energies, s, cfg.n)?;
        let want = expected_regime(s);
        if fit.regime == Regime::Unclassified {
            out.warnings.push(format!("s = {s}: growth fits none of the three laws"));
        } else if fit.regime != want {
            out.warnings
                .push(format!("s = {s}: growth classified {:?}, expected {want:?}", fit.regime));
        }
        out.push(format!("{}.json", stem("growth", s, None)), fit.to_json() + "\n");
    }
    Ok(out)
}

pub fn monotonicity(cfg: &RunConfig) -> Result<RunOutput> {
    let nl = nonlinearity(cfg)?;
    let slack = cfg.tolerances.monotonicity_slack;
    let mut out = RunOutput::default();
    for f in analysis_fields(cfg, &nl)? {
        let s = f.order().s();
        let rows = phi_profile(&f, &nl, &cfg.radii)?;
        for w in rows.windows(2) {
            if w[1].1 < w[0].1 * (1.0 - slack) {
                out.violations.push(format!(
                    "s = {s}: φ decreases from {:e} at R = {} to {:e} at R = {}",
                    w[0].1, w[0].0, w[1].1, w[1].0
                ));
            }
        }
        #[derive(Serialize)]
        struct Row {
            #[serde(rename = "R")]
            r: f64,
            phi: f64,
        }
        let json: Vec<Row> = rows.iter().map(|&(r, phi)| Row { r, phi }).collect();
        out.table(cfg, stem("phi", s, None), phi_csv(&rows), &json);
    }
    Ok(out)
}

pub fn pohozaev(cfg: &RunConfig) -> Result<RunOutput> {
    let nl = nonlinearity(cfg)?;
    let mut out = RunOutput::default();
    for f in analysis_fields(cfg, &nl)? {
        let s = f.order().s();
        let rows: Vec<(f64, _)> = cfg
            .radii
            .iter()
            .map(|&r| Ok((r, pohozaev_residual(&f, &nl, r)?)))
            .collect::<Result<_>>()?;
        for (r, rep) in &rows {
            if !(rep.relative_residual <= cfg.tolerances.pohozaev_max) {
                out.violations.push(format!(
                    "s = {s}, R = {r}: Pohozaev residual {:e} exceeds {}",
                    rep.relative_residual, cfg.tolerances.pohozaev_max
                ));
            }
        }
        let json: Vec<_> = rows
            .iter()
            .map(|(r, p)| json!({ "R": r, "lhs": p.lhs(), "rhs": p.rhs(), "residual": p.relative_residual, "terms": p }))
            .collect();
        out.table(cfg, stem("pohozaev", s, None), pohozaev_csv(&rows), &json);
    }
    Ok(out)
}

/// Sum of four random plane waves in `(x, λ)`.
fn random_trace(rng: &mut ChaCha8Rng) -> BoundaryTrace<f64> {
    let terms: Vec<[f64; 4]> = (0..4)
        .map(|_| {
            [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(0.5..3.0),
                rng.gen_range(0.5..3.0),
                rng.gen_range(0.0..2.0 * PI),
            ]
        })
        .collect();
    BoundaryTrace::from_fn(move |z: [f64; 3]| {
        terms
            .iter()
            .map(|t| t[0] * (t[1] * z[0] + t[2] * z[2] + t[3]).sin())
            .sum::<f64>()
    })
}

pub fn psi_scan(cfg: &RunConfig) -> Result<RunOutput> {
    require_line(cfg)?;
    let nl = nonlinearity(cfg)?;
    let boundary = CylinderBoundary::<f64>::new(cfg.n, cfg.panels)?;
    let solved = layers_over(cfg, &nl, &cfg.radii)?;
    let reports: Vec<(f64, _)> = solved
        .par_iter()
        .map(|(s, r, v)| {
            let (wbar, _) = comparison_function(v, &nl, *r)?;
            let trace = comparison_trace(Arc::new(wbar), *r);
            Ok((*s, psi_s(&boundary, &trace, *s, 1.0 / r)?))
        })
        .collect::<Result<_>>()?;
    let mut out = RunOutput::default();
    for &s in &cfg.s {
        let rows: Vec<_> = reports.iter().filter(|(si, _)| *si == s).map(|(_, p)| *p).collect();
        let ratios: Vec<f64> = rows.iter().map(|p| p.ratio).collect();
        let sp = spread(&ratios);
        if !(sp <= cfg.tolerances.psi_spread) {
            out.violations.push(format!(
                "s = {s}: Ψ ratio spread {sp:.3} exceeds {}",
                cfg.tolerances.psi_spread
            ));
        }
        out.table(cfg, stem("psi", s, None), psi_csv(&rows), &rows);

        if cfg.traces > 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let traces: Vec<_> = (0..cfg.traces).map(|_| random_trace(&mut rng)).collect();
            let checks = traces
                .par_iter()
                .map(|w| extension_inequality_check(&boundary, w, s, &ExtensionGrid::default()))
                .collect::<csx_core::Result<Vec<_>>>()?;
            let ratios: Vec<f64> = checks.iter().map(|c| c.ratio).collect();
            let sp = spread(&ratios);
            if !(sp <= cfg.tolerances.extension_spread) {
                out.violations.push(format!(
                    "s = {s}: extension ratio spread {sp:.3} exceeds {}",
                    cfg.tolerances.extension_spread
                ));
            }
            let body = json!({ "s": s, "seed": cfg.seed, "ratio_spread": sp, "checks": checks });
            out.push(format!("{}.json", stem("extension", s, None)), to_json(&body));
        }
    }
    Ok(out)
}

pub fn compare(cfg: &RunConfig) -> Result<RunOutput> {
    require_line(cfg)?;
    let nl = nonlinearity(cfg)?;
    let solved = layers_over(cfg, &nl, &cfg.radii)?;
    let reports: Vec<_> = solved
        .par_iter()
        .map(|(_, r, v)| Ok(comparison_function(v, &nl, *r)?.1))
        .collect::<Result<_>>()?;
    let mut out = RunOutput::default();
    for &s in &cfg.s {
        let mut csv = String::from("R,e_v,e_wbar,bound,constant\n");
        let mut rows = Vec::new();
        for rep in reports.iter().filter(|rep| rep.s == s) {
            if !rep.minimality_ok {
                out.violations.push(format!(
                    "s = {s}, R = {}: E(v) = {:e} exceeds E(w̄) = {:e}",
                    rep.r, rep.e_v.total, rep.e_wbar.total
                ));
            }
            let c = rep.e_wbar.total / rep.bound;
            csv += &format!(
                "{},{},{},{},{}\n",
                fmt17(rep.r),
                fmt17(rep.e_v.total),
                fmt17(rep.e_wbar.total),
                fmt17(rep.bound),
                fmt17(c)
            );
            out.push(format!("{}.json", stem("compare", s, Some(rep.r))), rep.to_json() + "\n");
            rows.push(json!({ "R": rep.r, "e_v": rep.e_v.total, "e_wbar": rep.e_wbar.total, "bound": rep.bound, "constant": c }));
        }
        out.table(cfg, stem("compare", s, None), csv, &rows);
    }
    Ok(out)
}
