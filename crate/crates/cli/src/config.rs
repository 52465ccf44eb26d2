//! Run configuration: a flat TOML file merged with command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;

use crate::failure::ConfigError;

/// Output encoding of tables and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Flags shared by every subcommand. Each one overrides the matching key of
/// the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Fractional orders, comma separated.
    #[arg(long, value_delimiter = ',', global = true)]
    pub s: Option<Vec<f64>>,
    /// Radii, comma separated and increasing.
    #[arg(long = "R", value_delimiter = ',', global = true)]
    pub r: Option<Vec<f64>>,
    /// Nonlinearity name (`allen_cahn`, `sine_halfs`).
    #[arg(long, global = true)]
    pub nl: Option<String>,
    /// Cells along x (default: 8R, spacing 1/4).
    #[arg(long, global = true)]
    pub nx: Option<usize>,
    /// Cells along λ.
    #[arg(long, global = true)]
    pub nlambda: Option<usize>,
    /// Grading exponent of the λ mesh (default: clamp(1/(2s), 1, 4)).
    #[arg(long, global = true)]
    pub q: Option<f64>,
    /// Cylinder height Λ (default: the solve radius).
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    /// Directory for output files (default: stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Seed for random test traces.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Treat soft warnings (unconverged scan points, unclassified growth)
    /// as invariant violations.
    #[arg(long, global = true)]
    pub strict: bool,
    /// TOML config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Field dump to analyse instead of solving a layer.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
}

/// Keys accepted in the config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    s: Option<ListOrOne>,
    nonlinearity: Option<String>,
    n: Option<usize>,
    #[serde(rename = "R")]
    r: Option<ListOrOne>,
    nx: Option<usize>,
    nlambda: Option<usize>,
    q: Option<f64>,
    lambda: Option<f64>,
    output: Option<PathBuf>,
    format: Option<Format>,
    seed: Option<u64>,
    strict: Option<bool>,
    panels: Option<usize>,
    traces: Option<usize>,
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ListOrOne {
    One(f64),
    List(Vec<f64>),
}

impl ListOrOne {
    fn into_vec(self) -> Vec<f64> {
        match self {
            ListOrOne::One(x) => vec![x],
            ListOrOne::List(v) => v,
        }
    }
}

/// Thresholds of the invariant checks and solver controls.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    /// Relative decrease of φ tolerated between consecutive radii.
    pub monotonicity_slack: f64,
    /// Largest accepted relative Pohozaev residual.
    pub pohozaev_max: f64,
    /// Largest accepted max/min spread of Ψ ratios.
    pub psi_spread: f64,
    /// Largest accepted max/min spread of extension-inequality ratios.
    pub extension_spread: f64,
    pub newton_gtol: f64,
    pub newton_max_iter: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            monotonicity_slack: 1e-3,
            pohozaev_max: 0.05,
            psi_spread: 3.0,
            extension_spread: 2.0,
            newton_gtol: 1e-8,
            newton_max_iter: 200,
        }
    }
}

impl Tolerances {
    fn apply(&mut self, map: &BTreeMap<String, f64>) -> Result<(), ConfigError> {
        for (k, &v) in map {
            if !(v.is_finite() && v > 0.0) {
                return Err(ConfigError(format!("tolerance {k} = {v} must be positive")));
            }
            match k.as_str() {
                "monotonicity_slack" => self.monotonicity_slack = v,
                "pohozaev_max" => self.pohozaev_max = v,
                "psi_spread" => self.psi_spread = v,
                "extension_spread" => self.extension_spread = v,
                "newton_gtol" => self.newton_gtol = v,
                "newton_max_iter" => self.newton_max_iter = v as usize,
                other => return Err(ConfigError(format!("unknown tolerance key '{other}'"))),
            }
        }
        Ok(())
    }
}

/// Fully resolved settings of one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub s: Vec<f64>,
    pub nonlinearity: String,
    pub n: usize,
    pub radii: Vec<f64>,
    pub nx: Option<usize>,
    pub nlambda: usize,
    pub q: Option<f64>,
    pub lambda: Option<f64>,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub strict: bool,
    pub panels: usize,
    pub traces: usize,
    pub input: Option<PathBuf>,
    pub tolerances: Tolerances,
}

/// Per-command fallbacks for keys given neither in the file nor as flags.
pub struct Defaults {
    pub s: &'static [f64],
    pub radii: &'static [f64],
}

fn read_file(path: &Path) -> Result<FileConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| ConfigError(format!("config {}: {e}", path.display())))
}

impl RunConfig {
    pub fn resolve(flags: &Flags, defaults: &Defaults) -> Result<Self, ConfigError> {
        let file = match &flags.config {
            Some(p) => read_file(p)?,
            None => FileConfig::default(),
        };
        let mut tolerances = Tolerances::default();
        tolerances.apply(&file.tolerances)?;
        let cfg = Self {
            s: flags
                .s
                .clone()
                .or(file.s.map(ListOrOne::into_vec))
                .unwrap_or_else(|| defaults.s.to_vec()),
            nonlinearity: flags
                .nl
                .clone()
                .or(file.nonlinearity)
                .unwrap_or_else(|| "allen_cahn".into()),
            n: file.n.unwrap_or(1),
            radii: flags
                .r
                .clone()
                .or(file.r.map(ListOrOne::into_vec))
                .unwrap_or_else(|| defaults.radii.to_vec()),
            nx: flags.nx.or(file.nx),
            nlambda: flags.nlambda.or(file.nlambda).unwrap_or(128),
            q: flags.q.or(file.q),
            lambda: flags.lambda.or(file.lambda),
            output: flags.out.clone().or(file.output),
            format: flags.format.or(file.format).unwrap_or_default(),
            seed: flags.seed.or(file.seed).unwrap_or(0),
            strict: flags.strict || file.strict.unwrap_or(false),
            panels: file.panels.unwrap_or(64),
            traces: file.traces.unwrap_or(8),
            input: flags.input.clone(),
            tolerances,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if self.s.is_empty() {
            return Err(ConfigError("no fractional order given".into()));
        }
        if let Some(bad) = self.s.iter().find(|s| !(**s > 0.0 && **s < 1.0)) {
            return Err(ConfigError(format!("s = {bad} must lie in (0, 1)")));
        }
        if self.n != 1 && self.n != 2 {
            return Err(ConfigError(format!("n = {} must be 1 or 2", self.n)));
        }
        if self.radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return Err(ConfigError("radii must be positive".into()));
        }
        if self.radii.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(ConfigError("radii must be strictly increasing".into()));
        }
        if let Some(q) = self.q {
            if !(q >= 1.0) {
                return Err(ConfigError(format!("q = {q} must be at least 1")));
            }
        }
        if let Some(l) = self.lambda {
            if !(l > 0.0 && l.is_finite()) {
                return Err(ConfigError(format!("Λ = {l} must be positive")));
            }
        }
        if self.panels < 2 {
            return Err(ConfigError(format!("panels = {} must be at least 2", self.panels)));
        }
        Ok(())
    }

    /// Cells along x for a cylinder of half-width `r`.
    pub fn nx_for(&self, r: f64) -> usize {
        self.nx.unwrap_or_else(|| ((8.0 * r).ceil() as usize).max(16))
    }

    pub fn height_for(&self, r: f64) -> f64 {
        self.lambda.unwrap_or(r)
    }

    /// `x` as a file-name fragment.
    pub fn tag(x: f64) -> String {
        format!("{x}").replace('.', "p")
    }
}
