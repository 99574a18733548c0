//! Experiment configuration: built-in defaults, then a JSON file, then flags.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use pathwise::analysis::{benchmark, Estimator};
use pathwise::coupling::CouplingMode;
use pathwise::sde::Scheme;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    BchCheck,
    CoupleStats,
    Converge,
    Exactness,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::BchCheck => "bch-check",
            Self::CoupleStats => "couple-stats",
            Self::Converge => "converge",
            Self::Exactness => "exactness",
        }
    }

    pub fn is_statistical(self) -> bool {
        matches!(self, Self::CoupleStats | Self::Converge)
    }
}

/// Where the substitute areas B come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AreaMode {
    /// B = A, the reference Levy areas.
    TrueOracle,
    /// B independent of A given W.
    Gaussian,
    /// B dyadically coupled to A.
    Coupled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

/// Named `converge` set-ups with gated thresholds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Euler, Milstein, log-ODE on smooth_2d against a fine log-ODE reference.
    Rates,
    /// Gaussian log-ODE with coupled areas on levy_area against the exact solution.
    NewScheme,
    /// Gaussian log-ODE against Davie on smooth_2d with zero Ito drift.
    Davie,
    /// Terminal-norm W2 of Euler on rotation.
    EulerLowerBound,
}

/// What `converge` measures against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReferenceChoice {
    /// Exact solution when the benchmark has one, else a fine log-ODE.
    Auto,
    Exact,
    Fine,
    Scheme(Scheme),
}

impl FromStr for ReferenceChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(Self::Auto),
            "exact" => Ok(Self::Exact),
            "fine" => Ok(Self::Fine),
            other => other.parse().map(Self::Scheme).map_err(|e: pathwise::Error| e.to_string()),
        }
    }
}

/// Optional settings from a JSON file or flags; unset fields keep defaults.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Overrides {
    pub command: Option<Command>,
    pub preset: Option<Preset>,
    pub benchmark: Option<String>,
    pub schemes: Option<Vec<String>>,
    pub h_exp: Option<Vec<u32>>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub area_mode: Option<AreaMode>,
    pub coupling_mode: Option<String>,
    pub substeps: Option<usize>,
    pub area_substeps: Option<usize>,
    pub reference: Option<String>,
    pub estimator: Option<String>,
    pub zero_ito_drift: Option<bool>,
    pub dim: Option<usize>,
    pub max_level: Option<usize>,
    pub cases: Option<usize>,
    pub perturb: Option<String>,
    pub baseline: Option<bool>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl Overrides {
    pub fn from_json_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
    }

    /// Fields set in `other` win.
    pub fn merge(self, other: Overrides) -> Overrides {
        macro_rules! pick {
            ($($f:ident),*) => { Overrides { $($f: other.$f.or(self.$f)),* } };
        }
        pick!(
            command, preset, benchmark, schemes, h_exp, samples, seed, area_mode, coupling_mode, substeps,
            area_substeps, reference, estimator, zero_ito_drift, dim, max_level, cases, perturb, baseline, threads,
            out, format
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub preset: Option<Preset>,
    pub benchmark: String,
    pub schemes: Vec<Scheme>,
    /// Grid exponents e with h = 2^-e, ascending.
    pub h_exps: Vec<u32>,
    pub samples: usize,
    pub seed: u64,
    pub area_mode: AreaMode,
    pub coupling_mode: CouplingMode,
    /// Flow sub-steps per block.
    pub substeps: usize,
    /// Bridge sub-steps of the reference area sampler.
    pub area_substeps: usize,
    pub reference: ReferenceChoice,
    pub estimator: Estimator,
    pub zero_ito_drift: bool,
    /// Dimension d: path dimension for the algebra suite, driver dimension for couple-stats.
    pub dim: usize,
    pub max_level: usize,
    pub cases: usize,
    /// BCH table term and coefficient offset (negative control).
    pub perturb: Option<(String, f64)>,
    pub baseline: bool,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl ExperimentConfig {
    /// Built-in defaults for a command, adjusted by an optional preset.
    pub fn defaults(command: Command, preset: Option<Preset>) -> Self {
        let mut c = Self {
            command,
            preset,
            benchmark: "smooth_2d".into(),
            schemes: vec![Scheme::Euler, Scheme::Milstein, Scheme::LogOde],
            h_exps: (4..=9).collect(),
            samples: 1000,
            seed: 0,
            area_mode: AreaMode::TrueOracle,
            coupling_mode: CouplingMode::Exact2d,
            substeps: 8,
            area_substeps: 64,
            reference: ReferenceChoice::Auto,
            estimator: Estimator::StrongMax,
            zero_ito_drift: false,
            dim: 2,
            max_level: 5,
            cases: 200,
            perturb: None,
            baseline: false,
            threads: None,
            out: None,
            format: Format::Csv,
        };
        match command {
            Command::BchCheck => c.dim = 3,
            Command::CoupleStats => {
                c.h_exps = (6..=10).collect();
                c.samples = 10_000;
            }
            Command::Exactness => {
                c.benchmark = "all".into();
                c.h_exps = vec![7];
                c.samples = 100;
            }
            Command::Converge => {}
        }
        if command == Command::Converge {
            match preset {
                Some(Preset::Rates) | None => {}
                Some(Preset::NewScheme) => {
                    c.benchmark = "levy_area".into();
                    c.schemes = vec![Scheme::Euler, Scheme::GaussianLogOde];
                    c.h_exps = (5..=10).collect();
                    c.area_mode = AreaMode::Coupled;
                    c.reference = ReferenceChoice::Exact;
                }
                Some(Preset::Davie) => {
                    c.schemes = vec![Scheme::GaussianLogOde];
                    c.reference = ReferenceChoice::Scheme(Scheme::Davie);
                    c.area_mode = AreaMode::Gaussian;
                    c.zero_ito_drift = true;
                }
                Some(Preset::EulerLowerBound) => {
                    c.benchmark = "rotation".into();
                    c.schemes = vec![Scheme::Euler];
                    c.reference = ReferenceChoice::Exact;
                    c.estimator = Estimator::TerminalNormW2;
                }
            }
        }
        c
    }

    /// Defaults for the resolved command and preset, then every set override.
    pub fn resolve(o: Overrides) -> Result<Self, CliError> {
        let command = o.command.ok_or_else(|| CliError::Config("command: missing".into()))?;
        if o.preset.is_some() && command != Command::Converge {
            return Err(CliError::Config("preset: only valid for converge".into()));
        }
        let mut c = Self::defaults(command, o.preset);
        let field = |name: &str, e: &dyn std::fmt::Display| CliError::Config(format!("{name}: {e}"));
        if let Some(b) = o.benchmark.filter(|b| !(command == Command::Exactness && b == "all")) {
            benchmark::<f64>(&b).map_err(|e| field("benchmark", &e))?;
            c.benchmark = b;
        }
        if let Some(s) = o.schemes {
            c.schemes = s.iter().map(|x| x.parse::<Scheme>()).collect::<Result<_, _>>().map_err(|e| field("schemes", &e))?;
        }
        if let Some(h) = o.h_exp {
            c.h_exps = h;
        }
        if let Some(v) = o.samples {
            c.samples = v;
        }
        if let Some(v) = o.seed {
            c.seed = v;
        }
        if let Some(v) = o.area_mode {
            c.area_mode = v;
        }
        if let Some(v) = o.coupling_mode {
            c.coupling_mode = v.parse().map_err(|e| field("coupling-mode", &e))?;
        }
        if let Some(v) = o.substeps {
            c.substeps = v;
        }
        if let Some(v) = o.area_substeps {
            c.area_substeps = v;
        }
        if let Some(v) = o.reference {
            c.reference = v.parse().map_err(|e: String| field("reference", &e))?;
        }
        if let Some(v) = o.estimator {
            c.estimator = v.parse().map_err(|e| field("estimator", &e))?;
        }
        if let Some(v) = o.zero_ito_drift {
            c.zero_ito_drift = v;
        }
        if let Some(v) = o.dim {
            c.dim = v;
        }
        if let Some(v) = o.max_level {
            c.max_level = v;
        }
        if let Some(v) = o.cases {
            c.cases = v;
        }
        if let Some(p) = o.perturb {
            let (name, delta) = p.rsplit_once('=').ok_or_else(|| field("perturb", &"expected TERM=DELTA"))?;
            let delta: f64 = delta.trim().parse().map_err(|e| field("perturb", &e))?;
            c.perturb = Some((name.trim().to_string(), delta));
        }
        if let Some(v) = o.baseline {
            c.baseline = v;
        }
        c.threads = o.threads.or(c.threads);
        c.out = o.out.or(c.out);
        if let Some(v) = o.format {
            c.format = v;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |name: &str, msg: String| Err(CliError::Config(format!("{name}: {msg}")));
        if self.h_exps.is_empty() {
            return bad("h-exp", "must not be empty".into());
        }
        if self.h_exps.windows(2).any(|w| w[0] >= w[1]) {
            return bad("h-exp", format!("must be strictly ascending, got {:?}", self.h_exps));
        }
        if self.command.is_statistical() && self.samples < 100 {
            return bad("samples", format!("statistical commands need at least 100, got {}", self.samples));
        }
        if self.samples == 0 {
            return bad("samples", "must be positive".into());
        }
        if self.schemes.is_empty() {
            return bad("schemes", "must not be empty".into());
        }
        if !(1..=65536).contains(&self.substeps) {
            return bad("substeps", format!("must be in 1..=65536, got {}", self.substeps));
        }
        if self.area_substeps < 2 {
            return bad("area-substeps", format!("must be at least 2, got {}", self.area_substeps));
        }
        if self.threads == Some(0) {
            return bad("threads", "must be positive".into());
        }
        match self.command {
            Command::BchCheck => {
                if !(1..=5).contains(&self.max_level) {
                    return bad("max-level", format!("the tabulated series covers levels 1..=5, got {}", self.max_level));
                }
                if !(1..=3).contains(&self.dim) {
                    return bad("dim", format!("the algebra suite uses d in 1..=3, got {}", self.dim));
                }
                if self.cases == 0 {
                    return bad("cases", "must be positive".into());
                }
            }
            Command::CoupleStats => {
                if self.dim < 2 {
                    return bad("dim", format!("area coupling needs d >= 2, got {}", self.dim));
                }
                if self.coupling_mode == CouplingMode::Exact2d && self.dim != 2 {
                    return bad("dim", format!("exact-2d coupling needs d = 2, got {}", self.dim));
                }
                if let Some(&m) = self.h_exps.last().filter(|&&m| m > 20) {
                    return bad("h-exp", format!("coupling depth {m} exceeds 20"));
                }
            }
            Command::Converge => {
                if let Some(&m) = self.h_exps.last().filter(|&&m| m > 16) {
                    return bad("h-exp", format!("grid exponent {m} exceeds 16"));
                }
                if self.area_mode == AreaMode::Coupled && self.h_exps.iter().any(|&m| m == 0) {
                    return bad("h-exp", "coupled areas need at least two blocks".into());
                }
            }
            Command::Exactness => {
                if let Some(&m) = self.h_exps.last().filter(|&&m| m > 16) {
                    return bad("h-exp", format!("grid exponent {m} exceeds 16"));
                }
            }
        }
        Ok(())
    }
}
