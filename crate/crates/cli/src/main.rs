use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use pathwise_cli::{execute, AreaMode, Command, ExperimentConfig, Format, Overrides, Preset, CHECKS_HELP, EXIT_CONFIG};

/// Experiments for level-2 log-ODE schemes, area couplings and the tensor algebra.
///
/// Settings come from built-in defaults, then --config, then flags.
/// Exit status: 0 all gated checks pass, 1 a gated check failed, 2 configuration error.
#[derive(Parser, Debug)]
#[command(name = "pathwise", version, after_help = CHECKS_HELP)]
struct Cli {
    /// Command to run (may also come from the config file).
    #[arg(value_enum)]
    command: Option<Command>,
    /// JSON config file; keys are the long flag names.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Converge preset with gated thresholds.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    #[arg(long)]
    benchmark: Option<String>,
    /// Comma-separated scheme names.
    #[arg(long, value_delimiter = ',')]
    schemes: Option<Vec<String>>,
    /// Grid exponents e (h = 2^-e): a list such as 4,5,6 or a range 4..=9.
    #[arg(long, value_parser = parse_h_exp)]
    h_exp: Option<HExp>,
    /// Paths or replications.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    area_mode: Option<AreaMode>,
    /// exact-2d or approx-nd.
    #[arg(long)]
    coupling_mode: Option<String>,
    /// Flow sub-steps per block.
    #[arg(long)]
    substeps: Option<usize>,
    /// Bridge sub-steps of the reference area sampler.
    #[arg(long)]
    area_substeps: Option<usize>,
    /// auto, exact, fine, or a scheme name.
    #[arg(long)]
    reference: Option<String>,
    /// strong-max, fixed-time or terminal-norm-w2.
    #[arg(long)]
    estimator: Option<String>,
    /// Replace the benchmark drift by a zero Ito drift.
    #[arg(long)]
    zero_ito_drift: bool,
    /// Dimension d (bch-check: largest path dimension; couple-stats: driver dimension).
    #[arg(long)]
    dim: Option<usize>,
    /// Largest truncation level of the algebra suite.
    #[arg(long)]
    max_level: Option<usize>,
    /// Random cases per algebra identity.
    #[arg(long)]
    cases: Option<usize>,
    /// Shift one BCH table coefficient, TERM=DELTA (negative control).
    #[arg(long)]
    perturb: Option<String>,
    /// Report the independent-resampling baseline and gate its growth.
    #[arg(long)]
    baseline: bool,
    /// Worker thread cap.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Suppress the check summary on stderr.
    #[arg(long)]
    quiet: bool,
}

#[derive(Clone, Debug)]
struct HExp(Vec<u32>);

fn parse_h_exp(s: &str) -> Result<HExp, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim) {
        match part.split_once("..=") {
            Some((a, b)) => {
                let a: u32 = a.parse().map_err(|e| format!("{part}: {e}"))?;
                let b: u32 = b.parse().map_err(|e| format!("{part}: {e}"))?;
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|e| format!("{part}: {e}"))?),
        }
    }
    Ok(HExp(out))
}

impl Cli {
    fn overrides(self) -> (Option<PathBuf>, Overrides, bool) {
        let o = Overrides {
            command: self.command,
            preset: self.preset,
            benchmark: self.benchmark,
            schemes: self.schemes,
            h_exp: self.h_exp.map(|h| h.0),
            samples: self.samples,
            seed: self.seed,
            area_mode: self.area_mode,
            coupling_mode: self.coupling_mode,
            substeps: self.substeps,
            area_substeps: self.area_substeps,
            reference: self.reference,
            estimator: self.estimator,
            zero_ito_drift: self.zero_ito_drift.then_some(true),
            dim: self.dim,
            max_level: self.max_level,
            cases: self.cases,
            perturb: self.perturb,
            baseline: self.baseline.then_some(true),
            threads: self.threads,
            out: self.out,
            format: self.format,
        };
        (self.config, o, self.quiet)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG as u8 } else { 0 });
        }
    };
    let (file, flags, quiet) = cli.overrides();
    let resolved = file
        .map(|p| Overrides::from_json_file(&p))
        .transpose()
        .and_then(|base| ExperimentConfig::resolve(base.unwrap_or_default().merge(flags)));
    let cfg = match resolved {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match execute(&cfg, &mut std::io::stdout().lock()) {
        Ok((report, code)) => {
            if !quiet {
                eprint!("{}", report.summary());
            }
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
