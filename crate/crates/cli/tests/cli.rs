use std::path::PathBuf;
use std::process::{Command as Proc, Output};
use std::time::Instant;

use pathwise_cli::{
    bch_check, converge, couple_stats, exactness, AreaMode, CliError, Command, ExperimentConfig, Format, Overrides,
    ReferenceChoice,
};

fn bin(args: &[&str]) -> Output {
    Proc::new(env!("CARGO_BIN_EXE_pathwise")).args(args).output().expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pathwise-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn cfg(command: Command) -> ExperimentConfig {
    ExperimentConfig::defaults(command, None)
}

fn resolve(o: Overrides) -> Result<ExperimentConfig, CliError> {
    ExperimentConfig::resolve(o)
}

#[test]
fn bch_check_default_and_smoke() {
    let r = bch_check(&cfg(Command::BchCheck)).unwrap();
    assert!(r.passed);
    assert_eq!(r.rows.len(), 4);
    let mut c = cfg(Command::BchCheck);
    c.max_level = 2;
    let t = Instant::now();
    assert!(bch_check(&c).unwrap().passed);
    assert!(t.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn perturbed_table_fails_with_the_term_named() {
    for term in ["[x2,[x1,[x1,x2]]]", "[x1,[x2,[x1,[x2,x1]]]]", "[x1,[x1,x2]]"] {
        let mut c = cfg(Command::BchCheck);
        c.perturb = Some((term.into(), 1e-6));
        let r = bch_check(&c).unwrap();
        assert!(!r.passed);
        let check = r.check("bch-tabulated").unwrap();
        assert!(!check.passed && check.detail.contains(term), "{term}: {}", check.detail);
        assert!(r.check("telescoping").unwrap().passed);
    }
    let out = bin(&["bch-check", "--perturb", "[x2,[x1,[x1,x2]]]=1e-6", "--quiet"]);
    assert_eq!(out.status.code(), Some(1));
    let out = bin(&["bch-check", "--perturb", "[x9,x1]=1e-6"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn couple_stats_single_block() {
    let mut c = cfg(Command::CoupleStats);
    c.h_exps = vec![0];
    c.samples = 100;
    let r = couple_stats(&c).unwrap();
    let scales: Vec<_> = r.rows.iter().filter(|x| x.estimator.starts_with("dyadic")).collect();
    assert_eq!(scales.len(), 1);
    let ratio = r.check("single-block-deviation-over-h").unwrap().value;
    assert!(ratio > 0.0 && ratio < 1.0, "{ratio}");
    assert!(r.passed);
}

#[test]
fn couple_stats_rows_are_canonical() {
    let mut c = cfg(Command::CoupleStats);
    c.h_exps = vec![3, 4];
    c.samples = 100;
    let plain = couple_stats(&c).unwrap();
    assert!(plain.rows.iter().all(|r| r.scheme == "exact-2d"));
    c.baseline = true;
    let r = couple_stats(&c).unwrap();
    assert!(r.rows.iter().any(|x| x.scheme == "independent"));
    let keys: Vec<_> = r.rows.iter().map(|x| (x.scheme.clone(), x.estimator.clone(), x.h)).collect();
    let mut sorted = keys.clone();
    sorted.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)).then(a.2.total_cmp(&b.2)));
    assert_eq!(keys, sorted);
    // growth checks need scale 10 and are informational here
    assert!(!r.check("coupled-growth-2-10").unwrap().gated);
    assert!(r.check("marginal-ks").unwrap().gated);
    c.coupling_mode = pathwise::coupling::CouplingMode::ApproxNd;
    c.dim = 3;
    let r = couple_stats(&c).unwrap();
    assert!(!r.check("marginal-ks").unwrap().gated);
}

#[test]
fn csv_and_json_layout() {
    let r = exactness(&ExperimentConfig { samples: 5, ..cfg(Command::Exactness) }).unwrap();
    let csv = r.to_csv().unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "# pathwise-results v1 command=exactness seed=0");
    let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "benchmark,scheme,estimator,h,value,stderr,n,seed");
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 1 + r.rows.len());
    let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(json["version"], 1);
    assert_eq!(json["passed"], serde_json::Value::Bool(r.passed));
    assert_eq!(json["rows"].as_array().unwrap().len(), r.rows.len());
    let empty = bch_check(&ExperimentConfig { cases: 3, ..cfg(Command::BchCheck) }).unwrap();
    assert!(empty.to_csv().unwrap().contains("algebra,bch-tabulated,max-rel-error"));
}

#[test]
fn configuration_errors_name_the_field() {
    let base = || Overrides { command: Some(Command::Converge), ..Default::default() };
    let cases: Vec<(Overrides, &str)> = vec![
        (Overrides { h_exp: Some(vec![6, 5]), ..base() }, "h-exp"),
        (Overrides { h_exp: Some(vec![]), ..base() }, "h-exp"),
        (Overrides { samples: Some(99), ..base() }, "samples"),
        (Overrides { schemes: Some(vec!["rk9".into()]), ..base() }, "schemes"),
        (Overrides { benchmark: Some("lorenz".into()), ..base() }, "benchmark"),
        (Overrides { coupling_mode: Some("exact-3d".into()), ..base() }, "coupling-mode"),
        (Overrides { reference: Some("nope".into()), ..base() }, "reference"),
        (Overrides { estimator: Some("l1".into()), ..base() }, "estimator"),
        (Overrides { substeps: Some(0), ..base() }, "substeps"),
        (Overrides { threads: Some(0), ..base() }, "threads"),
        (Overrides { command: Some(Command::CoupleStats), dim: Some(3), ..Default::default() }, "dim"),
        (Overrides { command: Some(Command::BchCheck), max_level: Some(6), ..Default::default() }, "max-level"),
        (Overrides { command: Some(Command::BchCheck), perturb: Some("x".into()), ..Default::default() }, "perturb"),
        (Overrides { command: Some(Command::Exactness), preset: Some(pathwise_cli::Preset::Rates), ..Default::default() }, "preset"),
        (Overrides::default(), "command"),
    ];
    for (o, field) in cases {
        match resolve(o) {
            Err(CliError::Config(msg)) => assert!(msg.starts_with(field), "{field}: {msg}"),
            other => panic!("{field}: expected a config error, got {other:?}"),
        }
    }
    // non-statistical commands accept small sample counts
    assert!(resolve(Overrides { command: Some(Command::Exactness), samples: Some(3), ..Default::default() }).is_ok());
}

#[test]
fn binary_exit_codes() {
    assert_eq!(bin(&["converge", "--h-exp", "6,5"]).status.code(), Some(2));
    assert_eq!(bin(&["converge", "--samples", "10"]).status.code(), Some(2));
    assert_eq!(bin(&["--schemes", "euler"]).status.code(), Some(2));
    assert_eq!(bin(&["bogus-command"]).status.code(), Some(2));
    let ok = bin(&["bch-check", "--max-level", "3", "--quiet"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).starts_with("# pathwise-results v1"));
    let help = String::from_utf8_lossy(&bin(&["--help"]).stdout).to_string();
    assert!(help.contains("Gated checks") && help.contains("Informational checks"));
}

#[test]
fn config_file_then_flags() {
    let path = tmp("config.json");
    std::fs::write(&path, r#"{"command": "converge", "benchmark": "rotation", "schemes": ["euler"], "h-exp": [3, 4], "samples": 150, "seed": 9}"#).unwrap();
    let file = Overrides::from_json_file(&path).unwrap();
    let flags = Overrides { samples: Some(120), format: Some(Format::Json), ..Default::default() };
    let c = resolve(file.merge(flags)).unwrap();
    assert_eq!((c.benchmark.as_str(), c.samples, c.seed, c.h_exps.clone()), ("rotation", 120, 9, vec![3, 4]));
    assert_eq!(c.format, Format::Json);
    assert_eq!(c.reference, ReferenceChoice::Auto);
    std::fs::write(&path, r#"{"command": "converge", "colour": "red"}"#).unwrap();
    assert!(matches!(Overrides::from_json_file(&path), Err(CliError::Config(m)) if m.contains("colour")));
    let out = tmp("from-file.csv");
    std::fs::write(&path, r#"{"command": "bch-check", "max-level": 2}"#).unwrap();
    let run = bin(&["--config", path.to_str().unwrap(), "--cases", "10", "--out", out.to_str().unwrap(), "--quiet"]);
    assert_eq!(run.status.code(), Some(0));
    assert!(std::fs::read_to_string(&out).unwrap().contains(",10,0"));
}

#[test]
fn same_seed_same_bytes() {
    let run = |seed: &str, name: &str| {
        let out = tmp(name);
        let args = ["couple-stats", "--h-exp", "2..=4", "--samples", "100", "--seed", seed, "--quiet", "--out"];
        let status = Proc::new(env!("CARGO_BIN_EXE_pathwise")).args(args).arg(&out).status().unwrap();
        assert!(status.code().is_some_and(|c| c <= 1));
        std::fs::read(out).unwrap()
    };
    let a = run("3", "a.csv");
    assert_eq!(a, run("3", "b.csv"));
    assert_ne!(a, run("4", "c.csv"));
}

#[test]
fn h_exp_ranges_match_lists() {
    let a = bin(&["converge", "--benchmark", "rotation", "--schemes", "euler", "--h-exp", "2..=4", "--samples", "100", "--quiet"]);
    let b = bin(&["converge", "--benchmark", "rotation", "--schemes", "euler", "--h-exp", "2,3,4", "--samples", "100", "--quiet"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn exactness_filters_by_benchmark() {
    let mut c = cfg(Command::Exactness);
    c.benchmark = "circle".into();
    c.samples = 10;
    let r = exactness(&c).unwrap();
    assert!(r.rows.iter().all(|x| x.benchmark == "circle"));
    assert!(r.passed);
    c.benchmark = "smooth_2d".into();
    assert!(matches!(exactness(&c), Err(CliError::Config(m)) if m.starts_with("benchmark")));
}

#[test]
fn logode_on_levy_area_is_checked_for_exactness_not_slope() {
    let mut c = cfg(Command::Converge);
    c.benchmark = "levy_area".into();
    c.schemes = vec![pathwise::sde::Scheme::LogOde, pathwise::sde::Scheme::Euler];
    c.h_exps = vec![3, 4, 5];
    c.samples = 100;
    let r = converge(&c).unwrap();
    assert!(r.check("logode-exact").unwrap().passed);
    assert!(r.check("logode-slope").is_none());
    assert!(!r.check("euler-slope").unwrap().gated);
    c.area_mode = AreaMode::Gaussian;
    c.schemes = vec![pathwise::sde::Scheme::GaussianLogOde];
    let r = converge(&c).unwrap();
    assert!(r.check("logode-exact").is_none() && r.passed);
}
