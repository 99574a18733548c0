//! Result rows, checks and their CSV / JSON encodings.

use serde::Serialize;

use crate::config::Format;

pub const RESULTS_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub benchmark: String,
    pub scheme: String,
    pub estimator: String,
    pub h: f64,
    pub value: f64,
    pub stderr: f64,
    pub n: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Slope {
    pub benchmark: String,
    pub scheme: String,
    pub estimator: String,
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// Gated checks decide the exit status; informational ones are only reported.
    pub gated: bool,
    pub passed: bool,
    pub value: f64,
    pub threshold: String,
    pub detail: String,
}

impl Check {
    pub fn new(gated: bool, name: impl Into<String>, passed: bool, value: f64, threshold: impl Into<String>) -> Self {
        Self { name: name.into(), gated, passed, value, threshold: threshold.into(), detail: String::new() }
    }

    pub fn gated(name: impl Into<String>, passed: bool, value: f64, threshold: impl Into<String>) -> Self {
        Self::new(true, name, passed, value, threshold)
    }

    pub fn info(name: impl Into<String>, passed: bool, value: f64, threshold: impl Into<String>) -> Self {
        Self::new(false, name, passed, value, threshold)
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub version: u32,
    pub command: String,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub slopes: Vec<Slope>,
    pub rows: Vec<Row>,
}

impl Report {
    /// Sorts everything by key and sets `passed` from the gated checks.
    pub fn new(command: &str, seed: u64, mut rows: Vec<Row>, mut slopes: Vec<Slope>, mut checks: Vec<Check>) -> Self {
        rows.sort_by(|a, b| {
            (&a.benchmark, &a.scheme, &a.estimator)
                .cmp(&(&b.benchmark, &b.scheme, &b.estimator))
                .then(a.h.total_cmp(&b.h))
        });
        slopes.sort_by(|a, b| (&a.benchmark, &a.scheme, &a.estimator).cmp(&(&b.benchmark, &b.scheme, &b.estimator)));
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let passed = checks.iter().filter(|c| c.gated).all(|c| c.passed);
        Self { version: RESULTS_VERSION, command: command.into(), seed, passed, checks, slopes, rows }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn slope(&self, scheme: &str, estimator: &str) -> Option<f64> {
        self.slopes.iter().find(|s| s.scheme == scheme && s.estimator == estimator).map(|s| s.slope)
    }

    /// `#` lines (version, slopes, checks), then the row table.
    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut head = format!("# pathwise-results v{} command={} seed={}\n", self.version, self.command, self.seed);
        for s in &self.slopes {
            head += &format!(
                "# slope benchmark={} scheme={} estimator={} slope={} intercept={} residual={}\n",
                s.benchmark, s.scheme, s.estimator, s.slope, s.intercept, s.residual
            );
        }
        for c in &self.checks {
            head += &format!(
                "# check name={} gated={} passed={} value={:e} threshold={}\n",
                c.name, c.gated, c.passed, c.value, c.threshold.replace(' ', "")
            );
        }
        head += &format!("# passed={}\n", self.passed);
        let mut w = csv::Writer::from_writer(head.into_bytes());
        if self.rows.is_empty() {
            w.write_record(["benchmark", "scheme", "estimator", "h", "value", "stderr", "n", "seed"])?;
        }
        for r in &self.rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn render(&self, format: Format) -> Result<String, csv::Error> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => Ok(self.to_json()),
        }
    }

    /// One line per check for the terminal.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let tag = match (c.gated, c.passed) {
                (true, true) => "PASS",
                (true, false) => "FAIL",
                (false, true) => "info",
                (false, false) => "info*",
            };
            s += &format!("{tag:5} {} = {:e} ({})", c.name, c.value, c.threshold);
            if !c.detail.is_empty() {
                s += &format!(" {}", c.detail);
            }
            s.push('\n');
        }
        s += &format!("{} {}\n", self.command, if self.passed { "passed" } else { "FAILED" });
        s
    }
}
