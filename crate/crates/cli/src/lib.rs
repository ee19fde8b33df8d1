//! Experiment runner behind the `qrf-lab` binary.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use qrf_core::config::{parse_config, preset, presets};
use qrf_core::verify::report::format_float;
use qrf_core::verify::{run_checks, CheckReport, ExperimentSpec, InvariantReport};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;

pub const CSV_COLUMNS: [&str; 7] = ["trial", "context", "alpha", "lhs", "rhs", "residual", "extras"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    File(PathBuf),
    Preset(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: Source,
    pub out_dir: PathBuf,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
    pub alphas: Option<Vec<f64>>,
    pub formats: Vec<Format>,
    pub quiet: bool,
}

impl RunConfig {
    pub fn new(source: Source, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            source,
            out_dir: out_dir.into(),
            trials: None,
            seed: None,
            tolerance: None,
            alphas: None,
            formats: vec![Format::Json],
            quiet: false,
        }
    }
}

/// Loads the spec and applies command-line overrides.
pub fn load_spec(cfg: &RunConfig) -> Result<ExperimentSpec> {
    let mut spec = match &cfg.source {
        Source::File(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read config {}", path.display()))?;
            parse_config(&text).with_context(|| format!("invalid config {}", path.display()))?
        }
        Source::Preset(name) => preset(name)?,
    };
    if let Some(t) = cfg.trials {
        spec.trials = t;
    }
    if let Some(s) = cfg.seed {
        spec.seed = s;
    }
    if let Some(t) = cfg.tolerance {
        spec.tolerance = Some(t);
    }
    if let Some(a) = &cfg.alphas {
        spec.alphas = a.clone();
    }
    spec.validate().context("invalid overrides")?;
    Ok(spec)
}

fn csv_extras(check: &CheckReport, row: usize) -> String {
    check.rows[row]
        .extras
        .iter()
        .map(|(k, v)| format!("{k}={}", format_float(*v)))
        .collect::<Vec<_>>()
        .join(";")
}

pub fn write_csv(check: &CheckReport, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    w.write_record(CSV_COLUMNS)?;
    for (k, r) in check.rows.iter().enumerate() {
        w.write_record([
            r.trial.to_string(),
            r.context.clone(),
            r.alpha.map(format_float).unwrap_or_default(),
            format_float(r.lhs),
            format_float(r.rhs),
            format_float(r.residual),
            csv_extras(check, k),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_outputs(report: &InvariantReport, cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(&cfg.out_dir)
        .with_context(|| format!("cannot create output directory {}", cfg.out_dir.display()))?;
    let mut written = Vec::new();
    if cfg.formats.contains(&Format::Json) {
        let path = cfg.out_dir.join("report.json");
        fs::write(&path, report.to_json()?).with_context(|| format!("cannot write {}", path.display()))?;
        written.push(path);
    }
    if cfg.formats.contains(&Format::Csv) {
        for c in &report.checks {
            let path = cfg.out_dir.join(format!("{}.csv", c.name.name()));
            write_csv(c, &path)?;
            written.push(path);
        }
    }
    Ok(written)
}

pub fn summary_line(c: &CheckReport) -> String {
    format!(
        "{} {:<22} max_residual={:.3e} tol={:.1e} trials={} excluded={} violations={}",
        if c.passed { "PASS" } else { "FAIL" },
        c.name.name(),
        c.max_residual,
        c.tolerance,
        c.trials_run,
        c.trials_excluded,
        c.violations,
    )
}

/// Runs the experiment and writes outputs; returns the report.
pub fn execute(cfg: &RunConfig, out: &mut dyn Write) -> Result<InvariantReport> {
    let spec = load_spec(cfg)?;
    let report = run_checks(&spec)?;
    let written = write_outputs(&report, cfg)?;
    if !cfg.quiet {
        for c in &report.checks {
            writeln!(out, "{}", summary_line(c))?;
        }
        if let Some(w) = &report.witness {
            writeln!(out, "witness: attempt {} frames {}/{} gap {:.6e}", w.attempt, w.frames[0], w.frames[1], w.gap)?;
        }
        for p in &written {
            writeln!(out, "wrote {}", p.display())?;
        }
        writeln!(out, "{}", if report.passed { "all checks passed" } else { "some checks failed" })?;
    }
    Ok(report)
}

/// Exit status of a run: 0 pass, 1 error, 2 check failure.
pub fn run(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match execute(cfg, out) {
        Ok(r) if r.passed => EXIT_PASS,
        Ok(_) => EXIT_CHECK_FAILED,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_ERROR
        }
    }
}

pub fn list_presets(out: &mut dyn Write, full: bool) -> Result<()> {
    for p in presets() {
        writeln!(out, "{:<24} {}", p.name, p.description)?;
        if full {
            writeln!(out, "{}", p.document.trim())?;
            writeln!(out)?;
        }
    }
    Ok(())
}

pub fn check_formats(formats: &[Format]) -> Result<()> {
    if formats.is_empty() {
        bail!("at least one output format is required");
    }
    Ok(())
}
