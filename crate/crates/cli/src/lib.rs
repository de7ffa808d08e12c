//! The `wavekin` experiment harness: strict configs, deterministic CSV
//! output, verdicts and plot files for every experiment of the laboratory.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod plot;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::json;

pub use config::{Experiment, ExperimentConfig, Materialized};
pub use error::{CliError, Result};
pub use output::{Check, Outcome, Table};

pub const MANIFEST: &str = "manifest.json";
pub const VERDICT: &str = "verdict.txt";
pub const CONFIG_ECHO: &str = "config.json";
pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

#[derive(Debug)]
pub struct RunReport {
    pub out_dir: PathBuf,
    pub outcome: Outcome,
}

impl RunReport {
    pub fn verdict(&self) -> Option<bool> {
        self.outcome.verdict()
    }
}

/// Parses and materializes a config file, applying the `--seed` override.
pub fn load_config(path: &Path, seed: Option<u64>) -> Result<Materialized> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let m = ExperimentConfig::from_json(&text)?.materialize()?;
    match seed {
        Some(s) => m.with_seed(s),
        None => Ok(m),
    }
}

/// Runs an experiment on a pool of `threads` workers (all cores when `None`).
pub fn run_in_pool(cfg: &Materialized, threads: Option<usize>) -> Result<Outcome> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(error::invalid("`--threads` must be >= 1"));
        }
        b = b.num_threads(n);
    }
    let pool = b
        .build()
        .map_err(|e| error::invalid(format!("thread pool: {e}")))?;
    pool.install(|| experiments::run(cfg))
}

/// Runs a config file and writes the manifest, CSVs and verdict.
pub fn run_file(config: &Path, opts: &RunOptions) -> Result<RunReport> {
    let cfg = load_config(config, opts.seed)?;
    run_config(&cfg, opts)
}

pub fn run_config(cfg: &Materialized, opts: &RunOptions) -> Result<RunReport> {
    let out_dir = opts
        .out
        .clone()
        .or_else(|| cfg.config().output.clone())
        .unwrap_or_else(|| PathBuf::from("runs").join(cfg.experiment().name()));
    let start = Instant::now();
    let outcome = run_in_pool(cfg, opts.threads)?;
    let wall = start.elapsed().as_secs_f64();
    fs::create_dir_all(&out_dir).map_err(|e| CliError::io(&out_dir, e))?;
    write_outputs(cfg, &outcome, &out_dir, opts.threads, wall)?;
    Ok(RunReport { out_dir, outcome })
}

/// `rho = (epsilon / nu)^{1/2}`, one value per swept `epsilon` when there is a sweep.
fn rho_entry(cfg: &Materialized) -> serde_json::Value {
    match (cfg.rho(), cfg.model().nu, &cfg.sweep().epsilons) {
        (Some(r), _, _) => json!(r),
        (None, Some(nu), Some(eps)) => eps
            .iter()
            .map(|&e| json!({ "epsilon": e, "rho": (e / nu).sqrt() }))
            .collect(),
        _ => serde_json::Value::Null,
    }
}

fn write_outputs(
    cfg: &Materialized,
    outcome: &Outcome,
    dir: &Path,
    threads: Option<usize>,
    wall: f64,
) -> Result<()> {
    let mut files = Vec::new();
    for t in &outcome.tables {
        t.write(dir)?;
        files.push(t.file_name());
    }
    if let Some(text) = outcome.verdict_text() {
        output::write_text(&dir.join(VERDICT), &text)?;
        files.push(VERDICT.to_owned());
    }
    // the echo omits the output directory so a rerun is placed by `--out`
    let mut echo = cfg.config().clone();
    echo.output = None;
    let echo_text = serde_json::to_string_pretty(&echo).expect("config serializes") + "\n";
    output::write_text(&dir.join(CONFIG_ECHO), &echo_text)?;
    files.push(CONFIG_ECHO.to_owned());
    let manifest = json!({
        "manifest_version": MANIFEST_VERSION,
        "experiment": cfg.experiment(),
        "config": echo,
        "rho": rho_entry(cfg),
        "seed": cfg.seed(),
        "versions": {
            "wavekin": env!("CARGO_PKG_VERSION"),
            "wavekin-core": wavekin_core::VERSION,
        },
        "threads": threads.unwrap_or_else(rayon::current_num_threads),
        "wall_time_seconds": wall,
        "outputs": files,
        "verdict": outcome.verdict().map(|v| if v { "PASS" } else { "FAIL" }),
        "checks": outcome.checks,
        "notes": outcome.notes,
        "summary": outcome.summary,
    });
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    output::write_text(&dir.join(MANIFEST), &text)
}
