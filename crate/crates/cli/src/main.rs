//! `spectral-sk <task> --config <file> [--tol X] [--out PATH] [--format csv|json] [--bless]`
//!
//! Exit codes: 0 success, 2 assertion failure, 3 numeric non-convergence,
//! 4 configuration error. Diagnostics go to standard error, one JSON object
//! per line.

mod config;
mod error;
mod tasks;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;
use spectral_sk::golden;

use config::{Format, JobConfig, Task};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "spectral-sk", version, about = "Special Kähler potentials and metrics on spectral-curve bases")]
struct Args {
    task: Task,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Recompute golden values with their oracles and write the store.
    #[arg(long)]
    bless: bool,
}

fn diagnostic(level: &str, fields: serde_json::Value) {
    let mut record = json!({ "level": level });
    if let (Some(r), Some(f)) = (record.as_object_mut(), fields.as_object()) {
        r.extend(f.clone());
    }
    eprintln!("{record}");
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("SPECTRAL_SK_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("SPECTRAL_SK_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn load_config(args: &Args) -> Result<JobConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            JobConfig::parse(&text)?
        }
        None => JobConfig::default(),
    };
    if let Some(t) = cfg.task {
        if t != args.task {
            return Err(CliError::Config(format!(
                "config names task {t:?} but {:?} was requested",
                args.task
            )));
        }
    }
    if args.tol.is_some() {
        cfg.numeric.tol = args.tol;
    }
    if args.out.is_some() {
        cfg.output.path = args.out.clone();
    }
    if args.format.is_some() {
        cfg.output.format = args.format;
    }
    cfg.normalized(args.task)
}

fn bless(cfg: &JobConfig) -> Result<(), CliError> {
    let path = tasks::golden_path(cfg);
    let store = golden::bless().map_err(CliError::NonConvergence)?;
    store.save(&path).map_err(CliError::Config)?;
    diagnostic(
        "info",
        json!({ "event": "blessed", "path": path.display().to_string(), "entries": store.entries.len() }),
    );
    Ok(())
}

fn render(cfg: &JobConfig, artifact: &tasks::Artifact) -> String {
    match cfg.format() {
        Format::Csv => artifact.csv.clone(),
        Format::Json => {
            let report = json!({ "config": cfg, "result": artifact.result });
            let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
            s.push('\n');
            s
        }
    }
}

fn run(args: &Args) -> Result<(), CliError> {
    configure_threads()?;
    let cfg = load_config(args)?;
    if args.bless {
        bless(&cfg)?;
    }
    let artifact = tasks::run(args.task, &cfg)?;
    let text = render(&cfg, &artifact);
    match &cfg.output.path {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    match artifact.failure {
        Some(msg) => Err(CliError::Assertion(msg)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            diagnostic("error", json!({ "kind": "config", "exit_code": 4, "message": e.to_string().trim() }));
            return ExitCode::from(4);
        }
    };
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = e.exit_code();
            diagnostic("error", json!({ "kind": e.kind(), "exit_code": code, "message": e.to_string() }));
            ExitCode::from(code as u8)
        }
    }
}
