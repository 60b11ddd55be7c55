//! `derham`: product decompositions of finite metric spaces and normed spaces
//! from the command line.
//!
//! Every run writes one JSON report carrying `"schema": "derham/1"` and the
//! echoed configuration. Exit status 0 means success, 2 a verified negative
//! answer, and 1 a malformed input or a refused precondition.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

pub const SCHEMA: &str = "derham/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Validate,
    Factor,
    Witnesses,
    Isometries,
    ExactSequence,
    NormDecompose,
    Loewner,
    Gruber,
    Defect,
    Eigen,
    Strike,
    Generate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    RandomProductMetric,
    ShuffledProduct,
    RandomPolytopeNorm,
    ProductNorm,
    RotatedEuclideanPair,
}

#[derive(Debug, Clone, Parser, Serialize)]
#[command(name = "derham", version, about = "Product decompositions of metric and normed spaces")]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// Distance matrix, convex body, or projection pair.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Norm description.
    #[arg(long)]
    pub norm: Option<PathBuf>,
    #[arg(long)]
    pub tol_metric: Option<f64>,
    #[arg(long)]
    pub tol_sq: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Node and candidate cap for the combinatorial searches.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Report path; standard output when absent.
    #[arg(long)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
    /// Format of `--input` distance matrices.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Instance kind for `generate`.
    #[arg(long, value_enum)]
    pub kind: Option<Kind>,
    /// Factor sizes for metric instances, e.g. `2,3`.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Vec<usize>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Vertex count for random polytope norms.
    #[arg(long)]
    pub vertices: Option<usize>,
    /// Product-norm components, e.g. `linf:2,l1:2,p3:1,l2:2`.
    #[arg(long, value_delimiter = ',')]
    pub components: Vec<String>,
}

/// Successful run: the report and whether the answer was negative.
pub struct Outcome {
    pub report: Value,
    pub negative: bool,
}

impl Outcome {
    pub fn positive(report: Value) -> Self {
        Self { report, negative: false }
    }

    pub fn verdict(report: Value, ok: bool) -> Self {
        Self { report, negative: !ok }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("DERHAM_THREADS") else { return Ok(()) };
    let n: usize = raw.trim().parse().map_err(|_| format!("DERHAM_THREADS: not a thread count: {raw:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global().map_err(|e| e.to_string())
}

fn emit(config: &RunConfig, body: Value) -> Result<(), String> {
    let mut doc = json!({ "schema": SCHEMA, "command": config.command, "config": config });
    if let (Value::Object(d), Value::Object(b)) = (&mut doc, body) {
        d.extend(b);
    }
    let text = serde_json::to_string_pretty(&doc).map_err(|e| e.to_string())? + "\n";
    match &config.output {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let config = RunConfig::parse();
    let result = configure_threads().and_then(|()| commands::run(&config));
    let (body, code) = match result {
        Ok(o) => {
            let code = if o.negative { 2 } else { 0 };
            (o.report, code)
        }
        Err(msg) => {
            eprintln!("derham: {msg}");
            (json!({ "error": msg }), 1)
        }
    };
    if let Err(e) = emit(&config, body) {
        eprintln!("derham: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}
