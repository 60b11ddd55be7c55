use std::path::Path;

use derham::convex::{BodySpec, ConvexBody};
use derham::linalg::Subspace;
use derham::metric::FiniteMetricSpace;
use derham::norm::NormedSpace;
use derham::rigidity::ProjectionPair;
use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use crate::{Format, RunConfig, SCHEMA};

fn read_json(path: &Path) -> Result<Value, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    match v.get("schema") {
        None => Ok(v),
        Some(Value::String(s)) if s == SCHEMA => Ok(v),
        Some(other) => Err(format!("{}: field `schema`: expected \"{SCHEMA}\", found {other}", path.display())),
    }
}

/// Deserializes, naming the first offending field on failure.
fn parse<T: DeserializeOwned>(v: Value, what: &str) -> Result<T, String> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            format!("{what}: {}", e.inner())
        } else {
            format!("{what}: field `{path}`: {}", e.inner())
        }
    })
}

fn required<'a>(p: &'a Option<std::path::PathBuf>, flag: &str) -> Result<&'a Path, String> {
    p.as_deref().ok_or_else(|| format!("missing --{flag}"))
}

#[derive(Deserialize)]
struct MetricFile {
    #[serde(default)]
    labels: Option<Vec<String>>,
    dist: Vec<Vec<f64>>,
}

fn metric_from_csv(path: &Path) -> Result<FiniteMetricSpace, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let mut labels = None;
    let mut rows = Vec::new();
    for (r, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| format!("{}: {e}", path.display()))?;
        let parsed: Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(_) if r == 0 => labels = Some(rec.iter().map(String::from).collect::<Vec<_>>()),
            Err(e) => return Err(format!("{}: row {}: {e}", path.display(), r + 1)),
        }
    }
    build_metric(labels, &rows)
}

fn build_metric(labels: Option<Vec<String>>, rows: &[Vec<f64>]) -> Result<FiniteMetricSpace, String> {
    let res = match labels {
        Some(l) => FiniteMetricSpace::from_rows(l, rows),
        None => FiniteMetricSpace::unlabeled(rows),
    };
    res.map_err(|e| format!("field `dist`: {e}"))
}

pub fn load_metric(config: &RunConfig) -> Result<FiniteMetricSpace, String> {
    let path = required(&config.input, "input")?;
    if config.format == Format::Csv {
        return metric_from_csv(path);
    }
    let mut v = read_json(path)?;
    if v.get("kind").is_some() {
        v = v.get("space").cloned().ok_or("field `space`: missing in instance file")?;
    }
    let f: MetricFile = parse(v, "metric")?;
    build_metric(f.labels, &f.dist)
}

fn norm_value(v: &Value) -> Value {
    if v.get("kind").is_some() || v.get("form").is_none() {
        if let Some(n) = v.get("norm") {
            return n.clone();
        }
    }
    v.clone()
}

pub fn load_norm(config: &RunConfig) -> Result<NormedSpace, String> {
    let path = required(&config.norm, "norm")?;
    parse(norm_value(&read_json(path)?), "norm")
}

#[derive(Deserialize)]
struct PairFile {
    a: Subspace,
    abar: Subspace,
    b: Subspace,
    bbar: Subspace,
}

/// `{"norm": …, "a": …, "abar": …, "b": …, "bbar": …}`, or a generated
/// `rotated-euclidean-pair` instance. `--norm` overrides the embedded norm.
pub fn load_pair(config: &RunConfig) -> Result<ProjectionPair, String> {
    let path = required(&config.input, "input")?;
    let v = read_json(path)?;
    let norm = match &config.norm {
        Some(_) => load_norm(config)?,
        None => parse(v.get("norm").cloned().ok_or("field `norm`: missing (or pass --norm)")?, "norm")?,
    };
    let subs = v.get("ground_truth").filter(|_| v.get("kind").is_some()).cloned().unwrap_or(v);
    let f: PairFile = parse(subs, "pair")?;
    ProjectionPair::new(norm, f.a, f.abar, f.b, f.bbar).map_err(|e| e.to_string())
}

pub fn load_body(config: &RunConfig) -> Result<(ConvexBody, Option<DMatrix<f64>>), String> {
    let path = required(&config.input, "input")?;
    let spec: BodySpec = parse(read_json(path)?, "body")?;
    let body = spec.body().map_err(|e| format!("body: {e}"))?;
    let gram = spec.gram_matrix().map_err(|e| format!("field `gram`: {e}"))?;
    if let Some(g) = &gram {
        if g.nrows() != body.dim() {
            return Err(format!("field `gram`: {}×{} matrix for a body in dimension {}", g.nrows(), g.ncols(), body.dim()));
        }
    }
    Ok((body, gram))
}

/// `linf:2`, `l1:3`, `l2:2` or `p<exponent>:<dim>`.
pub fn parse_component(s: &str) -> Result<NormedSpace, String> {
    let (name, dim) = s.split_once(':').ok_or_else(|| format!("component {s:?}: expected name:dim"))?;
    let dim: usize = dim.parse().map_err(|_| format!("component {s:?}: bad dimension"))?;
    if dim == 0 {
        return Err(format!("component {s:?}: dimension must be positive"));
    }
    let p = match name {
        "linf" => f64::INFINITY,
        "l1" => 1.0,
        "l2" => 2.0,
        _ => name
            .strip_prefix('p')
            .and_then(|x| x.parse().ok())
            .ok_or_else(|| format!("component {s:?}: unknown norm {name:?}"))?,
    };
    if p == 2.0 {
        return Ok(NormedSpace::euclidean(dim));
    }
    NormedSpace::p_norm(p, dim).map_err(|e| format!("component {s:?}: {e}"))
}
