use derham::convex::gruber_decompose;
use derham::factorize::{enumerate_witnesses, factorize, generators, isometry_group, verify_exact_sequence, Budget};
use derham::generate::{product_norm, random_polytope_norm, random_product_metric, rotated_euclidean_pair, shuffled_product};
use derham::loewner::max_inscribed_ellipsoid;
use derham::metric::{validate, FiniteMetricSpace, Tolerance};
use derham::norm::{coordinate_decompositions, is_product_decomposition};
use derham::rigidity::{check_strike, composed_projection_eigen, defect, DefectOptions, StrikeOptions, StrikeVerdict};
use serde::Serialize;
use serde_json::{json, Value};

use crate::input::{load_body, load_metric, load_norm, load_pair, parse_component};
use crate::{Command, Kind, Outcome, RunConfig};

fn to_value<T: Serialize>(t: &T) -> Result<Value, String> {
    serde_json::to_value(t).map_err(|e| e.to_string())
}

fn tolerance(config: &RunConfig, space: &FiniteMetricSpace) -> Result<Tolerance, String> {
    let base = Tolerance::for_space(space);
    let tm = config.tol_metric.unwrap_or(base.tol_metric);
    let ts = config.tol_sq.unwrap_or(base.tol_sq);
    Tolerance::new(tm, ts).map_err(|e| format!("tolerance: {e}"))
}

fn budget(config: &RunConfig) -> Budget {
    let mut b = Budget::default();
    if let Some(n) = config.budget {
        b.max_candidates = n;
        b.max_nodes = n;
    }
    b
}

fn defect_options(config: &RunConfig) -> DefectOptions {
    DefectOptions { seed: config.seed, ..DefectOptions::default() }
}

pub fn run(config: &RunConfig) -> Result<Outcome, String> {
    match config.command {
        Command::Validate => {
            let space = load_metric(config)?;
            let r = validate(&space, &tolerance(config, &space)?);
            Ok(Outcome::verdict(json!({ "points": space.len(), "valid": r.is_ok(), "report": r }), r.is_ok()))
        }
        Command::Factor => {
            let space = load_metric(config)?;
            let r = factorize(&space, &tolerance(config, &space)?, &budget(config)).map_err(|e| e.to_string())?;
            let sizes: Vec<usize> = r.factors.iter().map(|f| f.len()).collect();
            Ok(Outcome::positive(json!({ "factor_sizes": sizes, "report": to_value(&r)? })))
        }
        Command::Witnesses => {
            let space = load_metric(config)?;
            let s = enumerate_witnesses(&space, &tolerance(config, &space)?, &budget(config)).map_err(|e| e.to_string())?;
            let labels: Vec<Value> = s
                .witnesses
                .iter()
                .map(|w| json!({ "sizes": [w.y_factor().len(), w.ybar_factor().len()], "labels": w.to_labels() }))
                .collect();
            let found = !labels.is_empty();
            Ok(Outcome::verdict(json!({ "complete": s.complete, "count": labels.len(), "witnesses": labels }), found))
        }
        Command::Isometries => {
            let space = load_metric(config)?;
            let g = isometry_group(&space, &tolerance(config, &space)?, &budget(config)).map_err(|e| e.to_string())?;
            Ok(Outcome::positive(json!({ "order": g.len(), "generators": generators(&g) })))
        }
        Command::ExactSequence => {
            let space = load_metric(config)?;
            let tol = tolerance(config, &space)?;
            let b = budget(config);
            let f = factorize(&space, &tol, &b).map_err(|e| e.to_string())?;
            let r = verify_exact_sequence(&space, &f, &tol, &b).map_err(|e| e.to_string())?;
            Ok(Outcome::verdict(json!({ "report": to_value(&r)? }), r.exact))
        }
        Command::NormDecompose => {
            let norm = load_norm(config)?;
            let found = coordinate_decompositions(&norm, 512, config.seed);
            let mut out = Vec::new();
            for (s1, s2) in &found {
                let check = is_product_decomposition(&norm, s1, s2, 512, config.seed).map_err(|e| e.to_string())?;
                out.push(json!({ "first": s1, "second": s2, "check": check }));
            }
            let any = !out.is_empty();
            Ok(Outcome::verdict(json!({ "dim": norm.dim(), "decompositions": out }), any))
        }
        Command::Loewner => {
            let norm = load_norm(config)?;
            let r = max_inscribed_ellipsoid(&norm).map_err(|e| e.to_string())?;
            Ok(Outcome::positive(json!({ "report": r })))
        }
        Command::Gruber => {
            let (body, gram) = load_body(config)?;
            let d = gruber_decompose(&body, gram.as_ref());
            let parts: Vec<Value> = d
                .parts
                .iter()
                .map(|p| {
                    let verts: Vec<Vec<f64>> = p.body.vertices().iter().map(|v| v.iter().copied().collect()).collect();
                    json!({ "subspace": p.subspace, "dim": p.subspace.dim(), "vertices": verts, "indecomposable": p.indecomposable })
                })
                .collect();
            Ok(Outcome::positive(json!({
                "parts": parts,
                "lineality_part": d.lineality_part,
                "orthogonal": d.orthogonal,
                "ambiguous": d.ambiguous,
                "partial": d.partial,
            })))
        }
        Command::Defect => {
            let norm = load_norm(config)?;
            Ok(Outcome::positive(json!({ "report": defect(&norm, &defect_options(config)) })))
        }
        Command::Eigen => {
            let pp = load_pair(config)?;
            let r = composed_projection_eigen(&pp, config.seed).map_err(|e| e.to_string())?;
            Ok(Outcome::verdict(json!({ "report": r }), r.pass))
        }
        Command::Strike => {
            let pp = load_pair(config)?;
            let opts = StrikeOptions { defect: defect_options(config), ..StrikeOptions::default() };
            let v = check_strike(&pp, &opts).map_err(|e| e.to_string())?;
            let ok = matches!(v, StrikeVerdict::EuclideanConfirmed { .. });
            Ok(Outcome::verdict(to_value(&v)?, ok))
        }
        Command::Generate => generate(config),
    }
}

fn generate(config: &RunConfig) -> Result<Outcome, String> {
    let kind = config.kind.ok_or("generate needs --kind")?;
    let need_dim = || config.dim.ok_or_else(|| "this kind needs --dim".to_string());
    let inst = match kind {
        Kind::RandomProductMetric => random_product_metric(&config.sizes, config.seed),
        Kind::ShuffledProduct => shuffled_product(&config.sizes, config.seed),
        Kind::RandomPolytopeNorm => {
            let d = need_dim()?;
            random_polytope_norm(d, config.vertices.unwrap_or(2 * d), config.seed)
        }
        Kind::ProductNorm => {
            let comps = config.components.iter().map(|s| parse_component(s)).collect::<Result<Vec<_>, _>>()?;
            product_norm(comps)
        }
        Kind::RotatedEuclideanPair => rotated_euclidean_pair(need_dim()?, config.seed),
    }
    .map_err(|e| e.to_string())?;
    Ok(Outcome::positive(to_value(&inst)?))
}
