//! The desk-scale linear programs in this crate: convex-hull membership,
//! edge tests, and gauge evaluation of vertex-form norms.

use microlp::{ComparisonOp, Error, LinearExpr, OptimizationDirection, Problem};
use nalgebra::DMatrix;

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

#[derive(Debug, Clone)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

fn solve(p: &Problem, vars: &[microlp::Variable]) -> LpOutcome {
    match p.solve().map(|o| o.into_solution()) {
        Ok(Ok(s)) => LpOutcome::Optimal(LpSolution {
            x: vars.iter().map(|&v| s.var_value(v)).collect(),
            objective: s.objective(),
        }),
        Err(Error::Unbounded) => LpOutcome::Unbounded,
        _ => LpOutcome::Infeasible,
    }
}

fn row(a: &DMatrix<f64>, i: usize, vars: &[microlp::Variable]) -> LinearExpr {
    let mut e = LinearExpr::empty();
    for (j, &v) in vars.iter().enumerate() {
        if a[(i, j)] != 0.0 {
            e.add(v, a[(i, j)]);
        }
    }
    e
}

/// Minimizes `cᵀx` over `{x ≥ 0 : A x = b}`.
pub fn minimize(c: &[f64], a: &DMatrix<f64>, b: &[f64]) -> LpOutcome {
    assert_eq!(c.len(), a.ncols());
    assert_eq!(b.len(), a.nrows());
    let mut p = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = c.iter().map(|&cj| p.add_var(cj, (0.0, f64::INFINITY))).collect();
    for (i, &bi) in b.iter().enumerate() {
        p.add_constraint(row(a, i, &vars), ComparisonOp::Eq, bi);
    }
    solve(&p, &vars)
}

/// Maximizes `cᵀy` over `{y : G y ≤ h}` with `y` free.
pub fn maximize_free(c: &[f64], g: &DMatrix<f64>, h: &[f64]) -> LpOutcome {
    assert_eq!(c.len(), g.ncols());
    assert_eq!(h.len(), g.nrows());
    let mut p = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = c.iter().map(|&cj| p.add_var(cj, (f64::NEG_INFINITY, f64::INFINITY))).collect();
    for (i, &hi) in h.iter().enumerate() {
        p.add_constraint(row(g, i, &vars), ComparisonOp::Le, hi);
    }
    solve(&p, &vars)
}

/// Whether `{x ≥ 0 : A x = b}` is nonempty.
pub fn feasible(a: &DMatrix<f64>, b: &[f64]) -> bool {
    let zero = vec![0.0; a.ncols()];
    !matches!(minimize(&zero, a, b), LpOutcome::Infeasible)
}
