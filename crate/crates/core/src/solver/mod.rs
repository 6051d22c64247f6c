//! Flattened MILP models and a reference solver.
//!
//! LPs are solved by a sparse bounded-variable revised simplex; MILPs by
//! best-bound branch and bound over the binary columns. Models can be
//! written to and read from fixed MPS and CPLEX LP text, and externally
//! computed solutions can be imported and checked.

mod bnb;
pub mod import;
pub mod lp_format;
mod lu;
pub mod mps;
mod presolve;
mod simplex;

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{LinExpr, LinearConstraint, Sense};
use crate::graph::{Domain, VariableDef};

pub use import::import_solution;
pub use lp_format::{export_lp, parse_lp};
pub use mps::{export_mps, parse_mps};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("row {row} references column {column} outside the model")]
    ColumnOutOfRange { row: usize, column: usize },
    #[error("row {row} has a non-finite right-hand side or coefficient")]
    NonFiniteRow { row: usize },
    #[error("objective has a non-finite coefficient")]
    NonFiniteObjective,
    #[error("column {column} has invalid bounds")]
    InvalidBounds { column: usize },
    #[error("invalid solver options: {0}")]
    InvalidOptions(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("no value given for column `{0}`")]
    MissingColumn(String),
    #[error("imported point is infeasible: max residual {residual:.3e} at {location}")]
    InfeasiblePoint { residual: f64, location: String },
}

/// A minimization problem over flat column indices.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MilpModel {
    pub columns: Vec<VariableDef>,
    pub rows: Vec<LinearConstraint<usize>>,
    pub objective: LinExpr<usize>,
}

/// Largest violation found when checking a point against a model.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub residual: f64,
    pub location: String,
}

impl MilpModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_column(&mut self, def: VariableDef) -> usize {
        self.columns.push(def);
        self.columns.len() - 1
    }

    pub fn add_row(&mut self, row: LinearConstraint<usize>) -> usize {
        self.rows.push(row);
        self.rows.len() - 1
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn binaries(&self) -> Vec<usize> {
        (0..self.columns.len())
            .filter(|&j| self.columns[j].is_binary())
            .collect()
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let n = self.columns.len();
        for (j, c) in self.columns.iter().enumerate() {
            if c.validate().is_err() {
                return Err(SolverError::InvalidBounds { column: j });
            }
        }
        for (r, row) in self.rows.iter().enumerate() {
            if !row.rhs().is_finite() {
                return Err(SolverError::NonFiniteRow { row: r });
            }
            for &(j, a) in row.body().terms() {
                if j >= n {
                    return Err(SolverError::ColumnOutOfRange { row: r, column: j });
                }
                if !a.is_finite() {
                    return Err(SolverError::NonFiniteRow { row: r });
                }
            }
        }
        let obj = &self.objective;
        if !obj.constant_value().is_finite()
            || obj.terms().iter().any(|&(j, a)| j >= n || !a.is_finite())
        {
            return Err(SolverError::NonFiniteObjective);
        }
        Ok(())
    }

    /// Same model with every binary treated as continuous in `[0, 1]`.
    pub fn relaxed(&self) -> Self {
        let mut m = self.clone();
        for c in &mut m.columns {
            c.domain = Domain::Continuous;
        }
        m
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.evaluate(|j| values[j])
    }

    /// Largest row, bound or integrality violation of `values`.
    pub fn max_violation(&self, values: &[f64]) -> Violation {
        let mut worst = Violation {
            residual: 0.0,
            location: String::from("none"),
        };
        let mut note = |r: f64, loc: &dyn Fn() -> String| {
            if r > worst.residual {
                worst = Violation {
                    residual: r,
                    location: loc(),
                };
            }
        };
        for (j, c) in self.columns.iter().enumerate() {
            let v = values[j];
            let r = (c.lower - v).max(v - c.upper).max(0.0);
            note(r, &|| format!("bounds of column {j}"));
            if c.is_binary() {
                note((v - v.round()).abs(), &|| {
                    format!("integrality of column {j}")
                });
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            let lhs = row.body().evaluate(|j| values[j]);
            note(row.sense().violation(lhs, row.rhs()), &|| {
                format!("row {i}")
            });
        }
        worst
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Relative gap at which branch and bound stops.
    pub mip_gap: f64,
    pub time_limit: Option<Duration>,
    pub feas_tol: f64,
    pub int_tol: f64,
    pub node_limit: Option<u64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            mip_gap: 0.005,
            time_limit: None,
            feas_tol: 1e-6,
            int_tol: 1e-6,
            node_limit: None,
        }
    }
}

impl SolveOptions {
    pub fn with_gap(gap: f64) -> Self {
        Self {
            mip_gap: gap,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if self.mip_gap.is_nan() || self.mip_gap < 0.0 {
            return Err(SolverError::InvalidOptions("mip_gap must be >= 0".into()));
        }
        // NaN fails both comparisons
        if self.feas_tol.is_nan()
            || self.int_tol.is_nan()
            || self.feas_tol <= 0.0
            || self.int_tol <= 0.0
        {
            return Err(SolverError::InvalidOptions(
                "tolerances must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Optimal,
    GapReached,
    Infeasible,
    Unbounded,
    Limit,
}

impl Status {
    /// Whether the solution carries a feasible point.
    pub fn is_success(self) -> bool {
        matches!(self, Status::Optimal | Status::GapReached)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub simplex_iterations: u64,
    pub nodes: u64,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub status: Status,
    pub objective: f64,
    pub best_bound: f64,
    pub gap: f64,
    /// One value per column; empty when no point is available.
    pub values: Vec<f64>,
    pub stats: SolveStats,
}

impl Solution {
    pub(crate) fn without_point(status: Status, stats: SolveStats) -> Self {
        let (objective, best_bound) = match status {
            Status::Unbounded => (f64::NEG_INFINITY, f64::NEG_INFINITY),
            _ => (f64::INFINITY, f64::NEG_INFINITY),
        };
        Self {
            status,
            objective,
            best_bound,
            gap: f64::INFINITY,
            values: Vec::new(),
            stats,
        }
    }

    pub fn has_point(&self) -> bool {
        !self.values.is_empty()
    }
}

/// `|objective - bound| / max(1e-10, |objective|)`.
pub fn relative_gap(objective: f64, bound: f64) -> f64 {
    if objective == bound {
        return 0.0;
    }
    (objective - bound).abs() / objective.abs().max(1e-10)
}

/// Solves the continuous relaxation of `model`.
pub fn solve_lp(model: &MilpModel, opts: &SolveOptions) -> Result<Solution, SolverError> {
    model.validate()?;
    opts.validate()?;
    bnb::solve(&model.relaxed(), opts)
}

/// Solves `model` by branch and bound over its binary columns.
pub fn solve_milp(model: &MilpModel, opts: &SolveOptions) -> Result<Solution, SolverError> {
    model.validate()?;
    opts.validate()?;
    bnb::solve(model, opts)
}

/// Solves independent models, in parallel when the `parallel` feature is on.
pub fn solve_batch(
    models: &[MilpModel],
    opts: &SolveOptions,
) -> Vec<Result<Solution, SolverError>> {
    crate::par::map(models, |m| solve_milp(m, opts))
}

pub(crate) fn row_bounds(sense: Sense, rhs: f64) -> (f64, f64) {
    match sense {
        Sense::Le => (f64::NEG_INFINITY, rhs),
        Sense::Ge => (rhs, f64::INFINITY),
        Sense::Eq => (rhs, rhs),
    }
}
