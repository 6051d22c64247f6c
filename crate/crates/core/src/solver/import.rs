//! Import of externally computed solutions keyed by export column names.

use std::collections::HashMap;

use super::mps::column_name;
use super::{MilpModel, Solution, SolveStats, SolverError, Status};

/// Parses a `name value` listing (one pair per line, `#` starts a comment)
/// and checks the point against `model` with tolerance `1e-6`.
pub fn import_solution(model: &MilpModel, text: &str) -> Result<Solution, SolverError> {
    import_solution_with(model, text, 1e-6)
}

pub fn import_solution_with(
    model: &MilpModel,
    text: &str,
    feas_tol: f64,
) -> Result<Solution, SolverError> {
    let index: HashMap<String, usize> = (0..model.num_columns())
        .map(|j| (column_name(j), j))
        .collect();
    let mut values: Vec<Option<f64>> = vec![None; model.num_columns()];
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(name), Some(v), None) = (it.next(), it.next(), it.next()) else {
            return Err(SolverError::Parse {
                line: k + 1,
                message: "expected `name value`".into(),
            });
        };
        let j = *index
            .get(name)
            .ok_or_else(|| SolverError::UnknownName(name.to_string()))?;
        let v: f64 = v.parse().map_err(|_| SolverError::Parse {
            line: k + 1,
            message: format!("invalid number `{v}`"),
        })?;
        values[j] = Some(v);
    }
    let values: Vec<f64> = values
        .into_iter()
        .enumerate()
        .map(|(j, v)| v.ok_or_else(|| SolverError::MissingColumn(column_name(j))))
        .collect::<Result<_, _>>()?;
    let worst = model.max_violation(&values);
    if worst.residual > feas_tol {
        return Err(SolverError::InfeasiblePoint {
            residual: worst.residual,
            location: worst.location,
        });
    }
    let objective = model.objective_value(&values);
    Ok(Solution {
        status: Status::Optimal,
        objective,
        best_bound: objective,
        gap: 0.0,
        values,
        stats: SolveStats::default(),
    })
}

/// Writes `values` in the listing format read by [`import_solution`].
pub fn write_solution(values: &[f64]) -> String {
    let mut out = String::new();
    for (j, v) in values.iter().enumerate() {
        out.push_str(&format!("{} {v}\n", column_name(j)));
    }
    out
}
