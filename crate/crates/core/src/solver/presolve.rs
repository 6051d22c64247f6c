//! Removes fixed columns and rows left without variables.

use super::simplex::StdLp;
use super::{row_bounds, MilpModel};
use crate::expr::{ExprError, LinExpr, Substituted};

pub(crate) struct Presolved {
    pub model: MilpModel,
    /// Reduced column -> original column.
    pub keep: Vec<usize>,
    /// Original column -> fixed value, for removed columns.
    pub fixed: Vec<Option<f64>>,
    /// Set when an emptied row cannot be satisfied.
    pub infeasible: bool,
}

impl Presolved {
    pub fn new(m: &MilpModel) -> Self {
        let n = m.columns.len();
        let fixed: Vec<Option<f64>> = m
            .columns
            .iter()
            .map(|c| (c.lower == c.upper).then_some(c.lower))
            .collect();
        let mut new_index = vec![usize::MAX; n];
        let mut keep = Vec::new();
        for j in 0..n {
            if fixed[j].is_none() {
                new_index[j] = keep.len();
                keep.push(j);
            }
        }
        let mut model = MilpModel {
            columns: keep.iter().map(|&j| m.columns[j].clone()).collect(),
            rows: Vec::with_capacity(m.rows.len()),
            objective: LinExpr::new(),
        };
        let mut infeasible = false;
        for row in &m.rows {
            match row.substitute_with(|j| fixed[j]) {
                Ok(Substituted::Constraint(c)) => {
                    model.rows.push(c.map_vars(|j| new_index[j]));
                }
                Ok(Substituted::Satisfied) => {}
                Err(ExprError::Violated { .. }) | Err(ExprError::NegativeBand(_)) => {
                    infeasible = true;
                }
            }
        }
        model.objective = m
            .objective
            .substitute_with(|j| fixed[j])
            .map_vars(|j| new_index[j]);
        Self {
            model,
            keep,
            fixed,
            infeasible,
        }
    }

    pub fn postsolve(&self, reduced: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = self.fixed.iter().map(|f| f.unwrap_or(0.0)).collect();
        for (k, &j) in self.keep.iter().enumerate() {
            out[j] = reduced[k];
        }
        out
    }
}

/// Computational form of a model: columns, then one logical per row.
pub(crate) fn to_std(m: &MilpModel) -> StdLp {
    let n = m.columns.len();
    let rows = m.rows.len();
    let mut counts = vec![0usize; n + 1];
    for row in &m.rows {
        for &(j, _) in row.body().terms() {
            counts[j + 1] += 1;
        }
    }
    for j in 0..n {
        counts[j + 1] += counts[j];
    }
    let col_start = counts.clone();
    let mut fill = counts;
    let nnz = col_start[n];
    let mut row_idx = vec![0; nnz];
    let mut val = vec![0.0; nnz];
    for (i, row) in m.rows.iter().enumerate() {
        for &(j, a) in row.body().terms() {
            row_idx[fill[j]] = i;
            val[fill[j]] = a;
            fill[j] += 1;
        }
    }
    let mut cost = vec![0.0; n + rows];
    for &(j, c) in m.objective.terms() {
        cost[j] = c;
    }
    let mut lower: Vec<f64> = m.columns.iter().map(|c| c.lower).collect();
    let mut upper: Vec<f64> = m.columns.iter().map(|c| c.upper).collect();
    for row in &m.rows {
        let (l, u) = row_bounds(row.sense(), row.rhs());
        lower.push(l);
        upper.push(u);
    }
    StdLp {
        n,
        m: rows,
        col_start,
        row_idx,
        val,
        cost,
        lower,
        upper,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::LinearConstraint;
    use crate::graph::VariableDef;

    #[test]
    fn fixed_columns_fold_into_rows_and_objective() {
        let mut m = MilpModel::new();
        let x = m.add_column(VariableDef::continuous("x", 2.0, 2.0));
        let y = m.add_column(VariableDef::nonneg("y"));
        m.add_row(LinearConstraint::le(LinExpr::var(x) + LinExpr::var(y), 5.0));
        m.add_row(LinearConstraint::le(LinExpr::var(x), 3.0));
        m.objective = LinExpr::term(x, 10.0) + LinExpr::var(y);
        let p = Presolved::new(&m);
        assert!(!p.infeasible);
        assert_eq!(p.model.columns.len(), 1);
        assert_eq!(p.model.rows.len(), 1);
        assert_eq!(p.model.rows[0].rhs(), 3.0);
        assert_eq!(p.model.objective.constant_value(), 20.0);
        assert_eq!(p.postsolve(&[1.5]), vec![2.0, 1.5]);
    }

    #[test]
    fn violated_empty_row_marks_infeasible() {
        let mut m = MilpModel::new();
        let x = m.add_column(VariableDef::continuous("x", 2.0, 2.0));
        m.add_row(LinearConstraint::ge(LinExpr::var(x), 3.0));
        assert!(Presolved::new(&m).infeasible);
    }
}
