use std::collections::HashMap;

use super::{GraphError, NodeId, OptiGraph, VariableRef};
use crate::expr::{LinExpr, LinearConstraint};
use crate::solver::MilpModel;

/// Two-way map between graph variables and flat model columns.
#[derive(Clone, Debug, Default)]
pub struct ColumnMap {
    offsets: HashMap<NodeId, usize>,
    columns: Vec<VariableRef>,
}

impl ColumnMap {
    pub fn column(&self, v: VariableRef) -> Option<usize> {
        let base = *self.offsets.get(&v.node)?;
        let j = base + v.index as usize;
        (self.columns.get(j) == Some(&v)).then_some(j)
    }

    pub fn variable(&self, column: usize) -> VariableRef {
        self.columns[column]
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    /// Splits a flat point into per-node value vectors.
    pub fn split(&self, values: &[f64]) -> NodeValues {
        let mut out: HashMap<NodeId, Vec<f64>> = HashMap::with_capacity(self.offsets.len());
        for (j, v) in self.columns.iter().enumerate() {
            out.entry(v.node).or_default().push(values[j]);
        }
        NodeValues(out)
    }
}

/// Variable values grouped by owning node.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NodeValues(pub HashMap<NodeId, Vec<f64>>);

impl NodeValues {
    pub fn get(&self, v: VariableRef) -> Option<f64> {
        self.0.get(&v.node)?.get(v.index as usize).copied()
    }

    pub fn extend(&mut self, other: NodeValues) {
        self.0.extend(other.0);
    }

    pub fn value(&self, e: &LinExpr<VariableRef>) -> Option<f64> {
        let mut missing = false;
        let v = e.evaluate(|r| {
            self.get(r).unwrap_or_else(|| {
                missing = true;
                0.0
            })
        });
        (!missing).then_some(v)
    }
}

#[derive(Clone, Debug)]
pub struct Flattened {
    pub model: MilpModel,
    pub columns: ColumnMap,
}

impl OptiGraph {
    /// One model holding every variable, node constraint and edge
    /// constraint of the tree. Columns follow [`OptiGraph::all_nodes`]
    /// order; rows list each graph's node constraints, then its
    /// subgraphs, then its own edges.
    pub fn flatten(&self) -> Result<Flattened, GraphError> {
        self.flatten_with(&[])
    }

    /// Like [`flatten`](Self::flatten) with `extra` rows appended.
    pub fn flatten_with(
        &self,
        extra: &[LinearConstraint<VariableRef>],
    ) -> Result<Flattened, GraphError> {
        let mut map = ColumnMap::default();
        let mut model = MilpModel::new();
        for n in self.all_nodes() {
            map.offsets.insert(n.id, map.columns.len());
            for (k, def) in n.variables.iter().enumerate() {
                map.columns.push(VariableRef {
                    node: n.id,
                    index: k as u32,
                });
                model.columns.push(def.clone());
            }
        }
        let mut objective = LinExpr::new();
        let mut failed = None;
        let mut col = |v: VariableRef| match map.column(v) {
            Some(j) => j,
            None => {
                failed.get_or_insert(v);
                0
            }
        };
        collect_rows(self, &mut model.rows, &mut objective, &mut col);
        for c in extra {
            model.rows.push(c.map_vars(&mut col));
        }
        if let Some(v) = failed {
            return Err(GraphError::DanglingReference(v));
        }
        model.objective = objective;
        Ok(Flattened {
            model,
            columns: map,
        })
    }
}

fn collect_rows(
    g: &OptiGraph,
    rows: &mut Vec<LinearConstraint<usize>>,
    objective: &mut LinExpr<usize>,
    col: &mut impl FnMut(VariableRef) -> usize,
) {
    for n in &g.nodes {
        for c in &n.constraints {
            rows.push(c.map_vars(&mut *col));
        }
        *objective += n.objective.map_vars(&mut *col);
    }
    for s in &g.subgraphs {
        collect_rows(s, rows, objective, col);
    }
    for e in &g.edges {
        rows.push(e.constraint.map_vars(&mut *col));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::VariableDef;

    #[test]
    fn single_node_single_row() {
        let mut g = OptiGraph::new("g");
        let n = g.add_node("n").unwrap();
        let node = g.node_mut(n).unwrap();
        let x = node.add_variable(VariableDef::nonneg("x")).unwrap();
        node.add_constraint(LinearConstraint::le(LinExpr::var(x), 3.0))
            .unwrap();
        node.add_objective(LinExpr::term(x, -1.0)).unwrap();
        let f = g.flatten().unwrap();
        assert_eq!(f.model.num_columns(), 1);
        assert_eq!(f.model.num_rows(), 1);
        assert_eq!(f.columns.column(x), Some(0));
        assert_eq!(f.columns.variable(0), x);
        assert_eq!(f.model.objective.coefficient(0), -1.0);
    }

    #[test]
    fn unknown_extra_row_is_dangling() {
        let mut g = OptiGraph::new("g");
        let n = g.add_node("n").unwrap();
        g.node_mut(n)
            .unwrap()
            .add_variable(VariableDef::nonneg("x"))
            .unwrap();
        let mut other = OptiGraph::new("o");
        let m = other.add_node("m").unwrap();
        let y = other
            .node_mut(m)
            .unwrap()
            .add_variable(VariableDef::nonneg("y"))
            .unwrap();
        let err = g
            .flatten_with(&[LinearConstraint::le(LinExpr::var(y), 1.0)])
            .unwrap_err();
        assert_eq!(err, GraphError::DanglingReference(y));
    }
}
