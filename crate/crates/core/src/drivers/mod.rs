//! Solution schemes over graphs: block-sequential solves with value
//! passing, and single-model solves of a flattened graph. The power
//! drivers run either scheme day by day and report realized metrics.

mod power;

use std::collections::{HashMap, HashSet};
use thiserror::Error;

use crate::expr::{ExprError, LinearConstraint, Substituted};
use crate::graph::{GraphError, GraphId, NodeId, NodeValues, OptiGraph, VariableRef};
use crate::power::{Layer, PowerError};
use crate::solver::{solve_milp, Solution, SolveOptions, SolverError, Status};

pub use power::{
    assemble_check, compute_metrics, run, solve_day, AssembledPoint, DaySolve, MetricRow, Mode,
    RunPlan, RunReport, StageRecord,
};

#[derive(Debug, Error)]
pub enum DriverError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Power(#[from] PowerError),
    #[error("block `{block}`: fixed linking constraint `{edge}` violated: {source}")]
    Substitution {
        block: String,
        edge: String,
        source: ExprError,
    },
    #[error("block `{block}` ended with status {status:?}")]
    Stage { block: String, status: Status },
    #[error("day {day}, {layer} subproblem {index}: {source}")]
    Context {
        day: usize,
        layer: Layer,
        index: usize,
        source: Box<DriverError>,
    },
    #[error("node {0:?} belongs to no block")]
    Unassigned(NodeId),
    #[error("invalid plan: {0}")]
    Plan(String),
}

/// Outcome of one block solve.
#[derive(Clone, Debug)]
pub struct BlockSolve {
    pub block: GraphId,
    pub label: String,
    pub solution: Solution,
    /// Linking rows carried into this block after substitution.
    pub linked_rows: usize,
}

#[derive(Clone, Debug)]
pub struct SequentialResult {
    pub values: NodeValues,
    pub blocks: Vec<BlockSolve>,
}

/// Solves the subgraphs `order` one after another. Each block is solved
/// with the linking edges outside it whose latest block (by position in
/// `order`) it is, after fixing every variable of earlier blocks to its
/// solved value. Every node of `graph` must lie in exactly one block.
pub fn solve_sequential(
    graph: &OptiGraph,
    order: &[GraphId],
    options: impl Fn(usize) -> SolveOptions,
) -> Result<SequentialResult, DriverError> {
    let mut block_of: HashMap<NodeId, usize> = HashMap::new();
    let mut inside: HashSet<GraphId> = HashSet::new();
    let mut blocks = Vec::with_capacity(order.len());
    for (pos, &id) in order.iter().enumerate() {
        let g = graph
            .find_subgraph(id)
            .ok_or(GraphError::SubgraphNotFound)?;
        g.visit(&mut |s| {
            inside.insert(s.id());
        });
        for n in g.all_nodes() {
            block_of.insert(n.id(), pos);
        }
        blocks.push(g);
    }
    if let Some(n) = graph
        .all_nodes()
        .iter()
        .find(|n| !block_of.contains_key(&n.id()))
    {
        return Err(DriverError::Unassigned(n.id()));
    }
    let mut carried: Vec<Vec<(&str, &LinearConstraint<VariableRef>)>> =
        vec![Vec::new(); order.len()];
    for (owner, e) in graph.all_edges() {
        if inside.contains(&owner.id()) {
            continue;
        }
        let last = e
            .support()
            .iter()
            .map(|n| block_of[n])
            .max()
            .expect("edges have support");
        carried[last].push((e.label(), e.constraint()));
    }

    let mut values = NodeValues::default();
    let mut out = Vec::with_capacity(order.len());
    for (pos, block) in blocks.iter().enumerate() {
        let mut extra = Vec::with_capacity(carried[pos].len());
        for &(label, c) in &carried[pos] {
            match c.substitute_with(|v| values.get(v)) {
                Ok(Substituted::Constraint(c)) => extra.push(c),
                Ok(Substituted::Satisfied) => {}
                Err(source) => {
                    return Err(DriverError::Substitution {
                        block: block.label().to_string(),
                        edge: label.to_string(),
                        source,
                    })
                }
            }
        }
        let flat = block.flatten_with(&extra)?;
        let solution = solve_milp(&flat.model, &options(pos))?;
        if !solution.status.is_success() {
            return Err(DriverError::Stage {
                block: block.label().to_string(),
                status: solution.status,
            });
        }
        values.extend(flat.columns.split(&solution.values));
        out.push(BlockSolve {
            block: order[pos],
            label: block.label().to_string(),
            solution,
            linked_rows: extra.len(),
        });
    }
    Ok(SequentialResult {
        values,
        blocks: out,
    })
}

/// Solves the whole graph as one model.
pub fn solve_flat(
    graph: &OptiGraph,
    options: &SolveOptions,
) -> Result<(NodeValues, Solution), DriverError> {
    let flat = graph.flatten()?;
    let solution = solve_milp(&flat.model, options)?;
    if !solution.status.is_success() {
        return Err(DriverError::Stage {
            block: graph.label().to_string(),
            status: solution.status,
        });
    }
    Ok((flat.columns.split(&solution.values), solution))
}
