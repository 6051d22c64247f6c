use std::collections::HashMap;

use super::{GraphError, GraphId, NodeId, OptiEdge, OptiGraph, OptiNode, VariableRef};
use crate::expr::LinearConstraint;

/// Where a node's variables live after aggregation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NodeRename {
    pub node: NodeId,
    pub offset: u32,
}

/// Result of collapsing subgraphs. Nodes outside every collapsed subgraph keep
/// their identity and have no entry in `renames`.
#[derive(Clone, Debug)]
pub struct Aggregation {
    pub graph: OptiGraph,
    pub renames: HashMap<NodeId, NodeRename>,
}

impl Aggregation {
    pub fn rename(&self, v: VariableRef) -> VariableRef {
        match self.renames.get(&v.node) {
            Some(r) => VariableRef {
                node: r.node,
                index: r.offset + v.index,
            },
            None => v,
        }
    }
}

impl OptiGraph {
    /// Collapses the descendant subgraph `target` into one node placed in
    /// its parent. The source graph is left untouched.
    pub fn aggregate(&self, target: GraphId) -> Result<Aggregation, GraphError> {
        if target == self.id || self.find_subgraph(target).is_none() {
            return Err(GraphError::SubgraphNotFound);
        }
        Ok(self.aggregate_where(|g| g.id == target))
    }

    /// Collapses every maximal proper subgraph matching `pred`. Matching
    /// subgraphs nested inside a collapsed one are absorbed with it.
    pub fn aggregate_where(&self, pred: impl Fn(&OptiGraph) -> bool) -> Aggregation {
        let mut renames = HashMap::new();
        let graph = copy_collapsing(self, &pred, &mut renames);
        let graph = rename_all(graph, &renames);
        Aggregation { graph, renames }
    }

    /// Collapses every subgraph, producing a single-level graph whose nodes
    /// are this graph's local nodes plus one node per direct child.
    pub fn aggregate_children(&self) -> Aggregation {
        let children: Vec<GraphId> = self.subgraphs.iter().map(|g| g.id).collect();
        self.aggregate_where(|g| children.contains(&g.id))
    }
}

fn copy_collapsing(
    g: &OptiGraph,
    pred: &impl Fn(&OptiGraph) -> bool,
    renames: &mut HashMap<NodeId, NodeRename>,
) -> OptiGraph {
    let mut nodes = g.nodes.clone();
    let mut subgraphs = Vec::new();
    for sub in &g.subgraphs {
        if pred(sub) {
            nodes.push(collapse(sub, renames));
        } else {
            subgraphs.push(copy_collapsing(sub, pred, renames));
        }
    }
    OptiGraph::from_parts(g.id, g.label.clone(), nodes, g.edges.clone(), subgraphs)
}

// Builds one node holding the union of `sub`'s variables, constraints and
// objective. Variable names are prefixed with the node path inside `sub`.
fn collapse(sub: &OptiGraph, renames: &mut HashMap<NodeId, NodeRename>) -> OptiNode {
    let mut node = OptiNode::new(sub.label.clone());
    let paths = sub.node_paths();
    let strip = sub.label.len() + 1;
    for n in sub.all_nodes() {
        renames.insert(
            n.id,
            NodeRename {
                node: node.id,
                offset: node.variables.len() as u32,
            },
        );
        let prefix = &paths[&n.id][strip..];
        node.variables.extend(n.variables.iter().map(|v| {
            let mut v = v.clone();
            v.name = format!("{prefix}.{}", v.name);
            v
        }));
    }
    for n in sub.all_nodes() {
        node.constraints.extend(n.constraints.iter().cloned());
        node.objective += n.objective.clone();
    }
    for (_, e) in sub.all_edges() {
        node.constraints.push(e.constraint.clone());
    }
    node
}

fn rename_all(g: OptiGraph, renames: &HashMap<NodeId, NodeRename>) -> OptiGraph {
    let map = |v: VariableRef| match renames.get(&v.node) {
        Some(r) => VariableRef {
            node: r.node,
            index: r.offset + v.index,
        },
        None => v,
    };
    let rename_c = |c: &LinearConstraint<VariableRef>| c.map_vars(map);
    let nodes = g
        .nodes
        .into_iter()
        .map(|mut n| {
            n.constraints = n.constraints.iter().map(rename_c).collect();
            n.objective = n.objective.map_vars(map);
            n
        })
        .collect();
    let edges = g
        .edges
        .into_iter()
        .map(|e| OptiEdge::new(e.label, rename_c(&e.constraint)))
        .collect();
    let subgraphs = g
        .subgraphs
        .into_iter()
        .map(|s| rename_all(s, renames))
        .collect();
    OptiGraph::from_parts(g.id, g.label, nodes, edges, subgraphs)
}
