//! Hypergraph model structure.
//!
//! An [`OptiGraph`] owns nodes (each an optimization subproblem with its own
//! variables, constraints and objective), hyperedges (one linking constraint
//! each) and nested subgraphs. The induced problem is the sum of all node
//! objectives subject to every node and edge constraint in the tree.

mod aggregate;
mod flatten;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{LinExpr, LinearConstraint};

pub use aggregate::{Aggregation, NodeRename};
pub use flatten::{ColumnMap, Flattened, NodeValues};

static NEXT_NODE: AtomicU64 = AtomicU64::new(1);
static NEXT_GRAPH: AtomicU64 = AtomicU64::new(1);

/// Process-unique node identity. Never reused, so subgraphs built
/// independently (even on different threads) can be embedded together.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(u64);

impl NodeId {
    fn fresh() -> Self {
        NodeId(NEXT_NODE.fetch_add(1, Ordering::Relaxed))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GraphId(u64);

impl GraphId {
    fn fresh() -> Self {
        GraphId(NEXT_GRAPH.fetch_add(1, Ordering::Relaxed))
    }
}

/// A variable addressed by its owning node and position on that node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VariableRef {
    pub node: NodeId,
    pub index: u32,
}

impl fmt::Display for VariableRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}[{}]", self.node.0, self.index)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Domain {
    Continuous,
    Binary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariableDef {
    pub name: String,
    pub domain: Domain,
    pub lower: f64,
    pub upper: f64,
    pub start: Option<f64>,
}

impl VariableDef {
    pub fn continuous(name: impl Into<String>, lower: f64, upper: f64) -> Self {
        Self {
            name: name.into(),
            domain: Domain::Continuous,
            lower,
            upper,
            start: None,
        }
    }

    pub fn nonneg(name: impl Into<String>) -> Self {
        Self::continuous(name, 0.0, f64::INFINITY)
    }

    pub fn free(name: impl Into<String>) -> Self {
        Self::continuous(name, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn binary(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            domain: Domain::Binary,
            lower: 0.0,
            upper: 1.0,
            start: None,
        }
    }

    pub fn is_binary(&self) -> bool {
        self.domain == Domain::Binary
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        let ok = !self.lower.is_nan()
            && !self.upper.is_nan()
            && self.lower <= self.upper
            && self.lower < f64::INFINITY
            && self.upper > f64::NEG_INFINITY
            && (!self.is_binary() || (self.lower >= 0.0 && self.upper <= 1.0));
        if ok {
            Ok(())
        } else {
            Err(GraphError::InvalidBounds {
                name: self.name.clone(),
                lower: self.lower,
                upper: self.upper,
            })
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("label `{label}` already used in graph `{graph}`")]
    DuplicateLabel { label: String, graph: String },
    #[error("subgraph `{0}` shares nodes or graphs with its new parent")]
    OwnershipViolation(String),
    #[error("variable {0} does not resolve within the graph")]
    DanglingReference(VariableRef),
    #[error("variable {var} does not belong to node `{node}`")]
    ForeignVariable { var: VariableRef, node: String },
    #[error("linking constraint has no variables")]
    EmptyExpression,
    #[error("variable `{name}` has invalid bounds [{lower}, {upper}]")]
    InvalidBounds {
        name: String,
        lower: f64,
        upper: f64,
    },
    #[error("non-finite right-hand side")]
    NonFiniteRhs,
    #[error("subgraph not found")]
    SubgraphNotFound,
    #[error("node not found")]
    NodeNotFound,
}

#[derive(Clone, Debug)]
pub struct OptiNode {
    id: NodeId,
    label: String,
    variables: Vec<VariableDef>,
    constraints: Vec<LinearConstraint<VariableRef>>,
    objective: LinExpr<VariableRef>,
}

impl OptiNode {
    fn new(label: String) -> Self {
        Self {
            id: NodeId::fresh(),
            label,
            variables: Vec::new(),
            constraints: Vec::new(),
            objective: LinExpr::new(),
        }
    }

    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn variables(&self) -> &[VariableDef] {
        &self.variables
    }

    pub fn constraints(&self) -> &[LinearConstraint<VariableRef>] {
        &self.constraints
    }

    pub fn objective(&self) -> &LinExpr<VariableRef> {
        &self.objective
    }

    pub fn add_variable(&mut self, def: VariableDef) -> Result<VariableRef, GraphError> {
        def.validate()?;
        let index = self.variables.len() as u32;
        self.variables.push(def);
        Ok(VariableRef {
            node: self.id,
            index,
        })
    }

    fn check_own(&self, expr: &LinExpr<VariableRef>) -> Result<(), GraphError> {
        for &(v, _) in expr.terms() {
            if v.node != self.id || v.index as usize >= self.variables.len() {
                return Err(GraphError::ForeignVariable {
                    var: v,
                    node: self.label.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn add_constraint(&mut self, c: LinearConstraint<VariableRef>) -> Result<(), GraphError> {
        if !c.rhs().is_finite() {
            return Err(GraphError::NonFiniteRhs);
        }
        self.check_own(c.body())?;
        self.constraints.push(c);
        Ok(())
    }

    /// Adds `expr` to this node's objective.
    pub fn add_objective(&mut self, expr: LinExpr<VariableRef>) -> Result<(), GraphError> {
        self.check_own(&expr)?;
        self.objective += expr;
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct OptiEdge {
    label: String,
    constraint: LinearConstraint<VariableRef>,
    support: Vec<NodeId>,
}

impl OptiEdge {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn constraint(&self) -> &LinearConstraint<VariableRef> {
        &self.constraint
    }

    /// Sorted, deduplicated set of nodes touched by the constraint.
    pub fn support(&self) -> &[NodeId] {
        &self.support
    }

    fn new(label: String, constraint: LinearConstraint<VariableRef>) -> Self {
        let mut support: Vec<NodeId> = constraint.vars().map(|v| v.node).collect();
        support.dedup();
        support.sort_unstable();
        support.dedup();
        Self {
            label,
            constraint,
            support,
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Loc {
    Local(u32),
    Child(u32),
}

#[derive(Clone, Debug)]
pub struct OptiGraph {
    id: GraphId,
    label: String,
    nodes: Vec<OptiNode>,
    edges: Vec<OptiEdge>,
    subgraphs: Vec<OptiGraph>,
    // every node of the subtree -> where to find it one level down
    node_index: HashMap<NodeId, Loc>,
    graph_index: HashMap<GraphId, u32>,
    labels: HashSet<String>,
}

impl OptiGraph {
    pub fn new(label: impl Into<String>) -> Self {
        Self {
            id: GraphId::fresh(),
            label: label.into(),
            nodes: Vec::new(),
            edges: Vec::new(),
            subgraphs: Vec::new(),
            node_index: HashMap::new(),
            graph_index: HashMap::new(),
            labels: HashSet::new(),
        }
    }

    pub fn id(&self) -> GraphId {
        self.id
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn local_nodes(&self) -> &[OptiNode] {
        &self.nodes
    }

    pub fn local_edges(&self) -> &[OptiEdge] {
        &self.edges
    }

    pub fn subgraphs(&self) -> &[OptiGraph] {
        &self.subgraphs
    }

    fn claim_label(&mut self, label: &str) -> Result<(), GraphError> {
        if !self.labels.insert(label.to_string()) {
            return Err(GraphError::DuplicateLabel {
                label: label.to_string(),
                graph: self.label.clone(),
            });
        }
        Ok(())
    }

    pub fn add_node(&mut self, label: impl Into<String>) -> Result<NodeId, GraphError> {
        let label = label.into();
        self.claim_label(&label)?;
        let node = OptiNode::new(label);
        let id = node.id;
        self.node_index
            .insert(id, Loc::Local(self.nodes.len() as u32));
        self.nodes.push(node);
        Ok(id)
    }

    /// Embeds `child` as a subgraph and returns its id.
    ///
    /// Fails when the child shares any node or graph identity with this graph
    /// (e.g. a clone of this graph or of one of its subgraphs).
    pub fn add_subgraph(&mut self, child: OptiGraph) -> Result<GraphId, GraphError> {
        let clash = child.id == self.id
            || self.graph_index.contains_key(&child.id)
            || child.graph_index.contains_key(&self.id)
            || child
                .graph_index
                .keys()
                .any(|g| self.graph_index.contains_key(g))
            || child
                .node_index
                .keys()
                .any(|n| self.node_index.contains_key(n));
        if clash {
            return Err(GraphError::OwnershipViolation(child.label.clone()));
        }
        self.claim_label(&child.label)?;
        let slot = self.subgraphs.len() as u32;
        for &n in child.node_index.keys() {
            self.node_index.insert(n, Loc::Child(slot));
        }
        self.graph_index.insert(child.id, slot);
        for &g in child.graph_index.keys() {
            self.graph_index.insert(g, slot);
        }
        let id = child.id;
        self.subgraphs.push(child);
        Ok(id)
    }

    pub fn add_link_constraint(
        &mut self,
        c: LinearConstraint<VariableRef>,
    ) -> Result<usize, GraphError> {
        let label = format!("e{}", self.edges.len());
        self.add_link_constraint_labeled(label, c)
    }

    /// Adds a hyperedge owning `c`. Every variable must resolve within this
    /// graph's subtree.
    pub fn add_link_constraint_labeled(
        &mut self,
        label: impl Into<String>,
        c: LinearConstraint<VariableRef>,
    ) -> Result<usize, GraphError> {
        if c.body().terms().is_empty() {
            return Err(GraphError::EmptyExpression);
        }
        if !c.rhs().is_finite() {
            return Err(GraphError::NonFiniteRhs);
        }
        for v in c.vars() {
            if self.resolve(v).is_none() {
                return Err(GraphError::DanglingReference(v));
            }
        }
        self.edges.push(OptiEdge::new(label.into(), c));
        Ok(self.edges.len() - 1)
    }

    pub fn contains_node(&self, id: NodeId) -> bool {
        self.node_index.contains_key(&id)
    }

    pub fn node(&self, id: NodeId) -> Option<&OptiNode> {
        match *self.node_index.get(&id)? {
            Loc::Local(i) => self.nodes.get(i as usize),
            Loc::Child(c) => self.subgraphs[c as usize].node(id),
        }
    }

    pub fn node_mut(&mut self, id: NodeId) -> Option<&mut OptiNode> {
        match *self.node_index.get(&id)? {
            Loc::Local(i) => self.nodes.get_mut(i as usize),
            Loc::Child(c) => self.subgraphs[c as usize].node_mut(id),
        }
    }

    pub fn resolve(&self, v: VariableRef) -> Option<&VariableDef> {
        self.node(v.node)?.variables.get(v.index as usize)
    }

    /// Finds a subgraph anywhere in the tree (including `self`).
    pub fn find_subgraph(&self, id: GraphId) -> Option<&OptiGraph> {
        if id == self.id {
            return Some(self);
        }
        let slot = *self.graph_index.get(&id)?;
        self.subgraphs[slot as usize].find_subgraph(id)
    }

    pub fn subgraph_by_label(&self, label: &str) -> Option<&OptiGraph> {
        self.subgraphs.iter().find(|g| g.label == label)
    }

    /// Id of the direct child subgraph whose subtree contains `node`.
    pub fn child_containing(&self, node: NodeId) -> Option<usize> {
        match self.node_index.get(&node)? {
            Loc::Child(c) => Some(*c as usize),
            Loc::Local(_) => None,
        }
    }

    /// Local nodes first, then each subgraph's nodes depth first.
    pub fn all_nodes(&self) -> Vec<&OptiNode> {
        let mut out = Vec::with_capacity(self.node_index.len());
        self.collect_nodes(&mut out);
        out
    }

    fn collect_nodes<'a>(&'a self, out: &mut Vec<&'a OptiNode>) {
        out.extend(self.nodes.iter());
        for g in &self.subgraphs {
            g.collect_nodes(out);
        }
    }

    /// Every edge in the tree, paired with the graph that owns it.
    pub fn all_edges(&self) -> Vec<(&OptiGraph, &OptiEdge)> {
        let mut out = Vec::new();
        self.visit(&mut |g| out.extend(g.edges.iter().map(|e| (g, e))));
        out
    }

    /// Pre-order traversal over the subgraph tree.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a OptiGraph)) {
        f(self);
        for g in &self.subgraphs {
            g.visit(f);
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.node_index.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len() + self.subgraphs.iter().map(|g| g.num_edges()).sum::<usize>()
    }

    pub fn num_subgraphs(&self) -> usize {
        self.graph_index.len()
    }

    pub fn num_variables(&self) -> usize {
        self.nodes.iter().map(|n| n.variables.len()).sum::<usize>()
            + self
                .subgraphs
                .iter()
                .map(|g| g.num_variables())
                .sum::<usize>()
    }

    pub fn num_binaries(&self) -> usize {
        self.all_nodes()
            .iter()
            .map(|n| n.variables.iter().filter(|v| v.is_binary()).count())
            .sum()
    }

    /// Node-local constraints plus edge constraints.
    pub fn num_constraints(&self) -> usize {
        self.nodes
            .iter()
            .map(|n| n.constraints.len())
            .sum::<usize>()
            + self.edges.len()
            + self
                .subgraphs
                .iter()
                .map(|g| g.num_constraints())
                .sum::<usize>()
    }

    /// `/`-joined label path of every node, rooted at this graph's label.
    pub fn node_paths(&self) -> HashMap<NodeId, String> {
        let mut out = HashMap::with_capacity(self.num_nodes());
        self.collect_paths(&self.label, &mut out);
        out
    }

    fn collect_paths(&self, prefix: &str, out: &mut HashMap<NodeId, String>) {
        for n in &self.nodes {
            out.insert(n.id, format!("{prefix}/{}", n.label));
        }
        for g in &self.subgraphs {
            g.collect_paths(&format!("{prefix}/{}", g.label), out);
        }
    }

    // Builds a graph from parts, rebuilding the lookup tables.
    fn from_parts(
        id: GraphId,
        label: String,
        nodes: Vec<OptiNode>,
        edges: Vec<OptiEdge>,
        subgraphs: Vec<OptiGraph>,
    ) -> Self {
        let mut g = Self {
            id,
            label,
            nodes: Vec::new(),
            edges,
            subgraphs: Vec::new(),
            node_index: HashMap::new(),
            graph_index: HashMap::new(),
            labels: HashSet::new(),
        };
        for n in nodes {
            g.labels.insert(n.label.clone());
            g.node_index.insert(n.id, Loc::Local(g.nodes.len() as u32));
            g.nodes.push(n);
        }
        for s in subgraphs {
            g.labels.insert(s.label.clone());
            let slot = g.subgraphs.len() as u32;
            for &n in s.node_index.keys() {
                g.node_index.insert(n, Loc::Child(slot));
            }
            g.graph_index.insert(s.id, slot);
            for &sg in s.graph_index.keys() {
                g.graph_index.insert(sg, slot);
            }
            g.subgraphs.push(s);
        }
        g
    }
}
