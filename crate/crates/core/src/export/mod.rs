//! Graph structure as DOT or GraphML, in three views: every node with
//! hyperedges drawn as small hub nodes, time points collapsed, or whole
//! subproblems collapsed.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write;

use quick_xml::escape::escape;
use serde::{Deserialize, Serialize};

use crate::graph::{GraphId, NodeId, OptiGraph};
use crate::power::Layer;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum View {
    /// All nodes; each hyperedge becomes a hub node joined to its support.
    Full,
    /// Every leaf subgraph (a time point in a day graph) collapsed.
    AggregateTimepoints,
    /// Every direct child of the root collapsed.
    AggregateSubproblems,
}

impl std::str::FromStr for View {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" => Ok(View::Full),
            "aggregate_timepoints" | "timepoints" => Ok(View::AggregateTimepoints),
            "aggregate_subproblems" | "subproblems" => Ok(View::AggregateSubproblems),
            _ => Err(format!("unknown view `{s}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VisNode {
    /// Graph path, unique within the view.
    pub id: String,
    pub label: String,
    pub layer: Option<Layer>,
    /// `bus`, `line`, `aggregate`, `hyperedge`, or the label itself.
    pub kind: String,
    pub n_vars: usize,
    pub n_cons: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VisEdge {
    pub a: usize,
    pub b: usize,
    /// Number of linking constraints joining the two endpoints.
    pub weight: usize,
}

/// Renderable undirected graph.
#[derive(Clone, Debug, PartialEq)]
pub struct Structure {
    pub name: String,
    pub nodes: Vec<VisNode>,
    pub edges: Vec<VisEdge>,
}

pub fn color(layer: Option<Layer>) -> &'static str {
    match layer {
        Some(Layer::Da) => "black",
        Some(Layer::St) => "red",
        Some(Layer::Ha) => "blue",
        None => "gray",
    }
}

/// Layer of the outermost subproblem on a `/`-joined path.
fn layer_of(path: &str) -> Option<Layer> {
    path.split('/').find_map(Layer::from_label)
}

fn kind_of(label: &str) -> String {
    let head = label.split(':').next().unwrap_or(label);
    let trimmed = head.trim_end_matches(|c: char| c.is_ascii_digit());
    if trimmed.is_empty() {
        head.to_string()
    } else {
        trimmed.to_string()
    }
}

fn graph_paths(g: &OptiGraph) -> HashMap<GraphId, String> {
    fn walk(g: &OptiGraph, path: String, out: &mut HashMap<GraphId, String>) {
        for s in g.subgraphs() {
            walk(s, format!("{path}/{}", s.label()), out);
        }
        out.insert(g.id(), path);
    }
    let mut out = HashMap::new();
    walk(g, g.label().to_string(), &mut out);
    out
}

fn node_list(
    g: &OptiGraph,
    aggregates: &HashSet<NodeId>,
) -> (Vec<VisNode>, HashMap<NodeId, usize>) {
    let paths = g.node_paths();
    let mut nodes = Vec::new();
    let mut index = HashMap::new();
    for n in g.all_nodes() {
        let path = paths[&n.id()].clone();
        index.insert(n.id(), nodes.len());
        nodes.push(VisNode {
            layer: layer_of(&path),
            id: path,
            label: n.label().to_string(),
            kind: if aggregates.contains(&n.id()) {
                "aggregate".into()
            } else {
                kind_of(n.label())
            },
            n_vars: n.variables().len(),
            n_cons: n.constraints().len(),
        });
    }
    (nodes, index)
}

fn full(g: &OptiGraph) -> Structure {
    let (mut nodes, index) = node_list(g, &HashSet::new());
    let owners = graph_paths(g);
    let mut edges = Vec::new();
    for (k, (owner, e)) in g.all_edges().into_iter().enumerate() {
        let owner_path = &owners[&owner.id()];
        let hub = nodes.len();
        nodes.push(VisNode {
            id: format!("{owner_path}#{k}"),
            label: e.label().to_string(),
            layer: layer_of(owner_path),
            kind: "hyperedge".into(),
            n_vars: 0,
            n_cons: 1,
        });
        for n in e.support() {
            edges.push(VisEdge {
                a: index[n],
                b: hub,
                weight: 1,
            });
        }
    }
    Structure {
        name: g.label().to_string(),
        nodes,
        edges,
    }
}

fn quotient(g: &OptiGraph, pred: impl Fn(&OptiGraph) -> bool) -> Structure {
    let agg = g.aggregate_where(pred);
    let aggregates: HashSet<NodeId> = agg.renames.values().map(|r| r.node).collect();
    let (nodes, index) = node_list(&agg.graph, &aggregates);
    let mut weights: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (_, e) in agg.graph.all_edges() {
        let mut ends: Vec<usize> = e.support().iter().map(|n| index[n]).collect();
        ends.sort_unstable();
        ends.dedup();
        for (i, &a) in ends.iter().enumerate() {
            for &b in &ends[i + 1..] {
                *weights.entry((a, b)).or_default() += 1;
            }
        }
    }
    Structure {
        name: g.label().to_string(),
        nodes,
        edges: weights
            .into_iter()
            .map(|((a, b), weight)| VisEdge { a, b, weight })
            .collect(),
    }
}

pub fn structure(g: &OptiGraph, view: View) -> Structure {
    match view {
        View::Full => full(g),
        View::AggregateTimepoints => quotient(g, |s| s.subgraphs().is_empty()),
        View::AggregateSubproblems => {
            let children: HashSet<GraphId> = g.subgraphs().iter().map(|s| s.id()).collect();
            quotient(g, |s| children.contains(&s.id()))
        }
    }
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn structure_to_dot(s: &Structure) -> String {
    let mut out = String::new();
    writeln!(out, "graph {} {{", dot_quote(&s.name)).unwrap();
    for n in &s.nodes {
        let shape = if n.kind == "hyperedge" {
            "point"
        } else {
            "circle"
        };
        writeln!(
            out,
            "  {} [label={}, color={}, shape={shape}, layer={}, kind={}, n_vars={}, n_cons={}];",
            dot_quote(&n.id),
            dot_quote(&n.label),
            color(n.layer),
            dot_quote(n.layer.map_or("", |l| l.prefix())),
            dot_quote(&n.kind),
            n.n_vars,
            n.n_cons
        )
        .unwrap();
    }
    for e in &s.edges {
        writeln!(
            out,
            "  {} -- {} [weight={}];",
            dot_quote(&s.nodes[e.a].id),
            dot_quote(&s.nodes[e.b].id),
            e.weight
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn structure_to_graphml(s: &Structure) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(
        "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\" \
         xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" \
         xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns \
         http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n",
    );
    for (id, target, ty) in [
        ("label", "node", "string"),
        ("layer", "node", "string"),
        ("color", "node", "string"),
        ("kind", "node", "string"),
        ("n_vars", "node", "int"),
        ("n_cons", "node", "int"),
        ("weight", "edge", "int"),
    ] {
        writeln!(
            out,
            "  <key id=\"{id}\" for=\"{target}\" attr.name=\"{id}\" attr.type=\"{ty}\"/>"
        )
        .unwrap();
    }
    writeln!(
        out,
        "  <graph id=\"{}\" edgedefault=\"undirected\">",
        escape(s.name.as_str())
    )
    .unwrap();
    for n in &s.nodes {
        writeln!(out, "    <node id=\"{}\">", escape(n.id.as_str())).unwrap();
        let layer = n.layer.map_or("", |l| l.prefix());
        for (key, value) in [
            ("label", escape(n.label.as_str()).into_owned()),
            ("layer", layer.to_string()),
            ("color", color(n.layer).to_string()),
            ("kind", escape(n.kind.as_str()).into_owned()),
            ("n_vars", n.n_vars.to_string()),
            ("n_cons", n.n_cons.to_string()),
        ] {
            writeln!(out, "      <data key=\"{key}\">{value}</data>").unwrap();
        }
        out.push_str("    </node>\n");
    }
    for (k, e) in s.edges.iter().enumerate() {
        writeln!(
            out,
            "    <edge id=\"x{k}\" source=\"{}\" target=\"{}\"><data key=\"weight\">{}</data></edge>",
            escape(s.nodes[e.a].id.as_str()),
            escape(s.nodes[e.b].id.as_str()),
            e.weight
        )
        .unwrap();
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

pub fn to_dot(g: &OptiGraph, view: View) -> String {
    structure_to_dot(&structure(g, view))
}

pub fn to_graphml(g: &OptiGraph, view: View) -> String {
    structure_to_graphml(&structure(g, view))
}
