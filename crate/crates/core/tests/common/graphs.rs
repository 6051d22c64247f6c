//! Random nested graphs whose constraints hold at a hidden point.

use std::collections::HashMap;

use optigraph::expr::{LinExpr, LinearConstraint};
use optigraph::{OptiGraph, VariableDef, VariableRef};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Tally {
    pub nodes: usize,
    pub vars: usize,
    pub cons: usize,
    pub edges: usize,
    pub graphs: usize,
}

/// Random graph tree whose constraints hold at a hidden point, so the
/// flattened model is always feasible.
pub fn random_tree(
    rng: &mut ChaCha8Rng,
    label: &str,
    depth: usize,
    point: &mut HashMap<VariableRef, f64>,
    tally: &mut Tally,
) -> OptiGraph {
    let mut g = OptiGraph::new(label);
    tally.graphs += 1;
    for k in 0..rng.gen_range(0..=3) {
        let id = g.add_node(format!("n{k}")).unwrap();
        tally.nodes += 1;
        let node = g.node_mut(id).unwrap();
        let mut vars = Vec::new();
        for v in 0..rng.gen_range(1..=3) {
            let def = if rng.gen_bool(0.3) {
                VariableDef::binary(format!("b{v}"))
            } else {
                VariableDef::continuous(format!("x{v}"), 0.0, 5.0)
            };
            let hi = if def.is_binary() { 1 } else { 5 };
            let r = node.add_variable(def).unwrap();
            point.insert(r, rng.gen_range(0..=hi) as f64);
            vars.push(r);
            tally.vars += 1;
        }
        for _ in 0..rng.gen_range(0..=2) {
            let e = vars.iter().fold(LinExpr::new(), |e, &v| {
                e + LinExpr::term(v, rng.gen_range(-3..=3) as f64)
            });
            let lhs = e.evaluate(|v| point[&v]);
            node.add_constraint(LinearConstraint::le(e, lhs + 1.0))
                .unwrap();
            tally.cons += 1;
        }
        let obj = vars.iter().fold(LinExpr::new(), |e, &v| {
            e + LinExpr::term(v, rng.gen_range(-4..=4) as f64)
        });
        node.add_objective(obj).unwrap();
    }
    if depth > 0 {
        for k in 0..rng.gen_range(0..=3) {
            let child = random_tree(rng, &format!("g{k}"), depth - 1, point, tally);
            g.add_subgraph(child).unwrap();
        }
    }
    let owned: Vec<VariableRef> = point
        .keys()
        .copied()
        .filter(|v| g.resolve(*v).is_some())
        .collect();
    let mut owned = owned;
    owned.sort_by_key(|v| (v.node, v.index));
    if !owned.is_empty() {
        for _ in 0..rng.gen_range(0..=3) {
            let mut e = LinExpr::new();
            for _ in 0..rng.gen_range(1..=4) {
                let v = owned[rng.gen_range(0..owned.len())];
                e.add_term(v, rng.gen_range(-2..=2) as f64);
            }
            if e.terms().is_empty() {
                continue;
            }
            let lhs = e.evaluate(|v| point[&v]);
            let c = if rng.gen_bool(0.3) {
                LinearConstraint::eq(e, lhs)
            } else {
                LinearConstraint::ge(e, lhs - 1.0)
            };
            g.add_link_constraint(c).unwrap();
            tally.cons += 1;
            tally.edges += 1;
        }
    }
    g
}

pub fn build(seed: u64) -> (OptiGraph, HashMap<VariableRef, f64>, Tally) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut point = HashMap::new();
    let mut tally = Tally {
        nodes: 0,
        vars: 0,
        cons: 0,
        edges: 0,
        graphs: 0,
    };
    let g = random_tree(&mut rng, "root", 3, &mut point, &mut tally);
    (g, point, tally)
}

pub fn canonical_rows(model: &optigraph::MilpModel, perm: &[usize]) -> Vec<String> {
    let mut rows: Vec<String> = model
        .rows
        .iter()
        .map(|r| {
            let mut t: Vec<(usize, f64)> = r
                .body()
                .terms()
                .iter()
                .map(|&(j, c)| (perm[j], c))
                .collect();
            t.sort_by_key(|x| x.0);
            format!("{t:?} {:?} {}", r.sense(), r.rhs())
        })
        .collect();
    rows.sort();
    rows
}
