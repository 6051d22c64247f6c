use crate::expr::{LinExpr, LinearConstraint};
use crate::graph::{NodeId, OptiGraph, VariableDef, VariableRef};

use super::data::{Category, DemandData, NetworkData};
use super::{Layer, PowerError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CommitVars {
    pub x: VariableRef,
    pub s: VariableRef,
    pub z: VariableRef,
}

/// Output split of one generator: `plus` is delivered to the bus, `minus`
/// is overgeneration (conventional) or curtailment (renewable).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenVars {
    pub plus: VariableRef,
    pub minus: VariableRef,
    /// Present only in the layer that commits the unit.
    pub commit: Option<CommitVars>,
}

impl GenVars {
    /// Total output `G+ + G-`.
    pub fn output(&self) -> LinExpr<VariableRef> {
        LinExpr::var(self.plus) + LinExpr::var(self.minus)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BusVars {
    pub node: NodeId,
    pub shed: VariableRef,
    pub theta: VariableRef,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LineVars {
    pub node: NodeId,
    pub flow: VariableRef,
}

/// Variable handles of one time point, indexed like the network data.
#[derive(Clone, Debug, PartialEq)]
pub struct PointVars {
    /// Day-relative tick.
    pub tick: i64,
    pub buses: Vec<BusVars>,
    pub lines: Vec<LineVars>,
    /// `None` for generators without output variables in this layer.
    pub gens: Vec<Option<GenVars>>,
}

impl PointVars {
    pub fn gen(&self, g: usize) -> Option<&GenVars> {
        self.gens.get(g).and_then(Option::as_ref)
    }

    pub fn commit(&self, g: usize) -> Option<&CommitVars> {
        self.gen(g).and_then(|v| v.commit.as_ref())
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.buses
            .iter()
            .map(|b| b.node)
            .chain(self.lines.iter().map(|l| l.node))
    }
}

pub struct TimePoint {
    pub graph: OptiGraph,
    pub vars: PointVars,
}

/// Forecast inputs of one time point.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct PointInputs {
    pub demand: Vec<f64>,
    pub reserve: Vec<f64>,
    pub available: Vec<f64>,
}

impl PointInputs {
    pub fn read(net: &NetworkData, demand: &DemandData, layer: Layer, hours: f64) -> Self {
        let nb = net.buses.len();
        Self {
            demand: (0..nb).map(|b| demand.demand(layer, b, hours)).collect(),
            reserve: (0..nb).map(|b| demand.reserve(layer, b, hours)).collect(),
            available: net
                .generators
                .iter()
                .enumerate()
                .map(|(g, gen)| match gen.category {
                    Category::Renewable => demand.availability(layer, g, hours),
                    _ => 0.0,
                })
                .collect(),
        }
    }
}

/// Builds the network snapshot of `layer` at absolute time `hours`.
///
/// Bus nodes own shed, angle and generator variables with their objective
/// terms (scaled by `delta_h`); line nodes own the flow. Balance and DC
/// flow rows are edges of the returned graph; renewable split and own
/// commitment capacity rows are node-local.
pub fn build_timepoint(
    net: &NetworkData,
    demand: &DemandData,
    layer: Layer,
    hours: f64,
    delta_h: f64,
    tick: i64,
    label: impl Into<String>,
) -> Result<TimePoint, PowerError> {
    let label = label.into();
    let missing = |what: &str| PowerError::Build {
        layer,
        index: 0,
        message: format!("{label}: missing {what}"),
    };
    if demand.day_ahead.len() != net.buses.len() || demand.real_time.len() != net.buses.len() {
        return Err(missing("demand series"));
    }
    if demand.renewable.len() != net.generators.len() {
        return Err(missing("renewable availability"));
    }
    let inputs = PointInputs::read(net, demand, layer, hours);
    build_with_inputs(net, &inputs, layer, delta_h, tick, label)
}

pub(crate) fn build_with_inputs(
    net: &NetworkData,
    inputs: &PointInputs,
    layer: Layer,
    delta_h: f64,
    tick: i64,
    label: String,
) -> Result<TimePoint, PowerError> {
    let mut graph = OptiGraph::new(label);
    let mut gens: Vec<Option<GenVars>> = vec![None; net.generators.len()];
    let mut buses = Vec::with_capacity(net.buses.len());
    for (b, bus) in net.buses.iter().enumerate() {
        let id = graph.add_node(format!("bus:{}", bus.label))?;
        let node = graph.node_mut(id).expect("fresh node");
        let shed = node.add_variable(VariableDef::nonneg("D"))?;
        let theta = node.add_variable(VariableDef::continuous(
            "theta",
            bus.theta_min,
            bus.theta_max,
        ))?;
        let mut obj = LinExpr::term(shed, bus.unmet_cost * delta_h);
        for g in net.generators_at(b) {
            let gen = &net.generators[g];
            if !layer.dispatches(gen.category) {
                continue;
            }
            let plus = node.add_variable(VariableDef::nonneg(format!("Gp[{}]", gen.label)))?;
            let minus = node.add_variable(VariableDef::nonneg(format!("Gm[{}]", gen.label)))?;
            let output = LinExpr::var(plus) + LinExpr::var(minus);
            if gen.category == Category::Renewable {
                obj.add_term(minus, gen.phi_c * delta_h);
                node.add_constraint(LinearConstraint::eq(output, inputs.available[g]))?;
            } else {
                obj.add_term(plus, gen.phi_v * delta_h);
                obj.add_term(minus, gen.phi_o * delta_h);
            }
            let commit = if layer.commits(gen.category) {
                let x = node.add_variable(VariableDef::binary(format!("x[{}]", gen.label)))?;
                let s = node.add_variable(VariableDef::binary(format!("s[{}]", gen.label)))?;
                let z = node.add_variable(VariableDef::binary(format!("z[{}]", gen.label)))?;
                obj.add_term(s, gen.phi_s);
                obj.add_term(x, gen.phi_f * delta_h);
                let output = LinExpr::var(plus) + LinExpr::var(minus);
                node.add_constraint(LinearConstraint::ge(
                    output.clone() - LinExpr::term(x, gen.c_min),
                    0.0,
                ))?;
                node.add_constraint(LinearConstraint::le(
                    output - LinExpr::term(x, gen.c_max),
                    0.0,
                ))?;
                Some(CommitVars { x, s, z })
            } else {
                None
            };
            gens[g] = Some(GenVars {
                plus,
                minus,
                commit,
            });
        }
        node.add_objective(obj)?;
        buses.push(BusVars {
            node: id,
            shed,
            theta,
        });
    }
    let mut lines = Vec::with_capacity(net.lines.len());
    for (k, line) in net.lines.iter().enumerate() {
        let from = &net.buses[line.from].label;
        let to = &net.buses[line.to].label;
        let id = graph.add_node(format!("line{k}:{from}-{to}"))?;
        let flow = graph
            .node_mut(id)
            .expect("fresh node")
            .add_variable(VariableDef::continuous("F", line.f_min, line.f_max))?;
        lines.push(LineVars { node: id, flow });
    }
    for (b, bus) in net.buses.iter().enumerate() {
        let mut e = LinExpr::var(buses[b].shed);
        for (k, line) in net.lines.iter().enumerate() {
            if line.to == b {
                e.add_term(lines[k].flow, 1.0);
            }
            if line.from == b {
                e.add_term(lines[k].flow, -1.0);
            }
        }
        for g in net.generators_at(b) {
            if let Some(v) = &gens[g] {
                e.add_term(v.plus, 1.0);
            }
        }
        graph.add_link_constraint_labeled(
            format!("balance:{}", bus.label),
            LinearConstraint::eq(e, inputs.demand[b] + inputs.reserve[b]),
        )?;
    }
    for (k, line) in net.lines.iter().enumerate() {
        let e = LinExpr::var(lines[k].flow)
            - LinExpr::term(buses[line.from].theta, line.susceptance)
            + LinExpr::term(buses[line.to].theta, line.susceptance);
        graph.add_link_constraint_labeled(format!("dcflow:{k}"), LinearConstraint::eq(e, 0.0))?;
    }
    Ok(TimePoint {
        graph,
        vars: PointVars {
            tick,
            buses,
            lines,
            gens,
        },
    })
}
