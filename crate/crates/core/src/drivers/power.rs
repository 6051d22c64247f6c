use serde::{Deserialize, Serialize};

use crate::graph::NodeValues;
use crate::power::objective::f_e;
use crate::power::{
    build_day_graph, Category, DayBoundary, DayGraph, DemandData, Layer, NetworkData,
    ReserveScenario, Schedule, Upstream,
};
use crate::solver::{SolveOptions, Status};

use super::{solve_flat, solve_sequential, DriverError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Subproblems solved in sequence, upstream values fixed.
    Receding,
    /// Each day graph solved as one model.
    Monolithic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunPlan {
    pub mode: Mode,
    pub days: usize,
    pub schedule: Schedule,
    pub da: SolveOptions,
    pub st: SolveOptions,
    pub ha: SolveOptions,
    pub monolithic: SolveOptions,
    /// Replaces the reserve fractions of the demand data when set.
    pub reserves: Option<ReserveScenario>,
}

impl Default for RunPlan {
    fn default() -> Self {
        Self {
            mode: Mode::Receding,
            days: 1,
            schedule: Schedule::default(),
            da: SolveOptions::with_gap(0.005),
            st: SolveOptions::with_gap(0.005),
            ha: SolveOptions::with_gap(0.005),
            monolithic: SolveOptions::with_gap(0.05),
            reserves: None,
        }
    }
}

impl RunPlan {
    pub fn options(&self, layer: Layer) -> &SolveOptions {
        match layer {
            Layer::Da => &self.da,
            Layer::St => &self.st,
            Layer::Ha => &self.ha,
        }
    }

    pub fn validate(&self) -> Result<(), DriverError> {
        if self.days == 0 {
            return Err(DriverError::Plan("days must be at least 1".into()));
        }
        self.schedule
            .validate()
            .map_err(|e| DriverError::Plan(e.to_string()))?;
        for o in [&self.da, &self.st, &self.ha, &self.monolithic] {
            o.validate()?;
        }
        Ok(())
    }
}

/// Realized state at the first point of one HA subproblem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub day: usize,
    /// Hours since the start of the run.
    pub time_h: f64,
    pub committed_da: u32,
    pub committed_st: u32,
    pub overgen_curtail_mw: f64,
    pub shed_mw: f64,
    /// Dispatch cost of the point over one HA step, $.
    pub realized_cost: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub day: usize,
    /// Subproblem label, or the day graph label in monolithic mode.
    pub label: String,
    pub status: Status,
    pub objective: f64,
    pub best_bound: f64,
    pub gap: f64,
    pub nodes: u64,
    pub iterations: u64,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub mode: Mode,
    pub days: usize,
    pub rows: Vec<MetricRow>,
    /// Sum of per-row realized costs, $.
    pub realized_cost: f64,
    /// Day-graph objective of each day's solution.
    pub day_objectives: Vec<f64>,
    pub stages: Vec<StageRecord>,
    /// Boundary each day started from.
    pub boundaries: Vec<DayBoundary>,
    /// How the next day's initial state is chosen.
    pub boundary_rule: String,
}

impl RunReport {
    pub fn max_gap(&self) -> f64 {
        self.stages.iter().map(|s| s.gap).fold(0.0, f64::max)
    }

    pub fn total_shed(&self) -> f64 {
        self.rows.iter().map(|r| r.shed_mw).sum()
    }
}

/// One day's solution in either mode.
#[derive(Clone, Debug)]
pub struct DaySolve {
    pub values: NodeValues,
    pub objective: f64,
    pub stages: Vec<StageRecord>,
}

fn context(day: usize, label: &str, err: DriverError) -> DriverError {
    let layer = Layer::from_label(label).unwrap_or(Layer::Da);
    let index = label
        .trim_start_matches(|c: char| c.is_ascii_alphabetic())
        .parse()
        .unwrap_or(0);
    DriverError::Context {
        day,
        layer,
        index,
        source: Box::new(err),
    }
}

/// Solves a built day graph in the given mode.
pub fn solve_day(dg: &DayGraph, mode: Mode, plan: &RunPlan) -> Result<DaySolve, DriverError> {
    match mode {
        Mode::Receding => {
            let order = dg.solve_order();
            let ids: Vec<_> = order.iter().map(|s| s.id).collect();
            let res = solve_sequential(&dg.graph, &ids, |pos| {
                plan.options(order[pos].layer).clone()
            })
            .map_err(|e| match &e {
                DriverError::Stage { block, .. } | DriverError::Substitution { block, .. } => {
                    let block = block.clone();
                    context(dg.day, &block, e)
                }
                _ => e,
            })?;
            let stages: Vec<StageRecord> = res
                .blocks
                .iter()
                .map(|b| StageRecord {
                    day: dg.day,
                    label: b.label.clone(),
                    status: b.solution.status,
                    objective: b.solution.objective,
                    best_bound: b.solution.best_bound,
                    gap: b.solution.gap,
                    nodes: b.solution.stats.nodes,
                    iterations: b.solution.stats.simplex_iterations,
                    seconds: b.solution.stats.seconds,
                })
                .collect();
            let objective = stages.iter().map(|s| s.objective).sum();
            Ok(DaySolve {
                values: res.values,
                objective,
                stages,
            })
        }
        Mode::Monolithic => {
            let (values, s) = solve_flat(&dg.graph, &plan.monolithic)?;
            Ok(DaySolve {
                values,
                objective: s.objective,
                stages: vec![StageRecord {
                    day: dg.day,
                    label: dg.graph.label().to_string(),
                    status: s.status,
                    objective: s.objective,
                    best_bound: s.best_bound,
                    gap: s.gap,
                    nodes: s.stats.nodes,
                    iterations: s.stats.simplex_iterations,
                    seconds: s.stats.seconds,
                }],
            })
        }
    }
}

/// Metrics at the first point of every HA subproblem of the day.
pub fn compute_metrics(net: &NetworkData, dg: &DayGraph, values: &NodeValues) -> Vec<MetricRow> {
    let idx = dg.index(net);
    let sched = &dg.schedule;
    let value =
        |e: &crate::LinExpr<crate::VariableRef>| values.value(e).expect("solution covers the day");
    let dh = sched.delta(Layer::Ha);
    dg.ha
        .iter()
        .map(|ha| {
            let first = &ha.points[0];
            let tick = first.tick;
            let parent = sched.parent_st(ha.index);
            let mut committed = [0u32; 2];
            for (g, u) in net.generators.iter().enumerate() {
                let slot = match u.category {
                    Category::DayAhead => 0,
                    Category::ShortTerm => 1,
                    Category::Renewable => continue,
                };
                committed[slot] += value(&idx.commitment(g, tick, parent).x).round() as u32;
            }
            let overgen = first
                .gens
                .iter()
                .flatten()
                .map(|v| values.get(v.minus).unwrap_or(0.0))
                .sum();
            let shed = first
                .buses
                .iter()
                .map(|b| values.get(b.shed).unwrap_or(0.0))
                .sum();
            MetricRow {
                day: dg.day,
                time_h: dg.day as f64 * 24.0 + tick as f64 * sched.tick_hours(),
                committed_da: committed[0],
                committed_st: committed[1],
                overgen_curtail_mw: overgen,
                shed_mw: shed,
                realized_cost: dh * value(&f_e(net, std::slice::from_ref(first))),
            }
        })
        .collect()
}

/// A solution of the day graph obtained elsewhere, evaluated on the
/// flattened day model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AssembledPoint {
    pub objective: f64,
    pub max_violation: f64,
}

pub fn assemble_check(dg: &DayGraph, values: &NodeValues) -> Result<AssembledPoint, DriverError> {
    let flat = dg.graph.flatten()?;
    let x: Vec<f64> = (0..flat.columns.len())
        .map(|j| values.get(flat.columns.variable(j)).unwrap_or(f64::NAN))
        .collect();
    Ok(AssembledPoint {
        objective: flat.model.objective_value(&x),
        max_violation: flat.model.max_violation(&x).residual,
    })
}

/// Runs `plan` over consecutive days, passing each day's final state to
/// the next.
pub fn run(
    net: &NetworkData,
    demand: &DemandData,
    plan: &RunPlan,
) -> Result<RunReport, DriverError> {
    plan.validate()?;
    let mut demand = demand.clone();
    if let Some(r) = plan.reserves {
        demand.reserves = r;
    }
    if demand.hours() < plan.days * 24 {
        return Err(DriverError::Plan(format!(
            "data covers {} hours, {} days requested",
            demand.hours(),
            plan.days
        )));
    }
    let mut boundary = DayBoundary::cold(net.generators.len());
    let mut report = RunReport {
        mode: plan.mode,
        days: plan.days,
        rows: Vec::new(),
        realized_cost: 0.0,
        day_objectives: Vec::new(),
        stages: Vec::new(),
        boundaries: Vec::new(),
        boundary_rule:
            "next day starts from the last realized HA point and the final DA/ST commitments".into(),
    };
    for day in 0..plan.days {
        let dg = build_day_graph(net, &demand, &plan.schedule, day, &boundary)?;
        let sol = solve_day(&dg, plan.mode, plan)?;
        report.rows.extend(compute_metrics(net, &dg, &sol.values));
        report.day_objectives.push(sol.objective);
        report.stages.extend(sol.stages);
        report.boundaries.push(boundary);
        boundary = dg.next_boundary(net, &sol.values);
    }
    report.realized_cost = report.rows.iter().map(|r| r.realized_cost).sum();
    Ok(report)
}
