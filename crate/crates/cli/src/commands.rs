use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use optigraph::drivers::{run, Mode, RunReport};
use optigraph::export::{to_dot, to_graphml, View};
use optigraph::power::{
    build_day_graph, DayBoundary, DayGraph, DemandData, Layer, NetworkData, Subproblem,
};
use optigraph::solver::{export_lp, export_mps};
use optigraph::OptiGraph;
use serde::Serialize;
use serde_json::json;

use crate::config::CaseConfig;
use crate::error::CliError;
use crate::ingest::ingest;

pub struct Case {
    pub config: CaseConfig,
    pub network: NetworkData,
    pub demand: DemandData,
}

impl Case {
    pub fn load(config: &Path) -> Result<Self, CliError> {
        let config = CaseConfig::load(config)?;
        let (network, demand) = ingest(&config)?;
        Ok(Self {
            config,
            network,
            demand,
        })
    }

    /// Day `day` built from a cold start.
    pub fn day_graph(&self, day: usize) -> Result<DayGraph, CliError> {
        if (day + 1) * 24 > self.demand.hours() {
            return Err(CliError::Usage(format!(
                "day {day} needs {} hours of data, {} available",
                (day + 1) * 24,
                self.demand.hours()
            )));
        }
        let mut demand = self.demand.clone();
        demand.reserves = self.config.reserves;
        let cold = DayBoundary::cold(self.network.generators.len());
        Ok(build_day_graph(
            &self.network,
            &demand,
            &self.config.schedule(),
            day,
            &cold,
        )?)
    }
}

#[derive(Serialize)]
struct LayerStats {
    subproblems: usize,
    points_each: usize,
    variables: usize,
    binaries: usize,
}

#[derive(Serialize)]
pub struct Stats {
    buses: usize,
    lines: usize,
    generators: usize,
    hours: usize,
    nodes: usize,
    edges: usize,
    variables: usize,
    constraints: usize,
    binaries: usize,
    subgraphs: usize,
    da: LayerStats,
    st: LayerStats,
    ha: LayerStats,
}

pub fn stats(case: &Case, dg: &DayGraph) -> Stats {
    let g = &dg.graph;
    let layer = |l: Layer| {
        let subs: Vec<&OptiGraph> = dg
            .subproblems()
            .filter(|s| s.layer == l)
            .map(|s| g.find_subgraph(s.id).expect("embedded subproblem"))
            .collect();
        LayerStats {
            subproblems: subs.len(),
            points_each: subs.first().map_or(0, |s| s.subgraphs().len()),
            variables: subs.iter().map(|s| s.num_variables()).sum(),
            binaries: subs.iter().map(|s| s.num_binaries()).sum(),
        }
    };
    Stats {
        buses: case.network.buses.len(),
        lines: case.network.lines.len(),
        generators: case.network.generators.len(),
        hours: case.demand.hours(),
        nodes: g.num_nodes(),
        edges: g.num_edges(),
        variables: g.num_variables(),
        constraints: g.num_constraints(),
        binaries: g.num_binaries(),
        subgraphs: g.num_subgraphs(),
        da: layer(Layer::Da),
        st: layer(Layer::St),
        ha: layer(Layer::Ha),
    }
}

pub fn build(config: &Path, day: usize) -> Result<(), CliError> {
    let case = Case::load(config)?;
    let t = Instant::now();
    let dg = case.day_graph(day)?;
    let elapsed = t.elapsed();
    let s = stats(&case, &dg);
    println!("built {} in {:.1?}", dg.graph.label(), elapsed);
    println!("nodes        {}", s.nodes);
    println!("edges        {}", s.edges);
    println!("variables    {}", s.variables);
    println!("constraints  {}", s.constraints);
    println!("binaries     {}", s.binaries);
    println!("subgraphs    {}", s.subgraphs);
    for (name, l) in [("da", &s.da), ("st", &s.st), ("ha", &s.ha)] {
        println!(
            "{name}: {} subproblems x {} points, {} variables",
            l.subproblems, l.points_each, l.variables
        );
    }
    Ok(())
}

pub fn print_stats(config: &Path, day: usize) -> Result<(), CliError> {
    let case = Case::load(config)?;
    let dg = case.day_graph(day)?;
    let s = stats(&case, &dg);
    // A closed pipe (`| head`) is not an error worth reporting.
    let _ = writeln!(
        std::io::stdout(),
        "{}",
        serde_json::to_string_pretty(&s).expect("serializable")
    );
    Ok(())
}

fn write(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn report_csv(report: &RunReport) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::Io {
        path: "report.csv".into(),
        message: e.to_string(),
    };
    w.write_record([
        "time_h",
        "day",
        "committed_da",
        "committed_st",
        "overgen_curtail_mw",
        "shed_mw",
        "realized_cost",
    ])
    .map_err(fail)?;
    for r in &report.rows {
        w.write_record([
            r.time_h.to_string(),
            r.day.to_string(),
            r.committed_da.to_string(),
            r.committed_st.to_string(),
            r.overgen_curtail_mw.to_string(),
            r.shed_mw.to_string(),
            r.realized_cost.to_string(),
        ])
        .map_err(fail)?;
    }
    w.into_inner().map_err(|e| CliError::Io {
        path: "report.csv".into(),
        message: e.to_string(),
    })
}

pub fn solve(config: &Path, mode: Mode, days: usize, out: Option<PathBuf>) -> Result<(), CliError> {
    let case = Case::load(config)?;
    let plan = case.config.plan(mode, days);
    let t = Instant::now();
    let report = run(&case.network, &case.demand, &plan)?;
    let seconds = t.elapsed().as_secs_f64();
    let dir = out.unwrap_or_else(|| case.config.output());
    write(&dir.join("report.csv"), &report_csv(&report)?)?;
    let summary = json!({
        "mode": report.mode,
        "days": report.days,
        "realized_cost": report.realized_cost,
        "total_shed_mw_steps": report.total_shed(),
        "max_gap": report.max_gap(),
        "day_objectives": report.day_objectives,
        "seconds": seconds,
        "reserves": case.config.reserves,
        "boundary_rule": report.boundary_rule,
        "boundaries": report.boundaries,
        "stages": report.stages,
    });
    let text = serde_json::to_string_pretty(&summary).expect("serializable");
    write(&dir.join("summary.json"), text.as_bytes())?;
    println!(
        "{:?}: {} days, realized cost {:.2}, shed {:.3}, max gap {:.2e}, {:.1}s -> {}",
        mode,
        days,
        report.realized_cost,
        report.total_shed(),
        report.max_gap(),
        seconds,
        dir.display()
    );
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum GraphFormat {
    Dot,
    Graphml,
}

pub fn export_graph(
    config: &Path,
    day: usize,
    view: View,
    format: GraphFormat,
    out: Option<PathBuf>,
) -> Result<PathBuf, CliError> {
    let case = Case::load(config)?;
    let dg = case.day_graph(day)?;
    let (text, ext) = match format {
        GraphFormat::Dot => (to_dot(&dg.graph, view), "dot"),
        GraphFormat::Graphml => (to_graphml(&dg.graph, view), "graphml"),
    };
    let name = match view {
        View::Full => "full",
        View::AggregateTimepoints => "timepoints",
        View::AggregateSubproblems => "subproblems",
    };
    let path = out.unwrap_or_else(|| case.config.output().join(format!("graph_{name}.{ext}")));
    write(&path, text.as_bytes())?;
    Ok(path)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ModelFormat {
    Mps,
    Lp,
}

/// Writes the flattened day model, or one subproblem on its own (without
/// its links to other subproblems).
pub fn export_model(
    config: &Path,
    day: usize,
    format: ModelFormat,
    subproblem: Option<String>,
    out: Option<PathBuf>,
) -> Result<PathBuf, CliError> {
    let case = Case::load(config)?;
    let dg = case.day_graph(day)?;
    let (graph, name) = match &subproblem {
        None => (&dg.graph, dg.graph.label().to_string()),
        Some(label) => {
            let sub = dg
                .subproblems()
                .find(|s| Subproblem::label(s.layer, s.index) == *label)
                .ok_or_else(|| {
                    CliError::Usage(format!("no subproblem `{label}` (try da, st00, ha00)"))
                })?;
            (
                dg.graph.find_subgraph(sub.id).expect("embedded"),
                label.clone(),
            )
        }
    };
    let model = graph.flatten()?.model;
    let (text, ext) = match format {
        ModelFormat::Mps => (export_mps(&model), "mps"),
        ModelFormat::Lp => (export_lp(&model), "lp"),
    };
    let path = out.unwrap_or_else(|| case.config.output().join(format!("{name}.{ext}")));
    write(&path, text.as_bytes())?;
    Ok(path)
}
