use serde::{Deserialize, Serialize};

use crate::expr::LinExpr;
use crate::graph::{GraphId, NodeValues, OptiGraph, VariableRef};
use crate::par;

use super::data::{Category, DemandData, NetworkData};
use super::layers::{links, Commitment, Link, Subproblem, Upstream};
use super::schedule::Schedule;
use super::timepoint::PointVars;
use super::{Layer, PowerError};

type Expr = LinExpr<VariableRef>;

/// State handed from one day to the next, one entry per generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DayBoundary {
    /// DA commitment in the last DA period.
    pub da_commit: Vec<f64>,
    /// ST commitment in the last tick of the day.
    pub st_commit: Vec<f64>,
    /// Realized output in the last tick of the day.
    pub realized_output: Vec<f64>,
}

impl DayBoundary {
    /// All units off and idle.
    pub fn cold(generators: usize) -> Self {
        Self {
            da_commit: vec![0.0; generators],
            st_commit: vec![0.0; generators],
            realized_output: vec![0.0; generators],
        }
    }
}

/// Variable handles of a whole day, readable as an [`Upstream`].
pub struct DayIndex<'a> {
    pub net: &'a NetworkData,
    pub sched: &'a Schedule,
    pub boundary: &'a DayBoundary,
    pub da: &'a [PointVars],
    pub st: Vec<&'a [PointVars]>,
    pub ha: Vec<&'a [PointVars]>,
}

impl DayIndex<'_> {
    fn st_point(&self, st: usize, tick: i64) -> &PointVars {
        let k = (tick - self.sched.start(Layer::St, st)) / self.sched.step(Layer::St);
        &self.st[st][k as usize]
    }
}

impl Upstream for DayIndex<'_> {
    fn commitment(&self, g: usize, tick: i64, latest_st: usize) -> Commitment {
        let vars = match self.net.generators[g].category {
            Category::DayAhead => self
                .sched
                .da_point(tick)
                .map(|p| self.da[p].commit(g).expect("DA unit committed in DA")),
            Category::ShortTerm => self.sched.st_covering(tick, latest_st).map(|j| {
                self.st_point(j, tick)
                    .commit(g)
                    .expect("ST unit committed in ST")
            }),
            Category::Renewable => panic!("renewable units carry no commitment"),
        };
        match vars {
            Some(c) => Commitment {
                x: Expr::var(c.x),
                s: Expr::var(c.s),
                z: Expr::var(c.z),
            },
            None => Commitment::fixed(match self.net.generators[g].category {
                Category::DayAhead => self.boundary.da_commit[g],
                _ => self.boundary.st_commit[g],
            }),
        }
    }

    fn da_output(&self, g: usize, tick: i64) -> Expr {
        let p = self
            .sched
            .da_point(tick)
            .expect("DA output read inside the day");
        self.da[p].gen(g).expect("dispatched in DA").output()
    }

    fn st_output(&self, g: usize, st: usize, tick: i64) -> Expr {
        self.st_point(st, tick)
            .gen(g)
            .expect("dispatched in ST")
            .output()
    }

    fn realized(&self, g: usize, tick: i64) -> Expr {
        if tick < 0 {
            return Expr::constant(self.boundary.realized_output[g]);
        }
        self.ha[tick as usize][0]
            .gen(g)
            .expect("dispatched in HA")
            .output()
    }
}

/// One day of operation: every subproblem as a subgraph of `graph`, with
/// cross-subproblem links as edges of `graph` itself.
#[derive(Clone, Debug)]
pub struct DayGraph {
    pub day: usize,
    pub graph: OptiGraph,
    pub schedule: Schedule,
    pub boundary: DayBoundary,
    pub da: SubIndex,
    pub st: Vec<SubIndex>,
    pub ha: Vec<SubIndex>,
}

/// Identity and variable handles of an embedded subproblem.
#[derive(Clone, Debug)]
pub struct SubIndex {
    pub layer: Layer,
    pub index: usize,
    pub id: GraphId,
    pub points: Vec<PointVars>,
}

impl DayGraph {
    pub fn index<'a>(&'a self, net: &'a NetworkData) -> DayIndex<'a> {
        DayIndex {
            net,
            sched: &self.schedule,
            boundary: &self.boundary,
            da: &self.da.points,
            st: self.st.iter().map(|s| s.points.as_slice()).collect(),
            ha: self.ha.iter().map(|s| s.points.as_slice()).collect(),
        }
    }

    /// Subproblems in receding-horizon solve order: DA, then each ST
    /// followed by the HA problems it parents.
    pub fn solve_order(&self) -> Vec<&SubIndex> {
        let mut out = vec![&self.da];
        for (j, st) in self.st.iter().enumerate() {
            out.push(st);
            out.extend(
                self.ha
                    .iter()
                    .filter(|h| self.schedule.parent_st(h.index) == j),
            );
        }
        out
    }

    pub fn subproblems(&self) -> impl Iterator<Item = &SubIndex> {
        std::iter::once(&self.da)
            .chain(self.st.iter())
            .chain(self.ha.iter())
    }

    /// Boundary for the following day read from a full-day solution.
    pub fn next_boundary(&self, net: &NetworkData, values: &NodeValues) -> DayBoundary {
        let n = net.generators.len();
        let last = self.schedule.ticks_per_day() - 1;
        let mut b = DayBoundary::cold(n);
        let idx = self.index(net);
        let value = |e: &Expr| values.value(e).expect("solution covers the day");
        for (g, u) in net.generators.iter().enumerate() {
            match u.category {
                Category::DayAhead => {
                    b.da_commit[g] = value(&idx.commitment(g, last, 0).x);
                }
                Category::ShortTerm => {
                    b.st_commit[g] = value(&idx.commitment(g, last, self.st.len() - 1).x);
                }
                Category::Renewable => {}
            }
            b.realized_output[g] = value(&idx.realized(g, last));
        }
        b
    }
}

fn validate(
    net: &NetworkData,
    demand: &DemandData,
    sched: &Schedule,
    boundary: &DayBoundary,
) -> Result<(), PowerError> {
    net.validate()?;
    demand.validate(net)?;
    sched.validate()?;
    let n = net.generators.len();
    if boundary.da_commit.len() != n
        || boundary.st_commit.len() != n
        || boundary.realized_output.len() != n
    {
        return Err(PowerError::Build {
            layer: Layer::Da,
            index: 0,
            message: format!("day boundary must list {n} generators"),
        });
    }
    Ok(())
}

fn layout(sched: &Schedule) -> Vec<(Layer, usize)> {
    Layer::ALL
        .into_iter()
        .flat_map(|l| (0..sched.count(l)).map(move |i| (l, i)))
        .collect()
}

/// Builds day `day` on the rayon pool (when enabled): subproblem skeletons
/// and their links are computed in parallel, then embedded in order.
pub fn build_day_graph(
    net: &NetworkData,
    demand: &DemandData,
    sched: &Schedule,
    day: usize,
    boundary: &DayBoundary,
) -> Result<DayGraph, PowerError> {
    build(net, demand, sched, day, boundary, true)
}

/// Single-threaded build with identical structure.
pub fn build_day_graph_seq(
    net: &NetworkData,
    demand: &DemandData,
    sched: &Schedule,
    day: usize,
    boundary: &DayBoundary,
) -> Result<DayGraph, PowerError> {
    build(net, demand, sched, day, boundary, false)
}

fn build(
    net: &NetworkData,
    demand: &DemandData,
    sched: &Schedule,
    day: usize,
    boundary: &DayBoundary,
    parallel: bool,
) -> Result<DayGraph, PowerError> {
    validate(net, demand, sched, boundary)?;
    let parts = layout(sched);
    let skeleton =
        |&(layer, i): &(Layer, usize)| Subproblem::skeleton(net, demand, sched, day, layer, i);
    let subs: Vec<Subproblem> = if parallel {
        par::map(&parts, skeleton)
    } else {
        par::map_seq(&parts, skeleton)
    }
    .into_iter()
    .collect::<Result<_, _>>()?;

    let (n_da, n_st) = (sched.count(Layer::Da), sched.count(Layer::St));
    let index = DayIndex {
        net,
        sched,
        boundary,
        da: &subs[0].points,
        st: subs[n_da..n_da + n_st]
            .iter()
            .map(|s| s.points.as_slice())
            .collect(),
        ha: subs[n_da + n_st..]
            .iter()
            .map(|s| s.points.as_slice())
            .collect(),
    };
    let link = |s: &Subproblem| links(net, sched, s, &index);
    let all_links: Vec<Vec<Link>> = if parallel {
        par::map(&subs, link)
    } else {
        par::map_seq(&subs, link)
    }
    .into_iter()
    .collect::<Result<_, _>>()?;
    drop(index);

    let mut graph = OptiGraph::new(format!("day{day}"));
    let mut external = Vec::new();
    let mut indices = Vec::with_capacity(subs.len());
    for (mut sub, l) in subs.into_iter().zip(all_links) {
        external.extend(sub.attach(l)?);
        indices.push(SubIndex {
            layer: sub.layer,
            index: sub.index,
            id: sub.graph.id(),
            points: sub.points,
        });
        graph.add_subgraph(sub.graph)?;
    }
    for l in external {
        graph.add_link_constraint_labeled(l.label, l.constraint)?;
    }
    let ha = indices.split_off(n_da + n_st);
    let st = indices.split_off(n_da);
    let da = indices.pop().expect("one DA subproblem");
    Ok(DayGraph {
        day,
        graph,
        schedule: *sched,
        boundary: boundary.clone(),
        da,
        st,
        ha,
    })
}
