use crate::expr::{linearize_abs_band, LinExpr, LinearConstraint};
use crate::graph::{GraphId, OptiGraph, VariableRef};

use super::data::{Category, DemandData, NetworkData};
use super::schedule::Schedule;
use super::timepoint::{build_with_inputs, PointInputs, PointVars};
use super::{Layer, PowerError};

type Expr = LinExpr<VariableRef>;

/// Commitment state `(x, s, z)` of a unit at one period, as variables of the
/// committing layer or as constants from a previous day.
#[derive(Clone, Debug, PartialEq)]
pub struct Commitment {
    pub x: Expr,
    pub s: Expr,
    pub z: Expr,
}

impl Commitment {
    pub fn fixed(on: f64) -> Self {
        Self {
            x: Expr::constant(on),
            s: Expr::new(),
            z: Expr::new(),
        }
    }
}

/// Values a subproblem reads from outside itself. Implemented by the day
/// graph (variables of other subproblems) and by callers supplying fixed
/// schedules.
pub trait Upstream {
    /// Commitment of conventional unit `g` at day tick `tick`. ST-committed
    /// units read the latest ST subproblem with index `<= latest_st` whose
    /// horizon holds `tick`.
    fn commitment(&self, g: usize, tick: i64, latest_st: usize) -> Commitment;
    /// DA output of `g` at the DA point containing `tick`.
    fn da_output(&self, g: usize, tick: i64) -> Expr;
    /// Output of `g` at `tick` in ST subproblem `st`.
    fn st_output(&self, g: usize, st: usize, tick: i64) -> Expr;
    /// Realized output of `g` at `tick`: the first point of the HA
    /// subproblem starting there, or the previous day for `tick < 0`.
    fn realized(&self, g: usize, tick: i64) -> Expr;
}

#[derive(Clone, Debug)]
pub struct Link {
    pub label: String,
    pub constraint: LinearConstraint<VariableRef>,
}

/// One layer subproblem: a graph of time-point subgraphs plus the handles
/// of every time point's variables.
#[derive(Clone, Debug)]
pub struct Subproblem {
    pub layer: Layer,
    pub index: usize,
    pub graph: OptiGraph,
    pub points: Vec<PointVars>,
}

impl Subproblem {
    pub fn label(layer: Layer, index: usize) -> String {
        match layer {
            Layer::Da => "da".to_string(),
            _ => format!("{}{index:02}", layer.prefix()),
        }
    }

    pub fn id(&self) -> GraphId {
        self.graph.id()
    }

    /// Time-point subgraphs only, without intra-layer links.
    pub(crate) fn skeleton(
        net: &NetworkData,
        demand: &DemandData,
        sched: &Schedule,
        day: usize,
        layer: Layer,
        index: usize,
    ) -> Result<Self, PowerError> {
        let mut graph = OptiGraph::new(Self::label(layer, index));
        let delta = sched.delta(layer);
        let day_hours = day as f64 * super::schedule::DAY_HOURS;
        let mut points = Vec::new();
        for (k, tick) in sched.point_ticks(layer, index).into_iter().enumerate() {
            let hours = day_hours + tick as f64 * sched.tick_hours();
            let inputs = PointInputs::read(net, demand, layer, hours);
            let tp = build_with_inputs(net, &inputs, layer, delta, tick, format!("t{k:02}"))
                .map_err(|e| annotate(e, layer, index))?;
            graph.add_subgraph(tp.graph)?;
            points.push(tp.vars);
        }
        Ok(Self {
            layer,
            index,
            graph,
            points,
        })
    }

    /// Adds the links whose variables all live here and returns the rest.
    pub(crate) fn attach(&mut self, links: Vec<Link>) -> Result<Vec<Link>, PowerError> {
        let mut external = Vec::new();
        for l in links {
            if l.constraint
                .vars()
                .all(|v| self.graph.contains_node(v.node))
            {
                self.graph
                    .add_link_constraint_labeled(l.label, l.constraint)?;
            } else {
                external.push(l);
            }
        }
        Ok(external)
    }
}

fn annotate(e: PowerError, layer: Layer, index: usize) -> PowerError {
    match e {
        PowerError::Build { message, .. } => PowerError::Build {
            layer,
            index,
            message,
        },
        other => other,
    }
}

/// Number of periods in a minimum up/down window of `hours` at step
/// `delta`; zero disables the window.
fn window(hours: f64, delta: f64) -> usize {
    (hours / delta + 1e-9).floor() as usize
}

struct Ctx<'a> {
    net: &'a NetworkData,
    sched: &'a Schedule,
    sub: &'a Subproblem,
    up: &'a dyn Upstream,
    out: Vec<Link>,
}

impl Ctx<'_> {
    fn push(&mut self, kind: &str, g: usize, k: usize, c: LinearConstraint<VariableRef>) {
        let label = format!(
            "{}:{kind}:{}:t{k:02}",
            Subproblem::label(self.sub.layer, self.sub.index),
            self.net.generators[g].label
        );
        self.out.push(Link {
            label,
            constraint: c,
        });
    }

    /// Startup/shutdown-coupled ramp rows between outputs `prev` and `cur`,
    /// given commitments at the previous and current periods of a layer
    /// with step `dc` hours.
    #[allow(clippy::too_many_arguments)]
    fn start_stop_ramps(
        &mut self,
        g: usize,
        k: usize,
        prev: &Expr,
        cur: &Expr,
        xp: &Commitment,
        xc: &Commitment,
        dc: f64,
    ) {
        let u = &self.net.generators[g];
        let su = cur.clone()
            - prev.clone()
            - xc.s.scale(u.startup_lim - u.ramp_up * dc - u.c_min)
            - xc.x.scale(u.ramp_up * dc + u.c_min)
            + xp.x.scale(u.c_min);
        self.push("su", g, k, LinearConstraint::le(su, 0.0));
        let sd = prev.clone()
            - cur.clone()
            - xc.z.scale(u.shutdown_lim - u.ramp_down * dc - u.c_min)
            - xp.x.scale(u.ramp_down * dc + u.c_min)
            + xc.x.scale(u.c_min);
        self.push("sd", g, k, LinearConstraint::le(sd, 0.0));
    }

    fn plain_ramps(&mut self, g: usize, k: usize, prev: &Expr, cur: &Expr, dt: f64) {
        let u = &self.net.generators[g];
        self.push(
            "ramp_up",
            g,
            k,
            LinearConstraint::le(cur.clone() - prev.clone(), u.ramp_up * dt),
        );
        self.push(
            "ramp_down",
            g,
            k,
            LinearConstraint::le(prev.clone() - cur.clone(), u.ramp_down * dt),
        );
    }

    fn capacity(&mut self, g: usize, k: usize, out: &Expr, x: &Expr) {
        let u = &self.net.generators[g];
        self.push(
            "cap_lo",
            g,
            k,
            LinearConstraint::ge(out.clone() - x.scale(u.c_min), 0.0),
        );
        self.push(
            "cap_hi",
            g,
            k,
            LinearConstraint::le(out.clone() - x.scale(u.c_max), 0.0),
        );
    }

    fn band(
        &mut self,
        g: usize,
        k: usize,
        out: &Expr,
        center: &Expr,
        eps: f64,
    ) -> Result<(), PowerError> {
        let [hi, lo] = linearize_abs_band(out, center, eps).map_err(|e| PowerError::Build {
            layer: self.sub.layer,
            index: self.sub.index,
            message: e.to_string(),
        })?;
        self.push("band_hi", g, k, hi);
        self.push("band_lo", g, k, lo);
        Ok(())
    }

    /// Rows for a unit this layer commits.
    fn own_unit(&mut self, g: usize) {
        let layer = self.sub.layer;
        let dc = self.sched.delta(layer);
        let u = &self.net.generators[g];
        let (lu, ld) = (window(u.min_up_h, dc), window(u.min_down_h, dc));
        let pts = &self.sub.points;
        let latest = self.sub.index.saturating_sub(1);
        for k in 0..pts.len() {
            let tick = pts[k].tick;
            let gv = pts[k].gen(g).expect("committed unit is dispatched");
            let cv = gv.commit.expect("committed unit has binaries");
            let cur = Commitment {
                x: Expr::var(cv.x),
                s: Expr::var(cv.s),
                z: Expr::var(cv.z),
            };
            // only x of the previous period enters the rows
            let (prev_out, prev) = if k == 0 {
                (
                    self.up.realized(g, tick - 1),
                    self.up.commitment(g, tick - 1, latest),
                )
            } else {
                let p = pts[k - 1].gen(g).expect("dispatched");
                let x = Expr::var(p.commit.expect("committed").x);
                (
                    p.output(),
                    Commitment {
                        x,
                        s: Expr::new(),
                        z: Expr::new(),
                    },
                )
            };
            let onoff = cur.x.clone() - prev.x.clone() - cur.s.clone() + cur.z.clone();
            self.push("onoff", g, k, LinearConstraint::eq(onoff, 0.0));
            self.start_stop_ramps(g, k, &prev_out, &gv.output(), &prev, &cur, dc);
            if lu > 0 {
                let mut e = Expr::term(cv.x, -1.0);
                for p in &pts[(k + 1).saturating_sub(lu)..=k] {
                    e.add_term(p.commit(g).unwrap().s, 1.0);
                }
                self.push("min_up", g, k, LinearConstraint::le(e, 0.0));
            }
            if ld > 0 {
                let mut e = Expr::var(cv.x);
                for p in &pts[(k + 1).saturating_sub(ld)..=k] {
                    e.add_term(p.commit(g).unwrap().z, 1.0);
                }
                self.push("min_down", g, k, LinearConstraint::le(e, 1.0));
            }
        }
    }

    /// Rows for a unit committed by an upper layer: capacity with the
    /// upstream commitment, a band around the upstream schedule and ramps.
    fn linked_unit(&mut self, g: usize) -> Result<(), PowerError> {
        let layer = self.sub.layer;
        let u = &self.net.generators[g];
        let commit_layer = u.category.commit_layer().expect("conventional");
        let dc = self.sched.delta(commit_layer);
        let dt = self.sched.delta(layer);
        let step = self.sched.step(layer);
        let latest = match layer {
            Layer::Ha => self.sched.parent_st(self.sub.index),
            _ => self.sub.index,
        };
        let eps = if layer == Layer::St { u.eps_s } else { u.eps };
        let pts = &self.sub.points;
        for k in 0..pts.len() {
            let tick = pts[k].tick;
            let out = pts[k].gen(g).expect("dispatched").output();
            let cur = self.up.commitment(g, tick, latest);
            self.capacity(g, k, &out, &cur.x);
            let center = match commit_layer {
                Layer::Da => self.up.da_output(g, tick),
                _ => self.up.st_output(g, latest, tick),
            };
            self.band(g, k, &out, &center, eps)?;
            let prev_out = if k == 0 {
                self.up.realized(g, tick - 1)
            } else {
                pts[k - 1].gen(g).expect("dispatched").output()
            };
            let prev_tick = tick - step;
            let crossing = match commit_layer {
                Layer::Da => self.sched.da_point(prev_tick) != self.sched.da_point(tick),
                _ => true,
            };
            if crossing {
                let prev = self.up.commitment(g, prev_tick, latest);
                self.start_stop_ramps(g, k, &prev_out, &out, &prev, &cur, dc);
            } else {
                self.plain_ramps(g, k, &prev_out, &out, dt);
            }
        }
        Ok(())
    }
}

/// Intra- and cross-layer links of `sub`, reading outside values from `up`.
pub(crate) fn links(
    net: &NetworkData,
    sched: &Schedule,
    sub: &Subproblem,
    up: &dyn Upstream,
) -> Result<Vec<Link>, PowerError> {
    let mut ctx = Ctx {
        net,
        sched,
        sub,
        up,
        out: Vec::new(),
    };
    for (g, u) in net.generators.iter().enumerate() {
        if u.category == Category::Renewable || !sub.layer.dispatches(u.category) {
            continue;
        }
        if sub.layer.commits(u.category) {
            ctx.own_unit(g);
        } else {
            ctx.linked_unit(g)?;
        }
    }
    Ok(ctx.out)
}

fn build_layer(
    net: &NetworkData,
    demand: &DemandData,
    sched: &Schedule,
    day: usize,
    layer: Layer,
    index: usize,
    up: &dyn Upstream,
) -> Result<(Subproblem, Vec<Link>), PowerError> {
    net.validate()?;
    sched.validate()?;
    if index >= sched.count(layer) {
        return Err(PowerError::Build {
            layer,
            index,
            message: format!("only {} subproblems per day", sched.count(layer)),
        });
    }
    let mut sub = Subproblem::skeleton(net, demand, sched, day, layer, index)?;
    let l = links(net, sched, &sub, up)?;
    let external = sub.attach(l)?;
    Ok((sub, external))
}

/// Day-ahead commitment of `day`. Links reading only constants from `up`
/// are placed inside the returned graph; the rest are returned.
pub fn build_dauc(
    net: &NetworkData,
    demand: &DemandData,
    sched: &Schedule,
    day: usize,
    up: &dyn Upstream,
) -> Result<(Subproblem, Vec<Link>), PowerError> {
    build_layer(net, demand, sched, day, Layer::Da, 0, up)
}

/// Short-term commitment `index` of `day`.
pub fn build_stuc(
    net: &NetworkData,
    demand: &DemandData,
    sched: &Schedule,
    day: usize,
    index: usize,
    up: &dyn Upstream,
) -> Result<(Subproblem, Vec<Link>), PowerError> {
    build_layer(net, demand, sched, day, Layer::St, index, up)
}

/// Hour-ahead dispatch `index` of `day`.
pub fn build_haed(
    net: &NetworkData,
    demand: &DemandData,
    sched: &Schedule,
    day: usize,
    index: usize,
    up: &dyn Upstream,
) -> Result<(Subproblem, Vec<Link>), PowerError> {
    build_layer(net, demand, sched, day, Layer::Ha, index, up)
}
