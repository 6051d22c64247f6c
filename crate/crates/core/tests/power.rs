mod common;

use std::collections::HashMap;

use approx::assert_abs_diff_eq;
use common::power::{lerp_hourly, single_bus, three_bus_dark, FixedUp, NO_RESERVE};
use optigraph::graph::NodeValues;
use optigraph::power::objective::{f_e, f_u};
use optigraph::power::{
    build_dauc, build_day_graph, build_day_graph_seq, build_haed, build_stuc, build_timepoint, toy,
    Bus, Category, DayBoundary, GeneratorData, Layer, Line, NetworkData, Schedule,
};
use optigraph::solver::{export_mps, solve_milp, SolveOptions};
use optigraph::{OptiGraph, VariableRef};

fn exact() -> SolveOptions {
    SolveOptions::with_gap(0.0)
}

/// Variables of one time point, counted from the unit roster.
fn point_vars(net: &NetworkData, layer: Layer) -> usize {
    let mut n = 2 * net.buses.len() + net.lines.len();
    for u in &net.generators {
        if layer.dispatches(u.category) {
            n += 2;
        }
        if layer.commits(u.category) {
            n += 3;
        }
    }
    n
}

#[test]
fn ring_day_counts() {
    for buses in 2..=5 {
        let c = toy::ring(buses, 1);
        let net = &c.network;
        let dg = build_day_graph(
            net,
            &c.demand,
            &Schedule::default(),
            0,
            &DayBoundary::cold(3),
        )
        .unwrap();
        let g = &dg.graph;
        assert_eq!(g.subgraphs().len(), 1 + 8 + 96);
        assert_eq!(g.num_subgraphs(), 105 + 24 + 8 * 16 + 96 * 5);
        let per_point = net.buses.len() + net.lines.len();
        for (sub, want) in [(&dg.da, 24), (&dg.st[3], 16), (&dg.ha[50], 5)] {
            let s = g.find_subgraph(sub.id).unwrap();
            assert_eq!(s.subgraphs().len(), want);
            assert_eq!(sub.points.len(), want);
            for tp in s.subgraphs() {
                assert_eq!(tp.num_nodes(), per_point);
                assert!(tp.subgraphs().is_empty());
            }
        }
        assert_eq!(g.num_nodes(), 632 * per_point);
        let vars = 24 * point_vars(net, Layer::Da)
            + 128 * point_vars(net, Layer::St)
            + 480 * point_vars(net, Layer::Ha);
        assert_eq!(g.num_variables(), vars, "{buses} buses");
        // one DA unit committed at 24 points, one ST unit at 128
        assert_eq!(g.num_binaries(), 3 * (24 + 128));
    }
}

#[test]
fn three_bus_day_totals() {
    let c = toy::three_bus(1);
    let dg = build_day_graph(
        &c.network,
        &c.demand,
        &Schedule::default(),
        0,
        &DayBoundary::cold(3),
    )
    .unwrap();
    assert_eq!(dg.graph.num_nodes(), 3792);
    assert_eq!(dg.graph.num_variables(), 9888);
    assert_eq!(dg.graph.num_binaries(), 456);
}

#[test]
fn ha_point_shape() {
    let c = toy::three_bus(1);
    let tp = build_timepoint(&c.network, &c.demand, Layer::Ha, 10.0, 0.25, 40, "t").unwrap();
    assert_eq!(tp.graph.num_nodes(), 6);
    let labels: Vec<&str> = tp.graph.local_edges().iter().map(|e| e.label()).collect();
    assert_eq!(
        labels.iter().filter(|l| l.starts_with("balance:")).count(),
        3
    );
    assert_eq!(
        labels.iter().filter(|l| l.starts_with("dcflow:")).count(),
        3
    );
    assert_eq!(tp.graph.num_edges(), 6);
    assert_eq!(tp.graph.num_binaries(), 0);
}

#[test]
fn zero_point_is_free() {
    let c = toy::zero_demand(1);
    for layer in Layer::ALL {
        let tp = build_timepoint(&c.network, &c.demand, layer, 5.0, 1.0, 20, "t").unwrap();
        let flat = tp.graph.flatten().unwrap();
        let zeros = vec![0.0; flat.columns.len()];
        assert_eq!(flat.model.objective_value(&zeros), 0.0);
        assert_eq!(flat.model.max_violation(&zeros).residual, 0.0);
        let s = solve_milp(&flat.model, &exact()).unwrap();
        assert_abs_diff_eq!(s.objective, 0.0, epsilon = 1e-9);
    }
}

#[test]
fn large_synthetic_point() {
    let n = 118;
    let buses: Vec<Bus> = (0..n)
        .map(|k| Bus {
            label: format!("b{k}"),
            theta_min: -0.6,
            theta_max: 0.6,
            unmet_cost: 1000.0,
        })
        .collect();
    let mut lines: Vec<Line> = (0..n)
        .map(|k| Line {
            from: k,
            to: (k + 1) % n,
            susceptance: 100.0,
            f_min: -200.0,
            f_max: 200.0,
        })
        .collect();
    lines.extend((0..186 - n).map(|k| Line {
        from: k,
        to: (k + 37) % n,
        susceptance: 80.0,
        f_min: -150.0,
        f_max: 150.0,
    }));
    let generators: Vec<GeneratorData> = (0..54).map(|k| toy::base_unit(2 * k)).collect();
    let net = NetworkData {
        buses,
        lines,
        generators,
    };
    let demand = optigraph::power::DemandData {
        day_ahead: vec![vec![40.0; 24]; n],
        real_time: vec![vec![42.0; 24]; n],
        renewable: vec![vec![]; 54],
        reserves: Default::default(),
    };
    let tp = build_timepoint(&net, &demand, Layer::St, 3.0, 0.25, 12, "t").unwrap();
    assert_eq!(tp.graph.num_nodes(), 304);
    assert_eq!(tp.graph.num_edges(), 118 + 186);
}

#[test]
fn subproblem_point_counts() {
    let c = toy::three_bus(1);
    let s = Schedule::default();
    let up = FixedUp::all(1.0, 50.0);
    let (da, _) = build_dauc(&c.network, &c.demand, &s, 0, &up).unwrap();
    let (st, _) = build_stuc(&c.network, &c.demand, &s, 0, 2, &up).unwrap();
    let (ha, _) = build_haed(&c.network, &c.demand, &s, 0, 40, &up).unwrap();
    assert_eq!(da.points.len(), 24);
    assert_eq!(st.points.len(), 16);
    assert_eq!(ha.points.len(), 5);
    assert_eq!(st.points[0].tick, 24);
    assert_eq!(ha.points[4].tick, 44);
    for j in 0..8 {
        assert_eq!((0..96).filter(|&h| s.parent_st(h) == j).count(), 12);
    }
    assert!(build_stuc(&c.network, &c.demand, &s, 0, 8, &up).is_err());
}

/// Cheapest single on-block for a cold unit facing flat demand `d`.
fn best_block(u: &GeneratorData, d: f64, hours: usize) -> f64 {
    let shed_all = 1000.0 * d * hours as f64;
    let on_hour = u.phi_f
        + u.phi_v * d.min(u.c_max)
        + u.phi_o * (u.c_min - d).max(0.0)
        + 1000.0 * (d - u.c_max).max(0.0);
    let mut best = shed_all;
    let out = d.clamp(u.c_min, u.c_max);
    for a in 0..hours {
        for b in a + 1..=hours {
            let len = b - a;
            if out > u.startup_lim || (b < hours && out > u.shutdown_lim) {
                continue;
            }
            if b < hours && (len as f64) < u.min_up_h {
                continue;
            }
            let cost = u.phi_s + len as f64 * on_hour + 1000.0 * d * (hours - len) as f64;
            best = best.min(cost);
        }
    }
    best
}

#[test]
fn dauc_matches_block_enumeration() {
    let s = Schedule::default();
    let cold = FixedUp::all(0.0, 0.0);
    for d in [0.0, 0.01, 5.0, 20.0, 45.5, 70.0, 80.0] {
        for phi_f in [0.0, 100.0, 20_000.0] {
            let unit = GeneratorData {
                phi_f,
                ..toy::base_unit(0)
            };
            let (net, demand) = single_bus(unit.clone(), d, 24, NO_RESERVE);
            let (sub, ext) = build_dauc(&net, &demand, &s, 0, &cold).unwrap();
            assert!(ext.is_empty());
            let sol = solve_milp(&sub.graph.flatten().unwrap().model, &exact()).unwrap();
            let want = best_block(&unit, d, 24);
            assert!(
                (sol.objective - want).abs() <= 1e-6 * want.abs().max(1.0),
                "d={d} phi_f={phi_f}: {} vs {want}",
                sol.objective
            );
        }
    }
}

fn solve_sub(g: &OptiGraph) -> (NodeValues, f64) {
    let flat = g.flatten().unwrap();
    let sol = solve_milp(&flat.model, &exact()).unwrap();
    assert!(sol.status.is_success(), "{:?}", sol.status);
    (flat.columns.split(&sol.values), sol.objective)
}

#[test]
fn st_respects_da_off_hours() {
    let c = toy::three_bus(1);
    let s = Schedule::default();
    // G1 committed except during hour 7 (ticks 28..32)
    let up = FixedUp {
        off: (28, 32),
        ..FixedUp::all(1.0, 60.0)
    };
    let mut net = c.network.clone();
    net.generators[0].eps_s = 200.0;
    net.generators[0].ramp_up = 1000.0;
    net.generators[0].ramp_down = 1000.0;
    net.generators[0].startup_lim = 1000.0;
    net.generators[0].shutdown_lim = 1000.0;
    let (sub, ext) = build_stuc(&net, &c.demand, &s, 0, 2, &up).unwrap();
    assert!(ext.is_empty());
    let (v, _) = solve_sub(&sub.graph);
    for p in &sub.points {
        let out = v.value(&p.gen(0).unwrap().output()).unwrap();
        if (28..32).contains(&p.tick) {
            assert_abs_diff_eq!(out, 0.0, epsilon = 1e-7);
        } else {
            assert!(out >= 20.0 - 1e-7, "tick {} output {out}", p.tick);
        }
    }
}

#[test]
fn zero_band_pins_st_output() {
    let c = toy::three_bus(1);
    let s = Schedule::default();
    let mut net = c.network.clone();
    net.generators[0].eps_s = 0.0;
    let up = FixedUp::all(1.0, 70.0);
    let (sub, _) = build_stuc(&net, &c.demand, &s, 0, 4, &up).unwrap();
    let (v, _) = solve_sub(&sub.graph);
    for p in &sub.points {
        assert_abs_diff_eq!(
            v.value(&p.gen(0).unwrap().output()).unwrap(),
            70.0,
            epsilon = 1e-7
        );
    }
}

#[test]
fn ha_without_units_sheds_everything() {
    let c = three_bus_dark();
    let s = Schedule::default();
    let up = FixedUp::all(0.0, 0.0);
    for index in [0, 17, 95] {
        let (sub, ext) = build_haed(&c.network, &c.demand, &s, 0, index, &up).unwrap();
        assert!(ext.is_empty());
        let (_, obj) = solve_sub(&sub.graph);
        let mut want = 0.0;
        for p in &sub.points {
            let hours = p.tick as f64 * 0.25;
            for row in &c.demand.real_time {
                want += 1000.0 * lerp_hourly(row, hours) * 1.025 * 0.25;
            }
        }
        assert!((obj - want).abs() < 1e-6 * want, "{obj} vs {want}");
    }
}

#[test]
fn cost_functions_by_hand() {
    let c = toy::three_bus(1);
    let tp = build_timepoint(&c.network, &c.demand, Layer::St, 6.0, 0.25, 24, "t").unwrap();
    let p = &tp.vars;
    let peaker = p.commit(1).unwrap();
    let mut vals: HashMap<VariableRef, f64> = HashMap::new();
    vals.insert(peaker.x, 1.0);
    vals.insert(peaker.s, 1.0);
    let g1 = p.gen(0).unwrap();
    vals.insert(g1.plus, 10.0);
    vals.insert(g1.minus, 2.0);
    let w = p.gen(2).unwrap();
    vals.insert(w.minus, 3.0);
    vals.insert(p.buses[1].shed, 0.5);
    let at = |v: VariableRef| vals.get(&v).copied().unwrap_or(0.0);
    // startup 50 plus no-load 30 $/h over a quarter hour
    assert_abs_diff_eq!(
        f_u(&c.network, std::slice::from_ref(p), 0.25).evaluate(at),
        57.5
    );
    // 20*10 + 5*2 + 2*3 + 1000*0.5
    assert_abs_diff_eq!(f_e(&c.network, std::slice::from_ref(p)).evaluate(at), 716.0);
    assert_eq!(
        f_e(&c.network, std::slice::from_ref(p)).evaluate(|_| 0.0),
        0.0
    );
}

#[test]
fn node_objectives_equal_layer_costs() {
    let c = toy::three_bus(1);
    let s = Schedule::default();
    let up = FixedUp::all(1.0, 60.0);
    let subs = [
        build_dauc(&c.network, &c.demand, &s, 0, &up).unwrap().0,
        build_stuc(&c.network, &c.demand, &s, 0, 1, &up).unwrap().0,
        build_haed(&c.network, &c.demand, &s, 0, 9, &up).unwrap().0,
    ];
    for sub in &subs {
        let delta = s.delta(sub.layer);
        let flat = sub.graph.flatten().unwrap();
        let x: Vec<f64> = (0..flat.columns.len())
            .map(|j| 0.5 + (j % 7) as f64)
            .collect();
        let values = flat.columns.split(&x);
        let cost = f_u(&c.network, &sub.points, delta) + f_e(&c.network, &sub.points).scale(delta);
        let want = values.value(&cost).unwrap();
        assert_abs_diff_eq!(
            flat.model.objective_value(&x),
            want,
            epsilon = 1e-9 * want.abs()
        );
    }
}

#[test]
fn each_unit_committed_in_one_layer() {
    let c = toy::three_bus(1);
    let dg = build_day_graph(
        &c.network,
        &c.demand,
        &Schedule::default(),
        0,
        &DayBoundary::cold(3),
    )
    .unwrap();
    for sub in dg.subproblems() {
        for p in &sub.points {
            for (g, u) in c.network.generators.iter().enumerate() {
                let owned = u.category.commit_layer() == Some(sub.layer);
                assert_eq!(p.commit(g).is_some(), owned);
                assert_eq!(p.gen(g).is_some(), sub.layer.dispatches(u.category));
            }
        }
        let binaries = dg.graph.find_subgraph(sub.id).unwrap().num_binaries();
        if sub.layer == Layer::Ha {
            assert_eq!(binaries, 0);
        }
    }
    assert!(!Layer::Da.dispatches(Category::ShortTerm));
}

#[test]
fn parallel_and_sequential_builds_agree() {
    let c = toy::ring(4, 2);
    let s = Schedule::default();
    let b = DayBoundary {
        da_commit: vec![1.0, 0.0, 0.0],
        st_commit: vec![0.0, 1.0, 0.0],
        realized_output: vec![60.0, 10.0, 0.0],
    };
    let par = build_day_graph(&c.network, &c.demand, &s, 1, &b).unwrap();
    let seq = build_day_graph_seq(&c.network, &c.demand, &s, 1, &b).unwrap();
    let a = export_mps(&par.graph.flatten().unwrap().model);
    let z = export_mps(&seq.graph.flatten().unwrap().model);
    assert!(a == z, "parallel and sequential models differ");
}
