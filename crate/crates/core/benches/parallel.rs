use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use optigraph::power::{build_day_graph, build_day_graph_seq, toy, DayBoundary, Schedule};
use optigraph::solver::{solve_batch, solve_milp, SolveOptions};
use optigraph::MilpModel;

fn day_build(c: &mut Criterion) {
    let mut group = c.benchmark_group("day_graph_build");
    group.sample_size(20);
    let sched = Schedule::default();
    let cold = DayBoundary::cold(3);
    for buses in [3, 12, 40] {
        let case = toy::ring(buses, 1);
        group.bench_with_input(BenchmarkId::new("rayon", buses), &case, |b, case| {
            b.iter(|| build_day_graph(&case.network, &case.demand, &sched, 0, &cold).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sequential", buses), &case, |b, case| {
            b.iter(|| build_day_graph_seq(&case.network, &case.demand, &sched, 0, &cold).unwrap())
        });
    }
    group.finish();
}

/// Short-term subproblems of one day, each flattened on its own.
fn st_models(buses: usize) -> Vec<MilpModel> {
    let case = toy::ring(buses, 1);
    let dg = build_day_graph(
        &case.network,
        &case.demand,
        &Schedule::default(),
        0,
        &DayBoundary::cold(3),
    )
    .unwrap();
    dg.st
        .iter()
        .map(|s| {
            dg.graph
                .find_subgraph(s.id)
                .unwrap()
                .flatten()
                .unwrap()
                .model
        })
        .collect()
}

fn batch_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("st_batch_solve");
    group.sample_size(10);
    let opts = SolveOptions::with_gap(0.005);
    for buses in [3, 8] {
        let models = st_models(buses);
        group.bench_with_input(BenchmarkId::new("rayon", buses), &models, |b, m| {
            b.iter(|| black_box(solve_batch(m, &opts)))
        });
        group.bench_with_input(BenchmarkId::new("sequential", buses), &models, |b, m| {
            b.iter(|| m.iter().map(|m| solve_milp(m, &opts)).collect::<Vec<_>>())
        });
    }
    group.finish();
}

criterion_group!(benches, day_build, batch_solve);
criterion_main!(benches);
