//! Best-bound branch and bound over binary columns.
//!
//! Children inherit their parent's LP bound and optimal basis; each is
//! reoptimized with the dual simplex after its branching bound is applied.
//! A diving heuristic runs at the root and periodically afterwards to find
//! incumbents early.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::rc::Rc;
use std::time::Instant;

use super::presolve::{to_std, Presolved};
use super::simplex::{Basis, Engine, LpStatus};
use super::{relative_gap, MilpModel, Solution, SolveOptions, SolveStats, SolverError, Status};

const DIVE_EVERY: u64 = 100;

struct Node {
    bound: f64,
    seq: u64,
    fixes: Vec<(u32, bool)>,
    basis: Rc<Basis>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // max-heap order: smallest bound first, then oldest
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

struct Search<'a> {
    engine: Engine,
    bins: Vec<usize>,
    opts: &'a SolveOptions,
    incumbent: Option<(f64, Vec<f64>)>,
    per_solve: u64,
}

enum Outcome {
    Infeasible,
    Limit,
    Solved(f64),
}

impl Search<'_> {
    fn apply(&mut self, fixes: &[(u32, bool)]) {
        for &j in &self.bins {
            self.engine.set_bounds(j, 0.0, 1.0);
        }
        for &(j, v) in fixes {
            let v = if v { 1.0 } else { 0.0 };
            self.engine.set_bounds(j as usize, v, v);
        }
    }

    fn reoptimize(&mut self, basis: &Basis) -> Outcome {
        self.engine.load(basis);
        self.engine.iteration_limit = self.engine.iterations + self.per_solve;
        match self.engine.reoptimize() {
            LpStatus::Optimal => Outcome::Solved(self.engine.objective()),
            LpStatus::Infeasible => Outcome::Infeasible,
            // a child of a bounded LP cannot be unbounded; treat as failure
            LpStatus::Unbounded | LpStatus::IterationLimit => Outcome::Limit,
        }
    }

    // Most fractional binary, ties to the lowest column.
    fn branching_column(&self) -> Option<usize> {
        let mut best = None;
        let mut score = self.opts.int_tol;
        for &j in &self.bins {
            let x = self.engine.x[j];
            let f = x - x.floor();
            let s = f.min(1.0 - f);
            if s > score {
                score = s;
                best = Some(j);
            }
        }
        best
    }

    fn cutoff(&self) -> f64 {
        match &self.incumbent {
            Some((obj, _)) => obj - 1e-9 * obj.abs().max(1.0),
            None => f64::INFINITY,
        }
    }

    fn offer(&mut self, obj: f64) {
        if obj < self.cutoff() {
            let mut x: Vec<f64> = self.engine.x[..self.engine.n()].to_vec();
            for &j in &self.bins {
                x[j] = x[j].round();
            }
            self.incumbent = Some((obj, x));
        }
    }

    // Repeatedly rounds the least fractional binary and resolves.
    fn dive(&mut self, fixes: &[(u32, bool)], basis: &Basis) {
        let mut fixes = fixes.to_vec();
        let mut basis = basis.clone();
        for _ in 0..self.bins.len() {
            let mut pick: Option<(usize, f64)> = None;
            for &j in &self.bins {
                let x = self.engine.x[j];
                let f = x - x.floor();
                let s = f.min(1.0 - f);
                if s > self.opts.int_tol && pick.is_none_or(|(_, b)| s < b) {
                    pick = Some((j, s));
                }
            }
            let Some((j, _)) = pick else {
                let obj = self.engine.objective();
                self.offer(obj);
                return;
            };
            let up = self.engine.x[j] >= 0.5;
            let mut solved = false;
            for value in [up, !up] {
                fixes.push((j as u32, value));
                self.apply(&fixes);
                match self.reoptimize(&basis) {
                    Outcome::Solved(obj) if obj < self.cutoff() => {
                        solved = true;
                        break;
                    }
                    _ => {
                        fixes.pop();
                    }
                }
            }
            if !solved {
                return;
            }
            basis = self.engine.snapshot();
        }
    }
}

pub(crate) fn solve(model: &MilpModel, opts: &SolveOptions) -> Result<Solution, SolverError> {
    let start = Instant::now();
    let pre = Presolved::new(model);
    let constant = pre.model.objective.constant_value();
    let mut stats = SolveStats::default();
    if pre.infeasible {
        stats.seconds = start.elapsed().as_secs_f64();
        return Ok(Solution::without_point(Status::Infeasible, stats));
    }
    let reduced = &pre.model;
    let lp = to_std(reduced);
    let per_solve = 50 * (lp.n + lp.m) as u64 + 10_000;
    let mut search = Search {
        engine: Engine::new(lp),
        bins: reduced.binaries(),
        opts,
        incumbent: None,
        per_solve,
    };
    search.engine.iteration_limit = per_solve;
    let root = search.engine.primal();
    let finish = |search: &Search, stats: &mut SolveStats| {
        stats.simplex_iterations = search.engine.iterations;
        stats.seconds = start.elapsed().as_secs_f64();
    };
    match root {
        LpStatus::Optimal => {}
        LpStatus::Infeasible | LpStatus::Unbounded | LpStatus::IterationLimit => {
            finish(&search, &mut stats);
            let status = match root {
                LpStatus::Infeasible => Status::Infeasible,
                LpStatus::Unbounded => Status::Unbounded,
                _ => Status::Limit,
            };
            return Ok(Solution::without_point(status, stats));
        }
    }
    let root_obj = search.engine.objective();
    stats.nodes = 1;

    if search.branching_column().is_none() {
        search.offer(root_obj);
        finish(&search, &mut stats);
        let (obj, x) = search.incumbent.take().expect("root is integral");
        let objective = obj + constant;
        return Ok(Solution {
            status: Status::Optimal,
            objective,
            best_bound: objective,
            gap: 0.0,
            values: pre.postsolve(&x),
            stats,
        });
    }

    let root_basis = Rc::new(search.engine.snapshot());
    let root_col = search.branching_column().expect("fractional root");
    search.dive(&[], &root_basis);

    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    let mut push_children = |heap: &mut BinaryHeap<Node>,
                             j: usize,
                             fixes: &[(u32, bool)],
                             bound: f64,
                             basis: Rc<Basis>| {
        for value in [true, false] {
            let mut f = fixes.to_vec();
            f.push((j as u32, value));
            heap.push(Node {
                bound,
                seq,
                fixes: f,
                basis: Rc::clone(&basis),
            });
            seq += 1;
        }
    };
    push_children(&mut heap, root_col, &[], root_obj, root_basis);

    let mut hit_limit = false;
    loop {
        let bound = heap.peek().map_or(f64::INFINITY, |n| n.bound);
        if let Some((inc, _)) = &search.incumbent {
            if bound >= search.cutoff() || relative_gap(*inc, bound.min(*inc)) <= opts.mip_gap {
                break;
            }
        }
        let Some(node) = heap.pop() else { break };
        if opts.node_limit.is_some_and(|l| stats.nodes >= l)
            || opts.time_limit.is_some_and(|t| start.elapsed() >= t)
        {
            heap.push(node);
            hit_limit = true;
            break;
        }
        stats.nodes += 1;
        search.apply(&node.fixes);
        let obj = match search.reoptimize(&node.basis) {
            Outcome::Infeasible => continue,
            Outcome::Limit => {
                // keep the node's bound so the reported bound stays valid
                hit_limit = true;
                heap.push(node);
                break;
            }
            Outcome::Solved(obj) => obj,
        };
        if obj >= search.cutoff() {
            continue;
        }
        match search.branching_column() {
            None => search.offer(obj),
            Some(j) => {
                let basis = Rc::new(search.engine.snapshot());
                push_children(&mut heap, j, &node.fixes, obj, Rc::clone(&basis));
                if stats.nodes % DIVE_EVERY == 0 {
                    search.dive(&node.fixes, &basis);
                }
            }
        }
    }
    finish(&search, &mut stats);

    let open_bound = heap.peek().map(|n| n.bound);
    let Some((inc, x)) = search.incumbent.take() else {
        let status = if hit_limit {
            Status::Limit
        } else {
            Status::Infeasible
        };
        let mut s = Solution::without_point(status, stats);
        if let Some(b) = open_bound {
            s.best_bound = b + constant;
        }
        return Ok(s);
    };
    let bound = open_bound.map_or(inc, |b| b.min(inc));
    let objective = inc + constant;
    let best_bound = bound + constant;
    let gap = relative_gap(objective, best_bound);
    let status = if hit_limit && gap > opts.mip_gap {
        Status::Limit
    } else if open_bound.is_none() || bound >= inc - 1e-9 * inc.abs().max(1.0) {
        Status::Optimal
    } else {
        Status::GapReached
    };
    Ok(Solution {
        status,
        objective,
        best_bound,
        gap: if status == Status::Optimal { 0.0 } else { gap },
        values: pre.postsolve(&x),
        stats,
    })
}
