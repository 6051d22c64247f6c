//! Bounded-variable revised simplex over `A x - r = 0`, where `r` holds one
//! logical variable per row carrying the row bounds.
//!
//! The primal method minimizes the sum of bound infeasibilities of the basic
//! variables until it reaches zero, then the true objective. The dual method
//! reoptimizes after bound changes from a dual-feasible basis, which is how
//! branch-and-bound children are solved.

// Dense kernels walk several parallel arrays by the same index.
#![allow(clippy::needless_range_loop)]

use super::lu::{LuFactor, Singular};

const PRIMAL_TOL: f64 = 1e-9;
const DUAL_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 100;
/// Consecutive degenerate pivots before switching to Bland's rule.
pub(crate) const STALL_THRESHOLD: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum VarState {
    Basic,
    Lower,
    Upper,
    /// Free nonbasic variable held at zero.
    Zero,
}

/// Sparse constraint matrix and bounds in computational form.
#[derive(Clone, Debug)]
pub(crate) struct StdLp {
    pub n: usize,
    pub m: usize,
    pub col_start: Vec<usize>,
    pub row_idx: Vec<usize>,
    pub val: Vec<f64>,
    /// Length `n + m`; logicals cost zero.
    pub cost: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl StdLp {
    fn column(&self, j: usize) -> ColIter<'_> {
        if j < self.n {
            ColIter::Struct {
                rows: &self.row_idx[self.col_start[j]..self.col_start[j + 1]],
                vals: &self.val[self.col_start[j]..self.col_start[j + 1]],
                k: 0,
            }
        } else {
            ColIter::Logical(Some(j - self.n))
        }
    }

    fn dot(&self, j: usize, y: &[f64]) -> f64 {
        if j < self.n {
            let mut s = 0.0;
            for k in self.col_start[j]..self.col_start[j + 1] {
                s += self.val[k] * y[self.row_idx[k]];
            }
            s
        } else {
            -y[j - self.n]
        }
    }
}

enum ColIter<'a> {
    Struct {
        rows: &'a [usize],
        vals: &'a [f64],
        k: usize,
    },
    Logical(Option<usize>),
}

impl Iterator for ColIter<'_> {
    type Item = (usize, f64);
    fn next(&mut self) -> Option<(usize, f64)> {
        match self {
            ColIter::Struct { rows, vals, k } => {
                let out = rows.get(*k).map(|&r| (r, vals[*k]));
                *k += 1;
                out
            }
            ColIter::Logical(i) => i.take().map(|i| (i, -1.0)),
        }
    }
}

/// Compact basis description used to warm start.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Basis {
    pub head: Vec<u32>,
    pub state: Vec<VarState>,
}

pub(crate) struct Engine {
    pub lp: StdLp,
    head: Vec<usize>,
    pos: Vec<usize>,
    state: Vec<VarState>,
    pub x: Vec<f64>,
    factor: LuFactor,
    pub iterations: u64,
    pub iteration_limit: u64,
    // scratch
    work_row: Vec<f64>,
    work_pos: Vec<f64>,
    alpha: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

const NONE: usize = usize::MAX;

impl Engine {
    pub fn new(lp: StdLp) -> Self {
        let (n, m) = (lp.n, lp.m);
        let mut e = Engine {
            head: (n..n + m).collect(),
            pos: vec![NONE; n + m],
            state: vec![VarState::Lower; n + m],
            x: vec![0.0; n + m],
            factor: LuFactor::default(),
            iterations: 0,
            iteration_limit: 50 * (n + m) as u64 + 10_000,
            work_row: vec![0.0; m],
            work_pos: vec![0.0; m],
            alpha: vec![0.0; m],
            y: vec![0.0; m],
            d: vec![0.0; n + m],
            lp,
        };
        for i in 0..m {
            e.pos[n + i] = i;
            e.state[n + i] = VarState::Basic;
        }
        for j in 0..n {
            e.state[j] = e.resting_state(j, VarState::Lower);
        }
        e.refactor();
        e.compute_primal();
        e
    }

    pub fn n(&self) -> usize {
        self.lp.n
    }

    pub fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) {
        self.lp.lower[j] = lower;
        self.lp.upper[j] = upper;
        if self.state[j] != VarState::Basic {
            self.state[j] = self.resting_state(j, self.state[j]);
        }
    }

    pub fn snapshot(&self) -> Basis {
        Basis {
            head: self.head.iter().map(|&h| h as u32).collect(),
            state: self.state.clone(),
        }
    }

    pub fn load(&mut self, b: &Basis) {
        self.head = b.head.iter().map(|&h| h as usize).collect();
        self.state = b.state.clone();
        self.pos.iter_mut().for_each(|p| *p = NONE);
        for (i, &h) in self.head.iter().enumerate() {
            self.pos[h] = i;
        }
        for j in 0..self.lp.n + self.lp.m {
            if self.state[j] != VarState::Basic {
                self.state[j] = self.resting_state(j, self.state[j]);
            }
        }
        self.refactor();
        self.compute_primal();
    }

    pub fn objective(&self) -> f64 {
        self.lp.cost.iter().zip(&self.x).map(|(c, x)| c * x).sum()
    }

    // Nonbasic state consistent with the current bounds, keeping `prefer`
    // when it is still valid.
    fn resting_state(&self, j: usize, prefer: VarState) -> VarState {
        let (l, u) = (self.lp.lower[j], self.lp.upper[j]);
        match prefer {
            VarState::Upper if u.is_finite() => VarState::Upper,
            _ if l.is_finite() => VarState::Lower,
            _ if u.is_finite() => VarState::Upper,
            _ => VarState::Zero,
        }
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.state[j] {
            VarState::Lower => self.lp.lower[j],
            VarState::Upper => self.lp.upper[j],
            _ => 0.0,
        }
    }

    fn refactor(&mut self) {
        let m = self.lp.m;
        loop {
            let cols: Vec<Vec<(usize, f64)>> = self
                .head
                .iter()
                .map(|&j| self.lp.column(j).collect())
                .collect();
            match LuFactor::factorize(m, &cols) {
                Ok(f) => {
                    self.factor = f;
                    return;
                }
                Err(Singular { positions, rows }) => {
                    // replace unpivoted columns by the logicals of unpivoted rows
                    for &p in &positions {
                        let out = self.head[p];
                        self.pos[out] = NONE;
                        self.state[out] = self.resting_state(out, VarState::Lower);
                    }
                    for (&p, &r) in positions.iter().zip(&rows) {
                        let logical = self.lp.n + r;
                        self.head[p] = logical;
                        self.pos[logical] = p;
                        self.state[logical] = VarState::Basic;
                    }
                }
            }
        }
    }

    /// Recomputes basic values from nonbasic values.
    pub fn compute_primal(&mut self) {
        let (n, m) = (self.lp.n, self.lp.m);
        self.work_row.iter_mut().for_each(|v| *v = 0.0);
        for j in 0..n + m {
            if self.state[j] == VarState::Basic {
                continue;
            }
            let v = self.nonbasic_value(j);
            self.x[j] = v;
            if v != 0.0 {
                for (i, a) in self.lp.column(j) {
                    self.work_row[i] -= a * v;
                }
            }
        }
        self.factor.ftran(&mut self.work_row, &mut self.work_pos);
        for i in 0..m {
            self.x[self.head[i]] = self.work_pos[i];
        }
    }

    fn infeasibility(&self, j: usize) -> f64 {
        let x = self.x[j];
        if x < self.lp.lower[j] - PRIMAL_TOL {
            x - self.lp.lower[j]
        } else if x > self.lp.upper[j] + PRIMAL_TOL {
            x - self.lp.upper[j]
        } else {
            0.0
        }
    }

    // y = B^{-T} c_B for the given basic costs, then reduced costs of all
    // nonbasic variables.
    fn compute_duals(&mut self, phase1: bool) {
        let m = self.lp.m;
        for i in 0..m {
            let j = self.head[i];
            self.work_pos[i] = if phase1 {
                let inf = self.infeasibility(j);
                if inf < 0.0 {
                    -1.0
                } else if inf > 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                self.lp.cost[j]
            };
        }
        self.factor.btran(&mut self.work_pos, &mut self.y);
        for j in 0..self.lp.n + m {
            self.d[j] = if self.state[j] == VarState::Basic {
                0.0
            } else {
                let c = if phase1 { 0.0 } else { self.lp.cost[j] };
                c - self.lp.dot(j, &self.y)
            };
        }
    }

    fn ftran_column(&mut self, j: usize) {
        self.work_row.iter_mut().for_each(|v| *v = 0.0);
        for (i, a) in self.lp.column(j) {
            self.work_row[i] = a;
        }
        self.factor.ftran(&mut self.work_row, &mut self.alpha);
    }

    fn replace(&mut self, p: usize, entering: usize, leaving_state: VarState) {
        let leaving = self.head[p];
        self.factor.update(p, &self.alpha);
        self.head[p] = entering;
        self.pos[entering] = p;
        self.state[entering] = VarState::Basic;
        self.pos[leaving] = NONE;
        self.state[leaving] = leaving_state;
        self.x[leaving] = self.nonbasic_value(leaving);
        self.iterations += 1;
        if self.factor.num_etas() >= REFACTOR_EVERY
            || self.factor.eta_nnz() > 4 * self.factor.factor_nnz() + 10 * self.lp.m
        {
            self.refactor();
            self.compute_primal();
        }
    }

    fn sum_infeasibility(&self) -> f64 {
        self.head.iter().map(|&j| self.infeasibility(j).abs()).sum()
    }

    /// Primal simplex from the current basis.
    pub fn primal(&mut self) -> LpStatus {
        let (n, m) = (self.lp.n, self.lp.m);
        let mut stall = 0usize;
        let mut bland = false;
        let mut last_phase1 = None;
        loop {
            if self.iterations >= self.iteration_limit {
                return LpStatus::IterationLimit;
            }
            let phase1 = self.head.iter().any(|&j| self.infeasibility(j) != 0.0);
            if last_phase1 != Some(phase1) {
                stall = 0;
                bland = false;
                last_phase1 = Some(phase1);
            }
            self.compute_duals(phase1);

            // entering variable
            let mut q = NONE;
            let mut best = 0.0;
            for j in 0..n + m {
                let dir = self.improving_direction(j);
                if dir == 0.0 {
                    continue;
                }
                let score = self.d[j].abs();
                if bland {
                    q = j;
                    break;
                }
                if score > best {
                    best = score;
                    q = j;
                }
            }
            if q == NONE {
                if phase1 {
                    // verify against a fresh factorization before concluding
                    self.refactor();
                    self.compute_primal();
                    if self.sum_infeasibility() > 0.0 {
                        return LpStatus::Infeasible;
                    }
                    continue;
                }
                return LpStatus::Optimal;
            }
            let dir = self.improving_direction(q);
            self.ftran_column(q);

            // ratio test: basic i moves by -dir * alpha_i per unit step
            let (leave, step, to_upper) = self.primal_ratio(dir, phase1, bland);
            let range = self.lp.upper[q] - self.lp.lower[q];
            if range.is_finite() && range <= step {
                // bound flip
                let t = range;
                self.apply_step(q, dir, t);
                self.state[q] = if dir > 0.0 {
                    VarState::Upper
                } else {
                    VarState::Lower
                };
                self.x[q] = self.nonbasic_value(q);
                self.iterations += 1;
                stall = 0;
                bland = false;
                continue;
            }
            if leave == NONE {
                if phase1 {
                    self.iterations += 1;
                    self.refactor();
                    self.compute_primal();
                    continue;
                }
                return LpStatus::Unbounded;
            }
            self.apply_step(q, dir, step);
            let leaving_state = if to_upper {
                VarState::Upper
            } else {
                VarState::Lower
            };
            self.replace(leave, q, leaving_state);
            if step <= 1e-12 {
                stall += 1;
                if stall >= STALL_THRESHOLD {
                    bland = true;
                }
            } else {
                stall = 0;
                bland = false;
            }
        }
    }

    // +1 to increase, -1 to decrease, 0 when not an attractive candidate.
    fn improving_direction(&self, j: usize) -> f64 {
        let d = self.d[j];
        match self.state[j] {
            VarState::Basic => 0.0,
            _ if self.lp.lower[j] == self.lp.upper[j] => 0.0,
            VarState::Lower if d < -DUAL_TOL => 1.0,
            VarState::Upper if d > DUAL_TOL => -1.0,
            VarState::Zero if d.abs() > DUAL_TOL => -d.signum(),
            _ => 0.0,
        }
    }

    fn apply_step(&mut self, q: usize, dir: f64, t: f64) {
        if t == 0.0 {
            return;
        }
        self.x[q] += dir * t;
        for i in 0..self.lp.m {
            let a = self.alpha[i];
            if a != 0.0 {
                self.x[self.head[i]] -= dir * a * t;
            }
        }
    }

    // Harris two-pass ratio test; Bland mode takes the minimum ratio with
    // ties to the lowest variable index. Returns (position, step, leaves at
    // upper bound).
    fn primal_ratio(&self, dir: f64, phase1: bool, bland: bool) -> (usize, f64, bool) {
        let m = self.lp.m;
        let bound_for = |i: usize, rate: f64| -> Option<(f64, bool)> {
            let j = self.head[i];
            let (l, u, x) = (self.lp.lower[j], self.lp.upper[j], self.x[j]);
            if rate < 0.0 {
                // decreasing
                if phase1 && x > u + PRIMAL_TOL {
                    return Some((u, true));
                }
                if phase1 && x < l - PRIMAL_TOL {
                    return None;
                }
                l.is_finite().then_some((l, false))
            } else {
                if phase1 && x < l - PRIMAL_TOL {
                    return Some((l, false));
                }
                if phase1 && x > u + PRIMAL_TOL {
                    return None;
                }
                u.is_finite().then_some((u, true))
            }
        };
        let mut tmax = f64::INFINITY;
        for i in 0..m {
            let rate = -dir * self.alpha[i];
            if rate.abs() <= PIVOT_TOL {
                continue;
            }
            if let Some((b, _)) = bound_for(i, rate) {
                let x = self.x[self.head[i]];
                let relaxed = if rate < 0.0 {
                    (x - b + PRIMAL_TOL) / -rate
                } else {
                    (b - x + PRIMAL_TOL) / rate
                };
                if bland {
                    let exact = ((b - x) / rate).max(0.0);
                    tmax = tmax.min(exact);
                } else {
                    tmax = tmax.min(relaxed);
                }
            }
        }
        if !tmax.is_finite() {
            return (NONE, f64::INFINITY, false);
        }
        let mut best = NONE;
        let mut best_mag = 0.0;
        let mut best_step = 0.0;
        let mut best_up = false;
        for i in 0..m {
            let rate = -dir * self.alpha[i];
            if rate.abs() <= PIVOT_TOL {
                continue;
            }
            if let Some((b, up)) = bound_for(i, rate) {
                let x = self.x[self.head[i]];
                let exact = ((b - x) / rate).max(0.0);
                if bland {
                    if exact <= tmax + 1e-12 && (best == NONE || self.head[i] < self.head[best]) {
                        best = i;
                        best_step = exact;
                        best_up = up;
                    }
                } else if exact <= tmax && rate.abs() > best_mag {
                    best = i;
                    best_mag = rate.abs();
                    best_step = exact;
                    best_up = up;
                }
            }
        }
        (best, best_step, best_up)
    }

    /// Flips boxed nonbasic variables with wrong-signed reduced costs.
    /// Returns false when a non-boxed variable remains dual infeasible.
    fn make_dual_feasible(&mut self) -> bool {
        let mut flipped = false;
        let mut ok = true;
        for j in 0..self.lp.n + self.lp.m {
            let d = self.d[j];
            let (l, u) = (self.lp.lower[j], self.lp.upper[j]);
            if l == u {
                continue;
            }
            match self.state[j] {
                VarState::Lower if d < -DUAL_TOL => {
                    if u.is_finite() {
                        self.state[j] = VarState::Upper;
                        flipped = true;
                    } else {
                        ok = false;
                    }
                }
                VarState::Upper if d > DUAL_TOL => {
                    if l.is_finite() {
                        self.state[j] = VarState::Lower;
                        flipped = true;
                    } else {
                        ok = false;
                    }
                }
                VarState::Zero if d.abs() > DUAL_TOL => ok = false,
                _ => {}
            }
        }
        if flipped {
            self.compute_primal();
        }
        ok
    }

    /// Dual simplex from the current basis; falls back to the primal method
    /// when the basis is not dual feasible or the dual run stalls.
    pub fn reoptimize(&mut self) -> LpStatus {
        self.compute_duals(false);
        if !self.make_dual_feasible() {
            return self.primal();
        }
        match self.dual() {
            LpStatus::IterationLimit => {
                if self.iterations >= self.iteration_limit {
                    LpStatus::IterationLimit
                } else {
                    self.primal()
                }
            }
            LpStatus::Optimal => self.primal(),
            s => s,
        }
    }

    // Reduced costs in `self.d` must be current and dual feasible on entry.
    fn dual(&mut self) -> LpStatus {
        let (n, m) = (self.lp.n, self.lp.m);
        let budget = self.iterations + 20 * (n + m) as u64 + 1000;
        let mut rho = vec![0.0; m];
        let mut alpha_r = vec![0.0; n + m];
        let mut since_refresh = 0usize;
        loop {
            if self.iterations >= self.iteration_limit.min(budget) {
                return LpStatus::IterationLimit;
            }
            // leaving row: largest bound violation
            let mut p = NONE;
            let mut worst = PRIMAL_TOL;
            for i in 0..m {
                let v = self.infeasibility(self.head[i]).abs();
                if v > worst {
                    worst = v;
                    p = i;
                }
            }
            if p == NONE {
                return LpStatus::Optimal;
            }
            let leaving = self.head[p];
            let below = self.x[leaving] < self.lp.lower[leaving];
            let target = if below {
                self.lp.lower[leaving]
            } else {
                self.lp.upper[leaving]
            };

            self.work_pos.iter_mut().for_each(|v| *v = 0.0);
            self.work_pos[p] = 1.0;
            self.factor.btran(&mut self.work_pos, &mut rho);
            for j in 0..n + m {
                alpha_r[j] = if self.state[j] == VarState::Basic {
                    0.0
                } else {
                    self.lp.dot(j, &rho)
                };
            }

            // dual ratio test (Harris)
            let eligible = |j: usize, a: f64| -> bool {
                if a.abs() <= PIVOT_TOL || self.lp.lower[j] == self.lp.upper[j] {
                    return false;
                }
                match self.state[j] {
                    VarState::Basic => false,
                    VarState::Lower => (below && a < 0.0) || (!below && a > 0.0),
                    VarState::Upper => (below && a > 0.0) || (!below && a < 0.0),
                    VarState::Zero => true,
                }
            };
            let mut tmax = f64::INFINITY;
            for j in 0..n + m {
                let a = alpha_r[j];
                if eligible(j, a) {
                    tmax = tmax.min((self.d[j].abs() + DUAL_TOL) / a.abs());
                }
            }
            if !tmax.is_finite() {
                return LpStatus::Infeasible;
            }
            let mut q = NONE;
            let mut best = 0.0;
            for j in 0..n + m {
                let a = alpha_r[j];
                if eligible(j, a) && self.d[j].abs() / a.abs() <= tmax && a.abs() > best {
                    best = a.abs();
                    q = j;
                }
            }
            if q == NONE {
                return LpStatus::Infeasible;
            }

            self.ftran_column(q);
            let apq = self.alpha[p];
            if apq.abs() <= PIVOT_TOL {
                self.refactor();
                self.compute_primal();
                self.compute_duals(false);
                if !self.make_dual_feasible() {
                    return LpStatus::IterationLimit;
                }
                continue;
            }
            // primal step on the entering variable
            let delta = (self.x[leaving] - target) / apq;
            self.x[q] += delta;
            for i in 0..m {
                let a = self.alpha[i];
                if a != 0.0 {
                    self.x[self.head[i]] -= a * delta;
                }
            }
            // dual step
            let theta = self.d[q] / alpha_r[q];
            for j in 0..n + m {
                if self.state[j] != VarState::Basic && alpha_r[j] != 0.0 {
                    self.d[j] -= theta * alpha_r[j];
                }
            }
            self.d[q] = 0.0;
            self.d[leaving] = -theta;
            let leaving_state = if below {
                VarState::Lower
            } else {
                VarState::Upper
            };
            let before = self.factor.num_etas();
            self.replace(p, q, leaving_state);
            since_refresh += 1;
            if self.factor.num_etas() <= before || since_refresh >= REFACTOR_EVERY {
                // refactorized: refresh reduced costs too
                since_refresh = 0;
                self.compute_duals(false);
                if !self.make_dual_feasible() {
                    return LpStatus::IterationLimit;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Builds a StdLp from dense rows `lo <= A x <= hi`.
    pub(crate) fn dense_lp(
        a: &[Vec<f64>],
        row_lo: &[f64],
        row_hi: &[f64],
        cost: &[f64],
        lo: &[f64],
        hi: &[f64],
    ) -> StdLp {
        let m = a.len();
        let n = cost.len();
        let mut col_start = vec![0];
        let mut row_idx = Vec::new();
        let mut val = Vec::new();
        for j in 0..n {
            for i in 0..m {
                if a[i][j] != 0.0 {
                    row_idx.push(i);
                    val.push(a[i][j]);
                }
            }
            col_start.push(row_idx.len());
        }
        let mut c = cost.to_vec();
        c.extend(std::iter::repeat_n(0.0, m));
        let mut lower = lo.to_vec();
        lower.extend_from_slice(row_lo);
        let mut upper = hi.to_vec();
        upper.extend_from_slice(row_hi);
        StdLp {
            n,
            m,
            col_start,
            row_idx,
            val,
            cost: c,
            lower,
            upper,
        }
    }

    const INF: f64 = f64::INFINITY;

    #[test]
    fn single_variable_bound() {
        let lp = dense_lp(&[vec![1.0]], &[-INF], &[4.0], &[-1.0], &[0.0], &[INF]);
        let mut e = Engine::new(lp);
        assert_eq!(e.primal(), LpStatus::Optimal);
        assert!((e.objective() + 4.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_pair() {
        let lp = dense_lp(
            &[vec![1.0], vec![1.0]],
            &[-INF, 1.0],
            &[0.0, INF],
            &[0.0],
            &[-INF],
            &[INF],
        );
        let mut e = Engine::new(lp);
        assert_eq!(e.primal(), LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_ray() {
        let lp = dense_lp(
            &[vec![1.0, -1.0]],
            &[-INF],
            &[1.0],
            &[-1.0, 0.0],
            &[0.0, 0.0],
            &[INF, INF],
        );
        let mut e = Engine::new(lp);
        assert_eq!(e.primal(), LpStatus::Unbounded);
    }

    #[test]
    fn textbook_lp() {
        // max 3x + 5y; x <= 4; 2y <= 12; 3x + 2y <= 18 -> 36 at (2, 6)
        let lp = dense_lp(
            &[vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]],
            &[-INF; 3],
            &[4.0, 12.0, 18.0],
            &[-3.0, -5.0],
            &[0.0, 0.0],
            &[INF, INF],
        );
        let mut e = Engine::new(lp);
        assert_eq!(e.primal(), LpStatus::Optimal);
        assert!((e.objective() + 36.0).abs() < 1e-9);
        assert!((e.x[0] - 2.0).abs() < 1e-9 && (e.x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn dual_reoptimize_after_bound_change() {
        let lp = dense_lp(
            &[vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]],
            &[-INF; 3],
            &[4.0, 12.0, 18.0],
            &[-3.0, -5.0],
            &[0.0, 0.0],
            &[INF, INF],
        );
        let mut e = Engine::new(lp.clone());
        assert_eq!(e.primal(), LpStatus::Optimal);
        let basis = e.snapshot();
        e.set_bounds(1, 0.0, 3.0);
        e.load(&basis);
        assert_eq!(e.reoptimize(), LpStatus::Optimal);
        // x = 4, y = 3 -> -27
        assert!((e.objective() + 27.0).abs() < 1e-9);
        e.set_bounds(0, 5.0, INF);
        e.load(&e.snapshot());
        assert_eq!(e.reoptimize(), LpStatus::Infeasible);
    }

    #[test]
    fn equality_and_free_variables() {
        // min x + y, x - y = 1, x + y >= 3, x, y free -> 3
        let lp = dense_lp(
            &[vec![1.0, -1.0], vec![1.0, 1.0]],
            &[1.0, 3.0],
            &[1.0, INF],
            &[1.0, 1.0],
            &[-INF, -INF],
            &[INF, INF],
        );
        let mut e = Engine::new(lp);
        assert_eq!(e.primal(), LpStatus::Optimal);
        assert!((e.objective() - 3.0).abs() < 1e-9);
        assert!((e.x[0] - 2.0).abs() < 1e-9);
    }
}
