//! Test oracles and instance generators shared by the integration tests.
#![allow(dead_code)]

pub mod graphs;
pub mod power;

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};
use optigraph::expr::{LinExpr, LinearConstraint, Sense};
use optigraph::graph::VariableDef;
use optigraph::solver::MilpModel;
use rand::Rng;

/// Arithmetic the dense oracle runs on: exact rationals or tolerant floats.
pub trait Field:
    Clone
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn of(v: f64) -> Self;
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn is_zero(&self) -> bool {
        !self.is_pos() && !self.is_neg()
    }
    fn to_f64(&self) -> f64;
}

impl Field for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn of(v: f64) -> Self {
        v
    }
    fn is_pos(&self) -> bool {
        *self > 1e-9
    }
    fn is_neg(&self) -> bool {
        *self < -1e-9
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Field for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        BigRational::from_integer(BigInt::from(1))
    }
    fn of(v: f64) -> Self {
        BigRational::from_f64(v).expect("finite")
    }
    fn is_pos(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_neg(&self) -> bool {
        Signed::is_negative(self)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).expect("representable")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Oracle<T> {
    Optimal(T),
    Infeasible,
    Unbounded,
}

impl<T: Field> Oracle<T> {
    pub fn value(&self) -> Option<f64> {
        match self {
            Oracle::Optimal(v) => Some(v.to_f64()),
            _ => None,
        }
    }
}

/// Two-phase dense tableau simplex with Bland's rule, solving the LP
/// relaxation of `m` (binaries treated as `[0, 1]` unless `fixed` pins them).
pub fn dense_lp<T: Field>(m: &MilpModel, fixed: &[(usize, f64)]) -> Oracle<T> {
    let n = m.columns.len();
    let mut lo: Vec<f64> = m.columns.iter().map(|c| c.lower).collect();
    let mut hi: Vec<f64> = m.columns.iter().map(|c| c.upper).collect();
    for &(j, v) in fixed {
        lo[j] = v;
        hi[j] = v;
    }
    // x_j = shift_j + sum_k sign * p_k over new nonnegative columns
    let mut maps: Vec<(T, Vec<(usize, T)>)> = Vec::with_capacity(n);
    let mut np = 0usize;
    let mut extra_rows: Vec<(usize, T)> = Vec::new(); // p_k <= bound
    for j in 0..n {
        let (l, u) = (lo[j], hi[j]);
        if l.is_finite() {
            maps.push((T::of(l), vec![(np, T::one())]));
            if u.is_finite() {
                extra_rows.push((np, T::of(u) - T::of(l)));
            }
            np += 1;
        } else if u.is_finite() {
            maps.push((T::of(u), vec![(np, -T::one())]));
            np += 1;
        } else {
            maps.push((T::zero(), vec![(np, T::one()), (np + 1, -T::one())]));
            np += 2;
        }
    }
    // rows over p: (coeffs, sense, rhs)
    let mut rows: Vec<(Vec<T>, Sense, T)> = Vec::new();
    for r in &m.rows {
        let mut a = vec![T::zero(); np];
        let mut rhs = T::of(r.rhs());
        for &(j, c) in r.body().terms() {
            let c = T::of(c);
            rhs = rhs - c.clone() * maps[j].0.clone();
            for (k, s) in &maps[j].1 {
                a[*k] = a[*k].clone() + c.clone() * s.clone();
            }
        }
        rows.push((a, r.sense(), rhs));
    }
    for (k, b) in extra_rows {
        let mut a = vec![T::zero(); np];
        a[k] = T::one();
        rows.push((a, Sense::Le, b));
    }
    let mut cost = vec![T::zero(); np];
    let mut c0 = T::of(m.objective.constant_value());
    for &(j, c) in m.objective.terms() {
        let c = T::of(c);
        c0 = c0 + c.clone() * maps[j].0.clone();
        for (k, s) in &maps[j].1 {
            cost[*k] = cost[*k].clone() + c.clone() * s.clone();
        }
    }
    match tableau(rows, cost) {
        Oracle::Optimal(v) => Oracle::Optimal(v + c0),
        Oracle::Infeasible => Oracle::Infeasible,
        Oracle::Unbounded => Oracle::Unbounded,
    }
}

// min c^T p subject to rows, p >= 0.
fn tableau<T: Field>(rows: Vec<(Vec<T>, Sense, T)>, cost: Vec<T>) -> Oracle<T> {
    let np = cost.len();
    let m = rows.len();
    let slacks = rows.iter().filter(|r| r.1 != Sense::Eq).count();
    let ncol = np + slacks + m; // structural, slack, artificial
    let art0 = np + slacks;
    let mut t: Vec<Vec<T>> = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut s = np;
    for (i, (a, sense, b)) in rows.into_iter().enumerate() {
        let mut row = vec![T::zero(); ncol + 1];
        for (k, v) in a.into_iter().enumerate() {
            row[k] = v;
        }
        match sense {
            Sense::Le => {
                row[s] = T::one();
                s += 1;
            }
            Sense::Ge => {
                row[s] = -T::one();
                s += 1;
            }
            Sense::Eq => {}
        }
        row[ncol] = b;
        if row[ncol].is_neg() {
            for v in row.iter_mut() {
                *v = -v.clone();
            }
        }
        row[art0 + i] = T::one();
        basis.push(art0 + i);
        t.push(row);
    }
    // phase 1
    let mut c1 = vec![T::zero(); ncol];
    for c in c1.iter_mut().skip(art0) {
        *c = T::one();
    }
    if !run(&mut t, &mut basis, &c1, ncol) {
        unreachable!("phase one is bounded");
    }
    let infeas = basis
        .iter()
        .zip(&t)
        .filter(|(&b, _)| b >= art0)
        .fold(T::zero(), |acc, (_, r)| acc + r[ncol].clone());
    if infeas.is_pos() {
        return Oracle::Infeasible;
    }
    // drive zero artificials out of the basis, drop redundant rows
    let mut i = 0;
    while i < t.len() {
        if basis[i] >= art0 {
            if let Some(k) = (0..art0).find(|&k| !t[i][k].is_zero()) {
                pivot(&mut t, &mut basis, i, k);
                i += 1;
            } else {
                t.remove(i);
                basis.remove(i);
            }
        } else {
            i += 1;
        }
    }
    for row in t.iter_mut() {
        for v in row.iter_mut().take(ncol).skip(art0) {
            *v = T::zero();
        }
    }
    let mut c2 = vec![T::zero(); ncol];
    for (k, c) in cost.into_iter().enumerate() {
        c2[k] = c;
    }
    if !run(&mut t, &mut basis, &c2, art0) {
        return Oracle::Unbounded;
    }
    let obj = basis.iter().zip(&t).fold(T::zero(), |acc, (&b, r)| {
        acc + c2[b].clone() * r[ncol].clone()
    });
    Oracle::Optimal(obj)
}

fn pivot<T: Field>(t: &mut [Vec<T>], basis: &mut [usize], r: usize, k: usize) {
    let p = t[r][k].clone();
    for v in t[r].iter_mut() {
        *v = v.clone() / p.clone();
    }
    let prow = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i != r && !row[k].is_zero() {
            let f = row[k].clone();
            for (v, pv) in row.iter_mut().zip(&prow) {
                *v = v.clone() - f.clone() * pv.clone();
            }
        }
    }
    basis[r] = k;
}

// Bland's rule over columns [0, limit). Returns false when unbounded.
fn run<T: Field>(t: &mut [Vec<T>], basis: &mut [usize], c: &[T], limit: usize) -> bool {
    let rhs = t.first().map_or(0, |r| r.len() - 1);
    loop {
        let mut y_c = vec![T::zero(); limit];
        for k in 0..limit {
            let mut d = c[k].clone();
            for (row, &b) in t.iter().zip(basis.iter()) {
                if !row[k].is_zero() {
                    d = d - c[b].clone() * row[k].clone();
                }
            }
            y_c[k] = d;
        }
        let Some(k) = (0..limit).find(|&k| y_c[k].is_neg() && !basis.contains(&k)) else {
            return true;
        };
        let mut best: Option<(usize, T)> = None;
        for (i, row) in t.iter().enumerate() {
            if row[k].is_pos() {
                let ratio = row[rhs].clone() / row[k].clone();
                let take = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && basis[i] < basis[*bi]),
                };
                if take {
                    best = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = best else { return false };
        pivot(t, basis, r, k);
    }
}

/// Minimum over every binary assignment of the LP with binaries fixed,
/// using the dense float oracle.
pub fn enumerate_milp(m: &MilpModel) -> Oracle<f64> {
    let bins = m.binaries();
    let mut best: Option<f64> = None;
    let mut unbounded = false;
    for mask in 0u32..(1u32 << bins.len()) {
        let fixed: Vec<(usize, f64)> = bins
            .iter()
            .enumerate()
            .map(|(k, &j)| (j, ((mask >> k) & 1) as f64))
            .collect();
        match dense_lp::<f64>(m, &fixed) {
            Oracle::Optimal(v) => best = Some(best.map_or(v, |b: f64| b.min(v))),
            Oracle::Unbounded => unbounded = true,
            Oracle::Infeasible => {}
        }
    }
    if unbounded {
        Oracle::Unbounded
    } else {
        best.map_or(Oracle::Infeasible, Oracle::Optimal)
    }
}

/// Random bounded MILP with small integer data. A hidden point makes most
/// instances feasible.
pub fn random_milp(
    rng: &mut impl Rng,
    max_cols: usize,
    max_bins: usize,
    max_rows: usize,
) -> MilpModel {
    let n = rng.gen_range(1..=max_cols);
    let nb = rng.gen_range(0..=max_bins.min(n));
    let r = rng.gen_range(1..=max_rows);
    let mut m = MilpModel::new();
    let mut point = Vec::with_capacity(n);
    for j in 0..n {
        if j < nb {
            m.add_column(VariableDef::binary(format!("b{j}")));
            point.push(rng.gen_range(0..=1) as f64);
        } else {
            let lo = if rng.gen_bool(0.2) {
                -(rng.gen_range(0..=5) as f64)
            } else {
                0.0
            };
            let hi = lo + rng.gen_range(1..=10) as f64;
            m.add_column(VariableDef::continuous(format!("x{j}"), lo, hi));
            point.push(lo + rng.gen_range(0..=((hi - lo) as i32 * 2)) as f64 / 2.0);
        }
    }
    for _ in 0..r {
        let mut e = LinExpr::new();
        for j in 0..n {
            if rng.gen_bool(0.4) {
                e.add_term(j, rng.gen_range(-5..=5) as f64);
            }
        }
        let lhs = e.evaluate(|j| point[j]);
        let slack = rng.gen_range(0..=4) as f64;
        let c = match rng.gen_range(0..5) {
            0 if e.terms().iter().all(|&(j, _)| j >= nb) => LinearConstraint::eq(e, lhs),
            0 | 1 => LinearConstraint::ge(e, lhs - slack),
            _ => LinearConstraint::le(e, lhs + slack),
        };
        m.add_row(c);
    }
    let mut obj = LinExpr::new();
    for j in 0..n {
        obj.add_term(j, rng.gen_range(-10..=10) as f64);
    }
    m.objective = obj;
    // occasionally break the hidden point
    if rng.gen_bool(0.05) {
        let j = rng.gen_range(0..n);
        let ub = m.columns[j].upper;
        m.add_row(LinearConstraint::ge(LinExpr::var(j), ub + 1.0));
    }
    m
}

/// Random LP with `m` rows and `n` columns, bounded feasible region.
pub fn random_lp(rng: &mut impl Rng, rows: usize, cols: usize) -> MilpModel {
    let mut m = MilpModel::new();
    for j in 0..cols {
        let lo = if rng.gen_bool(0.3) {
            -(rng.gen_range(1..=4) as f64)
        } else {
            0.0
        };
        let hi = if rng.gen_bool(0.8) {
            lo + rng.gen_range(1..=9) as f64
        } else {
            f64::INFINITY
        };
        m.add_column(VariableDef::continuous(format!("x{j}"), lo, hi));
    }
    for _ in 0..rows {
        let mut e = LinExpr::new();
        for j in 0..cols {
            if rng.gen_bool(0.5) {
                let c = rng.gen_range(-9..=9) as f64 / rng.gen_range(1..=4) as f64;
                e.add_term(j, c);
            }
        }
        let b = rng.gen_range(-5..=20) as f64;
        let c = match rng.gen_range(0..6) {
            0 => LinearConstraint::eq(e, b / 2.0),
            1 => LinearConstraint::ge(e, -b),
            _ => LinearConstraint::le(e, b),
        };
        m.add_row(c);
    }
    let mut obj = LinExpr::new();
    for j in 0..cols {
        obj.add_term(j, rng.gen_range(-7..=7) as f64 / 2.0);
    }
    m.objective = obj;
    m
}
