//! Sparse linear expressions and constraints.
//!
//! [`LinExpr`] is generic over the variable key so the same algebra serves the
//! graph layer (keys are [`VariableRef`](crate::graph::VariableRef)s) and the
//! solver (keys are flat column indices).

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance used to classify fully substituted constraints.
pub const SUBSTITUTION_TOL: f64 = 1e-6;

/// Marker trait for anything usable as a variable key.
pub trait VarKey: Copy + Ord + Hash + fmt::Debug {}
impl<T: Copy + Ord + Hash + fmt::Debug> VarKey for T {}

/// A canonical sparse affine expression `sum(coef * var) + constant`.
///
/// Terms are kept sorted by key with at most one entry per key and no zero
/// coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinExpr<V> {
    terms: Vec<(V, f64)>,
    constant: f64,
}

impl<V> Default for LinExpr<V> {
    fn default() -> Self {
        Self {
            terms: Vec::new(),
            constant: 0.0,
        }
    }
}

impl<V: VarKey> LinExpr<V> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn constant(value: f64) -> Self {
        Self {
            terms: Vec::new(),
            constant: value,
        }
    }

    pub fn var(v: V) -> Self {
        Self::term(v, 1.0)
    }

    pub fn term(v: V, coef: f64) -> Self {
        Self::from_terms([(v, coef)], 0.0)
    }

    /// Builds a canonical expression from arbitrary (possibly repeated) terms.
    pub fn from_terms(terms: impl IntoIterator<Item = (V, f64)>, constant: f64) -> Self {
        let mut e = Self {
            terms: terms.into_iter().collect(),
            constant,
        };
        e.canonicalize();
        e
    }

    /// Sorts, merges duplicate keys and drops zero coefficients.
    pub fn canonicalize(&mut self) {
        if self.terms.windows(2).all(|w| w[0].0 < w[1].0) && self.terms.iter().all(|t| t.1 != 0.0) {
            return;
        }
        self.terms.sort_by_key(|t| t.0);
        let mut out: Vec<(V, f64)> = Vec::with_capacity(self.terms.len());
        for (v, c) in self.terms.drain(..) {
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 += c,
                _ => out.push((v, c)),
            }
        }
        out.retain(|t| t.1 != 0.0);
        self.terms = out;
    }

    pub fn terms(&self) -> &[(V, f64)] {
        &self.terms
    }

    pub fn constant_value(&self) -> f64 {
        self.constant
    }

    pub fn set_constant(&mut self, c: f64) {
        self.constant = c;
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty() && self.constant == 0.0
    }

    pub fn coefficient(&self, v: V) -> f64 {
        self.terms
            .binary_search_by(|t| t.0.cmp(&v))
            .map(|i| self.terms[i].1)
            .unwrap_or(0.0)
    }

    pub fn add_term(&mut self, v: V, coef: f64) {
        match self.terms.binary_search_by(|t| t.0.cmp(&v)) {
            Ok(i) => {
                self.terms[i].1 += coef;
                if self.terms[i].1 == 0.0 {
                    self.terms.remove(i);
                }
            }
            Err(i) => {
                if coef != 0.0 {
                    self.terms.insert(i, (v, coef));
                }
            }
        }
    }

    pub fn scale(&self, k: f64) -> Self {
        if k == 0.0 {
            return Self::constant(0.0);
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|&(v, c)| (v, c * k))
                .filter(|t| t.1 != 0.0)
                .collect(),
            constant: self.constant * k,
        }
    }

    /// Evaluates the expression given a value for every referenced key.
    pub fn evaluate(&self, mut value: impl FnMut(V) -> f64) -> f64 {
        self.terms
            .iter()
            .fold(self.constant, |acc, &(v, c)| acc + c * value(v))
    }

    /// Renames every key; colliding images are merged.
    pub fn map_vars<W: VarKey>(&self, mut f: impl FnMut(V) -> W) -> LinExpr<W> {
        LinExpr::from_terms(self.terms.iter().map(|&(v, c)| (f(v), c)), self.constant)
    }

    /// Folds every key for which `fixed` returns a value into the constant.
    pub fn substitute_with(&self, mut fixed: impl FnMut(V) -> Option<f64>) -> Self {
        let mut constant = self.constant;
        let mut terms = Vec::with_capacity(self.terms.len());
        for &(v, c) in &self.terms {
            match fixed(v) {
                Some(x) => constant += c * x,
                None => terms.push((v, c)),
            }
        }
        Self { terms, constant }
    }

    fn merge(&self, other: &Self, k: f64) -> Self {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                let c = k * b[j].1;
                if c != 0.0 {
                    out.push((b[j].0, c));
                }
                j += 1;
            } else {
                let c = a[i].1 + k * b[j].1;
                if c != 0.0 {
                    out.push((a[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        Self {
            terms: out,
            constant: self.constant + k * other.constant,
        }
    }
}

impl<V: VarKey> Add for LinExpr<V> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.merge(&rhs, 1.0)
    }
}

impl<V: VarKey> Add<&LinExpr<V>> for &LinExpr<V> {
    type Output = LinExpr<V>;
    fn add(self, rhs: &LinExpr<V>) -> LinExpr<V> {
        self.merge(rhs, 1.0)
    }
}

impl<V: VarKey> Sub for LinExpr<V> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.merge(&rhs, -1.0)
    }
}

impl<V: VarKey> Sub<&LinExpr<V>> for &LinExpr<V> {
    type Output = LinExpr<V>;
    fn sub(self, rhs: &LinExpr<V>) -> LinExpr<V> {
        self.merge(rhs, -1.0)
    }
}

impl<V: VarKey> AddAssign for LinExpr<V> {
    fn add_assign(&mut self, rhs: Self) {
        *self = self.merge(&rhs, 1.0);
    }
}

impl<V: VarKey> SubAssign for LinExpr<V> {
    fn sub_assign(&mut self, rhs: Self) {
        *self = self.merge(&rhs, -1.0);
    }
}

impl<V: VarKey> Add<f64> for LinExpr<V> {
    type Output = Self;
    fn add(mut self, rhs: f64) -> Self {
        self.constant += rhs;
        self
    }
}

impl<V: VarKey> Sub<f64> for LinExpr<V> {
    type Output = Self;
    fn sub(mut self, rhs: f64) -> Self {
        self.constant -= rhs;
        self
    }
}

impl<V: VarKey> Mul<f64> for LinExpr<V> {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        self.scale(k)
    }
}

impl<V: VarKey> Neg for LinExpr<V> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        }
    }

    /// Amount by which `lhs (sense) rhs` is violated; zero when satisfied.
    pub fn violation(self, lhs: f64, rhs: f64) -> f64 {
        match self {
            Sense::Le => (lhs - rhs).max(0.0),
            Sense::Ge => (rhs - lhs).max(0.0),
            Sense::Eq => (lhs - rhs).abs(),
        }
    }
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// `body (sense) rhs` with the body's constant always folded into `rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearConstraint<V> {
    body: LinExpr<V>,
    sense: Sense,
    rhs: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum ExprError {
    #[error("band half-width must be non-negative, got {0}")]
    NegativeBand(f64),
    #[error(
        "fully substituted constraint violated: {lhs} {sense} {rhs} (residual {residual:.3e})"
    )]
    Violated {
        lhs: f64,
        sense: Sense,
        rhs: f64,
        residual: f64,
    },
}

/// Result of substituting fixed values into a constraint.
#[derive(Clone, Debug, PartialEq)]
pub enum Substituted<V> {
    Constraint(LinearConstraint<V>),
    /// Every variable was fixed and the remaining constant relation holds.
    Satisfied,
}

impl<V: VarKey> LinearConstraint<V> {
    pub fn new(body: LinExpr<V>, sense: Sense, rhs: f64) -> Self {
        let mut body = body;
        let rhs = rhs - body.constant;
        body.constant = 0.0;
        Self { body, sense, rhs }
    }

    pub fn le(lhs: LinExpr<V>, rhs: f64) -> Self {
        Self::new(lhs, Sense::Le, rhs)
    }

    pub fn ge(lhs: LinExpr<V>, rhs: f64) -> Self {
        Self::new(lhs, Sense::Ge, rhs)
    }

    pub fn eq(lhs: LinExpr<V>, rhs: f64) -> Self {
        Self::new(lhs, Sense::Eq, rhs)
    }

    pub fn body(&self) -> &LinExpr<V> {
        &self.body
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn rhs(&self) -> f64 {
        self.rhs
    }

    pub fn vars(&self) -> impl Iterator<Item = V> + '_ {
        self.body.terms.iter().map(|t| t.0)
    }

    /// Violation at the given point (zero when satisfied).
    pub fn residual(&self, value: impl FnMut(V) -> f64) -> f64 {
        self.sense.violation(self.body.evaluate(value), self.rhs)
    }

    pub fn map_vars<W: VarKey>(&self, f: impl FnMut(V) -> W) -> LinearConstraint<W> {
        LinearConstraint::new(self.body.map_vars(f), self.sense, self.rhs)
    }

    /// Folds fixed variables into the right-hand side.
    ///
    /// A constraint left without terms is checked against
    /// [`SUBSTITUTION_TOL`] and reported as satisfied or violated.
    pub fn substitute_with(
        &self,
        fixed: impl FnMut(V) -> Option<f64>,
    ) -> Result<Substituted<V>, ExprError> {
        let body = self.body.substitute_with(fixed);
        let c = Self::new(body, self.sense, self.rhs);
        if !c.body.is_constant() {
            return Ok(Substituted::Constraint(c));
        }
        let residual = c.sense.violation(0.0, c.rhs);
        if residual <= SUBSTITUTION_TOL {
            Ok(Substituted::Satisfied)
        } else {
            Err(ExprError::Violated {
                lhs: 0.0,
                sense: c.sense,
                rhs: c.rhs,
                residual,
            })
        }
    }

    pub fn substitute(&self, fixed: &HashMap<V, f64>) -> Result<Substituted<V>, ExprError> {
        self.substitute_with(|v| fixed.get(&v).copied())
    }
}

impl<V: VarKey + fmt::Display> fmt::Display for LinExpr<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for &(v, c) in &self.terms {
            if first {
                write!(f, "{c} {v}")?;
            } else if c < 0.0 {
                write!(f, " - {} {v}", -c)?;
            } else {
                write!(f, " + {c} {v}")?;
            }
            first = false;
        }
        if self.constant != 0.0 || first {
            if first {
                write!(f, "{}", self.constant)?;
            } else if self.constant < 0.0 {
                write!(f, " - {}", -self.constant)?;
            } else {
                write!(f, " + {}", self.constant)?;
            }
        }
        Ok(())
    }
}

/// Rewrites `|expr - center| <= eps` as the pair
/// `expr - center <= eps` and `center - expr <= eps`.
pub fn linearize_abs_band<V: VarKey>(
    expr: &LinExpr<V>,
    center: &LinExpr<V>,
    eps: f64,
) -> Result<[LinearConstraint<V>; 2], ExprError> {
    if eps < 0.0 || eps.is_nan() {
        return Err(ExprError::NegativeBand(eps));
    }
    let diff = expr - center;
    Ok([
        LinearConstraint::le(diff.clone(), eps),
        LinearConstraint::le(-diff, eps),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    type E = LinExpr<u32>;

    #[test]
    fn cancellation_leaves_constant() {
        let a = E::from_terms([(0, 2.0)], 1.0);
        let b = E::from_terms([(0, -2.0)], 3.0);
        let s = a + b;
        assert!(s.is_constant());
        assert_eq!(s.constant_value(), 4.0);
    }

    #[test]
    fn scale_by_zero() {
        let e = E::var(0) + E::var(1);
        let z = e.scale(0.0);
        assert!(z.is_constant());
        assert_eq!(z.constant_value(), 0.0);
    }

    #[test]
    fn duplicate_terms_merge() {
        let e = E::from_terms([(3, 1.0), (1, 2.0), (3, -1.0), (1, 0.5)], 0.0);
        assert_eq!(e.terms(), &[(1, 2.5)]);
    }

    #[test]
    fn substitute_partial() {
        let c = LinearConstraint::le(E::var(0) + E::var(1), 3.0);
        let fixed = HashMap::from([(0u32, 1.0)]);
        match c.substitute(&fixed).unwrap() {
            Substituted::Constraint(r) => {
                assert_eq!(r.body().terms(), &[(1, 1.0)]);
                assert_eq!(r.rhs(), 2.0);
                assert_eq!(r.sense(), Sense::Le);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn substitute_full_satisfied_and_violated() {
        let c = LinearConstraint::le(E::var(0) + E::var(1), 3.0);
        let ok = HashMap::from([(0u32, 1.0), (1, 1.0)]);
        assert_eq!(c.substitute(&ok).unwrap(), Substituted::Satisfied);
        let bad = HashMap::from([(0u32, 2.0), (1, 2.0)]);
        match c.substitute(&bad) {
            Err(ExprError::Violated { residual, .. }) => assert!((residual - 1.0).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn substitute_within_tolerance_is_satisfied() {
        let c = LinearConstraint::eq(E::var(0), 1.0);
        let near = HashMap::from([(0u32, 1.0 + 5e-7)]);
        assert_eq!(c.substitute(&near).unwrap(), Substituted::Satisfied);
    }

    #[test]
    fn band_rows() {
        let [up, down] = linearize_abs_band(&E::var(0), &E::constant(5.0), 2.0).unwrap();
        // x - 5 <= 2  ->  x <= 7
        assert_eq!(up.body().terms(), &[(0, 1.0)]);
        assert_eq!(up.rhs(), 7.0);
        // 5 - x <= 2  ->  -x <= -3
        assert_eq!(down.body().terms(), &[(0, -1.0)]);
        assert_eq!(down.rhs(), -3.0);
    }

    #[test]
    fn zero_band_pins_value() {
        let [up, down] = linearize_abs_band(&E::var(0), &E::constant(5.0), 0.0).unwrap();
        let at = |x: f64| up.residual(|_| x).max(down.residual(|_| x));
        assert_eq!(at(5.0), 0.0);
        assert!(at(5.1) > 0.0 && at(4.9) > 0.0);
    }

    #[test]
    fn negative_band_rejected() {
        assert_eq!(
            linearize_abs_band(&E::var(0), &E::constant(0.0), -1.0),
            Err(ExprError::NegativeBand(-1.0))
        );
    }

    #[test]
    fn constant_folds_into_rhs() {
        let c = LinearConstraint::ge(E::var(2) + 4.0, 10.0);
        assert_eq!(c.rhs(), 6.0);
        assert_eq!(c.body().constant_value(), 0.0);
    }

    #[test]
    fn add_term_removes_zero() {
        let mut e = E::var(1);
        e.add_term(1, -1.0);
        assert!(e.terms().is_empty());
        e.add_term(0, 3.0);
        e.add_term(2, 1.0);
        assert_eq!(e.terms(), &[(0, 3.0), (2, 1.0)]);
    }
}
