//! Truncated multivariate power series over exact rationals.
//!
//! A [`Jet`] stores the Taylor coefficients of a function at the origin up to a
//! fixed total degree (its *order*). Coefficients are kept sparse, keyed by
//! [`Multidegree`] in graded-lexicographic order, and zero coefficients are never
//! stored, so structural equality is mathematical equality.

use alloc::collections::btree_map::Entry;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::Rational;

/// Largest number of variables a jet may have.
pub const MAX_VARS: usize = 12;

/// Exponent vector of a monomial.
///
/// Ordered graded-lexicographically: lower total degree first, then the larger
/// exponent of the earlier variable first (`1 < x1 < x2 < x1^2 < x1*x2 < ...`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Multidegree {
    degree: u32,
    n_vars: u8,
    exps: [u32; MAX_VARS],
}

impl Multidegree {
    /// Panics when `exps` has more than [`MAX_VARS`] entries.
    pub fn new(exps: Vec<u32>) -> Self {
        let mut m = Self::zero(exps.len());
        m.exps[..exps.len()].copy_from_slice(&exps);
        m.degree = exps.iter().sum();
        m
    }

    pub fn zero(n_vars: usize) -> Self {
        assert!(
            n_vars <= MAX_VARS,
            "at most {MAX_VARS} variables are supported"
        );
        Self {
            degree: 0,
            n_vars: n_vars as u8,
            exps: [0; MAX_VARS],
        }
    }

    pub fn unit(n_vars: usize, k: usize) -> Self {
        let mut m = Self::zero(n_vars);
        m.exps[k] = 1;
        m.degree = 1;
        m
    }

    /// Multidegree counting how often each variable occurs in `indices`.
    pub fn from_indices(n_vars: usize, indices: &[usize]) -> Self {
        let mut m = Self::zero(n_vars);
        for &i in indices {
            m.exps[i] += 1;
        }
        m.degree = indices.len() as u32;
        m
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps[..self.n_vars as usize]
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars as usize
    }

    pub(crate) fn plus(&self, other: &Multidegree) -> Multidegree {
        let mut m = *self;
        for (a, b) in m.exps.iter_mut().zip(&other.exps) {
            *a += b;
        }
        m.degree += other.degree;
        m
    }

    pub(crate) fn plus_unit(&self, k: usize) -> Multidegree {
        let mut m = *self;
        m.exps[k] += 1;
        m.degree += 1;
        m
    }

    pub(crate) fn minus_unit(&self, k: usize) -> Option<Multidegree> {
        if self.exps[k] == 0 {
            return None;
        }
        let mut m = *self;
        m.exps[k] -= 1;
        m.degree -= 1;
        Some(m)
    }

    /// `a1! * a2! * ... * an!`, the factor turning a Taylor coefficient into a derivative.
    pub fn factorial_weight(&self) -> Rational {
        let mut w = Rational::one();
        for &e in self.exponents() {
            for f in 2..=e {
                w *= Rational::from_integer(f.into());
            }
        }
        w
    }
}

impl Ord for Multidegree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for Multidegree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All multidegrees in `n_vars` variables of total degree `<= max_degree`, graded-lex.
pub fn monomials(n_vars: usize, max_degree: usize) -> Vec<Multidegree> {
    let mut out = Vec::new();
    for d in 0..=max_degree {
        out.extend(monomials_of_degree(n_vars, d));
    }
    out
}

/// All multidegrees in `n_vars` variables of total degree exactly `degree`, graded-lex.
pub fn monomials_of_degree(n_vars: usize, degree: usize) -> Vec<Multidegree> {
    fn rec(prefix: &mut Vec<u32>, left: u32, slots: usize, out: &mut Vec<Multidegree>) {
        if slots == 1 {
            prefix.push(left);
            out.push(Multidegree::new(prefix.clone()));
            prefix.pop();
            return;
        }
        for e in (0..=left).rev() {
            prefix.push(e);
            rec(prefix, left - e, slots - 1, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n_vars == 0 {
        if degree == 0 {
            out.push(Multidegree::zero(0));
        }
        return out;
    }
    rec(&mut Vec::new(), degree as u32, n_vars, &mut out);
    out
}

/// The checked ring operations of [`Jet::ring_op`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingOp {
    Add,
    Sub,
    Mul,
}

/// Truncated power series in `n_vars` variables, exact to total degree `order`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Jet {
    n_vars: usize,
    order: usize,
    coeffs: BTreeMap<Multidegree, Rational>,
}

impl Jet {
    pub fn zero(n_vars: usize, order: usize) -> Self {
        Self {
            n_vars,
            order,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(n_vars: usize, order: usize) -> Self {
        Self::constant(n_vars, order, Rational::one())
    }

    pub fn constant(n_vars: usize, order: usize, c: Rational) -> Self {
        let mut j = Self::zero(n_vars, order);
        if !c.is_zero() {
            j.coeffs.insert(Multidegree::zero(n_vars), c);
        }
        j
    }

    /// The coordinate function `x_k` (0-based).
    pub fn variable(n_vars: usize, order: usize, k: usize) -> Result<Self> {
        if k >= n_vars {
            return Err(Error::Index {
                index: k,
                bound: n_vars,
            });
        }
        let mut j = Self::zero(n_vars, order);
        if order >= 1 {
            j.coeffs
                .insert(Multidegree::unit(n_vars, k), Rational::one());
        }
        Ok(j)
    }

    /// Builds a jet from `(multidegree, coefficient)` pairs; terms above `order` are dropped
    /// and repeated multidegrees are summed.
    pub fn from_terms<I>(n_vars: usize, order: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Multidegree, Rational)>,
    {
        let mut coeffs: BTreeMap<Multidegree, Rational> = BTreeMap::new();
        for (m, c) in terms {
            if m.n_vars() != n_vars {
                return Err(Error::Shape(alloc::format!(
                    "multidegree has {} variables, jet has {}",
                    m.n_vars(),
                    n_vars
                )));
            }
            if m.degree() as usize > order {
                continue;
            }
            accumulate(&mut coeffs, m, c);
        }
        coeffs.retain(|_, c| !c.is_zero());
        Ok(Self {
            n_vars,
            order,
            coeffs,
        })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Stored (nonzero) terms in graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Multidegree, &Rational)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, m: &Multidegree) -> Rational {
        self.coeffs.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&Multidegree::zero(self.n_vars))
    }

    /// Drops every term above `order`; never raises the order.
    pub fn truncate(&self, order: usize) -> Jet {
        let order = order.min(self.order);
        Jet {
            n_vars: self.n_vars,
            order,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(m, _)| m.degree() as usize <= order)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Reinterprets a polynomial jet at a higher order. Only meaningful when the jet is
    /// known to be an exact polynomial (e.g. a literal coordinate change).
    pub fn with_order(&self, order: usize) -> Jet {
        if order <= self.order {
            return self.truncate(order);
        }
        Jet {
            n_vars: self.n_vars,
            order,
            coeffs: self.coeffs.clone(),
        }
    }

    /// The homogeneous component of total degree `d`, at the same order.
    pub fn homogeneous_part(&self, d: usize) -> Jet {
        Jet {
            n_vars: self.n_vars,
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(m, _)| m.degree() as usize == d)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Jet {
        if c.is_zero() {
            return Jet::zero(self.n_vars, self.order);
        }
        Jet {
            n_vars: self.n_vars,
            order: self.order,
            coeffs: self.coeffs.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    /// Add, subtract or multiply with strict shape checking: both operands must agree on
    /// `n_vars` and `order`. The operator impls instead truncate to the smaller order.
    pub fn ring_op(a: &Jet, b: &Jet, op: RingOp) -> Result<Jet> {
        if a.n_vars != b.n_vars || a.order != b.order {
            return Err(Error::Shape(alloc::format!(
                "jets ({} vars, order {}) and ({} vars, order {})",
                a.n_vars,
                a.order,
                b.n_vars,
                b.order
            )));
        }
        Ok(match op {
            RingOp::Add => a + b,
            RingOp::Sub => a - b,
            RingOp::Mul => a * b,
        })
    }

    fn assert_compatible(&self, other: &Jet) {
        assert_eq!(
            self.n_vars, other.n_vars,
            "jet arithmetic on different numbers of variables"
        );
    }

    fn combine(&self, other: &Jet, negate_other: bool) -> Jet {
        self.assert_compatible(other);
        let order = self.order.min(other.order);
        let mut coeffs = BTreeMap::new();
        for (m, c) in &self.coeffs {
            if m.degree() as usize <= order {
                coeffs.insert(*m, c.clone());
            }
        }
        for (m, c) in &other.coeffs {
            if m.degree() as usize > order {
                continue;
            }
            let c = if negate_other { -c } else { c.clone() };
            accumulate(&mut coeffs, *m, c);
        }
        coeffs.retain(|_, c| !c.is_zero());
        Jet {
            n_vars: self.n_vars,
            order,
            coeffs,
        }
    }

    fn product(&self, other: &Jet) -> Jet {
        self.assert_compatible(other);
        let order = self.order.min(other.order);
        let mut coeffs: BTreeMap<Multidegree, Rational> = BTreeMap::new();
        for (ma, ca) in &self.coeffs {
            let da = ma.degree() as usize;
            if da > order {
                break;
            }
            for (mb, cb) in &other.coeffs {
                if da + mb.degree() as usize > order {
                    break;
                }
                accumulate(&mut coeffs, ma.plus(mb), ca * cb);
            }
        }
        coeffs.retain(|_, c| !c.is_zero());
        Jet {
            n_vars: self.n_vars,
            order,
            coeffs,
        }
    }

    fn lower_order_to(&mut self, order: usize) {
        if order < self.order {
            self.order = order;
            self.coeffs.retain(|m, _| m.degree() as usize <= order);
        }
    }

    /// `self += c * other`, truncating to the smaller order.
    pub fn add_scaled(&mut self, other: &Jet, c: &Rational) {
        self.assert_compatible(other);
        self.lower_order_to(other.order);
        if c.is_zero() {
            return;
        }
        for (m, v) in &other.coeffs {
            if m.degree() as usize > self.order {
                break;
            }
            accumulate(&mut self.coeffs, *m, v * c);
        }
        self.coeffs.retain(|_, c| !c.is_zero());
    }

    /// `self += a * b`, truncating to the smallest order.
    pub fn add_product(&mut self, a: &Jet, b: &Jet) {
        self.add_scaled_product(a, b, &Rational::one());
    }

    /// `self -= a * b`, truncating to the smallest order.
    pub fn sub_product(&mut self, a: &Jet, b: &Jet) {
        self.add_scaled_product(a, b, &-Rational::one());
    }

    /// `self += c * a * b`, truncating to the smallest order.
    pub fn add_scaled_product(&mut self, a: &Jet, b: &Jet, c: &Rational) {
        self.assert_compatible(a);
        self.assert_compatible(b);
        self.lower_order_to(a.order.min(b.order));
        let order = self.order;
        for (ma, ca) in &a.coeffs {
            let da = ma.degree() as usize;
            if da > order {
                break;
            }
            for (mb, cb) in &b.coeffs {
                if da + mb.degree() as usize > order {
                    break;
                }
                accumulate(&mut self.coeffs, ma.plus(mb), ca * cb * c);
            }
        }
        self.coeffs.retain(|_, c| !c.is_zero());
    }

    /// Multiplicative inverse modulo terms above the order.
    pub fn reciprocal(&self) -> Result<Jet> {
        let a0 = self.constant_term();
        if a0.is_zero() {
            return Err(Error::Singular(String::from(
                "reciprocal of a jet with zero constant term",
            )));
        }
        let inv0 = a0.recip();
        // a = a0 (1 + u) with u(0) = 0, so 1/a = (1/a0) * sum_k (-u)^k.
        let minus_u = (self - &Jet::constant(self.n_vars, self.order, a0.clone())).scale(&-&inv0);
        let one = Jet::one(self.n_vars, self.order);
        let mut acc = one.clone();
        for _ in 0..self.order {
            acc = &one + &(&minus_u * &acc);
        }
        Ok(acc.scale(&inv0))
    }

    /// Partial derivative with respect to variable `k` (0-based). The order drops by one.
    pub fn partial(&self, k: usize) -> Result<Jet> {
        if k >= self.n_vars {
            return Err(Error::Index {
                index: k,
                bound: self.n_vars,
            });
        }
        let order = self.order.saturating_sub(1);
        let mut coeffs = BTreeMap::new();
        for (m, c) in &self.coeffs {
            let e = m.exps[k];
            if e == 0 {
                continue;
            }
            let reduced = m.minus_unit(k).expect("positive exponent");
            if reduced.degree() as usize > order {
                continue;
            }
            coeffs.insert(reduced, c * Rational::from_integer(e.into()));
        }
        Ok(Jet {
            n_vars: self.n_vars,
            order,
            coeffs,
        })
    }

    /// Value at the origin of the mixed partial derivative along `indices`.
    pub fn derivative_at_origin(&self, indices: &[usize]) -> Result<Rational> {
        if indices.len() > self.order {
            return Err(Error::Order(alloc::format!(
                "derivative of order {} requested from a jet of order {}",
                indices.len(),
                self.order
            )));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.n_vars) {
            return Err(Error::Index {
                index: bad,
                bound: self.n_vars,
            });
        }
        let m = Multidegree::from_indices(self.n_vars, indices);
        let w = m.factorial_weight();
        Ok(self.coeff(&m) * w)
    }

    /// Floating-point evaluation of the truncated polynomial at `point`.
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        let mut sum = 0.0;
        for (m, c) in &self.coeffs {
            let mut term = c.to_f64().unwrap_or(f64::NAN);
            for (x, &e) in point.iter().zip(m.exponents()) {
                for _ in 0..e {
                    term *= x;
                }
            }
            sum += term;
        }
        sum
    }

    /// Sum of the absolute values of the terms at `point`; a scale for relative tolerances.
    pub fn abs_eval_f64(&self, point: &[f64]) -> f64 {
        let mut sum = 0.0;
        for (m, c) in &self.coeffs {
            let mut term = c.to_f64().unwrap_or(f64::NAN);
            for (x, &e) in point.iter().zip(m.exponents()) {
                for _ in 0..e {
                    term *= x;
                }
            }
            sum += if term < 0.0 { -term } else { term };
        }
        sum
    }

    /// Canonical text with caller-supplied variable names.
    pub fn to_text(&self, names: &[&str]) -> String {
        let mut out = String::new();
        write_jet(&mut out, self, names).expect("writing to a String cannot fail");
        out
    }
}

fn accumulate(map: &mut BTreeMap<Multidegree, Rational>, m: Multidegree, c: Rational) {
    match map.entry(m) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
        }
    }
}

fn write_jet<W: fmt::Write>(w: &mut W, jet: &Jet, names: &[&str]) -> fmt::Result {
    if jet.coeffs.is_empty() {
        return w.write_str("0");
    }
    for (idx, (m, c)) in jet.coeffs.iter().enumerate() {
        let negative = c.is_negative();
        match (idx, negative) {
            (0, true) => w.write_str("-")?,
            (0, false) => {}
            (_, true) => w.write_str(" - ")?,
            (_, false) => w.write_str(" + ")?,
        }
        let abs = c.abs();
        let mut factors: Vec<String> = Vec::new();
        for (k, &e) in m.exponents().iter().enumerate() {
            match e {
                0 => {}
                1 => factors.push(String::from(names[k])),
                _ => factors.push(alloc::format!("{}^{}", names[k], e)),
            }
        }
        if factors.is_empty() {
            write!(w, "{}", abs)?;
        } else {
            if !abs.is_one() {
                write!(w, "{}*", abs)?;
            }
            w.write_str(&factors.join("*"))?;
        }
    }
    Ok(())
}

/// Canonical report form: graded-lex terms `coeff*x1^a1*...`, variables named `x1..xn`.
impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.n_vars).map(|k| alloc::format!("x{k}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        write_jet(f, self, &refs)
    }
}

impl AddAssign<&Jet> for Jet {
    fn add_assign(&mut self, rhs: &Jet) {
        self.add_scaled(rhs, &Rational::one());
    }
}

impl SubAssign<&Jet> for Jet {
    fn sub_assign(&mut self, rhs: &Jet) {
        self.add_scaled(rhs, &-Rational::one());
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        self.combine(rhs, false)
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self.combine(rhs, true)
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.product(rhs)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet {
            n_vars: self.n_vars,
            order: self.order,
            coeffs: self.coeffs.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        &self + &rhs
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        &self - &rhs
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        &self * &rhs
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn var(n: usize, k: usize, order: usize) -> Jet {
        Jet::variable(n, order, k).unwrap()
    }

    #[test]
    fn graded_lex_order() {
        let ms = monomials(2, 2);
        let exps: Vec<Vec<u32>> = ms.iter().map(|m| m.exponents().to_vec()).collect();
        assert_eq!(
            exps,
            vec![
                vec![0, 0],
                vec![1, 0],
                vec![0, 1],
                vec![2, 0],
                vec![1, 1],
                vec![0, 2]
            ]
        );
        let mut sorted = ms.clone();
        sorted.sort();
        assert_eq!(sorted, ms);
    }

    #[test]
    fn difference_of_squares() {
        let (x, y) = (var(2, 0, 2), var(2, 1, 2));
        let p = &(&x + &y) * &(&x - &y);
        let expected = &(&x * &x) - &(&y * &y);
        assert_eq!(p, expected);
        assert_eq!(p.to_string(), "x1^2 - x2^2");
    }

    #[test]
    fn degree_overflow_truncates() {
        let k = 3;
        let x = var(1, 0, k);
        let mut xk = Jet::one(1, k);
        for _ in 0..k {
            xk = &xk * &x;
        }
        assert!(!xk.is_zero());
        assert!((&x * &xk).is_zero());
    }

    #[test]
    fn ring_op_rejects_mismatched_order() {
        let a = Jet::one(2, 3);
        let b = Jet::one(2, 2);
        assert!(matches!(
            Jet::ring_op(&a, &b, RingOp::Add),
            Err(Error::Shape(_))
        ));
        assert_eq!((&a + &b).order(), 2);
    }

    #[test]
    fn reciprocal_geometric_series() {
        let one = Jet::one(1, 3);
        assert_eq!(one.reciprocal().unwrap(), one);
        let x = var(1, 0, 3);
        let r = (&one + &x).reciprocal().unwrap();
        let expected = Jet::from_terms(
            1,
            3,
            (0..=3u32).map(|d| {
                (
                    Multidegree::new(vec![d]),
                    if d % 2 == 0 { q(1, 1) } else { q(-1, 1) },
                )
            }),
        )
        .unwrap();
        assert_eq!(r, expected);
    }

    #[test]
    fn reciprocal_of_non_unit_fails() {
        let x = var(2, 1, 3);
        assert!(matches!(x.reciprocal(), Err(Error::Singular(_))));
    }

    #[test]
    fn partial_of_monomial() {
        let (x, y) = (var(2, 0, 3), var(2, 1, 3));
        let x2y = &(&x * &x) * &y;
        let d = x2y.partial(0).unwrap();
        assert_eq!(d, (&x * &y).scale(&q(2, 1)).truncate(2));
        assert_eq!(d.order(), 2);
        assert!(Jet::constant(2, 3, q(7, 2)).partial(1).unwrap().is_zero());
        assert!(matches!(x.partial(2), Err(Error::Index { .. })));
    }

    #[test]
    fn derivative_at_origin_uses_factorials() {
        let (x, y) = (var(2, 0, 4), var(2, 1, 4));
        // f = 3 x^2 y  =>  d^3 f / dx dx dy = 6
        let f = (&(&x * &x) * &y).scale(&q(3, 1));
        assert_eq!(f.derivative_at_origin(&[0, 1, 0]).unwrap(), q(6, 1));
        assert!(matches!(
            f.derivative_at_origin(&[0, 0, 0, 0, 1]),
            Err(Error::Order(_))
        ));
    }

    #[test]
    fn text_form() {
        let (x, y) = (var(2, 0, 3), var(2, 1, 3));
        let f = &(&Jet::constant(2, 3, q(-1, 2)) + &x.scale(&q(3, 4))) - &(&x * &y);
        assert_eq!(f.to_string(), "-1/2 + 3/4*x1 - x1*x2");
        assert_eq!(f.to_text(&["u", "v"]), "-1/2 + 3/4*u - u*v");
        assert_eq!(Jet::zero(2, 3).to_string(), "0");
    }
}
