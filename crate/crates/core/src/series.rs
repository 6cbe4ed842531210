//! Composition, map reversion and radial integration of jets.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::jet::{monomials, Jet, Multidegree};
use crate::matrix::rational_inverse;
use crate::Rational;

/// Cached powers of a fixed substitution `u_j = s_j(x)`, reusable across many compositions.
#[derive(Clone, Debug)]
pub struct Substitution {
    n_in: usize,
    n_out: usize,
    order: usize,
    powers: BTreeMap<Multidegree, Jet>,
}

impl Substitution {
    /// Prepares `subs` (all in the same variables, all with zero constant term).
    pub fn new(subs: &[Jet]) -> Result<Self> {
        let first = subs
            .first()
            .ok_or_else(|| Error::Shape("empty substitution".into()))?;
        let n_out = first.n_vars();
        let mut order = first.order();
        for (j, s) in subs.iter().enumerate() {
            if s.n_vars() != n_out {
                return Err(Error::Shape(alloc::format!(
                    "substituend {j} has {} variables, expected {n_out}",
                    s.n_vars()
                )));
            }
            if !s.constant_term().is_zero() {
                return Err(Error::Precondition(alloc::format!(
                    "substituend {j} has nonzero constant term"
                )));
            }
            order = order.min(s.order());
        }
        let n_in = subs.len();
        let mut powers: BTreeMap<Multidegree, Jet> = BTreeMap::new();
        for m in monomials(n_in, order) {
            let jet = match m.exponents().iter().position(|&e| e > 0) {
                None => Jet::one(n_out, order),
                Some(i) => {
                    let prev = m.minus_unit(i).expect("positive exponent");
                    &powers[&prev] * &subs[i]
                }
            };
            powers.insert(m, jet);
        }
        Ok(Self {
            n_in,
            n_out,
            order,
            powers,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    /// `a(s(x))`, exact to the smaller of the two orders.
    pub fn apply(&self, a: &Jet) -> Result<Jet> {
        if a.n_vars() != self.n_in {
            return Err(Error::Shape(alloc::format!(
                "composing a jet in {} variables with {} substituends",
                a.n_vars(),
                self.n_in
            )));
        }
        let order = self.order.min(a.order());
        let mut acc = Jet::zero(self.n_out, order);
        for (m, c) in a.terms() {
            if m.degree() as usize > order {
                break;
            }
            acc.add_scaled(&self.powers[m], c);
        }
        Ok(acc)
    }
}

/// `a(subs_1(x), ..., subs_m(x))` for substituends with zero constant term.
pub fn compose(a: &Jet, subs: &[Jet]) -> Result<Jet> {
    Substitution::new(subs)?.apply(a)
}

/// Linear part of a map with zero constant term: `L[i][j] = d phi_i / d x_j (0)`.
pub fn linear_part(phi: &[Jet]) -> Vec<Vec<Rational>> {
    let n = phi.len();
    phi.iter()
        .map(|p| {
            (0..p.n_vars())
                .map(|j| p.coeff(&Multidegree::unit(p.n_vars(), j)))
                .collect()
        })
        .take(n)
        .collect()
}

/// Formal inverse of a map `phi: (K^n, 0) -> (K^n, 0)` with invertible linear part.
pub fn invert_map(phi: &[Jet]) -> Result<Vec<Jet>> {
    let n = phi.len();
    if n == 0 {
        return Err(Error::Shape("empty map".into()));
    }
    let mut order = usize::MAX;
    for (i, p) in phi.iter().enumerate() {
        if p.n_vars() != n {
            return Err(Error::Shape(alloc::format!(
                "component {i} has {} variables, map has {n} components",
                p.n_vars()
            )));
        }
        if !p.constant_term().is_zero() {
            return Err(Error::Precondition(alloc::format!(
                "component {i} has nonzero constant term"
            )));
        }
        order = order.min(p.order());
    }
    let lin = linear_part(phi);
    let lin_inv = rational_inverse(&lin)?;
    let ys: Vec<Jet> = (0..n)
        .map(|k| Jet::variable(n, order, k))
        .collect::<Result<_>>()?;
    let nonlinear: Vec<Jet> = phi
        .iter()
        .zip(&lin)
        .map(|(p, row)| {
            let mut lp = Jet::zero(n, order);
            for (k, c) in row.iter().enumerate() {
                lp = &lp + &ys[k].scale(c);
            }
            &p.truncate(order) - &lp
        })
        .collect();
    let apply_lin_inv = |v: &[Jet]| -> Vec<Jet> {
        (0..n)
            .map(|i| {
                let mut acc = Jet::zero(n, order);
                for (j, vj) in v.iter().enumerate() {
                    acc.add_scaled(vj, &lin_inv[i][j]);
                }
                acc
            })
            .collect()
    };
    // psi = L^{-1}(y - N(psi)); each sweep fixes one more degree.
    let mut psi = apply_lin_inv(&ys);
    for _ in 1..order.max(1) {
        let sub = Substitution::new(&psi)?;
        let rhs: Vec<Jet> = nonlinear
            .iter()
            .zip(&ys)
            .map(|(nl, y)| Ok(y - &sub.apply(nl)?))
            .collect::<Result<_>>()?;
        psi = apply_lin_inv(&rhs);
    }
    Ok(psi)
}

/// Potential `F` with `F(0) = c` and `dF/dx_k = f_k`, built degree by degree as
/// `F_d = (1/d) * sum_k x_k * (f_k)_{d-1}`.
///
/// Requires `d_l f_k = d_k f_l` as jets; otherwise reports the first offending pair and
/// multidegree. The result has order one more than the smallest order among `f`.
pub fn radial_antiderivative(f: &[Jet], c: &Rational) -> Result<Jet> {
    let n = f.len();
    if n == 0 {
        return Err(Error::Shape("empty gradient".into()));
    }
    let mut order = usize::MAX;
    for (k, fk) in f.iter().enumerate() {
        if fk.n_vars() != n {
            return Err(Error::Shape(alloc::format!(
                "component {k} has {} variables, expected {n}",
                fk.n_vars()
            )));
        }
        order = order.min(fk.order());
    }
    let f: Vec<Jet> = f.iter().map(|fk| fk.truncate(order)).collect();
    for k in 0..n {
        for l in (k + 1)..n {
            let lhs = f[k].partial(l)?;
            let rhs = f[l].partial(k)?;
            if lhs != rhs {
                let diff = &lhs - &rhs;
                let (m, _) = diff.terms().next().expect("nonzero difference");
                return Err(Error::Integrability {
                    indices: alloc::vec![k, l],
                    multidegree: m.exponents().to_vec(),
                });
            }
        }
    }
    let mut terms: Vec<(Multidegree, Rational)> = Vec::new();
    terms.push((Multidegree::zero(n), c.clone()));
    for (k, fk) in f.iter().enumerate() {
        for (m, coeff) in fk.terms() {
            let d = Rational::from_integer((m.degree() + 1).into());
            terms.push((m.plus_unit(k), coeff / d));
        }
    }
    Jet::from_terms(n, order + 1, terms)
}
