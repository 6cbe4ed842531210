#![allow(dead_code)]

use fedosov_core::chart::levi_civita_chart;
use fedosov_core::{ChartSpec, Jet, JetTensor, Multidegree, Rational};
use num_traits::Zero;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::from_i64s(n, d)
}

pub fn var(n: usize, order: usize, k: usize) -> Jet {
    Jet::variable(n, order, k).unwrap()
}

pub fn monomial(n: usize, order: usize, exps: &[u32], c: Rational) -> Jet {
    Jet::from_terms(n, order, [(Multidegree::new(exps.to_vec()), c)]).unwrap()
}

/// `omega = lambda dx ^ dy`, `g = lambda (dx^2 + dy^2)`.
pub fn conformal_chart(lambda: &Jet) -> ChartSpec {
    let (n, k) = (2, lambda.order());
    let zero = Jet::zero(n, k);
    let omega = JetTensor::covariant_from_fn(n, 2, |i| match (i[0], i[1]) {
        (0, 1) => lambda.clone(),
        (1, 0) => -lambda,
        _ => zero.clone(),
    });
    let g = JetTensor::covariant_from_fn(n, 2, |i| {
        if i[0] == i[1] {
            lambda.clone()
        } else {
            zero.clone()
        }
    });
    levi_civita_chart(omega, &g).unwrap()
}

/// Stereographic sphere of radius `r`: `lambda = 4 r^4 / (r^2 + x^2 + y^2)^2`, based at the origin.
pub fn sphere(r: &Rational, order: usize) -> ChartSpec {
    let r2 = r * r;
    let base = &(&Jet::constant(2, order, r2.clone()) + &monomial(2, order, &[2, 0], q(1, 1)))
        + &monomial(2, order, &[0, 2], q(1, 1));
    let denom = &base * &base;
    let lambda = denom.reciprocal().unwrap().scale(&(&r2 * &r2 * q(4, 1)));
    conformal_chart(&lambda)
}

/// Poincare half plane `lambda = 1 / y^2`, based at `(0, b)`.
pub fn half_plane(b: &Rational, order: usize) -> ChartSpec {
    assert!(!b.is_zero());
    let y = &Jet::constant(2, order, b.clone()) + &var(2, order, 1);
    conformal_chart(&(&y * &y).reciprocal().unwrap())
}
