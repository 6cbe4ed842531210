//! Seeded random Fedosov charts and polynomial data for property checks.
//!
//! Connections are drawn as totally symmetric `Gamma_{ijk}` in Darboux coordinates, which
//! always gives a valid chart; an optional polynomial coordinate change then produces a
//! chart with non-constant `omega` and non-symmetric lowered symbols.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::chart::{canonical_omega, pullback, ChartSpec, Provenance};
use crate::error::Result;
use crate::jet::{monomials, Jet, Multidegree};
use crate::tensor::{JetTensor, Tensor, Variance};
use crate::Rational;

/// Small nonzero rational: numerator in `-3..=3`, denominator in `1..=2`.
pub fn small_rational<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    let mut num = 0i64;
    while num == 0 {
        num = rng.gen_range(-3..=3);
    }
    let den: i64 = rng.gen_range(1..=2);
    Rational::new(num.into(), den.into())
}

/// Random polynomial jet whose monomials of degree `min_degree..=max_degree` are present
/// with probability `density`.
pub fn random_jet<R: Rng + ?Sized>(
    rng: &mut R,
    n_vars: usize,
    order: usize,
    min_degree: usize,
    max_degree: usize,
    density: f64,
) -> Jet {
    let terms: Vec<(Multidegree, Rational)> = monomials(n_vars, max_degree.min(order))
        .into_iter()
        .filter(|m| m.degree() as usize >= min_degree)
        .filter_map(|m| {
            if rng.gen_bool(density) {
                Some((m, small_rational(rng)))
            } else {
                None
            }
        })
        .collect();
    Jet::from_terms(n_vars, order, terms).expect("degrees within order")
}

/// Totally symmetric random symbols of order `order - 1`.
pub fn random_symmetric_gamma<R: Rng + ?Sized>(rng: &mut R, n: usize, order: usize) -> JetTensor {
    let g_order = order - 1;
    let mut table = vec![Jet::zero(n, g_order); n * n * n];
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                let jet = random_jet(rng, n, g_order, 0, g_order, 0.35);
                for p in permutations3(i, j, k) {
                    table[(p[0] * n + p[1]) * n + p[2]] = jet.clone();
                }
            }
        }
    }
    JetTensor::covariant_from_fn(n, 3, |idx| {
        table[(idx[0] * n + idx[1]) * n + idx[2]].clone()
    })
}

fn permutations3(i: usize, j: usize, k: usize) -> [[usize; 3]; 6] {
    [
        [i, j, k],
        [i, k, j],
        [j, i, k],
        [j, k, i],
        [k, i, j],
        [k, j, i],
    ]
}

/// Random polynomial coordinate change `x = phi(y)` with unipotent linear part and
/// quadratic terms, as exact jets of order `order`.
pub fn random_coordinate_change<R: Rng + ?Sized>(rng: &mut R, n: usize, order: usize) -> Vec<Jet> {
    (0..n)
        .map(|a| {
            let mut terms = vec![(Multidegree::unit(n, a), Rational::from_integer(1.into()))];
            for b in (a + 1)..n {
                if rng.gen_bool(0.5) {
                    terms.push((
                        Multidegree::unit(n, b),
                        Rational::from_integer(rng.gen_range(-1i64..=1).into()),
                    ));
                }
            }
            let quad = random_jet(rng, n, order, 2, 2, 0.3);
            let lin = Jet::from_terms(n, order, terms).expect("linear terms");
            &lin + &quad
        })
        .collect()
}

/// Random valid Fedosov chart of dimension `n` and order `order`.
pub fn random_fedosov_chart<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    order: usize,
    coordinate_change: bool,
) -> Result<ChartSpec> {
    let omega = canonical_omega(n).to_jets(n, order).without_symmetries();
    let gamma = random_symmetric_gamma(rng, n, order);
    let chart = ChartSpec::new(omega, gamma, Provenance::Explicit)?;
    if !coordinate_change {
        return Ok(chart);
    }
    let phi = random_coordinate_change(rng, n, order + 1);
    pullback(&chart, &phi, Provenance::Explicit)
}

/// Random vector field with polynomial components of the given order.
pub fn random_vector_field<R: Rng + ?Sized>(rng: &mut R, n: usize, order: usize) -> JetTensor {
    Tensor::from_fn(n, vec![Variance::Up], |_| {
        random_jet(rng, n, order, 0, order, 0.3)
    })
}
