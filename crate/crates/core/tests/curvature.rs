mod common;

use common::{half_plane, q, sphere};
use fedosov_core::chart::{canonical_omega, darboux_flat, pullback, validate};
use fedosov_core::curvature::{
    curvature, curvature_at_origin, einstein_residual, identity_report, operator_l, ricci,
    ricci_darboux, sectional_classify, SectionalKind,
};
use fedosov_core::generate::{
    random_coordinate_change, random_fedosov_chart, random_vector_field, small_rational,
};
use fedosov_core::series::linear_part;
use fedosov_core::tensor::omega_lower;
use fedosov_core::{
    ChartSpec, Error, Jet, JetTensor, PointTensor, Provenance, Rational, Tensor, Variance,
};
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn v(xs: &[i64]) -> Vec<Rational> {
    xs.iter().map(|&x| q(x, 1)).collect()
}

#[test]
fn flat_chart_has_no_curvature() {
    let c = darboux_flat(4, 3).unwrap();
    let cd = curvature(&c).unwrap();
    assert!(cd.r_low.is_zero() && cd.r_up.is_zero());
    assert!(ricci(&cd, c.omega_inv()).k.is_zero());
    let (_, einstein) = einstein_residual(&c).unwrap();
    assert!(einstein);
    let x = random_vector_field(&mut ChaCha8Rng::seed_from_u64(1), 4, 3);
    let l = operator_l(&c, &x).unwrap();
    assert!(l.via_derivatives.is_zero() && l.agrees());
    let s = sectional_classify(
        &cd.r_low.at_origin(),
        &canonical_omega(4),
        &v(&[1, 0, 0, 0]),
        &v(&[0, 1, 0, 0]),
    )
    .unwrap();
    assert_eq!(s.kind, SectionalKind::Flat);
}

#[test]
fn invalid_chart_is_refused() {
    let omega = canonical_omega(2).to_jets(2, 3);
    let gamma = JetTensor::covariant_from_fn(2, 3, |i| Jet::constant(2, 2, q(i[1] as i64, 1)));
    let c = ChartSpec::new(omega, gamma, Provenance::Explicit).unwrap();
    assert!(matches!(curvature(&c), Err(Error::Precondition(_))));
}

#[test]
fn model_charts_satisfy_identities() {
    for c in [
        sphere(&q(1, 1), 4),
        sphere(&q(2, 1), 3),
        half_plane(&q(1, 1), 4),
        half_plane(&q(3, 2), 4),
    ] {
        let cd = curvature(&c).unwrap();
        let ids = identity_report(&cd, c.omega_inv());
        assert!(ids.all_passed(), "{ids:?}");
        let ric = ricci(&cd, c.omega_inv());
        assert!(ric.report.all_passed(), "{:?}", ric.report);
        assert!(!einstein_residual(&c).unwrap().1);
    }
}

#[test]
fn lowering_the_raised_tensor_gives_the_lowered_one() {
    let c = sphere(&q(1, 1), 4);
    let cd = curvature(&c).unwrap();
    let lowered = omega_lower(&cd.r_up, 0, c.omega()).unwrap();
    assert!(lowered.same_entries(&cd.r_low));
}

/// In two dimensions the Ricci tensor of a Levi-Civita connection is the Gaussian curvature
/// times the metric, and here the metric coincides with the coefficient of omega.
#[test]
fn two_dimensional_ricci_is_curvature_times_metric() {
    for (c, kappa) in [
        (sphere(&q(1, 1), 4), q(1, 1)),
        (sphere(&q(2, 1), 4), q(1, 4)),
        (sphere(&q(3, 2), 4), q(4, 9)),
        (half_plane(&q(1, 1), 4), q(-1, 1)),
        (half_plane(&q(3, 1), 4), q(-1, 1)),
    ] {
        let cd = curvature(&c).unwrap();
        let k = ricci(&cd, c.omega_inv()).k;
        let lambda = c.omega().get(&[0, 1]).truncate(k.order()).scale(&kappa);
        assert_eq!(k.get(&[0, 0]), &lambda);
        assert_eq!(k.get(&[1, 1]), &lambda);
        assert!(k.get(&[0, 1]).is_zero());
    }
}

#[test]
fn corrupted_curvature_is_caught() {
    let c = half_plane(&q(1, 1), 4);
    let mut cd = curvature(&c).unwrap();
    let mut data = cd.r_low.data().to_vec();
    let pos = cd.r_low.flat_index(&[0, 1, 0, 1]);
    data[pos] = &data[pos] + &Jet::one(2, cd.order());
    cd.r_low = JetTensor::from_vec(2, vec![Variance::Down; 4], data).unwrap();
    let report = identity_report(&cd, c.omega_inv());
    let sym = report.get("R symmetric in first pair").unwrap();
    assert!(!sym.passed);
    let w = sym.witness.as_ref().unwrap();
    assert!(w.indices == vec![0, 1, 0, 1] || w.indices == vec![1, 0, 0, 1]);
}

#[test]
fn sphere_classification_invariant() {
    for (r, det) in [
        (q(1, 1), q(1, 1)),
        (q(2, 1), q(1, 16)),
        (q(3, 2), q(16, 81)),
    ] {
        let c = sphere(&r, 3);
        let r0 = curvature_at_origin(&c).unwrap();
        let w0 = c.omega().at_origin();
        let lam = w0.get(&[0, 1]).clone();
        let s = sectional_classify(&r0, &w0, &v(&[1, 0]), &[q(0, 1), lam]).unwrap();
        assert_eq!(s.kind, SectionalKind::Elliptic);
        assert_eq!(s.det_invariant, det);
        assert!((s.r_numeric.unwrap().abs() - r.to_f64().unwrap().recip().powi(2)).abs() < 1e-12);
    }
    let c = half_plane(&q(1, 1), 3);
    let s = sectional_classify(
        &curvature_at_origin(&c).unwrap(),
        &c.omega().at_origin(),
        &v(&[1, 0]),
        &v(&[0, 1]),
    )
    .unwrap();
    assert_eq!(
        (s.kind, s.det_invariant),
        (SectionalKind::Elliptic, q(1, 1))
    );
}

#[test]
fn isotropic_planes_are_outside_the_domain() {
    let c = sphere(&q(1, 1), 3);
    let r0 = curvature_at_origin(&c).unwrap();
    let w0 = c.omega().at_origin();
    assert!(matches!(
        sectional_classify(&r0, &w0, &v(&[1, 2]), &v(&[2, 4])),
        Err(Error::Domain(_))
    ));
    assert!(matches!(
        sectional_classify(&r0, &w0, &v(&[1]), &v(&[0, 1])),
        Err(Error::Shape(_))
    ));
}

#[test]
fn constant_darboux_symbols_give_quadratic_ricci() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let n = 4;
    let base = random_fedosov_chart(&mut rng, n, 3, false).unwrap();
    let constant = base
        .gamma_lower()
        .map(|j| Jet::constant(n, 2, j.constant_term()));
    let c = ChartSpec::new(base.omega().clone(), constant, Provenance::Explicit).unwrap();
    let k = ricci(&curvature(&c).unwrap(), c.omega_inv()).k;
    let direct = ricci_darboux(&c).unwrap();
    assert!(direct.same_entries(&k));
    assert!(k
        .data()
        .iter()
        .all(|j| j.terms().all(|(m, _)| m.degree() == 0)));
    let g0 = c.gamma_lower().at_origin();
    let winv = c.omega_inv().at_origin();
    let expected = PointTensor::covariant_from_fn(n, 2, |idx| {
        let mut acc = Rational::zero();
        for a in 0..n {
            for b in 0..n {
                for m in 0..n {
                    for p in 0..n {
                        acc -= winv.get(&[a, b])
                            * winv.get(&[m, p])
                            * g0.get(&[p, idx[0], a])
                            * g0.get(&[b, idx[1], m]);
                    }
                }
            }
        }
        acc
    });
    assert_eq!(k.at_origin(), expected);
    assert!(matches!(
        ricci_darboux(&sphere(&q(1, 1), 3)),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn operator_on_constant_field_of_the_sphere() {
    let c = sphere(&q(1, 1), 4);
    let x = Tensor::from_fn(2, vec![Variance::Up], |i| {
        Jet::constant(2, 4, q(i[0] as i64 + 2, 3))
    });
    let l = operator_l(&c, &x).unwrap();
    assert!(l.agrees());
    assert!(!l.via_ricci.is_zero());
}

fn transform(r: &PointTensor, lin: &[Vec<Rational>]) -> PointTensor {
    let n = r.dim();
    PointTensor::covariant_from_fn(n, 4, |idx| {
        let mut acc = Rational::zero();
        for (src, val) in r.entries() {
            if val.is_zero() {
                continue;
            }
            let mut t = val.clone();
            for s in 0..4 {
                t = &t * &lin[src[s]][idx[s]];
            }
            acc += &t;
        }
        acc
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn identities_on_random_charts(seed in any::<u64>(), half in 1usize..3, k in 3usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_fedosov_chart(&mut rng, 2 * half, k, true).unwrap();
        let cd = curvature(&c).unwrap();
        prop_assert!(identity_report(&cd, c.omega_inv()).all_passed());
        prop_assert!(ricci(&cd, c.omega_inv()).report.all_passed());
        let x = random_vector_field(&mut rng, 2 * half, k);
        prop_assert!(operator_l(&c, &x).unwrap().agrees());
    }

    #[test]
    fn darboux_ricci_agrees(seed in any::<u64>(), half in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_fedosov_chart(&mut rng, 2 * half, 4, false).unwrap();
        let k = ricci(&curvature(&c).unwrap(), c.omega_inv()).k;
        prop_assert!(ricci_darboux(&c).unwrap().same_entries(&k));
    }

    #[test]
    fn curvature_at_the_base_is_tensorial(seed in any::<u64>(), half in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 2 * half;
        let c = random_fedosov_chart(&mut rng, n, 3, true).unwrap();
        let phi = random_coordinate_change(&mut rng, n, 4);
        let p = pullback(&c, &phi, Provenance::Explicit).unwrap();
        prop_assert!(validate(&p).all_passed());
        let lin = linear_part(&phi);
        prop_assert_eq!(curvature_at_origin(&p).unwrap(), transform(&curvature_at_origin(&c).unwrap(), &lin));
    }

    #[test]
    fn plane_invariant_ignores_the_basis(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_fedosov_chart(&mut rng, 4, 3, true).unwrap();
        let r0 = curvature_at_origin(&c).unwrap();
        let w0 = c.omega().at_origin();
        let x: Vec<Rational> = (0..4).map(|_| small_rational(&mut rng)).collect();
        let y: Vec<Rational> = (0..4).map(|_| small_rational(&mut rng)).collect();
        let Ok(s) = sectional_classify(&r0, &w0, &x, &y) else { return Ok(()) };
        let (a, b, cc, d) = (small_rational(&mut rng), small_rational(&mut rng), small_rational(&mut rng), small_rational(&mut rng));
        prop_assume!(!(&a * &d - &b * &cc).is_zero());
        let x2: Vec<Rational> = (0..4).map(|i| &a * &x[i] + &b * &y[i]).collect();
        let y2: Vec<Rational> = (0..4).map(|i| &cc * &x[i] + &d * &y[i]).collect();
        let s2 = sectional_classify(&r0, &w0, &x2, &y2).unwrap();
        prop_assert_eq!(s.det_invariant, s2.det_invariant);
        prop_assert_eq!(s.kind, s2.kind);
    }
}
