mod common;

use common::q;
use fedosov_core::chart::{canonical_omega, darboux_flat, validate};
use fedosov_core::curvature::{curvature, curvature_at_origin};
use fedosov_core::generate::{random_fedosov_chart, small_rational};
use fedosov_core::normal::{curvature_derivative_at_origin, normal_tensors, to_normal_chart};
use fedosov_core::reconstruct::{
    chart_from_normal_tensors, curvature_conditions, omega_from_connection, realize_curvature,
    realize_curvature_derivative,
};
use fedosov_core::{Error, JetTensor, PointTensor, Provenance, Rational, Variance};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn zeros(n: usize, rank: usize) -> PointTensor {
    PointTensor::zeros(n, vec![Variance::Down; rank])
}

#[test]
fn vanishing_normal_tensors_give_the_flat_chart() {
    let w = canonical_omega(4);
    let c = chart_from_normal_tensors(&[zeros(4, 3), zeros(4, 4), zeros(4, 5)], &w, 4).unwrap();
    let flat = darboux_flat(4, 4).unwrap();
    assert_eq!(c.omega(), flat.omega());
    assert!(c.gamma_lower().is_zero());
    assert_eq!(c.provenance(), Provenance::Reconstructed);
    assert!(realize_curvature(&zeros(4, 4), &w)
        .unwrap()
        .gamma_lower()
        .is_zero());
}

#[test]
fn totally_symmetric_first_tensor_is_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 2;
    let s: Vec<Rational> = (0..5).map(|_| small_rational(&mut rng)).collect();
    let a1 = PointTensor::covariant_from_fn(n, 4, |x| s[x.iter().sum::<usize>()].clone());
    let w = canonical_omega(n);
    assert!(matches!(
        chart_from_normal_tensors(&[zeros(n, 3), a1], &w, 3),
        Err(Error::Condition { name: "b", .. })
    ));
}

#[test]
fn malformed_inputs_are_named() {
    let w = canonical_omega(2);
    let mut a0 = zeros(2, 3).data().to_vec();
    a0[0] = q(1, 1);
    let a0 = PointTensor::from_vec(2, vec![Variance::Down; 3], a0).unwrap();
    assert!(matches!(
        chart_from_normal_tensors(&[a0], &w, 3),
        Err(Error::Condition { name: "a", .. })
    ));
    let degenerate = zeros(2, 2);
    assert!(matches!(
        chart_from_normal_tensors(&[zeros(2, 3)], &degenerate, 3),
        Err(Error::Condition { name: "c", .. })
    ));
    assert!(matches!(
        chart_from_normal_tensors(&[zeros(2, 3)], &w, 1),
        Err(Error::Order(_))
    ));
    let mut r = zeros(2, 4).data().to_vec();
    r[PointTensor::zeros(2, vec![Variance::Down; 4]).flat_index(&[0, 1, 0, 1])] = q(1, 1);
    let r = PointTensor::from_vec(2, vec![Variance::Down; 4], r).unwrap();
    assert!(matches!(
        curvature_conditions(&r),
        Err(Error::Condition { name: "a", .. })
    ));
    assert!(matches!(
        realize_curvature(&r, &w),
        Err(Error::Condition { name: "a", .. })
    ));
    let b_only = PointTensor::covariant_from_fn(2, 4, |x| {
        let v = i64::from(x[2] == 0 && x[3] == 1) - i64::from(x[2] == 1 && x[3] == 0);
        q(v * if x[0] == 0 && x[1] == 1 { 1 } else { 0 }, 1)
    });
    assert!(matches!(
        realize_curvature(&b_only, &w),
        Err(Error::Condition { name: "b", .. })
    ));
}

#[test]
fn connection_without_torsion_part_preserves_the_constant_form() {
    let w = canonical_omega(2);
    let zero = JetTensor::covariant_from_fn(2, 3, |_| fedosov_core::Jet::zero(2, 2));
    assert_eq!(
        omega_from_connection(&zero, &w).unwrap(),
        w.to_jets(2, 3).without_symmetries()
    );
    let bad = zeros(2, 2);
    assert!(matches!(
        omega_from_connection(&zero, &bad),
        Err(Error::Precondition(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn normal_form_round_trip(seed in any::<u64>(), half in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 2 * half;
        let c = random_fedosov_chart(&mut rng, n, 3, true).unwrap();
        let nc = to_normal_chart(&c).unwrap();
        let f = normal_tensors(&c, 2).unwrap();
        let back = chart_from_normal_tensors(&f.a, &c.omega().at_origin(), 3).unwrap();
        prop_assert!(validate(&back).all_passed());
        prop_assert!(back.omega().same_entries(nc.omega()));
        prop_assert!(back.gamma_lower().truncate(1).same_entries(&nc.gamma_lower().truncate(1)));
    }

    #[test]
    fn form_is_recovered_from_its_connection(seed in any::<u64>(), half in 1usize..3, k in 3usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_fedosov_chart(&mut rng, 2 * half, k, true).unwrap();
        let w = omega_from_connection(c.gamma_lower(), &c.omega().at_origin()).unwrap();
        prop_assert!(w.same_entries(c.omega()));
    }

    #[test]
    fn prescribed_curvature_is_realized(seed in any::<u64>(), half in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_fedosov_chart(&mut rng, 2 * half, 4, true).unwrap();
        let r0 = curvature(&c).unwrap().r_low.at_origin();
        let r1 = curvature_derivative_at_origin(&c).unwrap();
        let w0 = c.omega().at_origin();
        let rc = realize_curvature(&r0, &w0).unwrap();
        prop_assert_eq!(rc.omega().at_origin(), w0.clone());
        prop_assert_eq!(curvature_at_origin(&rc).unwrap(), r0.clone());
        let rd = realize_curvature_derivative(Some(&r0), &r1, &w0).unwrap();
        prop_assert_eq!(curvature_at_origin(&rd).unwrap(), r0.clone());
        prop_assert_eq!(curvature_derivative_at_origin(&rd).unwrap(), r1.clone());
        let only = realize_curvature_derivative(None, &r1, &w0).unwrap();
        prop_assert!(curvature_at_origin(&only).unwrap().is_zero());
        prop_assert_eq!(curvature_derivative_at_origin(&only).unwrap(), r1);
        let none = realize_curvature_derivative(Some(&r0), &zeros(2 * half, 5), &w0).unwrap();
        prop_assert!(none.omega().truncate(3).same_entries(rc.omega()));
    }
}
