mod common;

use common::{half_plane, q, sphere, var};
use fedosov_core::chart::{
    canonical_omega, darboux_flat, functional_dims, levi_civita, preserving_from_symmetric,
    pullback, symmetric_part, validate,
};
use fedosov_core::generate::{
    random_coordinate_change, random_fedosov_chart, random_jet, random_symmetric_gamma,
};
use fedosov_core::tensor::SymmetryKind;
use fedosov_core::{ChartSpec, Error, Jet, JetTensor, Multidegree, Provenance};
use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn failed(c: &ChartSpec) -> Vec<String> {
    validate(c).failures().map(|f| f.name.clone()).collect()
}

#[test]
fn flat_darboux_chart_is_valid() {
    let c = darboux_flat(2, 3).unwrap();
    assert_eq!(c.omega().at_origin(), canonical_omega(2));
    assert!(c.gamma_lower().is_zero());
    assert!(validate(&c).all_passed());
    assert_eq!(c.provenance(), Provenance::Flat);
    assert!(matches!(darboux_flat(3, 3), Err(Error::Precondition(_))));
}

#[test]
fn non_closed_form_is_located() {
    // omega_12 = 1 + x, omega_13 = y, omega_34 = 1 in coordinates (x, y, z, w)
    let (n, k) = (4, 3);
    let zero = Jet::zero(n, k);
    let w12 = &Jet::one(n, k) + &var(n, k, 0);
    let w13 = var(n, k, 1);
    let omega = JetTensor::covariant_from_fn(n, 2, |i| match (i[0], i[1]) {
        (0, 1) => w12.clone(),
        (1, 0) => -&w12,
        (0, 2) => w13.clone(),
        (2, 0) => -&w13,
        (2, 3) => Jet::one(n, k),
        (3, 2) => -Jet::one(n, k),
        _ => zero.clone(),
    });
    let gamma = JetTensor::covariant_from_fn(n, 3, |_| Jet::zero(n, k - 1));
    let c = ChartSpec::new(omega, gamma, Provenance::Explicit).unwrap();
    let report = validate(&c);
    let closed = report.get("omega closed").unwrap();
    assert!(!closed.passed);
    let w = closed.witness.as_ref().unwrap();
    let mut idx = w.indices.clone();
    idx.sort();
    assert_eq!(idx, vec![0, 1, 2]);
    assert!(report.get("omega nondegenerate").unwrap().passed);
    assert!(report.get("omega antisymmetric").unwrap().passed);
}

#[test]
fn degenerate_or_malformed_charts_are_rejected() {
    let (n, k) = (2, 2);
    let omega = JetTensor::covariant_from_fn(n, 2, |i| match (i[0], i[1]) {
        (0, 1) => var(n, k, 0),
        (1, 0) => -&var(n, k, 0),
        _ => Jet::zero(n, k),
    });
    let gamma = JetTensor::covariant_from_fn(n, 3, |_| Jet::zero(n, 1));
    assert!(matches!(
        ChartSpec::new(omega, gamma.clone(), Provenance::Explicit),
        Err(Error::Singular(_))
    ));
    let odd = JetTensor::covariant_from_fn(3, 2, |_| Jet::zero(3, 2));
    assert!(matches!(
        ChartSpec::new(odd, gamma.clone(), Provenance::Explicit),
        Err(Error::Shape(_))
    ));
    let low = canonical_omega(2).to_jets(2, 1);
    assert!(matches!(
        ChartSpec::new(low, gamma, Provenance::Explicit),
        Err(Error::Order(_))
    ));
}

#[test]
fn curved_model_charts_are_valid() {
    for c in [
        half_plane(&q(1, 1), 4),
        half_plane(&q(5, 2), 3),
        sphere(&q(1, 1), 4),
        sphere(&q(3, 2), 3),
    ] {
        assert!(validate(&c).all_passed(), "{:?}", failed(&c));
        assert_eq!(c.provenance(), Provenance::LeviCivita);
    }
}

#[test]
fn half_plane_symbols_match_closed_form() {
    // Gamma^x_{xy} = -1/y, Gamma^y_{xx} = 1/y, Gamma^y_{yy} = -1/y at y = b
    for b in [q(1, 1), q(2, 1), q(3, 4)] {
        let g = half_plane(&b, 3).gamma_raised().at_origin();
        let inv = b.recip();
        assert_eq!(g.get(&[0, 0, 1]), &-&inv);
        assert_eq!(g.get(&[0, 1, 0]), &-&inv);
        assert_eq!(g.get(&[1, 0, 0]), &inv);
        assert_eq!(g.get(&[1, 1, 1]), &-&inv);
        assert!(
            g.get(&[0, 0, 0]).is_zero()
                && g.get(&[1, 0, 1]).is_zero()
                && g.get(&[0, 1, 1]).is_zero()
        );
    }
}

#[test]
fn constant_metric_has_no_symbols() {
    let g = JetTensor::covariant_from_fn(2, 2, |i| {
        Jet::constant(2, 3, q(1 + (i[0] + i[1]) as i64, 1))
    });
    assert!(levi_civita(&g).unwrap().is_zero());
    let asym = JetTensor::covariant_from_fn(2, 2, |i| Jet::constant(2, 3, q(i[0] as i64, 1)));
    assert!(matches!(levi_civita(&asym), Err(Error::Precondition(_))));
}

#[test]
fn symmetric_part_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let c = random_fedosov_chart(&mut rng, 2, 3, true).unwrap();
    let (pi, t) = symmetric_part(&c);
    assert_eq!(&pi, c.gamma_lower());
    assert!(t.is_zero());
    let (n, k) = (2, 3);
    let s = JetTensor::covariant_from_fn(n, 3, |_| random_jet(&mut rng, n, k - 1, 0, k - 1, 0.5));
    let anti = s.try_sub(&s.reindex(&[0, 2, 1])).unwrap();
    let c = ChartSpec::new(canonical_omega(n).to_jets(n, k), anti, Provenance::Explicit).unwrap();
    let (pi, t) = symmetric_part(&c);
    assert!(pi.is_zero());
    assert!(!t.is_zero());
}

#[test]
fn preserving_partner_of_symmetric_connection_in_darboux_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let pi = random_symmetric_gamma(&mut rng, 4, 3);
    let omega = canonical_omega(4).to_jets(4, 3);
    assert_eq!(preserving_from_symmetric(&pi, &omega).unwrap(), pi);
}

#[test]
fn preserving_partner_of_zero_is_derivative_of_omega() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let c = random_fedosov_chart(&mut rng, 2, 3, true).unwrap();
    let omega = c.omega().clone();
    let dw = omega.gradient().unwrap();
    let pi = JetTensor::covariant_from_fn(2, 3, |_| Jet::zero(2, 2));
    let g = preserving_from_symmetric(&pi, &omega).unwrap();
    let expected = JetTensor::covariant_from_fn(2, 3, |i| dw.get(&[i[1], i[2], i[0]]).clone());
    assert_eq!(g, expected);
    let chart = ChartSpec::new(omega, g, Provenance::Explicit).unwrap();
    assert!(
        validate(&chart)
            .get("connection preserves omega")
            .unwrap()
            .passed
    );
    let not_sym = JetTensor::covariant_from_fn(2, 3, |i| Jet::constant(2, 2, q(i[1] as i64, 1)));
    assert!(matches!(
        preserving_from_symmetric(&not_sym, c.omega()),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn dimension_counts() {
    let d = functional_dims(2);
    assert_eq!(
        (d.c, d.s_omega, d.c_omega, d.s, d.lambda3, d.residual),
        (8, 4, 6, 6, 0, 0)
    );
    let d = functional_dims(3);
    assert_eq!(
        (d.c, d.s_omega, d.c_omega, d.s, d.lambda3, d.residual),
        (27, 10, 18, 18, 1, 0)
    );
    let d = functional_dims(1);
    assert_eq!((d.lambda3, d.residual), (0, 0));
    for n in 1..=40 {
        assert_eq!(functional_dims(n).residual, 0);
    }
}

fn lowered_is_totally_symmetric(g: &JetTensor) -> bool {
    g.symmetry_witness(&[0, 1, 2], SymmetryKind::Symmetric)
        .is_none()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_charts_validate(seed in any::<u64>(), half in 1usize..3, k in 2usize..5, change in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_fedosov_chart(&mut rng, 2 * half, k, change).unwrap();
        prop_assert!(validate(&c).all_passed(), "{:?}", failed(&c));
        prop_assert_eq!(c.order(), k);
    }

    #[test]
    fn darboux_charts_have_totally_symmetric_symbols(seed in any::<u64>(), half in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 2 * half;
        let c = random_fedosov_chart(&mut rng, n, 3, false).unwrap();
        prop_assert!(c.omega().truncate(3).data().iter().all(|j| j.terms().all(|(m, _)| m.degree() == 0)));
        prop_assert!(lowered_is_totally_symmetric(c.gamma_lower()));
        // A symmetric connection in Darboux form that is not totally symmetric fails preservation.
        let mut bumped = c.gamma_lower().data().to_vec();
        let idx = c.gamma_lower().flat_index(&[0, 1, 1]);
        bumped[idx] = &bumped[idx] + &Jet::one(n, 2);
        let g = JetTensor::from_vec(n, c.gamma_lower().variances().to_vec(), bumped).unwrap();
        let bad = ChartSpec::new(c.omega().clone(), g, Provenance::Explicit).unwrap();
        prop_assert!(!validate(&bad).get("connection preserves omega").unwrap().passed);
    }

    #[test]
    fn pullback_keeps_charts_valid(seed in any::<u64>(), half in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 2 * half;
        let c = random_fedosov_chart(&mut rng, n, 3, false).unwrap();
        let phi = random_coordinate_change(&mut rng, n, 4);
        let p = pullback(&c, &phi, Provenance::Explicit).unwrap();
        prop_assert!(validate(&p).all_passed(), "{:?}", failed(&p));
        prop_assert_eq!(p.order(), 3);
    }

    #[test]
    fn symmetric_and_preserving_correspond(seed in any::<u64>(), half in 1usize..3, k in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 2 * half;
        let omega = random_fedosov_chart(&mut rng, n, k, true).unwrap().omega().clone();
        let pi = random_symmetric_gamma(&mut rng, n, k);
        let skew = JetTensor::covariant_from_fn(n, 3, |_| random_jet(&mut rng, n, k - 1, 0, k - 1, 0.4));
        let pi = pi.try_add(&skew.try_add(&skew.reindex(&[0, 2, 1])).unwrap()).unwrap();
        let g = preserving_from_symmetric(&pi, &omega).unwrap();
        let c = ChartSpec::new(omega.clone(), g.clone(), Provenance::Explicit).unwrap();
        prop_assert!(validate(&c).get("connection preserves omega").unwrap().passed);
        let (back, _) = symmetric_part(&c);
        prop_assert_eq!(&back, &pi);
        prop_assert_eq!(preserving_from_symmetric(&back, &omega).unwrap(), g);
    }
}

#[test]
fn rational_literal_bases_recenter() {
    let c = half_plane(&q(2, 1), 3);
    let lambda = c.omega().get(&[0, 1]);
    assert_eq!(lambda.constant_term(), q(1, 4));
    assert_eq!(lambda.coeff(&Multidegree::new(vec![0, 1])), q(-1, 4));
    assert_eq!(lambda.coeff(&Multidegree::new(vec![0, 2])), q(3, 16));
}
