//! Randomized property suites over seeded Fedosov charts.

use fedosov_core::chart::validate;
use fedosov_core::curvature::{curvature, identity_report, operator_l, ricci};
use fedosov_core::generate::{random_fedosov_chart, random_vector_field};
use fedosov_core::normal::{
    a_from_curvature, derivative_identity_report_from, normal_residual,
    normal_tensors_of_normal_chart, to_normal_chart,
};
use fedosov_core::reconstruct::realize_curvature;
use fedosov_core::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: usize,
    pub total: usize,
}

const SUITES: [&str; 9] = [
    "validate",
    "curvature identities",
    "ricci",
    "operator L",
    "normal coordinates",
    "normal tensors",
    "closed forms",
    "derivative identities",
    "curvature realization",
];

/// Runs every suite on `charts` random charts; dimension alternates 2, 4 and the order
/// alternates 3, 4 unless `order` is given.
pub fn run(charts: usize, seed: u64, order: Option<usize>) -> Vec<SuiteResult> {
    let mut results: Vec<SuiteResult> = SUITES
        .iter()
        .map(|&name| SuiteResult {
            name,
            passed: 0,
            total: 0,
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..charts {
        let n = if i % 2 == 0 { 2 } else { 4 };
        let k = order.unwrap_or(if (i / 2) % 2 == 0 { 3 } else { 4 }).max(2);
        let change = rng.gen_bool(0.5);
        let outcomes = one_chart(&mut rng, n, k, change);
        for (r, outcome) in results.iter_mut().zip(outcomes) {
            if let Some(ok) = outcome {
                r.total += 1;
                r.passed += usize::from(ok);
            }
        }
    }
    results
}

fn ok<T>(r: Result<T>) -> Option<T> {
    r.ok()
}

fn one_chart(rng: &mut ChaCha8Rng, n: usize, k: usize, change: bool) -> [Option<bool>; 9] {
    let mut out = [None; 9];
    let Some(c) = ok(random_fedosov_chart(rng, n, k, change)) else {
        out[0] = Some(false);
        return out;
    };
    out[0] = Some(validate(&c).all_passed());
    let Some(cd) = ok(curvature(&c)) else {
        out[1] = Some(false);
        return out;
    };
    out[1] = Some(identity_report(&cd, c.omega_inv()).all_passed());
    out[2] = Some(ricci(&cd, c.omega_inv()).report.all_passed());
    let x = random_vector_field(rng, n, k);
    out[3] = Some(operator_l(&c, &x).is_ok_and(|l| l.agrees()));
    let nc = ok(to_normal_chart(&c));
    out[4] = Some(nc.as_ref().is_some_and(|nc| normal_residual(nc).is_zero()));
    let Some(nc) = nc else {
        return out;
    };
    let family = ok(normal_tensors_of_normal_chart(&nc, 2.min(k - 1)));
    out[5] = Some(
        family
            .as_ref()
            .is_some_and(|f| f.invariants_report().all_passed()),
    );
    let Some(family) = family else {
        return out;
    };
    let r0 = cd.r_low.at_origin();
    let mut closed = a_from_curvature(1, &r0).is_ok_and(|a| a.same_entries(&family.a[1]));
    if k >= 3 {
        closed &= c
            .nabla(&cd.r_low)
            .map(|t| t.at_origin())
            .and_then(|r1| a_from_curvature(2, &r1))
            .is_ok_and(|a| a.same_entries(&family.a[2]));
        out[7] =
            Some(derivative_identity_report_from(&c, &cd, &family).is_ok_and(|r| r.all_passed()));
    }
    out[6] = Some(closed);
    out[8] = Some(
        realize_curvature(&r0, &c.omega().at_origin())
            .and_then(|rc| curvature(&rc))
            .is_ok_and(|rcd| rcd.r_low.at_origin().same_entries(&r0)),
    );
    out
}
