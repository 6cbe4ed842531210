//! Geodesic normal coordinates and affine normal tensors.
//!
//! Normal tensors are stored as derivative values at the origin:
//! `A_{ijk a_1..a_r} = d_{a_1}..d_{a_r} Gamma_{ijk}(0)` in normal coordinates.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::chart::{pullback, validate, ChartSpec, Provenance};
use crate::curvature::{curvature, CurvatureData};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::matrix::jet_matrix_inverse;
use crate::reconstruct::{curvature_conditions, derivative_conditions};
use crate::report::ValidationReport;
use crate::series::Substitution;
use crate::tensor::{
    multi_indices, sym_project, veblen_sum, JetTensor, PointTensor, SymMode, SymmetryKind, Tensor,
    Variance,
};
use crate::Rational;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Multiplies each homogeneous component of degree `d` by `d`.
fn euler(j: &Jet) -> Jet {
    let terms: Vec<_> = j
        .terms()
        .map(|(m, c)| (*m, c * Rational::from_integer(m.degree().into())))
        .collect();
    Jet::from_terms(j.n_vars(), j.order(), terms).expect("same monomials")
}

/// Solves the geodesic equation with `x(0) = 0`, `x'(0) = v` and returns `x(1, v)` as jets in
/// `v` of the requested order. Homogeneous parts satisfy
/// `d (d - 1) phi_d = -[Gamma^i_{jk}(phi) (E phi^j)(E phi^k)]_d` with `E` the Euler operator.
pub(crate) fn exponential_to(c: &ChartSpec, order: usize) -> Result<Vec<Jet>> {
    let n = c.dim();
    let g = c.gamma_raised();
    let mut phi: Vec<Jet> = (0..n)
        .map(|i| Jet::variable(n, order, i))
        .collect::<Result<_>>()?;
    for d in 2..=order {
        let partial: Vec<Jet> = phi.iter().map(|p| p.truncate(d)).collect();
        let sub = Substitution::new(&partial)?;
        let e: Vec<Jet> = partial.iter().map(euler).collect();
        let factor = q(-1, (d * (d - 1)) as i64);
        for i in 0..n {
            let mut acc = Jet::zero(n, d);
            for j in 0..n {
                for k in 0..n {
                    let gijk = g.get(&[i, j, k]);
                    if gijk.is_zero() {
                        continue;
                    }
                    let gc = sub.apply(&gijk.with_order(d))?;
                    acc.add_product(&(&gc * &e[j]), &e[k]);
                }
            }
            let part = acc.homogeneous_part(d).scale(&factor).with_order(order);
            phi[i] = &phi[i] + &part;
        }
    }
    Ok(phi)
}

/// Exponential map in the chart's coordinates, to the chart order.
pub fn exponential_jets(c: &ChartSpec) -> Result<Vec<Jet>> {
    exponential_to(c, c.order())
}

/// `Gamma_{ijk}(y) y^j y^k`, exact to degree `K + 1`.
pub fn normal_residual(c: &ChartSpec) -> JetTensor {
    let n = c.dim();
    let order = c.order() + 1;
    let y: Vec<Jet> = (0..n)
        .map(|k| Jet::variable(n, order, k).expect("index in range"))
        .collect();
    let g = c.gamma_lower();
    Tensor::from_fn(n, vec![Variance::Down], |idx| {
        let mut acc = Jet::zero(n, order);
        for j in 0..n {
            for k in 0..n {
                let gl = g.get(&[idx[0], j, k]);
                if !gl.is_zero() {
                    acc.add_product(&(&gl.with_order(order) * &y[j]), &y[k]);
                }
            }
        }
        acc
    })
}

/// Pulls the chart back along the exponential map.
pub fn to_normal_chart(c: &ChartSpec) -> Result<ChartSpec> {
    let phi = exponential_to(c, c.order() + 1)?;
    let nc = pullback(c, &phi, Provenance::Normal)?;
    if let Some(check) = validate(&nc).failures().next() {
        return Err(Error::Postcondition(format!(
            "normal chart fails check '{}'",
            check.name
        )));
    }
    if let Some(w) = nc.gamma_lower().at_origin().first_nonzero() {
        return Err(Error::Postcondition(format!(
            "connection does not vanish at the origin, {w:?}"
        )));
    }
    if let Some(w) = normal_residual(&nc).first_nonzero() {
        return Err(Error::Postcondition(format!(
            "radial residual is nonzero at {w:?}"
        )));
    }
    Ok(nc)
}

/// `D[.., a_1, .., a_r] = d_{a_1}..d_{a_r} T[..](0)`.
pub fn derivative_tensor(t: &JetTensor, r: usize) -> Result<PointTensor> {
    if r > t.order() {
        return Err(Error::Order(format!(
            "derivative of order {r} requested from jets of order {}",
            t.order()
        )));
    }
    let rank = t.rank();
    let mut variances = t.variances().to_vec();
    variances.extend(core::iter::repeat_n(Variance::Down, r));
    Tensor::try_from_fn(t.dim(), variances, |idx| {
        t.get(&idx[..rank]).derivative_at_origin(&idx[rank..])
    })
}

/// Affine normal tensors `A_r` and extensions of `omega` at the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalFamily {
    /// `a[r] = A_{ijk a_1..a_r}` for `r = 0..=r_max`.
    pub a: Vec<PointTensor>,
    /// `omega_ext[r] = omega_{ij, a_1..a_r}` for `r = 0..=r_max + 1`.
    pub omega_ext: Vec<PointTensor>,
}

impl NormalFamily {
    pub fn r_max(&self) -> usize {
        self.a.len() - 1
    }

    /// Symmetries, the pair-replacement identity and the extension relations.
    pub fn invariants_report(&self) -> ValidationReport {
        let mut report = ValidationReport::new();
        report.zero("A_0 vanishes", &self.a[0]);
        for (r, a) in self.a.iter().enumerate().skip(1) {
            symmetric_check(&mut report, &format!("A_{r} symmetric in j,k"), a, &[1, 2]);
            let trailing: Vec<usize> = (3..3 + r).collect();
            symmetric_check(
                &mut report,
                &format!("A_{r} symmetric in trailing block"),
                a,
                &trailing,
            );
            match veblen_sum(a) {
                Ok(s) => report.zero(format!("pair-replacement sum A_{r}"), &s),
                Err(_) => report.fail(format!("pair-replacement sum A_{r}"), Vec::new()),
            }
            report.zero(format!("A_{r} compatibility"), &compatibility_residual(a));
        }
        for (r, w) in self.omega_ext.iter().enumerate() {
            report.zero(
                format!("omega_{r} antisymmetric"),
                &w.try_add(&w.reindex(&swap_pattern(w.rank(), 0, 1)))
                    .expect("same shape"),
            );
            let trailing: Vec<usize> = (2..2 + r).collect();
            symmetric_check(
                &mut report,
                &format!("omega_{r} symmetric in trailing block"),
                w,
                &trailing,
            );
            if r >= 1 {
                let a = &self.a[r - 1];
                report.equal(
                    format!("omega_{r} from A_{}", r - 1),
                    w,
                    &extension_from_a(a),
                );
            }
        }
        report
    }
}

fn symmetric_check(report: &mut ValidationReport, name: &str, t: &PointTensor, slots: &[usize]) {
    match t.symmetry_witness(slots, SymmetryKind::Symmetric) {
        None => report.pass(name),
        Some(w) => report.fail(name, w),
    }
}

fn swap_pattern(rank: usize, a: usize, b: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..rank).collect();
    p.swap(a, b);
    p
}

/// `omega_{ij, k a..} = A_{ikj a..} - A_{jki a..}`.
pub(crate) fn extension_from_a(a: &PointTensor) -> PointTensor {
    let rank = a.rank();
    let mut p1: Vec<usize> = (0..rank).collect();
    p1[1] = 2;
    p1[2] = 1;
    let mut p2 = p1.clone();
    p2[0] = 1;
    p2[1] = 2;
    p2[2] = 0;
    a.reindex(&p1).try_sub(&a.reindex(&p2)).expect("same shape")
}

/// `B = A_{ikj a_1..} - A_{jki a_1..}` minus its transpose in `k, a_1`; vanishes exactly when
/// a compatible symplectic form exists.
pub(crate) fn compatibility_residual(a: &PointTensor) -> PointTensor {
    let b = extension_from_a(a);
    b.try_sub(&b.reindex(&swap_pattern(b.rank(), 2, 3)))
        .expect("same shape")
}

/// Normal tensors up to `r_max <= K - 1` and extensions of `omega` up to `r_max + 1`.
pub fn normal_tensors(c: &ChartSpec, r_max: usize) -> Result<NormalFamily> {
    if r_max + 1 > c.order() {
        return Err(Error::Order(format!(
            "normal tensors up to r = {r_max} need chart order at least {}",
            r_max + 1
        )));
    }
    let nc = to_normal_chart(c)?;
    normal_tensors_of_normal_chart(&nc, r_max)
}

/// Normal tensors read off a chart that is already in normal coordinates.
pub fn normal_tensors_of_normal_chart(nc: &ChartSpec, r_max: usize) -> Result<NormalFamily> {
    let a = (0..=r_max)
        .map(|r| derivative_tensor(nc.gamma_lower(), r))
        .collect::<Result<Vec<_>>>()?;
    let omega_ext = (0..=r_max + 1)
        .map(|r| derivative_tensor(nc.omega(), r))
        .collect::<Result<Vec<_>>>()?;
    let family = NormalFamily { a, omega_ext };
    if let Some(check) = family.invariants_report().failures().next() {
        return Err(Error::Postcondition(format!(
            "normal tensors fail check '{}'",
            check.name
        )));
    }
    Ok(family)
}

/// Iterated covariant derivative; the `r` new slots are appended innermost first.
pub fn covariant_derivative(c: &ChartSpec, t: &JetTensor, r: usize) -> Result<JetTensor> {
    if r > t.order() || r >= c.order() {
        return Err(Error::Order(format!(
            "cannot differentiate {r} times at this order"
        )));
    }
    let mut out = t.clone();
    for _ in 0..r {
        out = c.nabla(&out)?;
    }
    Ok(out)
}

/// Components of `t` (given in the chart's coordinates) differentiated `r` times at the origin
/// of normal coordinates.
pub fn extension(c: &ChartSpec, t: &JetTensor, r: usize) -> Result<PointTensor> {
    let n = c.dim();
    if t.dim() != n {
        return Err(Error::Shape(
            "tensor dimension differs from the chart".into(),
        ));
    }
    let phi = exponential_to(c, c.order() + 1)?;
    let sub = Substitution::new(&phi)?;
    let jac: Vec<Vec<Jet>> = (0..n)
        .map(|a| (0..n).map(|i| phi[a].partial(i)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let inv = jet_matrix_inverse(&jac)?;
    let composed = t.try_map(|j| sub.apply(j))?;
    let mut cur = composed;
    for s in 0..t.rank() {
        let variance = t.variances()[s];
        let prev = cur;
        let mut src = vec![0; t.rank()];
        cur = Tensor::from_fn(n, t.variances().to_vec(), |idx| {
            src.copy_from_slice(idx);
            let mut acc = Jet::zero(n, prev.order().min(c.order()));
            for b in 0..n {
                src[s] = b;
                let v = prev.get(&src);
                if v.is_zero() {
                    continue;
                }
                let f = match variance {
                    Variance::Down => &jac[b][idx[s]],
                    Variance::Up => &inv[idx[s]][b],
                };
                acc.add_product(f, v);
            }
            acc
        });
    }
    derivative_tensor(&cur, r)
}

/// Ordered triads of an index list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriadSequence {
    pub j: Vec<usize>,
    pub triads: Vec<[usize; 3]>,
}

impl TriadSequence {
    /// Each triad's first and third entries are the next triad's first two, as a set.
    pub fn overlap_holds(&self) -> bool {
        self.triads.windows(2).all(|w| {
            let (a, b) = (w[0], w[1]);
            (a[0] == b[0] && a[2] == b[1]) || (a[0] == b[1] && a[2] == b[0])
        })
    }
}

pub fn triad_sequence(j: &[usize]) -> Result<TriadSequence> {
    if j.len() < 2 {
        return Err(Error::Precondition(format!(
            "triads need at least two indices, got {}",
            j.len()
        )));
    }
    let mut triads = Vec::new();
    push_triads(j, &mut triads);
    Ok(TriadSequence {
        j: j.to_vec(),
        triads,
    })
}

fn push_triads(j: &[usize], out: &mut Vec<[usize; 3]>) {
    let m = j.len();
    match m {
        0..=2 => {}
        3 => {
            out.push([j[0], j[1], j[2]]);
            out.push([j[2], j[0], j[1]]);
        }
        _ => {
            for s in 1..m - 1 {
                out.push([j[0], j[s], j[s + 1]]);
            }
            out.push([j[m - 1], j[0], j[1]]);
            for s in (3..m).rev() {
                out.push([j[1], j[s], j[s - 1]]);
            }
            out.push([j[2], j[1], j[3]]);
            push_triads(&j[2..], out);
        }
    }
}

/// Normal tensor from a curvature tensor (`rank 4`) or its first covariant derivative
/// (`rank 5`) via the weighted triad sum `-(1/(N+1)) sum_s (N - s + 1) R_{i u_s, rest}`.
pub fn a_from_triads(r: &PointTensor) -> Result<PointTensor> {
    let rank = r.rank();
    if rank != 4 && rank != 5 {
        return Err(Error::Precondition(format!(
            "the triad formula is exact only for ranks 4 and 5, got {rank}"
        )));
    }
    let positions: Vec<usize> = (1..rank).collect();
    let seq = triad_sequence(&positions)?;
    let big_n = seq.triads.len() as i64;
    let norm = q(-1, big_n + 1);
    let mut src = vec![0; rank];
    Ok(Tensor::from_fn(r.dim(), r.variances().to_vec(), |idx| {
        let mut acc = Rational::zero();
        for (s, u) in seq.triads.iter().enumerate() {
            src[0] = idx[0];
            for (p, &pos) in u.iter().enumerate() {
                src[1 + p] = idx[pos];
            }
            let mut next = 4;
            for &pos in &positions {
                if !u.contains(&pos) {
                    src[next] = idx[pos];
                    next += 1;
                }
            }
            let weight = Rational::from_integer((big_n - s as i64).into());
            acc += r.get(&src) * weight;
        }
        acc * &norm
    }))
}

fn combo(
    t: &PointTensor,
    terms: &[(i64, [usize; 5])],
    rank: usize,
    scale: Rational,
) -> PointTensor {
    let mut src = vec![0; rank];
    Tensor::from_fn(t.dim(), t.variances().to_vec(), |idx| {
        let mut acc = Rational::zero();
        for (c, pat) in terms {
            for s in 0..rank {
                src[s] = idx[pat[s]];
            }
            acc += t.get(&src) * Rational::from_integer((*c).into());
        }
        acc * &scale
    })
}

/// `R_{ijkl} = A_{ijlk} - A_{ijkl}`.
pub fn curvature_from_a(a1: &PointTensor) -> PointTensor {
    a1.reindex(&[0, 1, 3, 2]).try_sub(a1).expect("same shape")
}

/// `R_{ijkl,m} = A_{ijlkm} - A_{ijklm}`.
pub fn curvature_derivative_from_a(a2: &PointTensor) -> PointTensor {
    a2.reindex(&[0, 1, 3, 2, 4])
        .try_sub(a2)
        .expect("same shape")
}

/// `A_{ijkl}` (from `R_{ijkl}`) or `A_{ijklm}` (from `R_{ijkl,m}`).
///
/// `r = 1`: `A = (2 R_{iklj} + R_{iljk}) / 3`, checked against `(R_{iklj} + R_{ijlk}) / 3` and the
/// triad sum. `r = 2`: `A = -(2R_{ijkl,m} + R_{ijkm,l} + R_{ikjl,m} + R_{ikjm,l} + R_{iljm,k}) / 6`,
/// checked against the triad sum. In both cases the inverse relation must recover the input.
pub fn a_from_curvature(r: usize, data: &PointTensor) -> Result<PointTensor> {
    match r {
        1 => {
            curvature_conditions(data)?;
            let a = combo(
                data,
                &[(2, [0, 2, 3, 1, 4]), (1, [0, 3, 1, 2, 4])],
                4,
                q(1, 3),
            );
            let alt = combo(
                data,
                &[(1, [0, 2, 3, 1, 4]), (1, [0, 1, 3, 2, 4])],
                4,
                q(1, 3),
            );
            cross_check(&a, &alt, "cyclic-permutation route")?;
            cross_check(&a, &a_from_triads(data)?, "triad route")?;
            cross_check(&curvature_from_a(&a), data, "inverse relation")?;
            Ok(a)
        }
        2 => {
            derivative_conditions(data)?;
            let a = combo(
                data,
                &[
                    (2, [0, 1, 2, 3, 4]),
                    (1, [0, 1, 2, 4, 3]),
                    (1, [0, 2, 1, 3, 4]),
                    (1, [0, 2, 1, 4, 3]),
                    (1, [0, 3, 1, 4, 2]),
                ],
                5,
                q(-1, 6),
            );
            cross_check(&a, &a_from_triads(data)?, "triad route")?;
            cross_check(&curvature_derivative_from_a(&a), data, "inverse relation")?;
            Ok(a)
        }
        _ => Err(Error::Precondition(format!(
            "closed forms exist only for r = 1, 2, got {r}"
        ))),
    }
}

fn cross_check(a: &PointTensor, b: &PointTensor, what: &str) -> Result<()> {
    match a.first_difference(b) {
        None => Ok(()),
        Some(w) => Err(Error::Postcondition(format!("{what} disagrees at {w:?}"))),
    }
}

/// `R_{ijkl,m}` at the origin.
pub fn curvature_derivative_at_origin(c: &ChartSpec) -> Result<PointTensor> {
    let cd = curvature(c)?;
    Ok(c.nabla(&cd.r_low)?.at_origin())
}

/// Identities of the first covariant derivative of curvature and of the low normal tensors.
pub fn derivative_identity_report(c: &ChartSpec) -> Result<ValidationReport> {
    if c.order() < 3 {
        return Err(Error::Order(
            "derivative identities need chart order at least 3".into(),
        ));
    }
    let cd = curvature(c)?;
    let family = normal_tensors(c, 2.min(c.order() - 1))?;
    derivative_identity_report_from(c, &cd, &family)
}

/// As [`derivative_identity_report`], reusing curvature and normal tensors already computed for `c`.
pub fn derivative_identity_report_from(
    c: &ChartSpec,
    cd: &CurvatureData,
    family: &NormalFamily,
) -> Result<ValidationReport> {
    if c.order() < 3 {
        return Err(Error::Order(
            "derivative identities need chart order at least 3".into(),
        ));
    }
    let r1 = c.nabla(&cd.r_low)?.at_origin();
    let mut report = ValidationReport::new();
    for (name, witness) in derivative_condition_residuals(&r1) {
        report.push(
            name,
            witness.map(|indices| crate::report::Witness {
                indices,
                multidegree: None,
            }),
        );
    }
    report.extend(family.invariants_report());
    Ok(report)
}

/// Named residuals of the differentiated curvature identities, first failing index each.
pub fn derivative_condition_residuals(r1: &PointTensor) -> Vec<(&'static str, Option<Vec<usize>>)> {
    let one = q(1, 1);
    let a1 = r1
        .try_add(&r1.reindex(&[0, 1, 3, 2, 4]))
        .expect("same shape");
    let b1 = r1
        .try_sub(&r1.reindex(&[1, 0, 2, 3, 4]))
        .expect("same shape");
    let c1 = sym_project(r1, &[1, 2, 3], SymMode::CyclicSum).expect("valid slots");
    let d1 = sym_project(r1, &[2, 3, 4], SymMode::CyclicSum).expect("valid slots");
    let e1 = combo(
        r1,
        &[
            (1, [0, 4, 2, 1, 3]),
            (1, [0, 1, 4, 3, 2]),
            (1, [0, 3, 1, 2, 4]),
            (1, [0, 2, 3, 4, 1]),
        ],
        5,
        one,
    );
    vec![
        ("a1", a1.first_nonzero()),
        ("b1", b1.first_nonzero()),
        ("c1", c1.first_nonzero()),
        ("d1", d1.first_nonzero()),
        ("e1", e1.first_nonzero()),
    ]
}

/// Every multi-index of the given rank, for callers building point data.
pub fn all_indices(dim: usize, rank: usize) -> impl Iterator<Item = Vec<usize>> {
    multi_indices(dim, rank)
}
