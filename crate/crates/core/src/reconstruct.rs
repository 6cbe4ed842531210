//! Charts built from prescribed normal tensors or curvature data at the origin.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::chart::{validate, ChartSpec, Provenance};
use crate::error::{Error, Result};
use crate::jet::{monomials_of_degree, Jet};
use crate::matrix::rational_det;
use crate::normal::{
    a_from_curvature, compatibility_residual, derivative_condition_residuals, extension_from_a,
};
use crate::series::radial_antiderivative;
use crate::tensor::{
    sym_project, veblen_sum, JetTensor, PointTensor, SymMode, SymmetryKind, Tensor, Variance,
};
use crate::Rational;

fn condition(name: &'static str, witness: Option<Vec<usize>>) -> Result<()> {
    match witness {
        None => Ok(()),
        Some(witness) => Err(Error::Condition { name, witness }),
    }
}

fn require_rank(t: &PointTensor, rank: usize, what: &str) -> Result<()> {
    if t.rank() != rank || t.variances().iter().any(|&v| v != Variance::Down) {
        return Err(Error::Shape(format!(
            "{what} must be a covariant tensor of rank {rank}"
        )));
    }
    Ok(())
}

/// Conditions on a prescribed curvature tensor: (a) antisymmetry in the last pair,
/// (b) symmetry in the first pair, (c) the first Bianchi identity.
pub fn curvature_conditions(r0: &PointTensor) -> Result<()> {
    require_rank(r0, 4, "curvature")?;
    condition("a", r0.try_add(&r0.reindex(&[0, 1, 3, 2]))?.first_nonzero())?;
    condition("b", r0.try_sub(&r0.reindex(&[1, 0, 2, 3]))?.first_nonzero())?;
    condition(
        "c",
        sym_project(r0, &[1, 2, 3], SymMode::CyclicSum)?.first_nonzero(),
    )?;
    Ok(())
}

/// Conditions (a1)-(e1) on a prescribed first covariant derivative of curvature.
pub fn derivative_conditions(r1: &PointTensor) -> Result<()> {
    require_rank(r1, 5, "curvature derivative")?;
    for (name, witness) in derivative_condition_residuals(r1) {
        condition(name, witness)?;
    }
    Ok(())
}

fn check_omega0(omega0: &PointTensor, dim: usize) -> Result<()> {
    require_rank(omega0, 2, "omega")?;
    if omega0.dim() != dim {
        return Err(Error::Shape(
            "omega dimension differs from the tensors".into(),
        ));
    }
    condition(
        "c",
        omega0.symmetry_witness(&[0, 1], SymmetryKind::Antisymmetric),
    )?;
    let m: Vec<Vec<Rational>> = (0..dim)
        .map(|i| (0..dim).map(|j| omega0.get(&[i, j]).clone()).collect())
        .collect();
    if rational_det(&m).is_zero() {
        return Err(Error::Condition {
            name: "c",
            witness: Vec::new(),
        });
    }
    Ok(())
}

/// `sum_a T[.., a_1..a_r] y^{a_1}..y^{a_r} / r!` for every leading index, as jets.
fn taylor_block(t: &PointTensor, lead: usize, order: usize) -> JetTensor {
    let n = t.dim();
    let r = t.rank() - lead;
    Tensor::from_fn(n, vec![Variance::Down; lead], |idx| {
        let mut full = idx.to_vec();
        full.resize(lead + r, 0);
        let terms: Vec<_> = monomials_of_degree(n, r)
            .into_iter()
            .filter_map(|m| {
                let mut pos = lead;
                for (var, &e) in m.exponents().iter().enumerate() {
                    for _ in 0..e {
                        full[pos] = var;
                        pos += 1;
                    }
                }
                let v = t.get(&full);
                if v.is_zero() {
                    None
                } else {
                    let c = v / m.factorial_weight();
                    Some((m, c))
                }
            })
            .collect();
        Jet::from_terms(n, order, terms).expect("degree within order")
    })
}

/// Assembles `Gamma_{ijk}(y) = sum_r A_{ijk a..} y^a.. / r!` and
/// `omega_{ij}(y) = sum_r omega_{ij, a..} y^a.. / r!` with extensions
/// `omega_{ij, k a..} = A_{ikj a..} - A_{jki a..}`.
///
/// `a[r]` is `A_r` (rank `3 + r`); tensors beyond the supplied ones are taken to be zero.
/// Violations are reported as (a) symmetries of `A`, (b) the pair-replacement identity,
/// (c) `omega0` antisymmetric nondegenerate, (d) symmetry of the derived extensions.
pub fn chart_from_normal_tensors(
    a: &[PointTensor],
    omega0: &PointTensor,
    order: usize,
) -> Result<ChartSpec> {
    let n = omega0.dim();
    if order < 2 {
        return Err(Error::Order(format!("chart order {order} is below 2")));
    }
    let first = a
        .first()
        .ok_or_else(|| Error::Shape("no normal tensors supplied".into()))?;
    require_rank(first, 3, "A_0")?;
    condition("a", first.first_nonzero())?;
    for (r, t) in a.iter().enumerate().skip(1) {
        require_rank(t, 3 + r, "normal tensor")?;
        if t.dim() != n {
            return Err(Error::Shape(
                "normal tensor dimension differs from omega".into(),
            ));
        }
        condition("a", t.symmetry_witness(&[1, 2], SymmetryKind::Symmetric))?;
        let trailing: Vec<usize> = (3..3 + r).collect();
        condition("a", t.symmetry_witness(&trailing, SymmetryKind::Symmetric))?;
    }
    for t in a.iter().skip(1) {
        condition("b", veblen_sum(t)?.first_nonzero())?;
    }
    check_omega0(omega0, n)?;
    for t in a.iter().skip(1) {
        condition("d", compatibility_residual(t).first_nonzero())?;
    }
    let zero_a = |r: usize| PointTensor::zeros(n, vec![Variance::Down; 3 + r]);
    let a_at = |r: usize| a.get(r).cloned().unwrap_or_else(|| zero_a(r));
    let g_order = order - 1;
    let mut gamma = JetTensor::covariant_from_fn(n, 3, |_| Jet::zero(n, g_order));
    for r in 1..=g_order {
        gamma = gamma.try_add(&taylor_block(&a_at(r), 3, g_order))?;
    }
    let mut omega = omega0.to_jets(n, order).without_symmetries();
    for r in 2..=order {
        let ext = extension_from_a(&a_at(r - 1));
        omega = omega.try_add(&taylor_block(&ext, 2, order))?;
    }
    let chart = ChartSpec::new(omega, gamma, Provenance::Reconstructed)?;
    if let Some(check) = validate(&chart).failures().next() {
        return Err(Error::Postcondition(format!(
            "reconstructed chart fails check '{}'",
            check.name
        )));
    }
    Ok(chart)
}

/// The symplectic form with `omega(0) = omega0` preserved by a symmetric connection:
/// integrates `d_k omega_{ij} = Gamma_{ikj} - Gamma_{jki}` radially.
pub fn omega_from_connection(gamma: &JetTensor, omega0: &PointTensor) -> Result<JetTensor> {
    let n = gamma.dim();
    if gamma.rank() != 3 {
        return Err(Error::Shape("connection must have rank 3".into()));
    }
    check_omega0(omega0, n).map_err(|e| match e {
        Error::Condition { witness, .. } => Error::Precondition(format!(
            "omega0 is not antisymmetric and nondegenerate ({witness:?})"
        )),
        other => other,
    })?;
    let order = gamma.order() + 1;
    let mut entries = vec![vec![Jet::zero(n, order); n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let f: Vec<Jet> = (0..n)
                .map(|k| gamma.get(&[i, k, j]) - gamma.get(&[j, k, i]))
                .collect();
            let w = radial_antiderivative(&f, omega0.get(&[i, j])).map_err(|e| match e {
                Error::Integrability {
                    mut indices,
                    multidegree,
                } => {
                    indices.extend([i, j]);
                    Error::Integrability {
                        indices,
                        multidegree,
                    }
                }
                other => other,
            })?;
            entries[j][i] = -&w;
            entries[i][j] = w;
        }
    }
    Ok(JetTensor::covariant_from_fn(n, 2, |idx| {
        entries[idx[0]][idx[1]].clone()
    }))
}

fn postcondition(name: &str, witness: Option<Vec<usize>>) -> Result<()> {
    match witness {
        None => Ok(()),
        Some(w) => Err(Error::Postcondition(format!("{name} fails at {w:?}"))),
    }
}

/// A chart of order 3 whose curvature at the origin is `r0`.
pub fn realize_curvature(r0: &PointTensor, omega0: &PointTensor) -> Result<ChartSpec> {
    let n = r0.dim();
    curvature_conditions(r0)?;
    check_omega0(omega0, n)?;
    let a1 = a_from_curvature(1, r0)?;
    postcondition(
        "A symmetric in j,k",
        a1.symmetry_witness(&[1, 2], SymmetryKind::Symmetric),
    )?;
    postcondition(
        "cyclic sum of A",
        sym_project(&a1, &[1, 2, 3], SymMode::CyclicSum)?.first_nonzero(),
    )?;
    // A_{ijkl} - A_{kjil} - A_{ilkj} + A_{klij}
    let mixed = a1
        .try_sub(&a1.reindex(&[2, 1, 0, 3]))?
        .try_sub(&a1.reindex(&[0, 3, 2, 1]))?
        .try_add(&a1.reindex(&[2, 3, 0, 1]))?;
    postcondition("four-term identity of A", mixed.first_nonzero())?;
    let a0 = PointTensor::zeros(n, vec![Variance::Down; 3]);
    chart_from_normal_tensors(&[a0, a1], omega0, 3)
}

/// A chart of order 4 whose curvature derivative at the origin is `r1` and whose curvature at
/// the origin is `r0` (zero when absent).
pub fn realize_curvature_derivative(
    r0: Option<&PointTensor>,
    r1: &PointTensor,
    omega0: &PointTensor,
) -> Result<ChartSpec> {
    let n = r1.dim();
    derivative_conditions(r1)?;
    check_omega0(omega0, n)?;
    let a1 = match r0 {
        Some(r0) => {
            curvature_conditions(r0)?;
            a_from_curvature(1, r0)?
        }
        None => PointTensor::zeros(n, vec![Variance::Down; 4]),
    };
    let a2 = a_from_curvature(2, r1)?;
    postcondition(
        "A symmetric in j,k",
        a2.symmetry_witness(&[1, 2], SymmetryKind::Symmetric),
    )?;
    postcondition(
        "A symmetric in l,m",
        a2.symmetry_witness(&[3, 4], SymmetryKind::Symmetric),
    )?;
    postcondition("pair-replacement sum", veblen_sum(&a2)?.first_nonzero())?;
    // A_{ijklm} - A_{kjilm} - A_{ilkjm} + A_{klijm}
    let mixed = a2
        .try_sub(&a2.reindex(&[2, 1, 0, 3, 4]))?
        .try_sub(&a2.reindex(&[0, 3, 2, 1, 4]))?
        .try_add(&a2.reindex(&[2, 3, 0, 1, 4]))?;
    postcondition("four-term identity of A", mixed.first_nonzero())?;
    let a0 = PointTensor::zeros(n, vec![Variance::Down; 3]);
    chart_from_normal_tensors(&[a0, a1, a2], omega0, 4)
}
