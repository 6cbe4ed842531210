//! Charts of (pre-)Fedosov data centered at the base point.
//!
//! A chart stores the jets of `omega_{ij}` (order `K`) and the lowered connection
//! symbols `Gamma_{ijk} = omega_{il} Gamma^l_{jk}` (order `K - 1`), where
//! `nabla_j d_k = Gamma^l_{jk} d_l`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::matrix::{jet_matrix_inverse, rational_det};
use crate::report::ValidationReport;
use crate::series::Substitution;
use crate::tensor::{omega_raise, JetTensor, PointTensor, SymmetryKind, Tensor, Variance};
use crate::Rational;

/// How a chart came to be.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    Explicit,
    LeviCivita,
    Flat,
    Reconstructed,
    /// Pulled back to normal coordinates.
    Normal,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChartSpec {
    dim: usize,
    order: usize,
    omega: JetTensor,
    omega_inv: JetTensor,
    gamma: JetTensor,
    gamma_up: JetTensor,
    provenance: Provenance,
}

pub(crate) fn sum_jets(zero: Jet, terms: impl IntoIterator<Item = Jet>) -> Jet {
    terms.into_iter().fold(zero, |mut acc, t| {
        acc += &t;
        acc
    })
}

fn half() -> Rational {
    Rational::new(1.into(), 2.into())
}

impl ChartSpec {
    /// Builds a chart from `omega` (order `K >= 2`) and lowered symbols of order at
    /// least `K - 1`; the symbols are truncated to `K - 1`.
    pub fn new(omega: JetTensor, gamma_lower: JetTensor, provenance: Provenance) -> Result<Self> {
        let dim = omega.dim();
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::Shape(format!(
                "chart dimension {dim} is not even and positive"
            )));
        }
        if omega.rank() != 2 || omega.variances().iter().any(|&v| v != Variance::Down) {
            return Err(Error::Shape("omega must be a (0,2) tensor".into()));
        }
        if gamma_lower.dim() != dim
            || gamma_lower.rank() != 3
            || gamma_lower.variances().iter().any(|&v| v != Variance::Down)
        {
            return Err(Error::Shape(
                "connection must be a (0,3) tensor of the chart dimension".into(),
            ));
        }
        for t in [&omega, &gamma_lower] {
            if t.data().iter().any(|j| j.n_vars() != dim) {
                return Err(Error::Shape(
                    "chart jets must be in as many variables as the dimension".into(),
                ));
            }
        }
        let order = omega.order();
        if order < 2 {
            return Err(Error::Order(format!("chart order {order} is below 2")));
        }
        if gamma_lower.order() + 1 < order {
            return Err(Error::Order(format!(
                "connection jets of order {} cannot support chart order {order}",
                gamma_lower.order()
            )));
        }
        let omega = omega.truncate(order);
        let gamma = gamma_lower.truncate(order - 1);
        let m: Vec<Vec<Jet>> = (0..dim)
            .map(|i| (0..dim).map(|j| omega.get(&[i, j]).clone()).collect())
            .collect();
        let inv = jet_matrix_inverse(&m)
            .map_err(|_| Error::Singular("omega is degenerate at the base point".into()))?;
        let omega_inv = Tensor::from_fn(dim, vec![Variance::Up, Variance::Up], |idx| {
            inv[idx[0]][idx[1]].clone()
        });
        let gamma_up = omega_raise(&gamma, 0, &omega_inv)?;
        Ok(Self {
            dim,
            order,
            omega,
            omega_inv,
            gamma,
            gamma_up,
            provenance,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn omega(&self) -> &JetTensor {
        &self.omega
    }

    /// `omega^{ij}` with `omega^{ij} omega_{jk} = delta^i_k`.
    pub fn omega_inv(&self) -> &JetTensor {
        &self.omega_inv
    }

    pub fn gamma_lower(&self) -> &JetTensor {
        &self.gamma
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    /// `Gamma^l_{jk} = omega^{li} Gamma_{ijk}`.
    pub fn gamma_raised(&self) -> &JetTensor {
        &self.gamma_up
    }

    /// Covariant derivative with the new lower slot appended last.
    pub fn nabla(&self, t: &JetTensor) -> Result<JetTensor> {
        if t.dim() != self.dim {
            return Err(Error::Shape(
                "tensor dimension differs from the chart".into(),
            ));
        }
        let g = self.gamma_raised();
        let grad = t.gradient()?;
        let rank = t.rank();
        let order = grad.order().min(self.order - 1);
        let variances = grad.variances().to_vec();
        let mut src = vec![0; rank];
        Ok(Tensor::from_fn(self.dim, variances, |idx| {
            let alpha = idx[rank];
            let mut acc = grad.get(idx).truncate(order);
            for s in 0..rank {
                src.copy_from_slice(&idx[..rank]);
                for m in 0..self.dim {
                    src[s] = m;
                    let entry = t.get(&src);
                    if entry.is_zero() {
                        continue;
                    }
                    match t.variances()[s] {
                        Variance::Up => {
                            let c = g.get(&[idx[s], alpha, m]);
                            if !c.is_zero() {
                                acc.add_product(c, entry);
                            }
                        }
                        Variance::Down => {
                            let c = g.get(&[m, alpha, idx[s]]);
                            if !c.is_zero() {
                                acc.sub_product(c, entry);
                            }
                        }
                    }
                }
            }
            acc
        }))
    }
}

/// `D[i, j, k] = d_k omega_{ij}`.
pub fn omega_derivative(c: &ChartSpec) -> JetTensor {
    c.omega.gradient().expect("chart omega has positive order")
}

/// Checks antisymmetry, nondegeneracy, closedness of `omega`, symmetry of the
/// connection and preservation `d_k omega_{ij} = Gamma_{ikj} - Gamma_{jki}`.
pub fn validate(c: &ChartSpec) -> ValidationReport {
    let mut report = ValidationReport::new();
    let n = c.dim;
    let w = &c.omega;
    report.equal(
        "omega antisymmetric",
        w,
        &w.reindex(&[1, 0]).scale(&-Rational::one()),
    );

    let w0: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| w.get(&[i, j]).constant_term()).collect())
        .collect();
    if rational_det(&w0).is_zero() {
        report.fail("omega nondegenerate", Vec::new());
    } else {
        report.pass("omega nondegenerate");
    }

    let dw = omega_derivative(c);
    // d_k w_{ij} + d_j w_{ki} + d_i w_{jk}, indexed (i, j, k).
    let closed = JetTensor::covariant_from_fn(n, 3, |idx| {
        let (i, j, k) = (idx[0], idx[1], idx[2]);
        &(dw.get(&[i, j, k]) + dw.get(&[k, i, j])) + dw.get(&[j, k, i])
    });
    report.zero("omega closed", &closed);

    let g = &c.gamma;
    report.equal("connection symmetric", g, &g.reindex(&[0, 2, 1]));

    let preserved = JetTensor::covariant_from_fn(n, 3, |idx| {
        let (i, j, k) = (idx[0], idx[1], idx[2]);
        &(dw.get(&[i, j, k]) - g.get(&[i, k, j])) + g.get(&[j, k, i])
    });
    report.zero("connection preserves omega", &preserved);
    report
}

/// Lowered symmetric part `Pi_{kij} = (Gamma_{kij} + Gamma_{kji}) / 2` and torsion
/// `T^k_{ij} = Gamma^k_{ij} - Gamma^k_{ji}`.
pub fn symmetric_part(c: &ChartSpec) -> (JetTensor, JetTensor) {
    let g = &c.gamma;
    let pi = g
        .try_add(&g.reindex(&[0, 2, 1]))
        .expect("same shape")
        .scale(&half());
    let t_low = g.try_sub(&g.reindex(&[0, 2, 1])).expect("same shape");
    let torsion = omega_raise(&t_low, 0, &c.omega_inv).expect("chart shapes are consistent");
    (pi, torsion)
}

/// The unique `omega`-preserving connection with symmetric part `pi`:
/// `Gamma_{kij} = (d_k w_{ij} - d_i w_{jk} - d_j w_{ki}) / 2 + Pi_{kij} + Pi_{jik} - Pi_{ijk}`.
///
/// When `omega` is closed the shortcut `Gamma_{kij} = d_k w_{ij} + (...)` is evaluated as
/// well and must agree.
pub fn preserving_from_symmetric(pi: &JetTensor, omega: &JetTensor) -> Result<JetTensor> {
    let n = omega.dim();
    if pi.dim() != n || pi.rank() != 3 || omega.rank() != 2 {
        return Err(Error::Shape(
            "expected Pi of rank 3 and omega of rank 2".into(),
        ));
    }
    if let Some(w) = pi.symmetry_witness(&[1, 2], SymmetryKind::Symmetric) {
        return Err(Error::Precondition(format!(
            "Pi is not symmetric in its last two slots at {w:?}"
        )));
    }
    if let Some(w) = omega.symmetry_witness(&[0, 1], SymmetryKind::Antisymmetric) {
        return Err(Error::Precondition(format!(
            "omega is not antisymmetric at {w:?}"
        )));
    }
    let w0: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| omega.get(&[i, j]).constant_term()).collect())
        .collect();
    if rational_det(&w0).is_zero() {
        return Err(Error::Singular(
            "omega is degenerate at the base point".into(),
        ));
    }
    let dw = omega.gradient()?;
    let order = dw.order().min(pi.order());
    let pi = pi.truncate(order);
    let dw = dw.truncate(order);
    let combo = JetTensor::covariant_from_fn(n, 3, |idx| {
        let (k, i, j) = (idx[0], idx[1], idx[2]);
        &(pi.get(&[k, i, j]) + pi.get(&[j, i, k])) - pi.get(&[i, j, k])
    });
    let general = JetTensor::covariant_from_fn(n, 3, |idx| {
        let (k, i, j) = (idx[0], idx[1], idx[2]);
        let d = &(dw.get(&[i, j, k]) - dw.get(&[j, k, i])) - dw.get(&[k, i, j]);
        &d.scale(&half()) + combo.get(idx)
    });
    let closed = (0..n).all(|i| {
        (0..n).all(|j| {
            (0..n).all(|k| {
                (&(dw.get(&[i, j, k]) + dw.get(&[k, i, j])) + dw.get(&[j, k, i])).is_zero()
            })
        })
    });
    if closed {
        let short = JetTensor::covariant_from_fn(n, 3, |idx| {
            let (k, i, j) = (idx[0], idx[1], idx[2]);
            dw.get(&[i, j, k]) + combo.get(idx)
        });
        if let Some(w) = short.first_difference(&general) {
            return Err(Error::Postcondition(format!(
                "closed-form shortcut disagrees with the general formula at {w:?}"
            )));
        }
    }
    Ok(general)
}

/// Christoffel symbols of the first kind `Gamma_{kij} = (d_i g_{jk} + d_j g_{ik} - d_k g_{ij}) / 2`
/// (lowered with `g`).
pub fn levi_civita(g: &JetTensor) -> Result<JetTensor> {
    let n = g.dim();
    if g.rank() != 2 {
        return Err(Error::Shape("metric must have rank 2".into()));
    }
    if let Some(w) = g.symmetry_witness(&[0, 1], SymmetryKind::Symmetric) {
        return Err(Error::Precondition(format!(
            "metric is not symmetric at {w:?}"
        )));
    }
    let g0: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| g.get(&[i, j]).constant_term()).collect())
        .collect();
    if rational_det(&g0).is_zero() {
        return Err(Error::Singular(
            "metric is degenerate at the base point".into(),
        ));
    }
    let dg = g.gradient()?;
    Ok(JetTensor::covariant_from_fn(n, 3, |idx| {
        let (k, i, j) = (idx[0], idx[1], idx[2]);
        (&(dg.get(&[j, k, i]) + dg.get(&[i, k, j])) - dg.get(&[i, j, k])).scale(&half())
    }))
}

/// Chart carrying the Levi-Civita connection of `g`, re-lowered with `omega` for storage.
pub fn levi_civita_chart(omega: JetTensor, g: &JetTensor) -> Result<ChartSpec> {
    let n = g.dim();
    let first = levi_civita(g)?;
    let gm: Vec<Vec<Jet>> = (0..n)
        .map(|i| (0..n).map(|j| g.get(&[i, j]).clone()).collect())
        .collect();
    let g_inv = jet_matrix_inverse(&gm)?;
    let g_inv = Tensor::from_fn(n, vec![Variance::Up, Variance::Up], |idx| {
        g_inv[idx[0]][idx[1]].clone()
    });
    let raised = omega_raise(&first, 0, &g_inv)?;
    let lowered = crate::tensor::omega_lower(&raised, 0, &omega)?;
    ChartSpec::new(omega, lowered, Provenance::LeviCivita)
}

/// Counting functions of the connection spaces and the residual of their identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FunctionalDims {
    pub c: i64,
    pub s: i64,
    pub c_omega: i64,
    pub s_omega: i64,
    pub lambda3: i64,
    pub residual: i64,
}

pub fn functional_dims(n: u32) -> FunctionalDims {
    let n = i64::from(n);
    let c = n * n * n;
    let s_omega = (n + 2) * (n + 1) * n / 6;
    let c_omega = n * n * (n + 1) / 2;
    let s = n * n * (n + 1) / 2;
    let lambda3 = n * (n - 1) * (n - 2) / 6;
    FunctionalDims {
        c,
        s,
        c_omega,
        s_omega,
        lambda3,
        residual: c - c_omega - (s - s_omega + lambda3),
    }
}

/// Block form with `omega_{2a, 2a+1} = 1`, `omega_{2a+1, 2a} = -1`.
pub fn canonical_omega(n: usize) -> PointTensor {
    PointTensor::covariant_from_fn(n, 2, |idx| {
        let (i, j) = (idx[0], idx[1]);
        if i % 2 == 0 && j == i + 1 {
            Rational::one()
        } else if j % 2 == 0 && i == j + 1 {
            -Rational::one()
        } else {
            Rational::zero()
        }
    })
}

/// Constant canonical `omega` with vanishing connection.
pub fn darboux_flat(n: usize, order: usize) -> Result<ChartSpec> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::Precondition(format!("dimension {n} is not even")));
    }
    let omega = canonical_omega(n).to_jets(n, order);
    let gamma = JetTensor::covariant_from_fn(n, 3, |_| Jet::zero(n, order.saturating_sub(1)));
    ChartSpec::new(omega, gamma, Provenance::Flat)
}

/// Pulls the chart back along `x = phi(y)` (`phi(0) = 0`, invertible linear part).
///
/// `omega'_{ij} = J^a_i J^b_j omega_{ab}(phi)` and
/// `Gamma'_{ijk} = J^b_i (J^c_j J^d_k Gamma_{bcd}(phi) + omega_{ba}(phi) d_j d_k phi^a)`
/// with `J^a_i = d_i phi^a`. The new order is `min(K, order(phi) - 1)`.
pub fn pullback(c: &ChartSpec, phi: &[Jet], provenance: Provenance) -> Result<ChartSpec> {
    let n = c.dim;
    if phi.len() != n || phi.iter().any(|p| p.n_vars() != n) {
        return Err(Error::Shape(
            "coordinate map must have one jet per coordinate".into(),
        ));
    }
    let p_order = phi.iter().map(Jet::order).min().unwrap_or(0);
    if p_order < 2 {
        return Err(Error::Order("coordinate map needs order at least 2".into()));
    }
    let order = c.order.min(p_order - 1);
    let sub = Substitution::new(phi)?;
    let w_phi = c.omega.try_map(|j| sub.apply(j))?;
    let g_phi = c.gamma.try_map(|j| sub.apply(j))?;
    let jac: Vec<Vec<Jet>> = (0..n)
        .map(|a| (0..n).map(|i| phi[a].partial(i)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let hess: Vec<Vec<Vec<Jet>>> = (0..n)
        .map(|a| {
            (0..n)
                .map(|j| (0..n).map(|k| jac[a][j].partial(k)).collect::<Result<_>>())
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    let zero = |o: usize| Jet::zero(n, o);
    // (J^T w)_{i b} = J^a_i w_{ab}
    let jw: Vec<Vec<Jet>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|b| sum_jets(zero(order), (0..n).map(|a| &jac[a][i] * w_phi.get(&[a, b]))))
                .collect()
        })
        .collect();
    let omega = JetTensor::covariant_from_fn(n, 2, |idx| {
        let (i, j) = (idx[0], idx[1]);
        sum_jets(zero(order), (0..n).map(|b| &jw[i][b] * &jac[b][j]))
    });
    let g_order = order - 1;
    // Gamma_{b j k}(phi) contracted on the last two slots.
    let inner: Vec<Vec<Vec<Jet>>> = (0..n)
        .map(|b| {
            let gj: Vec<Vec<Jet>> = (0..n)
                .map(|j| {
                    (0..n)
                        .map(|d| {
                            sum_jets(
                                zero(g_order),
                                (0..n).map(|cc| &jac[cc][j] * g_phi.get(&[b, cc, d])),
                            )
                        })
                        .collect()
                })
                .collect();
            (0..n)
                .map(|j| {
                    (0..n)
                        .map(|k| {
                            let a = sum_jets(zero(g_order), (0..n).map(|d| &gj[j][d] * &jac[d][k]));
                            let h = sum_jets(
                                zero(g_order),
                                (0..n).map(|a| w_phi.get(&[b, a]) * &hess[a][j][k]),
                            );
                            &a + &h
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let gamma = JetTensor::covariant_from_fn(n, 3, |idx| {
        let (i, j, k) = (idx[0], idx[1], idx[2]);
        sum_jets(zero(g_order), (0..n).map(|b| &jac[b][i] * &inner[b][j][k]))
    });
    ChartSpec::new(omega, gamma, provenance)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_small() {
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
        assert_eq!(functional_dims(1).lambda3, 0);
        assert_eq!(functional_dims(1).residual, 0);
    }

    #[test]
    fn flat_is_valid() {
        let c = darboux_flat(2, 3).unwrap();
        assert!(validate(&c).all_passed());
        assert_eq!(c.omega().get(&[0, 1]), &Jet::one(2, 3));
        assert!(darboux_flat(3, 3).is_err());
    }

    #[test]
    fn low_order_rejected() {
        let omega = canonical_omega(2).to_jets(2, 1);
        let gamma = JetTensor::covariant_from_fn(2, 3, |_| Jet::zero(2, 0));
        assert!(matches!(
            ChartSpec::new(omega, gamma, Provenance::Explicit),
            Err(Error::Order(_))
        ));
    }
}
