//! Curvature, Ricci tensor, the operator `L` and sectional classification.
//!
//! `R(d_j, d_k) d_i = R^m_{ijk} d_m` and `R_{ijkl} = omega_{im} R^m_{jkl}`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::chart::{omega_derivative, sum_jets, validate, ChartSpec};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::report::ValidationReport;
use crate::tensor::{omega_lower, sym_project, JetTensor, PointTensor, SymMode, Tensor, Variance};
use crate::Rational;

#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureData {
    /// `R^l_{ijk}`, slots `(l, i, j, k)`.
    pub r_up: JetTensor,
    /// `R_{ijkl}`.
    pub r_low: JetTensor,
}

impl CurvatureData {
    pub fn order(&self) -> usize {
        self.r_low.order()
    }
}

fn require_valid(c: &ChartSpec) -> Result<()> {
    let report = validate(c);
    let failed = report.failures().next().map(|check| check.name.clone());
    match failed {
        None => Ok(()),
        Some(name) => Err(Error::Precondition(format!("chart fails check '{name}'"))),
    }
}

/// Curvature from the raised symbols, cross-checked against a direct evaluation in
/// lowered symbols.
pub fn curvature(c: &ChartSpec) -> Result<CurvatureData> {
    require_valid(c)?;
    let n = c.dim();
    let order = c.order() - 2;
    let g = c.gamma_raised().truncate(order + 1);
    let dg = g.gradient()?;
    let gt = g.truncate(order);
    let zero = Jet::zero(n, order);
    let r_up = Tensor::from_fn(
        n,
        vec![Variance::Up, Variance::Down, Variance::Down, Variance::Down],
        |idx| {
            let (l, i, j, k) = (idx[0], idx[1], idx[2], idx[3]);
            let lin = dg.get(&[l, k, i, j]) - dg.get(&[l, j, i, k]);
            let quad = sum_jets(
                zero.clone(),
                (0..n).map(|m| {
                    &(gt.get(&[m, k, i]) * gt.get(&[l, j, m]))
                        - &(gt.get(&[m, j, i]) * gt.get(&[l, k, m]))
                }),
            );
            &lin + &quad
        },
    );
    let r_low = omega_lower(&r_up, 0, &c.omega().truncate(order))?;
    let direct = curvature_lowered(c)?;
    if let Some(w) = direct.first_difference(&r_low) {
        return Err(Error::Postcondition(format!(
            "lowered and raised curvature formulas disagree at {w:?}"
        )));
    }
    Ok(CurvatureData { r_up, r_low })
}

/// `R_{ijkl} = d_k G_{ijl} - d_l G_{ijk} - d_k w_{ib} w^{bp} G_{pjl} + d_l w_{ib} w^{bp} G_{pjk}
///  + w^{mp} G_{pjl} G_{ikm} - w^{mp} G_{pjk} G_{ilm}` in lowered symbols `G`.
fn curvature_lowered(c: &ChartSpec) -> Result<JetTensor> {
    let n = c.dim();
    let order = c.order() - 2;
    let gam = c.gamma_lower();
    let dgam = gam.gradient()?;
    let gt = gam.truncate(order);
    let dw = omega_derivative(c).truncate(order);
    let winv = c.omega_inv().truncate(order);
    let zero = Jet::zero(n, order);
    // H[i, k, p] = d_k w_{ib} w^{bp}
    let h = Tensor::from_fn(n, vec![Variance::Down; 3], |idx| {
        let (i, k, p) = (idx[0], idx[1], idx[2]);
        sum_jets(
            zero.clone(),
            (0..n).map(|b| dw.get(&[i, b, k]) * winv.get(&[b, p])),
        )
    });
    // U[m, j, l] = w^{mp} G_{pjl}
    let u = Tensor::from_fn(n, vec![Variance::Down; 3], |idx| {
        let (m, j, l) = (idx[0], idx[1], idx[2]);
        sum_jets(
            zero.clone(),
            (0..n).map(|p| winv.get(&[m, p]) * gt.get(&[p, j, l])),
        )
    });
    Ok(JetTensor::covariant_from_fn(n, 4, |idx| {
        let (i, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
        let lin = dgam.get(&[i, j, l, k]) - dgam.get(&[i, j, k, l]);
        let conn = sum_jets(
            zero.clone(),
            (0..n).map(|p| {
                &(h.get(&[i, l, p]) * gt.get(&[p, j, k]))
                    - &(h.get(&[i, k, p]) * gt.get(&[p, j, l]))
            }),
        );
        let quad = sum_jets(
            zero.clone(),
            (0..n).map(|m| {
                &(u.get(&[m, j, l]) * gt.get(&[i, k, m]))
                    - &(u.get(&[m, j, k]) * gt.get(&[i, l, m]))
            }),
        );
        &(&lin + &conn) + &quad
    }))
}

/// `w^{kl} T_{.. k .. l ..}` contracted over two lower slots of `t`.
fn trace_with(t: &JetTensor, winv: &JetTensor, s1: usize, s2: usize) -> JetTensor {
    let n = t.dim();
    let rank = t.rank();
    let keep: Vec<usize> = (0..rank).filter(|&s| s != s1 && s != s2).collect();
    let order = t.order().min(winv.order());
    let mut src = vec![0; rank];
    Tensor::from_fn(n, vec![Variance::Down; keep.len()], |idx| {
        for (pos, &s) in keep.iter().enumerate() {
            src[s] = idx[pos];
        }
        let mut acc = Jet::zero(n, order);
        for k in 0..n {
            for l in 0..n {
                let w = winv.get(&[k, l]);
                if w.is_zero() {
                    continue;
                }
                src[s1] = k;
                src[s2] = l;
                let v = t.get(&src);
                if !v.is_zero() {
                    acc.add_product(w, v);
                }
            }
        }
        acc
    })
}

/// Algebraic curvature identities of a symplectic connection.
pub fn identity_report(cd: &CurvatureData, omega_inv: &JetTensor) -> ValidationReport {
    let r = &cd.r_low;
    let mut report = ValidationReport::new();
    report.zero(
        "R antisymmetric in last pair",
        &r.try_add(&r.reindex(&[0, 1, 3, 2])).expect("same shape"),
    );
    report.equal("R symmetric in first pair", r, &r.reindex(&[1, 0, 2, 3]));
    report.zero(
        "first Bianchi identity",
        &sym_project(r, &[1, 2, 3], SymMode::CyclicSum).expect("valid slots"),
    );
    report.zero(
        "four-index cyclic sum",
        &sym_project(r, &[0, 1, 2, 3], SymMode::CyclicSum).expect("valid slots"),
    );
    // w^{kl} R_{lkij}, slots (l, k, i, j) contracted over (1, 0).
    report.zero("trace over first pair", &trace_with(r, omega_inv, 1, 0));
    report
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ricci {
    /// `K_{ij} = w^{kl} R_{likj}`.
    pub k: JetTensor,
    pub report: ValidationReport,
}

pub fn ricci(cd: &CurvatureData, omega_inv: &JetTensor) -> Ricci {
    let r = &cd.r_low;
    // R_{likj}: slots (l, i, k, j); contract l with the first form index, k with the second.
    let k = trace_with(&r.reindex(&[3, 0, 2, 1]), omega_inv, 2, 3);
    let mut report = ValidationReport::new();
    report.equal("Ricci symmetric", &k, &k.reindex(&[1, 0]));
    report.zero("Ricci trace", &trace_with(&k, omega_inv, 1, 0));
    let second = trace_with(r, omega_inv, 2, 3);
    report.equal(
        "second contraction equals twice Ricci",
        &second,
        &k.scale(&Rational::from_integer(2.into())),
    );
    Ricci { k, report }
}

/// Ricci tensor in Darboux coordinates, straight from the lowered symbols:
/// `K_{ij} = w^{kl} d_k G_{lij} - w^{kl} w^{mp} G_{pik} G_{ljm}`.
pub fn ricci_darboux(c: &ChartSpec) -> Result<JetTensor> {
    let n = c.dim();
    if c.omega()
        .data()
        .iter()
        .any(|w| w.terms().any(|(m, _)| m.degree() > 0))
    {
        return Err(Error::Precondition("omega is not constant".into()));
    }
    let order = c.order() - 2;
    let winv = c.omega_inv().at_origin();
    let gam = c.gamma_lower();
    let dg = gam.gradient()?;
    let gt = gam.truncate(order);
    Ok(JetTensor::covariant_from_fn(n, 2, |idx| {
        let (i, j) = (idx[0], idx[1]);
        let mut acc = Jet::zero(n, order);
        for k in 0..n {
            for l in 0..n {
                let w = winv.get(&[k, l]);
                if w.is_zero() {
                    continue;
                }
                acc.add_scaled(dg.get(&[l, i, j, k]), w);
                for m in 0..n {
                    for p in 0..n {
                        let w2 = winv.get(&[m, p]);
                        if w2.is_zero() {
                            continue;
                        }
                        acc.add_scaled_product(gt.get(&[p, i, k]), gt.get(&[l, j, m]), &-(w * w2));
                    }
                }
            }
        }
        acc
    }))
}

/// Both sides of the operator identity `w^{ij} nabla_i nabla_j X = w^{ik} K_{kj} X^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorL {
    pub via_derivatives: JetTensor,
    pub via_ricci: JetTensor,
}

impl OperatorL {
    pub fn agrees(&self) -> bool {
        self.via_derivatives == self.via_ricci
    }
}

pub fn operator_l(c: &ChartSpec, x: &JetTensor) -> Result<OperatorL> {
    let n = c.dim();
    if x.dim() != n || x.variances() != [Variance::Up] {
        return Err(Error::Shape("expected a vector field".into()));
    }
    let dx = c.nabla(x)?;
    let ddx = c.nabla(&dx)?;
    let cd = curvature(c)?;
    let k = ricci(&cd, c.omega_inv()).k;
    let order = ddx.order().min(k.order());
    let winv = c.omega_inv().truncate(order);
    let x = x.truncate(order);
    let zero = Jet::zero(n, order);
    // slots of ddx: (a, inner, outer)
    let lhs = Tensor::from_fn(n, vec![Variance::Up], |idx| {
        let a = idx[0];
        let mut acc = zero.clone();
        for i in 0..n {
            for j in 0..n {
                let w = winv.get(&[i, j]);
                if !w.is_zero() {
                    acc = &acc + &(w * &ddx.get(&[a, j, i]).truncate(order));
                }
            }
        }
        acc
    });
    let rhs = Tensor::from_fn(n, vec![Variance::Up], |idx| {
        let a = idx[0];
        let mut acc = zero.clone();
        for q in 0..n {
            for p in 0..n {
                let kk = k.get(&[q, p]);
                if !kk.is_zero() {
                    acc.add_product(&(winv.get(&[a, q]) * kk), x.get(&[p]));
                }
            }
        }
        acc
    });
    Ok(OperatorL {
        via_derivatives: lhs,
        via_ricci: rhs,
    })
}

/// Ricci tensor together with whether it vanishes to the available order.
pub fn einstein_residual(c: &ChartSpec) -> Result<(JetTensor, bool)> {
    let cd = curvature(c)?;
    let k = ricci(&cd, c.omega_inv()).k;
    let flag = k.is_zero();
    Ok((k, flag))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SectionalKind {
    Elliptic,
    Hyperbolic,
    Degenerate,
    Flat,
}

impl SectionalKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SectionalKind::Elliptic => "elliptic",
            SectionalKind::Hyperbolic => "hyperbolic",
            SectionalKind::Degenerate => "degenerate",
            SectionalKind::Flat => "flat",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SectionalClass {
    pub kind: SectionalKind,
    /// `e11 e22 - e12^2`: `r^2` when elliptic, `-r^2` when hyperbolic.
    pub det_invariant: Rational,
    /// Sign of `r` (elliptic) or of the rank-one form (degenerate).
    pub sign: Option<i8>,
    pub r_numeric: Option<f64>,
    /// `(e11, e12, e22)` after normalizing `omega(X, Y) = 1`.
    pub form: [Rational; 3],
}

fn sign_of(q: &Rational) -> i8 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

fn to_f64(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

/// Classifies the quadratic form `Z -> R(Z, Z, X, Y)` on the plane spanned by `X, Y`.
pub fn sectional_classify(
    r0: &PointTensor,
    omega0: &PointTensor,
    x: &[Rational],
    y: &[Rational],
) -> Result<SectionalClass> {
    let n = omega0.dim();
    if x.len() != n || y.len() != n || r0.dim() != n || r0.rank() != 4 || omega0.rank() != 2 {
        return Err(Error::Shape(
            "plane vectors and tensors must share the dimension".into(),
        ));
    }
    let mut wxy = Rational::zero();
    for i in 0..n {
        for j in 0..n {
            wxy += omega0.get(&[i, j]) * &x[i] * &y[j];
        }
    }
    if wxy.is_zero() {
        return Err(Error::Domain("the plane is isotropic".into()));
    }
    let y: Vec<Rational> = y.iter().map(|v| v / &wxy).collect();
    let eval = |a: &[Rational], b: &[Rational], cc: &[Rational], d: &[Rational]| {
        let mut acc = Rational::zero();
        for (idx, v) in r0.entries() {
            if v.is_zero() {
                continue;
            }
            acc += v * &a[idx[0]] * &b[idx[1]] * &cc[idx[2]] * &d[idx[3]];
        }
        acc
    };
    let e11 = eval(x, x, x, &y);
    let e12 = eval(x, &y, x, &y);
    let e22 = eval(&y, &y, x, &y);
    let det = &e11 * &e22 - &e12 * &e12;
    let (kind, sign, r_numeric) = if det.is_positive() {
        let s = sign_of(&e11);
        (
            SectionalKind::Elliptic,
            Some(s),
            Some(f64::from(s) * libm::sqrt(to_f64(&det))),
        )
    } else if det.is_negative() {
        (
            SectionalKind::Hyperbolic,
            Some(1),
            Some(libm::sqrt(-to_f64(&det))),
        )
    } else if e11.is_zero() && e12.is_zero() && e22.is_zero() {
        (SectionalKind::Flat, None, None)
    } else {
        let s = if e11.is_zero() {
            sign_of(&e22)
        } else {
            sign_of(&e11)
        };
        (SectionalKind::Degenerate, Some(s), None)
    };
    Ok(SectionalClass {
        kind,
        det_invariant: det,
        sign,
        r_numeric,
        form: [e11, e12, e22],
    })
}

/// `R_{ijkl}` at a point as a rational tensor from `w^{-1}`-free data.
pub fn curvature_at_origin(c: &ChartSpec) -> Result<PointTensor> {
    Ok(curvature(c)?.r_low.at_origin())
}
