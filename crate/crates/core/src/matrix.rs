//! Small dense matrices over the rationals and over jets.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::Rational;

/// Gauss-Jordan inverse of a square rational matrix.
pub fn rational_inverse(m: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return Err(Error::Shape("matrix is not square".into()));
    }
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let mut inv: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::Singular("matrix is not invertible".into()))?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].recip();
        for j in 0..n {
            a[col][j] *= &p;
            inv[col][j] *= &p;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let t = &f * &a[col][j];
                a[r][j] -= t;
                let t = &f * &inv[col][j];
                inv[r][j] -= t;
            }
        }
    }
    Ok(inv)
}

/// Determinant by fraction-exact elimination.
pub fn rational_det(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if pivot != col {
            a.swap(col, pivot);
            det = -det;
        }
        det *= &a[col][col];
        let p = a[col][col].recip();
        for r in (col + 1)..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] * &p;
            for j in col..n {
                let t = &f * &a[col][j];
                a[r][j] -= t;
            }
        }
    }
    det
}

/// Inverse of a square matrix of jets with invertible value at the origin.
///
/// Writes `M = M0 + N` with `N(0) = 0` and sums the Neumann series
/// `(I + P + P^2 + ...) M0^{-1}`, `P = -M0^{-1} N`, which terminates at the jet order.
pub fn jet_matrix_inverse(m: &[Vec<Jet>]) -> Result<Vec<Vec<Jet>>> {
    let n = m.len();
    if n == 0 || m.iter().any(|row| row.len() != n) {
        return Err(Error::Shape("jet matrix is not square".into()));
    }
    let n_vars = m[0][0].n_vars();
    let order = m.iter().flatten().map(Jet::order).min().unwrap_or(0);
    let m0: Vec<Vec<Rational>> = m
        .iter()
        .map(|row| row.iter().map(Jet::constant_term).collect())
        .collect();
    let m0_inv = rational_inverse(&m0)?;
    let c = |x: &Rational| Jet::constant(n_vars, order, x.clone());
    let p: Vec<Vec<Jet>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut acc = Jet::zero(n_vars, order);
                    for k in 0..n {
                        let nkj = &m[k][j] - &c(&m0[k][j]);
                        acc.add_scaled(&nkj, &-&m0_inv[i][k]);
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let identity = |i: usize, j: usize| {
        if i == j {
            Jet::one(n_vars, order)
        } else {
            Jet::zero(n_vars, order)
        }
    };
    let mut s: Vec<Vec<Jet>> = (0..n)
        .map(|i| (0..n).map(|j| identity(i, j)).collect())
        .collect();
    for _ in 0..order {
        let mut next = vec![vec![Jet::zero(n_vars, order); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = identity(i, j);
                for k in 0..n {
                    if !p[i][k].is_zero() && !s[k][j].is_zero() {
                        acc.add_product(&p[i][k], &s[k][j]);
                    }
                }
                next[i][j] = acc;
            }
        }
        s = next;
    }
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut acc = Jet::zero(n_vars, order);
                    for k in 0..n {
                        acc.add_scaled(&s[i][k], &m0_inv[k][j]);
                    }
                    acc
                })
                .collect()
        })
        .collect())
}
