//! Floating-point cross-checks for the exact pipeline.

use fedosov_core::{Jet, JetTensor};

use crate::expr::Expr;

/// Integrates `x'' = -Gamma^i_{jk}(x) x'^j x'^k` from `x(0) = 0`, `x'(0) = v` to `t = 1` with
/// classical Runge-Kutta; `gamma_up` holds `Gamma^i_{jk}` as jets around the origin.
pub fn geodesic_endpoint(gamma_up: &JetTensor, v: &[f64], steps: usize) -> Vec<f64> {
    let n = v.len();
    let accel = |x: &[f64], p: &[f64]| -> Vec<f64> {
        let g: Vec<f64> = gamma_up
            .data()
            .iter()
            .map(|j: &Jet| j.eval_f64(x))
            .collect();
        (0..n)
            .map(|i| {
                let mut s = 0.0;
                for j in 0..n {
                    for k in 0..n {
                        s += g[(i * n + j) * n + k] * p[j] * p[k];
                    }
                }
                -s
            })
            .collect()
    };
    let mut x = vec![0.0; n];
    let mut p = v.to_vec();
    let h = 1.0 / steps as f64;
    let axpy = |a: &[f64], b: &[f64], s: f64| -> Vec<f64> {
        a.iter().zip(b).map(|(a, b)| a + s * b).collect()
    };
    for _ in 0..steps {
        let k1x = p.clone();
        let k1p = accel(&x, &p);
        let x2 = axpy(&x, &k1x, h / 2.0);
        let p2 = axpy(&p, &k1p, h / 2.0);
        let k2x = p2.clone();
        let k2p = accel(&x2, &p2);
        let x3 = axpy(&x, &k2x, h / 2.0);
        let p3 = axpy(&p, &k2p, h / 2.0);
        let k3x = p3.clone();
        let k3p = accel(&x3, &p3);
        let x4 = axpy(&x, &k3x, h);
        let p4 = axpy(&p, &k3p, h);
        let k4x = p4.clone();
        let k4p = accel(&x4, &p4);
        for i in 0..n {
            x[i] += h / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]);
            p[i] += h / 6.0 * (k1p[i] + 2.0 * k2p[i] + 2.0 * k3p[i] + k4p[i]);
        }
    }
    x
}

/// Largest componentwise difference relative to the largest component of `reference`.
pub fn relative_error(value: &[f64], reference: &[f64]) -> f64 {
    let scale = reference.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let diff = value
        .iter()
        .zip(reference)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

fn invert(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        let p = a[col][col];
        a[col].iter_mut().for_each(|v| *v /= p);
        for r in 0..n {
            if r != col {
                let f = a[r][col];
                if f != 0.0 {
                    for c in 0..2 * n {
                        a[r][c] -= f * a[col][c];
                    }
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// `Gamma^k_{ij}` of the Levi-Civita connection of `metric` at `point` from central
/// differences with step `h`; indexed `[k][i][j]`.
pub fn christoffel_fd(metric: &[Vec<Expr>], point: &[f64], h: f64) -> Option<Vec<Vec<Vec<f64>>>> {
    let n = point.len();
    let g_at = |p: &[f64]| -> Vec<Vec<f64>> {
        metric
            .iter()
            .map(|row| row.iter().map(|e| e.eval_f64(p)).collect())
            .collect()
    };
    let dg: Vec<Vec<Vec<f64>>> = (0..n)
        .map(|k| {
            let mut plus = point.to_vec();
            let mut minus = point.to_vec();
            plus[k] += h;
            minus[k] -= h;
            let (gp, gm) = (g_at(&plus), g_at(&minus));
            (0..n)
                .map(|i| (0..n).map(|j| (gp[i][j] - gm[i][j]) / (2.0 * h)).collect())
                .collect()
        })
        .collect();
    let g_inv = invert(&g_at(point))?;
    Some(
        (0..n)
            .map(|k| {
                (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| {
                                (0..n)
                                    .map(|l| {
                                        0.5 * g_inv[k][l]
                                            * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j])
                                    })
                                    .sum()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect(),
    )
}
