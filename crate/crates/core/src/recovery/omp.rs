//! Orthogonal matching pursuit with an incrementally grown QR factorization
//! of the selected columns.

use num_complex::Complex64;

use super::{Method, Solution};
use crate::error::{Error, Result};
use crate::matrix::SensingMatrix;

/// Largest tolerated ratio max|R_ii| / min|R_ii|.
pub const MAX_CONDITION: f64 = 1e12;

fn dot(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    // ⟨u, v⟩ = u* v
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Orthogonalizes `col` against the current Q (two Gram-Schmidt passes) and
/// returns the new unit column of Q and the new column of R.
fn extend_qr(
    q_cols: &[Vec<Complex64>],
    r_cols: &[Vec<Complex64>],
    col: Vec<Complex64>,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let col_norm = norm(&col);
    let mut v = col;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); q_cols.len()];
    for _ in 0..2 {
        for (i, qi) in q_cols.iter().enumerate() {
            let c = dot(qi, &v);
            coeffs[i] += c;
            for (vr, qr) in v.iter_mut().zip(qi) {
                *vr -= c * qr;
            }
        }
    }
    let diag = norm(&v);
    let (dmax, dmin) = r_cols
        .iter()
        .map(|c| c.last().unwrap().norm())
        .chain(std::iter::once(diag))
        .fold((0.0f64, f64::INFINITY), |(hi, lo), d| (hi.max(d), lo.min(d)));
    if diag <= col_norm * 1e-14 || dmax / dmin > MAX_CONDITION {
        return Err(Error::SingularSupport(if diag > 0.0 { dmax / dmin } else { f64::INFINITY }));
    }
    v.iter_mut().for_each(|z| *z /= diag);
    coeffs.push(Complex64::new(diag, 0.0));
    Ok((v, coeffs))
}

/// Greedy recovery of a sparse `x` with `Φ x = y`.
///
/// Each iteration picks the column maximizing `|⟨Φ_j, r⟩|`, extends the QR
/// factorization of the selected columns (Gram-Schmidt with one
/// reorthogonalization pass), and refits by least squares. Stops after
/// `k_max` columns or once `‖r‖ < residual_tol · ‖y‖`.
pub fn omp(matrix: &SensingMatrix, y: &[Complex64], k_max: usize, residual_tol: f64) -> Result<Solution> {
    let m = matrix.n_rows();
    if y.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: y.len() });
    }
    if k_max > m {
        return Err(Error::SparsityOutOfRange { k: k_max, max: m });
    }
    let n = matrix.n_cols() as usize;
    let y_norm = norm(y);
    let threshold = residual_tol * y_norm;

    let mut selected: Vec<u64> = Vec::new();
    let mut q_cols: Vec<Vec<Complex64>> = Vec::new();
    // R stored by column: r_cols[k][i] = R[i][k] for i <= k
    let mut r_cols: Vec<Vec<Complex64>> = Vec::new();
    let mut qty: Vec<Complex64> = Vec::new();
    let mut residual = y.to_vec();
    let mut res_norm = y_norm;

    while selected.len() < k_max && res_norm > threshold && res_norm > 0.0 {
        let corr = matrix.apply_adjoint(&residual);
        let (best, best_val) = corr
            .iter()
            .enumerate()
            .filter(|(j, _)| !selected.contains(&(*j as u64)))
            .map(|(j, c)| (j, c.norm()))
            .fold((usize::MAX, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best == usize::MAX || best_val <= 0.0 {
            break;
        }
        debug_assert!(best < n);
        let col = matrix.column(best as u64)?;
        let (v, coeffs) = extend_qr(&q_cols, &r_cols, col)?;
        let proj = dot(&v, &residual);
        for (rr, qr) in residual.iter_mut().zip(&v) {
            *rr -= proj * qr;
        }
        qty.push(dot(&v, y));
        q_cols.push(v);
        r_cols.push(coeffs);
        selected.push(best as u64);
        res_norm = norm(&residual);
    }

    // Back substitution R x = Q* y.
    let k = selected.len();
    let mut coef = vec![Complex64::new(0.0, 0.0); k];
    for i in (0..k).rev() {
        let mut s = qty[i];
        for j in i + 1..k {
            s -= r_cols[j][i] * coef[j];
        }
        coef[i] = s / r_cols[i][i];
    }
    let mut estimate = vec![Complex64::new(0.0, 0.0); n];
    for (&j, &c) in selected.iter().zip(&coef) {
        estimate[j as usize] = c;
    }
    let fitted = matrix.apply_sparse(&selected, &coef);
    let residual_norm = norm(&fitted.iter().zip(y).map(|(a, b)| a - b).collect::<Vec<_>>());
    Ok(Solution { estimate, residual_norm, iterations: k, method: Method::Omp, converged: true })
}
