//! Complex basis pursuit, `min ‖γ‖₁ s.t. Φγ = y`, by ADMM.
//!
//! The affine projection uses the row Gram identity `ΦΦ* = cI`, so
//! `P(v) = v − Φ*(Φv − y)/c` costs one application of Φ and one of Φ*. The
//! other half-step is the modulus soft-threshold `v ↦ v·max(1 − τ/|v|, 0)`.
//!
//! Termination is certified by a duality gap: the scaled dual variable `u`
//! lies in ∂‖·‖₁ at the current iterate, its projection onto range(Φ*) is
//! `Φ*ν` with `ν = Φu/c`, and `ν / max(1, ‖Φ*ν‖∞)` is dual feasible for
//! `max Re⟨ν, y⟩ s.t. ‖Φ*ν‖∞ <= 1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Method, Solution};
use crate::error::{Error, Result};
use crate::matrix::SensingMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BpParams {
    /// ADMM penalty ρ; the threshold is 1/ρ.
    pub rho: f64,
    /// Relative duality-gap tolerance.
    pub gap_tol: f64,
    pub max_iter: usize,
    /// Iterations between gap evaluations.
    pub check_every: usize,
}

impl Default for BpParams {
    fn default() -> Self {
        BpParams { rho: 1.0, gap_tol: 1e-7, max_iter: 50_000, check_every: 10 }
    }
}

fn soft_threshold(v: Complex64, tau: f64) -> Complex64 {
    let r = v.norm();
    if r <= tau {
        Complex64::new(0.0, 0.0)
    } else {
        v * (1.0 - tau / r)
    }
}

fn l1(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).sum()
}

/// Primal objective, dual objective and relative gap at a feasible `x` with
/// scaled dual `u`.
fn duality_gap(matrix: &SensingMatrix, y: &[Complex64], x: &[Complex64], u: &[Complex64], rho: f64) -> (f64, f64) {
    let c = matrix.row_gram_factor();
    let w: Vec<Complex64> = u.iter().map(|z| z * rho).collect();
    let nu: Vec<Complex64> = matrix.apply(&w).into_iter().map(|z| z / c).collect();
    let back = matrix.apply_adjoint(&nu);
    let sup = back.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let dual: f64 = nu.iter().zip(y).map(|(a, b)| (a.conj() * b).re).sum::<f64>() / sup;
    (l1(x), dual)
}

pub fn basis_pursuit(matrix: &SensingMatrix, y: &[Complex64], params: &BpParams) -> Result<Solution> {
    let m = matrix.n_rows();
    if y.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: y.len() });
    }
    let n = matrix.n_cols() as usize;
    let zero = Complex64::new(0.0, 0.0);
    if y.iter().all(|z| *z == zero) {
        return Ok(Solution {
            estimate: vec![zero; n],
            residual_norm: 0.0,
            iterations: 0,
            method: Method::Bp,
            converged: true,
        });
    }
    let c = matrix.row_gram_factor();
    let tau = 1.0 / params.rho;
    let project = |v: &mut Vec<Complex64>| {
        let r: Vec<Complex64> = matrix.apply(v).iter().zip(y).map(|(a, b)| (a - b) / c).collect();
        for (vi, ci) in v.iter_mut().zip(matrix.apply_adjoint(&r)) {
            *vi -= ci;
        }
    };

    // Start from the minimum-norm solution.
    let mut x = vec![zero; n];
    project(&mut x);
    let mut z = x.clone();
    let mut u = vec![zero; n];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < params.max_iter {
        iterations += 1;
        for ((xi, zi), ui) in x.iter_mut().zip(&z).zip(&u) {
            *xi = zi - ui;
        }
        project(&mut x);
        for ((zi, xi), ui) in z.iter_mut().zip(&x).zip(u.iter_mut()) {
            *zi = soft_threshold(xi + *ui, tau);
            *ui += xi - *zi;
        }
        if iterations % params.check_every == 0 {
            let (primal, dual) = duality_gap(matrix, y, &x, &u, params.rho);
            if primal - dual <= params.gap_tol * primal {
                converged = true;
                break;
            }
        }
    }
    let fitted = matrix.apply(&x);
    let residual_norm = fitted.iter().zip(y).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    Ok(Solution { estimate: x, residual_norm, iterations, method: Method::Bp, converged })
}
