use num_complex::Complex64;
use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SensingMatrix;

/// Distribution of the nonzero coefficients.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalModel {
    /// Real and imaginary parts i.i.d. N(0, 1/2).
    #[default]
    ComplexGaussian,
    /// |β_j| = 1 with uniform phase.
    UnitModulus,
}

/// A k-sparse vector of length N, stored by support.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSignal {
    pub n: u64,
    pub support: Vec<u64>,
    pub values: Vec<Complex64>,
}

impl SparseSignal {
    pub fn sparsity(&self) -> usize {
        self.support.len()
    }

    pub fn to_dense(&self) -> Vec<Complex64> {
        let mut x = vec![Complex64::new(0.0, 0.0); self.n as usize];
        for (&j, &v) in self.support.iter().zip(&self.values) {
            x[j as usize] = v;
        }
        x
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Uniform k-subset support with coefficients drawn from `model`.
pub fn gen_signal<R: Rng + ?Sized>(n: u64, k: usize, model: SignalModel, rng: &mut R) -> Result<SparseSignal> {
    if k == 0 || k as u64 > n {
        return Err(Error::SparsityOutOfRange { k, max: n as usize });
    }
    let mut support: Vec<u64> = index::sample(rng, n as usize, k).into_iter().map(|j| j as u64).collect();
    support.sort_unstable();
    let values = (0..k)
        .map(|_| loop {
            let v = match model {
                SignalModel::ComplexGaussian => {
                    let re: f64 = StandardNormal.sample(rng);
                    let im: f64 = StandardNormal.sample(rng);
                    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
                }
                SignalModel::UnitModulus => Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)),
            };
            if v.norm() > 0.0 {
                break v;
            }
        })
        .collect();
    Ok(SparseSignal { n, support, values })
}

/// Noiseless measurements `y = Φ β`, without forming Φ.
pub fn measure(matrix: &SensingMatrix, signal: &SparseSignal) -> Result<Vec<Complex64>> {
    if signal.n != matrix.n_cols() {
        return Err(Error::DimensionMismatch { expected: matrix.n_cols() as usize, got: signal.n as usize });
    }
    Ok(matrix.apply_sparse(&signal.support, &signal.values))
}
