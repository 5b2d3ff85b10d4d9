//! Sparse recovery: signal generation, OMP, basis pursuit, and the success-rate
//! experiment comparing deterministic and random row selections.

mod bp;
mod omp;
mod signal;
mod sweep;

pub use bp::{basis_pursuit, BpParams};
pub use omp::{omp, MAX_CONDITION};
pub use signal::{gen_signal, measure, SignalModel, SparseSignal};
pub use sweep::{run_success_sweep, write_sweep_csv, Arm, ExperimentConfig, SweepRow};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Omp,
    Bp,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Omp => "omp",
            Method::Bp => "bp",
        }
    }
}

/// Raw solver output.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub estimate: Vec<Complex64>,
    /// ‖Φ·estimate − y‖₂
    pub residual_norm: f64,
    pub iterations: usize,
    pub method: Method,
    /// False when basis pursuit hit its iteration cap before the gap tolerance.
    pub converged: bool,
}

/// A solution judged against the true signal.
#[derive(Clone, Debug, PartialEq)]
pub struct RecoveryOutcome {
    pub solution: Solution,
    pub relative_error: f64,
    pub success: bool,
}

impl RecoveryOutcome {
    pub fn assess(solution: Solution, truth: &SparseSignal, success_tol: f64) -> Self {
        let relative_error = relative_error(&solution.estimate, truth);
        RecoveryOutcome { success: relative_error < success_tol, relative_error, solution }
    }
}

/// ‖x − β‖₂ / ‖β‖₂.
pub fn relative_error(estimate: &[Complex64], truth: &SparseSignal) -> f64 {
    let diff: f64 = estimate.iter().zip(truth.to_dense()).map(|(e, b)| (e - b).norm_sqr()).sum();
    diff.sqrt() / truth.norm()
}
