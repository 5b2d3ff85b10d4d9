use std::io::{self, Write};
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{basis_pursuit, gen_signal, measure, omp, BpParams, Method, RecoveryOutcome, SignalModel};
use crate::error::{Error, Result};
use crate::matrix::SensingMatrix;
use crate::seed;

/// OMP stops early once the residual falls below this fraction of ‖y‖.
const OMP_RESIDUAL_TOL: f64 = 1e-10;

/// Row-selection arm of an experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arm {
    /// The constructed index set.
    Deterministic,
    /// m distinct rows drawn uniformly, fresh for every trial.
    Random,
}

impl Arm {
    pub fn name(&self) -> &'static str {
        match self {
            Arm::Deterministic => "deterministic",
            Arm::Random => "random",
        }
    }
}

fn default_success_tol() -> f64 {
    1e-4
}

fn default_arms() -> Vec<Arm> {
    vec![Arm::Deterministic, Arm::Random]
}

fn default_methods() -> Vec<Method> {
    vec![Method::Omp, Method::Bp]
}

/// Success-rate sweep settings, as read from a TOML file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Compact matrix file for the deterministic arm (used by the CLI).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<PathBuf>,
    #[serde(default = "default_arms")]
    pub arms: Vec<Arm>,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    /// Inclusive sparsity range `[k_min, k_max]`.
    pub k_range: [usize; 2],
    pub trials: usize,
    #[serde(default)]
    pub signal_model: SignalModel,
    #[serde(default = "default_success_tol")]
    pub success_tol: f64,
    pub seed: u64,
    #[serde(default)]
    pub bp: BpParams,
}

impl ExperimentConfig {
    pub fn new(k_range: [usize; 2], trials: usize, signal_model: SignalModel, seed: u64) -> Self {
        ExperimentConfig {
            matrix: None,
            arms: default_arms(),
            methods: default_methods(),
            k_range,
            trials,
            signal_model,
            success_tol: default_success_tol(),
            seed,
            bp: BpParams::default(),
        }
    }

    pub fn validate(&self, rows: usize) -> Result<()> {
        let [lo, hi] = self.k_range;
        if lo == 0 || lo > hi {
            return Err(Error::Config(format!("k_range [{lo}, {hi}] is empty or starts at 0")));
        }
        if hi > rows {
            return Err(Error::Config(format!("k_range upper end {hi} exceeds the {rows} measurements")));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.arms.is_empty() || self.methods.is_empty() {
            return Err(Error::Config("need at least one arm and one method".into()));
        }
        if self.success_tol.is_nan() || self.success_tol <= 0.0 {
            return Err(Error::Config("success_tol must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub k: usize,
    pub method: Method,
    pub arm: Arm,
    pub trials: usize,
    pub successes: usize,
    /// Basis-pursuit runs that hit the iteration cap.
    pub non_converged: usize,
}

impl SweepRow {
    pub fn rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

/// Runs `trials` independent recoveries per sparsity, method and arm.
///
/// Trial `t` at sparsity `k` draws its signal and (for the random arm) its
/// rows from seeds derived from `(seed, k, t)`, so results do not depend on
/// scheduling. Rows are ordered by k, then method, then arm.
pub fn run_success_sweep(matrix: &SensingMatrix, config: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    config.validate(matrix.n_rows())?;
    let m = matrix.n_rows();
    let n = matrix.n_cols();
    let combos: Vec<(Method, Arm)> =
        config.methods.iter().flat_map(|&me| config.arms.iter().map(move |&a| (me, a))).collect();
    let mut rows = Vec::new();
    for k in config.k_range[0]..=config.k_range[1] {
        let per_trial: Vec<Vec<(bool, bool)>> = (0..config.trials)
            .into_par_iter()
            .map(|t| -> Result<Vec<(bool, bool)>> {
                let (k64, t64) = (k as u64, t as u64);
                let signal = gen_signal(n, k, config.signal_model, &mut seed::rng(config.seed, &[k64, t64, 0]))?;
                let random = config.arms.contains(&Arm::Random).then(|| {
                    let mut rng = seed::rng(config.seed, &[k64, t64, 1]);
                    SensingMatrix::random_rows(matrix.twiddles().clone(), m, &mut rng)
                });
                combos
                    .iter()
                    .map(|&(method, arm)| {
                        let phi = match arm {
                            Arm::Deterministic => matrix,
                            Arm::Random => random.as_ref().expect("random arm requested"),
                        };
                        let y = measure(phi, &signal)?;
                        let solution = match method {
                            Method::Omp => match omp(phi, &y, k, OMP_RESIDUAL_TOL) {
                                Ok(s) => s,
                                Err(Error::SingularSupport(_)) => return Ok((false, true)),
                                Err(e) => return Err(e),
                            },
                            Method::Bp => basis_pursuit(phi, &y, &config.bp)?,
                        };
                        let converged = solution.converged;
                        Ok((RecoveryOutcome::assess(solution, &signal, config.success_tol).success, converged))
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        for (i, &(method, arm)) in combos.iter().enumerate() {
            let successes = per_trial.iter().filter(|r| r[i].0).count();
            let non_converged = per_trial.iter().filter(|r| !r[i].1).count();
            rows.push(SweepRow { k, method, arm, trials: config.trials, successes, non_converged });
        }
    }
    Ok(rows)
}

/// CSV with columns `k,method,arm,trials,successes,rate`.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut w: W) -> io::Result<()> {
    writeln!(w, "k,method,arm,trials,successes,rate")?;
    for r in rows {
        writeln!(w, "{},{},{},{},{},{:.6}", r.k, r.method.name(), r.arm.name(), r.trials, r.successes, r.rate())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix() -> SensingMatrix {
        let rows = vec![
            1, 3, 47, 67, 103, 204, 244, 275, 332, 351, 449, 456, 465, 466, 470, 494, 507, 519, 562, 588, 610, 649,
            672, 683, 758, 761, 776, 808, 835,
        ];
        SensingMatrix::from_rows(840, rows, 1.0 / 29f64.sqrt()).unwrap()
    }

    #[test]
    fn config_validation() {
        let phi = matrix();
        let base = ExperimentConfig::new([1, 3], 5, SignalModel::ComplexGaussian, 1);
        assert!(base.validate(29).is_ok());
        for bad in [
            ExperimentConfig { k_range: [0, 3], ..base.clone() },
            ExperimentConfig { k_range: [4, 3], ..base.clone() },
            ExperimentConfig { k_range: [1, 30], ..base.clone() },
            ExperimentConfig { trials: 0, ..base.clone() },
            ExperimentConfig { arms: vec![], ..base.clone() },
        ] {
            assert!(matches!(run_success_sweep(&phi, &bad), Err(Error::Config(_))));
        }
    }

    #[test]
    fn config_from_toml() {
        let text = "k_range = [1, 20]\ntrials = 100\nseed = 7\nsignal_model = \"unit_modulus\"\n";
        let c: ExperimentConfig = toml::from_str(text).unwrap();
        assert_eq!(c.k_range, [1, 20]);
        assert_eq!(c.signal_model, SignalModel::UnitModulus);
        assert_eq!(c.success_tol, 1e-4);
        assert_eq!(c.arms, vec![Arm::Deterministic, Arm::Random]);
        assert_eq!(c.bp, BpParams::default());
        let err = toml::from_str::<ExperimentConfig>("k_range = [1, 2]\ntrials = 1\nseed = 1\nbogus = 3\n");
        assert!(err.is_err());
    }

    #[test]
    fn small_sweep_is_reproducible() {
        let phi = matrix();
        let config = ExperimentConfig::new([1, 2], 4, SignalModel::ComplexGaussian, 11);
        let a = run_success_sweep(&phi, &config).unwrap();
        let b = run_success_sweep(&phi, &config).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 2 * 2 * 2);
        assert_eq!((a[0].k, a[0].method, a[0].arm), (1, Method::Omp, Arm::Deterministic));
        assert!(a.iter().all(|r| r.rate() == 1.0), "{a:?}");
        let mut out = Vec::new();
        write_sweep_csv(&a, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("k,method,arm,trials,successes,rate\n1,omp,deterministic,4,4,1.000000\n"));
    }
}
