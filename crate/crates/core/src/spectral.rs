//! Extreme eigenvalues of column-subset Gram matrices `G = Φ_T* Φ_T`.

use std::io::{self, Write};

use num_complex::Complex64;
use rand::seq::index;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::SensingMatrix;
use crate::recovery::Arm;
use crate::seed;

/// Slack on the Gershgorin envelope `1 ± (k − 1)μ`.
pub const ENVELOPE_TOL: f64 = 1e-6;
const HERMITIAN_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 64;

/// `G[u][v] = ⟨Φ_{T_v}, Φ_{T_u}⟩`, i.e. the (u, v) entry of `Φ_T* Φ_T`.
pub fn gram(matrix: &SensingMatrix, t: &[u64]) -> Result<Vec<Vec<Complex64>>> {
    for (i, &a) in t.iter().enumerate() {
        if t[..i].contains(&a) {
            return Err(Error::DuplicateColumn(a));
        }
    }
    t.iter().map(|&u| t.iter().map(|&v| matrix.column_inner(v, u)).collect()).collect()
}

/// Same as [`gram`] but reading entries from a precomputed offset profile.
pub fn gram_from_profile(profile: &[Complex64], t: &[u64]) -> Vec<Vec<Complex64>> {
    let n = profile.len() as u64;
    t.iter().map(|&u| t.iter().map(|&v| profile[((v + n - u) % n) as usize]).collect()).collect()
}

fn frobenius(a: &[Vec<Complex64>]) -> f64 {
    a.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn off_diagonal(a: &[Vec<Complex64>]) -> f64 {
    let mut s = 0.0;
    for (i, row) in a.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            if i != j {
                s += z.norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigenvalues of a Hermitian matrix, ascending, by cyclic complex Jacobi
/// rotations. Stops once the off-diagonal mass is below 1e-12·‖G‖_F.
pub fn hermitian_eigs(g: &[Vec<Complex64>]) -> Result<Vec<f64>> {
    let k = g.len();
    if let Some(row) = g.iter().find(|r| r.len() != k) {
        return Err(Error::DimensionMismatch { expected: k, got: row.len() });
    }
    let scale = frobenius(g).max(1.0);
    let worst = g
        .iter()
        .enumerate()
        .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, z)| (z - g[j][i].conj()).norm()))
        .fold(0.0, f64::max);
    if worst > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian(worst));
    }

    let mut a = g.to_vec();
    let target = 1e-12 * frobenius(g);
    for _ in 0..MAX_SWEEPS {
        if off_diagonal(&a) <= target {
            break;
        }
        for p in 0..k {
            for q in p + 1..k {
                let apq = a[p][q];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let phase = apq / r;
                let theta = (a[q][q].re - a[p][p].re) / (2.0 * r);
                let t = if theta == 0.0 { 1.0 } else { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // U = diag(1, conj(phase)) · [[c, s], [−s, c]] on coordinates p, q.
                let (upp, upq) = (Complex64::new(c, 0.0), Complex64::new(s, 0.0));
                let (uqp, uqq) = (-phase.conj() * s, phase.conj() * c);
                for row in a.iter_mut() {
                    let (x, y) = (row[p], row[q]);
                    row[p] = x * upp + y * uqp;
                    row[q] = x * upq + y * uqq;
                }
                let (head, tail) = a.split_at_mut(q);
                for (x, y) in head[p].iter_mut().zip(tail[0].iter_mut()) {
                    (*x, *y) = (upp.conj() * *x + uqp.conj() * *y, upq.conj() * *x + uqq.conj() * *y);
                }
                a[p][q] = Complex64::new(0.0, 0.0);
                a[q][p] = Complex64::new(0.0, 0.0);
                a[p][p].im = 0.0;
                a[q][q].im = 0.0;
            }
        }
    }
    let mut eigs: Vec<f64> = (0..k).map(|i| a[i][i].re).collect();
    eigs.sort_by(f64::total_cmp);
    Ok(eigs)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigStatsRow {
    pub k: usize,
    pub arm: Arm,
    pub samples: usize,
    pub min_eig_min: f64,
    pub min_eig_mean: f64,
    pub max_eig_mean: f64,
    pub max_eig_max: f64,
    /// Samples with an eigenvalue outside `1 ± (k − 1)μ` by more than
    /// [`ENVELOPE_TOL`].
    pub envelope_violations: usize,
    /// The μ used for the envelope.
    pub mu: f64,
}

impl EigStatsRow {
    pub fn spread(&self) -> f64 {
        self.max_eig_max - self.min_eig_min
    }
}

/// Draws `samples` uniform k-subsets per k and records extreme eigenvalues.
///
/// The random arm uses one matrix of the same shape, with rows drawn once
/// from `seed`; each arm's envelope uses that matrix's own coherence.
pub fn run_eig_sweep(
    matrix: &SensingMatrix,
    k_range: [usize; 2],
    samples: usize,
    arms: &[Arm],
    seed: u64,
) -> Result<Vec<EigStatsRow>> {
    let n = matrix.n_cols() as usize;
    let [lo, hi] = k_range;
    if lo == 0 || lo > hi || hi > n {
        return Err(Error::Config(format!("k_range [{lo}, {hi}] must satisfy 1 <= k_min <= k_max <= {n}")));
    }
    if samples == 0 {
        return Err(Error::Config("samples must be at least 1".into()));
    }
    let mut out = Vec::new();
    for &arm in arms {
        let phi = match arm {
            Arm::Deterministic => matrix.clone(),
            Arm::Random => SensingMatrix::random_rows(
                matrix.twiddles().clone(),
                matrix.n_rows(),
                &mut seed::rng(seed, &[u64::MAX]),
            ),
        };
        let profile = phi.inner_profile();
        let mu = profile[1..].iter().map(|z| z.norm()).fold(0.0, f64::max);
        let arm_tag = match arm {
            Arm::Deterministic => 0,
            Arm::Random => 1,
        };
        for k in lo..=hi {
            let extremes: Vec<(f64, f64)> = (0..samples)
                .into_par_iter()
                .map(|s| {
                    let mut rng = seed::rng(seed, &[k as u64, s as u64, arm_tag]);
                    let t: Vec<u64> = index::sample(&mut rng, n, k).into_iter().map(|j| j as u64).collect();
                    let eigs = hermitian_eigs(&gram_from_profile(&profile, &t))?;
                    Ok((eigs[0], eigs[k - 1]))
                })
                .collect::<Result<_>>()?;
            let radius = (k as f64 - 1.0) * mu + ENVELOPE_TOL;
            let envelope_violations =
                extremes.iter().filter(|&&(lo, hi)| lo < 1.0 - radius || hi > 1.0 + radius).count();
            let count = samples as f64;
            out.push(EigStatsRow {
                k,
                arm,
                samples,
                min_eig_min: extremes.iter().map(|e| e.0).fold(f64::INFINITY, f64::min),
                min_eig_mean: extremes.iter().map(|e| e.0).sum::<f64>() / count,
                max_eig_mean: extremes.iter().map(|e| e.1).sum::<f64>() / count,
                max_eig_max: extremes.iter().map(|e| e.1).fold(f64::NEG_INFINITY, f64::max),
                envelope_violations,
                mu,
            });
        }
    }
    Ok(out)
}

/// CSV with columns `k,samples,min_min,min_mean,max_mean,max_max,arm`.
pub fn write_eig_csv<W: Write>(rows: &[EigStatsRow], mut w: W) -> io::Result<()> {
    writeln!(w, "k,samples,min_min,min_mean,max_mean,max_max,arm")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{:.12},{:.12},{:.12},{:.12},{}",
            r.k,
            r.samples,
            r.min_eig_min,
            r.min_eig_mean,
            r.max_eig_mean,
            r.max_eig_max,
            r.arm.name()
        )?;
    }
    Ok(())
}
