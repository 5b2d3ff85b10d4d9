//! Partial Fourier sensing matrices `Φ = scale · F_M^(N)` generated on demand
//! from `(N, M, scale)`, with coherence and AMUB certification.
//!
//! Entry `(r, j)` is `scale · exp(2πi · j · m_r / N)`. The inner product of
//! two columns, `⟨Φ_j, Φ_k⟩ = Σ_r Φ(r, j) · conj(Φ(r, k))`, depends only on
//! `(j − k) mod N`; most routines work from that profile.

use std::io::{self, Write};
use std::sync::Arc;

use num_complex::Complex64;
use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::index::{AmubPartition, IndexSet, Variant};

/// Largest N accepted by [`SensingMatrix::coherence_bruteforce`].
pub const BRUTEFORCE_CAP: u64 = 10_000;
/// Largest N accepted by [`SensingMatrix::coherence_fft`].
pub const FFT_CAP: u64 = 1_000_000;

/// `exp(2πi k / N)` for `k` in `[0, N)`.
#[derive(Debug)]
pub struct Twiddles {
    table: Vec<Complex64>,
}

impl Twiddles {
    pub fn new(n: u64) -> Self {
        let step = std::f64::consts::TAU / n as f64;
        let table = (0..n)
            .map(|k| {
                let (s, c) = (step * k as f64).sin_cos();
                Complex64::new(c, s)
            })
            .collect();
        Twiddles { table }
    }

    pub fn len(&self) -> u64 {
        self.table.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// `exp(2πi k / N)` for any `k`.
    #[inline]
    pub fn get(&self, k: u64) -> Complex64 {
        self.table[(k % self.len()) as usize]
    }

    /// `exp(2πi · a · m / N)` with the product reduced exactly.
    #[inline]
    pub fn of_product(&self, a: u64, m: u64) -> Complex64 {
        let n = self.len() as u128;
        self.table[((a as u128 * m as u128) % n) as usize]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoherenceReport {
    pub mu: f64,
    pub argmax_pair: (u64, u64),
    pub welch: f64,
    /// Theoretical upper bound for constructed matrices: (n − 1)/√q, or
    /// (√q + 1)/(q + 1) for the AMUB variant.
    pub bound: Option<f64>,
    /// Largest k with μ < 1/(2k − 1).
    pub k_max: u64,
}

/// Largest k with `mu < 1/(2k − 1)`, i.e. `ceil((1/mu + 1)/2) − 1`.
pub fn recoverable_sparsity(mu: f64) -> u64 {
    if mu <= 0.0 {
        return u64::MAX;
    }
    (((1.0 / mu + 1.0) / 2.0).ceil() as u64).saturating_sub(1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AmubReport {
    pub pass: bool,
    /// Largest `|G − I|` entry over all block Gram matrices.
    pub max_block_deviation: f64,
    pub cross_min: f64,
    pub cross_max: f64,
    pub cross_pairs: u64,
    pub lower: f64,
    pub upper: f64,
    /// First offending column pair and its inner-product modulus.
    pub violation: Option<(u64, u64, f64)>,
}

pub const AMUB_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct SensingMatrix {
    rows: Vec<u64>,
    scale: f64,
    twiddles: Arc<Twiddles>,
    index_set: Option<IndexSet>,
}

impl SensingMatrix {
    /// `Φ = F_M^(N) / √|M|`, which gives 1/√q for the full and quotient
    /// constructions and 1/√(q + 1) for the AMUB one.
    pub fn from_index_set(set: &IndexSet) -> Self {
        let twiddles = Arc::new(Twiddles::new(set.ambient()));
        SensingMatrix {
            rows: set.indices().to_vec(),
            scale: 1.0 / (set.len() as f64).sqrt(),
            twiddles,
            index_set: Some(set.clone()),
        }
    }

    pub fn from_rows(n: u64, rows: Vec<u64>, scale: f64) -> Result<Self> {
        Self::with_twiddles(Arc::new(Twiddles::new(n)), rows, scale)
    }

    /// Shares a twiddle table between matrices of the same width.
    pub fn with_twiddles(twiddles: Arc<Twiddles>, rows: Vec<u64>, scale: f64) -> Result<Self> {
        let n = twiddles.len();
        if let Some(&bad) = rows.iter().find(|&&r| r >= n) {
            return Err(Error::IndexOutOfRange { index: bad, dim: n });
        }
        Ok(SensingMatrix { rows, scale, twiddles, index_set: None })
    }

    /// `m` distinct rows of `F^(N)` drawn uniformly, scaled by 1/√m.
    pub fn random_rows<R: Rng + ?Sized>(twiddles: Arc<Twiddles>, m: usize, rng: &mut R) -> Self {
        let n = twiddles.len() as usize;
        let mut rows: Vec<u64> = index::sample(rng, n, m).into_iter().map(|r| r as u64).collect();
        rows.sort_unstable();
        SensingMatrix { rows, scale: 1.0 / (m as f64).sqrt(), twiddles, index_set: None }
    }

    pub fn n_cols(&self) -> u64 {
        self.twiddles.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn twiddles(&self) -> &Arc<Twiddles> {
        &self.twiddles
    }

    pub fn index_set(&self) -> Option<&IndexSet> {
        self.index_set.as_ref()
    }

    /// `c` in the row Gram identity `Φ Φ* = c I`, namely `N · scale²`.
    pub fn row_gram_factor(&self) -> f64 {
        self.n_cols() as f64 * self.scale * self.scale
    }

    fn check_col(&self, j: u64) -> Result<()> {
        if j >= self.n_cols() {
            return Err(Error::IndexOutOfRange { index: j, dim: self.n_cols() });
        }
        Ok(())
    }

    #[inline]
    pub fn entry(&self, r: usize, j: u64) -> Complex64 {
        self.twiddles.of_product(j, self.rows[r]) * self.scale
    }

    pub fn column(&self, j: u64) -> Result<Vec<Complex64>> {
        self.check_col(j)?;
        Ok((0..self.n_rows()).map(|r| self.entry(r, j)).collect())
    }

    /// Inner product at column offset `d = (j − k) mod N`.
    pub fn inner_at_offset(&self, d: u64) -> Complex64 {
        let s: Complex64 = self.rows.iter().map(|&m| self.twiddles.of_product(d, m)).sum();
        s * (self.scale * self.scale)
    }

    pub fn column_inner(&self, j: u64, k: u64) -> Result<Complex64> {
        self.check_col(j)?;
        self.check_col(k)?;
        let n = self.n_cols();
        Ok(self.inner_at_offset((j + n - k) % n))
    }

    /// Inner products for every offset `d` in `[0, N)`.
    pub fn inner_profile(&self) -> Vec<Complex64> {
        (0..self.n_cols()).into_par_iter().map(|d| self.inner_at_offset(d)).collect()
    }

    /// `Φ x` for a dense `x` of length N.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len() as u64, self.n_cols());
        let n = self.n_cols();
        let tw = &self.twiddles.table;
        self.rows
            .iter()
            .map(|&m| {
                let mut idx = 0u64;
                let mut acc = Complex64::new(0.0, 0.0);
                for &xj in x {
                    acc += tw[idx as usize] * xj;
                    idx += m;
                    if idx >= n {
                        idx -= n;
                    }
                }
                acc * self.scale
            })
            .collect()
    }

    /// `Φ x` for `x` supported on `support`.
    pub fn apply_sparse(&self, support: &[u64], values: &[Complex64]) -> Vec<Complex64> {
        self.rows
            .iter()
            .map(|&m| {
                let acc: Complex64 =
                    support.iter().zip(values).map(|(&j, &v)| self.twiddles.of_product(j, m) * v).sum();
                acc * self.scale
            })
            .collect()
    }

    /// `Φ* y`.
    pub fn apply_adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(y.len(), self.n_rows());
        let n = self.n_cols();
        let tw = &self.twiddles.table;
        let mut out = vec![Complex64::new(0.0, 0.0); n as usize];
        for (&m, &yr) in self.rows.iter().zip(y) {
            let mut idx = 0u64;
            for o in out.iter_mut() {
                *o += tw[idx as usize].conj() * yr;
                idx += m;
                if idx >= n {
                    idx -= n;
                }
            }
        }
        let s = self.scale;
        out.iter_mut().for_each(|o| *o *= s);
        out
    }

    /// Welch lower bound √((N − m)/((N − 1) m)).
    pub fn welch(&self) -> f64 {
        let n = self.n_cols() as f64;
        let m = self.n_rows() as f64;
        if self.n_cols() < 2 {
            return 0.0;
        }
        ((n - m) / ((n - 1.0) * m)).max(0.0).sqrt()
    }

    fn theoretical_bound(&self) -> Option<f64> {
        let set = self.index_set.as_ref()?;
        let q = set.params().q() as f64;
        Some(match set.variant() {
            Variant::Amub => (q.sqrt() + 1.0) / (q + 1.0),
            _ => (f64::from(set.params().n()) - 1.0) / q.sqrt(),
        })
    }

    fn report(&self, mu: f64, d: u64) -> CoherenceReport {
        CoherenceReport {
            mu,
            argmax_pair: (d, 0),
            welch: self.welch(),
            bound: self.theoretical_bound(),
            k_max: recoverable_sparsity(mu),
        }
    }

    /// Exact μ from the offset profile, O(N·m).
    pub fn coherence_bruteforce(&self) -> Result<CoherenceReport> {
        let n = self.n_cols();
        if n > BRUTEFORCE_CAP {
            return Err(Error::Precondition(format!("N <= {BRUTEFORCE_CAP} for brute-force coherence")));
        }
        let (mu, d) = (1..n).into_par_iter().map(|d| (self.inner_at_offset(d).norm(), d)).reduce(|| (0.0, 0), pick_max);
        Ok(self.report(mu, d))
    }

    /// μ from one length-N DFT of the row indicator vector.
    pub fn coherence_fft(&self) -> Result<CoherenceReport> {
        let n = self.n_cols();
        if n > FFT_CAP {
            return Err(Error::Precondition(format!("N <= {FFT_CAP} for FFT coherence")));
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); n as usize];
        for &m in &self.rows {
            buf[m as usize] += 1.0;
        }
        FftPlanner::new().plan_fft_forward(n as usize).process(&mut buf);
        let s2 = self.scale * self.scale;
        // The forward transform uses exp(−2πi d m / N), so frequency N − d
        // carries offset d; moduli agree.
        let (mu, d) = (1..n).map(|d| (buf[(n - d) as usize].norm() * s2, d)).fold((0.0, 0), pick_max);
        Ok(self.report(mu, d))
    }

    /// Dense m × N export.
    pub fn dense(&self) -> Vec<Vec<Complex64>> {
        (0..self.n_rows()).map(|r| (0..self.n_cols()).map(|j| self.entry(r, j)).collect()).collect()
    }

    /// Dense CSV: header `c0,…,c{N-1}`, one line per row, entries `re±imi`
    /// with 17 significant digits.
    pub fn write_dense_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let header: Vec<String> = (0..self.n_cols()).map(|j| format!("c{j}")).collect();
        writeln!(w, "{}", header.join(","))?;
        for row in self.dense() {
            let line: Vec<String> = row.iter().map(|z| format_complex(*z)).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }
}

pub fn format_complex(z: Complex64) -> String {
    format!("{:.16e}{:+.16e}i", z.re, z.im)
}

// Max modulus, ties to the smaller offset; offset 0 marks "no candidate".
fn pick_max(a: (f64, u64), b: (f64, u64)) -> (f64, u64) {
    if a.1 == 0 {
        return b;
    }
    if b.1 == 0 {
        return a;
    }
    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

/// Certifies block unitarity and the cross-block modulus window
/// `[(√q − 1)/(q + 1), (√q + 1)/(q + 1)]`, both within [`AMUB_TOL`].
pub fn certify_amub(matrix: &SensingMatrix, partition: &AmubPartition) -> Result<AmubReport> {
    let set = matrix.index_set().ok_or(Error::NotAmub)?;
    if set.variant() != Variant::Amub || set.params().q() != partition.q() {
        return Err(Error::NotAmub);
    }
    let n = matrix.n_cols();
    let profile = matrix.inner_profile();
    let inner = |j: u64, k: u64| profile[((j + n - k) % n) as usize];

    let max_block_deviation = partition
        .blocks()
        .par_iter()
        .map(|block| {
            let mut worst = 0.0f64;
            for (u, &j) in block.iter().enumerate() {
                for (v, &k) in block.iter().enumerate() {
                    let target = if u == v { 1.0 } else { 0.0 };
                    worst = worst.max((inner(j, k) - target).norm());
                }
            }
            worst
        })
        .reduce(|| 0.0, f64::max);

    let q = partition.q() as f64;
    let lower = (q.sqrt() - 1.0) / (q + 1.0);
    let upper = (q.sqrt() + 1.0) / (q + 1.0);
    let (cross_min, cross_max, cross_pairs, violation) = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut acc = (f64::INFINITY, 0.0f64, 0u64, None);
            for k in j + 1..n {
                if partition.block_of(j) == partition.block_of(k) {
                    continue;
                }
                let v = inner(j, k).norm();
                acc.0 = acc.0.min(v);
                acc.1 = acc.1.max(v);
                acc.2 += 1;
                if acc.3.is_none() && (v < lower - AMUB_TOL || v > upper + AMUB_TOL) {
                    acc.3 = Some((j, k, v));
                }
            }
            acc
        })
        .reduce(
            || (f64::INFINITY, 0.0, 0, None),
            |a, b| {
                let violation = match (a.3, b.3) {
                    (Some(x), Some(y)) => Some(if (x.0, x.1) <= (y.0, y.1) { x } else { y }),
                    (x, y) => x.or(y),
                };
                (a.0.min(b.0), a.1.max(b.1), a.2 + b.2, violation)
            },
        );
    Ok(AmubReport {
        pass: max_block_deviation <= AMUB_TOL && violation.is_none(),
        max_block_deviation,
        cross_min,
        cross_max,
        cross_pairs,
        lower,
        upper,
        violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldParams;
    use crate::index::{build_amub, build_full, build_quotient};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn example_one() -> SensingMatrix {
        let f = FieldParams::new(29, 1, 2, Some(&[2, 0, 1])).unwrap();
        let g = f.element(&[1, 1]).unwrap();
        let alpha = f.element(&[0, 28]).unwrap();
        SensingMatrix::from_index_set(&build_full(&f, &g, &alpha).unwrap())
    }

    fn example_two() -> SensingMatrix {
        let f = FieldParams::new(19, 1, 3, Some(&[1, 1, 0, 1])).unwrap();
        let g = f.element(&[0, 2, 1]).unwrap();
        SensingMatrix::from_index_set(&build_quotient(&f, &g, &f.x(), 1).unwrap())
    }

    fn dot(u: &[Complex64], v: &[Complex64]) -> Complex64 {
        u.iter().zip(v).map(|(a, b)| a * b.conj()).sum()
    }

    #[test]
    fn columns_have_unit_norm_and_match_inner() {
        let phi = example_one();
        for j in [0u64, 1, 17, 839] {
            let c = phi.column(j).unwrap();
            assert!((dot(&c, &c).re - 1.0).abs() < 1e-12);
            assert!((phi.column_inner(j, j).unwrap() - 1.0).norm() < 1e-12);
        }
        let (cj, ck) = (phi.column(5).unwrap(), phi.column(300).unwrap());
        assert!((dot(&cj, &ck) - phi.column_inner(5, 300).unwrap()).norm() < 1e-12);
        assert!(phi.column(840).is_err());
        assert!(phi.column_inner(0, 840).is_err());
    }

    #[test]
    fn inner_products_follow_the_quadratic_identities() {
        let phi = example_one();
        let q = 29f64;
        for (j, k) in [(28u64, 0u64), (56, 0), (100, 72), (1, 0), (5, 3), (700, 11)] {
            let v = phi.column_inner(j, k).unwrap().norm();
            let expected = if (j - k) % 28 == 0 { 1.0 / q } else { 1.0 / q.sqrt() };
            assert!((v - expected).abs() < 1e-12, "({j},{k}): {v}");
        }
    }

    #[test]
    fn inner_is_shift_invariant() {
        let phi = example_two();
        let n = phi.n_cols();
        for (j, k, s) in [(3u64, 9u64, 100u64), (380, 0, 7), (17, 17, 300), (200, 5, 380)] {
            let a = phi.column_inner(j, k).unwrap();
            let b = phi.column_inner((j + s) % n, (k + s) % n).unwrap();
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn row_gram_identity() {
        for phi in [example_one(), example_two()] {
            let dense = phi.dense();
            let c = phi.row_gram_factor();
            for (r, u) in dense.iter().enumerate() {
                for (s, v) in dense.iter().enumerate() {
                    let expected = if r == s { c } else { 0.0 };
                    assert!((dot(u, v) - expected).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn adjoint_matches_dense() {
        let phi = example_two();
        let dense = phi.dense();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x: Vec<Complex64> = (0..phi.n_cols()).map(|_| Complex64::new(rng.random(), rng.random())).collect();
        let y: Vec<Complex64> = (0..phi.n_rows()).map(|_| Complex64::new(rng.random(), rng.random())).collect();
        let ax = phi.apply(&x);
        for (r, row) in dense.iter().enumerate() {
            let direct: Complex64 = row.iter().zip(&x).map(|(a, b)| a * b).sum();
            assert!((direct - ax[r]).norm() < 1e-10);
        }
        let aty = phi.apply_adjoint(&y);
        for j in 0..phi.n_cols() as usize {
            let direct: Complex64 = dense.iter().zip(&y).map(|(row, yr)| row[j].conj() * yr).sum();
            assert!((direct - aty[j]).norm() < 1e-10);
        }
        let support = [4u64, 99, 250];
        let values = [Complex64::new(1.0, -2.0), Complex64::new(0.5, 0.0), Complex64::new(0.0, 3.0)];
        let mut dense_x = vec![Complex64::new(0.0, 0.0); phi.n_cols() as usize];
        for (&j, &v) in support.iter().zip(&values) {
            dense_x[j as usize] = v;
        }
        let a = phi.apply(&dense_x);
        let b = phi.apply_sparse(&support, &values);
        assert!(a.iter().zip(&b).all(|(u, v)| (u - v).norm() < 1e-12));
    }

    #[test]
    fn coherence_example_one() {
        let phi = example_one();
        let r = phi.coherence_bruteforce().unwrap();
        assert!((r.mu - 1.0 / 29f64.sqrt()).abs() < 1e-9);
        assert!((r.welch - (811.0f64 / 24331.0).sqrt()).abs() < 1e-12);
        assert!((r.welch - 0.18257).abs() < 1e-5);
        assert_eq!(r.k_max, 3);
        assert!((r.bound.unwrap() - 1.0 / 29f64.sqrt()).abs() < 1e-15);
        let f = phi.coherence_fft().unwrap();
        assert!((f.mu - r.mu).abs() < 1e-9);
    }

    #[test]
    fn coherence_fft_matches_bruteforce() {
        let phi = example_two();
        let a = phi.coherence_bruteforce().unwrap();
        let b = phi.coherence_fft().unwrap();
        assert!((a.mu - b.mu).abs() < 1e-9);
        assert!(a.mu <= 2.0 / 19f64.sqrt() + 1e-9);
        assert!(a.welch <= a.mu);
    }

    #[test]
    fn degenerate_single_row() {
        let phi = SensingMatrix::from_rows(12, vec![0], 1.0).unwrap();
        let r = phi.coherence_fft().unwrap();
        assert!((r.mu - 1.0).abs() < 1e-12);
        assert_eq!(r.k_max, 0);
        assert!((phi.coherence_bruteforce().unwrap().mu - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sparsity_bound_formula() {
        assert_eq!(recoverable_sparsity(1.0 / 29f64.sqrt()), 3);
        assert_eq!(recoverable_sparsity(0.2), 2); // 0.2 < 1/3 but not < 1/5
        assert_eq!(recoverable_sparsity(0.19), 3);
        assert_eq!(recoverable_sparsity(1.0), 0);
        assert_eq!(recoverable_sparsity(0.99), 1);
    }

    #[test]
    fn random_rows_are_distinct() {
        let tw = Arc::new(Twiddles::new(840));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let phi = SensingMatrix::random_rows(tw, 29, &mut rng);
        assert_eq!(phi.n_rows(), 29);
        assert!(phi.rows().windows(2).all(|w| w[0] < w[1]));
        assert!((phi.row_gram_factor() - 840.0 / 29.0).abs() < 1e-12);
    }

    #[test]
    fn amub_small_field() {
        let f = FieldParams::new(5, 1, 2, None).unwrap();
        let g = f.find_primitive_root().unwrap();
        let (set, part) = build_amub(&f, &g, &f.x()).unwrap();
        let phi = SensingMatrix::from_index_set(&set);
        let r = certify_amub(&phi, &part).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.max_block_deviation < 1e-12);
        assert_eq!(r.cross_pairs, 24 * 23 / 2 - 4 * 6 * 5 / 2);
        assert!((phi.column_inner(3, 3).unwrap() - 1.0).norm() < 1e-12);
        // wrong kind of matrix
        assert_eq!(certify_amub(&example_one(), &AmubPartition::new(29)), Err(Error::NotAmub));
    }

    #[test]
    fn dense_csv_format() {
        let phi = SensingMatrix::from_rows(2, vec![1], 1.0).unwrap();
        let mut out = Vec::new();
        phi.write_dense_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "c0,c1");
        assert!(lines[1].starts_with("1.0000000000000000e0+0.0000000000000000e0i,-1.0000000000000000e0"));
        assert!(text.ends_with('\n'));
    }
}
