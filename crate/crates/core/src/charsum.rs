//! Katz sums `S(a) = Σ_{t ∈ GF(q)} χ_a(t − α)` with
//! `χ_a(u) = exp(2πi · a · log_g u / (q^n − 1))`, evaluated from the full index
//! set, and certification of their exact values (n = 2) and bound (n >= 2).

use std::io::{self, Write};
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldParams};
use crate::index::{build_full, IndexSet, Variant};
use crate::matrix::Twiddles;

/// Character sweeps above this many characters are sampled instead.
pub const EXHAUSTIVE_CAP: u64 = 1_000_000;
pub const SAMPLED_CHARACTERS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadraticCase {
    /// (q − 1) ∤ a: |S(a)| = √q.
    ExactSqrtQ,
    /// (q − 1) | a: S(a) = −1.
    ExactMinusOne,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KatzSumReport {
    pub a: u64,
    pub value: Complex64,
    pub modulus: f64,
    /// (n − 1)√q
    pub bound: f64,
    pub quadratic_case: Option<QuadraticCase>,
}

impl KatzSumReport {
    pub fn passes_bound(&self, eps: f64) -> bool {
        self.modulus <= self.bound + eps
    }

    /// Distance from the exact quadratic value, if n = 2.
    pub fn quadratic_deviation(&self, q: f64) -> Option<f64> {
        self.quadratic_case.map(|case| match case {
            QuadraticCase::ExactSqrtQ => (self.modulus - q.sqrt()).abs(),
            QuadraticCase::ExactMinusOne => (self.value + 1.0).norm(),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticCertificate {
    pub pass: bool,
    pub characters: u64,
    pub max_deviation: f64,
    pub worst_a: u64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundCertificate {
    pub pass: bool,
    pub exhaustive: bool,
    pub characters: u64,
    pub bound: f64,
    pub max_modulus: f64,
    pub worst_a: u64,
    /// Counts of |S(a)| in equal-width bins over [0, bound]; the last bin
    /// also collects anything above the bound.
    pub histogram: Vec<u64>,
    pub reports: Vec<KatzSumReport>,
}

pub const HISTOGRAM_BINS: usize = 20;

/// Neumaier-compensated complex accumulator.
#[derive(Default, Clone, Copy)]
struct CompensatedSum {
    re: (f64, f64),
    im: (f64, f64),
}

fn neumaier(acc: &mut (f64, f64), x: f64) {
    let t = acc.0 + x;
    if acc.0.abs() >= x.abs() {
        acc.1 += (acc.0 - t) + x;
    } else {
        acc.1 += (x - t) + acc.0;
    }
    acc.0 = t;
}

impl CompensatedSum {
    fn add(&mut self, z: Complex64) {
        neumaier(&mut self.re, z.re);
        neumaier(&mut self.im, z.im);
    }

    fn value(&self) -> Complex64 {
        Complex64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

/// Evaluator for all characters of one (field, g, α).
#[derive(Clone, Debug)]
pub struct KatzSums {
    set: IndexSet,
    twiddles: Arc<Twiddles>,
}

impl KatzSums {
    pub fn new(params: &FieldParams, g: &FieldElement, alpha: &FieldElement) -> Result<Self> {
        Ok(Self::from_full(build_full(params, g, alpha)?))
    }

    /// Uses the provenance of any index set; non-full variants are rebuilt.
    pub fn from_index_set(set: &IndexSet) -> Result<Self> {
        if set.variant() == Variant::Full {
            return Ok(Self::from_full(set.clone()));
        }
        let p = set.provenance();
        Self::new(&p.params, &p.g, &p.alpha)
    }

    fn from_full(set: IndexSet) -> Self {
        let twiddles = Arc::new(Twiddles::new(set.ambient()));
        KatzSums { set, twiddles }
    }

    pub fn index_set(&self) -> &IndexSet {
        &self.set
    }

    pub fn params(&self) -> &FieldParams {
        self.set.params()
    }

    /// N = q^n − 1.
    pub fn group_order(&self) -> u64 {
        self.set.ambient()
    }

    /// Tolerance on exact identities, 1e−9 · q.
    pub fn eps(&self) -> f64 {
        1e-9 * self.params().q() as f64
    }

    pub fn bound(&self) -> f64 {
        (f64::from(self.params().n()) - 1.0) * (self.params().q() as f64).sqrt()
    }

    /// Raw sum for any integer a (a = 0 gives q).
    pub fn value(&self, a: u64) -> Complex64 {
        let mut acc = CompensatedSum::default();
        for &m in self.set.indices() {
            acc.add(self.twiddles.of_product(a, m));
        }
        acc.value()
    }

    pub fn report(&self, a: u64) -> Result<KatzSumReport> {
        let n = self.group_order();
        if a == 0 || a >= n {
            return Err(Error::CharacterOutOfRange { a, max: n - 1 });
        }
        let value = self.value(a);
        let q = self.params().q();
        let quadratic_case = (self.params().n() == 2).then(|| {
            if a.is_multiple_of(q - 1) {
                QuadraticCase::ExactMinusOne
            } else {
                QuadraticCase::ExactSqrtQ
            }
        });
        Ok(KatzSumReport { a, value, modulus: value.norm(), bound: self.bound(), quadratic_case })
    }

    fn all_reports(&self) -> Vec<KatzSumReport> {
        (1..self.group_order()).into_par_iter().map(|a| self.report(a).expect("a in range")).collect()
    }

    /// Checks the exact n = 2 identities over every nontrivial character.
    pub fn certify_quadratic(&self) -> Result<QuadraticCertificate> {
        if self.params().n() != 2 {
            return Err(Error::Precondition("n = 2 for the exact quadratic identities".into()));
        }
        let q = self.params().q() as f64;
        let (max_deviation, worst_a) = self
            .all_reports()
            .iter()
            .map(|r| (r.quadratic_deviation(q).expect("n = 2"), r.a))
            .fold((0.0, 0), |acc, x| if x.0 > acc.0 { x } else { acc });
        let tolerance = self.eps();
        Ok(QuadraticCertificate {
            pass: max_deviation <= tolerance,
            characters: self.group_order() - 1,
            max_deviation,
            worst_a,
            tolerance,
        })
    }

    /// Checks |S(a)| <= (n − 1)√q over all characters, or over
    /// [`SAMPLED_CHARACTERS`] uniform draws when there are more than
    /// [`EXHAUSTIVE_CAP`].
    pub fn certify_bound(&self, seed: u64) -> BoundCertificate {
        let n = self.group_order();
        let exhaustive = n - 1 <= EXHAUSTIVE_CAP;
        let reports = if exhaustive {
            self.all_reports()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let draws: Vec<u64> = (0..SAMPLED_CHARACTERS).map(|_| rng.random_range(1..n)).collect();
            draws.par_iter().map(|&a| self.report(a).expect("a in range")).collect()
        };
        let bound = self.bound();
        let eps = self.eps();
        let mut histogram = vec![0u64; HISTOGRAM_BINS];
        let mut max_modulus = 0.0f64;
        let mut worst_a = 0;
        for r in &reports {
            let bin = ((r.modulus / bound) * HISTOGRAM_BINS as f64) as usize;
            histogram[bin.min(HISTOGRAM_BINS - 1)] += 1;
            if r.modulus > max_modulus {
                max_modulus = r.modulus;
                worst_a = r.a;
            }
        }
        BoundCertificate {
            pass: reports.iter().all(|r| r.passes_bound(eps)),
            exhaustive,
            characters: reports.len() as u64,
            bound,
            max_modulus,
            worst_a,
            histogram,
            reports,
        }
    }
}

/// CSV with columns `a,re,im,modulus,bound,pass`.
pub fn write_reports_csv<W: Write>(reports: &[KatzSumReport], eps: f64, mut w: W) -> io::Result<()> {
    writeln!(w, "a,re,im,modulus,bound,pass")?;
    for r in reports {
        writeln!(
            w,
            "{},{:.17e},{:.17e},{:.17e},{:.17e},{}",
            r.a,
            r.value.re,
            r.value.im,
            r.modulus,
            r.bound,
            r.passes_bound(eps)
        )?;
    }
    Ok(())
}
