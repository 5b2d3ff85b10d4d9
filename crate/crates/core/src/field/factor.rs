//! Trial-division primality and factorization for desk-scale integers.

use std::fmt;

/// Deterministic primality by trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d <= n / d {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorization `∏ ℓ^e` of a positive integer, primes ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Factors `n` by trial division. `n = 1` yields the empty product.
    pub fn of(mut n: u64) -> Self {
        assert!(n >= 1, "cannot factor zero");
        let mut factors = Vec::new();
        let mut push = |l: u64, n: &mut u64| {
            let mut e = 0;
            while (*n).is_multiple_of(l) {
                *n /= l;
                e += 1;
            }
            if e > 0 {
                factors.push((l, e));
            }
        };
        push(2, &mut n);
        let mut d = 3u64;
        while d <= n / d {
            push(d, &mut n);
            d += 2;
        }
        if n > 1 {
            factors.push((n, 1));
        }
        Factorization { factors }
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(l, _)| l)
    }

    /// Reconstructs the factored integer.
    pub fn product(&self) -> u64 {
        self.factors.iter().map(|&(l, e)| l.pow(e)).product()
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &(l, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            if e == 1 {
                write!(f, "{l}")?;
            } else {
                write!(f, "{l}^{e}")?;
            }
        }
        Ok(())
    }
}
