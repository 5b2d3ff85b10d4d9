//! Exact arithmetic in GF(q^n), q = p^a, represented as a single degree-a·n
//! extension of GF(p) modulo a monic irreducible polynomial.

mod factor;
mod poly;

pub use factor::{is_prime, Factorization};

use std::fmt;

use crate::error::{Error, Result};

/// Largest field order `find_primitive_root` will enumerate.
pub const PRIMITIVE_SEARCH_CAP: u64 = 1 << 24;

/// Parameters of GF(q^n) with q = p^a.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldParams {
    p: u32,
    a: u32,
    n: u32,
    modulus: Vec<u32>,
    order: u64,
    group_order: u64,
}

/// A canonical element of GF(q^n): `degree` coefficients in `[0, p)`,
/// constant term first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    coeffs: Vec<u32>,
}

impl FieldElement {
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_coeffs(&self.coeffs))
    }
}

/// Parses the comma-separated coefficient format, constant term first
/// (`"2,0,1"` is x² + 2).
pub fn parse_coeffs(text: &str) -> Result<Vec<u32>> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::Parse("empty coefficient list".into()));
    }
    text.split(',')
        .map(|tok| {
            let tok = tok.trim();
            tok.parse::<u32>().map_err(|_| Error::Parse(format!("bad coefficient {tok:?} in {text:?}")))
        })
        .collect()
}

pub fn format_coeffs(coeffs: &[u32]) -> String {
    coeffs.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

impl FieldParams {
    /// Sets up GF(p^(a·n)). Without an explicit modulus, the first monic
    /// irreducible polynomial of degree a·n is chosen, enumerating coefficient
    /// tuples in ascending order with the constant term varying fastest.
    pub fn new(p: u32, a: u32, n: u32, modulus: Option<&[u32]>) -> Result<Self> {
        if !is_prime(u64::from(p)) || p >= 1 << 31 {
            return Err(Error::NotPrime(u64::from(p)));
        }
        if a == 0 || n == 0 {
            return Err(Error::InvalidDegree(format!("a = {a}, n = {n} (both must be >= 1)")));
        }
        let degree = a.checked_mul(n).ok_or_else(|| Error::InvalidDegree(format!("a*n overflows ({a}*{n})")))?;
        let order =
            u64::from(p).checked_pow(degree).filter(|&o| o < 1 << 63).ok_or(Error::FieldTooLarge { p, degree })?;
        let d = degree as usize;
        let modulus = match modulus {
            Some(m) => {
                if m.len() != d + 1 || m[d] != 1 || m.iter().any(|&c| c >= p) {
                    return Err(Error::BadModulus { expected: d, got: m.to_vec() });
                }
                if !poly::is_irreducible(m, p) {
                    return Err(Error::ReducibleModulus(m.to_vec()));
                }
                m.to_vec()
            }
            None => first_irreducible(p, d),
        };
        Ok(FieldParams { p, a, n, modulus, order, group_order: order - 1 })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Degree a·n of the extension over GF(p).
    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    /// Size of the base field, q = p^a.
    pub fn q(&self) -> u64 {
        u64::from(self.p).pow(self.a)
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// q^n.
    pub fn order(&self) -> u64 {
        self.order
    }

    /// q^n − 1, the order of the multiplicative group.
    pub fn group_order(&self) -> u64 {
        self.group_order
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { coeffs: vec![0; self.degree()] }
    }

    pub fn one(&self) -> FieldElement {
        self.constant(1)
    }

    /// Image of an integer under Z -> GF(p) -> GF(q^n).
    pub fn constant(&self, c: u64) -> FieldElement {
        let mut e = self.zero();
        e.coeffs[0] = (c % u64::from(self.p)) as u32;
        e
    }

    /// Residue class of the adjoined variable x.
    pub fn x(&self) -> FieldElement {
        self.reduce(&[0, 1])
    }

    /// Validates a coefficient vector (shorter vectors are zero-padded).
    pub fn element(&self, coeffs: &[u32]) -> Result<FieldElement> {
        let d = self.degree();
        if coeffs.len() > d || coeffs.is_empty() {
            return Err(Error::BadElementLength { got: coeffs.len(), degree: d });
        }
        if let Some(&c) = coeffs.iter().find(|&&c| c >= self.p) {
            return Err(Error::CoefficientOutOfRange { value: u64::from(c), p: self.p });
        }
        let mut v = coeffs.to_vec();
        v.resize(d, 0);
        Ok(FieldElement { coeffs: v })
    }

    pub fn parse_element(&self, text: &str) -> Result<FieldElement> {
        self.element(&parse_coeffs(text)?)
    }

    /// Packs the coefficients base p into one integer in `[0, order)`.
    pub fn encode(&self, e: &FieldElement) -> u64 {
        let p = u64::from(self.p);
        e.coeffs.iter().rev().fold(0u64, |acc, &c| acc * p + u64::from(c))
    }

    pub fn decode(&self, mut code: u64) -> FieldElement {
        debug_assert!(code < self.order);
        let p = u64::from(self.p);
        let coeffs = (0..self.degree())
            .map(|_| {
                let c = (code % p) as u32;
                code /= p;
                c
            })
            .collect();
        FieldElement { coeffs }
    }

    fn reduce(&self, poly: &[u64]) -> FieldElement {
        let p = u64::from(self.p);
        let d = self.degree();
        let mut r: Vec<u64> = poly.iter().map(|&c| c % p).collect();
        for k in (d..r.len()).rev() {
            let c = r[k];
            if c == 0 {
                continue;
            }
            let neg = p - c;
            for (i, &m) in self.modulus[..d].iter().enumerate() {
                let idx = k - d + i;
                r[idx] = (r[idx] + neg * u64::from(m)) % p;
            }
            r[k] = 0;
        }
        r.resize(d, 0);
        FieldElement { coeffs: r.into_iter().map(|c| c as u32).collect() }
    }

    pub fn add(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        let p = self.p;
        let coeffs = x
            .coeffs
            .iter()
            .zip(&y.coeffs)
            .map(|(&a, &b)| {
                let s = a + b;
                if s >= p {
                    s - p
                } else {
                    s
                }
            })
            .collect();
        FieldElement { coeffs }
    }

    pub fn neg(&self, x: &FieldElement) -> FieldElement {
        let p = self.p;
        let coeffs = x.coeffs.iter().map(|&c| if c == 0 { 0 } else { p - c }).collect();
        FieldElement { coeffs }
    }

    pub fn sub(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        self.add(x, &self.neg(y))
    }

    pub fn mul(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        let p = u64::from(self.p);
        let d = self.degree();
        let mut prod = vec![0u64; 2 * d - 1];
        for (i, &a) in x.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in y.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + u64::from(a) * u64::from(b)) % p;
            }
        }
        self.reduce(&prod)
    }

    /// Square-and-multiply. For a nonzero base the exponent is reduced
    /// modulo the group order; `0^0 = 1`.
    pub fn pow(&self, x: &FieldElement, k: u64) -> FieldElement {
        if x.is_zero() {
            return if k == 0 { self.one() } else { self.zero() };
        }
        let mut e = k % self.group_order;
        let mut base = x.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    pub fn inv(&self, x: &FieldElement) -> Result<FieldElement> {
        if x.is_zero() {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow(x, self.group_order - 1))
    }

    pub fn factor_group_order(&self) -> Factorization {
        Factorization::of(self.group_order)
    }

    /// `g` generates GF(q^n)* iff g^(N/ℓ) ≠ 1 for every prime ℓ | N.
    pub fn is_primitive(&self, g: &FieldElement, fact: &Factorization) -> Result<bool> {
        if g.is_zero() {
            return Err(Error::NotPrimitive);
        }
        let one = self.one();
        Ok(fact.primes().all(|l| self.pow(g, self.group_order / l) != one))
    }

    /// First element, in ascending coefficient-tuple order (constant term
    /// fastest), that is a primitive root.
    pub fn find_primitive_root(&self) -> Result<FieldElement> {
        if self.order > PRIMITIVE_SEARCH_CAP {
            return Err(Error::EnumerationCap { order: self.order, cap: PRIMITIVE_SEARCH_CAP });
        }
        let fact = self.factor_group_order();
        for code in 1..self.order {
            let g = self.decode(code);
            if self.is_primitive(&g, &fact)? {
                return Ok(g);
            }
        }
        unreachable!("GF(q^n)* is cyclic, so a primitive root exists")
    }

    /// Size of the orbit of `x` under the q-power Frobenius, i.e. the degree
    /// of GF(q)(x) over GF(q).
    pub fn frobenius_orbit_size(&self, x: &FieldElement) -> u32 {
        let q = self.q();
        let mut y = self.pow(x, q);
        let mut size = 1;
        while &y != x {
            y = self.pow(&y, q);
            size += 1;
        }
        size
    }

    /// The subfield GF(q) as {0} ∪ ⟨h⟩ with h = g^((q^n−1)/(q−1)), where g is
    /// a primitive root. Listed as 0, 1, h, h², …
    pub fn subfield_elements(&self, g: &FieldElement) -> Vec<FieldElement> {
        let q = self.q();
        let h = self.pow(g, self.group_order / (q - 1));
        let mut out = Vec::with_capacity(q as usize);
        out.push(self.zero());
        let mut cur = self.one();
        for _ in 0..q - 1 {
            out.push(cur.clone());
            cur = self.mul(&cur, &h);
        }
        out
    }
}

fn first_irreducible(p: u32, d: usize) -> Vec<u32> {
    let pp = u64::from(p);
    let total = pp.pow(d as u32);
    (0..total)
        .map(|mut c| {
            let mut f = Vec::with_capacity(d + 1);
            for _ in 0..d {
                f.push((c % pp) as u32);
                c /= pp;
            }
            f.push(1);
            f
        })
        .find(|f| poly::is_irreducible(f, p))
        .expect("irreducible polynomials exist in every degree")
}
