//! Dense polynomials over GF(p), little-endian, used for modulus selection.

use super::factor::Factorization;

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub(crate) fn inv_mod(x: u64, p: u64) -> u64 {
    debug_assert!(!x.is_multiple_of(p));
    // Fermat; p is prime.
    let mut base = x % p;
    let mut e = p - 2;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

/// Remainder of `a` modulo `f` (f nonzero, not necessarily monic).
fn rem(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let f = trim(f.to_vec());
    let df = f.len() - 1;
    let lead_inv = inv_mod(f[df], p);
    let mut r = trim(a.to_vec());
    while r.len() > df {
        let k = r.len() - 1;
        let c = r[k] * lead_inv % p;
        for (i, &fi) in f.iter().enumerate() {
            let idx = k - df + i;
            r[idx] = (r[idx] + (p - c) * fi % p) % p;
        }
        r = trim(r);
    }
    r
}

fn mul_mod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    rem(&out, f, p)
}

fn pow_mod(base: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = rem(base, f, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(&acc, &b, f, p);
        }
        b = mul_mod(&b, &b, f, p);
        e >>= 1;
    }
    acc
}

fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(out)
}

fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Rabin's test: a monic `f` of degree d is irreducible over GF(p) iff
/// x^(p^d) = x mod f and gcd(x^(p^(d/r)) - x, f) = 1 for every prime r | d.
pub(crate) fn is_irreducible(f: &[u32], p: u32) -> bool {
    let p = u64::from(p);
    let f: Vec<u64> = f.iter().map(|&c| u64::from(c)).collect();
    let d = f.len() - 1;
    if d == 0 {
        return false;
    }
    if d == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    // frob[k] = x^(p^k) mod f
    let mut frob = vec![rem(&x, &f, p)];
    for _ in 0..d {
        let last = frob.last().unwrap();
        let next = pow_mod(last, p, &f, p);
        frob.push(next);
    }
    if !sub(&frob[d], &x, p).is_empty() {
        return false;
    }
    for r in Factorization::of(d as u64).primes() {
        let h = sub(&frob[d / r as usize], &x, p);
        if gcd(&f, &h, p).len() != 1 {
            return false;
        }
    }
    true
}
