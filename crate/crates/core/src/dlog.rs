//! Shanks baby-step/giant-step discrete logarithms in GF(q^n)*.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldParams};

/// Baby-step table for a fixed primitive root `g`: `g^j -> j` for `0 <= j < K`
/// with `K = ceil(sqrt(q^n - 1))`.
#[derive(Clone, Debug)]
pub struct DlogTable {
    params: FieldParams,
    base: FieldElement,
    steps: u64,
    baby_steps: HashMap<u64, u64>,
    giant: FieldElement,
}

/// Smallest K with K² >= n.
pub fn ceil_sqrt(n: u64) -> u64 {
    let mut k = (n as f64).sqrt() as u64;
    while k.saturating_mul(k) < n {
        k += 1;
    }
    while k > 0 && (k - 1) * (k - 1) >= n {
        k -= 1;
    }
    k
}

impl DlogTable {
    pub fn build(params: &FieldParams, g: &FieldElement) -> Result<Self> {
        if !params.is_primitive(g, &params.factor_group_order())? {
            return Err(Error::NotPrimitive);
        }
        let steps = ceil_sqrt(params.group_order());
        let mut baby_steps = HashMap::with_capacity(steps as usize);
        let mut cur = params.one();
        for j in 0..steps {
            baby_steps.insert(params.encode(&cur), j);
            cur = params.mul(&cur, g);
        }
        let giant = params.inv(&params.pow(g, steps))?;
        Ok(DlogTable { params: params.clone(), base: g.clone(), steps, baby_steps, giant })
    }

    pub fn base(&self) -> &FieldElement {
        &self.base
    }

    pub fn params(&self) -> &FieldParams {
        &self.params
    }

    /// Number of baby steps K.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn len(&self) -> usize {
        self.baby_steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.baby_steps.is_empty()
    }

    /// Baby-step exponent stored for `e`, if `e = g^j` with `j < K`.
    pub fn baby_step(&self, e: &FieldElement) -> Option<u64> {
        self.baby_steps.get(&self.params.encode(e)).copied()
    }

    /// `log_g u` in `[0, q^n - 1)`.
    pub fn log(&self, u: &FieldElement) -> Result<u64> {
        if u.is_zero() {
            return Err(Error::ZeroLog);
        }
        let mut gamma = u.clone();
        for i in 0..self.steps {
            if let Some(&j) = self.baby_steps.get(&self.params.encode(&gamma)) {
                return Ok((i * self.steps + j) % self.params.group_order());
            }
            gamma = self.params.mul(&gamma, &self.giant);
        }
        unreachable!("every nonzero element is a power of a primitive root")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceil_sqrt_values() {
        assert_eq!(ceil_sqrt(840), 29);
        assert_eq!(ceil_sqrt(841), 29);
        assert_eq!(ceil_sqrt(842), 30);
        assert_eq!(ceil_sqrt(6), 3);
        assert_eq!(ceil_sqrt(1), 1);
        assert_eq!(ceil_sqrt(2), 2);
        assert_eq!(ceil_sqrt((1 << 62) + 1), (1 << 31) + 1);
    }

    #[test]
    fn table_for_f7() {
        let f = FieldParams::new(7, 1, 1, None).unwrap();
        let g = f.element(&[3]).unwrap();
        let t = DlogTable::build(&f, &g).unwrap();
        assert_eq!(t.steps(), 3);
        assert_eq!(t.len(), 3);
        for (value, j) in [(1, 0), (3, 1), (2, 2)] {
            assert_eq!(t.baby_step(&f.element(&[value]).unwrap()), Some(j));
        }
        assert_eq!(t.log(&f.element(&[6]).unwrap()).unwrap(), 3);
        assert_eq!(t.log(&f.one()).unwrap(), 0);
        assert_eq!(t.log(&g).unwrap(), 1);
        assert_eq!(t.log(&f.zero()), Err(Error::ZeroLog));
    }

    #[test]
    fn rejects_non_primitive_base() {
        let f = FieldParams::new(29, 1, 2, Some(&[2, 0, 1])).unwrap();
        let g = f.element(&[2, 1]).unwrap();
        assert_eq!(DlogTable::build(&f, &g).unwrap_err(), Error::NotPrimitive);
        let t = DlogTable::build(&f, &f.element(&[1, 1]).unwrap()).unwrap();
        assert_eq!(t.steps(), 29);
        assert_eq!(t.len(), 29);
    }

    #[test]
    fn log_is_a_homomorphism() {
        let f = FieldParams::new(19, 1, 3, Some(&[1, 1, 0, 1])).unwrap();
        let t = DlogTable::build(&f, &f.element(&[0, 2, 1]).unwrap()).unwrap();
        let n = f.group_order();
        for (a, b) in (1..f.order()).step_by(97).zip((3..f.order()).step_by(131)) {
            let (u, v) = (f.decode(a), f.decode(b));
            let lhs = t.log(&f.mul(&u, &v)).unwrap();
            assert_eq!(lhs, (t.log(&u).unwrap() + t.log(&v).unwrap()) % n);
        }
    }
}
