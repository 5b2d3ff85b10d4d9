//! Row-index sets `M = {log_g(t − α) : t ∈ GF(q)}` and their variants.

use crate::dlog::DlogTable;
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldParams};

/// Which construction produced an index set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// N = q^n − 1, |M| = q.
    Full,
    /// N = (q^n − 1)/(p^b − 1), indices reduced mod N, |M| = q.
    Quotient { b: u32 },
    /// n = 2, N = q² − 1, rows M ∪ {0}.
    Amub,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Full => "full",
            Variant::Quotient { .. } => "quotient",
            Variant::Amub => "amub",
        }
    }
}

/// The field data an index set was derived from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub params: FieldParams,
    pub g: FieldElement,
    pub alpha: FieldElement,
}

/// Sorted distinct row indices in `[0, N)` together with how they were built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexSet {
    ambient: u64,
    indices: Vec<u64>,
    variant: Variant,
    provenance: Provenance,
}

impl IndexSet {
    /// Reassembles an index set from stored parts, checking only structural
    /// invariants (sorted, distinct, in range, expected size).
    pub fn from_parts(ambient: u64, indices: Vec<u64>, variant: Variant, provenance: Provenance) -> Result<Self> {
        let q = provenance.params.q();
        let expected = match variant {
            Variant::Amub => q + 1,
            _ => q,
        };
        if indices.len() as u64 != expected {
            return Err(Error::Parse(format!("expected {expected} indices, found {}", indices.len())));
        }
        if let Some(w) = indices.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::Parse(format!("indices not strictly ascending at {}", w[1])));
        }
        if let Some(&last) = indices.last() {
            if last >= ambient {
                return Err(Error::IndexOutOfRange { index: last, dim: ambient });
            }
        }
        Ok(IndexSet { ambient, indices, variant, provenance })
    }

    /// Ambient Fourier size N.
    pub fn ambient(&self) -> u64 {
        self.ambient
    }

    pub fn indices(&self) -> &[u64] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn params(&self) -> &FieldParams {
        &self.provenance.params
    }

    /// Recomputes the construction from the provenance.
    pub fn rebuild(&self) -> Result<IndexSet> {
        let Provenance { params, g, alpha } = &self.provenance;
        match self.variant {
            Variant::Full => build_full(params, g, alpha),
            Variant::Quotient { b } => build_quotient(params, g, alpha, b),
            Variant::Amub => build_amub(params, g, alpha).map(|(s, _)| s),
        }
    }
}

/// Columns `{0, …, q² − 2}` split into the q − 1 orthonormal blocks
/// `T_j = {j + k(q − 1) : 0 <= k <= q}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmubPartition {
    q: u64,
    blocks: Vec<Vec<u64>>,
}

impl AmubPartition {
    pub fn new(q: u64) -> Self {
        let blocks = (0..q - 1).map(|j| (0..=q).map(|k| j + k * (q - 1)).collect()).collect();
        AmubPartition { q, blocks }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn blocks(&self) -> &[Vec<u64>] {
        &self.blocks
    }

    /// Block containing column `j`.
    pub fn block_of(&self, j: u64) -> usize {
        (j % (self.q - 1)) as usize
    }
}

/// Checks GF(q)(α) = GF(q^n) via the size of α's q-Frobenius orbit.
pub fn check_alpha(params: &FieldParams, alpha: &FieldElement) -> Result<()> {
    let orbit = params.frobenius_orbit_size(alpha);
    if orbit != params.n() {
        return Err(Error::AlphaNotGenerating { orbit, n: params.n() });
    }
    Ok(())
}

/// `log_g(t − α)` for every t in GF(q), in the order of
/// [`FieldParams::subfield_elements`].
pub fn subfield_logs(table: &DlogTable, alpha: &FieldElement) -> Result<Vec<u64>> {
    let params = table.params();
    params.subfield_elements(table.base()).iter().map(|t| table.log(&params.sub(t, alpha))).collect()
}

fn sorted_distinct(mut indices: Vec<u64>) -> Result<Vec<u64>> {
    indices.sort_unstable();
    if let Some(w) = indices.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateIndex(w[0]));
    }
    Ok(indices)
}

fn prepare(params: &FieldParams, g: &FieldElement, alpha: &FieldElement) -> Result<DlogTable> {
    if params.n() < 2 {
        return Err(Error::Precondition("n > 1".into()));
    }
    check_alpha(params, alpha)?;
    DlogTable::build(params, g)
}

fn provenance(params: &FieldParams, g: &FieldElement, alpha: &FieldElement) -> Provenance {
    Provenance { params: params.clone(), g: g.clone(), alpha: alpha.clone() }
}

/// q × (q^n − 1) construction.
pub fn build_full(params: &FieldParams, g: &FieldElement, alpha: &FieldElement) -> Result<IndexSet> {
    let table = prepare(params, g, alpha)?;
    let indices = sorted_distinct(subfield_logs(&table, alpha)?)?;
    Ok(IndexSet {
        ambient: params.group_order(),
        indices,
        variant: Variant::Full,
        provenance: provenance(params, g, alpha),
    })
}

/// q × (q^n − 1)/(p^b − 1) construction, b | a.
pub fn build_quotient(params: &FieldParams, g: &FieldElement, alpha: &FieldElement, b: u32) -> Result<IndexSet> {
    if b == 0 || !params.a().is_multiple_of(b) {
        return Err(Error::Precondition(format!("b = {b} dividing a = {}", params.a())));
    }
    let table = prepare(params, g, alpha)?;
    let ambient = params.group_order() / (u64::from(params.p()).pow(b) - 1);
    let logs = subfield_logs(&table, alpha)?;
    let indices = sorted_distinct(logs.into_iter().map(|m| m % ambient).collect())?;
    Ok(IndexSet { ambient, indices, variant: Variant::Quotient { b }, provenance: provenance(params, g, alpha) })
}

/// (q + 1) × (q² − 1) construction with rows M ∪ {0}, plus its block partition.
pub fn build_amub(params: &FieldParams, g: &FieldElement, alpha: &FieldElement) -> Result<(IndexSet, AmubPartition)> {
    if params.n() != 2 {
        return Err(Error::Precondition("n = 2 for the AMUB construction".into()));
    }
    let table = prepare(params, g, alpha)?;
    let mut logs = subfield_logs(&table, alpha)?;
    logs.push(0);
    let indices = sorted_distinct(logs)?;
    let set = IndexSet {
        ambient: params.group_order(),
        indices,
        variant: Variant::Amub,
        provenance: provenance(params, g, alpha),
    };
    Ok((set, AmubPartition::new(params.q())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(p: u32, a: u32, n: u32) -> (FieldParams, FieldElement) {
        let f = FieldParams::new(p, a, n, None).unwrap();
        let g = f.find_primitive_root().unwrap();
        (f, g)
    }

    // Brute-force oracle: exhaustive power table instead of BSGS, and GF(q)
    // as the roots of X^q − X instead of a generated subgroup.
    fn oracle_logs(f: &FieldParams, g: &FieldElement, alpha: &FieldElement) -> Vec<u64> {
        let mut log = vec![u64::MAX; f.order() as usize];
        let mut cur = f.one();
        for m in 0..f.group_order() {
            log[f.encode(&cur) as usize] = m;
            cur = f.mul(&cur, g);
        }
        let q = f.q();
        let mut out: Vec<u64> = (0..f.order())
            .map(|c| f.decode(c))
            .filter(|t| &f.pow(t, q) == t)
            .map(|t| log[f.encode(&f.sub(&t, alpha)) as usize])
            .collect();
        out.sort_unstable();
        out
    }

    #[test]
    fn matches_brute_force_oracle() {
        for (p, a, n) in [(5, 1, 2), (7, 1, 2), (3, 2, 2), (7, 1, 3), (2, 2, 3), (5, 1, 4), (2, 3, 2)] {
            let (f, g) = field(p, a, n);
            let alpha = f.x();
            let set = build_full(&f, &g, &alpha).unwrap();
            assert_eq!(set.indices(), oracle_logs(&f, &g, &alpha).as_slice(), "p={p} a={a} n={n}");
            assert_eq!(set.len() as u64, f.q());
        }
    }

    #[test]
    fn zero_not_in_quadratic_index_set() {
        for (p, a) in [(5, 1), (7, 1), (3, 2), (29, 1)] {
            let (f, g) = field(p, a, 2);
            let set = build_full(&f, &g, &f.x()).unwrap();
            assert!(!set.indices().contains(&0));
        }
    }

    #[test]
    fn precondition_errors() {
        let (f, g) = field(7, 1, 1);
        assert!(matches!(build_full(&f, &g, &f.x()), Err(Error::Precondition(_))));
        let (f, g) = field(7, 1, 2);
        let err = build_full(&f, &g, &f.constant(3)).unwrap_err();
        assert_eq!(err, Error::AlphaNotGenerating { orbit: 1, n: 2 });
        assert!(matches!(build_quotient(&f, &g, &f.x(), 2), Err(Error::Precondition(_))));
        let (f3, g3) = field(5, 1, 3);
        assert!(matches!(build_amub(&f3, &g3, &f3.x()), Err(Error::Precondition(_))));
        assert_eq!(build_full(&f, &f.one(), &f.x()).unwrap_err(), Error::NotPrimitive);
    }

    #[test]
    fn quotient_sizes() {
        // b = a: N = (q^n − 1)/(q − 1)
        for (p, a, n) in [(3, 2, 2), (7, 1, 3), (2, 2, 3), (5, 1, 3)] {
            let (f, g) = field(p, a, n);
            let set = build_quotient(&f, &g, &f.x(), a).unwrap();
            assert_eq!(set.ambient(), f.group_order() / (f.q() - 1));
            assert_eq!(set.len() as u64, f.q());
            assert!(set.indices().iter().all(|&m| m < set.ambient()));
        }
        // b = 1 < a = 2
        let (f, g) = field(3, 2, 2);
        let set = build_quotient(&f, &g, &f.x(), 1).unwrap();
        assert_eq!(set.ambient(), 80 / 2);
    }

    #[test]
    fn amub_partition_shape() {
        let part = AmubPartition::new(29);
        assert_eq!(part.blocks().len(), 28);
        assert!(part.blocks().iter().all(|b| b.len() == 30));
        assert_eq!(part.blocks()[0], (0..30).map(|k| 28 * k).collect::<Vec<_>>());
        assert_eq!(*part.blocks()[0].last().unwrap(), 812);
        let mut all: Vec<u64> = part.blocks().concat();
        all.sort_unstable();
        assert_eq!(all, (0..=839).collect::<Vec<_>>());
        assert_eq!(part.block_of(57), 1);

        let (f, g) = field(29, 1, 2);
        let (set, part) = build_amub(&f, &g, &f.x()).unwrap();
        assert_eq!(set.len(), 30);
        assert_eq!(set.indices()[0], 0);
        assert_eq!(part.q(), 29);
    }

    #[test]
    fn negating_alpha_shifts_by_half_the_group() {
        for (p, a) in [(5, 1), (7, 1), (3, 2), (11, 1)] {
            let (f, g) = field(p, a, 2);
            let n_full = f.group_order();
            let alpha = f.x();
            let base = build_full(&f, &g, &alpha).unwrap();
            let neg = build_full(&f, &g, &f.neg(&alpha)).unwrap();
            let mut shifted: Vec<u64> = base.indices().iter().map(|m| (m + n_full / 2) % n_full).collect();
            shifted.sort_unstable();
            assert_eq!(neg.indices(), shifted.as_slice());
        }
    }

    #[test]
    fn rebuild_reproduces() {
        let (f, g) = field(7, 1, 3);
        let set = build_quotient(&f, &g, &f.x(), 1).unwrap();
        assert_eq!(set.rebuild().unwrap(), set);
    }
}
