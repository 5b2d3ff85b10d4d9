//! TOML records for index sets and the compact matrix form (index set plus
//! scale). Field elements and the modulus are written as comma-separated
//! coefficients, constant term first.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{format_coeffs, parse_coeffs, FieldParams};
use crate::index::{IndexSet, Provenance, Variant};
use crate::matrix::SensingMatrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Record {
    pub variant: String,
    pub p: u32,
    pub a: u32,
    pub n: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<u32>,
    pub modulus: String,
    pub g: String,
    pub alpha: String,
    #[serde(rename = "N")]
    pub ambient: u64,
    /// Present only in matrix records.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    pub indices: Vec<u64>,
}

impl Record {
    pub fn from_index_set(set: &IndexSet) -> Self {
        let Provenance { params, g, alpha } = set.provenance();
        let b = match set.variant() {
            Variant::Quotient { b } => Some(b),
            _ => None,
        };
        Record {
            variant: set.variant().name().to_string(),
            p: params.p(),
            a: params.a(),
            n: params.n(),
            b,
            modulus: format_coeffs(params.modulus()),
            g: g.to_string(),
            alpha: alpha.to_string(),
            ambient: set.ambient(),
            scale: None,
            indices: set.indices().to_vec(),
        }
    }

    /// Fails for matrices that were not built from an index set.
    pub fn from_matrix(matrix: &SensingMatrix) -> Result<Self> {
        let set = matrix.index_set().ok_or_else(|| Error::Precondition("matrix has no index-set provenance".into()))?;
        Ok(Record { scale: Some(matrix.scale()), ..Record::from_index_set(set) })
    }

    /// Structural reconstruction; the indices are not recomputed (see
    /// [`IndexSet::rebuild`] for that).
    pub fn to_index_set(&self) -> Result<IndexSet> {
        let modulus = parse_coeffs(&self.modulus)?;
        let params = FieldParams::new(self.p, self.a, self.n, Some(&modulus))?;
        let variant = match (self.variant.as_str(), self.b) {
            ("full", None) => Variant::Full,
            ("quotient", Some(b)) => Variant::Quotient { b },
            ("amub", None) => Variant::Amub,
            (v, b) => return Err(Error::Parse(format!("bad variant {v:?} with b = {b:?}"))),
        };
        let expected = match variant {
            Variant::Quotient { b } => {
                let d = u64::from(self.p).checked_pow(b).map(|v| v - 1).filter(|&d| d > 0);
                match d {
                    Some(d) if params.group_order() % d == 0 => params.group_order() / d,
                    _ => return Err(Error::Parse(format!("b = {b} does not divide the field degree"))),
                }
            }
            _ => params.group_order(),
        };
        if self.ambient != expected {
            return Err(Error::Parse(format!("N = {} but the field gives {expected}", self.ambient)));
        }
        let g = params.parse_element(&self.g)?;
        let alpha = params.parse_element(&self.alpha)?;
        IndexSet::from_parts(self.ambient, self.indices.clone(), variant, Provenance { params, g, alpha })
    }

    pub fn to_matrix(&self) -> Result<SensingMatrix> {
        let set = self.to_index_set()?;
        let matrix = SensingMatrix::from_index_set(&set);
        match self.scale {
            Some(s) if s.to_bits() == matrix.scale().to_bits() => Ok(matrix),
            Some(s) => Err(Error::Parse(format!("scale {s:e} is not 1/sqrt({})", set.len()))),
            None => Err(Error::Parse("matrix record has no scale".into())),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("record fields are always representable")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::{build_amub, build_full, build_quotient};
    use proptest::prelude::*;

    fn example_one() -> IndexSet {
        let params = FieldParams::new(29, 1, 2, Some(&[2, 0, 1])).unwrap();
        build_full(&params, &params.element(&[1, 1]).unwrap(), &params.element(&[0, 28]).unwrap()).unwrap()
    }

    #[test]
    fn index_set_round_trip() {
        let set = example_one();
        let text = Record::from_index_set(&set).to_toml();
        assert!(text.contains("modulus = \"2,0,1\""));
        assert!(text.contains("N = 840"));
        assert!(!text.contains("scale"));
        let back = Record::from_toml(&text).unwrap().to_index_set().unwrap();
        assert_eq!(back, set);
        assert_eq!(Record::from_index_set(&back).to_toml(), text);
    }

    #[test]
    fn quotient_and_amub_round_trip() {
        let p19 = FieldParams::new(19, 1, 3, Some(&[1, 1, 0, 1])).unwrap();
        let q = build_quotient(&p19, &p19.element(&[0, 2, 1]).unwrap(), &p19.x(), 1).unwrap();
        let rec = Record::from_index_set(&q);
        assert_eq!((rec.b, rec.ambient), (Some(1), 381));
        assert_eq!(Record::from_toml(&rec.to_toml()).unwrap().to_index_set().unwrap(), q);

        let p5 = FieldParams::new(5, 1, 2, None).unwrap();
        let (amub, _) = build_amub(&p5, &p5.find_primitive_root().unwrap(), &p5.x()).unwrap();
        assert_eq!(Record::from_toml(&Record::from_index_set(&amub).to_toml()).unwrap().to_index_set().unwrap(), amub);
    }

    #[test]
    fn matrix_round_trip_is_bit_exact() {
        let phi = SensingMatrix::from_index_set(&example_one());
        let rec = Record::from_matrix(&phi).unwrap();
        let back = Record::from_toml(&rec.to_toml()).unwrap().to_matrix().unwrap();
        assert_eq!(back.scale().to_bits(), phi.scale().to_bits());
        assert_eq!(back.rows(), phi.rows());
        assert!(Record::from_matrix(&SensingMatrix::from_rows(8, vec![1], 1.0).unwrap()).is_err());
        let bad = Record { scale: Some(0.5), ..rec.clone() };
        assert!(bad.to_matrix().is_err());
        assert!(Record { scale: None, ..rec }.to_matrix().is_err());
    }

    #[test]
    fn rejects_inconsistent_records() {
        let rec = Record::from_index_set(&example_one());
        for bad in [
            Record { ambient: 839, ..rec.clone() },
            Record { variant: "quotient".into(), ..rec.clone() },
            Record { b: Some(1), ..rec.clone() },
            Record { modulus: "1,0,1".into(), ..rec.clone() },
            Record { indices: rec.indices[1..].to_vec(), ..rec.clone() },
            Record { g: "1,1,1".into(), ..rec.clone() },
        ] {
            assert!(bad.to_index_set().is_err(), "{bad:?}");
        }
        assert!(Record::from_toml("variant = \"full\"\nextra = 1\n").is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn random_full_sets_round_trip(p in prop::sample::select(vec![3u32, 5, 7, 11, 13]), pick in 0u64..1000) {
            let params = FieldParams::new(p, 1, 2, None).unwrap();
            let fact = params.factor_group_order();
            let g = (1..params.order())
                .map(|c| params.decode((c + pick) % (params.order() - 1) + 1))
                .find(|e| params.is_primitive(e, &fact).unwrap())
                .unwrap();
            let alpha = params.decode(params.order() - 1 - pick % p as u64);
            let set = build_full(&params, &g, &alpha).unwrap();
            let text = Record::from_index_set(&set).to_toml();
            prop_assert_eq!(Record::from_toml(&text).unwrap().to_index_set().unwrap(), set);
        }
    }
}
