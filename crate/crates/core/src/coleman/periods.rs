//! The truncated period map `Π_m`: homology to `(Z/l^m)^d` through the dual
//! functionals of the rational newforms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::ColemanError;
use crate::modsym::{EigenData, HomologyClass, ManinBasis};

/// `(level, newform index, sign)` labelling one period coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FormLabel(pub u64, pub usize, pub i8);

/// Which eigen-lines of each newform contribute coordinates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Signs {
    #[default]
    Both,
    PlusOnly,
}

impl Signs {
    fn list(self) -> &'static [i8] {
        match self {
            Signs::Both => &[1, -1],
            Signs::PlusOnly => &[1],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PeriodVector {
    pub l: u64,
    pub m: u32,
    #[serde(with = "crate::serde_dec::u64s")]
    pub entries: Vec<u64>,
    pub forms: Vec<FormLabel>,
}

/// `l^m`, provided it leaves headroom in a `u64`.
pub fn modulus(l: u64, m: u32) -> Result<u64, ColemanError> {
    l.checked_pow(m)
        .filter(|&q| q < 1 << 62)
        .ok_or(ColemanError::ModulusTooLarge { l, m })
}

fn mulmod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

fn reduce(x: &BigRational, l: u64, q: u64) -> Result<u64, ColemanError> {
    let qb = BigInt::from(q);
    if x.denom().is_multiple_of(&BigInt::from(l)) {
        return Err(ColemanError::DenominatorNotUnit { l });
    }
    let inv = x
        .denom()
        .mod_floor(&qb)
        .modinv(&qb)
        .expect("unit denominator");
    Ok((x.numer() * inv).mod_floor(&qb).to_u64().expect("reduced"))
}

/// `i64` to its residue mod `q`.
pub(crate) fn residue(x: i64, q: u64) -> u64 {
    x.rem_euclid(q as i64) as u64
}

impl PeriodVector {
    pub fn modulus(&self) -> u64 {
        self.l.pow(self.m)
    }

    pub fn zero_like(&self) -> Self {
        Self {
            entries: vec![0; self.entries.len()],
            ..self.clone()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(
            (self.l, self.m, &self.forms),
            (other.l, other.m, &other.forms)
        );
        let q = self.modulus();
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a + b) % q)
            .collect();
        Self {
            entries,
            ..self.clone()
        }
    }

    pub fn scale(&self, k: i64) -> Self {
        let q = self.modulus();
        let k = residue(k, q);
        let entries = self.entries.iter().map(|&a| mulmod(a, k, q)).collect();
        Self {
            entries,
            ..self.clone()
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1))
    }

    /// `l`, `m`, `d` and the entries, each big-endian, in that order
    /// (`u64`, `u32`, `u32`, then `d` times `u64`).
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + 8 * self.entries.len());
        out.extend_from_slice(&self.l.to_be_bytes());
        out.extend_from_slice(&self.m.to_be_bytes());
        out.extend_from_slice(&(self.entries.len() as u32).to_be_bytes());
        for e in &self.entries {
            out.extend_from_slice(&e.to_be_bytes());
        }
        out
    }
}

/// The matrix `A` of `Π_m` in the Manin basis: `d` rows, `r` columns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodMap {
    pub l: u64,
    pub m: u32,
    #[serde(with = "rows_dec")]
    pub rows: Vec<Vec<u64>>,
    pub forms: Vec<FormLabel>,
}

mod rows_dec {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(rows: &[Vec<u64>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(
            rows.iter()
                .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()),
        )
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<u64>>, D::Error> {
        let v = Vec::<Vec<String>>::deserialize(d)?;
        v.iter()
            .map(|r| {
                r.iter()
                    .map(|s| s.parse().map_err(serde::de::Error::custom))
                    .collect()
            })
            .collect()
    }
}

impl PeriodMap {
    pub fn modulus(&self) -> u64 {
        self.l.pow(self.m)
    }

    pub fn d(&self) -> usize {
        self.rows.len()
    }

    pub fn r(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    /// `A x mod l^m` for integer coordinates `x`.
    pub fn apply(&self, x: &[i64]) -> PeriodVector {
        let q = self.modulus();
        let xs: Vec<u64> = x.iter().map(|&v| residue(v, q)).collect();
        self.apply_residues(&xs)
    }

    /// `A x mod l^m` for coordinates already reduced mod `l^m`.
    pub fn apply_residues(&self, x: &[u64]) -> PeriodVector {
        let q = self.modulus();
        let entries = self
            .rows
            .iter()
            .map(|row| {
                assert_eq!(row.len(), x.len());
                row.iter()
                    .zip(x)
                    .fold(0u64, |acc, (&a, &b)| (acc + mulmod(a, b, q)) % q)
            })
            .collect();
        self.vector(entries)
    }

    pub fn vector(&self, entries: Vec<u64>) -> PeriodVector {
        PeriodVector {
            l: self.l,
            m: self.m,
            entries,
            forms: self.forms.clone(),
        }
    }

    /// Column `j`, the image of the `j`-th basis element.
    pub fn column(&self, j: usize) -> PeriodVector {
        self.vector(self.rows.iter().map(|r| r[j]).collect())
    }
}

/// `Π_m(γ)`: each dual functional evaluated exactly and reduced mod `l^m`.
pub fn period_vector_rational(
    gamma: &HomologyClass,
    eigen: &[EigenData],
    l: u64,
    m: u32,
    signs: Signs,
) -> Result<PeriodVector, ColemanError> {
    let q = modulus(l, m)?;
    let mut entries = Vec::new();
    let mut forms = Vec::new();
    for f in eigen {
        if f.level != gamma.level {
            return Err(ColemanError::LevelMismatch {
                expected: f.level,
                got: gamma.level,
            });
        }
        for &s in signs.list() {
            entries.push(reduce(&f.functional(s).eval(&gamma.coords), l, q)?);
            forms.push(FormLabel(f.level, f.newform_id, s));
        }
    }
    Ok(PeriodVector {
        l,
        m,
        entries,
        forms,
    })
}

/// The matrix of `Π_m` on the basis of `basis`.
pub fn period_matrix(
    basis: &ManinBasis,
    eigen: &[EigenData],
    l: u64,
    m: u32,
    signs: Signs,
) -> Result<PeriodMap, ColemanError> {
    let q = modulus(l, m)?;
    let mut rows = Vec::new();
    let mut forms = Vec::new();
    for f in eigen {
        if f.level != basis.level {
            return Err(ColemanError::LevelMismatch {
                expected: basis.level,
                got: f.level,
            });
        }
        for &s in signs.list() {
            let func = f.functional(s);
            let row = func
                .num
                .iter()
                .map(|a| reduce(&BigRational::new(a.clone(), func.den.clone()), l, q))
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
            forms.push(FormLabel(f.level, f.newform_id, s));
        }
    }
    Ok(PeriodMap { l, m, rows, forms })
}
