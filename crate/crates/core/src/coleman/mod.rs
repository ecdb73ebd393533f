//! q-expansions, tiny `l`-adic integrals in a residue disc, and the
//! truncated period map on homology.

mod periods;
mod tiny;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factor, sigma};
use crate::modsym::EigenData;
use crate::padic::PadicError;

pub use periods::{
    modulus, period_matrix, period_vector_rational, FormLabel, PeriodMap, PeriodVector, Signs,
};
pub use tiny::{
    expansion_at_cusp, expansion_in_j, hecke_symmetrize, j_local_series, j_value, tiny_integral,
    LocalExpansion, Parameter,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ColemanError {
    #[error("eigenvalue a_{prime} is needed but was not computed")]
    MissingEigenvalue { prime: u64 },
    #[error("point has valuation {val}; the expansion only converges for valuation >= 1")]
    OutOfDisc { val: i64 },
    #[error("dj/dq vanishes at the base point to working precision")]
    NonUnitLinearTerm,
    #[error("l + 1 - a_l = {norm} is not a unit at l = {l}")]
    NonUnitNormalizer { norm: i64, l: u64 },
    #[error("no neighbor integrals were supplied")]
    EmptyCorrespondence,
    #[error("a dual functional has denominator divisible by l = {l}")]
    DenominatorNotUnit { l: u64 },
    #[error("l^m = {l}^{m} does not fit the 62-bit modulus")]
    ModulusTooLarge { l: u64, m: u32 },
    #[error("j(q_P) does not match the supplied j(P)")]
    BaseMismatch,
    #[error("expected an eigenform expansion")]
    NotEigenform,
    #[error("homology class of level {got} paired with eigenforms of level {expected}")]
    LevelMismatch { expected: u64, got: u64 },
    #[error(transparent)]
    Padic(#[from] PadicError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QKind {
    Eigenform,
    JFunction,
}

/// `sum coeffs[i] q^(i + offset)`, known for the listed terms only.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QExpansion {
    pub kind: QKind,
    pub offset: i64,
    #[serde(with = "crate::serde_dec::vec")]
    pub coeffs: Vec<BigInt>,
}

impl QExpansion {
    /// Coefficient of `q^n`, if known.
    pub fn coeff(&self, n: i64) -> Option<&BigInt> {
        let i = n - self.offset;
        if i < 0 {
            return None;
        }
        self.coeffs.get(i as usize)
    }

    /// Index of the last known power of `q`.
    pub fn last(&self) -> i64 {
        self.offset + self.coeffs.len() as i64 - 1
    }
}

/// `a_0 .. a_terms` of the newform with the given Hecke eigenvalues.
pub fn eigenform_qexp(f: &EigenData, terms: usize) -> Result<QExpansion, ColemanError> {
    let mut coeffs = vec![BigInt::zero(); terms + 1];
    if terms >= 1 {
        coeffs[1] = BigInt::one();
    }
    for n in 2..=terms as u64 {
        let mut a = BigInt::one();
        for (p, k) in factor(n) {
            let ap = f.a(p).ok_or(ColemanError::MissingEigenvalue { prime: p })?;
            let ap = BigInt::from(ap);
            let apk = if f.level % p == 0 {
                ap.pow(k)
            } else {
                let (mut prev, mut cur) = (BigInt::one(), ap.clone());
                for _ in 1..k {
                    let next = &ap * &cur - BigInt::from(p) * &prev;
                    prev = cur;
                    cur = next;
                }
                cur
            };
            a *= apk;
        }
        coeffs[n as usize] = a;
    }
    Ok(QExpansion {
        kind: QKind::Eigenform,
        offset: 0,
        coeffs,
    })
}

fn series_mul(a: &[BigInt], b: &[BigInt], n: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); n];
    for (i, x) in a.iter().enumerate().take(n) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// `j = q^-1 + 744 + 196884 q + ...` to `terms` coefficients, as `E_4^3 / Δ`.
pub fn j_qexp(terms: usize) -> QExpansion {
    assert!(terms >= 2);
    let n = terms;
    let mut e4 = vec![BigInt::one(); n];
    for (k, c) in e4.iter_mut().enumerate().skip(1) {
        *c = BigInt::from(240u32) * BigInt::from(sigma(k as u64, 3));
    }
    let e4_cubed = series_mul(&series_mul(&e4, &e4, n), &e4, n);
    // prod (1 - q^k)^24, then its inverse
    let mut prod = vec![BigInt::zero(); n];
    prod[0] = BigInt::one();
    for k in 1..n {
        for _ in 0..24 {
            for i in (k..n).rev() {
                let t = prod[i - k].clone();
                prod[i] -= t;
            }
        }
    }
    let mut inv = vec![BigInt::zero(); n];
    inv[0] = BigInt::one();
    for i in 1..n {
        let s: BigInt = (1..=i).map(|k| &prod[k] * &inv[i - k]).sum();
        inv[i] = -s;
    }
    QExpansion {
        kind: QKind::JFunction,
        offset: -1,
        coeffs: series_mul(&e4_cubed, &inv, n),
    }
}
