//! The three-move identification protocol over `Π_m` and a PRF keyed by a
//! short path.

mod wire;

use num_bigint::BigUint;
use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::coleman::{PeriodMap, PeriodVector};
use crate::msi::{sample_instance, MsiError, Path, PathModel};
use crate::seed::Seed;

pub use wire::WireError;

/// Fresh commitments tried before `prove_round` gives up.
pub const MAX_RESAMPLES: u64 = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error("challenge {c} outside [0, {q})")]
    InvalidChallenge { c: u64, q: u64 },
    #[error("response norm {norm} exceeds the bound {bound}")]
    NormBoundExceeded { norm: u64, bound: u64 },
    #[error("both transcripts carry challenge {0}")]
    ChallengeCollision(u64),
    #[error("transcripts have different commitments")]
    CommitmentMismatch,
    #[error("response difference is not divisible by {0}")]
    NotDivisible(i64),
    #[error("secret key is not a valid path of the model")]
    InvalidKey,
    #[error(transparent)]
    Wire(#[from] WireError),
    #[error(transparent)]
    Msi(#[from] MsiError),
}

/// Public protocol settings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolParams {
    /// Challenges are drawn from `[0, challenge_modulus)`.
    pub challenge_modulus: u64,
    /// Independent rounds per identification.
    pub rounds: u32,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        Self {
            challenge_modulus: 2,
            rounds: 1,
        }
    }
}

impl ProtocolParams {
    /// `L' = L (1 + q_ch - 1)`: the largest honest response norm.
    pub fn response_bound(&self, len: usize) -> u64 {
        len as u64 * self.challenge_modulus
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeyPair {
    pub sk: Path,
    pub pk: PeriodVector,
}

/// Secret key: a uniform path of length `L`; public key: its image.
pub fn keygen(model: &PathModel, a: &PeriodMap, seed: &Seed) -> Result<KeyPair, ProtocolError> {
    let inst = sample_instance(model, a, &seed.derive("keygen", 0))?;
    Ok(KeyPair {
        sk: inst.witness.expect("sampled instances keep their witness"),
        pk: inst.y,
    })
}

/// One round as seen by the verifier.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    /// Commitment `t`. Form labels are not part of a transcript.
    pub t: PeriodVector,
    pub c: u64,
    /// Response in generator coordinates.
    pub response: Vec<i64>,
}

pub fn l1_norm(x: &[i64]) -> u64 {
    x.iter().map(|v| v.unsigned_abs()).sum()
}

fn bare(v: PeriodVector) -> PeriodVector {
    PeriodVector {
        forms: Vec::new(),
        ..v
    }
}

/// Commitment path and `t = Π_m(γ_com)` for the given attempt.
pub fn commit(model: &PathModel, a: &PeriodMap, seed: &Seed, attempt: u64) -> (Path, PeriodVector) {
    let mut rng = seed.rng("commit", attempt);
    let path = model.sample_path(model.max_len, &mut rng);
    let t = bare(a.apply(&model.coords(&path)));
    (path, t)
}

/// Honest prover for challenge `c`: `response = coords(γ_com) + c coords(γ_sk)`.
pub fn prove_round(
    model: &PathModel,
    a: &PeriodMap,
    key: &KeyPair,
    params: &ProtocolParams,
    seed: &Seed,
    c: u64,
) -> Result<Transcript, ProtocolError> {
    if c >= params.challenge_modulus {
        return Err(ProtocolError::InvalidChallenge {
            c,
            q: params.challenge_modulus,
        });
    }
    if !model.is_valid(&key.sk) {
        return Err(ProtocolError::InvalidKey);
    }
    let bound = params.response_bound(model.max_len);
    let sk = model.coords(&key.sk);
    let mut last = 0;
    for attempt in 0..MAX_RESAMPLES {
        let (com, t) = commit(model, a, seed, attempt);
        let response: Vec<i64> = model
            .coords(&com)
            .iter()
            .zip(&sk)
            .map(|(x, s)| x + c as i64 * s)
            .collect();
        last = l1_norm(&response);
        if last <= bound {
            return Ok(Transcript { t, c, response });
        }
    }
    Err(ProtocolError::NormBoundExceeded { norm: last, bound })
}

/// Accept iff `|response|_1 <= bound` and `A response = t + c pk`.
pub fn verify(tr: &Transcript, pk: &PeriodVector, a: &PeriodMap, bound: u64) -> bool {
    if l1_norm(&tr.response) > bound || tr.response.len() != a.r() {
        return false;
    }
    let d = a.d();
    if [tr.t.entries.len(), pk.entries.len()] != [d, d]
        || (tr.t.l, tr.t.m) != (a.l, a.m)
        || (pk.l, pk.m) != (a.l, a.m)
    {
        return false;
    }
    let q = a.modulus() as u128;
    let lhs = a.apply(&tr.response).entries;
    let rhs =
        tr.t.entries
            .iter()
            .zip(&pk.entries)
            .map(|(&t, &y)| ((t as u128 + tr.c as u128 * y as u128) % q) as u64);
    lhs.into_iter().eq(rhs)
}

/// `(response - response') / (c - c')` from two transcripts sharing `t`.
pub fn extract(first: &Transcript, second: &Transcript) -> Result<Vec<i64>, ProtocolError> {
    if first.c == second.c {
        return Err(ProtocolError::ChallengeCollision(first.c));
    }
    if first.t != second.t || first.response.len() != second.response.len() {
        return Err(ProtocolError::CommitmentMismatch);
    }
    let dc = first.c as i64 - second.c as i64;
    first
        .response
        .iter()
        .zip(&second.response)
        .map(|(x, y)| {
            let diff = x - y;
            if diff % dc == 0 {
                Ok(diff / dc)
            } else {
                Err(ProtocolError::NotDivisible(dc))
            }
        })
        .collect()
}

/// A transcript for challenge `c` built from `pk` alone: draw the response
/// as `coords(γ_1) + c coords(γ_2)` for independent uniform paths, then set
/// `t = A response - c pk`.
pub fn simulate(
    model: &PathModel,
    a: &PeriodMap,
    pk: &PeriodVector,
    c: u64,
    seed: &Seed,
) -> Transcript {
    let mut rng = seed.rng("simulate", 0);
    let g1 = model.coords(&model.sample_path(model.max_len, &mut rng));
    let g2 = model.coords(&model.sample_path(model.max_len, &mut rng));
    let response: Vec<i64> = g1.iter().zip(&g2).map(|(x, y)| x + c as i64 * y).collect();
    let t = bare(
        a.apply(&response).sub(
            &PeriodVector {
                forms: a.forms.clone(),
                ..pk.clone()
            }
            .scale(c as i64),
        ),
    );
    Transcript { t, c, response }
}

/// Outcome of a full identification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Identification {
    pub params: ProtocolParams,
    pub transcripts: Vec<Transcript>,
    pub accepted: bool,
}

/// `params.rounds` independent rounds with verifier challenges drawn from
/// the seed; accepted iff every round verifies.
pub fn identify(
    model: &PathModel,
    a: &PeriodMap,
    key: &KeyPair,
    params: &ProtocolParams,
    seed: &Seed,
) -> Result<Identification, ProtocolError> {
    let bound = params.response_bound(model.max_len);
    let mut transcripts = Vec::with_capacity(params.rounds as usize);
    for i in 0..params.rounds as u64 {
        let c = seed
            .rng("challenge", i)
            .gen_range(0..params.challenge_modulus);
        transcripts.push(prove_round(
            model,
            a,
            key,
            params,
            &seed.derive("round", i),
            c,
        )?);
    }
    let accepted = transcripts.iter().all(|tr| verify(tr, &key.pk, a, bound));
    Ok(Identification {
        params: *params,
        transcripts,
        accepted,
    })
}

/// `x` read as a big-endian integer and written with exactly `k` base-`b`
/// digits, least significant first, where `k` is least with `b^k >= 256^len`.
fn input_digits(x: &[u8], b: u64) -> Vec<u64> {
    let base = BigUint::from(b);
    let range = BigUint::from(1u32) << (8 * x.len());
    let mut k = 0;
    let mut reach = BigUint::from(1u32);
    while reach < range {
        reach *= &base;
        k += 1;
    }
    let mut n = BigUint::from_bytes_be(x);
    (0..k)
        .map(|_| {
            let r = &n % &base;
            n /= &base;
            r.iter_u64_digits().next().unwrap_or(0)
        })
        .collect()
}

/// The word `γ_x` for input `x`, continuing from the last generator of
/// `sk`. Each digit picks among the admissible successors, in order; the
/// base is the least out-degree so every digit is always admissible.
pub fn input_word(model: &PathModel, sk: &Path, x: &[u8]) -> Path {
    let b = model
        .follows
        .iter()
        .map(Vec::len)
        .min()
        .unwrap_or(0)
        .min(model.generators) as u64;
    if x.is_empty() || b < 2 {
        return Path::default();
    }
    let mut last = sk.indices.last().copied();
    let mut indices = Vec::new();
    for d in input_digits(x, b) {
        let g = match last {
            Some(h) => model.follows[h][d as usize],
            None => d as usize,
        };
        indices.push(g);
        last = Some(g);
    }
    Path { indices }
}

/// Combined coordinates of `sk` followed by `γ_x`, each reduced to its
/// balanced residue mod `l^m` so the norm stays within `r l^m / 2`.
pub fn combined_coords(model: &PathModel, a: &PeriodMap, sk: &Path, x: &[u8]) -> Vec<i64> {
    let q = a.modulus() as i64;
    let mut path = sk.clone();
    path.indices.extend(input_word(model, sk, x).indices);
    model
        .coords(&path)
        .into_iter()
        .map(|v| {
            let r = v.rem_euclid(q);
            if r > q / 2 {
                r - q
            } else {
                r
            }
        })
        .collect()
}

/// `SHA-256` of the canonical bytes of `Π_m` of the combined path.
pub fn prf_eval(model: &PathModel, a: &PeriodMap, sk: &Path, x: &[u8]) -> [u8; 32] {
    let v = a.apply(&combined_coords(model, a, sk, x));
    Sha256::digest(v.canonical_bytes()).into()
}
