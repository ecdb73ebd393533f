//! Modular symbols for `Γ_0(N)` in weight two: Manin-symbol presentation,
//! boundary map, Hecke operators, rational eigen-decomposition, and the
//! homology classes attached to ideal classes.

mod basis;
mod construct;
mod cusps;
mod eigen;
mod hecke;
mod p1;

use thiserror::Error;

pub use basis::{genus_x0, lift_to_sl2, CuspDivisor, HomologyClass, ManinBasis, Relation};
pub use cusps::{cusp_count, cusps_equivalent, Cusp, CuspList};
pub use eigen::{EigenData, Functional};
pub use hecke::heilbronn_merel;
pub use p1::{psi, P1List};

use crate::quadratic::QuadError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModsymError {
    #[error("level {level}: T_{prime} has an eigenvalue outside Q on the cuspidal subspace")]
    UnsupportedHeckeField { level: u64, prime: u64 },
    #[error("level {level}: an eigenspace of dimension {dim} did not split into +/- lines")]
    EigenspaceTooLarge { level: u64, dim: usize },
    #[error("level {level}: generator is not an eigenvector of T_{prime}")]
    NotEigen { level: u64, prime: u64 },
    #[error("no prime coprime to the level was supplied")]
    NoGoodPrime,
    #[error("discriminant {disc} is not coprime to level {level}")]
    DiscriminantLevelClash { disc: i64, level: u64 },
    #[error("factor-base prime {prime} divides N*l (N = {level}, l = {ell})")]
    PrimeDividesLevel { prime: u64, level: u64, ell: u64 },
    #[error("homology class of level {got} used with a basis of level {expected}")]
    LevelMismatch { expected: u64, got: u64 },
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// Primes used for eigen-decomposition when the caller gives none.
pub const DEFAULT_EIGEN_PRIMES: [u64; 9] = [2, 3, 5, 7, 11, 13, 17, 19, 23];

/// Genus and cusp count combined: `2g + c - 1`.
pub fn expected_rank(n: u64) -> usize {
    2 * genus_x0(n) as usize + cusp_count(n) - 1
}
