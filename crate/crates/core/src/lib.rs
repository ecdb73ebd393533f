//! Class groups of imaginary quadratic orders, modular-symbol homology of
//! `X_0(N)`, truncated `l`-adic period vectors, and the search problem and
//! identification protocol built on top of them.

pub mod arith;
pub mod cli;
pub mod coleman;
pub mod linalg;
pub mod modsym;
pub mod msi;
pub mod padic;
pub mod protocol;
pub mod quadratic;
pub mod seed;
pub mod serde_dec;
pub mod ssgraph;
