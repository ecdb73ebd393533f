//! 32-byte seeds, labelled sub-seeds, and the ChaCha20 generators built
//! from them.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Seed(pub [u8; 32]);

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("seed must be 64 hex digits (32 bytes)")]
pub struct SeedError;

impl FromStr for Seed {
    type Err = SeedError;
    fn from_str(s: &str) -> Result<Self, SeedError> {
        let bytes = hex::decode(s).map_err(|_| SeedError)?;
        Ok(Seed(bytes.try_into().map_err(|_| SeedError)?))
    }
}

impl TryFrom<String> for Seed {
    type Error = SeedError;
    fn try_from(s: String) -> Result<Self, SeedError> {
        s.parse()
    }
}

impl From<Seed> for String {
    fn from(s: Seed) -> String {
        s.to_string()
    }
}

impl fmt::Display for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(self.0))
    }
}

impl Seed {
    /// `SHA-256(seed || label || index)` with the index as a big-endian u64.
    pub fn derive(&self, label: &str, index: u64) -> Seed {
        let mut h = Sha256::new();
        h.update(self.0);
        h.update(label.as_bytes());
        h.update(index.to_be_bytes());
        Seed(h.finalize().into())
    }

    pub fn rng(&self, label: &str, index: u64) -> ChaCha20Rng {
        ChaCha20Rng::from_seed(self.derive(label, index).0)
    }
}
