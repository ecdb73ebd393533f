//! Byte encoding of transcripts.
//!
//! Three fields in order `t`, `c`, `response`, each written as a `u32`
//! byte length followed by the field body. All integers are big-endian.
//!
//! - `t`: `l` (u64), `m` (u32), `d` (u32), then `d` entries (u64).
//! - `c`: one u64, so its length prefix is always 8.
//! - `response`: `n` (u32), then `n` coordinates (i64, two's complement).

use sha2::{Digest, Sha256};
use thiserror::Error;

use super::Transcript;
use crate::coleman::PeriodVector;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WireError {
    #[error("transcript bytes end early")]
    Truncated,
    #[error("field {field} has length {got}, expected {expected}")]
    BadLength {
        field: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("{0} trailing bytes after the transcript")]
    Trailing(usize),
}

struct Reader<'a> {
    bytes: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], WireError> {
        if self.bytes.len() < n {
            return Err(WireError::Truncated);
        }
        let (head, rest) = self.bytes.split_at(n);
        self.bytes = rest;
        Ok(head)
    }

    fn u32(&mut self) -> Result<u32, WireError> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, WireError> {
        Ok(u64::from_be_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn field(&mut self) -> Result<Reader<'a>, WireError> {
        let n = self.u32()? as usize;
        Ok(Reader {
            bytes: self.take(n)?,
        })
    }

    fn done(&self) -> Result<(), WireError> {
        match self.bytes.len() {
            0 => Ok(()),
            n => Err(WireError::Trailing(n)),
        }
    }
}

fn push_field(out: &mut Vec<u8>, body: &[u8]) {
    out.extend_from_slice(&(body.len() as u32).to_be_bytes());
    out.extend_from_slice(body);
}

impl Transcript {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        push_field(&mut out, &self.t.canonical_bytes());
        push_field(&mut out, &self.c.to_be_bytes());
        let mut resp = Vec::with_capacity(4 + 8 * self.response.len());
        resp.extend_from_slice(&(self.response.len() as u32).to_be_bytes());
        for x in &self.response {
            resp.extend_from_slice(&x.to_be_bytes());
        }
        push_field(&mut out, &resp);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, WireError> {
        let mut r = Reader { bytes };

        let mut t = r.field()?;
        let l = t.u64()?;
        let m = t.u32()?;
        let d = t.u32()? as usize;
        if t.bytes.len() != 8 * d {
            return Err(WireError::BadLength {
                field: "t",
                expected: 16 + 8 * d,
                got: 16 + t.bytes.len(),
            });
        }
        let entries = (0..d).map(|_| t.u64()).collect::<Result<_, _>>()?;

        let mut c = r.field()?;
        if c.bytes.len() != 8 {
            return Err(WireError::BadLength {
                field: "c",
                expected: 8,
                got: c.bytes.len(),
            });
        }
        let c = c.u64()?;

        let mut resp = r.field()?;
        let n = resp.u32()? as usize;
        if resp.bytes.len() != 8 * n {
            return Err(WireError::BadLength {
                field: "response",
                expected: 4 + 8 * n,
                got: 4 + resp.bytes.len(),
            });
        }
        let response = (0..n)
            .map(|_| resp.u64().map(|x| x as i64))
            .collect::<Result<_, _>>()?;
        r.done()?;

        Ok(Transcript {
            t: PeriodVector {
                l,
                m,
                entries,
                forms: Vec::new(),
            },
            c,
            response,
        })
    }

    /// `SHA-256` of the wire bytes.
    pub fn digest(&self) -> [u8; 32] {
        Sha256::digest(self.to_bytes()).into()
    }
}
