//! `F_{p^2} = F_p[s] / (s^2 - n)` with `n` the smallest quadratic non-residue.

use serde::{Deserialize, Serialize};

use crate::arith::pow_mod;

/// `a + b s`, coordinates reduced mod `p`. Serialized as `[a, b]`.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct FiniteFieldElem(pub u64, pub u64);

impl FiniteFieldElem {
    pub fn is_zero(self) -> bool {
        self == Self(0, 0)
    }

    pub fn in_prime_field(self) -> bool {
        self.1 == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fp2 {
    pub p: u64,
    pub nonresidue: u64,
}

impl Fp2 {
    /// The field for an odd prime `p`.
    pub fn new(p: u64) -> Self {
        assert!(
            p > 2 && crate::arith::is_prime(p),
            "{p} is not an odd prime"
        );
        let nonresidue = (2..p)
            .find(|&n| pow_mod(n, (p - 1) / 2, p) == p - 1)
            .expect("odd prime");
        Self { p, nonresidue }
    }

    fn m(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn from_int(&self, n: i128) -> FiniteFieldElem {
        FiniteFieldElem(n.rem_euclid(self.p as i128) as u64, 0)
    }

    pub fn zero(&self) -> FiniteFieldElem {
        FiniteFieldElem(0, 0)
    }

    pub fn one(&self) -> FiniteFieldElem {
        FiniteFieldElem(1, 0)
    }

    pub fn add(&self, x: FiniteFieldElem, y: FiniteFieldElem) -> FiniteFieldElem {
        FiniteFieldElem((x.0 + y.0) % self.p, (x.1 + y.1) % self.p)
    }

    pub fn neg(&self, x: FiniteFieldElem) -> FiniteFieldElem {
        FiniteFieldElem((self.p - x.0) % self.p, (self.p - x.1) % self.p)
    }

    pub fn sub(&self, x: FiniteFieldElem, y: FiniteFieldElem) -> FiniteFieldElem {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: FiniteFieldElem, y: FiniteFieldElem) -> FiniteFieldElem {
        let bd = self.m(x.1, y.1);
        FiniteFieldElem(
            (self.m(x.0, y.0) + self.m(bd, self.nonresidue)) % self.p,
            (self.m(x.0, y.1) + self.m(x.1, y.0)) % self.p,
        )
    }

    pub fn pow(&self, x: FiniteFieldElem, mut e: u128) -> FiniteFieldElem {
        let (mut base, mut acc) = (x, self.one());
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Inverse via the norm `a^2 - n b^2` down to `F_p`.
    pub fn inv(&self, x: FiniteFieldElem) -> Option<FiniteFieldElem> {
        let norm = (self.m(x.0, x.0) + self.p - self.m(self.nonresidue, self.m(x.1, x.1))) % self.p;
        if norm == 0 {
            return None;
        }
        let ni = pow_mod(norm, self.p - 2, self.p);
        Some(FiniteFieldElem(
            self.m(x.0, ni),
            self.m((self.p - x.1) % self.p, ni),
        ))
    }

    /// Every element, in lexicographic order of coordinates.
    pub fn elements(&self) -> impl Iterator<Item = FiniteFieldElem> + '_ {
        (0..self.p).flat_map(move |a| (0..self.p).map(move |b| FiniteFieldElem(a, b)))
    }
}
