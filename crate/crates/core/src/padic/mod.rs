//! Truncated `l`-adic numbers with explicit precision, power series over
//! them, and Hensel lifting.

mod series;

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

pub use series::PadicSeries;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PadicError {
    #[error("division by a value that is zero at its precision")]
    DivisionByIndeterminate,
    #[error("mixed primes {0} and {1}")]
    PrimeMismatch(u64, u64),
    #[error("linear coefficient is not a unit")]
    NonUnitLinearTerm,
    #[error("inner series must have zero constant term")]
    NonzeroConstantTerm,
    #[error("root {root} mod {l} is not simple")]
    SingularRoot { root: u64, l: u64 },
    #[error("invalid l-adic data: {0}")]
    Invalid(String),
}

/// An element of `Q_l` known modulo `l^m`.
///
/// `residue` holds `x * l^s mod l^(m+s)` with `s = max(0, -val)`, so for
/// integral values it is just `x mod l^m`. `val` is the valuation of the
/// known digits, or `m` when all of them vanish; it is therefore a lower
/// bound for the valuation of the true value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPadic")]
pub struct TruncatedPadic {
    pub l: u64,
    pub m: i64,
    #[serde(with = "crate::serde_dec::uint")]
    pub residue: BigUint,
    pub val: i64,
}

#[derive(Deserialize)]
struct RawPadic {
    l: u64,
    m: i64,
    #[serde(with = "crate::serde_dec::uint")]
    residue: BigUint,
    val: i64,
}

impl TryFrom<RawPadic> for TruncatedPadic {
    type Error = PadicError;

    fn try_from(r: RawPadic) -> Result<Self, PadicError> {
        if r.l < 2 || !crate::arith::is_prime(r.l) {
            return Err(PadicError::Invalid(format!("{} is not prime", r.l)));
        }
        let s = (-r.val).max(0);
        let x = Self::make(r.l, r.m, BigInt::from(r.residue.clone()), s);
        if x.residue != r.residue || x.val != r.val {
            return Err(PadicError::Invalid("residue and valuation disagree".into()));
        }
        Ok(x)
    }
}

pub(crate) fn lpow(l: u64, k: i64) -> BigInt {
    debug_assert!(k >= 0);
    BigInt::from(l).pow(k as u32)
}

/// Valuation of a nonzero big integer.
fn big_val(n: &BigInt, l: u64) -> i64 {
    let lb = BigInt::from(l);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&lb);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

fn int_val(n: i64, l: u64) -> i64 {
    crate::arith::valuation(n as i128, l).expect("nonzero") as i64
}

impl TruncatedPadic {
    /// The value `num / l^scale` known modulo `l^m`, normalized.
    fn make(l: u64, m: i64, num: BigInt, scale: i64) -> Self {
        let (mut num, mut scale) = (num, scale);
        if scale < 0 {
            num *= lpow(l, -scale);
            scale = 0;
        }
        if m + scale <= 0 {
            return Self {
                l,
                m,
                residue: BigUint::zero(),
                val: m,
            };
        }
        num = num.mod_floor(&lpow(l, m + scale));
        if num.is_zero() {
            return Self {
                l,
                m,
                residue: BigUint::zero(),
                val: m,
            };
        }
        let val = big_val(&num, l) - scale;
        let s = (-val).max(0);
        let num = num / lpow(l, scale - s);
        Self {
            l,
            m,
            residue: num.to_biguint().expect("reduced"),
            val,
        }
    }

    fn shift(&self) -> i64 {
        (-self.val).max(0)
    }

    /// `x * l^big` as an integer, for `big >= shift`.
    fn scaled(&self, big: i64) -> BigInt {
        BigInt::from(self.residue.clone()) * lpow(self.l, big - self.shift())
    }

    fn check(&self, other: &Self) {
        assert_eq!(
            self.l,
            other.l,
            "{}",
            PadicError::PrimeMismatch(self.l, other.l)
        );
    }

    pub fn zero(l: u64, m: i64) -> Self {
        Self::make(l, m, BigInt::zero(), 0)
    }

    pub fn one(l: u64, m: i64) -> Self {
        Self::make(l, m, BigInt::one(), 0)
    }

    pub fn from_int(n: i64, l: u64, m: i64) -> Self {
        Self::make(l, m, BigInt::from(n), 0)
    }

    pub fn from_bigint(n: &BigInt, l: u64, m: i64) -> Self {
        Self::make(l, m, n.clone(), 0)
    }

    /// `num / den` to absolute precision `m`.
    pub fn from_ratio(num: &BigInt, den: &BigInt, l: u64, m: i64) -> Self {
        assert!(!den.is_zero());
        let v = big_val(den, l);
        let unit = den / lpow(l, v);
        let k = (m + v).max(1);
        let modulus = lpow(l, k);
        let inv = unit.mod_floor(&modulus).modinv(&modulus).expect("unit");
        Self::make(l, m, num * inv, v)
    }

    pub fn precision(&self) -> i64 {
        self.m
    }

    pub fn valuation(&self) -> i64 {
        self.val
    }

    /// True when every known digit vanishes.
    pub fn is_zero(&self) -> bool {
        self.residue.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        self.val == 0 && self.m > 0
    }

    /// Drop digits beyond `l^m`.
    pub fn with_precision(&self, m: i64) -> Self {
        Self::make(
            self.l,
            self.m.min(m),
            self.residue.clone().into(),
            self.shift(),
        )
    }

    /// The residue as an integer mod `l^m`, for integral values.
    pub fn to_bigint(&self) -> Option<BigInt> {
        (self.val >= 0).then(|| BigInt::from(self.residue.clone()))
    }

    /// Whether `self` and `other` agree at the smaller of their precisions.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        let big = self.shift().max(other.shift());
        Self::make(
            self.l,
            self.m.min(other.m),
            self.scaled(big) + other.scaled(big),
            big,
        )
    }

    pub fn neg(&self) -> Self {
        Self::make(
            self.l,
            self.m,
            -BigInt::from(self.residue.clone()),
            self.shift(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        let m = (self.m + other.val).min(other.m + self.val);
        let num = BigInt::from(&self.residue * &other.residue);
        Self::make(self.l, m, num, self.shift() + other.shift())
    }

    pub fn div(&self, other: &Self) -> Result<Self, PadicError> {
        if self.l != other.l {
            return Err(PadicError::PrimeMismatch(self.l, other.l));
        }
        if other.is_zero() {
            return Err(PadicError::DivisionByIndeterminate);
        }
        let (vx, vy) = (self.val, other.val);
        let m = (self.m - vy).min(vx - vy + other.m - vy);
        let unit = BigInt::from(other.residue.clone()) / lpow(self.l, vy + other.shift());
        let scale = self.shift() + vy;
        let modulus = lpow(self.l, (m + scale).max(1));
        let inv = unit.mod_floor(&modulus).modinv(&modulus).expect("unit");
        Ok(Self::make(
            self.l,
            m,
            BigInt::from(self.residue.clone()) * inv,
            scale,
        ))
    }

    /// Multiplication by an exact integer.
    pub fn mul_int(&self, n: i64) -> Self {
        if n == 0 {
            return Self::zero(self.l, self.m.max(0));
        }
        let m = self.m + int_val(n, self.l);
        Self::make(
            self.l,
            m,
            BigInt::from(self.residue.clone()) * n,
            self.shift(),
        )
    }

    /// Division by an exact nonzero integer; loses `v_l(n)` digits.
    pub fn div_int(&self, n: i64) -> Self {
        let v = int_val(n, self.l);
        let unit = n / (self.l as i64).pow(v as u32);
        let scale = self.shift() + v;
        let m = self.m - v;
        let modulus = lpow(self.l, (m + scale).max(1));
        let inv = BigInt::from(unit)
            .mod_floor(&modulus)
            .modinv(&modulus)
            .expect("unit");
        Self::make(self.l, m, BigInt::from(self.residue.clone()) * inv, scale)
    }

    pub fn pow(&self, k: u32) -> Self {
        if k == 0 {
            return Self::one(self.l, self.m.max(1));
        }
        let mut acc = self.clone();
        for _ in 1..k {
            acc = acc.mul(self);
        }
        acc
    }
}

impl fmt::Display for TruncatedPadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.shift();
        if s > 0 {
            write!(
                f,
                "{}/{}^{} + O({}^{})",
                self.residue, self.l, s, self.l, self.m
            )
        } else {
            write!(f, "{} + O({}^{})", self.residue, self.l, self.m)
        }
    }
}

fn eval_mod(poly: &[BigInt], x: &BigInt, modulus: &BigInt) -> BigInt {
    poly.iter()
        .rev()
        .fold(BigInt::zero(), |acc, c| (acc * x + c).mod_floor(modulus))
}

/// All roots of `poly` (constant term first) in `Z_l` to precision `m`,
/// lifted from the roots mod `l`. Every root mod `l` must be simple.
pub fn hensel_root(poly: &[BigInt], l: u64, m: i64) -> Result<Vec<TruncatedPadic>, PadicError> {
    let deriv: Vec<BigInt> = poly
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect();
    let lb = BigInt::from(l);
    let mut out = Vec::new();
    for r0 in 0..l {
        let r0b = BigInt::from(r0);
        if !eval_mod(poly, &r0b, &lb).is_zero() {
            continue;
        }
        if eval_mod(&deriv, &r0b, &lb).is_zero() {
            return Err(PadicError::SingularRoot { root: r0, l });
        }
        let mut r = r0b;
        let mut k = 1;
        while k < m {
            k = (2 * k).min(m);
            let modulus = lpow(l, k);
            let f = eval_mod(poly, &r, &modulus);
            let df = eval_mod(&deriv, &r, &modulus);
            let inv = df.modinv(&modulus).expect("simple root");
            r = (r - f * inv).mod_floor(&modulus);
        }
        out.push(TruncatedPadic::from_bigint(&r, l, m));
    }
    Ok(out)
}
