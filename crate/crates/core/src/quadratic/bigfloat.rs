//! Fixed-point real and complex arithmetic on `BigInt` mantissas, enough to
//! evaluate `j(τ)` at CM points to a few thousand bits.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A context fixing the number of fractional bits.
#[derive(Clone, Copy, Debug)]
pub struct Fixed {
    pub prec: u32,
}

/// `re + i·im`, each scaled by `2^prec`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cx {
    pub re: BigInt,
    pub im: BigInt,
}

impl Fixed {
    pub fn one(&self) -> BigInt {
        BigInt::one() << self.prec
    }

    pub fn from_int(&self, n: i64) -> BigInt {
        BigInt::from(n) << self.prec
    }

    #[cfg(test)]
    pub fn from_ratio(&self, num: i64, den: i64) -> BigInt {
        (BigInt::from(num) << self.prec).div_floor(&BigInt::from(den))
    }

    pub fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a * b) >> self.prec
    }

    pub fn div(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a << self.prec).div_floor(b)
    }

    pub fn sqrt(&self, a: &BigInt) -> BigInt {
        assert!(!a.is_negative(), "sqrt of a negative number");
        (a << self.prec).sqrt()
    }

    /// `arctan(1/x)` for an integer `x > 1`.
    fn atan_inv(&self, x: i64) -> BigInt {
        let x = BigInt::from(x);
        let x2 = &x * &x;
        let mut term = self.one() / &x;
        let mut sum = BigInt::zero();
        let mut k = 0u64;
        while !term.is_zero() {
            let t = &term / BigInt::from(2 * k + 1);
            if k % 2 == 0 {
                sum += t;
            } else {
                sum -= t;
            }
            term /= &x2;
            k += 1;
        }
        sum
    }

    /// Machin's formula.
    pub fn pi(&self) -> BigInt {
        self.atan_inv(5) * 16 - self.atan_inv(239) * 4
    }

    /// `e^x` for real `x`, by argument halving and Taylor summation.
    pub fn exp(&self, x: &BigInt) -> BigInt {
        if x.is_negative() {
            return self.div(&self.one(), &self.exp(&-x));
        }
        let mut halvings = 0u32;
        let mut r = x.clone();
        let half = self.one() >> 1;
        while r > half {
            r >>= 1;
            halvings += 1;
        }
        let mut sum = self.one();
        let mut term = self.one();
        let mut n = 1u64;
        loop {
            term = self.mul(&term, &r) / BigInt::from(n);
            if term.is_zero() {
                break;
            }
            sum += &term;
            n += 1;
        }
        for _ in 0..halvings {
            sum = self.mul(&sum, &sum);
        }
        sum
    }

    /// `(cos x, sin x)` for `|x| <= 4`.
    pub fn cos_sin(&self, x: &BigInt) -> (BigInt, BigInt) {
        let x2 = self.mul(x, x);
        let mut cos = self.one();
        let mut sin = x.clone();
        let mut ct = self.one();
        let mut st = x.clone();
        let mut n = 1u64;
        loop {
            ct = -self.mul(&ct, &x2) / BigInt::from((2 * n - 1) * (2 * n));
            st = -self.mul(&st, &x2) / BigInt::from((2 * n) * (2 * n + 1));
            if ct.is_zero() && st.is_zero() {
                break;
            }
            cos += &ct;
            sin += &st;
            n += 1;
        }
        (cos, sin)
    }

    pub fn cx(&self, re: BigInt, im: BigInt) -> Cx {
        Cx { re, im }
    }

    pub fn cone(&self) -> Cx {
        Cx {
            re: self.one(),
            im: BigInt::zero(),
        }
    }

    pub fn cadd(&self, a: &Cx, b: &Cx) -> Cx {
        Cx {
            re: &a.re + &b.re,
            im: &a.im + &b.im,
        }
    }

    pub fn csub(&self, a: &Cx, b: &Cx) -> Cx {
        Cx {
            re: &a.re - &b.re,
            im: &a.im - &b.im,
        }
    }

    pub fn cmul(&self, a: &Cx, b: &Cx) -> Cx {
        Cx {
            re: (&a.re * &b.re - &a.im * &b.im) >> self.prec,
            im: (&a.re * &b.im + &a.im * &b.re) >> self.prec,
        }
    }

    pub fn cscale(&self, a: &Cx, k: &BigInt) -> Cx {
        Cx {
            re: &a.re * k,
            im: &a.im * k,
        }
    }

    pub fn cdiv(&self, a: &Cx, b: &Cx) -> Cx {
        let n = &b.re * &b.re + &b.im * &b.im;
        let re = (&a.re * &b.re + &a.im * &b.im) << self.prec;
        let im = (&a.im * &b.re - &a.re * &b.im) << self.prec;
        Cx {
            re: re.div_floor(&n),
            im: im.div_floor(&n),
        }
    }

    /// Nearest integer to a fixed-point value, and the absolute distance to
    /// it as an `f64`.
    pub fn round(&self, x: &BigInt) -> (BigInt, f64) {
        let half = BigInt::one() << (self.prec - 1);
        let n = (x + &half) >> self.prec;
        let diff = x - (&n << self.prec);
        (n, self.to_f64(&diff))
    }

    pub fn to_f64(&self, x: &BigInt) -> f64 {
        let bits = x.bits();
        if bits <= 1000 {
            x.to_f64().unwrap_or(f64::INFINITY) / 2f64.powi(self.prec as i32)
        } else {
            let shift = bits - 900;
            let head = (x >> shift).to_f64().unwrap_or(f64::INFINITY);
            head * 2f64.powi(shift as i32 - self.prec as i32)
        }
    }
}
