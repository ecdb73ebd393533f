//! Hilbert class polynomials from high-precision values of `j` at the CM
//! points of the reduced forms.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::bigfloat::{Cx, Fixed};
use super::{enumerate_class_group, Discriminant, QuadError, QuadForm};
use crate::arith::sigma;

/// Largest `|D|` accepted by the Hilbert class polynomial routines.
pub const HILBERT_DISC_BOUND: i64 = 4000;

const GUARD_BITS: u32 = 64;

/// `j((-b + sqrt(D)) / 2a)` at `fx.prec` fractional bits.
fn j_at_form(fx: &Fixed, f: &QuadForm) -> Cx {
    let d = -f.discriminant();
    let pi = fx.pi();
    let sqrt_d = fx.sqrt(&fx.from_int(d));
    // t = 2π·Im τ = π·sqrt|D|/a, θ = 2π·Re τ = -π b / a
    let t = fx.mul(&pi, &sqrt_d) / BigInt::from(f.a);
    let theta = -(&pi * BigInt::from(f.b)) / BigInt::from(f.a);
    let (cos, sin) = fx.cos_sin(&theta);
    let big = fx.exp(&t);
    let small = fx.exp(&-&t);
    let q_inv = fx.cx(fx.mul(&big, &cos), -fx.mul(&big, &sin));
    let q = fx.cx(fx.mul(&small, &cos), fx.mul(&small, &sin));

    let mut powers = vec![fx.cone(), q.clone()];
    loop {
        let next = fx.cmul(powers.last().unwrap(), &q);
        // arithmetic shifts floor toward -inf, so stop at unit magnitude
        if next.re.magnitude().bits() <= 1 && next.im.magnitude().bits() <= 1 {
            break;
        }
        powers.push(next);
    }
    let nmax = powers.len() - 1;

    let mut e4 = fx.cone();
    for (n, qn) in powers.iter().enumerate().skip(1) {
        let coeff = BigInt::from(240u32) * BigInt::from(sigma(n as u64, 3));
        e4 = fx.cadd(&e4, &fx.cscale(qn, &coeff));
    }
    // Euler's pentagonal number theorem for prod (1 - q^n).
    let mut eta = fx.cone();
    for k in 1i64.. {
        let e1 = (k * (3 * k - 1) / 2) as usize;
        if e1 > nmax {
            break;
        }
        let e2 = (k * (3 * k + 1) / 2) as usize;
        let mut term = powers[e1].clone();
        if e2 <= nmax {
            term = fx.cadd(&term, &powers[e2]);
        }
        eta = if k % 2 == 1 {
            fx.csub(&eta, &term)
        } else {
            fx.cadd(&eta, &term)
        };
    }
    // eta^24 = ((eta^3)^2)^2)^2
    let e3 = fx.cmul(&fx.cmul(&eta, &eta), &eta);
    let e6 = fx.cmul(&e3, &e3);
    let e12 = fx.cmul(&e6, &e6);
    let e24 = fx.cmul(&e12, &e12);
    let e4_cubed = fx.cmul(&fx.cmul(&e4, &e4), &e4);
    fx.cmul(&q_inv, &fx.cdiv(&e4_cubed, &e24))
}

/// Bits of working precision that should suffice for `D`.
fn estimated_bits(forms: &[QuadForm], d: i64) -> u32 {
    let sqrt_d = (d.unsigned_abs() as f64).sqrt();
    let log2_size: f64 = forms
        .iter()
        .map(|f| std::f64::consts::PI * sqrt_d / f.a as f64 / std::f64::consts::LN_2 + 1.0)
        .sum();
    log2_size.ceil() as u32 + forms.len() as u32 + GUARD_BITS
}

/// Monic integer polynomial (constant term first) whose roots are `j(τ_f)`
/// over the reduced forms `f` of discriminant `d`, evaluated with `bits`
/// fractional bits. Fails with `PrecisionExhausted` when some coefficient
/// is not within 0.25 of an integer.
pub fn hilbert_class_poly(d: Discriminant, bits: u32) -> Result<Vec<BigInt>, QuadError> {
    let dv = d.value();
    if -dv > HILBERT_DISC_BOUND {
        return Err(QuadError::DiscriminantTooLarge(dv, HILBERT_DISC_BOUND));
    }
    let forms = enumerate_class_group(d);
    let fx = Fixed { prec: bits.max(32) };
    let mut poly: Vec<Cx> = vec![fx.cone()];
    for f in &forms {
        let j = j_at_form(&fx, f);
        // poly *= (X - j)
        let mut next = vec![fx.cx(BigInt::zero(), BigInt::zero()); poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i + 1] = fx.cadd(&next[i + 1], c);
            next[i] = fx.csub(&next[i], &fx.cmul(c, &j));
        }
        poly = next;
    }
    let mut residual = 0f64;
    let mut out = Vec::with_capacity(poly.len());
    for c in &poly {
        let (n, diff) = fx.round(&c.re);
        residual = residual.max(diff.abs()).max(fx.to_f64(&c.im).abs());
        out.push(n);
    }
    if residual >= 0.25 || !residual.is_finite() {
        return Err(QuadError::PrecisionExhausted { bits, residual });
    }
    debug_assert!(out.last().is_some_and(|c| c.is_positive()));
    Ok(out)
}

/// `hilbert_class_poly` starting from an estimated precision and doubling
/// on rounding failure.
pub fn hilbert_class_poly_auto(d: Discriminant) -> Result<Vec<BigInt>, QuadError> {
    let forms = enumerate_class_group(d);
    let mut bits = estimated_bits(&forms, d.value());
    let mut last = None;
    for _ in 0..4 {
        match hilbert_class_poly(d, bits) {
            Ok(p) => return Ok(p),
            Err(e @ QuadError::PrecisionExhausted { .. }) => {
                last = Some(e);
                bits *= 2;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

/// A polynomial `B(X)` with coefficients in the order of discriminant `d`
/// such that `B(j_f) = j_{f g} H'(j_f)` for every reduced form `f`, where
/// `H` is the Hilbert class polynomial. Coefficient `(u, v)` stands for
/// `(u + v sqrt(d)) / 2`; constant term first.
pub fn class_action_poly(
    d: Discriminant,
    g: &QuadForm,
) -> Result<Vec<(BigInt, BigInt)>, QuadError> {
    let dv = d.value();
    if -dv > HILBERT_DISC_BOUND {
        return Err(QuadError::DiscriminantTooLarge(dv, HILBERT_DISC_BOUND));
    }
    if g.discriminant() != dv {
        return Err(QuadError::DiscriminantMismatch(dv, g.discriminant()));
    }
    let forms = enumerate_class_group(d);
    let extra =
        (std::f64::consts::PI * (dv.unsigned_abs() as f64).sqrt() / std::f64::consts::LN_2) as u32;
    let mut bits = estimated_bits(&forms, dv) + extra;
    let mut last = None;
    for _ in 0..4 {
        match class_action_at(d, &forms, g, bits) {
            Ok(p) => return Ok(p),
            Err(e @ QuadError::PrecisionExhausted { .. }) => {
                last = Some(e);
                bits *= 2;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

fn class_action_at(
    d: Discriminant,
    forms: &[QuadForm],
    g: &QuadForm,
    bits: u32,
) -> Result<Vec<(BigInt, BigInt)>, QuadError> {
    let fx = Fixed { prec: bits.max(32) };
    let js: Vec<Cx> = forms.iter().map(|f| j_at_form(&fx, f)).collect();
    let zero = || fx.cx(BigInt::zero(), BigInt::zero());
    let h = forms.len();
    let mut acc = vec![zero(); h];
    for (i, f) in forms.iter().enumerate() {
        let target = super::compose(f, g)?;
        let k = forms
            .iter()
            .position(|x| *x == target)
            .expect("composition stays in the class group");
        // prod_{m != i} (X - j_m), times j_{f g}
        let mut poly = vec![js[k].clone()];
        for (m, jm) in js.iter().enumerate() {
            if m == i {
                continue;
            }
            let mut next = vec![zero(); poly.len() + 1];
            for (t, c) in poly.iter().enumerate() {
                next[t + 1] = fx.cadd(&next[t + 1], c);
                next[t] = fx.csub(&next[t], &fx.cmul(c, jm));
            }
            poly = next;
        }
        for (t, c) in poly.iter().enumerate() {
            acc[t] = fx.cadd(&acc[t], c);
        }
    }
    let half_sqrt = fx.sqrt(&fx.from_int(-d.value())) / BigInt::from(2);
    let mut residual = 0f64;
    let mut out = Vec::with_capacity(h);
    for c in &acc {
        let (u, du) = fx.round(&(&c.re * BigInt::from(2)));
        let (v, dv) = fx.round(&fx.div(&c.im, &half_sqrt));
        residual = residual.max(du.abs()).max(dv.abs());
        if ((&u - &v * BigInt::from(d.value())) % BigInt::from(2)).is_zero() {
            out.push((u, v));
        } else {
            residual = f64::INFINITY;
        }
    }
    if residual >= 0.25 || !residual.is_finite() {
        return Err(QuadError::PrecisionExhausted { bits, residual });
    }
    Ok(out)
}
