//! Binary quadratic forms of negative discriminant: reduction, composition,
//! class-group enumeration, prime forms, CM points and Hilbert class
//! polynomials.

mod bigfloat;
mod hilbert;

use std::collections::{HashMap, VecDeque};
use std::fmt;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{gcd, gcd_i128, is_prime, xgcd};

pub use hilbert::{
    class_action_poly, hilbert_class_poly, hilbert_class_poly_auto, HILBERT_DISC_BOUND,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("invalid discriminant {0}: must be negative and 0 or 1 mod 4")]
    InvalidDiscriminant(i64),
    #[error("form [{0}, {1}, {2}] is not positive definite")]
    NotPositiveDefinite(i64, i64, i64),
    #[error("form [{0}, {1}, {2}] is not primitive")]
    NotPrimitive(i64, i64, i64),
    #[error("discriminant mismatch: {0} vs {1}")]
    DiscriminantMismatch(i64, i64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("no word of length <= {cap} over the factor base reaches the class")]
    FactorBaseInsufficient { cap: usize },
    #[error("rounding residual {residual:.3e} too large at {bits} bits")]
    PrecisionExhausted { bits: u32, residual: f64 },
    #[error("|discriminant| {0} exceeds the supported bound {1}")]
    DiscriminantTooLarge(i64, i64),
}

/// A negative discriminant `D ≡ 0, 1 (mod 4)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct Discriminant(i64);

impl Discriminant {
    pub fn new(d: i64) -> Result<Self, QuadError> {
        if d < 0 && matches!(d.rem_euclid(4), 0 | 1) {
            Ok(Self(d))
        } else {
            Err(QuadError::InvalidDiscriminant(d))
        }
    }

    pub fn value(self) -> i64 {
        self.0
    }
}

impl TryFrom<i64> for Discriminant {
    type Error = QuadError;
    fn try_from(d: i64) -> Result<Self, QuadError> {
        Self::new(d)
    }
}

impl From<Discriminant> for i64 {
    fn from(d: Discriminant) -> i64 {
        d.0
    }
}

/// The form `a x^2 + b x y + c y^2`. Serializes as `[a, b, c]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i64; 3]", into = "[i64; 3]")]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl From<[i64; 3]> for QuadForm {
    fn from([a, b, c]: [i64; 3]) -> Self {
        Self { a, b, c }
    }
}

impl From<QuadForm> for [i64; 3] {
    fn from(f: QuadForm) -> Self {
        [f.a, f.b, f.c]
    }
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]", self.a, self.b, self.c)
    }
}

impl QuadForm {
    pub const fn new(a: i64, b: i64, c: i64) -> Self {
        Self { a, b, c }
    }

    pub fn discriminant(&self) -> i64 {
        let d = self.b as i128 * self.b as i128 - 4 * self.a as i128 * self.c as i128;
        i64::try_from(d).expect("discriminant fits in i64")
    }

    pub fn is_primitive(&self) -> bool {
        gcd(gcd(self.a, self.b), self.c) == 1
    }

    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        a > 0 && b.abs() <= a && a <= c && (b >= 0 || (b.abs() != a && a != c))
    }

    /// The principal form of discriminant `d`.
    pub fn principal(d: Discriminant) -> Self {
        let d = d.value();
        let b = d.rem_euclid(2);
        Self::new(1, b, (b * b - d) / 4)
    }

    pub fn inverse(&self) -> Self {
        reduce_unchecked(Self::new(self.a, -self.b, self.c))
    }

    fn check_definite(&self) -> Result<(), QuadError> {
        if self.discriminant() >= 0 || self.a <= 0 {
            return Err(QuadError::NotPositiveDefinite(self.a, self.b, self.c));
        }
        Ok(())
    }
}

/// The unique reduced form properly equivalent to `f`.
pub fn reduce_form(f: QuadForm) -> Result<QuadForm, QuadError> {
    f.check_definite()?;
    if !f.is_primitive() {
        return Err(QuadError::NotPrimitive(f.a, f.b, f.c));
    }
    Ok(reduce_unchecked(f))
}

fn reduce_unchecked(f: QuadForm) -> QuadForm {
    let d = f.discriminant() as i128;
    let (mut a, mut b, mut c) = (f.a as i128, f.b as i128, f.c as i128);
    loop {
        if !(-a < b && b <= a) {
            // b -> b + 2ak with b landing in (-a, a]
            let k = (a - b).div_euclid(2 * a);
            b += 2 * a * k;
            c = (b * b - d) / (4 * a);
        }
        if a > c {
            std::mem::swap(&mut a, &mut c);
            b = -b;
            continue;
        }
        if a == c && b < 0 {
            b = -b;
        }
        break;
    }
    QuadForm::new(a as i64, b as i64, c as i64)
}

/// Gauss composition of two primitive forms of the same discriminant,
/// returned reduced.
pub fn compose(f: &QuadForm, g: &QuadForm) -> Result<QuadForm, QuadError> {
    f.check_definite()?;
    g.check_definite()?;
    let (df, dg) = (f.discriminant(), g.discriminant());
    if df != dg {
        return Err(QuadError::DiscriminantMismatch(df, dg));
    }
    Ok(compose_unchecked(f, g))
}

fn compose_unchecked(f: &QuadForm, g: &QuadForm) -> QuadForm {
    let d = f.discriminant() as i128;
    let (a1, b1) = (f.a as i128, f.b as i128);
    let (a2, b2) = (g.a as i128, g.b as i128);
    let s = (b1 + b2) / 2;
    let (g1, x1, y1) = xgcd(a1, a2);
    let (e, x2, z) = xgcd(g1, s);
    let (x, y) = (x2 * x1, x2 * y1);
    let a3 = a1 * a2 / (e * e);
    let num = x * a1 * b2 + y * a2 * b1 + z * ((b1 * b2 + d) / 2);
    let b3 = (num / e).rem_euclid(2 * a3);
    let c3 = (b3 * b3 - d) / (4 * a3);
    debug_assert_eq!(gcd_i128(num, e), e);
    reduce_unchecked(QuadForm::new(a3 as i64, b3 as i64, c3 as i64))
}

/// `f^k` under composition (negative `k` uses the inverse).
pub fn power(f: &QuadForm, k: i64) -> QuadForm {
    let d = Discriminant(f.discriminant());
    let mut base = if k < 0 {
        f.inverse()
    } else {
        reduce_unchecked(*f)
    };
    let mut acc = QuadForm::principal(d);
    let mut e = k.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            acc = compose_unchecked(&acc, &base);
        }
        base = compose_unchecked(&base, &base);
        e >>= 1;
    }
    acc
}

/// Order of the class of `f` in the class group.
pub fn class_order(f: &QuadForm) -> u64 {
    let id = QuadForm::principal(Discriminant(f.discriminant()));
    let f = reduce_unchecked(*f);
    let mut acc = f;
    let mut n = 1;
    while acc != id {
        acc = compose_unchecked(&acc, &f);
        n += 1;
    }
    n
}

/// Sort key: by `a`, then `|b|`, with `b` listed before `-b`.
fn class_sort_key(f: &QuadForm) -> (i64, i64, bool) {
    (f.a, f.b.abs(), f.b < 0)
}

/// All reduced primitive forms of discriminant `d`, ordered by `a`, then
/// `|b|`, positive `b` first. The length is the class number `h(d)`.
pub fn enumerate_class_group(d: Discriminant) -> Vec<QuadForm> {
    let dv = d.value();
    let mut out = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= -dv {
        for b in -a + 1..=a {
            if (b - dv).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - dv;
            if num % (4 * a) != 0 {
                continue;
            }
            let f = QuadForm::new(a, b, num / (4 * a));
            if f.is_reduced() && f.is_primitive() {
                out.push(f);
            }
        }
        a += 1;
    }
    out.sort_by_key(class_sort_key);
    out
}

pub fn class_number(d: Discriminant) -> usize {
    enumerate_class_group(d).len()
}

/// The reduced class of the prime ideal of norm `q`, when one exists.
///
/// Picks the least `b >= 0` with `b^2 ≡ d (mod 4q)`. Returns `None` when
/// `q` is inert, or when the only candidate form is imprimitive (`q`
/// divides the conductor).
pub fn prime_form(d: Discriminant, q: u64) -> Result<Option<QuadForm>, QuadError> {
    if !is_prime(q) {
        return Err(QuadError::NotPrime(q));
    }
    let dv = d.value() as i128;
    let q = q as i128;
    let found = (0..=q).find(|&b| (b * b - dv).rem_euclid(4 * q) == 0);
    Ok(found.and_then(|b| {
        let f = QuadForm::new(q as i64, b as i64, ((b * b - dv) / (4 * q)) as i64);
        f.is_primitive().then(|| reduce_unchecked(f))
    }))
}

/// One factor of a class word: the prime `q` and its prime form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeStep {
    pub q: u64,
    pub form: QuadForm,
}

/// Default cap on word length for `factor_class`: `3 * ceil(log2 h)`.
pub fn default_word_cap(h: usize) -> usize {
    let mut bits = 0;
    while (1usize << bits) < h {
        bits += 1;
    }
    3 * bits
}

/// Breadth-first search for a shortest word in the prime forms of the factor
/// base whose ordered composition is the class of `f`.
pub fn factor_class(
    f: &QuadForm,
    factor_base: &[u64],
    cap: Option<usize>,
) -> Result<Vec<PrimeStep>, QuadError> {
    let target = reduce_form(*f)?;
    let d = Discriminant::new(target.discriminant())?;
    let cap = cap.unwrap_or_else(|| default_word_cap(class_number(d)));
    let mut steps = Vec::new();
    for &q in factor_base {
        if let Some(form) = prime_form(d, q)? {
            steps.push(PrimeStep { q, form });
        }
    }
    let start = QuadForm::principal(d);
    let mut parent: HashMap<QuadForm, Option<(QuadForm, usize)>> = HashMap::new();
    parent.insert(start, None);
    let mut queue = VecDeque::from([(start, 0usize)]);
    while let Some((cur, depth)) = queue.pop_front() {
        if cur == target {
            let mut word = Vec::new();
            let mut node = cur;
            while let Some(Some((prev, k))) = parent.get(&node) {
                word.push(steps[*k]);
                node = *prev;
            }
            word.reverse();
            return Ok(word);
        }
        if depth == cap {
            continue;
        }
        for (k, s) in steps.iter().enumerate() {
            let next = compose_unchecked(&cur, &s.form);
            parent.entry(next).or_insert_with(|| {
                queue.push_back((next, depth + 1));
                Some((cur, k))
            });
        }
    }
    Err(QuadError::FactorBaseInsufficient { cap })
}

/// The CM point `τ = (-b + sqrt(D)) / 2a` attached to a positive definite
/// form, kept as exact data: `Re τ = -b/2a` and `(Im τ)^2 = |D| / 4a^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CMPoint {
    pub form: QuadForm,
    #[serde(with = "ratio_pair")]
    pub tau_re: Rational64,
    #[serde(with = "ratio_pair")]
    pub tau_im_sq: Rational64,
}

impl CMPoint {
    pub fn from_form(form: QuadForm) -> Result<Self, QuadError> {
        form.check_definite()?;
        let d = form.discriminant();
        Ok(Self {
            form,
            tau_re: Rational64::new(-form.b, 2 * form.a),
            tau_im_sq: Rational64::new(-d, 4 * form.a * form.a),
        })
    }

    pub fn discriminant(&self) -> i64 {
        self.form.discriminant()
    }
}

mod ratio_pair {
    use num_rational::Rational64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational64, s: S) -> Result<S::Ok, S::Error> {
        [*r.numer(), *r.denom()].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational64, D::Error> {
        let [n, m] = <[i64; 2]>::deserialize(d)?;
        if m == 0 {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(Rational64::new(n, m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(a: i64, b: i64, c: i64) -> QuadForm {
        QuadForm::new(a, b, c)
    }

    fn disc(d: i64) -> Discriminant {
        Discriminant::new(d).unwrap()
    }

    /// All images of `g` under SL2(Z) matrices with entries in `[-k, k]`.
    fn sl2_orbit(g: &QuadForm, k: i64) -> Vec<QuadForm> {
        let mut out = Vec::new();
        for p in -k..=k {
            for q in -k..=k {
                for r in -k..=k {
                    for s in -k..=k {
                        if p * s - q * r != 1 {
                            continue;
                        }
                        let a = g.a * p * p + g.b * p * r + g.c * r * r;
                        let b = 2 * g.a * p * q + g.b * (p * s + q * r) + 2 * g.c * r * s;
                        let c = g.a * q * q + g.b * q * s + g.c * s * s;
                        out.push(f(a, b, c));
                    }
                }
            }
        }
        out
    }

    /// Greedy descent on `(a, |b|, b < 0)` over small SL2(Z) translates.
    fn brute_reduce(g: &QuadForm) -> QuadForm {
        let key = |h: &QuadForm| (h.a, h.b.abs(), h.b < 0);
        let mut cur = *g;
        loop {
            let best = *sl2_orbit(&cur, 2)
                .iter()
                .filter(|h| h.a > 0)
                .min_by_key(|h| key(h))
                .unwrap();
            if key(&best) >= key(&cur) {
                return cur;
            }
            cur = best;
        }
    }

    /// Dirichlet composition: find united representatives `[a1, B, a2 C]`,
    /// `[a2, B, a1 C]` with coprime leading coefficients by search.
    fn brute_compose(g: &QuadForm, h: &QuadForm) -> QuadForm {
        let d = g.discriminant();
        let og = sl2_orbit(g, 5);
        let mut by_b: HashMap<i64, Vec<QuadForm>> = HashMap::new();
        for y in sl2_orbit(h, 5).into_iter().filter(|y| y.a > 0) {
            by_b.entry(y.b).or_default().push(y);
        }
        for x in og.iter().filter(|x| x.a > 0) {
            for y in by_b.get(&x.b).into_iter().flatten() {
                if gcd(x.a, y.a) == 1 && x.c % y.a == 0 {
                    let a = x.a * y.a;
                    let c = (x.b * x.b - d) / (4 * a);
                    return brute_reduce(&f(a, x.b, c));
                }
            }
        }
        panic!("no united pair found for {g} and {h}");
    }

    #[test]
    fn reduction_examples() {
        assert_eq!(reduce_form(f(1, 1, 6)).unwrap(), f(1, 1, 6));
        assert_eq!(reduce_form(f(3, -1, 2)).unwrap(), f(2, 1, 3));
        assert_eq!(reduce_form(f(6, 7, 3)).unwrap(), f(2, 1, 3));
        assert_eq!(brute_reduce(&f(3, -1, 2)), f(2, 1, 3));
        assert_eq!(brute_reduce(&f(6, 7, 3)), f(2, 1, 3));
        assert!(matches!(
            reduce_form(f(1, 3, 1)),
            Err(QuadError::NotPositiveDefinite(..))
        ));
    }

    #[test]
    fn reduction_agrees_with_orbit_search() {
        for g in [
            f(7, 9, 3),
            f(11, -13, 4),
            f(5, 21, 23),
            f(13, 5, 1),
            f(9, 14, 6),
        ] {
            assert_eq!(reduce_form(g).unwrap(), brute_reduce(&g), "{g}");
        }
    }

    #[test]
    fn composition_examples() {
        let (e, p, pi) = (f(1, 1, 6), f(2, 1, 3), f(2, -1, 3));
        assert_eq!(compose(&e, &p).unwrap(), p);
        assert_eq!(compose(&p, &pi).unwrap(), e);
        assert_eq!(compose(&p, &p).unwrap(), pi);
        assert!(matches!(
            compose(&p, &f(1, 0, 1)),
            Err(QuadError::DiscriminantMismatch(..))
        ));
    }

    #[test]
    fn composition_table_matches_dirichlet_oracle() {
        for d in [-23i64, -47, -71, -56, -84, -104, -151] {
            let cl = enumerate_class_group(disc(d));
            for x in &cl {
                for y in &cl {
                    assert_eq!(compose(x, y).unwrap(), brute_compose(x, y), "D={d} {x}*{y}");
                }
            }
        }
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_class_group(disc(-3)), vec![f(1, 1, 1)]);
        assert_eq!(enumerate_class_group(disc(-4)), vec![f(1, 0, 1)]);
        assert_eq!(
            enumerate_class_group(disc(-23)),
            vec![f(1, 1, 6), f(2, 1, 3), f(2, -1, 3)]
        );
        // classical class numbers
        for (d, h) in [
            (-20, 2),
            (-56, 4),
            (-71, 7),
            (-163, 1),
            (-399, 16),
            (-12, 1),
            (-28, 1),
        ] {
            assert_eq!(class_number(disc(d)), h, "h({d})");
        }
    }

    #[test]
    fn prime_forms() {
        assert_eq!(prime_form(disc(-23), 2).unwrap(), Some(f(2, 1, 3)));
        assert_eq!(prime_form(disc(-23), 5).unwrap(), None);
        assert_eq!(prime_form(disc(-4), 2).unwrap(), Some(f(1, 0, 1)));
        assert_eq!(prime_form(disc(-12), 2).unwrap(), None);
        assert!(prime_form(disc(-23), 4).is_err());
    }

    #[test]
    fn factoring_classes() {
        let base = [2u64];
        assert!(factor_class(&f(1, 1, 6), &base, None).unwrap().is_empty());
        let w = factor_class(&f(2, 1, 3), &base, None).unwrap();
        assert_eq!(
            w.iter().map(|s| s.form).collect::<Vec<_>>(),
            vec![f(2, 1, 3)]
        );
        let w = factor_class(&f(2, -1, 3), &base, None).unwrap();
        assert_eq!(
            w.iter().map(|s| s.form).collect::<Vec<_>>(),
            vec![f(2, 1, 3), f(2, 1, 3)]
        );
        // D = -71 has h = 7; the 2-form generates but the cap 9 is plenty
        for g in enumerate_class_group(disc(-71)) {
            let w = factor_class(&g, &[2, 3], None).unwrap();
            let prod = w.iter().fold(QuadForm::principal(disc(-71)), |acc, s| {
                compose(&acc, &s.form).unwrap()
            });
            assert_eq!(prod, g);
        }
        assert!(matches!(
            factor_class(&f(2, -1, 3), &[5], None),
            Err(QuadError::FactorBaseInsufficient { .. })
        ));
    }

    #[test]
    fn cm_point_data() {
        let p = CMPoint::from_form(f(2, 1, 3)).unwrap();
        assert_eq!(p.tau_re, Rational64::new(-1, 4));
        assert_eq!(p.tau_im_sq, Rational64::new(23, 16));
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<CMPoint>(&s).unwrap(), p);
        assert_eq!(serde_json::to_string(&f(2, -1, 3)).unwrap(), "[2,-1,3]");
    }
}
