//! Truncated power series with `l`-adic coefficients.

use serde::{Deserialize, Serialize};

use super::{PadicError, TruncatedPadic};

/// `sum c_i t^i` for `i < len`; terms from `t^len` on are unknown.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicSeries {
    pub l: u64,
    pub coeffs: Vec<TruncatedPadic>,
}

impl PadicSeries {
    pub fn new(l: u64, coeffs: Vec<TruncatedPadic>) -> Self {
        assert!(
            coeffs.iter().all(|c| c.l == l),
            "coefficients over a different prime"
        );
        Self { l, coeffs }
    }

    pub fn from_ints(coeffs: &[i64], l: u64, m: i64) -> Self {
        Self::new(
            l,
            coeffs
                .iter()
                .map(|&c| TruncatedPadic::from_int(c, l, m))
                .collect(),
        )
    }

    /// The series `t`, known to `len` terms.
    pub fn identity(l: u64, m: i64, len: usize) -> Self {
        let mut c = vec![TruncatedPadic::zero(l, m); len];
        if len > 1 {
            c[1] = TruncatedPadic::one(l, m);
        }
        Self::new(l, c)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn max_precision(&self) -> i64 {
        self.coeffs.iter().map(|c| c.m).max().unwrap_or(0)
    }

    pub fn truncate(&self, len: usize) -> Self {
        Self::new(self.l, self.coeffs[..len.min(self.len())].to_vec())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.len().min(other.len());
        Self::new(
            self.l,
            (0..n)
                .map(|i| self.coeffs[i].add(&other.coeffs[i]))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.len().min(other.len());
        Self::new(
            self.l,
            (0..n)
                .map(|i| self.coeffs[i].sub(&other.coeffs[i]))
                .collect(),
        )
    }

    pub fn scale(&self, c: &TruncatedPadic) -> Self {
        Self::new(self.l, self.coeffs.iter().map(|x| x.mul(c)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.len().min(other.len());
        let out = (0..n)
            .map(|k| {
                (1..=k).fold(self.coeffs[0].mul(&other.coeffs[k]), |acc, i| {
                    acc.add(&self.coeffs[i].mul(&other.coeffs[k - i]))
                })
            })
            .collect();
        Self::new(self.l, out)
    }

    /// `1 / self`; the constant term must be a unit.
    pub fn inverse(&self) -> Result<Self, PadicError> {
        let c0 = &self.coeffs[0];
        if !c0.is_unit() {
            return Err(PadicError::DivisionByIndeterminate);
        }
        let mut out: Vec<TruncatedPadic> = vec![TruncatedPadic::one(self.l, c0.m).div(c0)?];
        for k in 1..self.len() {
            let s = (1..=k).fold(TruncatedPadic::zero(self.l, c0.m), |acc, i| {
                acc.add(&self.coeffs[i].mul(&out[k - i]))
            });
            out.push(s.neg().div(c0)?);
        }
        Ok(Self::new(self.l, out))
    }

    /// Value at `t`, ignoring the unknown tail.
    pub fn evaluate(&self, t: &TruncatedPadic) -> TruncatedPadic {
        let mut acc = TruncatedPadic::zero(self.l, self.max_precision());
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(t).add(c);
        }
        acc
    }

    /// Termwise antiderivative with zero constant term; `a_n / (n+1)` loses
    /// `v_l(n+1)` digits.
    pub fn integrate(&self) -> Self {
        let mut out = vec![TruncatedPadic::zero(self.l, self.max_precision())];
        out.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(n, a)| a.div_int(n as i64 + 1)),
        );
        Self::new(self.l, out)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.l,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(n, a)| a.mul_int(n as i64))
                .collect(),
        )
    }

    fn check_inner(g: &Self) -> Result<(), PadicError> {
        match g.coeffs.first() {
            Some(c) if c.is_zero() => Ok(()),
            None => Ok(()),
            Some(_) => Err(PadicError::NonzeroConstantTerm),
        }
    }

    /// `self(g(t))`; `g` must have zero constant term.
    pub fn compose(&self, g: &Self) -> Result<Self, PadicError> {
        Self::check_inner(g)?;
        let n = self.len().min(g.len());
        if n == 0 {
            return Ok(Self::new(self.l, Vec::new()));
        }
        let g = g.truncate(n);
        let pad = TruncatedPadic::zero(self.l, self.max_precision().max(g.max_precision()));
        let mut acc = Self::new(self.l, vec![self.coeffs[n - 1].clone()]);
        for c in self.coeffs[..n - 1].iter().rev() {
            let mut padded = acc.coeffs.clone();
            padded.resize(n, pad.clone());
            let mut next = Self::new(self.l, padded).mul(&g);
            next.coeffs[0] = next.coeffs[0].add(c);
            acc = next;
        }
        Ok(acc)
    }

    /// The compositional inverse `r` with `self(r(t)) = t`.
    pub fn reverse(&self) -> Result<Self, PadicError> {
        let n = self.len();
        if n < 2 || !self.coeffs[0].is_zero() {
            return Err(PadicError::NonzeroConstantTerm);
        }
        if !self.coeffs[1].is_unit() {
            return Err(PadicError::NonUnitLinearTerm);
        }
        let m = self.max_precision();
        let t = Self::identity(self.l, m, n);
        let mut r = t.scale(&TruncatedPadic::one(self.l, m).div(&self.coeffs[1])?);
        let deriv = self.derivative();
        let mut correct = 2;
        while correct < n {
            // Newton step: r -= (s(r) - t) / s'(r)
            let err = self.compose(&r)?.sub(&t);
            let mut dinv = deriv.compose(&r.truncate(n - 1))?.inverse()?.coeffs;
            // the missing last coefficient only ever meets err_0 = 0
            dinv.push(TruncatedPadic::zero(self.l, 0));
            let step = err.mul(&Self::new(self.l, dinv));
            r = r.sub(&step);
            correct *= 2;
        }
        let err = self.compose(&r)?.sub(&t);
        let mut dinv = deriv.compose(&r.truncate(n - 1))?.inverse()?.coeffs;
        dinv.push(TruncatedPadic::zero(self.l, 0));
        Ok(r.sub(&err.mul(&Self::new(self.l, dinv))))
    }

    /// Re-expansion about `t1`: the series `u -> self(t1 + u)`. Only the known
    /// terms are summed; callers account for the tail.
    pub fn translate(&self, t1: &TruncatedPadic) -> Self {
        let n = self.len();
        assert!(n <= 60, "binomials overflow");
        let m = self.max_precision();
        let mut powers = vec![TruncatedPadic::one(self.l, m)];
        for _ in 1..n {
            let next = powers.last().unwrap().mul(t1);
            powers.push(next);
        }
        let mut binom = vec![vec![0i64; n]; n];
        let out = (0..n)
            .map(|k| {
                (k..n).fold(TruncatedPadic::zero(self.l, m), |acc, j| {
                    binom[j][k] = if k == 0 || k == j {
                        1
                    } else {
                        binom[j - 1][k - 1] + binom[j - 1][k]
                    };
                    acc.add(&self.coeffs[j].mul(&powers[j - k]).mul_int(binom[j][k]))
                })
            })
            .collect();
        Self::new(self.l, out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_series(rng: &mut ChaCha8Rng, l: u64, m: i64, len: usize) -> PadicSeries {
        let c = (0..len)
            .map(|_| rng.gen_range(-1000..1000))
            .collect::<Vec<i64>>();
        PadicSeries::from_ints(&c, l, m)
    }

    #[test]
    fn integrate_examples() {
        let s = PadicSeries::from_ints(&[1], 3, 5).integrate();
        assert_eq!(s, PadicSeries::from_ints(&[0, 1], 3, 5));
        let s = PadicSeries::from_ints(&[0, 0, 1], 3, 5).integrate();
        assert_eq!((s.coeffs[3].m, s.coeffs[3].val), (4, -1));
    }

    #[test]
    fn reverse_examples() {
        let t = PadicSeries::identity(5, 8, 8);
        assert_eq!(t.reverse().unwrap(), t);
        let s = PadicSeries::from_ints(&[0, 1, 1], 5, 8);
        let mut padded = s.coeffs.clone();
        padded.resize(8, TruncatedPadic::zero(5, 8));
        let r = PadicSeries::new(5, padded).reverse().unwrap();
        // Catalan numbers with alternating signs
        assert_eq!(
            r,
            PadicSeries::from_ints(&[0, 1, -1, 2, -5, 14, -42, 132], 5, 8)
        );
        assert_eq!(
            PadicSeries::from_ints(&[0, 5, 1], 5, 8).reverse(),
            Err(PadicError::NonUnitLinearTerm)
        );
    }

    #[test]
    fn compose_with_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = random_series(&mut rng, 7, 6, 10);
        assert_eq!(s.compose(&PadicSeries::identity(7, 6, 10)).unwrap(), s);
        assert_eq!(s.compose(&s), Err(PadicError::NonzeroConstantTerm));
    }

    #[test]
    fn translate_matches_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = PadicSeries::from_ints(&[3, -1, 4, 1, -5, 9], 11, 9);
        for _ in 0..10 {
            let t1 = TruncatedPadic::from_int(rng.gen_range(-50..50), 11, 9);
            let u = TruncatedPadic::from_int(rng.gen_range(-50..50), 11, 9);
            let lhs = s.translate(&t1).evaluate(&u);
            assert!(lhs.agrees_with(&s.evaluate(&t1.add(&u))));
        }
    }
}
