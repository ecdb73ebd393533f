//! Local expansions of weight-two differentials and their tiny integrals.

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::{j_qexp, ColemanError, QExpansion, QKind};
use crate::padic::{PadicError, PadicSeries, TruncatedPadic};

/// Which coordinate a local expansion is written in.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Parameter {
    /// `q` itself, in the disc around the cusp.
    QAtCusp,
    /// `t = j - j(P)`. The series is written in `scale * t`, which keeps all
    /// coefficients integral.
    JMinusJp { scale: TruncatedPadic },
}

/// `ω = series(u) du` around a base point, where `u` is the (normalized)
/// parameter measured from the base.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalExpansion {
    pub parameter: Parameter,
    /// Coordinate of the base point: the `q`-value in the cusp disc, or `j(P)`.
    pub base_value: TruncatedPadic,
    pub series: PadicSeries,
    /// Lower bound for the valuation of every coefficient, known or not.
    pub coeff_floor: i64,
}

fn in_disc(u: &TruncatedPadic) -> Result<(), ColemanError> {
    if u.val < 1 {
        return Err(ColemanError::OutOfDisc { val: u.val });
    }
    Ok(())
}

fn floor_log(l: u64, n: i64) -> i64 {
    let (mut k, mut p) = (0, l as i64);
    while p <= n {
        k += 1;
        p *= l as i64;
    }
    k
}

fn binomials(n: usize) -> Vec<Vec<BigInt>> {
    let mut b = vec![vec![BigInt::from(0); n + 1]; n + 1];
    for i in 0..=n {
        b[i][0] = BigInt::one();
        for k in 1..=i {
            b[i][k] = &b[i - 1][k - 1] + &b[i - 1][k];
        }
    }
    b
}

impl LocalExpansion {
    fn normalized(&self, t: &TruncatedPadic) -> TruncatedPadic {
        match &self.parameter {
            Parameter::QAtCusp => t.clone(),
            Parameter::JMinusJp { scale } => scale.mul(t),
        }
    }

    /// The same differential expanded about the point at parameter `t1`.
    pub fn recenter(&self, t1: &TruncatedPadic) -> Result<Self, ColemanError> {
        let u1 = self.normalized(t1);
        in_disc(&u1)?;
        let mut series = self.series.translate(&u1);
        let n = series.len() as i64;
        for (k, c) in series.coeffs.iter_mut().enumerate() {
            // the unknown terms of index >= n contribute at least this much
            *c = c.with_precision(self.coeff_floor + (n - k as i64) * u1.val);
        }
        Ok(Self {
            parameter: self.parameter.clone(),
            base_value: self.base_value.add(t1),
            series,
            coeff_floor: self.coeff_floor,
        })
    }
}

/// `∫ ω` from the base point to the point at parameter `t`, with the
/// truncation tail folded into the reported precision.
pub fn tiny_integral(
    exp: &LocalExpansion,
    t: &TruncatedPadic,
) -> Result<TruncatedPadic, ColemanError> {
    let u = exp.normalized(t);
    in_disc(&u)?;
    let value = exp.series.integrate().evaluate(&u);
    let n = exp.series.len() as i64;
    let tail = exp.coeff_floor + (n + 1) * u.val - floor_log(exp.series.l, n + 1);
    Ok(value.with_precision(tail))
}

/// `ω_f = sum a_n q^(n-1) dq` in the cusp disc.
pub fn expansion_at_cusp(
    f: &QExpansion,
    l: u64,
    m: i64,
    terms: usize,
) -> Result<LocalExpansion, ColemanError> {
    if f.kind != QKind::Eigenform {
        return Err(ColemanError::NotEigenform);
    }
    let t = (terms as i64).min(f.last());
    let coeffs = (1..=t)
        .map(|n| TruncatedPadic::from_bigint(f.coeff(n).unwrap(), l, m))
        .collect();
    Ok(LocalExpansion {
        parameter: Parameter::QAtCusp,
        base_value: TruncatedPadic::zero(l, m),
        series: PadicSeries::new(l, coeffs),
        coeff_floor: 0,
    })
}

/// `j(q)` for `q` in the cusp disc, using `terms` coefficients of `j`.
pub fn j_value(q: &TruncatedPadic, terms: usize) -> Result<TruncatedPadic, ColemanError> {
    in_disc(q)?;
    let (l, m) = (q.l, q.m);
    let jq = j_qexp(terms);
    let mut acc = TruncatedPadic::zero(l, m);
    for n in (0..=jq.last()).rev() {
        acc = acc
            .mul(q)
            .add(&TruncatedPadic::from_bigint(jq.coeff(n).unwrap(), l, m));
    }
    let inv = TruncatedPadic::one(l, m).div(q)?;
    Ok(inv.add(&acc).with_precision((jq.last() + 1) * q.val))
}

/// `-q_p (j(q_p (1 + x)) - j(q_p))` as a series in `x`, to `terms` terms.
/// Its linear coefficient is a unit and all coefficients are integral.
pub fn j_local_series(
    qp: &TruncatedPadic,
    m: i64,
    terms: usize,
) -> Result<PadicSeries, ColemanError> {
    in_disc(qp)?;
    let (l, v, t) = (qp.l, qp.val, terms);
    let jq = j_qexp(t + 2);
    let binom = binomials(t + 1);
    let mut qpow = vec![TruncatedPadic::one(l, m)];
    for _ in 0..=t {
        let next = qpow.last().unwrap().mul(qp);
        qpow.push(next);
    }
    // 1 - (1 + x)^-1 from the pole, then the q^n terms of j up to n = t
    let cap = (t as i64 + 2) * v;
    let mut out = vec![TruncatedPadic::zero(l, m)];
    for k in 1..t {
        let sign = if k % 2 == 1 { 1 } else { -1 };
        let mut e = TruncatedPadic::from_int(sign, l, m);
        for n in k..=t {
            let c = jq.coeff(n as i64).unwrap() * &binom[n][k];
            e = e.sub(&TruncatedPadic::from_bigint(&c, l, m).mul(&qpow[n + 1]));
        }
        out.push(e.with_precision(cap));
    }
    Ok(PadicSeries::new(l, out))
}

/// `ω_f` in the parameter `t = j - j(P)` around the point `P` with
/// `q`-coordinate `q_p` in the cusp disc.
///
/// Writing `q = q_p (1 + x)`, both `ω_f` and `-q_p (j - j(P))` are power
/// series in `x` with integral coefficients and the latter has unit linear
/// term, so reverting it expresses `ω_f` in `-q_p t`.
pub fn expansion_in_j(
    f: &QExpansion,
    jp: &TruncatedPadic,
    qp: &TruncatedPadic,
    m: i64,
    terms: usize,
) -> Result<LocalExpansion, ColemanError> {
    if f.kind != QKind::Eigenform {
        return Err(ColemanError::NotEigenform);
    }
    in_disc(qp)?;
    let l = qp.l;
    let qp = qp.with_precision(m);
    let v = qp.val;
    let t = terms.min(f.last() as usize);
    if !j_value(&qp, t + 1)?.agrees_with(jp) {
        return Err(ColemanError::BaseMismatch);
    }
    let binom = binomials(t + 1);
    let mut qpow = vec![TruncatedPadic::one(l, m)];
    for _ in 0..=t {
        let next = qpow.last().unwrap().mul(&qp);
        qpow.push(next);
    }
    let int = |n: &BigInt| TruncatedPadic::from_bigint(n, l, m);
    let tt = j_local_series(&qp, m, t)?;
    // x-expansion of ω_f / dx = sum a_n q_p^n (1 + x)^(n-1)
    let g_cap = (t as i64 + 1) * v;
    let g: Vec<TruncatedPadic> = (0..t)
        .map(|k| {
            let mut s = TruncatedPadic::zero(l, m);
            for n in k + 1..=t {
                let c = f.coeff(n as i64).unwrap() * &binom[n - 1][k];
                s = s.add(&int(&c).mul(&qpow[n]));
            }
            s.with_precision(g_cap)
        })
        .collect();

    let r = tt.reverse().map_err(|e| match e {
        PadicError::NonUnitLinearTerm => ColemanError::NonUnitLinearTerm,
        e => e.into(),
    })?;
    let h = PadicSeries::new(l, g)
        .compose(&r)?
        .truncate(t - 1)
        .mul(&r.derivative());
    Ok(LocalExpansion {
        parameter: Parameter::JMinusJp { scale: qp.neg() },
        base_value: jp.clone(),
        series: h,
        coeff_floor: 0,
    })
}

/// `(l + 1 - a_l)^-1 * sum (right_i - left_i)`, the Hecke-symmetrized value of
/// `∫_P^Q ω` from the neighbor integrals `left_i = ∫_{P_i}^P ω` and
/// `right_i = ∫_{Q_i}^Q ω`.
pub fn hecke_symmetrize(
    pairs: &[(TruncatedPadic, TruncatedPadic)],
    a_l: i64,
    l: u64,
) -> Result<TruncatedPadic, ColemanError> {
    let norm = l as i64 + 1 - a_l;
    if norm % l as i64 == 0 {
        return Err(ColemanError::NonUnitNormalizer { norm, l });
    }
    let mut iter = pairs.iter();
    let (left, right) = iter.next().ok_or(ColemanError::EmptyCorrespondence)?;
    let mut sum = right.sub(left);
    for (left, right) in iter {
        sum = sum.add(&right.sub(left));
    }
    Ok(sum.div_int(norm))
}
