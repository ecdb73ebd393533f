//! Splitting the cuspidal subspace into rational Hecke eigen-lines.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::basis::{HomologyClass, ManinBasis};
use super::ModsymError;
use crate::linalg::{
    self, charpoly, nullspace, poly_at_matrix, primitive, q, qmul, qtranspose, to_i64, IntMatrix,
    QMat,
};

/// A rational linear functional `(num · x) / den` on homology coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Functional {
    #[serde(with = "crate::serde_dec::vec")]
    pub num: Vec<BigInt>,
    #[serde(with = "crate::serde_dec::one")]
    pub den: BigInt,
}

impl Functional {
    pub fn from_rationals(v: &[BigRational]) -> Self {
        let den = v.iter().fold(BigInt::one(), |acc, x| {
            num_integer::Integer::lcm(&acc, x.denom())
        });
        let num = v
            .iter()
            .map(|x| (x * BigRational::from_integer(den.clone())).to_integer())
            .collect();
        Self { num, den }
    }

    pub fn eval(&self, coords: &[i64]) -> BigRational {
        let s: BigInt = self
            .num
            .iter()
            .zip(coords)
            .map(|(a, &x)| a * BigInt::from(x))
            .sum();
        BigRational::new(s, self.den.clone())
    }
}

/// One rational newform: Hecke eigenvalues, integral generators of its
/// plus and minus eigen-lines, and the dual functionals picking out those
/// lines.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenData {
    pub level: u64,
    pub newform_id: usize,
    pub eigenvalues: BTreeMap<u64, i64>,
    pub plus_generator: HomologyClass,
    pub minus_generator: HomologyClass,
    pub plus_functional: Functional,
    pub minus_functional: Functional,
}

impl EigenData {
    pub fn a(&self, q: u64) -> Option<i64> {
        self.eigenvalues.get(&q).copied()
    }

    pub fn generator(&self, sign: i8) -> &HomologyClass {
        if sign >= 0 {
            &self.plus_generator
        } else {
            &self.minus_generator
        }
    }

    pub fn functional(&self, sign: i8) -> &Functional {
        if sign >= 0 {
            &self.plus_functional
        } else {
            &self.minus_functional
        }
    }
}

/// Matrix of `t` restricted to the span of the columns of `v` (which must
/// be `t`-stable), in the coordinates given by those columns.
fn restrict(t: &QMat, v: &QMat) -> QMat {
    let vt = qtranspose(v);
    let gram = qmul(&vt, v);
    let gram_inv = linalg::inverse(&gram).expect("columns are independent");
    qmul(&gram_inv, &qmul(&vt, &qmul(t, v)))
}

fn columns(vs: &[Vec<BigRational>]) -> QMat {
    qtranspose(&vs.to_vec())
}

fn shift(m: &QMat, a: i64) -> QMat {
    let mut m = m.clone();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] -= q(a);
    }
    m
}

/// Integer roots of a monic rational polynomial within `[-bound, bound]`.
fn integer_roots(poly: &[BigRational], bound: i64) -> Vec<i64> {
    (-bound..=bound)
        .filter(|&a| {
            poly.iter()
                .rev()
                .fold(BigRational::zero(), |acc, c| acc * q(a) + c)
                .is_zero()
        })
        .collect()
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

impl ManinBasis {
    /// Decompose the cuspidal subspace into rational eigen-lines under the
    /// Hecke operators for `primes` (those not dividing the level drive the
    /// splitting; all of them get recorded eigenvalues).
    pub fn eigen_decompose(&self, primes: &[u64]) -> Result<Vec<EigenData>, ModsymError> {
        let cusp_space = self.cuspidal_subspace();
        if cusp_space.is_empty() {
            return Ok(Vec::new());
        }
        let r = self.rank;
        let hecke: BTreeMap<u64, IntMatrix> =
            primes.iter().map(|&p| (p, self.hecke_matrix(p))).collect();
        let good: Vec<u64> = primes
            .iter()
            .copied()
            .filter(|p| self.level % p != 0)
            .collect();
        let Some(&q0) = good.first() else {
            return Err(ModsymError::NoGoodPrime);
        };

        let mut components: Vec<QMat> = vec![columns(&cusp_space)];
        for &p in &good {
            let t = hecke[&p].to_q();
            let bound = 2 * isqrt(p) as i64 + 1;
            let mut next = Vec::new();
            for v in components {
                let k = v[0].len();
                if k <= 2 {
                    next.push(v);
                    continue;
                }
                let m = restrict(&t, &v);
                let cp = charpoly(&m);
                let mut found = 0;
                for a in integer_roots(&cp, bound) {
                    let ker = nullspace(&shift(&m, a), k);
                    found += ker.len();
                    next.push(qmul(&v, &columns(&ker)));
                }
                if found < k {
                    return Err(ModsymError::UnsupportedHeckeField {
                        level: self.level,
                        prime: p,
                    });
                }
            }
            components = next;
        }
        if let Some(v) = components.iter().find(|v| v[0].len() != 2) {
            return Err(ModsymError::EigenspaceTooLarge {
                level: self.level,
                dim: v[0].len(),
            });
        }

        let star = self.star_matrix().to_q();
        let mut gens: Vec<(Vec<i64>, Vec<i64>)> = Vec::new();
        for v in &components {
            let m = restrict(&star, v);
            let mut pair = Vec::new();
            for sign in [1i64, -1] {
                let ker = nullspace(&shift(&m, sign), 2);
                if ker.len() != 1 {
                    return Err(ModsymError::EigenspaceTooLarge {
                        level: self.level,
                        dim: ker.len(),
                    });
                }
                let amb: Vec<BigRational> = v
                    .iter()
                    .map(|row| {
                        row.iter()
                            .zip(&ker[0])
                            .fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
                    })
                    .collect();
                pair.push(primitive(&amb).iter().map(to_i64).collect::<Vec<i64>>());
            }
            gens.push((pair[0].clone(), pair[1].clone()));
        }

        // Complement: image of chi_S(T_q0), where chi_S is the characteristic
        // polynomial of T_q0 on the cuspidal subspace.
        let t0 = &hecke[&q0];
        let chi_s = charpoly(&restrict(&t0.to_q(), &columns(&cusp_space)));
        let chi_int: Vec<BigInt> = chi_s.iter().map(|c| c.to_integer()).collect();
        let image = poly_at_matrix(&chi_int, t0);
        let mut span = qtranspose(&image);
        let pivots = linalg::rref(&mut span);
        let eis: Vec<Vec<BigRational>> = span.into_iter().take(pivots.len()).collect();

        let mut cols: Vec<Vec<BigRational>> = Vec::new();
        for (p, m) in &gens {
            cols.push(p.iter().map(|&x| q(x)).collect());
            cols.push(m.iter().map(|&x| q(x)).collect());
        }
        cols.extend(eis);
        if cols.len() != r {
            return Err(ModsymError::EigenspaceTooLarge {
                level: self.level,
                dim: cols.len(),
            });
        }
        let w_inv = linalg::inverse(&columns(&cols)).ok_or(ModsymError::EigenspaceTooLarge {
            level: self.level,
            dim: r,
        })?;

        let mut out = Vec::new();
        for (id, (plus, minus)) in gens.into_iter().enumerate() {
            let mut eigenvalues = BTreeMap::new();
            for (&p, t) in &hecke {
                let a = eigenvalue(t, &plus).ok_or(ModsymError::NotEigen {
                    level: self.level,
                    prime: p,
                })?;
                let b = eigenvalue(t, &minus).ok_or(ModsymError::NotEigen {
                    level: self.level,
                    prime: p,
                })?;
                if a != b {
                    return Err(ModsymError::NotEigen {
                        level: self.level,
                        prime: p,
                    });
                }
                eigenvalues.insert(p, a);
            }
            out.push(EigenData {
                level: self.level,
                newform_id: id,
                eigenvalues,
                plus_generator: self.class(plus),
                minus_generator: self.class(minus),
                plus_functional: Functional::from_rationals(&w_inv[2 * id]),
                minus_functional: Functional::from_rationals(&w_inv[2 * id + 1]),
            });
        }
        Ok(out)
    }
}

/// `a` with `t v = a v`, if `v` is an eigenvector.
fn eigenvalue(t: &IntMatrix, v: &[i64]) -> Option<i64> {
    let tv = t.mul_vec(v);
    let (i, &vi) = v.iter().enumerate().find(|(_, x)| **x != 0)?;
    if tv[i] % vi != 0 {
        return None;
    }
    let a = tv[i] / vi;
    tv.iter().zip(v).all(|(x, y)| *x == a * y).then_some(a)
}
