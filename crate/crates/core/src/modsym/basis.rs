//! The integral Manin-symbol presentation of `H_1(X_0(N), cusps; Z)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::cusps::{Cusp, CuspList};
use super::p1::P1List;
use crate::arith::{convergents, xgcd};
use crate::linalg::{self, hnf_rows, inverse, rref, to_i64, IntMatrix, QMat};

/// A sparse integer relation among Manin symbols.
pub type Relation = Vec<(usize, i64)>;

/// An element of `H_1(X_0(N), cusps; Z)` in the coordinates of a
/// [`ManinBasis`] of level `N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HomologyClass {
    #[serde(rename = "N")]
    pub level: u64,
    pub coords: Vec<i64>,
}

impl HomologyClass {
    pub fn zero(level: u64, rank: usize) -> Self {
        Self {
            level,
            coords: vec![0; rank],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.level, other.level, "level mismatch");
        Self {
            level: self.level,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, k: i64) -> Self {
        Self {
            level: self.level,
            coords: self.coords.iter().map(|a| a * k).collect(),
        }
    }
}

/// A divisor on the cusps, indexed like [`CuspList::reps`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CuspDivisor {
    pub multiplicities: Vec<i64>,
}

impl CuspDivisor {
    pub fn degree(&self) -> i64 {
        self.multiplicities.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.multiplicities.iter().all(|&x| x == 0)
    }
}

/// Quotient of the free module on `P^1(Z/N)` by the two- and three-term
/// relations, with an integral basis of the lattice spanned by the symbols.
#[derive(Clone, Debug)]
pub struct ManinBasis {
    pub level: u64,
    pub p1: P1List,
    pub relations: Vec<Relation>,
    pub rank: usize,
    pub cusps: CuspList,
    /// Coordinates of every Manin symbol in the integral basis.
    symbol_coords: Vec<Vec<i64>>,
    /// Each basis vector as a rational combination of Manin symbols.
    basis_symbols: Vec<Vec<(usize, BigRational)>>,
    boundary: IntMatrix,
}

fn qv(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Lift `(c : d)` to a matrix of `SL_2(Z)` with that bottom row mod `N`.
pub fn lift_to_sl2(c: i64, d: i64, n: i64) -> [[i64; 2]; 2] {
    let (mut c, mut d) = (c.rem_euclid(n), d.rem_euclid(n));
    if n == 1 {
        c = 0;
        d = 1;
    }
    if c == 0 {
        c = n;
    }
    while crate::arith::gcd(c, d) != 1 {
        d += n;
    }
    let (_, x, y) = xgcd(d as i128, c as i128);
    // a d - b c = 1 with a = x, b = -y
    [[x as i64, -y as i64], [c, d]]
}

impl ManinBasis {
    pub fn new(level: u64) -> Self {
        let p1 = P1List::new(level);
        let n = level as i64;
        let count = p1.len();
        let idx = |c: i64, d: i64| p1.index(c, d).expect("relation images stay in P^1");

        let mut relations: Vec<Relation> = Vec::new();
        let mut push = |terms: &[usize]| {
            let mut rel: Relation = Vec::new();
            for &t in terms {
                match rel.iter_mut().find(|(i, _)| *i == t) {
                    Some(e) => e.1 += 1,
                    None => rel.push((t, 1)),
                }
            }
            rel.sort_unstable();
            if !relations.contains(&rel) {
                relations.push(rel);
            }
        };
        for i in 0..count {
            let (c, d) = p1.get(i);
            push(&[i, idx(d, -c)]);
            push(&[i, idx(d, -c - d), idx(-c - d, c)]);
        }

        // Two-term relations identify x_s with -x_i, or kill x_i when s = i.
        let mut rep: Vec<Option<(usize, i64)>> = vec![None; count];
        let mut reps: Vec<usize> = Vec::new();
        for i in 0..count {
            if rep[i].is_some() {
                continue;
            }
            let (c, d) = p1.get(i);
            let s = idx(d, -c);
            if s == i {
                rep[i] = Some((usize::MAX, 0));
            } else {
                rep[i] = Some((reps.len(), 1));
                rep[s] = Some((reps.len(), -1));
                reps.push(i);
            }
        }
        let rep: Vec<(usize, i64)> = rep.into_iter().map(|r| r.unwrap()).collect();

        // Three-term relations in the reduced coordinates.
        let mut rows: QMat = Vec::new();
        for i in 0..count {
            let (c, d) = p1.get(i);
            let mut row = vec![BigRational::zero(); reps.len()];
            for t in [i, idx(d, -c - d), idx(-c - d, c)] {
                let (r, s) = rep[t];
                if s != 0 {
                    row[r] += qv(s);
                }
            }
            if row.iter().any(|x| !x.is_zero()) {
                rows.push(row);
            }
        }
        let pivots = if rows.is_empty() {
            Vec::new()
        } else {
            rref(&mut rows)
        };
        let free: Vec<usize> = (0..reps.len()).filter(|c| !pivots.contains(c)).collect();
        let rank = free.len();

        // Image of each reduced generator in the free coordinates.
        let mut gen_image: Vec<Vec<BigRational>> =
            vec![vec![BigRational::zero(); rank]; reps.len()];
        for (k, &f) in free.iter().enumerate() {
            gen_image[f][k] = BigRational::one();
        }
        for (row, &p) in rows.iter().zip(&pivots) {
            for (k, &f) in free.iter().enumerate() {
                gen_image[p][k] = -row[f].clone();
            }
        }
        let images: Vec<Vec<BigRational>> = (0..count)
            .map(|i| {
                let (r, s) = rep[i];
                if s == 0 {
                    vec![BigRational::zero(); rank]
                } else {
                    gen_image[r].iter().map(|x| x * qv(s)).collect()
                }
            })
            .collect();

        // Integral lattice spanned by all symbol images.
        let den = images.iter().flatten().fold(BigInt::one(), |acc, x| {
            num_integer::Integer::lcm(&acc, x.denom())
        });
        let scaled: Vec<Vec<BigInt>> = images
            .iter()
            .map(|v| {
                v.iter()
                    .map(|x| (x * BigRational::from_integer(den.clone())).to_integer())
                    .collect()
            })
            .collect();
        let hnf = if rank == 0 {
            Vec::new()
        } else {
            hnf_rows(scaled)
        };
        assert_eq!(hnf.len(), rank, "symbol lattice has full rank");
        let basis_q: QMat = hnf
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| BigRational::new(x.clone(), den.clone()))
                    .collect()
            })
            .collect();
        let basis_inv = if rank == 0 {
            Vec::new()
        } else {
            inverse(&basis_q).expect("basis is invertible")
        };

        let symbol_coords: Vec<Vec<i64>> = images
            .iter()
            .map(|v| {
                (0..rank)
                    .map(|j| {
                        let x = v
                            .iter()
                            .enumerate()
                            .filter(|(_, a)| !a.is_zero())
                            .fold(BigRational::zero(), |acc, (k, a)| {
                                acc + a * &basis_inv[k][j]
                            });
                        assert!(x.is_integer(), "symbol coordinates are integral");
                        to_i64(&x.to_integer())
                    })
                    .collect()
            })
            .collect();
        let basis_symbols: Vec<Vec<(usize, BigRational)>> = basis_q
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .map(|(k, x)| (reps[free[k]], x.clone()))
                    .collect()
            })
            .collect();

        let cusps = CuspList::new(level);
        let mut basis = Self {
            level,
            p1,
            relations,
            rank,
            cusps,
            symbol_coords,
            basis_symbols,
            boundary: IntMatrix::zeros(0, 0),
        };
        let ncusps = basis.cusps.len();
        basis.boundary = basis.apply_on_basis(ncusps, |b, i| {
            let (c, d) = b.p1.get(i);
            let g = lift_to_sl2(c, d, n);
            let mut v = vec![0i64; ncusps];
            v[b.cusps.index(Cusp::new(g[0][0], g[1][0]))] += 1;
            v[b.cusps.index(Cusp::new(g[0][1], g[1][1]))] -= 1;
            v
        });
        basis
    }

    /// Matrix whose column `k` is the image of basis vector `k` under the
    /// linear map given on Manin symbols by `on_symbol` (an integer vector
    /// of length `out_dim`).
    pub(crate) fn apply_on_basis<F>(&self, out_dim: usize, on_symbol: F) -> IntMatrix
    where
        F: Fn(&Self, usize) -> Vec<i64>,
    {
        let mut m = IntMatrix::zeros(out_dim, self.rank);
        let mut cache: std::collections::HashMap<usize, Vec<i64>> =
            std::collections::HashMap::new();
        for (k, combo) in self.basis_symbols.iter().enumerate() {
            let mut acc = vec![BigRational::zero(); out_dim];
            for (sym, coeff) in combo {
                let img = cache.entry(*sym).or_insert_with(|| on_symbol(self, *sym));
                for (a, &x) in acc.iter_mut().zip(img.iter()) {
                    if x != 0 {
                        *a += coeff * qv(x);
                    }
                }
            }
            for (i, a) in acc.into_iter().enumerate() {
                assert!(a.is_integer(), "operator preserves the integral lattice");
                m.set(i, k, to_i64(&a.to_integer()));
            }
        }
        m
    }

    pub fn num_symbols(&self) -> usize {
        self.p1.len()
    }

    /// Coordinates of the Manin symbol `(c : d)`; zero vector if `(c, d)` is
    /// not in `P^1(Z/N)`.
    pub fn symbol_coords(&self, c: i64, d: i64) -> Vec<i64> {
        match self.p1.index(c, d) {
            Some(i) => self.symbol_coords[i].clone(),
            None => vec![0; self.rank],
        }
    }

    pub fn symbol_coords_by_index(&self, i: usize) -> &[i64] {
        &self.symbol_coords[i]
    }

    pub fn class(&self, coords: Vec<i64>) -> HomologyClass {
        assert_eq!(coords.len(), self.rank, "coordinate length must equal rank");
        HomologyClass {
            level: self.level,
            coords,
        }
    }

    pub fn zero(&self) -> HomologyClass {
        HomologyClass::zero(self.level, self.rank)
    }

    /// The `k`-th integral basis vector.
    pub fn basis_vector(&self, k: usize) -> HomologyClass {
        let mut v = vec![0; self.rank];
        v[k] = 1;
        self.class(v)
    }

    /// Boundary matrix: `cusps x rank`.
    pub fn boundary_matrix(&self) -> &IntMatrix {
        &self.boundary
    }

    pub fn boundary(&self, g: &HomologyClass) -> CuspDivisor {
        CuspDivisor {
            multiplicities: self.boundary.mul_vec(&g.coords),
        }
    }

    /// `{0 -> r}` as a class.
    fn zero_to(&self, r: Cusp) -> Vec<i64> {
        let mut acc = vec![0i64; self.rank];
        if r.is_infinity() {
            return self.symbol_coords(0, 1);
        }
        let mut chain = vec![(0i64, 1i64), (1, 0)];
        chain.extend(convergents(r.num, r.den));
        for w in chain.windows(2) {
            let ((u1, v1), (u2, v2)) = (w[0], w[1]);
            let det = u2 as i128 * v1 as i128 - u1 as i128 * v2 as i128;
            debug_assert!(det.abs() == 1);
            let s = self.symbol_coords(v2, det as i64 * v1);
            for (a, x) in acc.iter_mut().zip(s) {
                *a += x;
            }
        }
        acc
    }

    /// The modular symbol `{r -> s}`.
    pub fn symbol_from_cusps(&self, r: Cusp, s: Cusp) -> HomologyClass {
        let a = self.zero_to(s);
        let b = self.zero_to(r);
        self.class(a.iter().zip(&b).map(|(x, y)| x - y).collect())
    }

    /// Divisor `[s] - [r]` on cusp classes.
    pub fn cusp_divisor(&self, r: Cusp, s: Cusp) -> CuspDivisor {
        let mut v = vec![0i64; self.cusps.len()];
        v[self.cusps.index(s)] += 1;
        v[self.cusps.index(r)] -= 1;
        CuspDivisor { multiplicities: v }
    }

    /// The involution induced by `z -> -conj(z)`, `(c : d) -> (-c : d)`.
    pub fn star_matrix(&self) -> IntMatrix {
        self.apply_on_basis(self.rank, |b, i| {
            let (c, d) = b.p1.get(i);
            b.symbol_coords(-c, d)
        })
    }

    /// Basis of the cuspidal subspace (kernel of the boundary) as rational
    /// column vectors.
    pub fn cuspidal_subspace(&self) -> Vec<Vec<BigRational>> {
        if self.cusps.len() == 0 || self.rank == 0 {
            return Vec::new();
        }
        linalg::nullspace(&self.boundary.to_q(), self.rank)
    }
}

/// Genus of `X_0(N)` from the Riemann–Hurwitz formula.
pub fn genus_x0(n: u64) -> u64 {
    let mu = super::p1::psi(n) as i64;
    let primes: Vec<u64> = crate::arith::factor(n)
        .into_iter()
        .map(|(p, _)| p)
        .collect();
    let nu2: i64 = if n % 4 == 0 {
        0
    } else {
        primes
            .iter()
            .map(|&p| 1 + crate::arith::kronecker(-4, p) as i64)
            .product()
    };
    let nu3: i64 = if n % 9 == 0 {
        0
    } else {
        primes
            .iter()
            .map(|&p| 1 + crate::arith::kronecker(-3, p) as i64)
            .product()
    };
    let c = super::cusps::cusp_count(n) as i64;
    // 12 g = 12 + mu - 3 nu2 - 4 nu3 - 6 c
    let twelve_g = 12 + mu - 3 * nu2 - 4 * nu3 - 6 * c;
    assert!(twelve_g >= 0 && twelve_g % 12 == 0);
    (twelve_g / 12) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lifts_are_in_sl2() {
        for n in [1i64, 6, 11, 12] {
            let p = P1List::new(n as u64);
            for &(c, d) in p.elements() {
                let g = lift_to_sl2(c, d, n);
                assert_eq!(g[0][0] * g[1][1] - g[0][1] * g[1][0], 1);
                assert_eq!(p.index(g[1][0], g[1][1]), p.index(c, d));
            }
        }
    }

    #[test]
    fn small_ranks() {
        assert_eq!(ManinBasis::new(1).rank, 0);
        assert_eq!(ManinBasis::new(2).rank, 1);
        let b = ManinBasis::new(11);
        assert_eq!(b.num_symbols(), 12);
        assert_eq!(b.rank, 3);
    }

    #[test]
    fn genus_values() {
        for (n, g) in [
            (1, 0),
            (11, 1),
            (23, 2),
            (37, 2),
            (60, 7),
            (64, 3),
            (49, 1),
            (36, 1),
        ] {
            assert_eq!(genus_x0(n), g, "g(X0({n}))");
        }
    }
}
