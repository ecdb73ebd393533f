//! Exact linear algebra: dense rational matrices, integer lattices and
//! small machine-integer matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub type QMat = Vec<Vec<BigRational>>;

pub fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn qzero(rows: usize, cols: usize) -> QMat {
    vec![vec![BigRational::zero(); cols]; rows]
}

pub fn qidentity(n: usize) -> QMat {
    let mut m = qzero(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = BigRational::one();
    }
    m
}

pub fn qmul(a: &QMat, b: &QMat) -> QMat {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    let mut out = qzero(a.len(), cols);
    for (i, row) in a.iter().enumerate() {
        for (k, aik) in row.iter().enumerate().take(inner) {
            if aik.is_zero() {
                continue;
            }
            for j in 0..cols {
                if !b[k][j].is_zero() {
                    out[i][j] += aik * &b[k][j];
                }
            }
        }
    }
    out
}

pub fn qmul_vec(a: &QMat, v: &[BigRational]) -> Vec<BigRational> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .filter(|(x, y)| !x.is_zero() && !y.is_zero())
                .fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
        })
        .collect()
}

pub fn qtranspose(a: &QMat) -> QMat {
    let cols = a.first().map_or(0, |r| r.len());
    (0..cols)
        .map(|j| a.iter().map(|row| row[j].clone()).collect())
        .collect()
}

/// In-place reduced row echelon form; returns the pivot columns.
pub fn rref(m: &mut QMat) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut().skip(c) {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row).skip(c) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r.max(0));
    pivots
}

pub fn rank(m: &QMat) -> usize {
    let mut m = m.clone();
    rref(&mut m).len()
}

/// Basis of `{x : m x = 0}` as column vectors.
pub fn nullspace(m: &QMat, cols: usize) -> Vec<Vec<BigRational>> {
    let mut r = m.clone();
    let pivots = rref(&mut r);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (row, &p) in r.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

pub fn inverse(m: &QMat) -> Option<QMat> {
    let n = m.len();
    let mut aug: QMat = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Solve `m x = b` for a single right-hand side; `None` if inconsistent.
pub fn solve(m: &QMat, b: &[BigRational]) -> Option<Vec<BigRational>> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut aug: QMat = m
        .iter()
        .zip(b)
        .map(|(row, x)| {
            let mut r = row.clone();
            r.push(x.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![BigRational::zero(); cols];
    for (row, &p) in aug.iter().zip(&pivots) {
        x[p] = row[cols].clone();
    }
    Some(x)
}

/// Characteristic polynomial `det(xI - m)`, constant term first, via
/// Berkowitz's division-free recursion.
pub fn charpoly(m: &QMat) -> Vec<BigRational> {
    let n = m.len();
    if n == 0 {
        return vec![BigRational::one()];
    }
    // Coefficients stored highest degree first during the recursion.
    let mut vect: Vec<BigRational> = vec![BigRational::one(), -m[0][0].clone()];
    for r in 1..n {
        // Build the Toeplitz column for the leading (r+1)x(r+1) block.
        let row: Vec<BigRational> = (0..r).map(|j| m[r][j].clone()).collect();
        let col: Vec<BigRational> = (0..r).map(|i| m[i][r].clone()).collect();
        let a = m[r][r].clone();
        let sub: QMat = (0..r).map(|i| m[i][..r].to_vec()).collect();
        let mut c = vec![BigRational::one(), -a];
        let mut power = col.clone();
        for _ in 0..r {
            let val = row
                .iter()
                .zip(&power)
                .fold(BigRational::zero(), |acc, (x, y)| acc + x * y);
            c.push(-val);
            power = qmul_vec(&sub, &power);
        }
        // Multiply the lower-triangular Toeplitz matrix with `vect`.
        let mut next = vec![BigRational::zero(); r + 2];
        for (i, slot) in next.iter_mut().enumerate() {
            for j in 0..=r.min(i) {
                if i - j < c.len() && j < vect.len() {
                    *slot += &c[i - j] * &vect[j];
                }
            }
        }
        vect = next;
    }
    vect.reverse();
    vect
}

pub fn int_charpoly(m: &IntMatrix) -> Vec<BigInt> {
    charpoly(&m.to_q())
        .into_iter()
        .map(|c| {
            assert!(c.is_integer(), "integer matrix has integral charpoly");
            c.to_integer()
        })
        .collect()
}

/// Scale a rational vector to the primitive integer vector on its line
/// (first nonzero entry positive).
pub fn primitive(v: &[BigRational]) -> Vec<BigInt> {
    let den = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &den).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    let sign = if ints
        .iter()
        .find(|x| !x.is_zero())
        .is_some_and(|x| x.is_negative())
    {
        -BigInt::one()
    } else {
        BigInt::one()
    };
    ints.into_iter().map(|x| x / &g * &sign).collect()
}

/// Row Hermite normal form of the lattice spanned by `rows`; returns the
/// nonzero rows, pivots strictly increasing, pivots positive.
pub fn hnf_rows(mut rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut out: Vec<Vec<BigInt>> = Vec::new();
    for c in 0..cols {
        rows.retain(|r| r.iter().any(|x| !x.is_zero()));
        let mut active: Vec<usize> = (0..rows.len()).filter(|&i| !rows[i][c].is_zero()).collect();
        if active.is_empty() {
            continue;
        }
        // Euclid on column c until a single row carries a nonzero entry.
        while active.len() > 1 {
            let (pi, _) = active
                .iter()
                .enumerate()
                .min_by_key(|(_, &i)| rows[i][c].abs())
                .unwrap();
            let p = active[pi];
            let pivot = rows[p].clone();
            for &i in &active {
                if i == p {
                    continue;
                }
                let f = rows[i][c].div_floor(&pivot[c]);
                for (x, y) in rows[i].iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
            active.retain(|&i| !rows[i][c].is_zero());
        }
        let mut row = rows.swap_remove(active[0]);
        if row[c].is_negative() {
            row.iter_mut().for_each(|x| *x = -x.clone());
        }
        for prev in out.iter_mut() {
            let f = prev[c].div_floor(&row[c]);
            if !f.is_zero() {
                for (x, y) in prev.iter_mut().zip(&row) {
                    *x -= &f * y;
                }
            }
        }
        out.push(row);
    }
    out
}

/// Dense row-major matrix of machine integers with overflow-checked
/// products.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Self {
            rows: r,
            cols: c,
            data: rows.concat(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let s: i128 = (0..self.cols)
                    .map(|k| self.get(i, k) as i128 * other.get(k, j) as i128)
                    .sum();
                out.set(
                    i,
                    j,
                    i64::try_from(s).expect("integer matrix product overflow"),
                );
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let s: i128 = self
                    .row(i)
                    .iter()
                    .zip(v)
                    .map(|(&a, &b)| a as i128 * b as i128)
                    .sum();
                i64::try_from(s).expect("integer matrix-vector overflow")
            })
            .collect()
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, k: i64) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * k).collect(),
        }
    }

    pub fn to_q(&self) -> QMat {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|&x| q(x)).collect())
            .collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
}

pub fn to_i64(x: &BigInt) -> i64 {
    x.to_i64().expect("value fits in i64")
}

/// Evaluate an integer polynomial (constant term first) at a square matrix.
pub fn poly_at_matrix(poly: &[BigInt], m: &IntMatrix) -> QMat {
    let n = m.rows;
    let mq = m.to_q();
    let mut acc = qzero(n, n);
    for c in poly.iter().rev() {
        acc = qmul(&acc, &mq);
        for (i, row) in acc.iter_mut().enumerate() {
            row[i] += BigRational::from_integer(c.clone());
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qm(rows: &[&[i64]]) -> QMat {
        rows.iter()
            .map(|r| r.iter().map(|&x| q(x)).collect())
            .collect()
    }

    /// Exact determinant by cofactor expansion, independent of `charpoly`.
    fn det(m: &QMat) -> BigRational {
        let n = m.len();
        if n == 0 {
            return BigRational::one();
        }
        (0..n)
            .map(|j| {
                let minor: QMat = m[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|(k, _)| *k != j)
                            .map(|(_, x)| x.clone())
                            .collect()
                    })
                    .collect();
                let s = if j % 2 == 0 { q(1) } else { q(-1) };
                s * &m[0][j] * det(&minor)
            })
            .fold(BigRational::zero(), |a, b| a + b)
    }

    #[test]
    fn charpoly_matches_determinant_at_points() {
        let m = qm(&[
            &[2, -1, 0, 3],
            &[1, 0, 4, -2],
            &[0, 5, -3, 1],
            &[7, 1, 1, 1],
        ]);
        let cp = charpoly(&m);
        assert_eq!(cp.len(), 5);
        for x in -3..=3 {
            let shifted: QMat = m
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    r.iter()
                        .enumerate()
                        .map(|(j, v)| if i == j { q(x) - v } else { -v.clone() })
                        .collect()
                })
                .collect();
            let val = cp
                .iter()
                .rev()
                .fold(BigRational::zero(), |acc, c| acc * q(x) + c);
            assert_eq!(val, det(&shifted));
        }
    }

    #[test]
    fn inverse_and_nullspace() {
        let m = qm(&[&[2, 1], &[5, 3]]);
        let inv = inverse(&m).unwrap();
        assert_eq!(qmul(&m, &inv), qidentity(2));
        let s = qm(&[&[1, 2, 3], &[2, 4, 6]]);
        let ns = nullspace(&s, 3);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(qmul_vec(&s, &v).iter().all(|x| x.is_zero()));
        }
        assert!(inverse(&qm(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn hnf_spans_same_lattice() {
        let rows: Vec<Vec<BigInt>> = [[4i64, 6, 2], [2, 2, 2], [6, 8, 4]]
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        let h = hnf_rows(rows);
        assert_eq!(h.len(), 2);
        let as_i: Vec<Vec<i64>> = h.iter().map(|r| r.iter().map(to_i64).collect()).collect();
        assert_eq!(as_i, vec![vec![2, 0, 4], vec![0, 2, -2]]);
    }
}
