//! Hecke operators on Manin symbols via Merel's Heilbronn matrices.

use super::basis::ManinBasis;
use crate::arith::factor;
use crate::linalg::IntMatrix;

/// Merel's set: `[[a, b], [c, d]]` with `ad - bc = n`, `a > b >= 0`,
/// `d > c >= 0`.
pub fn heilbronn_merel(n: u64) -> Vec<[i64; 4]> {
    let n = n as i64;
    let mut out = Vec::new();
    for a in 1..=n {
        for d in 1..=n {
            let k = a * d - n;
            if k < 0 {
                continue;
            }
            if k == 0 {
                for c in 0..d {
                    out.push([a, 0, c, d]);
                }
                for b in 1..a {
                    out.push([a, b, 0, d]);
                }
                continue;
            }
            for b in 1..a {
                if k % b == 0 && k / b < d {
                    out.push([a, b, k / b, d]);
                }
            }
        }
    }
    out
}

impl ManinBasis {
    /// Hecke operator of index `n` computed directly from the Heilbronn
    /// matrices of determinant `n`; symbols leaving `P^1(Z/N)` are dropped.
    pub fn hecke_matrix_direct(&self, n: u64) -> IntMatrix {
        assert!(n >= 1);
        let hs = heilbronn_merel(n);
        self.apply_on_basis(self.rank, |b, i| {
            let (u, v) = b.p1.get(i);
            let mut acc = vec![0i64; b.rank];
            for h in &hs {
                let c = u * h[0] + v * h[2];
                let d = u * h[1] + v * h[3];
                if let Some(j) = b.p1.index(c, d) {
                    for (a, x) in acc.iter_mut().zip(b.symbol_coords_by_index(j)) {
                        *a += x;
                    }
                }
            }
            acc
        })
    }

    /// Matrix of `T_n` (column convention: `coords(T γ) = M · coords(γ)`).
    /// Prime indices use the Heilbronn matrices; composite indices use
    /// `T_mn = T_m T_n` for coprime `m, n`,
    /// `T_{p^{k+1}} = T_p T_{p^k} - p T_{p^{k-1}}` for `p ∤ N`, and
    /// `U_{p^k} = U_p^k` for `p | N`.
    pub fn hecke_matrix(&self, n: u64) -> IntMatrix {
        assert!(n >= 1);
        let mut acc = IntMatrix::identity(self.rank);
        for (p, e) in factor(n) {
            let tp = self.hecke_matrix_direct(p);
            let mut prev = IntMatrix::identity(self.rank);
            let mut cur = tp.clone();
            for _ in 1..e {
                let next = if self.level % p == 0 {
                    cur.mul(&tp)
                } else {
                    tp.mul(&cur).sub(&prev.scale(p as i64))
                };
                prev = cur;
                cur = next;
            }
            acc = acc.mul(&cur);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heilbronn_counts() {
        // determinant check and no duplicates
        for n in 1..=12u64 {
            let hs = heilbronn_merel(n);
            for h in &hs {
                assert_eq!(h[0] * h[3] - h[1] * h[2], n as i64);
            }
            let mut s = hs.clone();
            s.sort();
            s.dedup();
            assert_eq!(s.len(), hs.len());
        }
        assert_eq!(heilbronn_merel(1).len(), 1);
    }

    #[test]
    fn composite_direct_matches_recurrence() {
        let b = ManinBasis::new(11);
        for n in [4u64, 6, 9, 10, 12] {
            assert_eq!(b.hecke_matrix(n), b.hecke_matrix_direct(n), "n={n}");
        }
    }
}
