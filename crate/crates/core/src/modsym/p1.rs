//! The projective line `P^1(Z/N)` with canonical representatives.

use crate::arith::gcd;

const INVALID: u32 = u32::MAX;

/// Elements `(c : d)` of `P^1(Z/N)`. The representative of a class is its
/// lexicographically least element under scaling by units.
#[derive(Clone, Debug)]
pub struct P1List {
    n: i64,
    elems: Vec<(i64, i64)>,
    table: Vec<u32>,
}

impl P1List {
    pub fn new(n: u64) -> Self {
        assert!(n >= 1, "level must be positive");
        let n = n as i64;
        let units: Vec<i64> = (1..=n).filter(|&u| gcd(u, n) == 1).map(|u| u % n).collect();
        let size = (n * n) as usize;
        let mut table = vec![INVALID; size];
        let mut elems = Vec::new();
        for c in 0..n {
            for d in 0..n {
                let slot = (c * n + d) as usize;
                if table[slot] != INVALID || gcd(gcd(c, d), n) != 1 {
                    continue;
                }
                let idx = elems.len() as u32;
                elems.push((c, d));
                for &u in &units {
                    table[((u * c % n) * n + u * d % n) as usize] = idx;
                }
            }
        }
        Self { n, elems, table }
    }

    pub fn level(&self) -> u64 {
        self.n as u64
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn get(&self, i: usize) -> (i64, i64) {
        self.elems[i]
    }

    pub fn elements(&self) -> &[(i64, i64)] {
        &self.elems
    }

    /// Index of `(c : d)`, or `None` if `gcd(c, d, N) != 1`.
    pub fn index(&self, c: i64, d: i64) -> Option<usize> {
        let (c, d) = (c.rem_euclid(self.n), d.rem_euclid(self.n));
        let i = self.table[(c * self.n + d) as usize];
        (i != INVALID).then_some(i as usize)
    }
}

/// `N * prod_{p | N} (1 + 1/p)`, the index of `Γ_0(N)` in `SL_2(Z)`.
pub fn psi(n: u64) -> u64 {
    crate::arith::factor(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_match_index_formula() {
        for n in 1..=80 {
            assert_eq!(P1List::new(n).len() as u64, psi(n), "N={n}");
        }
        assert_eq!(P1List::new(11).len(), 12);
    }

    #[test]
    fn scaling_by_units_is_invisible() {
        let p = P1List::new(12);
        for &(c, d) in p.elements() {
            for u in [5, 7, 11] {
                assert_eq!(p.index(u * c, u * d), p.index(c, d));
            }
        }
        assert_eq!(p.index(2, 4), None);
    }
}
