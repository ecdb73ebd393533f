//! Cusps of `Γ_0(N)` and their equivalence classes.

use serde::{Deserialize, Serialize};

use crate::arith::{divisors, euler_phi, gcd, gcd_i128, mod_inv};

/// A point of `P^1(Q)`: `num/den` in lowest terms with `den >= 0`;
/// `∞` is `1/0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cusp {
    pub num: i64,
    pub den: i64,
}

impl Cusp {
    pub const INFINITY: Cusp = Cusp { num: 1, den: 0 };

    pub fn new(num: i64, den: i64) -> Self {
        assert!(num != 0 || den != 0, "0/0 is not a cusp");
        if den == 0 {
            return Self::INFINITY;
        }
        let g = gcd(num, den);
        let s = den.signum();
        Self {
            num: s * num / g,
            den: s * den / g,
        }
    }

    pub fn integer(n: i64) -> Self {
        Self { num: n, den: 1 }
    }

    pub fn is_infinity(&self) -> bool {
        self.den == 0
    }
}

impl std::fmt::Display for Cusp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_infinity() {
            write!(f, "oo")
        } else if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl std::str::FromStr for Cusp {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if matches!(s, "oo" | "inf" | "infinity") {
            return Ok(Self::INFINITY);
        }
        let bad = |_| format!("bad cusp {s:?}");
        match s.split_once('/') {
            Some((a, b)) => {
                let (a, b): (i64, i64) = (
                    a.trim().parse().map_err(bad)?,
                    b.trim().parse().map_err(bad)?,
                );
                if a == 0 && b == 0 {
                    return Err(format!("bad cusp {s:?}"));
                }
                Ok(Self::new(a, b))
            }
            None => Ok(Self::integer(s.parse().map_err(bad)?)),
        }
    }
}

/// Equivalence of cusps under `Γ_0(N)`: `u1/v1 ~ u2/v2` iff
/// `s1 v2 ≡ s2 v1 (mod gcd(v1 v2, N))` with `u_i s_i ≡ 1 (mod v_i)`.
pub fn cusps_equivalent(a: Cusp, b: Cusp, n: u64) -> bool {
    let n = n as i64;
    if a.is_infinity() || b.is_infinity() {
        let other = if a.is_infinity() { b } else { a };
        return other.den % n == 0;
    }
    let s = |c: Cusp| {
        if c.den == 1 {
            0
        } else {
            mod_inv(c.num, c.den).expect("lowest terms")
        }
    };
    let (s1, s2) = (s(a) as i128, s(b) as i128);
    let (v1, v2) = (a.den as i128, b.den as i128);
    let g = gcd_i128(v1 * v2, n as i128);
    (s1 * v2 - s2 * v1).rem_euclid(g) == 0
}

/// Representatives of the cusp classes, `∞` first and `0` second.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CuspList {
    pub level: u64,
    pub reps: Vec<Cusp>,
}

/// Number of cusps of `X_0(N)`: `sum_{d | N} φ(gcd(d, N/d))`.
pub fn cusp_count(n: u64) -> usize {
    divisors(n)
        .into_iter()
        .map(|d| euler_phi(gcd(d as i64, (n / d) as i64) as u64) as usize)
        .sum()
}

impl CuspList {
    pub fn new(n: u64) -> Self {
        let mut reps = vec![Cusp::INFINITY];
        let target = cusp_count(n);
        let push = |c: Cusp, reps: &mut Vec<Cusp>| {
            if !reps.iter().any(|&r| cusps_equivalent(r, c, n)) {
                reps.push(c);
            }
        };
        push(Cusp::integer(0), &mut reps);
        'outer: for d in divisors(n) {
            for a in 1..=(n as i64 * d as i64) {
                if reps.len() == target {
                    break 'outer;
                }
                if gcd(a, d as i64) == 1 {
                    push(Cusp::new(a, d as i64), &mut reps);
                }
            }
        }
        Self { level: n, reps }
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// Index of the class of `c`.
    pub fn index(&self, c: Cusp) -> usize {
        self.reps
            .iter()
            .position(|&r| cusps_equivalent(r, c, self.level))
            .expect("every cusp is equivalent to a representative")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn act(m: [[i64; 2]; 2], c: Cusp) -> Cusp {
        let (u, v) = (c.num, c.den);
        Cusp::new(m[0][0] * u + m[0][1] * v, m[1][0] * u + m[1][1] * v)
    }

    fn mat_mul(a: [[i64; 2]; 2], b: [[i64; 2]; 2]) -> [[i64; 2]; 2] {
        let mut o = [[0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                o[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        o
    }

    #[test]
    fn counts_match_divisor_formula() {
        for n in 1..=60 {
            assert_eq!(CuspList::new(n).len(), cusp_count(n), "N={n}");
        }
        assert_eq!(cusp_count(11), 2);
        assert_eq!(cusp_count(1), 1);
    }

    #[test]
    fn equivalence_is_invariant_under_the_group() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [6u64, 11, 12, 18, 25, 36] {
            let cl = CuspList::new(n);
            let gens = [
                [[1, 1], [0, 1]],
                [[1, -1], [0, 1]],
                [[1, 0], [n as i64, 1]],
                [[1, 0], [-(n as i64), 1]],
            ];
            for _ in 0..200 {
                let mut g = [[1, 0], [0, 1]];
                for _ in 0..rng.gen_range(1..6) {
                    g = mat_mul(g, gens[rng.gen_range(0..4)]);
                }
                let c = Cusp::new(rng.gen_range(-20..20), rng.gen_range(1..20));
                assert_eq!(cl.index(c), cl.index(act(g, c)), "N={n} c={c}");
            }
            // distinct representatives are inequivalent
            for (i, &a) in cl.reps.iter().enumerate() {
                for &b in &cl.reps[i + 1..] {
                    assert!(!cusps_equivalent(a, b, n));
                }
            }
        }
    }

    #[test]
    fn parsing() {
        assert_eq!("oo".parse::<Cusp>().unwrap(), Cusp::INFINITY);
        assert_eq!("2/-6".parse::<Cusp>().unwrap(), Cusp::new(-1, 3));
        assert_eq!("5".parse::<Cusp>().unwrap(), Cusp::integer(5));
        assert!("0/0".parse::<Cusp>().is_err());
    }
}
