//! Small-integer number theory shared by the other modules.

/// Non-negative gcd.
pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a as i64
}

pub fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a as i128
}

pub fn lcm(a: i64, b: i64) -> i64 {
    if a == 0 || b == 0 {
        return 0;
    }
    (a / gcd(a, b) * b).abs()
}

/// Extended Euclid: returns `(g, x, y)` with `a*x + b*y = g >= 0`.
pub fn xgcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Inverse of `a` modulo `m`, if it exists. Result lies in `[0, m)`.
pub fn mod_inv(a: i64, m: i64) -> Option<i64> {
    if m == 1 {
        return Some(0);
    }
    let (g, x, _) = xgcd(a as i128, m as i128);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(m as i128) as i64)
}

pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u128;
    let mut b = (base % m) as u128;
    let m128 = m as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let mut sieve = vec![true; (n + 1) as usize];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2usize;
    while i * i <= n as usize {
        if sieve[i] {
            let mut j = i * i;
            while j <= n as usize {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(k, &p)| p.then_some(k as u64))
        .collect()
}

/// Prime factorisation by trial division, as `(prime, exponent)` pairs.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds: Vec<u64> = (1..)
        .take_while(|d| d * d <= n)
        .filter(|d| n % d == 0)
        .flat_map(|d| if d * d == n { vec![d] } else { vec![d, n / d] })
        .collect();
    ds.sort_unstable();
    ds
}

pub fn euler_phi(n: u64) -> u64 {
    factor(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// `l`-adic valuation of a nonzero integer; `None` for zero.
pub fn valuation(n: i128, l: u64) -> Option<u32> {
    if n == 0 {
        return None;
    }
    let l = l as i128;
    let mut n = n;
    let mut v = 0;
    while n % l == 0 {
        n /= l;
        v += 1;
    }
    Some(v)
}

/// Kronecker symbol `(a / n)` for `n > 0`.
pub fn kronecker(a: i64, n: u64) -> i32 {
    if n == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    let mut result = 1i32;
    let mut n = n;
    while n % 2 == 0 {
        n /= 2;
        if a % 2 == 0 {
            return 0;
        }
        let r = a.rem_euclid(8);
        if r == 3 || r == 5 {
            result = -result;
        }
    }
    if n == 1 {
        return result;
    }
    // Jacobi symbol for odd n.
    let mut a = a.rem_euclid(n as i64) as u64;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Degree of `gcd(a, b)` over `F_p` for polynomials given constant term
/// first; `None` when both are zero.
pub fn poly_gcd_degree_mod_p(a: &[i64], b: &[i64], p: u64) -> Option<usize> {
    let reduce = |v: &[i64]| -> Vec<u64> {
        let mut out: Vec<u64> = v.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect();
        while out.last() == Some(&0) {
            out.pop();
        }
        out
    };
    let (mut x, mut y) = (reduce(a), reduce(b));
    while !y.is_empty() {
        // x := x mod y
        let inv = pow_mod(*y.last().unwrap(), p - 2, p);
        while x.len() >= y.len() {
            let shift = x.len() - y.len();
            let f = (*x.last().unwrap() as u128 * inv as u128 % p as u128) as u64;
            for (i, &c) in y.iter().enumerate() {
                let sub = (f as u128 * c as u128 % p as u128) as u64;
                x[i + shift] = (x[i + shift] + p - sub) % p;
            }
            while x.last() == Some(&0) {
                x.pop();
            }
        }
        std::mem::swap(&mut x, &mut y);
    }
    if x.is_empty() {
        None
    } else {
        Some(x.len() - 1)
    }
}

/// `sigma_k(n)`, the sum of the `k`-th powers of the divisors of `n`.
pub fn sigma(n: u64, k: u32) -> u128 {
    divisors(n).into_iter().map(|d| (d as u128).pow(k)).sum()
}

/// Continued-fraction convergents `p_i/q_i` of `num/den` (den > 0).
pub fn convergents(num: i64, den: i64) -> Vec<(i64, i64)> {
    assert!(den > 0, "convergents need a positive denominator");
    let (mut a, mut b) = (num as i128, den as i128);
    let (mut p_prev, mut p) = (0i128, 1i128);
    let (mut q_prev, mut q) = (1i128, 0i128);
    let mut out = Vec::new();
    while b != 0 {
        let t = a.div_euclid(b);
        (a, b) = (b, a - t * b);
        (p_prev, p) = (p, t * p + p_prev);
        (q_prev, q) = (q, t * q + q_prev);
        out.push((p as i64, q as i64));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronecker_matches_euler_criterion() {
        for p in primes_up_to(60).into_iter().filter(|&p| p > 2) {
            for a in -30i64..30 {
                let euler = if a.rem_euclid(p as i64) == 0 {
                    0
                } else if pow_mod(a.rem_euclid(p as i64) as u64, (p - 1) / 2, p) == 1 {
                    1
                } else {
                    -1
                };
                assert_eq!(kronecker(a, p), euler, "({a}/{p})");
            }
        }
        // (d/2) depends on d mod 8
        assert_eq!(kronecker(-23, 2), 1);
        assert_eq!(kronecker(-3, 2), -1);
        assert_eq!(kronecker(-4, 2), 0);
    }

    #[test]
    fn convergents_end_at_value() {
        let cs = convergents(-7, 3);
        assert_eq!(*cs.last().unwrap(), (-7, 3));
        for w in cs.windows(2) {
            let ((p0, q0), (p1, q1)) = (w[0], w[1]);
            assert_eq!((p1 * q0 - p0 * q1).abs(), 1);
        }
    }

    #[test]
    fn phi_and_divisors() {
        assert_eq!(euler_phi(36), 12);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(sigma(6, 3), 1 + 8 + 27 + 216);
    }
}
