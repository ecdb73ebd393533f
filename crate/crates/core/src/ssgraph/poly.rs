//! Univariate polynomials over `F_{p^2}` (constant term first) and root
//! finding with multiplicities.

use super::field::{FiniteFieldElem as E, Fp2};

pub type Poly = Vec<E>;

fn trim(mut a: Poly) -> Poly {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

fn degree(a: &Poly) -> Option<usize> {
    a.len().checked_sub(1)
}

fn mul(f: &Fp2, a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![f.zero(); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    trim(out)
}

/// Quotient and remainder of `a` by nonzero `b`.
fn divrem(f: &Fp2, a: &Poly, b: &Poly) -> (Poly, Poly) {
    let db = degree(b).expect("division by zero polynomial");
    let lead_inv = f.inv(b[db]).expect("nonzero leading coefficient");
    let mut r = trim(a.clone());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![f.zero(); r.len() - db];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = f.mul(r[dr], lead_inv);
        q[dr - db] = c;
        for (i, &bi) in b.iter().enumerate() {
            r[dr - db + i] = f.sub(r[dr - db + i], f.mul(c, bi));
        }
        r = trim(r);
    }
    (trim(q), r)
}

fn monic(f: &Fp2, a: Poly) -> Poly {
    let a = trim(a);
    match a.last() {
        None => a,
        Some(&lead) => {
            let inv = f.inv(lead).unwrap();
            a.into_iter().map(|c| f.mul(c, inv)).collect()
        }
    }
}

fn gcd(f: &Fp2, a: &Poly, b: &Poly) -> Poly {
    let (mut a, mut b) = (trim(a.clone()), trim(b.clone()));
    while !b.is_empty() {
        let r = divrem(f, &a, &b).1;
        a = b;
        b = r;
    }
    monic(f, a)
}

/// `base^e mod m`.
fn powmod(f: &Fp2, base: &Poly, mut e: u128, m: &Poly) -> Poly {
    let mut acc = vec![f.one()];
    let mut b = divrem(f, base, m).1;
    while e > 0 {
        if e & 1 == 1 {
            acc = divrem(f, &mul(f, &acc, &b), m).1;
        }
        b = divrem(f, &mul(f, &b, &b), m).1;
        e >>= 1;
    }
    acc
}

pub fn eval(f: &Fp2, a: &Poly, x: E) -> E {
    a.iter()
        .rev()
        .fold(f.zero(), |acc, &c| f.add(f.mul(acc, x), c))
}

/// Distinct roots of a squarefree polynomial that splits into linear factors.
fn split(f: &Fp2, g: &Poly, out: &mut Vec<E>) {
    match degree(g) {
        None | Some(0) => {}
        Some(1) => out.push(f.neg(f.mul(g[0], f.inv(g[1]).unwrap()))),
        Some(d) => {
            let half = (f.p as u128 * f.p as u128 - 1) / 2;
            // deterministic shifts (Y + k + s) until the gcd is a proper factor
            for k in 0.. {
                let delta = E(k % f.p, (1 + k / f.p) % f.p);
                let shifted = vec![delta, f.one()];
                let mut h = powmod(f, &shifted, half, g);
                if h.is_empty() {
                    h = vec![f.neg(f.one())];
                } else {
                    h[0] = f.sub(h[0], f.one());
                }
                let c = gcd(f, g, &h);
                let dc = degree(&c).unwrap_or(0);
                if dc > 0 && dc < d {
                    split(f, &c, out);
                    split(f, &divrem(f, g, &c).0, out);
                    return;
                }
            }
        }
    }
}

/// Roots of `a` in `F_{p^2}` with multiplicities, sorted by root.
pub fn roots(f: &Fp2, a: &Poly) -> Vec<(E, usize)> {
    let a = monic(f, a.clone());
    if degree(&a).unwrap_or(0) == 0 {
        return Vec::new();
    }
    let y = vec![f.zero(), f.one()];
    let mut frob = powmod(f, &y, f.p as u128 * f.p as u128, &a);
    while frob.len() < 2 {
        frob.push(f.zero());
    }
    frob[1] = f.sub(frob[1], f.one());
    let g = gcd(f, &a, &trim(frob));
    let mut distinct = Vec::new();
    split(f, &g, &mut distinct);
    distinct.sort();
    distinct
        .into_iter()
        .map(|r| {
            let lin = vec![f.neg(r), f.one()];
            let mut rest = a.clone();
            let mut k = 0;
            loop {
                let (q, rem) = divrem(f, &rest, &lin);
                if !rem.is_empty() {
                    break;
                }
                rest = q;
                k += 1;
            }
            (r, k)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_against_brute_force() {
        for p in [5u64, 7, 11, 13] {
            let f = Fp2::new(p);
            // (Y - 1)^2 (Y - s) (Y^2 - n s) and a few random-ish polynomials
            let polys: Vec<Poly> = vec![
                mul(
                    &f,
                    &mul(
                        &f,
                        &vec![f.neg(f.one()), f.one()],
                        &vec![f.neg(f.one()), f.one()],
                    ),
                    &vec![f.neg(E(0, 1)), f.one()],
                ),
                vec![E(3, 1), E(0, 2), E(1, 0), f.one()],
                vec![E(1, 1), E(2, 0), E(0, 0), E(4, 3), f.one()],
            ];
            for a in polys {
                let got = roots(&f, &a);
                let brute: Vec<E> = f
                    .elements()
                    .filter(|&x| eval(&f, &a, x).is_zero())
                    .collect();
                assert_eq!(got.iter().map(|r| r.0).collect::<Vec<_>>(), brute);
                for (r, k) in got {
                    // multiplicity: the k-1-st derivative vanishes, brute via division
                    let lin = vec![f.neg(r), f.one()];
                    let mut pw = vec![f.one()];
                    for _ in 0..k {
                        pw = mul(&f, &pw, &lin);
                    }
                    assert!(divrem(&f, &a, &pw).1.is_empty());
                    assert!(!divrem(&f, &a, &mul(&f, &pw, &lin)).1.is_empty());
                }
            }
        }
    }
}
