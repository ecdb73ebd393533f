use serde::{Deserialize, Serialize};

use super::MsiError;
use crate::coleman::{PeriodMap, PeriodVector};

/// Solution set of `A x = y` over `Z/l^m`: `particular + span(kernel)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum LinearSolution {
    Solvable {
        particular: Vec<u64>,
        kernel: Vec<Vec<u64>>,
    },
    Unsolvable,
}

fn mulmod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

fn val(x: u64, l: u64, m: u32) -> u32 {
    if x == 0 {
        return m;
    }
    let (mut x, mut v) = (x, 0);
    while x % l == 0 {
        x /= l;
        v += 1;
    }
    v
}

fn inv_unit(u: u64, q: u64) -> u64 {
    let (g, x, _) = crate::arith::xgcd(u as i128, q as i128);
    debug_assert_eq!(g, 1);
    x.rem_euclid(q as i128) as u64
}

/// Solve `A x = y (mod l^m)` for a `d x n` matrix given by rows.
///
/// Diagonalizes `A` by unimodular row and column operations, pivoting on
/// an entry of least `l`-adic valuation, so that `U A V = diag(l^e_k)`.
pub fn solve_linear(
    l: u64,
    m: u32,
    rows: &[Vec<u64>],
    y: &[u64],
) -> Result<LinearSolution, MsiError> {
    let q = crate::coleman::modulus(l, m)?;
    let d = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    if y.len() != d || rows.iter().any(|r| r.len() != n) {
        return Err(MsiError::MalformedMatrix(
            "shape does not match the target".into(),
        ));
    }
    let mut a: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x % q).collect())
        .collect();
    let mut y: Vec<u64> = y.iter().map(|&x| x % q).collect();
    let mut v: Vec<Vec<u64>> = (0..n)
        .map(|i| (0..n).map(|j| u64::from(i == j)).collect())
        .collect();
    let mut exps: Vec<u32> = Vec::new();

    for k in 0..d.min(n) {
        let best = (k..d)
            .flat_map(|i| (k..n).map(move |j| (i, j)))
            .filter(|&(i, j)| a[i][j] != 0)
            .min_by_key(|&(i, j)| (val(a[i][j], l, m), i, j));
        let Some((pi, pj)) = best else { break };
        a.swap(k, pi);
        y.swap(k, pi);
        for row in a.iter_mut() {
            row.swap(k, pj);
        }
        for row in v.iter_mut() {
            row.swap(k, pj);
        }
        let e = val(a[k][k], l, m);
        let le = l.pow(e);
        let unit = inv_unit(a[k][k] / le, q);
        for x in a[k].iter_mut() {
            *x = mulmod(*x, unit, q);
        }
        y[k] = mulmod(y[k], unit, q);
        for i in 0..d {
            if i == k || a[i][k] == 0 {
                continue;
            }
            let f = a[i][k] / le;
            for j in 0..n {
                a[i][j] = (a[i][j] + q - mulmod(f, a[k][j], q)) % q;
            }
            y[i] = (y[i] + q - mulmod(f, y[k], q)) % q;
        }
        for j in 0..n {
            if j == k || a[k][j] == 0 {
                continue;
            }
            let f = a[k][j] / le;
            for row in a.iter_mut() {
                row[j] = (row[j] + q - mulmod(f, row[k], q)) % q;
            }
            for row in v.iter_mut() {
                row[j] = (row[j] + q - mulmod(f, row[k], q)) % q;
            }
        }
        exps.push(e);
    }

    let rank = exps.len();
    let mut z = vec![0u64; n];
    for (k, &e) in exps.iter().enumerate() {
        if val(y[k], l, m) < e {
            return Ok(LinearSolution::Unsolvable);
        }
        z[k] = y[k] / l.pow(e);
    }
    if y[rank..].iter().any(|&x| x != 0) {
        return Ok(LinearSolution::Unsolvable);
    }
    let apply_v = |z: &[u64]| -> Vec<u64> {
        (0..n)
            .map(|i| (0..n).fold(0, |acc, j| (acc + mulmod(v[i][j], z[j], q)) % q))
            .collect()
    };
    let particular = apply_v(&z);
    let mut kernel = Vec::new();
    for k in 0..n {
        let step = match exps.get(k) {
            Some(&0) => continue,
            Some(&e) => l.pow(m - e),
            None => 1,
        };
        let mut ek = vec![0u64; n];
        ek[k] = step;
        kernel.push(apply_v(&ek));
    }
    Ok(LinearSolution::Solvable { particular, kernel })
}

pub fn solve_linear_unconstrained(
    a: &PeriodMap,
    y: &PeriodVector,
) -> Result<LinearSolution, MsiError> {
    if a.l != y.l || a.m != y.m {
        return Err(MsiError::MalformedMatrix(
            "target and matrix use different moduli".into(),
        ));
    }
    solve_linear(a.l, a.m, &a.rows, &y.entries)
}
