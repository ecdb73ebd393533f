use std::collections::BTreeMap;

use msi_forge::arith::{is_prime, kronecker, primes_up_to};
use msi_forge::coleman::j_qexp;
use msi_forge::quadratic::{class_order, prime_form, Discriminant};
use msi_forge::ssgraph::*;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn elem(f: &Fp2, n: i128) -> FiniteFieldElem {
    f.from_int(n)
}

/// Supersingular iff `#E(F_{p^2}) = 1 (mod p)`, by counting points.
fn supersingular_by_point_count(p: u64) -> Vec<FiniteFieldElem> {
    let f = Fp2::new(p);
    let q2 = (p as u128 * p as u128 - 1) / 2;
    let chi = |x: FiniteFieldElem| -> i64 {
        if x.is_zero() {
            0
        } else if f.pow(x, q2) == f.one() {
            1
        } else {
            -1
        }
    };
    let mut out = Vec::new();
    for j in f.elements() {
        let (a, b) = if j.is_zero() {
            (f.zero(), f.one())
        } else if j == elem(&f, 1728) {
            (f.one(), f.zero())
        } else {
            // a = -27 j k, b = 54 j k^2 with k = j - 1728
            let k = f.sub(j, elem(&f, 1728));
            let a = f.mul(elem(&f, -27), f.mul(j, k));
            let b = f.mul(elem(&f, 54), f.mul(j, f.mul(k, k)));
            (a, b)
        };
        let mut count: i64 = 1;
        for x in f.elements() {
            let rhs = f.add(f.add(f.pow(x, 3), f.mul(a, x)), b);
            count += 1 + chi(rhs);
        }
        if count.rem_euclid(p as i64) == 1 {
            out.push(j);
        }
    }
    out
}

#[test]
fn hasse_matches_point_counts() {
    for p in [5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let list = supersingular_j_list(p).unwrap();
        assert_eq!(list, supersingular_by_point_count(p), "p = {p}");
        let f = Fp2::new(p);
        let direct: Vec<_> = f.elements().filter(|&j| is_supersingular(&f, j)).collect();
        assert_eq!(list, direct);
    }
    assert_eq!(supersingular_j_list(11).unwrap().len(), 2);
    assert_eq!(supersingular_j_list(13).unwrap().len(), 1);
}

#[test]
fn supersingular_counts_follow_the_class_formula() {
    for p in primes_up_to(3000).into_iter().filter(|&p| p >= 5) {
        let extra = match p % 12 {
            1 => 0,
            5 | 7 => 1,
            11 => 2,
            _ => unreachable!(),
        };
        let n = supersingular_j_list(p).unwrap().len() as u64;
        assert_eq!(n, p / 12 + extra, "p = {p}");
        assert!(n <= p / 12 + 2);
    }
}

fn phi_map(l: u64) -> BTreeMap<(u32, u32), BigInt> {
    modular_polynomial(l)
        .unwrap()
        .terms
        .into_iter()
        .map(|(i, j, c)| ((i, j), BigInt::from(c)))
        .collect()
}

#[test]
fn modular_polynomials_structure() {
    for l in [2u64, 3] {
        let phi = modular_polynomial(l).unwrap();
        let m = phi_map(l);
        for (&(i, j), c) in &m {
            assert_eq!(m.get(&(j, i)), Some(c));
        }
        assert_eq!(phi.degree_x() as u64, l + 1);
        // Kronecker congruence: Φ ≡ (X^l - Y)(X - Y^l) mod l
        let mut kron: BTreeMap<(u32, u32), i64> = BTreeMap::new();
        let l32 = l as u32;
        for (a, ca) in [((l32, 0u32), 1i64), ((0, 1), -1)] {
            for (b, cb) in [((1u32, 0u32), 1i64), ((0, l32), -1)] {
                *kron.entry((a.0 + b.0, a.1 + b.1)).or_default() += ca * cb;
            }
        }
        let lb = BigInt::from(l);
        let keys: std::collections::BTreeSet<_> = m.keys().chain(kron.keys()).copied().collect();
        for k in keys {
            let lhs = m.get(&k).cloned().unwrap_or_default();
            let rhs = BigInt::from(*kron.get(&k).unwrap_or(&0));
            assert!(((lhs - rhs) % &lb).is_zero(), "l = {l}, monomial {k:?}");
        }
        assert_eq!(modular_polynomial(5), Err(SsError::UnsupportedEll(5)));
    }
    // Φ_2(0, Y) = (Y - 54000)^3 and Φ_3(0, Y) = Y (Y + 12288000)^3
    let at_zero = |l: u64| -> Vec<BigInt> {
        let m = phi_map(l);
        (0..=l as u32 + 1)
            .map(|j| m.get(&(0, j)).cloned().unwrap_or_default())
            .collect()
    };
    let cube = |r: i64| -> Vec<BigInt> {
        let r = BigInt::from(r);
        vec![
            -(&r * &r * &r),
            BigInt::from(3) * &r * &r,
            BigInt::from(-3) * &r,
            BigInt::one(),
        ]
    };
    assert_eq!(at_zero(2), cube(54000));
    let mut shifted = vec![BigInt::zero()];
    shifted.extend(cube(-12288000));
    assert_eq!(at_zero(3), shifted);
}

/// Truncated Laurent series: coefficients from `off`, exact through `valid`.
#[derive(Clone)]
struct Laurent {
    off: i64,
    coeffs: Vec<BigInt>,
    valid: i64,
}

impl Laurent {
    fn one(valid: i64) -> Self {
        Laurent {
            off: 0,
            coeffs: vec![BigInt::one()],
            valid,
        }
    }

    fn get(&self, e: i64) -> BigInt {
        let i = e - self.off;
        if i < 0 || i as usize >= self.coeffs.len() {
            BigInt::zero()
        } else {
            self.coeffs[i as usize].clone()
        }
    }

    fn mul(&self, o: &Laurent) -> Laurent {
        let off = self.off + o.off;
        let valid = (self.valid + o.off).min(o.valid + self.off);
        let mut coeffs = vec![BigInt::zero(); (valid - off + 1) as usize];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                let e = off + (i + j) as i64;
                if e <= valid {
                    coeffs[(e - off) as usize] += a * b;
                }
            }
        }
        Laurent { off, coeffs, valid }
    }
}

#[test]
fn modular_polynomials_vanish_on_q_expansions() {
    let jq = j_qexp(60);
    let x = Laurent {
        off: -1,
        coeffs: jq.coeffs.clone(),
        valid: jq.last(),
    };
    for l in [2i64, 3] {
        let mut yc = vec![BigInt::zero(); (l * (jq.last() + 1) + 1) as usize];
        for n in -1..=jq.last() {
            yc[(l * n + l) as usize] = jq.coeff(n).unwrap().clone();
        }
        let y = Laurent {
            off: -l,
            coeffs: yc,
            valid: l * (jq.last() + 1) - 1,
        };
        let mut xp = vec![Laurent::one(x.valid + 1)];
        let mut yp = vec![Laurent::one(y.valid + l)];
        for _ in 0..=l + 1 {
            xp.push(xp.last().unwrap().mul(&x));
            yp.push(yp.last().unwrap().mul(&y));
        }
        let terms: Vec<Laurent> = modular_polynomial(l as u64)
            .unwrap()
            .terms
            .iter()
            .map(|&(i, j, c)| {
                let t = xp[i as usize].mul(&yp[j as usize]);
                Laurent {
                    coeffs: t.coeffs.iter().map(|v| v * BigInt::from(c)).collect(),
                    ..t
                }
            })
            .collect();
        let off = terms.iter().map(|t| t.off).min().unwrap();
        let valid = terms.iter().map(|t| t.valid).min().unwrap();
        assert!(valid >= 20, "too few checked coefficients");
        for e in off..=valid {
            let s: BigInt = terms.iter().map(|t| t.get(e)).sum();
            assert!(s.is_zero(), "l = {l}, q^{e} coefficient {s}");
        }
    }
}

#[test]
fn graphs_are_regular_up_to_2000() {
    for p in primes_up_to(2000).into_iter().filter(|&p| p >= 5) {
        for l in [2u64, 3] {
            let g = build_graph(p, l).unwrap();
            let f = g.field();
            let phi = modular_polynomial(l).unwrap();
            let special = [f.zero(), f.from_int(1728)];
            for (u, adj) in g.adjacency.iter().enumerate() {
                assert_eq!(adj.len() as u64, l + 1, "p = {p}, l = {l}");
                for &v in adj {
                    assert!(phi.eval(&f, g.vertices[u], g.vertices[v]).is_zero());
                    if !special.contains(&g.vertices[u]) && !special.contains(&g.vertices[v]) {
                        assert_eq!(g.multiplicity(u, v), g.multiplicity(v, u));
                    }
                }
            }
            let directed: usize = g.adjacency.iter().map(Vec::len).sum();
            assert_eq!(directed as u64, (l + 1) * g.vertices.len() as u64);
        }
    }
}

#[test]
fn small_graph_examples() {
    let g = build_graph(11, 2).unwrap();
    assert_eq!(g.vertices.len(), 2);
    assert!(g.adjacency.iter().all(|a| a.len() == 3));
    let g = build_graph(13, 2).unwrap();
    assert_eq!(g.adjacency, vec![vec![0, 0, 0]]);
    assert_eq!(
        build_graph(13, 13),
        Err(SsError::EllEqualsCharacteristic(13))
    );
    assert_eq!(build_graph(9, 2), Err(SsError::InvalidPrime(9)));
}

fn inert_primes(disc: i64, from: u64, count: usize) -> Vec<u64> {
    (from..)
        .filter(|&p| is_prime(p) && kronecker(disc, p) == -1)
        .take(count)
        .collect()
}

#[test]
fn cm_walk_for_minus_23() {
    let mut walked = 0;
    for p in inert_primes(-23, 5, 20) {
        let walk = match cm_reduction_walk(-23, p, 2, 3) {
            Ok(w) => w,
            Err(SsError::ClassPolynomialNotSeparable { .. }) => continue,
            Err(e) => panic!("{e}"),
        };
        walked += 1;
        let f = Fp2::new(p);
        let phi = modular_polynomial(2).unwrap();
        let ss = supersingular_j_list(p).unwrap();
        assert_eq!(walk.len(), 4);
        for w in walk.windows(2) {
            assert!(phi.eval(&f, w[0], w[1]).is_zero(), "p = {p}");
        }
        assert!(walk.iter().all(|j| ss.binary_search(j).is_ok()));
        // [2, 1, 3] has order 3: the walk closes after three steps
        assert_eq!(walk[3], walk[0]);
        assert_eq!(cm_reduction_walk(-23, p, 2, 0).unwrap(), vec![walk[0]]);
    }
    assert!(walked >= 12);
    let split = (5..)
        .find(|&p| is_prime(p) && kronecker(-23, p) == 1)
        .unwrap();
    assert_eq!(
        cm_reduction_walk(-23, split, 2, 1),
        Err(SsError::RamifiedOrInert {
            prime: split,
            disc: -23
        })
    );
    // 3 also splits in Q(sqrt -23)
    assert_eq!(
        cm_reduction_walk(-23, 37, 3, 3).map(|w| w[3] == w[0]),
        Ok(true)
    );
    assert_eq!(
        cm_reduction_walk(-20, 11, 2, 1),
        Err(SsError::RamifiedOrInert {
            prime: 2,
            disc: -20
        })
    );
}

#[test]
fn cm_walks_follow_the_prime_form() {
    // walk periods match the order of the norm-l prime form
    let mut checked = 0;
    for disc in [-23i64, -31, -47, -71, -79, -103, -119, -127, -191, -239] {
        let d = Discriminant::new(disc).unwrap();
        for l in [2u64, 3] {
            if kronecker(disc, l) != 1 {
                continue;
            }
            let order = class_order(&prime_form(d, l).unwrap().unwrap()) as usize;
            for p in inert_primes(disc, 200, 3) {
                let walk = match cm_reduction_walk(disc, p, l, 2 * order) {
                    Ok(w) => w,
                    Err(SsError::ClassPolynomialNotSeparable { .. }) => continue,
                    Err(e) => panic!("{e}"),
                };
                let f = Fp2::new(p);
                let phi = modular_polynomial(l).unwrap();
                let ss = supersingular_j_list(p).unwrap();
                for w in walk.windows(2) {
                    assert!(phi.eval(&f, w[0], w[1]).is_zero());
                }
                assert!(walk.iter().all(|j| ss.binary_search(j).is_ok()));
                let period = (1..=order).find(|&k| walk[k] == walk[0]).unwrap();
                assert_eq!(period, order, "disc {disc}, l {l}, p {p}");
                assert_eq!(walk[order..], walk[..=order]);
                checked += 1;
            }
        }
    }
    assert!(checked >= 10);
}

/// Signed edge counts of a walk, keyed by unordered vertex pair.
fn chain(walk: &[FiniteFieldElem]) -> BTreeMap<(FiniteFieldElem, FiniteFieldElem), i64> {
    let mut c = BTreeMap::new();
    for w in walk.windows(2) {
        let (key, s) = if w[0] <= w[1] {
            ((w[0], w[1]), 1)
        } else {
            ((w[1], w[0]), -1)
        };
        *c.entry(key).or_insert(0) += s;
    }
    c.retain(|_, v| *v != 0);
    c
}

fn random_walk(g: &IsogenyGraph, start: usize, choices: &[usize]) -> Vec<FiniteFieldElem> {
    let mut cur = start;
    let mut out = vec![g.vertices[cur]];
    for &c in choices {
        // loop steps carry no orientation in a vertex sequence, so avoid them
        let moves: Vec<usize> = g.adjacency[cur]
            .iter()
            .copied()
            .filter(|&v| v != cur)
            .collect();
        if moves.is_empty() {
            continue;
        }
        cur = moves[c % moves.len()];
        out.push(g.vertices[cur]);
    }
    out
}

#[test]
fn cycle_examples() {
    let g = build_graph(101, 2).unwrap();
    let cycle_rank = g.undirected_edges().len() + 1 - g.vertices.len();
    let u = 3;
    let v = *g.adjacency[u].iter().find(|&&v| v != u).unwrap();
    let w = *g.adjacency[v].iter().find(|&&w| w != u && w != v).unwrap();
    // a single edge closes up, and a closed reduced walk is left alone
    let edge = vec![g.vertices[u], g.vertices[v]];
    let c = cycle_from_path(&g, &edge).unwrap();
    assert_eq!(c.walk.first(), c.walk.last());
    assert_eq!(c.basepoint, g.vertices[u]);
    assert_eq!(c.coordinates.len(), cycle_rank);
    assert_eq!(cycle_from_path(&g, &c.walk).unwrap(), c);
    let point = cycle_from_path(&g, &[g.vertices[w]]).unwrap();
    assert_eq!(point.walk, vec![g.vertices[w]]);
    assert!(point.coordinates.iter().all(|&x| x == 0));
    // backtracking inserted into a path does not change the cycle
    let p1 = vec![g.vertices[u], g.vertices[v], g.vertices[w]];
    let p2 = vec![
        g.vertices[u],
        g.vertices[v],
        g.vertices[w],
        g.vertices[v],
        g.vertices[w],
    ];
    let (c1, c2) = (
        cycle_from_path(&g, &p1).unwrap(),
        cycle_from_path(&g, &p2).unwrap(),
    );
    assert_eq!(c1.coordinates, c2.coordinates);
    assert_eq!(c1.walk, c2.walk);
    assert_eq!(cycle_from_path(&g, &[]), Err(SsError::InvalidPath));
    let far = *g
        .vertices
        .iter()
        .find(|j| g.index_of(**j).is_some_and(|k| g.multiplicity(u, k) == 0))
        .unwrap();
    assert_eq!(
        cycle_from_path(&g, &[g.vertices[u], far]),
        Err(SsError::InvalidPath)
    );
    let f = g.field();
    let ordinary = f.elements().find(|j| g.index_of(*j).is_none()).unwrap();
    assert_eq!(
        cycle_from_path(&g, &[ordinary]),
        Err(SsError::VertexNotInGraph(ordinary))
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cycles_are_closed_reduced_and_bounded(
        p in prop::sample::select(vec![61u64, 101, 157, 229, 311]),
        l in prop::sample::select(vec![2u64, 3]),
        start in 0usize..1000,
        choices in prop::collection::vec(0usize..4, 0..25),
    ) {
        let g = build_graph(p, l).unwrap();
        let start = start % g.vertices.len();
        let path = random_walk(&g, start, &choices);
        let c = cycle_from_path(&g, &path).unwrap();
        prop_assert_eq!(c.walk.first(), c.walk.last());
        prop_assert_eq!(c.basepoint, path[0]);
        for w in c.walk.windows(2) {
            let (a, b) = (g.index_of(w[0]).unwrap(), g.index_of(w[1]).unwrap());
            prop_assert!(g.multiplicity(a, b) > 0);
        }
        for w in c.walk.windows(3) {
            prop_assert!(w[0] != w[2] || w[0] == w[1]);
        }
        let depth = g.distances_from(0);
        let bound = path.len() - 1 + depth[start].unwrap() + depth[g.index_of(*path.last().unwrap()).unwrap()].unwrap();
        prop_assert!(c.len() <= bound);
        prop_assert!(bound <= path.len() - 1 + 2 * g.diameter());
        // the chain is a cycle: zero boundary
        let mut boundary: BTreeMap<FiniteFieldElem, i64> = BTreeMap::new();
        for ((a, b), k) in chain(&c.walk) {
            *boundary.entry(b).or_default() += k;
            *boundary.entry(a).or_default() -= k;
        }
        prop_assert!(boundary.values().all(|&x| x == 0));
        // appending a closed path and its reverse leaves the class unchanged
        let back: Vec<_> = path.iter().rev().copied().collect();
        let mut longer = path.clone();
        longer.extend_from_slice(&back[1..]);
        longer.extend_from_slice(&path[1..]);
        let c2 = cycle_from_path(&g, &longer).unwrap();
        prop_assert_eq!(c.coordinates, c2.coordinates);
    }
}
