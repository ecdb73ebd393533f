//! Supersingular `l`-isogeny graphs over `F_{p^2}` built from the classical
//! modular polynomials, CM-reduction walks, and closing paths into cycles
//! against a breadth-first spanning tree.

mod field;
mod modpoly;
mod poly;

use std::collections::{BTreeMap, VecDeque};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{is_prime, kronecker, pow_mod};
use crate::quadratic::{
    class_action_poly, hilbert_class_poly_auto, prime_form, Discriminant, QuadError,
};

pub use field::{FiniteFieldElem, Fp2};
pub use modpoly::{modular_polynomial, ModularPolynomial};
pub use poly::{eval as poly_eval, roots as poly_roots, Poly};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SsError {
    #[error("modular polynomial of level {0} is not available (supported: 2, 3)")]
    UnsupportedEll(u64),
    #[error("{0} is not a prime >= 5")]
    InvalidPrime(u64),
    #[error("l = {0} must differ from the characteristic")]
    EllEqualsCharacteristic(u64),
    #[error("{prime} is ramified, or has the wrong splitting, in discriminant {disc}")]
    RamifiedOrInert { prime: u64, disc: i64 },
    #[error("class polynomial of discriminant {disc} has a repeated root mod {p}")]
    ClassPolynomialNotSeparable { disc: i64, p: u64 },
    #[error("vertex {0:?} is not in the graph")]
    VertexNotInGraph(FiniteFieldElem),
    #[error("path is empty or steps between non-adjacent vertices")]
    InvalidPath,
    #[error("no spanning-tree route from {from:?} to {to:?}")]
    DisconnectedComponent {
        from: FiniteFieldElem,
        to: FiniteFieldElem,
    },
    #[error(transparent)]
    Quad(#[from] QuadError),
}

fn check_prime(p: u64) -> Result<Fp2, SsError> {
    if p < 5 || !is_prime(p) {
        return Err(SsError::InvalidPrime(p));
    }
    Ok(Fp2::new(p))
}

/// Coefficients `(A, B)` of a curve `y^2 = x^3 + A x + B` with invariant `j`.
fn weierstrass(f: &Fp2, j: FiniteFieldElem) -> (FiniteFieldElem, FiniteFieldElem) {
    if j.is_zero() {
        return (f.zero(), f.one());
    }
    let c = f.from_int(1728);
    if j == c {
        return (f.one(), f.zero());
    }
    let k = f.sub(c, j);
    let a = f.mul(f.from_int(3), f.mul(j, k));
    let b = f.mul(f.from_int(2), f.mul(j, f.mul(k, k)));
    (a, b)
}

/// Coefficient of `x^(p-1)` in `(x^3 + A x + B)^((p-1)/2)` for a curve of
/// invariant `j`.
pub fn hasse_invariant(f: &Fp2, j: FiniteFieldElem) -> FiniteFieldElem {
    let (a, b) = weierstrass(f, j);
    let p = f.p;
    let e = (p - 1) / 2;
    let mut fact = vec![1u64; e as usize + 1];
    for i in 1..=e as usize {
        fact[i] = ((fact[i - 1] as u128 * i as u128) % p as u128) as u64;
    }
    let fe = |n: u64| f.from_int(fact[n as usize] as i128);
    // terms x^(3i) (Ax)^jj B^k with i + jj + k = e and 3i + jj = p - 1
    let mut acc = f.zero();
    for i in 0..=e {
        if 3 * i > p - 1 {
            break;
        }
        let jj = p - 1 - 3 * i;
        if i + jj > e {
            continue;
        }
        let k = e - i - jj;
        let denom = f.mul(fe(i), f.mul(fe(jj), fe(k)));
        let coeff = f.mul(fe(e), f.inv(denom).expect("factorials below p are units"));
        let term = f.mul(coeff, f.mul(f.pow(a, jj as u128), f.pow(b, k as u128)));
        acc = f.add(acc, term);
    }
    acc
}

pub fn is_supersingular(f: &Fp2, j: FiniteFieldElem) -> bool {
    hasse_invariant(f, j).is_zero()
}

// class number one discriminants and their j-invariants
const CM_ONE: [(i64, i128); 7] = [
    (-7, -3375),
    (-8, 8000),
    (-11, -32768),
    (-19, -884736),
    (-43, -884736000),
    (-67, -147197952000),
    (-163, -262537412640768000),
];

fn seed_vertex(f: &Fp2) -> FiniteFieldElem {
    let p = f.p;
    if p % 3 == 2 {
        return f.zero();
    }
    if p % 4 == 3 {
        return f.from_int(1728);
    }
    for (d, j) in CM_ONE {
        if kronecker(d, p) == -1 {
            return f.from_int(j);
        }
    }
    f.elements()
        .find(|&j| is_supersingular(f, j))
        .expect("supersingular curves exist")
}

fn neighbors(
    f: &Fp2,
    phi: &ModularPolynomial,
    j: FiniteFieldElem,
) -> Vec<(FiniteFieldElem, usize)> {
    poly::roots(f, &phi.specialize(f, j))
}

/// Every supersingular `j`-invariant in characteristic `p`, sorted.
///
/// Found by a breadth-first search of the (connected) 2-isogeny graph from a
/// known supersingular seed; each vertex is confirmed by the Hasse invariant.
pub fn supersingular_j_list(p: u64) -> Result<Vec<FiniteFieldElem>, SsError> {
    let f = check_prime(p)?;
    let phi = modular_polynomial(2)?;
    let seed = seed_vertex(&f);
    let mut seen = std::collections::BTreeSet::from([seed]);
    let mut queue = VecDeque::from([seed]);
    while let Some(j) = queue.pop_front() {
        assert!(
            is_supersingular(&f, j),
            "non-supersingular vertex {j:?} mod {p}"
        );
        for (n, _) in neighbors(&f, &phi, j) {
            if seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// The supersingular `l`-isogeny graph mod `p`. `adjacency[i]` lists the
/// indices of the neighbors of `vertices[i]`, repeated by multiplicity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsogenyGraph {
    pub p: u64,
    pub l: u64,
    pub vertices: Vec<FiniteFieldElem>,
    pub adjacency: Vec<Vec<usize>>,
}

pub fn build_graph(p: u64, l: u64) -> Result<IsogenyGraph, SsError> {
    let f = check_prime(p)?;
    if l == p {
        return Err(SsError::EllEqualsCharacteristic(l));
    }
    let phi = modular_polynomial(l)?;
    let vertices = supersingular_j_list(p)?;
    let index: BTreeMap<FiniteFieldElem, usize> =
        vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let adjacency = vertices
        .par_iter()
        .map(|&j| {
            let mut out = Vec::new();
            for (n, mult) in neighbors(&f, &phi, j) {
                let k = *index
                    .get(&n)
                    .expect("neighbors of supersingular vertices are supersingular");
                out.extend(std::iter::repeat(k).take(mult));
            }
            out
        })
        .collect();
    Ok(IsogenyGraph {
        p,
        l,
        vertices,
        adjacency,
    })
}

impl IsogenyGraph {
    pub fn field(&self) -> Fp2 {
        Fp2::new(self.p)
    }

    pub fn index_of(&self, j: FiniteFieldElem) -> Option<usize> {
        self.vertices.binary_search(&j).ok()
    }

    /// Number of directed edges from `u` to `v`.
    pub fn multiplicity(&self, u: usize, v: usize) -> usize {
        self.adjacency[u].iter().filter(|&&w| w == v).count()
    }

    /// Breadth-first distances from `s`; unreachable vertices get `None`.
    pub fn distances_from(&self, s: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertices.len()];
        dist[s] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                if dist[v].is_none() {
                    dist[v] = Some(dist[u].unwrap() + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Largest finite distance between two vertices.
    pub fn diameter(&self) -> usize {
        (0..self.vertices.len())
            .flat_map(|s| self.distances_from(s).into_iter().flatten())
            .max()
            .unwrap_or(0)
    }

    /// Undirected edges `(u, v)` with `u <= v`, one entry per parallel copy.
    /// A pair counts `min` of its two directed multiplicities; loops count
    /// their directed multiplicity.
    pub fn undirected_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.vertices.len() {
            let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
            for &v in &self.adjacency[u] {
                *counts.entry(v).or_default() += 1;
            }
            for (v, c) in counts {
                let m = match v.cmp(&u) {
                    std::cmp::Ordering::Less => continue,
                    std::cmp::Ordering::Equal => c,
                    std::cmp::Ordering::Greater => c.min(self.multiplicity(v, u)),
                };
                out.extend(std::iter::repeat((u, v)).take(m));
            }
        }
        out
    }

    /// Edge list as `j`-invariant pairs, for external tools.
    pub fn edge_list(&self) -> Vec<(FiniteFieldElem, FiniteFieldElem)> {
        self.undirected_edges()
            .into_iter()
            .map(|(u, v)| (self.vertices[u], self.vertices[v]))
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct RawVertex {
    j: FiniteFieldElem,
    neighbors: Vec<FiniteFieldElem>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    p: u64,
    l: u64,
    vertices: Vec<RawVertex>,
}

impl Serialize for IsogenyGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RawGraph {
            p: self.p,
            l: self.l,
            vertices: self
                .vertices
                .iter()
                .zip(&self.adjacency)
                .map(|(&j, adj)| RawVertex {
                    j,
                    neighbors: adj.iter().map(|&k| self.vertices[k]).collect(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IsogenyGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = RawGraph::deserialize(d)?;
        if raw.p < 5 || !is_prime(raw.p) {
            return Err(D::Error::custom(format!("{} is not a prime >= 5", raw.p)));
        }
        let vertices: Vec<FiniteFieldElem> = raw.vertices.iter().map(|v| v.j).collect();
        if vertices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(D::Error::custom("vertices must be strictly increasing"));
        }
        if vertices.iter().any(|v| v.0 >= raw.p || v.1 >= raw.p) {
            return Err(D::Error::custom("coordinate not reduced mod p"));
        }
        let g = IsogenyGraph {
            p: raw.p,
            l: raw.l,
            vertices: vertices.clone(),
            adjacency: Vec::new(),
        };
        let adjacency = raw
            .vertices
            .iter()
            .map(|v| {
                v.neighbors
                    .iter()
                    .map(|n| {
                        g.index_of(*n)
                            .ok_or_else(|| D::Error::custom(format!("unknown neighbor {n:?}")))
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(IsogenyGraph { adjacency, ..g })
    }
}

fn reduce_mod(f: &Fp2, c: &BigInt) -> FiniteFieldElem {
    let pb = BigInt::from(f.p);
    f.from_int((((c % &pb) + &pb) % &pb).to_i128().unwrap())
}

/// Reductions mod `p` of the CM `j`-invariants of discriminant `disc` along
/// `k` steps of the action of the norm-`l` prime form, starting from the
/// smallest root of the class polynomial mod `p`.
///
/// The action `j_f -> j_{f g}` is the polynomial map `B / H'` of
/// `class_action_poly`, reduced through the embedding that sends `sqrt(disc)`
/// to `c s` with `c^2 = disc / n` and `c < p / 2`.
pub fn cm_reduction_walk(
    disc: i64,
    p: u64,
    l: u64,
    k: usize,
) -> Result<Vec<FiniteFieldElem>, SsError> {
    let f = check_prime(p)?;
    let d = Discriminant::new(disc)?;
    if kronecker(disc, p) != -1 {
        return Err(SsError::RamifiedOrInert { prime: p, disc });
    }
    if kronecker(disc, l) != 1 {
        return Err(SsError::RamifiedOrInert { prime: l, disc });
    }
    let phi = modular_polynomial(l)?;
    let lform = prime_form(d, l)?.ok_or(SsError::RamifiedOrInert { prime: l, disc })?;
    let h = hilbert_class_poly_auto(d)?;
    let hp: Poly = h.iter().map(|c| reduce_mod(&f, c)).collect();
    let cm = poly::roots(&f, &hp);
    if cm.iter().any(|&(_, m)| m > 1) || cm.len() != h.len() - 1 {
        return Err(SsError::ClassPolynomialNotSeparable { disc, p });
    }
    let dh: Poly = (1..hp.len())
        .map(|i| f.mul(f.from_int(i as i128), hp[i]))
        .collect();

    let t = disc.rem_euclid(p as i64) as u64;
    let ratio = (t as u128 * pow_mod(f.nonresidue, p - 2, p) as u128 % p as u128) as u64;
    let c = (0..=p / 2)
        .find(|&c| (c as u128 * c as u128 % p as u128) as u64 == ratio)
        .expect("disc / n is a square");
    let sqrt_d = FiniteFieldElem(0, c);
    let half = f.from_int(((p + 1) / 2) as i128);
    let action: Poly = class_action_poly(d, &lform)?
        .iter()
        .map(|(u, v)| {
            f.mul(
                half,
                f.add(reduce_mod(&f, u), f.mul(reduce_mod(&f, v), sqrt_d)),
            )
        })
        .collect();

    let mut path = vec![cm[0].0];
    for _ in 0..k {
        let cur = *path.last().unwrap();
        let den = f.inv(poly::eval(&f, &dh, cur)).expect("simple root");
        let next = f.mul(poly::eval(&f, &action, cur), den);
        debug_assert!(poly::eval(&f, &hp, next).is_zero());
        debug_assert!(phi.eval(&f, cur, next).is_zero());
        path.push(next);
    }
    Ok(path)
}

/// A closed walk based at `basepoint`, together with its coordinates in the
/// fundamental-cycle basis of the spanning tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphCycle {
    pub basepoint: FiniteFieldElem,
    /// Vertices of the walk; the first and last equal the basepoint.
    pub walk: Vec<FiniteFieldElem>,
    /// Signed traversal counts of the non-tree edges, in the order of
    /// `IsogenyGraph::undirected_edges` restricted to non-tree edges.
    pub coordinates: Vec<i64>,
}

impl GraphCycle {
    pub fn len(&self) -> usize {
        self.walk.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Breadth-first spanning tree from vertex 0: parent pointers and depths.
fn spanning_tree(g: &IsogenyGraph) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
    let n = g.vertices.len();
    let (mut parent, mut depth) = (vec![None; n], vec![None; n]);
    depth[0] = Some(0);
    let mut queue = VecDeque::from([0]);
    while let Some(u) = queue.pop_front() {
        let mut adj = g.adjacency[u].clone();
        adj.sort_unstable();
        for v in adj {
            if depth[v].is_none() {
                depth[v] = Some(depth[u].unwrap() + 1);
                parent[v] = Some(u);
                queue.push_back(v);
            }
        }
    }
    (parent, depth)
}

/// Close `path` by the spanning-tree route from its end back to its start,
/// then cancel immediate backtracking.
pub fn cycle_from_path(g: &IsogenyGraph, path: &[FiniteFieldElem]) -> Result<GraphCycle, SsError> {
    let idx: Vec<usize> = path
        .iter()
        .map(|&j| g.index_of(j).ok_or(SsError::VertexNotInGraph(j)))
        .collect::<Result<_, _>>()?;
    if idx.is_empty() || idx.windows(2).any(|w| g.multiplicity(w[0], w[1]) == 0) {
        return Err(SsError::InvalidPath);
    }
    let (parent, depth) = spanning_tree(g);
    let (start, end) = (idx[0], *idx.last().unwrap());
    for v in [start, end] {
        if depth[v].is_none() {
            return Err(SsError::DisconnectedComponent {
                from: g.vertices[end],
                to: g.vertices[start],
            });
        }
    }
    // end -> lowest common ancestor -> start
    let (mut a, mut b) = (end, start);
    let (mut up, mut down) = (vec![a], vec![b]);
    while a != b {
        if depth[a] >= depth[b] {
            a = parent[a].unwrap();
            up.push(a);
        } else {
            b = parent[b].unwrap();
            down.push(b);
        }
    }
    down.pop();
    up.extend(down.into_iter().rev());

    let mut walk = idx;
    walk.extend_from_slice(&up[1..]);
    // free reduction: a step u -> v cancels a preceding v -> u
    let mut reduced: Vec<usize> = vec![walk[0]];
    for &v in &walk[1..] {
        let n = reduced.len();
        if n >= 2 && reduced[n - 2] == v && reduced[n - 1] != v {
            reduced.pop();
        } else {
            reduced.push(v);
        }
    }

    let tree: std::collections::BTreeSet<(usize, usize)> = parent
        .iter()
        .enumerate()
        .filter_map(|(v, p)| p.map(|p| (p.min(v), p.max(v))))
        .collect();
    // copy 0 of each pair carries the traversal; it is a coordinate unless
    // it is the tree edge
    let mut coord_index: BTreeMap<(usize, usize), Option<usize>> = BTreeMap::new();
    let mut k = 0;
    for e in g.undirected_edges() {
        let is_tree = e.0 != e.1 && tree.contains(&e) && !coord_index.contains_key(&e);
        if is_tree {
            coord_index.insert(e, None);
        } else {
            coord_index.entry(e).or_insert(Some(k));
            k += 1;
        }
    }
    let mut coordinates = vec![0i64; k];
    for w in reduced.windows(2) {
        let (u, v) = (w[0], w[1]);
        if let Some(Some(k)) = coord_index.get(&(u.min(v), u.max(v))) {
            coordinates[*k] += if u <= v { 1 } else { -1 };
        }
    }
    Ok(GraphCycle {
        basepoint: g.vertices[start],
        walk: reduced.into_iter().map(|k| g.vertices[k]).collect(),
        coordinates,
    })
}
