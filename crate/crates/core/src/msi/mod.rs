//! The path model, MSI instances, and the attacks on them: exhaustive and
//! meet-in-the-middle search, the unconstrained linear relaxation, and the
//! collision experiment.

mod collide;
mod linear;
mod solve;

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coleman::{ColemanError, FormLabel, PeriodMap, PeriodVector};
use crate::modsym::{ManinBasis, ModsymError};
use crate::seed::Seed;
use crate::ssgraph::{FiniteFieldElem, IsogenyGraph, SsError};

pub use collide::{
    collision_experiment, parameter_check, CollisionReport, ParamVerdict, SecurityParams,
};
pub use linear::{solve_linear, solve_linear_unconstrained, LinearSolution};
pub use solve::{round_to_path_experimental, solve_bruteforce, solve_mitm, SolveReport};

/// Default cap on node expansions for the exponential solvers.
pub const DEFAULT_WORK_CAP: u64 = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MsiError {
    #[error("the path model has no generators")]
    EmptyModel,
    #[error("search needs {needed} node expansions, above the cap {cap}")]
    WorkCapExceeded { needed: String, cap: u64 },
    #[error("period matrix has {got} columns, the model has {expected} generators")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("period matrix is malformed: {0}")]
    MalformedMatrix(String),
    #[error("path is not valid in the model")]
    InvalidPath,
    #[error("instance does not match the model: {0}")]
    ModelMismatch(String),
    #[error(transparent)]
    Coleman(#[from] ColemanError),
    #[error(transparent)]
    Graph(#[from] SsError),
    #[error(transparent)]
    Modsym(#[from] ModsymError),
}

/// Where the generators come from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum ModelSpec {
    /// Manin basis vectors of level `level`; any generator may follow any.
    ManinGenerators { level: u64 },
    /// Oriented edges of the supersingular `l`-isogeny graph mod `p`; an
    /// edge may follow another when its tail is the other's head.
    GraphEdges { p: u64, l: u64 },
}

/// Source data for `build_path_model`.
pub enum ModelSource<'a> {
    Manin(&'a ManinBasis),
    Graph(&'a IsogenyGraph),
}

/// A finite generating set with a validity relation on consecutive steps.
///
/// Generator `i` is the `i`-th unit vector of the coordinate space, so the
/// value of a path is its vector of generator counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathModel {
    pub spec: ModelSpec,
    pub generators: usize,
    /// `follows[i]`: generators allowed right after `i`, increasing.
    pub follows: Vec<Vec<usize>>,
    /// Maximum path length `L`.
    pub max_len: usize,
    /// Average out-degree of the validity relation.
    pub branching: f64,
    /// Graph mode only: the `(tail, head)` of each oriented edge.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub edges: Vec<(FiniteFieldElem, FiniteFieldElem)>,
}

pub fn build_path_model(source: ModelSource<'_>, max_len: usize) -> Result<PathModel, MsiError> {
    let (spec, follows, edges) = match source {
        ModelSource::Manin(basis) => {
            let r = basis.rank;
            let all: Vec<usize> = (0..r).collect();
            (
                ModelSpec::ManinGenerators { level: basis.level },
                vec![all; r],
                Vec::new(),
            )
        }
        ModelSource::Graph(g) => {
            // oriented edges grouped by tail, parallel copies kept apart
            let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); g.vertices.len()];
            let mut ends = Vec::new();
            for (u, adj) in g.adjacency.iter().enumerate() {
                for &v in adj {
                    out_edges[u].push(ends.len());
                    ends.push((u, v));
                }
            }
            let follows = ends.iter().map(|&(_, v)| out_edges[v].clone()).collect();
            let edges = ends
                .iter()
                .map(|&(u, v)| (g.vertices[u], g.vertices[v]))
                .collect();
            (ModelSpec::GraphEdges { p: g.p, l: g.l }, follows, edges)
        }
    };
    let n = follows.len();
    if n == 0 {
        return Err(MsiError::EmptyModel);
    }
    let branching = follows.iter().map(Vec::len).sum::<usize>() as f64 / n as f64;
    Ok(PathModel {
        spec,
        generators: n,
        follows,
        max_len,
        branching,
        edges,
    })
}

/// A word `(i_1, ..., i_k)` in the generators.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Path {
    pub indices: Vec<usize>,
}

impl PathModel {
    pub fn is_valid(&self, path: &Path) -> bool {
        path.indices.len() <= self.max_len
            && path.indices.iter().all(|&i| i < self.generators)
            && path
                .indices
                .windows(2)
                .all(|w| self.follows[w[0]].binary_search(&w[1]).is_ok())
    }

    /// Generator counts of a path.
    pub fn coords(&self, path: &Path) -> Vec<i64> {
        let mut out = vec![0i64; self.generators];
        for &i in &path.indices {
            out[i] += 1;
        }
        out
    }

    /// `w[k][i]`: valid paths of length `k` starting with generator `i`.
    fn path_counts(&self, len: usize) -> Vec<Vec<BigUint>> {
        let n = self.generators;
        let mut w = vec![vec![BigUint::zero(); n], vec![BigUint::one(); n]];
        for _ in 2..=len.max(1) {
            let prev = w.last().unwrap();
            let next = self
                .follows
                .iter()
                .map(|f| f.iter().map(|&j| &prev[j]).sum())
                .collect();
            w.push(next);
        }
        w
    }

    /// `#W_k`, the number of valid paths of length exactly `k`.
    pub fn count_paths(&self, len: usize) -> BigUint {
        if len == 0 {
            return BigUint::one();
        }
        self.path_counts(len)[len].iter().sum()
    }

    /// A uniformly random valid path of length exactly `len`.
    pub fn sample_path<R: Rng>(&self, len: usize, rng: &mut R) -> Path {
        if len == 0 {
            return Path::default();
        }
        let w = self.path_counts(len);
        let mut indices = Vec::with_capacity(len);
        let mut choices: Vec<usize> = (0..self.generators).collect();
        for remaining in (1..=len).rev() {
            let total: BigUint = choices.iter().map(|&i| &w[remaining][i]).sum();
            let mut pick = rng.gen_biguint_below(&total);
            let mut chosen = *choices.last().unwrap();
            for &i in &choices {
                if pick < w[remaining][i] {
                    chosen = i;
                    break;
                }
                pick -= &w[remaining][i];
            }
            indices.push(chosen);
            choices = self.follows[chosen].clone();
        }
        Path { indices }
    }

    /// `A` applied to each generator, checking the matrix shape.
    pub fn generator_images(&self, a: &PeriodMap) -> Result<Vec<Vec<u64>>, MsiError> {
        check_matrix(a)?;
        if a.r() != self.generators {
            return Err(MsiError::DimensionMismatch {
                expected: self.generators,
                got: a.r(),
            });
        }
        Ok((0..self.generators)
            .map(|j| a.rows.iter().map(|row| row[j]).collect())
            .collect())
    }
}

/// Shape and range checks on a period matrix read from outside.
pub fn check_matrix(a: &PeriodMap) -> Result<(), MsiError> {
    let q = crate::coleman::modulus(a.l, a.m)?;
    if a.rows.is_empty() {
        return Err(MsiError::MalformedMatrix("no rows".into()));
    }
    let r = a.rows[0].len();
    if a.rows.iter().any(|row| row.len() != r) {
        return Err(MsiError::MalformedMatrix("ragged rows".into()));
    }
    if a.rows.iter().flatten().any(|&x| x >= q) {
        return Err(MsiError::MalformedMatrix("entry not reduced".into()));
    }
    Ok(())
}

/// A uniformly random `d x n` matrix over `Z/l^m`, standing in for a period
/// map where no modular-symbol one exists (graph mode).
pub fn random_period_map(
    l: u64,
    m: u32,
    d: usize,
    n: usize,
    seed: &Seed,
) -> Result<PeriodMap, MsiError> {
    let q = crate::coleman::modulus(l, m)?;
    let mut rng = seed.rng("period-matrix", 0);
    let rows = (0..d)
        .map(|_| (0..n).map(|_| rng.gen_range(0..q)).collect())
        .collect();
    let forms = (0..d).map(|i| FormLabel(0, i, 0)).collect();
    Ok(PeriodMap { l, m, rows, forms })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceParams {
    pub model: ModelSpec,
    pub l: u64,
    pub m: u32,
    pub d: usize,
    #[serde(rename = "L")]
    pub length: usize,
    pub matrix: PeriodMap,
}

/// A target `y` for the relation `Π_m(γ) = y` with `γ` in `W_L`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MsiInstance {
    pub params: InstanceParams,
    pub y: PeriodVector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Path>,
}

impl MsiInstance {
    /// Does `path` satisfy the relation for this instance?
    pub fn accepts(&self, model: &PathModel, path: &Path) -> bool {
        path.indices.len() == self.params.length
            && model.is_valid(path)
            && self.params.matrix.apply(&model.coords(path)).entries == self.y.entries
    }

    pub fn check_model(&self, model: &PathModel) -> Result<(), MsiError> {
        if model.spec != self.params.model {
            return Err(MsiError::ModelMismatch("generator source differs".into()));
        }
        if model.max_len < self.params.length {
            return Err(MsiError::ModelMismatch(
                "model admits shorter paths than the instance".into(),
            ));
        }
        let a = &self.params.matrix;
        model.generator_images(a)?;
        if self.y.entries.len() != a.d() || self.y.l != a.l || self.y.m != a.m {
            return Err(MsiError::ModelMismatch(
                "target does not live in the matrix codomain".into(),
            ));
        }
        if self.y.entries.iter().any(|&x| x >= a.modulus()) {
            return Err(MsiError::MalformedMatrix("target entry not reduced".into()));
        }
        Ok(())
    }
}

/// An instance whose target is the image of a uniformly random path of
/// length `L`; the path is kept as the witness.
pub fn sample_instance(
    model: &PathModel,
    a: &PeriodMap,
    seed: &Seed,
) -> Result<MsiInstance, MsiError> {
    model.generator_images(a)?;
    let mut rng = seed.rng("msi-instance", 0);
    let witness = model.sample_path(model.max_len, &mut rng);
    let y = a.apply(&model.coords(&witness));
    let params = InstanceParams {
        model: model.spec.clone(),
        l: a.l,
        m: a.m,
        d: a.d(),
        length: model.max_len,
        matrix: a.clone(),
    };
    Ok(MsiInstance {
        params,
        y,
        witness: Some(witness),
    })
}

pub(crate) fn to_u64_or_max(x: &BigUint) -> u64 {
    x.to_u64().unwrap_or(u64::MAX)
}
