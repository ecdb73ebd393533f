use std::collections::HashMap;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::{MsiError, MsiInstance, Path, PathModel};

/// Outcome of an exponential search: a witness if one exists, and the
/// number of node expansions spent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveReport {
    pub witness: Option<Path>,
    pub expansions: u64,
}

fn add_into(acc: &mut [u64], x: &[u64], q: u64) {
    for (a, &b) in acc.iter_mut().zip(x) {
        *a = (*a + b) % q;
    }
}

fn sub_into(acc: &mut [u64], x: &[u64], q: u64) {
    for (a, &b) in acc.iter_mut().zip(x) {
        *a = (*a + q - b) % q;
    }
}

/// Partial paths of length 1..=len, i.e. the nodes of the search tree.
fn tree_nodes(model: &PathModel, len: usize) -> BigUint {
    (1..=len).map(|k| model.count_paths(k)).sum()
}

fn check_cap(needed: BigUint, cap: u64) -> Result<(), MsiError> {
    if needed > BigUint::from(cap) {
        return Err(MsiError::WorkCapExceeded {
            needed: needed.to_string(),
            cap,
        });
    }
    Ok(())
}

/// Depth-first enumeration of every valid path of length `len`, calling
/// `visit(path, value)` at the leaves. Returns early when `visit` does.
fn enumerate<F>(
    model: &PathModel,
    images: &[Vec<u64>],
    q: u64,
    len: usize,
    nodes: &mut u64,
    mut visit: F,
) -> bool
where
    F: FnMut(&[usize], &[u64]) -> bool,
{
    let d = images.first().map_or(0, Vec::len);
    if len == 0 {
        return visit(&[], &vec![0; d]);
    }
    let mut path: Vec<usize> = Vec::with_capacity(len);
    let mut values: Vec<Vec<u64>> = vec![vec![0; d]];
    // stack of (candidate list position) per depth
    let mut cursor: Vec<usize> = vec![0];
    let all: Vec<usize> = (0..model.generators).collect();
    loop {
        let depth = path.len();
        let options = if depth == 0 {
            &all
        } else {
            &model.follows[path[depth - 1]]
        };
        let k = cursor[depth];
        if k == options.len() {
            if depth == 0 {
                return false;
            }
            path.pop();
            values.pop();
            cursor.pop();
            cursor[depth - 1] += 1;
            continue;
        }
        let g = options[k];
        *nodes += 1;
        let mut v = values[depth].clone();
        add_into(&mut v, &images[g], q);
        if depth + 1 == len {
            path.push(g);
            if visit(&path, &v) {
                return true;
            }
            path.pop();
            cursor[depth] += 1;
        } else {
            path.push(g);
            values.push(v);
            cursor.push(0);
        }
    }
}

/// Exhaustive search over `W_L`.
pub fn solve_bruteforce(
    inst: &MsiInstance,
    model: &PathModel,
    cap: u64,
) -> Result<SolveReport, MsiError> {
    inst.check_model(model)?;
    let len = inst.params.length;
    check_cap(tree_nodes(model, len), cap)?;
    let images = model.generator_images(&inst.params.matrix)?;
    let q = inst.params.matrix.modulus();
    let mut nodes = 0;
    let mut found = None;
    enumerate(model, &images, q, len, &mut nodes, |p, v| {
        if v == inst.y.entries.as_slice() {
            found = Some(Path {
                indices: p.to_vec(),
            });
            true
        } else {
            false
        }
    });
    Ok(SolveReport {
        witness: found,
        expansions: nodes,
    })
}

/// Meet in the middle: tabulate the images of all prefixes of length
/// `ceil(L/2)`, then look up `y - Π(suffix)` for each suffix.
pub fn solve_mitm(
    inst: &MsiInstance,
    model: &PathModel,
    cap: u64,
) -> Result<SolveReport, MsiError> {
    inst.check_model(model)?;
    let len = inst.params.length;
    let (l1, l2) = (len.div_ceil(2), len / 2);
    check_cap(tree_nodes(model, l1) + tree_nodes(model, l2), cap)?;
    let images = model.generator_images(&inst.params.matrix)?;
    let q = inst.params.matrix.modulus();
    let mut nodes = 0;

    let mut prefixes: Vec<usize> = Vec::new();
    let mut table: HashMap<Vec<u64>, Vec<u32>> = HashMap::new();
    enumerate(model, &images, q, l1, &mut nodes, |p, v| {
        let id = (prefixes.len() / l1.max(1)) as u32;
        prefixes.extend_from_slice(p);
        table.entry(v.to_vec()).or_default().push(id);
        false
    });
    let prefix = |id: u32| &prefixes[id as usize * l1..(id as usize + 1) * l1];

    let mut found = None;
    let mut probes = 0u64;
    enumerate(model, &images, q, l2, &mut nodes, |s, v| {
        let mut need = inst.y.entries.clone();
        sub_into(&mut need, v, q);
        let Some(bucket) = table.get(&need) else {
            return false;
        };
        for &id in bucket {
            probes += 1;
            let p = prefix(id);
            let joins = match (p.last(), s.first()) {
                (Some(&a), Some(&b)) => model.follows[a].binary_search(&b).is_ok(),
                _ => true,
            };
            if joins {
                let mut indices = p.to_vec();
                indices.extend_from_slice(s);
                found = Some(Path { indices });
                return true;
            }
        }
        false
    });
    Ok(SolveReport {
        witness: found,
        expansions: nodes + probes,
    })
}

/// Experimental: greedily turn a coordinate vector into a valid path by
/// repeatedly taking the admissible generator that most reduces the
/// remaining `l1` distance. Returns `None` unless the remainder reaches zero
/// within `L` steps.
pub fn round_to_path_experimental(model: &PathModel, target: &[i64]) -> Option<Path> {
    if target.len() != model.generators || target.iter().any(|&x| x < 0) {
        return None;
    }
    let mut rest = target.to_vec();
    let mut indices: Vec<usize> = Vec::new();
    let all: Vec<usize> = (0..model.generators).collect();
    while rest.iter().any(|&x| x != 0) {
        if indices.len() == model.max_len {
            return None;
        }
        let options = indices.last().map_or(&all, |&g| &model.follows[g]);
        let best = options
            .iter()
            .copied()
            .filter(|&g| rest[g] > 0)
            .max_by_key(|&g| (rest[g], std::cmp::Reverse(g)))?;
        rest[best] -= 1;
        indices.push(best);
    }
    Some(Path { indices })
}
