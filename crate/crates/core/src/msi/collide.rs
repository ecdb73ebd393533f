use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::{to_u64_or_max, MsiError, PathModel};
use crate::coleman::PeriodMap;
use crate::seed::Seed;

/// Observed and predicted collisions of `Π_m` on `W_L`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollisionReport {
    /// Paths examined: all of `W_L`, or the number of samples drawn.
    pub paths: u64,
    pub sampled: bool,
    /// `l^(m d)` as a decimal string.
    pub codomain_size: String,
    /// `paths^2 / (2 l^(m d))`.
    pub predicted: f64,
    /// Unordered pairs with equal image.
    pub observed_pairs: u64,
    /// Pairs whose generator counts already agree (same homology value).
    pub trivial_pairs: u64,
    /// `observed_pairs - trivial_pairs`: genuine collisions of `Π_m`.
    pub nontrivial_pairs: u64,
}

fn pairs(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

/// Count colliding pairs of `Π_m` over `W_L`, enumerating every path, or
/// over `samples` uniform draws when given.
pub fn collision_experiment(
    model: &PathModel,
    a: &PeriodMap,
    samples: Option<u64>,
    seed: &Seed,
    cap: u64,
) -> Result<CollisionReport, MsiError> {
    let images = model.generator_images(a)?;
    let q = a.modulus();
    let len = model.max_len;
    let mut coords_seen: Vec<(Vec<u64>, Vec<i64>)> = Vec::new();
    let paths = match samples {
        Some(s) => {
            if s > cap {
                return Err(MsiError::WorkCapExceeded {
                    needed: s.to_string(),
                    cap,
                });
            }
            let mut rng = seed.rng("collision", 0);
            for _ in 0..s {
                let p = model.sample_path(len, &mut rng);
                let c = model.coords(&p);
                coords_seen.push((image(&images, &c, q), c));
            }
            s
        }
        None => {
            let total = model.count_paths(len);
            if total > BigUint::from(cap) {
                return Err(MsiError::WorkCapExceeded {
                    needed: total.to_string(),
                    cap,
                });
            }
            enumerate_all(model, len, &mut |c| {
                coords_seen.push((image(&images, c, q), c.to_vec()))
            });
            to_u64_or_max(&total)
        }
    };
    let mut by_image: HashMap<&[u64], u64> = HashMap::new();
    let mut by_value: HashMap<&[i64], u64> = HashMap::new();
    for (img, c) in &coords_seen {
        *by_image.entry(img).or_default() += 1;
        *by_value.entry(c).or_default() += 1;
    }
    let observed: u64 = by_image.values().map(|&n| pairs(n)).sum();
    let trivial: u64 = by_value.values().map(|&n| pairs(n)).sum();
    let size = BigUint::from(q).pow(a.d() as u32);
    let predicted = (paths as f64).powi(2) / (2.0 * size.to_f64().unwrap_or(f64::INFINITY));
    Ok(CollisionReport {
        paths,
        sampled: samples.is_some(),
        codomain_size: size.to_string(),
        predicted,
        observed_pairs: observed,
        trivial_pairs: trivial,
        nontrivial_pairs: observed - trivial,
    })
}

fn image(images: &[Vec<u64>], coords: &[i64], q: u64) -> Vec<u64> {
    let d = images.first().map_or(0, Vec::len);
    let mut out = vec![0u64; d];
    for (g, &k) in coords.iter().enumerate() {
        for (o, &x) in out.iter_mut().zip(&images[g]) {
            *o = ((*o as u128 + x as u128 * k as u128) % q as u128) as u64;
        }
    }
    out
}

fn enumerate_all(model: &PathModel, len: usize, visit: &mut dyn FnMut(&[i64])) {
    fn rec(
        model: &PathModel,
        left: usize,
        last: Option<usize>,
        c: &mut Vec<i64>,
        visit: &mut dyn FnMut(&[i64]),
    ) {
        if left == 0 {
            visit(c);
            return;
        }
        let options: Vec<usize> = match last {
            None => (0..model.generators).collect(),
            Some(g) => model.follows[g].clone(),
        };
        for g in options {
            c[g] += 1;
            rec(model, left - 1, Some(g), c, visit);
            c[g] -= 1;
        }
    }
    let mut c = vec![0i64; model.generators];
    rec(model, len, None, &mut c, visit);
}

/// Inputs to `parameter_check`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecurityParams {
    pub l: u64,
    pub m: u32,
    pub d: u32,
    #[serde(rename = "B")]
    pub branching: u64,
    #[serde(rename = "L")]
    pub length: u32,
    pub lambda: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamVerdict {
    pub params: SecurityParams,
    /// `B^L >= 2^lambda`.
    pub search_hardness: bool,
    /// `B^(L/2) >= 2^lambda`.
    pub quantum_margin: bool,
    /// `m d log2(l) >= 2 L log2(B)`, i.e. `l^(m d) >= B^(2 L)`.
    pub separation: bool,
    pub log2_paths: f64,
    pub log2_codomain: f64,
}

/// Exact integer comparisons for the three parameter conditions.
pub fn parameter_check(p: SecurityParams) -> ParamVerdict {
    let b = BigUint::from(p.branching);
    let two_lambda = BigUint::one() << p.lambda as usize;
    let paths = b.pow(p.length);
    let search_hardness = paths >= two_lambda;
    // B^(L/2) >= 2^lambda  <=>  B^L >= 2^(2 lambda)
    let quantum_margin = paths >= (BigUint::one() << (2 * p.lambda as usize));
    let codomain = BigUint::from(p.l).pow(p.m * p.d);
    let separation = codomain >= b.pow(2 * p.length);
    ParamVerdict {
        params: p,
        search_hardness,
        quantum_margin,
        separation,
        log2_paths: p.length as f64 * (p.branching as f64).log2(),
        log2_codomain: (p.m * p.d) as f64 * (p.l as f64).log2(),
    }
}
