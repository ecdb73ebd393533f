//! The classical modular polynomials `Φ_2` and `Φ_3`.

use super::field::{FiniteFieldElem, Fp2};
use super::poly::Poly;
use super::SsError;

/// Monomials `c X^i Y^j` of a symmetric bivariate integer polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModularPolynomial {
    pub l: u64,
    pub terms: Vec<(u32, u32, i128)>,
}

// Each entry (i, j, c) with i >= j stands for c (X^i Y^j + X^j Y^i), or
// c X^i Y^i when i = j.
const PHI2: &[(u32, u32, i128)] = &[
    (3, 0, 1),
    (2, 2, -1),
    (2, 1, 1488),
    (2, 0, -162000),
    (1, 1, 40773375),
    (1, 0, 8748000000),
    (0, 0, -157464000000000),
];

const PHI3: &[(u32, u32, i128)] = &[
    (4, 0, 1),
    (3, 3, -1),
    (3, 2, 2232),
    (3, 1, -1069956),
    (3, 0, 36864000),
    (2, 2, 2587918086),
    (2, 1, 8900222976000),
    (2, 0, 452984832000000),
    (1, 1, -770845966336000000),
    (1, 0, 1855425871872000000000),
];

fn expand(half: &[(u32, u32, i128)]) -> Vec<(u32, u32, i128)> {
    let mut out = Vec::new();
    for &(i, j, c) in half {
        out.push((i, j, c));
        if i != j {
            out.push((j, i, c));
        }
    }
    out.sort();
    out
}

/// `Φ_l` for `l` in {2, 3}.
pub fn modular_polynomial(l: u64) -> Result<ModularPolynomial, SsError> {
    let half = match l {
        2 => PHI2,
        3 => PHI3,
        _ => return Err(SsError::UnsupportedEll(l)),
    };
    Ok(ModularPolynomial {
        l,
        terms: expand(half),
    })
}

impl ModularPolynomial {
    pub fn degree_x(&self) -> u32 {
        self.terms.iter().map(|t| t.0).max().unwrap_or(0)
    }

    /// `Φ_l(x, Y)` as a polynomial in `Y` over `F_{p^2}`.
    pub fn specialize(&self, f: &Fp2, x: FiniteFieldElem) -> Poly {
        let deg = self.terms.iter().map(|t| t.1).max().unwrap_or(0) as usize;
        let mut out = vec![f.zero(); deg + 1];
        for &(i, j, c) in &self.terms {
            let term = f.mul(f.from_int(c), f.pow(x, i as u128));
            out[j as usize] = f.add(out[j as usize], term);
        }
        out
    }

    pub fn eval(&self, f: &Fp2, x: FiniteFieldElem, y: FiniteFieldElem) -> FiniteFieldElem {
        super::poly::eval(f, &self.specialize(f, x), y)
    }
}
