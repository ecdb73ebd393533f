//! Homology classes attached to ideal classes: the Hecke-product
//! realization and the CM-point realization.

use super::basis::{HomologyClass, ManinBasis};
use super::cusps::Cusp;
use super::ModsymError;
use crate::arith::gcd;
use crate::quadratic::{
    enumerate_class_group, factor_class, CMPoint, Discriminant, PrimeStep, QuadForm,
};

impl ManinBasis {
    /// The default base class `{0 -> ∞}`.
    pub fn default_gamma0(&self) -> HomologyClass {
        self.symbol_from_cusps(Cusp::integer(0), Cusp::INFINITY)
    }

    /// Apply `T_q` for each step of a class word, in word order.
    pub fn apply_word(&self, word: &[PrimeStep], gamma0: &HomologyClass) -> HomologyClass {
        let mut coords = gamma0.coords.clone();
        for step in word {
            coords = self.hecke_matrix(step.q).mul_vec(&coords);
        }
        self.class(coords)
    }

    /// `T_{q_k} ... T_{q_1} γ0` for the factor-base word of `cls`.
    /// Factor-base primes dividing `N·l` are rejected.
    pub fn construction1_class(
        &self,
        cls: &QuadForm,
        gamma0: &HomologyClass,
        factor_base: &[u64],
        ell: u64,
    ) -> Result<HomologyClass, ModsymError> {
        if gamma0.level != self.level || gamma0.coords.len() != self.rank {
            return Err(ModsymError::LevelMismatch {
                expected: self.level,
                got: gamma0.level,
            });
        }
        if let Some(&q) = factor_base
            .iter()
            .find(|&&q| self.level % q == 0 || q == ell)
        {
            return Err(ModsymError::PrimeDividesLevel {
                prime: q,
                level: self.level,
                ell,
            });
        }
        let word = factor_class(cls, factor_base, None)?;
        Ok(self.apply_word(&word, gamma0))
    }

    /// The class `{base -> r(τ_a)} - {base -> r(τ_0)}` where `r(τ)` is the
    /// cusp `Re τ`, reached from the base cusp along the continued-fraction
    /// chain of `Re τ`. Its boundary is `[r(τ_a)] - [r(τ_0)]`.
    pub fn construction2_class(
        &self,
        x0: &CMPoint,
        xa: &CMPoint,
        base_cusp: Cusp,
    ) -> Result<HomologyClass, ModsymError> {
        for x in [x0, xa] {
            let d = x.discriminant();
            if gcd(d, self.level as i64) != 1 {
                return Err(ModsymError::DiscriminantLevelClash {
                    disc: d,
                    level: self.level,
                });
            }
        }
        let r = |x: &CMPoint| Cusp::new(*x.tau_re.numer(), *x.tau_re.denom());
        let to_a = self.symbol_from_cusps(base_cusp, r(xa));
        let to_0 = self.symbol_from_cusps(base_cusp, r(x0));
        Ok(to_a.sub(&to_0))
    }

    /// Classes whose Hecke-product action fixes `γ0` (a probe of the
    /// stabilizer; nothing is claimed about its size).
    pub fn stabilizer_probe(
        &self,
        d: Discriminant,
        gamma0: &HomologyClass,
        factor_base: &[u64],
        ell: u64,
    ) -> Result<Vec<QuadForm>, ModsymError> {
        let mut out = Vec::new();
        for f in enumerate_class_group(d) {
            match self.construction1_class(&f, gamma0, factor_base, ell) {
                Ok(g) if g == *gamma0 => out.push(f),
                Ok(_) => {}
                Err(ModsymError::Quad(_)) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(out)
    }
}
