//! Exponents and constants of the construction as configurable knobs.
//!
//! Defaults are the asymptotic values. At desk scale most of them make
//! the machinery vacuous (for instance `floor(n^0.001) = 1` scale), so
//! tests and experiments override them explicitly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rat::{self, Rat};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamSet {
    /// Premise exponent: at most `n^alpha / divisor` planes.
    pub alpha: f64,
    pub divisor: f64,
    /// Columns with more than `n^sparsity_exp` non-zeros are dense.
    pub sparsity_exp: f64,
    /// Final column-mass bound `n^-col_mass_exp`.
    pub col_mass_exp: f64,
    /// Column-mass bound used while moving heavy columns.
    pub col_mass_exp_pre: f64,
    /// Row-removal branch fires when `k_t > n_t^cond1_exp`.
    pub cond1_exp: f64,
    /// Sparse-row branch fires when `||v_i|_{M2}||_0 <= cond2_factor * k_t^2`.
    pub cond2_factor: f64,
    /// Bang width `theta = n^theta_exp`.
    pub theta_exp: f64,
    /// Cap on the heavy-column set, `n^m2_exp`.
    pub m2_exp: f64,
    /// Variance split reported by the rounding diagnostics.
    pub variance_cut_exp: f64,
    /// Scale count `floor(n^scale_count_exp)`.
    pub scale_count_exp: f64,
    /// Sets the scale count directly.
    pub scale_count_override: Option<usize>,
    /// Geometric ratio between consecutive scales.
    pub c0: f64,
    pub seed: u64,
    pub max_tries: usize,
}

impl Default for ParamSet {
    fn default() -> Self {
        Self {
            alpha: 0.52,
            divisor: 10.0,
            sparsity_exp: 0.04,
            col_mass_exp: 0.196,
            col_mass_exp_pre: 0.1961,
            cond1_exp: 0.332,
            cond2_factor: 4.0,
            theta_exp: 0.078,
            m2_exp: 0.7171,
            variance_cut_exp: 0.151,
            scale_count_exp: 0.001,
            scale_count_override: None,
            c0: 2.0,
            seed: 0,
            max_tries: 1000,
        }
    }
}

impl ParamSet {
    pub fn validate(&self) -> Result<()> {
        let exps = [
            ("alpha", self.alpha),
            ("sparsity_exp", self.sparsity_exp),
            ("col_mass_exp", self.col_mass_exp),
            ("col_mass_exp_pre", self.col_mass_exp_pre),
            ("cond1_exp", self.cond1_exp),
            ("theta_exp", self.theta_exp),
            ("m2_exp", self.m2_exp),
            ("variance_cut_exp", self.variance_cut_exp),
            ("scale_count_exp", self.scale_count_exp),
        ];
        for (name, e) in exps {
            if !(e > 0.0 && e < 1.0) {
                return Err(Error::InvalidInput(format!("{name} = {e} is not in (0, 1)")));
            }
        }
        if !(self.c0 > 1.0 && self.c0.is_finite()) {
            return Err(Error::InvalidInput(format!("c0 = {} must exceed 1", self.c0)));
        }
        if !(self.divisor > 0.0 && self.divisor.is_finite()) {
            return Err(Error::InvalidInput("divisor must be positive".into()));
        }
        if !(self.cond2_factor > 0.0 && self.cond2_factor.is_finite()) {
            return Err(Error::InvalidInput("cond2_factor must be positive".into()));
        }
        if matches!(self.scale_count_override, Some(s) if s < 2) {
            return Err(Error::InvalidInput("scale_count_override must be at least 2".into()));
        }
        if self.max_tries == 0 {
            return Err(Error::InvalidInput("max_tries must be positive".into()));
        }
        Ok(())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let p: ParamSet = serde_json::from_str(s)?;
        p.validate()?;
        Ok(p)
    }

    /// `S`: the override when present, else `max(1, floor(n^scale_count_exp))`.
    pub fn scale_count(&self, n: usize) -> usize {
        self.scale_count_override
            .unwrap_or_else(|| (rat::pow_floor(n as f64, self.scale_count_exp) as usize).max(1))
    }

    /// `C0` as an exact rational (every finite `f64` is one).
    pub fn c0_rat(&self) -> Rat {
        rat::from_f64(self.c0).expect("validated c0")
    }

    /// `tau` with `(1 - tau) / tau = C0^2`.
    pub fn tau(&self) -> Rat {
        let c = self.c0_rat();
        rat::int(1) / (rat::int(1) + &c * &c)
    }

    /// Largest plane count the four-way premise admits, `n^alpha / divisor`.
    pub fn max_planes(&self, n: usize) -> f64 {
        (n as f64).powf(self.alpha) / self.divisor
    }

    pub fn thresholds(&self, n: usize) -> Thresholds {
        let nf = n as f64;
        Thresholds {
            sparse_col_max: rat::pow_floor(nf, self.sparsity_exp) as usize,
            heavy_pre: rat::pow_lower(nf, -self.col_mass_exp_pre),
            mass_final: rat::pow_lower(nf, -self.col_mass_exp),
            linf_final: rat::pow_lower(nf, -(self.col_mass_exp - self.sparsity_exp) / 2.0),
            linf_sq_final: rat::pow_lower(nf, self.sparsity_exp - self.col_mass_exp),
            m2_cap: rat::pow_floor(nf, self.m2_exp) as usize,
            theta: rat::pow_lower(nf, self.theta_exp),
            variance_cut: nf.powf(self.variance_cut_exp),
        }
    }
}

/// Rationalized thresholds for a fixed `n`. Each bound sits on the side
/// that keeps the inequality it guards sound: strict upper bounds are
/// rounded down, so passing the rational test implies the real one.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Thresholds {
    pub sparse_col_max: usize,
    #[serde(with = "rat::serde_rat")]
    pub heavy_pre: Rat,
    #[serde(with = "rat::serde_rat")]
    pub mass_final: Rat,
    #[serde(with = "rat::serde_rat")]
    pub linf_final: Rat,
    /// `linf_final` squared, bounded below directly.
    #[serde(with = "rat::serde_rat")]
    pub linf_sq_final: Rat,
    pub m2_cap: usize,
    #[serde(with = "rat::serde_rat")]
    pub theta: Rat,
    pub variance_cut: f64,
}
