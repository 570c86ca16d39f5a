//! Nested two-way splits producing four row classes and three column
//! classes.
//!
//! Dense columns (more than `n^sparsity_exp` non-zeros) are removed first.
//! On the current submatrix the two-way split gives `M1 | M2`; `Z` is the
//! set of current rows vanishing on `M1`, `k_t = |Z|`, `n_t = |M2|`.
//!
//! * `k_t > n_t^cond1_exp`: drop the rows of `Z`, keep the columns `M1`.
//! * otherwise, if some row of `Z` (lowest index) has at most
//!   `cond2_factor * k_t^2` non-zeros on `M2`: drop that row and keep the
//!   columns where it vanishes.
//! * otherwise stop.
//!
//! With `(R, C)` the last submatrix: `N1 = M1`, `N2 = C \ M1`, `N3` the
//! rest; `K1` the rows outside `R`, `K2 = Z`, `K3 = L1 \ Z`, `K4 = L2 \ Z`.

use num::Zero;
use serde::Serialize;

use super::two_way::split;
use super::{mass_on, Matrix, RowScales};
use crate::error::{Error, Result};
use crate::params::ParamSet;
use crate::rat::{self, Rat};

/// Precision of the rational upper approximation of each normalizer.
pub const PHI_BITS: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    RemoveZeroRows,
    ExciseSparseRow,
    Stop,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationTrace {
    pub rows: usize,
    pub cols: usize,
    pub k_t: usize,
    pub n_t: usize,
    pub branch: Branch,
    pub excised_row: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Normalizer {
    pub row: usize,
    /// `phi^2 = 1 / ||v_row restricted to N1||^2`, exact.
    #[serde(with = "rat::serde_rat")]
    pub phi_sq: Rat,
    /// A rational `phi_hat >= phi` within about `2^-62` relative error.
    #[serde(with = "rat::serde_rat")]
    pub phi: Rat,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FourWayDecomposition {
    pub n: usize,
    pub k: usize,
    pub k1: Vec<usize>,
    pub k2: Vec<usize>,
    pub k3: Vec<usize>,
    pub k4: Vec<usize>,
    pub n1: Vec<usize>,
    pub n2: Vec<usize>,
    pub n3: Vec<usize>,
    /// Columns removed up front for being dense; a subset of `n3`.
    pub dense_cols: Vec<usize>,
    /// One per `K3` row.
    pub normalizers: Vec<Normalizer>,
    /// One per `K4` row, over the columns `N1 ∪ N2`.
    pub scales: Vec<RowScales>,
    pub iterations: Vec<IterationTrace>,
    /// `K3` is empty; the decomposition is still valid.
    pub empty_k3: bool,
}

pub fn decompose_four_way(v: &Matrix, p: &ParamSet) -> Result<FourWayDecomposition> {
    p.validate()?;
    let k = v.len();
    let n = v.first().map_or(0, Vec::len);
    if k == 0 || n == 0 || v.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput("matrix must be non-empty and rectangular".into()));
    }
    let bound = p.max_planes(n);
    if k as f64 > bound {
        return Err(Error::Premise(format!(
            "k = {k} exceeds n^alpha / divisor = {bound:.3}"
        )));
    }
    let sparse_max = p.thresholds(n).sparse_col_max;
    let nnz_col = |j: usize| v.iter().filter(|r| !r[j].is_zero()).count();
    let dense_cols: Vec<usize> = (0..n).filter(|&j| nnz_col(j) > sparse_max).collect();

    let mut rows: Vec<usize> = (0..k).collect();
    let mut cols: Vec<usize> = (0..n).filter(|j| dense_cols.binary_search(j).is_err()).collect();
    let mut iterations = Vec::new();
    loop {
        let tw = split(v, &rows, &cols, p, n);
        let zero: Vec<usize> = rows
            .iter()
            .copied()
            .filter(|&i| tw.m1.iter().all(|&j| v[i][j].is_zero()))
            .collect();
        let k_t = zero.len();
        let n_t = tw.m2.len();
        let mut trace = IterationTrace {
            rows: rows.len(),
            cols: cols.len(),
            k_t,
            n_t,
            branch: Branch::Stop,
            excised_row: None,
        };
        if k_t as f64 > (n_t as f64).powf(p.cond1_exp) {
            trace.branch = Branch::RemoveZeroRows;
            iterations.push(trace);
            rows.retain(|i| !zero.contains(i));
            cols = tw.m1;
            continue;
        }
        let cap = p.cond2_factor * (k_t * k_t) as f64;
        let sparse_row = zero
            .iter()
            .copied()
            .find(|&i| tw.m2.iter().filter(|&&j| !v[i][j].is_zero()).count() as f64 <= cap);
        if let Some(star) = sparse_row {
            trace.branch = Branch::ExciseSparseRow;
            trace.excised_row = Some(star);
            iterations.push(trace);
            rows.retain(|&i| i != star);
            cols.retain(|&j| v[star][j].is_zero());
            continue;
        }
        iterations.push(trace);

        let n1 = tw.m1;
        let n2 = tw.m2;
        let n3: Vec<usize> = (0..n).filter(|j| cols.binary_search(j).is_err()).collect();
        let k1: Vec<usize> = (0..k).filter(|i| !rows.contains(i)).collect();
        let k3: Vec<usize> = tw.l1.iter().copied().filter(|i| !zero.contains(i)).collect();
        let k4: Vec<usize> = tw.l2.iter().copied().filter(|i| !zero.contains(i)).collect();
        let normalizers = k3
            .iter()
            .map(|&i| {
                let mass = mass_on(&v[i], &n1);
                Normalizer {
                    row: i,
                    phi_sq: rat::int(1) / &mass,
                    phi: rat::inv_sqrt_upper(&mass, PHI_BITS),
                }
            })
            .collect();
        let scales = tw
            .l2_scales
            .into_iter()
            .filter(|r| k4.contains(&r.row))
            .collect();
        return Ok(FourWayDecomposition {
            n,
            k,
            empty_k3: k3.is_empty(),
            k1,
            k2: zero,
            k3,
            k4,
            n1,
            n2,
            n3,
            dense_cols,
            normalizers,
            scales,
            iterations,
        });
    }
}
