//! Row/column decomposition of the normal matrix `V` (rows are plane
//! normals).
//!
//! * [`scales`]: detection of vectors with many geometrically decaying scales.
//! * [`two_way`]: the mass/drop loop splitting rows into `L1 | L2` and
//!   columns into `M1 | M2`.
//! * [`four_way`]: nested application of the two-way split producing
//!   `K1..K4` and `N1..N3`.
//! * [`check`]: independent re-verification of both outputs.
//!
//! Thresholds of the form `n^-e` use the global column count `n` at every
//! nesting level.

pub mod check;
pub mod four_way;
pub mod scales;
pub mod two_way;

use serde::Serialize;

use crate::rat::Rat;

pub use check::{check_four_way, check_two_way, validate_scale_partition, FourWayReport, ItemReport, TwoWayReport};
pub use four_way::{decompose_four_way, Branch, FourWayDecomposition, IterationTrace, Normalizer};
pub use scales::{find_scales, ScalePartition};
pub use two_way::{decompose_two_way, TwoWayDecomposition};

/// Rows are plane normals.
pub type Matrix = Vec<Vec<Rat>>;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowScales {
    pub row: usize,
    pub partition: ScalePartition,
}

/// `sum_j v_j^2` over `cols`.
pub(crate) fn mass_on(v: &[Rat], cols: &[usize]) -> Rat {
    cols.iter().map(|&j| &v[j] * &v[j]).sum()
}
