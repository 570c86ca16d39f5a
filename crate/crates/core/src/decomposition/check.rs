//! Re-verification of decompositions straight from the matrix.
//!
//! Nothing here calls the construction code: partitions, sparsity counts,
//! column masses and scale chains are recomputed from `V` and the claimed
//! index sets.

use std::collections::BTreeSet;

use num::{Signed, Zero};
use serde::Serialize;

use super::four_way::FourWayDecomposition;
use super::scales::ScalePartition;
use super::two_way::TwoWayDecomposition;
use super::Matrix;
use crate::params::ParamSet;
use crate::rat::{self, Rat};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ItemReport {
    pub holds: bool,
    pub violations: Vec<String>,
}

impl ItemReport {
    fn from(violations: Vec<String>) -> Self {
        ItemReport {
            holds: violations.is_empty(),
            violations,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FourWayReport {
    /// `K1..K4` partition the rows and `N1..N3` the columns.
    pub partition: ItemReport,
    /// `|N1| >= n / 2`.
    pub n1_size: ItemReport,
    /// Columns of `N1 ∪ N2` are sparse.
    pub item1: ItemReport,
    /// `K1` rows vanish on `N1 ∪ N2`.
    pub item2: ItemReport,
    /// `K2` rows vanish on `N1` and are dense on `N2`.
    pub item3: ItemReport,
    /// `K3` rows are non-zero on `N1` with small normalized column mass.
    pub item4: ItemReport,
    /// `K4` rows have many scales with the smallest one covering `N1`.
    pub item5: ItemReport,
    pub empty_k3: bool,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwoWayReport {
    pub partition: ItemReport,
    /// `|M2| <= n^m2_exp`.
    pub m2_size: ItemReport,
    /// Normalized `L1` column masses on `M1` are below `n^-col_mass_exp`.
    pub item1: ItemReport,
    /// `L2` rows have many scales with the smallest one covering `M1`.
    pub item2: ItemReport,
    pub passed: bool,
}

fn partition_violations(name: &str, parts: &[(&str, &[usize])], universe: usize) -> Vec<String> {
    let mut seen = vec![None; universe];
    let mut out = Vec::new();
    for (label, part) in parts {
        for &x in *part {
            if x >= universe {
                out.push(format!("{label} contains out-of-range {name} {x}"));
                continue;
            }
            if let Some(prev) = seen[x].replace(*label) {
                out.push(format!("{name} {x} is in both {prev} and {label}"));
            }
        }
    }
    out.extend(
        (0..universe)
            .filter(|&x| seen[x].is_none())
            .map(|x| format!("{name} {x} is in no part")),
    );
    out
}

fn nnz(row: &[Rat], cols: &[usize]) -> usize {
    cols.iter().filter(|&&j| !row[j].is_zero()).count()
}

fn sq_sum(row: &[Rat], cols: &[usize]) -> Rat {
    cols.iter().map(|&j| &row[j] * &row[j]).sum()
}

/// Checks that `part` splits a vector into `s` scales with ratio `c0`.
///
/// The groups must be disjoint subsets of `domain` covering every
/// coordinate of `domain` where `v` is non-zero; every group must have
/// positive mass; masses must decay by `c0^2`; the last group must contain
/// `must_contain`; and the recorded squared norms must be the real ones.
pub fn validate_scale_partition(
    v: &[Rat],
    part: &ScalePartition,
    s: usize,
    c0: &Rat,
    domain: &[usize],
    must_contain: &[usize],
) -> Result<(), String> {
    if part.groups.len() != s {
        return Err(format!("{} groups, expected {s}", part.groups.len()));
    }
    let domain: BTreeSet<usize> = domain.iter().copied().collect();
    let mut used = BTreeSet::new();
    for g in &part.groups {
        for &j in g {
            if !domain.contains(&j) {
                return Err(format!("coordinate {j} is outside the domain"));
            }
            if !used.insert(j) {
                return Err(format!("coordinate {j} is in two groups"));
            }
        }
    }
    if let Some(j) = domain.iter().find(|&&j| !v[j].is_zero() && !used.contains(&j)) {
        return Err(format!("non-zero coordinate {j} is in no group"));
    }
    let masses: Vec<Rat> = part.groups.iter().map(|g| sq_sum(v, g)).collect();
    if masses != part.norms_sq {
        return Err("recorded norms do not match the vector".into());
    }
    if let Some(g) = masses.iter().position(|m| !m.is_positive()) {
        return Err(format!("group {g} has zero norm"));
    }
    let c0_sq = c0 * c0;
    for g in 0..s.saturating_sub(1) {
        if masses[g] < &c0_sq * &masses[g + 1] {
            return Err(format!("groups {g} and {} violate the C0 gap", g + 1));
        }
    }
    let last: BTreeSet<usize> = part.groups.last().map(|g| g.iter().copied().collect()).unwrap_or_default();
    if let Some(j) = must_contain.iter().find(|j| !last.contains(j)) {
        return Err(format!("smallest scale misses coordinate {j}"));
    }
    Ok(())
}

pub fn check_four_way(v: &Matrix, d: &FourWayDecomposition, p: &ParamSet) -> FourWayReport {
    let k = v.len();
    let n = v.first().map_or(0, Vec::len);
    let th = p.thresholds(n);
    let c0 = p.c0_rat();
    let s = p.scale_count(n);

    let mut partition = partition_violations(
        "row",
        &[("K1", &d.k1), ("K2", &d.k2), ("K3", &d.k3), ("K4", &d.k4)],
        k,
    );
    partition.extend(partition_violations(
        "column",
        &[("N1", &d.n1), ("N2", &d.n2), ("N3", &d.n3)],
        n,
    ));
    let partition = ItemReport::from(partition);
    let in_range = |xs: &[usize], bound: usize| xs.iter().all(|&x| x < bound);
    if !partition.holds
        && !(in_range(&d.k1, k) && in_range(&d.k2, k) && in_range(&d.k3, k) && in_range(&d.k4, k)
            && in_range(&d.n1, n) && in_range(&d.n2, n) && in_range(&d.n3, n))
    {
        let broken = ItemReport::from(vec!["indices out of range".into()]);
        return FourWayReport {
            partition,
            n1_size: broken.clone(),
            item1: broken.clone(),
            item2: broken.clone(),
            item3: broken.clone(),
            item4: broken.clone(),
            item5: broken,
            empty_k3: d.k3.is_empty(),
            passed: false,
        };
    }

    let n1_size = ItemReport::from(if 2 * d.n1.len() >= n {
        vec![]
    } else {
        vec![format!("|N1| = {} < n/2 = {}", d.n1.len(), n as f64 / 2.0)]
    });

    let n12: Vec<usize> = d.n1.iter().chain(&d.n2).copied().collect();
    let item1 = ItemReport::from(
        n12.iter()
            .filter_map(|&j| {
                let count = v.iter().filter(|r| !r[j].is_zero()).count();
                (count > th.sparse_col_max)
                    .then(|| format!("column {j} has {count} > {} non-zeros", th.sparse_col_max))
            })
            .collect(),
    );

    let item2 = ItemReport::from(
        d.k1.iter()
            .filter(|&&i| nnz(&v[i], &n12) > 0)
            .map(|i| format!("K1 row {i} is non-zero on N1 ∪ N2"))
            .collect(),
    );

    let need = p.cond2_factor * (d.k2.len() * d.k2.len()) as f64;
    let mut v3 = Vec::new();
    for &i in &d.k2 {
        if nnz(&v[i], &d.n1) > 0 {
            v3.push(format!("K2 row {i} is non-zero on N1"));
        }
        let c = nnz(&v[i], &d.n2);
        if (c as f64) < need {
            v3.push(format!("K2 row {i} has {c} < {need} non-zeros on N2"));
        }
    }
    let item3 = ItemReport::from(v3);

    let mut v4 = Vec::new();
    let mut phi_sq = Vec::new();
    let mut phi_hat = Vec::new();
    for &i in &d.k3 {
        let mass = sq_sum(&v[i], &d.n1);
        if mass.is_zero() {
            v4.push(format!("K3 row {i} vanishes on N1"));
            continue;
        }
        phi_sq.push((i, rat::int(1) / &mass));
        phi_hat.push((i, rat::inv_sqrt_upper(&mass, 64)));
    }
    if v4.is_empty() {
        for &j in &d.n1 {
            let col_mass: Rat = phi_sq.iter().map(|(i, f)| f * &v[*i][j] * &v[*i][j]).sum();
            if col_mass >= th.mass_final {
                v4.push(format!(
                    "column {j}: normalized mass {:.6} >= {:.6}",
                    rat::to_f64(&col_mass),
                    rat::to_f64(&th.mass_final)
                ));
            }
            let col_l1: Rat = phi_hat.iter().map(|(i, f)| f * v[*i][j].abs()).sum();
            if col_l1 >= th.linf_final {
                v4.push(format!(
                    "column {j}: normalized l1 {:.6} >= {:.6}",
                    rat::to_f64(&col_l1),
                    rat::to_f64(&th.linf_final)
                ));
            }
        }
        let claimed: Vec<(usize, &Rat)> = d.normalizers.iter().map(|z| (z.row, &z.phi_sq)).collect();
        let actual: Vec<(usize, &Rat)> = phi_sq.iter().map(|(i, f)| (*i, f)).collect();
        if claimed != actual {
            v4.push("recorded normalizers do not match K3".into());
        }
        for z in &d.normalizers {
            if (&z.phi * &z.phi) < z.phi_sq {
                v4.push(format!("normalizer of row {} is below the exact value", z.row));
            }
        }
    }
    let item4 = ItemReport::from(v4);

    let mut v5 = Vec::new();
    for &i in &d.k4 {
        if nnz(&v[i], &d.n1) == 0 {
            v5.push(format!("K4 row {i} vanishes on N1"));
        }
        match d.scales.iter().find(|r| r.row == i) {
            None => v5.push(format!("K4 row {i} has no scale data")),
            Some(r) => {
                if let Err(e) = validate_scale_partition(&v[i], &r.partition, s, &c0, &n12, &d.n1) {
                    v5.push(format!("K4 row {i}: {e}"));
                }
            }
        }
    }
    let item5 = ItemReport::from(v5);

    let passed = [&partition, &n1_size, &item1, &item2, &item3, &item4, &item5]
        .iter()
        .all(|r| r.holds);
    FourWayReport {
        partition,
        n1_size,
        item1,
        item2,
        item3,
        item4,
        item5,
        empty_k3: d.k3.is_empty(),
        passed,
    }
}

pub fn check_two_way(v: &Matrix, d: &TwoWayDecomposition, p: &ParamSet) -> TwoWayReport {
    let k = v.len();
    let n = v.first().map_or(0, Vec::len);
    let th = p.thresholds(n);
    let mut partition = partition_violations("row", &[("L1", &d.l1), ("L2", &d.l2)], k);
    partition.extend(partition_violations("column", &[("M1", &d.m1), ("M2", &d.m2)], n));
    let partition = ItemReport::from(partition);
    if !partition.holds {
        let broken = ItemReport::from(vec!["partition is invalid".into()]);
        return TwoWayReport {
            partition,
            m2_size: broken.clone(),
            item1: broken.clone(),
            item2: broken,
            passed: false,
        };
    }
    let m2_size = ItemReport::from(if d.m2.len() <= th.m2_cap {
        vec![]
    } else {
        vec![format!("|M2| = {} > {}", d.m2.len(), th.m2_cap)]
    });
    let inv: Vec<(usize, Rat)> = d
        .l1
        .iter()
        .filter_map(|&i| {
            let m = sq_sum(&v[i], &d.m1);
            (!m.is_zero()).then(|| (i, rat::int(1) / m))
        })
        .collect();
    let item1 = ItemReport::from(
        d.m1.iter()
            .filter_map(|&j| {
                let mass: Rat = inv.iter().map(|(i, f)| f * &v[*i][j] * &v[*i][j]).sum();
                (mass >= th.mass_final).then(|| format!("column {j}: normalized mass {:.6}", rat::to_f64(&mass)))
            })
            .collect(),
    );
    let all: Vec<usize> = (0..n).collect();
    let s = p.scale_count(n);
    let c0 = p.c0_rat();
    let item2 = ItemReport::from(
        d.l2.iter()
            .filter_map(|&i| match d.l2_scales.iter().find(|r| r.row == i) {
                None => Some(format!("L2 row {i} has no scale data")),
                Some(r) => validate_scale_partition(&v[i], &r.partition, s, &c0, &all, &d.m1)
                    .err()
                    .map(|e| format!("L2 row {i}: {e}")),
            })
            .collect(),
    );
    let passed = partition.holds && m2_size.holds && item1.holds && item2.holds;
    TwoWayReport {
        partition,
        m2_size,
        item1,
        item2,
        passed,
    }
}
