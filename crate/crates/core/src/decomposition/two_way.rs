//! The mass/drop loop.
//!
//! Rows start in `L1` normalized to unit mass on `M1 = all columns`.
//! While some `M1` column carries normalized mass at least
//! `n^-col_mass_exp_pre`, the lowest-index such column moves to `M2`.
//! Normalization is lazy: a row is renormalized only when its mass left in
//! `M1` falls below `tau` times its mass at the last normalization (a
//! "drop"), where `(1 - tau) / tau = C0^2`. The columns removed between
//! consecutive drops form one scale, `C0` times heavier than everything
//! left, so after `S` drops the row is moved to `L2` with `S + 1` scales
//! (the two largest are merged into one).
//!
//! When no heavy column is left, every row is renormalized; masses may
//! grow by up to `1 / tau` here, so the loop resumes until a full
//! renormalization leaves no heavy column. Rows whose `M1` part becomes
//! zero stay in `L1` without a drop.

use num::{Signed, Zero};
use serde::Serialize;

use super::{mass_on, Matrix, RowScales, ScalePartition};
use crate::error::{Error, Result};
use crate::params::ParamSet;
use crate::rat::{self, Rat};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowNorm {
    pub row: usize,
    /// `1 / ||v_row restricted to M1||^2`.
    #[serde(with = "rat::serde_rat")]
    pub inv_mass: Rat,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwoWayDecomposition {
    pub l1: Vec<usize>,
    pub l2: Vec<usize>,
    pub m1: Vec<usize>,
    pub m2: Vec<usize>,
    /// L1 rows that are non-zero on `M1`.
    pub row_norms: Vec<RowNorm>,
    pub l2_scales: Vec<RowScales>,
    /// Number of columns moved to `M2`.
    pub moves: usize,
    /// Full renormalizations after which the loop resumed.
    pub renormalizations: usize,
    /// `(row, drops)` for every row with at least one drop.
    pub drops: Vec<(usize, usize)>,
    /// Sum of the normalized masses of the moved columns at their move time.
    #[serde(with = "rat::serde_rat")]
    pub moved_mass: Rat,
}

pub fn decompose_two_way(v: &Matrix, p: &ParamSet) -> Result<TwoWayDecomposition> {
    p.validate()?;
    let n = v.first().map_or(0, Vec::len);
    if v.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput("ragged matrix".into()));
    }
    let bound = (n as f64).powf(p.alpha);
    if v.len() as f64 > bound {
        return Err(Error::Premise(format!("k = {} exceeds n^alpha = {bound:.3}", v.len())));
    }
    let rows: Vec<usize> = (0..v.len()).collect();
    let cols: Vec<usize> = (0..n).collect();
    Ok(split(v, &rows, &cols, p, n))
}

/// Runs the loop on the `rows x cols` submatrix; `cols` must be ascending.
pub(crate) fn split(v: &Matrix, rows: &[usize], cols: &[usize], p: &ParamSet, n: usize) -> TwoWayDecomposition {
    let s = p.scale_count(n);
    let tau = p.tau();
    let heavy = p.thresholds(n).heavy_pre;
    let k = rows.len();

    let mut in_m1 = vec![true; cols.len()];
    let mut active = vec![true; k];
    let mut base: Vec<Rat> = rows.iter().map(|&i| mass_on(&v[i], cols)).collect();
    let mut rem = base.clone();
    let mut drops = vec![0usize; k];
    let mut groups: Vec<Vec<Vec<usize>>> = vec![Vec::new(); k];
    let mut piece: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut l2_scales = Vec::new();
    let mut moves = 0;
    let mut renormalizations = 0;
    let mut renormalized = false;
    let mut moved_mass = Rat::zero();

    let column_mass = |c: usize, active: &[bool], base: &[Rat], rem: &[Rat]| -> Rat {
        (0..k)
            .filter(|&a| active[a] && rem[a].is_positive())
            .map(|a| {
                let x = &v[rows[a]][cols[c]];
                if x.is_zero() {
                    Rat::zero()
                } else {
                    x * x / &base[a]
                }
            })
            .sum()
    };

    loop {
        let next = (0..cols.len())
            .filter(|&c| in_m1[c])
            .map(|c| (c, column_mass(c, &active, &base, &rem)))
            .find(|(_, m)| *m >= heavy);
        let Some((c, mass)) = next else {
            let mut changed = false;
            for a in 0..k {
                if active[a] && rem[a].is_positive() && rem[a] != base[a] {
                    base[a] = rem[a].clone();
                    changed = true;
                }
            }
            if !changed {
                break;
            }
            renormalized = true;
            continue;
        };
        if std::mem::take(&mut renormalized) {
            renormalizations += 1;
        }
        in_m1[c] = false;
        moves += 1;
        moved_mass += mass;
        let j = cols[c];
        for a in 0..k {
            if !active[a] {
                continue;
            }
            piece[a].push(j);
            let x = &v[rows[a]][j];
            if x.is_zero() {
                continue;
            }
            rem[a] -= x * x;
            if rem[a].is_positive() && rem[a] < &tau * &base[a] {
                drops[a] += 1;
                groups[a].push(std::mem::take(&mut piece[a]));
                base[a] = rem[a].clone();
                if drops[a] == s {
                    active[a] = false;
                    let mut g = std::mem::take(&mut groups[a]);
                    g.push((0..cols.len()).filter(|&c| in_m1[c]).map(|c| cols[c]).collect());
                    let second = g.remove(1);
                    g[0].extend(second);
                    l2_scales.push(RowScales {
                        row: rows[a],
                        partition: ScalePartition::from_groups(&v[rows[a]], g),
                    });
                }
            }
        }
    }

    let l1: Vec<usize> = (0..k).filter(|&a| active[a]).map(|a| rows[a]).collect();
    let mut l2: Vec<usize> = (0..k).filter(|&a| !active[a]).map(|a| rows[a]).collect();
    l2.sort_unstable();
    l2_scales.sort_by_key(|r| r.row);
    TwoWayDecomposition {
        row_norms: (0..k)
            .filter(|&a| active[a] && rem[a].is_positive())
            .map(|a| RowNorm {
                row: rows[a],
                inv_mass: rat::int(1) / &rem[a],
            })
            .collect(),
        l1,
        l2,
        m1: (0..cols.len()).filter(|&c| in_m1[c]).map(|c| cols[c]).collect(),
        m2: (0..cols.len()).filter(|&c| !in_m1[c]).map(|c| cols[c]).collect(),
        l2_scales,
        moves,
        renormalizations,
        drops: (0..k).filter(|&a| drops[a] > 0).map(|a| (rows[a], drops[a])).collect(),
        moved_mass,
    }
}
