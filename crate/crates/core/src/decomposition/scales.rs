//! Detection of geometrically decaying scales.
//!
//! A vector has `S` scales when its support splits into `S` non-empty
//! groups with `||g_s||^2 >= C0^2 ||g_{s+1}||^2`. Squared norms are
//! rational, so every comparison is exact.

use num::Zero;
use serde::Serialize;

use crate::rat::{self, Rat};

/// Supports up to this size fall back to an exact subset search when the
/// greedy pass fails.
pub const EXACT_SEARCH_LIMIT: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalePartition {
    /// Coordinate groups, largest scale first.
    pub groups: Vec<Vec<usize>>,
    #[serde(with = "rat::serde_rat::vec")]
    pub norms_sq: Vec<Rat>,
    pub norms: Vec<f64>,
    pub smallest_scale: f64,
    pub smallest_scale_coords: Vec<usize>,
}

impl ScalePartition {
    /// Builds the partition record for `groups` (largest first) of `v`.
    pub fn from_groups(v: &[Rat], mut groups: Vec<Vec<usize>>) -> Self {
        for g in &mut groups {
            g.sort_unstable();
        }
        let norms_sq: Vec<Rat> = groups
            .iter()
            .map(|g| g.iter().map(|&j| &v[j] * &v[j]).sum())
            .collect();
        let norms: Vec<f64> = norms_sq.iter().map(|x| rat::to_f64(x).sqrt()).collect();
        ScalePartition {
            smallest_scale: norms.last().copied().unwrap_or(0.0),
            smallest_scale_coords: groups.last().cloned().unwrap_or_default(),
            groups,
            norms_sq,
            norms,
        }
    }

    pub fn scale_count(&self) -> usize {
        self.groups.len()
    }
}

/// Splits the support of `v` into `s` scales with ratio at least `c0`.
///
/// Greedy pass first: coordinates in ascending magnitude, the smallest one
/// alone forms the last group, each next group takes the fewest further
/// coordinates reaching `C0^2` times the previous group's mass, and the
/// rest forms the first group. If that fails and the support has at most
/// [`EXACT_SEARCH_LIMIT`] coordinates, an exact search over subsets decides.
pub fn find_scales(v: &[Rat], s: usize, c0: &Rat) -> Option<ScalePartition> {
    assert!(s >= 1);
    let support: Vec<usize> = (0..v.len()).filter(|&j| !v[j].is_zero()).collect();
    if support.len() < s {
        return None;
    }
    let c0_sq = c0 * c0;
    let groups = greedy(v, &support, s, &c0_sq).or_else(|| {
        (support.len() <= EXACT_SEARCH_LIMIT)
            .then(|| exact(v, &support, s, &c0_sq))
            .flatten()
    })?;
    Some(ScalePartition::from_groups(v, groups))
}

fn greedy(v: &[Rat], support: &[usize], s: usize, c0_sq: &Rat) -> Option<Vec<Vec<usize>>> {
    let mut order: Vec<(Rat, usize)> = support.iter().map(|&j| (&v[j] * &v[j], j)).collect();
    order.sort();
    let mut it = order.into_iter();
    let (first_sq, first) = it.next()?;
    let mut groups = vec![vec![first]];
    let mut prev = first_sq;
    for _ in 1..s - 1 {
        let need = c0_sq * &prev;
        let mut group = Vec::new();
        let mut mass = Rat::zero();
        while mass < need {
            let (sq, j) = it.next()?;
            mass += sq;
            group.push(j);
        }
        groups.push(group);
        prev = mass;
    }
    if s > 1 {
        let rest: Vec<(Rat, usize)> = it.collect();
        let mass: Rat = rest.iter().map(|(sq, _)| sq.clone()).sum();
        if rest.is_empty() || mass < c0_sq * &prev {
            return None;
        }
        groups.push(rest.into_iter().map(|(_, j)| j).collect());
    } else {
        groups[0].extend(it.map(|(_, j)| j));
    }
    groups.reverse();
    Some(groups)
}

/// `best[t][mask]`: the smallest possible mass of the first group over
/// valid `(t + 1)`-group partitions of `mask`, with the chosen first group.
fn exact(v: &[Rat], support: &[usize], s: usize, c0_sq: &Rat) -> Option<Vec<Vec<usize>>> {
    let m = support.len();
    let full = (1usize << m) - 1;
    let mass: Vec<Rat> = (0..=full)
        .map(|mask| {
            (0..m)
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| &v[support[b]] * &v[support[b]])
                .sum()
        })
        .collect();
    let mut best: Vec<Vec<Option<(Rat, usize)>>> = vec![vec![None; full + 1]];
    best[0] = (0..=full).map(|mask| (mask != 0).then(|| (mass[mask].clone(), mask))).collect();
    for t in 1..s {
        let prev = &best[t - 1];
        let mut cur = vec![None; full + 1];
        for (mask, slot) in cur.iter_mut().enumerate() {
            let mut g = mask;
            while g != 0 {
                let rest = mask & !g;
                if let Some((r, _)) = &prev[rest] {
                    if mass[g] >= c0_sq * r && slot.as_ref().is_none_or(|(b, _): &(Rat, usize)| mass[g] < *b) {
                        *slot = Some((mass[g].clone(), g));
                    }
                }
                g = (g - 1) & mask;
            }
        }
        best.push(cur);
    }
    let mut groups = Vec::with_capacity(s);
    let mut mask = full;
    for t in (0..s).rev() {
        let (_, g) = best[t][mask].clone()?;
        groups.push((0..m).filter(|b| g >> b & 1 == 1).map(|b| support[b]).collect());
        mask &= !g;
    }
    Some(groups)
}
