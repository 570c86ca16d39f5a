//! Known covers, closed-form bounds on `e(n)`, and an exact search for the
//! minimum essential cover size at tiny `n`.
//!
//! The search works over *flats*: sets of cube vertices of the form
//! `H ∩ {-1,+1}^n` for a hyperplane `H`. Conditions (E1) and (E3) only
//! depend on these vertex sets; (E2) depends on the normal, and a flat of
//! affine codimension above one admits a whole space of normals, from
//! which we take a generic combination with the largest possible support.
//! Maximal flats are the coplanar atoms.

use num::{BigInt, Integer, One, Signed, Zero};
use serde::Serialize;

use crate::cube::{Cover, Hyperplane, Vertex};
use crate::error::{Error, Result};
use crate::linalg;
use crate::params::ParamSet;
use crate::rat::{self, Rat};

/// Largest `n` for which flats and atoms are enumerated.
pub const MAX_ATOM_DIM: usize = 4;

/// Default node budget for [`minimum_essential_cover_size`].
pub const DEFAULT_SEARCH_BUDGET: u64 = 200_000_000;

/// The two parallel planes `z_1 = 1` and `z_1 = -1`.
pub fn degenerate_cover(n: usize) -> Cover {
    assert!(n >= 1);
    let mut e1 = vec![Rat::zero(); n];
    e1[0] = Rat::one();
    Cover::new(
        n,
        vec![
            Hyperplane::new(e1.clone(), rat::int(1)).expect("non-zero normal"),
            Hyperplane::new(e1, rat::int(-1)).expect("non-zero normal"),
        ],
    )
    .expect("well-formed")
}

/// An essential cover of size `n` for every `n >= 2`.
///
/// Planes `z_j = z_{j+1}` for `j < n` cover every vertex except the two
/// alternating ones `±a`, `a = (+1, -1, +1, ...)`. The last plane passes
/// through both: its normal is `w_j = b_j a_j` with
/// `b = (-(n-1), 1, 1, ..., 1)`, so `<w, a> = sum(b) = 0`. The vertex that
/// agrees with `a` up to position `j` and with `-a` afterwards lies on
/// plane `j` only, because `<w, .>` there equals `-2 (n - j) != 0`.
pub fn chain_cover(n: usize) -> Cover {
    assert!(n >= 2, "chain cover needs n >= 2");
    let mut planes = Vec::with_capacity(n);
    for j in 0..n - 1 {
        let mut v = vec![Rat::zero(); n];
        v[j] = Rat::one();
        v[j + 1] = -Rat::one();
        planes.push(Hyperplane::new(v, Rat::zero()).expect("non-zero normal"));
    }
    let w: Vec<Rat> = (0..n)
        .map(|j| {
            let b = if j == 0 { -(n as i64 - 1) } else { 1 };
            let a = if j % 2 == 0 { 1 } else { -1 };
            rat::int(a * b)
        })
        .collect();
    planes.push(Hyperplane::new(w, Rat::zero()).expect("non-zero normal"));
    Cover::new(n, planes).expect("well-formed")
}

/// `(sqrt(4n + 1) + 1) / 2`, a certified lower bound on `e(n)`.
pub fn lr_lower_bound(n: usize) -> f64 {
    assert!(n >= 1);
    0.5 * ((4.0 * n as f64 + 1.0).sqrt() + 1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticBound {
    pub value: f64,
    /// Set when the value only describes growth for large `n` and is not a
    /// certified bound at this particular `n`.
    pub asymptotic: bool,
}

/// `n^alpha / divisor`: the order of growth of the improved lower bound.
/// Never a certified bound for a concrete `n`.
pub fn yy_lower_bound(n: usize, p: &ParamSet) -> AsymptoticBound {
    assert!(n >= 1);
    AsymptoticBound {
        value: (n as f64).powf(p.alpha) / p.divisor,
        asymptotic: true,
    }
}

/// `ceil(n/2)`, the known upper bound, which at small `n` falls below the
/// certified lower bound and is therefore flagged asymptotic. No matching
/// construction is provided.
pub fn upper_bound(n: usize) -> AsymptoticBound {
    AsymptoticBound {
        value: n.div_ceil(2) as f64,
        asymptotic: true,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoplanarAtom {
    pub vertex_set: Vec<Vertex>,
    pub affine_dim: usize,
    #[serde(with = "rat::serde_rat::matrix")]
    pub normal_space_basis: Vec<Vec<Rat>>,
}

/// A flat together with the hyperplane chosen to realize it.
#[derive(Clone, Debug)]
pub struct Flat {
    /// Bit `i` set when vertex index `i` belongs to the flat.
    pub mask: u32,
    pub affine_dim: usize,
    pub normal_space_basis: Vec<Vec<Rat>>,
    pub plane: Hyperplane,
    /// Bit `j` set when the chosen normal is non-zero at coordinate `j`.
    pub support: u32,
}

fn vertex_coords(n: usize, idx: u64) -> Vec<Rat> {
    Vertex::from_index(n, idx)
        .signs()
        .iter()
        .map(|&s| rat::int(s as i64))
        .collect()
}

fn check_atom_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_ATOM_DIM {
        return Err(Error::InvalidInput(format!(
            "flat enumeration supports 1 <= n <= {MAX_ATOM_DIM}, got {n}"
        )));
    }
    Ok(())
}

/// Every non-empty flat of the `n`-cube, `n <= 4`, sorted by size
/// (descending) then mask.
pub fn enumerate_flats(n: usize) -> Result<Vec<Flat>> {
    check_atom_dim(n)?;
    let nv = 1usize << n;
    let coords: Vec<Vec<Rat>> = (0..nv as u64).map(|i| vertex_coords(n, i)).collect();
    let mut seen = std::collections::BTreeMap::new();
    // affinely independent subsets of size 1..=n generate every flat
    let mut stack: Vec<Vec<usize>> = (0..nv).map(|i| vec![i]).collect();
    while let Some(subset) = stack.pop() {
        let base = &coords[subset[0]];
        let diffs: Vec<Vec<Rat>> = subset[1..]
            .iter()
            .map(|&i| coords[i].iter().zip(base).map(|(a, b)| a - b).collect())
            .collect();
        if linalg::rank(&diffs) != subset.len() - 1 {
            continue;
        }
        let basis = linalg::null_space(&diffs, n);
        let mask = (0..nv)
            .filter(|&x| {
                basis.iter().all(|b| {
                    let diff: Vec<Rat> = coords[x].iter().zip(base).map(|(a, c)| a - c).collect();
                    rat::dot(b, &diff).is_zero()
                })
            })
            .fold(0u32, |m, x| m | 1 << x);
        seen.entry(mask).or_insert_with(|| (subset.len() - 1, basis));
        if subset.len() < n {
            let last = *subset.last().expect("non-empty");
            for next in last + 1..nv {
                let mut s = subset.clone();
                s.push(next);
                stack.push(s);
            }
        }
    }
    let mut flats: Vec<Flat> = seen
        .into_iter()
        .map(|(mask, (dim, basis))| {
            let plane = generic_plane(n, mask, &basis, &coords);
            let support = plane
                .normal
                .iter()
                .enumerate()
                .filter(|(_, a)| !a.is_zero())
                .fold(0u32, |m, (j, _)| m | 1 << j);
            Flat {
                mask,
                affine_dim: dim,
                normal_space_basis: basis,
                plane,
                support,
            }
        })
        .collect();
    flats.sort_by_key(|f| (std::cmp::Reverse(f.mask.count_ones()), f.mask));
    Ok(flats)
}

/// Hyperplane whose cube intersection is exactly `mask` and whose normal
/// has the largest support the normal space allows.
fn generic_plane(n: usize, mask: u32, basis: &[Vec<Rat>], coords: &[Vec<Rat>]) -> Hyperplane {
    let target_support: Vec<bool> = (0..n)
        .map(|j| basis.iter().any(|b| !b[j].is_zero()))
        .collect();
    let base = &coords[mask.trailing_zeros() as usize];
    let candidates = std::iter::once(1i64).chain(2..200);
    for t in candidates {
        let mut normal = vec![Rat::zero(); n];
        let mut weight = Rat::one();
        for b in basis {
            for (x, y) in normal.iter_mut().zip(b) {
                *x += &weight * y;
            }
            weight *= rat::int(t);
        }
        let support_ok = normal
            .iter()
            .zip(&target_support)
            .all(|(a, &want)| a.is_zero() != want);
        if !support_ok {
            continue;
        }
        let normal = primitive(&normal);
        let offset = rat::dot(&normal, base);
        let hits = coords
            .iter()
            .enumerate()
            .filter(|(_, x)| rat::dot(&normal, x) == offset)
            .fold(0u32, |m, (i, _)| m | 1 << i);
        if hits == mask {
            return Hyperplane::new(normal, offset).expect("non-zero normal");
        }
    }
    unreachable!("a generic normal exists among the first candidates")
}

/// Scales a rational vector to coprime integers with a positive leading entry.
fn primitive(v: &[Rat]) -> Vec<Rat> {
    let l = rat::common_denominator(v);
    let ints: Vec<BigInt> = v.iter().map(|a| (a * &l).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    let lead_negative = ints.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    let g = if lead_negative { -g } else { g };
    ints.into_iter().map(|x| Rat::from_integer(x / &g)).collect()
}

/// Maximal coplanar vertex sets of the `n`-cube, `n <= 4`.
pub fn enumerate_coplanar_atoms(n: usize) -> Result<Vec<CoplanarAtom>> {
    Ok(enumerate_flats(n)?
        .into_iter()
        .filter(|f| f.affine_dim + 1 == n)
        .map(|f| CoplanarAtom {
            vertex_set: (0..1u64 << n)
                .filter(|&i| f.mask >> i & 1 == 1)
                .map(|i| Vertex::from_index(n, i))
                .collect(),
            affine_dim: f.affine_dim,
            normal_space_basis: f.normal_space_basis,
        })
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleResult {
    pub e: usize,
    pub witness_cover: Cover,
    pub nodes: u64,
}

/// Exact `e(n)` for `n <= 4` by iterative-deepening set-cover search.
pub fn minimum_essential_cover_size(n: usize) -> Result<OracleResult> {
    minimum_essential_cover_size_with_budget(n, DEFAULT_SEARCH_BUDGET)
}

pub fn minimum_essential_cover_size_with_budget(n: usize, budget: u64) -> Result<OracleResult> {
    let flats = enumerate_flats(n)?;
    let nv = 1usize << n;
    let mut by_vertex = vec![Vec::new(); nv];
    for (i, f) in flats.iter().enumerate() {
        for (x, list) in by_vertex.iter_mut().enumerate() {
            if f.mask >> x & 1 == 1 {
                list.push(i);
            }
        }
    }
    let mut search = CoverSearch {
        flats: &flats,
        by_vertex,
        full: if nv == 32 { u32::MAX } else { (1u32 << nv) - 1 },
        all_vars: (1u32 << n) - 1,
        max_size: flats.iter().map(|f| f.mask.count_ones()).max().unwrap_or(1),
        budget,
        nodes: 0,
    };
    for limit in 1..=nv {
        let mut chosen = Vec::with_capacity(limit);
        if search.dfs(&mut chosen, 0, limit)? {
            let planes = chosen.iter().map(|&i| flats[i].plane.clone()).collect();
            return Ok(OracleResult {
                e: limit,
                witness_cover: Cover::new(n, planes)?,
                nodes: search.nodes,
            });
        }
    }
    unreachable!("the singleton flats always give an essential cover")
}

struct CoverSearch<'a> {
    flats: &'a [Flat],
    by_vertex: Vec<Vec<usize>>,
    full: u32,
    all_vars: u32,
    max_size: u32,
    budget: u64,
    nodes: u64,
}

impl CoverSearch<'_> {
    /// Every chosen flat still owns a vertex no other chosen flat covers.
    fn all_private(&self, chosen: &[usize]) -> bool {
        chosen.iter().enumerate().all(|(a, &i)| {
            let others = chosen
                .iter()
                .enumerate()
                .filter(|&(b, _)| b != a)
                .fold(0u32, |m, (_, &j)| m | self.flats[j].mask);
            self.flats[i].mask & !others != 0
        })
    }

    fn dfs(&mut self, chosen: &mut Vec<usize>, covered: u32, limit: usize) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded {
                budget: self.budget,
            });
        }
        if covered == self.full {
            let vars = chosen.iter().fold(0u32, |m, &i| m | self.flats[i].support);
            return Ok(vars == self.all_vars);
        }
        let slots = (limit - chosen.len()) as u32;
        if (self.full & !covered).count_ones() > slots * self.max_size {
            return Ok(false);
        }
        let v = (!covered).trailing_zeros() as usize;
        for idx in 0..self.by_vertex[v].len() {
            let f = self.by_vertex[v][idx];
            chosen.push(f);
            if self.all_private(chosen) && self.dfs(chosen, covered | self.flats[f].mask, limit)? {
                return Ok(true);
            }
            chosen.pop();
        }
        Ok(false)
    }
}
