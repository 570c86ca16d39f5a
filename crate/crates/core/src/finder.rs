//! Three-phase Las Vegas search for a vertex that no plane of a cover
//! contains.
//!
//! The normal matrix is split by [`decompose_four_way`]; then
//!
//! * Phase I fixes `N3` so that every `K1` plane misses (`K1` rows vanish
//!   on `N1 ∪ N2`);
//! * Phase II fixes `N2` so that every `K2` plane misses (`K2` rows vanish
//!   on `N1`) and every `K4` plane keeps a residual larger than the `l1`
//!   norm of its `N1` block, which no `N1` completion can close;
//! * Phase III fixes `N1` against `K3`: a Bang sign vector gives a point
//!   `z` of the solid cube at distance at least `theta` from every
//!   normalized `K3` plane, rounding moves `z` to a near-vertex `w` with the
//!   same `K3` inner products, and the remaining fractional coordinates are
//!   sampled.
//!
//! Whatever the phases claim, a vertex is reported only after every plane
//! of the cover has been evaluated on it.

use std::collections::BTreeMap;

use num::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::bang::flip_ascent;
use crate::cube::{evaluate, Cover, Hyperplane, Vertex, DEFAULT_GUARD};
use crate::decomposition::{check_four_way, decompose_four_way, FourWayDecomposition};
use crate::error::Result;
use crate::params::ParamSet;
use crate::random::{self, stream_rng};
use crate::rat::{self, Rat};
use crate::rounding::{round_preserving, sample_rounding};
use crate::verifier::{uncovered_vertices, uncovered_vertices_guarded};

/// Phase I enumerates all assignments of the `K1` support up to this size.
pub const PHASE1_EXHAUSTIVE_LIMIT: usize = 20;

/// Retry attempts evaluated per parallel batch.
const BATCH: u64 = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Phase {
    I,
    II,
    III,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Found,
    PhaseFailure,
    PremiseFailure,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PartialVertex {
    pub n: usize,
    pub assigned: BTreeMap<usize, i8>,
    pub phase_tags: BTreeMap<usize, Phase>,
}

impl PartialVertex {
    pub fn new(n: usize) -> Self {
        PartialVertex {
            n,
            ..Default::default()
        }
    }

    /// Fixes `coords[t]` to `signs[t]`; every coordinate is fixed once.
    pub fn assign(&mut self, phase: Phase, coords: &[usize], signs: &[i8]) {
        assert_eq!(coords.len(), signs.len());
        for (&j, &s) in coords.iter().zip(signs) {
            assert!(j < self.n && (s == 1 || s == -1));
            assert!(self.assigned.insert(j, s).is_none(), "coordinate {j} assigned twice");
            self.phase_tags.insert(j, phase);
        }
    }

    /// `<x, v>` over the fixed coordinates only.
    pub fn partial_dot(&self, v: &[Rat]) -> Rat {
        self.assigned.iter().map(|(&j, &s)| signed(&v[j], s)).sum()
    }

    pub fn complete(&self) -> Option<Vertex> {
        if self.assigned.len() != self.n {
            return None;
        }
        Vertex::new(self.assigned.values().copied().collect()).ok()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    /// `|K1|, |K2|, |K3|, |K4|`.
    pub row_classes: [usize; 4],
    /// `|N1|, |N2|, |N3|`.
    pub column_classes: [usize; 3],
    pub decomposition_checked: bool,
    /// Size of the union of `K1` supports.
    pub phase1_support: usize,
    pub phase1_exhaustive: bool,
    /// Candidates examined per phase.
    pub attempts: [usize; 3],
    pub bang_flips: Option<usize>,
    pub theta: Option<f64>,
    pub z_linf: Option<f64>,
    /// Fractional coordinates left after rounding.
    pub n0: Option<usize>,
    /// Per `K3` row, `sum_j (1 - w_j^2) phi^2 v_j^2`.
    pub sigma_sq: Vec<f64>,
    pub failed_phase: Option<Phase>,
    pub reason: Option<String>,
    pub fallback_used: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FinderOutcome {
    pub status: Status,
    pub vertex: Option<Vertex>,
    /// `<x, v_i> - mu_i` for every plane; all non-zero when found.
    #[serde(with = "rat::serde_rat::vec")]
    pub certificate: Vec<Rat>,
    pub diagnostics: Diagnostics,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub status: Status,
    pub phase: Phase,
    pub reason: String,
}

pub type PhaseResult<T> = std::result::Result<T, Failure>;

fn signed(x: &Rat, s: i8) -> Rat {
    if s > 0 {
        x.clone()
    } else {
        -x.clone()
    }
}

fn signed_dot(v: &[Rat], coords: &[usize], signs: &[i8]) -> Rat {
    coords.iter().zip(signs).map(|(&j, &s)| signed(&v[j], s)).sum()
}

/// Lowest attempt index in `0..tries` for which `f` succeeds.
fn first_success<T: Send>(tries: usize, f: impl Fn(u64) -> Option<T> + Sync) -> Option<(u64, T)> {
    let tries = tries as u64;
    let mut start = 0;
    while start < tries {
        let end = (start + BATCH).min(tries);
        let hit = (start..end).into_par_iter().find_map_first(|a| f(a).map(|t| (a, t)));
        if hit.is_some() {
            return hit;
        }
        start = end;
    }
    None
}

fn fail(status: Status, phase: Phase, reason: String) -> Failure {
    Failure { status, phase, reason }
}

/// Fixes `N3` against the `K1` planes.
///
/// Only the union `U` of the `K1` supports matters; it is searched
/// exhaustively when `|U| <= PHASE1_EXHAUSTIVE_LIMIT` (lexicographically
/// first avoider) and sampled otherwise. `N3 \ U` is set to `+1`.
pub fn phase1(
    c: &Cover,
    d: &FourWayDecomposition,
    p: &ParamSet,
    diag: &mut Diagnostics,
) -> PhaseResult<PartialVertex> {
    let mut u = PartialVertex::new(c.n);
    let mut support: Vec<usize> = d
        .k1
        .iter()
        .flat_map(|&i| c.planes[i].support())
        .collect();
    support.sort_unstable();
    support.dedup();
    diag.phase1_support = support.len();
    if let Some(j) = support.iter().find(|j| d.n3.binary_search(j).is_err()) {
        return Err(fail(
            Status::PremiseFailure,
            Phase::I,
            format!("K1 support reaches column {j} outside N3"),
        ));
    }
    let signs = if d.k1.is_empty() {
        Vec::new()
    } else if support.len() <= PHASE1_EXHAUSTIVE_LIMIT {
        diag.phase1_exhaustive = true;
        let planes = d
            .k1
            .iter()
            .map(|&i| {
                let normal = support.iter().map(|&j| c.planes[i].normal[j].clone()).collect();
                Hyperplane::new(normal, c.planes[i].offset.clone())
            })
            .collect::<Result<Vec<_>>>()
            .expect("K1 rows are non-zero on their support");
        let sub = Cover::new(support.len(), planes).expect("sub-cover shapes agree");
        let found = uncovered_vertices_guarded(&sub, 1, PHASE1_EXHAUSTIVE_LIMIT).expect("within guard");
        match found.first() {
            Some(x) => {
                diag.attempts[0] = x.index() as usize + 1;
                x.signs().to_vec()
            }
            None => {
                diag.attempts[0] = 1 << support.len();
                return Err(fail(
                    Status::PremiseFailure,
                    Phase::I,
                    "the K1 planes cover every assignment of their support".into(),
                ));
            }
        }
    } else {
        let hit = first_success(p.max_tries, |a| {
            let s = random::signs(&mut stream_rng(p.seed, random::TAG_PHASE1, a), support.len());
            d.k1.iter()
                .all(|&i| signed_dot(&c.planes[i].normal, &support, &s) != c.planes[i].offset)
                .then_some(s)
        });
        match hit {
            Some((a, s)) => {
                diag.attempts[0] = a as usize + 1;
                s
            }
            None => {
                diag.attempts[0] = p.max_tries;
                return Err(fail(
                    Status::PhaseFailure,
                    Phase::I,
                    format!("no K1-avoiding assignment in {} samples", p.max_tries),
                ));
            }
        }
    };
    u.assign(Phase::I, &support, &signs);
    let rest: Vec<usize> = d.n3.iter().copied().filter(|j| support.binary_search(j).is_err()).collect();
    u.assign(Phase::I, &rest, &vec![1; rest.len()]);
    Ok(u)
}

/// Fixes `N2`: `K2` planes must miss, and every `K4` residual must exceed
/// the `l1` norm of the row on `N1`, the exact maximum of `|<x', v'>|`.
pub fn phase2(
    c: &Cover,
    d: &FourWayDecomposition,
    u1: &PartialVertex,
    p: &ParamSet,
    diag: &mut Diagnostics,
) -> PhaseResult<PartialVertex> {
    // residual before N2 is fixed: <u1, v> - mu
    let base = |i: usize| u1.partial_dot(&c.planes[i].normal) - &c.planes[i].offset;
    let k2: Vec<(usize, Rat)> = d.k2.iter().map(|&i| (i, base(i))).collect();
    let k4: Vec<(usize, Rat, Rat)> = d
        .k4
        .iter()
        .map(|&i| {
            let l1: Rat = d.n1.iter().map(|&j| c.planes[i].normal[j].abs()).sum();
            (i, base(i), l1)
        })
        .collect();
    let accept = |s: &[i8]| {
        k2.iter()
            .all(|(i, b)| !(signed_dot(&c.planes[*i].normal, &d.n2, s) + b).is_zero())
            && k4
                .iter()
                .all(|(i, b, l1)| (signed_dot(&c.planes[*i].normal, &d.n2, s) + b).abs() > *l1)
    };
    // with nothing to sample every draw is the same
    let tries = if d.n2.is_empty() { 1 } else { p.max_tries };
    let hit = first_success(tries, |a| {
        let s = random::signs(&mut stream_rng(p.seed, random::TAG_PHASE2, a), d.n2.len());
        accept(&s).then_some(s)
    });
    let Some((a, s)) = hit else {
        diag.attempts[1] = tries;
        return Err(fail(
            Status::PhaseFailure,
            Phase::II,
            format!("no N2 assignment satisfied K2 and K4 in {tries} draws"),
        ));
    };
    diag.attempts[1] = a as usize + 1;
    let mut u = u1.clone();
    u.assign(Phase::II, &d.n2, &s);
    Ok(u)
}

/// The Bang step on normalized rows `r_i`: a sign vector `eps` and
/// `z = theta * sum_i eps_i r_i`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BangPoint {
    pub epsilon: Vec<i8>,
    #[serde(with = "rat::serde_rat::vec")]
    pub z: Vec<Rat>,
    pub flips: usize,
}

pub fn bang_point(rows: &[Vec<Rat>], gamma: &[Rat], theta: &Rat) -> BangPoint {
    let dim = rows.first().map_or(0, Vec::len);
    let m: Vec<Vec<Rat>> = rows
        .iter()
        .map(|a| rows.iter().map(|b| rat::dot(a, b)).collect())
        .collect();
    let sol = flip_ascent(&m, gamma, theta, |_, _| {});
    let z = (0..dim)
        .map(|j| theta * rows.iter().zip(&sol.epsilon).map(|(r, &e)| signed(&r[j], e)).sum::<Rat>())
        .collect();
    BangPoint {
        epsilon: sol.epsilon,
        z,
        flips: sol.flips,
    }
}

/// `min_i |<r_i, z> - gamma_i|`; `None` without rows.
pub fn min_margin(rows: &[Vec<Rat>], gamma: &[Rat], z: &[Rat]) -> Option<Rat> {
    rows.iter().zip(gamma).map(|(r, g)| (rat::dot(r, z) - g).abs()).min()
}

/// Fixes `N1` against the `K3` planes.
pub fn phase3(
    c: &Cover,
    d: &FourWayDecomposition,
    u12: &PartialVertex,
    p: &ParamSet,
    diag: &mut Diagnostics,
) -> PhaseResult<PartialVertex> {
    let mut u = u12.clone();
    if d.k3.is_empty() {
        u.assign(Phase::III, &d.n1, &vec![1; d.n1.len()]);
        return Ok(u);
    }
    let blocks: Vec<Vec<Rat>> = d
        .k3
        .iter()
        .map(|&i| d.n1.iter().map(|&j| c.planes[i].normal[j].clone()).collect())
        .collect();
    // mu' = mu - <u~, v~>
    let targets: Vec<Rat> = d
        .k3
        .iter()
        .map(|&i| &c.planes[i].offset - u12.partial_dot(&c.planes[i].normal))
        .collect();
    let phi: Vec<&Rat> = d.k3.iter().map(|i| &d.normalizers.iter().find(|z| z.row == *i).expect("normalizer").phi).collect();
    let hat: Vec<Vec<Rat>> = blocks
        .iter()
        .zip(&phi)
        .map(|(b, f)| b.iter().map(|x| x * *f).collect())
        .collect();
    let gamma: Vec<Rat> = targets.iter().zip(&phi).map(|(t, f)| t * *f).collect();
    let theta = p.thresholds(c.n).theta;
    diag.theta = Some(rat::to_f64(&theta));

    let bp = bang_point(&hat, &gamma, &theta);
    diag.bang_flips = Some(bp.flips);
    let margin = min_margin(&hat, &gamma, &bp.z).expect("K3 is non-empty");
    assert!(margin >= theta, "Bang margin below theta");
    let z_linf = bp.z.iter().map(Signed::abs).max().unwrap_or_else(Rat::zero);
    diag.z_linf = Some(rat::to_f64(&z_linf));
    if z_linf > Rat::one() {
        return Err(fail(
            Status::PremiseFailure,
            Phase::III,
            format!("||z||_inf = {:.4} exceeds 1", rat::to_f64(&z_linf)),
        ));
    }

    let rounded = round_preserving(&blocks, &bp.z).expect("z lies in the cube");
    let w = rounded.w;
    diag.n0 = Some(rounded.fractional_coords.len());
    diag.sigma_sq = d
        .k3
        .iter()
        .zip(&blocks)
        .map(|(i, b)| {
            let phi_sq = &d.normalizers.iter().find(|z| z.row == *i).expect("normalizer").phi_sq;
            let s: Rat = b.iter().zip(&w).map(|(x, wj)| (Rat::one() - wj * wj) * x * x).sum();
            rat::to_f64(&(s * phi_sq))
        })
        .collect();

    let avoids = |x: &[i8]| {
        blocks
            .iter()
            .zip(&targets)
            .all(|(b, t)| b.iter().zip(x).map(|(v, &s)| signed(v, s)).sum::<Rat>() != *t)
    };
    let signs: Vec<i8> = if rounded.fractional_coords.is_empty() {
        let x: Vec<i8> = w.iter().map(|x| if x.is_positive() { 1 } else { -1 }).collect();
        assert!(avoids(&x), "rounded vertex lies on a K3 plane");
        x
    } else {
        let hit = first_success(p.max_tries, |a| {
            let x = sample_rounding(&w, p.seed, a).expect("w lies in the cube");
            avoids(x.signs()).then(|| x.signs().to_vec())
        });
        match hit {
            Some((a, x)) => {
                diag.attempts[2] = a as usize + 1;
                x
            }
            None => {
                diag.attempts[2] = p.max_tries;
                return Err(fail(
                    Status::PhaseFailure,
                    Phase::III,
                    format!("no sampled rounding avoided K3 in {} draws", p.max_tries),
                ));
            }
        }
    };
    u.assign(Phase::III, &d.n1, &signs);
    Ok(u)
}

fn run_phases(c: &Cover, p: &ParamSet, diag: &mut Diagnostics) -> PhaseResult<Vertex> {
    let d = match decompose_four_way(&c.normals(), p) {
        Ok(d) => d,
        Err(e) => return Err(fail(Status::PremiseFailure, Phase::I, e.to_string())),
    };
    diag.row_classes = [d.k1.len(), d.k2.len(), d.k3.len(), d.k4.len()];
    diag.column_classes = [d.n1.len(), d.n2.len(), d.n3.len()];
    let report = check_four_way(&c.normals(), &d, p);
    diag.decomposition_checked = report.passed;
    if !report.passed {
        let items = [
            ("partition", &report.partition),
            ("n1_size", &report.n1_size),
            ("item1", &report.item1),
            ("item2", &report.item2),
            ("item3", &report.item3),
            ("item4", &report.item4),
            ("item5", &report.item5),
        ];
        let failed: Vec<&str> = items.iter().filter(|(_, r)| !r.holds).map(|(name, _)| *name).collect();
        return Err(fail(
            Status::PremiseFailure,
            Phase::I,
            format!("decomposition fails {}", failed.join(", ")),
        ));
    }
    let u1 = phase1(c, &d, p, diag)?;
    let u2 = phase2(c, &d, &u1, p, diag)?;
    let u3 = phase3(c, &d, &u2, p, diag)?;
    Ok(u3.complete().expect("phases fix N1, N2 and N3"))
}

/// Every plane evaluated on `x`.
pub fn certificate(c: &Cover, x: &Vertex) -> Result<Vec<Rat>> {
    c.planes.iter().map(|h| evaluate(h, x)).collect()
}

/// Runs the three phases; with `fallback`, a failure is followed by an
/// exhaustive search when `n` is within the enumeration guard.
///
/// Errors only on invalid parameters; every other failure is an outcome.
pub fn find_uncovered(c: &Cover, p: &ParamSet, fallback: bool) -> Result<FinderOutcome> {
    p.validate()?;
    let mut diag = Diagnostics::default();
    let mut failure = match run_phases(c, p, &mut diag) {
        Ok(x) => {
            let cert = certificate(c, &x)?;
            if cert.iter().all(|e| !e.is_zero()) {
                return Ok(FinderOutcome {
                    status: Status::Found,
                    vertex: Some(x),
                    certificate: cert,
                    diagnostics: diag,
                });
            }
            fail(Status::PhaseFailure, Phase::III, "assembled vertex failed certification".into())
        }
        Err(f) => f,
    };
    if fallback && c.n <= DEFAULT_GUARD {
        match uncovered_vertices(c, 1)?.into_iter().next() {
            Some(x) => {
                diag.fallback_used = true;
                diag.failed_phase = Some(failure.phase);
                diag.reason = Some(failure.reason);
                let cert = certificate(c, &x)?;
                return Ok(FinderOutcome {
                    status: Status::Found,
                    vertex: Some(x),
                    certificate: cert,
                    diagnostics: diag,
                });
            }
            None => failure.reason.push_str("; exhaustive search: every vertex is covered"),
        }
    }
    diag.failed_phase = Some(failure.phase);
    diag.reason = Some(failure.reason);
    Ok(FinderOutcome {
        status: failure.status,
        vertex: None,
        certificate: Vec::new(),
        diagnostics: diag,
    })
}
