//! Exact anti-concentration computations on the cube.
//!
//! Distributions of `<x, v>` under product measures are computed by a
//! dynamic program over the distinct partial sums of `v` scaled to
//! integers, so every probability is an exact rational. The experiments
//! report empirical constants; none of them asserts a value for an
//! unspecified constant.

use std::collections::BTreeMap;

use num::{BigInt, One, Signed, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cube::{check_guard, CompiledCover, Cover, Hyperplane, Vertex};
use crate::decomposition::{find_scales, validate_scale_partition, ScalePartition};
use crate::error::{Error, Result};
use crate::random::{self, stream_rng};
use crate::rat::{self, Rat};

/// Largest number of distinct partial sums the distribution DP keeps.
pub const MAX_STATES: usize = 1 << 22;

/// Largest dimension for level-set enumeration.
pub const LEVEL_SET_GUARD: usize = 24;

/// Nonzero entries of the Littlewood-Offord sweep.
pub const LO_ENTRIES: [i64; 6] = [-3, -2, -1, 1, 2, 3];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProductMeasure {
    pub n: usize,
    /// `P[z_j = +1]`.
    #[serde(with = "rat::serde_rat::vec")]
    pub marginals: Vec<Rat>,
}

impl ProductMeasure {
    pub fn new(marginals: Vec<Rat>) -> Result<Self> {
        if let Some(p) = marginals.iter().find(|p| p.is_negative() || **p > Rat::one()) {
            return Err(Error::InvalidInput(format!("marginal {} is not in [0, 1]", rat::format_rat(p))));
        }
        Ok(Self {
            n: marginals.len(),
            marginals,
        })
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            n,
            marginals: vec![rat::rat(1, 2); n],
        }
    }

    /// `sum_j 4 p_j (1 - p_j)`, the variance of `sum_j z_j`.
    pub fn sigma_sq(&self) -> Rat {
        self.marginals
            .iter()
            .map(|p| rat::int(4) * p * (Rat::one() - p))
            .sum()
    }

    pub fn probability(&self, x: &Vertex) -> Rat {
        self.marginals
            .iter()
            .zip(x.signs())
            .map(|(p, &s)| if s == 1 { p.clone() } else { Rat::one() - p })
            .product()
    }

    /// Coordinates with marginal `0` or `1` are constant under the measure.
    pub fn frozen(&self) -> Vec<(usize, i8)> {
        self.marginals
            .iter()
            .enumerate()
            .filter_map(|(j, p)| {
                if p.is_zero() {
                    Some((j, -1))
                } else if p.is_one() {
                    Some((j, 1))
                } else {
                    None
                }
            })
            .collect()
    }
}

/// The instance `(v, a, P)` with frozen coordinates substituted: the
/// remaining coordinates, the shifted target and the restricted measure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReducedInstance {
    pub kept: Vec<usize>,
    #[serde(with = "rat::serde_rat::vec")]
    pub v: Vec<Rat>,
    #[serde(with = "rat::serde_rat")]
    pub a: Rat,
    pub measure: ProductMeasure,
}

pub fn reduce_frozen(v: &[Rat], a: &Rat, p: &ProductMeasure) -> Result<ReducedInstance> {
    check_dims(v, p)?;
    let frozen = p.frozen();
    let shift: Rat = frozen.iter().map(|&(j, s)| if s == 1 { v[j].clone() } else { -v[j].clone() }).sum();
    let kept: Vec<usize> = (0..p.n).filter(|j| frozen.iter().all(|(f, _)| f != j)).collect();
    Ok(ReducedInstance {
        v: kept.iter().map(|&j| v[j].clone()).collect(),
        a: a - shift,
        measure: ProductMeasure::new(kept.iter().map(|&j| p.marginals[j].clone()).collect())?,
        kept,
    })
}

fn check_dims(v: &[Rat], p: &ProductMeasure) -> Result<()> {
    if v.len() != p.n {
        return Err(Error::DimensionMismatch {
            expected: p.n,
            got: v.len(),
        });
    }
    Ok(())
}

/// The law of `<z, v>` for `z ~ P`, as `(value, probability)` pairs in
/// increasing value order with zero-probability values omitted.
pub fn sum_distribution(v: &[Rat], p: &ProductMeasure) -> Result<Vec<(Rat, Rat)>> {
    check_dims(v, p)?;
    let scale = rat::common_denominator(v);
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &scale).to_integer()).collect();
    let mut dist: BTreeMap<BigInt, Rat> = BTreeMap::from([(BigInt::zero(), Rat::one())]);
    for (a, q) in ints.iter().zip(&p.marginals) {
        let not_q = Rat::one() - q;
        let mut next: BTreeMap<BigInt, Rat> = BTreeMap::new();
        for (s, pr) in &dist {
            if q.is_positive() {
                *next.entry(s + a).or_insert_with(Rat::zero) += pr * q;
            }
            if not_q.is_positive() {
                *next.entry(s - a).or_insert_with(Rat::zero) += pr * &not_q;
            }
        }
        if next.len() > MAX_STATES {
            return Err(Error::InvalidInput(format!(
                "more than {MAX_STATES} distinct partial sums"
            )));
        }
        dist = next;
    }
    let scale = Rat::from_integer(scale);
    Ok(dist
        .into_iter()
        .map(|(s, pr)| (Rat::from_integer(s) / &scale, pr))
        .collect())
}

/// `P[<z, v> = a]`.
pub fn atom_probability(v: &[Rat], a: &Rat, p: &ProductMeasure) -> Result<Rat> {
    Ok(sum_distribution(v, p)?
        .into_iter()
        .find(|(s, _)| s == a)
        .map_or_else(Rat::zero, |(_, pr)| pr))
}

/// `P[|<z, v> - a| <= radius]`.
pub fn window_probability(v: &[Rat], a: &Rat, radius: &Rat, p: &ProductMeasure) -> Result<Rat> {
    Ok(sum_distribution(v, p)?
        .into_iter()
        .filter(|(s, _)| (s - a).abs() <= *radius)
        .map(|(_, pr)| pr)
        .sum())
}

/// Number of sign vectors `x` with `<x, v> = s`, for every achievable `s`
/// in increasing order. Requires `n < 64`.
pub fn uniform_counts(v: &[i64]) -> Vec<(i64, u64)> {
    assert!(v.len() < 64);
    let span: i64 = v.iter().map(|a| a.abs()).sum();
    let width = usize::try_from(2 * span + 1).expect("span fits");
    let mut counts = vec![0u64; width];
    counts[span as usize] = 1;
    let mut reach = 0i64;
    for &a in v {
        let a = a.abs();
        let mut next = vec![0u64; width];
        for s in -reach..=reach {
            let c = counts[(s + span) as usize];
            if c != 0 {
                next[(s + a + span) as usize] += c;
                next[(s - a + span) as usize] += c;
            }
        }
        counts = next;
        reach += a;
    }
    counts
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c != 0)
        .map(|(i, c)| (i as i64 - span, c))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LoCheck {
    #[serde(with = "rat::serde_rat")]
    pub probability: Rat,
    pub probability_f64: f64,
    /// `1 / sqrt(||v||_0)`.
    pub bound: f64,
    /// `probability^2 * ||v||_0 <= 1`, decided exactly.
    pub holds: bool,
}

/// `P[<x, v> = a] <= 1 / sqrt(||v||_0)` for uniform `x`.
pub fn lo_check(v: &[Rat], a: &Rat) -> Result<LoCheck> {
    let s = crate::cube::sparsity(v);
    if s == 0 {
        return Err(Error::InvalidInput("zero vector".into()));
    }
    let probability = atom_probability(v, a, &ProductMeasure::uniform(v.len()))?;
    Ok(LoCheck {
        probability_f64: rat::to_f64(&probability),
        bound: 1.0 / (s as f64).sqrt(),
        holds: &probability * &probability * rat::int(s as i64) <= Rat::one(),
        probability,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LoSweepReport {
    pub n: usize,
    /// Every vector in `LO_ENTRIES^n`, or one per multiset of magnitudes.
    pub exhaustive: bool,
    pub vectors: u64,
    /// `(vector, achievable a)` pairs checked.
    pub checks: u64,
    pub violations: u64,
    /// Largest `P[<x, v> = a] * sqrt(||v||_0)`.
    pub worst_ratio: f64,
    pub worst_vector: Vec<i64>,
}

fn lo_stats(v: &[i64]) -> (u64, u64, f64) {
    let n = v.len() as u32;
    let counts = uniform_counts(v);
    let total = 1u128 << (2 * n);
    let violations = counts
        .iter()
        .filter(|(_, c)| u128::from(*c) * u128::from(*c) * u128::from(n) > total)
        .count() as u64;
    let max = counts.iter().map(|&(_, c)| c).max().unwrap_or(0);
    let ratio = max as f64 / (1u64 << n) as f64 * f64::from(n).sqrt();
    (counts.len() as u64, violations, ratio)
}

/// Checks the Littlewood-Offord bound for every `v` with entries in
/// [`LO_ENTRIES`] of length `n` and every achievable `a`.
///
/// With `exhaustive = false` only non-decreasing magnitude vectors are
/// visited; the law of `<x, v>` is invariant under sign changes and
/// permutations of `v`, so the verdict is the same.
pub fn lo_sweep(n: usize, exhaustive: bool) -> LoSweepReport {
    assert!((1..=16).contains(&n));
    let vectors: Vec<Vec<i64>> = if exhaustive {
        Vec::new()
    } else {
        magnitude_multisets(n)
    };
    let total = if exhaustive { 6u64.pow(n as u32) } else { vectors.len() as u64 };
    let decode = |code: u64| -> Vec<i64> {
        if exhaustive {
            let mut c = code;
            (0..n)
                .map(|_| {
                    let e = LO_ENTRIES[(c % 6) as usize];
                    c /= 6;
                    e
                })
                .collect()
        } else {
            vectors[code as usize].clone()
        }
    };
    let (checks, violations, worst, worst_code) = (0..total)
        .into_par_iter()
        .map(|code| {
            let (c, bad, r) = lo_stats(&decode(code));
            (c, bad, r, code)
        })
        .reduce(
            || (0, 0, 0.0, 0),
            |a, b| {
                let (w, wc) = if b.2 > a.2 || (b.2 == a.2 && b.3 < a.3) { (b.2, b.3) } else { (a.2, a.3) };
                (a.0 + b.0, a.1 + b.1, w, wc)
            },
        );
    LoSweepReport {
        n,
        exhaustive,
        vectors: total,
        checks,
        violations,
        worst_ratio: worst,
        worst_vector: decode(worst_code),
    }
}

fn magnitude_multisets(n: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for ones in 0..=n {
        for twos in 0..=n - ones {
            let threes = n - ones - twos;
            let mut v = vec![1; ones];
            v.extend(std::iter::repeat_n(2, twos));
            v.extend(std::iter::repeat_n(3, threes));
            out.push(v);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelSetAntichain {
    /// `s_j = sign(v_j)`; the level set is taken for `v ⊙ s`.
    pub flip: Vec<i8>,
    #[serde(with = "rat::serde_rat::vec")]
    pub transformed: Vec<Rat>,
    #[serde(with = "rat::serde_rat")]
    pub mu: Rat,
    pub vertices: Vec<Vertex>,
    /// No two distinct members are coordinatewise comparable.
    pub certified: bool,
    /// A comparable pair when the certificate fails.
    pub witness: Option<(Vertex, Vertex)>,
}

/// `{x : <x, v ⊙ s> = mu}` for the sign vector `s` making `v ⊙ s` positive,
/// with an exhaustive pairwise incomparability check.
pub fn antichain_of_level_set(v: &[Rat], mu: &Rat) -> Result<LevelSetAntichain> {
    let n = v.len();
    check_guard(n, LEVEL_SET_GUARD)?;
    if v.iter().any(Zero::is_zero) {
        return Err(Error::InvalidInput("v must have full support".into()));
    }
    let flip: Vec<i8> = v.iter().map(rat::sign_of).collect();
    let transformed: Vec<Rat> = v.iter().map(Signed::abs).collect();
    let vertices: Vec<Vertex> = level_set(&transformed, mu)?
        .into_iter()
        .map(|i| Vertex::from_index(n, i))
        .collect();
    let witness = comparable_pair(&vertices.iter().map(Vertex::index).collect::<Vec<_>>())
        .map(|(a, b)| (Vertex::from_index(n, a), Vertex::from_index(n, b)));
    Ok(LevelSetAntichain {
        flip,
        transformed,
        mu: mu.clone(),
        vertices,
        certified: witness.is_none(),
        witness,
    })
}

/// Indices of the vertices on `<x, v> = mu`, in enumeration order.
pub fn level_set(v: &[Rat], mu: &Rat) -> Result<Vec<u64>> {
    let n = v.len();
    check_guard(n, LEVEL_SET_GUARD)?;
    let Ok(plane) = Hyperplane::new(v.to_vec(), mu.clone()) else {
        // zero normal: every vertex or none
        let all = mu.is_zero();
        return Ok(if all { (0..1u64 << n).collect() } else { Vec::new() });
    };
    let compiled = CompiledCover::new(&Cover::new(n, vec![plane])?);
    Ok(compiled
        .par_map_chunks(|cc, start, end| {
            let mut hits = Vec::new();
            cc.scan(start, end, |inc| {
                if inc.count > 0 {
                    hits.push(inc.index);
                }
            });
            hits
        })
        .concat())
}

/// A pair `(a, b)` with `a < b` coordinatewise; a vertex index has bit
/// `n - 1 - j` set when coordinate `j` is `+1`, so `a <= b` is `a ⊆ b`.
pub fn comparable_pair(indices: &[u64]) -> Option<(u64, u64)> {
    indices.par_iter().enumerate().find_map_first(|(t, &a)| {
        indices[t + 1..].iter().find_map(|&b| {
            if a & !b == 0 {
                Some((a, b))
            } else if b & !a == 0 {
                Some((b, a))
            } else {
                None
            }
        })
    })
}

/// The heaviest atom of `<z, v>` under `P`: `(value, probability)`, lowest
/// value on ties.
pub fn max_atom(v: &[Rat], p: &ProductMeasure) -> Result<(Rat, Rat)> {
    let dist = sum_distribution(v, p)?;
    let mut best = dist.first().cloned().expect("distribution is non-empty");
    for (s, pr) in dist {
        if pr > best.1 {
            best = (s, pr);
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MassTrial {
    #[serde(with = "rat::serde_rat::vec")]
    pub v: Vec<Rat>,
    #[serde(with = "rat::serde_rat")]
    pub mu: Rat,
    #[serde(with = "rat::serde_rat")]
    pub mass: Rat,
    pub mass_f64: f64,
    /// `mass * sigma_P`.
    pub c_estimate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AntichainMassReport {
    pub measure: ProductMeasure,
    #[serde(with = "rat::serde_rat")]
    pub sigma_sq: Rat,
    pub sigma: f64,
    pub trials: Vec<MassTrial>,
    pub max_c: f64,
}

fn require_spread(p: &ProductMeasure) -> Result<Rat> {
    let sigma_sq = p.sigma_sq();
    if sigma_sq.is_zero() {
        return Err(Error::InvalidInput("degenerate measure: sigma_P = 0".into()));
    }
    Ok(sigma_sq)
}

/// For random full-support integer `v` (entries in `±1..=±max_entry`), the
/// heaviest level-set antichain of `v` and its mass under `P`.
pub fn antichain_mass_experiment(
    p: &ProductMeasure,
    trials: usize,
    max_entry: i64,
    seed: u64,
) -> Result<AntichainMassReport> {
    let sigma_sq = require_spread(p)?;
    let sigma = rat::to_f64(&sigma_sq).sqrt();
    let trials = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(seed, random::TAG_EXPERIMENT, t);
            let v: Vec<Rat> = (0..p.n)
                .map(|_| {
                    let a = rng.gen_range(1..=max_entry);
                    rat::int(if rng.gen_bool(0.5) { a } else { -a })
                })
                .collect();
            let abs: Vec<Rat> = v.iter().map(Signed::abs).collect();
            let (mu, mass) = max_atom(&abs, p)?;
            let mass_f64 = rat::to_f64(&mass);
            Ok(MassTrial {
                v,
                mu,
                mass,
                mass_f64,
                c_estimate: mass_f64 * sigma,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_c = trials.iter().map(|t| t.c_estimate).fold(0.0, f64::max);
    Ok(AntichainMassReport {
        measure: p.clone(),
        sigma_sq,
        sigma,
        trials,
        max_c,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    #[serde(with = "rat::serde_rat")]
    pub marginal: Rat,
    pub sigma: f64,
    #[serde(with = "rat::serde_rat")]
    pub mass: Rat,
    pub mass_f64: f64,
    pub c_estimate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    #[serde(with = "rat::serde_rat::vec")]
    pub v: Vec<Rat>,
    pub points: Vec<SweepPoint>,
    pub max_c: f64,
    /// Point pairs where larger `sigma` comes with smaller mass, and pairs
    /// where it comes with larger mass.
    pub discordant_pairs: usize,
    pub concordant_pairs: usize,
    pub decreasing_in_aggregate: bool,
}

/// Heaviest level-set mass of `v` under the homogeneous measures with
/// every marginal equal to each of `marginals`.
pub fn marginal_sweep(v: &[Rat], marginals: &[Rat]) -> Result<SweepReport> {
    let points = marginals
        .par_iter()
        .map(|q| {
            let p = ProductMeasure::new(vec![q.clone(); v.len()])?;
            let sigma = rat::to_f64(&require_spread(&p)?).sqrt();
            let abs: Vec<Rat> = v.iter().map(Signed::abs).collect();
            let (_, mass) = max_atom(&abs, &p)?;
            let mass_f64 = rat::to_f64(&mass);
            Ok(SweepPoint {
                marginal: q.clone(),
                sigma,
                mass,
                mass_f64,
                c_estimate: mass_f64 * sigma,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (mut discordant, mut concordant) = (0, 0);
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            if a.sigma == b.sigma || a.mass == b.mass {
                continue;
            }
            if (a.sigma > b.sigma) == (a.mass < b.mass) {
                discordant += 1;
            } else {
                concordant += 1;
            }
        }
    }
    Ok(SweepReport {
        v: v.to_vec(),
        max_c: points.iter().map(|p| p.c_estimate).fold(0.0, f64::max),
        points,
        discordant_pairs: discordant,
        concordant_pairs: concordant,
        decreasing_in_aggregate: discordant >= concordant,
    })
}

/// Coordinates per generated scale.
pub const SCALE_GROUP: usize = 4;

/// A vector with exactly `s` scales of `SCALE_GROUP` coordinates each and
/// smallest scale between `delta` and `1.5 delta`.
///
/// Group `g` (largest first) has entries of magnitude
/// `delta / 2 * R^(s - 1 - g) * (1 + t / 16)` with `R = 2 c0` and random
/// `t` in `0..8`, so consecutive norms differ by at least `4 c0 / 3`.
pub fn scales_vector<R: Rng>(s: usize, c0: &Rat, delta: &Rat, rng: &mut R) -> Result<(Vec<Rat>, ScalePartition)> {
    if s == 0 {
        return Err(Error::InvalidInput("at least one scale".into()));
    }
    let ratio = rat::int(2) * c0;
    let mut v = Vec::with_capacity(s * SCALE_GROUP);
    for g in 0..s {
        let mut base = delta / rat::int(2);
        for _ in 0..s - 1 - g {
            base *= &ratio;
        }
        for _ in 0..SCALE_GROUP {
            let x = &base * (Rat::one() + rat::rat(rng.gen_range(0..8), 16));
            v.push(if rng.gen_bool(0.5) { x } else { -x });
        }
    }
    let groups: Vec<Vec<usize>> = (0..s).map(|g| (g * SCALE_GROUP..(g + 1) * SCALE_GROUP).collect()).collect();
    let part = ScalePartition::from_groups(&v, groups);
    let all: Vec<usize> = (0..v.len()).collect();
    validate_scale_partition(&v, &part, s, c0, &all, &[])
        .map_err(|e| Error::InvalidInput(format!("generator missed {s} scales: {e}")))?;
    if find_scales(&v, s, c0).is_none() {
        return Err(Error::InvalidInput(format!("detector rejects the {s}-scale vector")));
    }
    Ok((v, part))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalesFamily {
    pub scales: usize,
    pub dimension: usize,
    pub trials: usize,
    pub mean_probability: f64,
    pub max_probability: f64,
    pub mean_smallest_scale: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalesReport {
    #[serde(with = "rat::serde_rat")]
    pub c0: Rat,
    #[serde(with = "rat::serde_rat")]
    pub delta: Rat,
    #[serde(with = "rat::serde_rat")]
    pub b: Rat,
    pub families: Vec<ScalesFamily>,
    /// Mean window probability does not increase with the scale count.
    pub monotone: bool,
}

/// `P[|<x, v>| <= b delta]` under the uniform measure for generated
/// vectors with each scale count in `scale_counts` (ascending).
pub fn scales_decay_experiment(
    scale_counts: &[usize],
    c0: &Rat,
    delta: &Rat,
    b: &Rat,
    trials: usize,
    seed: u64,
) -> Result<ScalesReport> {
    let radius = b * delta;
    let families = scale_counts
        .iter()
        .map(|&s| {
            let runs = (0..trials as u64)
                .into_par_iter()
                .map(|t| {
                    let mut rng = stream_rng(seed, random::TAG_EXPERIMENT, (s as u64) << 20 | t);
                    let (v, part) = scales_vector(s, c0, delta, &mut rng)?;
                    let pr = window_probability(&v, &Rat::zero(), &radius, &ProductMeasure::uniform(v.len()))?;
                    Ok((rat::to_f64(&pr), part.smallest_scale))
                })
                .collect::<Result<Vec<_>>>()?;
            let count = runs.len().max(1) as f64;
            Ok(ScalesFamily {
                scales: s,
                dimension: s * SCALE_GROUP,
                trials,
                mean_probability: runs.iter().map(|r| r.0).sum::<f64>() / count,
                max_probability: runs.iter().map(|r| r.0).fold(0.0, f64::max),
                mean_smallest_scale: runs.iter().map(|r| r.1).sum::<f64>() / count,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let monotone = families
        .windows(2)
        .all(|w| w[1].mean_probability <= w[0].mean_probability);
    Ok(ScalesReport {
        c0: c0.clone(),
        delta: delta.clone(),
        b: b.clone(),
        families,
        monotone,
    })
}
