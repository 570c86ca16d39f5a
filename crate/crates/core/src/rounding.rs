//! Rounding a point of the solid cube towards a vertex while preserving a
//! few inner products exactly, and the randomized final rounding.
//!
//! [`round_preserving`] walks inside `[-1, 1]^m`: while the constraint rows
//! restricted to the still-fractional coordinates have a non-trivial null
//! space, it moves along a null vector until some coordinate reaches `±1`
//! and freezes every coordinate that did. Each move keeps all inner
//! products and freezes at least one coordinate, so at most `m` moves
//! happen and at most `rank <= k'` coordinates stay fractional.

use num::{One, Signed, Zero};
use serde::Serialize;

use crate::cube::Vertex;
use crate::error::{Error, Result};
use crate::linalg;
use crate::random;
use crate::rat::{self, Rat};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundedPoint {
    #[serde(with = "rat::serde_rat::vec")]
    pub w: Vec<Rat>,
    /// Coordinates of `w` that are not `±1`.
    pub fractional_coords: Vec<usize>,
    pub moves: usize,
}

/// Deliberate defects used to show the contract checks have teeth.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Stop the walk one freezing move early.
    SkipFreeze,
    /// Step to the farthest saturation point instead of the nearest, so
    /// other coordinates leave `[-1, 1]`.
    SkipClamp,
}

fn is_sign(x: &Rat) -> bool {
    x.abs().is_one()
}

pub fn round_preserving(rows: &[Vec<Rat>], z: &[Rat]) -> Result<RoundedPoint> {
    round_with_fault(rows, z, None)
}

pub fn round_with_fault(rows: &[Vec<Rat>], z: &[Rat], fault: Option<Fault>) -> Result<RoundedPoint> {
    let m = z.len();
    if let Some(r) = rows.iter().find(|r| r.len() != m) {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: r.len(),
        });
    }
    if z.iter().any(|x| x.abs() > Rat::one()) {
        return Err(Error::InvalidInput("||z||_inf exceeds 1".into()));
    }
    let mut w = z.to_vec();
    let mut moves = 0;
    loop {
        let frac: Vec<usize> = (0..m).filter(|&j| !is_sign(&w[j])).collect();
        let restricted: Vec<Vec<Rat>> = rows
            .iter()
            .map(|r| frac.iter().map(|&j| r[j].clone()).collect())
            .collect();
        let Some(mut d) = linalg::null_vector(&restricted, frac.len()) else {
            break;
        };
        // leading entry positive, so the walk is reproducible
        if d.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
            d.iter_mut().for_each(|x| *x = -x.clone());
        }
        if fault == Some(Fault::SkipFreeze) && frac.len() <= rows.len() + 1 {
            break;
        }
        // step lengths at which each coordinate reaches the sign of its direction
        let steps = frac.iter().zip(&d).filter(|(_, dj)| !dj.is_zero()).map(|(&j, dj)| {
            let target = if dj.is_positive() { Rat::one() } else { -Rat::one() };
            (target - &w[j]) / dj
        });
        let t = if fault == Some(Fault::SkipClamp) {
            steps.max()
        } else {
            steps.min()
        }
        .expect("a non-zero null vector has a non-zero entry");
        for (&j, dj) in frac.iter().zip(&d) {
            w[j] += &t * dj;
        }
        moves += 1;
        if fault == Some(Fault::SkipClamp) {
            break;
        }
    }
    let fractional_coords = (0..m).filter(|&j| !is_sign(&w[j])).collect();
    Ok(RoundedPoint {
        w,
        fractional_coords,
        moves,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RoundingCheck {
    pub preserved: bool,
    pub bounded: bool,
    pub few_fractional: bool,
    /// `fractional_coords` lists exactly the non-sign coordinates.
    pub consistent: bool,
}

impl RoundingCheck {
    pub fn ok(&self) -> bool {
        self.preserved && self.bounded && self.few_fractional && self.consistent
    }
}

/// Re-evaluates the three rounding contracts from scratch.
pub fn check_rounding(rows: &[Vec<Rat>], z: &[Rat], p: &RoundedPoint) -> RoundingCheck {
    let preserved = p.w.len() == z.len()
        && rows
            .iter()
            .all(|r| r.iter().zip(&p.w).map(|(a, b)| a * b).sum::<Rat>() == r.iter().zip(z).map(|(a, b)| a * b).sum::<Rat>());
    let bounded = p.w.iter().all(|x| x.abs() <= Rat::one());
    let non_sign: Vec<usize> = p
        .w
        .iter()
        .enumerate()
        .filter(|(_, x)| x.abs() != Rat::one())
        .map(|(j, _)| j)
        .collect();
    RoundingCheck {
        preserved,
        bounded,
        few_fractional: non_sign.len() <= rows.len(),
        consistent: non_sign == p.fractional_coords,
    }
}

/// Independent coordinates with `P[x_j = +1] = (1 + w_j) / 2`, drawn from
/// stream `index` of the rounding tag (see [`crate::random`]).
pub fn sample_rounding(w: &[Rat], seed: u64, index: u64) -> Result<Vertex> {
    if w.iter().any(|x| x.abs() > Rat::one()) {
        return Err(Error::InvalidInput("||w||_inf exceeds 1".into()));
    }
    let mut rng = random::stream_rng(seed, random::TAG_ROUNDING, index);
    let half = rat::rat(1, 2);
    let signs = w
        .iter()
        .map(|x| {
            let p = (Rat::one() + x) * &half;
            if random::bernoulli(&mut rng, &p) {
                1
            } else {
                -1
            }
        })
        .collect();
    Vertex::new(signs)
}
