//! Constructive sign lemma for symmetric matrices with unit diagonal.
//!
//! For `F(eps) = theta * eps^T M eps - 2 <gamma, eps>`, flipping `eps_i`
//! changes `F` by `-4 eps_i (theta (M eps)_i - gamma_i) + 4 theta M_ii`.
//! At a single-flip local maximum every such change is `<= 0`, hence
//! `eps_i (theta (M eps)_i - gamma_i) >= theta M_ii` for all `i`, which is
//! the required `|theta (M eps)_i - gamma_i| >= theta` once `M_ii >= 1`.
//! All arithmetic is exact, so strict ascent terminates.

use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rat::{self, Rat};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance", into = "RawInstance")]
pub struct BangInstance {
    pub m: Vec<Vec<Rat>>,
    pub gamma: Vec<Rat>,
    pub theta: Rat,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    #[serde(with = "rat::serde_rat::matrix")]
    m: Vec<Vec<Rat>>,
    #[serde(with = "rat::serde_rat::vec")]
    gamma: Vec<Rat>,
    #[serde(with = "rat::serde_rat")]
    theta: Rat,
}

impl TryFrom<RawInstance> for BangInstance {
    type Error = Error;

    fn try_from(raw: RawInstance) -> Result<Self> {
        BangInstance::new(raw.m, raw.gamma, raw.theta)
    }
}

impl From<BangInstance> for RawInstance {
    fn from(b: BangInstance) -> Self {
        RawInstance {
            m: b.m,
            gamma: b.gamma,
            theta: b.theta,
        }
    }
}

impl BangInstance {
    pub fn new(m: Vec<Vec<Rat>>, gamma: Vec<Rat>, theta: Rat) -> Result<Self> {
        let k = gamma.len();
        if m.len() != k || m.iter().any(|row| row.len() != k) {
            return Err(Error::InvalidInput(format!("M must be {k} x {k}")));
        }
        for i in 0..k {
            if m[i][i] != rat::int(1) {
                return Err(Error::InvalidInput(format!("M[{i}][{i}] is not 1")));
            }
            for j in 0..i {
                if m[i][j] != m[j][i] {
                    return Err(Error::InvalidInput(format!("M is not symmetric at ({i}, {j})")));
                }
            }
        }
        if theta.is_negative() {
            return Err(Error::InvalidInput("theta must be non-negative".into()));
        }
        Ok(Self { m, gamma, theta })
    }

    pub fn k(&self) -> usize {
        self.gamma.len()
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BangSolution {
    pub epsilon: Vec<i8>,
    pub flips: usize,
}

/// `theta * eps^T M eps - 2 <gamma, eps>`.
pub fn objective(m: &[Vec<Rat>], gamma: &[Rat], theta: &Rat, eps: &[i8]) -> Rat {
    let me = mat_sign_product(m, eps);
    let quad: Rat = me.iter().zip(eps).map(|(x, &e)| signed(x, e)).sum();
    let lin: Rat = gamma.iter().zip(eps).map(|(g, &e)| signed(g, e)).sum();
    theta * quad - rat::int(2) * lin
}

fn signed(x: &Rat, s: i8) -> Rat {
    if s > 0 {
        x.clone()
    } else {
        -x.clone()
    }
}

fn mat_sign_product(m: &[Vec<Rat>], eps: &[i8]) -> Vec<Rat> {
    m.iter()
        .map(|row| row.iter().zip(eps).map(|(a, &e)| signed(a, e)).sum())
        .collect()
}

/// Strict single-flip ascent from all-ones, flipping the lowest-index
/// improving coordinate each step. `M` must be symmetric; the diagonal may
/// be arbitrary. `on_flip(i, delta)` sees every accepted flip.
pub fn flip_ascent(
    m: &[Vec<Rat>],
    gamma: &[Rat],
    theta: &Rat,
    mut on_flip: impl FnMut(usize, &Rat),
) -> BangSolution {
    let k = gamma.len();
    let mut eps = vec![1i8; k];
    let mut me: Vec<Rat> = m.iter().map(|row| row.iter().sum()).collect();
    // F strictly increases, so no state repeats
    let cap = if k < 63 { 1u64 << k } else { u64::MAX };
    let mut flips = 0usize;
    let four = rat::int(4);
    loop {
        let improving = (0..k).find_map(|i| {
            let slack = theta * &me[i] - &gamma[i];
            let delta = &four * (theta * &m[i][i] - signed(&slack, eps[i]));
            delta.is_positive().then_some((i, delta))
        });
        let Some((i, delta)) = improving else { break };
        on_flip(i, &delta);
        // M eps changes by -2 eps_i M[., i]
        for (r, row) in me.iter_mut().zip(m) {
            if !row[i].is_zero() {
                *r -= signed(&(&row[i] * rat::int(2)), eps[i]);
            }
        }
        eps[i] = -eps[i];
        flips += 1;
        assert!((flips as u64) < cap, "flip ascent exceeded 2^k flips");
    }
    BangSolution {
        epsilon: eps,
        flips,
    }
}

pub fn solve_bang(inst: &BangInstance) -> BangSolution {
    flip_ascent(&inst.m, &inst.gamma, &inst.theta, |_, _| {})
}

/// Whether `|theta (M eps)_i - gamma_i| >= theta` for every row.
pub fn verify_bang(inst: &BangInstance, eps: &[i8]) -> bool {
    eps.len() == inst.k()
        && eps.iter().all(|&e| e == 1 || e == -1)
        && mat_sign_product(&inst.m, eps)
            .iter()
            .zip(&inst.gamma)
            .all(|(me, g)| (&inst.theta * me - g).abs() >= inst.theta)
}
