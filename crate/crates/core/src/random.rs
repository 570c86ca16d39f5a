//! Seeded randomness.
//!
//! Every random draw comes from ChaCha8 seeded with `seed_from_u64(seed)`
//! and switched to a numbered stream with `set_stream`. Streams are
//! `(tag << 32) | attempt`, where `tag` names the consumer (see the `TAG_`
//! constants) and `attempt` is the retry or trial index. Parallel workers
//! therefore never share a stream and results do not depend on scheduling.

use num::{Signed, Zero};
use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::rat::{self, Rat};

pub const TAG_PHASE1: u64 = 1;
pub const TAG_PHASE2: u64 = 2;
pub const TAG_PHASE3: u64 = 3;
pub const TAG_ROUNDING: u64 = 4;
pub const TAG_EXPERIMENT: u64 = 5;

pub fn stream_rng(seed: u64, tag: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tag << 32 | (index & 0xffff_ffff));
    rng
}

/// One draw of a Bernoulli variable with exact rational success
/// probability `p` in `[0, 1]`.
///
/// Compares a uniform binary expansion `U = 0.b1 b2 ...` with `p` digit by
/// digit and returns `U < p`; two random bits are consumed on average.
pub fn bernoulli<R: RngCore>(rng: &mut R, p: &Rat) -> bool {
    if !p.is_positive() {
        return false;
    }
    if *p >= rat::int(1) {
        return true;
    }
    let one = rat::int(1);
    let mut r = p.clone();
    let mut word = 0u64;
    let mut left = 0u32;
    loop {
        if r.is_zero() {
            return false;
        }
        if left == 0 {
            word = rng.next_u64();
            left = 64;
        }
        let bit = word & 1;
        word >>= 1;
        left -= 1;
        r *= rat::int(2);
        let digit = u64::from(r >= one);
        if digit == 1 {
            r -= &one;
        }
        if bit != digit {
            return bit < digit;
        }
    }
}

/// A uniform sign vector of length `len`.
pub fn signs<R: RngCore>(rng: &mut R, len: usize) -> Vec<i8> {
    let mut out = Vec::with_capacity(len);
    while out.len() < len {
        let mut word = rng.next_u64();
        for _ in 0..64.min(len - out.len()) {
            out.push(if word & 1 == 1 { 1 } else { -1 });
            word >>= 1;
        }
    }
    out
}
