//! Hypercube vertices, hyperplanes, covers, and exhaustive enumeration.
//!
//! Vertices are enumerated in lexicographic order over sign patterns with
//! `-1 < +1`: vertex index `i` of the `n`-cube has coordinate `j` equal to
//! `+1` exactly when bit `n - 1 - j` of `i` is set. Index 0 is the all
//! `-1` vertex, index `2^n - 1` the all `+1` vertex. Index ranges are the
//! unit of parallel work.

use std::ops::{AddAssign, SubAssign};
use std::path::Path;

use num::{BigInt, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rat::{self, serde_rat, Rat};

/// Largest dimension enumerated unless a caller raises it explicitly.
pub const DEFAULT_GUARD: usize = 30;

/// Vertices per parallel work unit.
const CHUNK: u64 = 1 << 14;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct Vertex {
    signs: Vec<i8>,
}

impl Vertex {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if let Some(bad) = signs.iter().find(|s| s.abs() != 1) {
            return Err(Error::InvalidInput(format!("vertex entry {bad} is not +1/-1")));
        }
        Ok(Self { signs })
    }

    pub fn from_index(n: usize, index: u64) -> Self {
        let signs = (0..n)
            .map(|j| if index >> (n - 1 - j) & 1 == 1 { 1 } else { -1 })
            .collect();
        Self { signs }
    }

    /// Position of this vertex in the enumeration order; requires `n <= 64`.
    pub fn index(&self) -> u64 {
        self.signs
            .iter()
            .fold(0u64, |acc, &s| (acc << 1) | u64::from(s == 1))
    }

    pub fn n(&self) -> usize {
        self.signs.len()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn get(&self, j: usize) -> i8 {
        self.signs[j]
    }

    /// Coordinatewise partial order on the cube: `self <= other`.
    pub fn le(&self, other: &Vertex) -> bool {
        self.signs.iter().zip(&other.signs).all(|(a, b)| a <= b)
    }
}

impl TryFrom<Vec<i8>> for Vertex {
    type Error = Error;

    fn try_from(signs: Vec<i8>) -> Result<Self> {
        Vertex::new(signs)
    }
}

impl From<Vertex> for Vec<i8> {
    fn from(v: Vertex) -> Self {
        v.signs
    }
}

/// `{ z : <z, normal> = offset }`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPlane")]
pub struct Hyperplane {
    #[serde(with = "serde_rat::vec")]
    pub normal: Vec<Rat>,
    #[serde(with = "serde_rat")]
    pub offset: Rat,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlane {
    #[serde(with = "serde_rat::vec")]
    normal: Vec<Rat>,
    #[serde(with = "serde_rat")]
    offset: Rat,
}

impl TryFrom<RawPlane> for Hyperplane {
    type Error = Error;

    fn try_from(raw: RawPlane) -> Result<Self> {
        Hyperplane::new(raw.normal, raw.offset)
    }
}

impl Hyperplane {
    pub fn new(normal: Vec<Rat>, offset: Rat) -> Result<Self> {
        if normal.iter().all(Zero::is_zero) {
            return Err(Error::InvalidInput("hyperplane normal is zero".into()));
        }
        Ok(Self { normal, offset })
    }

    /// Convenience constructor from integer coefficients.
    pub fn from_ints(normal: &[i64], offset: i64) -> Result<Self> {
        Self::new(normal.iter().map(|&a| rat::int(a)).collect(), rat::int(offset))
    }

    pub fn n(&self) -> usize {
        self.normal.len()
    }

    pub fn support(&self) -> Vec<usize> {
        self.normal
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(j, _)| j)
            .collect()
    }

    /// The plane with normal and offset multiplied by a non-zero scalar.
    pub fn scaled(&self, c: &Rat) -> Self {
        assert!(!c.is_zero());
        Self {
            normal: self.normal.iter().map(|a| a * c).collect(),
            offset: &self.offset * c,
        }
    }
}

/// `<x, v> - mu`; zero exactly when `x` lies on `h`.
pub fn evaluate(h: &Hyperplane, x: &Vertex) -> Result<Rat> {
    if h.n() != x.n() {
        return Err(Error::DimensionMismatch {
            expected: h.n(),
            got: x.n(),
        });
    }
    let mut acc = -h.offset.clone();
    for (a, &s) in h.normal.iter().zip(x.signs()) {
        if s == 1 {
            acc += a;
        } else {
            acc -= a;
        }
    }
    Ok(acc)
}

/// Number of non-zero entries.
pub fn sparsity(v: &[Rat]) -> usize {
    v.iter().filter(|a| !a.is_zero()).count()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cover {
    pub n: usize,
    pub planes: Vec<Hyperplane>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCover {
    n: usize,
    planes: Vec<Hyperplane>,
}

impl<'de> Deserialize<'de> for Cover {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawCover::deserialize(d)?;
        Cover::new(raw.n, raw.planes).map_err(serde::de::Error::custom)
    }
}

impl Cover {
    pub fn new(n: usize, planes: Vec<Hyperplane>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        if planes.is_empty() {
            return Err(Error::InvalidInput("a cover needs at least one plane".into()));
        }
        if let Some(p) = planes.iter().find(|p| p.n() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: p.n(),
            });
        }
        Ok(Self { n, planes })
    }

    pub fn k(&self) -> usize {
        self.planes.len()
    }

    /// The `k x n` matrix of normals.
    pub fn normals(&self) -> Vec<Vec<Rat>> {
        self.planes.iter().map(|p| p.normal.clone()).collect()
    }

    pub fn offsets(&self) -> Vec<Rat> {
        self.planes.iter().map(|p| p.offset.clone()).collect()
    }

    pub fn without_plane(&self, i: usize) -> Result<Self> {
        let mut planes = self.planes.clone();
        planes.remove(i);
        Cover::new(self.n, planes)
    }

    /// True when no plane evaluates to zero on `x`.
    pub fn avoids(&self, x: &Vertex) -> Result<bool> {
        for p in &self.planes {
            if evaluate(p, x)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("cover serializes")
    }
}

pub fn check_guard(n: usize, guard: usize) -> Result<()> {
    if n > guard || n >= 64 {
        return Err(Error::GuardExceeded { n, guard });
    }
    Ok(())
}

/// All `2^n` vertices in lexicographic order.
pub fn enumerate_cube(n: usize, guard: usize) -> Result<CubeIter> {
    check_guard(n, guard)?;
    Ok(CubeIter::range(n, 0, 1u64 << n))
}

/// Iterator over a contiguous range of vertex indices.
#[derive(Clone, Debug)]
pub struct CubeIter {
    n: usize,
    next: u64,
    end: u64,
}

impl CubeIter {
    pub fn range(n: usize, start: u64, end: u64) -> Self {
        assert!(n < 64 && end <= 1u64 << n && start <= end);
        Self { n, next: start, end }
    }
}

impl Iterator for CubeIter {
    type Item = Vertex;

    fn next(&mut self) -> Option<Vertex> {
        if self.next >= self.end {
            return None;
        }
        let v = Vertex::from_index(self.n, self.next);
        self.next += 1;
        Some(v)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for CubeIter {}

/// Splits `[0, total)` into consecutive index ranges for parallel scans.
pub fn index_chunks(total: u64) -> Vec<(u64, u64)> {
    (0..total.div_ceil(CHUNK))
        .map(|c| (c * CHUNK, ((c + 1) * CHUNK).min(total)))
        .collect()
}

/// Per-vertex incidence summary produced by [`CompiledCover::scan`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Incidence {
    pub index: u64,
    /// Number of planes containing the vertex.
    pub count: u32,
    /// Sum of the indices of the containing planes; equals the unique
    /// plane when `count == 1`.
    pub plane_sum: u64,
}

/// A cover scaled to integer coefficients for fast incremental scans.
#[derive(Clone, Debug)]
pub struct CompiledCover {
    n: usize,
    k: usize,
    repr: Repr,
}

#[derive(Clone, Debug)]
enum Repr {
    Small(Columns<i128>),
    Big(Columns<BigInt>),
}

/// Column-major integer form: for each coordinate, the planes that mention
/// it with the coefficient `a` and its double `2a` (the change in value
/// when that coordinate flips).
#[derive(Clone, Debug)]
struct Columns<T> {
    cols: Vec<Vec<(usize, T, T)>>,
    offsets: Vec<T>,
}

impl CompiledCover {
    pub fn new(c: &Cover) -> Self {
        let scaled: Vec<(Vec<BigInt>, BigInt)> = c
            .planes
            .iter()
            .map(|p| {
                let l = rat::common_denominator(p.normal.iter().chain([&p.offset]));
                let coeffs = p.normal.iter().map(|a| (a * &l).to_integer()).collect();
                (coeffs, (&p.offset * &l).to_integer())
            })
            .collect();
        let bound = BigInt::from(1u128 << 120);
        let fits = scaled.iter().all(|(a, b)| {
            a.iter().map(|x| x.abs()).sum::<BigInt>() + b.abs() < bound
        });
        let repr = if fits {
            Repr::Small(Columns::build(c.n, &scaled, |x| x.to_i128().expect("fits")))
        } else {
            Repr::Big(Columns::build(c.n, &scaled, Clone::clone))
        };
        Self {
            n: c.n,
            k: c.k(),
            repr,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Visits every vertex index in `[start, end)` in order.
    pub fn scan(&self, start: u64, end: u64, f: impl FnMut(Incidence)) {
        match &self.repr {
            Repr::Small(c) => c.scan(self.n, start, end, f),
            Repr::Big(c) => c.scan(self.n, start, end, f),
        }
    }

    /// Runs `per_chunk` over consecutive index ranges in parallel and
    /// returns the partial results in index order.
    pub fn par_map_chunks<R: Send>(
        &self,
        per_chunk: impl Fn(&Self, u64, u64) -> R + Sync,
    ) -> Vec<R> {
        index_chunks(1u64 << self.n)
            .into_par_iter()
            .map(|(s, e)| per_chunk(self, s, e))
            .collect()
    }
}

impl<T> Columns<T>
where
    T: Clone + Zero + for<'a> AddAssign<&'a T> + for<'a> SubAssign<&'a T>,
{
    fn build(n: usize, scaled: &[(Vec<BigInt>, BigInt)], conv: impl Fn(&BigInt) -> T) -> Self {
        let mut cols = vec![Vec::new(); n];
        for (p, (coeffs, _)) in scaled.iter().enumerate() {
            for (j, a) in coeffs.iter().enumerate() {
                if !a.is_zero() {
                    cols[j].push((p, conv(a), conv(&(a * 2))));
                }
            }
        }
        let offsets = scaled.iter().map(|(_, b)| conv(b)).collect();
        Self { cols, offsets }
    }

    fn scan(&self, n: usize, start: u64, end: u64, mut f: impl FnMut(Incidence)) {
        if start >= end {
            return;
        }
        let mut signs: Vec<bool> = (0..n).map(|j| start >> (n - 1 - j) & 1 == 1).collect();
        let mut values: Vec<T> = self
            .offsets
            .iter()
            .map(|b| {
                let mut v = T::zero();
                v -= b;
                v
            })
            .collect();
        for (j, col) in self.cols.iter().enumerate() {
            for (p, a, _) in col {
                if signs[j] {
                    values[*p] += a;
                } else {
                    values[*p] -= a;
                }
            }
        }
        let mut count = 0u32;
        let mut plane_sum = 0u64;
        for (p, v) in values.iter().enumerate() {
            if v.is_zero() {
                count += 1;
                plane_sum += p as u64;
            }
        }
        let mut idx = start;
        loop {
            f(Incidence {
                index: idx,
                count,
                plane_sum,
            });
            idx += 1;
            if idx >= end {
                break;
            }
            // incrementing flips bits 0..=t, t = trailing zeros of the new index
            for bit in 0..=idx.trailing_zeros() as usize {
                let j = n - 1 - bit;
                let plus = !signs[j];
                signs[j] = plus;
                for (p, _, two_a) in &self.cols[j] {
                    let v = &mut values[*p];
                    let was_zero = v.is_zero();
                    if plus {
                        *v += two_a;
                    } else {
                        *v -= two_a;
                    }
                    match (was_zero, v.is_zero()) {
                        (true, false) => {
                            count -= 1;
                            plane_sum -= *p as u64;
                        }
                        (false, true) => {
                            count += 1;
                            plane_sum += *p as u64;
                        }
                        _ => {}
                    }
                }
            }
        }
    }
}
