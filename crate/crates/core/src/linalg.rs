//! Exact linear algebra over the rationals: reduced row echelon form, rank
//! and null-space bases.

use num::{One, Zero};

use crate::rat::Rat;

/// Reduces `m` in place to reduced row echelon form and returns the pivot columns.
pub fn rref(m: &mut [Vec<Rat>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rat::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &[Vec<Rat>]) -> usize {
    let mut work = m.to_vec();
    rref(&mut work).len()
}

/// A basis of `{ x : m x = 0 }` for a matrix with `cols` columns.
pub fn null_space(m: &[Vec<Rat>], cols: usize) -> Vec<Vec<Rat>> {
    let mut work = m.to_vec();
    let pivots = rref(&mut work);
    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&f| !is_pivot[f])
        .map(|free| {
            let mut x = vec![Rat::zero(); cols];
            x[free] = Rat::one();
            for (r, &p) in pivots.iter().enumerate() {
                x[p] = -work[r][free].clone();
            }
            x
        })
        .collect()
}

/// Some non-zero vector in the null space, if the null space is non-trivial.
pub fn null_vector(m: &[Vec<Rat>], cols: usize) -> Option<Vec<Rat>> {
    let mut work = m.to_vec();
    let pivots = rref(&mut work);
    let free = (0..cols).find(|c| !pivots.contains(c))?;
    let mut x = vec![Rat::zero(); cols];
    x[free] = Rat::one();
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = -work[r][free].clone();
    }
    Some(x)
}
