//! Exhaustive verification of the essential-cover conditions.
//!
//! * (E1) every vertex lies on some plane,
//! * (E2) every variable has a non-zero coefficient in some normal,
//! * (E3) every plane has a vertex that no other plane contains,
//!
//! plus the sparsity law for essential covers: each normal has fewer than
//! `2k` non-zero entries. One enumeration pass over the cube counts, per
//! vertex, the planes through it; E1 and E3 are read off those counts.
//! Witnesses are the first qualifying vertex in enumeration order, so the
//! result does not depend on how the scan is split across threads.

use serde::Serialize;

use crate::cube::{check_guard, sparsity, CompiledCover, Cover, Vertex, DEFAULT_GUARD};
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverCondition {
    pub holds: bool,
    /// First vertex lying on no plane.
    pub witness: Option<Vertex>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VariableCondition {
    pub holds: bool,
    /// Coordinates (0-based) absent from every normal.
    pub missing: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrivacyCondition {
    pub holds: bool,
    /// For each plane, the first vertex covered by that plane alone.
    pub private_witnesses: Vec<Option<Vertex>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SparsityCondition {
    pub holds: bool,
    /// Planes whose normal has at least `2k` non-zero entries.
    pub offenders: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EssentialityReport {
    pub n: usize,
    pub k: usize,
    pub essential: bool,
    pub e1: CoverCondition,
    pub e2: VariableCondition,
    pub e3: PrivacyCondition,
    pub sparsity: SparsityCondition,
}

impl EssentialityReport {
    pub fn e1_holds(&self) -> bool {
        self.e1.holds
    }

    pub fn e2_holds(&self) -> bool {
        self.e2.holds
    }

    pub fn e3_holds(&self) -> bool {
        self.e3.holds
    }

    pub fn sparsity_ok(&self) -> bool {
        self.sparsity.holds
    }
}

/// Up to `limit` vertices on no plane, in enumeration order.
pub fn uncovered_vertices(c: &Cover, limit: usize) -> Result<Vec<Vertex>> {
    uncovered_vertices_guarded(c, limit, DEFAULT_GUARD)
}

pub fn uncovered_vertices_guarded(c: &Cover, limit: usize, guard: usize) -> Result<Vec<Vertex>> {
    check_guard(c.n, guard)?;
    if limit == 0 {
        return Ok(Vec::new());
    }
    let compiled = CompiledCover::new(c);
    let parts = compiled.par_map_chunks(|cc, start, end| {
        let mut found = Vec::new();
        cc.scan(start, end, |inc| {
            if inc.count == 0 && found.len() < limit {
                found.push(inc.index);
            }
        });
        found
    });
    Ok(parts
        .into_iter()
        .flatten()
        .take(limit)
        .map(|i| Vertex::from_index(c.n, i))
        .collect())
}

/// Number of planes through each vertex, indexed by vertex index.
pub fn coverage_counts(c: &Cover) -> Result<Vec<u32>> {
    coverage_counts_guarded(c, DEFAULT_GUARD)
}

pub fn coverage_counts_guarded(c: &Cover, guard: usize) -> Result<Vec<u32>> {
    check_guard(c.n, guard)?;
    let compiled = CompiledCover::new(c);
    let parts = compiled.par_map_chunks(|cc, start, end| {
        let mut counts = Vec::with_capacity((end - start) as usize);
        cc.scan(start, end, |inc| counts.push(inc.count));
        counts
    });
    Ok(parts.concat())
}

pub fn check_essential(c: &Cover) -> Result<EssentialityReport> {
    check_essential_guarded(c, DEFAULT_GUARD)
}

pub fn check_essential_guarded(c: &Cover, guard: usize) -> Result<EssentialityReport> {
    check_guard(c.n, guard)?;
    let k = c.k();
    let compiled = CompiledCover::new(c);

    struct Partial {
        uncovered: Option<u64>,
        private: Vec<Option<u64>>,
    }
    let parts = compiled.par_map_chunks(|cc, start, end| {
        let mut part = Partial {
            uncovered: None,
            private: vec![None; k],
        };
        cc.scan(start, end, |inc| match inc.count {
            0 => {
                part.uncovered.get_or_insert(inc.index);
            }
            1 => {
                part.private[inc.plane_sum as usize].get_or_insert(inc.index);
            }
            _ => {}
        });
        part
    });

    let mut uncovered = None;
    let mut private = vec![None; k];
    for part in parts {
        uncovered = uncovered.or(part.uncovered);
        for (slot, found) in private.iter_mut().zip(part.private) {
            *slot = slot.or(found);
        }
    }

    let missing: Vec<usize> = (0..c.n)
        .filter(|&j| c.planes.iter().all(|p| p.normal[j] == num::Zero::zero()))
        .collect();
    let offenders: Vec<usize> = c
        .planes
        .iter()
        .enumerate()
        .filter(|(_, p)| sparsity(&p.normal) >= 2 * k)
        .map(|(i, _)| i)
        .collect();

    let e1 = CoverCondition {
        holds: uncovered.is_none(),
        witness: uncovered.map(|i| Vertex::from_index(c.n, i)),
    };
    let e2 = VariableCondition {
        holds: missing.is_empty(),
        missing,
    };
    let e3 = PrivacyCondition {
        holds: private.iter().all(Option::is_some),
        private_witnesses: private
            .into_iter()
            .map(|w| w.map(|i| Vertex::from_index(c.n, i)))
            .collect(),
    };
    let sparsity = SparsityCondition {
        holds: offenders.is_empty(),
        offenders,
    };
    Ok(EssentialityReport {
        n: c.n,
        k,
        essential: e1.holds && e2.holds && e3.holds,
        e1,
        e2,
        e3,
        sparsity,
    })
}
