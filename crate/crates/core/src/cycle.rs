//! Cycles in a reduced matrix together with their per-arc values.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::cost::Cost;
use crate::matrix::ReducedMatrix;
use crate::perm::{canonical_rotation, write_cycle};

/// A simple cycle `(v0 v1 .. vk)` with arc values `r[v0,v1], .., r[vk,v0]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleCandidate {
    pub vertices: Vec<usize>,
    pub arc_values: Vec<Cost>,
    pub partial_sums: Vec<Cost>,
    pub total: Cost,
}

impl CycleCandidate {
    pub fn new(vertices: Vec<usize>, arc_values: Vec<Cost>) -> Self {
        debug_assert_eq!(vertices.len(), arc_values.len());
        let mut acc = Cost::ZERO;
        let partial_sums: Vec<Cost> = arc_values
            .iter()
            .map(|&v| {
                acc = acc + v;
                acc
            })
            .collect();
        CycleCandidate {
            vertices,
            arc_values,
            partial_sums,
            total: acc,
        }
    }

    pub fn from_reduced(r: &ReducedMatrix, vertices: Vec<usize>) -> Self {
        let arcs = r.arc_values(&vertices);
        Self::new(vertices, arcs)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn canonical(&self) -> Vec<usize> {
        canonical_rotation(&self.vertices)
    }

    pub fn all_prefixes_negative(&self) -> bool {
        self.partial_sums.iter().all(|s| s.is_negative())
    }

    /// Rotation by `k` arcs.
    pub fn rotated(&self, k: usize) -> Self {
        let len = self.len();
        let idx = |t: usize| (t + k) % len;
        Self::new(
            (0..len).map(|t| self.vertices[idx(t)]).collect(),
            (0..len).map(|t| self.arc_values[idx(t)]).collect(),
        )
    }

    /// For a negative cycle, the rotation whose every prefix sum is negative:
    /// start just after the last maximum of the prefix sums.
    pub fn determining_rotation(&self) -> Option<Self> {
        if !self.total.is_negative() {
            return None;
        }
        let mut best = (Cost::ZERO, 0);
        for (k, s) in self.partial_sums.iter().enumerate().take(self.len() - 1) {
            if *s >= best.0 {
                best = (*s, k + 1);
            }
        }
        Some(self.rotated(best.1))
    }

    /// First vertex of a rotation whose every prefix sum is below `bound`,
    /// for a cycle of total below a positive `bound`.
    pub fn determining_rotation_below(&self, bound: Cost) -> Option<usize> {
        let (Cost::Finite(b), Cost::Finite(total)) = (bound, self.total) else {
            return None;
        };
        if total >= b || b <= 0 {
            return None;
        }
        // prefix sums of k * w - b stay negative on the chosen rotation
        let k = self.len() as i64;
        let mut acc = 0i64;
        let mut best = (0i64, 0usize);
        for (t, w) in self.arc_values.iter().enumerate().take(self.len() - 1) {
            acc += k * w.finite()? - b;
            if acc >= best.0 {
                best = (acc, t + 1);
            }
        }
        Some(self.vertices[best.1])
    }

    pub fn is_disjoint(&self, other: &CycleCandidate) -> bool {
        self.vertices.iter().all(|v| !other.vertices.contains(v))
    }
}

impl fmt::Display for CycleCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_cycle(f, &self.vertices)
    }
}

/// Selection order for competing moves: lower total, then fewer vertices,
/// then lexicographic canonical vertex lists.
pub fn move_order(a: &[CycleCandidate], b: &[CycleCandidate]) -> Ordering {
    let total = |m: &[CycleCandidate]| m.iter().map(|c| c.total).sum::<Cost>();
    let size = |m: &[CycleCandidate]| m.iter().map(CycleCandidate::len).sum::<usize>();
    let key = |m: &[CycleCandidate]| {
        let mut cs: Vec<Vec<usize>> = m.iter().map(CycleCandidate::canonical).collect();
        cs.sort();
        cs
    };
    total(a)
        .cmp(&total(b))
        .then(size(a).cmp(&size(b)))
        .then_with(|| key(a).cmp(&key(b)))
}
