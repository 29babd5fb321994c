//! Permutations of `{0, .., n-1}` in row form, with cycle notation I/O.
//!
//! Vertex indices are 0-based in the API. Cycle notation, row-form
//! constructors and every printed form are 1-based.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::matrix::CostMatrix;

#[derive(Clone, Debug)]
pub struct Permutation {
    map: Vec<usize>,
    /// Position of each vertex in the generating n-cycle, when built from one.
    positions: Option<Vec<usize>>,
}

impl PartialEq for Permutation {
    fn eq(&self, other: &Self) -> bool {
        self.map == other.map
    }
}

impl Eq for Permutation {}

impl std::hash::Hash for Permutation {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.map.hash(state);
    }
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            map: (0..n).collect(),
            positions: None,
        }
    }

    /// Builds from 0-based images, checking bijectivity.
    pub fn from_images(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for (i, &v) in map.iter().enumerate() {
            if v >= n {
                return Err(Error::NotAPermutation(format!(
                    "image {} of {} out of range",
                    v + 1,
                    i + 1
                )));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::NotAPermutation(format!("{} hit twice", v + 1)));
            }
        }
        Ok(Permutation {
            map,
            positions: None,
        })
    }

    /// Builds from the 1-based bottom line of a row-form table.
    pub fn from_row_form(row: &[usize]) -> Result<Self> {
        if row.contains(&0) {
            return Err(Error::NotAPermutation("row form is 1-based".into()));
        }
        Self::from_images(row.iter().map(|v| v - 1).collect())
    }

    /// The n-cycle `(order[0] order[1] .. order[n-1])`, 0-based, with
    /// traversal positions recorded.
    pub fn n_cycle(order: &[usize]) -> Result<Self> {
        let n = order.len();
        let mut map = vec![usize::MAX; n];
        let mut positions = vec![usize::MAX; n];
        for (k, &v) in order.iter().enumerate() {
            if v >= n || positions[v] != usize::MAX {
                return Err(Error::NotAPermutation("bad n-cycle order".into()));
            }
            positions[v] = k;
            map[v] = order[(k + 1) % n];
        }
        Ok(Permutation {
            map,
            positions: Some(positions),
        })
    }

    /// Uniformly random n-cycle.
    pub fn random_tour<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        Self::n_cycle(&order).expect("shuffled order is a bijection")
    }

    /// Product of disjoint cycles given as 0-based vertex lists.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut map: Vec<usize> = (0..n).collect();
        let mut used = vec![false; n];
        for c in cycles {
            for (k, &v) in c.iter().enumerate() {
                if v >= n {
                    return Err(Error::CycleSyntax(format!("vertex {} out of range", v + 1)));
                }
                if std::mem::replace(&mut used[v], true) {
                    return Err(Error::CycleSyntax(format!("vertex {} repeated", v + 1)));
                }
                map[v] = c[(k + 1) % c.len()];
            }
        }
        Ok(Permutation {
            map,
            positions: None,
        })
    }

    /// Parses 1-based cycle notation such as `(1 4 2 3)(5 7 8 6)`.
    /// `()` and the empty string denote the identity.
    pub fn parse_cycles(text: &str, n: usize) -> Result<Self> {
        let mut cycles = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let inner = rest
                .strip_prefix('(')
                .ok_or_else(|| Error::CycleSyntax(format!("expected '(' at {rest:?}")))?;
            let close = inner
                .find(')')
                .ok_or_else(|| Error::CycleSyntax("unclosed '('".into()))?;
            let cycle = inner[..close]
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| match t.parse::<usize>() {
                    Ok(v) if v >= 1 => Ok(v - 1),
                    _ => Err(Error::CycleSyntax(format!("bad vertex {t:?}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            if !cycle.is_empty() {
                cycles.push(cycle);
            }
            rest = inner[close + 1..].trim_start();
        }
        Self::from_cycles(n, &cycles)
    }

    pub fn n(&self) -> usize {
        self.map.len()
    }

    pub fn image(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.map
    }

    pub fn positions(&self) -> Option<&[usize]> {
        self.positions.as_deref()
    }

    /// 1-based row form.
    pub fn row_form(&self) -> Vec<usize> {
        self.map.iter().map(|v| v + 1).collect()
    }

    /// `r(i) = self(q(i))`: apply `q` first.
    pub fn compose(&self, q: &Permutation) -> Result<Permutation> {
        if self.n() != q.n() {
            return Err(Error::SizeMismatch {
                left: self.n(),
                right: q.n(),
            });
        }
        Ok(Permutation {
            map: q.map.iter().map(|&j| self.map[j]).collect(),
            positions: None,
        })
    }

    /// `self` followed by a single cycle: `r(a) = self(next(a))` on the
    /// cycle's vertices, unchanged elsewhere.
    pub fn apply_cycle(&self, cycle: &[usize]) -> Permutation {
        let mut map = self.map.clone();
        for (k, &a) in cycle.iter().enumerate() {
            map[a] = self.map[cycle[(k + 1) % cycle.len()]];
        }
        Permutation {
            map,
            positions: None,
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.n()];
        for (i, &v) in self.map.iter().enumerate() {
            inv[v] = i;
        }
        Permutation {
            map: inv,
            positions: None,
        }
    }

    pub fn decompose(&self) -> CycleForm {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        let mut fixed_points = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            if self.map[start] == start {
                seen[start] = true;
                fixed_points.push(start);
                continue;
            }
            let mut cycle = Vec::new();
            let mut v = start;
            while !seen[v] {
                seen[v] = true;
                cycle.push(v);
                v = self.map[v];
            }
            cycles.push(cycle);
        }
        CycleForm {
            cycles,
            fixed_points,
        }
    }

    pub fn is_derangement(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &v)| i != v)
    }

    pub fn is_tour(&self) -> bool {
        let n = self.n();
        if n < 2 {
            return false;
        }
        let mut v = self.map[0];
        let mut len = 1;
        while v != 0 {
            v = self.map[v];
            len += 1;
            if len > n {
                return false;
            }
        }
        len == n
    }

    /// `sum_i m[i, self(i)]`.
    pub fn cost(&self, m: &CostMatrix) -> Result<Cost> {
        if self.n() != m.n() {
            return Err(Error::SizeMismatch {
                left: self.n(),
                right: m.n(),
            });
        }
        Ok(self.map.iter().enumerate().map(|(i, &j)| m.get(i, j)).sum())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.decompose().fmt(f)
    }
}

/// Disjoint cycle decomposition. Each cycle starts at its minimum vertex and
/// cycles are ordered by that vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleForm {
    pub cycles: Vec<Vec<usize>>,
    pub fixed_points: Vec<usize>,
}

impl fmt::Display for CycleForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cycles.is_empty() {
            return f.write_str("()");
        }
        for c in &self.cycles {
            write_cycle(f, c)?;
        }
        Ok(())
    }
}

pub(crate) fn write_cycle(f: &mut impl fmt::Write, cycle: &[usize]) -> fmt::Result {
    f.write_char('(')?;
    for (k, v) in cycle.iter().enumerate() {
        if k > 0 {
            f.write_char(' ')?;
        }
        write!(f, "{}", v + 1)?;
    }
    f.write_char(')')
}

/// 1-based cycle notation for a single vertex list.
pub fn cycle_notation(cycle: &[usize]) -> String {
    let mut s = String::new();
    write_cycle(&mut s, cycle).expect("writing to a String");
    s
}

/// Rotation of `cycle` that starts at its minimum vertex.
pub fn canonical_rotation(cycle: &[usize]) -> Vec<usize> {
    let Some(k) = cycle
        .iter()
        .enumerate()
        .min_by_key(|&(_, v)| v)
        .map(|(k, _)| k)
    else {
        return Vec::new();
    };
    cycle[k..].iter().chain(&cycle[..k]).copied().collect()
}
