//! Problem instances, the per-row sorted column order, and the row-reduced
//! matrix of a derangement.

use std::fmt::Write as _;

use rand::Rng;

use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::perm::Permutation;

/// `n x n` arc costs. The diagonal is always infinite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostMatrix {
    n: usize,
    d: Vec<Cost>,
}

impl CostMatrix {
    /// Row-major costs; diagonal entries are overwritten with infinity.
    pub fn from_costs(n: usize, mut d: Vec<Cost>) -> Result<Self> {
        if d.len() != n * n {
            return Err(Error::SizeMismatch {
                left: n * n,
                right: d.len(),
            });
        }
        for i in 0..n {
            d[i * n + i] = Cost::Infinite;
        }
        Ok(CostMatrix { n, d })
    }

    /// Finite rows; whatever sits on the diagonal is ignored.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut d = Vec::with_capacity(n * n);
        for r in rows {
            let r = r.as_ref();
            if r.len() != n {
                return Err(Error::SizeMismatch {
                    left: n,
                    right: r.len(),
                });
            }
            d.extend(r.iter().map(|&v| Cost::Finite(v)));
        }
        Self::from_costs(n, d)
    }

    /// Uniform integer costs in `lo..=hi` off the diagonal.
    pub fn random<R: Rng + ?Sized>(n: usize, lo: i64, hi: i64, rng: &mut R) -> Self {
        let d = (0..n * n)
            .map(|k| {
                if k / n == k % n {
                    Cost::Infinite
                } else {
                    Cost::Finite(rng.gen_range(lo..=hi))
                }
            })
            .collect();
        CostMatrix { n, d }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Cost {
        self.d[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[Cost] {
        &self.d[i * self.n..(i + 1) * self.n]
    }

    /// Parses the plain-text matrix format: `n` on the first line, then `n`
    /// rows of `n` integers or `INF`, with `INF` on the diagonal.
    pub fn parse(text: &str) -> Result<Self> {
        let err = |line: usize, column: usize, message: String| Error::MatrixParse {
            line,
            column,
            message,
        };
        let mut lines = text.lines().enumerate();
        let (_, first) = lines
            .next()
            .ok_or_else(|| err(1, 1, "empty input".into()))?;
        let first_col = first.len() - first.trim_start().len() + 1;
        let n: usize = first.trim().parse().map_err(|_| {
            err(
                1,
                first_col,
                format!("expected vertex count, got {:?}", first.trim()),
            )
        })?;
        if n == 0 {
            return Err(err(1, first_col, "vertex count must be positive".into()));
        }
        let mut d = Vec::with_capacity(n * n);
        for i in 0..n {
            let (lno, line) = lines
                .next()
                .ok_or_else(|| err(i + 2, 1, format!("missing row {}", i + 1)))?;
            let lno = lno + 1;
            let mut count = 0;
            for (col, tok) in tokens(line) {
                if count == n {
                    return Err(err(
                        lno,
                        col,
                        format!("row {} has more than {n} entries", i + 1),
                    ));
                }
                let c = if tok.eq_ignore_ascii_case("inf") {
                    Cost::Infinite
                } else {
                    Cost::Finite(
                        tok.parse()
                            .map_err(|_| err(lno, col, format!("bad entry {tok:?}")))?,
                    )
                };
                if count == i && c.is_finite() {
                    return Err(err(
                        lno,
                        col,
                        format!("diagonal entry ({0}, {0}) must be INF", i + 1),
                    ));
                }
                d.push(c);
                count += 1;
            }
            if count < n {
                return Err(err(
                    lno,
                    line.len() + 1,
                    format!("row {} has {count} entries, expected {n}", i + 1),
                ));
            }
        }
        for (lno, line) in lines {
            if !line.trim().is_empty() {
                return Err(err(lno + 1, 1, "trailing content after last row".into()));
            }
        }
        Ok(CostMatrix { n, d })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.n);
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(Cost::to_string).collect();
            writeln!(s, "{}", row.join(" ")).expect("writing to a String");
        }
        s
    }
}

/// Whitespace-separated tokens with their 1-based character column.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (k, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(k),
            (true, Some(s)) => {
                out.push((s, &line[s..k]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter()
        .map(move |(b, tok)| (line[..b].chars().count() + 1, tok))
}

/// For every row, the off-diagonal columns sorted by ascending cost, ties by
/// column index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinOrderTable {
    n: usize,
    order: Vec<Vec<usize>>,
    rank: Vec<usize>,
}

impl MinOrderTable {
    pub fn build(m: &CostMatrix) -> Self {
        let n = m.n();
        let mut rank = vec![usize::MAX; n * n];
        let order: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                let mut cols: Vec<usize> = (0..n).filter(|&j| j != i).collect();
                cols.sort_by_key(|&j| (m.get(i, j), j));
                for (k, &j) in cols.iter().enumerate() {
                    rank[i * n + j] = k;
                }
                cols
            })
            .collect();
        MinOrderTable { n, order, rank }
    }

    pub fn order(&self, i: usize) -> &[usize] {
        &self.order[i]
    }

    /// Column at 0-based position `k` of row `i`.
    pub fn nth(&self, i: usize, k: usize) -> Option<usize> {
        self.order[i].get(k).copied()
    }

    /// 0-based position of column `j` in row `i`; `None` on the diagonal.
    pub fn rank(&self, i: usize, j: usize) -> Option<usize> {
        let r = self.rank[i * self.n + j];
        (r != usize::MAX).then_some(r)
    }
}

/// `m[i, p(j)] - m[i, p(i)]`.
pub fn reduced_value(m: &CostMatrix, p: &Permutation, i: usize, j: usize) -> Cost {
    m.get(i, p.image(j)) - m.get(i, p.image(i))
}

/// Sum of reduced values along `cycle`, closing arc included.
pub fn reduced_cycle_value(cycle: &[usize], p: &Permutation, m: &CostMatrix) -> Cost {
    cycle
        .iter()
        .zip(cycle.iter().cycle().skip(1))
        .map(|(&a, &b)| reduced_value(m, p, a, b))
        .sum()
}

/// Best single-arc change available to a row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Diff {
    /// `d(i, column) - d(i, p(i))`, or 0 when the row already uses its
    /// cheapest column.
    pub value: Cost,
    /// The improving column, if any.
    pub column: Option<usize>,
}

/// DIFF of row `i` under derangement `p`: the cheapest column of the row
/// minus the current one.
pub fn diff(m: &CostMatrix, p: &Permutation, order: &MinOrderTable, i: usize) -> Diff {
    let current = p.image(i);
    match order.nth(i, 0) {
        Some(best) if best != current && m.get(i, best) < m.get(i, current) => Diff {
            value: m.get(i, best) - m.get(i, current),
            column: Some(best),
        },
        _ => Diff {
            value: Cost::ZERO,
            column: None,
        },
    }
}

/// Row-reduced transformed matrix of a derangement:
/// `r[i, j] = d[i, p(j)] - d[i, p(i)]`.
///
/// Zero on the diagonal. The arc `(a, p^-1(a))` maps onto the infinite
/// diagonal of the cost matrix and so is always infinite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedMatrix {
    n: usize,
    r: Vec<Cost>,
}

impl ReducedMatrix {
    pub fn new(m: &CostMatrix, p: &Permutation) -> Self {
        let n = m.n();
        let mut r = Vec::with_capacity(n * n);
        for i in 0..n {
            let own = m.get(i, p.image(i));
            for j in 0..n {
                r.push(if i == j {
                    Cost::ZERO
                } else {
                    m.get(i, p.image(j)) - own
                });
            }
        }
        ReducedMatrix { n, r }
    }

    /// Arbitrary arc values; the diagonal is forced to zero.
    pub fn from_values(n: usize, mut r: Vec<Cost>) -> Result<Self> {
        if r.len() != n * n {
            return Err(Error::SizeMismatch {
                left: n * n,
                right: r.len(),
            });
        }
        for i in 0..n {
            r[i * n + i] = Cost::ZERO;
        }
        Ok(ReducedMatrix { n, r })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Cost {
        self.r[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Cost) {
        self.r[i * self.n + j] = v;
    }

    pub fn cycle_value(&self, cycle: &[usize]) -> Cost {
        cycle
            .iter()
            .zip(cycle.iter().cycle().skip(1))
            .map(|(&a, &b)| self.get(a, b))
            .sum()
    }

    pub fn arc_values(&self, cycle: &[usize]) -> Vec<Cost> {
        cycle
            .iter()
            .zip(cycle.iter().cycle().skip(1))
            .map(|(&a, &b)| self.get(a, b))
            .collect()
    }
}
