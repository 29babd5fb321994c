//! Extended integer costs: a finite `i64` or positive infinity.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Sub};

use serde::{Serialize, Serializer};

/// A 64-bit integer cost extended with `+inf`.
///
/// Infinity absorbs addition and compares greater than every finite value.
/// It marks missing arcs, most notably the diagonal of every cost matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cost {
    Finite(i64),
    Infinite,
}

impl Cost {
    pub const ZERO: Cost = Cost::Finite(0);

    pub fn is_finite(self) -> bool {
        matches!(self, Cost::Finite(_))
    }

    pub fn is_infinite(self) -> bool {
        !self.is_finite()
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            Cost::Finite(v) => Some(v),
            Cost::Infinite => None,
        }
    }

    /// Strictly negative finite value.
    pub fn is_negative(self) -> bool {
        matches!(self, Cost::Finite(v) if v < 0)
    }

    /// `self < bound` where `bound` is a plain integer.
    pub fn lt(self, bound: i64) -> bool {
        matches!(self, Cost::Finite(v) if v < bound)
    }
}

impl From<i64> for Cost {
    fn from(v: i64) -> Self {
        Cost::Finite(v)
    }
}

impl Add for Cost {
    type Output = Cost;

    fn add(self, rhs: Cost) -> Cost {
        match (self, rhs) {
            (Cost::Finite(a), Cost::Finite(b)) => Cost::Finite(a + b),
            _ => Cost::Infinite,
        }
    }
}

impl Add<i64> for Cost {
    type Output = Cost;

    fn add(self, rhs: i64) -> Cost {
        self + Cost::Finite(rhs)
    }
}

/// Differences involving infinity are infinite: an arc that cannot be used
/// stays unusable after any row shift.
impl Sub for Cost {
    type Output = Cost;

    fn sub(self, rhs: Cost) -> Cost {
        match (self, rhs) {
            (Cost::Finite(a), Cost::Finite(b)) => Cost::Finite(a - b),
            _ => Cost::Infinite,
        }
    }
}

impl Sum for Cost {
    fn sum<I: Iterator<Item = Cost>>(iter: I) -> Cost {
        iter.fold(Cost::ZERO, Add::add)
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cost::Finite(v) => write!(f, "{v}"),
            Cost::Infinite => f.write_str("INF"),
        }
    }
}

impl Serialize for Cost {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cost::Finite(v) => s.serialize_i64(*v),
            Cost::Infinite => s.serialize_str("INF"),
        }
    }
}
