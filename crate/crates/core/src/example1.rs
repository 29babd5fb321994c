//! The eight-city worked instance used for golden-trace replay.

use crate::matrix::CostMatrix;
use crate::perm::Permutation;

pub const N: usize = 8;

pub const ROWS: [[i64; N]; N] = [
    [0, 23, 99, 17, 12, 99, 18, 24],
    [43, 0, 2, 73, 15, 100, 53, 28],
    [1, 84, 0, 19, 53, 68, 44, 34],
    [89, 41, 45, 0, 40, 71, 79, 51],
    [83, 62, 94, 88, 0, 36, 6, 50],
    [61, 62, 98, 50, 29, 0, 52, 40],
    [50, 21, 53, 68, 39, 26, 0, 25],
    [16, 42, 61, 54, 81, 34, 92, 0],
];

pub const START_TOUR: &str = "(1 2 3 4 5 6 7 8)";
pub const ASSIGNMENT_COST: i64 = 155;
pub const TOUR_COST: i64 = 161;

pub fn matrix() -> CostMatrix {
    CostMatrix::from_rows(&ROWS).expect("embedded matrix is square")
}

pub fn start_tour() -> Permutation {
    Permutation::parse_cycles(START_TOUR, N).expect("embedded start tour")
}

/// Final derangement of the greedy phase, `(1 4 2 3)(5 7 8 6)`.
pub fn d3() -> Permutation {
    Permutation::from_row_form(&[4, 3, 1, 2, 7, 5, 8, 6]).expect("embedded derangement")
}

/// Golden trace emitted by `replay-example1` with default knobs.
pub const GOLDEN_TRACE: &str = include_str!("example1_golden.txt");
