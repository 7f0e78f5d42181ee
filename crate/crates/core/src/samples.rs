//! Small named instances used throughout the tests and benches.

use crate::charmap::CharMatrix;

fn build(factors: &[usize], rows: &[&str]) -> CharMatrix {
    CharMatrix::from_rows(factors, rows)
        .and_then(CharMatrix::validated)
        .expect("sample instance is a characteristic matrix")
}

/// Rows of the factor-compatible instance over two hexagons whose projective
/// model has Hodge diamond `1; 2 2; 2 6 2; 2 2; 1`.
pub const HEXAGON_PAIR_ROWS: [&str; 4] = [
    "101010101000",
    "111111000000",
    "000000101010",
    "000000111111",
];

pub fn hexagon_pair() -> CharMatrix {
    build(&[6, 6], &HEXAGON_PAIR_ROWS)
}

/// The torus over a square.
pub fn torus() -> CharMatrix {
    build(&[4], &["1010", "0101"])
}

/// The Klein bottle over a square.
pub fn klein() -> CharMatrix {
    build(&[4], &["1011", "0101"])
}

/// Block-diagonal product of two tori.
pub fn torus_torus() -> CharMatrix {
    build(&[4, 4], &["10100000", "01010000", "00001010", "00000101"])
}
