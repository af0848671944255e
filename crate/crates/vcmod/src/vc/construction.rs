//! Construction of the 16D shaping lattice from nested Reed-Muller codes.
//!
//! The shaping lattice is 2 * L where L = 4 Z^16 + 2 RM(2,4) + RM(0,4),
//! a code-formula lattice over the nested pair RM(0,4) < RM(2,4). The code
//! family is closed under Schur products, so L is closed under addition and
//! the integer row span of the stacked generators equals L itself.

use num_bigint::BigInt;

use crate::lattice::exact::{hnf_row_basis, IntMat, RatMat};
use crate::lattice::{DecoderHint, Lattice};

/// Generator rows of the Reed-Muller code RM(r, m), length 2^m.
///
/// Rows are evaluations of the monomials of degree <= r, ordered by degree
/// then by variable mask; coordinate k evaluates variable i to bit i of k.
pub fn rm_generator(r: usize, m: usize) -> Vec<Vec<u8>> {
    let n = 1usize << m;
    let mut masks: Vec<usize> = (0..(1usize << m))
        .filter(|mask| mask.count_ones() as usize <= r)
        .collect();
    masks.sort_by_key(|mask| (mask.count_ones(), *mask));
    masks
        .iter()
        .map(|&mask| {
            (0..n)
                .map(|k| u8::from(k & mask == mask))
                .collect()
        })
        .collect()
}

/// Integer basis of L = 4 Z^16 + 2 RM(2,4) + RM(0,4), via the Hermite normal
/// form of the stacked generating set. |det| = 2^20.
pub fn code_formula_16d_basis() -> IntMat {
    let dim = 16;
    let rm24 = rm_generator(2, 4);
    assert_eq!(rm24.len(), 11);
    let rm04 = rm_generator(0, 4);
    assert_eq!(rm04.len(), 1);

    let mut rows: Vec<Vec<i64>> = Vec::new();
    for r in &rm04 {
        rows.push(r.iter().map(|&b| b as i64).collect());
    }
    for r in &rm24 {
        rows.push(r.iter().map(|&b| 2 * b as i64).collect());
    }
    for i in 0..dim {
        let mut row = vec![0i64; dim];
        row[i] = 4;
        rows.push(row);
    }
    let basis = hnf_row_basis(&IntMat::from_i64_rows(&rows));
    assert_eq!(basis.rows, dim, "code-formula generators must be full rank");
    basis
}

/// The default 16D shaping lattice 2 * L, det = 2^36.
pub fn shaping_16d() -> Lattice {
    let l = code_formula_16d_basis();
    let two = BigInt::from(2);
    let scaled = IntMat::from_fn(l.rows, l.cols, |i, j| &l[(i, j)] * &two);
    Lattice::new(scaled.to_rat(), DecoderHint::Sphere).expect("shaping basis is full rank")
}

#[allow(dead_code)]
pub fn int_mat_to_rat(m: &IntMat) -> RatMat {
    m.to_rat()
}
