//! Seeded random matrices. Every generator in the crate draws from a
//! [`ChaCha8Rng`] seeded with a `u64`, so outputs are reproducible across
//! platforms and thread counts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::Matrix;
use crate::rational::Rational;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform integer entries in `[-bound, bound]`.
pub fn matrix(rng: &mut SeededRng, rows: usize, cols: usize, bound: i64) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| Rational::from_int(rng.gen_range(-bound..=bound)))
}

/// Uniform integer entries in `[-bound, bound] \ {0}`.
pub fn nonzero_scalar(rng: &mut SeededRng, bound: i64) -> Rational {
    let x = rng.gen_range(1..=bound.max(1));
    Rational::from_int(if rng.gen_bool(0.5) { x } else { -x })
}

/// A random invertible matrix: redraws until the rank is full.
pub fn invertible(rng: &mut SeededRng, n: usize, bound: i64) -> Matrix {
    loop {
        let m = matrix(rng, n, n, bound.max(1));
        if m.rank() == n {
            return m;
        }
    }
}

/// A random matrix of rank at most `r`, as a product through `r` dimensions.
pub fn low_rank(rng: &mut SeededRng, rows: usize, cols: usize, r: usize, bound: i64) -> Matrix {
    let r = r.min(rows).min(cols);
    matrix(rng, rows, r, bound).mul(&matrix(rng, r, cols, bound))
}

/// Random `(g, h)` of shapes `rows x k`, `k x cols` with `g * h = 0`.
pub fn zero_product(rng: &mut SeededRng, rows: usize, k: usize, cols: usize, bound: i64) -> (Matrix, Matrix) {
    let s = rng.gen_range(0..=k.min(rows));
    let g = low_rank(rng, rows, k, s, bound);
    let ker = g.kernel_matrix();
    let h = ker.mul(&matrix(rng, ker.cols(), cols, bound));
    (g, h)
}
