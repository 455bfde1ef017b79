//! Dense complex linear algebra used throughout the simulator.
//!
//! Everything here is small-matrix, allocation-happy code: the largest
//! matrices in a simulation are a few hundred rows, so clarity wins over
//! cache blocking or FFTs.

mod bessel;
mod block;
mod dft;
mod matrix;

pub use bessel::{
    bessel_j, bessel_j_quadrature, bessel_j_series, MAX_BESSEL_ARG, MAX_BESSEL_ORDER,
};
pub use block::{block_matmul, BlockMatrix};
pub use dft::{
    circulant_eigenvalues, circulant_from_first_row, dft_matrix, diagonalize_circulant, idft_matrix,
};
pub use matrix::ComplexMatrix;

pub type C64 = num_complex::Complex64;

/// `e^{j theta}`.
#[inline]
pub fn cis(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

/// Maximum absolute entry-wise difference between two equally long slices.
pub fn max_abs_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest magnitude in a slice (0 for an empty slice).
pub fn max_abs(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}
