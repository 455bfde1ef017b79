use std::f64::consts::PI;

use super::{cis, ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Unitary n-point IDFT matrix, entry `(a, b) = e^{j2πab/n} / √n`.
pub fn idft_matrix(n: usize) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::InvalidDimension(
            "IDFT size must be at least 1".into(),
        ));
    }
    let s = 1.0 / (n as f64).sqrt();
    Ok(ComplexMatrix::from_fn(n, n, |a, b| {
        // Reduce the exponent first so large n keeps full phase accuracy.
        cis(2.0 * PI * ((a * b) % n) as f64 / n as f64) * s
    }))
}

/// Unitary n-point DFT matrix, the conjugate transpose of [`idft_matrix`].
pub fn dft_matrix(n: usize) -> Result<ComplexMatrix> {
    Ok(idft_matrix(n)?.conj_transpose())
}

/// Circulant matrix whose row `r` is `row` rotated right by `r` places.
pub fn circulant_from_first_row(row: &[C64]) -> Result<ComplexMatrix> {
    let n = row.len();
    if n == 0 {
        return Err(Error::InvalidDimension(
            "circulant needs a non-empty first row".into(),
        ));
    }
    Ok(ComplexMatrix::from_fn(n, n, |r, c| row[(c + n - r) % n]))
}

/// Diagonal of `W^H C W`. The input is trusted to be circulant.
pub fn diagonalize_circulant(c: &ComplexMatrix) -> Result<Vec<C64>> {
    if !c.is_square() {
        return Err(Error::InvalidDimension(format!(
            "circulant must be square, got {}x{}",
            c.rows(),
            c.cols()
        )));
    }
    let w = idft_matrix(c.rows())?;
    Ok(w.conj_transpose().matmul(&c.matmul(&w)?)?.diag())
}

/// Eigenvalues of the circulant with the given first row, as `√n · W^H h`
/// where `h = [c0, c_{n-1}, …, c1]` is its first column.
pub fn circulant_eigenvalues(first_row: &[C64]) -> Result<Vec<C64>> {
    let n = first_row.len();
    if n == 0 {
        return Err(Error::InvalidDimension(
            "circulant needs a non-empty first row".into(),
        ));
    }
    let h: Vec<C64> = (0..n).map(|k| first_row[(n - k) % n]).collect();
    let wh = dft_matrix(n)?;
    Ok(wh
        .matvec(&h)?
        .into_iter()
        .map(|x| x * (n as f64).sqrt())
        .collect())
}
