//! Thin wrappers over dense complex solves so the call sites stay readable.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Least-squares solve of `a x = b` via SVD. Errors when `a` is rank
/// deficient relative to `rank_tol * sigma_max`.
pub(crate) fn lstsq(
    a: &DMatrix<Complex64>,
    b: &DVector<Complex64>,
    rank_tol: f64,
) -> Result<DVector<Complex64>> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return Err(Error::LinearSolve("zero matrix"));
    }
    let eps = rank_tol * smax;
    let rank = svd.singular_values.iter().filter(|&&s| s > eps).count();
    if rank < a.ncols() {
        return Err(Error::LinearSolve("rank deficient system"));
    }
    svd.solve(b, eps)
        .map(|m| DVector::from_column_slice(m.as_slice()))
        .map_err(Error::LinearSolve)
}

/// Least-squares solve that tolerates rank deficiency and reports the
/// numerical rank along with the minimum-norm solution.
pub(crate) fn lstsq_rank(
    a: &DMatrix<Complex64>,
    b: &DVector<Complex64>,
    rank_tol: f64,
) -> Result<(DVector<Complex64>, usize)> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return Ok((DVector::zeros(a.ncols()), 0));
    }
    let eps = rank_tol * smax;
    let rank = svd.singular_values.iter().filter(|&&s| s > eps).count();
    let x = svd
        .solve(b, eps)
        .map(|m| DVector::from_column_slice(m.as_slice()))
        .map_err(Error::LinearSolve)?;
    Ok((x, rank))
}

/// Numerical rank of `a` at the given relative threshold.
pub(crate) fn rank(a: &DMatrix<Complex64>, rank_tol: f64) -> usize {
    let svd = a.clone().svd(false, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    let eps = rank_tol * smax;
    svd.singular_values.iter().filter(|&&s| s > eps).count()
}
