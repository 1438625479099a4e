//! Dense linear-algebra helpers on complex matrices.

use alloc::vec::Vec;

use nalgebra::{Schur, SymmetricEigen, SVD};

use crate::error::{Error, Result};
#[allow(unused_imports)]
use crate::prelude::*;
use crate::{CMat, CVec, C64};

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// `a * b` through a blocked complex gemm; nalgebra's own complex product
/// is an unblocked triple loop without std.
pub fn mul(a: &CMat, b: &CMat) -> CMat {
    assert_eq!(a.ncols(), b.nrows(), "matrix product dimensions");
    let (m, k, n) = (a.nrows(), a.ncols(), b.ncols());
    let mut c = CMat::zeros(m, n);
    if m == 0 || n == 0 || k == 0 {
        return c;
    }
    // SAFETY: Complex<f64> is repr(C) with layout [re, im]; the pointers
    // cover column-major storage of the stated shapes, and `c` does not alias.
    unsafe {
        matrixmultiply::zgemm(
            matrixmultiply::CGemmOption::Standard,
            matrixmultiply::CGemmOption::Standard,
            m,
            k,
            n,
            [1.0, 0.0],
            a.as_ptr() as *const [f64; 2],
            1,
            m as isize,
            b.as_ptr() as *const [f64; 2],
            1,
            k as isize,
            [0.0, 0.0],
            c.as_mut_ptr() as *mut [f64; 2],
            1,
            m as isize,
        );
    }
    c
}

pub fn from_real_fn(n: usize, m: usize, f: impl Fn(usize, usize) -> f64) -> CMat {
    CMat::from_fn(n, m, |i, j| C64::new(f(i, j), 0.0))
}

pub fn diag(values: impl IntoIterator<Item = f64>) -> CMat {
    let v: Vec<C64> = values.into_iter().map(|x| C64::new(x, 0.0)).collect();
    CMat::from_diagonal(&CVec::from_vec(v))
}

/// Singular values in ascending order.
pub fn singular_values(m: &CMat) -> Result<Vec<f64>> {
    let svd = SVD::try_new(m.clone(), false, false, 1e-15, 10_000).ok_or(Error::NoConvergence("SVD"))?;
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    Ok(s)
}

pub fn sigma_min(m: &CMat) -> Result<f64> {
    Ok(singular_values(m)?[0])
}

/// Spectral norm.
pub fn norm2(m: &CMat) -> Result<f64> {
    Ok(*singular_values(m)?.last().unwrap_or(&0.0))
}

/// Largest entry magnitude.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_imag(m: &CMat) -> f64 {
    m.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
}

pub fn inverse(m: &CMat) -> Result<CMat> {
    m.clone().lu().try_inverse().ok_or(Error::NoConvergence("LU inverse (matrix is singular)"))
}

pub fn solve(m: &CMat, rhs: &CMat) -> Result<CMat> {
    m.clone().lu().solve(rhs).ok_or(Error::NoConvergence("LU solve (matrix is singular)"))
}

/// `(M + M^H) / 2`.
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// `(M - M^H) / 2i`.
pub fn anti_hermitian_part(m: &CMat) -> CMat {
    (m - m.adjoint()) * C64::new(0.0, -0.5)
}

/// Eigen-decomposition of a Hermitian matrix (the Hermitian part of `m` is used).
pub fn hermitian_eigen(m: &CMat) -> Result<(Vec<f64>, CMat)> {
    let h = hermitian_part(m);
    let eig = SymmetricEigen::try_new(h, 1e-15, 10_000).ok_or(Error::NoConvergence("Hermitian eigensolver"))?;
    Ok((eig.eigenvalues.iter().copied().collect(), eig.eigenvectors))
}

/// Eigenvalues of the Hermitian part of `m`, without eigenvectors.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    hermitian_part(m).symmetric_eigenvalues().iter().copied().collect()
}

/// Convergence tolerances tried in turn: the unshifted-deflation QR in
/// nalgebra can stall at the tightest one on clustered spectra.
const SCHUR_TOLERANCES: [f64; 3] = [1e-15, 1e-13, 1e-11];

/// Eigenvalues of a general square matrix via the complex Schur form.
pub fn eigenvalues(m: &CMat) -> Result<Vec<C64>> {
    for eps in SCHUR_TOLERANCES {
        if let Some(schur) = Schur::try_new(m.clone(), eps, 20_000) {
            let (_, t) = schur.unpack();
            return Ok((0..t.nrows()).map(|i| t[(i, i)]).collect());
        }
    }
    Err(Error::NoConvergence("Schur decomposition"))
}

/// Eigenvalues of a matrix whose entries are real (imaginary parts are
/// dropped), from the real Schur form so that real eigenvalues are exactly
/// real and conjugate pairs are exact.
pub fn real_matrix_eigenvalues(m: &CMat) -> Result<Vec<C64>> {
    let re = m.map(|z| z.re);
    for eps in SCHUR_TOLERANCES {
        if let Some(schur) = Schur::try_new(re.clone(), eps, 20_000) {
            return Ok(schur.complex_eigenvalues().iter().map(|z| C64::new(z.re, z.im)).collect());
        }
    }
    Err(Error::NoConvergence("real Schur decomposition"))
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
