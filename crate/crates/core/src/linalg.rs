//! Dense complex linear algebra helpers on top of nalgebra.

use crate::error::{Error, Result};
use crate::scalars::C64;
use nalgebra::{DMatrix, DVector};
use num_traits::Zero;

pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Singular values, largest first.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// Numerical rank with a relative cutoff.
pub fn rank(m: &CMat, rel_tol: f64) -> usize {
    let s = singular_values(m);
    let top = s.first().copied().unwrap_or(0.0);
    s.iter().filter(|&&x| x > rel_tol * top.max(1e-300)).count()
}

/// Ratio of extreme singular values (infinite when singular).
pub fn condition_number(m: &CMat) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&a), Some(&b)) if b > 0.0 && s.len() == m.nrows().min(m.ncols()) => a / b,
        _ => f64::INFINITY,
    }
}

/// Orthonormal basis of the kernel, computed from the Gram matrix `m^H m` so the
/// number of rows does not matter.
pub fn nullspace(m: &CMat, rel_tol: f64) -> Vec<CVec> {
    let n = m.ncols();
    if n == 0 {
        return Vec::new();
    }
    let gram = m.adjoint() * m;
    let svd = gram.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max).max(1e-300);
    let mut out = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        // singular values of the Gram matrix are squares
        if s <= rel_tol * rel_tol * top {
            out.push(vt.row(i).adjoint().into_owned());
        }
    }
    out
}

/// Solve `a x = b` for square `a`, with a residual check.
pub fn solve(a: &CMat, b: &CVec, tol: f64) -> Result<CVec> {
    let lu = a.clone().lu();
    let x = lu
        .solve(b)
        .ok_or_else(|| Error::NotInvertible(format!("{}x{} system", a.nrows(), a.ncols())))?;
    let r = (a * &x - b).norm();
    if r > tol * b.norm().max(1.0) {
        return Err(Error::NotInvertible(format!("residual {r:e}")));
    }
    Ok(x)
}

/// Least-squares solve via SVD, returning the solution and the residual norm.
pub fn least_squares(a: &CMat, b: &CVec, rel_tol: f64) -> Result<(CVec, f64)> {
    let svd = a.clone().svd(true, true);
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let x = svd
        .solve(b, rel_tol * top)
        .map_err(|e| Error::NotInvertible(e.to_string()))?;
    let r = (a * &x - b).norm();
    Ok((x, r))
}

pub fn inverse(a: &CMat, tol: f64) -> Result<CMat> {
    let inv = a
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::NotInvertible(format!("{}x{} matrix", a.nrows(), a.ncols())))?;
    let r = (a * &inv - CMat::identity(a.nrows(), a.ncols())).norm();
    if r > tol * (a.nrows() as f64) {
        return Err(Error::NotInvertible(format!("residual {r:e}")));
    }
    Ok(inv)
}

/// Kronecker product.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn zeros(r: usize, c: usize) -> CMat {
    CMat::from_element(r, c, C64::zero())
}

pub fn trace(m: &CMat) -> C64 {
    m.diagonal().iter().sum()
}
