//! Thin dense helpers over faer used by the operator layer.

use faer::{Mat, MatRef, Side};

use crate::error::{Error, Result};
use crate::C64;

pub(crate) fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

pub(crate) fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub(crate) fn identity(n: usize) -> Mat<C64> {
    Mat::from_fn(n, n, |i, j| if i == j { real(1.0) } else { zero() })
}

pub(crate) fn diagonal(vals: &[f64]) -> Mat<C64> {
    let n = vals.len();
    Mat::from_fn(n, n, |i, j| if i == j { real(vals[i]) } else { zero() })
}

pub(crate) fn adjoint(m: MatRef<'_, C64>) -> Mat<C64> {
    Mat::from_fn(m.ncols(), m.nrows(), |i, j| m[(j, i)].conj())
}

/// Largest |m_ij − conj(m_ji)|.
pub(crate) fn max_asymmetry(m: MatRef<'_, C64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// ½(m + m†).
pub(crate) fn hermitize(m: MatRef<'_, C64>) -> Mat<C64> {
    let n = m.nrows();
    Mat::from_fn(n, n, |i, j| {
        if i == j {
            real(m[(i, i)].re)
        } else {
            (m[(i, j)] + m[(j, i)].conj()) * 0.5
        }
    })
}

pub(crate) fn trace(m: MatRef<'_, C64>) -> C64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

/// Tr[a b] without forming the product.
pub(crate) fn trace_product(a: MatRef<'_, C64>, b: MatRef<'_, C64>) -> C64 {
    let n = a.nrows();
    let mut acc = zero();
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub(crate) fn frobenius(m: MatRef<'_, C64>) -> f64 {
    let mut acc = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            acc += m[(i, j)].norm_sqr();
        }
    }
    acc.sqrt()
}

pub(crate) fn kron(a: MatRef<'_, C64>, b: MatRef<'_, C64>) -> Mat<C64> {
    a.kron(b)
}

pub(crate) fn scale(m: MatRef<'_, C64>, s: f64) -> Mat<C64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * s)
}

pub(crate) fn add_scaled(a: MatRef<'_, C64>, b: MatRef<'_, C64>, s: f64) -> Mat<C64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] + b[(i, j)] * s)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub(crate) fn herm_eig(m: MatRef<'_, C64>) -> Result<(Vec<f64>, Mat<C64>)> {
    let n = m.nrows();
    if n == 0 {
        return Ok((Vec::new(), Mat::zeros(0, 0)));
    }
    let evd = m.self_adjoint_eigen(Side::Lower).map_err(|_| Error::Eigensolver)?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[a].re.total_cmp(&s[b].re));
    let vals: Vec<f64> = order.iter().map(|&k| s[k].re).collect();
    let vecs = Mat::from_fn(n, n, |i, j| u[(i, order[j])]);
    Ok((vals, vecs))
}

/// Eigenvalues only, ascending.
pub(crate) fn herm_eigvals(m: MatRef<'_, C64>) -> Result<Vec<f64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let mut vals = m
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::Eigensolver)?;
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

pub(crate) fn singular_values(m: MatRef<'_, C64>) -> Result<Vec<f64>> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(Vec::new());
    }
    m.singular_values().map_err(|_| Error::Eigensolver)
}

/// U diag(vals) U†.
pub(crate) fn recompose(u: MatRef<'_, C64>, vals: &[f64]) -> Mat<C64> {
    let n = u.nrows();
    let scaled = Mat::from_fn(n, vals.len(), |i, j| u[(i, j)] * vals[j]);
    let ua = adjoint(u);
    hermitize((&scaled * &ua).as_ref())
}

/// Σ_{j ∈ cols} u_j u_j†.
pub(crate) fn projector(u: MatRef<'_, C64>, cols: &[usize]) -> Mat<C64> {
    let n = u.nrows();
    let sub = Mat::from_fn(n, cols.len(), |i, j| u[(i, cols[j])]);
    let suba = adjoint(sub.as_ref());
    hermitize((&sub * &suba).as_ref())
}
