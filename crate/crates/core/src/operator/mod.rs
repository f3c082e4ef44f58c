//! Dense Hermitian operators on tensor-product spaces.
//!
//! [`HermitianOperator`] is the universal carrier: a square complex matrix
//! together with the list of tensor-factor dimensions it acts on. The
//! refinements [`DensityOperator`] and [`Test`] only add validated
//! invariants; they dereference to the underlying operator.
//!
//! All functions here are pure. Tolerances are collected in [`tol`].

mod json;
mod metrics;

use std::ops::{Add, Deref, Mul, Sub};

use faer::{Mat, MatRef};

use crate::error::{Error, Result};
use crate::linalg;
use crate::C64;

pub use json::{OperatorFile, OperatorKind};
pub use metrics::{
    fidelity, geometric_mean, nc_minimal_trace, nc_quotient, pinching, positive_part_projector,
    purified_distance, spec_count, trace_distance, weighted_lp_norm, Quotient,
};

/// Numerical tolerances shared by the operator layer.
pub mod tol {
    /// Max |m_ij − conj(m_ji)| accepted at construction.
    pub const HERMITIAN: f64 = 1e-10;
    /// Eigenvalues in [−PSD, 0) count as zero.
    pub const PSD: f64 = 1e-10;
    pub const TRACE: f64 = 1e-10;
    /// Support cutoff, relative to the largest |eigenvalue|.
    pub const SUPPORT_REL: f64 = 1e-10;
    /// Eigenvalues ≤ this are excluded from a strict positive part.
    pub const BOUNDARY: f64 = 1e-10;
    /// Eigenvalue clustering for pinching, relative to the operator norm.
    pub const CLUSTER_REL: f64 = 1e-8;
}

/// Sentinel for the operator (Schatten-∞) norm.
pub const P_INFINITY: f64 = f64::INFINITY;

fn check_dims(dims: &[usize], side: usize) -> Result<()> {
    if dims.contains(&0) || dims.iter().product::<usize>() != side {
        return Err(Error::DimsProduct {
            dims: dims.to_vec(),
            side,
        });
    }
    Ok(())
}

/// Row-major strides for a list of factor dimensions.
pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Linear offsets of every multi-index over `factors`, enumerated in
/// row-major order of those factors.
fn offsets(dims: &[usize], strides: &[usize], factors: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize];
    for &f in factors {
        let mut next = Vec::with_capacity(out.len() * dims[f]);
        for &base in &out {
            for i in 0..dims[f] {
                next.push(base + i * strides[f]);
            }
        }
        out = next;
    }
    out
}

/// Spectral decomposition `H = U diag(λ) U†` with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Columns are orthonormal eigenvectors.
    pub eigenvectors: Mat<C64>,
}

impl EigenDecomposition {
    pub fn recompose(&self) -> Mat<C64> {
        linalg::recompose(self.eigenvectors.as_ref(), &self.eigenvalues)
    }

    pub fn max_abs(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Scale-relative cutoff below which an eigenvalue is outside the support.
    pub fn support_tol(&self) -> f64 {
        tol::SUPPORT_REL * self.max_abs()
    }
}

/// Dense Hermitian matrix tagged with its tensor-factor dimensions.
#[derive(Clone, Debug)]
pub struct HermitianOperator {
    dims: Vec<usize>,
    mat: Mat<C64>,
}

impl HermitianOperator {
    /// Validates squareness, dims and Hermiticity, then stores the exactly
    /// Hermitian part.
    pub fn new(dims: Vec<usize>, mat: Mat<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::NotSquare {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        check_dims(&dims, mat.nrows())?;
        let asym = linalg::max_asymmetry(mat.as_ref());
        if asym > tol::HERMITIAN {
            return Err(Error::NotHermitian(asym));
        }
        Ok(Self::from_parts(dims, mat))
    }

    /// Internal constructor for matrices Hermitian by construction.
    pub(crate) fn from_parts(dims: Vec<usize>, mat: Mat<C64>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), mat.nrows());
        let mat = linalg::hermitize(mat.as_ref());
        HermitianOperator { dims, mat }
    }

    pub fn from_real_diagonal(dims: Vec<usize>, diag: &[f64]) -> Result<Self> {
        check_dims(&dims, diag.len())?;
        Ok(HermitianOperator {
            dims,
            mat: linalg::diagonal(diag),
        })
    }

    /// Builds from row-major complex entries.
    pub fn from_rows(dims: Vec<usize>, rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotSquare {
                rows: n,
                cols: rows.first().map_or(0, Vec::len),
            });
        }
        Self::new(dims, Mat::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn identity(dims: Vec<usize>) -> Self {
        let n = dims.iter().product();
        HermitianOperator {
            dims,
            mat: linalg::identity(n),
        }
    }

    pub fn zeros(dims: Vec<usize>) -> Self {
        let n = dims.iter().product();
        HermitianOperator {
            dims,
            mat: Mat::zeros(n, n),
        }
    }

    /// |ψ⟩⟨ψ| for a (not necessarily normalized) vector.
    pub fn outer(dims: Vec<usize>, psi: &[C64]) -> Result<Self> {
        check_dims(&dims, psi.len())?;
        let n = psi.len();
        Ok(Self::from_parts(
            dims,
            Mat::from_fn(n, n, |i, j| psi[i] * psi[j].conj()),
        ))
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> MatRef<'_, C64> {
        self.mat.as_ref()
    }

    pub fn into_matrix(self) -> Mat<C64> {
        self.mat
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(self.mat.as_ref()).re
    }

    /// Re Tr[self · other].
    pub fn trace_with(&self, other: &HermitianOperator) -> f64 {
        linalg::trace_product(self.mat.as_ref(), other.mat.as_ref()).re
    }

    pub fn frobenius_norm(&self) -> f64 {
        linalg::frobenius(self.mat.as_ref())
    }

    /// Same matrix, different factorization of the same total dimension.
    pub fn with_dims(&self, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, self.dim())?;
        Ok(HermitianOperator {
            dims,
            mat: self.mat.clone(),
        })
    }

    pub fn same_shape(&self, other: &HermitianOperator) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch(format!(
                "{:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        Ok(())
    }

    pub fn eig(&self) -> Result<EigenDecomposition> {
        let (eigenvalues, eigenvectors) = linalg::herm_eig(self.mat.as_ref())?;
        Ok(EigenDecomposition {
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        linalg::herm_eigvals(self.mat.as_ref())
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?.first().copied().unwrap_or(0.0))
    }

    /// Kronecker product; dims are concatenated.
    pub fn tensor(&self, other: &HermitianOperator) -> HermitianOperator {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        HermitianOperator {
            dims,
            mat: linalg::kron(self.mat.as_ref(), other.mat.as_ref()),
        }
    }

    /// Reduces to the factors in `keep` (order of `keep` is irrelevant;
    /// kept factors stay in their original order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<HermitianOperator> {
        let k = self.dims.len();
        for &index in keep {
            if index >= k {
                return Err(Error::IndexOutOfRange { index, factors: k });
            }
        }
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        let traced: Vec<usize> = (0..k).filter(|i| !kept.contains(i)).collect();
        let st = strides(&self.dims);
        let keep_off = offsets(&self.dims, &st, &kept);
        let trace_off = offsets(&self.dims, &st, &traced);
        let n = keep_off.len();
        let m = &self.mat;
        let out = Mat::from_fn(n, n, |r, c| {
            let (ro, co) = (keep_off[r], keep_off[c]);
            trace_off
                .iter()
                .map(|&t| m[(ro + t, co + t)])
                .sum::<C64>()
        });
        let dims = kept.iter().map(|&i| self.dims[i]).collect();
        Ok(HermitianOperator::from_parts(dims, out))
    }

    /// Reorders tensor factors: new factor `j` is old factor `order[j]`.
    pub fn permute(&self, order: &[usize]) -> Result<HermitianOperator> {
        let map = permutation_map(&self.dims, order)?;
        let m = &self.mat;
        let n = map.len();
        let out = Mat::from_fn(n, n, |i, j| m[(map[i], map[j])]);
        let dims = order.iter().map(|&o| self.dims[o]).collect();
        Ok(HermitianOperator { dims, mat: out })
    }

    /// U diag(f(λ)) U†. With `support_only`, eigenvalues with
    /// |λ| ≤ support_tol map to 0 and `f` is never called on them.
    pub fn spectral_fn<F>(&self, f: F, support_only: bool) -> Result<HermitianOperator>
    where
        F: Fn(f64) -> f64,
    {
        let e = self.eig()?;
        let cut = e.support_tol();
        let mut vals = Vec::with_capacity(e.eigenvalues.len());
        for &l in &e.eigenvalues {
            let v = if support_only && l.abs() <= cut { 0.0 } else { f(l) };
            if !v.is_finite() {
                return Err(Error::UndefinedSpectralFn(l));
            }
            vals.push(v);
        }
        Ok(HermitianOperator::from_parts(
            self.dims.clone(),
            linalg::recompose(e.eigenvectors.as_ref(), &vals),
        ))
    }

    /// Power of a PSD operator. Tiny negative eigenvalues are clamped to 0,
    /// negative exponents act on the support only (pseudo-inverse
    /// convention), and exponent 0 returns the identity.
    pub fn psd_power(&self, s: f64) -> Result<HermitianOperator> {
        if s == 0.0 {
            return Ok(HermitianOperator::identity(self.dims.clone()));
        }
        let e = self.eig()?;
        Ok(psd_power_from_eig(&self.dims, &e, s))
    }

    /// Natural logarithm on the support (zero on the kernel).
    pub fn log_support(&self) -> Result<HermitianOperator> {
        let e = self.eig()?;
        let cut = e.support_tol();
        let vals: Vec<f64> = e
            .eigenvalues
            .iter()
            .map(|&l| if l > cut { l.ln() } else { 0.0 })
            .collect();
        Ok(HermitianOperator::from_parts(
            self.dims.clone(),
            linalg::recompose(e.eigenvectors.as_ref(), &vals),
        ))
    }

    /// Orthogonal projector onto the support (|λ| > support_tol).
    pub fn support_projector(&self) -> Result<HermitianOperator> {
        let e = self.eig()?;
        let cut = e.support_tol();
        let cols: Vec<usize> = (0..e.eigenvalues.len())
            .filter(|&k| e.eigenvalues[k].abs() > cut)
            .collect();
        Ok(HermitianOperator::from_parts(
            self.dims.clone(),
            linalg::projector(e.eigenvectors.as_ref(), &cols),
        ))
    }

    /// (Σ|λ_i|^p)^{1/p}; `p = P_INFINITY` gives the operator norm.
    pub fn schatten_norm(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidParameter(format!("Schatten p = {p} < 1")));
        }
        let vals = self.eigenvalues()?;
        Ok(schatten_from_values(vals.iter().map(|v| v.abs()), p))
    }

    /// Checks PSD within tolerance.
    pub fn check_psd(&self) -> Result<()> {
        let m = self.min_eigenvalue()?;
        if m < -tol::PSD {
            return Err(Error::NotPsd(m));
        }
        Ok(())
    }

    /// X A X† for a general square matrix X of matching size.
    pub fn conjugate(&self, x: MatRef<'_, C64>) -> HermitianOperator {
        let xa = linalg::adjoint(x);
        let prod = &(x * self.mat.as_ref()) * &xa;
        HermitianOperator::from_parts(self.dims.clone(), prod)
    }

    /// self · other · self for Hermitian `self`.
    pub fn sandwich(&self, other: &HermitianOperator) -> HermitianOperator {
        let prod = &(&self.mat * &other.mat) * &self.mat;
        HermitianOperator::from_parts(other.dims.clone(), prod)
    }

    pub fn scaled(&self, s: f64) -> HermitianOperator {
        HermitianOperator {
            dims: self.dims.clone(),
            mat: linalg::scale(self.mat.as_ref(), s),
        }
    }

    /// self + s·other.
    pub fn add_scaled(&self, other: &HermitianOperator, s: f64) -> HermitianOperator {
        HermitianOperator {
            dims: self.dims.clone(),
            mat: linalg::add_scaled(self.mat.as_ref(), other.mat.as_ref(), s),
        }
    }

    /// Matrix product as a raw (generally non-Hermitian) operator.
    pub fn product(&self, other: &HermitianOperator) -> RawOperator {
        RawOperator {
            dims: self.dims.clone(),
            mat: &self.mat * &other.mat,
        }
    }

    pub fn to_raw(&self) -> RawOperator {
        RawOperator {
            dims: self.dims.clone(),
            mat: self.mat.clone(),
        }
    }

    /// Max entrywise distance.
    pub fn max_abs_diff(&self, other: &HermitianOperator) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for i in 0..n {
                worst = worst.max((self.mat[(i, j)] - other.mat[(i, j)]).norm());
            }
        }
        worst
    }
}

pub(crate) fn psd_power_from_eig(dims: &[usize], e: &EigenDecomposition, s: f64) -> HermitianOperator {
    let cut = e.support_tol();
    let vals: Vec<f64> = e
        .eigenvalues
        .iter()
        .map(|&l| if l > cut { l.powf(s) } else { 0.0 })
        .collect();
    HermitianOperator::from_parts(
        dims.to_vec(),
        linalg::recompose(e.eigenvectors.as_ref(), &vals),
    )
}

pub(crate) fn schatten_from_values<I: Iterator<Item = f64>>(abs_vals: I, p: f64) -> f64 {
    if p.is_infinite() {
        abs_vals.fold(0.0, f64::max)
    } else if p == 1.0 {
        abs_vals.sum()
    } else {
        abs_vals.map(|v| v.powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// For every new linear index, the old linear index under a factor
/// permutation.
pub(crate) fn permutation_map(dims: &[usize], order: &[usize]) -> Result<Vec<usize>> {
    let k = dims.len();
    let mut seen = vec![false; k];
    if order.len() != k {
        return Err(Error::InvalidParameter(format!(
            "permutation {order:?} for {k} factors"
        )));
    }
    for &o in order {
        if o >= k {
            return Err(Error::IndexOutOfRange { index: o, factors: k });
        }
        if seen[o] {
            return Err(Error::InvalidParameter(format!("repeated factor in {order:?}")));
        }
        seen[o] = true;
    }
    let st = strides(dims);
    Ok(offsets(dims, &st, order))
}

impl Add for &HermitianOperator {
    type Output = HermitianOperator;
    fn add(self, rhs: &HermitianOperator) -> HermitianOperator {
        self.add_scaled(rhs, 1.0)
    }
}

impl Sub for &HermitianOperator {
    type Output = HermitianOperator;
    fn sub(self, rhs: &HermitianOperator) -> HermitianOperator {
        self.add_scaled(rhs, -1.0)
    }
}

impl Mul<f64> for &HermitianOperator {
    type Output = HermitianOperator;
    fn mul(self, rhs: f64) -> HermitianOperator {
        self.scaled(rhs)
    }
}

/// A PSD, unit-trace operator.
#[derive(Clone, Debug)]
pub struct DensityOperator(HermitianOperator);

impl DensityOperator {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let tr = op.trace();
        if (tr - 1.0).abs() > tol::TRACE {
            return Err(Error::TraceNotOne(tr));
        }
        op.check_psd()?;
        Ok(DensityOperator(op))
    }

    /// Rescales a PSD operator to unit trace.
    pub fn normalized(op: HermitianOperator) -> Result<Self> {
        let tr = op.trace();
        if !(tr > 0.0) {
            return Err(Error::TraceNotOne(tr));
        }
        Self::new(op.scaled(1.0 / tr))
    }

    /// For operators that are states by construction (partial traces,
    /// mixtures, products of states).
    pub(crate) fn assume_valid(op: HermitianOperator) -> Self {
        DensityOperator(op)
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let n: usize = dims.iter().product();
        DensityOperator(HermitianOperator::identity(dims).scaled(1.0 / n as f64))
    }

    pub fn from_probabilities(dims: Vec<usize>, p: &[f64]) -> Result<Self> {
        Self::new(HermitianOperator::from_real_diagonal(dims, p)?)
    }

    /// Normalized |ψ⟩⟨ψ|.
    pub fn pure(dims: Vec<usize>, psi: &[C64]) -> Result<Self> {
        Self::normalized(HermitianOperator::outer(dims, psi)?)
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.0
    }

    pub fn into_op(self) -> HermitianOperator {
        self.0
    }

    /// Eigenvalues with the tiny negative ones clamped to 0.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        Ok(self.0.eigenvalues()?.into_iter().map(|v| v.max(0.0)).collect())
    }

    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        DensityOperator(self.0.tensor(&other.0))
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityOperator> {
        Ok(DensityOperator(self.0.partial_trace(keep)?))
    }

    pub fn permute(&self, order: &[usize]) -> Result<DensityOperator> {
        Ok(DensityOperator(self.0.permute(order)?))
    }

    /// (1−w)·self + w·other.
    pub fn mix(&self, other: &DensityOperator, w: f64) -> Result<DensityOperator> {
        self.0.same_shape(&other.0)?;
        Ok(DensityOperator(self.0.scaled(1.0 - w).add_scaled(&other.0, w)))
    }

    pub fn purity(&self) -> f64 {
        self.0.trace_with(&self.0)
    }

    pub fn is_full_rank(&self) -> Result<bool> {
        let e = self.spectrum()?;
        let max = e.iter().fold(0.0f64, |a, &b| a.max(b));
        Ok(e.iter().all(|&v| v > tol::SUPPORT_REL * max))
    }
}

impl Deref for DensityOperator {
    type Target = HermitianOperator;
    fn deref(&self) -> &HermitianOperator {
        &self.0
    }
}

/// An operator with 0 ≤ T ≤ 1.
#[derive(Clone, Debug)]
pub struct Test(HermitianOperator);

impl Test {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let vals = op.eigenvalues()?;
        if let Some(&lo) = vals.first() {
            if lo < -tol::PSD {
                return Err(Error::NotATest(lo));
            }
        }
        if let Some(&hi) = vals.last() {
            if hi > 1.0 + tol::PSD {
                return Err(Error::NotATest(hi));
            }
        }
        Ok(Test(op))
    }

    pub(crate) fn assume_valid(op: HermitianOperator) -> Self {
        Test(op)
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.0
    }

    pub fn into_op(self) -> HermitianOperator {
        self.0
    }

    /// 1 − T.
    pub fn complement(&self) -> Test {
        Test(HermitianOperator::identity(self.0.dims.clone()).add_scaled(&self.0, -1.0))
    }
}

impl Deref for Test {
    type Target = HermitianOperator;
    fn deref(&self) -> &HermitianOperator {
        &self.0
    }
}

/// A general square complex matrix with factor dimensions; the output of
/// non-Hermitian constructions such as the noncommutative quotient.
#[derive(Clone, Debug)]
pub struct RawOperator {
    dims: Vec<usize>,
    mat: Mat<C64>,
}

impl RawOperator {
    pub fn new(dims: Vec<usize>, mat: Mat<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::NotSquare {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        check_dims(&dims, mat.nrows())?;
        Ok(RawOperator { dims, mat })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> MatRef<'_, C64> {
        self.mat.as_ref()
    }

    pub fn trace(&self) -> C64 {
        linalg::trace(self.mat.as_ref())
    }

    pub fn adjoint(&self) -> RawOperator {
        RawOperator {
            dims: self.dims.clone(),
            mat: linalg::adjoint(self.mat.as_ref()),
        }
    }

    pub fn add_scaled(&self, other: &RawOperator, s: f64) -> RawOperator {
        RawOperator {
            dims: self.dims.clone(),
            mat: linalg::add_scaled(self.mat.as_ref(), other.mat.as_ref(), s),
        }
    }

    pub fn scaled(&self, s: f64) -> RawOperator {
        RawOperator {
            dims: self.dims.clone(),
            mat: linalg::scale(self.mat.as_ref(), s),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        linalg::frobenius(self.mat.as_ref())
    }

    /// (Σ s_i^p)^{1/p} over singular values.
    pub fn schatten_norm(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidParameter(format!("Schatten p = {p} < 1")));
        }
        if p == 2.0 {
            return Ok(self.frobenius_norm());
        }
        let sv = linalg::singular_values(self.mat.as_ref())?;
        Ok(schatten_from_values(sv.into_iter(), p))
    }

    /// Left and right multiplication by Hermitian operators: l · self · r.
    pub fn weighted(&self, left: &HermitianOperator, right: &HermitianOperator) -> RawOperator {
        RawOperator {
            dims: self.dims.clone(),
            mat: &(left.matrix() * self.mat.as_ref()) * right.matrix(),
        }
    }

    /// Kronecker product with dims concatenated.
    pub fn tensor(&self, other: &RawOperator) -> RawOperator {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        RawOperator {
            dims,
            mat: linalg::kron(self.mat.as_ref(), other.mat.as_ref()),
        }
    }

    pub fn permute(&self, order: &[usize]) -> Result<RawOperator> {
        let map = permutation_map(&self.dims, order)?;
        let m = &self.mat;
        let n = map.len();
        let out = Mat::from_fn(n, n, |i, j| m[(map[i], map[j])]);
        let dims = order.iter().map(|&o| self.dims[o]).collect();
        Ok(RawOperator { dims, mat: out })
    }

    /// Partial trace keeping `keep` (in original order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<RawOperator> {
        let k = self.dims.len();
        for &index in keep {
            if index >= k {
                return Err(Error::IndexOutOfRange { index, factors: k });
            }
        }
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        let traced: Vec<usize> = (0..k).filter(|i| !kept.contains(i)).collect();
        let st = strides(&self.dims);
        let keep_off = offsets(&self.dims, &st, &kept);
        let trace_off = offsets(&self.dims, &st, &traced);
        let n = keep_off.len();
        let m = &self.mat;
        let out = Mat::from_fn(n, n, |r, c| {
            trace_off
                .iter()
                .map(|&t| m[(keep_off[r] + t, keep_off[c] + t)])
                .sum::<C64>()
        });
        Ok(RawOperator {
            dims: kept.iter().map(|&i| self.dims[i]).collect(),
            mat: out,
        })
    }

    /// Hermitian part ½(X + X†).
    pub fn hermitian_part(&self) -> HermitianOperator {
        HermitianOperator::from_parts(self.dims.clone(), self.mat.clone())
    }
}

impl From<&HermitianOperator> for RawOperator {
    fn from(h: &HermitianOperator) -> Self {
        h.to_raw()
    }
}
