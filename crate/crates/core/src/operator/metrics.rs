use faer::Mat;

use super::{psd_power_from_eig, tol, DensityOperator, HermitianOperator, RawOperator, Test};
use crate::error::{Error, Result};
use crate::linalg;

/// ½‖ρ − σ‖₁.
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    rho.same_shape(sigma)?;
    let d = rho.op() - sigma.op();
    Ok((0.5 * d.schatten_norm(1.0)?).clamp(0.0, 1.0))
}

/// ‖√ρ√σ‖₁, computed as Tr √(√ρ σ √ρ).
pub fn fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    rho.same_shape(sigma)?;
    let sq = rho.psd_power(0.5)?;
    let inner = sq.sandwich(sigma.op());
    let f: f64 = inner
        .eigenvalues()?
        .into_iter()
        .map(|v| v.max(0.0).sqrt())
        .sum();
    Ok(f.clamp(0.0, 1.0))
}

/// √(1 − F²).
pub fn purified_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    let f = fidelity(rho, sigma)?;
    Ok((1.0 - f * f).max(0.0).sqrt())
}

/// Projector onto the strictly positive eigenspace of a − b.
pub fn positive_part_projector(a: &HermitianOperator, b: &HermitianOperator) -> Result<Test> {
    a.same_shape(b)?;
    let e = (a - b).eig()?;
    let cols: Vec<usize> = (0..e.eigenvalues.len())
        .filter(|&k| e.eigenvalues[k] > tol::BOUNDARY)
        .collect();
    Ok(Test::assume_valid(HermitianOperator::from_parts(
        a.dims().to_vec(),
        linalg::projector(e.eigenvectors.as_ref(), &cols),
    )))
}

/// Tr[A ∧ B] = ½(Tr A + Tr B − ‖A − B‖₁).
pub fn nc_minimal_trace(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    a.same_shape(b)?;
    a.check_psd()?;
    b.check_psd()?;
    let n1 = (a - b).schatten_norm(1.0)?;
    Ok((0.5 * (a.trace() + b.trace() - n1)).max(0.0))
}

/// Groups ascending eigenvalues into clusters separated by gaps larger
/// than the cluster tolerance. Returns the cluster label of each index.
fn clusters(vals: &[f64]) -> (Vec<usize>, usize) {
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let gap = tol::CLUSTER_REL * scale;
    let mut labels = Vec::with_capacity(vals.len());
    let mut current = 0;
    for (k, &v) in vals.iter().enumerate() {
        if k > 0 && v - vals[k - 1] > gap {
            current += 1;
        }
        labels.push(current);
    }
    let count = if vals.is_empty() { 0 } else { current + 1 };
    (labels, count)
}

/// Number of distinct eigenvalues of `h` up to the cluster tolerance.
pub fn spec_count(h: &HermitianOperator) -> Result<usize> {
    Ok(clusters(&h.eigenvalues()?).1)
}

/// Σ_i e_i l e_i over the spectral projectors e_i of `h`.
pub fn pinching(h: &HermitianOperator, l: &HermitianOperator) -> Result<HermitianOperator> {
    h.same_shape(l)?;
    let e = h.eig()?;
    let (labels, _) = clusters(&e.eigenvalues);
    let u = e.eigenvectors.as_ref();
    let ua = linalg::adjoint(u);
    let inner = &(&ua * l.matrix()) * u;
    let n = inner.nrows();
    let masked = Mat::from_fn(n, n, |i, j| {
        if labels[i] == labels[j] {
            inner[(i, j)]
        } else {
            linalg::zero()
        }
    });
    let out = &(u * &masked) * &ua;
    Ok(HermitianOperator::from_parts(l.dims().to_vec(), out))
}

/// Result of the asymmetric noncommutative quotient.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub op: RawOperator,
    /// Tr[(1 − Π_y) x]: mass of x outside the support of y.
    pub support_leak: f64,
}

impl Quotient {
    pub fn leaked(&self) -> bool {
        self.support_leak > 1e-8
    }
}

/// Y^{γ−1} X Y^{−γ}, with negative powers taken on the support of Y.
pub fn nc_quotient(x: &HermitianOperator, y: &HermitianOperator, gamma: f64) -> Result<Quotient> {
    x.same_shape(y)?;
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidParameter(format!("quotient gamma {gamma} not in [0,1]")));
    }
    x.check_psd()?;
    y.check_psd()?;
    let e = y.eig()?;
    let cut = e.support_tol();
    let cols: Vec<usize> = (0..e.eigenvalues.len())
        .filter(|&k| e.eigenvalues[k] > cut)
        .collect();
    let supp = linalg::projector(e.eigenvectors.as_ref(), &cols);
    let leak = x.trace() - linalg::trace_product(supp.as_ref(), x.matrix()).re;
    let left = power_or_identity(y.dims(), &e, gamma - 1.0);
    let right = power_or_identity(y.dims(), &e, -gamma);
    let op = x.to_raw().weighted(&left, &right);
    Ok(Quotient {
        op,
        support_leak: leak.max(0.0),
    })
}

fn power_or_identity(
    dims: &[usize],
    e: &super::EigenDecomposition,
    s: f64,
) -> HermitianOperator {
    if s == 0.0 {
        HermitianOperator::identity(dims.to_vec())
    } else {
        psd_power_from_eig(dims, e, s)
    }
}

/// (Tr |σ^{(1−γ)/p} x σ^{γ/p}|^p)^{1/p}.
pub fn weighted_lp_norm(
    x: &RawOperator,
    p: f64,
    gamma: f64,
    sigma: &DensityOperator,
) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidParameter(format!("weighted norm p = {p} < 1")));
    }
    if x.dims() != sigma.dims() {
        return Err(Error::DimensionMismatch(format!(
            "{:?} vs {:?}",
            x.dims(),
            sigma.dims()
        )));
    }
    let (l_exp, r_exp) = if p.is_infinite() {
        (0.0, 0.0)
    } else {
        ((1.0 - gamma) / p, gamma / p)
    };
    let e = sigma.eig()?;
    let left = power_or_identity(sigma.dims(), &e, l_exp);
    let right = power_or_identity(sigma.dims(), &e, r_exp);
    x.weighted(&left, &right).schatten_norm(p)
}

/// X # Y = X^{1/2}(X^{−1/2} Y X^{−1/2})^{1/2} X^{1/2}.
pub fn geometric_mean(x: &HermitianOperator, y: &HermitianOperator) -> Result<HermitianOperator> {
    x.same_shape(y)?;
    for m in [x, y] {
        let e = m.eigenvalues()?;
        let lo = e.first().copied().unwrap_or(0.0);
        let hi = e.last().copied().unwrap_or(0.0);
        if lo <= tol::SUPPORT_REL * hi.abs() {
            return Err(Error::NotPositiveDefinite(lo));
        }
    }
    let ex = x.eig()?;
    let xh = psd_power_from_eig(x.dims(), &ex, 0.5);
    let xih = psd_power_from_eig(x.dims(), &ex, -0.5);
    let mid = xih.sandwich(y).psd_power(0.5)?;
    Ok(xh.sandwich(&mid))
}
