//! The convex-split state ω = (1/M) Σ_m ρ_{A_m B} ⊗ τ^{⊗(others)}, its
//! exact distance to τ^{⊗M} ⊗ ρ_B, the linear map Θ behind the analysis,
//! and the one-shot and exponent bounds on the covering error.
//!
//! Tensor factors of every operator on A^M B are ordered `[A_1, …, A_M, B]`.

mod bounds;

pub use bounds::{
    converse_curve, converse_exponent, covering_exponent, direct_bound_components,
    exponent_upper_bound, exponent_upper_bound_from_curve, oneshot_converse_lower_bound,
    sample_complexity_bounds, sample_complexity_exact, sandwiched_info_curve,
    strong_converse_from_curve, strong_converse_lower_bound, RenyiCurve, SampleComplexity,
    SampleComplexityOptions,
};

use faer::Mat;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::info::marginal_b;
use crate::linalg;
use crate::operator::{nc_quotient, weighted_lp_norm, DensityOperator, HermitianOperator, RawOperator};
use crate::report::BoundReport;
use crate::testkit::{ginibre, Seed};
use crate::C64;

/// Largest dA^M·dB the exact evaluators will build.
pub const DEFAULT_MAX_TOTAL_DIM: usize = 4096;

/// Slack allowed when comparing an empirical ratio with its analytic bound.
pub const BOUND_SLACK: f64 = 1e-9;

/// dA^M·dB, or `None` on overflow.
pub fn total_dim(d_a: usize, d_b: usize, m: usize) -> Option<usize> {
    u32::try_from(m).ok().and_then(|m| d_a.checked_pow(m)).and_then(|x| x.checked_mul(d_b))
}

/// Total dimension of A^M B, or an error if it exceeds `budget`.
pub fn check_budget(d_a: usize, d_b: usize, m: usize, budget: usize) -> Result<usize> {
    match total_dim(d_a, d_b, m) {
        Some(t) if t <= budget => Ok(t),
        Some(t) => Err(Error::BudgetExceeded { total: t, budget }),
        None => Err(Error::BudgetExceeded {
            total: usize::MAX,
            budget,
        }),
    }
}

fn bipartite_dims(rho: &HermitianOperator) -> Result<(usize, usize)> {
    match rho.dims() {
        [a, b] => Ok((*a, *b)),
        d => Err(Error::DimensionMismatch(format!(
            "expected a bipartite operator [dA, dB], got dims {d:?}"
        ))),
    }
}

/// A covering instance (ρ_AB, τ_A, M).
#[derive(Clone, Debug)]
pub struct ConvexSplitInstance {
    rho: DensityOperator,
    tau: DensityOperator,
    m: usize,
    max_total_dim: usize,
}

impl ConvexSplitInstance {
    pub fn new(rho: DensityOperator, tau: DensityOperator, m: usize) -> Result<Self> {
        Self::with_budget(rho, tau, m, DEFAULT_MAX_TOTAL_DIM)
    }

    /// Rejects M = 0, mismatched dims, ρ_A leaking out of supp τ_A and
    /// dA^M·dB above `max_total_dim`.
    pub fn with_budget(
        rho: DensityOperator,
        tau: DensityOperator,
        m: usize,
        max_total_dim: usize,
    ) -> Result<Self> {
        let (d_a, d_b) = bipartite_dims(&rho)?;
        if tau.dims() != [d_a] {
            return Err(Error::DimensionMismatch(format!(
                "tau dims {:?} vs A dimension {d_a}",
                tau.dims()
            )));
        }
        if m == 0 {
            return Err(Error::InvalidParameter("M must be at least 1".into()));
        }
        check_budget(d_a, d_b, m, max_total_dim)?;
        let rho_a = rho.partial_trace(&[0])?;
        let leak = 1.0 - rho_a.trace_with(&tau.support_projector()?);
        if leak > crate::divergences::SUPPORT_LEAK_TOL {
            return Err(Error::InvalidParameter(format!(
                "rho_A has mass {leak:.3e} outside the support of tau_A"
            )));
        }
        Ok(ConvexSplitInstance {
            rho,
            tau,
            m,
            max_total_dim,
        })
    }

    /// Same (ρ, τ, budget) with a different M.
    pub fn with_m(&self, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("M must be at least 1".into()));
        }
        check_budget(self.d_a(), self.d_b(), m, self.max_total_dim)?;
        Ok(ConvexSplitInstance { m, ..self.clone() })
    }

    pub fn rho(&self) -> &DensityOperator {
        &self.rho
    }

    pub fn tau(&self) -> &DensityOperator {
        &self.tau
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d_a(&self) -> usize {
        self.rho.dims()[0]
    }

    pub fn d_b(&self) -> usize {
        self.rho.dims()[1]
    }

    pub fn max_total_dim(&self) -> usize {
        self.max_total_dim
    }

    pub fn total_dim(&self) -> usize {
        total_dim(self.d_a(), self.d_b(), self.m).expect("checked at construction")
    }

    /// Dims `[dA; M, dB]` of operators on A^M B.
    pub fn output_dims(&self) -> Vec<usize> {
        output_dims(self.d_a(), self.d_b(), self.m)
    }

    pub fn rho_b(&self) -> Result<DensityOperator> {
        marginal_b(&self.rho)
    }

    /// τ^{⊗M} ⊗ ρ_B.
    pub fn reference_state(&self) -> Result<DensityOperator> {
        Ok(tensor_power(&self.tau, self.m).tensor(&self.rho_b()?))
    }
}

fn output_dims(d_a: usize, d_b: usize, m: usize) -> Vec<usize> {
    let mut dims = vec![d_a; m];
    dims.push(d_b);
    dims
}

/// τ^{⊗k} for k ≥ 1.
pub fn tensor_power(tau: &DensityOperator, k: usize) -> DensityOperator {
    let mut out = tau.clone();
    for _ in 1..k {
        out = out.tensor(tau);
    }
    out
}

/// Factor order taking `[A_slot, B, A_others…]` to `[A_1, …, A_M, B]`.
fn slot_order(slot: usize, m: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..m)
        .map(|j| match j.cmp(&slot) {
            std::cmp::Ordering::Equal => 0,
            std::cmp::Ordering::Less => j + 2,
            std::cmp::Ordering::Greater => j + 1,
        })
        .collect();
    order.push(1);
    order
}

/// (1/M) Σ_m x_{A_m B} ⊗ τ^{⊗(others)} for Hermitian x on AB.
fn split_average(x: &HermitianOperator, tau: &DensityOperator, m: usize) -> Result<HermitianOperator> {
    if m == 1 {
        return Ok(x.clone());
    }
    let rest = tensor_power(tau, m - 1);
    let joint = x.tensor(rest.op());
    let mut acc = joint.permute(&slot_order(0, m))?;
    for slot in 1..m {
        acc = acc.add_scaled(&joint.permute(&slot_order(slot, m))?, 1.0);
    }
    Ok(acc.scaled(1.0 / m as f64))
}

/// ω_{A_1…A_M B}.
pub fn build_convex_split_state(inst: &ConvexSplitInstance) -> Result<DensityOperator> {
    let omega = split_average(inst.rho.op(), &inst.tau, inst.m)?;
    Ok(DensityOperator::assume_valid(omega))
}

/// ω − τ^{⊗M} ⊗ ρ_B, accumulated as (1/M) Σ_m (ρ − τ⊗ρ_B)_{A_m B} ⊗ τ^{⊗(others)}.
pub fn covering_difference(inst: &ConvexSplitInstance) -> Result<HermitianOperator> {
    let product = inst.tau.tensor(&inst.rho_b()?);
    let x = inst.rho.op() - product.op();
    split_average(&x, &inst.tau, inst.m)
}

/// Δ^c_M(ρ_AB‖τ_A) = ½‖ω − τ^{⊗M} ⊗ ρ_B‖₁, from the full spectrum.
pub fn covering_error_exact(inst: &ConvexSplitInstance) -> Result<f64> {
    let diff = covering_difference(inst)?;
    Ok(0.5 * diff.eigenvalues()?.iter().map(|v| v.abs()).sum::<f64>())
}

/// Θ(x) = (1/M) Σ_m (π_m(x) − E_m(x)) for a general operator x on AB,
/// where π_m(x) = x_{A_m B} ⊗ 1 and E_m(x) = 1_{A^M} ⊗ Tr_A[x(τ_A ⊗ 1_B)].
pub fn theta_map_raw(x: &RawOperator, tau: &DensityOperator, m: usize) -> Result<RawOperator> {
    let (d_a, d_b) = match x.dims() {
        [a, b] => (*a, *b),
        d => {
            return Err(Error::DimensionMismatch(format!(
                "expected operator on [dA, dB], got dims {d:?}"
            )))
        }
    };
    if tau.dims() != [d_a] {
        return Err(Error::DimensionMismatch(format!(
            "tau dims {:?} vs A dimension {d_a}",
            tau.dims()
        )));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("M must be at least 1".into()));
    }
    let n = check_budget(d_a, d_b, m, DEFAULT_MAX_TOTAL_DIM)?;
    let tau_1 = tau.op().tensor(&HermitianOperator::identity(vec![d_b]));
    let z = x
        .weighted(&HermitianOperator::identity(x.dims().to_vec()), &tau_1)
        .partial_trace(&[1])?;
    let xm = x.matrix();
    let zm = z.matrix();
    let w = 1.0 / m as f64;
    let mut out = Mat::<C64>::zeros(n, n);
    let blocks = n / d_b;
    for row_a in 0..blocks {
        for b in 0..d_b {
            let row = row_a * d_b + b;
            for slot in 0..m {
                let stride = d_a.pow((m - 1 - slot) as u32);
                let a = (row_a / stride) % d_a;
                let base = row_a - a * stride;
                for a2 in 0..d_a {
                    let col_a = base + a2 * stride;
                    for b2 in 0..d_b {
                        out[(row, col_a * d_b + b2)] += xm[(a * d_b + b, a2 * d_b + b2)] * w;
                    }
                }
            }
            for b2 in 0..d_b {
                out[(row, row_a * d_b + b2)] -= zm[(b, b2)];
            }
        }
    }
    RawOperator::new(output_dims(d_a, d_b, m), out)
}

/// Θ on Hermitian inputs; the output is Hermitian.
pub fn theta_map(x: &HermitianOperator, tau: &DensityOperator, m: usize) -> Result<HermitianOperator> {
    let raw = theta_map_raw(&x.to_raw(), tau, m)?;
    HermitianOperator::new(raw.dims().to_vec(), linalg::hermitize(raw.matrix()))
}

/// ‖Θ(ρ/(τ⊗σ))‖_{1,γ,τ^{⊗M}⊗σ} with the quotient Y^{γ−1} ρ Y^{−γ}.
/// Equals ‖ω − τ^{⊗M} ⊗ ρ_B‖₁ whenever supp ρ_B ⊆ supp σ_B.
pub fn formulation_rhs(inst: &ConvexSplitInstance, sigma: &DensityOperator, gamma: f64) -> Result<f64> {
    if sigma.dims() != [inst.d_b()] {
        return Err(Error::DimensionMismatch(format!(
            "sigma dims {:?} vs B dimension {}",
            sigma.dims(),
            inst.d_b()
        )));
    }
    let y = inst.tau.tensor(sigma);
    let q = nc_quotient(inst.rho.op(), y.op(), gamma)?;
    if q.leaked() {
        return Err(Error::InvalidParameter(format!(
            "rho_AB has mass {:.3e} outside supp(tau ⊗ sigma)",
            q.support_leak
        )));
    }
    let theta = theta_map_raw(&q.op, &inst.tau, inst.m)?;
    let weight = tensor_power(&inst.tau, inst.m).tensor(sigma);
    weighted_lp_norm(&theta, 1.0, gamma, &weight)
}

/// 2^{2/p−1} M^{(1−p)/p}.
pub fn map_norm_bound(m: usize, p: f64) -> f64 {
    2f64.powf(2.0 / p - 1.0) * (m as f64).powf((1.0 - p) / p)
}

/// ‖diag(w)^{(1−γ)/p} z diag(w)^{γ/p}‖_p.
fn diag_weighted_norm(z: &RawOperator, w: &[f64], p: f64, gamma: f64) -> Result<f64> {
    let (l, r) = ((1.0 - gamma) / p, gamma / p);
    let lw: Vec<f64> = w.iter().map(|v| v.powf(l)).collect();
    let rw: Vec<f64> = w.iter().map(|v| v.powf(r)).collect();
    let zm = z.matrix();
    let n = w.len();
    let scaled = Mat::from_fn(n, n, |i, j| zm[(i, j)] * (lw[i] * rw[j]));
    RawOperator::new(z.dims().to_vec(), scaled)?.schatten_norm(p)
}

fn product_weights(factors: &[&[f64]]) -> Vec<f64> {
    factors.iter().fold(vec![1.0], |acc, f| {
        acc.iter().flat_map(|a| f.iter().map(move |b| a * b)).collect()
    })
}

fn random_operator(dim: usize, trial: usize, seed: Seed) -> Mat<C64> {
    let mut rng = seed.rng();
    if trial % 2 == 0 {
        ginibre(dim, dim, &mut rng)
    } else {
        let u = ginibre(dim, 1, &mut rng);
        let v = ginibre(1, dim, &mut rng);
        &u * &v
    }
}

/// Largest ‖Θ(x)‖_{p,γ,τ^{⊗M}⊗σ} / ‖x‖_{p,γ,τ⊗σ} over `trials` random x,
/// against 2^{2/p−1} M^{(1−p)/p}.
pub fn map_norm_check(
    tau: &DensityOperator,
    sigma: &DensityOperator,
    m: usize,
    p: f64,
    gamma: f64,
    trials: usize,
    seed: Seed,
) -> Result<BoundReport> {
    map_norm_check_with(tau, sigma, m, p, gamma, trials, seed, Execution::default())
}

/// As [`map_norm_check`] with an explicit execution mode.
///
/// Both weights are diagonalized first. Θ commutes with conjugation by
/// U_τ ⊗ U_σ and the random ensemble is unitarily invariant, so the
/// sampled ratios have the same law as in the original basis.
#[allow(clippy::too_many_arguments)]
pub fn map_norm_check_with(
    tau: &DensityOperator,
    sigma: &DensityOperator,
    m: usize,
    p: f64,
    gamma: f64,
    trials: usize,
    seed: Seed,
    exec: Execution,
) -> Result<BoundReport> {
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p = {p} not in [1, 2]")));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidParameter(format!("gamma = {gamma} not in [0, 1]")));
    }
    let (d_a, d_b) = (tau.dim(), sigma.dim());
    check_budget(d_a, d_b, m, DEFAULT_MAX_TOTAL_DIM)?;
    let t = tau.spectrum()?;
    let s = sigma.spectrum()?;
    let tau_d = DensityOperator::from_probabilities(vec![d_a], &t)?;
    let w_in = product_weights(&[&t, &s]);
    let mut out_factors: Vec<&[f64]> = vec![&t; m];
    out_factors.push(&s);
    let w_out = product_weights(&out_factors);
    let dim = d_a * d_b;
    let ratios = exec.map_range(trials, |k| -> Result<f64> {
        let x = RawOperator::new(vec![d_a, d_b], random_operator(dim, k, seed.derive(k as u64)))?;
        let den = diag_weighted_norm(&x, &w_in, p, gamma)?;
        if den == 0.0 {
            return Ok(0.0);
        }
        let num = diag_weighted_norm(&theta_map_raw(&x, &tau_d, m)?, &w_out, p, gamma)?;
        Ok(num / den)
    });
    let mut worst = 0.0f64;
    for r in ratios {
        worst = worst.max(r?);
    }
    let bound = map_norm_bound(m, p);
    let mut report = BoundReport::new("map_norm", worst)
        .with_param("M", m as f64)
        .with_param("p", p)
        .with_param("gamma", gamma)
        .with_param("bound", bound)
        .with_param("trials", trials as f64);
    report.valid = worst <= bound + BOUND_SLACK;
    if !report.valid {
        report.note("empirical ratio exceeds the analytic bound");
    }
    Ok(report)
}
