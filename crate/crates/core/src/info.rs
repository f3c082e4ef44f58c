//! Optimized information quantities of a bipartite state ρ_AB.
//!
//! Every function here takes ρ_AB with exactly two tensor factors `[dA, dB]`;
//! composite systems are regrouped with [`HermitianOperator::with_dims`]
//! first.

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::neldermead::NelderMead;

use crate::divergences::{
    hypothesis_testing_divergence, petz_renyi, relative_entropy, sandwiched_renyi,
    DivergenceValue,
};
use crate::error::{Error, Result};
use crate::operator::{DensityOperator, HermitianOperator};
use crate::C64;

/// Fixed-point stopping tolerance (trace norm).
pub const FP_TOL: f64 = 1e-9;
pub const FP_MAX_ITERS: usize = 5000;
/// Weight of the identity mixed into rank-deficient inputs.
pub const RANK_PERTURBATION: f64 = 1e-12;

fn bipartite(rho: &HermitianOperator) -> Result<(usize, usize)> {
    match rho.dims() {
        [a, b] => Ok((*a, *b)),
        d => Err(Error::DimensionMismatch(format!(
            "expected a bipartite state [dA, dB], got dims {d:?}"
        ))),
    }
}

fn check_tau(rho: &DensityOperator, tau: &DensityOperator) -> Result<()> {
    let (da, _) = bipartite(rho)?;
    if tau.dims() != [da] {
        return Err(Error::DimensionMismatch(format!(
            "tau dims {:?} vs A dimension {da}",
            tau.dims()
        )));
    }
    Ok(())
}

/// ρ_B.
pub fn marginal_b(rho: &DensityOperator) -> Result<DensityOperator> {
    rho.partial_trace(&[1])
}

/// ρ_A.
pub fn marginal_a(rho: &DensityOperator) -> Result<DensityOperator> {
    rho.partial_trace(&[0])
}

/// I(ρ_AB‖τ_A) = D(ρ_AB ‖ τ_A ⊗ ρ_B).
pub fn generalized_mutual_information(
    rho: &DensityOperator,
    tau: &DensityOperator,
) -> Result<DivergenceValue> {
    check_tau(rho, tau)?;
    relative_entropy(rho, &tau.tensor(&marginal_b(rho)?))
}

/// I(A:B)_ρ.
pub fn mutual_information(rho: &DensityOperator) -> Result<DivergenceValue> {
    bipartite(rho)?;
    generalized_mutual_information(rho, &marginal_a(rho)?)
}

/// I^↑_α(A:B) = D_α(ρ_AB ‖ ρ_A ⊗ ρ_B).
pub fn petz_up_information(rho: &DensityOperator, alpha: f64) -> Result<DivergenceValue> {
    bipartite(rho)?;
    petz_renyi(rho, &marginal_a(rho)?.tensor(&marginal_b(rho)?), alpha)
}

/// Outcome of a fixed-point minimization over product states.
#[derive(Clone, Debug)]
pub struct FixedPointResult {
    /// D_α* at the returned point, in nats.
    pub value: f64,
    pub tau_star: DensityOperator,
    pub sigma_star: DensityOperator,
    /// Max trace-norm defect of the fixed-point equations.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Identity weight mixed into ρ before iterating (0 if full rank).
    pub perturbation: f64,
}

/// Quantities of the map (τ, σ) ↦ (W ρ W)^α, W = (τ ⊗ σ)^{(1−α)/2α}.
struct Inner {
    q: f64,
    /// Tr_B[(WρW)^α] / q.
    tau_map: HermitianOperator,
    /// Tr_A[(WρW)^α] / q.
    sigma_map: HermitianOperator,
}

fn inner(rho: &HermitianOperator, tau: &HermitianOperator, sigma: &HermitianOperator, alpha: f64) -> Result<Inner> {
    let s = (1.0 - alpha) / (2.0 * alpha);
    let w = tau.psd_power(s)?.tensor(&sigma.psd_power(s)?);
    let m = w.sandwich(rho);
    let e = m.eig()?;
    let vals: Vec<f64> = e.eigenvalues.iter().map(|&v| v.max(0.0).powf(alpha)).collect();
    let q: f64 = vals.iter().sum();
    let x = HermitianOperator::from_parts(
        rho.dims().to_vec(),
        crate::linalg::recompose(e.eigenvectors.as_ref(), &vals),
    );
    Ok(Inner {
        q,
        tau_map: x.partial_trace(&[0])?.scaled(1.0 / q),
        sigma_map: x.partial_trace(&[1])?.scaled(1.0 / q),
    })
}

fn trace_norm_diff(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    (a - b).schatten_norm(1.0)
}

/// Mixes a rank-deficient state with a tiny multiple of the identity.
fn regularize(rho: &DensityOperator) -> Result<(DensityOperator, f64)> {
    if rho.is_full_rank()? {
        return Ok((rho.clone(), 0.0));
    }
    let mixed = DensityOperator::maximally_mixed(rho.dims().to_vec());
    Ok((rho.mix(&mixed, RANK_PERTURBATION)?, RANK_PERTURBATION))
}

/// One damped, backtracked update of the second argument. Returns the new
/// point and its quasi-entropy.
fn damped_step<F>(
    current: &HermitianOperator,
    target: &HermitianOperator,
    q_now: f64,
    alpha: f64,
    eval: F,
) -> Result<(HermitianOperator, f64)>
where
    F: Fn(&HermitianOperator) -> Result<f64>,
{
    let mut beta = 1.0 / alpha;
    for _ in 0..12 {
        let cand = current.scaled(1.0 - beta).add_scaled(target, beta);
        let q = eval(&cand)?;
        if q <= q_now * (1.0 + 1e-14) {
            return Ok((cand, q));
        }
        beta *= 0.5;
    }
    Ok((current.clone(), q_now))
}

fn quasi_to_value(q: f64, alpha: f64) -> f64 {
    q.ln() / (alpha - 1.0)
}

fn check_alpha_above_one(alpha: f64) -> Result<()> {
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "order {alpha} must be in (1, inf) for the fixed-point solver"
        )));
    }
    Ok(())
}

/// I_α*(ρ_AB‖τ_A) = inf_σ D_α*(ρ_AB ‖ τ_A ⊗ σ_B), by damped fixed-point
/// iteration on σ from ρ_B.
pub fn sandwiched_renyi_information(
    rho: &DensityOperator,
    tau: &DensityOperator,
    alpha: f64,
) -> Result<FixedPointResult> {
    check_tau(rho, tau)?;
    check_alpha_above_one(alpha)?;
    let (work, perturbation) = regularize(rho)?;
    let t = tau.op();
    let mut sigma = marginal_b(&work)?.into_op();
    let mut cur = inner(&work, t, &sigma, alpha)?;
    let mut residual = trace_norm_diff(&sigma, &cur.sigma_map)?;
    let mut iterations = 0;
    while residual > FP_TOL && iterations < FP_MAX_ITERS {
        let (next, _) = damped_step(&sigma, &cur.sigma_map, cur.q, alpha, |s| {
            Ok(inner(&work, t, s, alpha)?.q)
        })?;
        iterations += 1;
        let stalled = next.max_abs_diff(&sigma) == 0.0;
        sigma = next;
        cur = inner(&work, t, &sigma, alpha)?;
        residual = trace_norm_diff(&sigma, &cur.sigma_map)?;
        if stalled {
            break;
        }
    }
    let sigma_star = DensityOperator::assume_valid(sigma.scaled(1.0 / sigma.trace()));
    let value = sandwiched_renyi(rho, &tau.tensor(&sigma_star), alpha)?.nats;
    Ok(FixedPointResult {
        value,
        tau_star: tau.clone(),
        sigma_star,
        residual,
        iterations,
        converged: residual <= FP_TOL,
        perturbation,
    })
}

/// I^{↓↓}_α(A:B) = inf_{τ,σ} D_α*(ρ_AB ‖ τ_A ⊗ σ_B), by alternating damped
/// fixed-point steps from the marginals.
pub fn doubly_minimized_info(rho: &DensityOperator, alpha: f64) -> Result<FixedPointResult> {
    doubly_minimized_trace(rho, alpha, |_| {})
}

/// As [`doubly_minimized_info`], reporting the objective after every
/// half-step to `observe`.
pub fn doubly_minimized_trace<O>(
    rho: &DensityOperator,
    alpha: f64,
    mut observe: O,
) -> Result<FixedPointResult>
where
    O: FnMut(f64),
{
    bipartite(rho)?;
    check_alpha_above_one(alpha)?;
    let (work, perturbation) = regularize(rho)?;
    let mut tau = marginal_a(&work)?.into_op();
    let mut sigma = marginal_b(&work)?.into_op();
    let mut cur = inner(&work, &tau, &sigma, alpha)?;
    observe(quasi_to_value(cur.q, alpha));
    let defects = |c: &Inner, t: &HermitianOperator, s: &HermitianOperator| -> Result<f64> {
        Ok(trace_norm_diff(t, &c.tau_map)?.max(trace_norm_diff(s, &c.sigma_map)?))
    };
    let mut residual = defects(&cur, &tau, &sigma)?;
    let mut iterations = 0;
    while residual > FP_TOL && iterations < FP_MAX_ITERS {
        let (t_next, _) = damped_step(&tau, &cur.tau_map, cur.q, alpha, |t| {
            Ok(inner(&work, t, &sigma, alpha)?.q)
        })?;
        let mid = inner(&work, &t_next, &sigma, alpha)?;
        observe(quasi_to_value(mid.q, alpha));
        let (s_next, _) = damped_step(&sigma, &mid.sigma_map, mid.q, alpha, |s| {
            Ok(inner(&work, &t_next, s, alpha)?.q)
        })?;
        iterations += 1;
        let stalled = t_next.max_abs_diff(&tau) == 0.0 && s_next.max_abs_diff(&sigma) == 0.0;
        tau = t_next;
        sigma = s_next;
        cur = inner(&work, &tau, &sigma, alpha)?;
        observe(quasi_to_value(cur.q, alpha));
        residual = defects(&cur, &tau, &sigma)?;
        if stalled {
            break;
        }
    }
    let tau_star = DensityOperator::assume_valid(tau.scaled(1.0 / tau.trace()));
    let sigma_star = DensityOperator::assume_valid(sigma.scaled(1.0 / sigma.trace()));
    let value = sandwiched_renyi(rho, &tau_star.tensor(&sigma_star), alpha)?.nats;
    Ok(FixedPointResult {
        value,
        tau_star,
        sigma_star,
        residual,
        iterations,
        converged: residual <= FP_TOL,
        perturbation,
    })
}

/// How an I_h^ε value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IhMode {
    /// Global minimum over the Bloch ball (|B| = 2) or trivial (|B| = 1).
    Certified,
    /// Local simplex descent from ρ_B; an upper bound on the infimum.
    Local,
    /// D_h^ε at σ_B = ρ_B only; an upper bound on the infimum.
    UpperBound,
}

#[derive(Clone, Debug)]
pub struct IhResult {
    pub value: DivergenceValue,
    pub sigma: DensityOperator,
    pub mode: IhMode,
    /// Best value on the coarse grid (certified mode only).
    pub grid_value: Option<f64>,
    /// Value at σ_B = ρ_B.
    pub at_marginal: f64,
}

/// Bloch-ball step of the certified grid.
pub const IH_GRID_STEP: f64 = 0.1;

fn qubit_from_bloch(r: &[f64]) -> HermitianOperator {
    let (x, y, z) = (r[0], r[1], r[2]);
    let half = |v: f64| C64::new(0.5 * v, 0.0);
    HermitianOperator::from_rows(
        vec![2],
        &[
            vec![half(1.0 + z), C64::new(0.5 * x, -0.5 * y)],
            vec![C64::new(0.5 * x, 0.5 * y), half(1.0 - z)],
        ],
    )
    .expect("Bloch matrix is Hermitian")
}

fn bloch_of(sigma: &HermitianOperator) -> Vec<f64> {
    let off = sigma.entry(1, 0);
    vec![2.0 * off.re, 2.0 * off.im, (sigma.entry(0, 0) - sigma.entry(1, 1)).re]
}

/// Hermitian generator → state e^H / Tr e^H, parameterized by d² reals.
fn state_from_generator(p: &[f64], d: usize) -> Result<HermitianOperator> {
    let mut rows = vec![vec![C64::new(0.0, 0.0); d]; d];
    let mut k = 0;
    for i in 0..d {
        rows[i][i] = C64::new(p[k], 0.0);
        k += 1;
        for j in i + 1..d {
            rows[i][j] = C64::new(p[k], p[k + 1]);
            rows[j][i] = C64::new(p[k], -p[k + 1]);
            k += 2;
        }
    }
    let h = HermitianOperator::from_rows(vec![d], &rows)?;
    let m = h.eigenvalues()?.last().copied().unwrap_or(0.0);
    let e = h.spectral_fn(|v| (v - m).exp(), false)?;
    Ok(e.scaled(1.0 / e.trace()))
}

fn generator_of(sigma: &DensityOperator) -> Result<Vec<f64>> {
    let d = sigma.dim();
    let l = sigma.log_support()?;
    let mut p = Vec::with_capacity(d * d);
    for i in 0..d {
        p.push(l.entry(i, i).re);
        for j in i + 1..d {
            let z = l.entry(i, j);
            p.push(z.re);
            p.push(z.im);
        }
    }
    Ok(p)
}

struct IhCost<'a> {
    rho: &'a DensityOperator,
    tau: &'a DensityOperator,
    eps: f64,
    bloch: bool,
    d_b: usize,
}

impl IhCost<'_> {
    fn sigma(&self, p: &[f64]) -> Result<Option<DensityOperator>> {
        let op = if self.bloch {
            if p.iter().map(|v| v * v).sum::<f64>() > 1.0 {
                return Ok(None);
            }
            qubit_from_bloch(p)
        } else {
            state_from_generator(p, self.d_b)?
        };
        match DensityOperator::new(op) {
            Ok(s) => Ok(Some(s)),
            Err(_) => Ok(None),
        }
    }

    fn value(&self, sigma: &DensityOperator) -> Result<f64> {
        Ok(hypothesis_testing_divergence(self.rho, &self.tau.tensor(sigma), self.eps)?
            .0
            .nats)
    }
}

impl CostFunction for IhCost<'_> {
    type Param = Vec<f64>;
    type Output = f64;
    fn cost(&self, p: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        match self.sigma(p)? {
            Some(s) => Ok(self.value(&s)?),
            None => Ok(f64::INFINITY),
        }
    }
}

fn simplex_refine(cost: &IhCost<'_>, start: Vec<f64>, step: f64) -> Result<(Vec<f64>, f64)> {
    let n = start.len();
    let mut simplex = vec![start.clone()];
    for k in 0..n {
        let mut v = start.clone();
        // Step inward for Bloch vertices near the boundary.
        v[k] += if cost.bloch && start[k] > 0.0 { -step } else { step };
        simplex.push(v);
    }
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(1e-12)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let start_cost = cost.cost(&start).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let res = Executor::new(IhCost { ..*cost }, solver)
        .configure(|s| s.max_iters(400))
        .run()
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let state = res.state();
    let best = state.get_best_param().cloned().unwrap_or(start.clone());
    let best_cost = state.get_best_cost();
    if best_cost <= start_cost {
        Ok((best, best_cost))
    } else {
        Ok((start, start_cost))
    }
}

/// I_h^ε(ρ_AB‖τ_A) = inf_σ D_h^ε(ρ_AB ‖ τ_A ⊗ σ_B).
///
/// `Certified` grids the Bloch ball and refines with a simplex (|B| ≤ 2);
/// `Local` runs the simplex from ρ_B for any |B|; `UpperBound` evaluates
/// σ_B = ρ_B only. Requesting `Certified` with |B| > 2 falls back to
/// `UpperBound`.
pub fn hypothesis_testing_information(
    rho: &DensityOperator,
    tau: &DensityOperator,
    eps: f64,
    mode: IhMode,
) -> Result<IhResult> {
    check_tau(rho, tau)?;
    let (_, d_b) = bipartite(rho)?;
    let rho_b = marginal_b(rho)?;
    let at_marginal = hypothesis_testing_divergence(rho, &tau.tensor(&rho_b), eps)?.0;
    let upper = |mode| IhResult {
        value: at_marginal,
        sigma: rho_b.clone(),
        mode,
        grid_value: None,
        at_marginal: at_marginal.nats,
    };
    if d_b == 1 {
        return Ok(upper(IhMode::Certified));
    }
    let mode = if mode == IhMode::Certified && d_b > 2 {
        IhMode::UpperBound
    } else {
        mode
    };
    let cost = IhCost {
        rho,
        tau,
        eps,
        bloch: d_b == 2,
        d_b,
    };
    match mode {
        IhMode::UpperBound => Ok(upper(IhMode::UpperBound)),
        IhMode::Local => {
            let start = if cost.bloch {
                bloch_of(&rho_b)
            } else {
                generator_of(&rho_b)?
            };
            let (p, v) = simplex_refine(&cost, start, 0.05)?;
            let (p, v) = if v <= at_marginal.nats {
                (p, v)
            } else {
                return Ok(upper(IhMode::Local));
            };
            let sigma = cost.sigma(&p)?.unwrap_or(rho_b.clone());
            Ok(IhResult {
                value: finite_or_inf(v),
                sigma,
                mode,
                grid_value: None,
                at_marginal: at_marginal.nats,
            })
        }
        IhMode::Certified => {
            let pts = bloch_grid(IH_GRID_STEP);
            let vals = crate::Execution::default().map(&pts, |p| {
                cost.sigma(p)
                    .ok()
                    .flatten()
                    .and_then(|s| cost.value(&s).ok())
                    .unwrap_or(f64::INFINITY)
            });
            let (k, &grid_min) = vals
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .expect("grid is nonempty");
            let (p, v) = simplex_refine(&cost, pts[k].clone(), 0.5 * IH_GRID_STEP)?;
            let sigma = cost.sigma(&p)?.expect("refined point is inside the ball");
            Ok(IhResult {
                value: finite_or_inf(v.min(grid_min)),
                sigma,
                mode,
                grid_value: Some(grid_min),
                at_marginal: at_marginal.nats,
            })
        }
    }
}

fn finite_or_inf(v: f64) -> DivergenceValue {
    if v.is_finite() {
        DivergenceValue::finite(v)
    } else {
        DivergenceValue::infinite()
    }
}

/// Points of the cubic lattice with the given step inside the unit ball.
fn bloch_grid(step: f64) -> Vec<Vec<f64>> {
    let n = (1.0 / step).round() as i64;
    let mut pts = Vec::new();
    for i in -n..=n {
        for j in -n..=n {
            for k in -n..=n {
                let p = vec![i as f64 * step, j as f64 * step, k as f64 * step];
                if p.iter().map(|v| v * v).sum::<f64>() <= 1.0 + 1e-12 {
                    pts.push(p);
                }
            }
        }
    }
    pts
}
