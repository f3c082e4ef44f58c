//! Bounds on Δ^c_M and on the sample complexity M_ε^c.

use crate::divergences::{hypothesis_testing_divergence, petz_renyi};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::logspace;
use crate::info::{hypothesis_testing_information, marginal_b, sandwiched_renyi_information, IhMode};
use crate::operator::{nc_minimal_trace, pinching, positive_part_projector, spec_count, DensityOperator};
use crate::report::BoundReport;

use super::{covering_error_exact, ConvexSplitInstance, BOUND_SLACK};

/// An information quantity sampled on a grid of orders.
#[derive(Clone, Debug, PartialEq)]
pub struct RenyiCurve {
    pub alphas: Vec<f64>,
    pub values: Vec<f64>,
    /// False where an iterative solver stopped before its tolerance.
    pub converged: Vec<bool>,
}

impl RenyiCurve {
    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|&c| c)
    }
}

/// I_α*(ρ_AB‖τ_A) for every α in `alphas` (each α > 1).
pub fn sandwiched_info_curve(
    rho: &DensityOperator,
    tau: &DensityOperator,
    alphas: &[f64],
    exec: Execution,
) -> Result<RenyiCurve> {
    let points = exec.map(alphas, |&a| sandwiched_renyi_information(rho, tau, a));
    let mut values = Vec::with_capacity(alphas.len());
    let mut converged = Vec::with_capacity(alphas.len());
    for p in points {
        let p = p?;
        values.push(p.value);
        converged.push(p.converged);
    }
    Ok(RenyiCurve {
        alphas: alphas.to_vec(),
        values,
        converged,
    })
}

/// D_{2−1/α}(ρ_AB‖τ_A⊗ρ_B) (Petz) for every α in `alphas` ⊂ (½, 1).
pub fn converse_curve(
    rho: &DensityOperator,
    tau: &DensityOperator,
    alphas: &[f64],
    exec: Execution,
) -> Result<RenyiCurve> {
    for &a in alphas {
        if !(a > 0.5 && a < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "strong-converse order {a} not in (1/2, 1)"
            )));
        }
    }
    let reference = tau.tensor(&marginal_b(rho)?);
    let points = exec.map(alphas, |&a| petz_renyi(rho, &reference, 2.0 - 1.0 / a));
    let mut values = Vec::with_capacity(alphas.len());
    for p in points {
        values.push(p?.nats);
    }
    Ok(RenyiCurve {
        alphas: alphas.to_vec(),
        converged: vec![true; values.len()],
        values,
    })
}

fn argmax<I: Iterator<Item = (usize, f64)>>(it: I) -> Option<(usize, f64)> {
    it.fold(None, |best, (k, v)| match best {
        Some((_, b)) if b >= v => best,
        _ => Some((k, v)),
    })
}

/// sup_α ((α−1)/α)(log M − I_α*) over the curve, with the maximizing α.
pub fn covering_exponent(curve: &RenyiCurve, log_m: f64) -> (f64, f64) {
    let best = argmax(curve.alphas.iter().zip(&curve.values).enumerate().map(|(k, (&a, &i))| {
        (k, (a - 1.0) / a * (log_m - i))
    }));
    best.map(|(k, v)| (v, curve.alphas[k]))
        .unwrap_or((f64::NEG_INFINITY, f64::NAN))
}

/// sup_α ((1−α)/α)(D_{2−1/α} − log M) over the curve, with the maximizing α.
pub fn converse_exponent(curve: &RenyiCurve, log_m: f64) -> (f64, f64) {
    let best = argmax(curve.alphas.iter().zip(&curve.values).enumerate().map(|(k, (&a, &d))| {
        (k, (1.0 - a) / a * (d - log_m))
    }));
    best.map(|(k, v)| (v, curve.alphas[k]))
        .unwrap_or((f64::NEG_INFINITY, f64::NAN))
}

/// min_α 2^{2/α−2} e^{−((α−1)/α)(log M − I_α*)} over a precomputed curve.
pub fn exponent_upper_bound_from_curve(curve: &RenyiCurve, log_m: f64) -> BoundReport {
    let mut best: Option<(f64, f64)> = None;
    for (&a, &i) in curve.alphas.iter().zip(&curve.values) {
        let v = 2f64.powf(2.0 / a - 2.0) * (-(a - 1.0) / a * (log_m - i)).exp();
        if best.is_none_or(|(b, _)| v < b) {
            best = Some((v, a));
        }
    }
    let (value, alpha) = best.unwrap_or((1.0, 1.0));
    let mut report = BoundReport::new("exponent_upper", value)
        .with_param("alpha", alpha)
        .with_param("log_M", log_m);
    if !curve.all_converged() {
        report = report.invalid("sandwiched Renyi information did not converge at some order");
    }
    report
}

/// Error-exponent upper bound on Δ^c_M over `alphas` ⊂ (1, 2].
pub fn exponent_upper_bound(inst: &ConvexSplitInstance, alphas: &[f64]) -> Result<BoundReport> {
    let curve = sandwiched_info_curve(inst.rho(), inst.tau(), alphas, Execution::default())?;
    Ok(exponent_upper_bound_from_curve(&curve, (inst.m() as f64).ln()))
}

/// max_α 1 − 4 e^{−((1−α)/α)(D_{2−1/α} − log M)}, clamped at 0 with the
/// raw value kept.
pub fn strong_converse_from_curve(curve: &RenyiCurve, log_m: f64) -> BoundReport {
    let (exponent, alpha) = converse_exponent(curve, log_m);
    let raw = 1.0 - 4.0 * (-exponent).exp();
    let mut report = BoundReport::new("strong_converse_lower", raw.max(0.0))
        .with_param("alpha", alpha)
        .with_param("log_M", log_m);
    if raw < 0.0 {
        report.raw_value = Some(raw);
    }
    report
}

/// Strong-converse lower bound on Δ^c_M over `alphas` ⊂ (½, 1).
pub fn strong_converse_lower_bound(inst: &ConvexSplitInstance, alphas: &[f64]) -> Result<BoundReport> {
    let curve = converse_curve(inst.rho(), inst.tau(), alphas, Execution::default())?;
    Ok(strong_converse_from_curve(&curve, (inst.m() as f64).ln()))
}

/// max_c 1 − (1+c) Tr[ρ_AB ∧ (1+1/c) M τ_A⊗ρ_B].
pub fn oneshot_converse_lower_bound(inst: &ConvexSplitInstance, c_grid: &[f64]) -> Result<BoundReport> {
    let reference = inst.tau().tensor(&inst.rho_b()?);
    let m = inst.m() as f64;
    let mut best: Option<(f64, f64)> = None;
    for &c in c_grid {
        if !(c > 0.0) {
            return Err(Error::InvalidParameter(format!("c = {c} must be positive")));
        }
        let scaled = reference.scaled((1.0 + 1.0 / c) * m);
        let v = 1.0 - (1.0 + c) * nc_minimal_trace(inst.rho(), &scaled)?;
        if best.is_none_or(|(b, _)| v > b) {
            best = Some((v, c));
        }
    }
    let Some((value, c)) = best else {
        return Ok(BoundReport::new("oneshot_converse_lower", f64::NEG_INFINITY).invalid("empty c grid"));
    };
    Ok(BoundReport::new("oneshot_converse_lower", value).with_param("c", c))
}

/// Tr[ρ {P[ρ] > c τ⊗σ}] + √(cν/M), P the pinching by τ⊗σ and
/// ν = (number of distinct eigenvalues of τ_A)·|B|; checked against the exact Δ^c_M.
pub fn direct_bound_components(
    inst: &ConvexSplitInstance,
    c: f64,
    sigma: &DensityOperator,
) -> Result<BoundReport> {
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!("c = {c} must be positive")));
    }
    if sigma.dims() != [inst.d_b()] {
        return Err(Error::DimensionMismatch(format!(
            "sigma dims {:?} vs B dimension {}",
            sigma.dims(),
            inst.d_b()
        )));
    }
    let y = inst.tau().tensor(sigma);
    let pinched = pinching(y.op(), inst.rho().op())?;
    let tail_proj = positive_part_projector(&pinched, &y.scaled(c))?;
    let tail = inst.rho().trace_with(tail_proj.op());
    let nu = (spec_count(inst.tau().op())? * inst.d_b()) as f64;
    let smooth = (c * nu / inst.m() as f64).sqrt();
    let exact = covering_error_exact(inst)?;
    let mut report = BoundReport::new("direct_bound", tail + smooth)
        .with_param("c", c)
        .with_param("tail", tail)
        .with_param("sqrt_term", smooth)
        .with_param("nu", nu)
        .with_param("delta_exact", exact);
    if exact > tail + smooth + BOUND_SLACK {
        report = report.invalid("exact covering error exceeds the direct bound");
    }
    Ok(report)
}

/// Result of the exhaustive scan for M_ε^c.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleComplexity {
    /// Smallest M with Δ^c_M ≤ ε, or `None` if every scanned M exceeds ε.
    pub m: Option<usize>,
    /// Δ^c_M for M = 1, 2, … up to the returned M (or `m_max`).
    pub errors: Vec<f64>,
}

/// Scans M = 1, 2, …, `m_max` for the first Δ^c_M ≤ ε. No monotonicity in
/// M is assumed; the scan stops only at the first success.
pub fn sample_complexity_exact(
    rho: &DensityOperator,
    tau: &DensityOperator,
    eps: f64,
    m_max: usize,
) -> Result<SampleComplexity> {
    sample_complexity_exact_with_budget(rho, tau, eps, m_max, super::DEFAULT_MAX_TOTAL_DIM)
}

pub(crate) fn sample_complexity_exact_with_budget(
    rho: &DensityOperator,
    tau: &DensityOperator,
    eps: f64,
    m_max: usize,
    budget: usize,
) -> Result<SampleComplexity> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon {eps} not in (0,1)")));
    }
    let mut errors = Vec::new();
    for m in 1..=m_max {
        let inst = ConvexSplitInstance::with_budget(rho.clone(), tau.clone(), m, budget)?;
        let delta = covering_error_exact(&inst)?;
        errors.push(delta);
        if delta <= eps {
            return Ok(SampleComplexity { m: Some(m), errors });
        }
    }
    Ok(SampleComplexity { m: None, errors })
}

/// Free-parameter grids and the I_h strategy for [`sample_complexity_bounds`].
#[derive(Clone, Debug)]
pub struct SampleComplexityOptions {
    /// δ values for the achievability side; those outside (0, ε/3) are dropped.
    pub upper_deltas: Vec<f64>,
    /// δ values for the converse side; those outside (0, 1−ε) are dropped.
    pub lower_deltas: Vec<f64>,
    pub c_grid: Vec<f64>,
    pub ih_mode: IhMode,
    /// With `Certified`, run the δ sweep in `Local` mode and certify only
    /// at the best δ.
    pub screen: bool,
    pub exec: Execution,
}

impl SampleComplexityOptions {
    /// 30 log-spaced δ per side and the default c grid.
    pub fn for_eps(eps: f64) -> Self {
        let n = crate::grid::FREE_PARAM_POINTS;
        let up = eps / 3.0;
        let lo = 1.0 - eps;
        SampleComplexityOptions {
            upper_deltas: logspace(up * 1e-3, up * (1.0 - 1e-3), n),
            lower_deltas: logspace(lo * 1e-3, lo * (1.0 - 1e-3), n),
            c_grid: crate::grid::c_grid(),
            ih_mode: IhMode::Certified,
            screen: true,
            exec: Execution::default(),
        }
    }
}

fn mode_name(mode: IhMode) -> &'static str {
    match mode {
        IhMode::Certified => "certified",
        IhMode::Local => "local",
        IhMode::UpperBound => "upper-bound",
    }
}

/// (upper, lower) bounds on log M_ε^c:
/// upper = min_δ I_h^{1−ε+3δ}(ρ‖τ) + log(ν²/δ⁴),
/// lower = max_{c,δ} D_h^{1−ε−δ}(ρ‖τ⊗ρ_B) − log((2+c+1/c)/(cε−c+(1+c)δ)).
pub fn sample_complexity_bounds(
    rho: &DensityOperator,
    tau: &DensityOperator,
    eps: f64,
    opts: &SampleComplexityOptions,
) -> Result<(BoundReport, BoundReport)> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon {eps} not in (0,1)")));
    }
    Ok((upper_bound(rho, tau, eps, opts)?, lower_bound(rho, tau, eps, opts)?))
}

fn upper_bound(
    rho: &DensityOperator,
    tau: &DensityOperator,
    eps: f64,
    opts: &SampleComplexityOptions,
) -> Result<BoundReport> {
    let deltas: Vec<f64> = opts
        .upper_deltas
        .iter()
        .copied()
        .filter(|&d| d > 0.0 && d < eps / 3.0)
        .collect();
    if deltas.is_empty() {
        return Ok(BoundReport::new("log_M_upper", f64::INFINITY).invalid("no delta in (0, eps/3)"));
    }
    let d_b = rho.dims()[1];
    let nu = (spec_count(tau.op())? * d_b) as f64;
    let penalty = |d: f64| (nu * nu / d.powi(4)).ln();
    let sweep_mode = if opts.screen && opts.ih_mode == IhMode::Certified {
        IhMode::Local
    } else {
        opts.ih_mode
    };
    let values = opts.exec.map(&deltas, |&d| {
        hypothesis_testing_information(rho, tau, 1.0 - eps + 3.0 * d, sweep_mode)
    });
    let mut best: Option<(f64, f64, IhMode)> = None;
    for (&d, r) in deltas.iter().zip(values) {
        let r = r?;
        let v = r.value.nats + penalty(d);
        if best.is_none_or(|(b, _, _)| v < b) {
            best = Some((v, d, r.mode));
        }
    }
    let (mut value, delta, mut mode) = best.expect("non-empty grid");
    if sweep_mode != opts.ih_mode {
        let r = hypothesis_testing_information(rho, tau, 1.0 - eps + 3.0 * delta, opts.ih_mode)?;
        value = value.min(r.value.nats + penalty(delta));
        mode = r.mode;
    }
    let mut report = BoundReport::new("log_M_upper", value)
        .with_param("delta", delta)
        .with_param("nu", nu);
    report.note(&format!("I_h mode: {}", mode_name(mode)));
    Ok(report)
}

fn lower_bound(
    rho: &DensityOperator,
    tau: &DensityOperator,
    eps: f64,
    opts: &SampleComplexityOptions,
) -> Result<BoundReport> {
    let deltas: Vec<f64> = opts
        .lower_deltas
        .iter()
        .copied()
        .filter(|&d| d > 0.0 && d < 1.0 - eps)
        .collect();
    let reference = tau.tensor(&marginal_b(rho)?);
    let dh = opts.exec.map(&deltas, |&d| {
        hypothesis_testing_divergence(rho, &reference, 1.0 - eps - d).map(|(v, _)| v.nats)
    });
    let mut best: Option<(f64, f64, f64)> = None;
    for (&d, v) in deltas.iter().zip(dh) {
        let v = v?;
        for &c in &opts.c_grid {
            let den = c * eps - c + (1.0 + c) * d;
            if !(c > 0.0 && den > 0.0) {
                continue;
            }
            let bound = v - ((2.0 + c + 1.0 / c) / den).ln();
            if best.is_none_or(|(b, _, _)| bound > b) {
                best = Some((bound, c, d));
            }
        }
    }
    Ok(match best {
        Some((value, c, d)) => BoundReport::new("log_M_lower", value)
            .with_param("c", c)
            .with_param("delta", d),
        None => BoundReport::new("log_M_lower", f64::NEG_INFINITY)
            .invalid("no feasible (c, delta) pair"),
    })
}
