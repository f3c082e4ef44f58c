//! Error and rate bounds for protocols built from packing and convex
//! splitting: private communication over wiretap channels, secret-key
//! distillation, one-way message compression, measurement compression and
//! communication with state information at the encoder.
//!
//! These are evaluators of the right-hand sides of the achievability
//! bounds, not simulations of the protocols. Classical registers are
//! embedded as block-diagonal operators.

use std::collections::BTreeMap;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::convex_split::{
    converse_exponent, covering_exponent, covering_error_exact, sandwiched_info_curve,
    ConvexSplitInstance, RenyiCurve,
};
use crate::divergences::inverse_normal_cdf;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::{converse_alphas, exponent_alphas, linspace};
use crate::info::{
    doubly_minimized_info, hypothesis_testing_information, marginal_a, mutual_information,
    petz_up_information, IhMode,
};
use crate::linalg;
use crate::operator::{DensityOperator, HermitianOperator};
use crate::report::BoundReport;
use crate::testkit::CqState;
use crate::C64;

/// f(u) = √(2u − u²), for u ∈ [0, 1].
pub fn uhlmann_f(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    (2.0 * u - u * u).sqrt()
}

/// Rates in nats; unused entries stay `None`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RateTriple {
    pub log_m: Option<f64>,
    pub log_k: Option<f64>,
    pub log_l: Option<f64>,
}

impl RateTriple {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("logM", self.log_m), ("logK", self.log_k), ("logL", self.log_l)] {
            if let Some(v) = v {
                if !(v >= 0.0) {
                    return Err(Error::InvalidParameter(format!("{name} = {v} must be >= 0")));
                }
            }
        }
        Ok(())
    }

    fn get(v: Option<f64>, name: &str) -> Result<f64> {
        v.ok_or_else(|| Error::InvalidParameter(format!("rate {name} is required")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    Wiretap,
    SecretKey,
    MsgCompression,
    MeasCompression,
    StateInfo,
}

/// An ε bound as the sum of its named components.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProtocolBound {
    pub protocol: Protocol,
    pub epsilon_bound: f64,
    pub components: BTreeMap<String, f64>,
    pub exponents: BTreeMap<String, f64>,
    /// Whether the rates lie strictly inside the achievable region.
    pub positivity_region: bool,
    /// Covering index log K making every exponent positive, if the region
    /// is non-empty.
    pub witness_log_k: Option<f64>,
    pub valid: bool,
    pub notes: String,
}

impl ProtocolBound {
    fn new(protocol: Protocol, components: Vec<(&str, f64)>, exponents: Vec<(&str, f64)>) -> Self {
        let epsilon_bound = components.iter().map(|(_, v)| v).sum();
        ProtocolBound {
            protocol,
            epsilon_bound,
            components: components.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            exponents: exponents.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            positivity_region: false,
            witness_log_k: None,
            valid: true,
            notes: String::new(),
        }
    }

    fn note(&mut self, text: &str) {
        if !self.notes.is_empty() {
            self.notes.push_str("; ");
        }
        self.notes.push_str(text);
    }
}

/// Order grids for the two kinds of exponent.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaGrids {
    /// Orders in (½, 1) for packing terms.
    pub packing: Vec<f64>,
    /// Orders in (1, 2] for covering terms.
    pub covering: Vec<f64>,
}

impl Default for AlphaGrids {
    fn default() -> Self {
        AlphaGrids {
            packing: converse_alphas(),
            covering: exponent_alphas(),
        }
    }
}

/// I^↑_{2−1/α}(A:B) on a grid of α ∈ (½, 1).
pub fn packing_curve(rho: &DensityOperator, alphas: &[f64], exec: Execution) -> Result<RenyiCurve> {
    for &a in alphas {
        if !(a > 0.5 && a < 1.0) {
            return Err(Error::InvalidParameter(format!("packing order {a} not in (1/2, 1)")));
        }
    }
    let values = exec.map(alphas, |&a| petz_up_information(rho, 2.0 - 1.0 / a).map(|v| v.nats));
    Ok(RenyiCurve {
        alphas: alphas.to_vec(),
        values: values.into_iter().collect::<Result<_>>()?,
        converged: vec![true; alphas.len()],
    })
}

/// e^{−exponent}, with the exponent from a precomputed packing curve.
fn packing_term(curve: &RenyiCurve, log_m: f64) -> (f64, f64, f64) {
    let (exponent, alpha) = converse_exponent(curve, log_m);
    ((-exponent).exp(), exponent, alpha)
}

/// e^{−sup_α ((α−1)/α)(log K − I_α*)}, from a precomputed covering curve.
fn covering_term(curve: &RenyiCurve, log_k: f64) -> (f64, f64, f64) {
    let (exponent, alpha) = covering_exponent(curve, log_k);
    ((-exponent).exp(), exponent, alpha)
}

/// Packing error bound e^{−sup_α ((1−α)/α)(I^↑_{2−1/α} − log M)}.
pub fn packing_exponent_bound(rho: &DensityOperator, log_m: f64, alphas: &[f64]) -> Result<BoundReport> {
    let curve = packing_curve(rho, alphas, Execution::default())?;
    let (value, exponent, alpha) = packing_term(&curve, log_m);
    let mut r = BoundReport::new("packing_error", value)
        .with_param("alpha", alpha)
        .with_param("exponent", exponent)
        .with_param("log_M", log_m);
    if value >= 1.0 {
        r.note("vacuous");
    }
    Ok(r)
}

fn ih_mode_for(d_b: usize) -> IhMode {
    if d_b <= 2 {
        IhMode::Certified
    } else {
        IhMode::UpperBound
    }
}

/// Achievable log M = I_h^{ε−δ}(X:B) − log(1/δ) for packing with error ε.
pub fn packing_capacity_bound(rho: &DensityOperator, eps: f64, delta: f64) -> Result<BoundReport> {
    if !(delta > 0.0 && delta < eps && eps < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < delta < eps < 1, got delta = {delta}, eps = {eps}"
        )));
    }
    let d_b = rho.dims()[1];
    let ih = hypothesis_testing_information(rho, &marginal_a(rho)?, eps - delta, ih_mode_for(d_b))?;
    let mut r = BoundReport::new("packing_log_M", ih.value.nats - (1.0 / delta).ln())
        .with_param("eps", eps)
        .with_param("delta", delta);
    if ih.mode != IhMode::Certified {
        r = r.invalid("I_h not certified for |B| > 2");
    }
    Ok(r)
}

/// The (X:B) and (X:E) marginals of a cq state with quantum factors [B, E].
pub fn cq_marginals(state: &CqState) -> Result<(DensityOperator, DensityOperator)> {
    if state.quantum_dims().len() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "expected quantum factors [B, E], got {:?}",
            state.quantum_dims()
        )));
    }
    let xb = state.map_conditionals(|c| c.partial_trace(&[0]))?.to_density();
    let xe = state.map_conditionals(|c| c.partial_trace(&[1]))?.to_density();
    Ok((xb, xe))
}

/// Curves and Shannon-limit values behind a packing + covering bound.
#[derive(Clone, Debug)]
pub struct PackingCoveringCurves {
    pub packing: RenyiCurve,
    pub covering: RenyiCurve,
    /// I(X:B) of the packing marginal.
    pub packing_info: f64,
    /// I(X:E) of the covering marginal.
    pub covering_info: f64,
}

impl PackingCoveringCurves {
    /// `packing_state` on [X, B] and `covering_state` on [X, E]; τ = ρ_X.
    pub fn new(
        packing_state: &DensityOperator,
        covering_state: &DensityOperator,
        grids: &AlphaGrids,
        exec: Execution,
    ) -> Result<Self> {
        let tau = marginal_a(covering_state)?;
        Ok(PackingCoveringCurves {
            packing: packing_curve(packing_state, &grids.packing, exec)?,
            covering: sandwiched_info_curve(covering_state, &tau, &grids.covering, exec)?,
            packing_info: mutual_information(packing_state)?.nats,
            covering_info: mutual_information(covering_state)?.nats,
        })
    }

    /// (packing exponent at log(MK), covering exponent at log K).
    pub fn exponents(&self, log_m: f64, log_k: f64) -> (f64, f64) {
        (
            converse_exponent(&self.packing, log_m + log_k).0,
            covering_exponent(&self.covering, log_k).0,
        )
    }

    /// log K equalizing the slack of log(MK) < I(X:B) and log K > I(X:E).
    pub fn witness_log_k(&self, log_m: f64) -> f64 {
        0.5 * (self.covering_info + self.packing_info - log_m).max(2.0 * self.covering_info)
    }

    /// Region predicate log M < I(X:B) − I(X:E).
    pub fn in_region(&self, log_m: f64) -> bool {
        log_m < self.packing_info - self.covering_info
    }
}

/// Sign check of both exponents over the witness and a grid of K.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PositivityScan {
    pub predicted: bool,
    pub witness_log_k: f64,
    /// Both exponents positive at the witness.
    pub witness_positive: bool,
    /// Some grid K makes both exponents positive.
    pub grid_positive: bool,
    /// Spacing of the log K grid in nats.
    pub grid_spacing: f64,
}

impl PositivityScan {
    /// Inside the region the witness must work; outside, no K may.
    pub fn consistent(&self) -> bool {
        if self.predicted {
            self.witness_positive
        } else {
            !self.witness_positive && !self.grid_positive
        }
    }
}

/// Number of log K values between I(X:E) and I(X:B) in the witness scan.
pub const WITNESS_K_POINTS: usize = 50;

pub fn positivity_scan(curves: &PackingCoveringCurves, log_m: f64) -> PositivityScan {
    let both = |lk: f64| {
        let (p, c) = curves.exponents(log_m, lk);
        p > 0.0 && c > 0.0
    };
    let lo = curves.covering_info.max(0.0);
    let hi = curves.packing_info.max(lo);
    let grid = linspace(lo, hi, WITNESS_K_POINTS);
    let witness = curves.witness_log_k(log_m);
    PositivityScan {
        predicted: curves.in_region(log_m),
        witness_log_k: witness,
        witness_positive: both(witness),
        grid_positive: grid.iter().any(|&lk| both(lk)),
        grid_spacing: (hi - lo) / (WITNESS_K_POINTS - 1) as f64,
    }
}

fn packing_covering_bound(
    protocol: Protocol,
    curves: &PackingCoveringCurves,
    log_m: f64,
    log_k: f64,
) -> ProtocolBound {
    let (p, pe, pa) = packing_term(&curves.packing, log_m + log_k);
    let (c, ce, ca) = covering_term(&curves.covering, log_k);
    let mut b = ProtocolBound::new(
        protocol,
        vec![("packing", p), ("covering", c)],
        vec![
            ("packing", pe),
            ("packing_alpha", pa),
            ("covering", ce),
            ("covering_alpha", ca),
        ],
    );
    b.positivity_region = curves.in_region(log_m);
    if b.positivity_region {
        b.witness_log_k = Some(curves.witness_log_k(log_m));
    }
    if !curves.covering.all_converged() {
        b.valid = false;
        b.note("sandwiched Renyi information did not converge at some order");
    }
    b
}

/// ε ≤ Δ^p_{MK}(X:B) + Δ^c_K(X:E) in exponential form, for a cq wiretap
/// state with quantum factors [B, E].
pub fn wiretap_bound(state: &CqState, rates: RateTriple, grids: &AlphaGrids) -> Result<ProtocolBound> {
    rates.validate()?;
    let (log_m, log_k) = (RateTriple::get(rates.log_m, "logM")?, RateTriple::get(rates.log_k, "logK")?);
    let (xb, xe) = cq_marginals(state)?;
    let curves = PackingCoveringCurves::new(&xb, &xe, grids, Execution::default())?;
    Ok(packing_covering_bound(Protocol::Wiretap, &curves, log_m, log_k))
}

/// Same bound as [`wiretap_bound`] for the source state ρ_XBE.
pub fn secret_key_bound(state: &CqState, rates: RateTriple, grids: &AlphaGrids) -> Result<ProtocolBound> {
    let mut b = wiretap_bound(state, rates, grids)?;
    b.protocol = Protocol::SecretKey;
    Ok(b)
}

/// Achievable one-shot log M for private communication with error ε1 + ε2:
/// I_h^{ε1−δ1}(X:B) − I_h^{1−ε2+3δ2}(X:E) − log(1/δ1) − log(ν²/δ2⁴), ν = |E|.
pub fn wiretap_rate(state: &CqState, eps1: f64, eps2: f64, delta1: f64, delta2: f64) -> Result<BoundReport> {
    if !(eps1 > 0.0 && eps2 > 0.0 && eps1 + eps2 < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "need eps1, eps2 > 0 with eps1 + eps2 < 1, got {eps1}, {eps2}"
        )));
    }
    if !(delta1 > 0.0 && delta1 < eps1 && delta2 > 0.0 && delta2 < eps2 / 3.0) {
        return Err(Error::InvalidParameter(format!(
            "infeasible delta1 = {delta1}, delta2 = {delta2}"
        )));
    }
    let (xb, xe) = cq_marginals(state)?;
    let d_b = xb.dims()[1];
    let d_e = xe.dims()[1];
    let ib = hypothesis_testing_information(&xb, &marginal_a(&xb)?, eps1 - delta1, ih_mode_for(d_b))?;
    let ie = hypothesis_testing_information(&xe, &marginal_a(&xe)?, 1.0 - eps2 + 3.0 * delta2, ih_mode_for(d_e))?;
    let nu = d_e as f64;
    let value = ib.value.nats - ie.value.nats - (1.0 / delta1).ln() - (nu * nu / delta2.powi(4)).ln();
    let mut r = BoundReport::new("wiretap_log_M", value)
        .with_param("ih_B", ib.value.nats)
        .with_param("ih_E", ie.value.nats)
        .with_param("delta1", delta1)
        .with_param("delta2", delta2);
    if ib.mode != IhMode::Certified {
        r = r.invalid("I_h(X:B) not certified for |B| > 2");
    }
    Ok(r)
}

/// Default slack constant 2(d−1) of the O(log n) term.
pub fn default_log_constant(d: usize) -> f64 {
    2.0 * (d.max(1) - 1) as f64
}

/// n(I_B − I_E) + √(nV_B) Φ⁻¹(ε1) + √(nV_E) Φ⁻¹(ε2) − C_log log n.
#[allow(clippy::too_many_arguments)]
pub fn second_order_rate(
    n: usize,
    i_b: f64,
    v_b: f64,
    i_e: f64,
    v_e: f64,
    eps1: f64,
    eps2: f64,
    c_log: f64,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("block length n must be >= 1".into()));
    }
    let n_f = n as f64;
    Ok(n_f * (i_b - i_e) + (n_f * v_b).sqrt() * inverse_normal_cdf(eps1)?
        + (n_f * v_e).sqrt() * inverse_normal_cdf(eps2)?
        - c_log * n_f.ln())
}

/// √2·e^{−n sup_α ((α−1)/2α)(r − I^{↓↓}_α(C:RB))} for Ψ on [C, RB]; with
/// `one_shot = Some((M, τ_C))` also reports f(Δ^c_M(Ψ_CRB‖τ_C)).
pub fn msg_compression_exponent(
    psi: &DensityOperator,
    rate: f64,
    n: usize,
    alphas: &[f64],
    one_shot: Option<(usize, &DensityOperator)>,
) -> Result<BoundReport> {
    if !(rate >= 0.0) || n == 0 {
        return Err(Error::InvalidParameter(format!("rate {rate} and n {n} invalid")));
    }
    let points = Execution::default().map(alphas, |&a| doubly_minimized_info(psi, a));
    let mut best: Option<(f64, f64)> = None;
    let mut converged = true;
    for (&a, p) in alphas.iter().zip(points) {
        let p = p?;
        converged &= p.converged;
        let e = (a - 1.0) / (2.0 * a) * (rate - p.value);
        if best.is_none_or(|(b, _)| e > b) {
            best = Some((e, a));
        }
    }
    let (exponent, alpha) = best.unwrap_or((0.0, 1.0));
    let value = 2f64.sqrt() * (-(n as f64) * exponent).exp();
    let mut r = BoundReport::new("msg_compression", value)
        .with_param("alpha", alpha)
        .with_param("exponent", exponent)
        .with_param("rate", rate)
        .with_param("n", n as f64);
    if let Some((m, tau)) = one_shot {
        let inst = ConvexSplitInstance::new(psi.clone(), tau.clone(), m)?;
        r = r.with_param("one_shot", uhlmann_f(covering_error_exact(&inst)?));
    }
    if value >= 2f64.sqrt() {
        r.note("vacuous");
    }
    if !converged {
        r = r.invalid("doubly minimized information did not converge at some order");
    }
    Ok(r)
}

/// θ_RUX = Σ_{u,x} p(x|u) |x⟩⟨x| ⊗ |u⟩⟨u| ⊗ Tr_A[(1 ⊗ Π^u) φ_RA], as a cq
/// state over U with quantum factors [R, X]. φ is the canonical
/// purification Σ_k |k⟩_R ⊗ √ρ|k⟩_A.
pub fn measurement_state(
    rho_a: &DensityOperator,
    povm: &[HermitianOperator],
    p_x_given_u: &[Vec<f64>],
) -> Result<CqState> {
    if povm.is_empty() || povm.len() != p_x_given_u.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} POVM elements for {} conditionals",
            povm.len(),
            p_x_given_u.len()
        )));
    }
    let d = rho_a.dim();
    let mut total = HermitianOperator::zeros(rho_a.dims().to_vec());
    for e in povm {
        e.check_psd()?;
        total = &total + e;
    }
    if total.max_abs_diff(&HermitianOperator::identity(rho_a.dims().to_vec())) > 1e-10 {
        return Err(Error::InvalidParameter("POVM elements do not sum to identity".into()));
    }
    let n_x = p_x_given_u[0].len();
    let root = rho_a.psd_power(0.5)?;
    let mut probs = Vec::new();
    let mut conds = Vec::new();
    for (e, px) in povm.iter().zip(p_x_given_u) {
        if px.len() != n_x {
            return Err(Error::DimensionMismatch("ragged p(x|u) table".into()));
        }
        let x_part = DensityOperator::from_probabilities(vec![n_x], px)?;
        let inner = root.sandwich(e);
        let p = inner.trace();
        let cond = if p > 0.0 {
            let conj = Mat::from_fn(d, d, |i, j| inner.entry(i, j).conj());
            HermitianOperator::new(vec![d], linalg::scale(conj.as_ref(), 1.0 / p))?
        } else {
            HermitianOperator::identity(vec![d]).scaled(1.0 / d as f64)
        };
        probs.push(p.max(0.0));
        conds.push(DensityOperator::new(cond)?.tensor(&x_part));
    }
    let total: f64 = probs.iter().sum();
    let probs = probs.iter().map(|p| p / total).collect();
    CqState::new(probs, conds)
}

fn regroup(state: &DensityOperator) -> Result<DensityOperator> {
    let d0 = state.dims()[0];
    let rest = state.dim() / d0;
    DensityOperator::new(state.with_dims(vec![d0, rest])?)
}

/// Which convex-split index goes with which marginal.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementPairing {
    /// Δ^c_{ML}(U:RX) + f(Δ^c_L(U:R)).
    #[default]
    Proof,
    /// Δ^c_L(U:RX) + f(Δ^c_{ML}(U:R)).
    Statement,
}

/// ε bound for non-feedback measurement compression, for θ as a cq state
/// over U with quantum factors [R, X].
pub fn measurement_compression_bound(
    theta: &CqState,
    rates: RateTriple,
    grids: &AlphaGrids,
    pairing: MeasurementPairing,
) -> Result<ProtocolBound> {
    rates.validate()?;
    let (log_m, log_l) = (RateTriple::get(rates.log_m, "logM")?, RateTriple::get(rates.log_l, "logL")?);
    if theta.quantum_dims().len() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "expected quantum factors [R, X], got {:?}",
            theta.quantum_dims()
        )));
    }
    let urx = regroup(&theta.to_density())?;
    let ur = theta.map_conditionals(|c| c.partial_trace(&[0]))?.to_density();
    let exec = Execution::default();
    let curve_rx = sandwiched_info_curve(&urx, &marginal_a(&urx)?, &grids.covering, exec)?;
    let curve_r = sandwiched_info_curve(&ur, &marginal_a(&ur)?, &grids.covering, exec)?;
    let (rate_rx, rate_r) = match pairing {
        MeasurementPairing::Proof => (log_m + log_l, log_l),
        MeasurementPairing::Statement => (log_l, log_m + log_l),
    };
    let (c1, e1, a1) = covering_term(&curve_rx, rate_rx);
    let (c2, e2, a2) = covering_term(&curve_r, rate_r);
    let mut b = ProtocolBound::new(
        Protocol::MeasCompression,
        vec![("covering_U_RX", c1), ("uhlmann_U_R", uhlmann_f(c2))],
        vec![
            ("covering_U_RX", e1),
            ("covering_U_RX_alpha", a1),
            ("covering_U_R", e2),
            ("covering_U_R_alpha", a2),
        ],
    );
    let i_rx = mutual_information(&urx)?.nats;
    let i_r = mutual_information(&ur)?.nats;
    b.positivity_region = rate_rx > i_rx && rate_r > i_r;
    if !(curve_rx.all_converged() && curve_r.all_converged()) {
        b.valid = false;
        b.note("sandwiched Renyi information did not converge at some order");
    }
    if pairing == MeasurementPairing::Statement {
        b.note("statement pairing");
    }
    Ok(b)
}

/// Smallest (log L, log ML) of the achievable-rate region at (δ1, δ2):
/// log L ≥ I_h^{1−√(2ε1)+3δ1}(U:R) + log(|A|²/δ1⁴),
/// log ML ≥ I_h^{1−ε2+3δ2}(U:RX) + log(|A|²/δ2⁴).
pub fn measurement_rate_region(
    theta: &CqState,
    eps1: f64,
    eps2: f64,
    delta1: f64,
    delta2: f64,
) -> Result<(BoundReport, BoundReport)> {
    let s1 = (2.0 * eps1).sqrt();
    if !(eps1 > 0.0 && eps2 > 0.0 && delta1 > 0.0 && delta1 < s1 / 3.0 && delta2 > 0.0 && delta2 < eps2 / 3.0 && s1 < 1.0)
    {
        return Err(Error::InvalidParameter("infeasible (eps, delta) for the rate region".into()));
    }
    let d_a = theta.quantum_dims()[0] as f64;
    let urx = regroup(&theta.to_density())?;
    let ur = theta.map_conditionals(|c| c.partial_trace(&[0]))?.to_density();
    let l = hypothesis_testing_information(&ur, &marginal_a(&ur)?, 1.0 - s1 + 3.0 * delta1, ih_mode_for(ur.dims()[1]))?;
    let ml = hypothesis_testing_information(&urx, &marginal_a(&urx)?, 1.0 - eps2 + 3.0 * delta2, ih_mode_for(urx.dims()[1]))?;
    let lower_l = BoundReport::new("log_L_min", l.value.nats + (d_a * d_a / delta1.powi(4)).ln())
        .with_param("delta1", delta1);
    let lower_ml = BoundReport::new("log_ML_min", ml.value.nats + (d_a * d_a / delta2.powi(4)).ln())
        .with_param("delta2", delta2);
    Ok((lower_l, lower_ml))
}

/// A channel given by Kraus operators, each of shape d_out × d_in.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    d_in: usize,
    d_out: usize,
    ops: Vec<Mat<C64>>,
}

/// Tolerance of the trace-preservation check Σ K†K = 1.
pub const TP_TOL: f64 = 1e-10;

impl KrausChannel {
    pub fn new(ops: Vec<Mat<C64>>) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty Kraus list".into()))?;
        let (d_out, d_in) = (first.nrows(), first.ncols());
        if ops.iter().any(|k| k.nrows() != d_out || k.ncols() != d_in) {
            return Err(Error::DimensionMismatch("Kraus operators differ in shape".into()));
        }
        let mut sum = Mat::<C64>::zeros(d_in, d_in);
        for k in &ops {
            sum += &linalg::adjoint(k.as_ref()) * k;
        }
        let defect = (0..d_in)
            .flat_map(|i| (0..d_in).map(move |j| (i, j)))
            .map(|(i, j)| {
                let target = if i == j { 1.0 } else { 0.0 };
                (sum[(i, j)] - C64::new(target, 0.0)).norm()
            })
            .fold(0.0, f64::max);
        if defect > TP_TOL {
            return Err(Error::InvalidParameter(format!(
                "channel is not trace preserving (defect {defect:.3e})"
            )));
        }
        Ok(KrausChannel { d_in, d_out, ops })
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    /// (id_R ⊗ N)(x) for x on [dR, d_in]; output dims [dR, d_out].
    pub fn apply_on_second(&self, x: &DensityOperator) -> Result<DensityOperator> {
        let d_r = x.dim() / self.d_in;
        if d_r * self.d_in != x.dim() {
            return Err(Error::DimensionMismatch(format!(
                "input dim {} not a multiple of {}",
                x.dim(),
                self.d_in
            )));
        }
        let id = linalg::identity(d_r);
        let mut acc = Mat::<C64>::zeros(d_r * self.d_out, d_r * self.d_out);
        for k in &self.ops {
            let big = linalg::kron(id.as_ref(), k.as_ref());
            acc += &(&big * x.matrix()) * linalg::adjoint(big.as_ref());
        }
        DensityOperator::new(HermitianOperator::new(
            vec![d_r, self.d_out],
            linalg::hermitize(acc.as_ref()),
        )?)
    }
}

/// ε ≤ Δ^p_{MK}(R:B)_{N(θ)} + f(Δ^c_K(R:S)_θ) for θ on [A, R, S] and a
/// channel N_{AS→B}; `vartheta_s` is the state of the channel register S.
pub fn state_info_coding_bound(
    theta: &DensityOperator,
    channel: &KrausChannel,
    vartheta_s: &DensityOperator,
    rates: RateTriple,
    grids: &AlphaGrids,
) -> Result<ProtocolBound> {
    rates.validate()?;
    let (log_m, log_k) = (RateTriple::get(rates.log_m, "logM")?, RateTriple::get(rates.log_k, "logK")?);
    let [d_a, d_r, d_s] = theta.dims() else {
        return Err(Error::DimensionMismatch(format!(
            "theta must have factors [A, R, S], got {:?}",
            theta.dims()
        )));
    };
    let (d_a, d_r, d_s) = (*d_a, *d_r, *d_s);
    if channel.d_in() != d_a * d_s {
        return Err(Error::DimensionMismatch(format!(
            "channel input {} vs |A||S| = {}",
            channel.d_in(),
            d_a * d_s
        )));
    }
    let theta_s = theta.partial_trace(&[2])?;
    if theta_s.max_abs_diff(vartheta_s) > 1e-8 {
        return Err(Error::InvalidParameter(
            "theta_S does not match the channel state marginal".into(),
        ));
    }
    let r_as = DensityOperator::new(theta.permute(&[1, 0, 2])?.with_dims(vec![d_r, d_a * d_s])?)?;
    let rb = channel.apply_on_second(&r_as)?;
    let rs = theta.partial_trace(&[1, 2])?;
    let curves = PackingCoveringCurves::new(&rb, &rs, grids, Execution::default())?;
    let mut b = packing_covering_bound(Protocol::StateInfo, &curves, log_m, log_k);
    let cov = b.components["covering"];
    b.components.remove("covering");
    b.components.insert("uhlmann".into(), uhlmann_f(cov));
    b.epsilon_bound = b.components.values().sum();
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::{random_cq, random_density, Seed};

    fn half() -> DensityOperator {
        DensityOperator::maximally_mixed(vec![2])
    }

    fn perfect_bit() -> DensityOperator {
        DensityOperator::from_probabilities(vec![2, 2], &[0.5, 0.0, 0.0, 0.5]).unwrap()
    }

    #[test]
    fn f_endpoints_and_monotone() {
        assert_eq!(uhlmann_f(0.0), 0.0);
        assert_eq!(uhlmann_f(1.0), 1.0);
        let xs = linspace(0.0, 1.0, 21);
        assert!(xs.windows(2).all(|w| uhlmann_f(w[0]) <= uhlmann_f(w[1])));
    }

    #[test]
    fn packing_examples() {
        let product = half().tensor(&random_density(2, 2, Seed(1)).unwrap());
        let r = packing_exponent_bound(&product, 0.3, &converse_alphas()).unwrap();
        assert!(r.value >= 1.0 - 1e-12 && r.notes.contains("vacuous"));
        let r = packing_exponent_bound(&perfect_bit(), 0.5 * 2f64.ln(), &converse_alphas()).unwrap();
        assert!(r.param("exponent").unwrap() > 0.0);
        let r2 = packing_exponent_bound(&perfect_bit(), 0.6 * 2f64.ln(), &converse_alphas()).unwrap();
        assert!(r2.value >= r.value);
    }

    #[test]
    fn packing_capacity_product() {
        let product = half().tensor(&half());
        let r = packing_capacity_bound(&product, 0.5, 0.25).unwrap();
        assert!((r.value - (-(0.75f64).ln() - 4f64.ln())).abs() < 1e-8, "{r:?}");
        let r2 = packing_capacity_bound(&product, 0.6, 0.25).unwrap();
        assert!(r2.value >= r.value - 1e-12);
    }

    #[test]
    fn wiretap_independent_eve() {
        let rho_b = [
            DensityOperator::from_probabilities(vec![2], &[0.9, 0.1]).unwrap(),
            DensityOperator::from_probabilities(vec![2], &[0.1, 0.9]).unwrap(),
        ];
        let e = random_density(2, 2, Seed(2)).unwrap();
        let state = CqState::new(vec![0.5, 0.5], rho_b.iter().map(|b| b.tensor(&e)).collect()).unwrap();
        let k = 9f64;
        let rates = RateTriple {
            log_m: Some(0.01),
            log_k: Some(k.ln()),
            log_l: None,
        };
        let b = wiretap_bound(&state, rates, &AlphaGrids::default()).unwrap();
        assert!((b.components["covering"] - k.powf(-0.5)).abs() < 1e-6, "{b:?}");
        let sum: f64 = b.components.values().sum();
        assert!((b.epsilon_bound - sum).abs() < 1e-12);
        assert!(b.components.values().all(|&v| v >= 0.0));
        let s = secret_key_bound(&state, rates, &AlphaGrids::default()).unwrap();
        assert_eq!(s.epsilon_bound, b.epsilon_bound);
        assert_eq!(s.protocol, Protocol::SecretKey);
    }

    #[test]
    fn wiretap_positivity_threshold() {
        let state = random_cq(2, vec![2, 2], Seed(3)).unwrap();
        let (xb, xe) = cq_marginals(&state).unwrap();
        let curves = PackingCoveringCurves::new(&xb, &xe, &AlphaGrids::default(), Execution::default()).unwrap();
        let gap = curves.packing_info - curves.covering_info;
        if gap > 0.1 {
            let inside = positivity_scan(&curves, gap - 0.05);
            assert!(inside.predicted && inside.consistent(), "{inside:?}");
        }
        let outside = positivity_scan(&curves, gap.max(0.0) + 0.05);
        assert!(!outside.predicted && outside.consistent(), "{outside:?}");
    }

    #[test]
    fn second_order_examples() {
        let r = second_order_rate(10, 0.5, 0.3, 0.2, 0.1, 0.5, 0.5, 2.0).unwrap();
        assert!((r - (10.0 * 0.3 - 2.0 * 10f64.ln())).abs() < 1e-9);
        let plain = second_order_rate(10, 0.5, 0.3, 0.0, 0.0, 0.1, 0.4, 0.0).unwrap();
        let want = 5.0 + (3.0f64).sqrt() * inverse_normal_cdf(0.1).unwrap();
        assert!((plain - want).abs() < 1e-12);
        assert!(second_order_rate(0, 0.0, 0.0, 0.0, 0.0, 0.1, 0.1, 0.0).is_err());
        assert_eq!(default_log_constant(3), 4.0);
    }

    #[test]
    fn msg_compression_product() {
        let psi = half().tensor(&random_density(2, 2, Seed(4)).unwrap());
        let r = msg_compression_exponent(&psi, 4f64.ln(), 1, &[2.0], Some((2, &half()))).unwrap();
        assert!((r.value - 1.0).abs() < 1e-6, "{r:?}");
        assert!(r.param("one_shot").unwrap() < 1e-6);
        let r3 = msg_compression_exponent(&psi, 4f64.ln(), 3, &[2.0], None).unwrap();
        assert!((r3.param("exponent").unwrap() - r.param("exponent").unwrap()).abs() < 1e-9);
        let neg = msg_compression_exponent(&perfect_bit(), 0.1, 1, &exponent_alphas(), None).unwrap();
        assert!(neg.value >= 2f64.sqrt() - 1e-9);
    }

    fn qubit_povm() -> Vec<HermitianOperator> {
        let p0 = HermitianOperator::from_real_diagonal(vec![2], &[0.8, 0.3]).unwrap();
        let p1 = HermitianOperator::identity(vec![2]).add_scaled(&p0, -1.0);
        vec![p0, p1]
    }

    #[test]
    fn measurement_state_marginals() {
        let rho = random_density(2, 2, Seed(5)).unwrap();
        let theta = measurement_state(&rho, &qubit_povm(), &[vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap();
        // Tr_U θ_RU = ρ_R = ρ^T.
        let r = theta.map_conditionals(|c| c.partial_trace(&[0])).unwrap().average();
        let rt = Mat::from_fn(2, 2, |i, j| rho.entry(j, i));
        let rt = HermitianOperator::new(vec![2], rt).unwrap();
        assert!(r.max_abs_diff(&rt) < 1e-12);
        assert!((theta.probs()[0] - rho.trace_with(&qubit_povm()[0])).abs() < 1e-12);
    }

    #[test]
    fn measurement_independent_u() {
        let rho = random_density(2, 2, Seed(6)).unwrap();
        let trivial = vec![
            HermitianOperator::identity(vec![2]).scaled(0.5),
            HermitianOperator::identity(vec![2]).scaled(0.5),
        ];
        let theta = measurement_state(&rho, &trivial, &[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let small = measurement_compression_bound(
            &theta,
            RateTriple {
                log_m: Some(0.0),
                log_l: Some(1.0),
                log_k: None,
            },
            &AlphaGrids::default(),
            MeasurementPairing::Proof,
        )
        .unwrap();
        let large = measurement_compression_bound(
            &theta,
            RateTriple {
                log_m: Some(0.0),
                log_l: Some(4.0),
                log_k: None,
            },
            &AlphaGrids::default(),
            MeasurementPairing::Proof,
        )
        .unwrap();
        assert!(large.epsilon_bound < small.epsilon_bound);
        assert!(large.positivity_region);
        let sum: f64 = large.components.values().sum();
        assert!((large.epsilon_bound - sum).abs() < 1e-12);
    }

    #[test]
    fn measurement_rate_region_orders() {
        let rho = random_density(2, 2, Seed(7)).unwrap();
        let theta = measurement_state(&rho, &qubit_povm(), &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let (l, ml) = measurement_rate_region(&theta, 0.02, 0.3, 0.05, 0.05).unwrap();
        assert!(l.value.is_finite() && ml.value.is_finite());
    }

    #[test]
    fn kraus_tp_check() {
        let id = linalg::identity(2);
        assert!(KrausChannel::new(vec![id.clone()]).is_ok());
        let half_id = linalg::scale(id.as_ref(), 0.5);
        assert!(KrausChannel::new(vec![half_id]).is_err());
    }

    #[test]
    fn state_info_independent_s() {
        // N(a ⊗ s) = a: trace out S. Kraus K_j = 1_A ⊗ ⟨j|_S.
        let ops: Vec<Mat<C64>> = (0..2)
            .map(|j| {
                Mat::from_fn(2, 4, |r, c| {
                    if c == r * 2 + j {
                        C64::new(1.0, 0.0)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                })
            })
            .collect();
        let channel = KrausChannel::new(ops).unwrap();
        let ar = perfect_bit();
        let s = random_density(2, 2, Seed(8)).unwrap();
        let theta = ar.tensor(&s);
        let rates = |log_k| RateTriple {
            log_m: Some(0.1),
            log_k: Some(log_k),
            log_l: None,
        };
        let grids = AlphaGrids::default();
        let b = state_info_coding_bound(&theta, &channel, &s, rates(20.0), &grids).unwrap();
        assert!(b.components["uhlmann"] < 1e-2, "{b:?}");
        assert!(b.positivity_region);
        let b2 = state_info_coding_bound(&theta, &channel, &s, rates(2.0), &grids).unwrap();
        assert!(b2.components["uhlmann"] > b.components["uhlmann"]);
        let rates = rates(0.0);
        let wrong = random_density(2, 2, Seed(9)).unwrap();
        assert!(state_info_coding_bound(&theta, &channel, &wrong, rates, &AlphaGrids::default()).is_err());
    }
}
