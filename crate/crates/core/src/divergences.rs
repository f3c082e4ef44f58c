//! Two-argument divergences. All logarithms are natural.

use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::linalg;
use crate::operator::{DensityOperator, HermitianOperator, Test};

/// A divergence in nats, possibly +∞ when a support condition fails.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DivergenceValue {
    pub nats: f64,
    pub finite: bool,
}

impl DivergenceValue {
    pub fn finite(nats: f64) -> Self {
        DivergenceValue { nats, finite: true }
    }

    pub fn infinite() -> Self {
        DivergenceValue {
            nats: f64::INFINITY,
            finite: false,
        }
    }

    pub fn bits(&self) -> f64 {
        self.nats / std::f64::consts::LN_2
    }
}

/// Mass of ρ outside supp σ above which the support condition fails.
pub const SUPPORT_LEAK_TOL: f64 = 1e-9;

fn kernel_mass(rho: &HermitianOperator, sigma: &HermitianOperator) -> Result<f64> {
    let e = sigma.eig()?;
    let cut = e.support_tol();
    let cols: Vec<usize> = (0..e.eigenvalues.len())
        .filter(|&k| e.eigenvalues[k] <= cut)
        .collect();
    if cols.is_empty() {
        return Ok(0.0);
    }
    let p0 = linalg::projector(e.eigenvectors.as_ref(), &cols);
    Ok(linalg::trace_product(p0.as_ref(), rho.matrix()).re.max(0.0))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || alpha == 1.0 || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "Renyi order {alpha} must be positive, finite and != 1"
        )));
    }
    Ok(())
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon {eps} not in (0,1)")));
    }
    Ok(())
}

/// Tr ρ log ρ, from the spectrum.
fn neg_entropy(rho: &DensityOperator) -> Result<f64> {
    Ok(rho
        .spectrum()?
        .into_iter()
        .filter(|&v| v > 0.0)
        .map(|v| v * v.ln())
        .sum())
}

/// D(ρ‖σ) = Tr ρ(log ρ − log σ).
pub fn relative_entropy(rho: &DensityOperator, sigma: &DensityOperator) -> Result<DivergenceValue> {
    rho.same_shape(sigma)?;
    if kernel_mass(rho, sigma)? > SUPPORT_LEAK_TOL {
        return Ok(DivergenceValue::infinite());
    }
    let cross = rho.trace_with(&sigma.log_support()?);
    Ok(DivergenceValue::finite(neg_entropy(rho)? - cross))
}

/// V(ρ‖σ) = Tr ρ(log ρ − log σ)² − D(ρ‖σ)².
pub fn relative_entropy_variance(
    rho: &DensityOperator,
    sigma: &DensityOperator,
) -> Result<DivergenceValue> {
    rho.same_shape(sigma)?;
    if kernel_mass(rho, sigma)? > SUPPORT_LEAK_TOL {
        return Ok(DivergenceValue::infinite());
    }
    let l = &rho.log_support()? - &sigma.log_support()?;
    let d = rho.trace_with(&l);
    let rl = rho.product(&l);
    let second = linalg::trace_product(rl.matrix(), l.matrix()).re;
    Ok(DivergenceValue::finite((second - d * d).max(0.0)))
}

/// Tr ρ^α σ^{1−α} (the Petz quasi-entropy), with pseudo-inverse powers.
pub fn petz_quasi(rho: &DensityOperator, sigma: &DensityOperator, alpha: f64) -> Result<f64> {
    let a = rho.psd_power(alpha)?;
    let b = sigma.psd_power(1.0 - alpha)?;
    Ok(a.trace_with(&b))
}

/// D_α(ρ‖σ) = log Tr[ρ^α σ^{1−α}] / (α − 1).
pub fn petz_renyi(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    alpha: f64,
) -> Result<DivergenceValue> {
    check_alpha(alpha)?;
    rho.same_shape(sigma)?;
    if alpha > 1.0 && kernel_mass(rho, sigma)? > SUPPORT_LEAK_TOL {
        return Ok(DivergenceValue::infinite());
    }
    let q = petz_quasi(rho, sigma, alpha)?;
    if !(q > 0.0) {
        return Ok(DivergenceValue::infinite());
    }
    Ok(DivergenceValue::finite(q.ln() / (alpha - 1.0)))
}

/// Tr[(σ^{(1−α)/2α} ρ σ^{(1−α)/2α})^α].
pub fn sandwiched_quasi(rho: &DensityOperator, sigma: &DensityOperator, alpha: f64) -> Result<f64> {
    let w = sigma.psd_power((1.0 - alpha) / (2.0 * alpha))?;
    let inner = w.sandwich(rho.op());
    Ok(inner
        .eigenvalues()?
        .into_iter()
        .filter(|&v| v > 0.0)
        .map(|v| v.powf(alpha))
        .sum())
}

/// D_α*(ρ‖σ) = log Tr[(σ^{(1−α)/2α} ρ σ^{(1−α)/2α})^α] / (α − 1).
pub fn sandwiched_renyi(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    alpha: f64,
) -> Result<DivergenceValue> {
    check_alpha(alpha)?;
    rho.same_shape(sigma)?;
    if alpha > 1.0 && kernel_mass(rho, sigma)? > SUPPORT_LEAK_TOL {
        return Ok(DivergenceValue::infinite());
    }
    let q = sandwiched_quasi(rho, sigma, alpha)?;
    if !(q > 0.0) {
        return Ok(DivergenceValue::infinite());
    }
    Ok(DivergenceValue::finite(q.ln() / (alpha - 1.0)))
}

/// Optimal test of the hypothesis-testing divergence.
///
/// `test = (1−κ)·{ρ − t_hi σ > 0} + κ·{ρ − t_lo σ > 0}` where the two
/// thresholds bracket the Neyman–Pearson threshold `t` to relative width
/// 1e-12. When the bracket straddles a degenerate crossing, the difference
/// of the two projectors is the boundary eigenspace and the test reduces to
/// `{ρ − tσ > 0} + κ·Π_0`.
#[derive(Clone, Debug)]
pub struct NeymanPearsonTest {
    pub threshold: f64,
    pub kernel_weight: f64,
    pub test: Test,
    /// Tr[ρT].
    pub rho_mass: f64,
    /// Tr[σT].
    pub sigma_mass: f64,
}

/// Strict positive part of ρ − tσ, with boundary cut relative to ‖ρ − tσ‖.
struct NpProjector {
    proj: HermitianOperator,
    rho_mass: f64,
}

const NP_BOUNDARY_REL: f64 = 1e-9;
const NP_MAX_ITERS: usize = 200;
const NP_MASS_TOL: f64 = 1e-12;

fn np_projector(rho: &HermitianOperator, sigma: &HermitianOperator, t: f64) -> Result<NpProjector> {
    let diff = rho.add_scaled(sigma, -t);
    let e = diff.eig()?;
    let cut = NP_BOUNDARY_REL * e.max_abs();
    let cols: Vec<usize> = (0..e.eigenvalues.len())
        .filter(|&k| e.eigenvalues[k] > cut)
        .collect();
    let proj = HermitianOperator::from_parts(
        rho.dims().to_vec(),
        linalg::projector(e.eigenvectors.as_ref(), &cols),
    );
    Ok(NpProjector {
        rho_mass: rho.trace_with(&proj),
        proj,
    })
}

/// D_h^ε(ρ‖σ) = sup{−log Tr σT : 0 ≤ T ≤ 1, Tr ρT ≥ 1 − ε}.
pub fn hypothesis_testing_divergence(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    eps: f64,
) -> Result<(DivergenceValue, NeymanPearsonTest)> {
    check_eps(eps)?;
    rho.same_shape(sigma)?;
    let target = 1.0 - eps;

    let se = sigma.eig()?;
    let cut = se.support_tol();
    let ker: Vec<usize> = (0..se.eigenvalues.len())
        .filter(|&k| se.eigenvalues[k] <= cut)
        .collect();
    if !ker.is_empty() {
        let p0 = HermitianOperator::from_parts(
            rho.dims().to_vec(),
            linalg::projector(se.eigenvectors.as_ref(), &ker),
        );
        let m0 = rho.trace_with(&p0);
        if m0 >= target - NP_MASS_TOL {
            let k = (target / m0).min(1.0);
            let test = Test::assume_valid(p0.scaled(k));
            let np = NeymanPearsonTest {
                threshold: f64::INFINITY,
                kernel_weight: k,
                rho_mass: rho.trace_with(&test),
                sigma_mass: sigma.trace_with(&test).max(0.0),
                test,
            };
            return Ok((DivergenceValue::infinite(), np));
        }
    }

    let eval = |t: f64| np_projector(rho.op(), sigma.op(), t);
    // Bracket: g(lo) ≥ target > g(hi), g nonincreasing.
    let mut lo_t;
    let mut lo;
    let mut hi_t;
    let mut hi;
    let first = eval(1.0)?;
    if first.rho_mass >= target {
        lo_t = 1.0;
        lo = first;
        hi_t = 4.0;
        loop {
            let p = eval(hi_t)?;
            if p.rho_mass < target {
                hi = p;
                break;
            }
            lo_t = hi_t;
            lo = p;
            hi_t *= 4.0;
            if hi_t > 1e250 {
                return Err(Error::InvalidParameter(
                    "no Neyman-Pearson threshold below 1e250".into(),
                ));
            }
        }
    } else {
        hi_t = 1.0;
        hi = first;
        lo_t = 0.25;
        loop {
            let p = eval(lo_t)?;
            if p.rho_mass >= target {
                lo = p;
                break;
            }
            hi_t = lo_t;
            hi = p;
            lo_t *= 0.25;
            if lo_t < 1e-290 {
                lo_t = 0.0;
                lo = eval(0.0)?;
                break;
            }
        }
    }

    for _ in 0..NP_MAX_ITERS {
        if (lo.rho_mass - target).abs() <= NP_MASS_TOL || hi_t - lo_t <= 1e-12 * hi_t {
            break;
        }
        let mid = if lo_t > 0.0 {
            (lo_t * hi_t).sqrt()
        } else {
            0.5 * hi_t
        };
        let p = eval(mid)?;
        if p.rho_mass >= target {
            lo_t = mid;
            lo = p;
        } else {
            hi_t = mid;
            hi = p;
        }
    }

    let span = lo.rho_mass - hi.rho_mass;
    let k = if span > 0.0 {
        ((target - hi.rho_mass) / span).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let t_op = hi.proj.scaled(1.0 - k).add_scaled(&lo.proj, k);
    let test = Test::assume_valid(t_op);
    let sigma_mass = sigma.trace_with(&test).max(0.0);
    let np = NeymanPearsonTest {
        threshold: if lo_t > 0.0 { (lo_t * hi_t).sqrt() } else { hi_t },
        kernel_weight: k,
        rho_mass: rho.trace_with(&test),
        sigma_mass,
        test,
    };
    let value = if sigma_mass > 0.0 {
        DivergenceValue::finite(-sigma_mass.ln())
    } else {
        DivergenceValue::infinite()
    };
    Ok((value, np))
}

const DS_GRID: usize = 400;

/// D_s^ε(ρ‖σ) = sup{log c : Tr[ρ{ρ ≤ cσ}] ≤ ε}.
pub fn info_spectrum_divergence(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    eps: f64,
) -> Result<DivergenceValue> {
    check_eps(eps)?;
    rho.same_shape(sigma)?;
    let h = |c: f64| -> Result<f64> { Ok(1.0 - np_projector(rho.op(), sigma.op(), c)?.rho_mass) };

    let m0 = kernel_mass(rho, sigma)?;
    if 1.0 - m0 <= eps {
        return Ok(DivergenceValue::infinite());
    }

    let rs = rho.spectrum()?;
    let ss = sigma.spectrum()?;
    let r_max = rs.last().copied().unwrap_or(1.0);
    let r_min = rs
        .iter()
        .copied()
        .find(|&v| v > crate::operator::tol::SUPPORT_REL * r_max)
        .unwrap_or(r_max);
    let s_max = ss.last().copied().unwrap_or(1.0);
    let s_min = ss
        .iter()
        .copied()
        .find(|&v| v > crate::operator::tol::SUPPORT_REL * s_max)
        .unwrap_or(s_max);
    let mut c_lo = 0.5 * r_min / s_max;
    let mut c_hi = 2.0 * r_max / s_min;
    while h(c_lo)? > eps {
        c_lo *= 0.25;
        if c_lo < 1e-300 {
            return Ok(DivergenceValue::finite(f64::NEG_INFINITY));
        }
    }
    while h(c_hi)? <= eps {
        c_hi *= 4.0;
        if c_hi > 1e300 {
            return Ok(DivergenceValue::infinite());
        }
    }

    let ratio = (c_hi / c_lo).ln();
    let grid: Vec<f64> = (0..DS_GRID)
        .map(|k| c_lo * (ratio * k as f64 / (DS_GRID - 1) as f64).exp())
        .collect();
    let mut feasible = c_lo;
    let mut infeasible = c_hi;
    for (k, &c) in grid.iter().enumerate() {
        if h(c)? <= eps {
            feasible = c;
            infeasible = grid.get(k + 1).copied().unwrap_or(c_hi);
        }
    }
    for _ in 0..NP_MAX_ITERS {
        if infeasible - feasible <= 1e-13 * infeasible {
            break;
        }
        let mid = (feasible * infeasible).sqrt();
        if h(mid)? <= eps {
            feasible = mid;
        } else {
            infeasible = mid;
        }
    }
    Ok(DivergenceValue::finite(feasible.ln()))
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Φ⁻¹ by Acklam's rational approximation polished with a Newton step.
pub fn inverse_normal_cdf(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("probability {p} not in (0,1)")));
    }
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;
    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let mut x = if p < P_LOW {
        tail((-2.0 * p.ln()).sqrt())
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    };
    for _ in 0..2 {
        let pdf = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        if pdf <= 0.0 {
            break;
        }
        let step = (normal_cdf(x) - p) / pdf;
        // Halley correction keeps the tails stable.
        x -= step / (1.0 + 0.5 * x * step);
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::pinching;
    use crate::testkit::{random_density, Seed};
    use proptest::prelude::*;

    fn dens(v: &[f64]) -> DensityOperator {
        DensityOperator::from_probabilities(vec![v.len()], v).unwrap()
    }

    fn classical_renyi(p: &[f64], q: &[f64], a: f64) -> f64 {
        let s: f64 = p
            .iter()
            .zip(q)
            .filter(|(&x, _)| x > 0.0)
            .map(|(&x, &y)| x.powf(a) * y.powf(1.0 - a))
            .sum();
        s.ln() / (a - 1.0)
    }

    /// Exact classical Neyman-Pearson: fill outcomes in decreasing
    /// likelihood ratio until the ρ-mass reaches 1 − ε.
    fn classical_dh(p: &[f64], q: &[f64], eps: f64) -> f64 {
        let mut idx: Vec<usize> = (0..p.len()).collect();
        idx.sort_by(|&i, &j| (p[j] * q[i]).total_cmp(&(p[i] * q[j])));
        let mut need = 1.0 - eps;
        let mut cost = 0.0;
        for i in idx {
            if need <= 0.0 {
                break;
            }
            let take = if p[i] > 0.0 { (need / p[i]).min(1.0) } else { 0.0 };
            need -= take * p[i];
            cost += take * q[i];
        }
        -cost.ln()
    }

    #[test]
    fn relative_entropy_examples() {
        let rho = random_density(3, 3, Seed(1)).unwrap();
        assert!(relative_entropy(&rho, &rho).unwrap().nats.abs() < 1e-12);
        let d = relative_entropy(&dens(&[1.0, 0.0]), &dens(&[0.5, 0.5])).unwrap();
        assert!((d.nats - 2f64.ln()).abs() < 1e-14);
        let inf = relative_entropy(&dens(&[0.5, 0.5]), &dens(&[1.0, 0.0])).unwrap();
        assert!(!inf.finite && inf.nats.is_infinite());
    }

    #[test]
    fn variance_examples() {
        let rho = random_density(3, 3, Seed(2)).unwrap();
        assert!(relative_entropy_variance(&rho, &rho).unwrap().nats < 1e-12);
        let v = relative_entropy_variance(&dens(&[0.75, 0.25]), &dens(&[0.5, 0.5])).unwrap();
        let (a, b) = (1.5f64.ln(), 0.5f64.ln());
        let d = 0.75 * a + 0.25 * b;
        assert!((v.nats - (0.75 * a * a + 0.25 * b * b - d * d)).abs() < 1e-14);
    }

    #[test]
    fn renyi_examples() {
        let rho = random_density(3, 3, Seed(3)).unwrap();
        for a in [0.5, 0.9, 1.5, 2.0] {
            assert!(petz_renyi(&rho, &rho, a).unwrap().nats.abs() < 1e-12);
            assert!(sandwiched_renyi(&rho, &rho, a).unwrap().nats.abs() < 1e-12);
            let p = petz_renyi(&dens(&[1.0, 0.0]), &dens(&[0.5, 0.5]), a).unwrap();
            let s = sandwiched_renyi(&dens(&[1.0, 0.0]), &dens(&[0.5, 0.5]), a).unwrap();
            assert!((p.nats - 2f64.ln()).abs() < 1e-13);
            assert!((s.nats - 2f64.ln()).abs() < 1e-13);
        }
        assert!(petz_renyi(&rho, &rho, 1.0).is_err());
        assert!(sandwiched_renyi(&rho, &rho, 0.0).is_err());
        assert!(!sandwiched_renyi(&dens(&[0.5, 0.5]), &dens(&[1.0, 0.0]), 2.0).unwrap().finite);
        assert!(petz_renyi(&dens(&[0.5, 0.5]), &dens(&[1.0, 0.0]), 0.5).unwrap().finite);
    }

    #[test]
    fn renyi_commuting_matches_classical() {
        let p = [0.1, 0.2, 0.3, 0.4];
        let q = [0.4, 0.3, 0.2, 0.1];
        for a in [0.3, 0.7, 1.3, 2.0, 3.0] {
            let want = classical_renyi(&p, &q, a);
            assert!((petz_renyi(&dens(&p), &dens(&q), a).unwrap().nats - want).abs() < 1e-12);
            assert!((sandwiched_renyi(&dens(&p), &dens(&q), a).unwrap().nats - want).abs() < 1e-12);
        }
    }

    #[test]
    fn dh_examples() {
        let rho = random_density(3, 3, Seed(4)).unwrap();
        for eps in [0.1, 0.5, 0.9] {
            let (v, np) = hypothesis_testing_divergence(&rho, &rho, eps).unwrap();
            assert!((v.nats + (1.0 - eps).ln()).abs() < 1e-9);
            assert!((np.rho_mass - (1.0 - eps)).abs() < 1e-10);
        }
        let (v, np) = hypothesis_testing_divergence(&dens(&[1.0, 0.0]), &dens(&[0.5, 0.5]), 0.5).unwrap();
        assert!((v.nats - 4f64.ln()).abs() < 1e-12);
        assert!((np.test.entry(0, 0).re - 0.5).abs() < 1e-12);
        assert!(hypothesis_testing_divergence(&rho, &rho, 1.0).is_err());
    }

    #[test]
    fn dh_infinite_when_kernel_carries_mass() {
        let (v, np) = hypothesis_testing_divergence(&dens(&[0.5, 0.5]), &dens(&[1.0, 0.0]), 0.6).unwrap();
        assert!(!v.finite);
        assert!(np.sigma_mass < 1e-14);
        assert!((np.rho_mass - 0.4).abs() < 1e-14);
        let (v, _) = hypothesis_testing_divergence(&dens(&[0.5, 0.5]), &dens(&[1.0, 0.0]), 0.4).unwrap();
        assert!(v.finite);
    }

    #[test]
    fn dh_matches_classical_np_oracle() {
        let cases: [([f64; 4], [f64; 4]); 3] = [
            ([0.1, 0.2, 0.3, 0.4], [0.4, 0.3, 0.2, 0.1]),
            ([0.25, 0.25, 0.25, 0.25], [0.1, 0.2, 0.3, 0.4]),
            ([0.5, 0.5, 0.0, 0.0], [0.2, 0.2, 0.3, 0.3]),
        ];
        for (p, q) in cases {
            for eps in [0.05, 0.2, 0.45, 0.7, 0.95] {
                let (v, _) = hypothesis_testing_divergence(&dens(&p), &dens(&q), eps).unwrap();
                assert!((v.nats - classical_dh(&p, &q, eps)).abs() < 1e-8, "{p:?} {q:?} {eps}");
            }
        }
    }

    #[test]
    fn ds_examples() {
        let v = info_spectrum_divergence(&dens(&[0.75, 0.25]), &dens(&[0.5, 0.5]), 0.3).unwrap();
        assert!((v.nats - 1.5f64.ln()).abs() < 1e-8);
        let v = info_spectrum_divergence(&dens(&[0.75, 0.25]), &dens(&[0.5, 0.5]), 0.2).unwrap();
        assert!((v.nats - 0.5f64.ln()).abs() < 1e-8);
        let rho = random_density(3, 3, Seed(5)).unwrap();
        for eps in [0.1, 0.5, 0.9] {
            assert!(info_spectrum_divergence(&rho, &rho, eps).unwrap().nats.abs() < 1e-10);
        }
    }

    #[test]
    fn inverse_normal_examples() {
        assert!(inverse_normal_cdf(0.5).unwrap().abs() < 1e-15);
        for p in [1e-10, 0.001, 0.02, 0.3, 0.6] {
            let a = inverse_normal_cdf(p).unwrap();
            let b = inverse_normal_cdf(1.0 - p).unwrap();
            assert!((a + b).abs() < 1e-6 * a.abs().max(1.0));
            assert!((normal_cdf(a) - p).abs() <= 1e-12);
        }
        // Trapezoid integration of the Gaussian density from −12 to 1.959964.
        let x = inverse_normal_cdf(0.975).unwrap();
        let n = 200_000;
        let (lo, hi) = (-12.0f64, 1.959964f64);
        let step = (hi - lo) / n as f64;
        let pdf = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let area: f64 = (0..n)
            .map(|k| 0.5 * step * (pdf(lo + k as f64 * step) + pdf(lo + (k + 1) as f64 * step)))
            .sum();
        assert!((area - 0.975).abs() < 1e-6);
        assert!((x - 1.959964).abs() < 1e-5);
        assert!(inverse_normal_cdf(0.0).is_err());
        assert!(inverse_normal_cdf(1.0).is_err());
    }

    fn arb_seed() -> impl Strategy<Value = Seed> {
        any::<u64>().prop_map(Seed)
    }

    fn commuting_pair(seed: Seed) -> (Vec<f64>, Vec<f64>) {
        let a = random_density(4, 4, seed.derive(0)).unwrap().spectrum().unwrap();
        let b = random_density(4, 4, seed.derive(1)).unwrap().spectrum().unwrap();
        (a, b)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn klein_and_variance_nonnegative(seed in arb_seed()) {
            let r = random_density(3, 3, seed.derive(0)).unwrap();
            let s = random_density(3, 3, seed.derive(1)).unwrap();
            prop_assert!(relative_entropy(&r, &s).unwrap().nats >= -1e-12);
            prop_assert!(relative_entropy_variance(&r, &s).unwrap().nats >= 0.0);
        }

        #[test]
        fn sandwiched_below_petz(seed in arb_seed()) {
            let r = random_density(3, 3, seed.derive(0)).unwrap();
            let s = random_density(3, 3, seed.derive(1)).unwrap();
            for a in [1.2, 1.5, 2.0] {
                let sw = sandwiched_renyi(&r, &s, a).unwrap().nats;
                let pz = petz_renyi(&r, &s, a).unwrap().nats;
                prop_assert!(sw <= pz + 1e-9);
            }
        }

        #[test]
        fn renyi_continuity_at_one(seed in arb_seed()) {
            let r = random_density(3, 3, seed.derive(0)).unwrap();
            let s = random_density(3, 3, seed.derive(1)).unwrap();
            let d = relative_entropy(&r, &s).unwrap().nats;
            for a in [0.999, 1.001] {
                prop_assert!((petz_renyi(&r, &s, a).unwrap().nats - d).abs() <= 1e-2);
                prop_assert!((sandwiched_renyi(&r, &s, a).unwrap().nats - d).abs() <= 1e-2);
            }
        }

        #[test]
        fn petz_nondecreasing_in_alpha(seed in arb_seed()) {
            let (p, q) = commuting_pair(seed);
            let (r, s) = (dens(&p), dens(&q));
            let grid = [0.2, 0.5, 0.8, 1.2, 1.6, 2.0, 3.0];
            let v: Vec<f64> = grid.iter().map(|&a| petz_renyi(&r, &s, a).unwrap().nats).collect();
            for w in v.windows(2) {
                prop_assert!(w[1] >= w[0] - 1e-10);
            }
        }

        #[test]
        fn dh_certificate_and_monotone(seed in arb_seed()) {
            let r = random_density(4, 4, seed.derive(0)).unwrap();
            let s = random_density(4, 3, seed.derive(1)).unwrap();
            let mut prev = 0.0;
            for eps in [0.05, 0.2, 0.4, 0.6, 0.8] {
                let (v, np) = hypothesis_testing_divergence(&r, &s, eps).unwrap();
                prop_assert!(v.nats >= prev - 1e-9);
                prev = v.nats;
                if v.finite {
                    prop_assert!((-s.trace_with(&np.test).ln() - v.nats).abs() < 1e-10);
                } else {
                    prop_assert!(np.sigma_mass < 1e-10);
                }
                prop_assert!(r.trace_with(&np.test) >= 1.0 - eps - 1e-10);
                let ev = np.test.eigenvalues().unwrap();
                prop_assert!(ev[0] >= -1e-10 && ev[ev.len() - 1] <= 1.0 + 1e-10);
            }
        }

        #[test]
        fn dh_data_processing_under_pinching(seed in arb_seed(), eps in 0.05f64..0.95) {
            let r = random_density(4, 4, seed.derive(0)).unwrap();
            let s = random_density(4, 4, seed.derive(1)).unwrap();
            let pr = DensityOperator::assume_valid(pinching(&s, &r).unwrap());
            let a = hypothesis_testing_divergence(&pr, &s, eps).unwrap().0.nats;
            let b = hypothesis_testing_divergence(&r, &s, eps).unwrap().0.nats;
            prop_assert!(a <= b + 1e-8);
        }

        #[test]
        fn ds_nondecreasing_in_eps(seed in arb_seed()) {
            let (p, q) = commuting_pair(seed);
            let (r, s) = (dens(&p), dens(&q));
            let mut prev = f64::NEG_INFINITY;
            for eps in [0.05, 0.2, 0.4, 0.6, 0.8, 0.95] {
                let v = info_spectrum_divergence(&r, &s, eps).unwrap().nats;
                prop_assert!(v >= prev - 1e-10);
                prev = v;
            }
        }
    }
}
