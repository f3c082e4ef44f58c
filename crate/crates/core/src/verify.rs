//! Randomized property suites over every module, with counterexample
//! capture. Each property runs a fixed number of seeded trials; a trial
//! reports a defect (how far the property is from holding) and the
//! tolerance it is allowed.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use faer::Mat;
use serde::Serialize;

use crate::applications::{
    cq_marginals, positivity_scan, uhlmann_f, wiretap_bound, AlphaGrids, PackingCoveringCurves,
    RateTriple,
};
use crate::convex_split::{
    converse_curve, converse_exponent, covering_error_exact, covering_exponent,
    direct_bound_components, exponent_upper_bound_from_curve, formulation_rhs, map_norm_check_with,
    oneshot_converse_lower_bound, sandwiched_info_curve, strong_converse_from_curve,
    ConvexSplitInstance,
};
use crate::divergences::{
    hypothesis_testing_divergence, petz_renyi, relative_entropy, sandwiched_renyi,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::{c_grid, converse_alphas, exponent_alphas};
use crate::info::{
    doubly_minimized_info, generalized_mutual_information, hypothesis_testing_information, IhMode,
};
use crate::operator::{
    nc_minimal_trace, nc_quotient, pinching, purified_distance, spec_count, trace_distance,
    weighted_lp_norm, DensityOperator, HermitianOperator, OperatorFile, RawOperator,
};
use crate::testkit::{
    classical_covering_oracle, classical_embed, classical_hypothesis_oracle,
    classical_minimal_oracle, random_bipartite, random_cq, random_density, random_density_dims,
    random_hermitian, random_unitary, ProbTable, Seed,
};
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Core,
    Divergences,
    Info,
    ConvexSplit,
    Applications,
    All,
}

impl Suite {
    pub const EACH: [Suite; 5] = [
        Suite::Core,
        Suite::Divergences,
        Suite::Info,
        Suite::ConvexSplit,
        Suite::Applications,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Core => "core",
            Suite::Divergences => "divergences",
            Suite::Info => "info",
            Suite::ConvexSplit => "convex-split",
            Suite::Applications => "applications",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [Suite::All]
            .into_iter()
            .chain(Suite::EACH)
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    pub seed: Seed,
    /// Trials per property (heavier properties use a fraction of this).
    pub trials: usize,
    pub exec: Execution,
    /// Added to every tolerance; negative values make checks stricter.
    pub tolerance_shift: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: Seed(0),
            trials: 100,
            exec: Execution::default(),
            tolerance_shift: 0.0,
        }
    }
}

/// The inputs of a failing trial.
#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub seed: u64,
    pub trial: usize,
    pub defect: f64,
    pub tolerance: f64,
    pub detail: String,
    pub operators: BTreeMap<String, OperatorFile>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub suite: String,
    pub name: String,
    pub trials: usize,
    pub failures: usize,
    pub max_defect: f64,
    pub passed: bool,
    pub seconds: f64,
    pub counterexample: Option<Counterexample>,
}

/// Outcome of one trial.
struct Trial {
    defect: f64,
    tol: f64,
    detail: String,
    operators: Vec<(&'static str, HermitianOperator)>,
}

impl Trial {
    fn new(defect: f64, tol: f64) -> Self {
        Trial {
            defect,
            tol,
            detail: String::new(),
            operators: Vec::new(),
        }
    }

    fn with(mut self, name: &'static str, op: &HermitianOperator) -> Self {
        self.operators.push((name, op.clone()));
        self
    }

    fn detail(mut self, d: String) -> Self {
        self.detail = d;
        self
    }
}

/// Inequality lhs ≤ rhs as a defect.
fn le(lhs: f64, rhs: f64, tol: f64) -> Trial {
    Trial::new(lhs - rhs, tol).detail(format!("{lhs} <= {rhs}"))
}

fn eq(lhs: f64, rhs: f64, tol: f64) -> Trial {
    Trial::new((lhs - rhs).abs(), tol).detail(format!("{lhs} == {rhs}"))
}

fn property<F>(suite: Suite, name: &str, cfg: &VerifyConfig, trials: usize, f: F) -> CheckResult
where
    F: Fn(Seed) -> Result<Trial> + Sync + Send,
{
    let start = Instant::now();
    let root = cfg.seed.derive(hash_name(name));
    let trials = trials.max(1);
    let outcomes = cfg.exec.map_range(trials, |k| f(root.derive(k as u64)));
    let mut failures = 0;
    let mut max_defect = f64::NEG_INFINITY;
    let mut counterexample = None;
    for (k, out) in outcomes.into_iter().enumerate() {
        let trial = out.unwrap_or_else(|e| Trial::new(f64::INFINITY, 0.0).detail(format!("error: {e}")));
        let defect = if trial.defect.is_nan() { f64::INFINITY } else { trial.defect };
        max_defect = max_defect.max(defect);
        if defect > trial.tol + cfg.tolerance_shift {
            failures += 1;
            if counterexample.is_none() {
                counterexample = Some(Counterexample {
                    seed: root.derive(k as u64).0,
                    trial: k,
                    defect,
                    tolerance: trial.tol + cfg.tolerance_shift,
                    detail: trial.detail,
                    operators: trial
                        .operators
                        .iter()
                        .map(|(n, op)| (n.to_string(), OperatorFile::from_operator(op)))
                        .collect(),
                });
            }
        }
    }
    CheckResult {
        suite: suite.name().to_string(),
        name: name.to_string(),
        trials,
        failures,
        max_defect,
        passed: failures == 0,
        seconds: start.elapsed().as_secs_f64(),
        counterexample,
    }
}

fn hash_name(name: &str) -> u64 {
    name.bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

/// Runs one suite (or all of them, in order).
pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Vec<CheckResult> {
    match suite {
        Suite::All => Suite::EACH.iter().flat_map(|&s| run_suite(s, cfg)).collect(),
        Suite::Core => core_suite(cfg),
        Suite::Divergences => divergence_suite(cfg),
        Suite::Info => info_suite(cfg),
        Suite::ConvexSplit => convex_split_suite(cfg),
        Suite::Applications => applications_suite(cfg),
    }
}

fn random_psd(dim: usize, seed: Seed) -> Result<HermitianOperator> {
    let scale = 0.5 + 2.0 * (seed.derive(99).0 % 1000) as f64 / 1000.0;
    Ok(random_density(dim, dim, seed)?.into_op().scaled(scale))
}

fn random_probs(n: usize, seed: Seed) -> Vec<f64> {
    let mut rng = seed.rng();
    let raw: Vec<f64> = (0..n).map(|_| -rand::Rng::random_range(&mut rng, 1e-3f64..1.0).ln()).collect();
    let t: f64 = raw.iter().sum();
    raw.iter().map(|v| v / t).collect()
}

/// Re Tr[A X].
fn trace_against(a: &HermitianOperator, x: &RawOperator) -> f64 {
    let n = a.dim();
    let m = x.matrix();
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (a.entry(i, j) * m[(j, i)]).re)
        .sum()
}

fn core_suite(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let s = Suite::Core;
    let n = cfg.trials;
    vec![
        property(s, "eigendecomposition round trip", cfg, n, |sd| {
            let h = random_hermitian(vec![4], sd);
            let e = h.eig()?;
            let back = HermitianOperator::new(vec![4], e.recompose())?;
            Ok(Trial::new(back.max_abs_diff(&h), 1e-10).with("h", &h))
        }),
        property(s, "partial trace preserves trace", cfg, n, |sd| {
            let rho = random_density_dims(vec![2, 3, 2], 12, sd)?;
            Ok(eq(rho.partial_trace(&[1])?.trace(), 1.0, 1e-12))
        }),
        property(s, "trace distance triangle inequality", cfg, n, |sd| {
            let a = random_density(3, 3, sd.derive(0))?;
            let b = random_density(3, 3, sd.derive(1))?;
            let c = random_density(3, 3, sd.derive(2))?;
            Ok(le(trace_distance(&a, &c)?, trace_distance(&a, &b)? + trace_distance(&b, &c)?, 1e-12))
        }),
        property(s, "minimal: closed form equals infimum over tests (commuting)", cfg, n, |sd| {
            let a: Vec<f64> = random_probs(4, sd.derive(0)).iter().map(|v| v * 1.7).collect();
            let b = random_probs(4, sd.derive(1));
            let ha = HermitianOperator::from_real_diagonal(vec![4], &a)?;
            let hb = HermitianOperator::from_real_diagonal(vec![4], &b)?;
            Ok(eq(nc_minimal_trace(&ha, &hb)?, classical_minimal_oracle(&a, &b)?, 1e-8))
        }),
        property(s, "minimal: monotone in Loewner order", cfg, n, |sd| {
            let a = random_psd(3, sd.derive(0))?;
            let b = random_psd(3, sd.derive(1))?;
            let pa = random_psd(3, sd.derive(2))?.scaled(0.3);
            let pb = random_psd(3, sd.derive(3))?.scaled(0.3);
            let big = nc_minimal_trace(&(&a + &pa), &(&b + &pb))?;
            Ok(le(nc_minimal_trace(&a, &b)?, big, 1e-9).with("a", &a).with("b", &b))
        }),
        property(s, "minimal: monotone under partial trace", cfg, n, |sd| {
            let a = random_density_dims(vec![2, 2], 4, sd.derive(0))?.into_op();
            let b = random_density_dims(vec![2, 2], 4, sd.derive(1))?.into_op().scaled(1.3);
            let reduced = nc_minimal_trace(&a.partial_trace(&[0])?, &b.partial_trace(&[0])?)?;
            Ok(le(nc_minimal_trace(&a, &b)?, reduced, 1e-9).with("a", &a).with("b", &b))
        }),
        property(s, "minimal: below Tr A^{1-s} B^s", cfg, n, |sd| {
            let a = random_psd(3, sd.derive(0))?;
            let b = random_psd(3, sd.derive(1))?;
            let mut worst = f64::NEG_INFINITY;
            for s_ in [0.1, 0.3, 0.5, 0.7, 0.9] {
                let rhs = a.psd_power(1.0 - s_)?.trace_with(&b.psd_power(s_)?);
                worst = worst.max(nc_minimal_trace(&a, &b)? - rhs);
            }
            Ok(Trial::new(worst, 1e-9).with("a", &a).with("b", &b))
        }),
        property(s, "minimal: above Tr[A B/(A+B)]", cfg, n, |sd| {
            let a = random_psd(3, sd.derive(0))?;
            let b = random_psd(3, sd.derive(1))?;
            let q = nc_quotient(&b, &(&a + &b), 0.5)?;
            let lower = trace_against(&a, &q.op);
            Ok(le(lower, nc_minimal_trace(&a, &b)?, 1e-9).with("a", &a).with("b", &b))
        }),
        property(s, "pinching inequality", cfg, n, |sd| {
            let h = HermitianOperator::from_real_diagonal(vec![4], &[0.1, 0.1, 0.5, 0.9])?;
            let u = random_unitary(4, sd.derive(0))?;
            let h = h.conjugate(u.as_ref());
            let l = random_psd(4, sd.derive(1))?;
            let k = spec_count(&h)? as f64;
            let gap = pinching(&h, &l)?.add_scaled(&l, -1.0 / k).min_eigenvalue()?;
            Ok(Trial::new(-gap, 1e-10).with("h", &h).with("l", &l))
        }),
        property(s, "weighted norm nondecreasing in p", cfg, n, |sd| {
            let x = random_hermitian(vec![3], sd.derive(0)).to_raw();
            let w = random_density(3, 3, sd.derive(1))?;
            let mut worst = f64::NEG_INFINITY;
            let mut prev = weighted_lp_norm(&x, 1.0, 0.5, &w)?;
            for p in [1.5, 2.0, 3.0, 8.0] {
                let cur = weighted_lp_norm(&x, p, 0.5, &w)?;
                worst = worst.max(prev - cur);
                prev = cur;
            }
            Ok(Trial::new(worst, 1e-10))
        }),
    ]
}

fn divergence_suite(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let s = Suite::Divergences;
    let n = cfg.trials;
    vec![
        property(s, "relative entropy nonnegative", cfg, n, |sd| {
            let a = random_density(3, 3, sd.derive(0))?;
            let b = random_density(3, 3, sd.derive(1))?;
            Ok(Trial::new(-relative_entropy(&a, &b)?.nats, 1e-12).with("rho", &a).with("sigma", &b))
        }),
        property(s, "sandwiched below Petz", cfg, n, |sd| {
            let a = random_density(3, 3, sd.derive(0))?;
            let b = random_density(3, 3, sd.derive(1))?;
            let mut worst = f64::NEG_INFINITY;
            for alpha in [0.6, 1.5, 2.0] {
                worst = worst.max(sandwiched_renyi(&a, &b, alpha)?.nats - petz_renyi(&a, &b, alpha)?.nats);
            }
            Ok(Trial::new(worst, 1e-9).with("rho", &a).with("sigma", &b))
        }),
        property(s, "D_h matches exhaustive commuting search", cfg, n, |sd| {
            let d = 2 + (sd.0 % 3) as usize;
            let p = random_probs(d, sd.derive(0));
            let q = random_probs(d, sd.derive(1));
            let eps = 0.05 + 0.9 * (sd.derive(2).0 % 1000) as f64 / 1000.0;
            let rho = DensityOperator::from_probabilities(vec![d], &p)?;
            let sigma = DensityOperator::from_probabilities(vec![d], &q)?;
            let got = hypothesis_testing_divergence(&rho, &sigma, eps)?.0.nats;
            Ok(eq(got, classical_hypothesis_oracle(&p, &q, eps)?, 1e-8))
        }),
        property(s, "D_h certificate reproduces value", cfg, n, |sd| {
            let a = random_density(3, 3, sd.derive(0))?;
            let b = random_density(3, 3, sd.derive(1))?;
            let (v, t) = hypothesis_testing_divergence(&a, &b, 0.2)?;
            let by_test = -b.trace_with(t.test.op()).ln();
            let mass = (a.trace_with(t.test.op()) - 0.8).abs();
            Ok(Trial::new((by_test - v.nats).abs().max(mass), 1e-10).with("rho", &a).with("sigma", &b))
        }),
        property(s, "D_h(rho||rho) = -log(1-eps)", cfg, n.min(20), |sd| {
            let a = random_density(3, 3, sd)?;
            let mut worst = 0.0f64;
            for k in 1..=9 {
                let eps = k as f64 / 10.0;
                let v = hypothesis_testing_divergence(&a, &a, eps)?.0.nats;
                worst = worst.max((v + (1.0 - eps).ln()).abs());
            }
            Ok(Trial::new(worst, 1e-10).with("rho", &a))
        }),
        property(s, "D_h data processing under pinching", cfg, n, |sd| {
            let a = random_density(3, 3, sd.derive(0))?;
            let b = random_density(3, 3, sd.derive(1))?;
            let pa = DensityOperator::new(pinching(&b, &a)?)?;
            let before = hypothesis_testing_divergence(&a, &b, 0.3)?.0.nats;
            let after = hypothesis_testing_divergence(&pa, &b, 0.3)?.0.nats;
            Ok(le(after, before, 1e-8).with("rho", &a).with("sigma", &b))
        }),
    ]
}

/// ρ ⊗ ω on [A1 B1 A2 B2] regrouped as [A1A2, B1B2].
fn joint_pair(rho: &DensityOperator, omega: &DensityOperator) -> Result<DensityOperator> {
    let (a1, b1) = (rho.dims()[0], rho.dims()[1]);
    let (a2, b2) = (omega.dims()[0], omega.dims()[1]);
    let j = rho.tensor(omega).permute(&[0, 2, 1, 3])?;
    DensityOperator::new(j.with_dims(vec![a1 * a2, b1 * b2])?)
}

fn info_suite(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let s = Suite::Info;
    let n = cfg.trials;
    vec![
        property(s, "doubly minimized fixed point converges", cfg, n.div_ceil(2), |sd| {
            let rho = random_bipartite(2, 2, sd)?;
            let mut worst = 0.0f64;
            for alpha in [1.25, 1.5, 2.0] {
                let r = doubly_minimized_info(&rho, alpha)?;
                worst = worst.max(if r.converged { r.residual } else { f64::INFINITY });
            }
            Ok(Trial::new(worst, 1e-9).with("rho", &rho))
        }),
        property(s, "doubly minimized additivity", cfg, n.div_ceil(4), |sd| {
            let rho = random_bipartite(2, 2, sd.derive(0))?;
            let omega = random_bipartite(2, 2, sd.derive(1))?;
            let joint = doubly_minimized_info(&joint_pair(&rho, &omega)?, 1.5)?.value;
            let parts = doubly_minimized_info(&rho, 1.5)?.value + doubly_minimized_info(&omega, 1.5)?.value;
            Ok(eq(joint, parts, 1e-6).with("rho", &rho).with("omega", &omega))
        }),
        property(s, "log-convexity of (tau, sigma) -> log f((tau x sigma)^s)", cfg, n, |sd| {
            let t0 = random_density(2, 2, sd.derive(0))?;
            let t1 = random_density(2, 2, sd.derive(1))?;
            let s0 = random_density(2, 2, sd.derive(2))?;
            let s1 = random_density(2, 2, sd.derive(3))?;
            let k = random_density(4, 4, sd.derive(4))?;
            let tm = t0.mix(&t1, 0.5)?;
            let sm = s0.mix(&s1, 0.5)?;
            let lf = |t: &DensityOperator, s_: &DensityOperator, p: f64| -> Result<f64> {
                Ok(k.trace_with(&t.tensor(s_).psd_power(p)?).ln())
            };
            let mut worst = f64::NEG_INFINITY;
            for p in [-1.0, -0.5, -0.1] {
                let lhs = lf(&tm, &sm, p)?;
                let rhs = 0.5 * lf(&t0, &s0, p)? + 0.5 * lf(&t1, &s1, p)?;
                worst = worst.max(lhs - rhs);
            }
            Ok(Trial::new(worst, 1e-9))
        }),
        property(s, "I_alpha* at least I", cfg, n.div_ceil(4), |sd| {
            let rho = random_bipartite(2, 2, sd.derive(0))?;
            let tau = random_density(2, 2, sd.derive(1))?;
            let i = generalized_mutual_information(&rho, &tau)?.nats;
            let curve = sandwiched_info_curve(&rho, &tau, &[1.1, 1.5, 2.0], Execution::Sequential)?;
            let worst = curve.values.iter().map(|v| i - v).fold(f64::NEG_INFINITY, f64::max);
            Ok(Trial::new(worst, 1e-9).with("rho", &rho).with("tau", &tau))
        }),
        property(s, "I_h modes ordered", cfg, n.div_ceil(10), |sd| {
            let rho = random_bipartite(2, 2, sd.derive(0))?;
            let tau = random_density(2, 2, sd.derive(1))?;
            let c = hypothesis_testing_information(&rho, &tau, 0.2, IhMode::Certified)?.value.nats;
            let l = hypothesis_testing_information(&rho, &tau, 0.2, IhMode::Local)?.value.nats;
            let u = hypothesis_testing_information(&rho, &tau, 0.2, IhMode::UpperBound)?.value.nats;
            Ok(Trial::new((c - l).max(l - u), 1e-9).with("rho", &rho).with("tau", &tau))
        }),
    ]
}

fn random_instance(seed: Seed, m: usize) -> Result<ConvexSplitInstance> {
    let rank = 1 + (seed.0 % 4) as usize;
    let rho = random_density_dims(vec![2, 2], rank, seed.derive(0))?;
    let tau = random_density(2, 2, seed.derive(1))?;
    ConvexSplitInstance::new(rho, tau, m)
}

fn convex_split_suite(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let s = Suite::ConvexSplit;
    let n = cfg.trials;
    vec![
        property(s, "commuting reduction to classical oracle", cfg, n.div_ceil(2), |sd| {
            let m = 1 + (sd.0 % 6) as usize;
            let table = ProbTable::new(vec![2, 2], random_probs(4, sd.derive(0)))?;
            let q = random_probs(2, sd.derive(1));
            let inst = ConvexSplitInstance::new(
                classical_embed(&table)?,
                DensityOperator::from_probabilities(vec![2], &q)?,
                m,
            )?;
            Ok(eq(covering_error_exact(&inst)?, classical_covering_oracle(&table, &q, m)?, 1e-10))
        }),
        property(s, "formulation identity", cfg, n.div_ceil(2), |sd| {
            let inst = random_instance(sd, 1 + (sd.0 % 3) as usize)?;
            let lhs = 2.0 * covering_error_exact(&inst)?;
            let sigma = random_density(2, 2, sd.derive(2))?;
            let mut worst = 0.0f64;
            for g in [0.0, 0.5, 1.0] {
                for sg in [&sigma, &inst.rho_b()?] {
                    worst = worst.max((formulation_rhs(&inst, sg, g)? - lhs).abs());
                }
            }
            Ok(Trial::new(worst, 1e-8).with("rho", inst.rho()).with("tau", inst.tau()))
        }),
        property(s, "map norm bound", cfg, 9, |sd| {
            let k = (sd.0 % 9) as usize;
            let (m, p) = ([2, 4, 8][k % 3], [1.0, 1.5, 2.0][k / 3]);
            let tau = random_density(2, 2, sd.derive(0))?;
            let sigma = random_density(2, 2, sd.derive(1))?;
            let mut worst = f64::NEG_INFINITY;
            for g in [0.0, 0.5, 1.0] {
                let r = map_norm_check_with(&tau, &sigma, m, p, g, (n / 5).max(4), sd.derive(2), Execution::Sequential)?;
                worst = worst.max(r.value - r.param("bound").unwrap_or(f64::NAN));
            }
            Ok(Trial::new(worst, 1e-9).detail(format!("M={m} p={p}")))
        }),
        property(s, "sandwich of lower and upper bounds", cfg, n.div_ceil(4), |sd| {
            let inst = random_instance(sd, [1, 2, 4][(sd.0 % 3) as usize])?;
            let exact = covering_error_exact(&inst)?;
            let log_m = (inst.m() as f64).ln();
            let up = exponent_upper_bound_from_curve(
                &sandwiched_info_curve(inst.rho(), inst.tau(), &exponent_alphas(), Execution::Sequential)?,
                log_m,
            );
            let sc = strong_converse_from_curve(
                &converse_curve(inst.rho(), inst.tau(), &converse_alphas(), Execution::Sequential)?,
                log_m,
            );
            let os = oneshot_converse_lower_bound(&inst, &c_grid())?;
            let defect = (exact - up.value).max(sc.value - exact).max(os.value - exact);
            Ok(Trial::new(defect, 1e-9).with("rho", inst.rho()).with("tau", inst.tau()))
        }),
        property(s, "direct bound dominates", cfg, n.div_ceil(4), |sd| {
            let inst = random_instance(sd, [1, 2, 4][(sd.0 % 3) as usize])?;
            let mut worst = f64::NEG_INFINITY;
            for c in [0.5, 2.0, 8.0] {
                let r = direct_bound_components(&inst, c, &inst.rho_b()?)?;
                worst = worst.max(r.param("delta_exact").unwrap_or(f64::NAN) - r.value);
            }
            Ok(Trial::new(worst, 1e-9).with("rho", inst.rho()).with("tau", inst.tau()))
        }),
        property(s, "exponent sign flips at log M = I", cfg, n.div_ceil(4), |sd| {
            let inst = random_instance(sd, 1)?;
            let i = generalized_mutual_information(inst.rho(), inst.tau())?.nats;
            let up = sandwiched_info_curve(inst.rho(), inst.tau(), &exponent_alphas(), Execution::Sequential)?;
            let sc = converse_curve(inst.rho(), inst.tau(), &converse_alphas(), Execution::Sequential)?;
            let above = i + 0.05;
            let mut bad = covering_exponent(&up, above).0 <= 0.0 || converse_exponent(&sc, above).0 > 0.0;
            if i >= 0.05 {
                let below = i - 0.05;
                bad |= covering_exponent(&up, below).0 > 0.0 || converse_exponent(&sc, below).0 <= 0.0;
            }
            Ok(Trial::new(if bad { 1.0 } else { 0.0 }, 0.0).with("rho", inst.rho()).with("tau", inst.tau()))
        }),
    ]
}

/// Pure state on [2, 2] from a random unit vector.
fn random_pure(seed: Seed) -> Result<(DensityOperator, Mat<C64>)> {
    let u = random_unitary(4, seed)?;
    let psi: Vec<C64> = (0..4).map(|i| u[(i, 0)]).collect();
    let mat = Mat::from_fn(2, 2, |a, b| psi[2 * a + b]);
    Ok((DensityOperator::pure(vec![2, 2], &psi)?, mat))
}

fn applications_suite(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let s = Suite::Applications;
    let n = cfg.trials;
    vec![
        property(s, "wiretap components sum to epsilon bound", cfg, n.div_ceil(10), |sd| {
            let state = random_cq(2, vec![2, 2], sd)?;
            let rates = RateTriple {
                log_m: Some(0.05),
                log_k: Some(0.3),
                log_l: None,
            };
            let b = wiretap_bound(&state, rates, &AlphaGrids::default())?;
            let sum: f64 = b.components.values().sum();
            let neg = b.components.values().fold(0.0f64, |m, v| m.max(-v));
            Ok(Trial::new((b.epsilon_bound - sum).abs().max(neg), 1e-12))
        }),
        property(s, "wiretap positivity region", cfg, n.div_ceil(10), |sd| {
            let state = random_cq(2, vec![2, 2], sd)?;
            let (xb, xe) = cq_marginals(&state)?;
            let curves = PackingCoveringCurves::new(&xb, &xe, &AlphaGrids::default(), Execution::Sequential)?;
            let gap = curves.packing_info - curves.covering_info;
            let mut ok = positivity_scan(&curves, gap.max(0.0) + 0.05).consistent();
            if gap > 0.05 {
                ok &= positivity_scan(&curves, gap - 0.05).consistent();
            }
            Ok(Trial::new(if ok { 0.0 } else { 1.0 }, 0.0).detail(format!("gap {gap}")))
        }),
        property(s, "Uhlmann conversion f(u)", cfg, n, |sd| {
            let (psi, pm) = random_pure(sd.derive(0))?;
            let (phi, fm) = random_pure(sd.derive(1))?;
            let (pa, fa) = (psi.partial_trace(&[0])?, phi.partial_trace(&[0])?);
            let u = trace_distance(&pa, &fa)?;
            // max over unitaries V on B of |<phi|(1 x V)|psi>| is ||Phi^dagger Psi||_1.
            let overlap = RawOperator::new(vec![2], crate::linalg::adjoint(fm.as_ref()) * &pm)?.schatten_norm(1.0)?;
            let after = (1.0 - overlap.min(1.0).powi(2)).max(0.0).sqrt();
            let reduced = purified_distance(&pa, &fa)?;
            Ok(Trial::new((after - uhlmann_f(u)).max((after - reduced).abs()), 1e-8))
        }),
    ]
}
