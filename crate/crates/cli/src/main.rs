//! `convexsplit`: sweeps, single evaluations and verification suites.
//!
//! Exit codes: 0 success, 1 property failure (or non-convergence under
//! `--strict`), 2 input or parse error, 3 dimension budget exceeded.

mod io;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use convexsplit::applications::{
    cq_marginals, packing_capacity_bound, packing_exponent_bound, positivity_scan, secret_key_bound,
    wiretap_bound, AlphaGrids, PackingCoveringCurves, RateTriple,
};
use convexsplit::convex_split::{
    check_budget, converse_curve, covering_error_exact, exponent_upper_bound_from_curve,
    map_norm_check_with, oneshot_converse_lower_bound, sample_complexity_bounds,
    sample_complexity_exact, sandwiched_info_curve, strong_converse_from_curve,
    ConvexSplitInstance, SampleComplexityOptions, DEFAULT_MAX_TOTAL_DIM,
};
use convexsplit::divergences::{
    hypothesis_testing_divergence, petz_renyi, relative_entropy, relative_entropy_variance,
    sandwiched_renyi,
};
use convexsplit::grid::{c_grid, converse_alphas, exponent_alphas};
use convexsplit::info::{
    doubly_minimized_info, generalized_mutual_information, hypothesis_testing_information,
    petz_up_information, sandwiched_renyi_information, IhMode,
};
use convexsplit::testkit::Seed;
use convexsplit::verify::{run_suite, CheckResult, Suite, VerifyConfig};
use convexsplit::{BoundReport, Error, Execution};

use io::{emit, flatten_csv, parse_grid, parse_m_grid, Run, Units};

#[derive(Debug)]
pub enum Failure {
    Input(String),
    Budget(String),
    Io(String),
    /// Reported in-band already; only the exit code is left.
    Check,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } | Error::EnumerationBudget { .. } => Failure::Budget(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "convexsplit", version, about = "Convex-splitting errors, bounds and checks")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Global {
    /// Seed for every randomized step.
    #[arg(long, global = true, env = "CONVEXSPLIT_SEED", default_value_t = 0)]
    seed: u64,
    /// Orders for covering exponents: a,b,c or lo:hi:n[:lin|:log].
    #[arg(long, global = true, env = "CONVEXSPLIT_ALPHA_GRID", value_parser = grid_arg)]
    alpha_grid: Option<Grid>,
    /// Orders in (1/2, 1) for converse and packing exponents.
    #[arg(long, global = true, env = "CONVEXSPLIT_CONVERSE_ALPHA_GRID", value_parser = grid_arg)]
    converse_alpha_grid: Option<Grid>,
    /// Free parameter c of the one-shot bounds.
    #[arg(long, global = true, env = "CONVEXSPLIT_C_GRID", value_parser = grid_arg)]
    c_grid: Option<Grid>,
    /// Smoothing parameters δ for the sample-complexity bounds.
    #[arg(long, global = true, env = "CONVEXSPLIT_DELTA_GRID", value_parser = grid_arg)]
    delta_grid: Option<Grid>,
    /// Weight γ of the noncommutative quotient.
    #[arg(long, global = true, env = "CONVEXSPLIT_GAMMA", default_value_t = 0.5)]
    gamma: f64,
    /// Largest total Hilbert-space dimension of A^M B.
    #[arg(long, global = true, env = "CONVEXSPLIT_MAX_DIM", default_value_t = DEFAULT_MAX_TOTAL_DIM)]
    max_dim: usize,
    /// Exit nonzero when a solver does not converge.
    #[arg(long, global = true, env = "CONVEXSPLIT_STRICT")]
    strict: bool,
    #[arg(long, global = true, env = "CONVEXSPLIT_FORMAT", value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Report logarithmic quantities in bits instead of nats.
    #[arg(long, global = true, env = "CONVEXSPLIT_BITS")]
    bits: bool,
    /// Output file (stdout if absent); a manifest is written next to it.
    #[arg(long, short, global = true, env = "CONVEXSPLIT_OUTPUT")]
    output: Option<PathBuf>,
    /// Explicit manifest path.
    #[arg(long, global = true, env = "CONVEXSPLIT_MANIFEST")]
    manifest: Option<PathBuf>,
    /// Run grid points one at a time.
    #[arg(long, global = true, env = "CONVEXSPLIT_SEQUENTIAL")]
    sequential: bool,
}

impl Global {
    fn units(&self) -> Units {
        Units { bits: self.bits }
    }

    fn exec(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        }
    }

    fn alphas(&self) -> Vec<f64> {
        self.alpha_grid.clone().map_or_else(exponent_alphas, |g| g.0)
    }

    fn converse_alphas(&self) -> Vec<f64> {
        self.converse_alpha_grid.clone().map_or_else(converse_alphas, |g| g.0)
    }

    fn c_grid(&self) -> Vec<f64> {
        self.c_grid.clone().map_or_else(c_grid, |g| g.0)
    }
}

/// A parsed real grid (a newtype so clap treats it as one value).
#[derive(Clone, Debug)]
struct Grid(Vec<f64>);

#[derive(Clone, Debug)]
struct MGrid(Vec<usize>);

fn grid_arg(s: &str) -> Result<Grid, String> {
    parse_grid(s).map(Grid)
}

fn m_grid_arg(s: &str) -> Result<MGrid, String> {
    parse_m_grid(s).map(MGrid)
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Exact covering error and its bounds over a grid of M.
    Delta {
        /// Instance file with `rho` on [A, B] and `tau` on [A].
        #[arg(long)]
        instance: PathBuf,
        /// M values: 1..8 or 1,2,4.
        #[arg(long, default_value = "1..8", value_parser = m_grid_arg)]
        m: MGrid,
    },
    /// Run property suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Directory for counterexample dumps.
        #[arg(long, default_value = ".")]
        dump_dir: PathBuf,
        /// Added to every tolerance (negative values break checks on purpose).
        #[arg(long, hide = true, env = "CONVEXSPLIT_TOLERANCE_SHIFT", default_value_t = 0.0, allow_negative_numbers = true)]
        tolerance_shift: f64,
    },
    /// A divergence between two states.
    Renyi {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long, value_enum, default_value_t = DivergenceKind::Sandwiched)]
        kind: DivergenceKind,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
    },
    /// An information measure of a bipartite state.
    Info {
        /// State on [A, B], or an instance file (then `tau` is used).
        #[arg(long)]
        state: PathBuf,
        /// Reference state on A (defaults to the instance `tau` or ρ_A).
        #[arg(long)]
        tau: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = InfoKind::Mutual)]
        measure: InfoKind,
        /// Shorthand for `--measure doubly-minimized`.
        #[arg(long)]
        doubly_minimized: bool,
        #[arg(long, default_value_t = 1.5)]
        alpha: f64,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = ModeArg::Certified)]
        mode: ModeArg,
    },
    /// Bounds on the sample complexity log M_ε.
    Sample {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        eps: f64,
        /// Largest M scanned for the exact value.
        #[arg(long, default_value_t = 11)]
        m_max: usize,
    },
    /// Empirical norm of the covering map against its bound.
    MapNorm {
        /// Instance file; `tau` and the B marginal of `rho` are used.
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Protocol bounds built on packing and covering.
    Apps {
        #[command(subcommand)]
        protocol: AppCommand,
    },
}

#[derive(Subcommand)]
enum AppCommand {
    /// Wiretap error bound for a cq bundle with quantum factors [B, E].
    Wiretap(RatesArgs),
    /// Secret-key error bound for a cq bundle with quantum factors [B, E].
    SecretKey(RatesArgs),
    /// Packing error exponent or one-shot capacity for a state on [X, B].
    Packing {
        #[arg(long)]
        state: PathBuf,
        /// Rate for the exponent bound.
        #[arg(long)]
        log_m: Option<f64>,
        /// Error for the capacity bound.
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
    },
}

#[derive(Args)]
struct RatesArgs {
    #[arg(long)]
    bundle: PathBuf,
    /// Message rate log M in nats.
    #[arg(long)]
    log_m: f64,
    /// Covering rate log K in nats.
    #[arg(long)]
    log_k: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum DivergenceKind {
    Sandwiched,
    Petz,
    Umegaki,
    Variance,
    Hypothesis,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InfoKind {
    Mutual,
    Sandwiched,
    PetzUp,
    DoublyMinimized,
    Hypothesis,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Certified,
    Local,
    UpperBound,
}

impl From<ModeArg> for IhMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Certified => IhMode::Certified,
            ModeArg::Local => IhMode::Local,
            ModeArg::UpperBound => IhMode::UpperBound,
        }
    }
}

fn mode_name(m: IhMode) -> &'static str {
    match m {
        IhMode::Certified => "certified",
        IhMode::Local => "local",
        IhMode::UpperBound => "upper-bound",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let code = match &f {
                Failure::Check => 1,
                Failure::Input(msg) | Failure::Io(msg) => {
                    eprintln!("error: {msg}");
                    2
                }
                Failure::Budget(msg) => {
                    eprintln!("error: {msg}");
                    3
                }
            };
            ExitCode::from(code)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    let g = cli.global;
    match cli.command {
        Command::Delta { instance, m } => cmd_delta(&g, &instance, &m.0),
        Command::Verify {
            suite,
            trials,
            dump_dir,
            tolerance_shift,
        } => cmd_verify(&g, &suite, trials, &dump_dir, tolerance_shift),
        Command::Renyi {
            rho,
            sigma,
            kind,
            alpha,
            eps,
        } => cmd_renyi(&g, &rho, &sigma, kind, alpha, eps),
        Command::Info {
            state,
            tau,
            measure,
            doubly_minimized,
            alpha,
            eps,
            mode,
        } => {
            let measure = if doubly_minimized { InfoKind::DoublyMinimized } else { measure };
            cmd_info(&g, &state, tau.as_deref(), measure, alpha, eps, mode.into())
        }
        Command::Sample { instance, eps, m_max } => cmd_sample(&g, &instance, eps, m_max),
        Command::MapNorm {
            instance,
            m,
            p,
            trials,
        } => cmd_map_norm(&g, &instance, m, p, trials),
        Command::Apps { protocol } => cmd_apps(&g, protocol),
    }
}

/// Writes a single JSON record (or its flattened CSV) with the manifest.
fn emit_record(g: &Global, run: &Run, record: Value) -> Result<(), Failure> {
    let manifest = run.manifest(vec![record.clone()]);
    let body = match g.format {
        Format::Json => {
            let mut out = record;
            let embedded = run.manifest(vec![]);
            out["manifest"] = serde_json::to_value(&embedded).expect("manifest serializes");
            format!("{}\n", serde_json::to_string_pretty(&out).expect("record serializes"))
        }
        Format::Csv => flatten_csv(&record),
    };
    emit(&body, g.output.as_deref(), &manifest, g.manifest.as_deref())
}

fn strict_check(g: &Global, converged: bool, what: &str) -> Result<(), Failure> {
    if g.strict && !converged {
        eprintln!("error: {what} did not converge (--strict)");
        return Err(Failure::Check);
    }
    Ok(())
}

fn report_json(r: &BoundReport, units: Units, is_log: bool) -> Value {
    let conv = |v: f64| if is_log { units.log(v) } else { v };
    json!({
        "name": r.name,
        "value": conv(r.value),
        "raw_value": r.raw_value.map(conv),
        "params_at_opt": r.params_at_opt,
        "valid": r.valid,
        "notes": r.notes,
    })
}

const DELTA_COLUMNS: [&str; 5] = ["M", "delta_exact", "exponent_bound", "sc_bound", "converse_bound"];

fn cmd_delta(g: &Global, path: &Path, ms: &[usize]) -> Result<(), Failure> {
    let mut run = Run::new("delta", g.seed, g.units());
    let (rho, tau) = run.inputs.instance(path)?;
    let d_a = tau.dim();
    let d_b = rho.dim() / d_a.max(1);
    for &m in ms {
        check_budget(d_a, d_b, m, g.max_dim)?;
    }
    let exec = g.exec();
    let up = sandwiched_info_curve(&rho, &tau, &g.alphas(), exec)?;
    let sc = converse_curve(&rho, &tau, &g.converse_alphas(), exec)?;
    let cs = g.c_grid();
    let rows = exec.map(ms, |&m| -> convexsplit::Result<_> {
        let inst = ConvexSplitInstance::with_budget(rho.clone(), tau.clone(), m, g.max_dim)?;
        let log_m = (m as f64).ln();
        Ok((
            m,
            covering_error_exact(&inst)?,
            exponent_upper_bound_from_curve(&up, log_m),
            strong_converse_from_curve(&sc, log_m),
            oneshot_converse_lower_bound(&inst, &cs)?,
        ))
    });
    let rows = rows.into_iter().collect::<convexsplit::Result<Vec<_>>>()?;
    let converged = rows.iter().all(|r| r.2.valid);
    let provenance: Vec<Value> = rows
        .iter()
        .enumerate()
        .map(|(i, (m, _, up, sc, os))| {
            json!({
                "index": i,
                "M": m,
                "exponent_bound": up.params_at_opt,
                "exponent_bound_valid": up.valid,
                "sc_bound": sc.params_at_opt,
                "sc_bound_raw": sc.raw_value,
                "converse_bound": os.params_at_opt,
            })
        })
        .collect();
    let body = match g.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(DELTA_COLUMNS).expect("in-memory write");
            for (m, exact, up, sc, os) in &rows {
                w.write_record([
                    m.to_string(),
                    exact.to_string(),
                    up.value.to_string(),
                    sc.value.to_string(),
                    os.value.to_string(),
                ])
                .expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8 csv")
        }
        Format::Json => {
            let records: Vec<Value> = rows
                .iter()
                .map(|(m, exact, up, sc, os)| {
                    json!({
                        "M": m,
                        "delta_exact": exact,
                        "exponent_bound": report_json(up, g.units(), false),
                        "sc_bound": report_json(sc, g.units(), false),
                        "converse_bound": report_json(os, g.units(), false),
                    })
                })
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&json!({ "rows": records })).expect("rows serialize"))
        }
    };
    let manifest = run.manifest(provenance);
    emit(&body, g.output.as_deref(), &manifest, g.manifest.as_deref())?;
    strict_check(g, converged, "the sandwiched information curve")
}

fn slug(s: &str) -> String {
    let raw: String = s
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '-' })
        .collect();
    raw.split('-').filter(|p| !p.is_empty()).collect::<Vec<_>>().join("-")
}

fn print_table(results: &[CheckResult]) {
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
    println!("{:<6} {:<13} {:<width$} {:>7} {:>9} {:>8}", "status", "suite", "check", "trials", "max dev", "seconds");
    for r in results {
        println!(
            "{:<6} {:<13} {:<width$} {:>7} {:>9.2e} {:>8.2}",
            if r.passed { "pass" } else { "FAIL" },
            r.suite,
            r.name,
            r.trials,
            r.max_defect,
            r.seconds
        );
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} checks, {} failed", results.len(), failed);
}

fn cmd_verify(g: &Global, suite: &str, trials: usize, dump_dir: &Path, shift: f64) -> Result<(), Failure> {
    let suite: Suite = suite.parse().map_err(|e: Error| Failure::Input(e.to_string()))?;
    let run = Run::new("verify", g.seed, g.units());
    let cfg = VerifyConfig {
        seed: Seed(g.seed),
        trials,
        exec: g.exec(),
        tolerance_shift: shift,
    };
    let results = run_suite(suite, &cfg);
    print_table(&results);
    let mut dumps = Vec::new();
    for r in results.iter().filter(|r| !r.passed) {
        if let Some(cx) = &r.counterexample {
            fs::create_dir_all(dump_dir).map_err(|e| Failure::Io(format!("{}: {e}", dump_dir.display())))?;
            let path = dump_dir.join(format!("counterexample-{}-{}.json", r.suite, slug(&r.name)));
            let text = serde_json::to_string_pretty(cx).expect("counterexample serializes");
            fs::write(&path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            eprintln!("counterexample for {:?} written to {}", r.name, path.display());
            dumps.push(path.display().to_string());
        }
    }
    let report = json!({ "suite": suite.name(), "seed": g.seed, "trials": trials, "results": results, "counterexamples": dumps });
    let manifest = run.manifest(vec![]);
    let json_path = g.output.clone().unwrap_or_else(|| dump_dir.join("verify-report.json"));
    let body = format!("{}\n", serde_json::to_string_pretty(&report).expect("report serializes"));
    emit(&body, Some(&json_path), &manifest, g.manifest.as_deref())?;
    if results.iter().all(|r| r.passed) {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn cmd_renyi(g: &Global, rho: &Path, sigma: &Path, kind: DivergenceKind, alpha: f64, eps: f64) -> Result<(), Failure> {
    let mut run = Run::new("renyi", g.seed, g.units());
    let (rho, sigma) = (run.inputs.density(rho)?, run.inputs.density(sigma)?);
    let u = g.units();
    let (name, value, finite, extra) = match kind {
        DivergenceKind::Sandwiched => {
            let v = sandwiched_renyi(&rho, &sigma, alpha)?;
            ("sandwiched", v.nats, v.finite, json!({ "alpha": alpha }))
        }
        DivergenceKind::Petz => {
            let v = petz_renyi(&rho, &sigma, alpha)?;
            ("petz", v.nats, v.finite, json!({ "alpha": alpha }))
        }
        DivergenceKind::Umegaki => {
            let v = relative_entropy(&rho, &sigma)?;
            ("umegaki", v.nats, v.finite, json!({}))
        }
        DivergenceKind::Variance => {
            let v = relative_entropy_variance(&rho, &sigma)?.nats;
            // A variance scales with the square of the log base.
            let v = if g.bits { v / std::f64::consts::LN_2.powi(2) } else { v };
            return emit_record(g, &run, json!({ "kind": "variance", "value": v, "finite": v.is_finite(), "units": format!("{}^2", u.name()) }));
        }
        DivergenceKind::Hypothesis => {
            let (v, t) = hypothesis_testing_divergence(&rho, &sigma, eps)?;
            (
                "hypothesis",
                v.nats,
                v.finite,
                json!({ "eps": eps, "threshold": t.threshold, "rho_mass": t.rho_mass, "sigma_mass": t.sigma_mass }),
            )
        }
    };
    let mut record = json!({ "kind": name, "value": u.log(value), "finite": finite, "units": u.name() });
    merge(&mut record, extra);
    emit_record(g, &run, record)
}

fn merge(into: &mut Value, extra: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, extra) {
        a.extend(b);
    }
}

fn cmd_info(
    g: &Global,
    state: &Path,
    tau: Option<&Path>,
    measure: InfoKind,
    alpha: f64,
    eps: f64,
    mode: IhMode,
) -> Result<(), Failure> {
    let mut run = Run::new("info", g.seed, g.units());
    let (rho, inst_tau) = run.inputs.instance(state)?;
    let tau = match tau {
        Some(p) => run.inputs.density(p)?,
        None => inst_tau,
    };
    let u = g.units();
    let record = match measure {
        InfoKind::Mutual => {
            json!({ "measure": "mutual", "value": u.log(generalized_mutual_information(&rho, &tau)?.nats) })
        }
        InfoKind::PetzUp => {
            json!({ "measure": "petz-up", "alpha": alpha, "value": u.log(petz_up_information(&rho, alpha)?.nats) })
        }
        InfoKind::Sandwiched | InfoKind::DoublyMinimized => {
            let r = if measure == InfoKind::Sandwiched {
                sandwiched_renyi_information(&rho, &tau, alpha)?
            } else {
                doubly_minimized_info(&rho, alpha)?
            };
            strict_check(g, r.converged, "the fixed-point iteration").or_else(|e| {
                emit_fixed_point(g, &run, measure, alpha, &r)?;
                Err(e)
            })?;
            return emit_fixed_point(g, &run, measure, alpha, &r);
        }
        InfoKind::Hypothesis => {
            let r = hypothesis_testing_information(&rho, &tau, eps, mode)?;
            json!({
                "measure": "hypothesis",
                "eps": eps,
                "value": u.log(r.value.nats),
                "mode": mode_name(r.mode),
                "certified": r.mode == IhMode::Certified,
                "grid_value": r.grid_value.map(|v| u.log(v)),
                "at_marginal": u.log(r.at_marginal),
            })
        }
    };
    let mut record = record;
    merge(&mut record, json!({ "units": u.name() }));
    emit_record(g, &run, record)
}

fn emit_fixed_point(
    g: &Global,
    run: &Run,
    measure: InfoKind,
    alpha: f64,
    r: &convexsplit::info::FixedPointResult,
) -> Result<(), Failure> {
    let name = if measure == InfoKind::Sandwiched { "sandwiched" } else { "doubly-minimized" };
    emit_record(
        g,
        run,
        json!({
            "measure": name,
            "alpha": alpha,
            "value": g.units().log(r.value),
            "units": g.units().name(),
            "converged": r.converged,
            "residual": r.residual,
            "iterations": r.iterations,
            "perturbation": r.perturbation,
        }),
    )
}

fn cmd_sample(g: &Global, path: &Path, eps: f64, m_max: usize) -> Result<(), Failure> {
    let mut run = Run::new("sample", g.seed, g.units());
    let (rho, tau) = run.inputs.instance(path)?;
    check_budget(tau.dim(), rho.dim() / tau.dim().max(1), m_max, g.max_dim)?;
    let mut opts = SampleComplexityOptions::for_eps(eps);
    opts.exec = g.exec();
    opts.c_grid = g.c_grid();
    if let Some(d) = &g.delta_grid {
        opts.upper_deltas = d.0.clone();
        opts.lower_deltas = d.0.clone();
    }
    let exact = sample_complexity_exact(&rho, &tau, eps, m_max)?;
    let (up, lo) = sample_complexity_bounds(&rho, &tau, eps, &opts)?;
    let u = g.units();
    emit_record(
        g,
        &run,
        json!({
            "eps": eps,
            "m_exact": exact.m,
            "log_m_exact": exact.m.map(|m| u.log((m as f64).ln())),
            "errors": exact.errors,
            "upper": report_json(&up, u, true),
            "lower": report_json(&lo, u, true),
            "units": u.name(),
        }),
    )
}

fn cmd_map_norm(g: &Global, path: &Path, m: usize, p: f64, trials: usize) -> Result<(), Failure> {
    let mut run = Run::new("map-norm", g.seed, g.units());
    let (rho, tau) = run.inputs.instance(path)?;
    check_budget(tau.dim(), rho.dim() / tau.dim().max(1), m, g.max_dim)?;
    let sigma = convexsplit::info::marginal_b(&rho)?;
    let r = map_norm_check_with(&tau, &sigma, m, p, g.gamma, trials, Seed(g.seed), g.exec())?;
    let within = r.value <= r.param("bound").unwrap_or(f64::NAN) + 1e-9;
    emit_record(g, &run, json!({ "report": report_json(&r, g.units(), false), "within_bound": within }))?;
    if within {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn grids(g: &Global) -> AlphaGrids {
    AlphaGrids {
        packing: g.converse_alphas(),
        covering: g.alphas(),
    }
}

fn cmd_apps(g: &Global, protocol: AppCommand) -> Result<(), Failure> {
    let u = g.units();
    match protocol {
        AppCommand::Wiretap(a) => rates_app(g, "wiretap", &a),
        AppCommand::SecretKey(a) => rates_app(g, "secret-key", &a),
        AppCommand::Packing {
            state,
            log_m,
            eps,
            delta,
        } => {
            let mut run = Run::new("apps packing", g.seed, u);
            let rho = run.inputs.density(&state)?;
            let mut record = json!({ "protocol": "packing", "units": u.name() });
            if let Some(lm) = log_m {
                let r = packing_exponent_bound(&rho, lm, &g.converse_alphas())?;
                record["exponent_bound"] = report_json(&r, u, false);
                strict_check(g, r.valid, "the packing curve")?;
            }
            if let Some(e) = eps {
                record["capacity_bound"] = report_json(&packing_capacity_bound(&rho, e, delta)?, u, true);
            }
            if log_m.is_none() && eps.is_none() {
                return Err(Failure::Input("packing needs --log-m or --eps".into()));
            }
            emit_record(g, &run, record)
        }
    }
}

fn rates_app(g: &Global, name: &str, a: &RatesArgs) -> Result<(), Failure> {
    let mut run = Run::new(&format!("apps {name}"), g.seed, g.units());
    let state = run.inputs.cq(&a.bundle)?;
    let rates = RateTriple {
        log_m: Some(a.log_m),
        log_k: Some(a.log_k),
        log_l: None,
    };
    let grids = grids(g);
    let bound = if name == "wiretap" {
        wiretap_bound(&state, rates, &grids)?
    } else {
        secret_key_bound(&state, rates, &grids)?
    };
    let (xb, xe) = cq_marginals(&state)?;
    let curves = PackingCoveringCurves::new(&xb, &xe, &grids, g.exec())?;
    let scan = positivity_scan(&curves, a.log_m);
    let u = g.units();
    let record = json!({
        "bound": bound,
        "positivity_scan": scan,
        "info_xb": u.log(curves.packing_info),
        "info_xe": u.log(curves.covering_info),
        "units": u.name(),
    });
    let valid = bound.valid;
    emit_record(g, &run, record)?;
    strict_check(g, valid, "an exponent curve")
}
