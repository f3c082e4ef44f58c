//! Input loading, grids, unit conversion and run manifests.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use convexsplit::grid::{linspace, logspace};
use convexsplit::operator::OperatorFile;
use convexsplit::testkit::CqState;
use convexsplit::DensityOperator;

use crate::Failure;

/// Instance file: `{"rho": <operator>, "tau": <operator>}`, or a bare
/// operator file for ρ.
#[derive(Deserialize)]
struct InstanceFile {
    rho: OperatorFile,
    tau: Option<OperatorFile>,
}

/// cq bundle: `{"probs": [..], "conditionals": [<operator>, ..]}`.
#[derive(Deserialize)]
struct CqFile {
    probs: Vec<f64>,
    conditionals: Vec<OperatorFile>,
}

/// Files read during a run, with their digests.
#[derive(Default)]
pub struct Inputs {
    pub hashes: BTreeMap<String, String>,
}

impl Inputs {
    fn read(&mut self, path: &Path) -> Result<String, Failure> {
        let bytes = fs::read(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        self.hashes
            .insert(path.display().to_string(), hex::encode(Sha256::digest(&bytes)));
        String::from_utf8(bytes).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
    }

    /// (ρ_AB, τ_A); τ defaults to ρ_A when absent.
    pub fn instance(&mut self, path: &Path) -> Result<(DensityOperator, DensityOperator), Failure> {
        let text = self.read(path)?;
        let bad = |e: serde_json::Error| Failure::Input(format!("{}: {e}", path.display()));
        let value: Value = serde_json::from_str(&text).map_err(bad)?;
        let file: InstanceFile = if value.get("rho").is_some() {
            serde_json::from_value(value).map_err(bad)?
        } else {
            InstanceFile {
                rho: serde_json::from_value(value).map_err(bad)?,
                tau: None,
            }
        };
        let rho = file.rho.to_density()?;
        let tau = match file.tau {
            Some(t) => t.to_density()?,
            None => convexsplit::info::marginal_a(&rho)?,
        };
        Ok((rho, tau))
    }

    /// A single operator file, or the `rho` entry of an instance file.
    pub fn density(&mut self, path: &Path) -> Result<DensityOperator, Failure> {
        let text = self.read(path)?;
        let value: Value = serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        let op = value.get("rho").cloned().unwrap_or(value);
        let file: OperatorFile = serde_json::from_value(op).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        Ok(file.to_density()?)
    }

    pub fn cq(&mut self, path: &Path) -> Result<CqState, Failure> {
        let text = self.read(path)?;
        let file: CqFile = serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        let conds = file
            .conditionals
            .iter()
            .map(|c| c.to_density())
            .collect::<convexsplit::Result<Vec<_>>>()?;
        Ok(CqState::new(file.probs, conds)?)
    }
}

/// Parses `a,b,c`, `lo:hi:n` (linear) or `lo:hi:n:log`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let grid = match parts.as_slice() {
        [lo, hi, n] | [lo, hi, n, "lin"] => linspace(num(lo)?, num(hi)?, count(n)?),
        [lo, hi, n, "log"] => {
            let (lo, hi) = (num(lo)?, num(hi)?);
            if !(lo > 0.0 && hi > 0.0) {
                return Err(format!("log grid needs positive bounds: {text}"));
            }
            logspace(lo, hi, count(n)?)
        }
        [single] => single.split(',').map(num).collect::<Result<_, _>>()?,
        _ => return Err(format!("bad grid {text:?}; use a,b,c or lo:hi:n[:lin|:log]")),
    };
    if grid.is_empty() || grid.iter().any(|v| !v.is_finite()) {
        return Err(format!("grid {text:?} is empty or not finite"));
    }
    Ok(grid)
}

/// Parses `1..8` (inclusive) or `1,2,4`.
pub fn parse_m_grid(text: &str) -> Result<Vec<usize>, String> {
    let grid: Vec<usize> = match text.split_once("..") {
        Some((lo, hi)) => (count(lo)?..=count(hi)?).collect(),
        None => text.split(',').map(count).collect::<Result<_, _>>()?,
    };
    if grid.is_empty() || grid.contains(&0) {
        return Err(format!("M grid {text:?} must be nonempty and positive"));
    }
    Ok(grid)
}

fn num(s: &str) -> Result<f64, String> {
    s.trim().parse().map_err(|_| format!("not a number: {s:?}"))
}

fn count(s: &str) -> Result<usize, String> {
    s.trim().parse().map_err(|_| format!("not a count: {s:?}"))
}

/// Unit for logarithmic outputs.
#[derive(Clone, Copy)]
pub struct Units {
    pub bits: bool,
}

impl Units {
    pub fn log(self, nats: f64) -> f64 {
        if self.bits {
            nats / std::f64::consts::LN_2
        } else {
            nats
        }
    }

    pub fn name(self) -> &'static str {
        if self.bits {
            "bits"
        } else {
            "nats"
        }
    }
}

#[derive(Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub units: &'static str,
    pub inputs: BTreeMap<String, String>,
    pub wall_clock_seconds: f64,
    pub rows: Vec<Value>,
}

pub struct Run {
    start: Instant,
    pub command: String,
    pub seed: u64,
    pub units: Units,
    pub inputs: Inputs,
}

impl Run {
    pub fn new(command: &str, seed: u64, units: Units) -> Self {
        Run {
            start: Instant::now(),
            command: command.to_string(),
            seed,
            units,
            inputs: Inputs::default(),
        }
    }

    pub fn manifest(&self, rows: Vec<Value>) -> Manifest {
        Manifest {
            tool: "convexsplit",
            version: env!("CARGO_PKG_VERSION"),
            command: self.command.clone(),
            seed: self.seed,
            units: self.units.name(),
            inputs: self.inputs.hashes.clone(),
            wall_clock_seconds: self.start.elapsed().as_secs_f64(),
            rows,
        }
    }
}

pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Writes `body` to `output` (or stdout) and the manifest next to it.
pub fn emit(body: &str, output: Option<&Path>, manifest: &Manifest, manifest_path: Option<&Path>) -> Result<(), Failure> {
    let json = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    match output {
        Some(path) => {
            fs::write(path, body).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            let side = manifest_path.map(Path::to_path_buf).unwrap_or_else(|| sidecar_path(path));
            fs::write(&side, json).map_err(|e| Failure::Io(format!("{}: {e}", side.display())))?;
        }
        None => {
            print!("{body}");
            if let Some(side) = manifest_path {
                fs::write(side, json).map_err(|e| Failure::Io(format!("{}: {e}", side.display())))?;
            }
        }
    }
    Ok(())
}

/// Flattens a JSON record into `key,value` CSV rows with dotted keys.
pub fn flatten_csv(value: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        match v {
            Value::Object(map) => {
                for (k, x) in map {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&key, x, out);
                }
            }
            Value::Array(items) => {
                for (i, x) in items.iter().enumerate() {
                    walk(&format!("{prefix}.{i}"), x, out);
                }
            }
            Value::String(s) => out.push((prefix.to_string(), s.clone())),
            other => out.push((prefix.to_string(), other.to_string())),
        }
    }
    let mut rows = Vec::new();
    walk("", value, &mut rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["key", "value"]).expect("in-memory write");
    for (k, v) in rows {
        w.write_record([k, v]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8 csv")
}
