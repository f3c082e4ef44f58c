//! Seeded instance generators and brute-force classical oracles.

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::operator::{DensityOperator, HermitianOperator};
use crate::C64;

/// Outcome budget for the enumeration oracle.
pub const ENUMERATION_BUDGET: u128 = 10_000_000;

/// Root of a reproducible random stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Seed(pub u64);

impl Seed {
    /// Independent child seed (splitmix64 step on `value ^ index`).
    pub fn derive(self, index: u64) -> Seed {
        let mut z = self
            .0
            .wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index.wrapping_add(1)));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        Seed(z ^ (z >> 31))
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

pub(crate) fn ginibre(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Mat<C64> {
    let mut g = Mat::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            g[(i, j)] = gaussian(rng);
        }
    }
    g
}

/// G G† / Tr(G G†) with G a dim×rank complex Gaussian matrix.
pub fn random_density(dim: usize, rank: usize, seed: Seed) -> Result<DensityOperator> {
    random_density_dims(vec![dim], rank, seed)
}

/// As [`random_density`], on the given tensor factors.
pub fn random_density_dims(dims: Vec<usize>, rank: usize, seed: Seed) -> Result<DensityOperator> {
    let dim: usize = dims.iter().product();
    if dim == 0 || rank == 0 || rank > dim {
        return Err(Error::InvalidParameter(format!(
            "rank {rank} not in 1..={dim}"
        )));
    }
    let mut rng = seed.rng();
    let g = ginibre(dim, rank, &mut rng);
    let ga = Mat::from_fn(rank, dim, |i, j| g[(j, i)].conj());
    let w = &g * &ga;
    let h = HermitianOperator::from_parts(dims, w);
    let tr = h.trace();
    Ok(DensityOperator::assume_valid(h.scaled(1.0 / tr)))
}

/// Full-rank state on dims [dA, dB].
pub fn random_bipartite(d_a: usize, d_b: usize, seed: Seed) -> Result<DensityOperator> {
    random_density_dims(vec![d_a, d_b], d_a * d_b, seed)
}

/// Hermitian matrix with i.i.d. Gaussian entries (GUE-like).
pub fn random_hermitian(dims: Vec<usize>, seed: Seed) -> HermitianOperator {
    let dim: usize = dims.iter().product();
    let g = ginibre(dim, dim, &mut seed.rng());
    HermitianOperator::from_parts(dims, g)
}

/// Haar-distributed unitary from the eigenvectors of a random Hermitian.
pub fn random_unitary(dim: usize, seed: Seed) -> Result<Mat<C64>> {
    Ok(random_hermitian(vec![dim], seed).eig()?.eigenvectors)
}

/// Probability table over tuples, row-major in `dims`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbTable {
    pub dims: Vec<usize>,
    pub probs: Vec<f64>,
}

impl ProbTable {
    pub fn new(dims: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        if dims.iter().product::<usize>() != probs.len() || dims.contains(&0) {
            return Err(Error::DimsProduct {
                dims,
                side: probs.len(),
            });
        }
        if let Some(&neg) = probs.iter().find(|&&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::InvalidParameter(format!("negative mass {neg}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::TraceNotOne(total));
        }
        Ok(ProbTable { dims, probs })
    }

    pub fn uniform(dims: Vec<usize>) -> Self {
        let n: usize = dims.iter().product();
        ProbTable {
            dims,
            probs: vec![1.0 / n as f64; n],
        }
    }

    /// Product of two tables (dims concatenated).
    pub fn product(&self, other: &ProbTable) -> ProbTable {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let probs = self
            .probs
            .iter()
            .flat_map(|&p| other.probs.iter().map(move |&q| p * q))
            .collect();
        ProbTable { dims, probs }
    }

    /// Marginal on the listed factors, which must be in increasing order.
    pub fn marginal(&self, keep: &[usize]) -> ProbTable {
        let strides = crate::operator::strides(&self.dims);
        let dims: Vec<usize> = keep.iter().map(|&k| self.dims[k]).collect();
        let kept_strides = crate::operator::strides(&dims);
        let mut probs = vec![0.0; dims.iter().product()];
        for (idx, &p) in self.probs.iter().enumerate() {
            let mut out = 0;
            for (slot, &k) in keep.iter().enumerate() {
                out += (idx / strides[k] % self.dims[k]) * kept_strides[slot];
            }
            probs[out] += p;
        }
        ProbTable { dims, probs }
    }
}

/// Diagonal density operator carrying the table.
pub fn classical_embed(p: &ProbTable) -> Result<DensityOperator> {
    if let Some(&neg) = p.probs.iter().find(|&&v| v < 0.0) {
        return Err(Error::InvalidParameter(format!("negative mass {neg}")));
    }
    DensityOperator::from_probabilities(p.dims.clone(), &p.probs)
}

/// Exact total variation between the classical convex-split mixture
/// (1/M) Σ_m p_{A_m B} Π_{m'≠m} q_{A_m'} and q^{⊗M} ⊗ p_B, by enumeration.
pub fn classical_covering_oracle(p_ab: &ProbTable, q_a: &[f64], m: usize) -> Result<f64> {
    if p_ab.dims.len() != 2 || p_ab.dims[0] != q_a.len() {
        return Err(Error::DimensionMismatch(format!(
            "table dims {:?} with |A| = {}",
            p_ab.dims,
            q_a.len()
        )));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("M must be at least 1".into()));
    }
    let (da, db) = (p_ab.dims[0], p_ab.dims[1]);
    let outcomes = (da as u128).checked_pow(m as u32).map(|v| v * db as u128);
    match outcomes {
        Some(n) if n <= ENUMERATION_BUDGET => {}
        other => {
            return Err(Error::EnumerationBudget {
                outcomes: other.unwrap_or(u128::MAX),
                budget: ENUMERATION_BUDGET,
            })
        }
    }
    let p_b = p_ab.marginal(&[1]).probs;
    let mut digits = vec![0usize; m];
    let mut tv = 0.0;
    loop {
        let q_all: f64 = digits.iter().map(|&a| q_a[a]).product();
        for b in 0..db {
            let product = q_all * p_b[b];
            let mut mix = 0.0;
            for (slot, &a) in digits.iter().enumerate() {
                let rest: f64 = digits
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != slot)
                    .map(|(_, &a2)| q_a[a2])
                    .product();
                mix += p_ab.probs[a * db + b] * rest;
            }
            tv += (mix / m as f64 - product).abs();
        }
        let mut k = 0;
        loop {
            if k == m {
                return Ok(0.5 * tv);
            }
            digits[k] += 1;
            if digits[k] < da {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}

/// min_T Σ_{i∉T} a_i + Σ_{i∈T} b_i over all 2^d deterministic tests T.
pub fn classical_minimal_oracle(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.len() > 20 {
        return Err(Error::InvalidParameter("need equal lengths <= 20".into()));
    }
    let d = a.len();
    let best = (0u32..1 << d)
        .map(|mask| {
            (0..d)
                .map(|i| if mask >> i & 1 == 1 { b[i] } else { a[i] })
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min);
    Ok(best)
}

/// Exhaustive classical D_h^ε(p‖q): minimizes q(T) over the vertices of
/// {0 ≤ T ≤ 1, p(T) ≥ 1−ε}, i.e. a subset S plus at most one fractional
/// outcome, over all 2^d subsets.
pub fn classical_hypothesis_oracle(p: &[f64], q: &[f64], eps: f64) -> Result<f64> {
    if p.len() != q.len() || p.len() > 20 {
        return Err(Error::InvalidParameter("need equal lengths <= 20".into()));
    }
    let d = p.len();
    let target = 1.0 - eps;
    let mut best = f64::INFINITY;
    for mask in 0u32..1 << d {
        let inside = |i: usize| mask >> i & 1 == 1;
        let ps: f64 = (0..d).filter(|&i| inside(i)).map(|i| p[i]).sum();
        let qs: f64 = (0..d).filter(|&i| inside(i)).map(|i| q[i]).sum();
        if ps >= target {
            best = best.min(qs);
            continue;
        }
        for j in (0..d).filter(|&j| !inside(j) && p[j] > 0.0) {
            let t = (target - ps) / p[j];
            if t <= 1.0 {
                best = best.min(qs + t * q[j]);
            }
        }
    }
    Ok(-best.ln())
}

/// Classical-quantum state Σ_x p(x) |x⟩⟨x| ⊗ ρ_x.
#[derive(Clone, Debug)]
pub struct CqState {
    probs: Vec<f64>,
    conditionals: Vec<DensityOperator>,
}

impl CqState {
    pub fn new(probs: Vec<f64>, conditionals: Vec<DensityOperator>) -> Result<Self> {
        if probs.is_empty() || probs.len() != conditionals.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} probabilities for {} conditionals",
                probs.len(),
                conditionals.len()
            )));
        }
        if let Some(&neg) = probs.iter().find(|&&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::InvalidParameter(format!("negative mass {neg}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::TraceNotOne(total));
        }
        let dims = conditionals[0].dims();
        if conditionals.iter().any(|c| c.dims() != dims) {
            return Err(Error::DimensionMismatch("conditionals differ in dims".into()));
        }
        Ok(CqState {
            probs,
            conditionals,
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn conditionals(&self) -> &[DensityOperator] {
        &self.conditionals
    }

    pub fn alphabet(&self) -> usize {
        self.probs.len()
    }

    /// Dims of the quantum part.
    pub fn quantum_dims(&self) -> &[usize] {
        self.conditionals[0].dims()
    }

    /// Dense embedding with dims [|X|, quantum dims…].
    pub fn to_density(&self) -> DensityOperator {
        let n = self.alphabet();
        let qd = self.quantum_dims().to_vec();
        let dq: usize = qd.iter().product();
        let mut mat = Mat::<C64>::zeros(n * dq, n * dq);
        for (x, (p, c)) in self.probs.iter().zip(&self.conditionals).enumerate() {
            for i in 0..dq {
                for j in 0..dq {
                    mat[(x * dq + i, x * dq + j)] = c.entry(i, j) * *p;
                }
            }
        }
        let mut dims = vec![n];
        dims.extend(qd);
        DensityOperator::assume_valid(HermitianOperator::from_parts(dims, mat))
    }

    /// Average state Σ_x p(x) ρ_x.
    pub fn average(&self) -> DensityOperator {
        let mut acc = HermitianOperator::zeros(self.quantum_dims().to_vec());
        for (p, c) in self.probs.iter().zip(&self.conditionals) {
            acc = acc.add_scaled(c.op(), *p);
        }
        DensityOperator::assume_valid(acc)
    }

    /// Applies `f` to every conditional state.
    pub fn map_conditionals<F>(&self, f: F) -> Result<CqState>
    where
        F: Fn(&DensityOperator) -> Result<DensityOperator>,
    {
        let conditionals = self
            .conditionals
            .iter()
            .map(f)
            .collect::<Result<Vec<_>>>()?;
        CqState::new(self.probs.clone(), conditionals)
    }
}

/// Random cq state with Dirichlet-like weights and full-rank conditionals.
pub fn random_cq(alphabet: usize, quantum_dims: Vec<usize>, seed: Seed) -> Result<CqState> {
    let mut rng = seed.derive(0).rng();
    let raw: Vec<f64> = (0..alphabet)
        .map(|_| {
            let u: f64 = rng.random_range(1e-3..1.0);
            -u.ln()
        })
        .collect();
    let total: f64 = raw.iter().sum();
    let probs = raw.iter().map(|v| v / total).collect();
    let rank: usize = quantum_dims.iter().product();
    let conditionals = (0..alphabet)
        .map(|x| random_density_dims(quantum_dims.clone(), rank, seed.derive(1 + x as u64)))
        .collect::<Result<Vec<_>>>()?;
    CqState::new(probs, conditionals)
}
