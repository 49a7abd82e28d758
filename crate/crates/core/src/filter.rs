//! Trace-norm filters that rule out degradability.
//!
//! Any channel `Φ` with `Φ(R_u R_v*) = S_u S_v*` is linear, so it also maps
//! `Σ λ_uv R_u R_v*` to `Σ λ_uv S_u S_v*`, and quantum channels never
//! increase the trace norm of a matrix (Hermitian or not). A witness whose
//! source side is strictly smaller than its target side therefore proves
//! that no such channel exists.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, cr, ComplexMatrix};
use crate::sdp::KrausSet;
use crate::state::BlockFamily;
use crate::Direction;

/// Violations must beat numerical noise by this much (relative to `‖x‖²`).
pub const DEFAULT_SLACK_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    /// `B_i B_j* − B_i' B_j'*`, compared as trace distances.
    PairDifference,
    /// `B_i B_j* + B_j B_i*`, compared as trace norms.
    HermitianPair,
    /// `(Σ c B)(Σ c B)* − (Σ c' B)(Σ c' B)*`, compared as trace norms.
    CombinationDifference,
    /// `(Σ c B)(Σ c̃ B)*`, compared as trace norms.
    CombinationCross,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FilterWitness {
    pub kind: WitnessKind,
    /// Nonzero `λ_uv` of `M = Σ λ_uv B_u B_v*` as `(u, v, λ)`.
    pub coefficients: Vec<(usize, usize, Complex64)>,
    pub d_in: f64,
    pub d_out: f64,
    pub violated: bool,
}

impl FilterWitness {
    pub fn margin(&self) -> f64 {
        self.d_out - self.d_in
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterVerdict {
    RuledOut,
    Passed,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FilterReport {
    pub direction: Direction,
    pub witnesses: Vec<FilterWitness>,
    pub verdict: FilterVerdict,
}

impl FilterReport {
    fn from_witnesses(direction: Direction, witnesses: Vec<FilterWitness>) -> Self {
        let verdict = if witnesses.iter().any(|w| w.violated) {
            FilterVerdict::RuledOut
        } else {
            FilterVerdict::Passed
        };
        Self { direction, witnesses, verdict }
    }

    pub fn violations(&self) -> impl Iterator<Item = &FilterWitness> {
        self.witnesses.iter().filter(|w| w.violated)
    }

    /// The violation with the largest margin.
    pub fn strongest(&self) -> Option<&FilterWitness> {
        self.violations().max_by(|a, b| a.margin().total_cmp(&b.margin()))
    }
}

fn combine(blocks: &[ComplexMatrix], lambda: &ComplexMatrix) -> ComplexMatrix {
    let d = blocks[0].nrows();
    let mut out = ComplexMatrix::zeros(d, d);
    for (u, bu) in blocks.iter().enumerate() {
        for (v, bv) in blocks.iter().enumerate() {
            let l = lambda[(u, v)];
            if l != cr(0.0) {
                out += (bu * bv.adjoint()) * l;
            }
        }
    }
    out
}

fn evaluate(
    kind: WitnessKind,
    lambda: &ComplexMatrix,
    source: &[ComplexMatrix],
    target: &[ComplexMatrix],
    slack: f64,
) -> Result<FilterWitness> {
    let scale = if kind == WitnessKind::PairDifference { 0.5 } else { 1.0 };
    let d_in = scale * linalg::trace_norm(&combine(source, lambda))?;
    let d_out = scale * linalg::trace_norm(&combine(target, lambda))?;
    let n = lambda.nrows();
    let coefficients = (0..n)
        .flat_map(|u| (0..n).map(move |v| (u, v)))
        .filter_map(|(u, v)| {
            let l = lambda[(u, v)];
            (l != cr(0.0)).then_some((u, v, l))
        })
        .collect();
    Ok(FilterWitness { kind, coefficients, d_in, d_out, violated: d_in < d_out - slack })
}

/// All two-term difference witnesses `B_i B_j* − B_i' B_j'*` over distinct
/// ordered index pairs, plus the Hermitian pairs `B_i B_j* + B_j B_i*`.
pub fn pair_filter(blocks: &BlockFamily, direction: Direction, slack_tol: f64) -> Result<FilterReport> {
    let (source, target) = blocks.oriented(direction);
    let n = source.len();
    let slack = slack_tol * blocks.weight();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let mut witnesses = Vec::new();
    for (a, &(i, j)) in pairs.iter().enumerate() {
        for &(i2, j2) in &pairs[a + 1..] {
            let mut lambda = ComplexMatrix::zeros(n, n);
            lambda[(i, j)] += cr(1.0);
            lambda[(i2, j2)] -= cr(1.0);
            witnesses.push(evaluate(WitnessKind::PairDifference, &lambda, source, target, slack)?);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let mut lambda = ComplexMatrix::zeros(n, n);
            lambda[(i, j)] = cr(1.0);
            lambda[(j, i)] = cr(1.0);
            witnesses.push(evaluate(WitnessKind::HermitianPair, &lambda, source, target, slack)?);
        }
    }
    Ok(FilterReport::from_witnesses(direction, witnesses))
}

fn normal_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| c(StandardNormal.sample(rng), StandardNormal.sample(rng)))
        .collect()
}

fn outer(a: &[Complex64], b: &[Complex64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.len(), b.len(), |u, v| a[u] * b[v].conj())
}

/// Seeded random combination witnesses. Even draws are differences of two
/// combination products (`λ = c c* − c' c'*`, Hermitian); odd draws are
/// single cross products (`λ = c c̃*`).
pub fn random_witness_filter(
    blocks: &BlockFamily,
    direction: Direction,
    count: usize,
    seed: u64,
    slack_tol: f64,
) -> Result<FilterReport> {
    if count == 0 {
        return Err(Error::InvalidParameter("witness count must be at least 1".into()));
    }
    let (source, target) = blocks.oriented(direction);
    let n = source.len();
    let slack = slack_tol * blocks.weight();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut witnesses = Vec::with_capacity(count);
    for k in 0..count {
        let c1 = normal_vector(&mut rng, n);
        let c2 = normal_vector(&mut rng, n);
        let (kind, lambda) = if k % 2 == 0 {
            (WitnessKind::CombinationDifference, outer(&c1, &c1) - outer(&c2, &c2))
        } else {
            (WitnessKind::CombinationCross, outer(&c1, &c2))
        };
        witnesses.push(evaluate(kind, &lambda, source, target, slack)?);
    }
    Ok(FilterReport::from_witnesses(direction, witnesses))
}

/// Evaluate an explicit combination witness `λ`.
pub fn evaluate_witness(
    blocks: &BlockFamily,
    direction: Direction,
    kind: WitnessKind,
    lambda: &ComplexMatrix,
    slack_tol: f64,
) -> Result<FilterWitness> {
    let (source, target) = blocks.oriented(direction);
    if lambda.shape() != (source.len(), source.len()) {
        return Err(Error::Dimension(format!(
            "coefficient matrix {:?} for {} blocks",
            lambda.shape(),
            source.len()
        )));
    }
    evaluate(kind, lambda, source, target, slack_tol * blocks.weight())
}

/// Trace norms of `σ` and `Φ(σ)` for a channel `Φ`.
pub fn contractivity_check(channel: &KrausSet, sigma: &ComplexMatrix) -> Result<(f64, f64)> {
    let dev = channel.completeness_deviation();
    if dev > 1e-8 {
        return Err(Error::NotTracePreserving(dev));
    }
    if sigma.shape() != (channel.in_dim(), channel.in_dim()) {
        return Err(Error::Dimension(format!(
            "σ of shape {:?} for a channel with input dimension {}",
            sigma.shape(),
            channel.in_dim()
        )));
    }
    let before = linalg::trace_norm(sigma)?;
    let after = linalg::trace_norm(&channel.apply(sigma))?;
    Ok((before, after))
}
