//! Channels, their dilations, and degradability through the maximally
//! entangled lift.
//!
//! A channel `Φ_B` with Kraus operators `F_j` is dilated by
//! `V = Σ_j F_j ⊗ |j⟩`. Feeding half of `Σ_i |ii⟩` through `V` gives the
//! state `x_{i,b,j} = (F_j)_{b,i}` on `A ⊗ B ⊗ E`. A channel on `E` that
//! degrades this state works for every input `(K ⊗ I)Σ|ii⟩`, which makes
//! `Φ_B` anti-degradable; if no channel exists, none exists for any input
//! filtered by an invertible `K` either.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::{self, FilterVerdict};
use crate::linalg::{self, c, cr, ComplexMatrix};
use crate::sdp::{decide, DecideConfig, FeasibilityOutcome, KrausSet, Status};
use crate::state::TripartiteState;
use crate::Direction;

/// Largest condition number accepted for an "invertible" input filter.
pub const COND_TOL: f64 = 1e6;

/// A channel on `C^n` (same input and output dimension).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantumChannel {
    kraus: KrausSet,
}

impl QuantumChannel {
    pub fn new(kraus: KrausSet) -> Result<Self> {
        if kraus.in_dim() != kraus.out_dim() {
            return Err(Error::Dimension(format!(
                "channel lifts need square Kraus operators, got {}→{}",
                kraus.in_dim(),
                kraus.out_dim()
            )));
        }
        Ok(Self { kraus })
    }

    pub fn from_ops(ops: Vec<ComplexMatrix>) -> Result<Self> {
        Self::new(KrausSet::new(ops)?)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_ops(vec![ComplexMatrix::identity(n, n)])
    }

    pub fn kraus(&self) -> &KrausSet {
        &self.kraus
    }

    pub fn dim(&self) -> usize {
        self.kraus.in_dim()
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        self.kraus.apply(rho)
    }
}

/// Qubit depolarizing channel with Kraus operators
/// `(√(1−ε) I, √(ε/3) Z, √(ε/3) Y, √(ε/3) X)` and `Y = [[0, −1], [1, 0]]`.
pub fn depolarizing(epsilon: f64) -> Result<QuantumChannel> {
    if !(0.0..=0.75).contains(&epsilon) {
        return Err(Error::InvalidParameter(format!("ε = {epsilon} outside [0, 3/4]")));
    }
    let a = (1.0 - epsilon).sqrt();
    let b = (epsilon / 3.0).sqrt();
    let m = |e: [f64; 4]| ComplexMatrix::from_row_slice(2, 2, &e.map(cr));
    QuantumChannel::from_ops(vec![
        m([a, 0.0, 0.0, a]),
        m([b, 0.0, 0.0, -b]),
        m([0.0, -b, b, 0.0]),
        m([0.0, b, b, 0.0]),
    ])
}

/// Qubit amplitude damping with decay probability `gamma`.
pub fn amplitude_damping(gamma: f64) -> Result<QuantumChannel> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidParameter(format!("γ = {gamma} outside [0, 1]")));
    }
    let m = |e: [f64; 4]| ComplexMatrix::from_row_slice(2, 2, &e.map(cr));
    QuantumChannel::from_ops(vec![m([1.0, 0.0, 0.0, (1.0 - gamma).sqrt()]), m([0.0, gamma.sqrt(), 0.0, 0.0])])
}

/// `V : C^n → C^n ⊗ C^e`, output index `b·e + j`.
#[derive(Clone, Debug)]
pub struct StinespringDilation {
    pub v: ComplexMatrix,
    pub ancilla_dim: usize,
}

impl StinespringDilation {
    pub fn isometry_deviation(&self) -> f64 {
        let n = self.v.ncols();
        (self.v.adjoint() * &self.v - ComplexMatrix::identity(n, n)).norm()
    }

    /// `Tr_E(V ρ V*)`.
    pub fn system_output(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.v.ncols();
        let out = self.v.nrows() / self.ancilla_dim;
        let big = &self.v * rho * self.v.adjoint();
        linalg::partial_trace(&big, (1, out, self.ancilla_dim), linalg::Subsystem::Third)
            .map_err(|_| Error::Dimension(format!("input of shape {:?} for dimension {n}", rho.shape())))
    }

    /// `Tr_B(V ρ V*)`: the complementary channel.
    pub fn environment_output(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.v.ncols();
        let out = self.v.nrows() / self.ancilla_dim;
        let big = &self.v * rho * self.v.adjoint();
        linalg::partial_trace(&big, (1, out, self.ancilla_dim), linalg::Subsystem::Second)
            .map_err(|_| Error::Dimension(format!("input of shape {:?} for dimension {n}", rho.shape())))
    }
}

pub fn stinespring(channel: &QuantumChannel) -> Result<StinespringDilation> {
    let ops = channel.kraus().ops();
    let dev = channel.kraus().completeness_deviation();
    if dev > crate::sdp::CPTP_TOL {
        return Err(Error::NotTracePreserving(dev));
    }
    let e = ops.len();
    let (out, n) = ops[0].shape();
    let v = ComplexMatrix::from_fn(out * e, n, |row, k| ops[row % e][(row / e, k)]);
    Ok(StinespringDilation { v, ancilla_dim: e })
}

/// `(I_A ⊗ V) Σ_i |ii⟩` with dims `(n, n, e)`, left unnormalized
/// (`‖x‖² = n`).
pub fn lift_max_entangled(channel: &QuantumChannel) -> TripartiteState {
    let ops = channel.kraus().ops();
    let n = channel.dim();
    let e = ops.len();
    let mut amps = Vec::with_capacity(n * n * e);
    for i in 0..n {
        for b in 0..n {
            for op in ops {
                amps.push(op[(b, i)]);
            }
        }
    }
    TripartiteState::new((n, n, e), amps).expect("finite Kraus entries")
}

/// Lift of the input `(K ⊗ I) Σ_i |ii⟩`.
pub fn lift_filtered(channel: &QuantumChannel, k: &ComplexMatrix) -> Result<TripartiteState> {
    lift_max_entangled(channel).apply_first(k)
}

/// Condition number `σ_max / σ_min`; infinite when `σ_min` is at rounding
/// level.
pub fn condition_number(k: &ComplexMatrix) -> Result<f64> {
    let sv = linalg::singular_values(k)?;
    let max = sv.first().copied().unwrap_or(0.0);
    let min = if sv.len() == k.nrows().min(k.ncols()) { sv.last().copied().unwrap_or(0.0) } else { 0.0 };
    let floor = f64::EPSILON * max * k.nrows().max(k.ncols()) as f64;
    Ok(if min > floor { max / min } else { f64::INFINITY })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelVerdict {
    /// E→B feasible: the environment can simulate Bob.
    AntiDegradableCertified,
    /// B→E feasible: Bob can simulate the environment.
    DegradableCertified,
    BothCertified,
    /// E→B ruled out for the lift, hence for every input filtered by an
    /// invertible operator.
    RuledOutForFilteredInputs,
    Inconclusive,
}

impl ChannelVerdict {
    pub fn scope(self) -> &'static str {
        match self {
            ChannelVerdict::AntiDegradableCertified | ChannelVerdict::BothCertified => {
                "the E→B certificate degrades the lift of every input (K ⊗ I)Σ|ii⟩, so the channel is anti-degradable"
            }
            ChannelVerdict::DegradableCertified => {
                "the B→E certificate maps Bob's share onto the environment's for every input (K ⊗ I)Σ|ii⟩"
            }
            ChannelVerdict::RuledOutForFilteredInputs => {
                "no E→B channel exists for any input (W ⊗ I)Σ|ii⟩ with W invertible"
            }
            ChannelVerdict::Inconclusive => "no direction was certified or ruled out within the budget",
        }
    }

    pub fn is_conclusive(self) -> bool {
        self != ChannelVerdict::Inconclusive
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChannelReport {
    pub verdict: ChannelVerdict,
    pub eve_to_bob: FeasibilityOutcome,
    pub bob_to_eve: FeasibilityOutcome,
}

/// Decide the maximally entangled lift in both directions.
pub fn channel_degradability_test(channel: &QuantumChannel, config: &DecideConfig) -> Result<ChannelReport> {
    let lift = lift_max_entangled(channel);
    let eve_to_bob = decide(&lift, Direction::EveToBob, config)?;
    let bob_to_eve = decide(&lift, Direction::BobToEve, config)?;
    let verdict = match (eve_to_bob.is_verified_feasible(), bob_to_eve.is_verified_feasible()) {
        (true, true) => ChannelVerdict::BothCertified,
        (true, false) => ChannelVerdict::AntiDegradableCertified,
        (false, true) => ChannelVerdict::DegradableCertified,
        (false, false) if eve_to_bob.status == Status::RuledOut => ChannelVerdict::RuledOutForFilteredInputs,
        _ => ChannelVerdict::Inconclusive,
    };
    Ok(ChannelReport { verdict, eve_to_bob, bob_to_eve })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanVerdict {
    RuledOut,
    Passed,
    Feasible,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub epsilon: f64,
    /// `d(R₀R₀*, R₁R₁*)` on the unnormalized lift.
    pub d_r: f64,
    /// `d(S₀S₀*, S₁S₁*)` on the unnormalized lift.
    pub d_s: f64,
    pub verdict: ScanVerdict,
    pub qber: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scan {
    pub rows: Vec<ScanRow>,
    /// Midpoint between the last ruled-out and the first other grid point.
    pub threshold: Option<f64>,
    pub step: f64,
}

impl Scan {
    /// `(last ruled out, first not ruled out)`.
    pub fn bracket(&self) -> Option<(f64, f64)> {
        let first = self.rows.iter().position(|r| r.verdict != ScanVerdict::RuledOut)?;
        let last = self.rows[..first].last()?;
        Some((last.epsilon, self.rows[first].epsilon))
    }
}

/// Grid `ε_k = lo + k·step` up to `hi`, rounded to 12 decimals so that
/// printed values are exact.
pub fn epsilon_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && step.is_finite()) || lo < 0.0 || hi > 0.75 || lo >= hi || step <= 0.0 {
        return Err(Error::InvalidParameter(format!("scan range [{lo}, {hi}] step {step}: need 0 ≤ lo < hi ≤ 3/4 and step > 0")));
    }
    let round = |x: f64| (x * 1e12).round() / 1e12;
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|k| round(lo + k as f64 * step)).collect())
}

/// Scan the depolarizing family with the pair filter (E→B). With
/// `full = Some(config)` points that pass the filter are also run through
/// [`decide`].
pub fn epsilon_scan(lo: f64, hi: f64, step: f64, slack_tol: f64, full: Option<&DecideConfig>) -> Result<Scan> {
    let grid = epsilon_grid(lo, hi, step)?;
    // Grid points are independent; chunks keep the row order.
    let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let chunk = grid.len().div_ceil(threads).max(1);
    let rows = std::thread::scope(|scope| {
        let handles: Vec<_> = grid
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || part.iter().map(|&e| scan_point(e, slack_tol, full)).collect::<Result<Vec<_>>>())
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scan worker panicked"))
            .collect::<Result<Vec<_>>>()
    })?
    .concat();
    let mut scan = Scan { rows, threshold: None, step };
    scan.threshold = scan.bracket().map(|(a, b)| (a + b) / 2.0);
    Ok(scan)
}

fn scan_point(epsilon: f64, slack_tol: f64, full: Option<&DecideConfig>) -> Result<ScanRow> {
    let lift = lift_max_entangled(&depolarizing(epsilon)?);
    let blocks = lift.blocks()?;
    let half_norm = |a: &ComplexMatrix, b: &ComplexMatrix| -> Result<f64> {
        Ok(0.5 * linalg::trace_norm(&(a * a.adjoint() - b * b.adjoint()))?)
    };
    let d_r = half_norm(&blocks.r[0], &blocks.r[1])?;
    let d_s = half_norm(&blocks.s[0], &blocks.s[1])?;
    let report = filter::pair_filter(&blocks, Direction::EveToBob, slack_tol)?;
    let verdict = if report.verdict == FilterVerdict::RuledOut {
        ScanVerdict::RuledOut
    } else if let Some(config) = full {
        match decide(&lift, Direction::EveToBob, config)?.status {
            Status::Feasible => ScanVerdict::Feasible,
            Status::RuledOut => ScanVerdict::RuledOut,
            Status::Inconclusive => ScanVerdict::Inconclusive,
        }
    } else {
        ScanVerdict::Passed
    };
    Ok(ScanRow { epsilon, d_r, d_s, verdict, qber: 2.0 * epsilon / 3.0 })
}

/// A random channel on `C^n` with `r` Kraus operators: `F_j = G_j H^{-1/2}`
/// for Gaussian `G_j` and `H = Σ G_j* G_j`.
pub fn random_channel<R: rand::Rng>(rng: &mut R, n: usize, r: usize) -> Result<QuantumChannel> {
    use rand_distr::{Distribution, StandardNormal};
    let gs: Vec<ComplexMatrix> = (0..r)
        .map(|_| ComplexMatrix::from_fn(n, n, |_, _| c(StandardNormal.sample(rng), StandardNormal.sample(rng))))
        .collect();
    let set = KrausSet::from_ops_unchecked(gs).make_trace_preserving()?;
    QuantumChannel::new(KrausSet::new(set.ops().to_vec())?)
}
