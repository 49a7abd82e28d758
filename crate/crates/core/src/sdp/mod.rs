//! Choi-matrix feasibility: is there a channel sending `{B_u B_v*}` to
//! `{B'_u B'_v*}`?

pub mod constraints;
pub(crate) mod hermitian;
pub mod kraus;
pub mod solver;

use serde::{Deserialize, Serialize};

pub use constraints::{build_constraints, AffineSystem, ConstraintScope, LinearInconsistency};
pub use kraus::{extract_kraus, verify_channel, ChoiMatrix, KrausSet, CPTP_TOL};
pub use solver::{solve_feasibility, SolverConfig, SolverRun, Termination};

use crate::error::{Error, Result};
use crate::filter::{self, FilterVerdict, FilterWitness};
use crate::linalg;
use crate::rank_one::{self, MinorWitness, RankOneVerdict};
use crate::state::{BlockFamily, TripartiteState};
use crate::Direction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Feasible,
    RuledOut,
    Inconclusive,
}

/// Pipeline stage that produced the verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Filter,
    RankOne,
    Constraints,
    Sdp,
}

/// Proof that no channel exists.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum InfeasibilityCause {
    FilterWitness { witness: FilterWitness },
    LinearInconsistency { detail: LinearInconsistency },
    CorrelationMinor { witness: MinorWitness },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecideConfig {
    pub solver: SolverConfig,
    /// Random combination witnesses after the pair filter; 0 skips them.
    pub witness_count: usize,
    pub seed: u64,
    pub slack_tol: f64,
    pub rank_tol: f64,
    pub verify_tol: f64,
    pub use_rank_one: bool,
    pub scope: ConstraintScope,
}

impl Default for DecideConfig {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            witness_count: 256,
            seed: 0,
            slack_tol: filter::DEFAULT_SLACK_TOL,
            rank_tol: linalg::DEFAULT_RANK_TOL,
            verify_tol: 1e-7,
            use_rank_one: true,
            scope: ConstraintScope::Full,
        }
    }
}

impl DecideConfig {
    pub fn validate(&self) -> Result<()> {
        self.solver.validate()?;
        for (name, v) in [("slack_tol", self.slack_tol), ("rank_tol", self.rank_tol), ("verify_tol", self.verify_tol)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive and finite")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FeasibilityOutcome {
    pub direction: Direction,
    pub status: Status,
    pub stage: Stage,
    pub scope: ConstraintScope,
    pub residual_affine: Option<f64>,
    pub residual_psd: Option<f64>,
    pub iterations: usize,
    pub termination: Option<Termination>,
    pub certificate: Option<KrausSet>,
    /// Residual of the certificate on the normalized state.
    pub verification_residual: Option<f64>,
    pub cause: Option<InfeasibilityCause>,
}

impl FeasibilityOutcome {
    fn new(direction: Direction, scope: ConstraintScope, status: Status, stage: Stage) -> Self {
        Self {
            direction,
            status,
            stage,
            scope,
            residual_affine: None,
            residual_psd: None,
            iterations: 0,
            termination: None,
            certificate: None,
            verification_residual: None,
            cause: None,
        }
    }

    fn ruled_out(direction: Direction, scope: ConstraintScope, stage: Stage, cause: InfeasibilityCause) -> Self {
        Self { cause: Some(cause), ..Self::new(direction, scope, Status::RuledOut, stage) }
    }

    pub fn filter_witness(&self) -> Option<&FilterWitness> {
        match &self.cause {
            Some(InfeasibilityCause::FilterWitness { witness }) => Some(witness),
            _ => None,
        }
    }

    pub fn is_verified_feasible(&self) -> bool {
        self.status == Status::Feasible && self.certificate.is_some()
    }
}

/// Residual of `kraus` against the block pairs covered by `scope`, on
/// unit-weight blocks. For [`ConstraintScope::Full`] this equals the
/// reduced-density residual of the normalized state.
pub fn verify_blocks(kraus: &KrausSet, blocks: &BlockFamily, direction: Direction, scope: ConstraintScope) -> Result<f64> {
    let (src, tgt) = blocks.oriented(direction);
    if kraus.in_dim() != src[0].nrows() || kraus.out_dim() != tgt[0].nrows() {
        return Err(Error::Dimension(format!(
            "{direction} map needs a {}→{} channel, got {}→{}",
            src[0].nrows(),
            tgt[0].nrows(),
            kraus.in_dim(),
            kraus.out_dim()
        )));
    }
    let w = blocks.weight();
    let n = src.len();
    let mut sum = 0.0;
    for u in 0..n {
        for v in 0..n {
            if scope == ConstraintScope::DiagonalOnly && u != v {
                continue;
            }
            let img = kraus.apply(&(&src[u] * src[v].adjoint()));
            sum += (img - &tgt[u] * tgt[v].adjoint()).norm_squared();
        }
    }
    Ok(sum.sqrt() / w)
}

fn certify(
    kraus: KrausSet,
    blocks: &BlockFamily,
    direction: Direction,
    config: &DecideConfig,
) -> Result<Option<(KrausSet, f64)>> {
    if kraus.completeness_deviation() > CPTP_TOL {
        return Ok(None);
    }
    let residual = verify_blocks(&kraus, blocks, direction, config.scope)?;
    Ok((residual <= config.verify_tol).then_some((kraus, residual)))
}

/// Run the full pipeline for one direction: filters, the rank-one test, the
/// linear consistency checks and finally the projection solver.
///
/// `Feasible` always carries a Kraus certificate that has been re-verified;
/// `RuledOut` always carries the proof that fired.
pub fn decide(state: &TripartiteState, direction: Direction, config: &DecideConfig) -> Result<FeasibilityOutcome> {
    config.validate()?;
    let blocks = state.normalized()?.blocks()?;
    decide_blocks(&blocks, direction, config)
}

pub fn decide_blocks(blocks: &BlockFamily, direction: Direction, config: &DecideConfig) -> Result<FeasibilityOutcome> {
    let scope = config.scope;
    if scope == ConstraintScope::DiagonalOnly {
        // filters and the rank-one test speak about the full family
        return solve_stage(blocks, direction, config, 0);
    }
    let pair = filter::pair_filter(blocks, direction, config.slack_tol)?;
    if pair.verdict == FilterVerdict::RuledOut {
        let witness = pair.strongest().expect("ruled out has a violation").clone();
        return Ok(FeasibilityOutcome::ruled_out(direction, scope, Stage::Filter, InfeasibilityCause::FilterWitness { witness }));
    }
    if config.witness_count > 0 {
        let random = filter::random_witness_filter(blocks, direction, config.witness_count, config.seed, config.slack_tol)?;
        if random.verdict == FilterVerdict::RuledOut {
            let witness = random.strongest().expect("ruled out has a violation").clone();
            return Ok(FeasibilityOutcome::ruled_out(direction, scope, Stage::Filter, InfeasibilityCause::FilterWitness { witness }));
        }
    }

    let mut iterations = 0;
    if config.use_rank_one {
        if let Some(dec) = rank_one::detect_rank_one(blocks, config.rank_tol) {
            let dec = dec.oriented(direction);
            let e = rank_one::check_condition_e(&dec, &config.solver)?;
            iterations += e.iterations;
            match e.verdict {
                RankOneVerdict::Yes => {
                    let cert = e.certificate.as_ref().expect("yes carries a certificate");
                    let kraus = rank_one::certificate_channel(&dec, cert)?;
                    if let Some((kraus, residual)) = certify(kraus, blocks, direction, config)? {
                        return Ok(FeasibilityOutcome {
                            iterations,
                            certificate: Some(kraus),
                            verification_residual: Some(residual),
                            ..FeasibilityOutcome::new(direction, scope, Status::Feasible, Stage::RankOne)
                        });
                    }
                }
                RankOneVerdict::No => {
                    let witness = e.witness.expect("no carries a witness");
                    return Ok(FeasibilityOutcome {
                        iterations,
                        ..FeasibilityOutcome::ruled_out(
                            direction,
                            scope,
                            Stage::RankOne,
                            InfeasibilityCause::CorrelationMinor { witness },
                        )
                    });
                }
                RankOneVerdict::Inconclusive => {}
            }
        }
    }

    solve_stage(blocks, direction, config, iterations)
}

fn solve_stage(blocks: &BlockFamily, direction: Direction, config: &DecideConfig, iterations: usize) -> Result<FeasibilityOutcome> {
    let scope = config.scope;
    let system = build_constraints(blocks, direction, scope)?;
    if let Some(detail) = system.inconsistency.clone() {
        return Ok(FeasibilityOutcome {
            iterations,
            ..FeasibilityOutcome::ruled_out(direction, scope, Stage::Constraints, InfeasibilityCause::LinearInconsistency { detail })
        });
    }
    let run = solve_feasibility(&system, &config.solver)?;
    let mut out = FeasibilityOutcome {
        residual_affine: Some(run.residual_affine),
        residual_psd: Some(run.residual_psd),
        iterations: iterations + run.iterations,
        termination: Some(run.termination),
        ..FeasibilityOutcome::new(direction, scope, Status::Inconclusive, Stage::Sdp)
    };
    if run.converged() {
        let choi = ChoiMatrix::new(run.point, system.in_dim, system.out_dim)?;
        if let Ok(kraus) = extract_kraus(&choi, config.rank_tol) {
            let residual = verify_blocks(&kraus, blocks, direction, scope)?;
            out.verification_residual = Some(residual);
            if let Some((kraus, _)) = certify(kraus, blocks, direction, config)? {
                out.status = Status::Feasible;
                out.certificate = Some(kraus);
            }
        }
    }
    Ok(out)
}
