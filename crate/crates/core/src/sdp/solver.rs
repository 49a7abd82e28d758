//! Dykstra alternating projections between the PSD cone and an affine set.

use serde::{Deserialize, Serialize};

use super::constraints::AffineSystem;
use super::hermitian;
use crate::error::{Error, Result};
use crate::linalg::{project_psd, ComplexMatrix};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub max_iter: usize,
    pub feas_tol: f64,
    pub psd_tol: f64,
    pub stall_window: usize,
    pub stall_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iter: 20_000,
            feas_tol: 1e-8,
            psd_tol: 1e-9,
            stall_window: 500,
            stall_tol: 1e-12,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if self.max_iter == 0 || self.stall_window == 0 {
            return Err(Error::Config("iteration budgets must be positive".into()));
        }
        if !positive(self.feas_tol) || !positive(self.psd_tol) || !positive(self.stall_tol) {
            return Err(Error::Config("tolerances must be positive and finite".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    Stalled,
    BudgetExhausted,
}

#[derive(Clone, Debug)]
pub struct SolverRun {
    pub termination: Termination,
    /// PSD iterate; its affine residual is `residual_affine`.
    pub point: ComplexMatrix,
    pub residual_affine: f64,
    /// Frobenius norm of the negative part of the affine iterate.
    pub residual_psd: f64,
    pub iterations: usize,
}

impl SolverRun {
    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }
}

/// Look for a PSD matrix in the affine set. Never concludes the set is
/// empty: failure to converge is reported as a stall or an exhausted budget.
pub fn solve_feasibility(system: &AffineSystem, config: &SolverConfig) -> Result<SolverRun> {
    config.validate()?;
    let d = system.dim;
    let mut x = hermitian::encode(&system.initial);
    // Dykstra correction for the cone; the affine projection needs none.
    let mut q = nalgebra::DVector::<f64>::zeros(x.len());
    let mut best = f64::INFINITY;
    let mut window_start_best = f64::INFINITY;
    let mut last = None;
    for it in 1..=config.max_iter {
        let y = system.project(&x);
        let ym = hermitian::decode(&(&y + &q), d);
        let (zm, _) = project_psd(&ym);
        let z = hermitian::encode(&zm);
        q = &y + &q - &z;
        let (_, neg) = project_psd(&hermitian::decode(&y, d));
        let r_aff = system.residual(&z);
        x = z;
        let merit = r_aff.max(neg);
        last = Some((zm, r_aff, neg));
        if r_aff <= config.feas_tol && neg <= config.psd_tol {
            let (point, residual_affine, residual_psd) = last.take().expect("set above");
            return Ok(SolverRun {
                termination: Termination::Converged,
                point,
                residual_affine,
                residual_psd,
                iterations: it,
            });
        }
        best = best.min(merit);
        if it % config.stall_window == 0 {
            if window_start_best.is_finite() && window_start_best - best <= config.stall_tol * window_start_best {
                let (point, residual_affine, residual_psd) = last.take().expect("set above");
                return Ok(SolverRun {
                    termination: Termination::Stalled,
                    point,
                    residual_affine,
                    residual_psd,
                    iterations: it,
                });
            }
            window_start_best = best;
        }
    }
    let (point, residual_affine, residual_psd) = last.expect("max_iter > 0");
    Ok(SolverRun {
        termination: Termination::BudgetExhausted,
        point,
        residual_affine,
        residual_psd,
        iterations: config.max_iter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdp::constraints::{build_constraints, ConstraintScope};
    use crate::state::{example2, ghz};
    use crate::Direction;

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = SolverConfig {
            feas_tol: 0.0,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = SolverConfig {
            psd_tol: f64::NAN,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn ghz_converges_quickly() {
        for dir in [Direction::EveToBob, Direction::BobToEve] {
            let sys = build_constraints(&ghz().blocks().unwrap(), dir, ConstraintScope::Full).unwrap();
            let run = solve_feasibility(&sys, &SolverConfig::default()).unwrap();
            assert!(run.converged(), "{dir}: {run:?}");
            assert!(run.iterations <= 500, "{}", run.iterations);
            assert!(run.residual_affine <= 1e-8 && run.residual_psd <= 1e-9);
        }
    }

    #[test]
    fn example2_converges() {
        let sys =
            build_constraints(&example2(0.5, 0.5).unwrap().blocks().unwrap(), Direction::EveToBob, ConstraintScope::Full).unwrap();
        let run = solve_feasibility(&sys, &SolverConfig::default()).unwrap();
        assert!(run.converged(), "{run:?}");
    }
}
