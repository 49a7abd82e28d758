//! Human-readable and JSON renderings of results.
//!
//! JSON reports contain no timing so that identical runs produce identical
//! bytes; text reports add wall-clock time.

use std::fmt::Write as _;
use std::time::Duration;

use serde::Serialize;

use crate::channel::{ChannelReport, Scan, ScanVerdict};
use crate::sdp::{DecideConfig, FeasibilityOutcome, InfeasibilityCause, Status};

#[derive(Clone, Debug, Serialize)]
pub struct StateReport {
    pub dims: [usize; 3],
    pub normalized_input: bool,
    pub config: DecideConfig,
    pub outcomes: Vec<FeasibilityOutcome>,
}

impl StateReport {
    pub fn is_conclusive(&self) -> bool {
        self.outcomes.iter().all(|o| o.status != Status::Inconclusive)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ChannelAnalysis {
    pub dim: usize,
    pub kraus_count: usize,
    pub config: DecideConfig,
    pub scope: &'static str,
    #[serde(flatten)]
    pub report: ChannelReport,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "report", rename_all = "snake_case")]
pub enum Report {
    State(StateReport),
    Channel(ChannelAnalysis),
}

impl Report {
    pub fn is_conclusive(&self) -> bool {
        match self {
            Report::State(s) => s.is_conclusive(),
            Report::Channel(c) => c.report.verdict.is_conclusive(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self, elapsed: Option<Duration>) -> String {
        let mut out = String::new();
        match self {
            Report::State(r) => {
                let [n, p, q] = r.dims;
                let _ = writeln!(out, "state {n}x{p}x{q}{}", if r.normalized_input { "" } else { " (unnormalized input)" });
                for o in &r.outcomes {
                    outcome_text(&mut out, o);
                }
                config_text(&mut out, &r.config);
            }
            Report::Channel(c) => {
                let _ = writeln!(out, "channel on C^{} with {} Kraus operators", c.dim, c.kraus_count);
                let _ = writeln!(out, "verdict: {}", serde_plain(&c.report.verdict));
                let _ = writeln!(out, "scope: {}", c.scope);
                outcome_text(&mut out, &c.report.eve_to_bob);
                outcome_text(&mut out, &c.report.bob_to_eve);
                config_text(&mut out, &c.config);
            }
        }
        if let Some(t) = elapsed {
            let _ = writeln!(out, "time: {:.1} ms", t.as_secs_f64() * 1e3);
        }
        out
    }
}

fn serde_plain<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
}

fn outcome_text(out: &mut String, o: &FeasibilityOutcome) {
    let _ = write!(out, "{}: {} [{}]", o.direction, serde_plain(&o.status), serde_plain(&o.stage));
    match o.status {
        Status::Feasible => {
            let k = o.certificate.as_ref().expect("feasible outcomes carry certificates");
            let _ = writeln!(
                out,
                " certificate with {} Kraus operators ({}→{}), verification residual {:.2e}, {} iterations",
                k.len(),
                k.in_dim(),
                k.out_dim(),
                o.verification_residual.unwrap_or(0.0),
                o.iterations
            );
        }
        Status::RuledOut => {
            let _ = writeln!(out);
            match &o.cause {
                Some(InfeasibilityCause::FilterWitness { witness }) => {
                    let terms: Vec<String> = witness
                        .coefficients
                        .iter()
                        .map(|(u, v, l)| format!("({:+.4}{:+.4}i)·B{u}B{v}*", l.re, l.im))
                        .collect();
                    let _ = writeln!(
                        out,
                        "  witness {}: {} has input {:.6} < output {:.6}",
                        serde_plain(&witness.kind),
                        terms.join(" "),
                        witness.d_in,
                        witness.d_out
                    );
                }
                Some(InfeasibilityCause::LinearInconsistency { detail }) => {
                    let _ = writeln!(out, "  linear constraints inconsistent: {}", serde_json::to_string(detail).unwrap_or_default());
                }
                Some(InfeasibilityCause::CorrelationMinor { witness }) => {
                    let _ = writeln!(out, "  no correlation matrix: {}", serde_json::to_string(witness).unwrap_or_default());
                }
                None => {}
            }
        }
        Status::Inconclusive => {
            let _ = writeln!(
                out,
                " stopped ({}) after {} iterations at affine residual {:.3e}, psd residual {:.3e}; raise --max-iter or loosen --feas-tol to continue",
                o.termination.map(|t| serde_plain(&t)).unwrap_or_default(),
                o.iterations,
                o.residual_affine.unwrap_or(f64::NAN),
                o.residual_psd.unwrap_or(f64::NAN)
            );
        }
    }
}

fn config_text(out: &mut String, c: &DecideConfig) {
    let _ = writeln!(
        out,
        "config: max_iter={} feas_tol={:e} psd_tol={:e} stall_window={} stall_tol={:e} witnesses={} seed={} slack_tol={:e} verify_tol={:e} scope={}",
        c.solver.max_iter,
        c.solver.feas_tol,
        c.solver.psd_tol,
        c.solver.stall_window,
        c.solver.stall_tol,
        c.witness_count,
        c.seed,
        c.slack_tol,
        c.verify_tol,
        serde_plain(&c.scope)
    );
}

/// CSV with header `epsilon,d_R,d_S,verdict,qber`, LF line endings.
pub fn scan_csv(scan: &Scan) -> String {
    let mut out = String::from("epsilon,d_R,d_S,verdict,qber\n");
    for r in &scan.rows {
        let _ = writeln!(out, "{},{:.12},{:.12},{},{:.12}", r.epsilon, r.d_r, r.d_s, serde_plain(&r.verdict), r.qber);
    }
    out
}

/// `"0.245 < ε* ≤ 0.255"`: the midpoint estimate and one step above it.
pub fn threshold_line(scan: &Scan) -> String {
    match (scan.threshold, scan.bracket()) {
        (Some(t), Some((lo, hi))) => {
            let round = |x: f64| (x * 1e12).round() / 1e12;
            format!(
                "{} < ε* ≤ {} (last ruled out {lo}, first not ruled out {hi}, QBER* ≈ {:.4})",
                round(t),
                round(t + scan.step),
                2.0 * t / 3.0
            )
        }
        _ => {
            let all_ruled = scan.rows.iter().all(|r| r.verdict == ScanVerdict::RuledOut);
            if all_ruled {
                "every grid point ruled out; threshold above the range".into()
            } else {
                "no grid point ruled out; threshold below the range".into()
            }
        }
    }
}
