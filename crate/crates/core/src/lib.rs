//! Degradability of tripartite pure states and quantum channels.
//!
//! Given `x ∈ Cⁿ ⊗ Cᵖ ⊗ C^q` shared by Alice, Bob and Eve, the crate decides
//! whether a channel acting on Eve's share alone can turn `ρ_AE` into `ρ_AB`
//! (E→B degradability), or the reverse. The pipeline is:
//!
//! 1. trace-distance filters that rule degradability out cheaply,
//! 2. an exact Gram/correlation-matrix test when every block is rank one,
//! 3. a Choi-matrix feasibility search by alternating projections whose
//!    answers are always backed by a verified Kraus certificate.
//!
//! Channels are tested through the state obtained by feeding half of a
//! maximally entangled state through their Stinespring dilation.

pub mod channel;
pub mod cli;
pub mod error;
pub mod filter;
pub mod io;
pub mod linalg;
pub mod rank_one;
pub mod report;
pub mod sdp;
pub mod state;

pub use channel::{QuantumChannel, StinespringDilation};
pub use error::{Error, Result};
pub use filter::{FilterReport, FilterWitness};
pub use linalg::{ComplexMatrix, ComplexVector};
pub use sdp::{decide, DecideConfig, FeasibilityOutcome, KrausSet, SolverConfig, Status};
pub use state::{BlockFamily, TripartiteState};

use serde::{Deserialize, Serialize};

/// Which subsystem is degraded into which.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    /// A channel on E maps `ρ_AE` to `ρ_AB`.
    #[serde(rename = "EtoB")]
    EveToBob,
    /// A channel on B maps `ρ_AB` to `ρ_AE`.
    #[serde(rename = "BtoE")]
    BobToEve,
}

impl Direction {
    pub fn label(self) -> &'static str {
        match self {
            Direction::EveToBob => "EtoB",
            Direction::BobToEve => "BtoE",
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Direction::EveToBob => "E→B",
            Direction::BobToEve => "B→E",
        })
    }
}
