//! JSON files for states and channels.
//!
//! State: `{"dims": [n, p, q], "amplitudes": [[re, im], ...]}` in
//! lexicographic `(i, j, k)` order. Channel:
//! `{"in_dim": n, "out_dim": n, "kraus": [[[re, im], ...], ...]}` with each
//! operator flattened row-major.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::QuantumChannel;
use crate::error::{Error, Result};
use crate::linalg::c;
use crate::sdp::kraus::KrausJson;
use crate::sdp::KrausSet;
use crate::state::TripartiteState;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateJson {
    pub dims: [usize; 3],
    pub amplitudes: Vec<[f64; 2]>,
}

impl From<&TripartiteState> for StateJson {
    fn from(s: &TripartiteState) -> Self {
        let (n, p, q) = s.dims();
        Self { dims: [n, p, q], amplitudes: s.amplitudes().iter().map(|z| [z.re, z.im]).collect() }
    }
}

impl TryFrom<StateJson> for TripartiteState {
    type Error = Error;

    fn try_from(j: StateJson) -> Result<Self> {
        let [n, p, q] = j.dims;
        if n * p * q != j.amplitudes.len() {
            return Err(Error::Parse(format!(
                "field `amplitudes`: {} entries but dims {n}×{p}×{q} need {}",
                j.amplitudes.len(),
                n * p * q
            )));
        }
        TripartiteState::new((n, p, q), j.amplitudes.iter().map(|&[re, im]| c(re, im)).collect())
    }
}

fn parse_error(what: &str, e: serde_json::Error) -> Error {
    Error::Parse(format!("{what}: {e}"))
}

pub fn parse_state(text: &str) -> Result<TripartiteState> {
    let j: StateJson = serde_json::from_str(text).map_err(|e| parse_error("state file", e))?;
    j.try_into()
}

/// Parses and validates trace preservation and square shape.
pub fn parse_channel(text: &str) -> Result<QuantumChannel> {
    let j: KrausJson = serde_json::from_str(text).map_err(|e| parse_error("channel file", e))?;
    if j.kraus.is_empty() {
        return Err(Error::Parse("field `kraus`: no operators".into()));
    }
    let set = KrausSet::try_from(j)?;
    QuantumChannel::new(KrausSet::new(set.ops().to_vec())?)
}

pub fn read_state(path: &Path) -> Result<TripartiteState> {
    parse_state(&std::fs::read_to_string(path)?)
}

pub fn read_channel(path: &Path) -> Result<QuantumChannel> {
    parse_channel(&std::fs::read_to_string(path)?)
}

pub fn state_to_json(state: &TripartiteState) -> String {
    serde_json::to_string_pretty(&StateJson::from(state)).expect("plain data serializes")
}

pub fn channel_to_json(channel: &QuantumChannel) -> String {
    serde_json::to_string_pretty(channel.kraus()).expect("plain data serializes")
}
