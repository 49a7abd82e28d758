//! C ABI for `degradable`.
//!
//! Objects cross the boundary as opaque handles created by `dg_*_new` /
//! `dg_*_from_*` and released by the matching `dg_*_free`. Every fallible
//! function returns a [`DgStatus`]; on failure the message is available from
//! [`dg_last_error`] on the same thread. Strings returned through `char**`
//! are owned by the caller and released with [`dg_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use degradable::channel::{self, ChannelVerdict, QuantumChannel};
use degradable::linalg::c;
use degradable::sdp::{ConstraintScope, Stage};
use degradable::{io, DecideConfig, Direction, Error, FeasibilityOutcome, Status, TripartiteState};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Dimension = 4,
    NotTracePreserving = 5,
    Numerical = 6,
    Io = 7,
    /// Index or buffer length out of range.
    OutOfRange = 8,
    Panic = 99,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DgDirection {
    /// A channel on Eve's share reproduces Bob's.
    EveToBob = 0,
    BobToEve = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DgVerdict {
    Feasible = 0,
    RuledOut = 1,
    Inconclusive = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DgStage {
    Filter = 0,
    RankOne = 1,
    Constraints = 2,
    Sdp = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DgChannelVerdict {
    AntiDegradableCertified = 0,
    DegradableCertified = 1,
    BothCertified = 2,
    RuledOutForFilteredInputs = 3,
    Inconclusive = 4,
}

/// Decision settings. Obtain defaults from [`dg_config_default`].
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct DgConfig {
    pub max_iter: usize,
    pub feas_tol: f64,
    pub psd_tol: f64,
    pub stall_window: usize,
    /// Random combination witnesses; 0 disables them.
    pub witness_count: usize,
    pub seed: u64,
    pub use_rank_one: bool,
    /// Constrain only the `(u, u)` block pairs.
    pub diagonal_only: bool,
}

impl From<&DecideConfig> for DgConfig {
    fn from(c: &DecideConfig) -> Self {
        Self {
            max_iter: c.solver.max_iter,
            feas_tol: c.solver.feas_tol,
            psd_tol: c.solver.psd_tol,
            stall_window: c.solver.stall_window,
            witness_count: c.witness_count,
            seed: c.seed,
            use_rank_one: c.use_rank_one,
            diagonal_only: c.scope == ConstraintScope::DiagonalOnly,
        }
    }
}

impl DgConfig {
    fn to_decide(self) -> DecideConfig {
        let mut c = DecideConfig {
            witness_count: self.witness_count,
            seed: self.seed,
            use_rank_one: self.use_rank_one,
            scope: if self.diagonal_only { ConstraintScope::DiagonalOnly } else { ConstraintScope::Full },
            ..DecideConfig::default()
        };
        c.solver.max_iter = self.max_iter;
        c.solver.feas_tol = self.feas_tol;
        c.solver.psd_tol = self.psd_tol;
        c.solver.stall_window = self.stall_window;
        c
    }
}

/// Opaque tripartite state.
pub struct DgState(TripartiteState);

/// Opaque channel.
pub struct DgChannel(QuantumChannel);

/// Opaque result of a one-direction decision.
pub struct DgOutcome(FeasibilityOutcome);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn code_of(e: &Error) -> DgStatus {
    match e {
        Error::Parse(_) => DgStatus::Parse,
        Error::Dimension(_) => DgStatus::Dimension,
        Error::NotTracePreserving(_) => DgStatus::NotTracePreserving,
        Error::NonFinite(_) | Error::InvalidParameter(_) | Error::Config(_) | Error::NotHermitian(_) => DgStatus::InvalidArgument,
        Error::Decomposition(_) | Error::NotPsd(_) => DgStatus::Numerical,
        Error::Io(_) => DgStatus::Io,
    }
}

struct Failure(DgStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(code_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(DgStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> DgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DgStatus::Ok,
        Ok(Err(Failure(code, msg))) => {
            set_error(&msg);
            code
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("internal panic: {msg}"));
            DgStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(DgStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

fn give_string(s: String, out: &mut *mut c_char) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| Failure(DgStatus::InvalidArgument, "string contains a nul byte".into()))?;
    *out = c.into_raw();
    Ok(())
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

fn direction(d: DgDirection) -> Direction {
    match d {
        DgDirection::EveToBob => Direction::EveToBob,
        DgDirection::BobToEve => Direction::BobToEve,
    }
}

/// Message of the last failed call on this thread, or null if none. Valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn dg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn dg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dg_config_default(out: *mut DgConfig) -> DgStatus {
    guard(|| {
        *out_ptr(out, "out")? = DgConfig::from(&DecideConfig::default());
        Ok(())
    })
}

/// State on `C^n ⊗ C^p ⊗ C^q` from `2·n·p·q` doubles: interleaved real and
/// imaginary parts in lexicographic `(i, j, k)` order.
///
/// # Safety
/// `amplitudes` must point to `2·n·p·q` readable doubles; `out` must be
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dg_state_new(
    n: usize,
    p: usize,
    q: usize,
    amplitudes: *const f64,
    out: *mut *mut DgState,
) -> DgStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        if amplitudes.is_null() {
            return Err(null("amplitudes"));
        }
        let len = n
            .checked_mul(p)
            .and_then(|x| x.checked_mul(q))
            .and_then(|x| x.checked_mul(2))
            .ok_or_else(|| Failure(DgStatus::Dimension, "dimensions overflow".into()))?;
        let raw = std::slice::from_raw_parts(amplitudes, len);
        let amps = raw.chunks_exact(2).map(|z| c(z[0], z[1])).collect();
        *out = boxed(DgState(TripartiteState::new((n, p, q), amps)?));
        Ok(())
    })
}

/// # Safety
/// `json` must be a nul-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dg_state_from_json(json: *const c_char, out: *mut *mut DgState) -> DgStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = boxed(DgState(io::parse_state(read_str(json, "json")?)?));
        Ok(())
    })
}

/// # Safety
/// `state` must be a live handle; `out` must be valid for writes. Release
/// the result with [`dg_string_free`].
#[no_mangle]
pub unsafe extern "C" fn dg_state_to_json(state: *const DgState, out: *mut *mut c_char) -> DgStatus {
    guard(|| {
        let s = deref(state, "state")?;
        give_string(io::state_to_json(&s.0), out_ptr(out, "out")?)
    })
}

/// # Safety
/// `state` must be a live handle; the outputs must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dg_state_dims(state: *const DgState, n: *mut usize, p: *mut usize, q: *mut usize) -> DgStatus {
    guard(|| {
        let (a, b, c) = deref(state, "state")?.0.dims();
        *out_ptr(n, "n")? = a;
        *out_ptr(p, "p")? = b;
        *out_ptr(q, "q")? = c;
        Ok(())
    })
}

/// # Safety
/// `state` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dg_state_free(state: *mut DgState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// # Safety
/// `json` must be a nul-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dg_channel_from_json(json: *const c_char, out: *mut *mut DgChannel) -> DgStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = boxed(DgChannel(io::parse_channel(read_str(json, "json")?)?));
        Ok(())
    })
}

/// Qubit depolarizing channel, `0 ≤ epsilon ≤ 3/4`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dg_channel_depolarizing(epsilon: f64, out: *mut *mut DgChannel) -> DgStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = boxed(DgChannel(channel::depolarizing(epsilon)?));
        Ok(())
    })
}

/// Qubit amplitude damping, `0 ≤ gamma ≤ 1`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dg_channel_amplitude_damping(gamma: f64, out: *mut *mut DgChannel) -> DgStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = boxed(DgChannel(channel::amplitude_damping(gamma)?));
        Ok(())
    })
}

/// Maximally entangled lift `(I ⊗ V)Σ|ii⟩` of the channel (unnormalized).
///
/// # Safety
/// `ch` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dg_channel_lift(ch: *const DgChannel, out: *mut *mut DgState) -> DgStatus {
    guard(|| {
        let ch = deref(ch, "channel")?;
        *out_ptr(out, "out")? = boxed(DgState(channel::lift_max_entangled(&ch.0)));
        Ok(())
    })
}

/// Decide the lift in both directions. `config` may be null for defaults.
/// With `report_json` non-null, the full report is written there as JSON.
///
/// # Safety
/// `ch` must be a live handle; `verdict` must be valid for writes;
/// `config` and `report_json` may be null.
#[no_mangle]
pub unsafe extern "C" fn dg_channel_test(
    ch: *const DgChannel,
    config: *const DgConfig,
    verdict: *mut DgChannelVerdict,
    report_json: *mut *mut c_char,
) -> DgStatus {
    guard(|| {
        let ch = deref(ch, "channel")?;
        let verdict = out_ptr(verdict, "verdict")?;
        let config = config_of(config)?;
        let report = channel::channel_degradability_test(&ch.0, &config)?;
        *verdict = match report.verdict {
            ChannelVerdict::AntiDegradableCertified => DgChannelVerdict::AntiDegradableCertified,
            ChannelVerdict::DegradableCertified => DgChannelVerdict::DegradableCertified,
            ChannelVerdict::BothCertified => DgChannelVerdict::BothCertified,
            ChannelVerdict::RuledOutForFilteredInputs => DgChannelVerdict::RuledOutForFilteredInputs,
            ChannelVerdict::Inconclusive => DgChannelVerdict::Inconclusive,
        };
        if let Some(out) = report_json.as_mut() {
            give_string(serde_json::to_string_pretty(&report).expect("report serializes"), out)?;
        }
        Ok(())
    })
}

/// # Safety
/// `ch` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dg_channel_free(ch: *mut DgChannel) {
    if !ch.is_null() {
        drop(Box::from_raw(ch));
    }
}

unsafe fn config_of(config: *const DgConfig) -> Result<DecideConfig, Failure> {
    let c = match config.as_ref() {
        Some(c) => c.to_decide(),
        None => DecideConfig::default(),
    };
    c.validate()?;
    Ok(c)
}

/// Decide whether a channel on one share reproduces the other.
///
/// # Safety
/// `state` must be a live handle; `config` may be null; `out` must be valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn dg_decide(
    state: *const DgState,
    dir: DgDirection,
    config: *const DgConfig,
    out: *mut *mut DgOutcome,
) -> DgStatus {
    guard(|| {
        let s = deref(state, "state")?;
        let out = out_ptr(out, "out")?;
        let config = config_of(config)?;
        *out = boxed(DgOutcome(degradable::decide(&s.0, direction(dir), &config)?));
        Ok(())
    })
}

/// # Safety
/// `o` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dg_outcome_verdict(o: *const DgOutcome, out: *mut DgVerdict) -> DgStatus {
    guard(|| {
        *out_ptr(out, "out")? = match deref(o, "outcome")?.0.status {
            Status::Feasible => DgVerdict::Feasible,
            Status::RuledOut => DgVerdict::RuledOut,
            Status::Inconclusive => DgVerdict::Inconclusive,
        };
        Ok(())
    })
}

/// # Safety
/// `o` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dg_outcome_stage(o: *const DgOutcome, out: *mut DgStage) -> DgStatus {
    guard(|| {
        *out_ptr(out, "out")? = match deref(o, "outcome")?.0.stage {
            Stage::Filter => DgStage::Filter,
            Stage::RankOne => DgStage::RankOne,
            Stage::Constraints => DgStage::Constraints,
            Stage::Sdp => DgStage::Sdp,
        };
        Ok(())
    })
}

/// Residual of the certificate on the normalized state; NaN when the
/// outcome carries no certificate.
///
/// # Safety
/// `o` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dg_outcome_residual(o: *const DgOutcome, out: *mut f64) -> DgStatus {
    guard(|| {
        *out_ptr(out, "out")? = deref(o, "outcome")?.0.verification_residual.unwrap_or(f64::NAN);
        Ok(())
    })
}

/// Number of Kraus operators in the certificate and their shape
/// (`rows × cols`); all zero without a certificate.
///
/// # Safety
/// `o` must be a live handle; the outputs must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn dg_outcome_kraus_shape(
    o: *const DgOutcome,
    count: *mut usize,
    rows: *mut usize,
    cols: *mut usize,
) -> DgStatus {
    guard(|| {
        let (k, r, c) = match &deref(o, "outcome")?.0.certificate {
            Some(k) => (k.len(), k.out_dim(), k.in_dim()),
            None => (0, 0, 0),
        };
        *out_ptr(count, "count")? = k;
        *out_ptr(rows, "rows")? = r;
        *out_ptr(cols, "cols")? = c;
        Ok(())
    })
}

/// Copy Kraus operator `index` into `buf` as `2·rows·cols` doubles,
/// row-major with interleaved real and imaginary parts.
///
/// # Safety
/// `o` must be a live handle; `buf` must be writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn dg_outcome_kraus(o: *const DgOutcome, index: usize, buf: *mut f64, len: usize) -> DgStatus {
    guard(|| {
        let cert = deref(o, "outcome")?
            .0
            .certificate
            .as_ref()
            .ok_or_else(|| Failure(DgStatus::OutOfRange, "outcome has no certificate".into()))?;
        let op = cert
            .ops()
            .get(index)
            .ok_or_else(|| Failure(DgStatus::OutOfRange, format!("Kraus index {index} of {}", cert.len())))?;
        let need = 2 * op.len();
        if buf.is_null() {
            return Err(null("buf"));
        }
        if len < need {
            return Err(Failure(DgStatus::OutOfRange, format!("buffer holds {len} doubles, need {need}")));
        }
        let dst = std::slice::from_raw_parts_mut(buf, need);
        let cols = op.ncols();
        for r in 0..op.nrows() {
            for col in 0..cols {
                let z = op[(r, col)];
                dst[2 * (r * cols + col)] = z.re;
                dst[2 * (r * cols + col) + 1] = z.im;
            }
        }
        Ok(())
    })
}

/// # Safety
/// `o` must be a live handle; `out` must be valid for writes. Release the
/// result with [`dg_string_free`].
#[no_mangle]
pub unsafe extern "C" fn dg_outcome_to_json(o: *const DgOutcome, out: *mut *mut c_char) -> DgStatus {
    guard(|| {
        let o = deref(o, "outcome")?;
        give_string(serde_json::to_string_pretty(&o.0).expect("outcome serializes"), out_ptr(out, "out")?)
    })
}

/// # Safety
/// `o` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dg_outcome_free(o: *mut DgOutcome) {
    if !o.is_null() {
        drop(Box::from_raw(o));
    }
}
