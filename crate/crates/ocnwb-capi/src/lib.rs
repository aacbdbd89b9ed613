//! C ABI over the one-counter net workbench: parse and emit nets in the
//! text format, run the weak-simulation check, and materialize the
//! weak-to-strong reduction from C or anything else that can speak a C ABI.
//!
//! Conventions, enforced here rather than assumed:
//!
//! - Nets and verdicts cross the boundary as opaque handles allocated by
//!   this library and released with the matching `*_free` function.
//! - Every fallible call returns an [`OcnwbStatus`]; results travel through
//!   out-pointers, which are written only when the status is `Ok`.
//! - Strings handed to the caller are NUL-terminated, owned by the caller,
//!   and released with [`ocnwb_string_free`].
//! - After any non-`Ok` status, [`ocnwb_last_error_message`] returns a
//!   human-readable description of the most recent failure on the calling
//!   thread.
//! - Panics never unwind across the boundary; they surface as
//!   [`OcnwbStatus::Internal`].
//!
//! The C header is generated into `include/ocnwb.h` when this crate builds.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use ocnwb::format::{emit_net, parse_net};
use ocnwb::games::check::weak_sim_check;
use ocnwb::games::Verdict;
use ocnwb::nets::{Configuration, Net};
use ocnwb::reduction::weak_to_strong;

/// Result of every fallible call in this ABI.
#[repr(C)]
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum OcnwbStatus {
    /// The call succeeded and all out-pointers were written.
    Ok = 0,
    /// A required pointer argument was NULL.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The net text did not parse; the message names the offending line.
    ParseFailed = 3,
    /// Inputs violate a precondition of the requested operation
    /// (wrong net kind, reserved `@` names, non-unit counter effects, a
    /// label the construction reserves, or a counter outside the net).
    Precondition = 4,
    /// A state name does not occur in its net.
    UnknownState = 5,
    /// A defect inside the library; the operation did not complete.
    Internal = 6,
}

/// Discriminant of an [`OcnwbVerdict`].
#[repr(C)]
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum OcnwbVerdictKind {
    /// Simulation certified up to the counter cap recorded in the verdict.
    Simulates = 0,
    /// Simulation refuted, with the least refutation rank found.
    NotSimulates = 1,
    /// Budgets exhausted without a proof either way.
    Unknown = 2,
}

/// Opaque handle to a parsed net. Allocate with [`ocnwb_net_parse`],
/// release with [`ocnwb_net_free`].
pub struct OcnwbNet {
    inner: Net,
}

/// Opaque handle to a simulation verdict. Produced by
/// [`ocnwb_check_weak_sim`], released with [`ocnwb_verdict_free`].
pub struct OcnwbVerdict {
    inner: Verdict,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn fail(status: OcnwbStatus, msg: impl std::fmt::Display) -> OcnwbStatus {
    let text = msg.to_string().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(text).ok();
    });
    status
}

/// Wraps every entry point so a panic becomes a status instead of
/// unwinding into the caller's frames. The closures only touch pointers
/// the caller handed us, so suppressing the unwind-safety check is fine:
/// nothing observable is left half-mutated when we bail.
fn guard(f: impl FnOnce() -> OcnwbStatus) -> OcnwbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(OcnwbStatus::Internal, "internal panic"),
    }
}

/// # Safety
/// `p` must be NULL or a NUL-terminated string valid for reads.
unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, OcnwbStatus> {
    if p.is_null() {
        return Err(fail(OcnwbStatus::NullArgument, format!("{what} is NULL")));
    }
    // SAFETY: non-null and NUL-terminated per this function's contract.
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| fail(OcnwbStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn export_string(s: String) -> Result<*mut c_char, OcnwbStatus> {
    CString::new(s.replace('\0', " "))
        .map(CString::into_raw)
        .map_err(|_| fail(OcnwbStatus::Internal, "interior NUL in output string"))
}

fn configuration(net: &Net, state: &str, counter: u64) -> Result<Configuration, OcnwbStatus> {
    match net.state_id(state) {
        Some(id) => Ok(Configuration::new(id, counter)),
        None => Err(fail(
            OcnwbStatus::UnknownState,
            format!("state `{state}` does not occur in net `{}`", net.name),
        )),
    }
}

/// Version of the library, as a static NUL-terminated string. Never NULL;
/// do not free.
#[no_mangle]
pub extern "C" fn ocnwb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Most recent failure message on this thread, or NULL if no call has
/// failed yet. The returned copy is owned by the caller.
///
/// # Safety
/// The returned pointer must be released with [`ocnwb_string_free`].
#[no_mangle]
pub unsafe extern "C" fn ocnwb_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(msg) => msg.clone().into_raw(),
        None => std::ptr::null_mut(),
    })
}

/// Releases a string returned by this library. NULL is a no-op.
///
/// # Safety
/// `s` must be NULL or a pointer obtained from this library's out-pointers
/// or [`ocnwb_last_error_message`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ocnwb_string_free(s: *mut c_char) {
    if s.is_null() {
        return;
    }
    // SAFETY: `s` came from CString::into_raw per this function's contract.
    unsafe {
        let _ = CString::from_raw(s);
    }
}

/// Parses net text into a handle. On success writes a new net to `*out`.
///
/// # Safety
/// `text` must be a NUL-terminated string valid for reads; `out` must be
/// valid for a write. The net must later be released with
/// [`ocnwb_net_free`].
#[no_mangle]
pub unsafe extern "C" fn ocnwb_net_parse(
    text: *const c_char,
    out: *mut *mut OcnwbNet,
) -> OcnwbStatus {
    guard(|| {
        if out.is_null() {
            return fail(OcnwbStatus::NullArgument, "out pointer is NULL");
        }
        let text = match unsafe { read_str(text, "net text") } {
            Ok(t) => t,
            Err(status) => return status,
        };
        match parse_net(text) {
            Ok(net) => {
                let handle = Box::into_raw(Box::new(OcnwbNet { inner: net }));
                // SAFETY: `out` is non-null and valid for a write.
                unsafe { out.write(handle) };
                OcnwbStatus::Ok
            }
            Err(e) => fail(OcnwbStatus::ParseFailed, e),
        }
    })
}

/// Releases a net handle. NULL is a no-op.
///
/// # Safety
/// `net` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ocnwb_net_free(net: *mut OcnwbNet) {
    if net.is_null() {
        return;
    }
    // SAFETY: `net` came from Box::into_raw per this function's contract.
    unsafe {
        let _ = Box::from_raw(net);
    }
}

/// Renders a net back into the text format. The output parses to a net
/// that is structurally equal to the input.
///
/// # Safety
/// `net` must be a live handle from this library; `out` must be valid for
/// a write. The string must be released with [`ocnwb_string_free`].
#[no_mangle]
pub unsafe extern "C" fn ocnwb_net_emit(
    net: *const OcnwbNet,
    out: *mut *mut c_char,
) -> OcnwbStatus {
    guard(|| {
        if net.is_null() || out.is_null() {
            return fail(OcnwbStatus::NullArgument, "net or out pointer is NULL");
        }
        // SAFETY: `net` is a live handle per this function's contract.
        let net = unsafe { &(*net).inner };
        match export_string(emit_net(net, &[])) {
            Ok(s) => {
                // SAFETY: `out` is non-null and valid for a write.
                unsafe { out.write(s) };
                OcnwbStatus::Ok
            }
            Err(status) => status,
        }
    })
}

/// Number of states in a net.
///
/// # Safety
/// `net` must be a live handle from this library; `out` must be valid for
/// a write.
#[no_mangle]
pub unsafe extern "C" fn ocnwb_net_state_count(
    net: *const OcnwbNet,
    out: *mut usize,
) -> OcnwbStatus {
    guard(|| {
        if net.is_null() || out.is_null() {
            return fail(OcnwbStatus::NullArgument, "net or out pointer is NULL");
        }
        // SAFETY: both pointers are non-null per this function's contract.
        unsafe { out.write((*net).inner.states().len()) };
        OcnwbStatus::Ok
    })
}

/// Decides weak simulation between two configurations of one-counter
/// nets: does `n_state:n_counter` of `n` weakly simulate
/// `m_state:m_counter` of `m`? `alpha_max` bounds the refutation levels
/// tried and `cap` bounds the counters of the certified relation, so
/// `Unknown` verdicts are possible; `Simulates` and `NotSimulates` are
/// conclusive.
///
/// # Safety
/// `m` and `n` must be live handles from this library; `m_state` and
/// `n_state` must be NUL-terminated strings valid for reads; `out` must be
/// valid for a write. The verdict must be released with
/// [`ocnwb_verdict_free`].
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn ocnwb_check_weak_sim(
    m: *const OcnwbNet,
    m_state: *const c_char,
    m_counter: u64,
    n: *const OcnwbNet,
    n_state: *const c_char,
    n_counter: u64,
    alpha_max: u32,
    cap: u64,
    out: *mut *mut OcnwbVerdict,
) -> OcnwbStatus {
    guard(|| {
        if m.is_null() || n.is_null() || out.is_null() {
            return fail(OcnwbStatus::NullArgument, "net or out pointer is NULL");
        }
        // SAFETY: `m` and `n` are live handles per this function's contract.
        let (m, n) = unsafe { (&(*m).inner, &(*n).inner) };
        let (m_state, n_state) = match unsafe {
            read_str(m_state, "m_state").and_then(|a| Ok((a, read_str(n_state, "n_state")?)))
        } {
            Ok(pair) => pair,
            Err(status) => return status,
        };
        let pm = match configuration(m, m_state, m_counter) {
            Ok(c) => c,
            Err(status) => return status,
        };
        let qn = match configuration(n, n_state, n_counter) {
            Ok(c) => c,
            Err(status) => return status,
        };
        match weak_sim_check(m, pm, n, qn, alpha_max, cap) {
            Ok(verdict) => {
                let handle = Box::into_raw(Box::new(OcnwbVerdict { inner: verdict }));
                // SAFETY: `out` is non-null and valid for a write.
                unsafe { out.write(handle) };
                OcnwbStatus::Ok
            }
            Err(e) => fail(OcnwbStatus::Precondition, e),
        }
    })
}

/// Discriminant of a verdict.
///
/// # Safety
/// `verdict` must be a live handle from this library; `out` must be valid
/// for a write.
#[no_mangle]
pub unsafe extern "C" fn ocnwb_verdict_kind(
    verdict: *const OcnwbVerdict,
    out: *mut OcnwbVerdictKind,
) -> OcnwbStatus {
    guard(|| {
        if verdict.is_null() || out.is_null() {
            return fail(OcnwbStatus::NullArgument, "verdict or out pointer is NULL");
        }
        // SAFETY: `verdict` is a live handle per this function's contract.
        let kind = match unsafe { &(*verdict).inner } {
            Verdict::Simulates { .. } => OcnwbVerdictKind::Simulates,
            Verdict::NotSimulates { .. } => OcnwbVerdictKind::NotSimulates,
            Verdict::Unknown { .. } => OcnwbVerdictKind::Unknown,
        };
        // SAFETY: `out` is non-null and valid for a write.
        unsafe { out.write(kind) };
        OcnwbStatus::Ok
    })
}

/// Stable one-line machine rendering of a verdict, e.g.
/// `VERDICT not-simulates rank=w*1+2`.
///
/// # Safety
/// `verdict` must be a live handle from this library; `out` must be valid
/// for a write. The string must be released with [`ocnwb_string_free`].
#[no_mangle]
pub unsafe extern "C" fn ocnwb_verdict_render(
    verdict: *const OcnwbVerdict,
    out: *mut *mut c_char,
) -> OcnwbStatus {
    guard(|| {
        if verdict.is_null() || out.is_null() {
            return fail(OcnwbStatus::NullArgument, "verdict or out pointer is NULL");
        }
        // SAFETY: `verdict` is a live handle per this function's contract.
        let line = unsafe { &(*verdict).inner }.render_machine();
        match export_string(line) {
            Ok(s) => {
                // SAFETY: `out` is non-null and valid for a write.
                unsafe { out.write(s) };
                OcnwbStatus::Ok
            }
            Err(status) => status,
        }
    })
}

/// Releases a verdict handle. NULL is a no-op.
///
/// # Safety
/// `verdict` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ocnwb_verdict_free(verdict: *mut OcnwbVerdict) {
    if verdict.is_null() {
        return;
    }
    // SAFETY: `verdict` came from Box::into_raw per this function's contract.
    unsafe {
        let _ = Box::from_raw(verdict);
    }
}

/// Reduces a weak-simulation problem on the pair `(m, n)` to a strong
/// one: writes a Spoiler net and a Duplicator ω-net whose strong
/// simulation game, restricted to original states, matches the weak game
/// on the inputs round for round. `out_k` (optional, may be NULL)
/// receives the round-stretching factor: one original move becomes `1 + k`
/// moves in the reduced nets.
///
/// Both inputs must be plain one-counter nets with unit counter effects
/// and without `@` in state names.
///
/// # Safety
/// `m` and `n` must be live handles from this library; `out_spoiler` and
/// `out_dup` must be valid for writes; `out_k` must be NULL or valid for a
/// write. Both output nets must be released with [`ocnwb_net_free`].
#[no_mangle]
pub unsafe extern "C" fn ocnwb_reduce(
    m: *const OcnwbNet,
    n: *const OcnwbNet,
    out_spoiler: *mut *mut OcnwbNet,
    out_dup: *mut *mut OcnwbNet,
    out_k: *mut u64,
) -> OcnwbStatus {
    guard(|| {
        if m.is_null() || n.is_null() || out_spoiler.is_null() || out_dup.is_null() {
            return fail(OcnwbStatus::NullArgument, "net or out pointer is NULL");
        }
        // SAFETY: `m` and `n` are live handles per this function's contract.
        let (m, n) = unsafe { (&(*m).inner, &(*n).inner) };
        match weak_to_strong(m, n) {
            Ok(red) => {
                let spoiler = Box::into_raw(Box::new(OcnwbNet { inner: red.spoiler }));
                let dup = Box::into_raw(Box::new(OcnwbNet { inner: red.dup }));
                // SAFETY: the out-pointers are non-null and valid for
                // writes; `out_k` is checked before writing.
                unsafe {
                    out_spoiler.write(spoiler);
                    out_dup.write(dup);
                    if !out_k.is_null() {
                        out_k.write(red.k);
                    }
                }
                OcnwbStatus::Ok
            }
            Err(e) => fail(OcnwbStatus::Precondition, e),
        }
    })
}
