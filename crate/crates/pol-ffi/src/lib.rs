//! C ABI over the pol workbench.
//!
//! Scenarios and parallel states are opaque handles created and destroyed
//! by this library; every fallible call returns a [`PolStatus`] and leaves
//! a thread-local message retrievable with [`pol_last_error_message`].
//! Strings handed out (traces, schedules, world lists) are NUL-terminated,
//! owned by the caller, and must be released with [`pol_string_free`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use libc::c_char;

use pol::cli::{self, Semantics, Trace};
use pol::muddy::SessionId;
use pol::parallel::{run_schedule, search_min_schedule, ParallelState, Scenario, Schedule};

/// Outcome of a call. Anything but `Ok` leaves a detail message in
/// [`pol_last_error_message`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Scenario, schedule, or formula text failed to parse.
    ParseError = 3,
    /// The named session does not exist.
    UnknownSession = 4,
    /// The addressed session has already been answered.
    AlreadyResolved = 5,
    /// A search or evaluation bound was exhausted.
    BoundExceeded = 6,
    /// Formula evaluation failed (unknown atom or agent, say).
    EvalError = 7,
    /// Any other run failure.
    RunError = 8,
    /// The library caught a panic; state may be stale but is not corrupt.
    InternalError = 9,
}

/// Box-semantics selector for [`pol_eval`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolSemantics {
    Residuation = 0,
    Existential = 1,
    Protocol = 2,
}

impl From<PolSemantics> for Semantics {
    fn from(value: PolSemantics) -> Self {
        match value {
            PolSemantics::Residuation => Semantics::Residuation,
            PolSemantics::Existential => Semantics::Existential,
            PolSemantics::Protocol => Semantics::Protocol,
        }
    }
}

/// Opaque scenario handle.
pub struct PolScenario(Scenario);

/// Opaque parallel-state handle; owns its scenario reference data.
pub struct PolParallel {
    scenario: Scenario,
    state: ParallelState,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn fail(status: PolStatus, message: &str) -> PolStatus {
    set_error(message);
    status
}

/// Detail text for the most recent failure on this thread. The pointer is
/// owned by the library and valid until the next failing call.
#[no_mangle]
pub extern "C" fn pol_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must have been returned by a `pol_*` function and not freed yet.
#[no_mangle]
pub unsafe extern "C" fn pol_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, PolStatus> {
    if ptr.is_null() {
        return Err(fail(PolStatus::NullPointer, "NULL string argument"));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| fail(PolStatus::InvalidUtf8, "string argument is not UTF-8"))
}

fn give_string(text: String, out: *mut *mut c_char) -> PolStatus {
    match CString::new(text) {
        Ok(s) => {
            unsafe { *out = s.into_raw() };
            PolStatus::Ok
        }
        Err(_) => fail(PolStatus::InternalError, "output contained a NUL byte"),
    }
}

fn guarded(body: impl FnOnce() -> PolStatus) -> PolStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(PolStatus::InternalError, "caught a panic at the FFI boundary"),
    }
}

/// Parses the line-oriented scenario format into a new handle.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pol_scenario_parse(
    text: *const c_char,
    out: *mut *mut PolScenario,
) -> PolStatus {
    scenario_parse_with(text, out, cli::parse_scenario)
}

/// Parses the JSON scenario form into a new handle.
///
/// # Safety
/// As [`pol_scenario_parse`].
#[no_mangle]
pub unsafe extern "C" fn pol_scenario_parse_json(
    text: *const c_char,
    out: *mut *mut PolScenario,
) -> PolStatus {
    scenario_parse_with(text, out, cli::parse_scenario_json)
}

unsafe fn scenario_parse_with(
    text: *const c_char,
    out: *mut *mut PolScenario,
    parse: fn(&str) -> Result<Scenario, cli::ScenarioError>,
) -> PolStatus {
    if out.is_null() {
        return fail(PolStatus::NullPointer, "NULL output pointer");
    }
    let text = match read_str(text) {
        Ok(t) => t,
        Err(status) => return status,
    };
    guarded(|| match parse(text) {
        Ok(scenario) => {
            *out = Box::into_raw(Box::new(PolScenario(scenario)));
            PolStatus::Ok
        }
        Err(e) => fail(PolStatus::ParseError, &e.to_string()),
    })
}

/// # Safety
/// `scenario` must come from a `pol_scenario_parse*` call, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pol_scenario_free(scenario: *mut PolScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Builds a fresh parallel state over the scenario.
///
/// # Safety
/// `scenario` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pol_parallel_new(
    scenario: *const PolScenario,
    out: *mut *mut PolParallel,
) -> PolStatus {
    if scenario.is_null() || out.is_null() {
        return fail(PolStatus::NullPointer, "NULL argument");
    }
    let scenario = &(*scenario).0;
    guarded(|| match ParallelState::new(scenario) {
        Ok(state) => {
            *out = Box::into_raw(Box::new(PolParallel { scenario: scenario.clone(), state }));
            PolStatus::Ok
        }
        Err(e) => fail(PolStatus::RunError, &e.to_string()),
    })
}

/// # Safety
/// `parallel` must come from [`pol_parallel_new`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pol_parallel_free(parallel: *mut PolParallel) {
    if !parallel.is_null() {
        drop(Box::from_raw(parallel));
    }
}

/// Applies one father's question in the named session (with propagation),
/// updating the handle in place.
///
/// # Safety
/// `parallel` must be a live handle; `session` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn pol_parallel_ask(
    parallel: *mut PolParallel,
    session: *const c_char,
) -> PolStatus {
    if parallel.is_null() {
        return fail(PolStatus::NullPointer, "NULL parallel handle");
    }
    let session = match read_str(session) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let handle = &mut *parallel;
    guarded(|| match handle.state.apply_action(&SessionId::new(session)) {
        Ok(next) => {
            handle.state = next;
            PolStatus::Ok
        }
        Err(e) => {
            let status = match &e {
                pol::parallel::ParallelError::UnknownSession(_) => PolStatus::UnknownSession,
                pol::parallel::ParallelError::Session(
                    pol::muddy::MuddyError::AlreadyResolved(_),
                ) => PolStatus::AlreadyResolved,
                _ => PolStatus::RunError,
            };
            fail(status, &e.to_string())
        }
    })
}

/// Total questions asked so far.
///
/// # Safety
/// `parallel` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pol_parallel_total_asked(parallel: *const PolParallel) -> usize {
    if parallel.is_null() {
        return 0;
    }
    (*parallel).state.total_asked()
}

/// Has every father heard an answer?
///
/// # Safety
/// `parallel` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pol_parallel_all_answered(parallel: *const PolParallel) -> bool {
    !parallel.is_null() && (*parallel).state.all_answered()
}

/// Does every child of every session know their own state?
///
/// # Safety
/// `parallel` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pol_parallel_all_resolved(parallel: *const PolParallel) -> bool {
    !parallel.is_null() && (*parallel).state.all_resolved()
}

/// Comma-separated bit-string worlds of one session, in agent order.
///
/// # Safety
/// `parallel` live handle, `session` NUL-terminated, `out` valid; the
/// result string must be freed with [`pol_string_free`].
#[no_mangle]
pub unsafe extern "C" fn pol_parallel_session_worlds(
    parallel: *const PolParallel,
    session: *const c_char,
    out: *mut *mut c_char,
) -> PolStatus {
    if parallel.is_null() || out.is_null() {
        return fail(PolStatus::NullPointer, "NULL argument");
    }
    let session = match read_str(session) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let handle = &*parallel;
    guarded(|| match handle.state.session(&SessionId::new(session)) {
        Ok(state) => {
            let worlds: Vec<String> = state.worlds().iter().map(|w| w.to_string()).collect();
            give_string(worlds.join(","), out)
        }
        Err(e) => fail(PolStatus::UnknownSession, &e.to_string()),
    })
}

/// The JSON trace of everything the handle has done so far.
///
/// # Safety
/// As [`pol_parallel_session_worlds`].
#[no_mangle]
pub unsafe extern "C" fn pol_parallel_trace_json(
    parallel: *const PolParallel,
    out: *mut *mut c_char,
) -> PolStatus {
    if parallel.is_null() || out.is_null() {
        return fail(PolStatus::NullPointer, "NULL argument");
    }
    let handle = &*parallel;
    guarded(|| give_string(Trace::from_run(&handle.scenario, &handle.state).to_json(), out))
}

/// Runs a comma-separated schedule from a fresh state and returns the JSON
/// trace. Fails without output if the schedule is invalid.
///
/// # Safety
/// `scenario` live handle; `schedule` NUL-terminated; `out` valid; result
/// freed with [`pol_string_free`].
#[no_mangle]
pub unsafe extern "C" fn pol_run_schedule_json(
    scenario: *const PolScenario,
    schedule: *const c_char,
    out: *mut *mut c_char,
) -> PolStatus {
    if scenario.is_null() || out.is_null() {
        return fail(PolStatus::NullPointer, "NULL argument");
    }
    let schedule = match read_str(schedule) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let scenario = &(*scenario).0;
    guarded(|| match run_schedule(scenario, &Schedule::parse(schedule)) {
        Ok(state) => give_string(Trace::from_run(scenario, &state).to_json(), out),
        Err(e) => {
            let status = match &e {
                pol::parallel::ParallelError::UnknownSession(_) => PolStatus::UnknownSession,
                pol::parallel::ParallelError::Session(
                    pol::muddy::MuddyError::AlreadyResolved(_),
                ) => PolStatus::AlreadyResolved,
                _ => PolStatus::RunError,
            };
            fail(status, &e.to_string())
        }
    })
}

/// Finds a minimal schedule answering every session within `bound` total
/// questions; writes the question count and the comma-separated schedule.
///
/// # Safety
/// `scenario` live handle; `out_min` and `out_schedule` valid pointers;
/// the schedule string is freed with [`pol_string_free`].
#[no_mangle]
pub unsafe extern "C" fn pol_search_min(
    scenario: *const PolScenario,
    bound: usize,
    out_min: *mut usize,
    out_schedule: *mut *mut c_char,
) -> PolStatus {
    if scenario.is_null() || out_min.is_null() || out_schedule.is_null() {
        return fail(PolStatus::NullPointer, "NULL argument");
    }
    let scenario = &(*scenario).0;
    guarded(|| match search_min_schedule(scenario, bound) {
        Ok((min, schedule)) => {
            *out_min = min;
            give_string(schedule.to_string(), out_schedule)
        }
        Err(e @ pol::parallel::ParallelError::BoundExceeded { .. }) => {
            fail(PolStatus::BoundExceeded, &e.to_string())
        }
        Err(e) => fail(PolStatus::RunError, &e.to_string()),
    })
}

/// Evaluates a formula on a fresh model of the named session, at every
/// world, under the chosen box semantics.
///
/// # Safety
/// `scenario` live handle; `session` and `formula` NUL-terminated;
/// `out_value` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pol_eval(
    scenario: *const PolScenario,
    session: *const c_char,
    formula: *const c_char,
    semantics: PolSemantics,
    out_value: *mut bool,
) -> PolStatus {
    if scenario.is_null() || out_value.is_null() {
        return fail(PolStatus::NullPointer, "NULL argument");
    }
    let session = match read_str(session) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let formula = match read_str(formula) {
        Ok(f) => f,
        Err(status) => return status,
    };
    let scenario = &(*scenario).0;
    guarded(|| {
        let mut buffer = Vec::new();
        let code = cli::cmd_eval(
            scenario,
            &SessionId::new(session),
            formula,
            Semantics::from(semantics),
            &mut buffer,
        );
        let text = String::from_utf8_lossy(&buffer).trim().to_string();
        if code == cli::exit::OK {
            *out_value = text == "true";
            PolStatus::Ok
        } else if text.contains("unknown session") {
            fail(PolStatus::UnknownSession, &text)
        } else if text.contains("syntax error") || text.contains("unknown symbol") {
            fail(PolStatus::ParseError, &text)
        } else {
            fail(PolStatus::EvalError, &text)
        }
    })
}
