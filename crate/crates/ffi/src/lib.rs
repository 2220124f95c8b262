//! C ABI for `bqlab`.
//!
//! Oracles are opaque heap handles created by `bq_oracle_*` constructors and
//! released with `bq_oracle_free`. Every fallible call returns a
//! [`BqStatus`]; on failure, `bq_last_error_message` describes the error on
//! the calling thread until the next failing call.
//!
//! Strings handed out by this library are freed with `bq_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use bqlab::cli::{self, parse_spec};
use bqlab::oracles::{table_oracle, CountedOracle};
use bqlab::quantum::{self, Run};
use bqlab::statevec::set_qubit_budget;
use bqlab::{Bits, Error};

/// Opaque counted oracle.
pub struct BqOracle {
    inner: CountedOracle,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Capacity = 4,
    Contract = 5,
    UnknownRegister = 6,
    Exactness = 7,
    Garbage = 8,
    Adaptivity = 9,
    Io = 10,
    Panic = 11,
}

/// Outcome of one algorithm run. `value` holds `width` bits, most
/// significant first.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BqRun {
    pub value: u64,
    pub width: u32,
    pub queries: u64,
    pub probability: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> BqStatus {
    match e {
        Error::Capacity(_) => BqStatus::Capacity,
        Error::UnknownRegister(_) => BqStatus::UnknownRegister,
        Error::Contract(_) => BqStatus::Contract,
        Error::Exactness { .. } => BqStatus::Exactness,
        Error::Garbage { .. } => BqStatus::Garbage,
        Error::Adaptivity { .. } => BqStatus::Adaptivity,
        Error::Parse { .. } => BqStatus::Parse,
        Error::Io(_) => BqStatus::Io,
    }
}

struct Failure(BqStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

/// Runs `f`, turning errors and panics into a status plus stored message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> BqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BqStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            BqStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(BqStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(BqStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn oracle_mut<'a>(p: *mut BqOracle) -> Result<&'a mut CountedOracle, Failure> {
    p.as_mut().map(|o| &mut o.inner).ok_or_else(|| null("oracle"))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

fn to_run(run: Run<Bits>) -> BqRun {
    BqRun {
        value: run.value.value(),
        width: run.value.width() as u32,
        queries: run.queries,
        probability: run.probability,
    }
}

fn bool_run(run: Run<bool>) -> BqRun {
    BqRun {
        value: u64::from(run.value),
        width: 1,
        queries: run.queries,
        probability: run.probability,
    }
}

unsafe fn give_oracle(oracle: CountedOracle, out: *mut *mut BqOracle) -> Result<(), Failure> {
    write_out(out, Box::into_raw(Box::new(BqOracle { inner: oracle })))
}

/// Static, nul-terminated version string.
#[no_mangle]
pub extern "C" fn bq_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failing call on this thread, or null. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bq_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Sets the process-wide qubit budget for states allocated afterwards.
#[no_mangle]
pub extern "C" fn bq_set_qubit_budget(qubits: usize) {
    set_qubit_budget(qubits);
}

/// Oracle from a truth table such as `"0110"`.
///
/// # Safety
/// `table` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bq_oracle_from_table(table: *const c_char, out: *mut *mut BqOracle) -> BqStatus {
    guard(|| give_oracle(table_oracle(text(table, "table")?)?, out))
}

/// Oracle from the text of a spec file (`table`, `chain`, `dimacs`,
/// `innerproduct`). `dimacs` paths resolve against the working directory.
///
/// # Safety
/// `spec` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bq_oracle_from_spec(spec: *const c_char, out: *mut *mut BqOracle) -> BqStatus {
    guard(|| {
        let spec = parse_spec(text(spec, "spec")?, "<spec>", Path::new("."))?;
        give_oracle(spec.oracle()?, out)
    })
}

/// Oracle for `x -> <a, x>` over `width`-bit strings.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bq_oracle_inner_product(a: u64, width: usize, out: *mut *mut BqOracle) -> BqStatus {
    guard(|| {
        let inst = quantum::ExtractionInstance::new(Bits::new(a, width)?)?;
        give_oracle(inst.oracle().clone(), out)
    })
}

/// # Safety
/// `oracle` must come from a `bq_oracle_*` constructor and not be used
/// afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn bq_oracle_free(oracle: *mut BqOracle) {
    if !oracle.is_null() {
        drop(Box::from_raw(oracle));
    }
}

/// # Safety
/// `oracle` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn bq_oracle_query_width(oracle: *const BqOracle) -> usize {
    oracle.as_ref().map_or(0, |o| o.inner.query_width())
}

/// Oracle-gate and classical queries made so far.
///
/// # Safety
/// `oracle` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bq_oracle_count(oracle: *const BqOracle, out: *mut u64) -> BqStatus {
    guard(|| {
        let o = oracle.as_ref().ok_or_else(|| null("oracle"))?;
        write_out(out, o.inner.count())
    })
}

/// Resets the counter; the previous value goes to `previous` unless it is null.
///
/// # Safety
/// `oracle` must be a live handle; `previous` must be writable or null.
#[no_mangle]
pub unsafe extern "C" fn bq_oracle_reset(oracle: *mut BqOracle, previous: *mut u64) -> BqStatus {
    guard(|| {
        let n = oracle_mut(oracle)?.reset_and_read_counter();
        if !previous.is_null() {
            previous.write(n);
        }
        Ok(())
    })
}

/// One counted classical query.
///
/// # Safety
/// `oracle` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bq_oracle_query(oracle: *mut BqOracle, query: u64, out: *mut bool) -> BqStatus {
    guard(|| {
        let answer = oracle_mut(oracle)?.query(query)?;
        write_out(out, answer)
    })
}

/// `f(0) ^ f(1)` with one oracle gate on a one-bit oracle.
///
/// # Safety
/// `oracle` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bq_deutsch_parity(oracle: *mut BqOracle, out: *mut BqRun) -> BqStatus {
    guard(|| {
        let run = quantum::deutsch_parity(oracle_mut(oracle)?)?;
        write_out(out, bool_run(run))
    })
}

/// `A(q0) ^ A(q1)` with one oracle gate.
///
/// # Safety
/// `oracle` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bq_two_point_parity(oracle: *mut BqOracle, q0: u64, q1: u64, out: *mut BqRun) -> BqStatus {
    guard(|| {
        let run = quantum::two_point_parity(oracle_mut(oracle)?, q0, q1)?;
        write_out(out, bool_run(run))
    })
}

/// XOR of the answers to `len` distinct queries, taken as consecutive
/// pairs; `len` must be even. Non-adaptive: the pairs are declared as a
/// plan before the first gate.
///
/// # Safety
/// `oracle` must be a live handle; `queries` must point to `len` values;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bq_pairwise_parallel_parity(
    oracle: *mut BqOracle,
    queries: *const u64,
    len: usize,
    out: *mut BqRun,
) -> BqStatus {
    guard(|| {
        if queries.is_null() {
            return Err(null("queries"));
        }
        let qs = std::slice::from_raw_parts(queries, len);
        if !len.is_multiple_of(2) {
            return Err(Failure(BqStatus::Contract, format!("odd number of queries: {len}")));
        }
        let pairs: Vec<(u64, u64)> = qs.chunks(2).map(|p| (p[0], p[1])).collect();
        let run = quantum::pairwise_parallel_parity(oracle_mut(oracle)?, &pairs)?;
        write_out(out, bool_run(run))
    })
}

/// Parity of a monotone chain oracle of length `2^(k+1) - 2` with `k` gates.
///
/// # Safety
/// `oracle` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bq_chain_parity_search(oracle: *mut BqOracle, len: usize, out: *mut BqRun) -> BqStatus {
    guard(|| {
        let run = quantum::chain_parity_search(oracle_mut(oracle)?, len)?;
        write_out(out, bool_run(run))
    })
}

/// Classical binary-search baseline for the chain parity.
///
/// # Safety
/// `oracle` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bq_classical_chain_parity(oracle: *mut BqOracle, len: usize, out: *mut bool) -> BqStatus {
    guard(|| {
        let parity = bqlab::classical::classical_chain_parity(oracle_mut(oracle)?, len)?;
        write_out(out, parity)
    })
}

/// Reads `a` from an oracle for `x -> <a, x>` with one gate.
///
/// # Safety
/// `oracle` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bq_bv_extract(oracle: *mut BqOracle, out: *mut BqRun) -> BqStatus {
    guard(|| {
        let run = quantum::bv_extract(oracle_mut(oracle)?)?;
        write_out(out, to_run(run))
    })
}

/// `f(z)` from one gate on an oracle for `{(z, y) : <f(z), y> = 1}` whose
/// queries are `z_width + out_width` bits, `z` first.
///
/// # Safety
/// `oracle` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bq_extract_function(
    oracle: *mut BqOracle,
    z_width: usize,
    out_width: usize,
    z: u64,
    out: *mut BqRun,
) -> BqStatus {
    guard(|| {
        let z = Bits::new(z, z_width)?;
        let run = quantum::extract_with_oracle(oracle_mut(oracle)?, z_width, out_width, z)?;
        write_out(out, to_run(run))
    })
}

fn give_string(s: String, out: *mut *mut c_char) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| Failure(BqStatus::Contract, "output contains a nul byte".into()))?;
    unsafe { write_out(out, c.into_raw()) }
}

/// Query-count table for `k = 1..=max_k` as a JSON array of reports.
///
/// # Safety
/// `out` must be writable; the string is freed with `bq_string_free`.
#[no_mangle]
pub unsafe extern "C" fn bq_table_json(max_k: usize, out: *mut *mut c_char) -> BqStatus {
    guard(|| {
        let table = cli::cmd_table(max_k)?;
        give_string(cli::render(&table.rows, cli::Format::Json), out)
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn bq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
