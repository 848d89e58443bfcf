//! C interface to veroweb. Every entry point returns a [`VwStatus`]; on
//! failure a message is kept per thread and can be read with
//! [`vw_last_error`]. Handles are opaque and must be released with their
//! matching `_free` function. Strings returned as `char *` are owned by the
//! caller and go back through [`vw_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use clap::Parser;
use serde_json::Value;
use veroweb::cli::{self, Cli, CliError, Common, DocCommand, Format};
use veroweb::exact::Q;
use veroweb::exterior::MultiVector;
use veroweb::io::{self, Doc, SchemaError};
use veroweb::veronese::{self, AdmissibleCouple};

/// Result of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VwStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// Unknown command or bad command-line arguments.
    Usage = 3,
    /// Malformed input document; the message carries a JSON pointer.
    Schema = 4,
    /// Input parsed but violates a hypothesis of the computation.
    Precondition = 5,
    Io = 6,
    BufferTooSmall = 7,
    /// A Rust panic was caught at the boundary.
    Internal = 8,
}

/// A finished report: exit status (0 pass, 1 fail) and JSON body.
pub struct VwReport {
    code: i32,
    body: Value,
    json: CString,
}

/// A parsed admissible couple (J, W) over the rationals.
pub struct VwCouple {
    couple: AdmissibleCouple<Q>,
    char_numbers: Vec<usize>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Fail(VwStatus, String);

impl From<CliError> for Fail {
    fn from(e: CliError) -> Self {
        let status = match e {
            CliError::Schema(_) => VwStatus::Schema,
            CliError::Precondition(_) => VwStatus::Precondition,
            CliError::Io(_) => VwStatus::Io,
        };
        Fail(status, e.to_string())
    }
}

impl From<SchemaError> for Fail {
    fn from(e: SchemaError) -> Self {
        Fail(VwStatus::Schema, format!("schema error at {e}"))
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> VwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            clear_error();
            VwStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            VwStatus::Internal
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(VwStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(VwStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn owned(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior nul").into_raw()
}

fn make_report(code: i32, body: Value) -> *mut VwReport {
    let json = CString::new(serde_json::to_string(&body).expect("serialisable")).expect("no interior nul");
    Box::into_raw(Box::new(VwReport { code, body, json }))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn vw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn vw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Runs the command line `veroweb argv[0] … argv[argc-1]` without printing.
/// `--out` is honoured as in the binary.
///
/// # Safety
/// `argv` must point to `argc` NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vw_run_args(argc: usize, argv: *const *const c_char, out: *mut *mut VwReport) -> VwStatus {
    guard(|| {
        if out.is_null() || (argc > 0 && argv.is_null()) {
            return Err(Fail(VwStatus::NullArgument, "argv or out is null".into()));
        }
        let mut args = vec!["veroweb".to_string()];
        for i in 0..argc {
            args.push(text(*argv.add(i), "argument")?.to_string());
        }
        let parsed = Cli::try_parse_from(&args).map_err(|e| Fail(VwStatus::Usage, e.to_string()))?;
        let (code, body) = cli::execute(&parsed)?;
        if let Some(p) = &parsed.common.out {
            std::fs::write(p, cli::render(&body, parsed.common.format))
                .map_err(|e| Fail(VwStatus::Io, format!("{}: {e}", p.display())))?;
        }
        *out = make_report(code, body);
        Ok(())
    })
}

/// Runs a document command ("curve build", "couple normalize", "pencil
/// classify", "web verify", "web compat") on JSON text, over the rationals.
/// `samples` is used by web verify only.
///
/// # Safety
/// `command` and `json` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vw_run_document(
    command: *const c_char,
    json: *const c_char,
    order: i32,
    seed: u64,
    samples: usize,
    out: *mut *mut VwReport,
) -> VwStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail(VwStatus::NullArgument, "out is null".into()));
        }
        let name = text(command, "command")?;
        let cmd = DocCommand::from_name(name, samples)
            .ok_or_else(|| Fail(VwStatus::Usage, format!("unknown document command {name:?}")))?;
        let common = Common { order, seed, ..Common::default() };
        let (code, body) = cli::run_document(cmd, &common, text(json, "json")?)?;
        *out = make_report(code, body);
        Ok(())
    })
}

/// 0 when the checked property holds, 1 when it fails, -1 for NULL.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vw_report_exit_code(report: *const VwReport) -> i32 {
    report.as_ref().map_or(-1, |r| r.code)
}

/// Compact JSON of the report, borrowed from the handle.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vw_report_json(report: *const VwReport) -> *const c_char {
    report.as_ref().map_or(ptr::null(), |r| r.json.as_ptr())
}

/// The report rendered as `key: value` lines; free with [`vw_string_free`].
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vw_report_text(report: *const VwReport) -> *mut c_char {
    report.as_ref().map_or(ptr::null_mut(), |r| owned(cli::render(&r.body, Format::Text)))
}

/// # Safety
/// `report` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vw_report_free(report: *mut VwReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Parses a `veroweb/couple@1` document and checks admissibility.
///
/// # Safety
/// `json` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vw_couple_parse(json: *const c_char, out: *mut *mut VwCouple) -> VwStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail(VwStatus::NullArgument, "out is null".into()));
        }
        let doc = Doc::parse(text(json, "json")?)?;
        let root = doc.root();
        root.check_schema("veroweb/couple")?;
        let j = root.get("J")?.square::<Q>()?;
        let w = root.get("W")?.subspace::<Q>()?;
        if w.ambient() != j.rows() {
            return Err(Fail(VwStatus::Schema, format!("schema error at /W/ambient: must be {}", j.rows())));
        }
        let pre = |e: veronese::VeroneseError| Fail(VwStatus::Precondition, format!("precondition failed: {e}"));
        let couple = AdmissibleCouple::new(j, w).map_err(pre)?;
        let char_numbers = veronese::characteristic_numbers(&couple).map_err(pre)?;
        *out = Box::into_raw(Box::new(VwCouple { couple, char_numbers }));
        Ok(())
    })
}

/// Ambient dimension n, or 0 for NULL.
///
/// # Safety
/// `couple` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn vw_couple_dim(couple: *const VwCouple) -> usize {
    couple.as_ref().map_or(0, |c| c.couple.n())
}

/// Copies the characteristic numbers (nonincreasing) into `buf`. `len`
/// always receives the count; if it exceeds `cap` nothing is copied and
/// `VW_STATUS_BUFFER_TOO_SMALL` is returned.
///
/// # Safety
/// `couple` must be a live handle, `buf` writable for `cap` entries and
/// `len` writable.
#[no_mangle]
pub unsafe extern "C" fn vw_couple_char_numbers(
    couple: *const VwCouple,
    buf: *mut usize,
    cap: usize,
    len: *mut usize,
) -> VwStatus {
    guard(|| {
        let c = couple.as_ref().ok_or_else(|| Fail(VwStatus::NullArgument, "couple is null".into()))?;
        if len.is_null() {
            return Err(Fail(VwStatus::NullArgument, "len is null".into()));
        }
        *len = c.char_numbers.len();
        if c.char_numbers.len() > cap {
            return Err(Fail(VwStatus::BufferTooSmall, format!("need {} entries", c.char_numbers.len())));
        }
        if !c.char_numbers.is_empty() {
            if buf.is_null() {
                return Err(Fail(VwStatus::NullArgument, "buf is null".into()));
            }
            ptr::copy_nonoverlapping(c.char_numbers.as_ptr(), buf, c.char_numbers.len());
        }
        Ok(())
    })
}

/// The Veronese curve of the couple, normalised so that its leading
/// coefficient is the wedge of the given basis of W, as JSON (coefficients
/// in ascending powers of t). Free with [`vw_string_free`].
///
/// # Safety
/// `couple` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn vw_couple_curve_json(couple: *const VwCouple, out: *mut *mut c_char) -> VwStatus {
    guard(|| {
        let c = couple.as_ref().ok_or_else(|| Fail(VwStatus::NullArgument, "couple is null".into()))?;
        if out.is_null() {
            return Err(Fail(VwStatus::NullArgument, "out is null".into()));
        }
        let top =
            c.couple.w.basis().iter().fold(MultiVector::scalar(c.couple.n(), Q::from_integer(1.into())), |a, b| {
                a.wedge(&MultiVector::from_vector(b))
            });
        let curve = veronese::build_curve(&c.couple, &top)
            .map_err(|e| Fail(VwStatus::Precondition, format!("precondition failed: {e}")))?;
        *out = owned(io::poly_multivector(&curve.curve).to_string());
        Ok(())
    })
}

/// # Safety
/// `couple` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vw_couple_free(couple: *mut VwCouple) {
    if !couple.is_null() {
        drop(Box::from_raw(couple));
    }
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be NULL or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
