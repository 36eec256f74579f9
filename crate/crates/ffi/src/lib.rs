//! C interface. Every function returns a `PmechStatus`; results go through
//! out-pointers. Handles are opaque and must be released with their `_free`
//! function. After a non-OK status, `pmech_last_error` describes the failure.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use pmech::cantrans::CtSpec;
use pmech::commands::{self, CommandError};
use pmech::config::RunConfig;
use pmech::verify::{self, Report};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PmechStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// configuration or input rejected
    InvalidInput = 3,
    /// numerics failed or an output could not be written
    ComputationFailed = 4,
    Panic = 5,
}

/// Parsed run configuration.
pub struct PmechConfig(RunConfig);

/// Verification reports for one or all suites.
pub struct PmechReport(Vec<Report>);

/// Canonical transformation given by polynomial relations.
pub struct PmechCtSpec(CtSpec);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).expect("no interior nul"));
}

fn fail(status: PmechStatus, msg: impl Into<String>) -> PmechStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> PmechStatus) -> PmechStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(PmechStatus::Panic, "internal panic"))
}

unsafe fn c_str<'a>(p: *const c_char) -> Result<&'a str, PmechStatus> {
    if p.is_null() {
        return Err(fail(PmechStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(PmechStatus::InvalidUtf8, "string argument is not UTF-8"))
}

fn split(s: &str) -> Vec<&str> {
    s.split(';').map(str::trim).collect()
}

macro_rules! try_status {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(PmechStatus::NullPointer, concat!("null argument ", stringify!($p)));
        })+
    };
}

/// Message for the most recent failure on this thread. Valid until the next
/// call into the library from the same thread; never null.
#[no_mangle]
pub extern "C" fn pmech_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses configuration text (empty text gives the defaults).
///
/// # Safety
/// `text` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pmech_config_parse(text: *const c_char, out: *mut *mut PmechConfig) -> PmechStatus {
    guard(|| {
        non_null!(out);
        *out = ptr::null_mut();
        let src = try_status!(c_str(text));
        match RunConfig::parse(src) {
            Ok(cfg) => {
                *out = Box::into_raw(Box::new(PmechConfig(cfg)));
                PmechStatus::Ok
            }
            Err(e) => fail(PmechStatus::InvalidInput, e.to_string()),
        }
    })
}

/// # Safety
/// `cfg` must come from `pmech_config_parse` and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn pmech_config_free(cfg: *mut PmechConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Overrides one named tolerance; it must be positive and finite.
///
/// # Safety
/// `cfg` must be a live handle and `name` a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn pmech_config_set_tolerance(cfg: *mut PmechConfig, name: *const c_char, value: f64) -> PmechStatus {
    guard(|| {
        non_null!(cfg);
        let name = try_status!(c_str(name));
        match (*cfg).0.tolerances.set(name, value) {
            Ok(()) => PmechStatus::Ok,
            Err(e) => fail(PmechStatus::InvalidInput, e.to_string()),
        }
    })
}

/// # Safety
/// `cfg` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pmech_config_seed(cfg: *const PmechConfig, out: *mut u64) -> PmechStatus {
    guard(|| {
        non_null!(cfg, out);
        *out = (*cfg).0.seed;
        PmechStatus::Ok
    })
}

/// Runs one suite, or every suite when `suite` is null.
///
/// # Safety
/// `cfg` must be a live handle, `suite` null or a nul-terminated string, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn pmech_verify(cfg: *const PmechConfig, suite: *const c_char, out: *mut *mut PmechReport) -> PmechStatus {
    guard(|| {
        non_null!(cfg, out);
        *out = ptr::null_mut();
        let cfg = &(*cfg).0;
        let reports = if suite.is_null() {
            verify::run_all(&cfg.tolerances, cfg.seed)
        } else {
            let name = try_status!(c_str(suite));
            match verify::run_suite(name, &cfg.tolerances, cfg.seed) {
                Ok(r) => vec![r],
                Err(e) => return fail(PmechStatus::InvalidInput, e.to_string()),
            }
        };
        *out = Box::into_raw(Box::new(PmechReport(reports)));
        PmechStatus::Ok
    })
}

/// # Safety
/// `r` must come from `pmech_verify` and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn pmech_report_free(r: *mut PmechReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// 1 when no case failed, else 0.
///
/// # Safety
/// `r` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pmech_report_passed(r: *const PmechReport, out: *mut i32) -> PmechStatus {
    guard(|| {
        non_null!(r, out);
        *out = i32::from((*r).0.iter().all(|x| x.passed));
        PmechStatus::Ok
    })
}

/// Total and failed case counts.
///
/// # Safety
/// `r` must be a live handle; `total` and `failed` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pmech_report_counts(r: *const PmechReport, total: *mut usize, failed: *mut usize) -> PmechStatus {
    guard(|| {
        non_null!(r, total, failed);
        let cases = (*r).0.iter().flat_map(|x| &x.cases);
        *total = cases.clone().count();
        *failed = cases.filter(|c| c.status == verify::Status::Fail).count();
        PmechStatus::Ok
    })
}

/// The reports as a JSON array. Release the string with `pmech_string_free`.
///
/// # Safety
/// `r` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pmech_report_json(r: *const PmechReport, out: *mut *mut c_char) -> PmechStatus {
    guard(|| {
        non_null!(r, out);
        let s = serde_json::to_string(&(*r).0).expect("serialisable report");
        *out = CString::new(s).expect("JSON has no nul").into_raw();
        PmechStatus::Ok
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn pmech_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Runs the configured command, writing its tables into `out_dir`.
/// `passed` receives 1 when the command's check passed.
///
/// # Safety
/// `cfg` must be a live handle, `out_dir` a nul-terminated path, `passed` valid.
#[no_mangle]
pub unsafe extern "C" fn pmech_run(cfg: *const PmechConfig, out_dir: *const c_char, passed: *mut i32) -> PmechStatus {
    guard(|| {
        non_null!(cfg, passed);
        let dir = PathBuf::from(try_status!(c_str(out_dir)));
        match commands::run(&(*cfg).0, &dir) {
            Ok(o) => {
                *passed = i32::from(o.passed);
                PmechStatus::Ok
            }
            Err(e @ CommandError::Input(_)) => fail(PmechStatus::InvalidInput, e.to_string()),
            Err(e) => fail(PmechStatus::ComputationFailed, e.to_string()),
        }
    })
}

/// Transformation f_i(q,p) = F_i(Q,P), g_i(q,p) = G_i(Q,P) for i = 1..n; each
/// argument holds n polynomials separated by ';'.
///
/// # Safety
/// All strings must be nul-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn pmech_ctspec_parse(
    n: usize,
    f: *const c_char,
    big_f: *const c_char,
    g: *const c_char,
    big_g: *const c_char,
    out: *mut *mut PmechCtSpec,
) -> PmechStatus {
    guard(|| {
        non_null!(out);
        *out = ptr::null_mut();
        let lists = [
            split(try_status!(c_str(f))),
            split(try_status!(c_str(big_f))),
            split(try_status!(c_str(g))),
            split(try_status!(c_str(big_g))),
        ];
        match CtSpec::parse(n, &lists[0], &lists[1], &lists[2], &lists[3]) {
            Ok(s) => {
                *out = Box::into_raw(Box::new(PmechCtSpec(s)));
                PmechStatus::Ok
            }
            Err(e) => fail(PmechStatus::InvalidInput, e.to_string()),
        }
    })
}

/// # Safety
/// `s` must come from `pmech_ctspec_parse` and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn pmech_ctspec_free(s: *mut PmechCtSpec) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Largest deviation of the Poisson brackets from canonical form.
///
/// # Safety
/// `s` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pmech_ctspec_bracket_defect(s: *const PmechCtSpec, out: *mut f64) -> PmechStatus {
    guard(|| {
        non_null!(s, out);
        *out = (*s).0.bracket_defect();
        PmechStatus::Ok
    })
}

/// Coulomb level E_n = −2π²/(h²n²).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pmech_coulomb_energy(n: u32, h: f64, out: *mut f64) -> PmechStatus {
    guard(|| {
        non_null!(out);
        if n == 0 || !(h > 0.0 && h.is_finite()) {
            return fail(PmechStatus::InvalidInput, "need n >= 1 and positive finite h");
        }
        *out = pmech::kepler::energy(n, h);
        PmechStatus::Ok
    })
}
