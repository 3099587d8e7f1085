//! C interface. Objects cross the boundary as opaque handles; everything
//! else as UTF-8 JSON strings in the same formats the CLI reads and writes.
//!
//! Every function returns an [`XlieStatus`]. On failure a message is kept per
//! thread and can be read with [`xlie_last_error_message`]. Strings returned
//! through out-parameters are owned by the caller and released with
//! [`xlie_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use xlie::catalog::{self, CatalogValue};
use xlie::doc;
use xlie::isoclinism::{self, CommutatorPairing, IsoclinismSearch};
use xlie::search::SearchOptions;
use xlie::{CrossedModule, Error, FieldSpec, Verdict};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XlieStatus {
    Ok = 0,
    /// Checked and found negative: invalid module, violated witness, not isoclinic.
    Negative = 1,
    /// Malformed document or argument.
    InvalidInput = 2,
    BudgetExhausted = 3,
    NullPointer = 4,
    /// A Rust panic was caught at the boundary.
    Panic = 5,
}

/// Opaque crossed module.
pub struct XlieXMod {
    inner: CrossedModule,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("nul bytes removed"));
}

struct Fail(XlieStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InvalidLie(_) | Error::InvalidXMod(_) => XlieStatus::Negative,
            _ => XlieStatus::InvalidInput,
        };
        Fail(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<XlieStatus, Fail>) -> XlieStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => {
            if status == XlieStatus::Ok {
                set_error("");
            }
            status
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside xlie");
            XlieStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(XlieStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(XlieStatus::InvalidInput, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a>(p: *const XlieXMod, what: &str) -> Result<&'a CrossedModule, Fail> {
    p.as_ref()
        .map(|h| &h.inner)
        .ok_or_else(|| Fail(XlieStatus::NullPointer, format!("{what} is null")))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(
            XlieStatus::NullPointer,
            "output pointer is null".into(),
        ));
    }
    let c = CString::new(s).map_err(|_| {
        Fail(
            XlieStatus::InvalidInput,
            "output contains a nul byte".into(),
        )
    })?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn write_handle(out: *mut *mut XlieXMod, x: CrossedModule) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(
            XlieStatus::NullPointer,
            "output pointer is null".into(),
        ));
    }
    *out = Box::into_raw(Box::new(XlieXMod { inner: x }));
    Ok(())
}

fn require_valid(x: &CrossedModule, what: &str) -> Result<(), Fail> {
    match x.validate().violations.first() {
        None => Ok(()),
        Some(v) => Err(Fail(
            XlieStatus::Negative,
            format!("{what} is not a crossed module: {v}"),
        )),
    }
}

fn to_json(v: &impl serde::Serialize) -> String {
    serde_json::to_string(v).expect("documents serialize")
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn xlie_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failing call on this thread; empty after a success.
/// Valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn xlie_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn xlie_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a crossed-module document. The axioms are not checked here; see
/// [`xlie_xmod_validate`].
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn xlie_xmod_from_json(
    json: *const c_char,
    out: *mut *mut XlieXMod,
) -> XlieStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        write_handle(out, doc::parse_xmod(text)?)?;
        Ok(XlieStatus::Ok)
    })
}

/// # Safety
/// `x` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn xlie_xmod_free(x: *mut XlieXMod) {
    if !x.is_null() {
        drop(Box::from_raw(x));
    }
}

/// # Safety
/// `x` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn xlie_xmod_to_json(
    x: *const XlieXMod,
    out: *mut *mut c_char,
) -> XlieStatus {
    guard(|| {
        let x = handle(x, "x")?;
        write_string(out, to_json(&doc::xmod_to_doc(x)))?;
        Ok(XlieStatus::Ok)
    })
}

/// # Safety
/// `x` must be a live handle; `n1` and `n0` writable.
#[no_mangle]
pub unsafe extern "C" fn xlie_xmod_dims(
    x: *const XlieXMod,
    n1: *mut usize,
    n0: *mut usize,
) -> XlieStatus {
    guard(|| {
        let x = handle(x, "x")?;
        if n1.is_null() || n0.is_null() {
            return Err(Fail(
                XlieStatus::NullPointer,
                "output pointer is null".into(),
            ));
        }
        (*n1, *n0) = x.dims();
        Ok(XlieStatus::Ok)
    })
}

/// `Ok` if every axiom holds, `Negative` otherwise. If `report` is not null
/// it receives a JSON array of `{axiom, detail}` violations.
///
/// # Safety
/// `x` must be a live handle; `report` null or writable.
#[no_mangle]
pub unsafe extern "C" fn xlie_xmod_validate(
    x: *const XlieXMod,
    report: *mut *mut c_char,
) -> XlieStatus {
    guard(|| {
        let x = handle(x, "x")?;
        let r = x.validate();
        if !report.is_null() {
            let list: Vec<serde_json::Value> = r
                .violations
                .iter()
                .map(|v| serde_json::json!({ "axiom": v.axiom(), "detail": v.to_string() }))
                .collect();
            write_string(report, to_json(&list))?;
        }
        match r.violations.first() {
            None => Ok(XlieStatus::Ok),
            Some(v) => Err(Fail(XlieStatus::Negative, v.to_string())),
        }
    })
}

/// Builds the catalog crossed module `name` over `field` (`"Q"`, `"F_p"`).
///
/// # Safety
/// `name` and `field` must be NUL-terminated strings and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn xlie_catalog_emit(
    name: *const c_char,
    field: *const c_char,
    out: *mut *mut XlieXMod,
) -> XlieStatus {
    guard(|| {
        let name = read_str(name, "name")?;
        let field: FieldSpec = read_str(field, "field")?.parse()?;
        match catalog::build(name, field)? {
            CatalogValue::XMod(x) => write_handle(out, x)?,
            CatalogValue::Lie(_) => {
                return Err(Fail(
                    XlieStatus::InvalidInput,
                    format!("{name} is a Lie algebra, not a crossed module"),
                ))
            }
        }
        Ok(XlieStatus::Ok)
    })
}

/// Isoclinism invariants of a valid crossed module, as JSON.
///
/// # Safety
/// `x` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn xlie_fingerprint_json(
    x: *const XlieXMod,
    out: *mut *mut c_char,
) -> XlieStatus {
    guard(|| {
        let x = handle(x, "x")?;
        require_valid(x, "x")?;
        let f = isoclinism::fingerprint(x)?;
        write_string(out, doc::fingerprint_to_value(&f).to_string())?;
        Ok(XlieStatus::Ok)
    })
}

/// Checks a witness document for `x ~ y`: `Ok` if it is an isoclinism,
/// `Negative` if not.
///
/// # Safety
/// `x`, `y` must be live handles and `witness_json` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn xlie_isoclinism_verify(
    x: *const XlieXMod,
    y: *const XlieXMod,
    witness_json: *const c_char,
) -> XlieStatus {
    guard(|| {
        let (x, y) = (handle(x, "x")?, handle(y, "y")?);
        require_valid(x, "x")?;
        require_valid(y, "y")?;
        if x.field() != y.field() {
            return Err(Error::FieldMismatch(x.field(), y.field()).into());
        }
        let wd = doc::parse_witness_doc(read_str(witness_json, "witness_json")?)?;
        let px = CommutatorPairing::new(x)?;
        let py = CommutatorPairing::new(y)?;
        let w = doc::witness_from_doc(&wd, &px, &py)?;
        match isoclinism::verify_with(&px, &py, &w)? {
            Verdict::Verified(_) => Ok(XlieStatus::Ok),
            Verdict::Violated(v) => Err(Fail(XlieStatus::Negative, v.to_string())),
        }
    })
}

/// Searches for an isoclinism `x ~ y` over a prime field. On `Ok` the witness
/// document is written to `witness_json`; `Negative` means not isoclinic and
/// `BudgetExhausted` that `budget` candidate nodes were not enough.
/// `jobs = 0` is treated as 1.
///
/// # Safety
/// `x`, `y` must be live handles and `witness_json` writable.
#[no_mangle]
pub unsafe extern "C" fn xlie_isoclinism_search(
    x: *const XlieXMod,
    y: *const XlieXMod,
    budget: u64,
    jobs: usize,
    witness_json: *mut *mut c_char,
) -> XlieStatus {
    guard(|| {
        let (x, y) = (handle(x, "x")?, handle(y, "y")?);
        require_valid(x, "x")?;
        require_valid(y, "y")?;
        if witness_json.is_null() {
            return Err(Fail(XlieStatus::NullPointer, "witness_json is null".into()));
        }
        *witness_json = ptr::null_mut();
        let opts = SearchOptions {
            budget,
            jobs: jobs.max(1),
        };
        match isoclinism::isoclinism_search(x, y, &opts)?.outcome {
            IsoclinismSearch::Found(w) => {
                write_string(witness_json, to_json(&doc::witness_to_doc(&w, true)))?;
                Ok(XlieStatus::Ok)
            }
            IsoclinismSearch::FingerprintMismatch(d) => {
                Err(Fail(XlieStatus::Negative, format!("fingerprint: {d}")))
            }
            IsoclinismSearch::Exhausted => {
                Err(Fail(XlieStatus::Negative, "no isoclinism exists".into()))
            }
            IsoclinismSearch::BudgetExhausted => Err(Fail(
                XlieStatus::BudgetExhausted,
                format!("budget of {budget} nodes exhausted"),
            )),
        }
    })
}
