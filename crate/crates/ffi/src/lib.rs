//! C ABI over `lagflow`.
//!
//! Every function returns an [`LfStatus`]; on failure a message is available
//! from [`lf_last_error`] on the calling thread. Results are written through
//! out-pointers, which are left untouched on failure. Fields are opaque
//! [`LfField`] handles created by [`lf_field_new`] and released with
//! [`lf_field_free`]. Strings returned by the library are released with
//! [`lf_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use lagflow::cauchy::cauchy_invariant;
use lagflow::clebsch::helicity;
use lagflow::field::{euler_residual, from_name, FieldParams, FlowField};
use lagflow::flow_map::{flow_map, inverse_map, mass_conservation_check};
use lagflow::{harness, Error, IntegratorConfig, Vec3};

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    UnknownField = 3,
    TimeOutOfDomain = 4,
    NonFinite = 5,
    DegenerateGeometry = 6,
    Unsupported = 7,
    ConstraintViolated = 8,
    ConfigError = 9,
    IoError = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LfVec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl From<LfVec3> for Vec3 {
    fn from(v: LfVec3) -> Self {
        Vec3::new(v.x, v.y, v.z)
    }
}

impl From<Vec3> for LfVec3 {
    fn from(v: Vec3) -> Self {
        Self {
            x: v[0],
            y: v[1],
            z: v[2],
        }
    }
}

/// Opaque handle to a catalog flow field.
pub struct LfField {
    inner: Box<dyn FlowField>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(LfStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::UnknownField(_) | Error::UnknownProfile(_) => LfStatus::UnknownField,
            Error::InvalidParameter { .. } | Error::DegenerateField(_) => LfStatus::InvalidArgument,
            Error::TimeOutOfDomain { .. } => LfStatus::TimeOutOfDomain,
            Error::NonFinite(_) | Error::GaugeIllDefined { .. } => LfStatus::NonFinite,
            Error::DegenerateGeometry(_) => LfStatus::DegenerateGeometry,
            Error::Unsupported(_) => LfStatus::Unsupported,
            Error::Constraint(_) => LfStatus::ConstraintViolated,
            Error::Config(_) => LfStatus::ConfigError,
            Error::Io { .. } => LfStatus::IoError,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(LfStatus::NullPointer, format!("`{what}` is null"))
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> LfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            LfStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("panic: {msg}"));
            LfStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(LfStatus::InvalidArgument, format!("`{what}` is not UTF-8")))
}

unsafe fn field_ref<'a>(f: *const LfField) -> Result<&'a dyn FlowField, Failure> {
    f.as_ref()
        .map(|f| f.inner.as_ref())
        .ok_or_else(|| null("field"))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn integrator(h: f64) -> Result<IntegratorConfig, Failure> {
    Ok(IntegratorConfig::rk4(h)?)
}

/// Message describing the last failure on this thread, or an empty string.
/// The pointer stays valid until the next call into the library on the same
/// thread.
#[no_mangle]
pub extern "C" fn lf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a catalog field. `params_json` is a JSON object of parameters
/// and may be null.
///
/// # Safety
/// `name` and a non-null `params_json` must be NUL-terminated strings; `out`
/// must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn lf_field_new(
    name: *const c_char,
    params_json: *const c_char,
    out: *mut *mut LfField,
) -> LfStatus {
    guard(|| {
        let name = text(name, "name")?;
        let params: FieldParams = if params_json.is_null() {
            FieldParams::new()
        } else {
            serde_json::from_str(text(params_json, "params_json")?)
                .map_err(|e| Failure(LfStatus::InvalidArgument, format!("params_json: {e}")))?
        };
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = from_name(name, &params)?;
        out.write(Box::into_raw(Box::new(LfField { inner })));
        Ok(())
    })
}

/// Releases a field handle. Null is ignored.
///
/// # Safety
/// `field` must come from [`lf_field_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn lf_field_free(field: *mut LfField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// # Safety
/// `field` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn lf_field_velocity(
    field: *const LfField,
    x: LfVec3,
    t: f64,
    out: *mut LfVec3,
) -> LfStatus {
    guard(|| {
        let f = field_ref(field)?;
        if !f.valid_time(t) {
            return Err(Error::TimeOutOfDomain {
                field: f.name().into(),
                t,
            }
            .into());
        }
        write(out, f.velocity(&x.into(), t).into(), "out")
    })
}

/// # Safety
/// `field` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn lf_field_vorticity(
    field: *const LfField,
    x: LfVec3,
    t: f64,
    out: *mut LfVec3,
) -> LfStatus {
    guard(|| {
        let f = field_ref(field)?;
        if !f.valid_time(t) {
            return Err(Error::TimeOutOfDomain {
                field: f.name().into(),
                t,
            }
            .into());
        }
        write(out, f.vorticity(&x.into(), t).into(), "out")
    })
}

/// Pointwise Euler-equation residual with finite-difference step `fd_step`.
///
/// # Safety
/// `field` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn lf_euler_residual(
    field: *const LfField,
    x: LfVec3,
    t: f64,
    fd_step: f64,
    out: *mut LfVec3,
) -> LfStatus {
    guard(|| {
        let r = euler_residual(field_ref(field)?, &x.into(), t, fd_step)?;
        write(out, r.into(), "out")
    })
}

/// Position of label `a` at time `t` using RK4 with step `h`. When
/// `jacobian` is non-null the 3×3 Jacobian `∂x_i/∂a_j` is written to it in
/// row-major order (9 doubles).
///
/// # Safety
/// `field` must be a live handle, `out` valid for writing and a non-null
/// `jacobian` valid for writing 9 doubles.
#[no_mangle]
pub unsafe extern "C" fn lf_flow_map(
    field: *const LfField,
    a: LfVec3,
    t: f64,
    h: f64,
    out: *mut LfVec3,
    jacobian: *mut f64,
) -> LfStatus {
    guard(|| {
        let s = flow_map(field_ref(field)?, &a.into(), t, &integrator(h)?)?;
        write(out, s.position.into(), "out")?;
        if !jacobian.is_null() {
            for i in 0..3 {
                for j in 0..3 {
                    jacobian.add(3 * i + j).write(s.jacobian[(i, j)]);
                }
            }
        }
        Ok(())
    })
}

/// Label of the particle found at `x` at time `t`.
///
/// # Safety
/// `field` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn lf_inverse_map(
    field: *const LfField,
    x: LfVec3,
    t: f64,
    h: f64,
    out: *mut LfVec3,
) -> LfStatus {
    guard(|| {
        let a = inverse_map(field_ref(field)?, &x.into(), t, &integrator(h)?)?;
        write(out, a.into(), "out")
    })
}

/// `|det J − ρ₀/ρ|` along the trajectory of `a`.
///
/// # Safety
/// `field` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn lf_mass_check(
    field: *const LfField,
    a: LfVec3,
    t: f64,
    h: f64,
    out: *mut f64,
) -> LfStatus {
    guard(|| {
        let d = mass_conservation_check(field_ref(field)?, &a.into(), t, &integrator(h)?)?;
        write(out, d, "out")
    })
}

/// Cauchy invariant of label `a` at time `t`; `drift` (may be null)
/// receives its distance from the initial vorticity.
///
/// # Safety
/// `field` must be a live handle, `out` valid for writing and `drift` null
/// or valid for writing.
#[no_mangle]
pub unsafe extern "C" fn lf_cauchy_invariant(
    field: *const LfField,
    a: LfVec3,
    t: f64,
    h: f64,
    out: *mut LfVec3,
    drift: *mut f64,
) -> LfStatus {
    guard(|| {
        let r = cauchy_invariant(field_ref(field)?, &a.into(), t, &integrator(h)?)?;
        write(out, r.invariant.into(), "out")?;
        if !drift.is_null() {
            drift.write(r.drift);
        }
        Ok(())
    })
}

/// Helicity over the periodic box with `n` points per axis; `obstruction`
/// (may be null) is set when the value rules out a global Clebsch pair.
///
/// # Safety
/// `field` must be a live handle, `out` valid for writing and `obstruction`
/// null or valid for writing.
#[no_mangle]
pub unsafe extern "C" fn lf_helicity(
    field: *const LfField,
    t: f64,
    n: usize,
    out: *mut f64,
    obstruction: *mut bool,
) -> LfStatus {
    guard(|| {
        let r = helicity(field_ref(field)?, t, n)?;
        write(out, r.value, "out")?;
        if !obstruction.is_null() {
            obstruction.write(r.obstruction);
        }
        Ok(())
    })
}

/// Runs an experiment config given as a JSON document without writing any
/// files. On success `summary_json` receives the run summary, to be released
/// with [`lf_string_free`]; tolerance failures and numerical errors inside
/// the run are reported in the summary, not in the status.
///
/// # Safety
/// `config_json` must be a NUL-terminated string and `summary_json` valid
/// for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn lf_run_config(
    config_json: *const c_char,
    summary_json: *mut *mut c_char,
) -> LfStatus {
    guard(|| {
        let cfg = harness::parse_config(text(config_json, "config_json")?)?;
        if summary_json.is_null() {
            return Err(null("summary_json"));
        }
        let outcome = harness::run(&cfg);
        let json = serde_json::to_string(&outcome.summary)
            .map_err(|e| Failure(LfStatus::ConfigError, e.to_string()))?;
        let c = CString::new(json).map_err(|e| Failure(LfStatus::ConfigError, e.to_string()))?;
        summary_json.write(c.into_raw());
        Ok(())
    })
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn lf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
