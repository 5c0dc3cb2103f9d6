//! C ABI over the dodeca engine.
//!
//! Points cross the boundary as NUL-terminated literals `x,y`, each
//! coordinate written `a+b*s3`. Strings returned through `char **` are owned
//! by the caller and released with `dodeca_string_free`. Every fallible call
//! returns a `DodecaStatus`; on anything but `DODECA_STATUS_OK` the reason is
//! available from `dodeca_last_error_message` on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dodeca::billiard::{BilliardError, Dir, WedgeSystem};
use dodeca::checks::{self, CheckOptions, Context, Outcome};
use dodeca::dynamics::{find_periodic_component, Component, DynamicsError};
use dodeca::geometry::{GeometryError, Point};
use dodeca::periods::{full_period_set, PeriodError};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DodecaStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    /// The orbit met a piece boundary, the table, or left the wedge.
    Boundary = 4,
    /// An iteration cap ran out before an answer was reached.
    Inconclusive = 5,
    Failed = 6,
    OutOfRange = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DodecaOutcome {
    Pass = 0,
    Fail = 1,
    Inconclusive = 2,
}

/// The wedge, its six pieces and the induced map.
pub struct DodecaWedge {
    inner: WedgeSystem,
}

/// A periodic component of the induced map.
pub struct DodecaComponent {
    inner: Component,
}

/// Sorted periods up to a bound.
pub struct DodecaPeriodSet {
    periods: Vec<u64>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Error(DodecaStatus, String);

type FfiResult<T> = Result<T, Error>;

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> FfiResult<()>) -> DodecaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DodecaStatus::Ok,
        Ok(Err(Error(status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {message}"));
            DodecaStatus::Panic
        }
    }
}

fn null(what: &str) -> Error {
    Error(DodecaStatus::NullArgument, format!("`{what}` is NULL"))
}

impl From<GeometryError> for Error {
    fn from(e: GeometryError) -> Error {
        let status = match e {
            GeometryError::PointParse { .. } | GeometryError::Json(_) => DodecaStatus::Parse,
            _ => DodecaStatus::Failed,
        };
        Error(status, e.to_string())
    }
}

impl From<BilliardError> for Error {
    fn from(e: BilliardError) -> Error {
        let status = match e {
            BilliardError::Grane { .. } | BilliardError::InsideTable | BilliardError::OutsideWedge => DodecaStatus::Boundary,
            BilliardError::CapExceeded { .. } => DodecaStatus::Inconclusive,
            _ => DodecaStatus::Failed,
        };
        Error(status, e.to_string())
    }
}

impl From<DynamicsError> for Error {
    fn from(e: DynamicsError) -> Error {
        let status = match e {
            DynamicsError::Inconclusive { .. } => DodecaStatus::Inconclusive,
            DynamicsError::Boundary { .. } => DodecaStatus::Boundary,
            DynamicsError::Billiard(b) => return b.into(),
            _ => DodecaStatus::Failed,
        };
        Error(status, e.to_string())
    }
}

impl From<PeriodError> for Error {
    fn from(e: PeriodError) -> Error {
        let status = match e {
            PeriodError::ZeroBound => DodecaStatus::OutOfRange,
            _ => DodecaStatus::Failed,
        };
        Error(status, e.to_string())
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn read_point(p: *const c_char) -> FfiResult<Point> {
    if p.is_null() {
        return Err(null("point"));
    }
    let s = CStr::from_ptr(p).to_str().map_err(|e| Error(DodecaStatus::InvalidUtf8, e.to_string()))?;
    Ok(Point::parse_literal(s)?)
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> FfiResult<()> {
    if out.is_null() {
        return Err(null("out"));
    }
    let c = CString::new(s).map_err(|e| Error(DodecaStatus::Failed, e.to_string()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> FfiResult<()> {
    if out.is_null() {
        return Err(null(what));
    }
    *out = value;
    Ok(())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn dodeca_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call or `dodeca_clear_error`.
#[no_mangle]
pub extern "C" fn dodeca_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn dodeca_clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// # Safety
/// `s` is NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dodeca_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dodeca_wedge_new(out: *mut *mut DodecaWedge) -> DodecaStatus {
    guard(|| {
        let handle = Box::into_raw(Box::new(DodecaWedge { inner: WedgeSystem::new() }));
        write(out, handle, "out").inspect_err(|_| drop(Box::from_raw(handle)))
    })
}

/// # Safety
/// `wedge` is NULL or a handle from `dodeca_wedge_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dodeca_wedge_free(wedge: *mut DodecaWedge) {
    if !wedge.is_null() {
        drop(Box::from_raw(wedge));
    }
}

/// Writes the fixed point `O_k`, `k` in `1..=5`, as a literal.
///
/// # Safety
/// `wedge` is a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dodeca_wedge_fixed_point(wedge: *const DodecaWedge, k: u32, out: *mut *mut c_char) -> DodecaStatus {
    guard(|| {
        let w = borrow(wedge, "wedge")?;
        if !(1..=5).contains(&k) {
            return Err(Error(DodecaStatus::OutOfRange, format!("fixed point index {k} not in 1..=5")));
        }
        write_string(out, w.inner.o[k as usize].to_literal())
    })
}

/// One step of the induced map, forward or backward. `out_piece` may be
/// NULL; otherwise it receives the index of the piece used.
///
/// # Safety
/// `wedge` is a live handle, `point` a NUL-terminated string and `out` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dodeca_wedge_step(
    wedge: *const DodecaWedge,
    point: *const c_char,
    backward: bool,
    out: *mut *mut c_char,
    out_piece: *mut u32,
) -> DodecaStatus {
    guard(|| {
        let w = borrow(wedge, "wedge")?;
        let p = read_point(point)?;
        let dir = if backward { Dir::Backward } else { Dir::Forward };
        let (q, piece) = w.inner.induced_step(&p, dir)?;
        write_string(out, q.to_literal())?;
        if !out_piece.is_null() {
            *out_piece = piece as u32;
        }
        Ok(())
    })
}

/// Exact period of `point` under the induced map. Returns
/// `DODECA_STATUS_INCONCLUSIVE` when the orbit does not close within `cap`.
///
/// # Safety
/// `wedge` is a live handle, `point` a NUL-terminated string and `out` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dodeca_wedge_period(
    wedge: *const DodecaWedge,
    point: *const c_char,
    cap: u64,
    out: *mut u64,
) -> DodecaStatus {
    guard(|| {
        let w = borrow(wedge, "wedge")?;
        let p = read_point(point)?;
        match w.inner.period(&p, cap)? {
            Some(n) => write(out, n, "out"),
            None => Err(BilliardError::CapExceeded { cap }.into()),
        }
    })
}

/// The periodic component containing `point`.
///
/// # Safety
/// `wedge` is a live handle, `point` a NUL-terminated string and `out` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dodeca_component_find(
    wedge: *const DodecaWedge,
    point: *const c_char,
    max_iter: u64,
    out: *mut *mut DodecaComponent,
) -> DodecaStatus {
    guard(|| {
        let w = borrow(wedge, "wedge")?;
        let p = read_point(point)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let c = find_periodic_component(&w.inner, &p, max_iter)?;
        *out = Box::into_raw(Box::new(DodecaComponent { inner: c }));
        Ok(())
    })
}

/// # Safety
/// `component` is NULL or a handle from `dodeca_component_find` not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn dodeca_component_free(component: *mut DodecaComponent) {
    if !component.is_null() {
        drop(Box::from_raw(component));
    }
}

/// Period of the component's center under the induced map; 0 for NULL.
///
/// # Safety
/// `component` is NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dodeca_component_tprime_period(component: *const DodecaComponent) -> u64 {
    component.as_ref().map_or(0, |c| c.inner.per_tprime)
}

/// Period of a generic point of the component under the outer billiard map;
/// 0 for NULL.
///
/// # Safety
/// `component` is NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dodeca_component_billiard_period(component: *const DodecaComponent) -> u64 {
    component.as_ref().map_or(0, |c| c.inner.periods().generic_t)
}

/// # Safety
/// `component` is NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dodeca_component_vertex_count(component: *const DodecaComponent) -> usize {
    component.as_ref().map_or(0, |c| c.inner.region.vertices().len())
}

/// # Safety
/// `component` is a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dodeca_component_vertex(
    component: *const DodecaComponent,
    index: usize,
    out: *mut *mut c_char,
) -> DodecaStatus {
    guard(|| {
        let c = borrow(component, "component")?;
        let vs = c.inner.region.vertices();
        let v = vs
            .get(index)
            .ok_or_else(|| Error(DodecaStatus::OutOfRange, format!("vertex {index} of {}", vs.len())))?;
        write_string(out, v.to_literal())
    })
}

/// Exact area as a field literal `a+b*s3`.
///
/// # Safety
/// `component` is a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dodeca_component_area(component: *const DodecaComponent, out: *mut *mut c_char) -> DodecaStatus {
    guard(|| {
        let c = borrow(component, "component")?;
        write_string(out, c.inner.region.area()?.to_literal())
    })
}

/// Enumerates every possible period up to `bound`.
///
/// # Safety
/// `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dodeca_periods_new(bound: u64, out: *mut *mut DodecaPeriodSet) -> DodecaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let periods = full_period_set(bound)?.periods();
        *out = Box::into_raw(Box::new(DodecaPeriodSet { periods }));
        Ok(())
    })
}

/// # Safety
/// `set` is NULL or a handle from `dodeca_periods_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dodeca_periods_free(set: *mut DodecaPeriodSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// # Safety
/// `set` is NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dodeca_periods_len(set: *const DodecaPeriodSet) -> usize {
    set.as_ref().map_or(0, |s| s.periods.len())
}

/// Copies the sorted periods into `buf` of capacity `cap` and returns how
/// many were written.
///
/// # Safety
/// `set` is NULL or a live handle; `buf` holds at least `cap` elements.
#[no_mangle]
pub unsafe extern "C" fn dodeca_periods_copy(set: *const DodecaPeriodSet, buf: *mut u64, cap: usize) -> usize {
    let Some(s) = set.as_ref() else { return 0 };
    if buf.is_null() {
        return 0;
    }
    let n = cap.min(s.periods.len());
    ptr::copy_nonoverlapping(s.periods.as_ptr(), buf, n);
    n
}

/// # Safety
/// `set` is NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dodeca_periods_contains(set: *const DodecaPeriodSet, period: u64) -> bool {
    set.as_ref().is_some_and(|s| s.periods.binary_search(&period).is_ok())
}

/// Runs acceptance criterion `id` (1 to 10) with default options. The
/// detail line is written to `out_detail` unless it is NULL.
///
/// # Safety
/// `out` is a valid pointer; `out_detail` is NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn dodeca_verify(id: u8, out: *mut DodecaOutcome, out_detail: *mut *mut c_char) -> DodecaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let ctx = Context::new(CheckOptions::default());
        let r = checks::run_check(&ctx, id)
            .ok_or_else(|| Error(DodecaStatus::OutOfRange, format!("no criterion {id}")))?;
        *out = match r.outcome {
            Outcome::Pass => DodecaOutcome::Pass,
            Outcome::Fail => DodecaOutcome::Fail,
            Outcome::Inconclusive => DodecaOutcome::Inconclusive,
        };
        if !out_detail.is_null() {
            write_string(out_detail, r.detail)?;
        }
        Ok(())
    })
}
