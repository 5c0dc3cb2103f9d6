use std::ffi::{CStr, CString};
use std::ptr;

use dodeca_ffi::*;

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    dodeca_string_free(s);
    out
}

unsafe fn last_error() -> String {
    let p = dodeca_last_error_message();
    assert!(!p.is_null());
    CStr::from_ptr(p).to_string_lossy().into_owned()
}

fn wedge() -> *mut DodecaWedge {
    let mut w = ptr::null_mut();
    assert_eq!(unsafe { dodeca_wedge_new(&mut w) }, DodecaStatus::Ok);
    w
}

#[test]
fn fixed_points_round_trip_through_step() {
    let w = wedge();
    unsafe {
        for k in 1..=5 {
            let mut o = ptr::null_mut();
            assert_eq!(dodeca_wedge_fixed_point(w, k, &mut o), DodecaStatus::Ok);
            let o = take(o);
            let c = CString::new(o.clone()).unwrap();
            let mut next = ptr::null_mut();
            let mut piece = 0u32;
            assert_eq!(dodeca_wedge_step(w, c.as_ptr(), false, &mut next, &mut piece), DodecaStatus::Ok);
            assert_eq!(take(next), o);
            assert!((1..=6).contains(&piece));
            let mut period = 0;
            assert_eq!(dodeca_wedge_period(w, c.as_ptr(), 10, &mut period), DodecaStatus::Ok);
            assert_eq!(period, 1);
        }
        dodeca_wedge_free(w);
    }
}

#[test]
fn component_accessors() {
    let w = wedge();
    unsafe {
        let mut o = ptr::null_mut();
        dodeca_wedge_fixed_point(w, 4, &mut o);
        let o = CString::new(take(o)).unwrap();
        let mut c = ptr::null_mut();
        assert_eq!(dodeca_component_find(w, o.as_ptr(), 1_000_000, &mut c), DodecaStatus::Ok);
        assert_eq!(dodeca_component_vertex_count(c), 12);
        assert_eq!(dodeca_component_tprime_period(c), 1);
        assert!(dodeca_component_billiard_period(c) > 0);
        let mut v = ptr::null_mut();
        assert_eq!(dodeca_component_vertex(c, 11, &mut v), DodecaStatus::Ok);
        assert!(take(v).contains(','));
        assert_eq!(dodeca_component_vertex(c, 12, &mut v), DodecaStatus::OutOfRange);
        let mut area = ptr::null_mut();
        assert_eq!(dodeca_component_area(c, &mut area), DodecaStatus::Ok);
        assert!(take(area).ends_with("*s3"));
        dodeca_component_free(c);
        dodeca_wedge_free(w);
    }
}

#[test]
fn errors_set_status_and_message() {
    let w = wedge();
    unsafe {
        dodeca_clear_error();
        assert!(dodeca_last_error_message().is_null());
        let bad = CString::new("abc").unwrap();
        let mut out = ptr::null_mut();
        assert_eq!(dodeca_wedge_step(w, bad.as_ptr(), false, &mut out, ptr::null_mut()), DodecaStatus::Parse);
        assert!(last_error().contains("at byte 0"));
        assert_eq!(dodeca_wedge_step(ptr::null(), bad.as_ptr(), false, &mut out, ptr::null_mut()), DodecaStatus::NullArgument);
        let far = CString::new("-5,-5").unwrap();
        assert_eq!(dodeca_wedge_step(w, far.as_ptr(), false, &mut out, ptr::null_mut()), DodecaStatus::Boundary);
        assert_eq!(dodeca_wedge_fixed_point(w, 6, &mut out), DodecaStatus::OutOfRange);
        let mut set = ptr::null_mut();
        assert_eq!(dodeca_periods_new(0, &mut set), DodecaStatus::OutOfRange);
        assert!(last_error().contains("bound"));
        dodeca_wedge_free(w);
    }
}

#[test]
fn period_set_matches_core() {
    unsafe {
        let mut set = ptr::null_mut();
        assert_eq!(dodeca_periods_new(2000, &mut set), DodecaStatus::Ok);
        let expected = dodeca::periods::full_period_set(2000).unwrap().periods();
        let n = dodeca_periods_len(set);
        assert_eq!(n, expected.len());
        let mut buf = vec![0u64; n + 3];
        assert_eq!(dodeca_periods_copy(set, buf.as_mut_ptr(), buf.len()), n);
        assert_eq!(&buf[..n], &expected[..]);
        assert!(dodeca_periods_contains(set, expected[0]));
        assert!(!dodeca_periods_contains(set, 2001));
        dodeca_periods_free(set);
    }
}

#[test]
fn verify_runs_a_criterion() {
    unsafe {
        let mut outcome = DodecaOutcome::Fail;
        let mut detail = ptr::null_mut();
        assert_eq!(dodeca_verify(1, &mut outcome, &mut detail), DodecaStatus::Ok);
        assert_eq!(outcome, DodecaOutcome::Pass);
        assert!(!take(detail).is_empty());
        assert_eq!(dodeca_verify(11, &mut outcome, ptr::null_mut()), DodecaStatus::OutOfRange);
    }
}

#[test]
fn null_handles_are_harmless() {
    unsafe {
        dodeca_wedge_free(ptr::null_mut());
        dodeca_component_free(ptr::null_mut());
        dodeca_periods_free(ptr::null_mut());
        dodeca_string_free(ptr::null_mut());
        assert_eq!(dodeca_periods_len(ptr::null()), 0);
        assert_eq!(dodeca_component_vertex_count(ptr::null()), 0);
        let v = CStr::from_ptr(dodeca_version()).to_str().unwrap();
        assert_eq!(v, env!("CARGO_PKG_VERSION"));
    }
}
