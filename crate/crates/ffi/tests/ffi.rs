use std::ffi::{c_char, CStr, CString};
use std::ptr;

use xlie_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    xlie_string_free(s);
    out
}

unsafe fn last_error() -> String {
    CStr::from_ptr(xlie_last_error_message())
        .to_str()
        .unwrap()
        .to_string()
}

unsafe fn catalog(name: &str, field: &str) -> *mut XlieXMod {
    let mut h = ptr::null_mut();
    let status = xlie_catalog_emit(cstr(name).as_ptr(), cstr(field).as_ptr(), &mut h);
    assert_eq!(status, XlieStatus::Ok, "{}", last_error());
    h
}

#[test]
fn json_round_trip_and_validation() {
    unsafe {
        let h = catalog("id-h3", "Q");
        let mut json = ptr::null_mut();
        assert_eq!(xlie_xmod_to_json(h, &mut json), XlieStatus::Ok);
        let text = take(json);
        let mut back = ptr::null_mut();
        assert_eq!(
            xlie_xmod_from_json(cstr(&text).as_ptr(), &mut back),
            XlieStatus::Ok
        );
        let (mut n1, mut n0) = (0, 0);
        assert_eq!(xlie_xmod_dims(back, &mut n1, &mut n0), XlieStatus::Ok);
        assert_eq!((n1, n0), (3, 3));
        let mut report = ptr::null_mut();
        assert_eq!(xlie_xmod_validate(back, &mut report), XlieStatus::Ok);
        assert_eq!(take(report), "[]");
        assert_eq!(last_error(), "");
        xlie_xmod_free(h);
        xlie_xmod_free(back);
    }
}

#[test]
fn invalid_module_is_negative() {
    unsafe {
        let mut v: serde_json::Value = {
            let h = catalog("id-n2", "Q");
            let mut json = ptr::null_mut();
            xlie_xmod_to_json(h, &mut json);
            xlie_xmod_free(h);
            serde_json::from_str(&take(json)).unwrap()
        };
        v["action"] = serde_json::json!([]);
        let mut h = ptr::null_mut();
        assert_eq!(
            xlie_xmod_from_json(cstr(&v.to_string()).as_ptr(), &mut h),
            XlieStatus::Ok
        );
        let mut report = ptr::null_mut();
        assert_eq!(xlie_xmod_validate(h, &mut report), XlieStatus::Negative);
        assert!(take(report).contains("axiom"));
        assert!(!last_error().is_empty());
        let mut fp = ptr::null_mut();
        assert_eq!(xlie_fingerprint_json(h, &mut fp), XlieStatus::Negative);
        xlie_xmod_free(h);
    }
}

#[test]
fn malformed_input_and_null_pointers() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(
            xlie_xmod_from_json(cstr("{\"field\": ").as_ptr(), &mut h),
            XlieStatus::InvalidInput
        );
        assert!(last_error().contains("line"));
        assert!(h.is_null());
        assert_eq!(
            xlie_xmod_from_json(ptr::null(), &mut h),
            XlieStatus::NullPointer
        );
        assert_eq!(
            xlie_xmod_validate(ptr::null(), ptr::null_mut()),
            XlieStatus::NullPointer
        );
        assert_eq!(
            xlie_catalog_emit(cstr("h3").as_ptr(), cstr("Q").as_ptr(), &mut h),
            XlieStatus::InvalidInput
        );
        assert_eq!(
            xlie_catalog_emit(cstr("id-sl2").as_ptr(), cstr("F_2").as_ptr(), &mut h),
            XlieStatus::InvalidInput
        );
        xlie_xmod_free(ptr::null_mut());
        xlie_string_free(ptr::null_mut());
    }
}

#[test]
fn search_and_verify() {
    unsafe {
        let h = catalog("id-h3", "F_2");
        let ha = catalog("id-h3+a1", "F_2");
        let a = catalog("id-a3", "F_2");
        let mut w = ptr::null_mut();
        assert_eq!(
            xlie_isoclinism_search(h, ha, 1_000_000, 2, &mut w),
            XlieStatus::Ok
        );
        let witness = take(w);
        assert!(witness.contains("\"verified\":true"));
        assert_eq!(
            xlie_isoclinism_verify(h, ha, cstr(&witness).as_ptr()),
            XlieStatus::Ok
        );
        let mut bad: serde_json::Value = serde_json::from_str(&witness).unwrap();
        bad["xi1"] = serde_json::json!([["0"]]);
        assert_eq!(
            xlie_isoclinism_verify(h, ha, cstr(&bad.to_string()).as_ptr()),
            XlieStatus::Negative
        );
        bad["xi1"] = serde_json::json!([["0", "1"]]);
        assert_eq!(
            xlie_isoclinism_verify(h, ha, cstr(&bad.to_string()).as_ptr()),
            XlieStatus::InvalidInput
        );
        assert!(last_error().contains("xi1"));

        let mut w = ptr::null_mut();
        assert_eq!(
            xlie_isoclinism_search(h, a, 1_000, 1, &mut w),
            XlieStatus::Negative
        );
        assert!(w.is_null());
        assert!(last_error().starts_with("fingerprint"));
        assert_eq!(
            xlie_isoclinism_search(h, ha, 1, 1, &mut w),
            XlieStatus::BudgetExhausted
        );

        let mut fp = ptr::null_mut();
        assert_eq!(xlie_fingerprint_json(h, &mut fp), XlieStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(fp)).unwrap();
        assert_eq!(v["commutator"], serde_json::json!([1, 1]));
        for x in [h, ha, a] {
            xlie_xmod_free(x);
        }
    }
}

#[test]
fn search_over_q_is_refused() {
    unsafe {
        let h = catalog("id-h3", "Q");
        let mut w = ptr::null_mut();
        assert_eq!(
            xlie_isoclinism_search(h, h, 10, 1, &mut w),
            XlieStatus::InvalidInput
        );
        xlie_xmod_free(h);
    }
}

#[test]
fn version_is_set() {
    let v = unsafe { CStr::from_ptr(xlie_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
