use fixrank_ffi::*;
use std::ffi::{CStr, CString};
use std::ptr;

fn last_error() -> String {
    unsafe { CStr::from_ptr(fx_last_error()).to_string_lossy().into_owned() }
}

fn field(name: &str) -> *mut FxField {
    let c = CString::new(name).unwrap();
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { fx_field_builtin(c.as_ptr(), &mut f) }, FxStatus::Ok);
    f
}

#[test]
fn field_handles() {
    let f = field("Qi");
    let mut d = 0usize;
    let mut disc = 0i64;
    unsafe {
        assert_eq!(fx_field_degree(f, &mut d), FxStatus::Ok);
        assert_eq!(fx_field_discriminant(f, &mut disc), FxStatus::Ok);
        fx_field_free(f);
    }
    assert_eq!((d, disc), (2, -4));

    let c = CString::new("nope").unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { fx_field_builtin(c.as_ptr(), &mut g) }, FxStatus::InvalidInput);
    assert!(last_error().contains("nope"));
    assert!(g.is_null());

    let coeffs = [-2i64, 0, 1];
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { fx_field_from_poly(coeffs.as_ptr(), 3, &mut h) }, FxStatus::Ok);
    unsafe { fx_field_free(h) };
    let reducible = [-4i64, 0, 1];
    assert_eq!(unsafe { fx_field_from_poly(reducible.as_ptr(), 3, &mut h) }, FxStatus::InvalidInput);
}

#[test]
fn null_pointers_are_reported() {
    assert_eq!(unsafe { fx_field_builtin(ptr::null(), ptr::null_mut()) }, FxStatus::NullPointer);
    let mut d = 0usize;
    assert_eq!(unsafe { fx_field_degree(ptr::null(), &mut d) }, FxStatus::NullPointer);
    unsafe {
        fx_field_free(ptr::null_mut());
        fx_lattice_free(ptr::null_mut());
    }
}

#[test]
fn lattices() {
    let q = field("Q");
    let mut l = ptr::null_mut();
    let mut count = 0u64;
    let mut covol = 0.0;
    unsafe {
        assert_eq!(fx_lattice_ok_power(q, 2, &mut l), FxStatus::Ok);
        assert_eq!(fx_lattice_count_within(l, 1.5, &mut count), FxStatus::Ok);
        fx_lattice_free(l);
    }
    assert_eq!(count, 9);

    let rows = [1u64, 0];
    let mut rank = 0usize;
    unsafe {
        assert_eq!(fx_lattice_hecke_neighbor(q, 2, 2, rows.as_ptr(), 1, &mut l), FxStatus::Ok);
        assert_eq!(fx_lattice_covolume(l, &mut covol), FxStatus::Ok);
        assert_eq!(fx_lattice_rank(l, &mut rank), FxStatus::Ok);
        fx_lattice_free(l);
    }
    assert!((covol - 1.0).abs() < 1e-10);
    assert_eq!(rank, 2);
    assert_eq!(
        unsafe { fx_lattice_count_within(ptr::null(), 1.0, &mut count) },
        FxStatus::NullPointer
    );
    unsafe { fx_field_free(q) };
}

#[test]
fn counts_and_moments() {
    let q = field("Q");
    let mut c = 0u64;
    let mut v = 0.0;
    unsafe {
        assert_eq!(fx_count_rank(q, 2, 1, 1, 2.0, 1.0, &mut c), FxStatus::Ok);
        assert_eq!(c, 12);
        assert_eq!(fx_count_rank(q, 3, 2, 1, 1e6, 1.0, &mut c), FxStatus::CapExceeded);
        assert_eq!(fx_c1_estimate(q, 3, 1, 1, 1.0, 10.0, 0, 0, &mut v), FxStatus::Ok);
        assert!((v - 4.0 / 3.0 * std::f64::consts::PI).abs() < 1e-12);
        assert_eq!(fx_moment(q, 2, 2, 2, 1, 1.5, true, 0, 0, &mut v), FxStatus::Ok);
        assert_eq!(v, 9.0);
        fx_field_free(q);
    }
}

#[test]
fn finite_field_counts() {
    let mut g = 0u64;
    let (mut a, mut b) = (0u64, 0u64);
    unsafe {
        assert_eq!(fx_gaussian_binomial(2, 4, 3, &mut g), FxStatus::Ok);
        assert_eq!(fx_containment_probability(1, 1, 2, 2, &mut a, &mut b), FxStatus::Ok);
        assert_eq!(fx_gaussian_binomial(30, 60, 1_000_003, &mut g), FxStatus::Overflow);
    }
    assert_eq!((a, b), (1, 3));
}

#[test]
fn header_is_valid_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/fixrank.h");
    let text = std::fs::read_to_string(header).unwrap();
    for f in ["fx_field_builtin", "fx_lattice_hecke_neighbor", "fx_moment", "FX_STATUS_CAP_EXCEEDED"] {
        assert!(text.contains(f), "{f} missing from header");
    }
    let Ok(out) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-x", "c", header])
        .output()
    else {
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
