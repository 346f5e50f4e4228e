use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use homlab_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(hl_last_error_message()) }.to_string_lossy().into_owned()
}

fn bernoulli(side: u32, seed: u64) -> *mut HlField {
    let spec = CString::new(r#"{"kind": "bernoulli", "lambda": 0.25, "alpha": 0.25, "beta": 1.0, "p_low": 0.5}"#).unwrap();
    let mut h = ptr::null_mut();
    let s = unsafe { hl_field_sample(spec.as_ptr(), 2, side, seed, 0, &mut h) };
    assert_eq!(s, HlStatus::Ok, "{}", last_error());
    h
}

#[test]
fn sample_values_and_free() {
    let h = bernoulli(4, 3);
    unsafe {
        assert_eq!(hl_field_dim(h), 2);
        assert_eq!(hl_field_side(h), 4);
        assert_eq!(hl_field_lambda(h), 0.25);
        let n = hl_field_num_edges(h);
        assert_eq!(n, 32);
        let mut v = vec![0.0; n];
        assert_eq!(hl_field_values(h, v.as_mut_ptr(), n), HlStatus::Ok);
        assert!(v.iter().all(|x| *x == 0.25 || *x == 1.0));
        assert_eq!(hl_field_values(h, v.as_mut_ptr(), n - 1), HlStatus::SizeMismatch);
        assert!(last_error().contains("31"));
        hl_field_free(h);
        hl_field_free(ptr::null_mut());
    }
}

#[test]
fn constant_field_solves() {
    let vals = vec![0.5; 2 * 16];
    let mut h = ptr::null_mut();
    unsafe {
        assert_eq!(hl_field_new(2, 4, 0.25, vals.as_ptr(), vals.len(), &mut h), HlStatus::Ok);
        let xi = [1.0, 0.0];
        let mut phi = vec![1.0; 16];
        let mut res = f64::NAN;
        assert_eq!(hl_solve_corrector(h, xi.as_ptr(), 2, 0.0, phi.as_mut_ptr(), 16, &mut res), HlStatus::Ok);
        assert!(phi.iter().all(|p| *p == 0.0));
        assert!(res <= 1e-10);
        let mut m = [0.0; 4];
        assert_eq!(hl_homogenized_matrix(h, 0.0, m.as_mut_ptr(), 4), HlStatus::Ok);
        assert!((m[0] - 0.5).abs() < 1e-14 && (m[3] - 0.5).abs() < 1e-14);
        assert!(m[1].abs() < 1e-14 && m[2].abs() < 1e-14);
        assert_eq!(hl_solve_corrector(h, xi.as_ptr(), 1, 0.0, phi.as_mut_ptr(), 16, ptr::null_mut()), HlStatus::SizeMismatch);
        hl_field_free(h);
    }
}

#[test]
fn error_codes() {
    let mut h = ptr::null_mut();
    let bad = [2.0; 8];
    unsafe {
        assert_eq!(hl_field_new(2, 2, 0.25, bad.as_ptr(), 8, &mut h), HlStatus::InvalidArgument);
        assert!(h.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(hl_field_new(2, 2, 0.25, ptr::null(), 8, &mut h), HlStatus::NullPointer);
        assert_eq!(hl_field_values(ptr::null(), ptr::null_mut(), 0), HlStatus::NullPointer);
        let spec = CString::new("{\"kind\": \"nope\"}").unwrap();
        assert_eq!(hl_field_sample(spec.as_ptr(), 2, 4, 0, 0, &mut h), HlStatus::InvalidArgument);
        let missing = CString::new("/nonexistent/field.hgl").unwrap();
        assert_eq!(hl_field_load(missing.as_ptr(), &mut h), HlStatus::Io);
    }
}

#[test]
fn dump_load_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("a.hgl").to_str().unwrap()).unwrap();
    let h = bernoulli(8, 11);
    unsafe {
        assert_eq!(hl_field_dump(h, path.as_ptr()), HlStatus::Ok);
        let mut g = ptr::null_mut();
        assert_eq!(hl_field_load(path.as_ptr(), &mut g), HlStatus::Ok);
        let n = hl_field_num_edges(h);
        let (mut a, mut b) = (vec![0.0; n], vec![0.0; n]);
        hl_field_values(h, a.as_mut_ptr(), n);
        hl_field_values(g, b.as_mut_ptr(), n);
        assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
        std::fs::write(dir.path().join("bad.hgl"), b"XXXX0000").unwrap();
        let bad = CString::new(dir.path().join("bad.hgl").to_str().unwrap()).unwrap();
        let mut k = ptr::null_mut();
        assert_eq!(hl_field_load(bad.as_ptr(), &mut k), HlStatus::Format);
        assert!(last_error().contains("HGL1"));
        hl_field_free(h);
        hl_field_free(g);
    }
}

#[test]
fn header_is_valid_c() {
    let header = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/homlab.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in [
        "hl_field_new",
        "hl_field_sample",
        "hl_field_load",
        "hl_field_dump",
        "hl_field_free",
        "hl_field_values",
        "hl_solve_corrector",
        "hl_homogenized_matrix",
        "hl_last_error_message",
        "HL_STATUS_OK",
        "typedef struct HlField HlField",
    ] {
        assert!(text.contains(f), "{f} missing from header");
    }
    let Ok(out) = Command::new("cc").args(["-fsyntax-only", "-x", "c", "-std=c99", "-Wall", "-Werror"]).arg(&header).output()
    else {
        eprintln!("no C compiler found; skipping syntax check");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
