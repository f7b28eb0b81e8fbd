use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use dtm_ffi::*;

fn cloud(coords: &[f64], dim: usize) -> *mut DtmCloud {
    let mut out = ptr::null_mut();
    let s = unsafe { dtm_cloud_new(coords.as_ptr(), coords.len() / dim, dim, &mut out) };
    assert_eq!(s, DtmStatus::Ok);
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(dtm_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn witnessed_and_exact_evaluation() {
    let c = cloud(&[0.0, 0.0, 2.0, 0.0], 2);
    let (mut n, mut dim) = (0, 0);
    assert_eq!(
        unsafe { dtm_cloud_shape(c, &mut n, &mut dim) },
        DtmStatus::Ok
    );
    assert_eq!((n, dim), (2, 2));

    let mut kd = ptr::null_mut();
    assert_eq!(unsafe { dtm_kdist_new(c, 2, &mut kd) }, DtmStatus::Ok);
    let mut w = ptr::null_mut();
    assert_eq!(unsafe { dtm_witnessed_new(c, 2, &mut w) }, DtmStatus::Ok);

    let x = [1.0, 1.0];
    let mut v = f64::NAN;
    assert_eq!(
        unsafe { dtm_kdist_eval(kd, x.as_ptr(), 2, &mut v) },
        DtmStatus::Ok
    );
    assert!((v - 2f64.sqrt()).abs() < 1e-12);
    let mut vw = f64::NAN;
    assert_eq!(
        unsafe { dtm_witnessed_eval(w, x.as_ptr(), 2, &mut vw) },
        DtmStatus::Ok
    );
    // Both witness sets are the whole cloud: barycenter (1,0), weight -1.
    assert!((vw - 2f64.sqrt()).abs() < 1e-12);

    assert_eq!(
        unsafe { dtm_witnessed_eval(w, x.as_ptr(), 1, &mut vw) },
        DtmStatus::InvalidArgument
    );
    assert!(last_error().contains("dimension"));

    unsafe {
        dtm_witnessed_free(w);
        dtm_kdist_free(kd);
        dtm_cloud_free(c);
    }
}

#[test]
fn error_codes() {
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { dtm_cloud_new(ptr::null(), 2, 2, &mut out) },
        DtmStatus::NullPointer
    );
    assert_eq!(
        unsafe { dtm_cloud_new([f64::NAN, 0.0].as_ptr(), 1, 2, &mut out) },
        DtmStatus::InvalidArgument
    );
    let c = cloud(&[0.0, 1.0, 2.0], 1);
    let mut w = ptr::null_mut();
    assert_eq!(unsafe { dtm_witnessed_new(c, 4, &mut w) }, DtmStatus::Guard);
    assert!(last_error().contains("exceeds"));
    assert_eq!(
        unsafe { dtm_witnessed_new(c, 0, &mut w) },
        DtmStatus::InvalidArgument
    );
    unsafe {
        dtm_cloud_free(c);
        dtm_cloud_free(ptr::null_mut());
    }
}

#[test]
fn wasserstein() {
    let (a, ma) = ([0.0, 1.0], [0.5, 0.5]);
    let (b, mb) = ([2.0, 3.0], [0.5, 0.5]);
    let mut w = f64::NAN;
    let s = unsafe {
        dtm_w2(
            a.as_ptr(),
            ma.as_ptr(),
            2,
            b.as_ptr(),
            mb.as_ptr(),
            2,
            1,
            &mut w,
        )
    };
    assert_eq!(s, DtmStatus::Ok);
    assert!((w - 2.0).abs() < 1e-12);

    let bad = [0.3, 0.3];
    let s = unsafe {
        dtm_w2(
            a.as_ptr(),
            bad.as_ptr(),
            2,
            b.as_ptr(),
            mb.as_ptr(),
            2,
            1,
            &mut w,
        )
    };
    assert_eq!(s, DtmStatus::InvalidArgument);

    let (p, q) = (cloud(&[-1.0, 1.0], 1), cloud(&[0.0], 1));
    assert_eq!(unsafe { dtm_w2_uniform(p, q, &mut w) }, DtmStatus::Ok);
    assert!((w - 1.0).abs() < 1e-12);
    unsafe {
        dtm_cloud_free(p);
        dtm_cloud_free(q);
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(dtm_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn header() -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/dtm.h")).unwrap()
}

#[test]
fn header_declares_every_symbol() {
    let h = header();
    for sym in [
        "DtmStatus",
        "DTM_STATUS_OK",
        "DTM_STATUS_GUARD",
        "typedef struct DtmCloud DtmCloud",
        "dtm_last_error_message(void)",
        "dtm_version(void)",
        "dtm_cloud_new(",
        "dtm_cloud_free(",
        "dtm_cloud_shape(",
        "dtm_witnessed_new(",
        "dtm_witnessed_eval(",
        "dtm_witnessed_free(",
        "dtm_kdist_new(",
        "dtm_kdist_eval(",
        "dtm_kdist_free(",
        "dtm_w2(",
        "dtm_w2_uniform(",
    ] {
        assert!(h.contains(sym), "header lacks {sym}");
    }
}

/// Directory holding this crate's build artifacts (`target/<profile>`).
fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_static_library() {
    let lib = artifact_dir().join("libdtm_ffi.a");
    let has_cc = Command::new("cc").arg("--version").output().is_ok();
    if !lib.exists() || !has_cc {
        eprintln!(
            "skipping: no C compiler or static library at {}",
            lib.display()
        );
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(
        &src,
        r#"
#include <math.h>
#include <stdio.h>
#include "dtm.h"
int main(void) {
    double pts[] = {0.0, 0.0, 2.0, 0.0};
    double x[] = {1.0, 1.0};
    DtmCloud *c = NULL;
    DtmWitnessed *w = NULL;
    double v = 0.0;
    if (dtm_cloud_new(pts, 2, 2, &c) != DTM_STATUS_OK) return 1;
    if (dtm_witnessed_new(c, 3, &w) != DTM_STATUS_GUARD) return 2;
    if (dtm_witnessed_new(c, 2, &w) != DTM_STATUS_OK) return 3;
    if (dtm_witnessed_eval(w, x, 2, &v) != DTM_STATUS_OK) return 4;
    if (fabs(v - sqrt(2.0)) > 1e-12) return 5;
    dtm_witnessed_free(w);
    dtm_cloud_free(c);
    printf("ok\n");
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.path().join("main");
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&exe).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "ok\n");
}
