use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use pmech_ffi::*;

fn cs(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(pmech_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn config_round_trip_and_errors() {
    unsafe {
        let mut cfg = ptr::null_mut();
        assert_eq!(pmech_config_parse(cs("seed = 11\n").as_ptr(), &mut cfg), PmechStatus::Ok);
        let mut seed = 0;
        assert_eq!(pmech_config_seed(cfg, &mut seed), PmechStatus::Ok);
        assert_eq!(seed, 11);
        assert_eq!(pmech_config_set_tolerance(cfg, cs("forced_pde").as_ptr(), 1e-4), PmechStatus::Ok);
        assert_eq!(pmech_config_set_tolerance(cfg, cs("forced_pde").as_ptr(), -1.0), PmechStatus::InvalidInput);
        assert_eq!(pmech_config_set_tolerance(cfg, cs("no_such").as_ptr(), 1.0), PmechStatus::InvalidInput);
        pmech_config_free(cfg);

        let mut bad = ptr::null_mut();
        assert_eq!(pmech_config_parse(cs("[grids]\nwidth = 1\n").as_ptr(), &mut bad), PmechStatus::InvalidInput);
        assert!(bad.is_null());
        assert!(last_error().contains("line 2"), "{}", last_error());
        assert_eq!(pmech_config_parse(ptr::null(), &mut bad), PmechStatus::NullPointer);
        assert_eq!(pmech_config_seed(ptr::null(), ptr::null_mut()), PmechStatus::NullPointer);
        pmech_config_free(ptr::null_mut());
    }
}

#[test]
fn verify_through_handles() {
    unsafe {
        let mut cfg = ptr::null_mut();
        assert_eq!(pmech_config_parse(cs("").as_ptr(), &mut cfg), PmechStatus::Ok);
        let mut rep = ptr::null_mut();
        assert_eq!(pmech_verify(cfg, cs("spaces").as_ptr(), &mut rep), PmechStatus::Ok);
        let (mut passed, mut total, mut failed) = (0, 0usize, 0usize);
        assert_eq!(pmech_report_passed(rep, &mut passed), PmechStatus::Ok);
        assert_eq!(pmech_report_counts(rep, &mut total, &mut failed), PmechStatus::Ok);
        assert_eq!((passed, failed), (1, 0));
        assert!(total > 0);
        let mut json = ptr::null_mut();
        assert_eq!(pmech_report_json(rep, &mut json), PmechStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert_eq!(v[0]["suite"], "spaces");
        pmech_string_free(json);
        pmech_report_free(rep);

        let mut none = ptr::null_mut();
        assert_eq!(pmech_verify(cfg, cs("astrology").as_ptr(), &mut none), PmechStatus::InvalidInput);
        assert!(none.is_null());
        pmech_config_free(cfg);
    }
}

#[test]
fn run_command_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    unsafe {
        let mut cfg = ptr::null_mut();
        let text = "command = cantrans\nformat = csv\n[cantrans]\nexample = rotshift\nt = 0.3\nc = 1\ncandidate = translated\n";
        assert_eq!(pmech_config_parse(cs(text).as_ptr(), &mut cfg), PmechStatus::Ok);
        let mut passed = -1;
        let out = cs(dir.path().to_str().unwrap());
        assert_eq!(pmech_run(cfg, out.as_ptr(), &mut passed), PmechStatus::Ok);
        assert_eq!(passed, 1);
        assert!(dir.path().join("cantrans.csv").exists());
        pmech_config_free(cfg);

        let text = "command = cantrans\n[cantrans]\nexample = custom\nf = q\nbig_f = Q\ng = p\nbig_g = 3*P\n";
        assert_eq!(pmech_config_parse(cs(text).as_ptr(), &mut cfg), PmechStatus::Ok);
        assert_eq!(pmech_run(cfg, out.as_ptr(), &mut passed), PmechStatus::InvalidInput);
        assert!(last_error().contains("not canonical"));
        pmech_config_free(cfg);
    }
}

#[test]
fn ctspec_and_energy() {
    unsafe {
        let mut spec = ptr::null_mut();
        let st = pmech_ctspec_parse(1, cs("q").as_ptr(), cs("-P").as_ptr(), cs("p").as_ptr(), cs("Q").as_ptr(), &mut spec);
        assert_eq!(st, PmechStatus::Ok);
        let mut d = f64::NAN;
        assert_eq!(pmech_ctspec_bracket_defect(spec, &mut d), PmechStatus::Ok);
        assert!(d < 1e-12);
        pmech_ctspec_free(spec);

        let st = pmech_ctspec_parse(2, cs("q1; q2").as_ptr(), cs("Q1").as_ptr(), cs("p1; p2").as_ptr(), cs("P1; P2").as_ptr(), &mut spec);
        assert_eq!(st, PmechStatus::InvalidInput);
        assert!(spec.is_null());

        let mut e = 0.0;
        assert_eq!(pmech_coulomb_energy(1, 2.0 * std::f64::consts::PI, &mut e), PmechStatus::Ok);
        assert!((e + 0.5).abs() < 1e-14);
        assert_eq!(pmech_coulomb_energy(0, 1.0, &mut e), PmechStatus::InvalidInput);
        let bytes = [0xffu8, 0];
        assert_eq!(
            pmech_ctspec_parse(1, bytes.as_ptr().cast(), cs("Q").as_ptr(), cs("p").as_ptr(), cs("P").as_ptr(), &mut spec),
            PmechStatus::InvalidUtf8
        );
    }
}

/// Compiles a C program against the generated header and the static library.
#[test]
fn header_compiles_and_links_from_c() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let libdir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = libdir.join("libpmech_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include "pmech.h"
int main(void) {
    PmechConfig *cfg = NULL;
    if (pmech_config_parse("seed = 5\n", &cfg) != PMECH_STATUS_OK) return 10;
    uint64_t seed = 0;
    pmech_config_seed(cfg, &seed);
    if (seed != 5) return 11;
    if (pmech_config_set_tolerance(cfg, "bogus", 1.0) != PMECH_STATUS_INVALID_INPUT) return 12;
    if (pmech_last_error()[0] == '\0') return 13;
    pmech_config_free(cfg);
    double e = 0.0;
    if (pmech_coulomb_energy(2, 6.283185307179586, &e) != PMECH_STATUS_OK) return 14;
    printf("%.15f\n", e);
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "-0.125000000000000");
}

fn which_cc() -> Result<String, ()> {
    ["cc", "gcc", "clang"]
        .iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
        .map(|c| c.to_string())
        .ok_or(())
}
