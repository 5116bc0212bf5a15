use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use symsep_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(symsep_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn stackel_round_trip() {
    let text = CString::new("name: line\nm: 1\nS[1,1]: 1\nf[1]: 1\nphi[1]: 0\ninterval[1]: -1, 1\n").unwrap();
    let mut h = ptr::null_mut();
    unsafe {
        assert_eq!(symsep_stackel_parse(text.as_ptr(), &mut h), SymsepStatus::Ok);
        let mut m = 0;
        assert_eq!(symsep_stackel_dim(h, &mut m), SymsepStatus::Ok);
        assert_eq!(m, 1);
        let mut sep = false;
        assert_eq!(symsep_stackel_is_separated(h, &mut sep), SymsepStatus::Ok);
        assert!(sep);
        // c1 = f p^2 + phi for S = [1].
        let mut c = [0.0];
        assert_eq!(symsep_stackel_constants(h, [0.2].as_ptr(), [3.0].as_ptr(), 1, c.as_mut_ptr()), SymsepStatus::Ok);
        assert!((c[0] - 9.0).abs() < 1e-12);
        symsep_stackel_free(h);
    }
}

#[test]
fn errors_are_reported() {
    let mut h = ptr::null_mut();
    unsafe {
        let bad = CString::new("name: x\nm: 1\nS[1,1]: 1 +\n").unwrap();
        assert_eq!(symsep_stackel_parse(bad.as_ptr(), &mut h), SymsepStatus::Parse);
        assert!(h.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(symsep_stackel_parse(ptr::null(), &mut h), SymsepStatus::NullPointer);
        let name = CString::new("missing").unwrap();
        assert_eq!(symsep_stackel_shipped(name.as_ptr(), &mut h), SymsepStatus::Io);
        let invalid = [0xffu8, 0];
        assert_eq!(symsep_stackel_shipped(invalid.as_ptr().cast(), &mut h), SymsepStatus::InvalidUtf8);
        symsep_stackel_free(ptr::null_mut());
        symsep_report_free(ptr::null_mut());
        assert!(symsep_report_json(ptr::null()).is_null());
    }
}

#[test]
fn verify_through_the_abi() {
    let id = CString::new("f4").unwrap();
    let mut rep = ptr::null_mut();
    unsafe {
        assert_eq!(symsep_verify(id.as_ptr(), 3, &mut rep), SymsepStatus::Ok);
        let mut ok = false;
        assert_eq!(symsep_report_passed(rep, &mut ok), SymsepStatus::Ok);
        assert!(ok);
        let json = CStr::from_ptr(symsep_report_json(rep)).to_str().unwrap().to_owned();
        assert_eq!(json, symsep::verify::render_json(3, &[symsep::verify::run_check("f4", &symsep::verify::RunConfig::new(3)).unwrap()]));
        symsep_report_free(rep);
        let v = CStr::from_ptr(symsep_version()).to_str().unwrap();
        assert_eq!(v, env!("CARGO_PKG_VERSION"));
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/symsep.h")).unwrap();
    for f in [
        "symsep_last_error",
        "symsep_version",
        "symsep_stackel_parse",
        "symsep_stackel_shipped",
        "symsep_stackel_free",
        "symsep_stackel_dim",
        "symsep_stackel_is_separated",
        "symsep_stackel_constants",
        "symsep_verify",
        "symsep_report_passed",
        "symsep_report_json",
        "symsep_report_free",
        "typedef struct SymsepStackel SymsepStackel;",
        "SYMSEP_STATUS_BUFFER_TOO_SMALL = 7",
    ] {
        assert!(header.contains(f), "{f}");
    }
}

/// Directory holding the library artifacts of this build profile.
fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_the_static_library() {
    let lib = artifact_dir().join("libsymsep_ffi.a");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if !lib.exists() || Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or static library at {}", lib.display());
        return;
    }
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let out = tempfile_path("symsep_smoke");
    let status = Command::new(&cc)
        .arg(dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&out).output().unwrap();
    let _ = std::fs::remove_file(&out);
    assert!(run.status.success(), "exit {:?}: {}", run.status.code(), String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}

fn tempfile_path(stem: &str) -> PathBuf {
    std::env::temp_dir().join(format!("{stem}-{}", std::process::id()))
}
