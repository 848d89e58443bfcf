use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use veroweb_ffi::*;

const COUPLE: &str = include_str!("../../veroweb/fixtures/couple.json");

fn fixture(name: &str) -> String {
    format!("{}/../veroweb/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn last_error() -> String {
    let p = vw_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

fn report_json(r: *const VwReport) -> serde_json::Value {
    let s = unsafe { CStr::from_ptr(vw_report_json(r)) }.to_str().unwrap();
    serde_json::from_str(s).unwrap()
}

#[test]
fn couple_handle_reports_char_numbers_and_curve() {
    let json = CString::new(COUPLE).unwrap();
    let mut c = ptr::null_mut();
    unsafe {
        assert_eq!(vw_couple_parse(json.as_ptr(), &mut c), VwStatus::Ok);
        assert_eq!(vw_couple_dim(c), 4);
        let mut len = 0usize;
        assert_eq!(vw_couple_char_numbers(c, ptr::null_mut(), 0, &mut len), VwStatus::BufferTooSmall);
        let mut buf = vec![0usize; len];
        assert_eq!(vw_couple_char_numbers(c, buf.as_mut_ptr(), len, &mut len), VwStatus::Ok);
        assert_eq!((buf.len(), buf.iter().sum::<usize>()), (2, 4));
        assert!(buf.windows(2).all(|w| w[0] >= w[1]));
        let mut s = ptr::null_mut();
        assert_eq!(vw_couple_curve_json(c, &mut s), VwStatus::Ok);
        let curve: serde_json::Value = serde_json::from_str(CStr::from_ptr(s).to_str().unwrap()).unwrap();
        assert!(curve.is_object() || curve.is_array());
        vw_string_free(s);
        vw_couple_free(c);
    }
}

#[test]
fn error_codes_and_messages() {
    let mut c = ptr::null_mut();
    let mut r = ptr::null_mut();
    unsafe {
        assert_eq!(vw_couple_parse(ptr::null(), &mut c), VwStatus::NullArgument);
        let bad =
            CString::new(r#"{"schema":"veroweb/couple@1","J":[["0","x"],["0","0"]],"W":{"ambient":2,"basis":[]}}"#)
                .unwrap();
        assert_eq!(vw_couple_parse(bad.as_ptr(), &mut c), VwStatus::Schema);
        assert!(last_error().contains("/J/0/1"), "{}", last_error());
        let cmd = CString::new("no such command").unwrap();
        assert_eq!(vw_run_document(cmd.as_ptr(), bad.as_ptr(), 6, 1, 0, &mut r), VwStatus::Usage);
        let not_utf8 = [0xffu8, 0];
        assert_eq!(vw_couple_parse(not_utf8.as_ptr().cast(), &mut c), VwStatus::InvalidUtf8);
        // success clears the message
        let good = CString::new(COUPLE).unwrap();
        assert_eq!(vw_couple_parse(good.as_ptr(), &mut c), VwStatus::Ok);
        assert!(vw_last_error().is_null());
        vw_couple_free(c);
        assert_eq!(vw_report_exit_code(ptr::null()), -1);
        vw_report_free(ptr::null_mut());
        vw_string_free(ptr::null_mut());
    }
}

#[test]
fn documents_and_command_lines_agree() {
    let doc = CString::new(std::fs::read_to_string(fixture("codim_two_web.json")).unwrap()).unwrap();
    let cmd = CString::new("web verify").unwrap();
    let mut a = ptr::null_mut();
    let mut b = ptr::null_mut();
    let args: Vec<CString> = ["--order", "6", "web", "verify", "--in", &fixture("codim_two_web.json")]
        .iter()
        .map(|s| CString::new(*s).unwrap())
        .collect();
    let argv: Vec<*const std::ffi::c_char> = args.iter().map(|s| s.as_ptr()).collect();
    unsafe {
        assert_eq!(vw_run_document(cmd.as_ptr(), doc.as_ptr(), 6, veroweb::cli::DEFAULT_SEED, 0, &mut a), VwStatus::Ok);
        assert_eq!(vw_run_args(argv.len(), argv.as_ptr(), &mut b), VwStatus::Ok);
        assert_eq!(vw_report_exit_code(a), 0);
        assert_eq!(report_json(a), report_json(b));
        assert_eq!(report_json(a)["verdict"], "pass");
        let t = vw_report_text(a);
        assert!(CStr::from_ptr(t).to_str().unwrap().contains("verdict: pass"));
        vw_string_free(t);
        vw_report_free(a);
        vw_report_free(b);
        let bad = [CString::new("pencil").unwrap()];
        let argv = [bad[0].as_ptr()];
        assert_eq!(vw_run_args(1, argv.as_ptr(), &mut b), VwStatus::Usage);
    }
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(vw_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn c_program_links_against_the_header() {
    // cargo leaves every crate type of the library beside the test binary
    let deps = std::env::current_exe().unwrap().parent().unwrap().to_path_buf();
    let libdir: PathBuf = deps.clone();
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = deps.join("veroweb_ffi_smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg("-L")
        .arg(&libdir)
        .arg(format!("-Wl,-rpath,{}", libdir.display()))
        .args(["-lveroweb_ffi", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success(), "{text}");
    assert!(text.starts_with("dim 4 char"), "{text}");
    assert!(text.contains("exit 0"), "{text}");
    assert!(text.contains("error schema error"), "{text}");
}
