use nilspec_ffi::*;
use std::ffi::CStr;
use std::path::Path;
use std::ptr;

fn last_error() -> String {
    unsafe { CStr::from_ptr(ns_last_error_message()) }.to_string_lossy().into_owned()
}

#[test]
fn catalog_and_exponents() {
    let (mut v, mut m) = (0.0, 0u64);
    assert_eq!(unsafe { ns_catalog_lowest(1, 0, 1.0, &mut v, &mut m) }, NsStatus::Ok);
    assert!((v - 2.0).abs() < 1e-12);
    assert_eq!(m, 1);
    assert_eq!(last_error(), "");

    let (mut num, mut den) = (0u64, 0u64);
    assert_eq!(unsafe { ns_alpha_closed_form(NsGroupKind::Heisenberg, 1, 0, &mut num, &mut den) }, NsStatus::Ok);
    assert_eq!((num, den), (2, 1));

    let (mut lo, mut hi) = (0.0, 0.0);
    assert_eq!(unsafe { ns_dgroup_lowest_bracket(2, 1.0, &mut lo, &mut hi) }, NsStatus::Ok);
    assert!(0.0 < lo && lo <= hi);
}

#[test]
fn errors_map_to_codes() {
    let mut v = 0.0;
    assert_eq!(unsafe { ns_catalog_lowest(1, 0, 1.0, ptr::null_mut(), ptr::null_mut()) }, NsStatus::NullPointer);
    assert!(last_error().contains("null"));
    let mut m = 0u64;
    let s = unsafe { ns_catalog_lowest(0, 0, 1.0, &mut v, &mut m) };
    assert_ne!(s, NsStatus::Ok);
    assert!(!last_error().is_empty());
    let (mut lo, mut hi) = (0.0, 0.0);
    assert_eq!(unsafe { ns_dgroup_lowest_bracket(1, 0.0, &mut lo, &mut hi) }, NsStatus::Precondition);
}

#[test]
fn heisenberg_handle_lifecycle() {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { ns_heisenberg_new(1, 1.0, 1, &mut h) }, NsStatus::Ok);
    assert!(!h.is_null());

    let gamma = [0i32];
    let mut len = 0usize;
    let s = unsafe { ns_heisenberg_block_spectrum(h, gamma.as_ptr(), 1, ptr::null_mut(), 0, &mut len) };
    assert_eq!(s, NsStatus::BufferTooSmall);
    assert_eq!(len, 2);
    let mut buf = vec![0.0; len];
    let s = unsafe { ns_heisenberg_block_spectrum(h, gamma.as_ptr(), 1, buf.as_mut_ptr(), buf.len(), &mut len) };
    assert_eq!(s, NsStatus::Ok);
    assert!((buf[0] - 2.0).abs() < 1e-12 && (buf[1] - 4.0).abs() < 1e-12);

    let wrong = [0i32, 0];
    let s = unsafe { ns_heisenberg_block_spectrum(h, wrong.as_ptr(), 2, buf.as_mut_ptr(), buf.len(), &mut len) };
    assert_eq!(s, NsStatus::Dimension);

    let mut low = 0.0;
    assert_eq!(unsafe { ns_heisenberg_lowest(h, 3, &mut low) }, NsStatus::Ok);
    assert!((low - 1.0).abs() < 1e-10, "{low}");

    unsafe { ns_heisenberg_free(h) };
    unsafe { ns_heisenberg_free(ptr::null_mut()) };
}

#[test]
fn fit_and_suite() {
    let t: Vec<f64> = (0..20).map(|i| 100.0 * 1.5f64.powi(i)).collect();
    let theta: Vec<f64> = t.iter().map(|t| 3.0 * t.powf(-1.5)).collect();
    let (mut a, mut se) = (0.0, 0.0);
    assert_eq!(unsafe { ns_fit_alpha(t.as_ptr(), theta.as_ptr(), t.len(), &mut a, &mut se) }, NsStatus::Ok);
    assert!((a - 1.5).abs() < 1e-8);

    assert_eq!(unsafe { ns_heat_exponent(NsGroupKind::Heisenberg, 1, 0, &mut a, ptr::null_mut()) }, NsStatus::Ok);
    assert!((a - 2.0).abs() < 0.1);

    let mut passed = 0;
    assert_eq!(unsafe { ns_verify_suite(c"appendixA".as_ptr(), &mut passed) }, NsStatus::Ok);
    assert_eq!(passed, 1);
    assert_eq!(unsafe { ns_verify_suite(c"nope".as_ptr(), &mut passed) }, NsStatus::Input);
}

#[test]
fn header_compiles_as_c() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = dir.join("include/nilspec.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in ["ns_last_error_message", "ns_heisenberg_new", "ns_heisenberg_block_spectrum", "NS_STATUS_BUFFER_TOO_SMALL"] {
        assert!(text.contains(f), "header lacks {f}");
    }
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("probe.c");
    std::fs::write(
        &src,
        "#include \"nilspec.h\"\n\
         int probe(void) {\n\
           NsHeisenberg *h = 0; double v; uint64_t m;\n\
           if (ns_heisenberg_new(1, 1.0, 0, &h) != NS_STATUS_OK) return 1;\n\
           ns_heisenberg_free(h);\n\
           return ns_catalog_lowest(1, 0, 1.0, &v, &m) == NS_STATUS_OK ? 0 : (int)*ns_last_error_message();\n\
         }\n",
    )
    .unwrap();
    let Ok(out) = std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(dir.join("include"))
        .arg(&src)
        .output()
    else {
        eprintln!("no C compiler found; header syntax check skipped");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
