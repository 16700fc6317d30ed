use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::path::Path;
use std::ptr;

use modulo_ffi::*;

const QR: &str = "prop P prop Q prop R\nrule r : P --> Q => R\n";
const SELF_REF: &str = "prop P prop R\nrule r : P --> P => R\n";

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn theory(src: &str) -> *mut ModuloTheory {
    let mut t = ptr::null_mut();
    let s = c(src);
    assert_eq!(unsafe { modulo_theory_parse(s.as_ptr(), &mut t) }, ModuloStatus::Ok);
    assert!(!t.is_null());
    t
}

fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { modulo_string_free(s) };
    out
}

fn last_error() -> Option<String> {
    let p = modulo_last_error();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string())
}

#[test]
fn parse_print_and_free() {
    let t = theory(QR);
    assert_eq!(unsafe { modulo_theory_rule_count(t) }, 1);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { modulo_theory_print(t, &mut out) }, ModuloStatus::Ok);
    let text = take(out);
    assert!(text.contains("rule r : P --> Q => R"), "{text}");
    unsafe { modulo_theory_free(t) };
    unsafe { modulo_theory_free(ptr::null_mut()) };
    assert_eq!(unsafe { modulo_theory_rule_count(ptr::null()) }, 0);
}

#[test]
fn parse_error_sets_message() {
    let mut t = ptr::null_mut();
    let s = c("prop P prop Q prop R\nrule bad : (Q => R) --> P");
    assert_eq!(unsafe { modulo_theory_parse(s.as_ptr(), &mut t) }, ModuloStatus::ParseError);
    assert!(t.is_null());
    let msg = last_error().unwrap();
    assert!(msg.starts_with("2:"), "{msg}");
}

#[test]
fn null_and_utf8_errors() {
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { modulo_theory_parse(ptr::null(), &mut t) }, ModuloStatus::NullPointer);
    let bad = [0xffu8, 0xfe, 0];
    assert_eq!(
        unsafe { modulo_theory_parse(bad.as_ptr() as *const c_char, &mut t) },
        ModuloStatus::InvalidUtf8
    );
    let s = c(QR);
    assert_eq!(unsafe { modulo_theory_parse(s.as_ptr(), ptr::null_mut()) }, ModuloStatus::NullPointer);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { modulo_theory_print(ptr::null(), &mut out) }, ModuloStatus::NullPointer);
}

#[test]
fn check_and_normalize() {
    let t = theory(SELF_REF);
    let proofs = c("proof omega : |- R := (fun x : P . x x) (fun x : P . x x)");
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { modulo_check_proofs(t, proofs.as_ptr(), &mut out) }, ModuloStatus::Ok);
    let report: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(report["proofs"][0]["accepted"], true);

    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { modulo_normalize_proofs(t, proofs.as_ptr(), 10, &mut out) },
        ModuloStatus::LogicalFailure
    );
    let report: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(report["proofs"][0]["outcome"]["kind"], "cycle");
    assert_eq!(report["proofs"][0]["outcome"]["step"], 1);
    assert!(last_error().is_some());
    unsafe { modulo_theory_free(t) };
}

#[test]
fn rejected_proof_is_a_logical_failure() {
    let t = theory(QR);
    let proofs = c("proof wrong : q : Q |- R := q");
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { modulo_check_proofs(t, proofs.as_ptr(), &mut out) },
        ModuloStatus::LogicalFailure
    );
    let report: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(report["proofs"][0]["accepted"], false);
    unsafe { modulo_theory_free(t) };
}

#[test]
fn search_in_each_system() {
    let t = theory(QR);
    let seq = c("p : P, q : Q |- R");
    for sys in ["modulo", "foldunfold", "supernatural"] {
        let s = c(sys);
        let mut out = ptr::null_mut();
        assert_eq!(unsafe { modulo_search(t, seq.as_ptr(), s.as_ptr(), 6, &mut out) }, ModuloStatus::Ok);
        let report: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(report["checked"], true, "{sys}");
    }
    let s = c("classical");
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { modulo_search(t, seq.as_ptr(), s.as_ptr(), 6, &mut out) },
        ModuloStatus::ParseError
    );
    unsafe { modulo_theory_free(t) };

    let t = theory(SELF_REF);
    let goal = c("|- R");
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { modulo_search(t, goal.as_ptr(), ptr::null(), 8, &mut out) },
        ModuloStatus::LogicalFailure
    );
    let report: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert!(report["proof"].is_null());
    unsafe { modulo_theory_free(t) };
}

#[test]
fn algebras_and_models() {
    let mut a = ptr::null_mut();
    let name = c("doubled_top");
    assert_eq!(unsafe { modulo_algebra_named(name.as_ptr(), &mut a) }, ModuloStatus::Ok);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { modulo_algebra_laws(a, &mut out) }, ModuloStatus::Ok);
    let report: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(report["algebras"][0]["is_heyting"], false);
    assert_eq!(report["algebras"][0]["is_tva"], true);

    let t = theory(QR);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { modulo_model_find(t, a, 1, &mut out) }, ModuloStatus::Ok);
    let report: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(report["model"]["P"], "t");
    unsafe { modulo_algebra_free(a) };

    let lat = c("lattice c4\nelements 0 1 2 3\nle 0 1\nle 1 2\nle 2 3\ntop 3\nbot 0\n");
    let mut a = ptr::null_mut();
    assert_eq!(unsafe { modulo_algebra_from_lattice(lat.as_ptr(), &mut a) }, ModuloStatus::Ok);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { modulo_algebra_laws(a, &mut out) }, ModuloStatus::Ok);
    take(out);
    unsafe { modulo_algebra_free(a) };

    let pentagon = c("elements 0 a b c 1\nle 0 a\nle a c\nle c 1\nle 0 b\nle b 1\ntop 1\nbot 0\n");
    let mut a = ptr::null_mut();
    assert_eq!(
        unsafe { modulo_algebra_from_lattice(pentagon.as_ptr(), &mut a) },
        ModuloStatus::ParseError
    );
    assert!(last_error().unwrap().contains("distributive"));

    let mut out = ptr::null_mut();
    assert_eq!(unsafe { modulo_super_consistency(t, 1, &mut out) }, ModuloStatus::Ok);
    let report: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(report["outcomes"].as_array().unwrap().len(), 4);
    unsafe { modulo_theory_free(t) };
}

#[test]
fn success_clears_last_error() {
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { modulo_theory_parse(ptr::null(), &mut t) }, ModuloStatus::NullPointer);
    assert!(last_error().is_some());
    let t = theory(QR);
    assert!(last_error().is_none());
    unsafe { modulo_theory_free(t) };
}

#[test]
fn header_declares_the_surface() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/modulo.h")).unwrap();
    for sym in [
        "typedef struct ModuloTheory ModuloTheory;",
        "typedef struct ModuloAlgebra ModuloAlgebra;",
        "MODULO_STATUS_OK = 0",
        "MODULO_STATUS_LOGICAL_FAILURE = 1",
        "MODULO_STATUS_PARSE_ERROR = 2",
        "MODULO_STATUS_NULL_POINTER = 3",
        "MODULO_STATUS_INVALID_UTF8 = 4",
        "MODULO_STATUS_PANIC = 5",
        "modulo_theory_parse(",
        "modulo_check_proofs(",
        "modulo_normalize_proofs(",
        "modulo_search(",
        "modulo_super_consistency(",
        "modulo_algebra_laws(",
        "modulo_model_find(",
        "const char *modulo_last_error(void);",
        "void modulo_string_free(char *s);",
    ] {
        assert!(header.contains(sym), "missing {sym}");
    }
}

#[test]
fn header_compiles_as_c() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let src = std::env::temp_dir().join("modulo_header_check.c");
    std::fs::write(&src, "#include \"modulo.h\"\nint main(void) { return MODULO_STATUS_OK; }\n").unwrap();
    let status = std::process::Command::new("cc")
        .arg("-fsyntax-only")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&dir)
        .arg(&src)
        .status();
    match status {
        Ok(s) => assert!(s.success(), "header does not compile"),
        Err(e) => eprintln!("skipping: no C compiler ({e})"),
    }
}
