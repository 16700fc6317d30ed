//! C ABI over the proof kernel.
//!
//! Theories and algebras live behind opaque handles. Every fallible entry
//! point returns a [`ModuloStatus`]; on any status other than `Ok` a message
//! is available from [`modulo_last_error`] on the same thread. Strings
//! returned through `char **` out-parameters are owned by the caller and
//! must be released with [`modulo_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use modulo::frontend::cli::{self, CliError, Report};
use modulo::frontend::{parse_lattice, parse_proofs, parse_sequent, parse_theory, print_theory, Theory};
use modulo::proofs::SystemKind;
use modulo::tva::{bundled_battery, make_algebra, AlgebraSpec, TableAlgebra};
use modulo::Budgets;

/// Result codes shared by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModuloStatus {
    Ok = 0,
    /// The input was well formed but the check failed: a rejected proof,
    /// a non-terminating reduction, no model, no proof found.
    LogicalFailure = 1,
    /// Syntax, sort or usage error in an input.
    ParseError = 2,
    NullPointer = 3,
    InvalidUtf8 = 4,
    /// An internal panic was caught at the boundary.
    Panic = 5,
}

/// A parsed theory.
pub struct ModuloTheory {
    theory: Theory,
}

/// A finite truth values algebra.
pub struct ModuloAlgebra {
    algebra: TableAlgebra,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Fail(ModuloStatus, String);

impl From<CliError> for Fail {
    fn from(e: CliError) -> Self {
        Fail(ModuloStatus::ParseError, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<ModuloStatus, Fail>) -> ModuloStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            ModuloStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(ModuloStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(ModuloStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref()
        .ok_or_else(|| Fail(ModuloStatus::NullPointer, format!("{what} is null")))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(ModuloStatus::NullPointer, "output pointer is null".into()));
    }
    let c = CString::new(s.replace('\0', " ")).expect("no interior nul");
    *out = c.into_raw();
    Ok(())
}

unsafe fn emit(out: *mut *mut c_char, report: Report) -> Result<ModuloStatus, Fail> {
    write_string(out, serde_json::to_string(&report.json).expect("serializable"))?;
    if report.ok {
        Ok(ModuloStatus::Ok)
    } else {
        set_error("check failed; see the report");
        Ok(ModuloStatus::LogicalFailure)
    }
}

fn budgets(t: &Theory) -> Result<Budgets, Fail> {
    Ok(cli::resolve_budgets(Some(t), None)?)
}

/// Parses a theory. On success `*out` holds a handle to release with
/// [`modulo_theory_free`].
///
/// # Safety
/// `src` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn modulo_theory_parse(src: *const c_char, out: *mut *mut ModuloTheory) -> ModuloStatus {
    guard(|| {
        let src = text(src, "src")?;
        if out.is_null() {
            return Err(Fail(ModuloStatus::NullPointer, "out is null".into()));
        }
        let theory = parse_theory(src).map_err(|e| Fail(ModuloStatus::ParseError, e.to_string()))?;
        *out = Box::into_raw(Box::new(ModuloTheory { theory }));
        Ok(ModuloStatus::Ok)
    })
}

/// # Safety
/// `t` must come from [`modulo_theory_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn modulo_theory_free(t: *mut ModuloTheory) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Number of rewrite rules of the theory, or 0 for a null handle.
///
/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn modulo_theory_rule_count(t: *const ModuloTheory) -> usize {
    t.as_ref().map_or(0, |t| t.theory.system.rules().len())
}

/// Canonical text of the theory.
///
/// # Safety
/// `t` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn modulo_theory_print(t: *const ModuloTheory, out: *mut *mut c_char) -> ModuloStatus {
    guard(|| {
        let t = handle(t, "theory")?;
        write_string(out, print_theory(&t.theory))?;
        Ok(ModuloStatus::Ok)
    })
}

/// Typechecks every proof of a proof file and writes a JSON report.
/// Returns `LogicalFailure` if some proof is rejected.
///
/// # Safety
/// `t` must be a live handle, `proofs` a nul-terminated string and
/// `report` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn modulo_check_proofs(
    t: *const ModuloTheory,
    proofs: *const c_char,
    report: *mut *mut c_char,
) -> ModuloStatus {
    guard(|| {
        let t = handle(t, "theory")?;
        let src = text(proofs, "proofs")?;
        let file = parse_proofs(src, &t.theory.system).map_err(|e| Fail(ModuloStatus::ParseError, e.to_string()))?;
        emit(report, cli::check_report(&t.theory, &file, None, &budgets(&t.theory)?)?)
    })
}

/// Normalizes every proof of a proof file with at most `fuel` steps each.
/// Returns `LogicalFailure` on a cycle or exhausted fuel.
///
/// # Safety
/// As for [`modulo_check_proofs`].
#[no_mangle]
pub unsafe extern "C" fn modulo_normalize_proofs(
    t: *const ModuloTheory,
    proofs: *const c_char,
    fuel: usize,
    report: *mut *mut c_char,
) -> ModuloStatus {
    guard(|| {
        let t = handle(t, "theory")?;
        let src = text(proofs, "proofs")?;
        let file = parse_proofs(src, &t.theory.system).map_err(|e| Fail(ModuloStatus::ParseError, e.to_string()))?;
        emit(report, cli::normalize_report(&file, fuel))
    })
}

/// Searches for a cut-free proof of `sequent` of height at most `depth` in
/// `system` (`modulo`, `foldunfold` or `supernatural`; null means
/// `modulo`). Returns `LogicalFailure` if none is found.
///
/// # Safety
/// `t` must be a live handle, `sequent` a nul-terminated string, `system`
/// null or nul-terminated, and `report` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn modulo_search(
    t: *const ModuloTheory,
    sequent: *const c_char,
    system: *const c_char,
    depth: usize,
    report: *mut *mut c_char,
) -> ModuloStatus {
    guard(|| {
        let t = handle(t, "theory")?;
        let seq = parse_sequent(text(sequent, "sequent")?, &t.theory.system)
            .map_err(|e| Fail(ModuloStatus::ParseError, e.to_string()))?;
        let kind = if system.is_null() {
            SystemKind::Modulo
        } else {
            let k = text(system, "system")?;
            SystemKind::from_keyword(k)
                .ok_or_else(|| Fail(ModuloStatus::ParseError, format!("unknown system `{k}`")))?
        };
        emit(report, cli::search_report(&t.theory, &seq, kind, depth, &budgets(&t.theory)?)?)
    })
}

/// Model search over the bundled battery at the given domain size, with
/// non-termination evidence. Returns `LogicalFailure` unless every algebra
/// has a model.
///
/// # Safety
/// `t` must be a live handle and `report` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn modulo_super_consistency(
    t: *const ModuloTheory,
    domain_size: usize,
    report: *mut *mut c_char,
) -> ModuloStatus {
    guard(|| {
        let t = handle(t, "theory")?;
        let b = budgets(&t.theory)?;
        emit(report, cli::super_consistency_text(&t.theory, &bundled_battery(), domain_size, &b))
    })
}

/// One of the bundled algebras: `bool2`, `chain3`, `diamond4`,
/// `doubled_top`.
///
/// # Safety
/// `name` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn modulo_algebra_named(name: *const c_char, out: *mut *mut ModuloAlgebra) -> ModuloStatus {
    guard(|| {
        let name = text(name, "name")?;
        let algebra = make_algebra(&AlgebraSpec::Named(name.to_string()))
            .map_err(|e| Fail(ModuloStatus::ParseError, e.to_string()))?;
        if out.is_null() {
            return Err(Fail(ModuloStatus::NullPointer, "out is null".into()));
        }
        *out = Box::into_raw(Box::new(ModuloAlgebra { algebra }));
        Ok(ModuloStatus::Ok)
    })
}

/// The Heyting algebra of a finite distributive lattice given in lattice
/// file syntax.
///
/// # Safety
/// `src` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn modulo_algebra_from_lattice(src: *const c_char, out: *mut *mut ModuloAlgebra) -> ModuloStatus {
    guard(|| {
        let src = text(src, "src")?;
        let l = parse_lattice(src).map_err(|e| Fail(ModuloStatus::ParseError, e.to_string()))?;
        let algebra =
            make_algebra(&AlgebraSpec::Lattice(l.spec)).map_err(|e| Fail(ModuloStatus::ParseError, e.to_string()))?;
        if out.is_null() {
            return Err(Fail(ModuloStatus::NullPointer, "out is null".into()));
        }
        *out = Box::into_raw(Box::new(ModuloAlgebra { algebra }));
        Ok(ModuloStatus::Ok)
    })
}

/// # Safety
/// `a` must come from an algebra constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn modulo_algebra_free(a: *mut ModuloAlgebra) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Checks the truth values algebra laws. Returns `LogicalFailure` if a law
/// other than antisymmetry fails.
///
/// # Safety
/// `a` must be a live handle and `report` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn modulo_algebra_laws(a: *const ModuloAlgebra, report: *mut *mut c_char) -> ModuloStatus {
    guard(|| {
        let a = handle(a, "algebra")?;
        emit(report, cli::laws_report(std::slice::from_ref(&a.algebra)))
    })
}

/// Looks for a model of the theory in the algebra. Returns
/// `LogicalFailure` if there is none at this domain size.
///
/// # Safety
/// `t` and `a` must be live handles and `report` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn modulo_model_find(
    t: *const ModuloTheory,
    a: *const ModuloAlgebra,
    domain_size: usize,
    report: *mut *mut c_char,
) -> ModuloStatus {
    guard(|| {
        let t = handle(t, "theory")?;
        let a = handle(a, "algebra")?;
        emit(report, cli::model_report(&t.theory, &a.algebra, domain_size))
    })
}

/// The message of the last failed call on this thread, or null. The
/// pointer stays valid until the next call into this library on the same
/// thread.
#[no_mangle]
pub extern "C" fn modulo_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn modulo_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
