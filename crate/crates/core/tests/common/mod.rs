#![allow(dead_code)]

use std::path::PathBuf;

use modulo::frontend::{parse_proofs, parse_theory, ProofFile, Theory};

/// Theory and proof files of the corpus, paired.
pub const PAIRS: [(&str, &str); 6] = [
    ("qr.dmt", "qr.prf"),
    ("selfref.dmt", "selfref.prf"),
    ("selfref.dmt", "omega.prf"),
    ("empty.dmt", "empty.prf"),
    ("nat.dmt", "nat.prf"),
    ("even.dmt", "even.prf"),
];

pub fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name)
}

pub fn read(name: &str) -> String {
    std::fs::read_to_string(corpus(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn theory(name: &str) -> Theory {
    parse_theory(&read(name)).unwrap_or_else(|e| panic!("{name}:{e}"))
}

pub fn proofs(theory_name: &str, name: &str) -> (Theory, ProofFile) {
    let t = theory(theory_name);
    let f = parse_proofs(&read(name), &t.system).unwrap_or_else(|e| panic!("{name}:{e}"));
    (t, f)
}

pub fn corpus_files(ext: &str) -> Vec<String> {
    let mut out: Vec<String> = std::fs::read_dir(corpus(""))
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(ext))
        .collect();
    out.sort();
    out
}

/// Runs the command-line driver, returning exit code and standard output.
pub fn cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["modulo".to_string()];
    for a in args {
        argv.push(if a.ends_with(".dmt") || a.ends_with(".prf") || a.ends_with(".lat") {
            corpus(a).display().to_string()
        } else {
            a.to_string()
        });
    }
    let code = modulo::frontend::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap() + &String::from_utf8(err).unwrap())
}
