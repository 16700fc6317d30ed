//! Concrete syntax: parsers and printers for theories, proofs and lattices,
//! and the command-line driver.

pub mod cli;
mod lexer;
pub mod parser;
pub mod printer;

use std::collections::BTreeMap;
use std::fmt::Write;

use thiserror::Error;

use crate::budgets::Budgets;
use crate::proofs::{Proof, SystemKind};
use crate::rewriting::RewriteSystem;
use crate::syntax::{Decl, Sequent};
use crate::tva::LatticeSpec;

pub use parser::{parse_lattice, parse_proof_term, parse_proofs, parse_prop, parse_sequent, parse_theory};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }
}

/// A parsed theory file.
#[derive(Debug, Clone, PartialEq)]
pub struct Theory {
    pub system: RewriteSystem,
    /// Budget defaults declared in the file, keyed by budget name.
    pub budgets: BTreeMap<String, usize>,
}

impl Theory {
    /// Defaults, overridden by the file's `budget` statements.
    pub fn budgets(&self) -> Budgets {
        let mut b = Budgets::default();
        for (k, v) in &self.budgets {
            b.set(k, &v.to_string()).expect("validated while parsing");
        }
        b
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProofEntry {
    pub name: String,
    pub system: SystemKind,
    pub sequent: Sequent,
    pub proof: Proof,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProofFile {
    pub entries: Vec<ProofEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeFile {
    pub spec: LatticeSpec,
}

fn sort_list(sorts: &[crate::syntax::Sort]) -> String {
    sorts.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", ")
}

pub fn print_theory(t: &Theory) -> String {
    let sig = &t.system.signature;
    let mut out = String::new();
    for d in &sig.order {
        match d {
            Decl::Sort(s) => {
                let _ = writeln!(out, "sort {s}");
            }
            Decl::Function(f) => {
                let (args, res) = &sig.functions[f];
                if args.is_empty() {
                    let _ = writeln!(out, "fun {f} : {res}");
                } else {
                    let _ = writeln!(out, "fun {f} : {} -> {res}", sort_list(args));
                }
            }
            Decl::Predicate(p) => {
                let args = &sig.predicates[p];
                if args.is_empty() {
                    let _ = writeln!(out, "prop {p}");
                } else {
                    let _ = writeln!(out, "pred {p} : {}", sort_list(args));
                }
            }
        }
    }
    for (k, v) in &t.budgets {
        let _ = writeln!(out, "budget {k} = {v}");
    }
    for r in t.system.rules() {
        let _ = writeln!(out, "rule {} : {} --> {}", r.name, r.lhs(), r.rhs());
    }
    out
}

pub fn print_proofs(f: &ProofFile) -> String {
    let mut out = String::new();
    let mut current = SystemKind::Modulo;
    for e in &f.entries {
        if e.system != current {
            let _ = writeln!(out, "system {}\n", e.system);
            current = e.system;
        }
        let _ = writeln!(out, "proof {} : {}\n  := {}\n", e.name, e.sequent, e.proof);
    }
    out
}

pub fn print_lattice(l: &LatticeFile) -> String {
    let s = &l.spec;
    let mut out = format!("lattice {}\nelements {}\n", s.name, s.elements.join(" "));
    for (a, b) in &s.order {
        let _ = writeln!(out, "le {a} {b}");
    }
    let _ = writeln!(out, "top {}\nbot {}", s.top, s.bot);
    out
}
