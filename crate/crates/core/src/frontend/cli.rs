//! Command-line driver. Every command prints a text report, or a JSON
//! report with `--json`, and returns 0 on success, 1 on a logical failure
//! and 2 on a usage, input or parse error.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use thiserror::Error;

use super::{parse_lattice, parse_proofs, parse_sequent, parse_theory, ParseError, ProofFile, Theory};
use crate::budgets::{BudgetError, Budgets};
use crate::cutfree::{agreement_check, search_cutfree_with, sharpened_completeness_check, SearchConfig};
use crate::proofs::{derive_fold_unfold, derive_supernatural, typecheck_sequent, RuleSystem, SystemKind};
use crate::reduction::{normalize_proof, strongly_normalizing, Outcome, SnVerdict};
use crate::semantics::{model_entries, rule_valid_everywhere, search_models, super_consistency_report, ModelSearch};
use crate::syntax::Sequent;
use crate::tva::{bundled_battery, check_laws, make_algebra, AlgebraSpec, TableAlgebra, BUNDLED};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{source}")]
    Parse { path: String, source: ParseError },
    #[error(transparent)]
    Budget(#[from] BudgetError),
}

#[derive(Parser, Debug)]
#[command(name = "modulo", version, about = "Proof kernel and cut-elimination workbench for deduction modulo")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Print a JSON report.
    #[arg(long, global = true)]
    json: bool,
    /// Budget overrides, e.g. `fuel=100,sn_fuel=50`.
    #[arg(long, value_name = "KEY=VALUE,...")]
    budget: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Typecheck every proof of a proof file.
    Check {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long)]
        proof: PathBuf,
        /// Check every entry in this system instead of the declared one.
        #[arg(long)]
        system: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Reduce every proof of a proof file, leftmost-outermost.
    Normalize {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long)]
        proof: PathBuf,
        #[arg(long)]
        fuel: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Probe strong normalization of every proof of a proof file.
    Sn {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long)]
        proof: PathBuf,
        #[arg(long)]
        fuel: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Search for a cut-free proof of a sequent.
    Search {
        #[arg(long)]
        theory: PathBuf,
        /// Sequent, e.g. `h : P |- Q => R`.
        #[arg(long)]
        goal: String,
        #[arg(long)]
        system: Option<String>,
        #[arg(long)]
        depth: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Print the fold/unfold and supernatural rules of each proposition rule.
    DeriveRules {
        #[arg(long)]
        theory: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Check the truth values algebra laws.
    TvaLaws {
        /// Bundled algebra name; repeatable. Defaults to all bundled algebras.
        #[arg(long)]
        algebra: Vec<String>,
        /// Lattice file; repeatable.
        #[arg(long)]
        lattice: Vec<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Find a model of a theory in one algebra.
    ModelFind {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long, conflicts_with = "lattice")]
        algebra: Option<String>,
        #[arg(long)]
        lattice: Option<PathBuf>,
        #[arg(long)]
        domain_size: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Look for models across an algebra battery and for non-termination
    /// evidence.
    SuperConsistency {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long, default_value = "default")]
        battery: String,
        /// Extra lattice files added to the battery.
        #[arg(long)]
        lattice: Vec<PathBuf>,
        #[arg(long)]
        domain_size: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Build the context-set model around a sequent and check it.
    ContextModel {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long)]
        goal: String,
        #[arg(long)]
        system: Option<String>,
        /// Proofs whose derivations are checked for soundness.
        #[arg(long)]
        proof: Option<PathBuf>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        max_hyps: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Compare bounded provability across the three rule systems.
    Agree {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        max_hyps: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

/// The outcome of a command.
pub struct Report {
    pub ok: bool,
    pub json: Value,
    pub text: String,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parsed<T>(path: &Path, r: Result<T, ParseError>) -> Result<T, CliError> {
    r.map_err(|source| CliError::Parse {
        path: path.display().to_string(),
        source,
    })
}

fn load_theory(path: &Path) -> Result<Theory, CliError> {
    let src = read(path)?;
    parsed(path, parse_theory(&src))
}

fn load_proofs(path: &Path, theory: &Theory) -> Result<ProofFile, CliError> {
    let src = read(path)?;
    parsed(path, parse_proofs(&src, &theory.system))
}

fn load_lattice(path: &Path) -> Result<TableAlgebra, CliError> {
    let src = read(path)?;
    let l = parsed(path, parse_lattice(&src))?;
    make_algebra(&AlgebraSpec::Lattice(l.spec)).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn named_algebra(name: &str) -> Result<TableAlgebra, CliError> {
    make_algebra(&AlgebraSpec::Named(name.to_string()))
        .map_err(|e| CliError::Usage(format!("{e} (bundled: {})", BUNDLED.join(", "))))
}

fn system_kind(s: &Option<String>) -> Result<Option<SystemKind>, CliError> {
    s.as_deref()
        .map(|k| {
            SystemKind::from_keyword(k).ok_or_else(|| {
                CliError::Usage(format!("unknown system `{k}` (modulo, foldunfold, supernatural)"))
            })
        })
        .transpose()
}

fn rule_system(kind: SystemKind, theory: &Theory) -> Result<RuleSystem, CliError> {
    RuleSystem::new(kind, theory.system.clone()).map_err(|e| CliError::Usage(format!("{kind}: {e}")))
}

/// Defaults, then the environment, then the theory file, then `overrides`
/// (`key=value,...`).
pub fn resolve_budgets(theory: Option<&Theory>, overrides: Option<&str>) -> Result<Budgets, CliError> {
    let mut b = Budgets::from_env()?;
    if let Some(t) = theory {
        for (k, v) in &t.budgets {
            b.set(k, &v.to_string())?;
        }
    }
    if let Some(spec) = overrides {
        b.apply_overrides(spec)?;
    }
    Ok(b)
}

fn budgets(theory: Option<&Theory>, common: &Common) -> Result<Budgets, CliError> {
    resolve_budgets(theory, common.budget.as_deref())
}

fn check(theory: &Path, proof: &Path, system: &Option<String>, common: &Common) -> Result<Report, CliError> {
    let t = load_theory(theory)?;
    let b = budgets(Some(&t), common)?;
    let file = load_proofs(proof, &t)?;
    check_report(&t, &file, system_kind(system)?, &b)
}

/// Typechecks every entry, in `forced` if given, else in its declared system.
pub fn check_report(t: &Theory, file: &ProofFile, forced: Option<SystemKind>, b: &Budgets) -> Result<Report, CliError> {
    let mut entries = Vec::new();
    let mut text = String::new();
    let mut ok = true;
    for e in &file.entries {
        let kind = forced.unwrap_or(e.system);
        let sys = rule_system(kind, t)?;
        match typecheck_sequent(&e.proof, &e.sequent, &sys, b.congruence_depth) {
            Ok(d) => {
                let _ = writeln!(text, "ok     {} [{kind}] : {}", e.name, e.sequent);
                entries.push(json!({
                    "name": e.name, "system": kind.keyword(), "sequent": e.sequent.to_string(),
                    "accepted": true, "derivation_size": d.size(), "conversions": d.conversion_count(),
                }));
            }
            Err(r) => {
                ok = false;
                let _ = writeln!(text, "reject {} [{kind}] : {}\n       {r}", e.name, e.sequent);
                entries.push(json!({
                    "name": e.name, "system": kind.keyword(), "sequent": e.sequent.to_string(),
                    "accepted": false, "error": r.to_string(),
                }));
            }
        }
    }
    Ok(Report {
        ok,
        json: json!({ "command": "check", "proofs": entries }),
        text,
    })
}

fn normalize(theory: &Path, proof: &Path, fuel: Option<usize>, common: &Common) -> Result<Report, CliError> {
    let t = load_theory(theory)?;
    let b = budgets(Some(&t), common)?;
    let file = load_proofs(proof, &t)?;
    Ok(normalize_report(&file, fuel.unwrap_or(b.fuel)))
}

pub fn normalize_report(file: &ProofFile, fuel: usize) -> Report {
    let mut entries = Vec::new();
    let mut text = String::new();
    let mut ok = true;
    for e in &file.entries {
        let trace = normalize_proof(&e.proof, fuel);
        let rules: Vec<&str> = trace.steps.iter().map(|s| s.rule).collect();
        let last = trace.last().to_string();
        match trace.outcome {
            Outcome::Normal => {
                let n = trace.steps.len();
                let plural = if n == 1 { "" } else { "s" };
                let _ = writeln!(text, "{}: normal after {n} step{plural}\n  {last}", e.name);
            }
            Outcome::Cycle { step, repeats } => {
                ok = false;
                let _ = writeln!(text, "{}: cycle at step {step} (same as after step {repeats})\n  {last}", e.name);
            }
            Outcome::FuelExhausted => {
                ok = false;
                let _ = writeln!(text, "{}: fuel exhausted after {fuel} steps", e.name);
            }
        }
        entries.push(json!({
            "name": e.name, "outcome": trace.outcome, "steps": trace.steps.len(),
            "rules": rules, "result": last,
        }));
    }
    Report {
        ok,
        json: json!({ "command": "normalize", "fuel": fuel, "proofs": entries }),
        text,
    }
}

fn sn(theory: &Path, proof: &Path, fuel: Option<usize>, common: &Common) -> Result<Report, CliError> {
    let t = load_theory(theory)?;
    let b = budgets(Some(&t), common)?;
    let fuel = fuel.unwrap_or(b.sn_fuel);
    let file = load_proofs(proof, &t)?;
    let mut entries = Vec::new();
    let mut text = String::new();
    let mut ok = true;
    for e in &file.entries {
        let v = strongly_normalizing(&e.proof, fuel);
        let entry = match &v {
            SnVerdict::SN { explored } => {
                let _ = writeln!(text, "{}: strongly normalizing ({explored} proofs explored)", e.name);
                json!({ "name": e.name, "verdict": "sn", "explored": explored })
            }
            SnVerdict::NotSN { path } => {
                ok = false;
                let cycle: Vec<String> = path.iter().map(|p| p.to_string()).collect();
                let _ = writeln!(text, "{}: not strongly normalizing, loop of length {}", e.name, path.len() - 1);
                json!({ "name": e.name, "verdict": "not_sn", "path": cycle })
            }
            SnVerdict::Unknown { explored } => {
                ok = false;
                let _ = writeln!(text, "{}: unknown ({explored} proofs explored)", e.name);
                json!({ "name": e.name, "verdict": "unknown", "explored": explored })
            }
        };
        entries.push(entry);
    }
    Ok(Report {
        ok,
        json: json!({ "command": "sn", "fuel": fuel, "proofs": entries }),
        text,
    })
}

fn search(
    theory: &Path,
    goal: &str,
    system: &Option<String>,
    depth: Option<usize>,
    common: &Common,
) -> Result<Report, CliError> {
    let t = load_theory(theory)?;
    let b = budgets(Some(&t), common)?;
    let seq = parsed(Path::new("--goal"), parse_sequent(goal, &t.system))?;
    let kind = system_kind(system)?.unwrap_or(SystemKind::Modulo);
    search_report(&t, &seq, kind, depth.unwrap_or(b.search_depth), &b)
}

pub fn search_report(t: &Theory, seq: &Sequent, kind: SystemKind, depth: usize, b: &Budgets) -> Result<Report, CliError> {
    let sys = rule_system(kind, t)?;
    let cfg = SearchConfig {
        depth,
        congruence_depth: b.congruence_depth,
        ..SearchConfig::new(0)
    };
    let out = search_cutfree_with(seq, &sys, &cfg);
    let checked = out
        .proof
        .as_ref()
        .map(|p| typecheck_sequent(p, seq, &sys, b.congruence_depth).is_ok());
    let text = match &out.proof {
        Some(p) => format!("found: {p}\n"),
        None if out.exhausted => format!("no proof found: node limit reached after {} nodes\n", out.nodes),
        None => format!("no cut-free proof of height <= {}\n", cfg.depth),
    };
    Ok(Report {
        ok: out.proof.is_some() && checked == Some(true),
        json: json!({
            "command": "search", "system": kind.keyword(), "sequent": seq.to_string(), "depth": cfg.depth,
            "proof": out.proof.as_ref().map(|p| p.to_string()), "checked": checked,
            "nodes": out.nodes, "node_limit_reached": out.exhausted,
        }),
        text,
    })
}

fn derive_rules(theory: &Path, _common: &Common) -> Result<Report, CliError> {
    let t = load_theory(theory)?;
    let mut entries = Vec::new();
    let mut text = String::new();
    let mut ok = true;
    for r in t.system.prop_rules() {
        let _ = writeln!(text, "# {} : {} --> {}\n", r.name, r.lhs(), r.rhs());
        let mut entry = serde_json::Map::new();
        entry.insert("rule".into(), json!(r.name));
        match derive_fold_unfold(r) {
            Ok((fold, unfold)) => {
                let _ = writeln!(text, "{fold}\n\n{unfold}\n");
                entry.insert("fold_unfold".into(), json!([fold.to_string(), unfold.to_string()]));
            }
            Err(e) => {
                ok = false;
                let _ = writeln!(text, "fold/unfold: {e}\n");
                entry.insert("fold_unfold_error".into(), json!(e.to_string()));
            }
        }
        match derive_supernatural(r) {
            Ok((intro, elims)) => {
                let _ = writeln!(text, "{intro}\n");
                for el in &elims {
                    let _ = writeln!(text, "{el}\n");
                }
                let mut all = vec![intro.to_string()];
                all.extend(elims.iter().map(|e| e.to_string()));
                entry.insert("supernatural".into(), json!(all));
            }
            Err(e) => {
                ok = false;
                let _ = writeln!(text, "supernatural: {e}\n");
                entry.insert("supernatural_error".into(), json!(e.to_string()));
            }
        }
        entries.push(Value::Object(entry));
    }
    Ok(Report {
        ok,
        json: json!({ "command": "derive-rules", "rules": entries }),
        text,
    })
}

fn tva_laws(algebras: &[String], lattices: &[PathBuf]) -> Result<Report, CliError> {
    let mut algs: Vec<TableAlgebra> = algebras.iter().map(|n| named_algebra(n)).collect::<Result<_, _>>()?;
    for l in lattices {
        algs.push(load_lattice(l)?);
    }
    if algebras.is_empty() && lattices.is_empty() {
        algs = bundled_battery();
    }
    Ok(laws_report(&algs))
}

/// Succeeds when every algebra is a truth values algebra.
pub fn laws_report(algs: &[TableAlgebra]) -> Report {
    let mut reports = Vec::new();
    let mut text = String::new();
    let mut ok = true;
    for a in algs {
        let r = check_laws(a);
        ok &= r.is_tva();
        let verdict = if r.is_heyting() {
            "Heyting algebra".to_string()
        } else if r.is_tva() {
            "truth values algebra, not Heyting (antisymmetry fails)".to_string()
        } else {
            format!("not a truth values algebra: {}", r.failures().join(", "))
        };
        let _ = writeln!(text, "{} ({} elements): {verdict}", r.algebra, r.size);
        for l in &r.laws {
            let mark = if l.holds { "ok  " } else { "FAIL" };
            let _ = write!(text, "  {mark} {}", l.law);
            if let Some(c) = &l.counterexample {
                let _ = write!(text, "  [{c}]");
            }
            text.push('\n');
        }
        let mut v = serde_json::to_value(&r).expect("serializable");
        v["is_tva"] = json!(r.is_tva());
        v["is_heyting"] = json!(r.is_heyting());
        reports.push(v);
    }
    Report {
        ok,
        json: json!({ "command": "tva-laws", "algebras": reports }),
        text,
    }
}

fn model_find(
    theory: &Path,
    algebra: &Option<String>,
    lattice: &Option<PathBuf>,
    domain_size: Option<usize>,
    common: &Common,
) -> Result<Report, CliError> {
    let t = load_theory(theory)?;
    let b = budgets(Some(&t), common)?;
    let alg = match (algebra, lattice) {
        (_, Some(l)) => load_lattice(l)?,
        (Some(n), None) => named_algebra(n)?,
        (None, None) => named_algebra("bool2")?,
    };
    Ok(model_report(&t, &alg, domain_size.unwrap_or(b.domain_size)))
}

pub fn model_report(t: &Theory, alg: &TableAlgebra, size: usize) -> Report {
    let (model, tried, budget) = match search_models(&t.system, alg, size, u64::MAX) {
        ModelSearch::Found { model, tried } => (Some(model), tried, false),
        ModelSearch::NoModel { tried } => (None, tried, false),
        ModelSearch::Budget { tried } => (None, tried, true),
    };
    let name = crate::tva::TruthValueAlgebra::name(alg);
    let mut text = String::new();
    let json = match &model {
        Some(m) => {
            let _ = writeln!(text, "model in {name} (domain size {size}, {tried} assignments tried):");
            let entries = model_entries(m);
            for (k, v) in &entries {
                let _ = writeln!(text, "  {k} = {v}");
            }
            let verdicts: Vec<Value> = t
                .system
                .rules()
                .iter()
                .map(|r| json!({ "rule": r.name, "verdict": rule_valid_everywhere(r, m) }))
                .collect();
            json!({
                "command": "model-find", "algebra": name, "domain_size": size, "model_found": true,
                "model": entries, "assignments_tried": tried, "rules": verdicts,
            })
        }
        None => {
            let _ = writeln!(text, "no model in {name} at domain size {size} ({tried} assignments tried)");
            json!({
                "command": "model-find", "algebra": name, "domain_size": size, "model_found": false,
                "assignments_tried": tried, "budget_exhausted": budget,
            })
        }
    };
    Report {
        ok: model.is_some(),
        json,
        text,
    }
}

fn super_consistency(
    theory: &Path,
    battery: &str,
    lattices: &[PathBuf],
    domain_size: Option<usize>,
    common: &Common,
) -> Result<Report, CliError> {
    let t = load_theory(theory)?;
    let b = budgets(Some(&t), common)?;
    let mut algs = match battery {
        "default" => bundled_battery(),
        "none" => Vec::new(),
        other => {
            let names: Vec<String> = other.split(',').map(|s| s.trim().to_string()).collect();
            names.iter().map(|n| named_algebra(n)).collect::<Result<_, _>>()?
        }
    };
    for l in lattices {
        algs.push(load_lattice(l)?);
    }
    Ok(super_consistency_text(&t, &algs, domain_size.unwrap_or(b.domain_size), &b))
}

/// Succeeds when every algebra of the battery has a model.
pub fn super_consistency_text(t: &Theory, algs: &[TableAlgebra], size: usize, b: &Budgets) -> Report {
    let report = super_consistency_report(&t.system, algs, size, b.congruence_depth, b.sn_fuel);
    let mut text = format!("domain size {size}: {}/{} algebras with models\n", report.models_found(), algs.len());
    for o in &report.outcomes {
        match &o.model {
            Some(m) => {
                let entries: Vec<String> = m.iter().map(|(k, v)| format!("{k} = {v}")).collect();
                let _ = writeln!(text, "  {}: model {{{}}}", o.algebra, entries.join(", "));
            }
            None => {
                let _ = writeln!(text, "  {}: no model ({} assignments tried)", o.algebra, o.assignments_tried);
            }
        }
    }
    let _ = writeln!(text, "note: {}", report.note);
    for e in &report.not_sn_evidence {
        let _ = writeln!(
            text,
            "non-termination under rule {}: {} proves {} and returns to itself after {} reduction(s)",
            e.rule, e.proof, e.proves, e.cycle_length
        );
    }
    let mut json = serde_json::to_value(&report).expect("serializable");
    json["command"] = json!("super-consistency");
    Report {
        ok: report.models_found() == algs.len(),
        json,
        text,
    }
}

#[allow(clippy::too_many_arguments)]
fn context_model(
    theory: &Path,
    goal: &str,
    system: &Option<String>,
    proof: &Option<PathBuf>,
    depth: Option<usize>,
    max_hyps: Option<usize>,
    common: &Common,
) -> Result<Report, CliError> {
    let t = load_theory(theory)?;
    let b = budgets(Some(&t), common)?;
    let seq = parsed(Path::new("--goal"), parse_sequent(goal, &t.system))?;
    let kind = system_kind(system)?.unwrap_or(SystemKind::Modulo);
    let sys = rule_system(kind, &t)?;
    let mut corpus = Vec::new();
    if let Some(p) = proof {
        for e in load_proofs(p, &t)?.entries {
            if let Ok(d) = typecheck_sequent(&e.proof, &e.sequent, &sys, b.congruence_depth) {
                corpus.push(d);
            }
        }
    }
    let depth = depth.unwrap_or(b.search_depth);
    let max_hyps = max_hyps.unwrap_or(b.max_hyps);
    let report = sharpened_completeness_check(&seq, &sys, depth, max_hyps, &corpus)
        .map_err(|e| CliError::Usage(format!("context model: {e}")))?;
    let mut text = format!(
        "{} formulas, {} contexts, generated subalgebra of size {}\n",
        report.formulas.len(),
        report.contexts,
        report.subalgebra_size
    );
    let _ = writeln!(
        text,
        "memberships checked: {} pairs, {} members, {} past the horizon, {} without a cut-free proof",
        report.pairs_checked,
        report.members,
        report.beyond_horizon,
        report.failures.len()
    );
    for f in &report.failures {
        let _ = writeln!(text, "  {} |- {}", f.context, f.formula);
    }
    let _ = writeln!(
        text,
        "derivations checked: {}, unsound: {}",
        report.derivations_checked,
        report.soundness_failures.len()
    );
    let _ = writeln!(text, "goal valid: {}", report.goal_valid);
    let failed_laws: Vec<&str> = report.laws.failures();
    if failed_laws.is_empty() {
        text.push_str("context algebra: Heyting algebra\n");
    } else {
        let _ = writeln!(text, "context algebra fails: {}", failed_laws.join(", "));
    }
    let mut json = serde_json::to_value(&report).expect("serializable");
    json["command"] = json!("context-model");
    json["system"] = json!(kind.keyword());
    Ok(Report {
        ok: report.passed(),
        json,
        text,
    })
}

fn agree(theory: &Path, depth: Option<usize>, max_hyps: Option<usize>, common: &Common) -> Result<Report, CliError> {
    let t = load_theory(theory)?;
    let b = budgets(Some(&t), common)?;
    let depth = depth.unwrap_or(b.search_depth);
    let max_hyps = max_hyps.unwrap_or(b.max_hyps);
    let report = agreement_check(&t.system, depth, max_hyps).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut text = format!(
        "{} sequents over {} formulas, depth {depth}\n",
        report.sequents,
        report.formulas.len()
    );
    for (k, n) in &report.proved {
        let _ = writeln!(text, "  {k}: {n} provable");
    }
    let _ = writeln!(text, "disagreements: {}", report.disagreements.len());
    for d in &report.disagreements {
        let _ = writeln!(text, "  {} {:?}", d.sequent, d.provable);
    }
    for s in report.ill_typed.iter().chain(&report.incomplete) {
        let _ = writeln!(text, "  problem: {s}");
    }
    let mut json = serde_json::to_value(&report).expect("serializable");
    json["command"] = json!("agree");
    Ok(Report {
        ok: report.passed(),
        json,
        text,
    })
}

fn dispatch(cmd: &Command) -> Result<(Report, bool), CliError> {
    Ok(match cmd {
        Command::Check {
            theory,
            proof,
            system,
            common,
        } => (check(theory, proof, system, common)?, common.json),
        Command::Normalize {
            theory,
            proof,
            fuel,
            common,
        } => (normalize(theory, proof, *fuel, common)?, common.json),
        Command::Sn {
            theory,
            proof,
            fuel,
            common,
        } => (sn(theory, proof, *fuel, common)?, common.json),
        Command::Search {
            theory,
            goal,
            system,
            depth,
            common,
        } => (search(theory, goal, system, *depth, common)?, common.json),
        Command::DeriveRules { theory, common } => (derive_rules(theory, common)?, common.json),
        Command::TvaLaws {
            algebra,
            lattice,
            common,
        } => {
            budgets(None, common)?;
            (tva_laws(algebra, lattice)?, common.json)
        }
        Command::ModelFind {
            theory,
            algebra,
            lattice,
            domain_size,
            common,
        } => (model_find(theory, algebra, lattice, *domain_size, common)?, common.json),
        Command::SuperConsistency {
            theory,
            battery,
            lattice,
            domain_size,
            common,
        } => (
            super_consistency(theory, battery, lattice, *domain_size, common)?,
            common.json,
        ),
        Command::ContextModel {
            theory,
            goal,
            system,
            proof,
            depth,
            max_hyps,
            common,
        } => (
            context_model(theory, goal, system, proof, *depth, *max_hyps, common)?,
            common.json,
        ),
        Command::Agree {
            theory,
            depth,
            max_hyps,
            common,
        } => (agree(theory, *depth, *max_hyps, common)?, common.json),
    })
}

/// Runs one command. `args` includes the program name.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match dispatch(&cli.command) {
        Ok((report, json)) => {
            if json {
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&report.json).expect("serializable"));
            } else {
                let _ = write!(out, "{}", report.text);
            }
            if report.ok {
                EXIT_OK
            } else {
                EXIT_FAILURE
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}
