//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use common::{cli, corpus_files, proofs, read, theory, PAIRS};
use modulo::cutfree::{agreement_check, search_cutfree, sharpened_completeness_check};
use modulo::frontend::{
    parse_lattice, parse_proofs, parse_sequent, parse_theory, print_lattice, print_proofs, print_theory, ProofEntry,
    Theory,
};
use modulo::proofs::{
    classify_last_rule, derive_fold_unfold, derive_supernatural, typecheck, typecheck_sequent, Derivation, LastRule,
    Proof, RuleSystem, SystemKind,
};
use modulo::reduction::{extract_constructive_content, is_normal, normalize_proof, reachable, Content, Outcome};
use modulo::rewriting::whnf;
use modulo::semantics::{
    find_model, nat_alpha_model, rule_valid, soundness_failures, super_consistency_report, tait_check, Model,
    RuleVerdict, Valuation,
};
use modulo::syntax::{Context, Prop, Sequent};
use modulo::tva::{
    bool2, bundled_battery, candidate_member, chain3, check_laws, diamond4, doubled_top, Candidate, Membership,
    Samples, TableAlgebra, TruthValueAlgebra,
};
use modulo::Budgets;

/// Depth for conversion checks throughout.
const CONGRUENCE_DEPTH: usize = 8;
/// Fuel for proof normalization (criterion 2).
const NORMALIZE_FUEL: usize = 1000;
/// Distinct reducts explored per proof for subject reduction.
const REACHABLE_LIMIT: usize = 500;
/// Truncation bound of the naturals; `φ(x) ≤ BOUND - 1` keeps `f(x)` in range.
const NAT_BOUND: usize = 8;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn system(kind: SystemKind, t: &Theory) -> RuleSystem {
    RuleSystem::new(kind, t.system.clone()).expect("corpus theories have all presentations")
}

fn omega() -> Proof {
    Proof::lam("x", Prop::sym("P"), Proof::app(Proof::hyp("x"), Proof::hyp("x")))
}

fn omega_omega() -> Proof {
    Proof::app(omega(), omega())
}

fn all_entries() -> Vec<(Theory, ProofEntry)> {
    let mut out = Vec::new();
    for (th, pf) in PAIRS {
        let (t, f) = proofs(th, pf);
        for e in f.entries {
            out.push((t.clone(), e));
        }
    }
    out
}

fn selfref_reproduction() -> Verdict {
    let start = Instant::now();
    let t = theory("selfref.dmt");
    let sys = system(SystemKind::Modulo, &t);
    let w = omega_omega();
    typecheck(&w, &Context::new(), &Prop::sym("R"), &sys, CONGRUENCE_DEPTH)
        .map_err(|e| format!("omega omega rejected: {e}"))?;
    let trace = normalize_proof(&w, 2);
    let Outcome::Cycle { step, .. } = trace.outcome else {
        return Err(format!("expected a cycle within 2 steps, got {:?}", trace.outcome));
    };
    let goal = Sequent::new(Context::new(), Prop::sym("R"));
    for kind in SystemKind::ALL {
        if let Some(p) = search_cutfree(&goal, &system(kind, &t), 8) {
            return Err(format!("cut-free proof of R found in {kind}: {p}"));
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "omega omega : R, cycle at step {step}, no cut-free proof of R at depth 8 in any system ({} ms)",
        elapsed.as_millis()
    ))
}

fn positive_cut_elimination() -> Verdict {
    let (t, f) = proofs("qr.dmt", "qr.prf");
    let mut closed = 0;
    for e in &f.entries {
        let sys = system(e.system, &t);
        let trace = normalize_proof(&e.proof, NORMALIZE_FUEL);
        ensure(trace.outcome == Outcome::Normal, || {
            format!("{}: {:?}", e.name, trace.outcome)
        })?;
        let nf = trace.last();
        ensure(is_normal(nf), || format!("{}: result not cut-free", e.name))?;
        typecheck_sequent(nf, &e.sequent, &sys, CONGRUENCE_DEPTH)
            .map_err(|r| format!("{}: normal form rejected: {r}", e.name))?;
        if e.sequent.context.is_empty() {
            closed += 1;
            let root = nf.strip();
            let intro = match e.system {
                SystemKind::Modulo => classify_last_rule(root) == LastRule::Introduction,
                SystemKind::FoldUnfold => {
                    classify_last_rule(root) == LastRule::Introduction || matches!(root, Proof::Fold(..))
                }
                SystemKind::SuperNatural => {
                    classify_last_rule(root) == LastRule::Introduction || matches!(root, Proof::SuperIntro(..))
                }
            };
            ensure(intro, || format!("{}: closed normal proof {nf} does not end with an introduction", e.name))?;
        }
    }
    Ok(format!(
        "{} proofs normalize within fuel {NORMALIZE_FUEL}; {closed} closed normal forms end with an introduction",
        f.entries.len()
    ))
}

fn subject_reduction() -> Verdict {
    let entries = all_entries();
    let systems: BTreeSet<SystemKind> = entries.iter().map(|(_, e)| e.system).collect();
    ensure(entries.len() >= 20 && systems.len() == 3, || {
        format!("corpus has {} proofs in {} systems", entries.len(), systems.len())
    })?;
    let mut checked = 0;
    for (t, e) in &entries {
        let sys = system(e.system, t);
        let mut states: Vec<Proof> = reachable(&e.proof, REACHABLE_LIMIT);
        states.extend(normalize_proof(&e.proof, NORMALIZE_FUEL).proofs().cloned());
        for q in &states {
            typecheck_sequent(q, &e.sequent, &sys, CONGRUENCE_DEPTH)
                .map_err(|r| format!("{}: reduct {q} rejected: {r}", e.name))?;
            checked += 1;
        }
    }
    Ok(format!(
        "{} proofs in 3 systems, {checked} reducts re-typechecked",
        entries.len()
    ))
}

fn witness_extraction() -> Verdict {
    let mut extracted = 0;
    for (t, e) in all_entries() {
        if !e.sequent.context.is_empty() || !e.proof.free_term_vars().is_empty() {
            continue;
        }
        let sys = system(e.system, &t);
        let Ok((head, _)) = whnf(&e.sequent.goal, sys.congruence(), CONGRUENCE_DEPTH) else {
            continue;
        };
        if !matches!(head, Prop::Or(..) | Prop::Exists(..)) {
            continue;
        }
        let trace = normalize_proof(&e.proof, NORMALIZE_FUEL);
        if trace.outcome != Outcome::Normal {
            continue;
        }
        let content = extract_constructive_content(trace.last(), &e.sequent.goal, &sys, CONGRUENCE_DEPTH)
            .map_err(|x| format!("{}: {x}", e.name))?;
        let (sub, proves) = match content {
            Content::DisjunctChoice { subproof, proves, .. } => (subproof, proves),
            Content::Witness { subproof, proves, .. } => (subproof, proves),
            Content::NotApplicable => return Err(format!("{}: nothing extracted", e.name)),
        };
        typecheck(&sub, &Context::new(), &proves, &sys, CONGRUENCE_DEPTH)
            .map_err(|r| format!("{}: extracted {sub} : {proves} rejected: {r}", e.name))?;
        extracted += 1;
    }
    ensure(extracted >= 5, || format!("only {extracted} closed disjunctions or existentials"))?;
    Ok(format!("{extracted} closed normal proofs of disjunctions or existentials, all extracted and re-checked"))
}

fn derived_rule_fidelity() -> Verdict {
    let t = theory("qr.dmt");
    let rule = &t.system.rules()[0];
    let (fold, unfold) = derive_fold_unfold(rule).map_err(|e| e.to_string())?;
    let (intro, elims) = derive_supernatural(rule).map_err(|e| e.to_string())?;
    let mut blocks = vec![fold.to_string(), unfold.to_string(), intro.to_string()];
    blocks.extend(elims.iter().map(|e| e.to_string()));
    let printed = blocks.join("\n\n");
    let golden = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/qr_derived_rules.txt"))
        .map_err(|e| e.to_string())?;
    ensure(printed.trim() == golden.trim(), || format!("printed rules differ from golden:\n{printed}"))?;
    Ok("fold, unfold, r-intro and r-elim match the golden file".into())
}

fn three_formalisms_agree() -> Verdict {
    let t = theory("qr.dmt");
    let report = agreement_check(&t.system, 6, 2).map_err(|e| e.to_string())?;
    ensure(report.formulas.len() == 4, || format!("closure {:?}", report.formulas))?;
    ensure(report.passed(), || format!("{report:?}"))?;
    Ok(format!(
        "{} sequents over {{{}}}, depth 6, 0 disagreements ({} provable in each system)",
        report.sequents,
        report.formulas.join(", "),
        report.proved["modulo"]
    ))
}

fn tva_law_suite() -> Verdict {
    for alg in [bool2(), chain3(), diamond4()] {
        let r = check_laws(&alg);
        ensure(r.is_heyting(), || format!("{}: {:?}", r.algebra, r.failures()))?;
    }
    let r = check_laws(&doubled_top());
    ensure(r.failures() == vec!["antisymmetry"], || format!("doubled_top fails {:?}", r.failures()))?;
    for alg in bundled_battery() {
        ensure(check_laws(&alg).holds("positive_modus_ponens"), || {
            format!("{}: positives not closed under modus ponens", alg.name())
        })?;
    }
    Ok("bool2, chain3, diamond4 are Heyting; doubled_top fails only antisymmetry; positives closed in all four".into())
}

fn candidates_not_heyting() -> Verdict {
    let samples = Samples::default().with(omega());
    let top = candidate_member(&Candidate::Top, &omega(), 100, &samples);
    ensure(top.is_member(), || format!("omega in Top: {top:?}"))?;
    match candidate_member(&Candidate::imp(Candidate::Top, Candidate::Top), &omega(), 100, &samples) {
        Membership::NonMember { counterexample: Some(c), .. } if c == omega().to_string() => {
            Ok(format!("omega in Top, omega not in Imp(Top, Top), counterexample {c}"))
        }
        other => Err(format!("omega in Imp(Top, Top): {other:?}")),
    }
}

fn super_consistency_battery() -> Verdict {
    let qr = theory("qr.dmt");
    for alg in bundled_battery() {
        let start = Instant::now();
        let found = find_model(&qr.system, &alg, 1).is_some();
        let elapsed = start.elapsed();
        ensure(found, || format!("no model of qr in {}", alg.name()))?;
        ensure(elapsed < Duration::from_secs(1), || format!("{}: {elapsed:?}", alg.name()))?;
    }

    let nat = theory("nat.dmt");
    let rule = &nat.system.rules()[0];
    let x = rule.variables().into_iter().next().expect("one variable");
    let mut checked = 0;
    for alg in bundled_battery() {
        for r in alg.elements_list() {
            let overrides = BTreeMap::from([("R".to_string(), r)]);
            let m = nat_alpha_model(&nat.system, &alg, NAT_BOUND, &overrides, None).map_err(|e| e.to_string())?;
            let vals: Vec<Valuation> = (0..NAT_BOUND).map(|n| BTreeMap::from([(x.clone(), n)])).collect();
            match rule_valid(rule, &m, &vals) {
                RuleVerdict::Valid => checked += 1,
                v => return Err(format!("{} with R = {}: {v:?}", alg.name(), alg.show(&r))),
            }
        }
    }

    let selfref = theory("selfref.dmt");
    let report = super_consistency_report(&selfref.system, &bundled_battery(), 1, CONGRUENCE_DEPTH, 1000);
    ensure(report.models_found() == 4, || format!("selfref: {} models", report.models_found()))?;
    ensure(!report.not_sn_evidence.is_empty(), || "selfref: no non-termination evidence".into())?;
    Ok(format!(
        "qr has a model in all 4 algebras; nat rule valid for x <= {} under alpha in {checked} (algebra, R) cases; \
         selfref: 4 finite models plus non-termination evidence",
        NAT_BOUND - 1
    ))
}

trait ElementsList {
    fn elements_list(&self) -> Vec<usize>;
}

impl ElementsList for TableAlgebra {
    fn elements_list(&self) -> Vec<usize> {
        (0..self.len()).collect()
    }
}

fn models_of(t: &Theory) -> Vec<Model<TableAlgebra>> {
    let mut out: Vec<Model<TableAlgebra>> =
        bundled_battery().iter().filter_map(|a| find_model(&t.system, a, 1)).collect();
    if t.system.rules().iter().any(|r| r.name == "r") && t.system.signature.functions.contains_key("f") {
        for alg in bundled_battery() {
            if let Ok(m) = nat_alpha_model(&t.system, &alg, NAT_BOUND, &BTreeMap::new(), None) {
                out.push(m);
            }
        }
    }
    out
}

fn soundness_instances() -> Verdict {
    let mut derivations = 0;
    let mut pairs = 0;
    let mut models_by_theory: BTreeMap<String, Vec<Model<TableAlgebra>>> = BTreeMap::new();
    for (th, pf) in PAIRS {
        let t = theory(th);
        let models = models_by_theory.entry(th.to_string()).or_insert_with(|| models_of(&t));
        ensure(!models.is_empty(), || format!("{th}: no bundled model"))?;
        let (_, f) = proofs(th, pf);
        for e in &f.entries {
            let d: Derivation = typecheck_sequent(&e.proof, &e.sequent, &system(e.system, &t), CONGRUENCE_DEPTH)
                .map_err(|r| format!("{}: {r}", e.name))?;
            derivations += 1;
            for m in models.iter() {
                let bad = soundness_failures(&d, m);
                ensure(bad.is_empty(), || {
                    format!("{}: {} invalid in {}", e.name, bad[0], m.algebra.name())
                })?;
                pairs += 1;
            }
        }
    }
    Ok(format!("{derivations} derivations valid at every node in {pairs} (derivation, model) pairs"))
}

/// Goals around which context models are built, with search depth and
/// hypothesis bound.
const COMPLETENESS_GOALS: [(&str, &str, usize, usize); 7] = [
    ("empty.dmt", "|- P => P", 6, 2),
    ("empty.dmt", "h : P \\/ Q |- Q \\/ P", 6, 2),
    ("empty.dmt", "h : P /\\ Q |- Q /\\ P", 6, 2),
    ("empty.dmt", "|- (P => Q) => (Q => R) => P => R", 8, 1),
    ("qr.dmt", "p : P, q : Q |- R", 6, 2),
    ("qr.dmt", "|- R => P", 6, 2),
    ("qr.dmt", "q : Q |- P => R", 6, 2),
];

fn sharpened_completeness() -> Verdict {
    let start = Instant::now();
    let (mut checked, mut skipped) = (0, 0);
    for (th, goal, depth, max_hyps) in COMPLETENESS_GOALS {
        let t = theory(th);
        let seq = parse_sequent(goal, &t.system).map_err(|e| e.to_string())?;
        for kind in SystemKind::ALL {
            let sys = system(kind, &t);
            let r = sharpened_completeness_check(&seq, &sys, depth, max_hyps, &[])
                .map_err(|e| format!("{goal} [{kind}]: {e}"))?;
            ensure(r.failures.is_empty(), || format!("{goal} [{kind}]: {:?}", r.failures))?;
            ensure(r.laws.is_heyting(), || format!("{goal} [{kind}]: laws {:?}", r.laws.failures()))?;
            ensure(r.members > r.beyond_horizon, || format!("{goal} [{kind}]: no membership inside the horizon"))?;
            checked += r.members - r.beyond_horizon;
            skipped += r.beyond_horizon;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} goals x 3 systems: {checked} memberships backed by cut-free proofs, {skipped} past the horizon, \
         all context algebras Heyting ({} ms)",
        COMPLETENESS_GOALS.len(),
        elapsed.as_millis()
    ))
}

fn tait_desk_check() -> Verdict {
    let budgets = Budgets::default();
    let (t, f) = proofs("qr.dmt", "qr.prf");
    let mut members = 0;
    for e in f.entries.iter().filter(|e| e.sequent.context.is_empty()) {
        let m = tait_check(&e.proof, &e.sequent.goal, &t.system, budgets.sn_fuel, &Samples::default());
        ensure(m.is_member(), || format!("{}: {m:?}", e.name))?;
        members += 1;
    }
    ensure(members > 0, || "no closed proofs".into())?;
    let selfref = theory("selfref.dmt");
    let m = tait_check(&omega_omega(), &Prop::sym("R"), &selfref.system, budgets.sn_fuel, &Samples::default());
    ensure(m.is_non_member(), || format!("omega omega: {m:?}"))?;
    Ok(format!("{members} closed qr proofs are members; omega omega is not"))
}

fn frontend_determinism() -> Verdict {
    let mut files = 0;
    for name in corpus_files(".dmt") {
        let t = parse_theory(&read(&name)).map_err(|e| format!("{name}: {e}"))?;
        let again = parse_theory(&print_theory(&t)).map_err(|e| format!("{name}: {e}"))?;
        ensure(again == t, || format!("{name} changes under print"))?;
        files += 1;
    }
    for (th, pf) in PAIRS {
        let (t, f) = proofs(th, pf);
        let again = parse_proofs(&print_proofs(&f), &t.system).map_err(|e| format!("{pf}: {e}"))?;
        ensure(again == f, || format!("{pf} changes under print"))?;
        files += 1;
    }
    for name in corpus_files(".lat") {
        let l = parse_lattice(&read(&name)).map_err(|e| format!("{name}: {e}"))?;
        ensure(parse_lattice(&print_lattice(&l)).ok() == Some(l), || format!("{name} changes under print"))?;
        files += 1;
    }
    let runs: [&[&str]; 6] = [
        &["check", "--theory", "qr.dmt", "--proof", "qr.prf", "--json"],
        &["normalize", "--theory", "selfref.dmt", "--proof", "omega.prf", "--fuel", "10", "--json"],
        &["super-consistency", "--theory", "selfref.dmt", "--battery", "default", "--json"],
        &["tva-laws", "--json"],
        &["derive-rules", "--theory", "nat.dmt", "--json"],
        &["agree", "--theory", "qr.dmt", "--depth", "4", "--max-hyps", "1", "--json"],
    ];
    for args in runs {
        let a = cli(args);
        ensure(a == cli(args), || format!("{args:?} differs between runs"))?;
    }
    Ok(format!("{files} corpus files at a parse-print fixpoint; {} JSON reports byte-identical", runs.len()))
}

fn main() {
    let criteria: [Criterion; 13] = [
        ("non-terminating example reproduced", selfref_reproduction),
        ("cut elimination on the positive example", positive_cut_elimination),
        ("subject reduction across the corpus", subject_reduction),
        ("disjunction and witness extraction", witness_extraction),
        ("derived rules match the golden file", derived_rule_fidelity),
        ("three rule systems agree", three_formalisms_agree),
        ("truth values algebra laws", tva_law_suite),
        ("candidates are not a Heyting algebra", candidates_not_heyting),
        ("super-consistency battery", super_consistency_battery),
        ("soundness instances", soundness_instances),
        ("sharpened completeness desk check", sharpened_completeness),
        ("Tait desk check", tait_desk_check),
        ("frontend determinism", frontend_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let ms = start.elapsed().as_millis();
        match verdict {
            Ok(detail) => println!("PASS {:>2} {name} [{ms} ms]: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} [{ms} ms]: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
