mod common;

use common::{cli, corpus_files, read, theory, PAIRS};
use modulo::frontend::{
    parse_lattice, parse_proof_term, parse_proofs, parse_prop, parse_theory, print_lattice, print_proofs, print_theory,
};
use modulo::proofs::{ElimArg, Proof, SuperBinder, SuperBranch, SystemKind};
use modulo::rewriting::{RewriteRule, RewriteSystem};
use modulo::syntax::{Binder, Prop, Signature, Sort, Term};
use proptest::prelude::*;

#[test]
fn theories_round_trip() {
    for name in corpus_files(".dmt") {
        let t = theory(&name);
        let printed = print_theory(&t);
        let again = parse_theory(&printed).unwrap_or_else(|e| panic!("{name}: {e}\n{printed}"));
        assert_eq!(again, t, "{name}");
        assert_eq!(print_theory(&again), printed, "{name}");
    }
}

#[test]
fn proof_files_round_trip() {
    for (th, pf) in PAIRS {
        let (t, f) = common::proofs(th, pf);
        let printed = print_proofs(&f);
        let again = parse_proofs(&printed, &t.system).unwrap_or_else(|e| panic!("{pf}: {e}\n{printed}"));
        assert_eq!(again, f, "{pf}");
        assert_eq!(print_proofs(&again), printed, "{pf}");
    }
    let listed: Vec<&str> = PAIRS.iter().map(|p| p.1).collect();
    for pf in corpus_files(".prf") {
        assert!(listed.contains(&pf.as_str()), "{pf} is not paired with a theory");
    }
}

#[test]
fn lattices_round_trip() {
    for name in corpus_files(".lat") {
        let l = parse_lattice(&read(&name)).unwrap();
        let printed = print_lattice(&l);
        assert_eq!(parse_lattice(&printed).unwrap(), l, "{name}");
    }
}

#[test]
fn corpus_size() {
    let mut total = 0;
    let mut systems = std::collections::BTreeSet::new();
    for (th, pf) in PAIRS {
        let (_, f) = common::proofs(th, pf);
        total += f.entries.len();
        systems.extend(f.entries.iter().map(|e| e.system));
    }
    assert!(total >= 20, "{total}");
    assert_eq!(systems.len(), 3);
}

#[test]
fn errors_carry_positions() {
    let e = parse_theory("prop P\nrule r : P --> Q").unwrap_err();
    assert_eq!((e.line, e.col), (2, 16));
    assert!(e.message.contains("unknown predicate `Q`"), "{e}");

    let t = parse_theory("prop P prop Q").unwrap().system;
    let e = parse_proofs("proof a : |- P\n  := fun x : P .", &t).unwrap_err();
    assert_eq!(e.line, 2);
    let e = parse_proofs("proof a : |- P := x\nproof a : |- P := y", &t).unwrap_err();
    assert!(e.message.contains("duplicate"), "{e}");
    let e = parse_proofs("system classical", &t).unwrap_err();
    assert!(e.message.contains("unknown system"), "{e}");

    let e = parse_theory("sort nat\nfun z : nat\nbudget speed = 3").unwrap_err();
    assert_eq!(e.line, 3);
    assert!(parse_theory("sort nat\nsort nat").is_err());
    assert!(parse_theory("prop P\nprop P").is_err());
}

#[test]
fn budgets_in_theory_files() {
    let t = parse_theory("prop P\nbudget fuel = 5\nbudget sn_fuel = 7").unwrap();
    let b = t.budgets();
    assert_eq!((b.fuel, b.sn_fuel), (5, 7));
    assert!(print_theory(&t).contains("budget fuel = 5"));
}

#[test]
fn unpack_sort_may_be_omitted_with_one_sort() {
    let src = "sort nat\nfun z : nat\npred P : nat\nprop R";
    let t = parse_theory(src).unwrap().system;
    let p = parse_proof_term("unpack h as x, k in pack x, k", &t, SystemKind::Modulo).unwrap();
    assert!(matches!(p, Proof::Unpack(..)));
    let t = parse_theory("sort a sort b\npred P : a").unwrap().system;
    assert!(parse_proof_term("unpack h as x, k in k", &t, SystemKind::Modulo).is_err());
}

#[test]
fn cli_examples() {
    let (code, out) = cli(&["check", "--theory", "selfref.dmt", "--proof", "omega.prf"]);
    assert_eq!(code, 0, "{out}");
    let (code, out) = cli(&["normalize", "--theory", "selfref.dmt", "--proof", "omega.prf", "--fuel", "10", "--json"]);
    assert_eq!(code, 1, "{out}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["proofs"][0]["outcome"]["kind"], "cycle");
    assert_eq!(v["proofs"][0]["outcome"]["step"], 1);
    let (code, out) = cli(&["super-consistency", "--theory", "qr.dmt", "--battery", "default", "--json"]);
    assert_eq!(code, 0, "{out}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let found = v["outcomes"].as_array().unwrap().iter().filter(|o| o["model_found"] == true).count();
    assert_eq!(found, 4);
}

#[test]
fn cli_exit_codes() {
    assert_eq!(cli(&["frobnicate"]).0, 2);
    assert_eq!(cli(&[]).0, 2);
    assert_eq!(cli(&["--help"]).0, 0);
    assert_eq!(cli(&["check", "--theory", "missing.dmt", "--proof", "qr.prf"]).0, 2);
    assert_eq!(cli(&["check", "--theory", "qr.dmt", "--proof", "qr.prf", "--system", "classical"]).0, 2);
    assert_eq!(cli(&["check", "--theory", "qr.dmt", "--proof", "qr.prf", "--budget", "speed=1"]).0, 2);
    // checking foldunfold proofs in the modulo system still succeeds; the
    // reverse does not
    assert_eq!(cli(&["check", "--theory", "qr.dmt", "--proof", "qr.prf", "--system", "foldunfold"]).0, 1);
    assert_eq!(cli(&["sn", "--theory", "qr.dmt", "--proof", "qr.prf"]).0, 0);
    assert_eq!(cli(&["sn", "--theory", "selfref.dmt", "--proof", "omega.prf"]).0, 1);
    assert_eq!(cli(&["search", "--theory", "selfref.dmt", "--goal", "|- R"]).0, 1);
    assert_eq!(cli(&["search", "--theory", "qr.dmt", "--goal", "q : Q, p : P |- R", "--depth", "3"]).0, 0);
    assert_eq!(cli(&["search", "--theory", "qr.dmt", "--goal", "|- S"]).0, 2);
    assert_eq!(cli(&["derive-rules", "--theory", "qr.dmt"]).0, 0);
    assert_eq!(cli(&["tva-laws"]).0, 0);
    assert_eq!(cli(&["tva-laws", "--lattice", "chain5.lat", "--algebra", "diamond4"]).0, 0);
    assert_eq!(cli(&["tva-laws", "--algebra", "octagon"]).0, 2);
    assert_eq!(cli(&["model-find", "--theory", "selfref.dmt", "--algebra", "chain3"]).0, 0);
    assert_eq!(cli(&["context-model", "--theory", "empty.dmt", "--goal", "h : P \\/ Q |- Q \\/ P"]).0, 0);
    assert_eq!(cli(&["agree", "--theory", "qr.dmt", "--depth", "6", "--max-hyps", "1"]).0, 0);
}

#[test]
fn cli_search_finds_application() {
    let (code, out) = cli(&["search", "--theory", "qr.dmt", "--goal", "q : Q, p : P |- R", "--depth", "3"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "found: p q");
}

#[test]
fn cli_json_reports_are_byte_identical() {
    let runs: [&[&str]; 5] = [
        &["check", "--theory", "qr.dmt", "--proof", "qr.prf", "--json"],
        &["super-consistency", "--theory", "selfref.dmt", "--json"],
        &["tva-laws", "--json"],
        &["agree", "--theory", "qr.dmt", "--depth", "4", "--max-hyps", "1", "--json"],
        &["context-model", "--theory", "qr.dmt", "--goal", "h : P, q : Q |- R", "--json"],
    ];
    for args in runs {
        let a = cli(args);
        let b = cli(args);
        assert_eq!(a, b, "{args:?}");
        let v: serde_json::Value = serde_json::from_str(&a.1).unwrap();
        assert!(v.is_object());
    }
}

#[test]
fn json_keys_are_sorted() {
    let (_, out) = cli(&["check", "--theory", "qr.dmt", "--proof", "qr.prf", "--json"]);
    let keys: Vec<&str> = out
        .lines()
        .filter(|l| l.starts_with("      \""))
        .map(|l| l.trim().split('"').nth(1).unwrap())
        .take(6)
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

fn nat_signature() -> Signature {
    let mut sig = Signature::new();
    let nat = Sort::new("nat");
    sig.add_sort(nat.clone()).unwrap();
    sig.add_function("z", vec![], nat.clone()).unwrap();
    sig.add_function("f", vec![nat.clone()], nat.clone()).unwrap();
    sig.add_predicate("P", vec![nat]).unwrap();
    for p in ["Q", "R"] {
        sig.add_predicate(p, vec![]).unwrap();
    }
    sig
}

fn arb_term(depth: usize) -> BoxedStrategy<Term> {
    // `bound` bound variables are in scope
    (0..=depth)
        .prop_map(|n| (0..n).fold(Term::constant("z"), |t, _| Term::app("f", vec![t])))
        .boxed()
}

fn arb_prop(bound: usize) -> BoxedStrategy<Prop> {
    let leaf = prop_oneof![
        Just(Prop::Top),
        Just(Prop::Bot),
        Just(Prop::sym("Q")),
        Just(Prop::sym("R")),
        arb_term(2).prop_map(|t| Prop::atom("P", vec![t])),
        (0..bound.max(1)).prop_map(move |i| if bound == 0 {
            Prop::sym("Q")
        } else {
            Prop::atom("P", vec![Term::Bound(i)])
        }),
    ];
    leaf.prop_recursive(4, 24, 2, move |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Prop::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Prop::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Prop::imp(a, b)),
            (any::<bool>(), arb_prop_under(bound + 1)).prop_map(|(all, body)| {
                let b = Binder::new("x", Sort::new("nat"));
                if all {
                    Prop::Forall(b, Box::new(body))
                } else {
                    Prop::Exists(b, Box::new(body))
                }
            }),
        ]
    })
    .boxed()
}

fn arb_prop_under(bound: usize) -> BoxedStrategy<Prop> {
    if bound > 2 {
        Just(Prop::atom("P", vec![Term::Bound(0)])).boxed()
    } else {
        arb_prop(bound)
    }
}

fn arb_proof() -> impl Strategy<Value = Proof> {
    let leaf = prop_oneof![
        Just(Proof::Unit),
        prop::sample::select(vec!["h", "k", "x"]).prop_map(Proof::hyp),
    ];
    leaf.prop_recursive(5, 40, 3, |inner| {
        prop_oneof![
            (prop::sample::select(vec!["h", "y"]), arb_prop(0), inner.clone())
                .prop_map(|(x, a, b)| Proof::lam(x, a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Proof::app(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Proof::pair(a, b)),
            inner.clone().prop_map(Proof::fst),
            inner.clone().prop_map(Proof::snd),
            inner.clone().prop_map(Proof::inl),
            inner.clone().prop_map(Proof::inr),
            (inner.clone(), inner.clone(), inner.clone()).prop_map(|(s, l, r)| Proof::case(s, "a", l, "b", r)),
            (arb_term(2), inner.clone()).prop_map(|(t, e)| Proof::inst(e, t)),
            (arb_term(2), inner.clone()).prop_map(|(t, e)| Proof::pack(t, e)),
            (inner.clone(), arb_prop(0)).prop_map(|(e, a)| Proof::absurd(e, a)),
            (inner.clone(), arb_prop(0)).prop_map(|(e, a)| Proof::ann(e, a)),
            inner.clone().prop_map(|e| Proof::fold("r", e)),
            inner.clone().prop_map(|e| Proof::unfold("r", e)),
            inner.clone().prop_map(|e| Proof::SuperIntro(
                "rq".into(),
                vec![SuperBranch { binders: vec![SuperBinder::Hyp("h".into())], body: e }],
            )),
            (inner.clone(), inner.clone())
                .prop_map(|(e, a)| Proof::SuperElim("rq".into(), 0, Box::new(e), vec![ElimArg::Proof(a)])),
        ]
    })
}

proptest! {
    #[test]
    fn props_round_trip(p in arb_prop(0)) {
        let sig = nat_signature();
        let printed = p.to_string();
        let again = parse_prop(&printed, &sig).map_err(|e| TestCaseError::fail(format!("{printed}: {e}")))?;
        prop_assert_eq!(again, p);
    }

    #[test]
    fn proofs_round_trip(p in arb_proof()) {
        let sig = nat_signature();
        let rule = RewriteRule::prop("rq", Prop::sym("Q"), Prop::imp(Prop::sym("R"), Prop::sym("R")), &sig).unwrap();
        let t = RewriteSystem::with_rules(sig, vec![rule]).unwrap();
        let printed = p.to_string();
        let again = parse_proof_term(&printed, &t, SystemKind::SuperNatural)
            .map_err(|e| TestCaseError::fail(format!("{printed}: {e}")))?;
        prop_assert_eq!(again, p);
    }
}
