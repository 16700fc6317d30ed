use std::collections::BTreeMap;

use modulo::cutfree::search_cutfree;
use modulo::proofs::{typecheck_sequent, Proof, RuleSystem, SystemKind};
use modulo::reduction::{is_normal, normalize_proof, reachable, Outcome};
use modulo::rewriting::{normalize_prop, RewriteRule, RewriteSystem};
use modulo::semantics::{rule_valid_everywhere, soundness_failures, tait_check, Model, Valuation};
use modulo::syntax::{Context, Prop, Sequent, Signature};
use modulo::tva::{bundled_battery, check_laws, heyting_from_lattice, LatticeSpec, Samples, TableAlgebra, TruthValueAlgebra};
use proptest::prelude::*;

fn qr() -> RewriteSystem {
    let sig = Signature::with_props(&["P", "Q", "R"]);
    let rule = RewriteRule::prop("r", Prop::sym("P"), Prop::imp(Prop::sym("Q"), Prop::sym("R")), &sig).unwrap();
    RewriteSystem::with_rules(sig, vec![rule]).unwrap()
}

fn arb_prop() -> impl Strategy<Value = Prop> {
    let leaf = prop_oneof![
        Just(Prop::Top),
        Just(Prop::Bot),
        Just(Prop::sym("P")),
        Just(Prop::sym("Q")),
        Just(Prop::sym("R")),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Prop::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Prop::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Prop::imp(a, b)),
        ]
    })
}

fn arb_sequent() -> impl Strategy<Value = Sequent> {
    (prop::collection::vec(arb_prop(), 0..3), arb_prop()).prop_map(|(hyps, goal)| {
        let entries = hyps.into_iter().enumerate().map(|(i, p)| (format!("h{i}"), p)).collect();
        Sequent::new(Context::from_entries(entries).unwrap(), goal)
    })
}

/// The model of `P --> Q => R` with the given values of `Q` and `R`.
fn qr_model(alg: &TableAlgebra, q: usize, r: usize) -> Model<TableAlgebra> {
    let mut predicates = BTreeMap::new();
    for (name, v) in [("P", alg.imp(&q, &r)), ("Q", q), ("R", r)] {
        predicates.insert(name.to_string(), BTreeMap::from([(vec![], v)]));
    }
    Model {
        algebra: alg.clone(),
        domains: BTreeMap::new(),
        functions: BTreeMap::new(),
        predicates,
    }
}

fn arb_model() -> impl Strategy<Value = Model<TableAlgebra>> {
    (0..4usize, any::<prop::sample::Index>(), any::<prop::sample::Index>()).prop_map(|(k, q, r)| {
        let alg = bundled_battery().swap_remove(k);
        let n = alg.len();
        qr_model(&alg, q.index(n), r.index(n))
    })
}

fn arb_system() -> impl Strategy<Value = SystemKind> {
    prop::sample::select(SystemKind::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn models_of_the_rule_validate_it(m in arb_model()) {
        let theory = qr();
        prop_assert!(rule_valid_everywhere(&theory.rules()[0], &m).is_valid());
    }

    #[test]
    fn denotation_is_invariant_under_rewriting(a in arb_prop(), m in arb_model()) {
        let theory = qr();
        let n = normalize_prop(&a, &theory, 100);
        let b = n.value().as_prop().unwrap();
        let phi = Valuation::new();
        prop_assert_eq!(m.denote(&a, &phi).unwrap(), m.denote(b, &phi).unwrap());
    }

    #[test]
    fn search_results_are_checked_normal_and_sound(seq in arb_sequent(), kind in arb_system(), m in arb_model()) {
        let sys = RuleSystem::new(kind, qr()).unwrap();
        if let Some(p) = search_cutfree(&seq, &sys, 4) {
            let d = typecheck_sequent(&p, &seq, &sys, 8)
                .map_err(|e| TestCaseError::fail(format!("{seq}: {p}: {e}")))?;
            prop_assert!(is_normal(&p), "{}", p);
            prop_assert!(d.replay(&sys));
            prop_assert!(soundness_failures(&d, &m).is_empty(), "{}", seq);
        }
    }

    #[test]
    fn reduction_preserves_types(seq in arb_sequent()) {
        let sys = RuleSystem::modulo(qr());
        if let Some(p) = search_cutfree(&seq, &sys, 4) {
            let goal = seq.goal.clone();
            let cuts = [
                Proof::app(Proof::ann(Proof::lam("w", goal.clone(), Proof::hyp("w")), Prop::imp(goal.clone(), goal.clone())), p.clone()),
                Proof::fst(Proof::ann(Proof::pair(p.clone(), Proof::Unit), Prop::and(goal.clone(), Prop::Top))),
                Proof::case(
                    Proof::ann(Proof::inl(p.clone()), Prop::or(goal.clone(), Prop::Bot)),
                    "a", Proof::hyp("a"), "b", Proof::absurd(Proof::hyp("b"), goal.clone()),
                ),
            ];
            for cut in cuts {
                prop_assert!(typecheck_sequent(&cut, &seq, &sys, 8).is_ok(), "{}", cut);
                for q in reachable(&cut, 64) {
                    prop_assert!(typecheck_sequent(&q, &seq, &sys, 8).is_ok(), "{} -> {}", cut, q);
                }
                let trace = normalize_proof(&cut, 100);
                prop_assert_eq!(trace.outcome, Outcome::Normal);
                prop_assert!(is_normal(trace.last()));
            }
        }
    }

    #[test]
    fn closed_proofs_are_in_their_candidates(goal in arb_prop()) {
        let theory = qr();
        let sys = RuleSystem::modulo(theory.clone());
        let seq = Sequent::new(Context::new(), goal.clone());
        if let Some(p) = search_cutfree(&seq, &sys, 4) {
            let m = tait_check(&p, &goal, &theory, 200, &Samples::default());
            prop_assert!(m.is_member(), "{}: {:?}", p, m);
        }
    }

    #[test]
    fn finite_chains_are_heyting(n in 1usize..7) {
        let names: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let alg = heyting_from_lattice(&LatticeSpec::chain("c", &refs)).unwrap();
        let r = check_laws(&alg);
        prop_assert!(r.is_heyting(), "{:?}", r.failures());
    }

    #[test]
    fn products_of_chains_are_heyting(a in 1usize..4, b in 1usize..4) {
        let mut spec = LatticeSpec { name: "grid".into(), ..LatticeSpec::default() };
        for i in 0..a {
            for j in 0..b {
                spec.elements.push(format!("{i}{j}"));
                if i + 1 < a {
                    spec.order.push((format!("{i}{j}"), format!("{}{j}", i + 1)));
                }
                if j + 1 < b {
                    spec.order.push((format!("{i}{j}"), format!("{i}{}", j + 1)));
                }
            }
        }
        spec.bot = "00".into();
        spec.top = format!("{}{}", a - 1, b - 1);
        let alg = heyting_from_lattice(&spec).unwrap();
        prop_assert_eq!(alg.len(), a * b);
        prop_assert!(check_laws(&alg).is_heyting());
    }
}
