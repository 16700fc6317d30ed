//! Bounded provability compared across the three rule systems.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{search_cutfree_with, SearchConfig};
use crate::proofs::{typecheck_sequent, RuleSystem, SystemError, SystemKind};
use crate::rewriting::{RewriteSystem, RuleBody};
use crate::syntax::{Context, Prop, Sequent};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Disagreement {
    pub sequent: String,
    /// system keyword -> proof found
    pub provable: BTreeMap<String, bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AgreementReport {
    pub formulas: Vec<String>,
    pub sequents: usize,
    pub depth: usize,
    /// system keyword -> number of sequents proved
    pub proved: BTreeMap<String, usize>,
    pub disagreements: Vec<Disagreement>,
    /// Found proofs the checker rejected.
    pub ill_typed: Vec<String>,
    /// Sequents whose search hit the node limit in some system.
    pub incomplete: Vec<String>,
}

impl AgreementReport {
    pub fn passed(&self) -> bool {
        self.disagreements.is_empty() && self.ill_typed.is_empty() && self.incomplete.is_empty()
    }
}

/// Closed quantifier-free subformulas of the proposition rules, plus every
/// proposition symbol.
pub fn rule_closure(theory: &RewriteSystem) -> Vec<Prop> {
    let mut out = BTreeSet::new();
    for (p, args) in &theory.signature.predicates {
        if args.is_empty() {
            out.insert(Prop::sym(p));
        }
    }
    for r in theory.prop_rules() {
        if let RuleBody::Prop { lhs, rhs } = &r.body {
            for p in lhs.subformulas().into_iter().chain(rhs.subformulas()) {
                if p.free_vars().is_empty() && p.is_quantifier_free() && p.is_locally_closed() {
                    out.insert(p);
                }
            }
        }
    }
    out.into_iter().collect()
}

fn subsets(n: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..max {
        let mut next = Vec::new();
        for s in &frontier {
            let start = s.last().map_or(0, |&l: &usize| l + 1);
            for i in start..n {
                let mut t: Vec<usize> = s.clone();
                t.push(i);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Searches every sequent `Γ ⊢ A` with `A` and the members of `Γ` drawn
/// from [`rule_closure`] and `|Γ| ≤ max_hyps` in each rule system, and
/// reports sequents on which the systems disagree.
pub fn agreement_check(theory: &RewriteSystem, depth: usize, max_hyps: usize) -> Result<AgreementReport, SystemError> {
    let systems: Vec<RuleSystem> = SystemKind::ALL
        .into_iter()
        .map(|k| RuleSystem::new(k, theory.clone()))
        .collect::<Result<_, _>>()?;
    let formulas = rule_closure(theory);
    let cfg = SearchConfig::new(depth);
    let mut report = AgreementReport {
        formulas: formulas.iter().map(|f| f.to_string()).collect(),
        sequents: 0,
        depth,
        proved: SystemKind::ALL.iter().map(|k| (k.to_string(), 0)).collect(),
        disagreements: Vec::new(),
        ill_typed: Vec::new(),
        incomplete: Vec::new(),
    };
    for ctx in subsets(formulas.len(), max_hyps) {
        let entries = ctx
            .iter()
            .enumerate()
            .map(|(k, &f)| (format!("h{k}"), formulas[f].clone()))
            .collect();
        let context = Context::from_entries(entries).expect("distinct names");
        for goal in &formulas {
            let seq = Sequent::new(context.clone(), goal.clone());
            report.sequents += 1;
            let mut provable = BTreeMap::new();
            for sys in &systems {
                let out = search_cutfree_with(&seq, sys, &cfg);
                if out.exhausted {
                    report.incomplete.push(format!("{seq} [{}]", sys.kind));
                }
                if let Some(p) = &out.proof {
                    *report.proved.get_mut(sys.kind.keyword()).expect("every system") += 1;
                    if typecheck_sequent(p, &seq, sys, cfg.congruence_depth).is_err() {
                        report.ill_typed.push(format!("{seq} [{}]: {p}", sys.kind));
                    }
                }
                provable.insert(sys.kind.to_string(), out.proof.is_some());
            }
            let mut vals = provable.values();
            let first = vals.next().copied();
            if vals.any(|v| Some(*v) != first) {
                report.disagreements.push(Disagreement {
                    sequent: seq.to_string(),
                    provable,
                });
            }
        }
    }
    Ok(report)
}
