//! Truth values as upward-closed sets of contexts over a finite universe.
//! Worlds are contexts ordered by inclusion; `⊥` is the set of inconsistent
//! contexts and atoms denote the contexts from which they have a normal
//! proof.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use super::search_cutfree;
use crate::proofs::{Derivation, RuleSystem};
use crate::rewriting::normalize_prop;
use crate::syntax::{Context, Prop, Sequent};
use crate::tva::{check_laws, FiniteAlgebra, LawReport, TruthValueAlgebra};

/// Elements are bitsets over the contexts of the universe.
pub type ContextSet = u128;

const MAX_CONTEXTS: usize = 128;
const MAX_SUBALGEBRA: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UniverseError {
    #[error("universe has {0} contexts; at most {MAX_CONTEXTS} are supported")]
    TooLarge(usize),
    #[error("quantified formula `{0}` is not supported by the context model")]
    Quantifier(String),
    #[error("generated subalgebra exceeds {MAX_SUBALGEBRA} elements")]
    SubalgebraTooLarge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextUniverse {
    /// Normalized subformula closure of the goal sequent.
    pub formulas: Vec<Prop>,
    /// Each context is a sorted set of indices into `formulas`; index 0 is
    /// the empty context.
    pub contexts: Vec<Vec<usize>>,
    pub max_hyps: usize,
}

impl ContextUniverse {
    pub fn new(goal: &Sequent, sys: &RuleSystem, max_hyps: usize) -> Result<Self, UniverseError> {
        let mut closure = BTreeSet::new();
        let mut todo: Vec<Prop> = goal.context.props().cloned().collect();
        todo.push(goal.goal.clone());
        while let Some(p) = todo.pop() {
            if matches!(p, Prop::Forall(..) | Prop::Exists(..)) {
                return Err(UniverseError::Quantifier(p.to_string()));
            }
            let n = normal(&p, sys);
            if closure.insert(n.clone()) {
                todo.extend(n.children().into_iter().cloned());
            }
        }
        let formulas: Vec<Prop> = closure.into_iter().collect();
        let mut contexts = vec![vec![]];
        for size in 1..=max_hyps.min(formulas.len()) {
            let mut combo: Vec<usize> = (0..size).collect();
            loop {
                contexts.push(combo.clone());
                if contexts.len() > MAX_CONTEXTS {
                    return Err(UniverseError::TooLarge(contexts.len()));
                }
                let mut i = size;
                while i > 0 && combo[i - 1] == formulas.len() - size + i - 1 {
                    i -= 1;
                }
                if i == 0 {
                    break;
                }
                combo[i - 1] += 1;
                for j in i..size {
                    combo[j] = combo[j - 1] + 1;
                }
            }
        }
        Ok(ContextUniverse {
            formulas,
            contexts,
            max_hyps,
        })
    }

    pub fn context(&self, i: usize) -> Context {
        let entries = self.contexts[i]
            .iter()
            .enumerate()
            .map(|(k, &f)| (format!("h{k}"), self.formulas[f].clone()))
            .collect();
        Context::from_entries(entries).expect("distinct names")
    }

    pub fn show_context(&self, i: usize) -> String {
        let parts: Vec<String> = self.contexts[i].iter().map(|&f| self.formulas[f].to_string()).collect();
        format!("[{}]", parts.join(", "))
    }

    /// Index of the context holding exactly `props`, if it is in the universe.
    pub fn find(&self, props: &BTreeSet<Prop>) -> Option<usize> {
        let mut idx: Vec<usize> = props
            .iter()
            .map(|p| self.formulas.iter().position(|f| f == p))
            .collect::<Option<_>>()?;
        idx.sort_unstable();
        self.contexts.iter().position(|c| *c == idx)
    }

    pub fn full(&self) -> ContextSet {
        if self.contexts.len() == 128 {
            u128::MAX
        } else {
            (1u128 << self.contexts.len()) - 1
        }
    }
}

/// Nesting depth of implications.
pub fn implication_rank(p: &Prop) -> usize {
    match p {
        Prop::Imp(a, b) => 1 + implication_rank(a).max(implication_rank(b)),
        _ => p.children().into_iter().map(implication_rank).max().unwrap_or(0),
    }
}

fn normal(p: &Prop, sys: &RuleSystem) -> Prop {
    let n = normalize_prop(p, sys.congruence(), 64);
    match n.value().as_prop() {
        Some(q) if n.is_normal() => q.clone(),
        _ => p.clone(),
    }
}

fn contains(s: ContextSet, i: usize) -> bool {
    s & (1u128 << i) != 0
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextAlgebra {
    pub universe: ContextUniverse,
    /// `above[i]`: contexts including context `i`.
    above: Vec<ContextSet>,
    pub bot: ContextSet,
    /// The subalgebra generated by the atom denotations.
    pub generated: Vec<ContextSet>,
}

impl ContextAlgebra {
    fn new(universe: ContextUniverse, bot: ContextSet) -> Self {
        let n = universe.contexts.len();
        let above = (0..n)
            .map(|i| {
                let ci: BTreeSet<usize> = universe.contexts[i].iter().copied().collect();
                (0..n)
                    .filter(|&j| ci.iter().all(|x| universe.contexts[j].contains(x)))
                    .fold(0, |acc, j| acc | (1u128 << j))
            })
            .collect();
        ContextAlgebra {
            universe,
            above,
            bot,
            generated: Vec::new(),
        }
    }

    pub fn up(&self, s: ContextSet) -> ContextSet {
        (0..self.universe.contexts.len())
            .filter(|&i| contains(s, i))
            .fold(0, |acc, i| acc | self.above[i])
    }

    fn generate(&mut self, seeds: &[ContextSet]) -> Result<(), UniverseError> {
        let mut set: BTreeSet<ContextSet> = seeds.iter().copied().collect();
        set.insert(self.top());
        set.insert(self.bot);
        loop {
            let cur: Vec<ContextSet> = set.iter().copied().collect();
            let before = set.len();
            for &a in &cur {
                for &b in &cur {
                    set.insert(self.and(&a, &b));
                    set.insert(self.or(&a, &b));
                    set.insert(self.imp(&a, &b));
                }
                if set.len() > MAX_SUBALGEBRA {
                    return Err(UniverseError::SubalgebraTooLarge);
                }
            }
            if set.len() == before {
                break;
            }
        }
        self.generated = set.into_iter().collect();
        Ok(())
    }
}

impl TruthValueAlgebra for ContextAlgebra {
    type Value = ContextSet;

    fn name(&self) -> String {
        "contexts".into()
    }
    fn top(&self) -> ContextSet {
        self.universe.full()
    }
    fn bot(&self) -> ContextSet {
        self.bot
    }
    /// Contexts all of whose extensions in `a` are in `b`.
    fn imp(&self, a: &ContextSet, b: &ContextSet) -> ContextSet {
        (0..self.universe.contexts.len())
            .filter(|&i| {
                let ext = self.above[i];
                ext & a & !b == 0
            })
            .fold(0, |acc, i| acc | (1u128 << i))
    }
    fn and(&self, a: &ContextSet, b: &ContextSet) -> ContextSet {
        a & b
    }
    fn or(&self, a: &ContextSet, b: &ContextSet) -> ContextSet {
        self.up(a | b)
    }
    fn forall(&self, family: &[ContextSet]) -> ContextSet {
        family.iter().fold(self.top(), |acc, x| acc & x)
    }
    fn exists(&self, family: &[ContextSet]) -> ContextSet {
        family.iter().fold(self.bot, |acc, x| self.up(acc | x))
    }
    fn is_positive(&self, a: &ContextSet) -> bool {
        contains(*a, 0)
    }
    fn show(&self, a: &ContextSet) -> String {
        let parts: Vec<String> = (0..self.universe.contexts.len())
            .filter(|&i| contains(*a, i))
            .map(|i| self.universe.show_context(i))
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

impl FiniteAlgebra for ContextAlgebra {
    fn elements(&self) -> Vec<ContextSet> {
        self.generated.clone()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextModel {
    pub algebra: ContextAlgebra,
    pub atoms: BTreeMap<Prop, ContextSet>,
    pub depth: usize,
}

impl ContextModel {
    pub fn universe(&self) -> &ContextUniverse {
        &self.algebra.universe
    }

    /// Denotation of a quantifier-free formula; atoms outside the universe
    /// denote `⊥`.
    pub fn denote(&self, p: &Prop) -> ContextSet {
        let alg = &self.algebra;
        match p {
            Prop::Atom(..) => self.atoms.get(p).copied().unwrap_or(alg.bot),
            Prop::Top => alg.top(),
            Prop::Bot => alg.bot,
            Prop::And(a, b) => alg.and(&self.denote(a), &self.denote(b)),
            Prop::Or(a, b) => alg.or(&self.denote(a), &self.denote(b)),
            Prop::Imp(a, b) => alg.imp(&self.denote(a), &self.denote(b)),
            Prop::Forall(..) | Prop::Exists(..) => alg.bot,
        }
    }

    /// Replaces an atom denotation, for negative controls.
    pub fn override_atom(&mut self, atom: &Prop, value: ContextSet) -> Result<(), UniverseError> {
        self.atoms.insert(atom.clone(), self.algebra.up(value | self.algebra.bot));
        let seeds: Vec<ContextSet> = self.atoms.values().copied().collect();
        self.algebra.generate(&seeds)
    }
}

pub fn build_context_model(
    goal: &Sequent,
    sys: &RuleSystem,
    depth: usize,
    max_hyps: usize,
) -> Result<ContextModel, UniverseError> {
    let universe = ContextUniverse::new(goal, sys, max_hyps)?;
    let n = universe.contexts.len();
    let provable = |p: &Prop| -> ContextSet {
        (0..n)
            .filter(|&i| search_cutfree(&Sequent::new(universe.context(i), p.clone()), sys, depth).is_some())
            .fold(0, |acc, i| acc | (1u128 << i))
    };
    let bot = provable(&Prop::Bot);
    let atoms: BTreeMap<Prop, ContextSet> = universe
        .formulas
        .iter()
        .filter(|f| f.is_atom())
        .map(|a| (a.clone(), provable(a) | bot))
        .collect();
    let mut algebra = ContextAlgebra::new(universe, bot);
    let seeds: Vec<ContextSet> = atoms.values().copied().collect();
    algebra.generate(&seeds)?;
    Ok(ContextModel { algebra, atoms, depth })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompletenessFailure {
    pub context: String,
    pub formula: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompletenessReport {
    pub goal: String,
    pub formulas: Vec<String>,
    pub contexts: usize,
    pub subalgebra_size: usize,
    pub pairs_checked: usize,
    pub members: usize,
    /// Memberships not checked because the universe has no room to extend
    /// the context far enough.
    pub beyond_horizon: usize,
    /// Membership without a normal proof within the depth bound.
    pub failures: Vec<CompletenessFailure>,
    pub derivations_checked: usize,
    /// Derivations whose conclusion is not valid in the model.
    pub soundness_failures: Vec<CompletenessFailure>,
    pub goal_valid: bool,
    pub laws: LawReport,
}

impl CompletenessReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.soundness_failures.is_empty() && self.laws.is_heyting()
    }
}

/// Builds the context model around `goal` and checks it.
pub fn sharpened_completeness_check(
    goal: &Sequent,
    sys: &RuleSystem,
    depth: usize,
    max_hyps: usize,
    corpus: &[Derivation],
) -> Result<CompletenessReport, UniverseError> {
    let model = build_context_model(goal, sys, depth, max_hyps)?;
    Ok(check_context_model(goal, &model, sys, corpus))
}

/// Every membership `Γ ∈ ⟦A⟧` must come with a normal proof of `Γ ⊢ A`, and
/// every derivation inside the universe must be valid. Memberships are only
/// checked when `|Γ| + rank(A) ≤ max_hyps`: past that, implications are
/// decided on contexts that cannot be extended by their antecedents.
pub fn check_context_model(
    goal: &Sequent,
    model: &ContextModel,
    sys: &RuleSystem,
    corpus: &[Derivation],
) -> CompletenessReport {
    let u = model.universe();
    let alg = &model.algebra;
    let mut failures = Vec::new();
    let mut pairs = 0;
    let mut members = 0;
    let mut beyond_horizon = 0;
    for a in &u.formulas {
        let den = model.denote(a);
        for i in 0..u.contexts.len() {
            pairs += 1;
            if !contains(den, i) {
                continue;
            }
            members += 1;
            if u.contexts[i].len() + implication_rank(a) > u.max_hyps {
                beyond_horizon += 1;
                continue;
            }
            if search_cutfree(&Sequent::new(u.context(i), a.clone()), sys, model.depth).is_none() {
                failures.push(CompletenessFailure {
                    context: u.show_context(i),
                    formula: a.to_string(),
                });
            }
        }
    }
    let valid = |ctx: &Context, a: &Prop| -> Option<bool> {
        let hyps: Vec<Prop> = ctx.props().map(|p| normal(p, sys)).collect();
        let a = normal(a, sys);
        let set: BTreeSet<Prop> = hyps.iter().cloned().collect();
        if set.len() > u.max_hyps || !set.iter().chain([&a]).all(|f| u.formulas.contains(f)) {
            return None;
        }
        let ctx_val = hyps.iter().fold(alg.top(), |acc, h| alg.and(&acc, &model.denote(h)));
        Some(alg.is_positive(&alg.imp(&ctx_val, &model.denote(&a))))
    };
    let mut checked = 0;
    let mut soundness_failures = Vec::new();
    for d in corpus {
        let s = d.sequent();
        if let Some(ok) = valid(&s.context, &s.goal) {
            checked += 1;
            if !ok {
                soundness_failures.push(CompletenessFailure {
                    context: s.context.to_string(),
                    formula: s.goal.to_string(),
                });
            }
        }
    }
    CompletenessReport {
        goal: goal.to_string(),
        formulas: u.formulas.iter().map(|f| f.to_string()).collect(),
        contexts: u.contexts.len(),
        subalgebra_size: alg.generated.len(),
        pairs_checked: pairs,
        members,
        beyond_horizon,
        failures,
        derivations_checked: checked,
        soundness_failures,
        goal_valid: valid(&goal.context, &goal.goal).unwrap_or(false),
        laws: check_laws(alg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewriting::{RewriteRule, RewriteSystem};
    use crate::syntax::Signature;

    fn sym(s: &str) -> Prop {
        Prop::sym(s)
    }

    fn empty() -> RuleSystem {
        RuleSystem::modulo(RewriteSystem::new(Signature::with_props(&["P", "Q", "R"])))
    }

    fn goal(p: Prop) -> Sequent {
        Sequent::new(Context::new(), p)
    }

    #[test]
    fn atom_denotes_contexts_containing_it() {
        let g = goal(Prop::imp(sym("Q"), sym("Q")));
        let m = build_context_model(&g, &empty(), 6, 3).unwrap();
        let u = m.universe();
        let q = u.formulas.iter().position(|f| *f == sym("Q")).unwrap();
        let den = m.denote(&sym("Q"));
        for (i, c) in u.contexts.iter().enumerate() {
            assert_eq!(contains(den, i), c.contains(&q));
        }
        assert!(m.algebra.is_positive(&m.denote(&g.goal)));
        assert_eq!(m.denote(&Prop::Top), u.full());
    }

    #[test]
    fn disjunctive_goal_passes() {
        let g = goal(Prop::or(Prop::imp(sym("Q"), sym("Q")), sym("R")));
        let r = sharpened_completeness_check(&g, &empty(), 6, 3, &[]).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.goal_valid);
    }

    #[test]
    fn selfref_goal_is_not_valid() {
        let sig = Signature::with_props(&["P", "R"]);
        let rule = RewriteRule::prop("r", sym("P"), Prop::imp(sym("P"), sym("R")), &sig).unwrap();
        let sys = RuleSystem::modulo(RewriteSystem::with_rules(sig, vec![rule]).unwrap());
        let m = build_context_model(&goal(sym("R")), &sys, 8, 3).unwrap();
        assert!(!m.algebra.is_positive(&m.denote(&sym("R"))));
    }

    #[test]
    fn corrupted_atom_is_caught() {
        let g = goal(Prop::imp(sym("Q"), sym("R")));
        let sys = empty();
        let mut m = build_context_model(&g, &sys, 6, 3).unwrap();
        let full = m.universe().full();
        m.override_atom(&sym("R"), full).unwrap();
        let r = check_context_model(&g, &m, &sys, &[]);
        assert!(!r.failures.is_empty());
    }
}
