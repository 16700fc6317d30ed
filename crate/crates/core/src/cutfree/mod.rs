//! Bounded search for cut-free proofs and the context-set model used to
//! check sharpened completeness.

mod agree;
mod context;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::proofs::{ElimArg, Proof, RuleSystem, SuperBinder, SuperBranch, SuperStep, SystemKind};
use crate::rewriting::{congruent, match_prop, normalize_prop, whnf, Congruence, RuleBody};
use crate::syntax::{fresh_name, Context, Prop, Sequent, Sort, Term, Var};

pub use agree::{agreement_check, rule_closure, AgreementReport, Disagreement};
pub use context::{
    build_context_model, sharpened_completeness_check, CompletenessFailure, CompletenessReport, ContextAlgebra,
    ContextModel, ContextUniverse, UniverseError,
};

/// Knobs for the search. `congruence_depth` bounds conversion checks,
/// `node_limit` the number of visited goals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    pub depth: usize,
    pub congruence_depth: usize,
    pub node_limit: usize,
}

impl SearchConfig {
    pub fn new(depth: usize) -> Self {
        SearchConfig {
            depth,
            congruence_depth: 8,
            node_limit: 200_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub proof: Option<Proof>,
    pub nodes: usize,
    pub exhausted: bool,
}

/// Looks for a normal proof of `seq` of height at most `depth`.
pub fn search_cutfree(seq: &Sequent, sys: &RuleSystem, depth: usize) -> Option<Proof> {
    search_cutfree_with(seq, sys, &SearchConfig::new(depth)).proof
}

pub fn search_cutfree_with(seq: &Sequent, sys: &RuleSystem, cfg: &SearchConfig) -> SearchOutcome {
    let mut s = Searcher {
        sys,
        cfg: *cfg,
        failed: HashMap::new(),
        path: HashSet::new(),
        prunes: 0,
        nodes: 0,
    };
    for d in 1..=cfg.depth {
        s.path.clear();
        if let Some(p) = s.prove(&seq.context, &seq.goal, d) {
            return SearchOutcome {
                proof: Some(p),
                nodes: s.nodes,
                exhausted: false,
            };
        }
        if s.nodes >= cfg.node_limit {
            return SearchOutcome {
                proof: None,
                nodes: s.nodes,
                exhausted: true,
            };
        }
    }
    SearchOutcome {
        proof: None,
        nodes: s.nodes,
        exhausted: false,
    }
}

type Key = (BTreeSet<Prop>, Prop);

struct Searcher<'a> {
    sys: &'a RuleSystem,
    cfg: SearchConfig,
    /// greatest depth at which a goal is known to fail
    failed: HashMap<Key, usize>,
    path: HashSet<Key>,
    prunes: usize,
    nodes: usize,
}

impl Searcher<'_> {
    fn head(&self, p: &Prop) -> Prop {
        match whnf(p, self.sys.congruence(), self.cfg.congruence_depth * 4) {
            Ok((q, _)) => q,
            Err(_) => p.clone(),
        }
    }

    fn same(&self, a: &Prop, b: &Prop) -> bool {
        a == b || matches!(congruent(a, b, self.sys.congruence(), self.cfg.congruence_depth), Congruence::Yes(_))
    }

    /// Atom in term-normal form, for matching rule left-hand sides.
    fn term_normal(&self, p: &Prop) -> Prop {
        normalize_prop(p, self.sys.congruence(), self.cfg.congruence_depth * 4)
            .value()
            .as_prop()
            .cloned()
            .unwrap_or_else(|| p.clone())
    }

    fn key(ctx: &Context, goal: &Prop) -> Key {
        (ctx.props().cloned().collect(), goal.clone())
    }

    fn terms(&self, ctx: &Context, goal: &Prop, sort: &Sort) -> Vec<Term> {
        let mut vars = ctx.free_vars();
        goal.collect_vars(&mut vars);
        let mut out: Vec<Term> = vars.into_iter().filter(|v| v.sort == *sort).map(Term::Var).collect();
        for t in self.sys.theory.signature.ground_terms(sort, 1) {
            if !out.contains(&t) {
                out.push(t);
            }
        }
        out.truncate(6);
        out
    }

    fn fresh_var(&self, ctx: &Context, goal: &Prop, hint: &str, sort: &Sort) -> Var {
        let mut vars = ctx.free_vars();
        goal.collect_vars(&mut vars);
        let taken: BTreeSet<String> = vars.into_iter().map(|v| v.name).collect();
        let base = if hint.is_empty() { "y" } else { hint };
        Var::new(fresh_name(base, &taken), sort.clone())
    }

    /// Adds `a` as a hypothesis unless it is already present.
    fn assume(&self, ctx: &Context, base: &str, a: &Prop) -> (Context, String) {
        if let Some((h, _)) = ctx.entries().iter().find(|(_, p)| p == a) {
            return (ctx.clone(), h.clone());
        }
        let h = ctx.fresh_hyp(base);
        (ctx.extend(&h, a.clone()), h)
    }

    fn prove(&mut self, ctx: &Context, goal: &Prop, d: usize) -> Option<Proof> {
        if d == 0 || self.nodes >= self.cfg.node_limit {
            return None;
        }
        self.nodes += 1;
        let key = Self::key(ctx, goal);
        if self.failed.get(&key).is_some_and(|&f| f >= d) {
            return None;
        }
        if self.path.contains(&key) {
            self.prunes += 1;
            return None;
        }
        let prunes = self.prunes;
        self.path.insert(key.clone());
        let r = self.prove_goal(ctx, goal, d);
        self.path.remove(&key);
        if r.is_none() && prunes == self.prunes && self.nodes < self.cfg.node_limit {
            let e = self.failed.entry(key).or_insert(0);
            *e = (*e).max(d);
        }
        r
    }

    fn prove_goal(&mut self, ctx: &Context, goal: &Prop, d: usize) -> Option<Proof> {
        let g = self.head(goal);
        match &g {
            Prop::Top => return Some(Proof::Unit),
            Prop::Imp(a, b) => {
                let (c2, h) = self.assume(ctx, "h", a);
                return self.prove(&c2, b, d - 1).map(|body| Proof::lam(&h, (**a).clone(), body));
            }
            Prop::And(a, b) => {
                let l = self.prove(ctx, a, d - 1)?;
                let r = self.prove(ctx, b, d - 1)?;
                return Some(Proof::pair(l, r));
            }
            Prop::Forall(bd, body) => {
                let x = self.fresh_var(ctx, goal, &bd.hint.0, &bd.sort);
                let inner = body.open(&Term::Var(x.clone()));
                return self.prove(ctx, &inner, d - 1).map(|b| Proof::gen(x, b));
            }
            Prop::Or(a, b) => {
                if let Some(p) = self.prove(ctx, a, d - 1) {
                    return Some(Proof::inl(p));
                }
                if let Some(p) = self.prove(ctx, b, d - 1) {
                    return Some(Proof::inr(p));
                }
            }
            Prop::Exists(bd, body) => {
                for t in self.terms(ctx, goal, &bd.sort) {
                    if let Some(p) = self.prove(ctx, &body.open(&t), d - 1) {
                        return Some(Proof::pack(t, p));
                    }
                }
            }
            Prop::Atom(..) => {
                if let Some(p) = self.intro_rule(ctx, &g, d) {
                    return Some(p);
                }
            }
            Prop::Bot => {}
        }
        let hyps: Vec<(String, Prop)> = ctx.entries().to_vec();
        for (h, a) in hyps {
            if !self.could_reach(&a, &g, 4) {
                continue;
            }
            if let Some(p) = self.spine(ctx, Proof::hyp(&h), &a, goal, d - 1) {
                return Some(p);
            }
        }
        None
    }

    /// Fold or supernatural introduction on an atomic goal.
    fn intro_rule(&mut self, ctx: &Context, g: &Prop, d: usize) -> Option<Proof> {
        let target = self.term_normal(g);
        match self.sys.kind {
            SystemKind::Modulo => None,
            SystemKind::FoldUnfold => {
                let rules: Vec<(String, Prop, Prop)> = self
                    .sys
                    .theory
                    .prop_rules()
                    .filter_map(|r| match &r.body {
                        RuleBody::Prop { lhs, rhs } => Some((r.name.clone(), lhs.clone(), rhs.clone())),
                        _ => None,
                    })
                    .collect();
                for (name, lhs, rhs) in rules {
                    let mut sigma = BTreeMap::new();
                    if match_prop(&lhs, &target, 0, &mut sigma) {
                        if let Some(p) = self.prove(ctx, &rhs.instantiate(&sigma), d - 1) {
                            return Some(Proof::fold(&name, p));
                        }
                    }
                }
                None
            }
            SystemKind::SuperNatural => {
                let rules: Vec<_> = self.sys.super_rules().cloned().collect();
                'rules: for sr in rules {
                    let mut sigma = BTreeMap::new();
                    if !match_prop(&sr.lhs, &target, 0, &mut sigma) {
                        continue;
                    }
                    let mut branches = Vec::new();
                    for schema in &sr.branches {
                        let mut bctx = ctx.clone();
                        let mut binders = Vec::new();
                        let mut sigma = sigma.clone();
                        for step in &schema.steps {
                            match step {
                                SuperStep::Hyp(a) => {
                                    let h = bctx.fresh_hyp("h");
                                    bctx = bctx.extend(&h, a.instantiate(&sigma));
                                    binders.push(SuperBinder::Hyp(h));
                                }
                                SuperStep::Var(v) => {
                                    let x = self.fresh_var(&bctx, g, &v.name, &v.sort);
                                    sigma.insert(v.clone(), Term::Var(x.clone()));
                                    binders.push(SuperBinder::Term(x));
                                }
                            }
                        }
                        let concl = schema.conclusion.instantiate(&sigma);
                        match self.prove(&bctx, &concl, d - 1) {
                            Some(body) => branches.push(SuperBranch { binders, body }),
                            None => continue 'rules,
                        }
                    }
                    return Some(Proof::SuperIntro(sr.name.clone(), branches));
                }
                None
            }
        }
    }

    /// Cheap structural test: some elimination path from `h` ends in a
    /// formula congruent to `goal` or in one that concludes anything.
    fn could_reach(&self, h: &Prop, goal: &Prop, fuel: usize) -> bool {
        if self.same(h, goal) {
            return true;
        }
        if fuel == 0 {
            return true;
        }
        let hh = self.head(h);
        match &hh {
            Prop::Bot | Prop::Or(..) | Prop::Exists(..) => true,
            Prop::Imp(_, b) => self.could_reach(b, goal, fuel - 1),
            Prop::And(a, b) => self.could_reach(a, goal, fuel - 1) || self.could_reach(b, goal, fuel - 1),
            Prop::Forall(..) => true,
            Prop::Atom(..) => !matches!(self.sys.kind, SystemKind::Modulo),
            Prop::Top => false,
        }
    }

    fn spine(&mut self, ctx: &Context, e: Proof, h: &Prop, goal: &Prop, d: usize) -> Option<Proof> {
        if self.same(h, goal) {
            return Some(e);
        }
        if d == 0 || self.nodes >= self.cfg.node_limit {
            return None;
        }
        self.nodes += 1;
        let hh = self.head(h);
        match &hh {
            Prop::Imp(a, b) => {
                if !self.could_reach(b, goal, 4) {
                    return None;
                }
                let arg = self.prove(ctx, a, d - 1)?;
                self.spine(ctx, Proof::app(e, arg), b, goal, d - 1)
            }
            Prop::And(a, b) => self
                .spine(ctx, Proof::fst(e.clone()), a, goal, d - 1)
                .or_else(|| self.spine(ctx, Proof::snd(e), b, goal, d - 1)),
            Prop::Forall(bd, body) => {
                for t in self.terms(ctx, goal, &bd.sort) {
                    if let Some(p) = self.spine(ctx, Proof::inst(e.clone(), t.clone()), &body.open(&t), goal, d - 1) {
                        return Some(p);
                    }
                }
                None
            }
            Prop::Bot => Some(Proof::absurd(e, goal.clone())),
            Prop::Or(a, b) => {
                let (cl, x) = self.assume_fresh(ctx, a);
                let l = self.prove(&cl, goal, d - 1)?;
                let (cr, y) = self.assume_fresh(ctx, b);
                let r = self.prove(&cr, goal, d - 1)?;
                Some(Proof::case(e, &x, l, &y, r))
            }
            Prop::Exists(bd, body) => {
                let y = self.fresh_var(ctx, goal, &bd.hint.0, &bd.sort);
                let opened = body.open(&Term::Var(y.clone()));
                let (c2, hn) = self.assume_fresh(ctx, &opened);
                let b = self.prove(&c2, goal, d - 1)?;
                Some(Proof::unpack(e, y, &hn, b))
            }
            Prop::Atom(..) => self.spine_rule(ctx, e, &hh, goal, d),
            Prop::Top => None,
        }
    }

    fn assume_fresh(&self, ctx: &Context, a: &Prop) -> (Context, String) {
        let h = ctx.fresh_hyp("h");
        (ctx.extend(&h, a.clone()), h)
    }

    /// Unfold or supernatural elimination on an atomic hypothesis.
    fn spine_rule(&mut self, ctx: &Context, e: Proof, h: &Prop, goal: &Prop, d: usize) -> Option<Proof> {
        let target = self.term_normal(h);
        match self.sys.kind {
            SystemKind::Modulo => None,
            SystemKind::FoldUnfold => {
                let rules: Vec<(String, Prop, Prop)> = self
                    .sys
                    .theory
                    .prop_rules()
                    .filter_map(|r| match &r.body {
                        RuleBody::Prop { lhs, rhs } => Some((r.name.clone(), lhs.clone(), rhs.clone())),
                        _ => None,
                    })
                    .collect();
                for (name, lhs, rhs) in rules {
                    let mut sigma = BTreeMap::new();
                    if match_prop(&lhs, &target, 0, &mut sigma) {
                        let unfolded = rhs.instantiate(&sigma);
                        if let Some(p) = self.spine(ctx, Proof::unfold(&name, e.clone()), &unfolded, goal, d - 1) {
                            return Some(p);
                        }
                    }
                }
                None
            }
            SystemKind::SuperNatural => {
                let rules: Vec<_> = self.sys.super_rules().cloned().collect();
                for sr in rules {
                    let mut sigma = BTreeMap::new();
                    if !match_prop(&sr.lhs, &target, 0, &mut sigma) {
                        continue;
                    }
                    for (i, schema) in sr.branches.iter().enumerate() {
                        if !self.could_reach(&schema.conclusion.instantiate(&sigma), goal, 4)
                            && schema.steps.iter().all(|s| matches!(s, SuperStep::Hyp(_)))
                        {
                            continue;
                        }
                        if let Some(p) = self.super_args(ctx, &e, &sr.name, i, &schema.steps, sigma.clone(), Vec::new(), &schema.conclusion, goal, d) {
                            return Some(p);
                        }
                    }
                }
                None
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn super_args(
        &mut self,
        ctx: &Context,
        e: &Proof,
        rule: &str,
        branch: usize,
        steps: &[SuperStep],
        mut sigma: BTreeMap<Var, Term>,
        mut args: Vec<ElimArg>,
        conclusion: &Prop,
        goal: &Prop,
        d: usize,
    ) -> Option<Proof> {
        let Some((step, rest)) = steps.split_first() else {
            let elim = Proof::SuperElim(rule.to_string(), branch, Box::new(e.clone()), args);
            return self.spine(ctx, elim, &conclusion.instantiate(&sigma), goal, d - 1);
        };
        match step {
            SuperStep::Hyp(a) => {
                let p = self.prove(ctx, &a.instantiate(&sigma), d - 1)?;
                args.push(ElimArg::Proof(p));
                self.super_args(ctx, e, rule, branch, rest, sigma, args, conclusion, goal, d)
            }
            SuperStep::Var(v) => {
                for t in self.terms(ctx, goal, &v.sort) {
                    sigma.insert(v.clone(), t.clone());
                    let mut args = args.clone();
                    args.push(ElimArg::Term(t));
                    if let Some(p) = self.super_args(ctx, e, rule, branch, rest, sigma.clone(), args, conclusion, goal, d) {
                        return Some(p);
                    }
                }
                None
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proofs::typecheck_sequent;
    use crate::reduction::is_normal;
    use crate::rewriting::{RewriteRule, RewriteSystem};
    use crate::syntax::Signature;

    fn sym(s: &str) -> Prop {
        Prop::sym(s)
    }

    fn theory(lhs: &str, rhs: Prop) -> RewriteSystem {
        let sig = Signature::with_props(&["P", "Q", "R"]);
        let r = RewriteRule::prop("r", sym(lhs), rhs, &sig).unwrap();
        RewriteSystem::with_rules(sig, vec![r]).unwrap()
    }

    fn qr() -> RewriteSystem {
        theory("P", Prop::imp(sym("Q"), sym("R")))
    }

    fn seq(hyps: &[(&str, Prop)], goal: Prop) -> Sequent {
        let ctx = Context::from_entries(hyps.iter().map(|(h, p)| (h.to_string(), p.clone())).collect()).unwrap();
        Sequent::new(ctx, goal)
    }

    fn verified(s: &Sequent, sys: &RuleSystem, depth: usize) -> Option<Proof> {
        let p = search_cutfree(s, sys, depth)?;
        typecheck_sequent(&p, s, sys, 8).unwrap_or_else(|r| panic!("{p}: {r}"));
        assert!(is_normal(&p), "{p}");
        Some(p)
    }

    #[test]
    fn identity() {
        let empty = RuleSystem::modulo(RewriteSystem::new(Signature::with_props(&["Q"])));
        let p = verified(&seq(&[], Prop::imp(sym("Q"), sym("Q"))), &empty, 2).unwrap();
        assert_eq!(p.to_string(), "fun h : Q . h");
    }

    #[test]
    fn modus_ponens_modulo() {
        let s = seq(&[("q", sym("Q")), ("p", sym("P"))], sym("R"));
        let p = verified(&s, &RuleSystem::modulo(qr()), 3).unwrap();
        assert_eq!(p, Proof::app(Proof::hyp("p"), Proof::hyp("q")));
    }

    #[test]
    fn selfref_goal_has_no_normal_proof() {
        let t = theory("P", Prop::imp(sym("P"), sym("R")));
        for kind in SystemKind::ALL {
            let sys = RuleSystem::new(kind, t.clone()).unwrap();
            assert!(search_cutfree(&seq(&[], sym("R")), &sys, 8).is_none(), "{kind}");
        }
    }

    #[test]
    fn all_systems_find_fold_proofs() {
        for kind in SystemKind::ALL {
            let sys = RuleSystem::new(kind, qr()).unwrap();
            let s = seq(&[("q", sym("Q")), ("p", sym("P"))], sym("R"));
            assert!(verified(&s, &sys, 6).is_some(), "{kind}");
            let s = seq(&[("f", Prop::imp(sym("Q"), sym("R")))], sym("P"));
            assert!(verified(&s, &sys, 6).is_some(), "{kind}");
        }
    }

    #[test]
    fn disjunction_and_falsity() {
        let sys = RuleSystem::modulo(RewriteSystem::new(Signature::with_props(&["P", "Q", "R"])));
        let comm = Prop::imp(Prop::or(sym("Q"), sym("R")), Prop::or(sym("R"), sym("Q")));
        assert!(verified(&seq(&[], comm), &sys, 5).is_some());
        let efq = Prop::imp(Prop::Bot, sym("Q"));
        assert!(verified(&seq(&[], efq), &sys, 3).is_some());
        assert!(search_cutfree(&seq(&[], Prop::or(sym("Q"), Prop::imp(sym("Q"), Prop::Bot))), &sys, 6).is_none());
    }

    #[test]
    fn quantifiers() {
        let mut sig = Signature::new();
        let s = Sort::new("s");
        sig.add_sort(s.clone()).unwrap();
        sig.add_function("c", vec![], s.clone()).unwrap();
        sig.add_predicate("A", vec![s.clone()]).unwrap();
        let sys = RuleSystem::modulo(RewriteSystem::new(sig));
        let x = Var::new("x", s.clone());
        let ax = Prop::atom("A", vec![Term::Var(x.clone())]);
        let goal = Prop::imp(Prop::forall(&x, ax.clone()), Prop::exists(&x, ax.clone()));
        assert!(verified(&seq(&[], goal), &sys, 5).is_some());
        let goal = Prop::imp(Prop::exists(&x, ax.clone()), Prop::exists(&x, ax));
        assert!(verified(&seq(&[], goal), &sys, 5).is_some());
    }
}
