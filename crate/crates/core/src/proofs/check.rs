//! Bidirectional type checking of proof terms modulo the congruence.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::derive::{RuleSystem, SuperStep, SystemKind};
use super::{ElimArg, Proof, SuperBinder};
use crate::rewriting::{congruent, match_prop, whnf, Congruence, RuleBody, Witness};
use crate::syntax::{fresh_name, Context, Expr, Prop, Sequent, SyntaxError, Term, Var};

/// A conversion used by the checker: `from` and `to` are congruent, as
/// witnessed by `witness`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conversion {
    pub from: Prop,
    pub to: Prop,
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub rule: String,
    pub context: Context,
    pub conclusion: Prop,
    pub conversions: Vec<Conversion>,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    fn leaf(rule: impl Into<String>, context: &Context, conclusion: Prop) -> Self {
        Derivation {
            rule: rule.into(),
            context: context.clone(),
            conclusion,
            conversions: Vec::new(),
            premises: Vec::new(),
        }
    }

    fn node(rule: impl Into<String>, context: &Context, conclusion: Prop, premises: Vec<Derivation>) -> Self {
        Derivation {
            premises,
            ..Self::leaf(rule, context, conclusion)
        }
    }

    fn with(mut self, conv: Option<Conversion>) -> Self {
        self.conversions.extend(conv);
        self
    }

    pub fn sequent(&self) -> Sequent {
        Sequent::new(self.context.clone(), self.conclusion.clone())
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Derivation::size).sum::<usize>()
    }

    pub fn conversion_count(&self) -> usize {
        self.conversions.len() + self.premises.iter().map(Derivation::conversion_count).sum::<usize>()
    }

    /// Re-validates every recorded conversion step by step.
    pub fn replay(&self, sys: &RuleSystem) -> bool {
        self.conversions.iter().all(|c| {
            c.witness
                .replay(&Expr::Prop(c.from.clone()), &Expr::Prop(c.to.clone()), sys.congruence())
        }) && self.premises.iter().all(|d| d.replay(sys))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RejectReason {
    #[error("`{found}` is not congruent to `{expected}`")]
    Mismatch { expected: String, found: String },
    #[error("expected {expected}, found `{found}`")]
    Shape { expected: &'static str, found: String },
    #[error("congruence of `{left}` and `{right}` undecided within the budget")]
    Budget { left: String, right: String },
    #[error("head of `{0}` not exposed within the budget")]
    HeadBudget(String),
    #[error("unbound hypothesis `{0}`")]
    Unbound(String),
    #[error("{node} is not a rule of the {system} system")]
    NotInSystem { node: &'static str, system: SystemKind },
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("rule `{0}` is not a proposition rule")]
    NotPropRule(String),
    #[error("cannot infer the proposition proved; add an ascription")]
    CannotSynthesize,
    #[error(transparent)]
    Sort(#[from] SyntaxError),
    #[error("eigenvariable `{0}` escapes its scope")]
    Escape(String),
    #[error("rule `{rule}` expects {expected} {what}, found {found}")]
    Arity {
        rule: String,
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("`{0}` does not match the rule's left-hand side")]
    NoMatch(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    /// The subproof at which checking failed.
    pub node: Proof,
    pub context: Context,
    pub reason: RejectReason,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at `{}`", self.reason, self.node)?;
        if !self.context.is_empty() {
            write!(f, " under `{}`", self.context)?;
        }
        Ok(())
    }
}

impl std::error::Error for Rejection {}

pub fn typecheck(p: &Proof, ctx: &Context, goal: &Prop, sys: &RuleSystem, depth: usize) -> Result<Derivation, Rejection> {
    let checker = Checker { sys, depth };
    for (_, a) in ctx.entries() {
        checker.well_sorted(a, p, ctx)?;
    }
    checker.well_sorted(goal, p, ctx)?;
    checker.check(p, ctx, goal)
}

pub fn typecheck_sequent(p: &Proof, s: &Sequent, sys: &RuleSystem, depth: usize) -> Result<Derivation, Rejection> {
    typecheck(p, &s.context, &s.goal, sys, depth)
}

struct Checker<'a> {
    sys: &'a RuleSystem,
    depth: usize,
}

type Res<T> = Result<T, Rejection>;

fn eigen_rename(x: &Var, body: &Proof, avoid: &BTreeSet<Var>) -> (Var, Proof) {
    if !avoid.contains(x) {
        return (x.clone(), body.clone());
    }
    let mut taken: BTreeSet<String> = avoid.iter().map(|v| v.name.clone()).collect();
    taken.extend(body.free_term_vars().into_iter().map(|v| v.name));
    let y = Var::new(fresh_name(&x.name, &taken), x.sort.clone());
    let renamed = body.subst_term(x, &Term::Var(y.clone()));
    (y, renamed)
}

impl Checker<'_> {
    fn reject(&self, p: &Proof, ctx: &Context, reason: RejectReason) -> Rejection {
        Rejection {
            node: p.clone(),
            context: ctx.clone(),
            reason,
        }
    }

    fn well_sorted(&self, a: &Prop, p: &Proof, ctx: &Context) -> Res<()> {
        self.sys
            .theory
            .signature
            .check_prop(a)
            .map_err(|e| self.reject(p, ctx, e.into()))
    }

    fn term_sort(&self, t: &Term, expected: &crate::syntax::Sort, p: &Proof, ctx: &Context) -> Res<()> {
        let s = self
            .sys
            .theory
            .signature
            .sort_of(t, &[])
            .map_err(|e| self.reject(p, ctx, e.into()))?;
        if &s != expected {
            return Err(self.reject(
                p,
                ctx,
                SyntaxError::SortMismatch {
                    expected: expected.clone(),
                    found: s,
                }
                .into(),
            ));
        }
        Ok(())
    }

    fn convert(&self, from: &Prop, to: &Prop, p: &Proof, ctx: &Context) -> Res<Option<Conversion>> {
        if from == to {
            return Ok(None);
        }
        match congruent(from, to, self.sys.congruence(), self.depth) {
            Congruence::Yes(witness) => Ok(Some(Conversion {
                from: from.clone(),
                to: to.clone(),
                witness,
            })),
            Congruence::No => Err(self.reject(
                p,
                ctx,
                RejectReason::Mismatch {
                    expected: to.to_string(),
                    found: from.to_string(),
                },
            )),
            Congruence::Unknown => Err(self.reject(
                p,
                ctx,
                RejectReason::Budget {
                    left: from.to_string(),
                    right: to.to_string(),
                },
            )),
        }
    }

    /// Weak-head normal form of `a`, with the conversion that reaches it.
    fn expose(&self, a: &Prop, p: &Proof, ctx: &Context) -> Res<(Prop, Option<Conversion>)> {
        match whnf(a, self.sys.congruence(), self.depth) {
            Ok((h, steps)) if steps.is_empty() => Ok((h, None)),
            Ok((h, steps)) => {
                let conv = Conversion {
                    from: a.clone(),
                    to: h.clone(),
                    witness: Witness {
                        left: steps,
                        right: Vec::new(),
                        join: Expr::Prop(h.clone()),
                    },
                };
                Ok((h, Some(conv)))
            }
            Err(_) => Err(self.reject(p, ctx, RejectReason::HeadBudget(a.to_string()))),
        }
    }

    fn shape(&self, expected: &'static str, found: &Prop, p: &Proof, ctx: &Context) -> Rejection {
        self.reject(
            p,
            ctx,
            RejectReason::Shape {
                expected,
                found: found.to_string(),
            },
        )
    }

    /// Finishes a synthesized derivation against an expected proposition.
    fn conclude(&self, mut d: Derivation, goal: &Prop, p: &Proof, ctx: &Context) -> Res<Derivation> {
        if let Some(conv) = self.convert(&d.conclusion, goal, p, ctx)? {
            d.conversions.push(conv);
            d.conclusion = goal.clone();
        }
        Ok(d)
    }

    fn require(&self, kind: SystemKind, node: &'static str, p: &Proof, ctx: &Context) -> Res<()> {
        if self.sys.kind == kind {
            Ok(())
        } else {
            Err(self.reject(
                p,
                ctx,
                RejectReason::NotInSystem {
                    node,
                    system: self.sys.kind,
                },
            ))
        }
    }

    fn prop_rule(&self, name: &str, p: &Proof, ctx: &Context) -> Res<(Prop, Prop)> {
        let rule = self
            .sys
            .theory
            .rule(name)
            .ok_or_else(|| self.reject(p, ctx, RejectReason::UnknownRule(name.to_string())))?;
        match &rule.body {
            RuleBody::Prop { lhs, rhs } => Ok((lhs.clone(), rhs.clone())),
            RuleBody::Term { .. } => Err(self.reject(p, ctx, RejectReason::NotPropRule(name.to_string()))),
        }
    }

    /// Matches `pat` against `target`, first syntactically and then against
    /// the normal form of `target` under the congruence rules. Returns the
    /// substitution and the conversion from `target` to the instance.
    fn match_modulo(
        &self,
        pat: &Prop,
        target: &Prop,
        p: &Proof,
        ctx: &Context,
    ) -> Res<(BTreeMap<Var, Term>, Option<Conversion>)> {
        let mut sigma = BTreeMap::new();
        if match_prop(pat, target, 0, &mut sigma) {
            return Ok((sigma, None));
        }
        let normal = crate::rewriting::normalize_prop(target, self.sys.congruence(), self.depth);
        if let Expr::Prop(n) = normal.value() {
            let mut sigma = BTreeMap::new();
            if match_prop(pat, n, 0, &mut sigma) {
                let inst = pat.instantiate(&sigma);
                let conv = self.convert(target, &inst, p, ctx)?;
                return Ok((sigma, conv));
            }
        }
        Err(self.reject(p, ctx, RejectReason::NoMatch(target.to_string())))
    }

    fn check(&self, p: &Proof, ctx: &Context, goal: &Prop) -> Res<Derivation> {
        use Proof::*;
        match p {
            Lam(..) | Pair(..) | Inl(_) | Inr(_) | Gen(..) | Pack(..) | Unit | SuperIntro(..) | Fold(..) => {
                self.check_intro(p, ctx, goal)
            }
            Case(s, x, l, y, r) => {
                let ds = self.synth(s, ctx)?;
                let (h, conv) = self.expose(&ds.conclusion, s, ctx)?;
                let Prop::Or(a, b) = &h else {
                    return Err(self.shape("a disjunction", &h, s, ctx));
                };
                let dl = self.check(l, &ctx.extend(x, (**a).clone()), goal)?;
                let dr = self.check(r, &ctx.extend(y, (**b).clone()), goal)?;
                Ok(Derivation::node("or-elim", ctx, goal.clone(), vec![ds.with(conv), dl, dr]))
            }
            Unpack(e, x, h, body) => {
                let mut avoid = ctx.free_vars();
                avoid.extend(goal.free_vars());
                self.unpack(p, e, x, h, body, ctx, Some(goal), avoid)
            }
            Absurd(e, a) => {
                self.well_sorted(a, p, ctx)?;
                let de = self.check(e, ctx, &Prop::Bot)?;
                let conv = self.convert(a, goal, p, ctx)?;
                Ok(Derivation::node("bot-elim", ctx, goal.clone(), vec![de]).with(conv))
            }
            App(f, arg) if matches!(**f, Lam(..)) => {
                let Lam(x, a, body) = &**f else { unreachable!() };
                self.well_sorted(a, f, ctx)?;
                let db = self.check(body, &ctx.extend(x, a.clone()), goal)?;
                let dl = Derivation::node("imp-intro", ctx, Prop::imp(a.clone(), goal.clone()), vec![db]);
                let da = self.check(arg, ctx, a)?;
                Ok(Derivation::node("imp-elim", ctx, goal.clone(), vec![dl, da]))
            }
            _ => {
                let d = self.synth(p, ctx)?;
                self.conclude(d, goal, p, ctx)
            }
        }
    }

    fn check_intro(&self, p: &Proof, ctx: &Context, goal: &Prop) -> Res<Derivation> {
        use Proof::*;
        let (h, conv) = self.expose(goal, p, ctx)?;
        let d = match (p, &h) {
            (Lam(x, a, body), Prop::Imp(a2, b)) => {
                self.well_sorted(a, p, ctx)?;
                let annot = self.convert(a, a2, p, ctx)?;
                let db = self.check(body, &ctx.extend(x, a.clone()), b)?;
                Derivation::node("imp-intro", ctx, goal.clone(), vec![db]).with(annot)
            }
            (Lam(..), _) => return Err(self.shape("an implication", &h, p, ctx)),
            (Pair(l, r), Prop::And(a, b)) => {
                let dl = self.check(l, ctx, a)?;
                let dr = self.check(r, ctx, b)?;
                Derivation::node("and-intro", ctx, goal.clone(), vec![dl, dr])
            }
            (Pair(..), _) => return Err(self.shape("a conjunction", &h, p, ctx)),
            (Inl(e), Prop::Or(a, _)) => {
                let de = self.check(e, ctx, a)?;
                Derivation::node("or-intro1", ctx, goal.clone(), vec![de])
            }
            (Inr(e), Prop::Or(_, b)) => {
                let de = self.check(e, ctx, b)?;
                Derivation::node("or-intro2", ctx, goal.clone(), vec![de])
            }
            (Inl(_) | Inr(_), _) => return Err(self.shape("a disjunction", &h, p, ctx)),
            (Gen(x, body), Prop::Forall(binder, b)) => {
                if x.sort != binder.sort {
                    return Err(self.reject(
                        p,
                        ctx,
                        SyntaxError::SortMismatch {
                            expected: binder.sort.clone(),
                            found: x.sort.clone(),
                        }
                        .into(),
                    ));
                }
                let mut avoid = ctx.free_vars();
                avoid.extend(goal.free_vars());
                let (x, body) = eigen_rename(x, body, &avoid);
                let db = self.check(&body, ctx, &b.open(&Term::Var(x)))?;
                Derivation::node("forall-intro", ctx, goal.clone(), vec![db])
            }
            (Gen(..), _) => return Err(self.shape("a universal statement", &h, p, ctx)),
            (Pack(t, e), Prop::Exists(binder, b)) => {
                self.term_sort(t, &binder.sort, p, ctx)?;
                let de = self.check(e, ctx, &b.open(t))?;
                Derivation::node("exists-intro", ctx, goal.clone(), vec![de])
            }
            (Pack(..), _) => return Err(self.shape("an existential statement", &h, p, ctx)),
            (Unit, Prop::Top) => Derivation::leaf("top-intro", ctx, goal.clone()),
            (Unit, _) => return Err(self.shape("truth", &h, p, ctx)),
            (Fold(r, e), _) => {
                self.require(SystemKind::FoldUnfold, "fold", p, ctx)?;
                let (lhs, rhs) = self.prop_rule(r, p, ctx)?;
                let (sigma, mconv) = self.match_modulo(&lhs, &h, p, ctx)?;
                let de = self.check(e, ctx, &rhs.instantiate(&sigma))?;
                Derivation::node("fold", ctx, goal.clone(), vec![de]).with(mconv)
            }
            (SuperIntro(r, branches), _) => {
                self.require(SystemKind::SuperNatural, "a supernatural introduction", p, ctx)?;
                let sr = self
                    .sys
                    .super_rule(r)
                    .ok_or_else(|| self.reject(p, ctx, RejectReason::UnknownRule(r.clone())))?;
                let (sigma, mconv) = self.match_modulo(&sr.lhs, &h, p, ctx)?;
                if branches.len() != sr.branches.len() {
                    return Err(self.reject(
                        p,
                        ctx,
                        RejectReason::Arity {
                            rule: r.clone(),
                            what: "branches",
                            expected: sr.branches.len(),
                            found: branches.len(),
                        },
                    ));
                }
                let mut avoid = ctx.free_vars();
                avoid.extend(goal.free_vars());
                let mut premises = Vec::new();
                for (schema, branch) in sr.branches.iter().zip(branches) {
                    if schema.steps.len() != branch.binders.len() {
                        return Err(self.reject(
                            p,
                            ctx,
                            RejectReason::Arity {
                                rule: r.clone(),
                                what: "binders",
                                expected: schema.steps.len(),
                                found: branch.binders.len(),
                            },
                        ));
                    }
                    let mut sigma = sigma.clone();
                    let mut bctx = ctx.clone();
                    let mut body = branch.body.clone();
                    for (step, binder) in schema.steps.iter().zip(&branch.binders) {
                        match (step, binder) {
                            (SuperStep::Hyp(a), SuperBinder::Hyp(hname)) => {
                                bctx = bctx.extend(hname, a.instantiate(&sigma));
                            }
                            (SuperStep::Var(v), SuperBinder::Term(x)) if v.sort == x.sort => {
                                let (x, renamed) = eigen_rename(x, &body, &avoid);
                                body = renamed;
                                avoid.insert(x.clone());
                                sigma.insert(v.clone(), Term::Var(x));
                            }
                            _ => return Err(self.shape("binders matching the rule", &h, p, ctx)),
                        }
                    }
                    premises.push(self.check(&body, &bctx, &schema.conclusion.instantiate(&sigma))?);
                }
                Derivation::node(format!("{r}-intro"), ctx, goal.clone(), premises).with(mconv)
            }
            _ => unreachable!("check_intro called on an introduction"),
        };
        Ok(d.with(conv))
    }

    #[allow(clippy::too_many_arguments)]
    fn unpack(
        &self,
        p: &Proof,
        e: &Proof,
        x: &Var,
        h: &str,
        body: &Proof,
        ctx: &Context,
        goal: Option<&Prop>,
        mut avoid: BTreeSet<Var>,
    ) -> Res<Derivation> {
        let de = self.synth(e, ctx)?;
        let (hd, conv) = self.expose(&de.conclusion, e, ctx)?;
        let Prop::Exists(binder, b) = &hd else {
            return Err(self.shape("an existential statement", &hd, e, ctx));
        };
        if x.sort != binder.sort {
            return Err(self.reject(
                p,
                ctx,
                SyntaxError::SortMismatch {
                    expected: binder.sort.clone(),
                    found: x.sort.clone(),
                }
                .into(),
            ));
        }
        avoid.extend(hd.free_vars());
        let (x, body) = eigen_rename(x, body, &avoid);
        let bctx = ctx.extend(h, b.open(&Term::Var(x.clone())));
        let db = match goal {
            Some(g) => self.check(&body, &bctx, g)?,
            None => {
                let db = self.synth(&body, &bctx)?;
                if db.conclusion.free_vars().contains(&x) {
                    return Err(self.reject(p, ctx, RejectReason::Escape(x.name.clone())));
                }
                db
            }
        };
        let concl = db.conclusion.clone();
        Ok(Derivation::node("exists-elim", ctx, concl, vec![de.with(conv), db]))
    }

    fn synth(&self, p: &Proof, ctx: &Context) -> Res<Derivation> {
        use Proof::*;
        match p {
            Hyp(h) => match ctx.lookup(h) {
                Some(a) => Ok(Derivation::leaf("hyp", ctx, a.clone())),
                None => Err(self.reject(p, ctx, RejectReason::Unbound(h.clone()))),
            },
            Lam(x, a, body) => {
                self.well_sorted(a, p, ctx)?;
                let db = self.synth(body, &ctx.extend(x, a.clone()))?;
                let concl = Prop::imp(a.clone(), db.conclusion.clone());
                Ok(Derivation::node("imp-intro", ctx, concl, vec![db]))
            }
            App(f, arg) => {
                let df = self.synth(f, ctx)?;
                let (h, conv) = self.expose(&df.conclusion, f, ctx)?;
                let Prop::Imp(a, b) = &h else {
                    return Err(self.shape("an implication", &h, f, ctx));
                };
                let da = self.check(arg, ctx, a)?;
                Ok(Derivation::node("imp-elim", ctx, (**b).clone(), vec![df.with(conv), da]))
            }
            Pair(l, r) => {
                let dl = self.synth(l, ctx)?;
                let dr = self.synth(r, ctx)?;
                let concl = Prop::and(dl.conclusion.clone(), dr.conclusion.clone());
                Ok(Derivation::node("and-intro", ctx, concl, vec![dl, dr]))
            }
            Fst(e) | Snd(e) => {
                let de = self.synth(e, ctx)?;
                let (h, conv) = self.expose(&de.conclusion, e, ctx)?;
                let Prop::And(a, b) = &h else {
                    return Err(self.shape("a conjunction", &h, e, ctx));
                };
                let (label, concl) = if matches!(p, Fst(_)) { ("and-elim1", a) } else { ("and-elim2", b) };
                Ok(Derivation::node(label, ctx, (**concl).clone(), vec![de.with(conv)]))
            }
            Inst(e, t) => {
                let de = self.synth(e, ctx)?;
                let (h, conv) = self.expose(&de.conclusion, e, ctx)?;
                let Prop::Forall(binder, b) = &h else {
                    return Err(self.shape("a universal statement", &h, e, ctx));
                };
                self.term_sort(t, &binder.sort, p, ctx)?;
                Ok(Derivation::node("forall-elim", ctx, b.open(t), vec![de.with(conv)]))
            }
            Gen(x, body) => {
                let (x, body) = eigen_rename(x, body, &ctx.free_vars());
                let db = self.synth(&body, ctx)?;
                let concl = Prop::forall(&x, db.conclusion.clone());
                Ok(Derivation::node("forall-intro", ctx, concl, vec![db]))
            }
            Unit => Ok(Derivation::leaf("top-intro", ctx, Prop::Top)),
            Absurd(e, a) => {
                self.well_sorted(a, p, ctx)?;
                let de = self.check(e, ctx, &Prop::Bot)?;
                Ok(Derivation::node("bot-elim", ctx, a.clone(), vec![de]))
            }
            Ann(e, a) => {
                self.well_sorted(a, p, ctx)?;
                self.check(e, ctx, a)
            }
            Case(s, x, l, y, r) => {
                let ds = self.synth(s, ctx)?;
                let (h, conv) = self.expose(&ds.conclusion, s, ctx)?;
                let Prop::Or(a, b) = &h else {
                    return Err(self.shape("a disjunction", &h, s, ctx));
                };
                let dl = self.synth(l, &ctx.extend(x, (**a).clone()))?;
                let dr = self.check(r, &ctx.extend(y, (**b).clone()), &dl.conclusion)?;
                let concl = dl.conclusion.clone();
                Ok(Derivation::node("or-elim", ctx, concl, vec![ds.with(conv), dl, dr]))
            }
            Unpack(e, x, h, body) => self.unpack(p, e, x, h, body, ctx, None, ctx.free_vars()),
            Fold(r, e) => {
                self.require(SystemKind::FoldUnfold, "fold", p, ctx)?;
                let (lhs, rhs) = self.prop_rule(r, p, ctx)?;
                if !lhs.free_vars().is_subset(&rhs.free_vars()) {
                    return Err(self.reject(p, ctx, RejectReason::CannotSynthesize));
                }
                let de = self.synth(e, ctx)?;
                let (sigma, conv) = self.match_modulo(&rhs, &de.conclusion, e, ctx)?;
                Ok(Derivation::node("fold", ctx, lhs.instantiate(&sigma), vec![de.with(conv)]))
            }
            Unfold(r, e) => {
                self.require(SystemKind::FoldUnfold, "unfold", p, ctx)?;
                let (lhs, rhs) = self.prop_rule(r, p, ctx)?;
                let de = self.synth(e, ctx)?;
                let (sigma, conv) = self.match_modulo(&lhs, &de.conclusion, e, ctx)?;
                Ok(Derivation::node("unfold", ctx, rhs.instantiate(&sigma), vec![de.with(conv)]))
            }
            SuperIntro(r, _) => {
                self.require(SystemKind::SuperNatural, "a supernatural introduction", p, ctx)?;
                match self.sys.super_rule(r) {
                    Some(sr) if sr.lhs.free_vars().is_empty() => self.check(p, ctx, &sr.lhs.clone()),
                    Some(_) => Err(self.reject(p, ctx, RejectReason::CannotSynthesize)),
                    None => Err(self.reject(p, ctx, RejectReason::UnknownRule(r.clone()))),
                }
            }
            SuperElim(r, i, e, args) => {
                self.require(SystemKind::SuperNatural, "a supernatural elimination", p, ctx)?;
                let sr = self
                    .sys
                    .super_rule(r)
                    .ok_or_else(|| self.reject(p, ctx, RejectReason::UnknownRule(r.clone())))?;
                let schema = sr.branches.get(*i).ok_or_else(|| {
                    self.reject(
                        p,
                        ctx,
                        RejectReason::Arity {
                            rule: r.clone(),
                            what: "branches (index out of range)",
                            expected: sr.branches.len(),
                            found: i + 1,
                        },
                    )
                })?;
                if schema.steps.len() != args.len() {
                    return Err(self.reject(
                        p,
                        ctx,
                        RejectReason::Arity {
                            rule: r.clone(),
                            what: "arguments",
                            expected: schema.steps.len(),
                            found: args.len(),
                        },
                    ));
                }
                let de = self.synth(e, ctx)?;
                let (mut sigma, conv) = self.match_modulo(&sr.lhs, &de.conclusion, e, ctx)?;
                let mut premises = vec![de.with(conv)];
                for (step, arg) in schema.steps.iter().zip(args) {
                    match (step, arg) {
                        (SuperStep::Hyp(a), ElimArg::Proof(q)) => {
                            premises.push(self.check(q, ctx, &a.instantiate(&sigma))?);
                        }
                        (SuperStep::Var(v), ElimArg::Term(t)) => {
                            self.term_sort(t, &v.sort, p, ctx)?;
                            sigma.insert(v.clone(), t.clone());
                        }
                        (SuperStep::Hyp(_), ElimArg::Term(_)) => {
                            return Err(self.shape("a proof argument", &schema.conclusion, p, ctx))
                        }
                        (SuperStep::Var(_), ElimArg::Proof(_)) => {
                            return Err(self.shape("a term argument", &schema.conclusion, p, ctx))
                        }
                    }
                }
                let label = if sr.branches.len() == 1 {
                    format!("{r}-elim")
                } else {
                    format!("{r}-elim{}", i + 1)
                };
                Ok(Derivation::node(label, ctx, schema.conclusion.instantiate(&sigma), premises))
            }
            Inl(_) | Inr(_) | Pack(..) => Err(self.reject(p, ctx, RejectReason::CannotSynthesize)),
        }
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

    fn theory(rhs: Prop) -> RewriteSystem {
        let sig = Signature::with_props(&["P", "Q", "R"]);
        let rule = RewriteRule::prop("r", sym("P"), rhs, &sig).unwrap();
        RewriteSystem::with_rules(sig, vec![rule]).unwrap()
    }

    fn omega() -> Proof {
        Proof::lam("x", sym("P"), Proof::app(Proof::hyp("x"), Proof::hyp("x")))
    }

    #[test]
    fn omega_checks_against_p_implies_r() {
        let sys = RuleSystem::modulo(theory(Prop::imp(sym("P"), sym("R"))));
        let d = typecheck(&omega(), &Context::new(), &Prop::imp(sym("P"), sym("R")), &sys, 8).unwrap();
        assert_eq!(d.rule, "imp-intro");
        assert!(d.replay(&sys));
        assert_eq!(d.conversion_count(), 1);
        let omega_omega = Proof::app(omega(), omega());
        let d = typecheck(&omega_omega, &Context::new(), &sym("R"), &sys, 8).unwrap();
        assert!(d.replay(&sys));
    }

    #[test]
    fn application_modulo() {
        let sys = RuleSystem::modulo(theory(Prop::imp(sym("Q"), sym("R"))));
        let ctx = Context::from_entries(vec![("p".into(), sym("P")), ("q".into(), sym("Q"))]).unwrap();
        let d = typecheck(&Proof::app(Proof::hyp("p"), Proof::hyp("q")), &ctx, &sym("R"), &sys, 8).unwrap();
        assert_eq!(d.rule, "imp-elim");
        assert!(d.replay(&sys));
    }

    #[test]
    fn identity_against_atom_is_rejected() {
        let sys = RuleSystem::modulo(RewriteSystem::new(Signature::with_props(&["Q", "R"])));
        let err = typecheck(&Proof::lam("x", sym("Q"), Proof::hyp("x")), &Context::new(), &sym("R"), &sys, 8)
            .unwrap_err();
        assert!(matches!(err.reason, RejectReason::Shape { .. }));
    }

    #[test]
    fn budget_is_not_a_mismatch() {
        // P and P => R are congruent, but not within zero steps
        let sys = RuleSystem::modulo(theory(Prop::imp(sym("P"), sym("R"))));
        let ctx = Context::from_entries(vec![("p".into(), sym("P"))]).unwrap();
        let err = typecheck(&Proof::hyp("p"), &ctx, &Prop::imp(sym("P"), sym("R")), &sys, 0).unwrap_err();
        assert!(matches!(err.reason, RejectReason::Budget { .. }));
    }

    #[test]
    fn fold_and_unfold() {
        let sys = RuleSystem::new(SystemKind::FoldUnfold, theory(Prop::imp(sym("Q"), sym("R")))).unwrap();
        let ctx = Context::from_entries(vec![("p".into(), sym("P")), ("q".into(), sym("Q"))]).unwrap();
        let good = Proof::app(Proof::unfold("r", Proof::hyp("p")), Proof::hyp("q"));
        assert!(typecheck(&good, &ctx, &sym("R"), &sys, 8).is_ok());
        // without unfolding, P is not an implication in this system
        let bad = Proof::app(Proof::hyp("p"), Proof::hyp("q"));
        assert!(typecheck(&bad, &ctx, &sym("R"), &sys, 8).is_err());
        let folded = Proof::fold("r", Proof::lam("x", sym("Q"), Proof::app(Proof::unfold("r", Proof::hyp("p")), Proof::hyp("x"))));
        assert!(typecheck(&folded, &ctx, &sym("P"), &sys, 8).is_ok());
        let modulo = RuleSystem::modulo(theory(Prop::imp(sym("Q"), sym("R"))));
        assert!(matches!(
            typecheck(&good, &ctx, &sym("R"), &modulo, 8).unwrap_err().reason,
            RejectReason::NotInSystem { .. }
        ));
    }

    #[test]
    fn supernatural_rules() {
        let sys = RuleSystem::new(SystemKind::SuperNatural, theory(Prop::imp(sym("Q"), sym("R")))).unwrap();
        let ctx = Context::from_entries(vec![("p".into(), sym("P")), ("q".into(), sym("Q"))]).unwrap();
        let elim = Proof::SuperElim("r".into(), 0, Box::new(Proof::hyp("p")), vec![ElimArg::Proof(Proof::hyp("q"))]);
        let d = typecheck(&elim, &ctx, &sym("R"), &sys, 8).unwrap();
        assert_eq!(d.rule, "r-elim");
        let intro = Proof::SuperIntro(
            "r".into(),
            vec![super::super::SuperBranch {
                binders: vec![SuperBinder::Hyp("h".into())],
                body: Proof::app(Proof::lam("z", sym("Q"), elim.clone()), Proof::hyp("h")),
            }],
        );
        assert!(typecheck(&intro, &ctx, &sym("P"), &sys, 8).is_ok());
    }

    #[test]
    fn ascription_makes_case_redex_checkable() {
        let sys = RuleSystem::modulo(RewriteSystem::new(Signature::with_props(&["Q", "R"])));
        let ctx = Context::from_entries(vec![("q".into(), sym("Q"))]).unwrap();
        let scrut = Proof::ann(Proof::inl(Proof::hyp("q")), Prop::or(sym("Q"), sym("R")));
        let p = Proof::case(scrut, "a", Proof::hyp("a"), "b", Proof::hyp("q"));
        assert!(typecheck(&p, &ctx, &sym("Q"), &sys, 8).is_ok());
    }

    #[test]
    fn eigenvariable_condition() {
        use crate::syntax::Sort;
        let s = Sort::new("s");
        let mut sig = Signature::new();
        sig.add_sort(s.clone()).unwrap();
        sig.add_predicate("A", vec![s.clone()]).unwrap();
        let sys = RuleSystem::modulo(RewriteSystem::new(sig));
        let x = Var::new("x", s);
        let ax = Prop::atom("A", vec![Term::Var(x.clone())]);
        // h : A(x) |- forall x. A(x) must not be provable by gen x. h
        let ctx = Context::from_entries(vec![("h".into(), ax.clone())]).unwrap();
        let p = Proof::gen(x.clone(), Proof::hyp("h"));
        assert!(typecheck(&p, &ctx, &Prop::forall(&x, ax.clone()), &sys, 8).is_err());
        // |- forall x. A(x) => A(x)
        let id = Proof::gen(x.clone(), Proof::lam("h", ax.clone(), Proof::hyp("h")));
        assert!(typecheck(&id, &Context::new(), &Prop::forall(&x, Prop::imp(ax.clone(), ax)), &sys, 8).is_ok());
    }
}
