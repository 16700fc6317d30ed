//! Proof terms for natural deduction modulo and its two rule-based
//! variants, with capture-avoiding substitution and alpha-canonical forms.

mod check;
mod derive;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::syntax::{fresh_name, Prop, Sort, Term, Var};

pub use check::{typecheck, typecheck_sequent, Conversion, Derivation, RejectReason, Rejection};
pub use derive::{
    derive_fold_unfold, derive_supernatural, DeriveError, DerivedRule, RuleSystem, SequentSchema, SuperRule,
    SuperStep, SystemError, SystemKind,
};

/// Binder of a supernatural introduction branch: either a hypothesis or an
/// eigenvariable, as dictated by the derived rule.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SuperBinder {
    Hyp(String),
    Term(Var),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SuperBranch {
    pub binders: Vec<SuperBinder>,
    pub body: Proof,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElimArg {
    Term(Term),
    Proof(Proof),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Proof {
    Hyp(String),
    Lam(String, Prop, Box<Proof>),
    App(Box<Proof>, Box<Proof>),
    Pair(Box<Proof>, Box<Proof>),
    Fst(Box<Proof>),
    Snd(Box<Proof>),
    Inl(Box<Proof>),
    Inr(Box<Proof>),
    /// `case e of x. l | y. r`
    Case(Box<Proof>, String, Box<Proof>, String, Box<Proof>),
    Gen(Var, Box<Proof>),
    Inst(Box<Proof>, Term),
    Pack(Term, Box<Proof>),
    /// `unpack e as x, h in body`
    Unpack(Box<Proof>, Var, String, Box<Proof>),
    Unit,
    Absurd(Box<Proof>, Prop),
    Fold(String, Box<Proof>),
    Unfold(String, Box<Proof>),
    SuperIntro(String, Vec<SuperBranch>),
    /// Elimination along branch `usize` of the rule, applied to the
    /// principal premise and the branch arguments.
    SuperElim(String, usize, Box<Proof>, Vec<ElimArg>),
    /// Type ascription `(e : A)`; transparent for reduction.
    Ann(Box<Proof>, Prop),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LastRule {
    Introduction,
    Elimination,
    Hypothesis,
    FoldUnfoldNode,
    SuperNode,
}

/// Classification of the root node.
pub fn classify_last_rule(p: &Proof) -> LastRule {
    use Proof::*;
    match p {
        Hyp(_) => LastRule::Hypothesis,
        Lam(..) | Pair(..) | Inl(_) | Inr(_) | Gen(..) | Pack(..) | Unit => LastRule::Introduction,
        App(..) | Fst(_) | Snd(_) | Case(..) | Inst(..) | Unpack(..) | Absurd(..) => LastRule::Elimination,
        Fold(..) | Unfold(..) => LastRule::FoldUnfoldNode,
        SuperIntro(..) | SuperElim(..) => LastRule::SuperNode,
        Ann(p, _) => classify_last_rule(p),
    }
}

fn bx(p: Proof) -> Box<Proof> {
    Box::new(p)
}

impl Proof {
    pub fn hyp(h: &str) -> Proof {
        Proof::Hyp(h.to_string())
    }

    pub fn lam(x: &str, a: Prop, body: Proof) -> Proof {
        Proof::Lam(x.to_string(), a, bx(body))
    }

    pub fn app(f: Proof, a: Proof) -> Proof {
        Proof::App(bx(f), bx(a))
    }

    pub fn pair(a: Proof, b: Proof) -> Proof {
        Proof::Pair(bx(a), bx(b))
    }

    pub fn fst(p: Proof) -> Proof {
        Proof::Fst(bx(p))
    }

    pub fn snd(p: Proof) -> Proof {
        Proof::Snd(bx(p))
    }

    pub fn inl(p: Proof) -> Proof {
        Proof::Inl(bx(p))
    }

    pub fn inr(p: Proof) -> Proof {
        Proof::Inr(bx(p))
    }

    pub fn case(s: Proof, x: &str, l: Proof, y: &str, r: Proof) -> Proof {
        Proof::Case(bx(s), x.to_string(), bx(l), y.to_string(), bx(r))
    }

    pub fn gen(x: Var, body: Proof) -> Proof {
        Proof::Gen(x, bx(body))
    }

    pub fn inst(p: Proof, t: Term) -> Proof {
        Proof::Inst(bx(p), t)
    }

    pub fn pack(t: Term, p: Proof) -> Proof {
        Proof::Pack(t, bx(p))
    }

    pub fn unpack(p: Proof, x: Var, h: &str, body: Proof) -> Proof {
        Proof::Unpack(bx(p), x, h.to_string(), bx(body))
    }

    pub fn absurd(p: Proof, a: Prop) -> Proof {
        Proof::Absurd(bx(p), a)
    }

    pub fn fold(rule: &str, p: Proof) -> Proof {
        Proof::Fold(rule.to_string(), bx(p))
    }

    pub fn unfold(rule: &str, p: Proof) -> Proof {
        Proof::Unfold(rule.to_string(), bx(p))
    }

    pub fn ann(p: Proof, a: Prop) -> Proof {
        Proof::Ann(bx(p), a)
    }

    /// Removes ascriptions at the root.
    pub fn strip(&self) -> &Proof {
        match self {
            Proof::Ann(p, _) => p.strip(),
            _ => self,
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Immediate sub-proofs, in left-to-right order.
    pub fn children(&self) -> Vec<&Proof> {
        use Proof::*;
        match self {
            Hyp(_) | Unit => vec![],
            Lam(_, _, b) | Fst(b) | Snd(b) | Inl(b) | Inr(b) | Gen(_, b) | Inst(b, _) | Pack(_, b) => vec![b],
            Absurd(b, _) | Fold(_, b) | Unfold(_, b) | Ann(b, _) => vec![b],
            App(a, b) | Pair(a, b) | Unpack(a, _, _, b) => vec![a, b],
            Case(s, _, l, _, r) => vec![s, l, r],
            SuperIntro(_, bs) => bs.iter().map(|b| &b.body).collect(),
            SuperElim(_, _, p, args) => std::iter::once(&**p)
                .chain(args.iter().filter_map(|a| match a {
                    ElimArg::Proof(q) => Some(q),
                    ElimArg::Term(_) => None,
                }))
                .collect(),
        }
    }

    /// Rebuilds the node with its children replaced, in [`Proof::children`]
    /// order.
    pub(crate) fn with_children(&self, mut kids: Vec<Proof>) -> Proof {
        use Proof::*;
        let mut it = kids.drain(..);
        let mut next = || bx(it.next().expect("child count"));
        match self {
            Hyp(_) | Unit => self.clone(),
            Lam(x, a, _) => Lam(x.clone(), a.clone(), next()),
            Fst(_) => Fst(next()),
            Snd(_) => Snd(next()),
            Inl(_) => Inl(next()),
            Inr(_) => Inr(next()),
            Gen(x, _) => Gen(x.clone(), next()),
            Inst(_, t) => Inst(next(), t.clone()),
            Pack(t, _) => Pack(t.clone(), next()),
            Absurd(_, a) => Absurd(next(), a.clone()),
            Ann(_, a) => Ann(next(), a.clone()),
            Fold(r, _) => Fold(r.clone(), next()),
            Unfold(r, _) => Unfold(r.clone(), next()),
            App(..) => {
                let a = next();
                App(a, next())
            }
            Pair(..) => {
                let a = next();
                Pair(a, next())
            }
            Unpack(_, x, h, _) => {
                let a = next();
                Unpack(a, x.clone(), h.clone(), next())
            }
            Case(_, x, _, y, _) => {
                let s = next();
                let l = next();
                Case(s, x.clone(), l, y.clone(), next())
            }
            SuperIntro(r, bs) => SuperIntro(
                r.clone(),
                bs.iter()
                    .map(|b| SuperBranch {
                        binders: b.binders.clone(),
                        body: *next(),
                    })
                    .collect(),
            ),
            SuperElim(r, i, _, args) => {
                let p = next();
                let args = args
                    .iter()
                    .map(|a| match a {
                        ElimArg::Proof(_) => ElimArg::Proof(*next()),
                        ElimArg::Term(t) => ElimArg::Term(t.clone()),
                    })
                    .collect();
                SuperElim(r.clone(), *i, p, args)
            }
        }
    }

    pub fn subproof(&self, pos: &[usize]) -> Option<&Proof> {
        match pos.split_first() {
            None => Some(self),
            Some((i, rest)) => self.children().get(*i)?.subproof(rest),
        }
    }

    pub fn replace_at(&self, pos: &[usize], with: Proof) -> Option<Proof> {
        let Some((i, rest)) = pos.split_first() else {
            return Some(with);
        };
        let mut kids: Vec<Proof> = self.children().into_iter().cloned().collect();
        let child = kids.get(*i)?.replace_at(rest, with)?;
        kids[*i] = child;
        Some(self.with_children(kids))
    }

    pub fn free_hyps(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_hyps(&mut BTreeSet::new(), &mut out);
        out
    }

    fn collect_hyps(&self, bound: &mut BTreeSet<String>, out: &mut BTreeSet<String>) {
        use Proof::*;
        let under = |x: &str, b: &Proof, bound: &mut BTreeSet<String>, out: &mut BTreeSet<String>| {
            let fresh = bound.insert(x.to_string());
            b.collect_hyps(bound, out);
            if fresh {
                bound.remove(x);
            }
        };
        match self {
            Hyp(h) => {
                if !bound.contains(h) {
                    out.insert(h.clone());
                }
            }
            Lam(x, _, b) => under(x, b, bound, out),
            Case(s, x, l, y, r) => {
                s.collect_hyps(bound, out);
                under(x, l, bound, out);
                under(y, r, bound, out);
            }
            Unpack(p, _, h, b) => {
                p.collect_hyps(bound, out);
                under(h, b, bound, out);
            }
            SuperIntro(_, bs) => {
                for br in bs {
                    let mut inner = bound.clone();
                    for b in &br.binders {
                        if let SuperBinder::Hyp(h) = b {
                            inner.insert(h.clone());
                        }
                    }
                    br.body.collect_hyps(&mut inner, out);
                }
            }
            _ => self.children().iter().for_each(|c| c.collect_hyps(bound, out)),
        }
    }

    /// Free term variables, including those of annotations.
    pub fn free_term_vars(&self) -> BTreeSet<Var> {
        use Proof::*;
        let mut out = BTreeSet::new();
        match self {
            Hyp(_) | Unit => {}
            Lam(_, a, b) => {
                out.extend(a.free_vars());
                out.extend(b.free_term_vars());
            }
            Absurd(b, a) | Ann(b, a) => {
                out.extend(a.free_vars());
                out.extend(b.free_term_vars());
            }
            Gen(x, b) => {
                out.extend(b.free_term_vars());
                out.remove(x);
            }
            Inst(b, t) | Pack(t, b) => {
                out.extend(t.free_vars());
                out.extend(b.free_term_vars());
            }
            Unpack(p, x, _, b) => {
                out.extend(b.free_term_vars());
                out.remove(x);
                out.extend(p.free_term_vars());
            }
            SuperIntro(_, bs) => {
                for br in bs {
                    let mut inner = br.body.free_term_vars();
                    for b in &br.binders {
                        if let SuperBinder::Term(v) = b {
                            inner.remove(v);
                        }
                    }
                    out.extend(inner);
                }
            }
            SuperElim(_, _, p, args) => {
                out.extend(p.free_term_vars());
                for a in args {
                    match a {
                        ElimArg::Term(t) => out.extend(t.free_vars()),
                        ElimArg::Proof(q) => out.extend(q.free_term_vars()),
                    }
                }
            }
            _ => self.children().iter().for_each(|c| out.extend(c.free_term_vars())),
        }
        out
    }

    fn all_hyp_names(&self, out: &mut BTreeSet<String>) {
        use Proof::*;
        match self {
            Hyp(h) | Lam(h, ..) | Unpack(_, _, h, _) => {
                out.insert(h.clone());
            }
            Case(_, x, _, y, _) => {
                out.insert(x.clone());
                out.insert(y.clone());
            }
            SuperIntro(_, bs) => {
                for br in bs {
                    for b in &br.binders {
                        if let SuperBinder::Hyp(h) = b {
                            out.insert(h.clone());
                        }
                    }
                }
            }
            _ => {}
        }
        self.children().iter().for_each(|c| c.all_hyp_names(out));
    }

    fn all_var_names(&self, out: &mut BTreeSet<String>) {
        use Proof::*;
        match self {
            Gen(x, _) | Unpack(_, x, _, _) => {
                out.insert(x.name.clone());
            }
            SuperIntro(_, bs) => {
                for br in bs {
                    for b in &br.binders {
                        if let SuperBinder::Term(v) = b {
                            out.insert(v.name.clone());
                        }
                    }
                }
            }
            _ => {}
        }
        out.extend(self.free_term_vars().into_iter().map(|v| v.name));
        self.children().iter().for_each(|c| c.all_var_names(out));
    }

    /// Capture-avoiding substitution of `q` for the hypothesis `h`.
    pub fn subst_hyp(&self, h: &str, q: &Proof) -> Proof {
        let mut hyps = BTreeMap::new();
        hyps.insert(h.to_string(), q.clone());
        Subst::new(hyps, BTreeMap::new()).apply(self)
    }

    /// Capture-avoiding substitution of `t` for the term variable `x`,
    /// including inside annotations.
    pub fn subst_term(&self, x: &Var, t: &Term) -> Proof {
        let mut terms = BTreeMap::new();
        terms.insert(x.clone(), t.clone());
        Subst::new(BTreeMap::new(), terms).apply(self)
    }

    /// Simultaneous substitution of hypotheses and term variables.
    pub fn subst(&self, hyps: BTreeMap<String, Proof>, terms: BTreeMap<Var, Term>) -> Proof {
        Subst::new(hyps, terms).apply(self)
    }

    /// Representative of the alpha-equivalence class: every binder is
    /// renamed after its binding depth.
    pub fn canonical(&self) -> Proof {
        canon(self, &BTreeMap::new(), &BTreeMap::new(), 0, 0)
    }

    pub fn alpha_eq(&self, other: &Proof) -> bool {
        self == other || self.canonical() == other.canonical()
    }
}

struct Subst {
    hyps: BTreeMap<String, Proof>,
    terms: BTreeMap<Var, Term>,
    /// Names that a binder must avoid to prevent capture.
    avoid_hyps: BTreeSet<String>,
    avoid_vars: BTreeSet<String>,
}

impl Subst {
    fn new(hyps: BTreeMap<String, Proof>, terms: BTreeMap<Var, Term>) -> Self {
        let mut avoid_hyps = BTreeSet::new();
        let mut avoid_vars = BTreeSet::new();
        for q in hyps.values() {
            avoid_hyps.extend(q.free_hyps());
            avoid_vars.extend(q.free_term_vars().into_iter().map(|v| v.name));
        }
        for t in terms.values() {
            avoid_vars.extend(t.free_vars().into_iter().map(|v| v.name));
        }
        Subst {
            hyps,
            terms,
            avoid_hyps,
            avoid_vars,
        }
    }

    fn is_empty(&self) -> bool {
        self.hyps.is_empty() && self.terms.is_empty()
    }

    fn prop(&self, a: &Prop) -> Prop {
        if self.terms.is_empty() {
            a.clone()
        } else {
            a.instantiate(&self.terms)
        }
    }

    fn term(&self, t: &Term) -> Term {
        if self.terms.is_empty() {
            t.clone()
        } else {
            t.instantiate(&self.terms, 0)
        }
    }

    /// Enters the scope of hypothesis binders `xs` over `bodies`: shadowed
    /// entries are dropped and capturing binders renamed.
    fn hyp_binders(&self, xs: &[String], bodies: &[&Proof]) -> (Subst, Vec<String>, Vec<Proof>) {
        let mut inner = Subst {
            hyps: self.hyps.clone(),
            terms: self.terms.clone(),
            avoid_hyps: self.avoid_hyps.clone(),
            avoid_vars: self.avoid_vars.clone(),
        };
        let mut names = Vec::new();
        let mut bodies: Vec<Proof> = bodies.iter().map(|b| (*b).clone()).collect();
        for x in xs {
            inner.hyps.remove(x);
            if inner.avoid_hyps.contains(x) && !inner.hyps.is_empty() {
                let mut taken = inner.avoid_hyps.clone();
                taken.extend(inner.hyps.keys().cloned());
                for b in &bodies {
                    b.all_hyp_names(&mut taken);
                }
                taken.extend(xs.iter().cloned());
                let y = fresh_name(x, &taken);
                bodies = bodies.iter().map(|b| b.subst_hyp(x, &Proof::Hyp(y.clone()))).collect();
                names.push(y);
            } else {
                names.push(x.clone());
            }
        }
        (inner, names, bodies)
    }

    fn var_binders(&self, xs: &[Var], bodies: &[&Proof]) -> (Subst, Vec<Var>, Vec<Proof>) {
        let mut inner = Subst {
            hyps: self.hyps.clone(),
            terms: self.terms.clone(),
            avoid_hyps: self.avoid_hyps.clone(),
            avoid_vars: self.avoid_vars.clone(),
        };
        let mut vars = Vec::new();
        let mut bodies: Vec<Proof> = bodies.iter().map(|b| (*b).clone()).collect();
        for x in xs {
            inner.terms.remove(x);
            if inner.avoid_vars.contains(&x.name) && !inner.is_empty() {
                let mut taken = inner.avoid_vars.clone();
                for b in &bodies {
                    b.all_var_names(&mut taken);
                }
                taken.extend(xs.iter().map(|v| v.name.clone()));
                taken.extend(inner.terms.keys().map(|v| v.name.clone()));
                let y = Var::new(fresh_name(&x.name, &taken), x.sort.clone());
                bodies = bodies.iter().map(|b| b.subst_term(x, &Term::Var(y.clone()))).collect();
                vars.push(y);
            } else {
                vars.push(x.clone());
            }
        }
        (inner, vars, bodies)
    }

    fn apply(&self, p: &Proof) -> Proof {
        use Proof::*;
        if self.is_empty() {
            return p.clone();
        }
        match p {
            Hyp(h) => self.hyps.get(h).cloned().unwrap_or_else(|| p.clone()),
            Unit => Unit,
            Lam(x, a, b) => {
                let (inner, names, bodies) = self.hyp_binders(std::slice::from_ref(x), &[b]);
                Lam(names[0].clone(), self.prop(a), bx(inner.apply(&bodies[0])))
            }
            Case(s, x, l, y, r) => {
                let (il, nl, bl) = self.hyp_binders(std::slice::from_ref(x), &[l]);
                let (ir, nr, br) = self.hyp_binders(std::slice::from_ref(y), &[r]);
                Case(
                    bx(self.apply(s)),
                    nl[0].clone(),
                    bx(il.apply(&bl[0])),
                    nr[0].clone(),
                    bx(ir.apply(&br[0])),
                )
            }
            Gen(x, b) => {
                let (inner, vars, bodies) = self.var_binders(std::slice::from_ref(x), &[b]);
                Gen(vars[0].clone(), bx(inner.apply(&bodies[0])))
            }
            Unpack(e, x, h, b) => {
                let (iv, vars, bodies) = self.var_binders(std::slice::from_ref(x), &[b]);
                let (ih, names, bodies) = iv.hyp_binders(std::slice::from_ref(h), &[&bodies[0]]);
                Unpack(bx(self.apply(e)), vars[0].clone(), names[0].clone(), bx(ih.apply(&bodies[0])))
            }
            SuperIntro(r, bs) => SuperIntro(
                r.clone(),
                bs.iter()
                    .map(|br| {
                        let vars: Vec<Var> = br
                            .binders
                            .iter()
                            .filter_map(|b| match b {
                                SuperBinder::Term(v) => Some(v.clone()),
                                SuperBinder::Hyp(_) => None,
                            })
                            .collect();
                        let hyps: Vec<String> = br
                            .binders
                            .iter()
                            .filter_map(|b| match b {
                                SuperBinder::Hyp(h) => Some(h.clone()),
                                SuperBinder::Term(_) => None,
                            })
                            .collect();
                        let (iv, vars, bodies) = self.var_binders(&vars, &[&br.body]);
                        let (ih, hyps, bodies) = iv.hyp_binders(&hyps, &[&bodies[0]]);
                        let (mut vi, mut hi) = (vars.into_iter(), hyps.into_iter());
                        let binders = br
                            .binders
                            .iter()
                            .map(|b| match b {
                                SuperBinder::Term(_) => SuperBinder::Term(vi.next().expect("var binder")),
                                SuperBinder::Hyp(_) => SuperBinder::Hyp(hi.next().expect("hyp binder")),
                            })
                            .collect();
                        SuperBranch {
                            binders,
                            body: ih.apply(&bodies[0]),
                        }
                    })
                    .collect(),
            ),
            SuperElim(r, i, e, args) => SuperElim(
                r.clone(),
                *i,
                bx(self.apply(e)),
                args.iter()
                    .map(|a| match a {
                        ElimArg::Term(t) => ElimArg::Term(self.term(t)),
                        ElimArg::Proof(q) => ElimArg::Proof(self.apply(q)),
                    })
                    .collect(),
            ),
            Inst(b, t) => Inst(bx(self.apply(b)), self.term(t)),
            Pack(t, b) => Pack(self.term(t), bx(self.apply(b))),
            Absurd(b, a) => Absurd(bx(self.apply(b)), self.prop(a)),
            Ann(b, a) => Ann(bx(self.apply(b)), self.prop(a)),
            _ => p.with_children(p.children().into_iter().map(|c| self.apply(c)).collect()),
        }
    }
}

fn canon(p: &Proof, hyps: &BTreeMap<String, String>, vars: &BTreeMap<Var, Term>, hd: usize, vd: usize) -> Proof {
    use Proof::*;
    let prop = |a: &Prop| if vars.is_empty() { a.clone() } else { a.instantiate(vars) };
    let term = |t: &Term| if vars.is_empty() { t.clone() } else { t.instantiate(vars, 0) };
    let hname = |d: usize| format!("#h{d}");
    let vname = |x: &Var, d: usize| Var::new(format!("#t{d}"), x.sort.clone());
    let bind_h = |x: &str, d: usize| {
        let mut m = hyps.clone();
        m.insert(x.to_string(), hname(d));
        m
    };
    let bind_v = |x: &Var, d: usize| {
        let mut m = vars.clone();
        m.insert(x.clone(), Term::Var(vname(x, d)));
        m
    };
    let go = |q: &Proof| canon(q, hyps, vars, hd, vd);
    match p {
        Hyp(h) => Hyp(hyps.get(h).cloned().unwrap_or_else(|| h.clone())),
        Unit => Unit,
        Lam(x, a, b) => Lam(hname(hd), prop(a), bx(canon(b, &bind_h(x, hd), vars, hd + 1, vd))),
        Case(s, x, l, y, r) => Case(
            bx(go(s)),
            hname(hd),
            bx(canon(l, &bind_h(x, hd), vars, hd + 1, vd)),
            hname(hd),
            bx(canon(r, &bind_h(y, hd), vars, hd + 1, vd)),
        ),
        Gen(x, b) => Gen(vname(x, vd), bx(canon(b, hyps, &bind_v(x, vd), hd, vd + 1))),
        Unpack(e, x, h, b) => Unpack(
            bx(go(e)),
            vname(x, vd),
            hname(hd),
            bx(canon(b, &bind_h(h, hd), &bind_v(x, vd), hd + 1, vd + 1)),
        ),
        SuperIntro(r, bs) => SuperIntro(
            r.clone(),
            bs.iter()
                .map(|br| {
                    let (mut hm, mut vm, mut h2, mut v2) = (hyps.clone(), vars.clone(), hd, vd);
                    let binders = br
                        .binders
                        .iter()
                        .map(|b| match b {
                            SuperBinder::Hyp(h) => {
                                hm.insert(h.clone(), hname(h2));
                                h2 += 1;
                                SuperBinder::Hyp(hname(h2 - 1))
                            }
                            SuperBinder::Term(x) => {
                                let nv = vname(x, v2);
                                vm.insert(x.clone(), Term::Var(nv.clone()));
                                v2 += 1;
                                SuperBinder::Term(nv)
                            }
                        })
                        .collect();
                    SuperBranch {
                        binders,
                        body: canon(&br.body, &hm, &vm, h2, v2),
                    }
                })
                .collect(),
        ),
        SuperElim(r, i, e, args) => SuperElim(
            r.clone(),
            *i,
            bx(go(e)),
            args.iter()
                .map(|a| match a {
                    ElimArg::Term(t) => ElimArg::Term(term(t)),
                    ElimArg::Proof(q) => ElimArg::Proof(go(q)),
                })
                .collect(),
        ),
        Inst(b, t) => Inst(bx(go(b)), term(t)),
        Pack(t, b) => Pack(term(t), bx(go(b))),
        Absurd(b, a) => Absurd(bx(go(b)), prop(a)),
        Ann(b, a) => Ann(bx(go(b)), prop(a)),
        _ => p.with_children(p.children().into_iter().map(go).collect()),
    }
}

/// Convenience for building eigenvariables in tests and the corpus.
pub fn var(name: &str, sort: &str) -> Var {
    Var::new(name, Sort::new(sort))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Prop {
        Prop::sym("Q")
    }

    #[test]
    fn classify() {
        assert_eq!(classify_last_rule(&Proof::lam("x", q(), Proof::hyp("x"))), LastRule::Introduction);
        assert_eq!(
            classify_last_rule(&Proof::app(Proof::hyp("p"), Proof::hyp("q"))),
            LastRule::Elimination
        );
        assert_eq!(classify_last_rule(&Proof::hyp("p")), LastRule::Hypothesis);
        assert_eq!(classify_last_rule(&Proof::fold("r", Proof::Unit)), LastRule::FoldUnfoldNode);
    }

    #[test]
    fn alpha_equivalence() {
        let a = Proof::lam("x", q(), Proof::hyp("x"));
        let b = Proof::lam("y", q(), Proof::hyp("y"));
        assert!(a.alpha_eq(&b));
        let c = Proof::lam("y", q(), Proof::hyp("x"));
        assert!(!a.alpha_eq(&c));
    }

    #[test]
    fn substitution_avoids_capture() {
        // (fun y : Q. x)[x := y] must not capture y
        let p = Proof::lam("y", q(), Proof::hyp("x"));
        let r = p.subst_hyp("x", &Proof::hyp("y"));
        match &r {
            Proof::Lam(z, _, body) => {
                assert_ne!(z, "y");
                assert_eq!(**body, Proof::hyp("y"));
            }
            other => panic!("{other:?}"),
        }
        // shadowed binder stops substitution
        let p = Proof::lam("x", q(), Proof::hyp("x"));
        assert_eq!(p.subst_hyp("x", &Proof::Unit), p);
    }

    #[test]
    fn term_substitution_avoids_capture() {
        let x = var("x", "s");
        let y = var("y", "s");
        let body = Proof::inst(Proof::hyp("h"), Term::Var(x.clone()));
        let p = Proof::gen(y.clone(), body);
        let r = p.subst_term(&x, &Term::Var(y.clone()));
        match &r {
            Proof::Gen(z, b) => {
                assert_ne!(z, &y);
                assert_eq!(**b, Proof::inst(Proof::hyp("h"), Term::Var(y.clone())));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn positions() {
        let p = Proof::app(Proof::lam("x", q(), Proof::hyp("x")), Proof::hyp("q"));
        assert_eq!(p.subproof(&[0, 0]), Some(&Proof::hyp("x")));
        let r = p.replace_at(&[1], Proof::Unit).unwrap();
        assert_eq!(r, Proof::app(Proof::lam("x", q(), Proof::hyp("x")), Proof::Unit));
        assert_eq!(p.size(), 4);
    }
}
