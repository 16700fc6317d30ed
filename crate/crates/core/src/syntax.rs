//! Object language: sorts, signatures, first-order terms and propositions.
//!
//! Propositions use a locally nameless representation. Variables bound by a
//! quantifier are de Bruijn indices ([`Term::Bound`]); free variables are
//! named and carry their sort. The binder name is kept only as a display
//! hint and is ignored by equality and hashing, so the derived `Eq` on
//! [`Prop`] is alpha-equivalence.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("undeclared sort `{0}`")]
    UnknownSort(String),
    #[error("undeclared symbol `{0}`")]
    UnknownSymbol(String),
    #[error("`{0}` is declared twice")]
    Duplicate(String),
    #[error("`{symbol}` expects {expected} argument(s), got {found}")]
    Arity {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("sort mismatch: expected `{expected}`, found `{found}`")]
    SortMismatch { expected: Sort, found: Sort },
    #[error("dangling bound variable #{0}")]
    Dangling(usize),
    #[error("hypothesis `{0}` occurs twice in the context")]
    DuplicateHypothesis(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Sort(pub String);

impl Sort {
    pub fn new(name: impl Into<String>) -> Self {
        Sort(name.into())
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A free (named) term variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Var {
    pub name: String,
    pub sort: Sort,
}

impl Var {
    pub fn new(name: impl Into<String>, sort: Sort) -> Self {
        Var {
            name: name.into(),
            sort,
        }
    }
}

/// Display name of a bound variable. Never observed by equality.
#[derive(Debug, Clone, Default)]
pub struct Hint(pub String);

impl PartialEq for Hint {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}
impl Eq for Hint {}
impl Hash for Hint {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}
impl PartialOrd for Hint {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Hint {
    fn cmp(&self, _: &Self) -> std::cmp::Ordering {
        std::cmp::Ordering::Equal
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Binder {
    pub hint: Hint,
    pub sort: Sort,
}

impl Binder {
    pub fn new(name: impl Into<String>, sort: Sort) -> Self {
        Binder {
            hint: Hint(name.into()),
            sort,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    /// De Bruijn index of an enclosing quantifier.
    Bound(usize),
    App(String, Vec<Term>),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Prop {
    Atom(String, Vec<Term>),
    Top,
    Bot,
    And(Box<Prop>, Box<Prop>),
    Or(Box<Prop>, Box<Prop>),
    Imp(Box<Prop>, Box<Prop>),
    Forall(Binder, Box<Prop>),
    Exists(Binder, Box<Prop>),
}

/// A term or a proposition, for operations that apply to both.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Term(Term),
    Prop(Prop),
}

impl Term {
    pub fn var(name: &str, sort: &Sort) -> Term {
        Term::Var(Var::new(name, sort.clone()))
    }

    pub fn app(f: &str, args: Vec<Term>) -> Term {
        Term::App(f.to_string(), args)
    }

    pub fn constant(c: &str) -> Term {
        Term::App(c.to_string(), Vec::new())
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub(crate) fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Bound(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn is_locally_closed(&self) -> bool {
        self.max_bound().is_none()
    }

    fn max_bound(&self) -> Option<usize> {
        match self {
            Term::Var(_) => None,
            Term::Bound(i) => Some(*i),
            Term::App(_, args) => args.iter().filter_map(Term::max_bound).max(),
        }
    }

    /// Adds `by` to every bound index at or above `cutoff`.
    pub fn shift(&self, cutoff: usize, by: usize) -> Term {
        match self {
            Term::Bound(i) if *i >= cutoff => Term::Bound(i + by),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| a.shift(cutoff, by)).collect())
            }
            t => t.clone(),
        }
    }

    /// Removes `by` levels from indices at or above `cutoff`. Returns `None`
    /// when an index below `cutoff + by` (but not below `cutoff`) would escape.
    pub(crate) fn unshift(&self, cutoff: usize, by: usize) -> Option<Term> {
        match self {
            Term::Bound(i) if *i >= cutoff => {
                if *i < cutoff + by {
                    None
                } else {
                    Some(Term::Bound(i - by))
                }
            }
            Term::App(f, args) => Some(Term::App(
                f.clone(),
                args.iter()
                    .map(|a| a.unshift(cutoff, by))
                    .collect::<Option<Vec<_>>>()?,
            )),
            t => Some(t.clone()),
        }
    }

    /// Replaces the free variable `x` by `u`; `depth` binders have been crossed.
    fn subst_at(&self, x: &Var, u: &Term, depth: usize) -> Term {
        match self {
            Term::Var(v) if v == x => u.shift(0, depth),
            Term::App(f, args) => Term::App(
                f.clone(),
                args.iter().map(|a| a.subst_at(x, u, depth)).collect(),
            ),
            t => t.clone(),
        }
    }

    pub fn substitute(&self, x: &Var, u: &Term) -> Term {
        self.subst_at(x, u, 0)
    }

    /// Simultaneous substitution of free variables.
    pub fn instantiate(&self, sigma: &BTreeMap<Var, Term>, depth: usize) -> Term {
        match self {
            Term::Var(v) => match sigma.get(v) {
                Some(u) => u.shift(0, depth),
                None => self.clone(),
            },
            Term::Bound(_) => self.clone(),
            Term::App(f, args) => Term::App(
                f.clone(),
                args.iter().map(|a| a.instantiate(sigma, depth)).collect(),
            ),
        }
    }

    fn open_at(&self, k: usize, u: &Term) -> Term {
        match self {
            Term::Bound(i) if *i == k => u.shift(0, k),
            Term::Bound(i) if *i > k => Term::Bound(i - 1),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| a.open_at(k, u)).collect())
            }
            t => t.clone(),
        }
    }

    fn close_at(&self, k: usize, x: &Var) -> Term {
        match self {
            Term::Var(v) if v == x => Term::Bound(k),
            Term::Bound(i) if *i >= k => Term::Bound(i + 1),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| a.close_at(k, x)).collect())
            }
            t => t.clone(),
        }
    }

    pub fn rename_var(&self, from: &Var, to: &Var) -> Term {
        self.substitute(from, &Term::Var(to.clone()))
    }

    pub fn subterm(&self, pos: &[usize]) -> Option<&Term> {
        match pos.split_first() {
            None => Some(self),
            Some((i, rest)) => match self {
                Term::App(_, args) => args.get(*i)?.subterm(rest),
                _ => None,
            },
        }
    }

    pub fn replace_at(&self, pos: &[usize], with: Term) -> Option<Term> {
        match pos.split_first() {
            None => Some(with),
            Some((i, rest)) => match self {
                Term::App(f, args) if *i < args.len() => {
                    let mut args = args.clone();
                    args[*i] = args[*i].replace_at(rest, with)?;
                    Some(Term::App(f.clone(), args))
                }
                _ => None,
            },
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
            _ => 1,
        }
    }
}

impl Prop {
    pub fn atom(p: &str, args: Vec<Term>) -> Prop {
        Prop::Atom(p.to_string(), args)
    }

    /// A proposition symbol (nullary predicate).
    pub fn sym(p: &str) -> Prop {
        Prop::Atom(p.to_string(), Vec::new())
    }

    pub fn imp(a: Prop, b: Prop) -> Prop {
        Prop::Imp(Box::new(a), Box::new(b))
    }

    pub fn and(a: Prop, b: Prop) -> Prop {
        Prop::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Prop, b: Prop) -> Prop {
        Prop::Or(Box::new(a), Box::new(b))
    }

    /// `forall x. body`, abstracting the free variable `x` of `body`.
    pub fn forall(x: &Var, body: Prop) -> Prop {
        Prop::Forall(Binder::new(x.name.clone(), x.sort.clone()), Box::new(body.close(x)))
    }

    pub fn exists(x: &Var, body: Prop) -> Prop {
        Prop::Exists(Binder::new(x.name.clone(), x.sort.clone()), Box::new(body.close(x)))
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Prop::Atom(..))
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub(crate) fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Prop::Atom(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            Prop::Top | Prop::Bot => {}
            Prop::And(a, b) | Prop::Or(a, b) | Prop::Imp(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Prop::Forall(_, body) | Prop::Exists(_, body) => body.collect_vars(out),
        }
    }

    /// Maps every term occurring in the proposition; `f` receives the number
    /// of binders crossed.
    pub(crate) fn map_terms(&self, depth: usize, f: &mut impl FnMut(&Term, usize) -> Term) -> Prop {
        match self {
            Prop::Atom(p, args) => Prop::Atom(p.clone(), args.iter().map(|a| f(a, depth)).collect()),
            Prop::Top => Prop::Top,
            Prop::Bot => Prop::Bot,
            Prop::And(a, b) => Prop::and(a.map_terms(depth, f), b.map_terms(depth, f)),
            Prop::Or(a, b) => Prop::or(a.map_terms(depth, f), b.map_terms(depth, f)),
            Prop::Imp(a, b) => Prop::imp(a.map_terms(depth, f), b.map_terms(depth, f)),
            Prop::Forall(bd, body) => {
                Prop::Forall(bd.clone(), Box::new(body.map_terms(depth + 1, f)))
            }
            Prop::Exists(bd, body) => {
                Prop::Exists(bd.clone(), Box::new(body.map_terms(depth + 1, f)))
            }
        }
    }

    /// Capture-avoiding replacement of the free variable `x` by `u`.
    pub fn substitute(&self, x: &Var, u: &Term) -> Prop {
        self.map_terms(0, &mut |t, d| t.subst_at(x, u, d))
    }

    pub fn instantiate(&self, sigma: &BTreeMap<Var, Term>) -> Prop {
        if sigma.is_empty() {
            return self.clone();
        }
        self.map_terms(0, &mut |t, d| t.instantiate(sigma, d))
    }

    /// Instantiates the outermost dangling index with `u` (the body of a
    /// quantifier becomes a proposition about `u`).
    pub fn open(&self, u: &Term) -> Prop {
        self.map_terms(0, &mut |t, d| t.open_at(d, u))
    }

    /// Abstracts the free variable `x` into a dangling index.
    pub fn close(&self, x: &Var) -> Prop {
        self.map_terms(0, &mut |t, d| t.close_at(d, x))
    }

    pub fn rename_var(&self, from: &Var, to: &Var) -> Prop {
        self.substitute(from, &Term::Var(to.clone()))
    }

    pub fn is_locally_closed(&self) -> bool {
        let mut ok = true;
        self.map_terms(0, &mut |t, d| {
            if let Some(m) = t.max_bound() {
                if m >= d {
                    ok = false;
                }
            }
            t.clone()
        });
        ok
    }

    pub fn size(&self) -> usize {
        match self {
            Prop::Atom(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
            Prop::Top | Prop::Bot => 1,
            Prop::And(a, b) | Prop::Or(a, b) | Prop::Imp(a, b) => 1 + a.size() + b.size(),
            Prop::Forall(_, b) | Prop::Exists(_, b) => 1 + b.size(),
        }
    }

    /// Immediate subformulas. Quantifier bodies are returned as-is, with
    /// a dangling index.
    pub fn children(&self) -> Vec<&Prop> {
        match self {
            Prop::And(a, b) | Prop::Or(a, b) | Prop::Imp(a, b) => vec![a, b],
            Prop::Forall(_, b) | Prop::Exists(_, b) => vec![b],
            _ => Vec::new(),
        }
    }

    /// Subformulas of a quantifier-free proposition, including itself.
    pub fn subformulas(&self) -> Vec<Prop> {
        let mut out = vec![self.clone()];
        for c in self.children() {
            for s in c.subformulas() {
                if !out.contains(&s) {
                    out.push(s);
                }
            }
        }
        out
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Prop::Forall(..) | Prop::Exists(..) => false,
            _ => self.children().into_iter().all(Prop::is_quantifier_free),
        }
    }

    /// Predicate symbols occurring in the proposition.
    pub fn predicates(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        fn go(p: &Prop, out: &mut BTreeSet<String>) {
            if let Prop::Atom(q, _) = p {
                out.insert(q.clone());
            }
            for c in p.children() {
                go(c, out);
            }
        }
        go(self, &mut out);
        out
    }
}

impl Expr {
    pub fn free_vars(&self) -> BTreeSet<Var> {
        match self {
            Expr::Term(t) => t.free_vars(),
            Expr::Prop(p) => p.free_vars(),
        }
    }

    pub fn substitute(&self, x: &Var, u: &Term) -> Expr {
        match self {
            Expr::Term(t) => Expr::Term(t.substitute(x, u)),
            Expr::Prop(p) => Expr::Prop(p.substitute(x, u)),
        }
    }

    pub fn as_prop(&self) -> Option<&Prop> {
        match self {
            Expr::Prop(p) => Some(p),
            Expr::Term(_) => None,
        }
    }

    pub fn as_term(&self) -> Option<&Term> {
        match self {
            Expr::Term(t) => Some(t),
            Expr::Prop(_) => None,
        }
    }
}

impl From<Term> for Expr {
    fn from(t: Term) -> Self {
        Expr::Term(t)
    }
}

impl From<Prop> for Expr {
    fn from(p: Prop) -> Self {
        Expr::Prop(p)
    }
}

/// Alpha-equivalence. With the nameless representation this is structural
/// equality.
pub fn alpha_eq(a: &Prop, b: &Prop) -> bool {
    a == b
}

/// Free variables of a term or proposition.
pub fn free_vars(e: &Expr) -> BTreeSet<Var> {
    e.free_vars()
}

/// Substitutes `u` for the free variable `x`, checking that `u` has the sort
/// of `x`.
pub fn substitute(e: &Expr, x: &Var, u: &Term, sig: &Signature) -> Result<Expr, SyntaxError> {
    let found = sig.sort_of(u, &[])?;
    if found != x.sort {
        return Err(SyntaxError::SortMismatch {
            expected: x.sort.clone(),
            found,
        });
    }
    Ok(e.substitute(x, u))
}

/// Produces a name based on `base` that is not in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    if !avoid.contains(base) {
        return base.to_string();
    }
    let mut candidate = format!("{base}'");
    while avoid.contains(&candidate) {
        candidate.push('\'');
    }
    candidate
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub sorts: BTreeSet<Sort>,
    /// name -> (argument sorts, result sort)
    pub functions: BTreeMap<String, (Vec<Sort>, Sort)>,
    /// name -> argument sorts; nullary predicates are proposition symbols
    pub predicates: BTreeMap<String, Vec<Sort>>,
    /// Declaration order, used when printing.
    #[serde(skip)]
    pub order: Vec<Decl>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decl {
    Sort(Sort),
    Function(String),
    Predicate(String),
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    fn name_taken(&self, name: &str) -> bool {
        self.functions.contains_key(name) || self.predicates.contains_key(name)
    }

    pub fn add_sort(&mut self, s: Sort) -> Result<(), SyntaxError> {
        if !self.sorts.insert(s.clone()) {
            return Err(SyntaxError::Duplicate(s.0));
        }
        self.order.push(Decl::Sort(s));
        Ok(())
    }

    pub fn add_function(&mut self, name: &str, args: Vec<Sort>, result: Sort) -> Result<(), SyntaxError> {
        if self.name_taken(name) {
            return Err(SyntaxError::Duplicate(name.to_string()));
        }
        for s in args.iter().chain(std::iter::once(&result)) {
            self.require_sort(s)?;
        }
        self.functions.insert(name.to_string(), (args, result));
        self.order.push(Decl::Function(name.to_string()));
        Ok(())
    }

    pub fn add_predicate(&mut self, name: &str, args: Vec<Sort>) -> Result<(), SyntaxError> {
        if self.name_taken(name) {
            return Err(SyntaxError::Duplicate(name.to_string()));
        }
        for s in &args {
            self.require_sort(s)?;
        }
        self.predicates.insert(name.to_string(), args);
        self.order.push(Decl::Predicate(name.to_string()));
        Ok(())
    }

    /// Shorthand for a list of proposition symbols.
    pub fn with_props(names: &[&str]) -> Self {
        let mut sig = Signature::new();
        for n in names {
            sig.add_predicate(n, Vec::new()).expect("distinct names");
        }
        sig
    }

    pub fn require_sort(&self, s: &Sort) -> Result<(), SyntaxError> {
        if self.sorts.contains(s) {
            Ok(())
        } else {
            Err(SyntaxError::UnknownSort(s.0.clone()))
        }
    }

    /// Sort of a term. `bound` lists the sorts of enclosing quantifiers,
    /// innermost last.
    pub fn sort_of(&self, t: &Term, bound: &[Sort]) -> Result<Sort, SyntaxError> {
        match t {
            Term::Var(v) => {
                self.require_sort(&v.sort)?;
                Ok(v.sort.clone())
            }
            Term::Bound(i) => bound
                .len()
                .checked_sub(i + 1)
                .map(|k| bound[k].clone())
                .ok_or(SyntaxError::Dangling(*i)),
            Term::App(f, args) => {
                let (arg_sorts, result) = self
                    .functions
                    .get(f)
                    .ok_or_else(|| SyntaxError::UnknownSymbol(f.clone()))?;
                self.check_args(f, arg_sorts, args, bound)?;
                Ok(result.clone())
            }
        }
    }

    fn check_args(&self, symbol: &str, expected: &[Sort], args: &[Term], bound: &[Sort]) -> Result<(), SyntaxError> {
        if expected.len() != args.len() {
            return Err(SyntaxError::Arity {
                symbol: symbol.to_string(),
                expected: expected.len(),
                found: args.len(),
            });
        }
        for (s, a) in expected.iter().zip(args) {
            let found = self.sort_of(a, bound)?;
            if &found != s {
                return Err(SyntaxError::SortMismatch {
                    expected: s.clone(),
                    found,
                });
            }
        }
        Ok(())
    }

    /// Checks that a proposition is well-sorted and locally closed.
    pub fn check_prop(&self, p: &Prop) -> Result<(), SyntaxError> {
        self.check_prop_in(p, &mut Vec::new())
    }

    fn check_prop_in(&self, p: &Prop, bound: &mut Vec<Sort>) -> Result<(), SyntaxError> {
        match p {
            Prop::Atom(q, args) => {
                let sorts = self
                    .predicates
                    .get(q)
                    .ok_or_else(|| SyntaxError::UnknownSymbol(q.clone()))?;
                self.check_args(q, sorts, args, bound)
            }
            Prop::Top | Prop::Bot => Ok(()),
            Prop::And(a, b) | Prop::Or(a, b) | Prop::Imp(a, b) => {
                self.check_prop_in(a, bound)?;
                self.check_prop_in(b, bound)
            }
            Prop::Forall(bd, body) | Prop::Exists(bd, body) => {
                self.require_sort(&bd.sort)?;
                bound.push(bd.sort.clone());
                let r = self.check_prop_in(body, bound);
                bound.pop();
                r
            }
        }
    }

    /// Closed terms of the given sort built from the signature up to the
    /// given nesting depth (constants are depth 0), in declaration order.
    pub fn ground_terms(&self, sort: &Sort, depth: usize) -> Vec<Term> {
        let mut levels: Vec<BTreeMap<Sort, Vec<Term>>> = Vec::new();
        for d in 0..=depth {
            let mut layer: BTreeMap<Sort, Vec<Term>> = BTreeMap::new();
            for (f, (args, res)) in &self.functions {
                if args.is_empty() {
                    if d == 0 {
                        layer.entry(res.clone()).or_default().push(Term::constant(f));
                    }
                    continue;
                }
                if d == 0 {
                    continue;
                }
                let prev = &levels[d - 1];
                let mut combos: Vec<Vec<Term>> = vec![Vec::new()];
                for s in args {
                    let pool = prev.get(s).cloned().unwrap_or_default();
                    combos = combos
                        .into_iter()
                        .flat_map(|c| {
                            pool.iter().map(move |t| {
                                let mut c = c.clone();
                                c.push(t.clone());
                                c
                            })
                        })
                        .collect();
                }
                for c in combos {
                    layer.entry(res.clone()).or_default().push(Term::App(f.clone(), c));
                }
            }
            if d > 0 {
                for (s, ts) in &levels[d - 1] {
                    let e = layer.entry(s.clone()).or_default();
                    for t in ts {
                        if !e.contains(t) {
                            e.push(t.clone());
                        }
                    }
                }
            }
            levels.push(layer);
        }
        levels
            .pop()
            .and_then(|mut l| l.remove(sort))
            .unwrap_or_default()
    }
}

/// Ordered list of named hypotheses.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Context {
    entries: Vec<(String, Prop)>,
}

impl Context {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: Vec<(String, Prop)>) -> Result<Self, SyntaxError> {
        let mut seen = BTreeSet::new();
        for (h, _) in &entries {
            if !seen.insert(h.clone()) {
                return Err(SyntaxError::DuplicateHypothesis(h.clone()));
            }
        }
        Ok(Context { entries })
    }

    pub fn entries(&self) -> &[(String, Prop)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lookup(&self, h: &str) -> Option<&Prop> {
        self.entries.iter().rev().find(|(n, _)| n == h).map(|(_, p)| p)
    }

    /// Adds a hypothesis; an existing hypothesis of the same name is dropped.
    pub fn extend(&self, h: &str, p: Prop) -> Context {
        let mut entries: Vec<_> = self.entries.iter().filter(|(n, _)| n != h).cloned().collect();
        entries.push((h.to_string(), p));
        Context { entries }
    }

    pub fn names(&self) -> BTreeSet<String> {
        self.entries.iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn props(&self) -> impl Iterator<Item = &Prop> {
        self.entries.iter().map(|(_, p)| p)
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for p in self.props() {
            p.collect_vars(&mut out);
        }
        out
    }

    pub fn fresh_hyp(&self, base: &str) -> String {
        fresh_name(base, &self.names())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sequent {
    pub context: Context,
    pub goal: Prop,
}

impl Sequent {
    pub fn new(context: Context, goal: Prop) -> Self {
        Sequent { context, goal }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = self.context.free_vars();
        self.goal.collect_vars(&mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s() -> Sort {
        Sort::new("s")
    }

    fn sig() -> Signature {
        let mut sig = Signature::new();
        sig.add_sort(s()).unwrap();
        sig.add_function("f", vec![s()], s()).unwrap();
        sig.add_function("c", vec![], s()).unwrap();
        sig.add_predicate("P", vec![s()]).unwrap();
        sig.add_predicate("Q", vec![s()]).unwrap();
        sig.add_predicate("R", vec![]).unwrap();
        sig
    }

    fn x() -> Var {
        Var::new("x", s())
    }
    fn y() -> Var {
        Var::new("y", s())
    }
    fn p(t: Term) -> Prop {
        Prop::atom("P", vec![t])
    }

    #[test]
    fn substitute_replaces_free_occurrence() {
        let e = Expr::Prop(p(Term::Var(x())));
        let u = Term::app("f", vec![Term::Var(y())]);
        let r = substitute(&e, &x(), &u, &sig()).unwrap();
        assert_eq!(r, Expr::Prop(p(u)));
    }

    #[test]
    fn substitute_leaves_bound_occurrence() {
        let all = Prop::forall(&x(), p(Term::Var(x())));
        let r = all.substitute(&x(), &Term::constant("c"));
        assert_eq!(r, all);
    }

    #[test]
    fn substitute_avoids_capture() {
        // forall y. P(x)  with x := y  gives  forall y'. P(y)
        let all = Prop::forall(&y(), p(Term::Var(x())));
        let r = all.substitute(&x(), &Term::Var(y()));
        match &r {
            Prop::Forall(_, body) => assert_eq!(**body, p(Term::Var(y()))),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(r.free_vars(), BTreeSet::from([y()]));
        assert_eq!(r.to_string(), "forall y' : s. P(y)");
    }

    #[test]
    fn substitute_rejects_sort_mismatch() {
        let mut sg = sig();
        sg.add_sort(Sort::new("t")).unwrap();
        let z = Var::new("z", Sort::new("t"));
        let err = substitute(&Expr::Prop(p(Term::Var(x()))), &x(), &Term::Var(z), &sg).unwrap_err();
        assert!(matches!(err, SyntaxError::SortMismatch { .. }));
    }

    #[test]
    fn alpha_eq_examples() {
        assert!(alpha_eq(
            &Prop::forall(&x(), p(Term::Var(x()))),
            &Prop::forall(&y(), p(Term::Var(y())))
        ));
        assert!(!alpha_eq(
            &Prop::forall(&x(), p(Term::Var(x()))),
            &Prop::forall(&x(), Prop::atom("Q", vec![Term::Var(x())]))
        ));
        let qr = Prop::imp(Prop::sym("Q"), Prop::sym("R"));
        assert!(alpha_eq(&qr, &qr.clone()));
    }

    #[test]
    fn free_vars_examples() {
        assert_eq!(p(Term::Var(x())).free_vars(), BTreeSet::from([x()]));
        assert!(Prop::forall(&x(), p(Term::Var(x()))).free_vars().is_empty());
        let e = Prop::imp(p(Term::app("f", vec![Term::Var(x())])), Prop::sym("R"));
        assert_eq!(e.free_vars(), BTreeSet::from([x()]));
    }

    #[test]
    fn open_close_inverse() {
        let body = Prop::and(p(Term::Var(x())), Prop::atom("Q", vec![Term::Var(y())]));
        let closed = body.close(&x());
        assert!(!closed.is_locally_closed());
        assert_eq!(closed.open(&Term::Var(x())), body);
    }

    #[test]
    fn check_prop_sorts() {
        let sg = sig();
        assert!(sg.check_prop(&Prop::forall(&x(), p(Term::Var(x())))).is_ok());
        let bad = Prop::atom("P", vec![]);
        assert!(matches!(sg.check_prop(&bad), Err(SyntaxError::Arity { .. })));
        assert!(matches!(
            sg.check_prop(&Prop::sym("Z")),
            Err(SyntaxError::UnknownSymbol(_))
        ));
    }

    #[test]
    fn ground_terms_by_depth() {
        let sg = sig();
        assert_eq!(sg.ground_terms(&s(), 0), vec![Term::constant("c")]);
        assert_eq!(
            sg.ground_terms(&s(), 1),
            vec![Term::app("f", vec![Term::constant("c")]), Term::constant("c")]
        );
    }

    #[test]
    fn context_rejects_duplicates() {
        let e = Context::from_entries(vec![("h".into(), Prop::Top), ("h".into(), Prop::Bot)]);
        assert!(e.is_err());
        let c = Context::new().extend("h", Prop::Top).extend("h", Prop::Bot);
        assert_eq!(c.len(), 1);
        assert_eq!(c.lookup("h"), Some(&Prop::Bot));
    }
}
