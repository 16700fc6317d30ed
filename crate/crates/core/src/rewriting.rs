//! Rewrite rules on terms and propositions, and the congruence they generate.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use crate::syntax::{Expr, Prop, Signature, SyntaxError, Term, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error("rule `{0}`: left-hand side of a proposition rule must be atomic")]
    NonAtomicLhs(String),
    #[error("rule `{0}`: left-hand side of a term rule must not be a variable")]
    VariableLhs(String),
    #[error("rule `{rule}`: variable `{var}` of the right-hand side does not occur on the left")]
    UnboundRhsVar { rule: String, var: String },
    #[error("rule `{rule}`: {source}")]
    Sort { rule: String, source: SyntaxError },
    #[error("rule `{0}` is defined twice")]
    Duplicate(String),
    #[error("unknown rule `{0}`")]
    Unknown(String),
    #[error("rule `{0}` is a term rule")]
    NotPropRule(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RuleBody {
    Term { lhs: Term, rhs: Term },
    /// `lhs` is always an atom.
    Prop { lhs: Prop, rhs: Prop },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RewriteRule {
    pub name: String,
    pub body: RuleBody,
}

impl RewriteRule {
    pub fn term(name: &str, lhs: Term, rhs: Term, sig: &Signature) -> Result<Self, RuleError> {
        if matches!(lhs, Term::Var(_)) {
            return Err(RuleError::VariableLhs(name.to_string()));
        }
        let sort_err = |source| RuleError::Sort {
            rule: name.to_string(),
            source,
        };
        let ls = sig.sort_of(&lhs, &[]).map_err(sort_err)?;
        let rs = sig.sort_of(&rhs, &[]).map_err(sort_err)?;
        if ls != rs {
            return Err(sort_err(SyntaxError::SortMismatch {
                expected: ls,
                found: rs,
            }));
        }
        check_vars(name, &lhs.free_vars(), &rhs.free_vars())?;
        Ok(RewriteRule {
            name: name.to_string(),
            body: RuleBody::Term { lhs, rhs },
        })
    }

    pub fn prop(name: &str, lhs: Prop, rhs: Prop, sig: &Signature) -> Result<Self, RuleError> {
        if !lhs.is_atom() {
            return Err(RuleError::NonAtomicLhs(name.to_string()));
        }
        let sort_err = |source| RuleError::Sort {
            rule: name.to_string(),
            source,
        };
        sig.check_prop(&lhs).map_err(sort_err)?;
        sig.check_prop(&rhs).map_err(sort_err)?;
        check_vars(name, &lhs.free_vars(), &rhs.free_vars())?;
        Ok(RewriteRule {
            name: name.to_string(),
            body: RuleBody::Prop { lhs, rhs },
        })
    }

    pub fn is_prop_rule(&self) -> bool {
        matches!(self.body, RuleBody::Prop { .. })
    }

    pub fn lhs(&self) -> Expr {
        match &self.body {
            RuleBody::Term { lhs, .. } => Expr::Term(lhs.clone()),
            RuleBody::Prop { lhs, .. } => Expr::Prop(lhs.clone()),
        }
    }

    pub fn rhs(&self) -> Expr {
        match &self.body {
            RuleBody::Term { rhs, .. } => Expr::Term(rhs.clone()),
            RuleBody::Prop { rhs, .. } => Expr::Prop(rhs.clone()),
        }
    }

    pub fn variables(&self) -> BTreeSet<Var> {
        self.lhs().free_vars()
    }

    fn is_left_linear(&self) -> bool {
        let mut seen = BTreeSet::new();
        let mut linear = true;
        let mut visit = |t: &Term| {
            fn go(t: &Term, seen: &mut BTreeSet<Var>, linear: &mut bool) {
                match t {
                    Term::Var(v) => {
                        if !seen.insert(v.clone()) {
                            *linear = false;
                        }
                    }
                    Term::App(_, args) => args.iter().for_each(|a| go(a, seen, linear)),
                    Term::Bound(_) => {}
                }
            }
            go(t, &mut seen, &mut linear);
        };
        match &self.body {
            RuleBody::Term { lhs, .. } => visit(lhs),
            RuleBody::Prop { lhs: Prop::Atom(_, args), .. } => args.iter().for_each(&mut visit),
            RuleBody::Prop { .. } => {}
        }
        linear
    }

    /// Renames the rule's variables with the given suffix.
    fn renamed(&self, suffix: &str) -> RewriteRule {
        let sigma: BTreeMap<Var, Term> = self
            .variables()
            .into_iter()
            .map(|v| {
                let nv = Var::new(format!("{}{suffix}", v.name), v.sort.clone());
                (v, Term::Var(nv))
            })
            .collect();
        let body = match &self.body {
            RuleBody::Term { lhs, rhs } => RuleBody::Term {
                lhs: lhs.instantiate(&sigma, 0),
                rhs: rhs.instantiate(&sigma, 0),
            },
            RuleBody::Prop { lhs, rhs } => RuleBody::Prop {
                lhs: lhs.instantiate(&sigma),
                rhs: rhs.instantiate(&sigma),
            },
        };
        RewriteRule {
            name: self.name.clone(),
            body,
        }
    }
}

fn check_vars(rule: &str, lhs: &BTreeSet<Var>, rhs: &BTreeSet<Var>) -> Result<(), RuleError> {
    match rhs.difference(lhs).next() {
        Some(v) => Err(RuleError::UnboundRhsVar {
            rule: rule.to_string(),
            var: v.name.clone(),
        }),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, Default)]
pub struct RewriteSystem {
    pub signature: Signature,
    rules: Vec<RewriteRule>,
    confluent: OnceLock<bool>,
}

impl PartialEq for RewriteSystem {
    fn eq(&self, other: &Self) -> bool {
        self.signature == other.signature && self.rules == other.rules
    }
}

impl RewriteSystem {
    pub fn new(signature: Signature) -> Self {
        RewriteSystem {
            signature,
            rules: Vec::new(),
            confluent: OnceLock::new(),
        }
    }

    pub fn with_rules(signature: Signature, rules: Vec<RewriteRule>) -> Result<Self, RuleError> {
        let mut rs = RewriteSystem::new(signature);
        for r in rules {
            rs.add_rule(r)?;
        }
        Ok(rs)
    }

    pub fn add_rule(&mut self, rule: RewriteRule) -> Result<(), RuleError> {
        if self.rule(&rule.name).is_some() {
            return Err(RuleError::Duplicate(rule.name));
        }
        self.rules.push(rule);
        self.confluent = OnceLock::new();
        Ok(())
    }

    pub fn rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    pub fn rule(&self, name: &str) -> Option<&RewriteRule> {
        self.rules.iter().find(|r| r.name == name)
    }

    pub fn prop_rules(&self) -> impl Iterator<Item = &RewriteRule> {
        self.rules.iter().filter(|r| r.is_prop_rule())
    }

    pub fn term_rules(&self) -> impl Iterator<Item = &RewriteRule> {
        self.rules.iter().filter(|r| !r.is_prop_rule())
    }

    /// The same signature with the proposition rules removed.
    pub fn term_part(&self) -> RewriteSystem {
        RewriteSystem {
            signature: self.signature.clone(),
            rules: self.term_rules().cloned().collect(),
            confluent: OnceLock::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Left-linear with only trivial critical pairs, hence confluent.
    pub fn is_weakly_orthogonal(&self) -> bool {
        *self.confluent.get_or_init(|| {
            self.rules.iter().all(RewriteRule::is_left_linear)
                && overlaps(self).iter().all(|o| o.left == o.right)
        })
    }
}

pub type Position = Vec<usize>;

/// One rewrite: rule `rule` fired at `position`, producing `result` (the
/// whole expression after the step).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Step {
    pub position: Position,
    pub rule: String,
    pub result: Expr,
}

// ---------- matching and unification ----------

pub(crate) fn match_term(pat: &Term, t: &Term, depth: usize, sigma: &mut BTreeMap<Var, Term>) -> bool {
    match (pat, t) {
        (Term::Var(v), _) => {
            let Some(u) = t.unshift(0, depth) else {
                return false;
            };
            match sigma.get(v) {
                Some(prev) => *prev == u,
                None => {
                    sigma.insert(v.clone(), u);
                    true
                }
            }
        }
        (Term::Bound(i), Term::Bound(j)) => i == j,
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| match_term(x, y, depth, sigma))
        }
        _ => false,
    }
}

/// Matches a proposition pattern (free variables are pattern variables)
/// against `p`. Matched terms may not refer to binders of the pattern.
pub(crate) fn match_prop(pat: &Prop, p: &Prop, depth: usize, sigma: &mut BTreeMap<Var, Term>) -> bool {
    match (pat, p) {
        (Prop::Atom(a, xs), Prop::Atom(b, ys)) => {
            a == b && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| match_term(x, y, depth, sigma))
        }
        (Prop::Top, Prop::Top) | (Prop::Bot, Prop::Bot) => true,
        (Prop::And(a1, b1), Prop::And(a2, b2))
        | (Prop::Or(a1, b1), Prop::Or(a2, b2))
        | (Prop::Imp(a1, b1), Prop::Imp(a2, b2)) => {
            match_prop(a1, a2, depth, sigma) && match_prop(b1, b2, depth, sigma)
        }
        (Prop::Forall(s1, b1), Prop::Forall(s2, b2)) | (Prop::Exists(s1, b1), Prop::Exists(s2, b2)) => {
            s1.sort == s2.sort && match_prop(b1, b2, depth + 1, sigma)
        }
        _ => false,
    }
}

fn resolve(t: &Term, sigma: &BTreeMap<Var, Term>) -> Term {
    match t {
        Term::Var(v) => match sigma.get(v) {
            Some(u) => resolve(u, sigma),
            None => t.clone(),
        },
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| resolve(a, sigma)).collect()),
        Term::Bound(_) => t.clone(),
    }
}

fn occurs(v: &Var, t: &Term) -> bool {
    match t {
        Term::Var(w) => v == w,
        Term::App(_, args) => args.iter().any(|a| occurs(v, a)),
        Term::Bound(_) => false,
    }
}

pub(crate) fn unify(a: &Term, b: &Term, sigma: &mut BTreeMap<Var, Term>) -> bool {
    let a = resolve(a, sigma);
    let b = resolve(b, sigma);
    match (&a, &b) {
        (Term::Var(x), Term::Var(y)) if x == y => true,
        (Term::Var(x), t) | (t, Term::Var(x)) => {
            if occurs(x, t) {
                return false;
            }
            sigma.insert(x.clone(), t.clone());
            true
        }
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| unify(x, y, sigma))
        }
        (Term::Bound(i), Term::Bound(j)) => i == j,
        _ => false,
    }
}

fn resolved_sigma(sigma: &BTreeMap<Var, Term>) -> BTreeMap<Var, Term> {
    sigma.iter().map(|(k, v)| (k.clone(), resolve(v, sigma))).collect()
}

// ---------- positions ----------

enum Node<'a> {
    Term(&'a Term),
    Prop(&'a Prop),
}

/// Returns the node at `pos` and the number of binders above it.
fn node_at<'a>(e: &'a Expr, pos: &[usize]) -> Option<(Node<'a>, usize)> {
    fn in_term<'a>(t: &'a Term, pos: &[usize], depth: usize) -> Option<(Node<'a>, usize)> {
        Some((Node::Term(t.subterm(pos)?), depth))
    }
    fn in_prop<'a>(p: &'a Prop, pos: &[usize], depth: usize) -> Option<(Node<'a>, usize)> {
        let Some((i, rest)) = pos.split_first() else {
            return Some((Node::Prop(p), depth));
        };
        match p {
            Prop::Atom(_, args) => in_term(args.get(*i)?, rest, depth),
            Prop::And(a, b) | Prop::Or(a, b) | Prop::Imp(a, b) => match i {
                0 => in_prop(a, rest, depth),
                1 => in_prop(b, rest, depth),
                _ => None,
            },
            Prop::Forall(_, body) | Prop::Exists(_, body) if *i == 0 => in_prop(body, rest, depth + 1),
            _ => None,
        }
    }
    match e {
        Expr::Term(t) => in_term(t, pos, 0),
        Expr::Prop(p) => in_prop(p, pos, 0),
    }
}

fn replace_in_prop(p: &Prop, pos: &[usize], with: Expr) -> Option<Prop> {
    let Some((i, rest)) = pos.split_first() else {
        return match with {
            Expr::Prop(q) => Some(q),
            Expr::Term(_) => None,
        };
    };
    Some(match p {
        Prop::Atom(q, args) => {
            let target = args.get(*i)?;
            let Expr::Term(t) = with else { return None };
            let mut args = args.clone();
            args[*i] = target.replace_at(rest, t)?;
            Prop::Atom(q.clone(), args)
        }
        Prop::And(a, b) | Prop::Or(a, b) | Prop::Imp(a, b) => {
            let (na, nb) = match i {
                0 => (replace_in_prop(a, rest, with)?, (**b).clone()),
                1 => ((**a).clone(), replace_in_prop(b, rest, with)?),
                _ => return None,
            };
            match p {
                Prop::And(..) => Prop::and(na, nb),
                Prop::Or(..) => Prop::or(na, nb),
                _ => Prop::imp(na, nb),
            }
        }
        Prop::Forall(bd, body) if *i == 0 => Prop::Forall(bd.clone(), Box::new(replace_in_prop(body, rest, with)?)),
        Prop::Exists(bd, body) if *i == 0 => Prop::Exists(bd.clone(), Box::new(replace_in_prop(body, rest, with)?)),
        _ => return None,
    })
}

fn replace_at(e: &Expr, pos: &[usize], with: Expr) -> Option<Expr> {
    match e {
        Expr::Term(t) => match with {
            Expr::Term(w) => t.replace_at(pos, w).map(Expr::Term),
            Expr::Prop(_) => None,
        },
        Expr::Prop(p) => replace_in_prop(p, pos, with).map(Expr::Prop),
    }
}

/// Contracts `rule` at `pos`, if it matches there.
pub fn rewrite_at(e: &Expr, pos: &[usize], rule: &RewriteRule) -> Option<Expr> {
    let (node, _) = node_at(e, pos)?;
    let reduct = match (&rule.body, node) {
        (RuleBody::Term { lhs, rhs }, Node::Term(t)) => {
            let mut sigma = BTreeMap::new();
            if !match_term(lhs, t, 0, &mut sigma) {
                return None;
            }
            Expr::Term(rhs.instantiate(&sigma, 0))
        }
        (RuleBody::Prop { lhs, rhs }, Node::Prop(p)) => {
            let mut sigma = BTreeMap::new();
            if !match_prop(lhs, p, 0, &mut sigma) {
                return None;
            }
            Expr::Prop(rhs.instantiate(&sigma))
        }
        _ => return None,
    };
    replace_at(e, pos, reduct)
}

/// Enumerates redexes in leftmost-outermost order (pre-order, rules in
/// declaration order at each node). Stops after `limit` redexes.
fn redexes(e: &Expr, rs: &RewriteSystem, limit: usize) -> Vec<(Position, usize)> {
    fn term_node(t: &Term, rs: &RewriteSystem, pos: &mut Position, out: &mut Vec<(Position, usize)>, limit: usize) {
        if out.len() >= limit {
            return;
        }
        for (k, r) in rs.rules.iter().enumerate() {
            if let RuleBody::Term { lhs, .. } = &r.body {
                if match_term(lhs, t, 0, &mut BTreeMap::new()) {
                    out.push((pos.clone(), k));
                    if out.len() >= limit {
                        return;
                    }
                }
            }
        }
        if let Term::App(_, args) = t {
            for (i, a) in args.iter().enumerate() {
                pos.push(i);
                term_node(a, rs, pos, out, limit);
                pos.pop();
            }
        }
    }
    fn prop_node(p: &Prop, rs: &RewriteSystem, pos: &mut Position, out: &mut Vec<(Position, usize)>, limit: usize) {
        if out.len() >= limit {
            return;
        }
        if let Prop::Atom(_, args) = p {
            for (k, r) in rs.rules.iter().enumerate() {
                if let RuleBody::Prop { lhs, .. } = &r.body {
                    if match_prop(lhs, p, 0, &mut BTreeMap::new()) {
                        out.push((pos.clone(), k));
                        if out.len() >= limit {
                            return;
                        }
                    }
                }
            }
            for (i, a) in args.iter().enumerate() {
                pos.push(i);
                term_node(a, rs, pos, out, limit);
                pos.pop();
            }
            return;
        }
        for (i, c) in p.children().into_iter().enumerate() {
            pos.push(i);
            prop_node(c, rs, pos, out, limit);
            pos.pop();
        }
    }
    let mut out = Vec::new();
    let mut pos = Vec::new();
    match e {
        Expr::Term(t) => term_node(t, rs, &mut pos, &mut out, limit),
        Expr::Prop(p) => prop_node(p, rs, &mut pos, &mut out, limit),
    }
    out
}

fn contract(e: &Expr, rs: &RewriteSystem, pos: Position, k: usize) -> Step {
    let rule = &rs.rules[k];
    let result = rewrite_at(e, &pos, rule).expect("redex was matched");
    Step {
        position: pos,
        rule: rule.name.clone(),
        result,
    }
}

/// Leftmost-outermost single rewrite step.
pub fn rewrite_step(e: &Expr, rs: &RewriteSystem) -> Option<Step> {
    let (pos, k) = redexes(e, rs, 1).pop()?;
    Some(contract(e, rs, pos, k))
}

/// All one-step reducts.
pub fn all_steps(e: &Expr, rs: &RewriteSystem) -> Vec<Step> {
    redexes(e, rs, usize::MAX)
        .into_iter()
        .map(|(pos, k)| contract(e, rs, pos, k))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Normalization {
    NormalForm { value: Expr, steps: Vec<Step> },
    FuelExhausted { last: Expr, steps: Vec<Step> },
}

impl Normalization {
    pub fn value(&self) -> &Expr {
        match self {
            Normalization::NormalForm { value, .. } => value,
            Normalization::FuelExhausted { last, .. } => last,
        }
    }

    pub fn is_normal(&self) -> bool {
        matches!(self, Normalization::NormalForm { .. })
    }

    pub fn steps(&self) -> &[Step] {
        match self {
            Normalization::NormalForm { steps, .. } | Normalization::FuelExhausted { steps, .. } => steps,
        }
    }
}

/// Iterates [`rewrite_step`] at most `fuel` times.
pub fn normalize(e: &Expr, rs: &RewriteSystem, fuel: usize) -> Normalization {
    let mut cur = e.clone();
    let mut steps = Vec::new();
    loop {
        match rewrite_step(&cur, rs) {
            None => return Normalization::NormalForm { value: cur, steps },
            Some(_) if steps.len() >= fuel => return Normalization::FuelExhausted { last: cur, steps },
            Some(step) => {
                cur = step.result.clone();
                steps.push(step);
            }
        }
    }
}

pub fn normalize_prop(p: &Prop, rs: &RewriteSystem, fuel: usize) -> Normalization {
    normalize(&Expr::Prop(p.clone()), rs, fuel)
}

/// Exposes the head connective of `p`: rewrites at the root while it is an
/// atom, reducing atom arguments when no proposition rule fires. Gives up
/// after `budget` steps.
pub fn whnf(p: &Prop, rs: &RewriteSystem, budget: usize) -> Result<(Prop, Vec<Step>), Vec<Step>> {
    let mut cur = Expr::Prop(p.clone());
    let mut steps = Vec::new();
    while let Expr::Prop(Prop::Atom(..)) = &cur {
        let next = redexes(&cur, rs, 1).pop();
        let Some((pos, k)) = next else { break };
        if steps.len() >= budget {
            return Err(steps);
        }
        let step = contract(&cur, rs, pos, k);
        cur = step.result.clone();
        steps.push(step);
    }
    match cur {
        Expr::Prop(p) => Ok((p, steps)),
        Expr::Term(_) => unreachable!("propositions rewrite to propositions"),
    }
}

// ---------- congruence ----------

/// Rewrite sequences from both sides to a common form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub left: Vec<Step>,
    pub right: Vec<Step>,
    pub join: Expr,
}

impl Witness {
    pub fn trivial(e: Expr) -> Self {
        Witness {
            left: Vec::new(),
            right: Vec::new(),
            join: e,
        }
    }

    /// Re-executes every step and checks that both sequences end in `join`.
    pub fn replay(&self, a: &Expr, b: &Expr, rs: &RewriteSystem) -> bool {
        replay_steps(a, &self.left, rs).is_some_and(|e| e == self.join)
            && replay_steps(b, &self.right, rs).is_some_and(|e| e == self.join)
    }

    pub fn len(&self) -> usize {
        self.left.len() + self.right.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Replays recorded steps, checking each recorded result. Returns the final
/// expression.
pub fn replay_steps(start: &Expr, steps: &[Step], rs: &RewriteSystem) -> Option<Expr> {
    let mut cur = start.clone();
    for s in steps {
        let rule = rs.rule(&s.rule)?;
        let next = rewrite_at(&cur, &s.position, rule)?;
        if next != s.result {
            return None;
        }
        cur = next;
    }
    Some(cur)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Congruence {
    Yes(Witness),
    No,
    Unknown,
}

impl Congruence {
    pub fn is_yes(&self) -> bool {
        matches!(self, Congruence::Yes(_))
    }
}

enum Verdict {
    Yes,
    No,
    Unknown,
}

fn prefixed(steps: Vec<Step>, prefix: &[usize]) -> Vec<(Position, String)> {
    steps
        .into_iter()
        .map(|s| {
            let mut p = prefix.to_vec();
            p.extend(s.position);
            (p, s.rule)
        })
        .collect()
}

/// Head-directed comparison, valid for confluent systems: connectives are
/// never rewritten, so distinct head-normal shapes never join.
fn decompose(
    a: &Prop,
    b: &Prop,
    rs: &RewriteSystem,
    budget: usize,
    prefix: &mut Position,
    left: &mut Vec<(Position, String)>,
    right: &mut Vec<(Position, String)>,
) -> Verdict {
    if a == b {
        return Verdict::Yes;
    }
    let Ok((ha, sa)) = whnf(a, rs, budget) else {
        return Verdict::Unknown;
    };
    let Ok((hb, sb)) = whnf(b, rs, budget) else {
        return Verdict::Unknown;
    };
    left.extend(prefixed(sa, prefix));
    right.extend(prefixed(sb, prefix));
    if ha == hb {
        return Verdict::Yes;
    }
    let mut both = |x: &Prop, y: &Prop, i: usize, left: &mut Vec<_>, right: &mut Vec<_>| {
        prefix.push(i);
        let v = decompose(x, y, rs, budget, prefix, left, right);
        prefix.pop();
        v
    };
    match (&ha, &hb) {
        (Prop::And(a1, a2), Prop::And(b1, b2))
        | (Prop::Or(a1, a2), Prop::Or(b1, b2))
        | (Prop::Imp(a1, a2), Prop::Imp(b1, b2)) => {
            let v1 = both(a1, b1, 0, left, right);
            if let Verdict::No = v1 {
                return Verdict::No;
            }
            let v2 = both(a2, b2, 1, left, right);
            match (v1, v2) {
                (_, Verdict::No) => Verdict::No,
                (Verdict::Yes, Verdict::Yes) => Verdict::Yes,
                _ => Verdict::Unknown,
            }
        }
        (Prop::Forall(s1, a1), Prop::Forall(s2, b1)) | (Prop::Exists(s1, a1), Prop::Exists(s2, b1)) => {
            if s1.sort != s2.sort {
                return Verdict::No;
            }
            both(a1, b1, 0, left, right)
        }
        // whnf leaves atoms with normal arguments and no root redex;
        // two such atoms are congruent only if identical.
        _ => Verdict::No,
    }
}

struct Explored {
    parent: HashMap<Expr, Option<(Expr, Position, String)>>,
    frontier: Vec<Expr>,
    exhausted: bool,
}

impl Explored {
    fn new(e: &Expr) -> Self {
        Explored {
            parent: HashMap::from([(e.clone(), None)]),
            frontier: vec![e.clone()],
            exhausted: false,
        }
    }

    fn expand(&mut self, rs: &RewriteSystem, cap: usize) {
        let mut next = Vec::new();
        for e in std::mem::take(&mut self.frontier) {
            for s in all_steps(&e, rs) {
                if self.parent.len() >= cap {
                    return;
                }
                if !self.parent.contains_key(&s.result) {
                    self.parent.insert(s.result.clone(), Some((e.clone(), s.position, s.rule)));
                    next.push(s.result);
                }
            }
        }
        self.exhausted = next.is_empty();
        self.frontier = next;
    }

    fn path_to(&self, target: &Expr) -> Vec<(Position, String)> {
        let mut out = Vec::new();
        let mut cur = target.clone();
        while let Some(Some((prev, pos, rule))) = self.parent.get(&cur) {
            out.push((pos.clone(), rule.clone()));
            cur = prev.clone();
        }
        out.reverse();
        out
    }
}

const JOIN_NODE_CAP: usize = 20_000;

/// Breadth-first search for a common reduct within `depth` steps per side.
pub(crate) fn join_search(a: &Expr, b: &Expr, rs: &RewriteSystem, depth: usize) -> Option<Witness> {
    let mut ea = Explored::new(a);
    let mut eb = Explored::new(b);
    let meet = |ea: &Explored, eb: &Explored| -> Option<Expr> {
        let (small, large) = if ea.parent.len() <= eb.parent.len() { (ea, eb) } else { (eb, ea) };
        let mut hits: Vec<&Expr> = small.parent.keys().filter(|k| large.parent.contains_key(*k)).collect();
        hits.sort();
        hits.first().map(|e| (*e).clone())
    };
    for _ in 0..=depth {
        if let Some(j) = meet(&ea, &eb) {
            let left = materialize(a, &ea.path_to(&j), rs)?;
            let right = materialize(b, &eb.path_to(&j), rs)?;
            return Some(Witness { left, right, join: j });
        }
        if (ea.exhausted && eb.exhausted) || ea.parent.len() + eb.parent.len() >= JOIN_NODE_CAP {
            break;
        }
        ea.expand(rs, JOIN_NODE_CAP);
        eb.expand(rs, JOIN_NODE_CAP);
    }
    None
}

fn materialize(start: &Expr, path: &[(Position, String)], rs: &RewriteSystem) -> Option<Vec<Step>> {
    let mut cur = start.clone();
    let mut out = Vec::new();
    for (pos, rule) in path {
        let next = rewrite_at(&cur, pos, rs.rule(rule)?)?;
        out.push(Step {
            position: pos.clone(),
            rule: rule.clone(),
            result: next.clone(),
        });
        cur = next;
    }
    Some(out)
}

/// Decides whether `a` and `b` are congruent modulo `rs`, within `depth`
/// rewrite steps per head exposure (or per side, for the join search).
///
/// `No` is only returned for weakly orthogonal (hence confluent) systems,
/// where a head-shape clash or distinct normal forms refute joinability.
pub fn congruent(a: &Prop, b: &Prop, rs: &RewriteSystem, depth: usize) -> Congruence {
    let ea = Expr::Prop(a.clone());
    let eb = Expr::Prop(b.clone());
    if a == b {
        return Congruence::Yes(Witness::trivial(ea));
    }
    if rs.is_weakly_orthogonal() {
        let (mut left, mut right) = (Vec::new(), Vec::new());
        match decompose(a, b, rs, depth, &mut Vec::new(), &mut left, &mut right) {
            Verdict::Yes => {
                let l = materialize(&ea, &left, rs).expect("decomposition steps replay");
                let r = materialize(&eb, &right, rs).expect("decomposition steps replay");
                let join = l.last().map_or(ea.clone(), |s| s.result.clone());
                debug_assert_eq!(r.last().map_or(eb.clone(), |s| s.result.clone()), join);
                return Congruence::Yes(Witness { left: l, right: r, join });
            }
            Verdict::No => return Congruence::No,
            Verdict::Unknown => {}
        }
    }
    match join_search(&ea, &eb, rs, depth) {
        Some(w) => Congruence::Yes(w),
        None => Congruence::Unknown,
    }
}

// ---------- critical pairs ----------

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriticalPair {
    pub outer_rule: String,
    pub inner_rule: String,
    pub position: Position,
    #[serde(serialize_with = "ser_display")]
    pub peak: Expr,
    #[serde(serialize_with = "ser_display")]
    pub left: Expr,
    #[serde(serialize_with = "ser_display")]
    pub right: Expr,
    pub joinable: bool,
}

fn ser_display<S: serde::Serializer>(e: &Expr, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&e.to_string())
}

/// Non-variable positions of a term, pre-order.
fn term_positions(t: &Term, pos: &mut Position, out: &mut Vec<Position>) {
    if let Term::App(_, args) = t {
        out.push(pos.clone());
        for (i, a) in args.iter().enumerate() {
            pos.push(i);
            term_positions(a, pos, out);
            pos.pop();
        }
    }
}

fn overlaps(rs: &RewriteSystem) -> Vec<CriticalPair> {
    let mut out = Vec::new();
    let rules = &rs.rules;
    for (i, outer) in rules.iter().enumerate() {
        for (j, inner0) in rules.iter().enumerate() {
            let inner = inner0.renamed("~");
            let RuleBody::Term { lhs: ilhs, rhs: irhs } = &inner.body else {
                continue;
            };
            // term rule overlapping inside the outer left-hand side
            let (outer_lhs, outer_args): (Expr, Vec<Term>) = match &outer.body {
                RuleBody::Term { lhs, .. } => (Expr::Term(lhs.clone()), vec![lhs.clone()]),
                RuleBody::Prop { lhs: lhs @ Prop::Atom(_, args), .. } => (Expr::Prop(lhs.clone()), args.clone()),
                RuleBody::Prop { .. } => unreachable!("atomic lhs"),
            };
            for (ai, arg) in outer_args.iter().enumerate() {
                let mut positions = Vec::new();
                term_positions(arg, &mut Vec::new(), &mut positions);
                for p in positions {
                    let full: Position = match &outer.body {
                        RuleBody::Term { .. } => p.clone(),
                        RuleBody::Prop { .. } => std::iter::once(ai).chain(p.iter().copied()).collect(),
                    };
                    if i == j && full.is_empty() {
                        continue;
                    }
                    let sub = arg.subterm(&p).expect("position exists");
                    let mut sigma = BTreeMap::new();
                    if !unify(sub, ilhs, &mut sigma) {
                        continue;
                    }
                    let sigma = resolved_sigma(&sigma);
                    let peak = instantiate_expr(&outer_lhs, &sigma);
                    let left = instantiate_expr(&outer.rhs(), &sigma);
                    let right = replace_at(&peak, &full, Expr::Term(irhs.instantiate(&sigma, 0)))
                        .expect("position exists");
                    out.push(CriticalPair {
                        outer_rule: outer.name.clone(),
                        inner_rule: inner0.name.clone(),
                        position: full,
                        peak,
                        left,
                        right,
                        joinable: false,
                    });
                }
            }
        }
        // root overlaps between distinct proposition rules on the same predicate
        if let RuleBody::Prop { lhs: Prop::Atom(p1, a1), rhs: r1 } = &outer.body {
            for inner0 in rules.iter().skip(i + 1) {
                let inner = inner0.renamed("~");
                let RuleBody::Prop { lhs: Prop::Atom(p2, a2), rhs: r2 } = &inner.body else {
                    continue;
                };
                if p1 != p2 || a1.len() != a2.len() {
                    continue;
                }
                let mut sigma = BTreeMap::new();
                if !a1.iter().zip(a2).all(|(x, y)| unify(x, y, &mut sigma)) {
                    continue;
                }
                let sigma = resolved_sigma(&sigma);
                out.push(CriticalPair {
                    outer_rule: outer.name.clone(),
                    inner_rule: inner0.name.clone(),
                    position: Vec::new(),
                    peak: Expr::Prop(Prop::Atom(p1.clone(), a1.clone()).instantiate(&sigma)),
                    left: Expr::Prop(r1.instantiate(&sigma)),
                    right: Expr::Prop(r2.instantiate(&sigma)),
                    joinable: false,
                });
            }
        }
    }
    out
}

fn instantiate_expr(e: &Expr, sigma: &BTreeMap<Var, Term>) -> Expr {
    match e {
        Expr::Term(t) => Expr::Term(t.instantiate(sigma, 0)),
        Expr::Prop(p) => Expr::Prop(p.instantiate(sigma)),
    }
}

/// All overlaps between rules, each with a joinability verdict from a
/// bounded search of `depth` steps per side.
pub fn critical_pairs(rs: &RewriteSystem, depth: usize) -> Vec<CriticalPair> {
    overlaps(rs)
        .into_iter()
        .map(|mut cp| {
            cp.joinable = cp.left == cp.right || join_search(&cp.left, &cp.right, rs, depth).is_some();
            cp
        })
        .collect()
}
