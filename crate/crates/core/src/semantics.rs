//! Algebra-valued models of rewrite theories: denotation, rule validity,
//! exhaustive model search, super-consistency reports, the successor-style
//! pre-model construction over truncated naturals, soundness and Tait checks.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::proofs::{typecheck, Derivation, Proof, RuleSystem};
use crate::reduction::{strongly_normalizing, SnVerdict};
use crate::rewriting::{congruent, Congruence, RewriteRule, RewriteSystem, RuleBody};
use crate::syntax::{Context, Decl, Prop, Sequent, Signature, Sort, Term, Var};
use crate::tva::{candidate_member, Candidate, CandidateAlgebra, FiniteAlgebra, Membership, Samples, TruthValueAlgebra};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    /// `{0, .., size-1}`
    Finite { size: usize },
    /// `{0, .., bound}`, a truncation of the naturals.
    Nat { bound: usize },
}

impl Domain {
    pub fn elements(&self) -> std::ops::Range<usize> {
        match *self {
            Domain::Finite { size } => 0..size,
            Domain::Nat { bound } => 0..bound + 1,
        }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.elements().contains(&v)
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Finite { size } => write!(f, "{{0..{}}}", size.saturating_sub(1)),
            Domain::Nat { bound } => write!(f, "N<={bound}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FunInterp {
    Table(BTreeMap<Vec<usize>, usize>),
    Successor,
    Const(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model<A: TruthValueAlgebra> {
    pub algebra: A,
    pub domains: BTreeMap<Sort, Domain>,
    pub functions: BTreeMap<String, FunInterp>,
    /// Total on the tuples of the declared domains.
    pub predicates: BTreeMap<String, BTreeMap<Vec<usize>, A::Value>>,
}

pub type Valuation = BTreeMap<Var, usize>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DenoteError {
    #[error("`{function}` applied to {args:?} leaves the truncated domain")]
    Overflow { function: String, args: Vec<usize> },
    #[error("variable `{0}` has no value")]
    Unbound(String),
    #[error("`{0}` has no interpretation")]
    Missing(String),
    #[error("no domain for sort `{0}`")]
    NoDomain(String),
}

fn tuples(domains: &[Domain]) -> Vec<Vec<usize>> {
    domains.iter().fold(vec![vec![]], |acc, d| {
        acc.iter()
            .flat_map(|t| {
                d.elements().map(move |v| {
                    let mut t = t.clone();
                    t.push(v);
                    t
                })
            })
            .collect()
    })
}

impl<A: TruthValueAlgebra> Model<A> {
    fn domain(&self, s: &Sort) -> Result<Domain, DenoteError> {
        self.domains.get(s).copied().ok_or_else(|| DenoteError::NoDomain(s.0.clone()))
    }

    pub fn denote_term(&self, t: &Term, phi: &Valuation) -> Result<usize, DenoteError> {
        self.term_in(t, phi, &[])
    }

    fn term_in(&self, t: &Term, phi: &Valuation, env: &[usize]) -> Result<usize, DenoteError> {
        match t {
            Term::Var(x) => phi.get(x).copied().ok_or_else(|| DenoteError::Unbound(x.name.clone())),
            Term::Bound(i) => env
                .len()
                .checked_sub(i + 1)
                .map(|k| env[k])
                .ok_or_else(|| DenoteError::Unbound(format!("#{i}"))),
            Term::App(f, args) => {
                let vals = args.iter().map(|a| self.term_in(a, phi, env)).collect::<Result<Vec<_>, _>>()?;
                let interp = self.functions.get(f).ok_or_else(|| DenoteError::Missing(f.clone()))?;
                let overflow = || DenoteError::Overflow {
                    function: f.clone(),
                    args: vals.clone(),
                };
                match interp {
                    FunInterp::Table(t) => t.get(&vals).copied().ok_or_else(overflow),
                    FunInterp::Const(c) => Ok(*c),
                    FunInterp::Successor => {
                        let n = vals.first().copied().ok_or_else(overflow)? + 1;
                        // the result sort is the argument sort for a successor
                        let fits = self.domains.values().any(|d| matches!(d, Domain::Nat { bound } if n <= *bound));
                        if fits {
                            Ok(n)
                        } else {
                            Err(overflow())
                        }
                    }
                }
            }
        }
    }

    /// `⟦p⟧_φ`. Quantifiers range over the domain of the bound sort.
    pub fn denote(&self, p: &Prop, phi: &Valuation) -> Result<A::Value, DenoteError> {
        self.prop_in(p, phi, &mut Vec::new())
    }

    fn prop_in(&self, p: &Prop, phi: &Valuation, env: &mut Vec<usize>) -> Result<A::Value, DenoteError> {
        let alg = &self.algebra;
        Ok(match p {
            Prop::Atom(name, args) => {
                let vals = args.iter().map(|a| self.term_in(a, phi, env)).collect::<Result<Vec<_>, _>>()?;
                self.predicates
                    .get(name)
                    .and_then(|t| t.get(&vals))
                    .cloned()
                    .ok_or_else(|| DenoteError::Missing(name.clone()))?
            }
            Prop::Top => alg.top(),
            Prop::Bot => alg.bot(),
            Prop::And(a, b) => alg.and(&self.prop_in(a, phi, env)?, &self.prop_in(b, phi, env)?),
            Prop::Or(a, b) => alg.or(&self.prop_in(a, phi, env)?, &self.prop_in(b, phi, env)?),
            Prop::Imp(a, b) => alg.imp(&self.prop_in(a, phi, env)?, &self.prop_in(b, phi, env)?),
            Prop::Forall(bd, body) | Prop::Exists(bd, body) => {
                let mut family = Vec::new();
                for v in self.domain(&bd.sort)?.elements() {
                    env.push(v);
                    let r = self.prop_in(body, phi, env);
                    env.pop();
                    family.push(r?);
                }
                if matches!(p, Prop::Forall(..)) {
                    alg.forall(&family)
                } else {
                    alg.exists(&family)
                }
            }
        })
    }

    /// Every valuation of `vars` into the domains of their sorts.
    pub fn valuations(&self, vars: &[Var]) -> Result<Vec<Valuation>, DenoteError> {
        let doms = vars.iter().map(|v| self.domain(&v.sort)).collect::<Result<Vec<_>, _>>()?;
        Ok(tuples(&doms)
            .into_iter()
            .map(|t| vars.iter().cloned().zip(t).collect())
            .collect())
    }
}

impl<A: TruthValueAlgebra> fmt::Display for Model<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "algebra {}", self.algebra.name())?;
        for (s, d) in &self.domains {
            writeln!(f, "domain {s} = {d}")?;
        }
        for (name, interp) in &self.functions {
            match interp {
                FunInterp::Successor => writeln!(f, "{name} = successor")?,
                FunInterp::Const(c) => writeln!(f, "{name} = {c}")?,
                FunInterp::Table(t) => {
                    for (args, v) in t {
                        writeln!(f, "{name}{} = {v}", show_args(args))?;
                    }
                }
            }
        }
        for (name, table) in &self.predicates {
            for (args, v) in table {
                writeln!(f, "{name}{} = {}", show_args(args), self.algebra.show(v))?;
            }
        }
        Ok(())
    }
}

fn show_args(args: &[usize]) -> String {
    if args.is_empty() {
        String::new()
    } else {
        format!("({})", args.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum RuleVerdict {
    Valid,
    Invalid {
        valuation: BTreeMap<String, usize>,
        lhs: String,
        rhs: String,
    },
    Inconclusive {
        valuation: BTreeMap<String, usize>,
        reason: String,
    },
}

impl RuleVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, RuleVerdict::Valid)
    }
}

fn show_valuation(phi: &Valuation) -> BTreeMap<String, usize> {
    phi.iter().map(|(k, v)| (k.name.clone(), *v)).collect()
}

/// Both sides of `rule` denote the same element under every valuation in
/// `valuations`. Overflowing valuations make the verdict inconclusive unless
/// another valuation refutes the rule.
pub fn rule_valid<A: TruthValueAlgebra>(rule: &RewriteRule, m: &Model<A>, valuations: &[Valuation]) -> RuleVerdict {
    let mut inconclusive = None;
    for phi in valuations {
        let sides = match &rule.body {
            RuleBody::Prop { lhs, rhs } => m.denote(lhs, phi).and_then(|l| {
                m.denote(rhs, phi)
                    .map(|r| (l != r).then(|| (m.algebra.show(&l), m.algebra.show(&r))))
            }),
            RuleBody::Term { lhs, rhs } => m.denote_term(lhs, phi).and_then(|l| {
                m.denote_term(rhs, phi)
                    .map(|r| (l != r).then(|| (l.to_string(), r.to_string())))
            }),
        };
        match sides {
            Ok(None) => {}
            Ok(Some((lhs, rhs))) => {
                return RuleVerdict::Invalid {
                    valuation: show_valuation(phi),
                    lhs,
                    rhs,
                }
            }
            Err(e) => {
                inconclusive.get_or_insert(RuleVerdict::Inconclusive {
                    valuation: show_valuation(phi),
                    reason: e.to_string(),
                });
            }
        }
    }
    inconclusive.unwrap_or(RuleVerdict::Valid)
}

/// Checks a rule against every valuation of its variables.
pub fn rule_valid_everywhere<A: TruthValueAlgebra>(rule: &RewriteRule, m: &Model<A>) -> RuleVerdict {
    let vars: Vec<Var> = rule.variables().into_iter().collect();
    match m.valuations(&vars) {
        Ok(vals) => rule_valid(rule, m, &vals),
        Err(e) => RuleVerdict::Inconclusive {
            valuation: BTreeMap::new(),
            reason: e.to_string(),
        },
    }
}

/// Carrier elements in search order: `⊤` first, then the rest in declared
/// order.
fn search_order<A: FiniteAlgebra>(alg: &A) -> Vec<A::Value> {
    let top = alg.top();
    let mut out = vec![top.clone()];
    out.extend(alg.elements().into_iter().filter(|v| *v != top));
    out
}

fn declared_predicates(sig: &Signature) -> Vec<String> {
    let mut out: Vec<String> = sig
        .order
        .iter()
        .filter_map(|d| match d {
            Decl::Predicate(p) => Some(p.clone()),
            _ => None,
        })
        .collect();
    out.extend(sig.predicates.keys().filter(|p| !out.contains(p)).cloned().collect::<Vec<_>>());
    out
}

fn declared_functions(sig: &Signature) -> Vec<String> {
    let mut out: Vec<String> = sig
        .order
        .iter()
        .filter_map(|d| match d {
            Decl::Function(p) => Some(p.clone()),
            _ => None,
        })
        .collect();
    out.extend(sig.functions.keys().filter(|p| !out.contains(p)).cloned().collect::<Vec<_>>());
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSearch<A: TruthValueAlgebra> {
    Found { model: Model<A>, tried: u64 },
    NoModel { tried: u64 },
    Budget { tried: u64 },
}

/// First model in canonical order: predicate entries before function entries,
/// earlier declarations more significant, values from `search_order`.
pub fn find_model<A: FiniteAlgebra + Clone>(theory: &RewriteSystem, alg: &A, domain_size: usize) -> Option<Model<A>> {
    match search_models(theory, alg, domain_size, u64::MAX) {
        ModelSearch::Found { model, .. } => Some(model),
        _ => None,
    }
}

pub fn search_models<A: FiniteAlgebra + Clone>(
    theory: &RewriteSystem,
    alg: &A,
    domain_size: usize,
    limit: u64,
) -> ModelSearch<A> {
    let sig = &theory.signature;
    let domains: BTreeMap<Sort, Domain> = sig
        .sorts
        .iter()
        .map(|s| (s.clone(), Domain::Finite { size: domain_size }))
        .collect();
    let dom = Domain::Finite { size: domain_size };
    let values = search_order(alg);
    // slots: (is_predicate, symbol, argument tuple)
    let mut slots: Vec<(bool, String, Vec<usize>)> = Vec::new();
    for p in declared_predicates(sig) {
        for t in tuples(&vec![dom; sig.predicates[&p].len()]) {
            slots.push((true, p.clone(), t));
        }
    }
    for f in declared_functions(sig) {
        for t in tuples(&vec![dom; sig.functions[&f].0.len()]) {
            slots.push((false, f.clone(), t));
        }
    }
    let radix: Vec<usize> = slots.iter().map(|s| if s.0 { values.len() } else { domain_size }).collect();
    if radix.contains(&0) {
        return ModelSearch::NoModel { tried: 0 };
    }
    let rules: Vec<(&RewriteRule, Vec<Valuation>)> = {
        let probe = Model {
            algebra: alg.clone(),
            domains: domains.clone(),
            functions: BTreeMap::new(),
            predicates: BTreeMap::new(),
        };
        theory
            .rules()
            .iter()
            .map(|r| {
                let vars: Vec<Var> = r.variables().into_iter().collect();
                (r, probe.valuations(&vars).unwrap_or_default())
            })
            .collect()
    };
    let mut digits = vec![0usize; slots.len()];
    let mut tried = 0u64;
    loop {
        if tried >= limit {
            return ModelSearch::Budget { tried };
        }
        tried += 1;
        let mut model = Model {
            algebra: alg.clone(),
            domains: domains.clone(),
            functions: BTreeMap::new(),
            predicates: BTreeMap::new(),
        };
        for p in sig.predicates.keys() {
            model.predicates.insert(p.clone(), BTreeMap::new());
        }
        for ((is_pred, name, args), &d) in slots.iter().zip(&digits) {
            if *is_pred {
                model
                    .predicates
                    .get_mut(name)
                    .expect("declared")
                    .insert(args.clone(), values[d].clone());
            } else {
                let entry = model
                    .functions
                    .entry(name.clone())
                    .or_insert_with(|| FunInterp::Table(BTreeMap::new()));
                if let FunInterp::Table(t) = entry {
                    t.insert(args.clone(), d);
                }
            }
        }
        if rules.iter().all(|(r, vals)| rule_valid(r, &model, vals).is_valid()) {
            return ModelSearch::Found { model, tried };
        }
        // least significant digit last
        let mut i = digits.len();
        loop {
            if i == 0 {
                return ModelSearch::NoModel { tried };
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < radix[i] {
                break;
            }
            digits[i] = 0;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlgebraOutcome {
    pub algebra: String,
    pub model_found: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<BTreeMap<String, String>>,
    pub assignments_tried: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NotSnEvidence {
    pub rule: String,
    pub proof: String,
    pub proves: String,
    pub cycle_length: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuperConsistencyReport {
    pub domain_size: usize,
    pub outcomes: Vec<AlgebraOutcome>,
    /// Models in finite algebras are necessary-condition checks only.
    pub note: &'static str,
    pub not_sn_evidence: Vec<NotSnEvidence>,
}

impl SuperConsistencyReport {
    pub fn models_found(&self) -> usize {
        self.outcomes.iter().filter(|o| o.model_found).count()
    }
}

/// Flattened `symbol(args) = value` listing of a model.
pub fn model_entries<A: TruthValueAlgebra>(m: &Model<A>) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for (name, table) in &m.predicates {
        for (args, v) in table {
            out.insert(format!("{name}{}", show_args(args)), m.algebra.show(v));
        }
    }
    for (name, interp) in &m.functions {
        match interp {
            FunInterp::Table(t) => {
                for (args, v) in t {
                    out.insert(format!("{name}{}", show_args(args)), v.to_string());
                }
            }
            FunInterp::Successor => {
                out.insert(name.clone(), "successor".into());
            }
            FunInterp::Const(c) => {
                out.insert(name.clone(), c.to_string());
            }
        }
    }
    out
}

/// Looks for self-application loops: a rule `L --> A => B` with `A`
/// congruent to the ground atom `L` admits `ω = fun x : L . x x` and the
/// proof `ω ω` of `B`.
pub fn not_sn_evidence(theory: &RewriteSystem, depth: usize, fuel: usize) -> Vec<NotSnEvidence> {
    let sys = RuleSystem::modulo(theory.clone());
    let mut out = Vec::new();
    for rule in theory.prop_rules() {
        let RuleBody::Prop { lhs, rhs: Prop::Imp(a, b) } = &rule.body else {
            continue;
        };
        if !lhs.free_vars().is_empty() || !matches!(congruent(a, lhs, sys.congruence(), depth), Congruence::Yes(_)) {
            continue;
        }
        let omega = Proof::lam("x", lhs.clone(), Proof::app(Proof::hyp("x"), Proof::hyp("x")));
        let w = Proof::app(omega.clone(), omega);
        if typecheck(&w, &Context::new(), b, &sys, depth).is_err() {
            continue;
        }
        if let SnVerdict::NotSN { path } = strongly_normalizing(&w, fuel) {
            out.push(NotSnEvidence {
                rule: rule.name.clone(),
                proof: w.to_string(),
                proves: b.to_string(),
                cycle_length: path.len() - 1,
            });
        }
    }
    out
}

pub fn super_consistency_report<A: FiniteAlgebra + Clone>(
    theory: &RewriteSystem,
    battery: &[A],
    domain_size: usize,
    depth: usize,
    sn_fuel: usize,
) -> SuperConsistencyReport {
    let outcomes = battery
        .iter()
        .map(|alg| {
            let (model, tried) = match search_models(theory, alg, domain_size, u64::MAX) {
                ModelSearch::Found { model, tried } => (Some(model), tried),
                ModelSearch::NoModel { tried } | ModelSearch::Budget { tried } => (None, tried),
            };
            AlgebraOutcome {
                algebra: alg.name(),
                model_found: model.is_some(),
                model: model.as_ref().map(model_entries),
                assignments_tried: tried,
            }
        })
        .collect();
    SuperConsistencyReport {
        domain_size,
        outcomes,
        note: "models in finite algebras are necessary-condition checks only",
        not_sn_evidence: not_sn_evidence(theory, depth, sn_fuel),
    }
}

/// `(∧ Γ) ⇒ A` is positive under every valuation of the sequent's free
/// variables. Valuations whose denotation leaves a truncated domain are
/// skipped.
pub fn soundness_check<A: TruthValueAlgebra>(d: &Derivation, m: &Model<A>) -> bool {
    let seq = d.sequent();
    let vars: Vec<Var> = seq.free_vars().into_iter().collect();
    let Ok(vals) = m.valuations(&vars) else {
        return false;
    };
    let alg = &m.algebra;
    vals.iter().all(|phi| {
        let ctx = seq
            .context
            .props()
            .try_fold(alg.top(), |acc, p| m.denote(p, phi).map(|v| alg.and(&acc, &v)));
        match (ctx, m.denote(&seq.goal, phi)) {
            (Ok(c), Ok(g)) => alg.is_positive(&alg.imp(&c, &g)),
            (Err(DenoteError::Overflow { .. }), _) | (_, Err(DenoteError::Overflow { .. })) => true,
            _ => false,
        }
    })
}

/// Sequents of `d`, root first, whose judgement is not valid in `m`.
pub fn soundness_failures<A: TruthValueAlgebra>(d: &Derivation, m: &Model<A>) -> Vec<Sequent> {
    let mut out = Vec::new();
    let mut stack = vec![d];
    while let Some(n) = stack.pop() {
        if !soundness_check(n, m) {
            out.push(n.sequent());
        }
        stack.extend(n.premises.iter().rev());
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NatModelError {
    #[error("theory has no rule of the form P(f(x)) --> A")]
    NoSuccessorRule,
    #[error("function `{0}` cannot be interpreted over the naturals")]
    UnsupportedFunction(String),
    #[error("right-hand side is not computable by recursion: {0}")]
    NotRecursive(DenoteError),
}

/// The pre-model construction for a rule `P(f(x)) --> A[x]`: the sort of `x`
/// is the naturals truncated at `bound`, `f` is the successor, constants are
/// `0`, other predicates take the `overrides` value or `⊤`, and
/// `P` is `α` with `α(0) = alpha0` (default `⊤`) and `α(n+1) = ⟦A⟧_{x:=n}`.
pub fn nat_alpha_model<A: TruthValueAlgebra + Clone>(
    theory: &RewriteSystem,
    alg: &A,
    bound: usize,
    overrides: &BTreeMap<String, A::Value>,
    alpha0: Option<A::Value>,
) -> Result<Model<A>, NatModelError> {
    let sig = &theory.signature;
    let (p, f, x, rhs) = theory
        .prop_rules()
        .find_map(|r| match &r.body {
            RuleBody::Prop {
                lhs: Prop::Atom(p, args),
                rhs,
            } => match args.as_slice() {
                [Term::App(f, inner)] => match inner.as_slice() {
                    [Term::Var(x)] => Some((p.clone(), f.clone(), x.clone(), rhs.clone())),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        })
        .ok_or(NatModelError::NoSuccessorRule)?;
    let mut model = Model {
        algebra: alg.clone(),
        domains: sig
            .sorts
            .iter()
            .map(|s| {
                let d = if *s == x.sort { Domain::Nat { bound } } else { Domain::Finite { size: 1 } };
                (s.clone(), d)
            })
            .collect(),
        functions: BTreeMap::new(),
        predicates: BTreeMap::new(),
    };
    for (name, (args, _)) in &sig.functions {
        let interp = if *name == f {
            FunInterp::Successor
        } else if args.is_empty() {
            FunInterp::Const(0)
        } else {
            return Err(NatModelError::UnsupportedFunction(name.clone()));
        };
        model.functions.insert(name.clone(), interp);
    }
    for (name, args) in &sig.predicates {
        if *name == p {
            continue;
        }
        let v = overrides.get(name).cloned().unwrap_or_else(|| alg.top());
        let doms: Vec<Domain> = args.iter().map(|s| model.domains[s]).collect();
        model
            .predicates
            .insert(name.clone(), tuples(&doms).into_iter().map(|t| (t, v.clone())).collect());
    }
    let alpha0 = alpha0.unwrap_or_else(|| alg.top());
    model.predicates.insert(p.clone(), BTreeMap::from([(vec![0], alpha0)]));
    for n in 0..bound {
        let next = model
            .denote(&rhs, &BTreeMap::from([(x.clone(), n)]))
            .map_err(NatModelError::NotRecursive)?;
        model.predicates.get_mut(&p).expect("inserted").insert(vec![n + 1], next);
    }
    Ok(model)
}

/// Candidate-valued model used for Tait checks. Ground proposition rules are
/// unfolded `unroll` times starting from `⊤`; a successor rule uses
/// `nat_alpha_model`; everything else denotes `⊤`.
pub fn candidate_model(theory: &RewriteSystem, bound: usize, unroll: usize) -> Model<CandidateAlgebra> {
    if let Ok(m) = nat_alpha_model(theory, &CandidateAlgebra, bound, &BTreeMap::new(), None) {
        return m;
    }
    let sig = &theory.signature;
    let mut model = Model {
        algebra: CandidateAlgebra,
        domains: sig.sorts.iter().map(|s| (s.clone(), Domain::Finite { size: 1 })).collect(),
        functions: sig
            .functions
            .iter()
            .map(|(f, (args, _))| {
                let table = tuples(&vec![Domain::Finite { size: 1 }; args.len()])
                    .into_iter()
                    .map(|t| (t, 0))
                    .collect();
                (f.clone(), FunInterp::Table(table))
            })
            .collect(),
        predicates: BTreeMap::new(),
    };
    for (name, args) in &sig.predicates {
        let table = tuples(&vec![Domain::Finite { size: 1 }; args.len()])
            .into_iter()
            .map(|t| (t, Candidate::Top))
            .collect();
        model.predicates.insert(name.clone(), table);
    }
    for _ in 0..unroll {
        let mut next = model.predicates.clone();
        for rule in theory.prop_rules() {
            if let RuleBody::Prop {
                lhs: Prop::Atom(p, args),
                rhs,
            } = &rule.body
            {
                if args.is_empty() {
                    if let Ok(v) = model.denote(rhs, &BTreeMap::new()) {
                        next.insert(p.clone(), BTreeMap::from([(vec![], v)]));
                    }
                }
            }
        }
        if next == model.predicates {
            break;
        }
        model.predicates = next;
    }
    model
}

/// Membership of a closed proof in the candidate denotation of its goal.
pub fn tait_check(p: &Proof, goal: &Prop, theory: &RewriteSystem, fuel: usize, samples: &Samples) -> Membership {
    let m = candidate_model(theory, 8, theory.rules().len() + 1);
    match m.denote(goal, &BTreeMap::new()) {
        Ok(c) => candidate_member(&c, p, fuel, samples),
        Err(e) => Membership::Unknown { reason: e.to_string() },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tva::{bool2, bundled_battery, chain3};

    fn qr() -> RewriteSystem {
        let sig = Signature::with_props(&["P", "Q", "R"]);
        let r = RewriteRule::prop("r", Prop::sym("P"), Prop::imp(Prop::sym("Q"), Prop::sym("R")), &sig).unwrap();
        RewriteSystem::with_rules(sig, vec![r]).unwrap()
    }

    fn selfref() -> RewriteSystem {
        let sig = Signature::with_props(&["P", "R"]);
        let r = RewriteRule::prop("r", Prop::sym("P"), Prop::imp(Prop::sym("P"), Prop::sym("R")), &sig).unwrap();
        RewriteSystem::with_rules(sig, vec![r]).unwrap()
    }

    fn nat() -> RewriteSystem {
        let mut sig = Signature::new();
        let n = Sort::new("nat");
        sig.add_sort(n.clone()).unwrap();
        sig.add_function("f", vec![n.clone()], n.clone()).unwrap();
        sig.add_predicate("P", vec![n.clone()]).unwrap();
        sig.add_predicate("R", vec![]).unwrap();
        let x = Var::new("x", n);
        let lhs = Prop::atom("P", vec![Term::app("f", vec![Term::Var(x.clone())])]);
        let rhs = Prop::imp(Prop::atom("P", vec![Term::Var(x)]), Prop::sym("R"));
        let r = RewriteRule::prop("r", lhs, rhs, &sig).unwrap();
        RewriteSystem::with_rules(sig, vec![r]).unwrap()
    }

    #[test]
    fn qr_model_in_bool2() {
        let m = find_model(&qr(), &bool2(), 1).unwrap();
        for s in ["P", "Q", "R"] {
            assert_eq!(m.predicates[s][&vec![]], 1);
        }
    }

    #[test]
    fn invalid_rule_reports_sides() {
        let mut m = find_model(&qr(), &bool2(), 1).unwrap();
        m.predicates.get_mut("R").unwrap().insert(vec![], 0);
        let v = rule_valid(&qr().rules()[0], &m, &[BTreeMap::new()]);
        assert_eq!(
            v,
            RuleVerdict::Invalid {
                valuation: BTreeMap::new(),
                lhs: "1".into(),
                rhs: "0".into()
            }
        );
    }

    #[test]
    fn selfref_report_has_evidence() {
        let r = super_consistency_report(&selfref(), &bundled_battery(), 1, 8, 100);
        assert_eq!(r.models_found(), 4);
        assert_eq!(r.not_sn_evidence.len(), 1);
        assert!(not_sn_evidence(&qr(), 8, 100).is_empty());
    }

    #[test]
    fn alpha_recursion() {
        let alg = chain3();
        let half = 1;
        let overrides = BTreeMap::from([("R".to_string(), half)]);
        let m = nat_alpha_model(&nat(), &alg, 8, &overrides, None).unwrap();
        let alpha = &m.predicates["P"];
        assert_eq!(alpha[&vec![0]], alg.top);
        for n in 0..8 {
            assert_eq!(alpha[&vec![n + 1]], alg.imp(&alpha[&vec![n]], &half));
        }
        let theory = nat();
        let rule = &theory.rules()[0];
        let x = rule.variables().into_iter().next().unwrap();
        let vals: Vec<Valuation> = (0..8).map(|n| BTreeMap::from([(x.clone(), n)])).collect();
        assert!(rule_valid(rule, &m, &vals).is_valid());
        let over = BTreeMap::from([(x, 8)]);
        assert!(matches!(rule_valid(rule, &m, &[over]), RuleVerdict::Inconclusive { .. }));
    }

    #[test]
    fn denote_successor() {
        let m = nat_alpha_model(&nat(), &bool2(), 8, &BTreeMap::new(), None).unwrap();
        let x = Var::new("x", Sort::new("nat"));
        let t = Term::app("f", vec![Term::Var(x.clone())]);
        assert_eq!(m.denote_term(&t, &BTreeMap::from([(x, 3)])).unwrap(), 4);
    }

    #[test]
    fn tait_examples() {
        let id = Proof::lam("x", Prop::sym("Q"), Proof::hyp("x"));
        let empty = RewriteSystem::new(Signature::with_props(&["Q"]));
        let goal = Prop::imp(Prop::sym("Q"), Prop::sym("Q"));
        assert!(tait_check(&id, &goal, &empty, 100, &Samples::default()).is_member());
        let omega = Proof::lam("x", Prop::sym("P"), Proof::app(Proof::hyp("x"), Proof::hyp("x")));
        let w = Proof::app(omega.clone(), omega);
        assert!(tait_check(&w, &Prop::sym("R"), &selfref(), 100, &Samples::default()).is_non_member());
    }
}
