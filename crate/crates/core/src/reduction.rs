//! Cuts, proof reduction, normalization with cycle detection, strong
//! normalization probing and extraction of constructive content.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::proofs::{ElimArg, Proof, RuleSystem, SuperBinder};
use crate::rewriting::{match_prop, whnf, RuleBody};
use crate::syntax::{fresh_name, Prop, Term};

pub type ProofPosition = Vec<usize>;

/// True iff the root is an elimination whose principal premise is the
/// matching introduction. Ascriptions on the principal premise are ignored.
pub fn is_cut(p: &Proof) -> bool {
    use Proof::*;
    match p {
        App(f, _) => matches!(f.strip(), Lam(..)),
        Fst(e) | Snd(e) => matches!(e.strip(), Pair(..)),
        Case(s, ..) => matches!(s.strip(), Inl(_) | Inr(_)),
        Inst(e, _) => matches!(e.strip(), Gen(..)),
        Unpack(e, ..) => matches!(e.strip(), Pack(..)),
        Unfold(r, e) => matches!(e.strip(), Fold(r2, _) if r2 == r),
        SuperElim(r, i, e, args) => match e.strip() {
            SuperIntro(r2, bs) if r2 == r => bs.get(*i).is_some_and(|b| binders_fit(&b.binders, args)),
            _ => false,
        },
        _ => false,
    }
}

fn binders_fit(binders: &[SuperBinder], args: &[ElimArg]) -> bool {
    binders.len() == args.len()
        && binders.iter().zip(args).all(|(b, a)| {
            matches!(
                (b, a),
                (SuperBinder::Hyp(_), ElimArg::Proof(_)) | (SuperBinder::Term(_), ElimArg::Term(_))
            )
        })
}

fn principal(p: &Proof) -> Option<&Proof> {
    use Proof::*;
    match p {
        App(e, _) | Fst(e) | Snd(e) | Case(e, ..) | Inst(e, _) | Unpack(e, ..) | Absurd(e, _) | Unfold(_, e) => Some(e),
        SuperElim(_, _, e, _) => Some(e),
        _ => None,
    }
}

/// An elimination applied to a disjunction or existential elimination,
/// which a commuting conversion pushes into the branches.
pub fn is_commuting_redex(p: &Proof) -> bool {
    principal(p).is_some_and(|e| matches!(e.strip(), Proof::Case(..) | Proof::Unpack(..)))
}

pub fn is_redex(p: &Proof) -> bool {
    is_cut(p) || is_commuting_redex(p)
}

/// Cut-free: no cut and no commuting redex anywhere.
pub fn is_normal(p: &Proof) -> bool {
    !is_redex(p) && p.children().into_iter().all(is_normal)
}

fn replace_principal(frame: &Proof, with: Proof) -> Proof {
    let mut kids: Vec<Proof> = frame.children().into_iter().cloned().collect();
    kids[0] = with;
    frame.with_children(kids)
}

/// Contracts the redex at the root, returning the rule name and result.
fn contract(p: &Proof) -> Option<(&'static str, Proof)> {
    use Proof::*;
    if is_cut(p) {
        let out = match p {
            App(f, a) => {
                let Lam(x, _, b) = f.strip() else { unreachable!() };
                ("beta", b.subst_hyp(x, a))
            }
            Fst(e) | Snd(e) => {
                let Pair(a, b) = e.strip() else { unreachable!() };
                if matches!(p, Fst(_)) {
                    ("fst", (**a).clone())
                } else {
                    ("snd", (**b).clone())
                }
            }
            Case(s, x, l, y, r) => match s.strip() {
                Inl(a) => ("case-inl", l.subst_hyp(x, a)),
                Inr(b) => ("case-inr", r.subst_hyp(y, b)),
                _ => unreachable!(),
            },
            Inst(e, t) => {
                let Gen(x, b) = e.strip() else { unreachable!() };
                ("inst-gen", b.subst_term(x, t))
            }
            Unpack(e, x, h, b) => {
                let Pack(t, q) = e.strip() else { unreachable!() };
                let hyps = BTreeMap::from([(h.clone(), (**q).clone())]);
                let terms = BTreeMap::from([(x.clone(), t.clone())]);
                ("unpack-pack", b.subst(hyps, terms))
            }
            Unfold(_, e) => {
                let Fold(_, q) = e.strip() else { unreachable!() };
                ("unfold-fold", (**q).clone())
            }
            SuperElim(_, i, e, args) => {
                let SuperIntro(_, bs) = e.strip() else { unreachable!() };
                let branch = &bs[*i];
                let mut hyps = BTreeMap::new();
                let mut terms = BTreeMap::new();
                for (b, a) in branch.binders.iter().zip(args) {
                    match (b, a) {
                        (SuperBinder::Hyp(h), ElimArg::Proof(q)) => {
                            hyps.insert(h.clone(), q.clone());
                        }
                        (SuperBinder::Term(x), ElimArg::Term(t)) => {
                            terms.insert(x.clone(), t.clone());
                        }
                        _ => unreachable!("checked by binders_fit"),
                    }
                }
                ("super", branch.body.subst(hyps, terms))
            }
            _ => unreachable!(),
        };
        return Some(out);
    }
    let inner = principal(p)?.strip();
    // the frame with a placeholder principal, to compute what it mentions
    let frame = replace_principal(p, Unit);
    let frame_hyps = frame.free_hyps();
    let frame_vars = frame.free_term_vars();
    match inner {
        Case(s, x, l, y, r) => {
            let (x, l) = avoid_hyp(x, l, &frame_hyps);
            let (y, r) = avoid_hyp(y, r, &frame_hyps);
            let commuted = Proof::Case(
                s.clone(),
                x,
                Box::new(replace_principal(p, l)),
                y,
                Box::new(replace_principal(p, r)),
            );
            Some(("commute-case", commuted))
        }
        Unpack(e, x, h, b) => {
            let (h, b) = avoid_hyp(h, b, &frame_hyps);
            let (x, b) = if frame_vars.contains(x) {
                let mut taken: std::collections::BTreeSet<String> =
                    frame_vars.iter().map(|v| v.name.clone()).collect();
                taken.extend(b.free_term_vars().into_iter().map(|v| v.name));
                let y = crate::syntax::Var::new(fresh_name(&x.name, &taken), x.sort.clone());
                let b = b.subst_term(x, &Term::Var(y.clone()));
                (y, b)
            } else {
                (x.clone(), b)
            };
            Some((
                "commute-unpack",
                Proof::Unpack(e.clone(), x, h, Box::new(replace_principal(p, b))),
            ))
        }
        _ => None,
    }
}

fn avoid_hyp(x: &str, body: &Proof, avoid: &std::collections::BTreeSet<String>) -> (String, Proof) {
    if !avoid.contains(x) {
        return (x.to_string(), body.clone());
    }
    let mut taken = avoid.clone();
    taken.extend(body.free_hyps());
    let y = fresh_name(x, &taken);
    let renamed = body.subst_hyp(x, &Proof::Hyp(y.clone()));
    (y, renamed)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionStep {
    pub position: ProofPosition,
    pub rule: &'static str,
    pub result: Proof,
}

fn redex_positions(p: &Proof, pos: &mut ProofPosition, out: &mut Vec<ProofPosition>, limit: usize) {
    if out.len() >= limit {
        return;
    }
    if is_redex(p) {
        out.push(pos.clone());
    }
    for (i, c) in p.children().into_iter().enumerate() {
        pos.push(i);
        redex_positions(c, pos, out, limit);
        pos.pop();
    }
}

fn step_at(p: &Proof, pos: ProofPosition) -> ReductionStep {
    let sub = p.subproof(&pos).expect("redex position");
    let (rule, contracted) = contract(sub).expect("redex contracts");
    let result = p.replace_at(&pos, contracted).expect("redex position");
    ReductionStep {
        position: pos,
        rule,
        result,
    }
}

/// Contracts the leftmost-outermost redex.
pub fn reduce_step(p: &Proof) -> Option<ReductionStep> {
    let mut out = Vec::new();
    redex_positions(p, &mut Vec::new(), &mut out, 1);
    out.pop().map(|pos| step_at(p, pos))
}

/// Every one-step reduct, in leftmost-outermost order of the redexes.
pub fn all_reducts(p: &Proof) -> Vec<ReductionStep> {
    let mut out = Vec::new();
    redex_positions(p, &mut Vec::new(), &mut out, usize::MAX);
    out.into_iter().map(|pos| step_at(p, pos)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Normal,
    /// The proof after step `step` is alpha-equal to the one after step
    /// `repeats` (0 is the initial proof).
    Cycle { step: usize, repeats: usize },
    FuelExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionTrace {
    pub initial: Proof,
    pub steps: Vec<ReductionStep>,
    pub outcome: Outcome,
}

impl ReductionTrace {
    pub fn last(&self) -> &Proof {
        self.steps.last().map_or(&self.initial, |s| &s.result)
    }

    /// The initial proof followed by every intermediate result.
    pub fn proofs(&self) -> impl Iterator<Item = &Proof> {
        std::iter::once(&self.initial).chain(self.steps.iter().map(|s| &s.result))
    }
}

pub fn normalize_proof(p: &Proof, fuel: usize) -> ReductionTrace {
    let mut visited: HashMap<Proof, usize> = HashMap::from([(p.canonical(), 0)]);
    let mut steps: Vec<ReductionStep> = Vec::new();
    let mut cur = p.clone();
    let outcome = loop {
        if steps.len() >= fuel {
            break if reduce_step(&cur).is_none() {
                Outcome::Normal
            } else {
                Outcome::FuelExhausted
            };
        }
        let Some(step) = reduce_step(&cur) else {
            break Outcome::Normal;
        };
        cur = step.result.clone();
        steps.push(step);
        let key = cur.canonical();
        if let Some(&first) = visited.get(&key) {
            break Outcome::Cycle {
                step: steps.len(),
                repeats: first,
            };
        }
        visited.insert(key, steps.len());
    };
    ReductionTrace {
        initial: p.clone(),
        steps,
        outcome,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SnVerdict {
    /// Every reduction sequence terminates; `explored` distinct proofs.
    SN { explored: usize },
    /// A reduction sequence from the input whose last proof is alpha-equal
    /// to an earlier one.
    NotSN { path: Vec<Proof> },
    Unknown { explored: usize },
}

impl SnVerdict {
    pub fn is_sn(&self) -> bool {
        matches!(self, SnVerdict::SN { .. })
    }
}

/// Explores the whole reduction graph of `p`, visiting at most `fuel`
/// distinct proofs (up to alpha-equivalence).
pub fn strongly_normalizing(p: &Proof, fuel: usize) -> SnVerdict {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }
    let mut marks: HashMap<Proof, Mark> = HashMap::new();
    // each frame: the proof, its canonical key, remaining successors
    let mut stack: Vec<(Proof, Proof, Vec<Proof>)> = Vec::new();
    let root = p.canonical();
    marks.insert(root.clone(), Mark::Open);
    let succ = |q: &Proof| -> Vec<Proof> { all_reducts(q).into_iter().rev().map(|s| s.result).collect() };
    stack.push((p.clone(), root, succ(p)));
    while let Some(top) = stack.last_mut() {
        let Some(next) = top.2.pop() else {
            let (_, key, _) = stack.pop().expect("non-empty");
            marks.insert(key, Mark::Done);
            continue;
        };
        let key = next.canonical();
        match marks.get(&key) {
            Some(Mark::Done) => continue,
            Some(Mark::Open) => {
                let mut path: Vec<Proof> = stack.iter().map(|f| f.0.clone()).collect();
                path.push(next);
                return SnVerdict::NotSN { path };
            }
            None => {
                if marks.len() >= fuel {
                    return SnVerdict::Unknown { explored: marks.len() };
                }
                marks.insert(key.clone(), Mark::Open);
                let s = succ(&next);
                stack.push((next, key, s));
            }
        }
    }
    SnVerdict::SN { explored: marks.len() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Content {
    DisjunctChoice { side: Side, subproof: Proof, proves: Prop },
    Witness { term: Term, subproof: Proof, proves: Prop },
    NotApplicable,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtractError {
    #[error("proof has free hypotheses")]
    NotClosed,
    #[error("proof is not cut-free")]
    NotNormal,
    #[error("head of the proposition not exposed within the budget")]
    Budget,
    #[error("invariant violation: closed cut-free proof `{proof}` of `{goal}` does not end with an introduction")]
    InvariantViolation { proof: String, goal: String },
}

/// Reads the chosen disjunct or the existential witness off a closed
/// cut-free proof of `goal`.
pub fn extract_constructive_content(
    p: &Proof,
    goal: &Prop,
    sys: &RuleSystem,
    depth: usize,
) -> Result<Content, ExtractError> {
    if !p.free_hyps().is_empty() {
        return Err(ExtractError::NotClosed);
    }
    if !is_normal(p) {
        return Err(ExtractError::NotNormal);
    }
    let mut p = p.strip().clone();
    let mut goal = goal.clone();
    loop {
        let (head, _) = whnf(&goal, sys.congruence(), depth).map_err(|_| ExtractError::Budget)?;
        // fold nodes wrap the introduction of the unfolded proposition
        if let Proof::Fold(r, inner) = &p {
            if let Some(RuleBody::Prop { lhs, rhs }) = sys.theory.rule(r).map(|r| &r.body) {
                let mut sigma = BTreeMap::new();
                if match_prop(lhs, &head, 0, &mut sigma) {
                    goal = rhs.instantiate(&sigma);
                    p = inner.strip().clone();
                    continue;
                }
            }
        }
        let violation = || ExtractError::InvariantViolation {
            proof: p.to_string(),
            goal: head.to_string(),
        };
        return match &head {
            Prop::Or(a, b) => match &p {
                Proof::Inl(e) => Ok(Content::DisjunctChoice {
                    side: Side::Left,
                    subproof: (**e).clone(),
                    proves: (**a).clone(),
                }),
                Proof::Inr(e) => Ok(Content::DisjunctChoice {
                    side: Side::Right,
                    subproof: (**e).clone(),
                    proves: (**b).clone(),
                }),
                _ => Err(violation()),
            },
            Prop::Exists(_, body) => match &p {
                Proof::Pack(t, e) => Ok(Content::Witness {
                    term: t.clone(),
                    subproof: (**e).clone(),
                    proves: body.open(t),
                }),
                _ => Err(violation()),
            },
            _ => Ok(Content::NotApplicable),
        };
    }
}

/// Distinct proofs reachable by reduction, used by the subject reduction
/// harness. Stops after `limit` proofs.
pub fn reachable(p: &Proof, limit: usize) -> Vec<Proof> {
    let mut seen = HashSet::from([p.canonical()]);
    let mut out = vec![p.clone()];
    let mut i = 0;
    while i < out.len() && out.len() < limit {
        for s in all_reducts(&out[i]) {
            if out.len() >= limit {
                break;
            }
            if seen.insert(s.result.canonical()) {
                out.push(s.result);
            }
        }
        i += 1;
    }
    out
}
