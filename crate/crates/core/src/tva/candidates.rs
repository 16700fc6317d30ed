//! Reducibility candidates built from `⊤` by the connectives, with a
//! fuel-bounded membership test.

use std::fmt;

use serde::Serialize;

use super::TruthValueAlgebra;
use crate::proofs::Proof;
use crate::reduction::{reachable, strongly_normalizing, SnVerdict};
use crate::syntax::Prop;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Candidate {
    /// All strongly normalizing proofs.
    Top,
    /// Also all strongly normalizing proofs: no introduction constrains it.
    Bot,
    Imp(Box<Candidate>, Box<Candidate>),
    And(Box<Candidate>, Box<Candidate>),
    Or(Box<Candidate>, Box<Candidate>),
    Forall(Vec<Candidate>),
    Exists(Vec<Candidate>),
}

impl Candidate {
    pub fn imp(a: Candidate, b: Candidate) -> Candidate {
        Candidate::Imp(Box::new(a), Box::new(b))
    }

    pub fn and(a: Candidate, b: Candidate) -> Candidate {
        Candidate::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Candidate, b: Candidate) -> Candidate {
        Candidate::Or(Box::new(a), Box::new(b))
    }
}

impl fmt::Display for Candidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, name: &str, cs: &[Candidate]| {
            write!(f, "{name}(")?;
            for (i, c) in cs.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, ")")
        };
        match self {
            Candidate::Top => write!(f, "Top"),
            Candidate::Bot => write!(f, "Bot"),
            Candidate::Imp(a, b) => write!(f, "Imp({a}, {b})"),
            Candidate::And(a, b) => write!(f, "And({a}, {b})"),
            Candidate::Or(a, b) => write!(f, "Or({a}, {b})"),
            Candidate::Forall(cs) => list(f, "Forall", cs),
            Candidate::Exists(cs) => list(f, "Exists", cs),
        }
    }
}

/// Proofs fed to the bodies of abstractions when testing implication
/// candidates. Only samples that are themselves members of the domain are
/// used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Samples {
    pub pool: Vec<Proof>,
}

impl Default for Samples {
    fn default() -> Self {
        Samples {
            pool: vec![
                Proof::hyp("z#"),
                Proof::Unit,
                Proof::lam("z", Prop::Top, Proof::hyp("z")),
                Proof::pair(Proof::Unit, Proof::Unit),
            ],
        }
    }
}

impl Samples {
    pub fn with(mut self, p: Proof) -> Self {
        self.pool.push(p);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Membership {
    Member,
    NonMember {
        reason: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        counterexample: Option<String>,
    },
    Unknown {
        reason: String,
    },
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member)
    }

    pub fn is_non_member(&self) -> bool {
        matches!(self, Membership::NonMember { .. })
    }
}

/// Tests `p ∈ c`. Strong normalization is probed with `fuel`; implication
/// candidates are tested against the members of the domain found in
/// `samples`, so `Member` is exact only relative to that pool.
pub fn candidate_member(c: &Candidate, p: &Proof, fuel: usize, samples: &Samples) -> Membership {
    match strongly_normalizing(p, fuel) {
        SnVerdict::SN { .. } => {}
        SnVerdict::NotSN { path } => {
            return Membership::NonMember {
                reason: format!("not strongly normalizing: reduction loops after {} steps", path.len() - 1),
                counterexample: None,
            }
        }
        SnVerdict::Unknown { explored } => {
            return Membership::Unknown {
                reason: format!("strong normalization undecided after {explored} proofs"),
            }
        }
    }
    let mut unknown: Option<String> = None;
    fn merge(unknown: &mut Option<String>, m: Membership, witness: Option<&Proof>) -> Option<Membership> {
        match m {
            Membership::Member => None,
            Membership::NonMember { reason, counterexample } => Some(Membership::NonMember {
                reason,
                counterexample: counterexample.or_else(|| witness.map(|w| w.to_string())),
            }),
            Membership::Unknown { reason } => {
                unknown.get_or_insert(reason);
                None
            }
        }
    }
    for r in reachable(p, fuel) {
        let verdict = match (c, r.strip()) {
            (Candidate::Imp(a, b), Proof::Lam(x, _, body)) => {
                let mut out = None;
                for s in &samples.pool {
                    if !candidate_member(a, s, fuel, samples).is_member() {
                        continue;
                    }
                    let applied = body.subst_hyp(x, s);
                    if let Some(bad) = merge(&mut unknown, candidate_member(b, &applied, fuel, samples), Some(s)) {
                        out = Some(bad);
                        break;
                    }
                }
                out
            }
            (Candidate::And(a, b), Proof::Pair(l, rr)) => merge(&mut unknown, candidate_member(a, l, fuel, samples), None)
                .or_else(|| merge(&mut unknown, candidate_member(b, rr, fuel, samples), None)),
            (Candidate::Or(a, _), Proof::Inl(e)) => merge(&mut unknown, candidate_member(a, e, fuel, samples), None),
            (Candidate::Or(_, b), Proof::Inr(e)) => merge(&mut unknown, candidate_member(b, e, fuel, samples), None),
            (Candidate::Forall(cs), Proof::Gen(_, body)) => cs
                .iter()
                .find_map(|c| merge(&mut unknown, candidate_member(c, body, fuel, samples), None)),
            (Candidate::Exists(cs), Proof::Pack(_, e)) => {
                let results: Vec<Membership> = cs.iter().map(|c| candidate_member(c, e, fuel, samples)).collect();
                if results.iter().any(Membership::is_member) {
                    None
                } else if let Some(Membership::Unknown { reason }) =
                    results.iter().find(|m| matches!(m, Membership::Unknown { .. }))
                {
                    unknown.get_or_insert(reason.clone());
                    None
                } else {
                    Some(Membership::NonMember {
                        reason: "packed proof lies in no member of the family".into(),
                        counterexample: None,
                    })
                }
            }
            _ => None,
        };
        if let Some(v) = verdict {
            return v;
        }
    }
    match unknown {
        Some(reason) => Membership::Unknown { reason },
        None => Membership::Member,
    }
}

/// The algebra of candidates. Every candidate is positive.
#[derive(Debug, Clone, Copy, Default)]
pub struct CandidateAlgebra;

impl TruthValueAlgebra for CandidateAlgebra {
    type Value = Candidate;

    fn name(&self) -> String {
        "candidates".into()
    }
    fn top(&self) -> Candidate {
        Candidate::Top
    }
    fn bot(&self) -> Candidate {
        Candidate::Bot
    }
    fn imp(&self, a: &Candidate, b: &Candidate) -> Candidate {
        Candidate::imp(a.clone(), b.clone())
    }
    fn and(&self, a: &Candidate, b: &Candidate) -> Candidate {
        Candidate::and(a.clone(), b.clone())
    }
    fn or(&self, a: &Candidate, b: &Candidate) -> Candidate {
        Candidate::or(a.clone(), b.clone())
    }
    fn forall(&self, family: &[Candidate]) -> Candidate {
        Candidate::Forall(family.to_vec())
    }
    fn exists(&self, family: &[Candidate]) -> Candidate {
        Candidate::Exists(family.to_vec())
    }
    fn is_positive(&self, _: &Candidate) -> bool {
        true
    }
    fn show(&self, a: &Candidate) -> String {
        a.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn omega() -> Proof {
        Proof::lam("x", Prop::sym("P"), Proof::app(Proof::hyp("x"), Proof::hyp("x")))
    }

    #[test]
    fn omega_separates_top_from_top_imp_top() {
        let samples = Samples::default().with(omega());
        let top = candidate_member(&Candidate::Top, &omega(), 100, &samples);
        assert!(top.is_member());
        let tt = Candidate::imp(Candidate::Top, Candidate::Top);
        match candidate_member(&tt, &omega(), 100, &samples) {
            Membership::NonMember { counterexample, .. } => {
                assert_eq!(counterexample.as_deref(), Some(omega().to_string().as_str()))
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn identity_is_in_every_arrow_over_top() {
        let id = Proof::lam("x", Prop::Top, Proof::hyp("x"));
        let c = Candidate::imp(Candidate::Top, Candidate::Top);
        assert!(candidate_member(&c, &id, 100, &Samples::default()).is_member());
    }

    #[test]
    fn looping_proof_is_in_nothing() {
        let w = Proof::app(omega(), omega());
        assert!(candidate_member(&Candidate::Top, &w, 100, &Samples::default()).is_non_member());
    }

    #[test]
    fn pair_components_are_checked() {
        let samples = Samples::default().with(omega());
        let c = Candidate::and(Candidate::Top, Candidate::imp(Candidate::Top, Candidate::Top));
        let good = Proof::pair(Proof::Unit, Proof::lam("y", Prop::Top, Proof::hyp("y")));
        let bad = Proof::pair(Proof::Unit, omega());
        assert!(candidate_member(&c, &good, 100, &samples).is_member());
        assert!(candidate_member(&c, &bad, 100, &samples).is_non_member());
    }
}
