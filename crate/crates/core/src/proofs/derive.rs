//! Rule systems and the inference rules derived from proposition rules.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::frontend::printer::prop_string;
use crate::rewriting::{RewriteRule, RewriteSystem, RuleBody};
use crate::syntax::{fresh_name, Prop, Term, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DeriveError {
    #[error("rule `{0}` is a term rule; only proposition rules have derived rules")]
    TermRule(String),
    #[error("rule `{rule}`: right-hand side uses {connective}, which supernatural rules do not support")]
    Unsupported { rule: String, connective: &'static str },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SystemError {
    #[error(transparent)]
    Derive(#[from] DeriveError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SystemKind {
    Modulo,
    FoldUnfold,
    SuperNatural,
}

impl SystemKind {
    pub const ALL: [SystemKind; 3] = [SystemKind::Modulo, SystemKind::FoldUnfold, SystemKind::SuperNatural];

    pub fn keyword(self) -> &'static str {
        match self {
            SystemKind::Modulo => "modulo",
            SystemKind::FoldUnfold => "foldunfold",
            SystemKind::SuperNatural => "supernatural",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        SystemKind::ALL.into_iter().find(|k| k.keyword() == s)
    }
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// One absorbed introduction along a branch of a supernatural rule.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SuperStep {
    /// an implication premise, available as a hypothesis
    Hyp(Prop),
    /// a universally quantified variable, introduced as an eigenvariable
    Var(Var),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SuperBranchSchema {
    pub steps: Vec<SuperStep>,
    pub conclusion: Prop,
}

/// The structured form of a supernatural rule pair: `lhs` and one branch per
/// atomic conclusion reachable through ⇒, ∧ and ∀ in the right-hand side.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SuperRule {
    pub name: String,
    pub lhs: Prop,
    pub branches: Vec<SuperBranchSchema>,
}

impl SuperRule {
    pub fn from_rule(rule: &RewriteRule) -> Result<Self, DeriveError> {
        let RuleBody::Prop { lhs, rhs } = &rule.body else {
            return Err(DeriveError::TermRule(rule.name.clone()));
        };
        let mut taken: BTreeSet<String> = lhs.free_vars().into_iter().map(|v| v.name).collect();
        let branches = flatten(rhs, &rule.name, &mut taken)?;
        Ok(SuperRule {
            name: rule.name.clone(),
            lhs: lhs.clone(),
            branches,
        })
    }

    fn branch_hyps_and_params(&self, b: &SuperBranchSchema) -> (Vec<Prop>, Vec<Var>) {
        let mut hyps = Vec::new();
        let mut params = Vec::new();
        for s in &b.steps {
            match s {
                SuperStep::Hyp(a) => hyps.push(a.clone()),
                SuperStep::Var(v) => params.push(v.clone()),
            }
        }
        (hyps, params)
    }

    pub fn intro_rule(&self) -> DerivedRule {
        let mut eigen = Vec::new();
        let premises = self
            .branches
            .iter()
            .map(|b| {
                let (hyps, params) = self.branch_hyps_and_params(b);
                eigen.extend(params);
                SequentSchema {
                    hyps,
                    goal: b.conclusion.clone(),
                }
            })
            .collect();
        DerivedRule {
            name: format!("{}-intro", self.name),
            params: self.lhs.free_vars().into_iter().collect(),
            eigen,
            premises,
            conclusion: SequentSchema {
                hyps: Vec::new(),
                goal: self.lhs.clone(),
            },
        }
    }

    pub fn elim_rules(&self) -> Vec<DerivedRule> {
        let single = self.branches.len() == 1;
        self.branches
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let (hyps, params) = self.branch_hyps_and_params(b);
                let mut premises = vec![SequentSchema {
                    hyps: Vec::new(),
                    goal: self.lhs.clone(),
                }];
                premises.extend(hyps.into_iter().map(|h| SequentSchema {
                    hyps: Vec::new(),
                    goal: h,
                }));
                let mut all_params: Vec<Var> = self.lhs.free_vars().into_iter().collect();
                all_params.extend(params);
                DerivedRule {
                    name: if single {
                        format!("{}-elim", self.name)
                    } else {
                        format!("{}-elim{}", self.name, i + 1)
                    },
                    params: all_params,
                    eigen: Vec::new(),
                    premises,
                    conclusion: SequentSchema {
                        hyps: Vec::new(),
                        goal: b.conclusion.clone(),
                    },
                }
            })
            .collect()
    }
}

fn flatten(p: &Prop, rule: &str, taken: &mut BTreeSet<String>) -> Result<Vec<SuperBranchSchema>, DeriveError> {
    let unsupported = |connective| DeriveError::Unsupported {
        rule: rule.to_string(),
        connective,
    };
    Ok(match p {
        Prop::Atom(..) => vec![SuperBranchSchema {
            steps: Vec::new(),
            conclusion: p.clone(),
        }],
        Prop::Top => Vec::new(),
        Prop::And(a, b) => {
            let mut out = flatten(a, rule, taken)?;
            out.extend(flatten(b, rule, taken)?);
            out
        }
        Prop::Imp(a, b) => flatten(b, rule, taken)?
            .into_iter()
            .map(|mut br| {
                br.steps.insert(0, SuperStep::Hyp((**a).clone()));
                br
            })
            .collect(),
        Prop::Forall(binder, body) => {
            let name = fresh_name(&binder.hint.0, taken);
            taken.insert(name.clone());
            let v = Var::new(name, binder.sort.clone());
            let opened = body.open(&Term::Var(v.clone()));
            flatten(&opened, rule, taken)?
                .into_iter()
                .map(|mut br| {
                    br.steps.insert(0, SuperStep::Var(v.clone()));
                    br
                })
                .collect()
        }
        Prop::Or(..) => return Err(unsupported("disjunction")),
        Prop::Exists(..) => return Err(unsupported("an existential quantifier")),
        Prop::Bot => return Err(unsupported("falsity")),
    })
}

/// `hyps` extend the ambient context Γ.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SequentSchema {
    pub hyps: Vec<Prop>,
    pub goal: Prop,
}

impl fmt::Display for SequentSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("G")?;
        for h in &self.hyps {
            write!(f, ", {}", prop_string(h, &BTreeSet::new()))?;
        }
        write!(f, " |- {}", prop_string(&self.goal, &BTreeSet::new()))
    }
}

/// An inference rule with schematic context `G`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DerivedRule {
    pub name: String,
    /// Schema variables (instantiated freely).
    pub params: Vec<Var>,
    /// Variables that must be fresh for `G` and the conclusion.
    pub eigen: Vec<Var>,
    pub premises: Vec<SequentSchema>,
    pub conclusion: SequentSchema,
}

impl fmt::Display for DerivedRule {
    /// Prints the rule as an inference figure:
    ///
    /// ```text
    /// G |- Q => R
    /// ----------- fold
    /// G |- P
    /// ```
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let top = self.premises.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("   ");
        let bottom = self.conclusion.to_string();
        let width = top.chars().count().max(bottom.chars().count());
        let mut label = self.name.clone();
        if !self.eigen.is_empty() {
            let names: Vec<_> = self.eigen.iter().map(|v| v.name.as_str()).collect();
            label.push_str(&format!(" ({} fresh)", names.join(", ")));
        }
        writeln!(f, "{top}")?;
        writeln!(f, "{} {label}", "-".repeat(width.max(1)))?;
        write!(f, "{bottom}")
    }
}

pub fn derive_fold_unfold(rule: &RewriteRule) -> Result<(DerivedRule, DerivedRule), DeriveError> {
    let RuleBody::Prop { lhs, rhs } = &rule.body else {
        return Err(DeriveError::TermRule(rule.name.clone()));
    };
    let params: Vec<Var> = lhs.free_vars().into_iter().collect();
    let seq = |p: &Prop| SequentSchema {
        hyps: Vec::new(),
        goal: p.clone(),
    };
    let fold = DerivedRule {
        name: "fold".to_string(),
        params: params.clone(),
        eigen: Vec::new(),
        premises: vec![seq(rhs)],
        conclusion: seq(lhs),
    };
    let unfold = DerivedRule {
        name: "unfold".to_string(),
        params,
        eigen: Vec::new(),
        premises: vec![seq(lhs)],
        conclusion: seq(rhs),
    };
    Ok((fold, unfold))
}

pub fn derive_supernatural(rule: &RewriteRule) -> Result<(DerivedRule, Vec<DerivedRule>), DeriveError> {
    let sr = SuperRule::from_rule(rule)?;
    Ok((sr.intro_rule(), sr.elim_rules()))
}

/// A rewrite theory read in one of the three formalisms.
#[derive(Debug, Clone)]
pub struct RuleSystem {
    pub kind: SystemKind,
    pub theory: RewriteSystem,
    /// Rules that generate the congruence in this system: all rules for
    /// deduction modulo, the term rules otherwise.
    congruence: RewriteSystem,
    supernatural: BTreeMap<String, SuperRule>,
}

impl RuleSystem {
    pub fn new(kind: SystemKind, theory: RewriteSystem) -> Result<Self, SystemError> {
        let congruence = match kind {
            SystemKind::Modulo => theory.clone(),
            _ => theory.term_part(),
        };
        let mut supernatural = BTreeMap::new();
        if kind == SystemKind::SuperNatural {
            for r in theory.prop_rules() {
                supernatural.insert(r.name.clone(), SuperRule::from_rule(r)?);
            }
        }
        Ok(RuleSystem {
            kind,
            theory,
            congruence,
            supernatural,
        })
    }

    pub fn modulo(theory: RewriteSystem) -> Self {
        Self::new(SystemKind::Modulo, theory).expect("deduction modulo accepts every theory")
    }

    pub fn congruence(&self) -> &RewriteSystem {
        &self.congruence
    }

    pub fn super_rule(&self, name: &str) -> Option<&SuperRule> {
        self.supernatural.get(name)
    }

    pub fn super_rules(&self) -> impl Iterator<Item = &SuperRule> {
        self.supernatural.values()
    }
}
