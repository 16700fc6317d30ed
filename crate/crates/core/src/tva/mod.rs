//! Truth values algebras: the operations, finite instances given by tables
//! or by lattices, the induced pre-order and law checking.

mod candidates;

use std::fmt::Debug;

use serde::Serialize;
use thiserror::Error;

pub use candidates::{candidate_member, Candidate, CandidateAlgebra, Membership, Samples};

pub trait TruthValueAlgebra {
    type Value: Clone + PartialEq + Debug;

    fn name(&self) -> String;
    fn top(&self) -> Self::Value;
    fn bot(&self) -> Self::Value;
    fn imp(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn and(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn or(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn forall(&self, family: &[Self::Value]) -> Self::Value;
    fn exists(&self, family: &[Self::Value]) -> Self::Value;
    fn is_positive(&self, a: &Self::Value) -> bool;
    fn show(&self, a: &Self::Value) -> String;

    /// `a ≤ b` iff `a ⇒ b` is positive.
    fn pre_order(&self, a: &Self::Value, b: &Self::Value) -> bool {
        self.is_positive(&self.imp(a, b))
    }
}

/// An algebra whose carrier can be enumerated.
pub trait FiniteAlgebra: TruthValueAlgebra {
    fn elements(&self) -> Vec<Self::Value>;
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("unknown algebra `{0}` (bundled: bool2, chain3, diamond4, doubled_top)")]
    Unknown(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("order is not antisymmetric: `{0}` and `{1}`")]
    NotPartialOrder(String, String),
    #[error("`{0}` is not the greatest element")]
    NotTop(String),
    #[error("`{0}` is not the least element")]
    NotBottom(String),
    #[error("`{0}` and `{1}` have no {2}")]
    NotLattice(String, String, &'static str),
    #[error("lattice is not distributive at `{0}`, `{1}`, `{2}`")]
    NotDistributive(String, String, String),
    #[error("empty carrier")]
    Empty,
}

/// A finite algebra given by operation tables over `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableAlgebra {
    pub name: String,
    pub names: Vec<String>,
    pub top: usize,
    pub bot: usize,
    pub imp: Vec<Vec<usize>>,
    pub and: Vec<Vec<usize>>,
    pub or: Vec<Vec<usize>>,
    pub positive: Vec<bool>,
}

impl TableAlgebra {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

impl TruthValueAlgebra for TableAlgebra {
    type Value = usize;

    fn name(&self) -> String {
        self.name.clone()
    }
    fn top(&self) -> usize {
        self.top
    }
    fn bot(&self) -> usize {
        self.bot
    }
    fn imp(&self, a: &usize, b: &usize) -> usize {
        self.imp[*a][*b]
    }
    fn and(&self, a: &usize, b: &usize) -> usize {
        self.and[*a][*b]
    }
    fn or(&self, a: &usize, b: &usize) -> usize {
        self.or[*a][*b]
    }
    fn forall(&self, family: &[usize]) -> usize {
        family.iter().fold(self.top, |acc, x| self.and[acc][*x])
    }
    fn exists(&self, family: &[usize]) -> usize {
        family.iter().fold(self.bot, |acc, x| self.or[acc][*x])
    }
    fn is_positive(&self, a: &usize) -> bool {
        self.positive[*a]
    }
    fn show(&self, a: &usize) -> String {
        self.names[*a].clone()
    }
}

impl FiniteAlgebra for TableAlgebra {
    fn elements(&self) -> Vec<usize> {
        (0..self.len()).collect()
    }
}

/// A finite bounded lattice given by generating order pairs `a ≤ b`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LatticeSpec {
    pub name: String,
    pub elements: Vec<String>,
    pub order: Vec<(String, String)>,
    pub top: String,
    pub bot: String,
}

impl LatticeSpec {
    pub fn chain(name: &str, elements: &[&str]) -> Self {
        LatticeSpec {
            name: name.to_string(),
            elements: elements.iter().map(|s| s.to_string()).collect(),
            order: elements.windows(2).map(|w| (w[0].to_string(), w[1].to_string())).collect(),
            top: elements.last().map(|s| s.to_string()).unwrap_or_default(),
            bot: elements.first().map(|s| s.to_string()).unwrap_or_default(),
        }
    }
}

/// Builds the Heyting algebra of a finite bounded distributive lattice.
/// Implication is the greatest `c` with `a ∧ c ≤ b`; `⊤` is the only
/// positive element.
pub fn heyting_from_lattice(spec: &LatticeSpec) -> Result<TableAlgebra, AlgebraError> {
    let n = spec.elements.len();
    if n == 0 {
        return Err(AlgebraError::Empty);
    }
    let idx = |s: &str| {
        spec.elements
            .iter()
            .position(|e| e == s)
            .ok_or_else(|| AlgebraError::UnknownElement(s.to_string()))
    };
    for (i, e) in spec.elements.iter().enumerate() {
        if spec.elements[..i].contains(e) {
            return Err(AlgebraError::DuplicateElement(e.clone()));
        }
    }
    let mut leq = vec![vec![false; n]; n];
    for (i, row) in leq.iter_mut().enumerate() {
        row[i] = true;
    }
    for (a, b) in &spec.order {
        leq[idx(a)?][idx(b)?] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if leq[i][k] && leq[k][j] {
                    leq[i][j] = true;
                }
            }
        }
    }
    let name = |i: usize| spec.elements[i].clone();
    for i in 0..n {
        for j in 0..i {
            if leq[i][j] && leq[j][i] {
                return Err(AlgebraError::NotPartialOrder(name(j), name(i)));
            }
        }
    }
    let top = idx(&spec.top)?;
    let bot = idx(&spec.bot)?;
    if (0..n).any(|i| !leq[i][top]) {
        return Err(AlgebraError::NotTop(name(top)));
    }
    if (0..n).any(|i| !leq[bot][i]) {
        return Err(AlgebraError::NotBottom(name(bot)));
    }
    let bound = |a: usize, b: usize, lower: bool| -> Result<usize, AlgebraError> {
        let rel = |x: usize, y: usize| if lower { leq[x][y] } else { leq[y][x] };
        let bounds: Vec<usize> = (0..n).filter(|&c| rel(c, a) && rel(c, b)).collect();
        bounds
            .iter()
            .copied()
            .find(|&g| bounds.iter().all(|&l| rel(l, g)))
            .ok_or_else(|| AlgebraError::NotLattice(name(a), name(b), if lower { "meet" } else { "join" }))
    };
    let mut and = vec![vec![0; n]; n];
    let mut or = vec![vec![0; n]; n];
    for a in 0..n {
        for b in 0..n {
            and[a][b] = bound(a, b, true)?;
            or[a][b] = bound(a, b, false)?;
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if and[a][or[b][c]] != or[and[a][b]][and[a][c]] {
                    return Err(AlgebraError::NotDistributive(name(a), name(b), name(c)));
                }
            }
        }
    }
    let mut imp = vec![vec![0; n]; n];
    for a in 0..n {
        for b in 0..n {
            let cands: Vec<usize> = (0..n).filter(|&c| leq[and[a][c]][b]).collect();
            imp[a][b] = cands
                .iter()
                .copied()
                .find(|&g| cands.iter().all(|&c| leq[c][g]))
                .expect("finite distributive lattices are Heyting algebras");
        }
    }
    let mut positive = vec![false; n];
    positive[top] = true;
    Ok(TableAlgebra {
        name: spec.name.clone(),
        names: spec.elements.clone(),
        top,
        bot,
        imp,
        and,
        or,
        positive,
    })
}

pub fn bool2() -> TableAlgebra {
    heyting_from_lattice(&LatticeSpec::chain("bool2", &["0", "1"])).expect("chain")
}

pub fn chain3() -> TableAlgebra {
    heyting_from_lattice(&LatticeSpec::chain("chain3", &["0", "1/2", "1"])).expect("chain")
}

pub fn diamond4() -> TableAlgebra {
    let spec = LatticeSpec {
        name: "diamond4".into(),
        elements: ["0", "a", "b", "1"].map(String::from).to_vec(),
        order: [("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")]
            .map(|(x, y)| (x.to_string(), y.to_string()))
            .to_vec(),
        top: "1".into(),
        bot: "0".into(),
    };
    heyting_from_lattice(&spec).expect("diamond is distributive")
}

/// The two-element Boolean algebra with its top split into two positive
/// elements `t` and `t'`. Operations act through the quotient onto bool2 and
/// return `t` for the top class.
pub fn doubled_top() -> TableAlgebra {
    let base = bool2();
    let quotient = [0usize, 1, 1];
    let lift = |v: usize| if v == base.top { 1 } else { 0 };
    let table = |op: &Vec<Vec<usize>>| -> Vec<Vec<usize>> {
        (0..3)
            .map(|a| (0..3).map(|b| lift(op[quotient[a]][quotient[b]])).collect())
            .collect()
    };
    TableAlgebra {
        name: "doubled_top".into(),
        names: ["0", "t", "t'"].map(String::from).to_vec(),
        top: 1,
        bot: 0,
        imp: table(&base.imp),
        and: table(&base.and),
        or: table(&base.or),
        positive: vec![false, true, true],
    }
}

pub const BUNDLED: [&str; 4] = ["bool2", "chain3", "diamond4", "doubled_top"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgebraSpec {
    Named(String),
    Lattice(LatticeSpec),
}

pub fn make_algebra(spec: &AlgebraSpec) -> Result<TableAlgebra, AlgebraError> {
    match spec {
        AlgebraSpec::Named(n) => match n.as_str() {
            "bool2" => Ok(bool2()),
            "chain3" => Ok(chain3()),
            "diamond4" => Ok(diamond4()),
            "doubled_top" => Ok(doubled_top()),
            other => Err(AlgebraError::Unknown(other.to_string())),
        },
        AlgebraSpec::Lattice(l) => heyting_from_lattice(l),
    }
}

pub fn bundled_battery() -> Vec<TableAlgebra> {
    vec![bool2(), chain3(), diamond4(), doubled_top()]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawResult {
    pub law: &'static str,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub algebra: String,
    pub size: usize,
    pub laws: Vec<LawResult>,
}

impl LawReport {
    pub fn holds(&self, law: &str) -> bool {
        self.laws.iter().any(|l| l.law == law && l.holds)
    }

    /// All laws except antisymmetry hold.
    pub fn is_tva(&self) -> bool {
        self.laws.iter().all(|l| l.holds || l.law == "antisymmetry")
    }

    pub fn is_heyting(&self) -> bool {
        self.laws.iter().all(|l| l.holds)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.laws.iter().filter(|l| !l.holds).map(|l| l.law).collect()
    }
}

/// Families used to test the quantifier laws: every subset when the carrier
/// is small, otherwise every subset of size at most three.
fn families(n: usize) -> Vec<Vec<usize>> {
    if n <= 10 {
        (0u32..(1 << n))
            .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
            .collect()
    } else {
        let mut out = vec![vec![]];
        for i in 0..n {
            out.push(vec![i]);
            for j in i + 1..n {
                out.push(vec![i, j]);
                for k in j + 1..n {
                    out.push(vec![i, j, k]);
                }
            }
        }
        out
    }
}

pub fn check_laws<A: FiniteAlgebra>(alg: &A) -> LawReport {
    let els = alg.elements();
    let n = els.len();
    let le: Vec<Vec<bool>> = els.iter().map(|a| els.iter().map(|b| alg.pre_order(a, b)).collect()).collect();
    let pos = |v: &A::Value| els.iter().position(|e| e == v).expect("operations stay in the carrier");
    let s = |i: usize| alg.show(&els[i]);
    let mut laws = Vec::new();
    let mut law = |name: &'static str, cex: Option<String>| {
        laws.push(LawResult {
            law: name,
            holds: cex.is_none(),
            counterexample: cex,
        })
    };
    let idx: Vec<usize> = (0..n).collect();
    let pairs = || idx.iter().flat_map(|&a| idx.iter().map(move |&b| (a, b)));
    let triples = || pairs().flat_map(|(a, b)| idx.iter().map(move |&c| (a, b, c)));

    law("preorder_reflexive", idx.iter().find(|&&a| !le[a][a]).map(|&a| s(a)));
    law(
        "preorder_transitive",
        triples()
            .find(|&(a, b, c)| le[a][b] && le[b][c] && !le[a][c])
            .map(|(a, b, c)| format!("{} <= {} <= {}", s(a), s(b), s(c))),
    );
    law(
        "and_is_glb",
        triples()
            .find(|&(a, b, c)| {
                let m = pos(&alg.and(&els[a], &els[b]));
                !le[m][a] || !le[m][b] || (le[c][a] && le[c][b] && !le[c][m])
            })
            .map(|(a, b, c)| format!("{} /\\ {} against {}", s(a), s(b), s(c))),
    );
    law(
        "or_is_lub",
        triples()
            .find(|&(a, b, c)| {
                let j = pos(&alg.or(&els[a], &els[b]));
                !le[a][j] || !le[b][j] || (le[a][c] && le[b][c] && !le[j][c])
            })
            .map(|(a, b, c)| format!("{} \\/ {} against {}", s(a), s(b), s(c))),
    );
    let top = pos(&alg.top());
    let bot = pos(&alg.bot());
    law("top_is_greatest", idx.iter().find(|&&a| !le[a][top]).map(|&a| s(a)));
    law("bot_is_least", idx.iter().find(|&&a| !le[bot][a]).map(|&a| s(a)));
    law(
        "top_positive",
        if alg.is_positive(&alg.top()) { None } else { Some(s(top)) },
    );
    law(
        "imp_is_relative_complement",
        triples()
            .find(|&(a, b, c)| {
                let i = pos(&alg.imp(&els[a], &els[b]));
                let m = pos(&alg.and(&els[a], &els[c]));
                le[c][i] != le[m][b]
            })
            .map(|(a, b, c)| format!("{} => {} against {}", s(a), s(b), s(c))),
    );
    let fams = families(n);
    let show_fam = |f: &[usize]| format!("{{{}}}", f.iter().map(|&i| s(i)).collect::<Vec<_>>().join(", "));
    law(
        "forall_is_glb",
        fams.iter()
            .find(|f| {
                let vals: Vec<A::Value> = f.iter().map(|&i| els[i].clone()).collect();
                let g = pos(&alg.forall(&vals));
                f.iter().any(|&x| !le[g][x]) || idx.iter().any(|&c| f.iter().all(|&x| le[c][x]) && !le[c][g])
            })
            .map(|f| show_fam(f)),
    );
    law(
        "exists_is_lub",
        fams.iter()
            .find(|f| {
                let vals: Vec<A::Value> = f.iter().map(|&i| els[i].clone()).collect();
                let j = pos(&alg.exists(&vals));
                f.iter().any(|&x| !le[x][j]) || idx.iter().any(|&c| f.iter().all(|&x| le[x][c]) && !le[j][c])
            })
            .map(|f| show_fam(f)),
    );
    law(
        "positive_modus_ponens",
        pairs()
            .find(|&(a, b)| {
                alg.is_positive(&els[a]) && alg.is_positive(&alg.imp(&els[a], &els[b])) && !alg.is_positive(&els[b])
            })
            .map(|(a, b)| format!("{} and {} => {}", s(a), s(a), s(b))),
    );
    law(
        "antisymmetry",
        pairs()
            .find(|&(a, b)| a != b && le[a][b] && le[b][a])
            .map(|(a, b)| format!("{} <= {} <= {}", s(a), s(b), s(a))),
    );
    LawReport {
        algebra: alg.name(),
        size: n,
        laws,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bool2_tables() {
        let b = bool2();
        assert_eq!(b.imp(&1, &0), 0);
        assert_eq!(b.imp(&0, &0), 1);
        assert_eq!(b.positive, vec![false, true]);
        assert!(b.pre_order(&0, &1));
    }

    #[test]
    fn chain3_implication() {
        // oracle: greatest c with min(a, c) <= b, on the chain 0 < 1/2 < 1
        let c = chain3();
        let rank = |i: usize| i; // element order equals index order
        for a in 0..3 {
            for b in 0..3 {
                let expected = (0..3).filter(|&x| rank(a.min(x)) <= rank(b)).max().unwrap();
                assert_eq!(c.imp(&a, &b), expected, "{a} => {b}");
            }
        }
        assert_eq!(c.imp(&1, &0), 0);
        assert_eq!(c.imp(&2, &1), 1);
        assert_eq!(c.imp(&1, &1), 2);
        assert!(!c.pre_order(&1, &0));
    }

    #[test]
    fn doubled_top_is_not_antisymmetric() {
        let d = doubled_top();
        assert!(d.pre_order(&1, &2) && d.pre_order(&2, &1));
        let r = check_laws(&d);
        assert_eq!(r.failures(), vec!["antisymmetry"]);
        assert!(r.is_tva() && !r.is_heyting());
    }

    #[test]
    fn bundled_heyting_algebras_pass() {
        for alg in [bool2(), chain3(), diamond4()] {
            let r = check_laws(&alg);
            assert!(r.is_heyting(), "{}: {:?}", alg.name, r.failures());
            for a in alg.elements() {
                assert!(alg.is_positive(&alg.imp(&a, &a)));
            }
            assert_eq!(alg.imp(&alg.top, &alg.top), alg.top);
        }
    }

    #[test]
    fn lattice_errors() {
        let mut spec = LatticeSpec::chain("c", &["0", "1"]);
        spec.order.push(("1".into(), "0".into()));
        assert!(matches!(heyting_from_lattice(&spec), Err(AlgebraError::NotPartialOrder(..))));
        // the pentagon N5 is a lattice but not distributive
        let n5 = LatticeSpec {
            name: "n5".into(),
            elements: ["0", "a", "b", "c", "1"].map(String::from).to_vec(),
            order: [("0", "a"), ("a", "b"), ("b", "1"), ("0", "c"), ("c", "1")]
                .map(|(x, y)| (x.to_string(), y.to_string()))
                .to_vec(),
            top: "1".into(),
            bot: "0".into(),
        };
        assert!(matches!(heyting_from_lattice(&n5), Err(AlgebraError::NotDistributive(..))));
        // two incomparable maximal elements: no top
        let v = LatticeSpec {
            name: "v".into(),
            elements: ["0", "a", "b"].map(String::from).to_vec(),
            order: [("0", "a"), ("0", "b")].map(|(x, y)| (x.to_string(), y.to_string())).to_vec(),
            top: "a".into(),
            bot: "0".into(),
        };
        assert!(matches!(heyting_from_lattice(&v), Err(AlgebraError::NotTop(_))));
    }
}
