//! Recursive descent parsers for theory (`.dmt`), proof (`.prf`) and
//! lattice (`.lat`) files.

use std::collections::BTreeMap;

use super::lexer::{lex, Tok, Token};
use super::{LatticeFile, ParseError, ProofEntry, ProofFile, Theory};
use crate::budgets::Budgets;
use crate::proofs::{ElimArg, Proof, RuleSystem, SuperBinder, SuperBranch, SuperStep, SystemKind};
use crate::rewriting::{RewriteRule, RewriteSystem};
use crate::syntax::{Binder, Context, Prop, Sequent, Signature, Sort, Term, Var};
use crate::tva::LatticeSpec;

const THEORY_KEYWORDS: [&str; 6] = ["sort", "fun", "pred", "prop", "rule", "budget"];
const PROP_KEYWORDS: [&str; 4] = ["forall", "exists", "true", "false"];
const PROOF_KEYWORDS: [&str; 22] = [
    "proof", "system", "fun", "gen", "case", "of", "pack", "unpack", "as", "in", "absurd", "fst", "snd", "inl", "inr",
    "fold", "unfold", "sintro", "selim", "tt", "forall", "exists",
];

#[derive(Debug, Clone)]
enum RawTerm {
    App(String, Vec<RawTerm>, Pos),
}

type Pos = (usize, usize);

#[derive(Debug, Clone)]
enum RawProp {
    Atom(String, Vec<RawTerm>, Pos),
    Top,
    Bot,
    And(Box<RawProp>, Box<RawProp>),
    Or(Box<RawProp>, Box<RawProp>),
    Imp(Box<RawProp>, Box<RawProp>),
    Quant(bool, String, String, Pos, Box<RawProp>),
}

struct Cursor {
    toks: Vec<Token>,
    pos: usize,
    keywords: &'static [&'static str],
}

impl Cursor {
    fn new(src: &str, keywords: &'static [&'static str]) -> Result<Self, ParseError> {
        Ok(Cursor {
            toks: lex(src)?,
            pos: 0,
            keywords,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> Pos {
        match self.toks.get(self.pos).or(self.toks.last()) {
            Some(t) if self.pos < self.toks.len() => (t.line, t.col),
            Some(t) => (t.line, t.col + 1),
            None => (1, 1),
        }
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (l, c) = self.here();
        Err(ParseError::new(l, c, msg))
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T, ParseError> {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {t}")),
            None => self.error(format!("expected {wanted}, found end of input")),
        }
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(x)) if *x == s)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(x)) if x == k)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        if self.is_kw(k) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.unexpected(&format!("`{s}`"))
        }
    }

    fn expect_kw(&mut self, k: &str) -> Result<(), ParseError> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            self.unexpected(&format!("`{k}`"))
        }
    }

    fn is_name(&self) -> bool {
        matches!(self.peek(), Some(Tok::Ident(x)) if !self.keywords.contains(&x.as_str()) && !PROP_KEYWORDS.contains(&x.as_str()))
    }

    fn name(&mut self) -> Result<String, ParseError> {
        if self.is_name() {
            let Some(Tok::Ident(x)) = self.peek().cloned() else { unreachable!() };
            self.pos += 1;
            Ok(x)
        } else {
            self.unexpected("a name")
        }
    }

    fn number(&mut self) -> Result<usize, ParseError> {
        match self.peek() {
            Some(Tok::Num(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => self.unexpected("a number"),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn term(&mut self) -> Result<RawTerm, ParseError> {
        let pos = self.here();
        let f = self.name()?;
        let mut args = Vec::new();
        if self.eat_sym("(") {
            loop {
                args.push(self.term()?);
                if !self.eat_sym(",") {
                    break;
                }
            }
            self.expect_sym(")")?;
        }
        Ok(RawTerm::App(f, args, pos))
    }

    fn prop(&mut self) -> Result<RawProp, ParseError> {
        if self.is_kw("forall") || self.is_kw("exists") {
            let forall = self.is_kw("forall");
            self.pos += 1;
            let pos = self.here();
            let x = self.name()?;
            self.expect_sym(":")?;
            let s = self.name()?;
            self.expect_sym(".")?;
            let body = self.prop()?;
            return Ok(RawProp::Quant(forall, x, s, pos, Box::new(body)));
        }
        let lhs = self.disjunction()?;
        if self.eat_sym("=>") {
            Ok(RawProp::Imp(Box::new(lhs), Box::new(self.prop()?)))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<RawProp, ParseError> {
        let lhs = self.conjunction()?;
        if self.eat_sym("\\/") {
            let rhs = if self.is_kw("forall") || self.is_kw("exists") { self.prop()? } else { self.disjunction()? };
            Ok(RawProp::Or(Box::new(lhs), Box::new(rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn conjunction(&mut self) -> Result<RawProp, ParseError> {
        let lhs = self.unary()?;
        if self.eat_sym("/\\") {
            let rhs = if self.is_kw("forall") || self.is_kw("exists") { self.prop()? } else { self.conjunction()? };
            Ok(RawProp::And(Box::new(lhs), Box::new(rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn unary(&mut self) -> Result<RawProp, ParseError> {
        if self.eat_kw("true") {
            return Ok(RawProp::Top);
        }
        if self.eat_kw("false") {
            return Ok(RawProp::Bot);
        }
        if self.eat_sym("(") {
            let p = self.prop()?;
            self.expect_sym(")")?;
            return Ok(p);
        }
        if !self.is_name() {
            return self.unexpected("a proposition");
        }
        let RawTerm::App(name, args, pos) = self.term()?;
        Ok(RawProp::Atom(name, args, pos))
    }
}

/// Resolves raw syntax against a signature. With `infer`, unknown
/// identifiers in argument positions become free variables of the expected
/// sort.
struct Elab<'a> {
    sig: &'a Signature,
    free: BTreeMap<String, Sort>,
    bound: Vec<(String, Sort)>,
    infer: bool,
}

impl<'a> Elab<'a> {
    fn new(sig: &'a Signature, free: BTreeMap<String, Sort>, infer: bool) -> Self {
        Elab {
            sig,
            free,
            bound: Vec::new(),
            infer,
        }
    }

    fn check_sort(name: &str, got: &Sort, expected: Option<&Sort>, pos: Pos) -> Result<(), ParseError> {
        match expected {
            Some(e) if e != got => Err(ParseError::new(
                pos.0,
                pos.1,
                format!("`{name}` has sort `{got}`, expected `{e}`"),
            )),
            _ => Ok(()),
        }
    }

    fn term(&mut self, t: &RawTerm, expected: Option<&Sort>) -> Result<(Term, Sort), ParseError> {
        let RawTerm::App(name, args, pos) = t;
        let err = |msg: String| Err(ParseError::new(pos.0, pos.1, msg));
        if args.is_empty() {
            if let Some(k) = self.bound.iter().rposition(|(n, _)| n == name) {
                let s = self.bound[k].1.clone();
                Self::check_sort(name, &s, expected, *pos)?;
                return Ok((Term::Bound(self.bound.len() - 1 - k), s));
            }
            if let Some(s) = self.free.get(name).cloned() {
                Self::check_sort(name, &s, expected, *pos)?;
                return Ok((Term::Var(Var::new(name.clone(), s.clone())), s));
            }
        }
        if let Some((arg_sorts, result)) = self.sig.functions.get(name).cloned() {
            if arg_sorts.len() != args.len() {
                return err(format!("`{name}` expects {} arguments, found {}", arg_sorts.len(), args.len()));
            }
            let mut out = Vec::new();
            for (a, s) in args.iter().zip(&arg_sorts) {
                out.push(self.term(a, Some(s))?.0);
            }
            Self::check_sort(name, &result, expected, *pos)?;
            return Ok((Term::App(name.clone(), out), result));
        }
        if !args.is_empty() {
            return err(format!("unknown function `{name}`"));
        }
        match expected {
            Some(s) if self.infer => {
                self.free.insert(name.clone(), s.clone());
                Ok((Term::Var(Var::new(name.clone(), s.clone())), s.clone()))
            }
            Some(_) => err(format!("unknown variable `{name}`")),
            None => err(format!("cannot infer the sort of `{name}`")),
        }
    }

    fn prop(&mut self, p: &RawProp) -> Result<Prop, ParseError> {
        Ok(match p {
            RawProp::Atom(name, args, pos) => {
                let Some(sorts) = self.sig.predicates.get(name).cloned() else {
                    return Err(ParseError::new(pos.0, pos.1, format!("unknown predicate `{name}`")));
                };
                if sorts.len() != args.len() {
                    return Err(ParseError::new(
                        pos.0,
                        pos.1,
                        format!("`{name}` expects {} arguments, found {}", sorts.len(), args.len()),
                    ));
                }
                let mut out = Vec::new();
                for (a, s) in args.iter().zip(&sorts) {
                    out.push(self.term(a, Some(s))?.0);
                }
                Prop::Atom(name.clone(), out)
            }
            RawProp::Top => Prop::Top,
            RawProp::Bot => Prop::Bot,
            RawProp::And(a, b) => Prop::and(self.prop(a)?, self.prop(b)?),
            RawProp::Or(a, b) => Prop::or(self.prop(a)?, self.prop(b)?),
            RawProp::Imp(a, b) => Prop::imp(self.prop(a)?, self.prop(b)?),
            RawProp::Quant(forall, x, s, pos, body) => {
                let sort = Sort::new(s.clone());
                if !self.sig.sorts.contains(&sort) {
                    return Err(ParseError::new(pos.0, pos.1, format!("unknown sort `{s}`")));
                }
                self.bound.push((x.clone(), sort.clone()));
                let b = self.prop(body);
                self.bound.pop();
                let binder = Binder::new(x.clone(), sort);
                if *forall {
                    Prop::Forall(binder, Box::new(b?))
                } else {
                    Prop::Exists(binder, Box::new(b?))
                }
            }
        })
    }
}

fn raw_as_term(p: &RawProp) -> Option<RawTerm> {
    match p {
        RawProp::Atom(n, args, pos) => Some(RawTerm::App(n.clone(), args.clone(), *pos)),
        _ => None,
    }
}

/// Parses a theory: `sort`, `fun`, `pred`, `prop`, `rule` and `budget`
/// statements in any order (declarations before use).
pub fn parse_theory(src: &str) -> Result<Theory, ParseError> {
    let mut c = Cursor::new(src, &THEORY_KEYWORDS)?;
    let mut sig = Signature::new();
    let mut rules: Vec<RewriteRule> = Vec::new();
    let mut budgets = BTreeMap::new();
    while !c.at_end() {
        let pos = c.here();
        let fail = |msg: String| ParseError::new(pos.0, pos.1, msg);
        if c.eat_kw("sort") {
            let s = c.name()?;
            sig.add_sort(Sort::new(s)).map_err(|e| fail(e.to_string()))?;
        } else if c.eat_kw("fun") {
            let f = c.name()?;
            c.expect_sym(":")?;
            let mut sorts = vec![Sort::new(c.name()?)];
            while c.eat_sym(",") {
                sorts.push(Sort::new(c.name()?));
            }
            let result = if c.eat_sym("->") {
                Sort::new(c.name()?)
            } else if sorts.len() == 1 {
                sorts.pop().expect("one sort")
            } else {
                return c.unexpected("`->`");
            };
            sig.add_function(&f, sorts, result).map_err(|e| fail(e.to_string()))?;
        } else if c.eat_kw("pred") {
            let p = c.name()?;
            let mut sorts = Vec::new();
            if c.eat_sym(":") {
                sorts.push(Sort::new(c.name()?));
                while c.eat_sym(",") {
                    sorts.push(Sort::new(c.name()?));
                }
            }
            sig.add_predicate(&p, sorts).map_err(|e| fail(e.to_string()))?;
        } else if c.eat_kw("prop") {
            loop {
                let pos = c.here();
                let p = c.name()?;
                sig.add_predicate(&p, Vec::new())
                    .map_err(|e| ParseError::new(pos.0, pos.1, e.to_string()))?;
                if !c.eat_sym(",") {
                    break;
                }
            }
        } else if c.eat_kw("budget") {
            let key = c.name()?;
            c.expect_sym("=")?;
            let v = c.number()?;
            Budgets::default()
                .set(&key, &v.to_string())
                .map_err(|e| fail(e.to_string()))?;
            budgets.insert(key.replace('-', "_"), v);
        } else if c.eat_kw("rule") {
            let name = c.name()?;
            c.expect_sym(":")?;
            let lpos = c.here();
            let lhs = c.prop()?;
            c.expect_sym("-->")?;
            let rhs = c.prop()?;
            let mut el = Elab::new(&sig, BTreeMap::new(), true);
            let at_lhs = |msg: String| ParseError::new(lpos.0, lpos.1, msg);
            let is_term_rule = matches!(&lhs, RawProp::Atom(n, ..) if sig.functions.contains_key(n));
            let rule = if is_term_rule {
                let lt = raw_as_term(&lhs).expect("atom");
                let (l, s) = el.term(&lt, None)?;
                let rt = raw_as_term(&rhs).ok_or_else(|| at_lhs("right-hand side of a term rule must be a term".into()))?;
                let (r, _) = el.term(&rt, Some(&s))?;
                RewriteRule::term(&name, l, r, &sig)
            } else {
                let l = el.prop(&lhs)?;
                let r = el.prop(&rhs)?;
                RewriteRule::prop(&name, l, r, &sig)
            }
            .map_err(|e| at_lhs(e.to_string()))?;
            if rules.iter().any(|r| r.name == name) {
                return Err(fail(format!("duplicate rule `{name}`")));
            }
            rules.push(rule);
        } else {
            return c.unexpected("a declaration (sort, fun, pred, prop, rule, budget)");
        }
        c.eat_sym(";");
    }
    let system = RewriteSystem::with_rules(sig, rules).map_err(|e| ParseError::new(1, 1, e.to_string()))?;
    Ok(Theory { system, budgets })
}

struct ProofParser<'a> {
    c: Cursor,
    theory: &'a RewriteSystem,
    systems: BTreeMap<SystemKind, Option<RuleSystem>>,
    kind: SystemKind,
    /// Free variables of the current sequent, then binders in scope.
    scope: Vec<(String, Sort)>,
}

impl ProofParser<'_> {
    fn elab(&self, infer: bool) -> Elab<'_> {
        Elab::new(&self.theory.signature, self.scope.iter().cloned().collect(), infer)
    }

    fn prop(&mut self) -> Result<Prop, ParseError> {
        let raw = self.c.prop()?;
        self.elab(false).prop(&raw)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let raw = self.c.term()?;
        Ok(self.elab(false).term(&raw, None)?.0)
    }

    fn sort(&mut self) -> Result<Sort, ParseError> {
        let pos = self.c.here();
        let s = Sort::new(self.c.name()?);
        if self.theory.signature.sorts.contains(&s) {
            Ok(s)
        } else {
            Err(ParseError::new(pos.0, pos.1, format!("unknown sort `{s}`")))
        }
    }

    fn rule_system(&mut self) -> Result<&RuleSystem, ParseError> {
        let kind = self.kind;
        let theory = self.theory;
        let (l, c) = self.c.here();
        self.systems
            .entry(kind)
            .or_insert_with(|| RuleSystem::new(kind, theory.clone()).ok())
            .as_ref()
            .ok_or_else(|| ParseError::new(l, c, format!("theory has no {kind} presentation")))
    }

    fn starts_atom(&self) -> bool {
        self.c.is_name() || self.c.is_kw("tt") || self.c.is_kw("sintro") || self.c.is_sym("<") || self.c.is_sym("(")
    }

    fn low(&mut self) -> Result<Proof, ParseError> {
        let c = &mut self.c;
        if c.eat_kw("fun") {
            let x = c.name()?;
            c.expect_sym(":")?;
            let a = self.prop()?;
            self.c.expect_sym(".")?;
            let body = self.low()?;
            return Ok(Proof::lam(&x, a, body));
        }
        if c.eat_kw("gen") {
            let x = c.name()?;
            c.expect_sym(":")?;
            let s = self.sort()?;
            self.c.expect_sym(".")?;
            self.scope.push((x.clone(), s.clone()));
            let body = self.low();
            self.scope.pop();
            return Ok(Proof::gen(Var::new(x, s), body?));
        }
        if c.eat_kw("case") {
            let s = self.app()?;
            self.c.expect_kw("of")?;
            let x = self.c.name()?;
            self.c.expect_sym(".")?;
            let l = self.app()?;
            self.c.expect_sym("|")?;
            let y = self.c.name()?;
            self.c.expect_sym(".")?;
            let r = self.low()?;
            return Ok(Proof::case(s, &x, l, &y, r));
        }
        if c.eat_kw("pack") {
            let t = self.term()?;
            self.c.expect_sym(",")?;
            let e = self.low()?;
            return Ok(Proof::pack(t, e));
        }
        if c.eat_kw("unpack") {
            let e = self.app()?;
            self.c.expect_kw("as")?;
            let pos = self.c.here();
            let x = self.c.name()?;
            let s = if self.c.eat_sym(":") {
                self.sort()?
            } else {
                let sorts = &self.theory.signature.sorts;
                if sorts.len() == 1 {
                    sorts.iter().next().cloned().expect("one sort")
                } else {
                    return Err(ParseError::new(pos.0, pos.1, format!("annotate the sort of `{x}`")));
                }
            };
            self.c.expect_sym(",")?;
            let h = self.c.name()?;
            self.c.expect_kw("in")?;
            self.scope.push((x.clone(), s.clone()));
            let body = self.low();
            self.scope.pop();
            return Ok(Proof::unpack(e, Var::new(x, s), &h, body?));
        }
        if c.eat_kw("absurd") {
            let e = self.app()?;
            self.c.expect_sym(":")?;
            let a = self.prop()?;
            return Ok(Proof::absurd(e, a));
        }
        self.app()
    }

    fn app(&mut self) -> Result<Proof, ParseError> {
        let mut head = self.prefix()?;
        loop {
            if self.c.eat_sym("[") {
                let t = self.term()?;
                self.c.expect_sym("]")?;
                head = Proof::inst(head, t);
            } else if self.starts_atom() {
                let a = self.atom()?;
                head = Proof::app(head, a);
            } else {
                return Ok(head);
            }
        }
    }

    fn prefix(&mut self) -> Result<Proof, ParseError> {
        for (kw, mk) in [
            ("fst", Proof::fst as fn(Proof) -> Proof),
            ("snd", Proof::snd),
            ("inl", Proof::inl),
            ("inr", Proof::inr),
        ] {
            if self.c.eat_kw(kw) {
                return Ok(mk(self.atom()?));
            }
        }
        if self.c.is_kw("fold") || self.c.is_kw("unfold") {
            let fold = self.c.is_kw("fold");
            self.c.pos += 1;
            let r = self.c.name()?;
            let e = self.atom()?;
            return Ok(if fold { Proof::fold(&r, e) } else { Proof::unfold(&r, e) });
        }
        if self.c.eat_kw("selim") {
            let r = self.c.name()?;
            let pos = self.c.here();
            let i = self.c.number()?;
            if i == 0 {
                return Err(ParseError::new(pos.0, pos.1, "branches are numbered from 1"));
            }
            let e = self.atom()?;
            self.c.expect_sym("{")?;
            let mut args = Vec::new();
            if !self.c.is_sym("}") {
                loop {
                    if self.c.eat_sym("[") {
                        let t = self.term()?;
                        self.c.expect_sym("]")?;
                        args.push(ElimArg::Term(t));
                    } else {
                        args.push(ElimArg::Proof(self.low()?));
                    }
                    if !self.c.eat_sym(",") {
                        break;
                    }
                }
            }
            self.c.expect_sym("}")?;
            return Ok(Proof::SuperElim(r, i - 1, Box::new(e), args));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Proof, ParseError> {
        if self.c.eat_kw("tt") {
            return Ok(Proof::Unit);
        }
        if self.c.eat_sym("<") {
            let a = self.low()?;
            self.c.expect_sym(",")?;
            let b = self.low()?;
            self.c.expect_sym(">")?;
            return Ok(Proof::pair(a, b));
        }
        if self.c.eat_sym("(") {
            let e = self.low()?;
            let e = if self.c.eat_sym(":") { Proof::ann(e, self.prop()?) } else { e };
            self.c.expect_sym(")")?;
            return Ok(e);
        }
        if self.c.eat_kw("sintro") {
            return self.sintro();
        }
        if self.c.is_name() {
            return Ok(Proof::hyp(&self.c.name()?));
        }
        self.c.unexpected("a proof term")
    }

    fn sintro(&mut self) -> Result<Proof, ParseError> {
        let pos = self.c.here();
        let r = self.c.name()?;
        let sys = self.rule_system()?;
        let rule = sys
            .super_rule(&r)
            .cloned()
            .ok_or_else(|| ParseError::new(pos.0, pos.1, format!("unknown supernatural rule `{r}`")))?;
        let mut branches = Vec::new();
        while self.c.is_sym("{") {
            let bpos = self.c.here();
            self.c.pos += 1;
            let schema = rule.branches.get(branches.len()).ok_or_else(|| {
                ParseError::new(bpos.0, bpos.1, format!("rule `{r}` has {} branches", rule.branches.len()))
            })?;
            let mut names = Vec::new();
            if !self.c.is_sym(".") {
                loop {
                    names.push((self.c.here(), self.c.name()?));
                    if !self.c.eat_sym(",") {
                        break;
                    }
                }
            }
            self.c.expect_sym(".")?;
            let mut binders = Vec::new();
            let mut pushed = 0;
            for (k, (npos, n)) in names.into_iter().enumerate() {
                match schema.steps.get(k) {
                    Some(SuperStep::Hyp(_)) => binders.push(SuperBinder::Hyp(n)),
                    Some(SuperStep::Var(v)) => {
                        self.scope.push((n.clone(), v.sort.clone()));
                        pushed += 1;
                        binders.push(SuperBinder::Term(Var::new(n, v.sort.clone())));
                    }
                    None => {
                        self.scope.truncate(self.scope.len() - pushed);
                        return Err(ParseError::new(npos.0, npos.1, format!("too many binders for rule `{r}`")));
                    }
                }
            }
            let body = self.low();
            self.scope.truncate(self.scope.len() - pushed);
            self.c.expect_sym("}")?;
            branches.push(SuperBranch { binders, body: body? });
        }
        Ok(Proof::SuperIntro(r, branches))
    }

    fn sequent(&mut self) -> Result<Sequent, ParseError> {
        let mut raw = Vec::new();
        if !self.c.is_sym("|-") {
            loop {
                let pos = self.c.here();
                let h = self.c.name()?;
                self.c.expect_sym(":")?;
                raw.push((pos, h, self.c.prop()?));
                if !self.c.eat_sym(",") {
                    break;
                }
            }
        }
        self.c.expect_sym("|-")?;
        let goal = self.c.prop()?;
        let mut el = Elab::new(&self.theory.signature, BTreeMap::new(), true);
        let mut entries = Vec::new();
        let mut first = (1, 1);
        for (k, (pos, h, p)) in raw.iter().enumerate() {
            if k == 0 {
                first = *pos;
            }
            entries.push((h.clone(), el.prop(p)?));
        }
        let goal = el.prop(&goal)?;
        self.scope = el.free.into_iter().collect();
        let ctx = Context::from_entries(entries).map_err(|e| ParseError::new(first.0, first.1, e.to_string()))?;
        Ok(Sequent::new(ctx, goal))
    }
}

/// Parses a proof file against a theory. `system <kind>` switches the rule
/// system for the following entries; each entry reads
/// `proof <name> : <sequent> := <term>`.
pub fn parse_proofs(src: &str, theory: &RewriteSystem) -> Result<ProofFile, ParseError> {
    let mut p = ProofParser {
        c: Cursor::new(src, &PROOF_KEYWORDS)?,
        theory,
        systems: BTreeMap::new(),
        kind: SystemKind::Modulo,
        scope: Vec::new(),
    };
    let mut entries: Vec<ProofEntry> = Vec::new();
    while !p.c.at_end() {
        if p.c.eat_kw("system") {
            let pos = p.c.here();
            let k = p.c.name()?;
            p.kind = SystemKind::from_keyword(&k)
                .ok_or_else(|| ParseError::new(pos.0, pos.1, format!("unknown system `{k}`")))?;
            continue;
        }
        p.c.expect_kw("proof")?;
        let pos = p.c.here();
        let name = p.c.name()?;
        if entries.iter().any(|e| e.name == name) {
            return Err(ParseError::new(pos.0, pos.1, format!("duplicate proof `{name}`")));
        }
        p.c.expect_sym(":")?;
        let sequent = p.sequent()?;
        p.c.expect_sym(":=")?;
        let proof = p.low()?;
        if !p.c.at_end() && !p.c.is_kw("proof") && !p.c.is_kw("system") {
            return p.c.unexpected("end of proof term");
        }
        entries.push(ProofEntry {
            name,
            system: p.kind,
            sequent,
            proof,
        });
        p.scope.clear();
    }
    Ok(ProofFile { entries })
}

/// Parses a single proof term with no free term variables.
pub fn parse_proof_term(src: &str, theory: &RewriteSystem, kind: SystemKind) -> Result<Proof, ParseError> {
    let mut p = ProofParser {
        c: Cursor::new(src, &PROOF_KEYWORDS)?,
        theory,
        systems: BTreeMap::new(),
        kind,
        scope: Vec::new(),
    };
    let proof = p.low()?;
    if !p.c.at_end() {
        return p.c.unexpected("end of input");
    }
    Ok(proof)
}

/// Parses a proposition; unknown identifiers in argument positions become
/// free variables.
pub fn parse_prop(src: &str, sig: &Signature) -> Result<Prop, ParseError> {
    let mut c = Cursor::new(src, &[])?;
    let raw = c.prop()?;
    if !c.at_end() {
        return c.unexpected("end of input");
    }
    Elab::new(sig, BTreeMap::new(), true).prop(&raw)
}

/// Parses a sequent `h : A, ... |- B`.
pub fn parse_sequent(src: &str, theory: &RewriteSystem) -> Result<Sequent, ParseError> {
    let mut p = ProofParser {
        c: Cursor::new(src, &PROOF_KEYWORDS)?,
        theory,
        systems: BTreeMap::new(),
        kind: SystemKind::Modulo,
        scope: Vec::new(),
    };
    let s = p.sequent()?;
    if !p.c.at_end() {
        return p.c.unexpected("end of input");
    }
    Ok(s)
}

/// Parses a lattice description:
/// `lattice <name>`, `elements <e>...`, `le <a> <b>` (any number),
/// `top <e>`, `bot <e>`, one statement per line.
pub fn parse_lattice(src: &str) -> Result<LatticeFile, ParseError> {
    let mut spec = LatticeSpec::default();
    let mut seen_top = false;
    let mut seen_bot = false;
    for (lno, line) in src.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let words: Vec<&str> = line.split_whitespace().collect();
        let Some((&kw, rest)) = words.split_first() else { continue };
        let err = |msg: String| ParseError::new(lno + 1, 1, msg);
        let one = |what: &str| -> Result<String, ParseError> {
            match rest {
                [x] => Ok(x.to_string()),
                _ => Err(err(format!("`{what}` takes exactly one argument"))),
            }
        };
        match kw {
            "lattice" => spec.name = one("lattice")?,
            "elements" => spec.elements.extend(rest.iter().map(|s| s.to_string())),
            "le" => match rest {
                [a, b] => spec.order.push((a.to_string(), b.to_string())),
                _ => return Err(err("`le` takes two elements".into())),
            },
            "top" => {
                spec.top = one("top")?;
                seen_top = true;
            }
            "bot" => {
                spec.bot = one("bot")?;
                seen_bot = true;
            }
            other => return Err(err(format!("unknown statement `{other}`"))),
        }
    }
    if !seen_top || !seen_bot {
        return Err(ParseError::new(1, 1, "lattice needs `top` and `bot`"));
    }
    Ok(LatticeFile { spec })
}
