//! Canonical ASCII rendering of syntax. The output is accepted back by the
//! parser.

use std::collections::BTreeSet;
use std::fmt::{self, Write};

use crate::proofs::{ElimArg, Proof, SuperBinder};
use crate::syntax::{fresh_name, Context, Prop, Sequent, Term};

const PREC_BINDER: u8 = 0;
const PREC_IMP: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_ATOM: u8 = 4;

pub(crate) fn write_term(out: &mut String, t: &Term, stack: &[String]) {
    match t {
        Term::Var(v) => out.push_str(&v.name),
        Term::Bound(i) => match stack.len().checked_sub(i + 1) {
            Some(k) => out.push_str(&stack[k]),
            None => {
                let _ = write!(out, "#{i}");
            }
        },
        Term::App(f, args) => {
            out.push_str(f);
            if !args.is_empty() {
                out.push('(');
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    write_term(out, a, stack);
                }
                out.push(')');
            }
        }
    }
}

fn prec(p: &Prop) -> u8 {
    match p {
        Prop::Forall(..) | Prop::Exists(..) => PREC_BINDER,
        Prop::Imp(..) => PREC_IMP,
        Prop::Or(..) => PREC_OR,
        Prop::And(..) => PREC_AND,
        _ => PREC_ATOM,
    }
}

/// Writes a proposition. `avoid` holds names that binders must not take
/// (free variables of the surrounding syntax).
pub(crate) fn write_prop(out: &mut String, p: &Prop, ctx: u8, stack: &mut Vec<String>, avoid: &BTreeSet<String>) {
    let paren = prec(p) < ctx;
    if paren {
        out.push('(');
    }
    match p {
        Prop::Atom(q, args) => {
            out.push_str(q);
            if !args.is_empty() {
                out.push('(');
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    write_term(out, a, stack);
                }
                out.push(')');
            }
        }
        Prop::Top => out.push_str("true"),
        Prop::Bot => out.push_str("false"),
        Prop::And(a, b) => {
            write_prop(out, a, PREC_AND + 1, stack, avoid);
            out.push_str(" /\\ ");
            write_prop(out, b, PREC_AND, stack, avoid);
        }
        Prop::Or(a, b) => {
            write_prop(out, a, PREC_OR + 1, stack, avoid);
            out.push_str(" \\/ ");
            write_prop(out, b, PREC_OR, stack, avoid);
        }
        Prop::Imp(a, b) => {
            write_prop(out, a, PREC_IMP + 1, stack, avoid);
            out.push_str(" => ");
            write_prop(out, b, PREC_IMP, stack, avoid);
        }
        Prop::Forall(bd, body) | Prop::Exists(bd, body) => {
            let kw = if matches!(p, Prop::Forall(..)) { "forall" } else { "exists" };
            let mut taken: BTreeSet<String> = avoid.clone();
            taken.extend(stack.iter().cloned());
            let base = if bd.hint.0.is_empty() { "x" } else { bd.hint.0.as_str() };
            let name = fresh_name(base, &taken);
            let _ = write!(out, "{kw} {name} : {}. ", bd.sort);
            stack.push(name);
            write_prop(out, body, PREC_BINDER, stack, avoid);
            stack.pop();
        }
    }
    if paren {
        out.push(')');
    }
}

pub(crate) fn prop_string(p: &Prop, avoid: &BTreeSet<String>) -> String {
    let mut out = String::new();
    let mut avoid = avoid.clone();
    avoid.extend(p.free_vars().into_iter().map(|v| v.name));
    write_prop(&mut out, p, PREC_BINDER, &mut Vec::new(), &avoid);
    out
}

const PROOF_LOW: u8 = 0;
const PROOF_APP: u8 = 1;
const PROOF_ATOM: u8 = 2;

fn proof_prec(p: &Proof) -> u8 {
    use Proof::*;
    match p {
        Lam(..) | Gen(..) | Case(..) | Unpack(..) | Pack(..) | Absurd(..) => PROOF_LOW,
        App(..) | Inst(..) | Fst(_) | Snd(_) | Inl(_) | Inr(_) | Fold(..) | Unfold(..) | SuperElim(..) | SuperIntro(..) => PROOF_APP,
        Hyp(_) | Unit | Pair(..) | Ann(..) => PROOF_ATOM,
    }
}

pub(crate) fn write_proof(out: &mut String, p: &Proof, ctx: u8) {
    use Proof::*;
    let paren = proof_prec(p) < ctx;
    if paren {
        out.push('(');
    }
    let prop = |out: &mut String, a: &Prop| out.push_str(&prop_string(a, &BTreeSet::new()));
    let term = |out: &mut String, t: &Term| write_term(out, t, &[]);
    match p {
        Hyp(h) => out.push_str(h),
        Unit => out.push_str("tt"),
        Lam(x, a, b) => {
            let _ = write!(out, "fun {x} : ");
            prop(out, a);
            out.push_str(" . ");
            write_proof(out, b, PROOF_LOW);
        }
        App(f, a) => {
            write_proof(out, f, PROOF_APP);
            out.push(' ');
            write_proof(out, a, PROOF_ATOM);
        }
        Pair(a, b) => {
            out.push('<');
            write_proof(out, a, PROOF_LOW);
            out.push_str(", ");
            write_proof(out, b, PROOF_LOW);
            out.push('>');
        }
        Fst(e) | Snd(e) | Inl(e) | Inr(e) => {
            out.push_str(match p {
                Fst(_) => "fst ",
                Snd(_) => "snd ",
                Inl(_) => "inl ",
                _ => "inr ",
            });
            write_proof(out, e, PROOF_ATOM);
        }
        Fold(r, e) | Unfold(r, e) => {
            let kw = if matches!(p, Fold(..)) { "fold" } else { "unfold" };
            let _ = write!(out, "{kw} {r} ");
            write_proof(out, e, PROOF_ATOM);
        }
        Case(s, x, l, y, r) => {
            out.push_str("case ");
            write_proof(out, s, PROOF_APP);
            let _ = write!(out, " of {x}. ");
            write_proof(out, l, PROOF_APP);
            let _ = write!(out, " | {y}. ");
            write_proof(out, r, PROOF_LOW);
        }
        Gen(x, b) => {
            let _ = write!(out, "gen {} : {} . ", x.name, x.sort);
            write_proof(out, b, PROOF_LOW);
        }
        Inst(e, t) => {
            write_proof(out, e, PROOF_APP);
            out.push_str(" [");
            term(out, t);
            out.push(']');
        }
        Pack(t, e) => {
            out.push_str("pack ");
            term(out, t);
            out.push_str(", ");
            write_proof(out, e, PROOF_LOW);
        }
        Unpack(e, x, h, b) => {
            out.push_str("unpack ");
            write_proof(out, e, PROOF_APP);
            let _ = write!(out, " as {} : {}, {h} in ", x.name, x.sort);
            write_proof(out, b, PROOF_LOW);
        }
        Absurd(e, a) => {
            out.push_str("absurd ");
            write_proof(out, e, PROOF_APP);
            out.push_str(" : ");
            prop(out, a);
        }
        Ann(e, a) => {
            out.push('(');
            write_proof(out, e, PROOF_APP);
            out.push_str(" : ");
            prop(out, a);
            out.push(')');
        }
        SuperIntro(r, branches) => {
            let _ = write!(out, "sintro {r}");
            for br in branches {
                out.push_str(" {");
                for (k, b) in br.binders.iter().enumerate() {
                    out.push_str(if k == 0 { " " } else { ", " });
                    match b {
                        SuperBinder::Hyp(h) => out.push_str(h),
                        SuperBinder::Term(v) => out.push_str(&v.name),
                    }
                }
                out.push_str(" . ");
                write_proof(out, &br.body, PROOF_LOW);
                out.push_str(" }");
            }
        }
        SuperElim(r, i, e, args) => {
            let _ = write!(out, "selim {r} {} ", i + 1);
            write_proof(out, e, PROOF_ATOM);
            out.push_str(" {");
            for (k, a) in args.iter().enumerate() {
                out.push_str(if k == 0 { " " } else { ", " });
                match a {
                    ElimArg::Term(t) => {
                        out.push('[');
                        term(out, t);
                        out.push(']');
                    }
                    ElimArg::Proof(q) => write_proof(out, q, PROOF_LOW),
                }
            }
            out.push_str(" }");
        }
    }
    if paren {
        out.push(')');
    }
}

impl fmt::Display for Proof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_proof(&mut out, self, PROOF_LOW);
        f.write_str(&out)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_term(&mut out, self, &[]);
        f.write_str(&out)
    }
}

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&prop_string(self, &BTreeSet::new()))
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (h, p)) in self.entries().iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{h} : {p}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.context.is_empty() {
            write!(f, "|- {}", self.goal)
        } else {
            write!(f, "{} |- {}", self.context, self.goal)
        }
    }
}

impl fmt::Display for crate::syntax::Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            crate::syntax::Expr::Term(t) => t.fmt(f),
            crate::syntax::Expr::Prop(p) => p.fmt(f),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{Sort, Var};

    #[test]
    fn minimal_parentheses() {
        let q = Prop::sym("Q");
        let r = Prop::sym("R");
        let p = Prop::sym("P");
        assert_eq!(Prop::imp(Prop::imp(p.clone(), r.clone()), r.clone()).to_string(), "(P => R) => R");
        assert_eq!(Prop::imp(p.clone(), Prop::imp(q.clone(), r.clone())).to_string(), "P => Q => R");
        assert_eq!(Prop::or(Prop::and(p.clone(), q.clone()), r.clone()).to_string(), "P /\\ Q \\/ R");
        assert_eq!(Prop::and(Prop::or(p, q), r).to_string(), "(P \\/ Q) /\\ R");
    }

    #[test]
    fn binders_avoid_free_names() {
        let s = Sort::new("s");
        let x = Var::new("x", s.clone());
        let body = Prop::and(Prop::atom("P", vec![Term::Var(x.clone())]), Prop::sym("R"));
        let all = Prop::forall(&x, body);
        assert_eq!(all.to_string(), "forall x : s. P(x) /\\ R");
        let nested = Prop::forall(&x, Prop::exists(&x, Prop::atom("P", vec![Term::Var(x.clone())])));
        assert_eq!(nested.to_string(), "forall x : s. exists x' : s. P(x')");
    }
}
