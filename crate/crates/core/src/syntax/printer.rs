//! Canonical text rendering. Output reparses to the same AST.

use super::{DistributedTheory, Formula, Term, EQ};
use std::fmt::{self, Display, Write};

impl Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::App(name, args) if args.is_empty() => f.write_str(name),
            Term::App(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ctx {
    Top,
    Conj,
    Unary,
}

fn write_formula(out: &mut impl Write, phi: &Formula, ctx: Ctx) -> fmt::Result {
    match phi {
        Formula::Const(b) => out.write_str(if *b { "true" } else { "false" }),
        Formula::Atom(p, args) if p == EQ && args.len() == 2 => {
            if ctx == Ctx::Unary {
                write!(out, "({} = {})", args[0], args[1])
            } else {
                write!(out, "{} = {}", args[0], args[1])
            }
        }
        Formula::Atom(p, args) => write!(out, "{}", Term::App(p.clone(), args.clone())),
        Formula::Not(g) => {
            out.write_str("~")?;
            write_formula(out, g, Ctx::Unary)
        }
        Formula::Knows(t, g) => {
            match t {
                Some(t) => write!(out, "K[{t}] ")?,
                None => out.write_str("K ")?,
            }
            write_formula(out, g, Ctx::Unary)
        }
        Formula::And(a, b) => {
            let paren = ctx == Ctx::Unary;
            if paren {
                out.write_str("(")?;
            }
            write_formula(out, a, Ctx::Conj)?;
            out.write_str(" & ")?;
            // The parser is left-associative; a right-nested conjunction keeps its parentheses.
            if matches!(**b, Formula::And(..)) {
                out.write_str("(")?;
                write_formula(out, b, Ctx::Top)?;
                out.write_str(")")?;
            } else {
                write_formula(out, b, Ctx::Conj)?;
            }
            if paren {
                out.write_str(")")?;
            }
            Ok(())
        }
        Formula::Forall(v, g) => {
            let paren = ctx != Ctx::Top;
            if paren {
                out.write_str("(")?;
            }
            write!(out, "forall {v}: ")?;
            write_formula(out, g, Ctx::Top)?;
            if paren {
                out.write_str(")")?;
            }
            Ok(())
        }
    }
}

impl Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, Ctx::Top)
    }
}

impl Display for DistributedTheory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "agents {}.", self.agent_names().join(", "))?;
        let extra: Vec<&str> = (0..self.domain.len())
            .filter(|e| !self.agents.contains(e))
            .map(|e| self.domain[e].as_str())
            .collect();
        if !extra.is_empty() {
            writeln!(f, "domain {{ {} }}.", extra.join(", "))?;
        }
        for (name, decl) in &self.vocab.preds {
            if decl.objective {
                let tuples: Vec<String> = self.structure.preds.get(name).into_iter().flatten().map(|t| self.tuple(t)).collect();
                writeln!(f, "pred {name}/{} objective = {{ {} }}.", decl.arity, tuples.join(" "))?;
            } else {
                writeln!(f, "pred {name}/{}.", decl.arity)?;
            }
        }
        for (name, arity) in &self.vocab.funcs {
            let entries: Vec<String> = self
                .structure
                .funcs
                .get(name)
                .into_iter()
                .flatten()
                .map(|(args, v)| format!("{} -> {}", self.tuple(args), self.domain[*v]))
                .collect();
            writeln!(f, "func {name}/{arity} objective = {{ {} }}.", entries.join(", "))?;
        }
        for (i, sentences) in self.theories.iter().enumerate() {
            if sentences.is_empty() {
                writeln!(f, "theory {} {{ }}", self.agent_name(i))?;
                continue;
            }
            writeln!(f, "theory {} {{", self.agent_name(i))?;
            for s in sentences {
                writeln!(f, "  {s}.")?;
            }
            writeln!(f, "}}")?;
        }
        Ok(())
    }
}

impl DistributedTheory {
    fn tuple(&self, t: &[usize]) -> String {
        let names: Vec<&str> = t.iter().map(|&e| self.domain[e].as_str()).collect();
        format!("({})", names.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse_formula, parse_theory};

    #[test]
    fn printing_round_trips() {
        let src = "agents A,B. domain { r }. pred p/0. pred q/1. pred E/2 objective = { (A,B) }.
            func d/0 objective = { () -> B }.
            theory A { forall x: E(A,x) => K[x] q(x). ~(p & (p & q(A))) | K[d] ~p. exists y: y = d & q(y). }
            theory B { p <=> ~K[A] p. true. }";
        let t = parse_theory(src).unwrap();
        let printed = t.to_string();
        let again = parse_theory(&printed).unwrap();
        assert_eq!(again, t);
        assert_eq!(again.to_string(), printed);
        for s in t.theories.iter().flatten() {
            assert_eq!(&parse_formula(&s.to_string(), &t).unwrap(), s);
        }
    }
}
