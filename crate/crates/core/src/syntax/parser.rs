//! Recursive-descent parser for the theory text format.

use super::{DistributedTheory, Formula, ObjectiveStructure, PredDecl, Term, Vocabulary, APRED, EQ};
use crate::error::{Error, Result};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(usize),
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Pos {
    line: usize,
    col: usize,
}

const SYMBOLS: [&str; 18] = [
    "<=>", "=>", "->", ".", ",", "{", "}", "(", ")", "[", "]", "/", ":", "~", "&", "|", "=", ";",
];

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '%' || (c == '/' && chars.get(i + 1) == Some(&'/')) {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            col += i - start;
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            col += i - start;
            let text: String = chars[start..i].iter().collect();
            // Digit-led names such as `1a` are not numbers; reject them here.
            let n = text.parse::<usize>().map_err(|_| Error::Parse {
                line: pos.line,
                col: pos.col,
                msg: format!("bad number {text:?}"),
            })?;
            out.push((Tok::Int(n), pos));
            continue;
        }
        let rest: String = chars[i..(i + 3).min(chars.len())].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(*s)) {
            Some(s) => {
                i += s.len();
                col += s.len();
                out.push((Tok::Sym(s), pos));
            }
            None => {
                return Err(Error::Parse { line, col, msg: format!("unexpected character {c:?}") });
            }
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

#[derive(Clone, Debug)]
struct RawTerm {
    name: String,
    args: Vec<RawTerm>,
    pos: Pos,
}

#[derive(Clone, Debug)]
enum Raw {
    Const(bool),
    Atom(RawTerm),
    Eq(RawTerm, RawTerm),
    Not(Box<Raw>),
    And(Box<Raw>, Box<Raw>),
    Or(Box<Raw>, Box<Raw>),
    Implies(Box<Raw>, Box<Raw>),
    Iff(Box<Raw>, Box<Raw>),
    Forall(Vec<String>, Box<Raw>),
    Exists(Vec<String>, Box<Raw>),
    Knows(RawTerm, Box<Raw>),
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

const KEYWORDS: [&str; 11] = [
    "agents", "domain", "pred", "func", "theory", "objective", "forall", "exists", "K", "true", "false",
];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let p = self.pos();
        Err(Error::Parse { line: p.line, col: p.col, msg: msg.into() })
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == kw)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`, found {}", describe(self.peek())))
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            t => self.err(format!("expected identifier, found {}", describe(&t))),
        }
    }

    fn int(&mut self) -> Result<usize> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            t => self.err(format!("expected number, found {}", describe(&t))),
        }
    }

    fn ident_list(&mut self) -> Result<Vec<(String, Pos)>> {
        let first = self.pos();
        let mut out = vec![(self.ident()?, first)];
        while self.eat_sym(",") {
            let p = self.pos();
            out.push((self.ident()?, p));
        }
        Ok(out)
    }

    fn tuple(&mut self) -> Result<Vec<(String, Pos)>> {
        self.expect_sym("(")?;
        let mut out = Vec::new();
        if !self.is_sym(")") {
            out = self.ident_list()?;
        }
        self.expect_sym(")")?;
        Ok(out)
    }

    fn term(&mut self) -> Result<RawTerm> {
        let pos = self.pos();
        let name = self.ident()?;
        let mut args = Vec::new();
        if self.eat_sym("(") {
            if !self.is_sym(")") {
                args.push(self.term()?);
                while self.eat_sym(",") {
                    args.push(self.term()?);
                }
            }
            self.expect_sym(")")?;
        }
        Ok(RawTerm { name, args, pos })
    }

    fn formula(&mut self) -> Result<Raw> {
        let mut left = self.implication()?;
        while self.eat_sym("<=>") {
            let right = self.implication()?;
            left = Raw::Iff(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn implication(&mut self) -> Result<Raw> {
        let left = self.disjunction()?;
        if self.eat_sym("=>") {
            let right = self.implication()?;
            return Ok(Raw::Implies(Box::new(left), Box::new(right)));
        }
        Ok(left)
    }

    fn disjunction(&mut self) -> Result<Raw> {
        let mut left = self.conjunction()?;
        while self.eat_sym("|") {
            let right = self.conjunction()?;
            left = Raw::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<Raw> {
        let mut left = self.unary()?;
        while self.eat_sym("&") {
            let right = self.unary()?;
            left = Raw::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn quantifier_vars(&mut self) -> Result<Vec<String>> {
        let mut vars = vec![self.ident()?];
        loop {
            if self.eat_sym(",") {
                vars.push(self.ident()?);
            } else if matches!(self.peek(), Tok::Ident(_)) {
                vars.push(self.ident()?);
            } else {
                break;
            }
        }
        self.expect_sym(":")?;
        Ok(vars)
    }

    fn unary(&mut self) -> Result<Raw> {
        if self.eat_sym("~") {
            return Ok(Raw::Not(Box::new(self.unary()?)));
        }
        if self.is_kw("forall") || self.is_kw("exists") {
            let universal = self.is_kw("forall");
            self.bump();
            let vars = self.quantifier_vars()?;
            let body = Box::new(self.formula()?);
            return Ok(if universal { Raw::Forall(vars, body) } else { Raw::Exists(vars, body) });
        }
        if self.is_kw("K") {
            self.bump();
            self.expect_sym("[")?;
            let index = self.term()?;
            self.expect_sym("]")?;
            return Ok(Raw::Knows(index, Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Raw> {
        if self.eat_sym("(") {
            let f = self.formula()?;
            self.expect_sym(")")?;
            return Ok(f);
        }
        if self.is_kw("true") || self.is_kw("false") {
            let v = self.is_kw("true");
            self.bump();
            return Ok(Raw::Const(v));
        }
        let t = self.term()?;
        if self.eat_sym("=") {
            let rhs = self.term()?;
            return Ok(Raw::Eq(t, rhs));
        }
        Ok(Raw::Atom(t))
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Int(n) => format!("`{n}`"),
        Tok::Sym(s) => format!("`{s}`"),
        Tok::Eof => "end of input".into(),
    }
}

struct PredItem {
    name: String,
    arity: usize,
    objective: bool,
    tuples: Vec<Vec<(String, Pos)>>,
    pos: Pos,
}

struct FuncItem {
    name: String,
    arity: usize,
    table: Vec<(Vec<(String, Pos)>, (String, Pos))>,
    pos: Pos,
}

/// Symbol context for turning raw syntax into checked formulas.
struct Scope<'a> {
    domain: &'a [String],
    vocab: &'a Vocabulary,
}

fn perr<T>(pos: Pos, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line: pos.line, col: pos.col, msg: msg.into() })
}

impl Scope<'_> {
    fn term(&self, t: &RawTerm, bound: &[String]) -> Result<Term> {
        if t.args.is_empty() && bound.iter().rev().any(|b| b == &t.name) {
            return Ok(Term::Var(t.name.clone()));
        }
        if t.args.is_empty() && self.domain.contains(&t.name) {
            return Ok(Term::constant(t.name.clone()));
        }
        match self.vocab.funcs.get(&t.name) {
            Some(&n) if n == t.args.len() => {
                let args = t.args.iter().map(|a| self.term(a, bound)).collect::<Result<Vec<_>>>()?;
                Ok(Term::App(t.name.clone(), args))
            }
            Some(&n) => perr(t.pos, format!("function {} has arity {n}, used with {}", t.name, t.args.len())),
            None if self.vocab.preds.contains_key(&t.name) => {
                perr(t.pos, format!("predicate {} used as a term", t.name))
            }
            None => perr(t.pos, format!("undeclared symbol {}", t.name)),
        }
    }

    fn formula(&self, r: &Raw, bound: &mut Vec<String>) -> Result<Formula> {
        Ok(match r {
            Raw::Const(b) => Formula::Const(*b),
            Raw::Atom(t) => {
                let arity = match t.name.as_str() {
                    APRED => 1,
                    _ => match self.vocab.preds.get(&t.name) {
                        Some(d) => d.arity,
                        None if self.vocab.funcs.contains_key(&t.name) || self.domain.contains(&t.name) => {
                            return perr(t.pos, format!("{} is a term, not a formula", t.name))
                        }
                        None => return perr(t.pos, format!("undeclared predicate {}", t.name)),
                    },
                };
                if arity != t.args.len() {
                    return perr(t.pos, format!("predicate {} has arity {arity}, used with {}", t.name, t.args.len()));
                }
                let args = t.args.iter().map(|a| self.term(a, bound)).collect::<Result<Vec<_>>>()?;
                Formula::Atom(t.name.clone(), args)
            }
            Raw::Eq(a, b) => Formula::eq(self.term(a, bound)?, self.term(b, bound)?),
            Raw::Not(f) => Formula::not(self.formula(f, bound)?),
            Raw::And(a, b) => Formula::and(self.formula(a, bound)?, self.formula(b, bound)?),
            Raw::Or(a, b) => Formula::or(self.formula(a, bound)?, self.formula(b, bound)?),
            Raw::Implies(a, b) => Formula::implies(self.formula(a, bound)?, self.formula(b, bound)?),
            Raw::Iff(a, b) => Formula::iff(self.formula(a, bound)?, self.formula(b, bound)?),
            Raw::Forall(vars, body) | Raw::Exists(vars, body) => {
                let universal = matches!(r, Raw::Forall(..));
                let n = bound.len();
                bound.extend(vars.iter().cloned());
                let mut f = self.formula(body, bound)?;
                bound.truncate(n);
                for v in vars.iter().rev() {
                    f = if universal { Formula::forall(v.clone(), f) } else { Formula::exists(v.clone(), f) };
                }
                f
            }
            Raw::Knows(t, body) => Formula::knows(self.term(t, bound)?, self.formula(body, bound)?),
        })
    }

    fn sentence(&self, r: &Raw, pos: Pos) -> Result<Formula> {
        let f = self.formula(r, &mut Vec::new())?;
        if let Some(v) = f.free_vars().into_iter().next() {
            return perr(pos, format!("free variable {v} in sentence"));
        }
        Ok(f)
    }
}

/// Parses and validates a theory file.
pub fn parse_theory(src: &str) -> Result<DistributedTheory> {
    let mut p = Parser { toks: lex(src)?, at: 0 };
    let mut domain: Vec<String> = Vec::new();
    let mut agents: Vec<(String, Pos)> = Vec::new();
    let mut preds: Vec<PredItem> = Vec::new();
    let mut funcs: Vec<FuncItem> = Vec::new();
    let mut blocks: Vec<(String, Pos, Vec<(Raw, Pos)>)> = Vec::new();

    let add_elem = |domain: &mut Vec<String>, name: &str| {
        if !domain.iter().any(|d| d == name) {
            domain.push(name.to_string());
        }
    };

    while *p.peek() != Tok::Eof {
        let pos = p.pos();
        match p.peek().clone() {
            Tok::Ident(kw) if kw == "agents" => {
                p.bump();
                for (a, apos) in p.ident_list()? {
                    if agents.iter().any(|(b, _)| b == &a) {
                        return perr(apos, format!("agent {a} declared twice"));
                    }
                    add_elem(&mut domain, &a);
                    agents.push((a, apos));
                }
                p.expect_sym(".")?;
            }
            Tok::Ident(kw) if kw == "domain" => {
                p.bump();
                p.expect_sym("{")?;
                if !p.is_sym("}") {
                    for (e, _) in p.ident_list()? {
                        add_elem(&mut domain, &e);
                    }
                }
                p.expect_sym("}")?;
                p.expect_sym(".")?;
            }
            Tok::Ident(kw) if kw == "pred" => {
                p.bump();
                let npos = p.pos();
                let name = p.ident()?;
                p.expect_sym("/")?;
                let arity = p.int()?;
                let mut item = PredItem { name, arity, objective: false, tuples: Vec::new(), pos: npos };
                if p.is_kw("objective") {
                    p.bump();
                    item.objective = true;
                    if p.eat_sym("=") {
                        p.expect_sym("{")?;
                        while !p.is_sym("}") {
                            item.tuples.push(p.tuple()?);
                            p.eat_sym(",");
                        }
                        p.expect_sym("}")?;
                    }
                }
                p.expect_sym(".")?;
                preds.push(item);
            }
            Tok::Ident(kw) if kw == "func" => {
                p.bump();
                let npos = p.pos();
                let name = p.ident()?;
                p.expect_sym("/")?;
                let arity = p.int()?;
                if !p.is_kw("objective") {
                    return p.err(format!(
                        "function {name} must be declared objective; subjective function symbols are not supported"
                    ));
                }
                p.bump();
                p.expect_sym("=")?;
                p.expect_sym("{")?;
                let mut table = Vec::new();
                while !p.is_sym("}") {
                    let args = p.tuple()?;
                    p.expect_sym("->")?;
                    let vpos = p.pos();
                    let v = p.ident()?;
                    table.push((args, (v, vpos)));
                    p.eat_sym(",");
                }
                p.expect_sym("}")?;
                p.expect_sym(".")?;
                funcs.push(FuncItem { name, arity, table, pos: npos });
            }
            Tok::Ident(kw) if kw == "theory" => {
                p.bump();
                let apos = p.pos();
                let agent = p.ident()?;
                p.expect_sym("{")?;
                let mut sentences = Vec::new();
                while !p.is_sym("}") {
                    let spos = p.pos();
                    let f = p.formula()?;
                    p.expect_sym(".")?;
                    sentences.push((f, spos));
                }
                p.expect_sym("}")?;
                blocks.push((agent, apos, sentences));
            }
            t => return perr(pos, format!("expected a declaration, found {}", describe(&t))),
        }
    }

    if agents.is_empty() {
        return p.err("no agents declared");
    }
    let elem = |name: &str, pos: Pos| -> Result<usize> {
        match domain.iter().position(|d| d == name) {
            Some(i) => Ok(i),
            None => perr(pos, format!("{name} is not a domain element")),
        }
    };

    let mut vocab = Vocabulary::default();
    let mut structure = ObjectiveStructure::default();
    for item in &preds {
        if item.name == EQ || item.name == APRED {
            return perr(item.pos, format!("{} is built in", item.name));
        }
        if vocab.preds.contains_key(&item.name) {
            return perr(item.pos, format!("predicate {} declared twice", item.name));
        }
        vocab.preds.insert(item.name.clone(), PredDecl { arity: item.arity, objective: item.objective });
        if item.objective {
            let mut ext = BTreeSet::new();
            for tuple in &item.tuples {
                if tuple.len() != item.arity {
                    return perr(item.pos, format!("tuple of length {} for {}/{}", tuple.len(), item.name, item.arity));
                }
                ext.insert(tuple.iter().map(|(e, pos)| elem(e, *pos)).collect::<Result<Vec<_>>>()?);
            }
            structure.preds.insert(item.name.clone(), ext);
        }
    }
    for item in &funcs {
        if vocab.funcs.contains_key(&item.name) || vocab.preds.contains_key(&item.name) {
            return perr(item.pos, format!("symbol {} declared twice", item.name));
        }
        if domain.contains(&item.name) {
            return perr(item.pos, format!("function {} clashes with a domain element", item.name));
        }
        vocab.funcs.insert(item.name.clone(), item.arity);
        let mut table = BTreeMap::new();
        for (args, (v, vpos)) in &item.table {
            if args.len() != item.arity {
                return perr(*vpos, format!("{} expects {} arguments", item.name, item.arity));
            }
            let key = args.iter().map(|(e, pos)| elem(e, *pos)).collect::<Result<Vec<_>>>()?;
            if table.insert(key, elem(v, *vpos)?).is_some() {
                return perr(*vpos, format!("duplicate entry in {}", item.name));
            }
        }
        structure.funcs.insert(item.name.clone(), table);
    }

    let agent_elems: Vec<usize> = agents.iter().map(|(a, pos)| elem(a, *pos)).collect::<Result<_>>()?;
    let mut theories = vec![Vec::new(); agents.len()];
    let scope = Scope { domain: &domain, vocab: &vocab };
    for (agent, apos, sentences) in &blocks {
        let Some(i) = agents.iter().position(|(a, _)| a == agent) else {
            return perr(*apos, format!("theory for undeclared agent {agent}"));
        };
        for (raw, spos) in sentences {
            theories[i].push(scope.sentence(raw, *spos)?);
        }
    }

    let theory = DistributedTheory { domain, agents: agent_elems, vocab, structure, theories };
    theory.validate()?;
    Ok(theory)
}

/// Parses a closed formula against the declarations of an existing theory.
pub fn parse_formula(src: &str, theory: &DistributedTheory) -> Result<Formula> {
    let mut p = Parser { toks: lex(src)?, at: 0 };
    let pos = p.pos();
    let raw = p.formula()?;
    if *p.peek() != Tok::Eof {
        return p.err(format!("unexpected {} after formula", describe(p.peek())));
    }
    let scope = Scope { domain: &theory.domain, vocab: &theory.vocab };
    scope.sentence(&raw, pos)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CANDY: &str = "agents M,D. pred c/0. theory D { K[M] c => c. } theory M { K[D] c => c. }";

    #[test]
    fn candy_parses() {
        let t = parse_theory(CANDY).unwrap();
        assert_eq!(t.agent_names(), vec!["M", "D"]);
        let kc = |a: &str| Formula::knows(Term::constant(a), Formula::prop("c"));
        assert_eq!(t.theories[1], vec![Formula::implies(kc("M"), Formula::prop("c"))]);
        assert_eq!(t.theories[0], vec![Formula::implies(kc("D"), Formula::prop("c"))]);
    }

    #[test]
    fn empty_theory() {
        let t = parse_theory("agents A. theory A { }").unwrap();
        assert_eq!(t.agents.len(), 1);
        assert!(t.theories[0].is_empty());
    }

    #[test]
    fn disjunction_desugars() {
        let t = parse_theory("agents A. pred p/0. theory A { p | ~p. }").unwrap();
        let p = Formula::prop("p");
        let expected =
            Formula::Not(Box::new(Formula::and(Formula::not(p.clone()), Formula::not(Formula::not(p)))));
        assert_eq!(t.theories[0], vec![expected]);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_theory("agents A.\npred p/0.\ntheory A { q. }").unwrap_err();
        assert_eq!(e, Error::Parse { line: 3, col: 12, msg: "undeclared predicate q".into() });
        let e = parse_theory("agents A. pred p/1. theory A { p. }").unwrap_err();
        assert!(matches!(e, Error::Parse { msg, .. } if msg.contains("arity")));
        let e = parse_theory("agents A. pred p/1. theory A { p(x). }").unwrap_err();
        assert!(matches!(e, Error::Parse { msg, .. } if msg.contains("undeclared symbol x")));
        let e = parse_theory("agents A. func f/0 = { () -> A }.").unwrap_err();
        assert!(matches!(e, Error::Parse { msg, .. } if msg.contains("subjective function")));
        let e = parse_theory("agents A. theory B { }").unwrap_err();
        assert!(matches!(e, Error::Parse { msg, .. } if msg.contains("undeclared agent")));
        assert!(parse_theory("pred p/0.").is_err());
    }

    #[test]
    fn quantifiers_and_objective_symbols() {
        let src = "agents A,B. domain { r }. pred access/2. pred Edge/2 objective = { (A,B) (B,r) }.
                   func d/0 objective = { () -> B }.
                   theory A { forall x y: Edge(x,y) & x = d => K[d] access(y, r). exists x: access(x,r). }";
        let t = parse_theory(src).unwrap();
        assert_eq!(t.domain, vec!["A", "B", "r"]);
        assert_eq!(t.structure.preds["Edge"].len(), 2);
        assert_eq!(t.theories[0].len(), 2);
        assert!(t.theories[0].iter().all(|s| s.free_vars().is_empty()));
    }

    #[test]
    fn precedence() {
        let t = parse_theory("agents A. pred p/0. pred q/0. pred r/0. theory A { p & q | r => p <=> q. }").unwrap();
        let (p, q, r) = (Formula::prop("p"), Formula::prop("q"), Formula::prop("r"));
        let expected = Formula::iff(Formula::implies(Formula::or(Formula::and(p.clone(), q.clone()), r), p), q);
        assert_eq!(t.theories[0][0], expected);
    }
}
