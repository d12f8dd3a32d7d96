//! Vocabulary, formula AST, distributed theories, the text format and polarity.

mod parser;
mod printer;

pub use parser::{parse_formula, parse_theory};

use crate::error::{Error, Result};
use std::collections::{BTreeMap, BTreeSet};

pub const EQ: &str = "=";
pub const APRED: &str = "Apred";

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    /// Function application; constants and domain elements are nullary.
    App(String, Vec<Term>),
}

impl Term {
    pub fn constant(name: impl Into<String>) -> Term {
        Term::App(name.into(), Vec::new())
    }

    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_free(bound, out)),
        }
    }
}

/// Desugared formula. `Const` only arises from `true`/`false` and from grounding.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Const(bool),
    Atom(String, Vec<Term>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    /// `K[t] φ`; a missing index is the single-agent modality of plain AEL.
    Knows(Option<Term>, Box<Formula>),
}

impl Formula {
    pub fn atom(pred: impl Into<String>, args: Vec<Term>) -> Formula {
        Formula::Atom(pred.into(), args)
    }

    pub fn prop(pred: impl Into<String>) -> Formula {
        Formula::Atom(pred.into(), Vec::new())
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Atom(EQ.to_string(), vec![a, b])
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(a, Formula::not(b)))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
    }

    pub fn forall(var: impl Into<String>, body: Formula) -> Formula {
        Formula::Forall(var.into(), Box::new(body))
    }

    pub fn exists(var: impl Into<String>, body: Formula) -> Formula {
        Formula::not(Formula::forall(var, Formula::not(body)))
    }

    pub fn knows(index: Term, body: Formula) -> Formula {
        Formula::Knows(Some(index), Box::new(body))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Const(_) => {}
            Formula::Atom(_, args) => args.iter().for_each(|a| a.collect_free(bound, out)),
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(v, f) => {
                bound.push(v.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
            Formula::Knows(t, f) => {
                if let Some(t) = t {
                    t.collect_free(bound, out);
                }
                f.collect_free(bound, out);
            }
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Formula::Const(_) | Formula::Atom(..) => 1,
            Formula::Not(f) | Formula::Forall(_, f) | Formula::Knows(_, f) => 1 + f.node_count(),
            Formula::And(a, b) => 1 + a.node_count() + b.node_count(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }
}

/// A `Knows` node not nested in another one, addressed by its child path from the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModalOccurrence {
    pub path: Vec<usize>,
    pub formula: Formula,
    pub polarity: Polarity,
}

pub fn polarity_of_occurrences(phi: &Formula) -> Vec<ModalOccurrence> {
    fn walk(f: &Formula, pol: Polarity, path: &mut Vec<usize>, out: &mut Vec<ModalOccurrence>) {
        match f {
            Formula::Const(_) | Formula::Atom(..) => {}
            Formula::Not(g) => {
                path.push(0);
                walk(g, pol.flip(), path, out);
                path.pop();
            }
            Formula::And(a, b) => {
                path.push(0);
                walk(a, pol, path, out);
                path.pop();
                path.push(1);
                walk(b, pol, path, out);
                path.pop();
            }
            Formula::Forall(_, g) => {
                path.push(0);
                walk(g, pol, path, out);
                path.pop();
            }
            Formula::Knows(..) => out.push(ModalOccurrence {
                path: path.clone(),
                formula: f.clone(),
                polarity: pol,
            }),
        }
    }
    let mut out = Vec::new();
    walk(phi, Polarity::Positive, &mut Vec::new(), &mut out);
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredDecl {
    pub arity: usize,
    pub objective: bool,
}

/// Σ_o ∪ Σ_s. Domain elements act as objective constants; functions are objective only.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocabulary {
    pub preds: BTreeMap<String, PredDecl>,
    pub funcs: BTreeMap<String, usize>,
}

impl Vocabulary {
    pub fn pred(&self, name: &str) -> Option<&PredDecl> {
        self.preds.get(name)
    }

    pub fn is_subjective(&self, name: &str) -> bool {
        self.preds.get(name).is_some_and(|d| !d.objective)
    }

    pub fn subjective(&self) -> impl Iterator<Item = (&String, usize)> {
        self.preds.iter().filter(|(_, d)| !d.objective).map(|(n, d)| (n, d.arity))
    }
}

/// Interpretation I_o of the declared objective symbols, over element indices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ObjectiveStructure {
    pub preds: BTreeMap<String, BTreeSet<Vec<usize>>>,
    pub funcs: BTreeMap<String, BTreeMap<Vec<usize>, usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistributedTheory {
    /// Domain D in declaration order.
    pub domain: Vec<String>,
    /// Element indices of the agents, in declaration order.
    pub agents: Vec<usize>,
    pub vocab: Vocabulary,
    pub structure: ObjectiveStructure,
    /// Sentences per agent, indexed like `agents`.
    pub theories: Vec<Vec<Formula>>,
}

impl DistributedTheory {
    pub fn element(&self, name: &str) -> Option<usize> {
        self.domain.iter().position(|d| d == name)
    }

    pub fn agent_index(&self, name: &str) -> Option<usize> {
        self.agents.iter().position(|&e| self.domain[e] == name)
    }

    pub fn agent_name(&self, agent: usize) -> &str {
        &self.domain[self.agents[agent]]
    }

    pub fn agent_names(&self) -> Vec<String> {
        self.agents.iter().map(|&e| self.domain[e].clone()).collect()
    }

    pub fn is_agent_element(&self, elem: usize) -> bool {
        self.agents.contains(&elem)
    }

    /// Checks the container invariants: agents inside the domain, one theory per agent,
    /// closed sentences, known symbols with matching arities.
    pub fn validate(&self) -> Result<()> {
        if self.agents.is_empty() {
            return Err(Error::Invalid("at least one agent is required".into()));
        }
        if self.theories.len() != self.agents.len() {
            return Err(Error::Invalid("every agent needs exactly one theory entry".into()));
        }
        let mut seen = BTreeSet::new();
        for &a in &self.agents {
            if a >= self.domain.len() || !seen.insert(a) {
                return Err(Error::Invalid("agent list is not a set of domain elements".into()));
            }
        }
        for (name, decl) in &self.vocab.preds {
            if name == EQ || name == APRED {
                return Err(Error::Invalid(format!("{name} is built in")));
            }
            if !decl.objective && self.structure.preds.contains_key(name) {
                return Err(Error::Invalid(format!("subjective predicate {name} has an objective extension")));
            }
        }
        for (i, sentences) in self.theories.iter().enumerate() {
            for s in sentences {
                if let Some(v) = s.free_vars().into_iter().next() {
                    return Err(Error::Invalid(format!(
                        "free variable {v} in a sentence of {}",
                        self.agent_name(i)
                    )));
                }
                self.check_formula(s)?;
            }
        }
        Ok(())
    }

    fn check_term(&self, t: &Term) -> Result<()> {
        match t {
            Term::Var(_) => Ok(()),
            Term::App(name, args) => {
                if args.is_empty() && self.element(name).is_some() {
                    return Ok(());
                }
                match self.vocab.funcs.get(name) {
                    Some(&n) if n == args.len() => args.iter().try_for_each(|a| self.check_term(a)),
                    Some(&n) => Err(Error::Invalid(format!("{name} expects {n} arguments, got {}", args.len()))),
                    None => Err(Error::Invalid(format!("undeclared symbol {name}"))),
                }
            }
        }
    }

    fn check_formula(&self, f: &Formula) -> Result<()> {
        match f {
            Formula::Const(_) => Ok(()),
            Formula::Atom(p, args) => {
                let arity = match p.as_str() {
                    EQ => 2,
                    APRED => 1,
                    _ => self
                        .vocab
                        .pred(p)
                        .ok_or_else(|| Error::Invalid(format!("undeclared predicate {p}")))?
                        .arity,
                };
                if arity != args.len() {
                    return Err(Error::Invalid(format!("{p} expects {arity} arguments, got {}", args.len())));
                }
                args.iter().try_for_each(|a| self.check_term(a))
            }
            Formula::Not(g) | Formula::Forall(_, g) => self.check_formula(g),
            Formula::And(a, b) => {
                self.check_formula(a)?;
                self.check_formula(b)
            }
            Formula::Knows(t, g) => {
                match t {
                    Some(t) => self.check_term(t)?,
                    None => return Err(Error::Invalid("unindexed K is only valid in AEL output".into())),
                }
                self.check_formula(g)
            }
        }
    }

    /// Builds a theory programmatically; the domain starts with the agents.
    pub fn new(agents: &[&str], extra_domain: &[&str]) -> DistributedTheory {
        let mut domain: Vec<String> = Vec::new();
        for n in agents.iter().chain(extra_domain) {
            if !domain.iter().any(|d| d == n) {
                domain.push(n.to_string());
            }
        }
        let agents: Vec<usize> = agents.iter().map(|a| domain.iter().position(|d| d == a).unwrap()).collect();
        DistributedTheory {
            theories: vec![Vec::new(); agents.len()],
            domain,
            agents,
            vocab: Vocabulary::default(),
            structure: ObjectiveStructure::default(),
        }
    }

    pub fn declare_subjective(&mut self, name: &str, arity: usize) {
        self.vocab.preds.insert(name.to_string(), PredDecl { arity, objective: false });
    }

    pub fn declare_objective(&mut self, name: &str, arity: usize, tuples: impl IntoIterator<Item = Vec<usize>>) {
        self.vocab.preds.insert(name.to_string(), PredDecl { arity, objective: true });
        self.structure.preds.insert(name.to_string(), tuples.into_iter().collect());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kb(agent: &str, f: Formula) -> Formula {
        Formula::knows(Term::constant(agent), f)
    }

    #[test]
    fn single_negation_flips() {
        let occ = polarity_of_occurrences(&Formula::not(kb("B", Formula::prop("r"))));
        assert_eq!(occ.len(), 1);
        assert_eq!(occ[0].polarity, Polarity::Negative);
        assert_eq!(occ[0].path, vec![0]);
    }

    #[test]
    fn double_negation_is_positive() {
        let f = Formula::and(Formula::prop("p"), Formula::not(Formula::not(kb("B", Formula::prop("z")))));
        let occ = polarity_of_occurrences(&f);
        assert_eq!(occ.len(), 1);
        assert_eq!(occ[0].polarity, Polarity::Positive);
    }

    #[test]
    fn nested_occurrences_are_not_reported() {
        let f = kb("A", Formula::not(kb("B", Formula::prop("p"))));
        let occ = polarity_of_occurrences(&f);
        assert_eq!(occ.len(), 1);
        assert_eq!(occ[0].path, Vec::<usize>::new());
    }

    #[test]
    fn mixed_signs() {
        let r = kb("B", Formula::prop("r"));
        let s = kb("B", Formula::prop("s"));
        let f = Formula::not(Formula::and(r.clone(), Formula::not(s.clone())));
        let occ = polarity_of_occurrences(&f);
        let find = |g: &Formula| occ.iter().find(|o| &o.formula == g).unwrap().polarity;
        assert_eq!(find(&r), Polarity::Negative);
        assert_eq!(find(&s), Polarity::Positive);
    }

    #[test]
    fn sugar_shapes() {
        let p = Formula::prop("p");
        assert_eq!(
            Formula::or(p.clone(), Formula::not(p.clone())),
            Formula::not(Formula::and(Formula::not(p.clone()), Formula::not(Formula::not(p))))
        );
    }
}
