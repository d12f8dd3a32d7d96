//! Grounding over the finite domain with objective constant folding.

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::syntax::{DistributedTheory, Formula, Term, APRED, EQ};
use std::collections::HashMap;
use std::fmt;

pub type AtomId = usize;

/// Variable-free formula over ground subjective atoms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ground {
    Const(bool),
    Atom(AtomId),
    Not(Box<Ground>),
    /// Flattened conjunction with at least two conjuncts and no constants.
    And(Vec<Ground>),
    /// Knowledge of the agent at this position in the agent list.
    Knows(usize, Box<Ground>),
}

impl Ground {
    #[allow(clippy::should_implement_trait)]
    pub fn not(g: Ground) -> Ground {
        match g {
            Ground::Const(b) => Ground::Const(!b),
            Ground::Not(inner) => *inner,
            g => Ground::Not(Box::new(g)),
        }
    }

    /// Folding conjunction: flattens nested conjunctions and drops `true`.
    pub fn and(items: impl IntoIterator<Item = Ground>) -> Ground {
        let mut out = Vec::new();
        for g in items {
            match g {
                Ground::Const(true) => {}
                Ground::Const(false) => return Ground::Const(false),
                Ground::And(inner) => out.extend(inner),
                g => out.push(g),
            }
        }
        match out.len() {
            0 => Ground::Const(true),
            1 => out.pop().unwrap(),
            _ => Ground::And(out),
        }
    }

    pub fn or(items: impl IntoIterator<Item = Ground>) -> Ground {
        Ground::not(Ground::and(items.into_iter().map(Ground::not)))
    }

    pub fn implies(a: Ground, b: Ground) -> Ground {
        Ground::not(Ground::and([a, Ground::not(b)]))
    }

    pub fn knows(agent: usize, g: Ground) -> Ground {
        Ground::Knows(agent, Box::new(g))
    }

    pub fn node_count(&self) -> usize {
        match self {
            Ground::Const(_) | Ground::Atom(_) => 1,
            Ground::Not(g) | Ground::Knows(_, g) => 1 + g.node_count(),
            Ground::And(gs) => 1 + gs.iter().map(Ground::node_count).sum::<usize>(),
        }
    }

    /// True when some atom occurs outside every `Knows`.
    pub fn is_world_dependent(&self) -> bool {
        match self {
            Ground::Const(_) | Ground::Knows(..) => false,
            Ground::Atom(_) => true,
            Ground::Not(g) => g.is_world_dependent(),
            Ground::And(gs) => gs.iter().any(Ground::is_world_dependent),
        }
    }

    /// Atoms occurring outside every `Knows`, in first-seen order.
    pub fn objective_atoms(&self, out: &mut Vec<AtomId>) {
        match self {
            Ground::Const(_) | Ground::Knows(..) => {}
            Ground::Atom(a) => {
                if !out.contains(a) {
                    out.push(*a)
                }
            }
            Ground::Not(g) => g.objective_atoms(out),
            Ground::And(gs) => gs.iter().for_each(|g| g.objective_atoms(out)),
        }
    }

    /// Every `Knows` subformula, innermost first.
    pub fn modal_subformulas<'a>(&'a self, out: &mut Vec<&'a Ground>) {
        match self {
            Ground::Const(_) | Ground::Atom(_) => {}
            Ground::Not(g) => g.modal_subformulas(out),
            Ground::And(gs) => gs.iter().for_each(|g| g.modal_subformulas(out)),
            Ground::Knows(_, g) => {
                g.modal_subformulas(out);
                out.push(self);
            }
        }
    }

    /// `Knows` nodes not nested in another `Knows`.
    pub fn top_modals<'a>(&'a self, out: &mut Vec<&'a Ground>) {
        match self {
            Ground::Const(_) | Ground::Atom(_) => {}
            Ground::Not(g) => g.top_modals(out),
            Ground::And(gs) => gs.iter().for_each(|g| g.top_modals(out)),
            Ground::Knows(..) => out.push(self),
        }
    }

    pub fn map_atoms(&self, f: &impl Fn(AtomId) -> AtomId) -> Ground {
        match self {
            Ground::Const(b) => Ground::Const(*b),
            Ground::Atom(a) => Ground::Atom(f(*a)),
            Ground::Not(g) => Ground::Not(Box::new(g.map_atoms(f))),
            Ground::And(gs) => Ground::And(gs.iter().map(|g| g.map_atoms(f)).collect()),
            Ground::Knows(a, g) => Ground::Knows(*a, Box::new(g.map_atoms(f))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub pred: String,
    pub args: Vec<usize>,
}

/// Ground subjective atoms in canonical order: predicate name, then arguments in domain order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AtomTable {
    atoms: Vec<GroundAtom>,
    names: Vec<String>,
    index: HashMap<GroundAtom, AtomId>,
}

impl AtomTable {
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atom(&self, id: AtomId) -> &GroundAtom {
        &self.atoms[id]
    }

    pub fn name(&self, id: AtomId) -> &str {
        &self.names[id]
    }

    pub fn get(&self, atom: &GroundAtom) -> Option<AtomId> {
        self.index.get(atom).copied()
    }

    pub fn by_name(&self, name: &str) -> Option<AtomId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn atoms(&self) -> &[GroundAtom] {
        &self.atoms
    }

    pub fn from_atoms(mut atoms: Vec<GroundAtom>, domain: &[String]) -> AtomTable {
        atoms.sort();
        atoms.dedup();
        let names = atoms.iter().map(|a| render_atom(a, domain)).collect();
        let index = atoms.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        AtomTable { atoms, names, index }
    }
}

fn render_atom(a: &GroundAtom, domain: &[String]) -> String {
    if a.args.is_empty() {
        a.pred.clone()
    } else {
        let args: Vec<&str> = a.args.iter().map(|&e| domain[e].as_str()).collect();
        format!("{}({})", a.pred, args.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundTheory {
    pub agents: Vec<String>,
    pub domain: Vec<String>,
    pub table: AtomTable,
    pub theories: Vec<Vec<Ground>>,
}

impl GroundTheory {
    pub fn agent_index(&self, name: &str) -> Option<usize> {
        self.agents.iter().position(|a| a == name)
    }

    pub fn display<'a>(&'a self, g: &'a Ground) -> GroundDisplay<'a> {
        GroundDisplay { theory: self, formula: g }
    }

    /// Back to the AST, with every atom spelled out over constants.
    pub fn to_formula(&self, g: &Ground) -> Formula {
        match g {
            Ground::Const(b) => Formula::Const(*b),
            Ground::Atom(a) => {
                let atom = self.table.atom(*a);
                let args = atom.args.iter().map(|&e| Term::constant(self.domain[e].clone())).collect();
                Formula::Atom(atom.pred.clone(), args)
            }
            Ground::Not(h) => Formula::not(self.to_formula(h)),
            Ground::And(hs) => {
                let mut it = hs.iter().map(|h| self.to_formula(h));
                let first = it.next().expect("conjunction has conjuncts");
                it.fold(first, Formula::and)
            }
            Ground::Knows(a, h) => Formula::knows(Term::constant(self.agents[*a].clone()), self.to_formula(h)),
        }
    }

    pub fn total_nodes(&self) -> usize {
        self.theories.iter().flatten().map(Ground::node_count).sum()
    }
}

pub struct GroundDisplay<'a> {
    theory: &'a GroundTheory,
    formula: &'a Ground,
}

impl fmt::Display for GroundDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.theory.to_formula(self.formula))
    }
}

struct Grounder<'a> {
    theory: &'a DistributedTheory,
    atoms: HashMap<GroundAtom, AtomId>,
    order: Vec<GroundAtom>,
    nodes: usize,
    cap: usize,
    /// Ground unindexed `K` as the knowledge of a single agent 0.
    unindexed: bool,
}

impl<'a> Grounder<'a> {
    fn eval_term(&self, t: &Term, env: &[(String, usize)]) -> Result<usize> {
        match t {
            Term::Var(v) => env
                .iter()
                .rev()
                .find(|(n, _)| n == v)
                .map(|(_, e)| *e)
                .ok_or_else(|| Error::Invalid(format!("unbound variable {v}"))),
            Term::App(name, args) => {
                if args.is_empty() {
                    if let Some(e) = self.theory.element(name) {
                        return Ok(e);
                    }
                }
                let vals = args.iter().map(|a| self.eval_term(a, env)).collect::<Result<Vec<_>>>()?;
                let table = self
                    .theory
                    .structure
                    .funcs
                    .get(name)
                    .ok_or_else(|| Error::Invalid(format!("{name} is not an objective symbol of the structure")))?;
                table.get(&vals).copied().ok_or_else(|| {
                    let shown: Vec<&str> = vals.iter().map(|&e| self.theory.domain[e].as_str()).collect();
                    Error::Invalid(format!("{name} is uninterpreted at ({})", shown.join(",")))
                })
            }
        }
    }

    fn bump(&mut self, n: usize) -> Result<()> {
        self.nodes += n;
        if self.nodes > self.cap {
            return Err(Error::cap("grounded sentence size", self.nodes as u64, self.cap as u64));
        }
        Ok(())
    }

    fn ground(&mut self, f: &Formula, env: &mut Vec<(String, usize)>) -> Result<Ground> {
        self.bump(1)?;
        Ok(match f {
            Formula::Const(b) => Ground::Const(*b),
            Formula::Atom(p, args) => {
                let vals = args.iter().map(|a| self.eval_term(a, env)).collect::<Result<Vec<_>>>()?;
                match p.as_str() {
                    EQ => Ground::Const(vals[0] == vals[1]),
                    APRED => Ground::Const(self.theory.is_agent_element(vals[0])),
                    _ => match self.theory.vocab.pred(p) {
                        Some(d) if d.objective => Ground::Const(
                            self.theory.structure.preds.get(p).is_some_and(|ext| ext.contains(&vals)),
                        ),
                        Some(_) => {
                            let atom = GroundAtom { pred: p.clone(), args: vals };
                            let next = self.order.len();
                            let id = *self.atoms.entry(atom.clone()).or_insert(next);
                            if id == next {
                                self.order.push(atom);
                            }
                            Ground::Atom(id)
                        }
                        None => return Err(Error::Invalid(format!("undeclared predicate {p}"))),
                    },
                }
            }
            Formula::Not(g) => Ground::not(self.ground(g, env)?),
            Formula::And(a, b) => {
                let a = self.ground(a, env)?;
                if a == Ground::Const(false) {
                    return Ok(a);
                }
                Ground::and([a, self.ground(b, env)?])
            }
            Formula::Forall(v, g) => {
                let mut parts = Vec::with_capacity(self.theory.domain.len());
                for d in 0..self.theory.domain.len() {
                    env.push((v.clone(), d));
                    let part = self.ground(g, env);
                    env.pop();
                    let part = part?;
                    if part == Ground::Const(false) {
                        return Ok(part);
                    }
                    parts.push(part);
                }
                Ground::and(parts)
            }
            Formula::Knows(index, g) => {
                let Some(index) = index else {
                    if self.unindexed {
                        return Ok(Ground::knows(0, self.ground(g, env)?));
                    }
                    return Err(Error::Invalid("unindexed K inside a distributed theory".into()));
                };
                let e = self.eval_term(index, env)?;
                match self.theory.agents.iter().position(|&a| a == e) {
                    Some(agent) => Ground::knows(agent, self.ground(g, env)?),
                    None => Ground::Const(false),
                }
            }
        })
    }
}

fn ground_sets(
    theory: &DistributedTheory,
    sets: &[Vec<Formula>],
    extra: &[Formula],
    agents: Vec<String>,
    unindexed: bool,
    limits: &Limits,
) -> Result<(GroundTheory, Vec<Ground>)> {
    let mut g = Grounder {
        theory,
        atoms: HashMap::new(),
        order: Vec::new(),
        nodes: 0,
        cap: limits.sentence_nodes,
        unindexed,
    };
    let mut theories = Vec::with_capacity(sets.len());
    for sentences in sets {
        let mut out = Vec::new();
        for s in sentences {
            g.nodes = 0;
            let gs = g.ground(s, &mut Vec::new())?;
            // Conjunctions from quantifier expansion stay one sentence.
            if gs != Ground::Const(true) {
                out.push(gs);
            }
        }
        theories.push(out);
    }
    let mut extras = Vec::new();
    for f in extra {
        g.nodes = 0;
        extras.push(g.ground(f, &mut Vec::new())?);
    }
    let table = AtomTable::from_atoms(g.order.clone(), &theory.domain);
    let remap: Vec<AtomId> = g.order.iter().map(|a| table.get(a).unwrap()).collect();
    let fix = |x: &Ground| x.map_atoms(&|a| remap[a]);
    let theories = theories.iter().map(|ss| ss.iter().map(fix).collect()).collect();
    let extras = extras.iter().map(fix).collect();
    Ok((GroundTheory { agents, domain: theory.domain.clone(), table, theories }, extras))
}

/// Grounds every agent's theory; `extra` formulas share the atom table but are returned separately.
pub fn ground_with(
    theory: &DistributedTheory,
    extra: &[Formula],
    limits: &Limits,
) -> Result<(GroundTheory, Vec<Ground>)> {
    theory.validate()?;
    ground_sets(theory, &theory.theories, extra, theory.agent_names(), false, limits)
}

/// Grounds one theory whose `K` is unindexed, over the symbols of `base`.
/// The result has a single agent named `agent`.
pub fn ground_single(
    base: &DistributedTheory,
    sentences: &[Formula],
    agent: &str,
    limits: &Limits,
) -> Result<GroundTheory> {
    base.validate()?;
    for s in sentences {
        if let Some(v) = s.free_vars().into_iter().next() {
            return Err(Error::Invalid(format!("free variable {v} in a sentence")));
        }
    }
    let sets = vec![sentences.to_vec()];
    Ok(ground_sets(base, &sets, &[], vec![agent.to_string()], true, limits)?.0)
}

pub fn ground_theory(theory: &DistributedTheory, limits: &Limits) -> Result<GroundTheory> {
    Ok(ground_with(theory, &[], limits)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_theory;

    #[test]
    fn vote_is_its_own_grounding() {
        let t = parse_theory(
            "agents A,B,C. pred yes/0. theory A { K[B] yes | K[C] yes <=> yes. }
             theory B { K[A] yes & K[C] yes => yes. K[A] ~yes & K[C] ~yes => ~yes. } theory C { yes. }",
        )
        .unwrap();
        let g = ground_theory(&t, &Limits::default()).unwrap();
        assert_eq!(g.table.len(), 1);
        assert_eq!(g.table.name(0), "yes");
        assert_eq!(g.theories[2], vec![Ground::Atom(0)]);
    }

    #[test]
    fn non_agent_index_is_false() {
        let t = parse_theory("agents A. domain { r }. pred p/0. theory A { forall x: K[x] p. }").unwrap();
        let g = ground_theory(&t, &Limits::default()).unwrap();
        assert_eq!(g.theories[0], vec![Ground::Const(false)]);
    }

    #[test]
    fn canonical_order_and_idempotence() {
        let t = parse_theory(
            "agents B,A. domain { r }. pred q/1. pred p/1. theory A { q(r) & p(A) & q(B) & q(A). } theory B { forall x: ~p(x). }",
        )
        .unwrap();
        let g = ground_theory(&t, &Limits::default()).unwrap();
        let names: Vec<&str> = (0..g.table.len()).map(|i| g.table.name(i)).collect();
        assert_eq!(names, vec!["p(B)", "p(A)", "p(r)", "q(B)", "q(A)", "q(r)"]);
        let mut back = t.clone();
        back.theories = g.theories.iter().map(|ss| ss.iter().map(|s| g.to_formula(s)).collect()).collect();
        let again = ground_theory(&back, &Limits::default()).unwrap();
        assert_eq!(again, g);
    }

    #[test]
    fn size_cap() {
        let t = parse_theory("agents A. domain { a,b,c,d }. pred p/3. theory A { forall x y z: p(x,y,z). }").unwrap();
        let limits = Limits { sentence_nodes: 50, ..Limits::default() };
        assert!(matches!(ground_theory(&t, &limits), Err(Error::Cap { .. })));
    }

    #[test]
    fn functions_fold() {
        let t = parse_theory("agents A,B. pred p/0. func d/0 objective = { () -> B }. theory A { K[d] p. }").unwrap();
        let g = ground_theory(&t, &Limits::default()).unwrap();
        assert_eq!(g.theories[0], vec![Ground::knows(1, Ground::Atom(0))]);
        let t = parse_theory("agents A,B. pred p/0. func d/1 objective = { (A) -> B }. theory A { K[d(B)] p. }").unwrap();
        assert!(ground_theory(&t, &Limits::default()).is_err());
    }
}
