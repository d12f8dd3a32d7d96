//! Query-driven decision procedure: says-atom translation, minimal literal sets, and the
//! recursive communication procedure with loop handling.

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;
use std::fmt::Write as _;

use crate::ael::satisfiable;
use crate::error::{Error, Result};
use crate::ground::{AtomId, Ground, GroundTheory};
use crate::limits::Limits;
use crate::truth::Tv;

/// `K_agent formula`, read as "agent says formula".
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SaysAtom {
    pub agent: usize,
    pub formula: Ground,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SaysLiteral {
    pub atom: SaysAtom,
    pub negated: bool,
}

pub type SaysLiteralSet = BTreeSet<SaysLiteral>;

impl SaysLiteral {
    pub fn show(&self, theory: &GroundTheory) -> String {
        let says = format!("{} says {}", theory.agents[self.atom.agent], theory.display(&self.atom.formula));
        if self.negated {
            format!("~{says}")
        } else {
            says
        }
    }
}

pub fn show_set(set: &SaysLiteralSet, theory: &GroundTheory) -> String {
    let items: Vec<String> = set.iter().map(|l| l.show(theory)).collect();
    format!("{{{}}}", items.join("; "))
}

/// An objective theory over the ground atoms followed by two markers per says-atom:
/// `p+` at `atom_count + 2i` and `p-` at `atom_count + 2i + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SaysTranslation {
    pub atom_count: usize,
    pub says: Vec<SaysAtom>,
    pub sentences: Vec<Ground>,
}

impl SaysTranslation {
    pub fn new(sentences: &[Ground], atom_count: usize) -> SaysTranslation {
        let mut found = BTreeSet::new();
        for s in sentences {
            let mut tops = Vec::new();
            s.top_modals(&mut tops);
            for m in tops {
                if let Ground::Knows(agent, arg) = m {
                    found.insert(SaysAtom { agent: *agent, formula: (**arg).clone() });
                }
            }
        }
        let mut tr = SaysTranslation { atom_count, says: found.into_iter().collect(), sentences: Vec::new() };
        tr.sentences = sentences.iter().map(|s| tr.replace(s, true)).collect();
        tr
    }

    pub fn size(&self) -> usize {
        self.atom_count + 2 * self.says.len()
    }

    pub fn plus(&self, i: usize) -> AtomId {
        self.atom_count + 2 * i
    }

    pub fn minus(&self, i: usize) -> AtomId {
        self.atom_count + 2 * i + 1
    }

    fn index(&self, agent: usize, formula: &Ground) -> usize {
        self.says.iter().position(|s| s.agent == agent && s.formula == *formula).expect("collected")
    }

    fn replace(&self, g: &Ground, positive: bool) -> Ground {
        match g {
            Ground::Const(_) | Ground::Atom(_) => g.clone(),
            Ground::Not(h) => Ground::not(self.replace(h, !positive)),
            Ground::And(hs) => Ground::and(hs.iter().map(|h| self.replace(h, positive))),
            Ground::Knows(agent, arg) => {
                let i = self.index(*agent, arg);
                Ground::Atom(if positive { self.plus(i) } else { self.minus(i) })
            }
        }
    }

    pub fn atom_name(&self, a: AtomId, theory: &GroundTheory) -> String {
        if a < self.atom_count {
            return theory.table.name(a).to_string();
        }
        let i = (a - self.atom_count) / 2;
        let sign = if (a - self.atom_count) % 2 == 0 { '+' } else { '-' };
        let s = &self.says[i];
        format!("p{sign}[{} says {}]", theory.agents[s.agent], theory.display(&s.formula))
    }

    pub fn show(&self, g: &Ground, theory: &GroundTheory) -> String {
        match g {
            Ground::Const(b) => b.to_string(),
            Ground::Atom(a) => self.atom_name(*a, theory),
            Ground::Not(h) => match &**h {
                Ground::And(hs) if hs.iter().all(|x| matches!(x, Ground::Not(_))) => {
                    let items: Vec<String> = hs
                        .iter()
                        .map(|x| match x {
                            Ground::Not(y) => self.show(y, theory),
                            _ => unreachable!(),
                        })
                        .collect();
                    format!("({})", items.join(" | "))
                }
                h => format!("~{}", self.show(h, theory)),
            },
            Ground::And(hs) => {
                let items: Vec<String> = hs.iter().map(|h| self.show(h, theory)).collect();
                format!("({})", items.join(" & "))
            }
            Ground::Knows(..) => unreachable!("replaced by markers"),
        }
    }

    /// `L^S`: `A says φ` where `p-` is true, `~A says φ` where `p+` is false.
    pub fn literals_of(&self, s: &PartialStructure) -> SaysLiteralSet {
        let mut out = SaysLiteralSet::new();
        for (i, atom) in self.says.iter().enumerate() {
            if s.0[self.minus(i)] == Some(true) {
                out.insert(SaysLiteral { atom: atom.clone(), negated: false });
            }
            if s.0[self.plus(i)] == Some(false) {
                out.insert(SaysLiteral { atom: atom.clone(), negated: true });
            }
        }
        out
    }
}

/// τ of one agent's theory.
pub fn says_translate(theory: &GroundTheory, agent: usize) -> SaysTranslation {
    SaysTranslation::new(&theory.theories[agent], theory.table.len())
}

/// Three-valued assignment over a translation's vocabulary.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialStructure(pub Vec<Option<bool>>);

impl PartialStructure {
    pub fn unknown(size: usize) -> PartialStructure {
        PartialStructure(vec![None; size])
    }

    /// `self ≤_p other`: every assigned value of `self` is kept by `other`.
    pub fn le_p(&self, other: &PartialStructure) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a.is_none() || a == b)
    }
}

fn eval_objective(g: &Ground, world: &[bool]) -> bool {
    match g {
        Ground::Const(b) => *b,
        Ground::Atom(a) => world[*a],
        Ground::Not(h) => !eval_objective(h, world),
        Ground::And(hs) => hs.iter().all(|h| eval_objective(h, world)),
        Ground::Knows(..) => panic!("modal formula in an objective theory"),
    }
}

/// Whether some total expansion of `s` satisfies `sentences`, by enumerating the unknown atoms
/// that occur in them.
pub fn is_partial_model(sentences: &[Ground], s: &PartialStructure, limits: &Limits) -> Result<bool> {
    let mut atoms = Vec::new();
    for g in sentences {
        g.objective_atoms(&mut atoms);
    }
    atoms.sort_unstable();
    atoms.dedup();
    atoms.retain(|&a| s.0[a].is_none());
    if atoms.len() > limits.expansion_vars {
        return Err(Error::cap("unknown atoms to expand", atoms.len() as u64, limits.expansion_vars as u64));
    }
    let mut world: Vec<bool> = s.0.iter().map(|v| v.unwrap_or(false)).collect();
    for mask in 0..1u64 << atoms.len() {
        for (i, &a) in atoms.iter().enumerate() {
            world[a] = mask >> i & 1 == 1;
        }
        if sentences.iter().all(|g| eval_objective(g, &world)) {
            return Ok(true);
        }
    }
    Ok(false)
}

fn substitute(g: &Ground, s: &PartialStructure) -> Ground {
    match g {
        Ground::Const(_) => g.clone(),
        Ground::Atom(a) => s.0[*a].map_or_else(|| g.clone(), Ground::Const),
        Ground::Not(h) => Ground::not(substitute(h, s)),
        Ground::And(hs) => Ground::and(hs.iter().map(|h| substitute(h, s))),
        Ground::Knows(..) => g.clone(),
    }
}

/// Partial-model check for translated theories. Markers occur with one polarity only, so
/// unknown `p+` can be taken true and unknown `p-` false before a satisfiability check.
pub fn is_partial_model_polarity(tr: &SaysTranslation, s: &PartialStructure, limits: &Limits) -> Result<bool> {
    let mut filled = s.clone();
    for i in 0..tr.says.len() {
        filled.0[tr.plus(i)].get_or_insert(true);
        filled.0[tr.minus(i)].get_or_insert(false);
    }
    let fixed: Vec<Ground> = tr.sentences.iter().map(|g| substitute(g, &filled)).collect();
    satisfiable(&fixed, limits)
}

fn greedy_minimize(s: &PartialStructure, mut consistent: impl FnMut(&PartialStructure) -> Result<bool>) -> Result<PartialStructure> {
    let mut cur = s.clone();
    for a in 0..cur.0.len() {
        if cur.0[a].is_none() {
            continue;
        }
        let mut weaker = cur.clone();
        weaker.0[a] = None;
        if !consistent(&weaker)? {
            cur = weaker;
        }
    }
    Ok(cur)
}

/// A `≤_p`-minimal `S' ≤_p s` that is not a partial model: assignments are dropped greedily
/// in atom order.
pub fn min_incons(sentences: &[Ground], s: &PartialStructure, limits: &Limits) -> Result<PartialStructure> {
    if is_partial_model(sentences, s, limits)? {
        return Err(Error::Precondition("structure is a partial model".into()));
    }
    greedy_minimize(s, |x| is_partial_model(sentences, x, limits))
}

/// Every `S` coherent on the markers: per says-atom, unknown, `p-` true, or `p+` false.
fn coherent_structures(tr: &SaysTranslation, limits: &Limits) -> Result<Vec<PartialStructure>> {
    let m = tr.says.len();
    if m > limits.says_atoms {
        return Err(Error::cap("says-atoms in a query", m as u64, limits.says_atoms as u64));
    }
    let mut out = Vec::with_capacity(3usize.pow(m as u32));
    for code in 0..3usize.pow(m as u32) {
        let mut s = PartialStructure::unknown(tr.size());
        let mut c = code;
        for i in 0..m {
            match c % 3 {
                1 => s.0[tr.minus(i)] = Some(true),
                2 => s.0[tr.plus(i)] = Some(false),
                _ => {}
            }
            c /= 3;
        }
        out.push(s);
    }
    Ok(out)
}

/// Minimal says-literal sets that make `alpha` true relative to the agent's theory.
/// Says-atoms of `alpha` itself are part of the marker vocabulary.
pub fn query_minimize(theory: &GroundTheory, agent: usize, alpha: &Ground, limits: &Limits) -> Result<Vec<SaysLiteralSet>> {
    let mut sentences = theory.theories[agent].clone();
    sentences.push(Ground::not(alpha.clone()));
    let tr = SaysTranslation::new(&sentences, theory.table.len());
    let mut found = BTreeSet::new();
    for s in coherent_structures(&tr, limits)? {
        if !is_partial_model_polarity(&tr, &s, limits)? {
            let min = greedy_minimize(&s, |x| is_partial_model_polarity(&tr, x, limits))?;
            found.insert(tr.literals_of(&min));
        }
    }
    Ok(found.into_iter().collect())
}

fn eval_given(g: &Ground, lits: &SaysLiteralSet, world: &[bool]) -> Tv {
    match g {
        Ground::Const(b) => Tv::from_bool(*b),
        Ground::Atom(a) => Tv::from_bool(world[*a]),
        Ground::Not(h) => eval_given(h, lits, world).not(),
        Ground::And(hs) => hs.iter().fold(Tv::T, |acc, h| acc.and(eval_given(h, lits, world))),
        Ground::Knows(agent, arg) => {
            let atom = SaysAtom { agent: *agent, formula: (**arg).clone() };
            if lits.contains(&SaysLiteral { atom: atom.clone(), negated: false }) {
                Tv::T
            } else if lits.contains(&SaysLiteral { atom, negated: true }) {
                Tv::F
            } else {
                Tv::U
            }
        }
    }
}

/// Whether `lits` makes `phi` true relative to the agent's theory: `phi` is t in every
/// structure where the theory is not f.
pub fn holds_given_literals(
    theory: &GroundTheory,
    agent: usize,
    phi: &Ground,
    lits: &SaysLiteralSet,
    limits: &Limits,
) -> Result<bool> {
    for l in lits {
        if !l.negated && lits.contains(&SaysLiteral { atom: l.atom.clone(), negated: true }) {
            return Err(Error::Invalid("literal set contains a says-atom and its negation".into()));
        }
    }
    let t = &theory.theories[agent];
    let mut atoms = Vec::new();
    for g in t.iter().chain([phi]) {
        g.objective_atoms(&mut atoms);
    }
    atoms.sort_unstable();
    atoms.dedup();
    if atoms.len() > limits.expansion_vars {
        return Err(Error::cap("atoms to enumerate", atoms.len() as u64, limits.expansion_vars as u64));
    }
    let mut world = vec![false; theory.table.len()];
    for mask in 0..1u64 << atoms.len() {
        for (i, &a) in atoms.iter().enumerate() {
            world[a] = mask >> i & 1 == 1;
        }
        let tv = t.iter().fold(Tv::T, |acc, g| acc.and(eval_given(g, lits, &world)));
        if tv != Tv::F && eval_given(phi, lits, &world) != Tv::T {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryVertex {
    pub agent: usize,
    pub formula: Ground,
    pub label: Option<Tv>,
    /// Labelled by loop detection rather than by asking.
    pub loop_detected: bool,
    pub sets: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetVertex {
    pub literals: SaysLiteralSet,
    /// `(edge label, query vertex)`; the label is t for `k says ψ` and f for its negation.
    pub edges: Vec<(bool, usize)>,
}

/// A tree rooted at query vertex 0.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QueryGraph {
    pub queries: Vec<QueryVertex>,
    pub sets: Vec<SetVertex>,
}

impl QueryGraph {
    pub fn root(&self) -> &QueryVertex {
        &self.queries[0]
    }

    pub fn vertex_count(&self) -> usize {
        self.queries.len() + self.sets.len()
    }

    pub fn to_dot(&self, theory: &GroundTheory) -> String {
        let esc = |s: String| s.replace('"', "\\\"");
        let mut out = String::from("digraph query {\n");
        for (i, q) in self.queries.iter().enumerate() {
            let label = q.label.map_or("-".to_string(), |t| t.to_string());
            let looped = if q.loop_detected { " (loop)" } else { "" };
            let text = format!("<{}:{}>, {label}{looped}", theory.agents[q.agent], theory.display(&q.formula));
            let _ = writeln!(out, "  q{i} [label=\"{}\"];", esc(text));
        }
        for (i, s) in self.sets.iter().enumerate() {
            let _ = writeln!(out, "  s{i} [shape=box, label=\"{}\"];", esc(show_set(&s.literals, theory)));
        }
        for (i, q) in self.queries.iter().enumerate() {
            for s in &q.sets {
                let _ = writeln!(out, "  q{i} -> s{s};");
            }
        }
        for (i, s) in self.sets.iter().enumerate() {
            for (edge, q) in &s.edges {
                let _ = writeln!(out, "  s{i} -> q{q} [label=\"{}\"];", if *edge { "t" } else { "f" });
            }
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    pub asker: usize,
    pub askee: usize,
    pub formula: Ground,
    pub answer: Tv,
}

/// One query vertex on the path from the root; `edge` labels the edge into it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hop {
    pub agent: usize,
    pub formula: Ground,
    pub edge: Option<bool>,
}

/// Transport between agents. Only subqueries and their answers cross it; the graph hooks
/// let an observer record the query graph.
pub trait MessageBus {
    /// Delivers `formula` to `askee`, whose reply is the answer. `path` ends with the new vertex.
    fn ask(&mut self, askee: usize, formula: &Ground, path: &[Hop]) -> Result<Tv>;
    /// The current query produced a literal-set vertex.
    fn open_set(&mut self, _literals: &SaysLiteralSet) -> Result<()> {
        Ok(())
    }
    /// A literal of the current set closed a loop and was labelled without asking.
    fn loop_closed(&mut self, _agent: usize, _formula: &Ground, _edge: bool, _label: Tv) -> Result<()> {
        Ok(())
    }
}

/// The procedure one agent runs for a query addressed to it, reading only its own theory.
pub fn respond(
    theory: &GroundTheory,
    me: usize,
    formula: &Ground,
    path: &[Hop],
    bus: &mut dyn MessageBus,
    limits: &Limits,
) -> Result<Tv> {
    let sets = query_minimize(theory, me, formula, limits)?;
    respond_with_sets(&sets, path, bus)
}

/// The rest of `respond` once the minimal literal sets of the query are known.
pub fn respond_with_sets(sets: &[SaysLiteralSet], path: &[Hop], bus: &mut dyn MessageBus) -> Result<Tv> {
    let mut all_refuted = true;
    for set in sets {
        bus.open_set(set)?;
        let mut satisfied = true;
        let mut refuted = false;
        for lit in set {
            let edge = !lit.negated;
            let (agent, psi) = (lit.atom.agent, &lit.atom.formula);
            let ancestor = path.iter().rposition(|h| h.agent == agent && h.formula == *psi);
            let label = match ancestor {
                Some(i) => {
                    let positive = edge && path[i + 1..].iter().all(|h| h.edge == Some(true));
                    let label = if positive { Tv::F } else { Tv::U };
                    bus.loop_closed(agent, psi, edge, label)?;
                    label
                }
                None => {
                    let mut next = path.to_vec();
                    next.push(Hop { agent, formula: psi.clone(), edge: Some(edge) });
                    bus.ask(agent, psi, &next)?
                }
            };
            let expected = Tv::from_bool(edge);
            satisfied &= label == expected;
            refuted |= label == expected.not();
        }
        if satisfied {
            return Ok(Tv::T);
        }
        all_refuted &= refuted;
    }
    Ok(if all_refuted { Tv::F } else { Tv::U })
}

/// Sequential, deterministic bus that runs every agent in this process and records the
/// query graph and the communication trace.
pub struct InProcessBus<'a> {
    theory: &'a GroundTheory,
    limits: &'a Limits,
    pub graph: QueryGraph,
    pub trace: Vec<TraceEvent>,
    /// Query vertex being answered and its most recent set vertex, innermost last.
    stack: Vec<(usize, Option<usize>)>,
    /// Each agent's minimal literal sets per formula; a local computation, so reuse is invisible.
    minimized: HashMap<(usize, Ground), Rc<Vec<SaysLiteralSet>>>,
}

impl<'a> InProcessBus<'a> {
    pub fn new(theory: &'a GroundTheory, limits: &'a Limits) -> InProcessBus<'a> {
        InProcessBus { theory, limits, graph: QueryGraph::default(), trace: Vec::new(), stack: Vec::new(), minimized: HashMap::new() }
    }

    fn add_query(&mut self, agent: usize, formula: &Ground, edge: Option<bool>) -> Result<usize> {
        if self.graph.vertex_count() >= self.limits.query_vertices {
            return Err(Error::cap("query graph vertices", self.graph.vertex_count() as u64 + 1, self.limits.query_vertices as u64));
        }
        let id = self.graph.queries.len();
        self.graph.queries.push(QueryVertex { agent, formula: formula.clone(), label: None, loop_detected: false, sets: Vec::new() });
        if let (Some(edge), Some(&(_, Some(set)))) = (edge, self.stack.last()) {
            self.graph.sets[set].edges.push((edge, id));
        }
        Ok(id)
    }

    fn run(&mut self, id: usize, path: &[Hop]) -> Result<Tv> {
        let (agent, formula) = (self.graph.queries[id].agent, self.graph.queries[id].formula.clone());
        self.stack.push((id, None));
        let key = (agent, formula);
        let sets = match self.minimized.get(&key) {
            Some(sets) => Rc::clone(sets),
            None => match query_minimize(self.theory, agent, &key.1, self.limits) {
                Ok(sets) => {
                    let sets = Rc::new(sets);
                    self.minimized.insert(key, Rc::clone(&sets));
                    sets
                }
                Err(e) => {
                    self.stack.pop();
                    return Err(e);
                }
            },
        };
        let answer = respond_with_sets(&sets, path, self);
        self.stack.pop();
        let answer = answer?;
        self.graph.queries[id].label = Some(answer);
        Ok(answer)
    }

    /// Answers `⟨agent:formula⟩` posed from outside the system.
    pub fn decide(&mut self, agent: usize, formula: &Ground) -> Result<Tv> {
        self.graph = QueryGraph::default();
        self.trace.clear();
        let id = self.add_query(agent, formula, None)?;
        self.run(id, &[Hop { agent, formula: formula.clone(), edge: None }])
    }
}

impl MessageBus for InProcessBus<'_> {
    fn ask(&mut self, askee: usize, formula: &Ground, path: &[Hop]) -> Result<Tv> {
        let &(asker_vertex, _) = self.stack.last().ok_or_else(|| Error::Invalid("ask outside a query".into()))?;
        let asker = self.graph.queries[asker_vertex].agent;
        let edge = path.last().and_then(|h| h.edge);
        let id = self.add_query(askee, formula, edge)?;
        let answer = self.run(id, path)?;
        self.trace.push(TraceEvent { asker, askee, formula: formula.clone(), answer });
        Ok(answer)
    }

    fn open_set(&mut self, literals: &SaysLiteralSet) -> Result<()> {
        if self.graph.vertex_count() >= self.limits.query_vertices {
            return Err(Error::cap("query graph vertices", self.graph.vertex_count() as u64 + 1, self.limits.query_vertices as u64));
        }
        let set = self.graph.sets.len();
        self.graph.sets.push(SetVertex { literals: literals.clone(), edges: Vec::new() });
        let top = self.stack.last_mut().ok_or_else(|| Error::Invalid("set outside a query".into()))?;
        top.1 = Some(set);
        self.graph.queries[top.0].sets.push(set);
        Ok(())
    }

    fn loop_closed(&mut self, agent: usize, formula: &Ground, edge: bool, label: Tv) -> Result<()> {
        let id = self.add_query(agent, formula, Some(edge))?;
        self.graph.queries[id].label = Some(label);
        self.graph.queries[id].loop_detected = true;
        Ok(())
    }
}

/// Outcome of the decision procedure for one directed query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    pub answer: Tv,
    pub graph: QueryGraph,
    pub trace: Vec<TraceEvent>,
}

impl Decision {
    /// Subqueries sent to a different agent than the asker.
    pub fn remote_events(&self) -> usize {
        self.trace.iter().filter(|e| e.asker != e.askee).count()
    }
}

pub fn decide(theory: &GroundTheory, agent: usize, formula: &Ground, limits: &Limits) -> Result<Decision> {
    let mut bus = InProcessBus::new(theory, limits);
    let answer = bus.decide(agent, formula)?;
    Ok(Decision { answer, graph: bus.graph, trace: bus.trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::ground_with;
    use crate::syntax::{parse_formula, parse_theory};

    fn setup(src: &str, query: &str) -> (GroundTheory, Ground) {
        let t = parse_theory(src).unwrap();
        let q = parse_formula(query, &t).unwrap();
        let (g, mut extra) = ground_with(&t, &[q], &Limits::default()).unwrap();
        (g, extra.remove(0))
    }

    #[test]
    fn no_says_atoms_is_unchanged() {
        let (g, _) = setup("agents A. pred p/0. pred q/0. theory A { p => q. }", "q");
        let tr = says_translate(&g, 0);
        assert!(tr.says.is_empty());
        assert_eq!(tr.sentences, g.theories[0]);
    }

    #[test]
    fn polarity_picks_the_marker() {
        // A bare negated says-atom is a negative occurrence; under an antecedent negation it is positive.
        let (g, _) = setup("agents A,B. pred r/0. pred z/0. theory A { ~K[B] r. ~K[B] z => z. }", "r");
        let tr = says_translate(&g, 0);
        assert_eq!(tr.sentences[0], Ground::not(Ground::Atom(tr.minus(0))));
        let z = g.table.by_name("z").unwrap();
        assert_eq!(tr.sentences[1], Ground::not(Ground::and([Ground::not(Ground::Atom(tr.plus(1))), Ground::not(Ground::Atom(z))])));
    }

    #[test]
    fn entailed_query_needs_nothing() {
        let (g, q) = setup("agents A. pred p/0. theory A { p. }", "p");
        assert_eq!(query_minimize(&g, 0, &q, &Limits::default()).unwrap(), vec![SaysLiteralSet::new()]);
        let d = decide(&g, 0, &q, &Limits::default()).unwrap();
        assert_eq!(d.answer, Tv::T);
        assert_eq!(d.graph.queries.len(), 1);
        assert_eq!(d.graph.sets.len(), 1);
        assert!(d.graph.sets[0].literals.is_empty());
    }

    #[test]
    fn unit_clause_against_fixed_atom() {
        // Exhaustive over the one atom: p is forced, so fixing p false has no expansion.
        let p = Ground::Atom(0);
        let mut s = PartialStructure::unknown(1);
        let lim = Limits::default();
        assert!(is_partial_model(std::slice::from_ref(&p), &s, &lim).unwrap());
        s.0[0] = Some(false);
        assert!(!is_partial_model(std::slice::from_ref(&p), &s, &lim).unwrap());
        s.0[0] = Some(true);
        assert!(is_partial_model(&[p], &s, &lim).unwrap());
    }

    #[test]
    fn min_incons_rejects_partial_models() {
        let s = PartialStructure::unknown(1);
        assert!(matches!(min_incons(&[Ground::Atom(0)], &s, &Limits::default()), Err(Error::Precondition(_))));
    }

    #[test]
    fn candy_literal_set_holds() {
        let (g, c) = setup("agents M,D. pred c/0. theory D { K[M] c => c. } theory M { K[D] c => c. }", "c");
        let lim = Limits::default();
        let d = g.agent_index("D").unwrap();
        let m = g.agent_index("M").unwrap();
        let says = SaysLiteral { atom: SaysAtom { agent: m, formula: c.clone() }, negated: false };
        assert!(holds_given_literals(&g, d, &c, &[says.clone()].into(), &lim).unwrap());
        assert!(!holds_given_literals(&g, d, &c, &SaysLiteralSet::new(), &lim).unwrap());
        assert_eq!(query_minimize(&g, d, &c, &lim).unwrap(), vec![[says].into()]);
        assert!(holds_given_literals(&g, d, &Ground::Const(true), &SaysLiteralSet::new(), &lim).unwrap());
    }
}
