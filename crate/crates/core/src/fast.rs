//! The rule fragment: recognition, translation to a logic program over split atoms,
//! well-founded evaluation of that program, and the mapping back to literal-determined pairs.

use crate::error::{Error, Result};
use crate::ground::{AtomId, Ground, GroundTheory};
use crate::truth::{Bounds, Tv};
use crate::worlds::{conjuncts, BeliefPair, Dpws, Frame, WorldSet};
use fixedbitset::FixedBitSet;
use std::collections::BTreeSet;
use std::fmt;

/// Atom of the split vocabulary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LpAtom {
    /// `p_A^+` (positive) or `p_A^-`.
    Split { atom: AtomId, agent: usize, positive: bool },
    /// Agent's known literals conflict.
    Incons(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Body {
    Const(bool),
    Atom(usize),
    Not(Box<Body>),
    And(Vec<Body>),
    Or(Vec<Body>),
}

impl Body {
    fn and(items: Vec<Body>) -> Body {
        let mut out = Vec::new();
        for b in items {
            match b {
                Body::Const(true) => {}
                Body::Const(false) => return Body::Const(false),
                Body::And(inner) => out.extend(inner),
                b => out.push(b),
            }
        }
        match out.len() {
            0 => Body::Const(true),
            1 => out.pop().unwrap(),
            _ => Body::And(out),
        }
    }

    fn or(items: Vec<Body>) -> Body {
        let mut out = Vec::new();
        for b in items {
            match b {
                Body::Const(false) => {}
                Body::Const(true) => return Body::Const(true),
                Body::Or(inner) => out.extend(inner),
                b => out.push(b),
            }
        }
        match out.len() {
            0 => Body::Const(false),
            1 => out.pop().unwrap(),
            _ => Body::Or(out),
        }
    }

    fn negate(b: Body) -> Body {
        match b {
            Body::Const(v) => Body::Const(!v),
            Body::Not(inner) => *inner,
            b => Body::Not(Box::new(b)),
        }
    }

    fn eval(&self, i: &Lp4, work: &mut u64) -> Bounds {
        *work += 1;
        match self {
            Body::Const(v) => Bounds::exact(*v),
            Body::Atom(a) => i.get(*a),
            Body::Not(b) => b.eval(i, work).not(),
            Body::And(bs) => {
                let mut acc = Bounds::TRUE;
                for b in bs {
                    acc = acc.and(b.eval(i, work));
                    // The stable operator evaluates mixed pairs, so both bounds must settle.
                    if !acc.possible && !acc.certain {
                        break;
                    }
                }
                acc
            }
            Body::Or(bs) => {
                let mut acc = Bounds::FALSE;
                for b in bs {
                    acc = acc.not().and(b.eval(i, work).not()).not();
                    if acc.certain && acc.possible {
                        break;
                    }
                }
                acc
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub head: usize,
    pub body: Body,
}

/// Propositional program over the split vocabulary of a ground theory.
#[derive(Clone, Debug)]
pub struct LogicProgram {
    pub atom_count: usize,
    pub agent_count: usize,
    pub rules: Vec<Rule>,
    names: Vec<String>,
    agents: Vec<String>,
}

impl LogicProgram {
    pub fn atom_index(&self, a: LpAtom) -> usize {
        match a {
            LpAtom::Split { atom, agent, positive } => (atom * self.agent_count + agent) * 2 + usize::from(!positive),
            LpAtom::Incons(agent) => self.atom_count * self.agent_count * 2 + agent,
        }
    }

    pub fn atom_at(&self, i: usize) -> LpAtom {
        let split = self.atom_count * self.agent_count * 2;
        if i >= split {
            return LpAtom::Incons(i - split);
        }
        LpAtom::Split { atom: i / 2 / self.agent_count, agent: i / 2 % self.agent_count, positive: i % 2 == 0 }
    }

    pub fn size(&self) -> usize {
        (self.atom_count * 2 + 1) * self.agent_count
    }

    pub fn name(&self, i: usize) -> String {
        match self.atom_at(i) {
            LpAtom::Split { atom, agent, positive } => {
                format!("{}_{}^{}", self.names[atom], self.agents[agent], if positive { '+' } else { '-' })
            }
            LpAtom::Incons(agent) => format!("incons_{}", self.agents[agent]),
        }
    }

    fn write_body(&self, f: &mut fmt::Formatter<'_>, b: &Body, nested: bool) -> fmt::Result {
        match b {
            Body::Const(v) => f.write_str(if *v { "true" } else { "false" }),
            Body::Atom(a) => f.write_str(&self.name(*a)),
            Body::Not(inner) => {
                f.write_str("~")?;
                self.write_body(f, inner, true)
            }
            Body::And(bs) | Body::Or(bs) => {
                let sep = if matches!(b, Body::And(_)) { " & " } else { " | " };
                if nested {
                    f.write_str("(")?;
                }
                for (i, x) in bs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    self.write_body(f, x, true)?;
                }
                if nested {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }

    /// Rules as text lines, `head <- body.` or `head.` for facts.
    pub fn lines(&self) -> Vec<String> {
        self.rules.iter().map(|r| format!("{}", RuleDisplay(self, r))).collect()
    }
}

struct RuleDisplay<'a>(&'a LogicProgram, &'a Rule);

impl fmt::Display for RuleDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let RuleDisplay(p, r) = self;
        f.write_str(&p.name(r.head))?;
        if r.body != Body::Const(true) {
            f.write_str(" <- ")?;
            p.write_body(f, &r.body, false)?;
        }
        f.write_str(".")
    }
}

impl fmt::Display for LogicProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{}", RuleDisplay(self, r))?;
        }
        Ok(())
    }
}

/// Four-valued interpretation of the split vocabulary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lp4 {
    pub certain: FixedBitSet,
    pub possible: FixedBitSet,
}

impl Lp4 {
    pub fn bottom(n: usize) -> Lp4 {
        let mut possible = FixedBitSet::with_capacity(n);
        possible.insert_range(..);
        Lp4 { certain: FixedBitSet::with_capacity(n), possible }
    }

    pub fn get(&self, a: usize) -> Bounds {
        Bounds { certain: self.certain.contains(a), possible: self.possible.contains(a) }
    }

    pub fn tv(&self, a: usize) -> Tv {
        self.get(a).tv().unwrap_or(Tv::U)
    }

    pub fn is_consistent(&self) -> bool {
        self.certain.is_subset(&self.possible)
    }
}

/// Work counters of one well-founded computation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LpStats {
    pub rounds: u64,
    pub body_nodes: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LpOptions {
    /// Adds `incons_A` with its consistency rules, and a disjunct `incons_B` on every
    /// subjective subformula nested inside `K_B`. Without it the output is the plain program.
    pub consistency_closure: bool,
}

/// Sentence conjunct outside the fragment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Offender {
    pub agent: usize,
    pub formula: Ground,
}

fn strip_literal(g: &Ground) -> Option<(AtomId, bool)> {
    match g {
        Ground::Atom(a) => Some((*a, true)),
        Ground::Not(h) => strip_literal(h).map(|(a, s)| (a, !s)),
        _ => None,
    }
}

struct Translator<'a> {
    lp: &'a LogicProgram,
    closure: bool,
}

impl Translator<'_> {
    fn split(&self, atom: AtomId, agent: usize, positive: bool) -> Body {
        Body::Atom(self.lp.atom_index(LpAtom::Split { atom, agent, positive }))
    }

    /// A world-independent formula, with negations pushed inwards.
    fn guard(&self, g: &Ground, neg: bool) -> Option<Body> {
        match g {
            Ground::Const(b) => Some(Body::Const(*b != neg)),
            Ground::Atom(_) => None,
            Ground::Not(h) => self.guard(h, !neg),
            Ground::And(hs) => {
                let items = hs.iter().map(|h| self.guard(h, neg)).collect::<Option<Vec<_>>>()?;
                Some(if neg { Body::or(items) } else { Body::and(items) })
            }
            Ground::Knows(b, arg) => {
                let k = self.scope(arg, *b, false)?;
                Some(if neg { Body::negate(k) } else { k })
            }
        }
    }

    /// The argument of `K_agent`, with negations pushed inwards.
    fn scope(&self, g: &Ground, agent: usize, neg: bool) -> Option<Body> {
        if !g.is_world_dependent() {
            let w = self.guard(g, neg)?;
            if self.closure {
                let incons = Body::Atom(self.lp.atom_index(LpAtom::Incons(agent)));
                return Some(Body::or(vec![w, incons]));
            }
            return Some(w);
        }
        match g {
            Ground::Atom(a) => Some(self.split(*a, agent, !neg)),
            Ground::Not(h) => self.scope(h, agent, !neg),
            Ground::And(hs) => {
                if neg && hs.iter().filter(|h| h.is_world_dependent()).count() > 1 {
                    // K distributes over a disjunction only when one side is subjective.
                    return None;
                }
                let items = hs.iter().map(|h| self.scope(h, agent, neg)).collect::<Option<Vec<_>>>()?;
                Some(if neg { Body::or(items) } else { Body::and(items) })
            }
            Ground::Const(_) | Ground::Knows(..) => unreachable!("world-independent"),
        }
    }

    /// Head literal and guard of one sentence conjunct, read as `guard => head`.
    fn rule(&self, c: &Ground) -> Option<((AtomId, bool), Body)> {
        if let Some(lit) = strip_literal(c) {
            return Some((lit, Body::Const(true)));
        }
        let Ground::Not(inner) = c else { return None };
        let Ground::And(items) = &**inner else { return None };
        let (last, guard) = items.split_last()?;
        let (atom, sign) = strip_literal(last)?;
        let head = (atom, !sign);
        let guard = guard.iter().map(|g| self.guard(g, false)).collect::<Option<Vec<_>>>()?;
        Some((head, Body::and(guard)))
    }
}

/// First sentence conjunct, in agent and sentence order, that is not a rule formula.
pub fn rule_offender(theory: &GroundTheory) -> Option<Offender> {
    let lp = empty_program(theory);
    let t = Translator { lp: &lp, closure: false };
    for (agent, sentences) in theory.theories.iter().enumerate() {
        for s in sentences {
            for c in conjuncts(s) {
                if t.rule(c).is_none() {
                    return Some(Offender { agent, formula: c.clone() });
                }
            }
        }
    }
    None
}

pub fn is_rule_theory(theory: &GroundTheory) -> bool {
    rule_offender(theory).is_none()
}

fn empty_program(theory: &GroundTheory) -> LogicProgram {
    LogicProgram {
        atom_count: theory.table.len(),
        agent_count: theory.agents.len(),
        rules: Vec::new(),
        names: (0..theory.table.len()).map(|a| theory.table.name(a).to_string()).collect(),
        agents: theory.agents.clone(),
    }
}

pub fn theory_to_lp(theory: &GroundTheory, options: LpOptions) -> Result<LogicProgram> {
    let mut lp = empty_program(theory);
    let mut rules = Vec::new();
    {
        let t = Translator { lp: &lp, closure: options.consistency_closure };
        for (agent, sentences) in theory.theories.iter().enumerate() {
            for s in sentences {
                for c in conjuncts(s) {
                    let ((atom, positive), body) = t.rule(c).ok_or_else(|| {
                        Error::NotRuleTheory(format!("{}: {}", theory.agents[agent], theory.display(c)))
                    })?;
                    if body != Body::Const(false) {
                        rules.push(Rule { head: lp.atom_index(LpAtom::Split { atom, agent, positive }), body });
                    }
                }
            }
        }
    }
    if options.consistency_closure {
        for agent in 0..lp.agent_count {
            let incons = lp.atom_index(LpAtom::Incons(agent));
            let conflicts = (0..lp.atom_count)
                .map(|atom| {
                    Body::And(vec![
                        Body::Atom(lp.atom_index(LpAtom::Split { atom, agent, positive: true })),
                        Body::Atom(lp.atom_index(LpAtom::Split { atom, agent, positive: false })),
                    ])
                })
                .collect();
            rules.push(Rule { head: incons, body: Body::or(conflicts) });
            for atom in 0..lp.atom_count {
                for positive in [true, false] {
                    let head = lp.atom_index(LpAtom::Split { atom, agent, positive });
                    rules.push(Rule { head, body: Body::Atom(incons) });
                }
            }
        }
    }
    lp.rules = rules;
    Ok(lp)
}

/// Fitting's operator Ψ_P on a four-valued interpretation.
pub fn fitting(lp: &LogicProgram, i: &Lp4) -> Lp4 {
    fitting_counted(lp, i, &mut 0)
}

fn fitting_counted(lp: &LogicProgram, i: &Lp4, work: &mut u64) -> Lp4 {
    let n = lp.size();
    let mut out = Lp4 { certain: FixedBitSet::with_capacity(n), possible: FixedBitSet::with_capacity(n) };
    for r in &lp.rules {
        let need_c = !out.certain.contains(r.head);
        let need_p = !out.possible.contains(r.head);
        if !need_c && !need_p {
            continue;
        }
        let v = r.body.eval(i, work);
        if v.certain {
            out.certain.insert(r.head);
        }
        if v.possible {
            out.possible.insert(r.head);
        }
    }
    out
}

/// Least x with Ψ_P(x, upper)_1 = x.
fn stable(lp: &LogicProgram, upper: &FixedBitSet, stats: &mut LpStats) -> FixedBitSet {
    let mut x = FixedBitSet::with_capacity(lp.size());
    loop {
        stats.rounds += 1;
        let next = fitting_counted(lp, &Lp4 { certain: x.clone(), possible: upper.clone() }, &mut stats.body_nodes).certain;
        if next == x {
            return x;
        }
        x = next;
    }
}

/// Well-founded model through the alternating fixpoint of the stable operator.
pub fn lp_well_founded(lp: &LogicProgram) -> (Lp4, LpStats) {
    let mut stats = LpStats::default();
    let mut i = Lp4::bottom(lp.size());
    loop {
        let certain = stable(lp, &i.possible, &mut stats);
        let possible = stable(lp, &certain, &mut stats);
        let next = Lp4 { certain, possible };
        if next == i {
            return (i, stats);
        }
        i = next;
    }
}

/// Per-agent known literals of a literal-determined pair; `None` marks the empty world set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiteralBeliefPair {
    pub agents: Vec<String>,
    pub conservative: Vec<Option<BTreeSet<(AtomId, bool)>>>,
    pub liberal: Vec<Option<BTreeSet<(AtomId, bool)>>>,
}

fn known(lp: &LogicProgram, bits: &FixedBitSet) -> Vec<Option<BTreeSet<(AtomId, bool)>>> {
    (0..lp.agent_count)
        .map(|agent| {
            let mut lits = BTreeSet::new();
            for atom in 0..lp.atom_count {
                for positive in [true, false] {
                    if bits.contains(lp.atom_index(LpAtom::Split { atom, agent, positive })) {
                        if lits.contains(&(atom, !positive)) {
                            return None;
                        }
                        lits.insert((atom, positive));
                    }
                }
            }
            Some(lits)
        })
        .collect()
}

/// μ: a four-valued split interpretation as a pair of literal sets.
pub fn mu(lp: &LogicProgram, i: &Lp4) -> LiteralBeliefPair {
    LiteralBeliefPair { agents: lp.agents.clone(), conservative: known(lp, &i.certain), liberal: known(lp, &i.possible) }
}

impl LiteralBeliefPair {
    /// Value of `K_agent l`.
    pub fn knows(&self, agent: usize, atom: AtomId, positive: bool) -> Tv {
        let holds = |side: &Option<BTreeSet<(AtomId, bool)>>| side.as_ref().map_or(true, |s| s.contains(&(atom, positive)));
        match (holds(&self.conservative[agent]), holds(&self.liberal[agent])) {
            (true, true) => Tv::T,
            (false, false) => Tv::F,
            (false, true) => Tv::U,
            (true, false) => Tv::T,
        }
    }

    fn side(frame: &Frame, side: &[Option<BTreeSet<(AtomId, bool)>>]) -> Result<Dpws> {
        let sets = frame
            .agents
            .iter()
            .zip(side)
            .map(|(af, lits)| match lits {
                None => Ok(WorldSet::empty(af)),
                Some(lits) => WorldSet::from_literals(af, lits.iter().copied()),
            })
            .collect::<Result<_>>()?;
        Ok(Dpws { sets })
    }

    /// Materializes the world sets over `frame`.
    pub fn to_belief_pair(&self, frame: &Frame) -> Result<BeliefPair> {
        Ok(BeliefPair::new(Self::side(frame, &self.conservative)?, Self::side(frame, &self.liberal)?))
    }
}

/// Well-founded model of a rule theory without enumerating worlds.
pub fn fast_well_founded(theory: &GroundTheory) -> Result<(LiteralBeliefPair, LpStats)> {
    let lp = theory_to_lp(theory, LpOptions { consistency_closure: true })?;
    let (wf, stats) = lp_well_founded(&lp);
    Ok((mu(&lp, &wf), stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aft::Engine;
    use crate::ground::ground_theory;
    use crate::limits::Limits;
    use crate::syntax::parse_theory;

    fn ground(src: &str) -> GroundTheory {
        ground_theory(&parse_theory(src).unwrap(), &Limits::default()).unwrap()
    }

    const WORKED: &str = "agents A,B. pred p/0. pred q/0.
        theory A { K[B] ~(~p | ~K[A] ~q) => p. K[B] q => ~q. }
        theory B { q. K[A] p => p. }";

    #[test]
    fn worked_example_program() {
        let g = ground(WORKED);
        let lp = theory_to_lp(&g, LpOptions { consistency_closure: false }).unwrap();
        assert_eq!(lp.lines(), vec!["p_A^+ <- p_B^+ & q_A^-.", "q_A^- <- q_B^+.", "q_B^+.", "p_B^+ <- p_A^+."]);
        let (wf, _) = lp_well_founded(&lp);
        let truths: Vec<String> = (0..lp.size()).filter(|&i| wf.tv(i) == Tv::T).map(|i| lp.name(i)).collect();
        assert_eq!(truths, vec!["q_A^-", "q_B^+"]);
        assert!((0..lp.size()).all(|i| wf.tv(i) != Tv::U));
    }

    #[test]
    fn candy_program_and_model() {
        let g = ground("agents M,D. pred c/0. theory D { K[M] c => c. } theory M { K[D] c => c. }");
        let lp = theory_to_lp(&g, LpOptions { consistency_closure: false }).unwrap();
        assert_eq!(lp.lines(), vec!["c_M^+ <- c_D^+.", "c_D^+ <- c_M^+."]);
        let (b, _) = fast_well_founded(&g).unwrap();
        let e = Engine::new(g, Limits::default()).unwrap();
        assert_eq!(b.to_belief_pair(&e.frame).unwrap(), e.well_founded().unwrap());
    }

    #[test]
    fn vote_is_not_a_rule_theory() {
        let g = ground(
            "agents A,B,C. pred yes/0. theory A { yes <=> K[B] yes | K[C] yes. } theory B { K[A] yes => yes. } theory C { yes. }",
        );
        let off = rule_offender(&g).unwrap();
        assert_eq!(off.agent, 0);
        assert!(!is_rule_theory(&g));
        assert!(matches!(theory_to_lp(&g, LpOptions { consistency_closure: false }), Err(Error::NotRuleTheory(_))));
    }

    #[test]
    fn textbook_programs() {
        // p <- ~q. q <- ~p.  encoded as single-agent rules over K.
        let g = ground("agents A. pred p/0. pred q/0. theory A { ~K[A] q => p. ~K[A] p => q. }");
        let lp = theory_to_lp(&g, LpOptions { consistency_closure: false }).unwrap();
        let (wf, _) = lp_well_founded(&lp);
        let p = lp.atom_index(LpAtom::Split { atom: 0, agent: 0, positive: true });
        let q = lp.atom_index(LpAtom::Split { atom: 1, agent: 0, positive: true });
        assert_eq!((wf.tv(p), wf.tv(q)), (Tv::U, Tv::U));

        let g = ground("agents A. pred p/0. pred q/0. theory A { p. K[A] p | K[A] q => q. }");
        let lp = theory_to_lp(&g, LpOptions { consistency_closure: false }).unwrap();
        let (wf, _) = lp_well_founded(&lp);
        let q = lp.atom_index(LpAtom::Split { atom: 1, agent: 0, positive: true });
        assert_eq!(wf.tv(q), Tv::T);
    }

    #[test]
    fn empty_theory_gives_empty_program() {
        let g = ground("agents A,B. pred p/0. theory A { } theory B { }");
        assert!(theory_to_lp(&g, LpOptions { consistency_closure: false }).unwrap().rules.is_empty());
    }

    #[test]
    fn inconsistent_agent_knows_everything() {
        let g = ground("agents A,B. pred p/0. pred q/0. theory A { p. ~p. } theory B { K[A] q => q. }");
        let (b, _) = fast_well_founded(&g).unwrap();
        assert_eq!(b.conservative[0], None);
        assert_eq!(b.knows(1, 1, true), Tv::T);
        let e = Engine::new(g, Limits::default()).unwrap();
        assert_eq!(b.to_belief_pair(&e.frame).unwrap(), e.well_founded().unwrap());
    }

    #[test]
    fn nested_modal_under_inconsistent_agent() {
        // B is inconsistent, so K_B K_A q holds although A does not know q.
        let g = ground("agents A,B,C. pred p/0. pred q/0. theory A { } theory B { p. ~p. } theory C { K[B] K[A] q => p. }");
        let (b, _) = fast_well_founded(&g).unwrap();
        assert_eq!(b.knows(2, 0, true), Tv::T);
        let e = Engine::new(g, Limits::default()).unwrap();
        assert_eq!(b.to_belief_pair(&e.frame).unwrap(), e.well_founded().unwrap());
    }
}
