//! Semantic operators on DPWSs and belief pairs, and the five model constructions.

use crate::error::{Error, Result};
use crate::ground::{ground_theory, AtomId, Ground, GroundTheory};
use crate::limits::Limits;
use crate::syntax::DistributedTheory;
use crate::truth::{Bounds, Tv};
use crate::worlds::{conjuncts, BeliefPair, Dpws, Frame, Interpretation, WorldSet};
use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeSet, HashMap};

/// Formula compiled against a slot layout: slot i is bit i of the world mask.
#[derive(Clone, Debug)]
enum Node {
    Const(bool),
    Slot(u32),
    Not(Box<Node>),
    And(Vec<Node>),
    Modal(usize),
}

impl Node {
    fn eval(&self, world: u64, vals: &[Bounds]) -> Bounds {
        match self {
            Node::Const(b) => Bounds::exact(*b),
            Node::Slot(i) => Bounds::exact(world >> i & 1 == 1),
            Node::Not(n) => n.eval(world, vals).not(),
            Node::And(ns) => {
                let mut acc = Bounds::TRUE;
                for n in ns {
                    acc = acc.and(n.eval(world, vals));
                    // Stable revision mixes bounds, so `certain` may exceed `possible`.
                    if !acc.possible && !acc.certain {
                        break;
                    }
                }
                acc
            }
            Node::Modal(m) => vals[*m],
        }
    }
}

#[derive(Clone, Debug)]
struct Modal {
    agent: usize,
    atoms: Vec<AtomId>,
    body: Node,
}

#[derive(Clone, Debug, Default)]
struct AgentProgram {
    /// Sentences per factor, over that factor's bit layout.
    factors: Vec<Vec<Node>>,
    /// Sentences without objective atoms.
    free: Vec<Node>,
}

/// The five model constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Semantics {
    Supported,
    KripkeKleene,
    Stable,
    PartialStable,
    WellFounded,
}

impl Semantics {
    pub const ALL: [Semantics; 5] =
        [Semantics::Supported, Semantics::KripkeKleene, Semantics::Stable, Semantics::PartialStable, Semantics::WellFounded];

    pub fn code(self) -> &'static str {
        match self {
            Semantics::Supported => "sup",
            Semantics::KripkeKleene => "kk",
            Semantics::Stable => "st",
            Semantics::PartialStable => "pst",
            Semantics::WellFounded => "wf",
        }
    }

    /// Whether the semantics yields exactly one model.
    pub fn is_unique(self) -> bool {
        matches!(self, Semantics::KripkeKleene | Semantics::WellFounded)
    }
}

impl std::str::FromStr for Semantics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Semantics> {
        Semantics::ALL
            .into_iter()
            .find(|x| x.code() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown semantics {s}; expected sup, kk, st, pst or wf")))
    }
}

impl std::fmt::Display for Semantics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.code())
    }
}

/// A ground theory compiled for repeated operator application.
#[derive(Clone, Debug)]
pub struct Engine {
    pub theory: GroundTheory,
    pub frame: Frame,
    pub limits: Limits,
    modals: Vec<Modal>,
    modal_index: HashMap<Ground, usize>,
    programs: Vec<AgentProgram>,
    top: Vec<usize>,
}

impl Engine {
    pub fn new(theory: GroundTheory, limits: Limits) -> Result<Engine> {
        let frame = Frame::new(&theory, &[]);
        Engine::with_frame(theory, frame, limits)
    }

    pub fn from_theory(theory: &DistributedTheory, limits: Limits) -> Result<Engine> {
        Engine::new(ground_theory(theory, &limits)?, limits)
    }

    pub fn with_frame(theory: GroundTheory, frame: Frame, limits: Limits) -> Result<Engine> {
        frame.check(&limits)?;
        let mut e = Engine {
            programs: vec![AgentProgram::default(); theory.agents.len()],
            theory,
            frame,
            limits,
            modals: Vec::new(),
            modal_index: HashMap::new(),
            top: Vec::new(),
        };
        for a in 0..e.theory.agents.len() {
            let af = e.frame.agents[a].clone();
            let mut prog = AgentProgram { factors: vec![Vec::new(); af.factors.len()], free: Vec::new() };
            for s in e.theory.theories[a].clone() {
                for c in conjuncts(&s) {
                    let mut atoms = Vec::new();
                    c.objective_atoms(&mut atoms);
                    let mut top = Vec::new();
                    c.top_modals(&mut top);
                    match atoms.first() {
                        None => {
                            let node = e.compile(c, &|_| unreachable!("no objective atoms"));
                            prog.free.push(node);
                        }
                        Some(&first) => {
                            let f = af.factor_of(first).expect("sentence atoms are local");
                            let node = e.compile(c, &|x| af.locate(x).expect("local atom").1 as u32);
                            prog.factors[f].push(node);
                        }
                    }
                    for m in top {
                        let id = e.modal_index[m];
                        if !e.top.contains(&id) {
                            e.top.push(id);
                        }
                    }
                }
            }
            e.programs[a] = prog;
        }
        e.top.sort_unstable();
        Ok(e)
    }

    fn compile(&mut self, g: &Ground, slot: &dyn Fn(AtomId) -> u32) -> Node {
        match g {
            Ground::Const(b) => Node::Const(*b),
            Ground::Atom(a) => Node::Slot(slot(*a)),
            Ground::Not(h) => Node::Not(Box::new(self.compile(h, slot))),
            Ground::And(hs) => Node::And(hs.iter().map(|h| self.compile(h, slot)).collect()),
            Ground::Knows(b, arg) => Node::Modal(self.register(*b, arg, g)),
        }
    }

    fn register(&mut self, agent: usize, arg: &Ground, key: &Ground) -> usize {
        if let Some(&id) = self.modal_index.get(key) {
            return id;
        }
        let mut atoms = Vec::new();
        arg.objective_atoms(&mut atoms);
        atoms.sort_unstable();
        let layout = atoms.clone();
        let body = self.compile(arg, &|x| layout.binary_search(&x).expect("argument atom") as u32);
        let id = self.modals.len();
        self.modals.push(Modal { agent, atoms, body });
        self.modal_index.insert(key.clone(), id);
        id
    }

    pub fn agent_count(&self) -> usize {
        self.theory.agents.len()
    }

    /// Modal atoms occurring in some sentence outside every `K`, as ground formulas.
    pub fn top_modals(&self) -> Vec<Ground> {
        let mut keys: Vec<(usize, &Ground)> = self.modal_index.iter().map(|(g, &i)| (i, g)).collect();
        keys.sort_by_key(|(i, _)| *i);
        self.top.iter().map(|&i| keys[i].1.clone()).collect()
    }

    /// Values of every modal atom under the conservative bound `p` and liberal bound `s`.
    fn modal_values(&self, p: &Dpws, s: &Dpws) -> Result<Vec<Bounds>> {
        let mut vals = vec![Bounds::TRUE; self.modals.len()];
        let cap = self.limits.world_enumeration;
        for (i, m) in self.modals.iter().enumerate() {
            let af = &self.frame.agents[m.agent];
            let certain = p.sets[m.agent].project(af, &m.atoms, cap)?.into_iter().all(|w| m.body.eval(w, &vals).certain);
            let possible = s.sets[m.agent].project(af, &m.atoms, cap)?.into_iter().all(|w| m.body.eval(w, &vals).possible);
            vals[i] = Bounds { certain, possible };
        }
        Ok(vals)
    }

    /// Worlds per agent where every sentence is possibly true (`liberal == false`) or certainly true.
    fn image(&self, vals: &[Bounds], liberal: bool) -> Dpws {
        let pick = |b: Bounds| if liberal { b.certain } else { b.possible };
        let sets = self
            .programs
            .iter()
            .zip(&self.frame.agents)
            .map(|(prog, af)| {
                if !prog.free.iter().all(|n| pick(n.eval(0, vals))) {
                    return WorldSet::empty(af);
                }
                let factors = prog
                    .factors
                    .iter()
                    .zip(&af.factors)
                    .map(|(sentences, atoms)| {
                        let size = 1usize << atoms.len();
                        let mut bits = FixedBitSet::with_capacity(size);
                        for w in 0..size {
                            if sentences.iter().all(|n| pick(n.eval(w as u64, vals))) {
                                bits.insert(w);
                            }
                        }
                        bits
                    })
                    .collect();
                WorldSet::from_factors(factors)
            })
            .collect();
        Dpws { sets }
    }

    fn check_shape(&self, q: &Dpws) -> Result<()> {
        if q.sets.len() != self.agent_count() {
            return Err(Error::Invalid("DPWS does not match the theory's agents".into()));
        }
        Ok(())
    }

    /// D_T: the knowledge revision operator.
    pub fn revise(&self, q: &Dpws) -> Result<Dpws> {
        self.check_shape(q)?;
        Ok(self.image(&self.modal_values(q, q)?, false))
    }

    /// D*_T on a consistent pair.
    pub fn approximate(&self, b: &BeliefPair) -> Result<BeliefPair> {
        if !b.is_consistent() {
            return Err(Error::InconsistentPair);
        }
        self.approximate_any(b)
    }

    /// D*_T on any pair, through the four-valued extension of the valuation.
    pub fn approximate_any(&self, b: &BeliefPair) -> Result<BeliefPair> {
        self.check_shape(&b.conservative)?;
        let vals = self.modal_values(&b.conservative, &b.liberal)?;
        Ok(BeliefPair::new(self.image(&vals, false), self.image(&vals, true)))
    }

    /// S(Q) = lfp of x ↦ D^c(x, Q), iterated from ⊥.
    pub fn stable_revise(&self, q: &Dpws) -> Result<Dpws> {
        self.check_shape(q)?;
        let mut x = self.frame.bottom();
        loop {
            let next = self.image(&self.modal_values(&x, q)?, false);
            if next == x {
                return Ok(x);
            }
            x = next;
        }
    }

    pub fn kripke_kleene(&self) -> Result<BeliefPair> {
        let mut b = self.frame.least_precise();
        loop {
            let next = self.approximate(&b)?;
            if next == b {
                return Ok(b);
            }
            b = next;
        }
    }

    pub fn well_founded(&self) -> Result<BeliefPair> {
        let mut b = self.frame.least_precise();
        loop {
            let next = BeliefPair::new(self.stable_revise(&b.liberal)?, self.stable_revise(&b.conservative)?);
            if next == b {
                return Ok(b);
            }
            b = next;
        }
    }

    /// Three-valued value of each top-level modal atom at a pair, indexed like `top_modals`.
    fn top_values(&self, b: &BeliefPair) -> Result<Vec<Tv>> {
        let vals = self.modal_values(&b.conservative, &b.liberal)?;
        self.top
            .iter()
            .map(|&i| vals[i].tv().ok_or(Error::InconsistentPair))
            .collect()
    }

    /// Guesses for the top-level modal atoms left undetermined by `base`.
    fn guesses(&self, base: &BeliefPair, three_valued: bool) -> Result<Vec<Vec<Bounds>>> {
        let fixed = self.top_values(base)?;
        let open: Vec<usize> = (0..fixed.len()).filter(|&i| fixed[i] == Tv::U).collect();
        let choices: &[Tv] = if three_valued { &Tv::ALL } else { &[Tv::F, Tv::T] };
        let total = (choices.len() as f64).powi(open.len() as i32);
        if total > self.limits.candidates as f64 {
            return Err(Error::cap("candidate models", total as u64, self.limits.candidates));
        }
        let mut out = Vec::new();
        let mut digits = vec![0usize; open.len()];
        loop {
            let mut vals = vec![Bounds::TRUE; self.modals.len()];
            for (k, &i) in self.top.iter().enumerate() {
                vals[i] = Bounds::from_tv(fixed[k]);
            }
            for (d, &k) in digits.iter().zip(&open) {
                vals[self.top[k]] = Bounds::from_tv(choices[*d]);
            }
            out.push(vals);
            let mut i = 0;
            loop {
                if i == digits.len() {
                    return Ok(out);
                }
                digits[i] += 1;
                if digits[i] < choices.len() {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
        }
    }

    /// Fixpoints of D_T, in canonical order.
    pub fn supported_models(&self) -> Result<Vec<Dpws>> {
        let kk = self.kripke_kleene()?;
        let mut out = BTreeSet::new();
        for vals in self.guesses(&kk, false)? {
            let q = self.image(&vals, false);
            if self.revise(&q)? == q {
                out.insert(q);
            }
        }
        Ok(out.into_iter().collect())
    }

    /// Exact partial stable models, in canonical order.
    pub fn stable_models(&self) -> Result<Vec<Dpws>> {
        let wf = self.well_founded()?;
        let mut out = BTreeSet::new();
        for vals in self.guesses(&wf, false)? {
            let q = self.image(&vals, false);
            if self.revise(&q)? == q && self.stable_revise(&q)? == q {
                out.insert(q);
            }
        }
        Ok(out.into_iter().collect())
    }

    pub fn is_partial_stable(&self, b: &BeliefPair) -> Result<bool> {
        Ok(b.is_consistent()
            && self.stable_revise(&b.liberal)? == b.conservative
            && self.stable_revise(&b.conservative)? == b.liberal)
    }

    /// Models of `sem` as belief pairs; two-valued models appear as exact pairs.
    pub fn models(&self, sem: Semantics) -> Result<Vec<BeliefPair>> {
        Ok(match sem {
            Semantics::Supported => self.supported_models()?.iter().map(Dpws::exact).collect(),
            Semantics::Stable => self.stable_models()?.iter().map(Dpws::exact).collect(),
            Semantics::PartialStable => self.partial_stable_models()?,
            Semantics::KripkeKleene => vec![self.kripke_kleene()?],
            Semantics::WellFounded => vec![self.well_founded()?],
        })
    }

    pub fn partial_stable_models(&self) -> Result<Vec<BeliefPair>> {
        let wf = self.well_founded()?;
        let mut out = BTreeSet::new();
        for vals in self.guesses(&wf, true)? {
            let b = BeliefPair::new(self.image(&vals, false), self.image(&vals, true));
            if b.is_consistent() && self.approximate(&b)? == b && self.is_partial_stable(&b)? {
                out.insert(b);
            }
        }
        Ok(out.into_iter().collect())
    }

    /// Three-valued value of a ground formula at a pair and interpretation.
    pub fn eval3(&self, g: &Ground, b: &BeliefPair, interp: &Interpretation) -> Result<Tv> {
        crate::worlds::eval3(g, &self.frame, b, interp, &self.limits)
    }

    pub fn eval2(&self, g: &Ground, q: &Dpws, interp: &Interpretation) -> Result<bool> {
        crate::worlds::eval2(g, &self.frame, q, interp, &self.limits)
    }

    /// Least y' with A(x, y')_2 ≤ y', i.e. S(x).
    fn tightest_upper(&self, x: &Dpws) -> Result<Dpws> {
        self.stable_revise(x)
    }

    fn is_terminal(&self, b: &BeliefPair) -> Result<bool> {
        Ok(self.approximate(b)? == *b && self.tightest_upper(&b.conservative)? == b.liberal)
    }

    /// Application refinement: (x,y) ≤_p (x',y') ≤_p A(x,y).
    pub fn is_application_refinement(&self, from: &BeliefPair, to: &BeliefPair) -> Result<bool> {
        let a = self.approximate(from)?;
        Ok(to.is_consistent() && from.le_precision(to) && to.le_precision(&a))
    }

    /// Upper-bound tightening: x' = x and A(x,y')_2 ≤ y' ≤ y.
    pub fn is_tightening(&self, from: &BeliefPair, to: &BeliefPair) -> Result<bool> {
        if to.conservative != from.conservative || !to.is_consistent() {
            return Ok(false);
        }
        let a = self.approximate(to)?;
        Ok(a.liberal.le_knowledge(&to.liberal) && to.liberal.le_knowledge(&from.liberal))
    }

    fn refine(&self, state: &BeliefPair, step: &Refinement) -> Result<BeliefPair> {
        match step {
            Refinement::Apply { lower, upper } => {
                let a = self.approximate(state)?;
                let mut next = state.clone();
                for i in 0..self.agent_count() {
                    if lower.get(i).copied().unwrap_or(false) {
                        next.conservative.sets[i] = a.conservative.sets[i].clone();
                    }
                    if upper.get(i).copied().unwrap_or(false) {
                        next.liberal.sets[i] = a.liberal.sets[i].clone();
                    }
                }
                if !self.is_application_refinement(state, &next)? {
                    return Err(Error::IllegalRefinement("partial application left the interval".into()));
                }
                Ok(next)
            }
            Refinement::Tighten => {
                let next = BeliefPair::new(state.conservative.clone(), self.tightest_upper(&state.conservative)?);
                if !self.is_tightening(state, &next)? {
                    return Err(Error::IllegalRefinement("upper bound could not be tightened".into()));
                }
                Ok(next)
            }
            Refinement::Explicit(next) => {
                if self.is_application_refinement(state, next)? || self.is_tightening(state, next)? {
                    Ok(next.clone())
                } else {
                    Err(Error::IllegalRefinement("pair is neither an application refinement nor a tightening".into()))
                }
            }
        }
    }

    /// Runs a well-founded induction driven by `schedule` until no strict refinement remains.
    pub fn wf_induction_replay(&self, schedule: &mut dyn Schedule) -> Result<(BeliefPair, usize)> {
        let n = self.agent_count();
        let all = vec![true; n];
        let mut state = self.frame.least_precise();
        let mut steps = 0;
        while !self.is_terminal(&state)? {
            let step = schedule.next(&state, steps, n);
            let mut next = self.refine(&state, &step)?;
            if next == state {
                next = self.refine(&state, &Refinement::Apply { lower: all.clone(), upper: all.clone() })?;
            }
            if next == state {
                next = self.refine(&state, &Refinement::Tighten)?;
            }
            state = next;
            steps += 1;
        }
        Ok((state, steps))
    }
}

/// One refinement step of a well-founded induction.
#[derive(Clone, Debug)]
pub enum Refinement {
    /// Replace the selected agents' bounds by their image under the approximator.
    Apply { lower: Vec<bool>, upper: Vec<bool> },
    /// Keep the lower bound and tighten the upper bound as far as allowed.
    Tighten,
    /// A caller-chosen pair, validated as either kind of refinement.
    Explicit(BeliefPair),
}

pub trait Schedule {
    fn next(&mut self, state: &BeliefPair, step: usize, agents: usize) -> Refinement;
}

/// Full approximator steps; tightening only when they stop changing anything.
pub struct FullApply;

impl Schedule for FullApply {
    fn next(&mut self, _: &BeliefPair, _: usize, agents: usize) -> Refinement {
        Refinement::Apply { lower: vec![true; agents], upper: vec![true; agents] }
    }
}

/// Alternates lower-only application, upper-only application and tightening.
pub struct Alternating;

impl Schedule for Alternating {
    fn next(&mut self, _: &BeliefPair, step: usize, agents: usize) -> Refinement {
        match step % 3 {
            0 => Refinement::Apply { lower: vec![true; agents], upper: vec![false; agents] },
            1 => Refinement::Apply { lower: vec![false; agents], upper: vec![true; agents] },
            _ => Refinement::Tighten,
        }
    }
}

/// Refines one agent's components per step, cycling through agents.
pub struct RoundRobin;

impl Schedule for RoundRobin {
    fn next(&mut self, _: &BeliefPair, step: usize, agents: usize) -> Refinement {
        let mut sel = vec![false; agents];
        sel[step % agents] = true;
        Refinement::Apply { lower: sel.clone(), upper: sel }
    }
}

/// Tightens first whenever possible.
pub struct TightenFirst;

impl Schedule for TightenFirst {
    fn next(&mut self, _: &BeliefPair, _: usize, _: usize) -> Refinement {
        Refinement::Tighten
    }
}

/// Random component subsets and tightenings from a fixed seed.
pub struct RandomSchedule(ChaCha8Rng);

impl RandomSchedule {
    pub fn new(seed: u64) -> RandomSchedule {
        RandomSchedule(ChaCha8Rng::seed_from_u64(seed))
    }
}

impl Schedule for RandomSchedule {
    fn next(&mut self, _: &BeliefPair, _: usize, agents: usize) -> Refinement {
        if self.0.gen_bool(0.25) {
            return Refinement::Tighten;
        }
        let lower = (0..agents).map(|_| self.0.gen_bool(0.5)).collect();
        let upper = (0..agents).map(|_| self.0.gen_bool(0.5)).collect();
        Refinement::Apply { lower, upper }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_theory;

    fn engine(src: &str) -> Engine {
        Engine::from_theory(&parse_theory(src).unwrap(), Limits::default()).unwrap()
    }

    const CANDY: &str = "agents M,D. pred c/0. theory D { K[M] c => c. } theory M { K[D] c => c. }";

    fn only_c(e: &Engine) -> Dpws {
        let l = Limits::default();
        Dpws {
            sets: e.frame.agents.iter().map(|af| WorldSet::from_predicate(af, &l, |w| w == [0]).unwrap()).collect(),
        }
    }

    #[test]
    fn candy_operators() {
        let e = engine(CANDY);
        let c = only_c(&e);
        let bot = e.frame.bottom();
        // With ∅ ∉ Q_M the D-component becomes {{c}}.
        let q = Dpws { sets: vec![c.sets[0].clone(), bot.sets[1].clone()] };
        assert_eq!(e.revise(&q).unwrap().sets[1], c.sets[1]);
        assert_eq!(e.approximate(&e.frame.least_precise()).unwrap(), BeliefPair::new(bot.clone(), c.clone()));
        assert_eq!(e.stable_revise(&c).unwrap(), bot);
        assert_eq!(e.stable_revise(&e.frame.top()).unwrap(), bot);
        assert_eq!(e.kripke_kleene().unwrap(), BeliefPair::new(bot.clone(), c.clone()));
        assert_eq!(e.well_founded().unwrap(), bot.exact());
        assert_eq!(e.supported_models().unwrap(), {
            let mut v = vec![c.clone(), bot.clone()];
            v.sort();
            v
        });
        assert_eq!(e.stable_models().unwrap(), vec![bot.clone()]);
        assert_eq!(e.partial_stable_models().unwrap(), vec![bot.exact()]);
    }

    #[test]
    fn empty_theories() {
        let e = engine("agents A,B. pred p/0. theory A { } theory B { }");
        let bot = e.frame.bottom();
        assert_eq!(e.revise(&e.frame.top()).unwrap(), bot);
        assert_eq!(e.stable_revise(&e.frame.top()).unwrap(), bot);
        assert_eq!(e.supported_models().unwrap(), vec![bot]);
    }

    #[test]
    fn inconsistent_pairs_rejected() {
        let e = engine(CANDY);
        let b = BeliefPair::new(e.frame.top(), e.frame.bottom());
        assert_eq!(e.approximate(&b), Err(Error::InconsistentPair));
    }

    #[test]
    fn schedules_agree_on_candy() {
        let e = engine(CANDY);
        let wf = e.well_founded().unwrap();
        let schedules: Vec<Box<dyn Schedule>> =
            vec![Box::new(FullApply), Box::new(Alternating), Box::new(RoundRobin), Box::new(TightenFirst), Box::new(RandomSchedule::new(3))];
        for mut s in schedules {
            assert_eq!(e.wf_induction_replay(s.as_mut()).unwrap().0, wf);
        }
    }

    #[test]
    fn explicit_step_is_validated() {
        let e = engine(CANDY);
        let start = e.frame.least_precise();
        // Raising the lower bound to {{c}} overshoots A(⊥,⊤) = (⊥, {{c}}).
        assert!(e.refine(&start, &Refinement::Explicit(only_c(&e).exact())).is_err());
        // Dropping the upper bound to ⊥ is a tightening: S(⊥) = ⊥.
        let tight = BeliefPair::new(e.frame.bottom(), e.frame.bottom());
        assert_eq!(e.refine(&start, &Refinement::Explicit(tight.clone())).unwrap(), tight);
    }
}
