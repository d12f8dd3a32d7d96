//! Translation of distributed theories into single-agent AEL over the primed vocabulary,
//! where each subjective predicate gains a trailing agent argument.

use crate::error::{Error, Result};
use crate::ground::{AtomId, AtomTable, Ground, GroundAtom, GroundTheory};
use crate::limits::Limits;
use crate::syntax::{DistributedTheory, Formula, PredDecl, Polarity, Term, APRED};
use crate::worlds::{conjuncts, BeliefPair, Dpws, Frame, Interpretation, WorldSet};
use fixedbitset::FixedBitSet;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

/// Name of the single agent of a translated theory.
pub const AEL_AGENT: &str = "K";

/// A theory of plain AEL: one unindexed `K`. `base` carries the primed vocabulary,
/// the domain, and the agent set that interprets `Apred`; its own theories are empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AelTheory {
    pub base: DistributedTheory,
    pub sentences: Vec<Formula>,
}

struct Fresh {
    used: BTreeSet<String>,
    next: usize,
}

impl Fresh {
    fn for_theory(t: &DistributedTheory) -> Fresh {
        let mut used: BTreeSet<String> = t.domain.iter().cloned().collect();
        used.extend(t.vocab.funcs.keys().cloned());
        for s in t.theories.iter().flatten() {
            collect_vars(s, &mut used);
        }
        Fresh { used, next: 0 }
    }

    fn var(&mut self) -> String {
        loop {
            let name = if self.next == 0 { "x".to_string() } else { format!("x{}", self.next) };
            self.next += 1;
            if self.used.insert(name.clone()) {
                return name;
            }
        }
    }
}

fn collect_vars(f: &Formula, out: &mut BTreeSet<String>) {
    match f {
        Formula::Const(_) | Formula::Atom(..) => {
            out.extend(f.free_vars());
        }
        Formula::Not(g) | Formula::Knows(_, g) => {
            out.extend(f.free_vars());
            collect_vars(g, out);
        }
        Formula::And(a, b) => {
            collect_vars(a, out);
            collect_vars(b, out);
        }
        Formula::Forall(v, g) => {
            out.insert(v.clone());
            collect_vars(g, out);
        }
    }
}

fn translate_with(s: &Term, phi: &Formula, theory: &DistributedTheory, fresh: &mut Fresh) -> Result<Formula> {
    Ok(match phi {
        Formula::Const(b) => Formula::Const(*b),
        Formula::Atom(p, args) => {
            let mut args = args.clone();
            if theory.vocab.is_subjective(p) {
                args.push(s.clone());
            }
            Formula::Atom(p.clone(), args)
        }
        Formula::Not(g) => Formula::not(translate_with(s, g, theory, fresh)?),
        Formula::And(a, b) => Formula::and(translate_with(s, a, theory, fresh)?, translate_with(s, b, theory, fresh)?),
        Formula::Forall(v, g) => Formula::forall(v.clone(), translate_with(s, g, theory, fresh)?),
        Formula::Knows(Some(t), g) => {
            let x = fresh.var();
            let inner = translate_with(&Term::var(x.clone()), g, theory, fresh)?;
            let guard = Formula::and(Formula::eq(Term::var(x.clone()), t.clone()), Formula::atom(APRED, vec![Term::var(x.clone())]));
            Formula::exists(x, Formula::and(guard, Formula::Knows(None, Box::new(inner))))
        }
        Formula::Knows(None, _) => return Err(Error::Invalid("unindexed K in a distributed theory".into())),
    })
}

/// τ_formula(s, φ). Index terms are objective, so `t_s` is `t` itself.
pub fn translate_formula(s: &Term, phi: &Formula, theory: &DistributedTheory) -> Result<Formula> {
    translate_with(s, phi, theory, &mut Fresh::for_theory(theory))
}

/// Σ′: subjective predicates gain one argument; everything objective is kept.
pub fn primed_base(theory: &DistributedTheory) -> DistributedTheory {
    let mut base = theory.clone();
    for decl in base.vocab.preds.values_mut() {
        if !decl.objective {
            *decl = PredDecl { arity: decl.arity + 1, objective: false };
        }
    }
    base.theories = vec![Vec::new(); base.agents.len()];
    base
}

/// τ_theory on the AST: the union over agents of `τ(A, T_A)`.
pub fn translate_theory_ast(theory: &DistributedTheory) -> Result<AelTheory> {
    let mut fresh = Fresh::for_theory(theory);
    let mut sentences = Vec::new();
    for (i, ts) in theory.theories.iter().enumerate() {
        let s = Term::constant(theory.agent_name(i));
        for phi in ts {
            sentences.push(translate_with(&s, phi, theory, &mut fresh)?);
        }
    }
    Ok(AelTheory { base: primed_base(theory), sentences })
}

impl AelTheory {
    pub fn ground(&self, limits: &Limits) -> Result<GroundTheory> {
        crate::ground::ground_single(&self.base, &self.sentences, AEL_AGENT, limits)
    }
}

impl fmt::Display for AelTheory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // The header mirrors the distributed format; the agent list interprets Apred.
        let header = self.base.to_string();
        for line in header.lines().filter(|l| !l.starts_with("theory ")) {
            writeln!(f, "{line}")?;
        }
        writeln!(f, "theory {{")?;
        for s in &self.sentences {
            writeln!(f, "  {s}.")?;
        }
        writeln!(f, "}}")
    }
}

/// τ_theory on a ground theory, with the atom correspondence kept.
#[derive(Clone, Debug)]
pub struct AelTranslation {
    pub theory: GroundTheory,
    /// Primed atom of (atom, agent).
    pub primed: HashMap<(AtomId, usize), AtomId>,
    /// (atom, agent) of each primed atom.
    pub origin: Vec<(AtomId, usize)>,
}

fn tau_ground(g: &Ground, agent: usize, out: &mut Vec<(AtomId, usize)>) -> Ground {
    match g {
        Ground::Const(b) => Ground::Const(*b),
        Ground::Atom(a) => {
            let i = out.iter().position(|x| *x == (*a, agent)).unwrap_or_else(|| {
                out.push((*a, agent));
                out.len() - 1
            });
            Ground::Atom(i)
        }
        Ground::Not(h) => Ground::not(tau_ground(h, agent, out)),
        Ground::And(hs) => Ground::and(hs.iter().map(|h| tau_ground(h, agent, out))),
        Ground::Knows(b, h) => Ground::knows(0, tau_ground(h, *b, out)),
    }
}

pub fn translate_theory(g: &GroundTheory) -> Result<AelTranslation> {
    let mut pairs = Vec::new();
    let mut sentences = Vec::new();
    for (agent, ts) in g.theories.iter().enumerate() {
        for s in ts {
            sentences.push(tau_ground(s, agent, &mut pairs));
        }
    }
    let elem = |agent: usize| {
        g.domain
            .iter()
            .position(|d| *d == g.agents[agent])
            .ok_or_else(|| Error::Invalid(format!("agent {} outside the domain", g.agents[agent])))
    };
    let mut atoms = Vec::with_capacity(pairs.len());
    for &(a, agent) in &pairs {
        let mut atom: GroundAtom = g.table.atom(a).clone();
        atom.args.push(elem(agent)?);
        atoms.push(atom);
    }
    let table = AtomTable::from_atoms(atoms.clone(), &g.domain);
    let remap: Vec<AtomId> = atoms.iter().map(|a| table.get(a).expect("interned")).collect();
    let mut origin = vec![(0, 0); pairs.len()];
    let mut primed = HashMap::new();
    for (i, &p) in pairs.iter().enumerate() {
        origin[remap[i]] = p;
        primed.insert(p, remap[i]);
    }
    let sentences = sentences.iter().map(|s| s.map_atoms(&|a| remap[a])).collect();
    let theory = GroundTheory {
        agents: vec![AEL_AGENT.to_string()],
        domain: g.domain.clone(),
        table,
        theories: vec![sentences],
    };
    Ok(AelTranslation { theory, primed, origin })
}

impl AelTranslation {
    /// τ_structure: atom `p@A` holds iff `p` holds in A's structure.
    pub fn structure(&self, family: &[Interpretation]) -> Interpretation {
        let mut j = Interpretation::new(self.origin.len());
        for (i, &(a, agent)) in self.origin.iter().enumerate() {
            j.set(i, family[agent].get(a));
        }
        j
    }

    /// J_A: the agent's own reading of a primed structure, over `atom_count` original atoms.
    pub fn restrict(&self, j: &Interpretation, agent: usize, atom_count: usize) -> Interpretation {
        let mut out = Interpretation::new(atom_count);
        for (i, &(a, b)) in self.origin.iter().enumerate() {
            if b == agent {
                out.set(a, j.get(i));
            }
        }
        out
    }

    /// τ_pws: all combinations of one world per agent, over the AEL frame `dst`.
    pub fn pws(&self, src: &Frame, dst: &Frame, q: &Dpws, limits: &Limits) -> Result<WorldSet> {
        let af = &dst.agents[0];
        if !q.is_universally_consistent() {
            return Ok(WorldSet::empty(af));
        }
        let mut factors = Vec::with_capacity(af.factors.len());
        for atoms in &af.factors {
            // Choices per source agent, as masks over this factor's bits.
            let mut by_agent: Vec<(usize, Vec<AtomId>, Vec<usize>)> = Vec::new();
            for (bit, &p) in atoms.iter().enumerate() {
                let (a, agent) = self.origin[p];
                match by_agent.iter_mut().find(|(b, _, _)| *b == agent) {
                    Some((_, src_atoms, bits)) => {
                        src_atoms.push(a);
                        bits.push(bit);
                    }
                    None => by_agent.push((agent, vec![a], vec![bit])),
                }
            }
            let mut masks = vec![0usize];
            for (agent, src_atoms, bits) in &by_agent {
                let choices = q.sets[*agent].project(&src.agents[*agent], src_atoms, limits.world_enumeration)?;
                let mut next = Vec::with_capacity(masks.len() * choices.len());
                for &m in &masks {
                    for &c in &choices {
                        let spread = bits.iter().enumerate().fold(0usize, |acc, (i, &b)| if c >> i & 1 == 1 { acc | 1 << b } else { acc });
                        next.push(m | spread);
                    }
                }
                masks = next;
            }
            let mut set = FixedBitSet::with_capacity(1 << atoms.len());
            masks.into_iter().for_each(|m| set.insert(m));
            factors.push(set);
        }
        let out = WorldSet::from_factors(factors);
        let expected: u128 = q.sets.iter().map(WorldSet::world_count).product();
        if out.world_count() != expected {
            return Err(Error::Invalid("frames do not align for the product of world sets".into()));
        }
        Ok(out)
    }

    pub fn belief_pair(&self, src: &Frame, dst: &Frame, b: &BeliefPair, limits: &Limits) -> Result<BeliefPair> {
        let c = self.pws(src, dst, &b.conservative, limits)?;
        let l = self.pws(src, dst, &b.liberal, limits)?;
        Ok(BeliefPair::new(Dpws { sets: vec![c] }, Dpws { sets: vec![l] }))
    }
}

fn substitute(g: &Ground, pol: Polarity, choose: &mut dyn FnMut(Polarity) -> bool) -> Ground {
    match g {
        Ground::Const(_) | Ground::Atom(_) => g.clone(),
        Ground::Not(h) => Ground::not(substitute(h, pol.flip(), choose)),
        Ground::And(hs) => Ground::and(hs.iter().map(|h| substitute(h, pol, choose)).collect::<Vec<_>>()),
        Ground::Knows(..) => Ground::Const(choose(pol)),
    }
}

fn eval_objective(g: &Ground, world: &dyn Fn(AtomId) -> bool) -> bool {
    match g {
        Ground::Const(b) => *b,
        Ground::Atom(a) => world(*a),
        Ground::Not(h) => !eval_objective(h, world),
        Ground::And(hs) => hs.iter().all(|h| eval_objective(h, world)),
        Ground::Knows(..) => unreachable!("modal occurrences are substituted"),
    }
}

/// Whether a modal-free theory has a model, by exhaustive search over independent atom groups.
pub fn satisfiable(sentences: &[Ground], limits: &Limits) -> Result<bool> {
    let mut parts: Vec<(Vec<AtomId>, Vec<&Ground>)> = Vec::new();
    for s in sentences {
        for c in conjuncts(s) {
            match c {
                Ground::Const(true) => continue,
                Ground::Const(false) => return Ok(false),
                _ => {}
            }
            let mut atoms = Vec::new();
            c.objective_atoms(&mut atoms);
            let mut merged = (atoms, vec![c]);
            let mut k = 0;
            while k < parts.len() {
                if parts[k].0.iter().any(|a| merged.0.contains(a)) {
                    let (atoms, cs) = parts.swap_remove(k);
                    for a in atoms {
                        if !merged.0.contains(&a) {
                            merged.0.push(a);
                        }
                    }
                    merged.1.extend(cs);
                } else {
                    k += 1;
                }
            }
            parts.push(merged);
        }
    }
    for (atoms, cs) in &parts {
        if atoms.len() > limits.world_atoms {
            return Err(Error::cap("atoms in one satisfiability check", atoms.len() as u64, limits.world_atoms as u64));
        }
        let found = (0..1u64 << atoms.len()).any(|w| {
            let world = |a: AtomId| w >> atoms.iter().position(|&x| x == a).expect("grouped atom") & 1 == 1;
            cs.iter().all(|c| eval_objective(c, &world))
        });
        if !found {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Permaconsistency through the strongest substitution: positive occurrences become false
/// and negative ones true. Every other substitution is implied by it.
pub fn is_permaconsistent(g: &GroundTheory, limits: &Limits) -> Result<bool> {
    for ts in &g.theories {
        let strongest: Vec<Ground> = ts.iter().map(|s| substitute(s, Polarity::Positive, &mut |p| p == Polarity::Negative)).collect();
        if !satisfiable(&strongest, limits)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Permaconsistency by trying every true/false substitution of the non-nested occurrences.
pub fn is_permaconsistent_brute(g: &GroundTheory, limits: &Limits) -> Result<bool> {
    for ts in &g.theories {
        let mut occurrences = 0;
        for s in ts {
            substitute(s, Polarity::Positive, &mut |_| {
                occurrences += 1;
                true
            });
        }
        if occurrences > limits.perma_occurrences {
            return Err(Error::cap("modal occurrences", occurrences as u64, limits.perma_occurrences as u64));
        }
        for mask in 0..1u64 << occurrences {
            let mut k = 0;
            let residual: Vec<Ground> = ts
                .iter()
                .map(|s| {
                    substitute(s, Polarity::Positive, &mut |_| {
                        k += 1;
                        mask >> (k - 1) & 1 == 1
                    })
                })
                .collect();
            if !satisfiable(&residual, limits)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::ground_theory;
    use crate::syntax::parse_theory;

    const CANDY: &str = "agents M,D. pred c/0. theory D { K[M] c => c. } theory M { K[D] c => c. }";

    fn ex(var: &str, agent: &str, body: Formula) -> Formula {
        let x = Term::var(var);
        Formula::exists(
            var,
            Formula::and(
                Formula::and(Formula::eq(x.clone(), Term::constant(agent)), Formula::atom(APRED, vec![x])),
                Formula::Knows(None, Box::new(body)),
            ),
        )
    }

    #[test]
    fn candy_translation() {
        let t = parse_theory(CANDY).unwrap();
        let phi = &t.theories[t.agent_index("D").unwrap()][0];
        let got = translate_formula(&Term::constant("D"), phi, &t).unwrap();
        let want = Formula::implies(ex("x", "M", Formula::atom("c", vec![Term::var("x")])), Formula::atom("c", vec![Term::constant("D")]));
        assert_eq!(got, want);
        let ael = translate_theory_ast(&t).unwrap();
        assert_eq!(ael.sentences.len(), 2);
        assert_eq!(ael.base.vocab.pred("c").unwrap().arity, 1);
    }

    #[test]
    fn function_index_and_propositional_lift() {
        let t = parse_theory("agents A,B. pred p/0. func d/0 objective = { () -> B }. theory A { K[d] p. } theory B { p. }").unwrap();
        let got = translate_formula(&Term::constant("A"), &t.theories[0][0], &t).unwrap();
        assert_eq!(got, ex("x", "d", Formula::atom("p", vec![Term::var("x")])));
        let lift = translate_formula(&Term::constant("B"), &t.theories[1][0], &t).unwrap();
        assert_eq!(lift, Formula::atom("p", vec![Term::constant("B")]));
    }

    #[test]
    fn both_routes_agree_after_grounding() {
        let srcs = [
            CANDY,
            "agents A,B,C. pred yes/0. theory A { yes <=> K[B] yes | K[C] yes. } theory B { K[A] yes => yes. } theory C { yes. }",
            "agents A,B. domain { r }. pred q/1. theory A { forall x: K[x] q(x) => q(A). } theory B { K[A] K[B] q(r). }",
            "agents A. theory A { }",
        ];
        let l = Limits::default();
        for src in srcs {
            let t = parse_theory(src).unwrap();
            let ast = translate_theory_ast(&t).unwrap().ground(&l).unwrap();
            let ground = translate_theory(&ground_theory(&t, &l).unwrap()).unwrap().theory;
            let show = |g: &GroundTheory| -> Vec<String> { g.theories[0].iter().map(|s| g.display(s).to_string()).collect() };
            assert_eq!(show(&ast), show(&ground), "{src}");
        }
    }

    #[test]
    fn structure_round_trip() {
        let t = parse_theory(CANDY).unwrap();
        let g = ground_theory(&t, &Limits::default()).unwrap();
        let tr = translate_theory(&g).unwrap();
        let family = [Interpretation::from_true(1, [0]), Interpretation::new(1)];
        let j = tr.structure(&family);
        for (agent, i) in family.iter().enumerate() {
            assert_eq!(&tr.restrict(&j, agent, 1), i);
        }
    }

    #[test]
    fn permaconsistency_examples() {
        let l = Limits::default();
        let check = |src: &str| {
            let g = ground_theory(&parse_theory(src).unwrap(), &l).unwrap();
            let fast = is_permaconsistent(&g, &l).unwrap();
            assert_eq!(fast, is_permaconsistent_brute(&g, &l).unwrap(), "{src}");
            fast
        };
        assert!(!check("agents A. pred p/0. theory A { p => K[A] p. K[A] p => p. }"));
        assert!(check("agents A,B. pred p/0. theory A { } theory B { }"));
        assert!(check(CANDY));
        assert!(!check("agents A. pred p/0. theory A { p & ~p. }"));
    }

    #[test]
    fn universally_inconsistent_pws_is_empty() {
        let l = Limits::default();
        let g = ground_theory(&parse_theory(CANDY).unwrap(), &l).unwrap();
        let tr = translate_theory(&g).unwrap();
        let src = Frame::new(&g, &[]);
        let dst = Frame::new(&tr.theory, &[]);
        let q = Dpws { sets: vec![src.bottom().sets[0].clone(), WorldSet::empty(&src.agents[1])] };
        assert!(tr.pws(&src, &dst, &q, &l).unwrap().is_empty());
        let all = tr.pws(&src, &dst, &src.bottom(), &l).unwrap();
        assert_eq!(all.world_count(), 4);
    }
}
