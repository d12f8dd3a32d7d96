//! World sets, DPWSs, belief pairs, the lattice orders and the valuations.
//!
//! Each agent's worlds range over its local atoms: those its own theory mentions outside
//! any `K`, plus those inside some `K[agent]` argument. Other atoms are unconstrained.
//! Local atoms are partitioned into factors of atoms sharing a top-level sentence; a world
//! set is the product of one explicit bitset per factor. Every operator image is such a
//! product, so nothing is lost. A flat frame uses a single factor per agent.

use crate::error::{Error, Result};
use crate::ground::{AtomId, Ground, GroundTheory};
use crate::limits::Limits;
use crate::truth::{Bounds, Tv};
use fixedbitset::FixedBitSet;
use serde_json::{json, Value};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgentFrame {
    pub atoms: Vec<AtomId>,
    pub factors: Vec<Vec<AtomId>>,
    locate: HashMap<AtomId, (usize, usize)>,
}

impl AgentFrame {
    fn new(mut factors: Vec<Vec<AtomId>>) -> AgentFrame {
        for f in &mut factors {
            f.sort_unstable();
        }
        factors.retain(|f| !f.is_empty());
        factors.sort();
        let mut atoms: Vec<AtomId> = factors.iter().flatten().copied().collect();
        atoms.sort_unstable();
        let mut locate = HashMap::new();
        for (fi, f) in factors.iter().enumerate() {
            for (bit, &a) in f.iter().enumerate() {
                locate.insert(a, (fi, bit));
            }
        }
        AgentFrame { atoms, factors, locate }
    }

    /// Factor index and bit position of a local atom.
    pub fn locate(&self, atom: AtomId) -> Option<(usize, usize)> {
        self.locate.get(&atom).copied()
    }

    pub fn factor_of(&self, atom: AtomId) -> Option<usize> {
        self.locate(atom).map(|(f, _)| f)
    }
}

/// Per-agent local vocabularies and factor partitions for one ground theory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub agents: Vec<AgentFrame>,
    pub atom_count: usize,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Top-level conjuncts of a sentence; each one constrains a single factor.
pub fn conjuncts(g: &Ground) -> Vec<&Ground> {
    match g {
        Ground::And(items) => items.iter().collect(),
        g => vec![g],
    }
}

impl Frame {
    /// Factored frame. `extra` formulas only widen vocabularies through their `K` arguments.
    pub fn new(theory: &GroundTheory, extra: &[Ground]) -> Frame {
        Self::build(theory, extra, false)
    }

    /// One factor per agent holding all its local atoms.
    pub fn flat(theory: &GroundTheory, extra: &[Ground]) -> Frame {
        Self::build(theory, extra, true)
    }

    fn build(theory: &GroundTheory, extra: &[Ground], flat: bool) -> Frame {
        let n = theory.table.len();
        let agents = theory.agents.len();
        let mut local: Vec<BTreeSet<AtomId>> = vec![BTreeSet::new(); agents];
        let mut uf: Vec<UnionFind> = (0..agents).map(|_| UnionFind((0..n).collect())).collect();
        for (a, sentences) in theory.theories.iter().enumerate() {
            for s in sentences {
                for c in conjuncts(s) {
                    let mut atoms = Vec::new();
                    c.objective_atoms(&mut atoms);
                    for w in atoms.windows(2) {
                        uf[a].union(w[0], w[1]);
                    }
                    local[a].extend(atoms);
                }
            }
        }
        let mut modals = Vec::new();
        for g in theory.theories.iter().flatten().chain(extra) {
            g.modal_subformulas(&mut modals);
        }
        for m in modals {
            if let Ground::Knows(b, arg) = m {
                let mut atoms = Vec::new();
                arg.objective_atoms(&mut atoms);
                local[*b].extend(atoms);
            }
        }
        let agents = local
            .iter()
            .enumerate()
            .map(|(a, atoms)| {
                if flat {
                    return AgentFrame::new(vec![atoms.iter().copied().collect()]);
                }
                let mut groups: BTreeMap<usize, Vec<AtomId>> = BTreeMap::new();
                for &x in atoms {
                    groups.entry(uf[a].find(x)).or_default().push(x);
                }
                AgentFrame::new(groups.into_values().collect())
            })
            .collect();
        Frame { agents, atom_count: n }
    }

    pub fn check(&self, limits: &Limits) -> Result<()> {
        for a in &self.agents {
            for f in &a.factors {
                if f.len() > limits.world_atoms {
                    return Err(Error::cap("atoms in one world bitset", f.len() as u64, limits.world_atoms as u64));
                }
            }
        }
        Ok(())
    }

    pub fn bottom(&self) -> Dpws {
        Dpws { sets: self.agents.iter().map(WorldSet::full).collect() }
    }

    pub fn top(&self) -> Dpws {
        Dpws { sets: self.agents.iter().map(WorldSet::empty).collect() }
    }

    pub fn least_precise(&self) -> BeliefPair {
        BeliefPair { conservative: self.bottom(), liberal: self.top() }
    }

    /// Re-expresses a world set of this frame in another frame with the same local atoms.
    pub fn convert(&self, agent: usize, set: &WorldSet, target: &Frame) -> Result<WorldSet> {
        let src = &self.agents[agent];
        let dst = &target.agents[agent];
        if src.atoms != dst.atoms {
            return Err(Error::Invalid("frames disagree on local atoms".into()));
        }
        if set.is_empty() {
            return Ok(WorldSet::empty(dst));
        }
        let mut out = WorldSet::empty(dst);
        for (fi, atoms) in dst.factors.iter().enumerate() {
            for mask in set.project(src, atoms, u64::MAX)? {
                out.factors[fi].insert(mask as usize);
            }
        }
        out.empty = false;
        out.normalize();
        Ok(out)
    }
}

/// One agent's possible worlds: the product of its factor bitsets.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WorldSet {
    pub(crate) factors: Vec<FixedBitSet>,
    pub(crate) empty: bool,
}

impl WorldSet {
    /// ⊥: every world.
    pub fn full(frame: &AgentFrame) -> WorldSet {
        let factors = frame
            .factors
            .iter()
            .map(|f| {
                let mut b = FixedBitSet::with_capacity(1 << f.len());
                b.insert_range(..);
                b
            })
            .collect();
        WorldSet { factors, empty: false }
    }

    /// ⊤: no world.
    pub fn empty(frame: &AgentFrame) -> WorldSet {
        let factors = frame.factors.iter().map(|f| FixedBitSet::with_capacity(1 << f.len())).collect();
        WorldSet { factors, empty: true }
    }

    pub(crate) fn from_factors(factors: Vec<FixedBitSet>) -> WorldSet {
        let mut w = WorldSet { factors, empty: false };
        w.normalize();
        w
    }

    pub(crate) fn normalize(&mut self) {
        if self.empty || self.factors.iter().any(|f| f.is_clear()) {
            self.empty = true;
            self.factors.iter_mut().for_each(FixedBitSet::clear);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    /// Knowledge order: `self ≤_K other` iff other ⊆ self.
    pub fn le_knowledge(&self, other: &WorldSet) -> bool {
        if other.empty {
            return true;
        }
        if self.empty {
            return false;
        }
        self.factors.iter().zip(&other.factors).all(|(a, b)| b.is_subset(a))
    }

    pub fn intersect(&self, other: &WorldSet) -> WorldSet {
        let factors = self
            .factors
            .iter()
            .zip(&other.factors)
            .map(|(a, b)| {
                let mut c = a.clone();
                c.intersect_with(b);
                c
            })
            .collect();
        let mut w = WorldSet { factors, empty: self.empty || other.empty };
        w.normalize();
        w
    }

    pub fn world_count(&self) -> u128 {
        if self.empty {
            return 0;
        }
        self.factors.iter().map(|f| f.count_ones(..) as u128).product()
    }

    /// Whether a global interpretation (restricted to local atoms) is in the set.
    pub fn contains(&self, frame: &AgentFrame, interp: &Interpretation) -> bool {
        if self.empty {
            return false;
        }
        frame.factors.iter().zip(&self.factors).all(|(atoms, bits)| {
            let w = atoms.iter().enumerate().fold(0usize, |w, (i, &a)| if interp.get(a) { w | 1 << i } else { w });
            bits.contains(w)
        })
    }

    /// Distinct restrictions of the member worlds to `atoms`, as masks with bit i for `atoms[i]`.
    /// Atoms outside the local vocabulary range freely.
    pub fn project(&self, frame: &AgentFrame, atoms: &[AtomId], cap: u64) -> Result<Vec<u64>> {
        if self.empty {
            return Ok(Vec::new());
        }
        if atoms.len() > 63 {
            return Err(Error::cap("atoms in one modal argument", atoms.len() as u64, 63));
        }
        let mut by_factor: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        let mut parts: Vec<Vec<u64>> = Vec::new();
        for (slot, &a) in atoms.iter().enumerate() {
            match frame.locate(a) {
                Some((f, bit)) => by_factor.entry(f).or_default().push((bit, slot)),
                None => parts.push(vec![0, 1 << slot]),
            }
        }
        for (f, pairs) in by_factor {
            let bits = &self.factors[f];
            let full = frame.factors[f].len();
            let mut seen = BTreeSet::new();
            if pairs.len() == full && pairs.iter().all(|&(b, s)| b == s) && pairs.len() == atoms.len() {
                parts.push(bits.ones().map(|w| w as u64).collect());
                continue;
            }
            for w in bits.ones() {
                let m = pairs.iter().fold(0u64, |m, &(b, s)| if w >> b & 1 == 1 { m | 1 << s } else { m });
                seen.insert(m);
                if seen.len() == 1 << pairs.len() {
                    break;
                }
            }
            parts.push(seen.into_iter().collect());
        }
        let size: f64 = parts.iter().map(|p| p.len() as f64).product();
        if size > cap as f64 {
            return Err(Error::cap("worlds enumerated for one modal atom", size as u64, cap));
        }
        let mut out = vec![0u64];
        for p in parts {
            let mut next = Vec::with_capacity(out.len() * p.len());
            for &x in &out {
                for &y in &p {
                    next.push(x | y);
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// Known literals `(atom, value)` when the set is exactly their models; `None` otherwise or when empty.
    pub fn literals(&self, frame: &AgentFrame) -> Option<Vec<(AtomId, bool)>> {
        if self.empty {
            return None;
        }
        let mut out = Vec::new();
        for (atoms, bits) in frame.factors.iter().zip(&self.factors) {
            let k = atoms.len();
            let (mut all1, mut all0) = ((1usize << k) - 1, (1usize << k) - 1);
            for w in bits.ones() {
                all1 &= w;
                all0 &= !w;
            }
            let fixed = (all1 | all0).count_ones() as usize;
            if bits.count_ones(..) != 1 << (k - fixed) {
                return None;
            }
            for (i, &a) in atoms.iter().enumerate() {
                if all1 >> i & 1 == 1 {
                    out.push((a, true));
                } else if all0 >> i & 1 == 1 {
                    out.push((a, false));
                }
            }
        }
        out.sort();
        Some(out)
    }

    /// Member worlds as sorted lists of true local atoms, up to `limit` worlds.
    pub fn worlds(&self, frame: &AgentFrame, limit: usize) -> Option<Vec<Vec<AtomId>>> {
        if self.world_count() > limit as u128 {
            return None;
        }
        let mut out: Vec<Vec<AtomId>> = if self.empty { Vec::new() } else { vec![Vec::new()] };
        for (atoms, bits) in frame.factors.iter().zip(&self.factors) {
            let mut next = Vec::new();
            for prefix in &out {
                for w in bits.ones() {
                    let mut world = prefix.clone();
                    world.extend(atoms.iter().enumerate().filter(|(i, _)| w >> i & 1 == 1).map(|(_, &a)| a));
                    next.push(world);
                }
            }
            out = next;
        }
        for w in &mut out {
            w.sort_unstable();
        }
        out.sort();
        Some(out)
    }

    /// Builds the set of local worlds satisfying `keep`, where worlds are given as true-atom lists.
    pub fn from_predicate(frame: &AgentFrame, limits: &Limits, keep: impl Fn(&[AtomId]) -> bool) -> Result<WorldSet> {
        let k = frame.atoms.len();
        if k > limits.world_atoms {
            return Err(Error::cap("atoms in one world bitset", k as u64, limits.world_atoms as u64));
        }
        let flat = AgentFrame::new(vec![frame.atoms.clone()]);
        let mut bits = FixedBitSet::with_capacity(1 << k);
        for w in 0..1usize << k {
            let world: Vec<AtomId> = (0..k).filter(|i| w >> i & 1 == 1).map(|i| frame.atoms[i]).collect();
            if keep(&world) {
                bits.insert(w);
            }
        }
        let set = WorldSet::from_factors(vec![bits]);
        if set.is_empty() {
            return Ok(WorldSet::empty(frame));
        }
        let mut out = WorldSet::empty(frame);
        out.empty = false;
        for (fi, atoms) in frame.factors.iter().enumerate() {
            for m in set.project(&flat, atoms, u64::MAX)? {
                out.factors[fi].insert(m as usize);
            }
        }
        out.normalize();
        // A non-product set cannot be represented in a factored frame.
        if out.world_count() != set.world_count() {
            return Err(Error::Invalid("world set does not factor over this frame".into()));
        }
        Ok(out)
    }

    /// Models of a consistent set of literals over local atoms.
    pub fn from_literals(frame: &AgentFrame, lits: impl IntoIterator<Item = (AtomId, bool)>) -> Result<WorldSet> {
        let mut fixed: Vec<(usize, usize)> = vec![(0, 0); frame.factors.len()];
        for (a, v) in lits {
            let (f, bit) = frame
                .locate(a)
                .ok_or_else(|| Error::Invalid(format!("literal on atom {a} outside the local vocabulary")))?;
            if fixed[f].0 >> bit & 1 == 1 && (fixed[f].1 >> bit & 1 == 1) != v {
                return Ok(WorldSet::empty(frame));
            }
            fixed[f].0 |= 1 << bit;
            if v {
                fixed[f].1 |= 1 << bit;
            }
        }
        let factors = frame
            .factors
            .iter()
            .zip(&fixed)
            .map(|(atoms, &(mask, on))| {
                let size = 1usize << atoms.len();
                let mut bits = FixedBitSet::with_capacity(size);
                for w in 0..size {
                    if w & mask == on {
                        bits.insert(w);
                    }
                }
                bits
            })
            .collect();
        Ok(WorldSet::from_factors(factors))
    }

    pub(crate) fn raw_factors(&self) -> &[FixedBitSet] {
        &self.factors
    }
}

impl PartialOrd for WorldSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for WorldSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.empty
            .cmp(&other.empty)
            .then_with(|| {
                let a = self.factors.iter().map(|f| f.as_slice());
                let b = other.factors.iter().map(|f| f.as_slice());
                a.cmp(b)
            })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dpws {
    pub sets: Vec<WorldSet>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    Equal,
    LessEqual,
    GreaterEqual,
    Incomparable,
}

fn relation(le: bool, ge: bool) -> Relation {
    match (le, ge) {
        (true, true) => Relation::Equal,
        (true, false) => Relation::LessEqual,
        (false, true) => Relation::GreaterEqual,
        (false, false) => Relation::Incomparable,
    }
}

impl Dpws {
    pub fn le_knowledge(&self, other: &Dpws) -> bool {
        self.sets.iter().zip(&other.sets).all(|(a, b)| a.le_knowledge(b))
    }

    pub fn glb_intersection(&self, other: &Dpws) -> Dpws {
        Dpws { sets: self.sets.iter().zip(&other.sets).map(|(a, b)| a.intersect(b)).collect() }
    }

    pub fn is_universally_consistent(&self) -> bool {
        self.sets.iter().all(|s| !s.is_empty())
    }

    pub fn exact(&self) -> BeliefPair {
        BeliefPair { conservative: self.clone(), liberal: self.clone() }
    }
}

pub fn compare_knowledge(a: &Dpws, b: &Dpws) -> Result<Relation> {
    check_shapes(a, b)?;
    Ok(relation(a.le_knowledge(b), b.le_knowledge(a)))
}

fn check_shapes(a: &Dpws, b: &Dpws) -> Result<()> {
    let same = a.sets.len() == b.sets.len()
        && a.sets.iter().zip(&b.sets).all(|(x, y)| {
            x.factors.len() == y.factors.len() && x.factors.iter().zip(&y.factors).all(|(p, q)| p.len() == q.len())
        });
    if same {
        Ok(())
    } else {
        Err(Error::Invalid("world structures over different vocabularies".into()))
    }
}

/// (conservative, liberal) bounds on every agent's knowledge.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BeliefPair {
    pub conservative: Dpws,
    pub liberal: Dpws,
}

impl BeliefPair {
    pub fn new(conservative: Dpws, liberal: Dpws) -> BeliefPair {
        BeliefPair { conservative, liberal }
    }

    pub fn is_consistent(&self) -> bool {
        self.conservative.le_knowledge(&self.liberal)
    }

    pub fn is_exact(&self) -> bool {
        self.conservative == self.liberal
    }

    pub fn le_precision(&self, other: &BeliefPair) -> bool {
        self.conservative.le_knowledge(&other.conservative) && other.liberal.le_knowledge(&self.liberal)
    }

    pub fn is_universally_consistent(&self) -> bool {
        self.liberal.is_universally_consistent()
    }
}

pub fn compare_precision(a: &BeliefPair, b: &BeliefPair) -> Result<Relation> {
    check_shapes(&a.conservative, &b.conservative)?;
    check_shapes(&a.liberal, &b.liberal)?;
    Ok(relation(a.le_precision(b), b.le_precision(a)))
}

/// A total assignment to the ground atoms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interpretation(FixedBitSet);

impl Interpretation {
    pub fn new(atom_count: usize) -> Interpretation {
        Interpretation(FixedBitSet::with_capacity(atom_count))
    }

    pub fn from_true(atom_count: usize, atoms: impl IntoIterator<Item = AtomId>) -> Interpretation {
        let mut i = Interpretation::new(atom_count);
        for a in atoms {
            i.set(a, true);
        }
        i
    }

    /// Interpretation whose i-th atom is bit i of `mask`.
    pub fn from_mask(atom_count: usize, mask: u64) -> Interpretation {
        Interpretation::from_true(atom_count, (0..atom_count.min(64)).filter(|i| mask >> i & 1 == 1))
    }

    pub fn get(&self, a: AtomId) -> bool {
        self.0.contains(a)
    }

    pub fn set(&mut self, a: AtomId, v: bool) {
        if a >= self.0.len() {
            self.0.grow(a + 1);
        }
        self.0.set(a, v);
    }
}

fn eval_bounds(
    g: &Ground,
    frame: &Frame,
    p: &Dpws,
    s: &Dpws,
    interp: &Interpretation,
    limits: &Limits,
) -> Result<Bounds> {
    Ok(match g {
        Ground::Const(b) => Bounds::exact(*b),
        Ground::Atom(a) => Bounds::exact(interp.get(*a)),
        Ground::Not(h) => eval_bounds(h, frame, p, s, interp, limits)?.not(),
        Ground::And(hs) => {
            let mut acc = Bounds::TRUE;
            for h in hs {
                acc = acc.and(eval_bounds(h, frame, p, s, interp, limits)?);
            }
            acc
        }
        Ground::Knows(b, arg) => {
            let mut atoms = Vec::new();
            arg.objective_atoms(&mut atoms);
            let af = &frame.agents[*b];
            let mut j = interp.clone();
            let mut certain = true;
            for m in p.sets[*b].project(af, &atoms, limits.world_enumeration)? {
                for (i, &a) in atoms.iter().enumerate() {
                    j.set(a, m >> i & 1 == 1);
                }
                if !eval_bounds(arg, frame, p, s, &j, limits)?.certain {
                    certain = false;
                    break;
                }
            }
            let mut possible = true;
            for m in s.sets[*b].project(af, &atoms, limits.world_enumeration)? {
                for (i, &a) in atoms.iter().enumerate() {
                    j.set(a, m >> i & 1 == 1);
                }
                if !eval_bounds(arg, frame, p, s, &j, limits)?.possible {
                    possible = false;
                    break;
                }
            }
            Bounds { certain, possible }
        }
    })
}

/// Two-valued valuation of a ground formula at a DPWS and interpretation.
pub fn eval2(g: &Ground, frame: &Frame, q: &Dpws, interp: &Interpretation, limits: &Limits) -> Result<bool> {
    Ok(eval_bounds(g, frame, q, q, interp, limits)?.certain)
}

/// Three-valued valuation at a consistent belief pair.
pub fn eval3(g: &Ground, frame: &Frame, b: &BeliefPair, interp: &Interpretation, limits: &Limits) -> Result<Tv> {
    if !b.is_consistent() {
        return Err(Error::InconsistentPair);
    }
    let v = eval_bounds(g, frame, &b.conservative, &b.liberal, interp, limits)?;
    // Consistent pairs never reach the inconsistent corner of the bilattice.
    Ok(v.tv().expect("consistent pair yields a three-valued result"))
}

pub fn is_universally_consistent(q: &Dpws) -> bool {
    q.is_universally_consistent()
}

/// JSON for one world set: known literals when literal-determined, else the member worlds.
pub fn world_set_json(set: &WorldSet, frame: &AgentFrame, theory: &GroundTheory) -> Value {
    if let Some(lits) = set.literals(frame) {
        let lits: Vec<String> = lits
            .iter()
            .map(|&(a, v)| if v { theory.table.name(a).to_string() } else { format!("~{}", theory.table.name(a)) })
            .collect();
        return json!({ "literals": lits });
    }
    match set.worlds(frame, 4096) {
        Some(worlds) => {
            let worlds: Vec<Vec<&str>> =
                worlds.iter().map(|w| w.iter().map(|&a| theory.table.name(a)).collect()).collect();
            json!({ "worlds": worlds })
        }
        None => {
            let factors: Vec<Value> = frame
                .factors
                .iter()
                .zip(set.raw_factors())
                .map(|(atoms, bits)| {
                    let names: Vec<&str> = atoms.iter().map(|&a| theory.table.name(a)).collect();
                    let worlds: Vec<Vec<&str>> = bits
                        .ones()
                        .map(|w| names.iter().enumerate().filter(|(i, _)| w >> i & 1 == 1).map(|(_, n)| *n).collect())
                        .collect();
                    json!({ "atoms": names, "worlds": worlds })
                })
                .collect();
            json!({ "factors": factors })
        }
    }
}

pub fn dpws_json(q: &Dpws, frame: &Frame, theory: &GroundTheory) -> Value {
    let mut m = serde_json::Map::new();
    for (a, set) in q.sets.iter().enumerate() {
        m.insert(theory.agents[a].clone(), world_set_json(set, &frame.agents[a], theory));
    }
    Value::Object(m)
}

pub fn pair_json(b: &BeliefPair, frame: &Frame, theory: &GroundTheory) -> Value {
    json!({
        "conservative": dpws_json(&b.conservative, frame, theory),
        "liberal": dpws_json(&b.liberal, frame, theory),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::ground_theory;
    use crate::syntax::parse_theory;

    fn candy() -> (GroundTheory, Frame) {
        let t = parse_theory("agents M,D. pred c/0. theory D { K[M] c => c. } theory M { K[D] c => c. }").unwrap();
        let g = ground_theory(&t, &Limits::default()).unwrap();
        let f = Frame::new(&g, &[]);
        (g, f)
    }

    fn only_c(f: &Frame) -> Dpws {
        let l = Limits::default();
        let sets = f
            .agents
            .iter()
            .map(|af| WorldSet::from_predicate(af, &l, |w| w == [0]).unwrap())
            .collect();
        Dpws { sets }
    }

    #[test]
    fn knowledge_order_on_candy() {
        let (_, f) = candy();
        let bot = f.bottom();
        let c = only_c(&f);
        assert_eq!(compare_knowledge(&bot, &bot).unwrap(), Relation::Equal);
        assert_eq!(compare_knowledge(&bot, &c).unwrap(), Relation::LessEqual);
        let mixed1 = Dpws { sets: vec![bot.sets[0].clone(), c.sets[1].clone()] };
        let mixed2 = Dpws { sets: vec![c.sets[0].clone(), bot.sets[1].clone()] };
        assert_eq!(compare_knowledge(&mixed1, &mixed2).unwrap(), Relation::Incomparable);
    }

    #[test]
    fn precision_order() {
        let (_, f) = candy();
        let c = only_c(&f);
        let kk = BeliefPair::new(f.bottom(), c.clone());
        assert_eq!(compare_precision(&f.least_precise(), &kk).unwrap(), Relation::LessEqual);
        assert_eq!(compare_precision(&kk, &f.bottom().exact()).unwrap(), Relation::LessEqual);
        assert_eq!(compare_precision(&c.exact(), &f.bottom().exact()).unwrap(), Relation::Incomparable);
    }

    #[test]
    fn valuations() {
        let (g, f) = candy();
        let l = Limits::default();
        let c = only_c(&f);
        let ic = Interpretation::from_true(1, [0]);
        let none = Interpretation::new(1);
        assert!(eval2(&Ground::Atom(0), &f, &f.bottom(), &ic, &l).unwrap());
        let km = |x: Ground| Ground::knows(g.agent_index("M").unwrap(), x);
        assert!(eval2(&km(Ground::Atom(0)), &f, &c, &none, &l).unwrap());
        let kd = Ground::knows(1, Ground::Atom(0));
        let bot = f.bottom();
        assert_eq!(eval3(&kd, &f, &BeliefPair::new(bot.clone(), bot.clone()), &none, &l).unwrap(), Tv::F);
        assert_eq!(eval3(&kd, &f, &c.exact(), &none, &l).unwrap(), Tv::T);
        let kk = BeliefPair::new(bot, c);
        assert_eq!(eval3(&km(Ground::not(Ground::Atom(0))), &f, &kk, &none, &l).unwrap(), Tv::F);
        assert_eq!(eval3(&kd, &f, &kk, &none, &l).unwrap(), Tv::U);
        assert_eq!(eval3(&kd, &f, &f.least_precise(), &none, &l).unwrap(), Tv::U);
        assert!(eval3(&kd, &f, &BeliefPair::new(f.top(), f.bottom()), &none, &l).is_err());
    }

    #[test]
    fn literal_detection() {
        let (g, f) = candy();
        let c = only_c(&f);
        assert_eq!(c.sets[0].literals(&f.agents[0]), Some(vec![(0, true)]));
        assert_eq!(world_set_json(&c.sets[0], &f.agents[0], &g), json!({"literals": ["c"]}));
        assert_eq!(world_set_json(&f.top().sets[0], &f.agents[0], &g), json!({"worlds": []}));
    }

    #[test]
    fn universal_consistency() {
        let (_, f) = candy();
        assert!(is_universally_consistent(&f.bottom()));
        assert!(!is_universally_consistent(&f.top()));
    }
}
