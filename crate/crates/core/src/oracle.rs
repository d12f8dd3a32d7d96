//! Exhaustive reference semantics for tiny theories. Every DPWS over the flat frame is
//! enumerated, operators are evaluated over explicit world lists, and least fixpoints
//! are found by filtering all fixpoints rather than by iteration.

use crate::aft::Engine;
use crate::error::{Error, Result};
use crate::ground::{Ground, GroundTheory};
use crate::limits::Limits;
use crate::truth::Bounds;
use crate::worlds::{BeliefPair, Dpws, Frame, WorldSet};
use fixedbitset::FixedBitSet;

/// Largest number of DPWSs the oracle enumerates; pairs are this number squared.
pub const ORACLE_DPWS_CAP: u64 = 1 << 12;

/// A DPWS as one subset mask per agent over that agent's local worlds.
type Q = Vec<u64>;

struct Space<'a> {
    theory: &'a GroundTheory,
    /// Local atoms per agent, in flat-frame order.
    atoms: Vec<Vec<usize>>,
}

impl Space<'_> {
    fn worlds(&self, agent: usize) -> u64 {
        1 << self.atoms[agent].len()
    }

    fn full(&self, agent: usize) -> u64 {
        let n = self.worlds(agent);
        if n == 64 {
            u64::MAX
        } else {
            (1u64 << n) - 1
        }
    }

    fn eval(&self, g: &Ground, p: &Q, s: &Q, interp: &mut Vec<bool>) -> Bounds {
        match g {
            Ground::Const(b) => Bounds::exact(*b),
            Ground::Atom(a) => Bounds::exact(interp[*a]),
            Ground::Not(h) => self.eval(h, p, s, interp).not(),
            Ground::And(hs) => hs.iter().fold(Bounds::TRUE, |acc, h| acc.and(self.eval(h, p, s, interp))),
            Ground::Knows(b, arg) => {
                let saved = interp.clone();
                let all = |set: u64, pick: fn(Bounds) -> bool, interp: &mut Vec<bool>| {
                    let mut ok = true;
                    for w in 0..self.worlds(*b) {
                        if set >> w & 1 == 0 {
                            continue;
                        }
                        for (i, &a) in self.atoms[*b].iter().enumerate() {
                            interp[a] = w >> i & 1 == 1;
                        }
                        if !pick(self.eval(arg, p, s, interp)) {
                            ok = false;
                        }
                    }
                    ok
                };
                let certain = all(p[*b], |v| v.certain, interp);
                let possible = all(s[*b], |v| v.possible, interp);
                *interp = saved;
                Bounds { certain, possible }
            }
        }
    }

    /// Worlds of each agent where every sentence passes `pick`.
    fn image(&self, p: &Q, s: &Q, pick: fn(Bounds) -> bool) -> Q {
        let n = self.theory.table.len();
        (0..self.atoms.len())
            .map(|agent| {
                let mut out = 0u64;
                for w in 0..self.worlds(agent) {
                    let mut interp = vec![false; n];
                    for (i, &a) in self.atoms[agent].iter().enumerate() {
                        interp[a] = w >> i & 1 == 1;
                    }
                    if self.theory.theories[agent].iter().all(|t| pick(self.eval(t, p, s, &mut interp))) {
                        out |= 1 << w;
                    }
                }
                out
            })
            .collect()
    }

    fn conservative(&self, p: &Q, s: &Q) -> Q {
        self.image(p, s, |v| v.possible)
    }

    fn liberal(&self, p: &Q, s: &Q) -> Q {
        self.image(p, s, |v| v.certain)
    }

    fn all(&self) -> Vec<Q> {
        let mut out = vec![Vec::new()];
        for agent in 0..self.atoms.len() {
            let mut next = Vec::new();
            for q in &out {
                for set in 0..=self.full(agent) {
                    let mut q = q.clone();
                    q.push(set);
                    next.push(q);
                }
            }
            out = next;
        }
        out
    }
}

/// `a ≤_K b`: every component of `b` is a subset of `a`'s.
fn le_k(a: &Q, b: &Q) -> bool {
    a.iter().zip(b).all(|(x, y)| y & !x == 0)
}

fn le_p(a: &(Q, Q), b: &(Q, Q)) -> bool {
    le_k(&a.0, &b.0) && le_k(&b.1, &a.1)
}

/// Least element of `items` under `le`, which must exist.
fn least<T: Clone>(items: &[T], le: impl Fn(&T, &T) -> bool) -> Result<T> {
    items
        .iter()
        .find(|x| items.iter().all(|y| le(x, y)))
        .cloned()
        .ok_or_else(|| Error::Invalid("no least element among fixpoints".into()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleModels {
    pub supported: Vec<Dpws>,
    pub stable: Vec<Dpws>,
    pub partial_stable: Vec<BeliefPair>,
    pub kripke_kleene: BeliefPair,
    pub well_founded: BeliefPair,
}

fn to_dpws(frame: &Frame, q: &Q) -> Dpws {
    let sets = frame
        .agents
        .iter()
        .zip(q)
        .map(|(af, &set)| {
            if af.factors.is_empty() {
                return if set & 1 == 1 { WorldSet::full(af) } else { WorldSet::empty(af) };
            }
            let n = 1usize << af.atoms.len();
            let mut bits = FixedBitSet::with_capacity(n);
            (0..n).filter(|w| set >> w & 1 == 1).for_each(|w| bits.insert(w));
            WorldSet::from_factors(vec![bits])
        })
        .collect();
    Dpws { sets }
}

fn space<'a>(theory: &'a GroundTheory) -> Result<(Frame, Space<'a>)> {
    let frame = Frame::flat(theory, &[]);
    let space = Space { theory, atoms: frame.agents.iter().map(|a| a.atoms.clone()).collect() };
    let count = frame.agents.iter().try_fold(1u64, |acc, a| {
        let worlds = 1u32.checked_shl(a.atoms.len() as u32).filter(|&w| w <= 16)?;
        acc.checked_mul(1u64 << worlds)
    });
    match count {
        Some(c) if c <= ORACLE_DPWS_CAP => {}
        _ => return Err(Error::cap("DPWSs for the oracle", count.unwrap_or(u64::MAX), ORACLE_DPWS_CAP)),
    }
    Ok((frame, space))
}

/// Every DPWS over `Frame::flat`.
pub fn all_dpws(theory: &GroundTheory) -> Result<(Frame, Vec<Dpws>)> {
    let (frame, space) = space(theory)?;
    let all = space.all().iter().map(|q| to_dpws(&frame, q)).collect();
    Ok((frame, all))
}

/// All five semantics by exhaustive search, expressed over `Frame::flat`.
pub fn brute_force(theory: &GroundTheory) -> Result<(Frame, OracleModels)> {
    let (frame, space) = space(theory)?;
    let all = space.all();
    let revise = |q: &Q| space.conservative(q, q);
    let supported: Vec<Q> = all.iter().filter(|q| revise(q) == **q).cloned().collect();
    // S(Q): the ≤_K-least fixpoint of x ↦ D^c(x, Q).
    let stable_of: Vec<Q> = all
        .iter()
        .map(|q| {
            let fix: Vec<Q> = all.iter().filter(|x| space.conservative(x, q) == **x).cloned().collect();
            least(&fix, le_k)
        })
        .collect::<Result<_>>()?;
    let index = |q: &Q| all.iter().position(|x| x == q).expect("enumerated");
    let s = |q: &Q| &stable_of[index(q)];
    let stable: Vec<Q> = all.iter().filter(|q| s(q) == *q && revise(q) == **q).cloned().collect();
    let mut consistent_fix = Vec::new();
    let mut partial_stable = Vec::new();
    for c in &all {
        for l in &all {
            if !le_k(c, l) {
                continue;
            }
            if space.conservative(c, l) == *c && space.liberal(c, l) == *l {
                consistent_fix.push((c.clone(), l.clone()));
            }
            if s(l) == c && s(c) == l {
                partial_stable.push((c.clone(), l.clone()));
            }
        }
    }
    let kk = least(&consistent_fix, le_p)?;
    let wf = least(&partial_stable, le_p)?;
    let pair = |(c, l): &(Q, Q)| BeliefPair::new(to_dpws(&frame, c), to_dpws(&frame, l));
    let mut models = OracleModels {
        supported: supported.iter().map(|q| to_dpws(&frame, q)).collect(),
        stable: stable.iter().map(|q| to_dpws(&frame, q)).collect(),
        partial_stable: partial_stable.iter().map(pair).collect(),
        kripke_kleene: pair(&kk),
        well_founded: pair(&wf),
    };
    models.supported.sort();
    models.stable.sort();
    models.partial_stable.sort();
    Ok((frame, models))
}

pub fn convert_dpws(from: &Frame, q: &Dpws, to: &Frame) -> Result<Dpws> {
    let sets = (0..q.sets.len()).map(|a| from.convert(a, &q.sets[a], to)).collect::<Result<_>>()?;
    Ok(Dpws { sets })
}

pub fn convert_pair(from: &Frame, b: &BeliefPair, to: &Frame) -> Result<BeliefPair> {
    Ok(BeliefPair::new(convert_dpws(from, &b.conservative, to)?, convert_dpws(from, &b.liberal, to)?))
}

/// Runs the engine and the oracle; returns one line per disagreement.
pub fn cross_check(theory: &GroundTheory, limits: &Limits) -> Result<Vec<String>> {
    let (flat, oracle) = brute_force(theory)?;
    let engine = Engine::new(theory.clone(), limits.clone())?;
    let f = &engine.frame;
    let mut out = Vec::new();
    let sorted = |mut v: Vec<Dpws>| {
        v.sort();
        v
    };
    let sup = sorted(engine.supported_models()?.iter().map(|q| convert_dpws(f, q, &flat)).collect::<Result<_>>()?);
    if sup != oracle.supported {
        out.push(format!("supported: engine {} models, oracle {}", sup.len(), oracle.supported.len()));
    }
    let st = sorted(engine.stable_models()?.iter().map(|q| convert_dpws(f, q, &flat)).collect::<Result<_>>()?);
    if st != oracle.stable {
        out.push(format!("stable: engine {} models, oracle {}", st.len(), oracle.stable.len()));
    }
    let mut pst: Vec<BeliefPair> =
        engine.partial_stable_models()?.iter().map(|b| convert_pair(f, b, &flat)).collect::<Result<_>>()?;
    pst.sort();
    if pst != oracle.partial_stable {
        out.push(format!("partial stable: engine {} models, oracle {}", pst.len(), oracle.partial_stable.len()));
    }
    if convert_pair(f, &engine.kripke_kleene()?, &flat)? != oracle.kripke_kleene {
        out.push("Kripke-Kleene model differs".to_string());
    }
    if convert_pair(f, &engine.well_founded()?, &flat)? != oracle.well_founded {
        out.push("well-founded model differs".to_string());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::ground_theory;
    use crate::syntax::parse_theory;

    fn ground(src: &str) -> GroundTheory {
        ground_theory(&parse_theory(src).unwrap(), &Limits::default()).unwrap()
    }

    #[test]
    fn candy_oracle() {
        let g = ground("agents M,D. pred c/0. theory D { K[M] c => c. } theory M { K[D] c => c. }");
        let (_, m) = brute_force(&g).unwrap();
        assert_eq!(m.supported.len(), 2);
        assert_eq!(m.stable.len(), 1);
        assert_eq!(m.partial_stable.len(), 1);
        assert!(m.well_founded.is_exact());
        assert!(cross_check(&g, &Limits::default()).unwrap().is_empty());
    }

    #[test]
    fn two_agent_self_reference() {
        // T_A = {}, T_B = {p <=> ~K[A] p}: A knows nothing, so B knows p.
        let g = ground("agents A,B. pred p/0. theory A { } theory B { p <=> ~K[A] p. }");
        let (frame, m) = brute_force(&g).unwrap();
        assert_eq!(m.partial_stable.len(), 1);
        let b = &m.partial_stable[0];
        assert!(b.is_exact());
        assert_eq!(b.conservative.sets[1].literals(&frame.agents[1]), Some(vec![(0, true)]));
        assert!(cross_check(&g, &Limits::default()).unwrap().is_empty());
    }

    #[test]
    fn oracle_refuses_large_frames() {
        let g = ground("agents A. pred p/0. pred q/0. pred r/0. pred s/0. pred t/0. theory A { p | q | r | s | t. }");
        assert!(matches!(brute_force(&g), Err(Error::Cap { .. })));
    }
}
