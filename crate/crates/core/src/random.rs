//! Seeded generators of small theories, emitted as source text.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const AGENTS: [&str; 4] = ["A", "B", "C", "D"];
const ATOMS: [&str; 4] = ["p", "q", "r", "s"];

/// Size bounds for generated theories; agent and atom counts are upper bounds.
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub agents: usize,
    pub atoms: usize,
    pub sentences: usize,
    pub depth: usize,
}

impl Shape {
    /// Small enough for the brute-force oracle.
    pub const ORACLE: Shape = Shape { agents: 2, atoms: 2, sentences: 2, depth: 2 };
    pub const RULES: Shape = Shape { agents: 3, atoms: 3, sentences: 3, depth: 2 };
}

struct Gen {
    rng: ChaCha8Rng,
    agents: Vec<&'static str>,
    atoms: Vec<&'static str>,
}

impl Gen {
    fn new(seed: u64, shape: Shape) -> Gen {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let agents = AGENTS[..rng.gen_range(1..=shape.agents.clamp(1, 4))].to_vec();
        let atoms = ATOMS[..rng.gen_range(1..=shape.atoms.clamp(1, 4))].to_vec();
        Gen { rng, agents, atoms }
    }

    fn agent(&mut self) -> &'static str {
        self.agents.choose(&mut self.rng).copied().unwrap_or("A")
    }

    fn literal(&mut self) -> String {
        let a = self.atoms.choose(&mut self.rng).copied().unwrap_or("p");
        if self.rng.gen_bool(0.3) {
            format!("~{a}")
        } else {
            a.to_string()
        }
    }

    fn formula(&mut self, depth: usize) -> String {
        let choice = if depth == 0 { 0 } else { self.rng.gen_range(0..7) };
        match choice {
            0 => self.literal(),
            1 => format!("~({})", self.formula(depth - 1)),
            2 => format!("({} & {})", self.formula(depth - 1), self.formula(depth - 1)),
            3 => format!("({} | {})", self.formula(depth - 1), self.formula(depth - 1)),
            4 => format!("({} => {})", self.formula(depth - 1), self.formula(depth - 1)),
            5 => format!("({} <=> {})", self.formula(depth - 1), self.formula(depth - 1)),
            _ => {
                let b = self.agent();
                format!("K[{b}] {}", self.formula(depth - 1))
            }
        }
    }

    /// An argument of `K` that the rule reading accepts.
    fn scope(&mut self) -> String {
        match self.rng.gen_range(0..5) {
            0 | 1 => self.literal(),
            2 => format!("({} & {})", self.literal(), self.literal()),
            3 => {
                let b = self.agent();
                format!("({} | K[{b}] {})", self.literal(), self.literal())
            }
            _ => {
                let b = self.agent();
                format!("({} & ~K[{b}] {})", self.literal(), self.literal())
            }
        }
    }

    fn guard(&mut self) -> String {
        let b = self.agent();
        let k = format!("K[{b}] {}", self.scope());
        if self.rng.gen_bool(0.3) {
            format!("~{k}")
        } else {
            k
        }
    }

    fn rule(&mut self) -> String {
        let head = self.literal();
        match self.rng.gen_range(0..4) {
            0 => head,
            n => {
                let guards: Vec<String> = (0..n.min(2)).map(|_| self.guard()).collect();
                format!("{} => {head}", guards.join(" & "))
            }
        }
    }

    fn render(&mut self, shape: Shape, mut sentence: impl FnMut(&mut Gen) -> String) -> String {
        let mut out = format!("agents {}.\n", self.agents.join(", "));
        for a in &self.atoms.clone() {
            out.push_str(&format!("pred {a}/0.\n"));
        }
        for agent in self.agents.clone() {
            out.push_str(&format!("theory {agent} {{\n"));
            for _ in 0..self.rng.gen_range(0..=shape.sentences) {
                out.push_str(&format!("  {}.\n", sentence(self)));
            }
            out.push_str("}\n");
        }
        out
    }
}

/// Arbitrary propositional dAEL theory.
pub fn random_theory(seed: u64, shape: Shape) -> String {
    let mut g = Gen::new(seed, shape);
    g.render(shape, |g| {
        let d = g.rng.gen_range(0..=shape.depth);
        g.formula(d)
    })
}

/// Theory whose every sentence is a fact or `guards => literal`.
pub fn random_rule_theory(seed: u64, shape: Shape) -> String {
    let mut g = Gen::new(seed, shape);
    g.render(shape, Gen::rule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fast::is_rule_theory;
    use crate::ground::ground_theory;
    use crate::syntax::parse_theory;
    use crate::Limits;

    #[test]
    fn deterministic_and_parseable() {
        for seed in 0..50 {
            let a = random_theory(seed, Shape::ORACLE);
            assert_eq!(a, random_theory(seed, Shape::ORACLE));
            ground_theory(&parse_theory(&a).unwrap(), &Limits::default()).unwrap();
        }
    }

    #[test]
    fn rule_theories_are_rule_theories() {
        for seed in 0..200 {
            let src = random_rule_theory(seed, Shape::RULES);
            let g = ground_theory(&parse_theory(&src).unwrap(), &Limits::default()).unwrap();
            assert!(is_rule_theory(&g), "{src}");
        }
    }
}
