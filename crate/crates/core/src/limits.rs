/// Resource caps shared by every expensive operation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest atom count of one explicit world bitset (2^n worlds).
    pub world_atoms: usize,
    /// Largest number of worlds enumerated when evaluating one modal atom.
    pub world_enumeration: u64,
    /// Candidate count for model enumeration.
    pub candidates: u64,
    /// Node count of a grounded sentence.
    pub sentence_nodes: usize,
    /// Non-nested modal occurrences per agent for the brute-force permaconsistency check.
    pub perma_occurrences: usize,
    /// Says-atoms considered when enumerating marker structures.
    pub says_atoms: usize,
    /// Unassigned variables in one partial-model expansion.
    pub expansion_vars: usize,
    /// Query vertices in one decision run.
    pub query_vertices: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            world_atoms: 20,
            world_enumeration: 1 << 22,
            candidates: 1 << 16,
            sentence_nodes: 1_000_000,
            perma_occurrences: 16,
            says_atoms: 12,
            expansion_vars: 24,
            query_vertices: 1 << 22,
        }
    }
}

impl Limits {
    pub const ENV_WORLD_CAP: &'static str = "DAELIX_WORLD_CAP";

    /// Defaults, with `DAELIX_WORLD_CAP` overriding the world atom cap when set.
    pub fn from_env() -> Result<Limits, String> {
        let mut limits = Limits::default();
        if let Ok(raw) = std::env::var(Self::ENV_WORLD_CAP) {
            let n: usize = raw
                .trim()
                .parse()
                .map_err(|_| format!("{} must be a non-negative integer, got {raw:?}", Self::ENV_WORLD_CAP))?;
            if n > 30 {
                return Err(format!("{} is limited to 30", Self::ENV_WORLD_CAP));
            }
            limits.world_atoms = n;
        }
        Ok(limits)
    }
}
