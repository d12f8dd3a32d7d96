//! Delegation and revocation scenarios under strong global negative revocation, encoded as
//! distributed theories whose owner decides access.

use std::fmt;

use crate::aft::{Engine, Semantics};
use crate::error::{Error, Result};
use crate::fast::fast_well_founded;
use crate::ground::{ground_theory, Ground, GroundAtom, GroundTheory};
use crate::limits::Limits;
use crate::syntax::{parse_theory, DistributedTheory};
use crate::truth::Tv;
use crate::worlds::Interpretation;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Scenario {
    pub owner: String,
    pub resource: String,
    pub principals: Vec<String>,
    pub grants: Vec<(String, String)>,
    pub revokes: Vec<(String, String)>,
    /// Extra sentences per principal, in source syntax.
    pub statements: Vec<(String, String)>,
}

fn perr<T>(line: usize, col: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, col, msg: msg.into() })
}

fn is_name(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(|c| c.is_ascii_alphabetic()) && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Splits on `;` outside double quotes, dropping `#` comments; yields (line, col, text).
fn statements(src: &str) -> Result<Vec<(usize, usize, String)>> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let (mut line, mut col) = (1, 1);
    let mut start = None;
    let mut quoted = false;
    let mut comment = false;
    for c in src.chars() {
        if comment {
            if c == '\n' {
                comment = false;
            }
        } else if c == '"' {
            quoted = !quoted;
            cur.push(c);
        } else if c == '#' && !quoted {
            comment = true;
        } else if c == ';' && !quoted {
            if let Some((l, k)) = start.take() {
                out.push((l, k, cur.trim().to_string()));
            }
            cur.clear();
        } else {
            if start.is_none() && !c.is_whitespace() {
                start = Some((line, col));
            }
            cur.push(c);
        }
        if c == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    if quoted {
        return perr(line, col, "unterminated string");
    }
    if let Some((l, k)) = start {
        if !cur.trim().is_empty() {
            return perr(l, k, "statement is missing its terminating `;`");
        }
    }
    Ok(out)
}

fn edge(rest: &str, line: usize, col: usize) -> Result<(String, String)> {
    let Some((a, b)) = rest.split_once("->") else {
        return perr(line, col, "expected `X -> Y`");
    };
    let (a, b) = (a.trim(), b.trim());
    if !is_name(a) || !is_name(b) {
        return perr(line, col, format!("bad principal name in `{rest}`"));
    }
    Ok((a.to_string(), b.to_string()))
}

pub fn parse_scenario(src: &str) -> Result<Scenario> {
    let mut s = Scenario::default();
    let mut declared: Option<Vec<String>> = None;
    let mut mentioned: Vec<String> = Vec::new();
    let mut mention = |p: &str| {
        if !mentioned.iter().any(|x| x == p) {
            mentioned.push(p.to_string());
        }
    };
    for (line, col, text) in statements(src)? {
        let (kw, rest) = text.split_once(char::is_whitespace).unwrap_or((text.as_str(), ""));
        let rest = rest.trim();
        match kw {
            "principals" => {
                let names: Vec<String> = rest.split(',').map(|x| x.trim().to_string()).collect();
                if let Some(bad) = names.iter().find(|n| !is_name(n)) {
                    return perr(line, col, format!("bad principal name `{bad}`"));
                }
                declared = Some(names);
            }
            "owner" | "resource" => {
                if !is_name(rest) {
                    return perr(line, col, format!("bad {kw} name `{rest}`"));
                }
                if kw == "owner" {
                    s.owner = rest.to_string();
                    mention(rest);
                } else {
                    s.resource = rest.to_string();
                }
            }
            "grant" | "revoke" => {
                let (a, b) = edge(rest, line, col)?;
                mention(&a);
                mention(&b);
                if kw == "grant" {
                    s.grants.push((a, b));
                } else {
                    s.revokes.push((a, b));
                }
            }
            "statement" => {
                let (who, f) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                let f = f.trim();
                if !is_name(who) || f.len() < 2 || !f.starts_with('"') || !f.ends_with('"') {
                    return perr(line, col, "expected `statement P \"formula\"`");
                }
                mention(who);
                s.statements.push((who.to_string(), f[1..f.len() - 1].to_string()));
            }
            _ => return perr(line, col, format!("unknown statement `{kw}`")),
        }
    }
    if s.owner.is_empty() {
        return perr(1, 1, "no owner declared");
    }
    if s.resource.is_empty() {
        return perr(1, 1, "no resource declared");
    }
    s.principals = match declared {
        Some(ps) => {
            if let Some(p) = mentioned.iter().find(|p| !ps.contains(p)) {
                return Err(Error::Invalid(format!("unknown principal {p}")));
            }
            ps
        }
        None => mentioned,
    };
    if s.principals.contains(&s.resource) {
        return Err(Error::Invalid(format!("resource {} clashes with a principal", s.resource)));
    }
    Ok(s)
}

/// Source text of the distributed theory: the owner's two access axioms plus every
/// principal's delegation and revocation facts and extra statements.
pub fn scenario_source(s: &Scenario) -> Result<String> {
    for p in s.grants.iter().chain(&s.revokes).flat_map(|(a, b)| [a, b]).chain(s.statements.iter().map(|(p, _)| p)) {
        if !s.principals.contains(p) {
            return Err(Error::Invalid(format!("unknown principal {p}")));
        }
    }
    if !s.principals.contains(&s.owner) {
        return Err(Error::Invalid(format!("owner {} is not a principal", s.owner)));
    }
    let (o, r) = (&s.owner, &s.resource);
    let mut out = format!("agents {}.\ndomain {{ {r} }}.\npred access/2.\npred deleg_to/1.\npred revoke/1.\n", s.principals.join(", "));
    for p in &s.principals {
        out.push_str(&format!("theory {p} {{\n"));
        if p == o {
            out.push_str(&format!("  access({o}, {r}).\n"));
            out.push_str(&format!(
                "  forall j: (exists k: K[{o}] access(k, {r}) & K[k] deleg_to(j)) & ~(exists i: K[{o}] access(i, {r}) & K[i] revoke(j)) => access(j, {r}).\n"
            ));
        }
        for (a, b) in &s.grants {
            if a == p {
                out.push_str(&format!("  deleg_to({b}).\n"));
            }
        }
        for (a, b) in &s.revokes {
            if a == p {
                out.push_str(&format!("  revoke({b}).\n"));
            }
        }
        for (who, f) in &s.statements {
            if who == p {
                out.push_str(&format!("  {f}.\n"));
            }
        }
        out.push_str("}\n");
    }
    Ok(out)
}

pub fn scenario_to_theory(s: &Scenario) -> Result<DistributedTheory> {
    parse_theory(&scenario_source(s)?)
}

/// `K_owner access(X, r)` per principal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AccessDecisions {
    pub semantics: Semantics,
    pub decisions: Vec<(String, Tv)>,
}

impl AccessDecisions {
    /// Principals with access; u is denied.
    pub fn granted(&self) -> Vec<&str> {
        self.decisions.iter().filter(|(_, t)| *t == Tv::T).map(|(p, _)| p.as_str()).collect()
    }

    pub fn get(&self, principal: &str) -> Option<Tv> {
        self.decisions.iter().find(|(p, _)| p == principal).map(|(_, t)| *t)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let decisions: serde_json::Map<String, serde_json::Value> =
            self.decisions.iter().map(|(p, t)| (p.clone(), serde_json::Value::from(t.symbol()))).collect();
        serde_json::json!({
            "semantics": self.semantics.code(),
            "decisions": decisions,
            "granted": self.granted(),
        })
    }
}

impl fmt::Display for AccessDecisions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.decisions.iter().map(|(p, t)| format!("{p}^{t}")).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

fn access_atom(g: &GroundTheory, principal: &str, resource: &str) -> Result<Option<usize>> {
    let idx = |n: &str| g.domain.iter().position(|d| d == n).ok_or_else(|| Error::Invalid(format!("{n} is not a domain element")));
    Ok(g.table.get(&GroundAtom { pred: "access".into(), args: vec![idx(principal)?, idx(resource)?] }))
}

/// t only if t in every model, f only if f in every model; u otherwise, including when
/// there is no model at all.
pub fn skeptical(values: &[Tv]) -> Tv {
    match values.first() {
        Some(&v) if values.iter().all(|&x| x == v) => v,
        _ => Tv::U,
    }
}

/// Access decisions of `owner` for `resource`. Partial stable semantics is read through the
/// well-founded model; `fast` uses the rule-fragment solver and supports only the
/// well-founded semantics.
pub fn access_decision(
    theory: &GroundTheory,
    owner: &str,
    resource: &str,
    sem: Semantics,
    fast: bool,
    limits: &Limits,
) -> Result<AccessDecisions> {
    let owner_idx = theory.agent_index(owner).ok_or_else(|| Error::Invalid(format!("unknown owner {owner}")))?;
    let mut decisions = Vec::new();
    if fast {
        if sem != Semantics::WellFounded {
            return Err(Error::Invalid("the fast path computes the well-founded model only".into()));
        }
        let (pair, _) = fast_well_founded(theory)?;
        for p in &theory.agents {
            let tv = match access_atom(theory, p, resource)? {
                Some(a) => pair.knows(owner_idx, a, true),
                None => Tv::from_bounds(pair.conservative[owner_idx].is_none(), pair.liberal[owner_idx].is_none()).unwrap_or(Tv::T),
            };
            decisions.push((p.clone(), tv));
        }
        return Ok(AccessDecisions { semantics: sem, decisions });
    }
    let engine = Engine::new(theory.clone(), limits.clone())?;
    let models = match sem {
        Semantics::PartialStable => engine.models(Semantics::WellFounded)?,
        s => engine.models(s)?,
    };
    let interp = Interpretation::new(theory.table.len());
    for p in &theory.agents {
        let query = match access_atom(theory, p, resource)? {
            Some(a) => Ground::knows(owner_idx, Ground::Atom(a)),
            None => Ground::knows(owner_idx, Ground::Const(false)),
        };
        let values = models.iter().map(|b| engine.eval3(&query, b, &interp)).collect::<Result<Vec<_>>>()?;
        decisions.push((p.clone(), skeptical(&values)));
    }
    Ok(AccessDecisions { semantics: sem, decisions })
}

/// Parses, grounds and decides a scenario file.
pub fn decide_scenario(src: &str, sem: Semantics, fast: bool, limits: &Limits) -> Result<AccessDecisions> {
    let s = parse_scenario(src)?;
    let g = ground_theory(&scenario_to_theory(&s)?, limits)?;
    access_decision(&g, &s.owner, &s.resource, sem, fast, limits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_statement_kinds() {
        let s = parse_scenario(
            "# demo\nprincipals A, B, C; owner A; resource r;\ngrant A -> B; revoke C -> B;\nstatement B \"access(B, r) & ~access(B, r)\";",
        )
        .unwrap();
        assert_eq!(s.principals, ["A", "B", "C"]);
        assert_eq!(s.grants, [("A".to_string(), "B".to_string())]);
        assert_eq!(s.revokes, [("C".to_string(), "B".to_string())]);
        assert_eq!(s.statements[0].1, "access(B, r) & ~access(B, r)");
    }

    #[test]
    fn rejects_unknown_principals() {
        assert!(matches!(parse_scenario("principals A; owner A; resource r; grant A -> Z;"), Err(Error::Invalid(_))));
        assert!(matches!(parse_scenario("owner A; resource r; grant A -> B"), Err(Error::Parse { .. })));
    }

    #[test]
    fn no_edges_grants_only_the_owner() {
        let d = decide_scenario("principals A, B; owner A; resource r;", Semantics::WellFounded, false, &Limits::default()).unwrap();
        assert_eq!(d.to_string(), "{A^t,B^f}");
        let fast = decide_scenario("principals A, B; owner A; resource r;", Semantics::WellFounded, true, &Limits::default()).unwrap();
        assert_eq!(fast, d);
    }

    #[test]
    fn skeptical_merge() {
        assert_eq!(skeptical(&[Tv::T, Tv::T]), Tv::T);
        assert_eq!(skeptical(&[Tv::F, Tv::F]), Tv::F);
        assert_eq!(skeptical(&[Tv::T, Tv::F]), Tv::U);
        assert_eq!(skeptical(&[]), Tv::U);
    }
}
