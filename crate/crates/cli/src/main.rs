//! `daelix`: command-line front end for the dAEL engine.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use daelix::access::decide_scenario;
use daelix::ael::translate_theory_ast;
use daelix::fast::{fast_well_founded, rule_offender};
use daelix::ground::ground_with;
use daelix::oracle::cross_check;
use daelix::query::decide;
use daelix::worlds::pair_json;
use daelix::{ground_theory, parse_formula, parse_theory, BeliefPair, Engine, Error, GroundTheory, Limits, Semantics};

const SEMANTICS: [&str; 5] = ["sup", "kk", "st", "pst", "wf"];

#[derive(Parser)]
#[command(name = "daelix", version, about = "Reasoning engine for distributed autoepistemic logic")]
struct Cli {
    /// Human-readable output instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, validate and ground a theory; report whether it is a rule theory.
    Check { file: PathBuf },
    /// Compute the models of a theory under one semantics.
    Solve {
        file: PathBuf,
        #[arg(long, value_parser = SEMANTICS)]
        semantics: String,
        /// Well-founded model through the rule-fragment solver.
        #[arg(long)]
        fast: bool,
    },
    /// Decide a query directed at one agent with the communication procedure.
    Query {
        file: PathBuf,
        #[arg(long)]
        agent: String,
        #[arg(long)]
        formula: String,
        /// Include the subquery trace.
        #[arg(long)]
        trace: bool,
        /// Write the query graph in Graphviz format.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Print the single-agent AEL translation.
    Translate { file: PathBuf },
    /// Access decisions of an authorization scenario.
    Scenario {
        file: PathBuf,
        #[arg(long, value_parser = SEMANTICS, default_value = "wf")]
        semantics: String,
        #[arg(long)]
        fast: bool,
    },
    /// Cross-check the engine against brute-force enumeration.
    Oracle { file: PathBuf },
}

enum Failure {
    Usage(String),
    Engine(Error),
    Mismatch,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Engine(e)
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load(path: &PathBuf, limits: &Limits) -> Result<GroundTheory, Failure> {
    Ok(ground_theory(&parse_theory(&read(path)?)?, limits)?)
}

fn emit(value: &Value) {
    println!("{value}");
}

fn set_text(v: &Value) -> String {
    let names = |xs: &Value| -> Vec<String> { xs.as_array().into_iter().flatten().filter_map(|x| x.as_str().map(String::from)).collect() };
    let worlds = |ws: &Value| -> String {
        let items: Vec<String> = ws.as_array().into_iter().flatten().map(|w| format!("{{{}}}", names(w).join(", "))).collect();
        format!("{{{}}}", items.join(", "))
    };
    if let Some(lits) = v.get("literals") {
        let lits = names(lits);
        if lits.is_empty() {
            "knows nothing".into()
        } else {
            format!("knows {}", lits.join(", "))
        }
    } else if let Some(ws) = v.get("worlds") {
        if ws.as_array().is_some_and(Vec::is_empty) {
            "inconsistent".into()
        } else {
            worlds(ws)
        }
    } else {
        let parts: Vec<String> = v["factors"]
            .as_array()
            .into_iter()
            .flatten()
            .map(|f| format!("[{}] {}", names(&f["atoms"]).join(", "), worlds(&f["worlds"])))
            .collect();
        parts.join(" x ")
    }
}

fn print_pair(g: &GroundTheory, model: &Value) {
    for agent in &g.agents {
        let c = set_text(&model["conservative"][agent]);
        let l = set_text(&model["liberal"][agent]);
        if c == l {
            println!("  {agent}: {c}");
        } else {
            println!("  {agent}: {c} .. {l}");
        }
    }
}

fn solve(file: &PathBuf, sem: Semantics, fast: bool, pretty: bool, limits: &Limits) -> Outcome {
    let g = load(file, limits)?;
    if fast && sem != Semantics::WellFounded {
        return Err(Failure::Usage("--fast computes the well-founded model only; use --semantics wf".into()));
    }
    let engine = Engine::new(g.clone(), limits.clone())?;
    let models: Vec<BeliefPair> = if fast {
        let (lits, _) = fast_well_founded(&g)?;
        vec![lits.to_belief_pair(&engine.frame)?]
    } else {
        engine.models(sem)?
    };
    let rendered: Vec<Value> = models
        .iter()
        .map(|b| {
            let mut v = pair_json(b, &engine.frame, &g);
            v["exact"] = json!(b.is_exact());
            v
        })
        .collect();
    if pretty {
        println!("{} model(s) under {sem}", models.len());
        for (i, (b, v)) in models.iter().zip(&rendered).enumerate() {
            println!("model {}{}", i + 1, if b.is_exact() { " (exact)" } else { "" });
            print_pair(&g, v);
        }
    } else {
        emit(&json!({ "semantics": sem.code(), "models": rendered }));
    }
    Ok(())
}

fn check(file: &PathBuf, pretty: bool, limits: &Limits) -> Outcome {
    let t = parse_theory(&read(file)?)?;
    let g = ground_theory(&t, limits)?;
    let offender = rule_offender(&g).map(|o| format!("{}: {}", g.agents[o.agent], g.display(&o.formula)));
    let sentences: usize = g.theories.iter().map(Vec::len).sum();
    if pretty {
        println!("agents: {}", g.agents.join(", "));
        println!("ground atoms: {}", g.table.len());
        println!("sentences: {sentences}, formula nodes: {}", g.total_nodes());
        match &offender {
            None => println!("rule theory: yes"),
            Some(o) => println!("rule theory: no ({o})"),
        }
    } else {
        emit(&json!({
            "agents": g.agents,
            "atoms": g.table.len(),
            "sentences": sentences,
            "nodes": g.total_nodes(),
            "rule_theory": offender.is_none(),
            "offender": offender,
        }));
    }
    Ok(())
}

fn query(file: &PathBuf, agent: &str, formula: &str, trace: bool, dot: Option<&PathBuf>, pretty: bool, limits: &Limits) -> Outcome {
    let t = parse_theory(&read(file)?)?;
    let phi = parse_formula(formula, &t)?;
    let (g, mut extra) = ground_with(&t, &[phi], limits)?;
    let phi = extra.remove(0);
    let a = g.agent_index(agent).ok_or_else(|| Error::Invalid(format!("unknown agent {agent}")))?;
    let d = decide(&g, a, &phi, limits)?;
    if let Some(path) = dot {
        std::fs::write(path, d.graph.to_dot(&g)).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    }
    let events: Vec<Value> = d
        .trace
        .iter()
        .map(|e| json!({ "from": g.agents[e.asker], "to": g.agents[e.askee], "formula": g.display(&e.formula).to_string(), "answer": e.answer }))
        .collect();
    if pretty {
        println!("<{agent}:{}> = {}", g.display(&phi), d.answer);
        println!("{} query vertices, {} set vertices, {} remote subqueries", d.graph.queries.len(), d.graph.sets.len(), d.remote_events());
        if trace {
            for e in &d.trace {
                println!("  {} asks {}: {} -> {}", g.agents[e.asker], g.agents[e.askee], g.display(&e.formula), e.answer);
            }
        }
    } else {
        let mut out = json!({
            "agent": agent,
            "formula": g.display(&phi).to_string(),
            "answer": d.answer,
            "query_vertices": d.graph.queries.len(),
            "set_vertices": d.graph.sets.len(),
            "remote_subqueries": d.remote_events(),
        });
        if trace {
            out["trace"] = Value::Array(events);
        }
        emit(&out);
    }
    Ok(())
}

fn scenario(file: &PathBuf, sem: Semantics, fast: bool, pretty: bool, limits: &Limits) -> Outcome {
    let d = decide_scenario(&read(file)?, sem, fast, limits)?;
    if pretty {
        println!("{d}");
        println!("granted: {}", d.granted().join(", "));
    } else {
        emit(&d.to_json());
    }
    Ok(())
}

fn oracle(file: &PathBuf, pretty: bool, limits: &Limits) -> Outcome {
    let g = load(file, limits)?;
    let mismatches = cross_check(&g, limits)?;
    if pretty {
        if mismatches.is_empty() {
            println!("engine agrees with brute force on all five semantics");
        }
        for m in &mismatches {
            println!("mismatch: {m}");
        }
    } else {
        emit(&json!({ "agree": mismatches.is_empty(), "mismatches": mismatches }));
    }
    if mismatches.is_empty() {
        Ok(())
    } else {
        Err(Failure::Mismatch)
    }
}

fn run(cli: Cli) -> Outcome {
    let limits = Limits::from_env().map_err(Failure::Usage)?;
    let sem = |s: &str| s.parse::<Semantics>().map_err(Failure::Engine);
    let pretty = cli.pretty;
    match &cli.command {
        Command::Check { file } => check(file, pretty, &limits),
        Command::Solve { file, semantics, fast } => solve(file, sem(semantics)?, *fast, pretty, &limits),
        Command::Query { file, agent, formula, trace, dot } => query(file, agent, formula, *trace, dot.as_ref(), pretty, &limits),
        Command::Translate { file } => {
            let t = parse_theory(&read(file)?)?;
            print!("{}", translate_theory_ast(&t)?);
            Ok(())
        }
        Command::Scenario { file, semantics, fast } => scenario(file, sem(semantics)?, *fast, pretty, &limits),
        Command::Oracle { file } => oracle(file, pretty, &limits),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Engine(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if matches!(e, Error::Cap { .. }) { 3 } else { 2 })
        }
        Err(Failure::Mismatch) => ExitCode::from(4),
    }
}
