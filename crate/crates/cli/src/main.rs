//! `wfomc`: exact (weighted) model counting for C² problem files.

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;
use wfomc::celltypes::build_tables_with;
use wfomc::engine::{solve, Counters, EngineOptions};
use wfomc::formula::{parse_problem, Problem};
use wfomc::oracle::{oracle_evaluate, OracleOptions};
use wfomc::transform::compile;
use wfomc::weights::{format_rational, normalize, WeightSpec};

#[derive(Parser)]
#[command(
    name = "wfomc",
    version,
    about = "Exact lifted model counting for two-variable logic with counting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Number of models, ignoring any weights in the file.
    Count(Common),
    /// Weighted model count.
    Weighted(Common),
    /// Distribution of the cardinalities of the `--of` predicates.
    Dist(Common),
    /// Brute-force enumeration; the distribution when `--of` is given.
    Oracle(Common),
    /// Closed form against the oracle for every domain size up to `--max-n`.
    Check(Common),
    /// Cell-type tables of the compiled kernel.
    Tables(Common),
    /// The compiled universal program.
    Program(Common),
}

#[derive(Args)]
struct Common {
    file: PathBuf,
    /// Emit a JSON report on standard output.
    #[arg(long)]
    json: bool,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Override the domain size given in the file.
    #[arg(short = 'n', long)]
    domain: Option<u64>,
    /// Print the cell-type tables to standard error.
    #[arg(long)]
    dump_tables: bool,
    /// Print the compiled program to standard error.
    #[arg(long)]
    dump_program: bool,
    /// Largest domain size tried by `check` (default: the file's domain).
    #[arg(long)]
    max_n: Option<u64>,
    /// Add a floating-point approximation next to the exact result.
    #[arg(long)]
    approx: bool,
    /// Report enumeration progress on standard error.
    #[arg(long)]
    progress: bool,
    /// Split `count` and `weighted` results by these predicates' cardinalities.
    #[arg(long, value_delimiter = ',')]
    query: Vec<String>,
    /// Predicates whose cardinalities `dist` and `oracle` tabulate.
    #[arg(long, value_delimiter = ',')]
    of: Vec<String>,
    /// Ground atom limit for the oracle.
    #[arg(long, default_value_t = OracleOptions::default().max_atoms)]
    max_atoms: usize,
}

#[derive(Debug)]
struct Mismatch(String);

impl std::fmt::Display for Mismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Mismatch {}

/// What a command produced, before rendering.
struct Outcome {
    result: Value,
    text: String,
    counters: Counters,
    approx: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<Mismatch>().is_some() {
        return 4;
    }
    match e.downcast_ref::<wfomc::Error>() {
        Some(wfomc::Error::Parse(_)) => 2,
        Some(wfomc::Error::Capacity(_) | wfomc::Error::OracleLimit { .. }) => 3,
        _ if e.downcast_ref::<wfomc::ParseError>().is_some() => 2,
        _ => 1,
    }
}

fn run(command: Command) -> anyhow::Result<()> {
    let (name, args) = match &command {
        Command::Count(a) => ("count", a),
        Command::Weighted(a) => ("weighted", a),
        Command::Dist(a) => ("dist", a),
        Command::Oracle(a) => ("oracle", a),
        Command::Check(a) => ("check", a),
        Command::Tables(a) => ("tables", a),
        Command::Program(a) => ("program", a),
    };
    let text = std::fs::read_to_string(&args.file)
        .with_context(|| format!("reading {}", args.file.display()))?;
    let mut problem = parse_problem(&text).map_err(wfomc::Error::from)?;
    if let Some(n) = args.domain {
        problem.domain = n;
    }
    let options = EngineOptions {
        threads: args.threads,
        progress: args.progress,
        ..EngineOptions::default()
    };
    if args.dump_program {
        eprint!(
            "{}",
            compile(&problem).dump(problem.domain, &problem.weights)
        );
    }
    if args.dump_tables {
        let program = compile(&problem);
        let tables = build_tables_with(&program.kernel, &program.signature, &options.limits)?;
        eprintln!("{}", serde_json::to_string_pretty(&tables.dump())?);
    }

    let start = Instant::now();
    let outcome = match command {
        Command::Count(_) => {
            problem.weights = WeightSpec::Unweighted;
            totals(&problem, args, &options)?
        }
        Command::Weighted(_) => totals(&problem, args, &options)?,
        Command::Dist(_) => distribution(&problem, args, &options)?,
        Command::Oracle(_) => oracle(&problem, args)?,
        Command::Check(_) => check(&problem, args, &options)?,
        Command::Tables(_) => {
            let program = compile(&problem);
            let tables = build_tables_with(&program.kernel, &program.signature, &options.limits)?;
            let dump = tables.dump();
            let mut text = format!(
                "u = {}, b = {}\nvalid types: {:?}\n",
                dump.u, dump.b, dump.valid_types
            );
            for p in dump.n_ij.iter().filter(|p| p.count > 0) {
                text.push_str(&format!("n[{},{}] = {}\n", p.i, p.j, p.count));
            }
            Outcome {
                result: serde_json::to_value(&dump)?,
                text,
                counters: Counters::default(),
                approx: None,
            }
        }
        Command::Program(_) => {
            let dump = compile(&problem).dump(problem.domain, &problem.weights);
            Outcome {
                result: Value::String(dump.clone()),
                text: dump,
                counters: Counters::default(),
                approx: None,
            }
        }
    };
    let ms = start.elapsed().as_millis() as u64;

    if args.json {
        let mut report = json!({
            "command": name,
            "n": problem.domain,
            "result": outcome.result,
            "exact": true,
            "counters": outcome.counters,
            "ms": ms,
            "digest": digest(&text),
        });
        if let (true, Some(a)) = (args.approx, outcome.approx) {
            report["approx"] = json!(a);
        }
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print!("{}", outcome.text);
        if !outcome.text.ends_with('\n') {
            println!();
        }
        if let (true, Some(a)) = (args.approx, outcome.approx) {
            println!("approx: {a:e}");
        }
    }
    Ok(())
}

fn digest(text: &str) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(text.as_bytes())))
}

fn cell_key(key: &[u64]) -> String {
    key.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

fn cells_json(cells: &BTreeMap<Vec<u64>, BigRational>) -> Value {
    let map: Map<String, Value> = cells
        .iter()
        .map(|(k, v)| (cell_key(k), Value::String(format_rational(v))))
        .collect();
    Value::Object(map)
}

fn cells_text(preds: &[String], cells: &BTreeMap<Vec<u64>, BigRational>) -> String {
    let mut out = String::new();
    for (k, v) in cells {
        let label: Vec<String> = preds
            .iter()
            .zip(k)
            .map(|(p, c)| format!("|{p}|={c}"))
            .collect();
        out.push_str(&format!("{} {}\n", label.join(" "), format_rational(v)));
    }
    out
}

fn check_preds(problem: &Problem, preds: &[String]) -> anyhow::Result<()> {
    for p in preds {
        if !problem.signature.contains(p) {
            return Err(wfomc::Error::Invalid(format!("predicate `{p}` is not declared")).into());
        }
    }
    Ok(())
}

fn totals(problem: &Problem, args: &Common, options: &EngineOptions) -> anyhow::Result<Outcome> {
    check_preds(problem, &args.query)?;
    let eval = solve(problem, &args.query, options)?;
    let total = eval.total();
    let (result, text) = if args.query.is_empty() {
        (
            Value::String(format_rational(&total)),
            format_rational(&total),
        )
    } else {
        (
            cells_json(&eval.cells),
            cells_text(&args.query, &eval.cells),
        )
    };
    Ok(Outcome {
        result,
        text,
        counters: eval.counters,
        approx: total.to_f64(),
    })
}

/// `--of`, or the statistic-table predicates when it is omitted.
fn dist_preds(problem: &Problem, args: &Common) -> anyhow::Result<Vec<String>> {
    let preds = match (&args.of, &problem.weights) {
        (of, _) if !of.is_empty() => of.clone(),
        (_, WeightSpec::StatTable(t)) => t.preds.clone(),
        _ => anyhow::bail!(wfomc::Error::Invalid(
            "`dist` needs `--of PRED[,PRED...]`".into()
        )),
    };
    check_preds(problem, &preds)?;
    Ok(preds)
}

fn distribution(
    problem: &Problem,
    args: &Common,
    options: &EngineOptions,
) -> anyhow::Result<Outcome> {
    let preds = dist_preds(problem, args)?;
    let eval = solve(problem, &preds, options)?;
    let dist = normalize(eval.cells)?;
    Ok(Outcome {
        result: cells_json(&dist),
        text: cells_text(&preds, &dist),
        counters: eval.counters,
        approx: None,
    })
}

fn oracle(problem: &Problem, args: &Common) -> anyhow::Result<Outcome> {
    let opts = OracleOptions {
        max_atoms: args.max_atoms,
    };
    let counters = Counters::default();
    if args.of.is_empty() && !matches!(problem.weights, WeightSpec::StatTable(_)) {
        let res = oracle_evaluate(problem, &[], &opts)?;
        let total = res.total();
        return Ok(Outcome {
            result: Value::String(format_rational(&total)),
            text: format_rational(&total),
            counters,
            approx: total.to_f64(),
        });
    }
    let preds = dist_preds(problem, args)?;
    let res = oracle_evaluate(problem, &preds, &opts)?;
    let dist = normalize(res.cells)?;
    Ok(Outcome {
        result: cells_json(&dist),
        text: cells_text(&preds, &dist),
        counters,
        approx: None,
    })
}

fn check(problem: &Problem, args: &Common, options: &EngineOptions) -> anyhow::Result<Outcome> {
    let max_n = args.max_n.unwrap_or(problem.domain);
    let opts = OracleOptions {
        max_atoms: args.max_atoms,
    };
    let mut runs = Vec::new();
    let mut text = String::new();
    let mut counters = Counters::default();
    let mut mismatches = Vec::new();
    for n in 1..=max_n {
        let p = problem.with_domain(n);
        let eval = solve(&p, &[], options)?;
        let closed = eval.total();
        let brute = oracle_evaluate(&p, &[], &opts)?.total();
        let agree = closed == brute;
        counters.k_vectors += eval.counters.k_vectors;
        counters.compositions += eval.counters.compositions;
        counters.pruned += eval.counters.pruned;
        text.push_str(&format!(
            "n={n} closed-form={} oracle={} {}\n",
            format_rational(&closed),
            format_rational(&brute),
            if agree { "agree" } else { "MISMATCH" }
        ));
        runs.push(json!({
            "n": n,
            "closed_form": format_rational(&closed),
            "oracle": format_rational(&brute),
            "agree": agree,
        }));
        if !agree {
            mismatches.push(n);
        }
    }
    if !mismatches.is_empty() {
        if args.json {
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({ "command": "check", "runs": runs }))?
            );
        } else {
            print!("{text}");
        }
        return Err(Mismatch(format!(
            "closed form and oracle disagree at n = {mismatches:?}"
        ))
        .into());
    }
    Ok(Outcome {
        result: json!({ "agree": true, "runs": runs }),
        text,
        counters,
        approx: None,
    })
}
