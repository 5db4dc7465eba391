use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use klm_core::canonical::{canonical_for, verify_representation};
use klm_core::closure::{close, entails_with, initial_map, EntailOptions, Refutation, System, Verdict};
use klm_core::demo;
use klm_core::kb::{parse_kb, Assertion, KnowledgeBase};
use klm_core::model::{parse_model, validate, Flavor};
use klm_core::search::SearchBudget;

#[derive(Parser)]
#[command(name = "klm", version, about = "Conditional entailment, closure and model checking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a knowledge base entails a conditional assertion.
    Entail {
        #[arg(long, default_value = "P")]
        system: System,
        #[arg(long)]
        kb: PathBuf,
        /// Query such as "p & b |~ ~f"; quote it for the shell.
        query: String,
        /// Print the derivation when the query is entailed.
        #[arg(long)]
        trace: bool,
        /// Write a countermodel here when the query is refuted.
        #[arg(long)]
        countermodel: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Candidate models tried by countermodel search.
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Close a knowledge base and write the consequence map.
    Closure {
        #[arg(long, default_value = "P")]
        system: System,
        #[arg(long)]
        kb: PathBuf,
        #[arg(long)]
        dump: PathBuf,
    },
    /// Validate a model file.
    CheckModel { file: PathBuf },
    /// Build the canonical model of a closed knowledge base and verify it.
    Canonical {
        #[arg(long, default_value = "P")]
        system: System,
        #[arg(long)]
        kb: PathBuf,
        /// Defaults to the flavor matching the system.
        #[arg(long)]
        flavor: Option<Flavor>,
        out: PathBuf,
    },
    /// Run a worked example and print its table.
    Demo {
        #[arg(value_parser = demo::BUNDLES)]
        name: String,
    },
}

/// 0 positive, 1 negative, 3 unknown; errors map to 2 in `main`.
type Code = u8;

fn read_kb(path: &Path) -> Result<KnowledgeBase> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_kb(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

#[allow(clippy::too_many_arguments)]
fn entail(
    system: System,
    kb: &Path,
    query: &str,
    trace: bool,
    countermodel: Option<&Path>,
    seed: u64,
    budget: Option<usize>,
    json: bool,
    out: &mut String,
) -> Result<Code> {
    let start = Instant::now();
    let kb = read_kb(kb)?;
    let q = Assertion::parse(query).with_context(|| format!("parsing query {query:?}"))?;
    let mut search = SearchBudget {
        seed,
        ..SearchBudget::default()
    };
    if let Some(b) = budget {
        search.max_candidates = b;
    }
    let opts = EntailOptions {
        budget: search,
        want_countermodel: countermodel.is_some(),
        ..EntailOptions::default()
    };
    let verdict = entails_with(&kb, &q, system, &opts)?;
    if let (Some(path), Some(m)) = (countermodel, verdict.countermodel()) {
        write(path, &m.to_text())?;
    }
    if json {
        let report = serde_json::json!({
            "verdict": verdict.label(),
            "certificate_kind": verdict.certificate_kind(),
            "elapsed_ms": start.elapsed().as_millis() as u64,
        });
        writeln!(out, "{report}")?;
    } else {
        writeln!(out, "{}", verdict.label())?;
        let u = &kb.universe;
        match &verdict {
            Verdict::Entailed { trace: events } if trace => {
                for (i, e) in events.iter().enumerate() {
                    writeln!(out, "{:>4}. {}", i + 1, e.render(u))?;
                }
            }
            Verdict::NotEntailed(Refutation::Fixpoint { core }) => {
                writeln!(out, "normal worlds of the antecedent: {}", u.dnf(core))?;
            }
            Verdict::NotEntailed(Refutation::Countermodel(m)) if countermodel.is_none() => {
                out.push_str(&m.to_text());
            }
            _ => {}
        }
    }
    Ok(match verdict {
        Verdict::Entailed { .. } => 0,
        Verdict::NotEntailed(_) => 1,
        Verdict::Unknown => 3,
    })
}

fn closure(system: System, kb: &Path, dump: &Path) -> Result<Code> {
    let kb = read_kb(kb)?;
    let map = close(&initial_map(&kb)?, system).0;
    write(dump, &map.dump())?;
    Ok(0)
}

fn check_model(file: &Path, out: &mut String) -> Result<Code> {
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let m = parse_model(&text).with_context(|| format!("parsing {}", file.display()))?;
    let report = validate(&m);
    out.push_str(&report.render(&m));
    Ok(if report.is_valid() { 0 } else { 1 })
}

fn canonical(system: System, kb: &Path, flavor: Option<Flavor>, model_path: &Path, out: &mut String) -> Result<Code> {
    let kb = read_kb(kb)?;
    let flavor = flavor.unwrap_or(Flavor::for_system(system));
    let map = close(&initial_map(&kb)?, system).0;
    let c = canonical_for(&map, flavor.system())?;
    write(model_path, &c.to_text())?;
    let report = verify_representation(&map, flavor.system());
    write!(out, "{report}")?;
    Ok(if report.passed() { 0 } else { 1 })
}

fn run_demo(name: &str, out: &mut String) -> Result<Code> {
    let rows = demo::bundle(name)?;
    out.push_str(&demo::render_table(name, &rows));
    Ok(if rows.iter().all(demo::Row::ok) { 0 } else { 1 })
}

fn run(cli: Cli, out: &mut String) -> Result<Code> {
    match cli.command {
        Command::Entail {
            system,
            kb,
            query,
            trace,
            countermodel,
            seed,
            budget,
            json,
        } => entail(system, &kb, &query, trace, countermodel.as_deref(), seed, budget, json, out),
        Command::Closure { system, kb, dump } => closure(system, &kb, &dump),
        Command::CheckModel { file } => check_model(&file, out),
        Command::Canonical { system, kb, flavor, out: model_path } => canonical(system, &kb, flavor, &model_path, out),
        Command::Demo { name } => run_demo(&name, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let result = run(cli, &mut out);
    // a closed pipe downstream is not an error worth reporting
    let _ = std::io::stdout().write_all(out.as_bytes());
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

