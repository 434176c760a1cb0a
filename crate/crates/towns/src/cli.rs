//! Command line front end.
//!
//! Exit codes: 0 success, 1 a property failed to hold (check violations, a
//! certificate that does not hold), 2 bad usage or unreadable input, 3 a
//! search ended on budget exhaustion instead of proof.

use crate::algebra::{independence_certificate, isotropy_certificate, Certificate};
use crate::bounds::{bound_oracle, BoundResult};
use crate::constructions::{
    augment, best_lower_bound_named, block_construction, co_star, frankl_odlyzko, star,
};
use crate::search::{
    extremal_search, probe_conjectures, SearchBudget, SearchLimits, SearchOutcome, SearchStatus,
};
use crate::setcore::{Family, Violation};
use crate::Result;
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "towns", version, about = "Exact tooling for set families with prescribed size and intersection residues")]
struct Cli {
    /// Emit machine-readable JSON instead of plain text
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ParamArgs {
    /// Member size residue
    #[arg(long)]
    a: u64,
    /// Pairwise intersection residue
    #[arg(long)]
    b: u64,
    /// Modulus
    #[arg(long)]
    k: u64,
    /// Ground set size
    #[arg(long)]
    n: usize,
}

#[derive(Subcommand)]
enum GeneratorCmd {
    /// Core {1..m} plus all unions of disjoint k-blocks: an (m,m)-town
    Block {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        n: usize,
    },
    /// Fixed core extended by disjoint blocks, one block per member
    Star(ParamArgs),
    /// Complemented star for the substituted parameters
    CoStar(ParamArgs),
    /// Hadamard-product family, 24 candidate sets per block of 12 (k = 3)
    Fo {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        n: usize,
    },
    /// Hadamard-product family on n-m points with m fresh points appended
    Augment {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
}

#[derive(Subcommand)]
enum Command {
    /// Generate a family and print or save it
    Construct {
        #[command(subcommand)]
        generator: GeneratorCmd,
        /// Write the family file here instead of stdout
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Verify the town property of a family file
    Check {
        /// Family file to check
        file: PathBuf,
    },
    /// Report every upper-bound rule that applies
    Bound(ParamArgs),
    /// Find the extremal town size by exhaustive clique search
    Search {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 100_000_000)]
        max_nodes: u64,
        #[arg(long, default_value_t = 300_000)]
        max_millis: u64,
        #[arg(long, default_value_t = 20_000)]
        max_vertices: usize,
        #[arg(long, default_value_t = 28)]
        max_n: usize,
        /// Results cache, one JSON object per line
        #[arg(long, default_value = "towns-cache.jsonl")]
        cache: PathBuf,
        /// Ignore any cached result and search again
        #[arg(long)]
        force: bool,
        /// Write the witness family file here
        #[arg(long)]
        witness_out: Option<PathBuf>,
    },
    /// Emit a linear-algebra certificate for a family file
    Certify {
        /// Family file to certify
        file: PathBuf,
        /// Odd prime divisor of the modulus to work over
        #[arg(long)]
        p: u64,
    },
    /// Lower and upper bounds for every residue pair at one n
    Table {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        n: usize,
        /// Evaluate symbolic bounds to plain integers
        #[arg(long)]
        eval: bool,
        /// Cache consulted for the exact-value column
        #[arg(long, default_value = "towns-cache.jsonl")]
        cache: PathBuf,
    },
    /// Sweep exact values and test the two standing conjectures
    ProbeConjectures {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        n_max: usize,
        #[arg(long, default_value_t = 100_000_000)]
        max_nodes: u64,
        #[arg(long, default_value_t = 300_000)]
        max_millis: u64,
    },
}

/// Clap handles usage errors itself (exit 2); everything else lands here.
pub fn run() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn execute(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Construct { generator, out } => cmd_construct(generator, out, cli.json),
        Command::Check { file } => cmd_check(&file, cli.json),
        Command::Bound(params) => cmd_bound(params, cli.json),
        Command::Search {
            params,
            max_nodes,
            max_millis,
            max_vertices,
            max_n,
            cache,
            force,
            witness_out,
        } => {
            let limits = SearchLimits { max_vertices, max_n };
            let budget = SearchBudget { max_nodes, max_millis };
            cmd_search(params, limits, budget, &cache, force, witness_out, cli.json)
        }
        Command::Certify { file, p } => cmd_certify(&file, p),
        Command::Table { k, n, eval, cache } => cmd_table(k, n, eval, &cache, cli.json),
        Command::ProbeConjectures { k, n_max, max_nodes, max_millis } => {
            let budget = SearchBudget { max_nodes, max_millis };
            cmd_probe(k, n_max, budget, cli.json)
        }
    }
}

fn family_json(family: &Family) -> serde_json::Value {
    let spec = family.spec();
    let members: Vec<Vec<usize>> = family.members().iter().map(|s| s.elements()).collect();
    json!({
        "n": spec.n(),
        "k": spec.k(),
        "a": spec.a(),
        "b": spec.b(),
        "size": family.len(),
        "members": members,
    })
}

fn cmd_construct(generator: GeneratorCmd, out: Option<PathBuf>, as_json: bool) -> Result<ExitCode> {
    let family = match generator {
        GeneratorCmd::Block { m, k, n } => block_construction(m, k, n)?,
        GeneratorCmd::Star(p) => star(p.a, p.b, p.k, p.n)?,
        GeneratorCmd::CoStar(p) => co_star(p.a, p.b, p.k, p.n)?,
        GeneratorCmd::Fo { k, n } => frankl_odlyzko(k, n)?,
        GeneratorCmd::Augment { k, n, m } => {
            if m > n {
                return Err(crate::Error::InvalidParameter(format!(
                    "cannot append {m} points within a ground set of {n}"
                )));
            }
            augment(&frankl_odlyzko(k, n - m)?, m)
        }
    };
    let rendered = family.render();
    if let Some(path) = out {
        fs::write(&path, &rendered)?;
        if as_json {
            println!(
                "{}",
                json!({"written": path.display().to_string(), "size": family.len()})
            );
        } else {
            println!("wrote {} members to {}", family.len(), path.display());
        }
    } else if as_json {
        println!("{}", family_json(&family));
    } else {
        print!("{rendered}");
    }
    Ok(ExitCode::SUCCESS)
}

fn violation_json(v: &Violation) -> serde_json::Value {
    match *v {
        Violation::MemberSize { index, size, residue } => json!({
            "kind": "member-size", "index": index, "size": size, "residue": residue,
        }),
        Violation::PairIntersection { first, second, size, residue } => json!({
            "kind": "pair-intersection", "first": first, "second": second,
            "size": size, "residue": residue,
        }),
    }
}

fn cmd_check(file: &Path, as_json: bool) -> Result<ExitCode> {
    let family = Family::parse(&fs::read_to_string(file)?)?;
    let report = family.check_town();
    let spec = family.spec();
    if as_json {
        let violations: Vec<serde_json::Value> =
            report.violations().iter().map(violation_json).collect();
        println!(
            "{}",
            json!({
                "n": spec.n(), "k": spec.k(), "a": spec.a(), "b": spec.b(),
                "size": family.len(),
                "passed": report.passed(),
                "violations": violations,
            })
        );
    } else if report.passed() {
        println!("ok: {} members form a {spec}", family.len());
    } else {
        for v in report.violations() {
            println!("violation: {v}");
        }
        println!(
            "failed: {} violations among {} members of a claimed {spec}",
            report.violations().len(),
            family.len()
        );
    }
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn rule_json(rule: &crate::bounds::FiredRule) -> serde_json::Value {
    json!({
        "rule": rule.id.name(),
        "p": rule.p,
        "value": rule.value.to_string(),
        "evaluated": rule.value.evaluate().map(|v| v as u64),
        "tight": rule.tight,
    })
}

fn cmd_bound(params: ParamArgs, as_json: bool) -> Result<ExitCode> {
    let result: BoundResult = bound_oracle(params.a, params.b, params.k, params.n)?;
    if as_json {
        let rules: Vec<serde_json::Value> = result.rules().iter().map(rule_json).collect();
        println!(
            "{}",
            json!({
                "a": result.a(), "b": result.b(), "k": result.k(), "n": result.n(),
                "rules": rules,
                "best": rule_json(result.best_rule()),
                "tight": result.is_tight(),
            })
        );
    } else {
        println!(
            "bounds for ({},{}) mod {} on [{}]",
            result.a(),
            result.b(),
            result.k(),
            result.n()
        );
        println!("  {:<20} {:>4} {:>12} {:>6}", "rule", "p", "value", "tight");
        for rule in result.rules() {
            let p = rule.p.map_or("-".to_string(), |p| p.to_string());
            println!(
                "  {:<20} {:>4} {:>12} {:>6}",
                rule.id.name(),
                p,
                rule.value.to_string(),
                if rule.tight { "yes" } else { "" }
            );
        }
        let best = result.best_rule();
        println!(
            "best: {} via {}{}",
            best.value,
            best.id.name(),
            if result.is_tight() { ", attained by a construction" } else { "" }
        );
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    a: u64,
    b: u64,
    k: u64,
    n: usize,
    size: usize,
    status: String,
    witness_file: Option<String>,
    nodes: u64,
    elapsed_ms: u64,
}

fn read_cache(path: &Path) -> Vec<CacheEntry> {
    let Ok(text) = fs::read_to_string(path) else {
        return Vec::new();
    };
    // Unparseable lines are skipped: the cache is advisory, never authoritative.
    text.lines().filter_map(|line| serde_json::from_str(line).ok()).collect()
}

fn cache_lookup(path: &Path, a: u64, b: u64, k: u64, n: usize) -> Option<CacheEntry> {
    // Last writer wins.
    read_cache(path)
        .into_iter()
        .filter(|e| e.a == a && e.b == b && e.k == k && e.n == n)
        .next_back()
}

fn cache_append(path: &Path, entry: &CacheEntry) {
    let line = serde_json::to_string(entry).expect("cache entries serialize");
    let appended = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .and_then(|mut f| std::io::Write::write_all(&mut f, format!("{line}\n").as_bytes()));
    if let Err(err) = appended {
        eprintln!("warning: cache {} not updated: {err}", path.display());
    }
}

fn status_string(status: &SearchStatus) -> &'static str {
    match status {
        SearchStatus::Optimal => "optimal",
        SearchStatus::LowerBoundOnly(crate::search::Exhaustion::Nodes) => "nodes-exhausted",
        SearchStatus::LowerBoundOnly(crate::search::Exhaustion::Time) => "time-exhausted",
    }
}

fn print_search_report(
    params: &ParamArgs,
    size: usize,
    status: &str,
    nodes: u64,
    elapsed_ms: u64,
    cached: bool,
    witness_file: Option<&str>,
    as_json: bool,
) {
    if as_json {
        println!(
            "{}",
            json!({
                "a": params.a, "b": params.b, "k": params.k, "n": params.n,
                "size": size,
                "status": status,
                "nodes": nodes,
                "elapsed_ms": elapsed_ms,
                "cached": cached,
                "witness_file": witness_file,
            })
        );
    } else {
        println!("search ({},{}) mod {} on [{}]", params.a, params.b, params.k, params.n);
        println!("  size     {size}");
        println!("  status   {status}");
        println!("  nodes    {nodes}");
        println!("  elapsed  {elapsed_ms} ms");
        println!("  cached   {}", if cached { "yes" } else { "no" });
        if let Some(path) = witness_file {
            println!("  witness  {path}");
        }
    }
}

fn cmd_search(
    params: ParamArgs,
    limits: SearchLimits,
    budget: SearchBudget,
    cache: &Path,
    force: bool,
    witness_out: Option<PathBuf>,
    as_json: bool,
) -> Result<ExitCode> {
    if !force {
        if let Some(hit) = cache_lookup(cache, params.a, params.b, params.k, params.n) {
            let code = if hit.status == "optimal" { ExitCode::SUCCESS } else { ExitCode::from(3) };
            print_search_report(
                &params,
                hit.size,
                &hit.status,
                hit.nodes,
                hit.elapsed_ms,
                true,
                hit.witness_file.as_deref(),
                as_json,
            );
            return Ok(code);
        }
    }
    let outcome: SearchOutcome =
        extremal_search(params.a, params.b, params.k, params.n, &limits, &budget)?;
    let witness_file = match &witness_out {
        Some(path) => {
            fs::write(path, outcome.witness.render())?;
            Some(path.display().to_string())
        }
        None => None,
    };
    let status = status_string(&outcome.status);
    let elapsed_ms = outcome.elapsed.as_millis() as u64;
    cache_append(
        cache,
        &CacheEntry {
            a: params.a,
            b: params.b,
            k: params.k,
            n: params.n,
            size: outcome.size,
            status: status.to_string(),
            witness_file: witness_file.clone(),
            nodes: outcome.nodes,
            elapsed_ms,
        },
    );
    print_search_report(
        &params,
        outcome.size,
        status,
        outcome.nodes,
        elapsed_ms,
        false,
        witness_file.as_deref(),
        as_json,
    );
    Ok(if outcome.status.is_optimal() { ExitCode::SUCCESS } else { ExitCode::from(3) })
}

fn cmd_certify(file: &Path, p: u64) -> Result<ExitCode> {
    let family = Family::parse(&fs::read_to_string(file)?)?;
    let spec = family.spec();
    if spec.k() % p != 0 {
        return Err(crate::Error::InvalidParameter(format!(
            "p = {p} does not divide the modulus k = {}",
            spec.k()
        )));
    }
    let cert: Certificate = if (spec.a() % p) == (spec.b() % p) {
        isotropy_certificate(&family, p)?
    } else {
        independence_certificate(&family, p)?
    };
    println!("{}", serde_json::to_string_pretty(&cert.to_json()).expect("valid json"));
    Ok(if cert.holds { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_table(k: u64, n: usize, eval: bool, cache: &Path, as_json: bool) -> Result<ExitCode> {
    let entries = read_cache(cache);
    let exact_of = |a: u64, b: u64| -> Option<usize> {
        entries
            .iter()
            .filter(|e| e.a == a && e.b == b && e.k == k && e.n == n && e.status == "optimal")
            .next_back()
            .map(|e| e.size)
    };
    let mut rows = Vec::new();
    for a in 0..k {
        for b in 0..k {
            let (family, generator) = best_lower_bound_named(a, b, k, n)?;
            let oracle = bound_oracle(a, b, k, n)?;
            let upper = oracle.best_value();
            let upper_text = match (eval, upper.evaluate()) {
                (true, Some(v)) => v.to_string(),
                _ => upper.to_string(),
            };
            rows.push((a, b, family.len(), generator, upper, upper_text, oracle.is_tight(), exact_of(a, b)));
        }
    }
    if as_json {
        let json_rows: Vec<serde_json::Value> = rows
            .iter()
            .map(|(a, b, lower, generator, upper, upper_text, tight, exact)| {
                json!({
                    "a": a, "b": b,
                    "lower": lower,
                    "generator": generator,
                    "upper": upper_text,
                    "upper_evaluated": upper.evaluate().map(|v| v as u64),
                    "tight": tight,
                    "exact": exact,
                })
            })
            .collect();
        println!("{}", json!({"k": k, "n": n, "rows": json_rows}));
    } else {
        println!("k = {k}, n = {n}");
        println!(
            "  {:<6} {:>6} {:<18} {:>10} {:>6} {:>6}",
            "(a,b)", "lower", "via", "upper", "tight", "exact"
        );
        for (a, b, lower, generator, _, upper_text, tight, exact) in &rows {
            println!(
                "  ({a},{b})  {lower:>6} {generator:<18} {upper_text:>10} {:>6} {:>6}",
                if *tight { "yes" } else { "" },
                exact.map_or("-".to_string(), |e| e.to_string())
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_probe(k: u64, n_max: usize, budget: SearchBudget, as_json: bool) -> Result<ExitCode> {
    let report = probe_conjectures(k, n_max, &budget)?;
    if as_json {
        let cells: Vec<serde_json::Value> = report
            .cells
            .iter()
            .map(|c| json!({"a": c.a, "b": c.b, "n": c.n, "size": c.size, "optimal": c.optimal}))
            .collect();
        let findings: Vec<serde_json::Value> = report
            .findings
            .iter()
            .map(|f| json!({"conjecture": f.conjecture, "detail": f.detail}))
            .collect();
        println!(
            "{}",
            json!({"k": report.k, "n_max": report.n_max, "cells": cells, "findings": findings})
        );
    } else {
        let optimal = report.cells.iter().filter(|c| c.optimal).count();
        println!(
            "probed k = {} up to n = {}: {} cells, {} solved to optimality",
            report.k,
            report.n_max,
            report.cells.len(),
            optimal
        );
        if report.findings.is_empty() {
            println!("no counterexamples found");
        } else {
            for f in &report.findings {
                println!("counterexample [{}]: {}", f.conjecture, f.detail);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
