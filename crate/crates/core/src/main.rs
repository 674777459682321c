//! Command-line interface: format, analyze, simulate, and verify BioAmbients processes.

use bioamb::ast::AmbientId;
use bioamb::cfa::{generate_constraints, initial_structure, solve};
use bioamb::output;
use bioamb::parser::parse;
use bioamb::semantics::{explore, DEFAULT_MAX_DEPTH, DEFAULT_MAX_STATES};
use bioamb::verify::{check_theorem, covered_families, generate_terms, measure_precision};
use clap::{Parser, Subcommand};
use serde_json::json;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "bioamb", version, about = "BioAmbients processes: format, analyze, simulate, verify")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a process and pretty-print it back.
    Fmt {
        /// Input file, or `-` for stdin.
        file: String,
    },
    /// Compute the contents and bindings relations of a process.
    Analyze {
        /// Input file, or `-` for stdin.
        file: String,
        /// Emit a JSON document.
        #[arg(long, group = "format")]
        json: bool,
        /// Emit a Graphviz graph of the contents relation.
        #[arg(long, group = "format")]
        dot: bool,
        /// Emit a plain-text summary (the default).
        #[arg(long, group = "format")]
        text: bool,
    },
    /// Explore the reachable state space of a process.
    Simulate {
        /// Input file, or `-` for stdin.
        file: String,
        /// Maximum number of reduction steps from the initial process.
        #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
        depth: usize,
        /// Stop after this many distinct states.
        #[arg(long = "max-states", default_value_t = DEFAULT_MAX_STATES)]
        max_states: usize,
        /// Emit a JSON document instead of a summary.
        #[arg(long, group = "format")]
        json: bool,
        /// Print every state and transition.
        #[arg(long)]
        trace: bool,
    },
    /// Check the analysis against every reachable state, and measure precision.
    Verify {
        /// Input file, or `-` for stdin.
        file: Option<String>,
        /// Maximum number of reduction steps from the initial process.
        #[arg(long, default_value_t = 6)]
        depth: usize,
        /// Stop after this many distinct states.
        #[arg(long = "max-states", default_value_t = DEFAULT_MAX_STATES)]
        max_states: usize,
        /// Check K generated terms instead of a file.
        #[arg(long, value_name = "K", conflicts_with = "file")]
        random: Option<usize>,
        /// Seed for term generation.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Emit a JSON document instead of a summary.
        #[arg(long, group = "format")]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let benign = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if benign { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn read_input(path: &str) -> Result<String, String> {
    if path == "-" {
        std::io::read_to_string(std::io::stdin()).map_err(|e| format!("stdin: {e}"))
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Fmt { file } => {
            let src = read_input(&file)?;
            let p = parse(&src).map_err(|e| e.to_string())?;
            println!("{p}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Analyze { file, json, dot, text: _ } => {
            let src = read_input(&file)?;
            let p = parse(&src).map_err(|e| e.to_string())?;
            let constraints =
                generate_constraints(&p, &AmbientId::Top).map_err(|e| e.to_string())?;
            let result = solve(&constraints, &AmbientId::Top);
            if dot {
                let initial = initial_structure(&constraints, &AmbientId::Top);
                print!("{}", output::analysis_dot(&result, &initial, &p));
            } else if json {
                let payload = output::analysis_json(&result, &p);
                println!("{}", output::document("analyze", &output::digest(src.as_bytes()), payload));
            } else {
                print!("{}", output::analysis_text(&result, &p));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate { file, depth, max_states, json, trace } => {
            let src = read_input(&file)?;
            let p = parse(&src).map_err(|e| e.to_string())?;
            let space = explore(&p, depth, max_states);
            if space.truncated {
                eprintln!("warning: exploration truncated (depth {depth}, max {max_states} states)");
            }
            if json {
                let payload = output::space_json(&space);
                println!("{}", output::document("simulate", &output::digest(src.as_bytes()), payload));
            } else {
                print!("{}", output::space_text(&space, trace));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { file, depth, max_states, random, seed, json } => match random {
            Some(count) => verify_random(count, seed, depth, max_states, json),
            None => {
                let file = file.ok_or("provide an input file or --random K")?;
                verify_file(&file, depth, max_states, json)
            }
        },
    }
}

fn verify_file(
    file: &str,
    depth: usize,
    max_states: usize,
    json: bool,
) -> Result<ExitCode, String> {
    let src = read_input(file)?;
    let p = parse(&src).map_err(|e| e.to_string())?;
    let report = check_theorem(&p, depth, max_states).map_err(|e| e.to_string())?;
    let precision = measure_precision(&p, depth, max_states).map_err(|e| e.to_string())?;
    if report.truncated {
        eprintln!("warning: exploration truncated (depth {depth}, max {max_states} states)");
    }
    if json {
        let payload = output::verification_json(&report, &precision);
        println!("{}", output::document("verify", &output::digest(src.as_bytes()), payload));
    } else {
        print!("{}", output::verification_text(&report, &precision));
    }
    if report.violations.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(2))
    }
}

fn verify_random(
    count: usize,
    seed: u64,
    depth: usize,
    max_states: usize,
    json: bool,
) -> Result<ExitCode, String> {
    let terms = generate_terms(seed, count);
    let mut reports = Vec::new();
    let mut total_violations = 0usize;
    for term in &terms {
        let report = check_theorem(term, depth, max_states).map_err(|e| e.to_string())?;
        total_violations += report.violations.len();
        reports.push(report);
    }
    let families = covered_families(&terms, depth, max_states);
    let params = format!("--random {count} --seed {seed} --depth {depth}");
    if json {
        let payload = json!({
            "mode": "random",
            "seed": seed,
            "count": count,
            "depth": depth,
            "families": families.iter().collect::<Vec<_>>(),
            "total_violations": total_violations,
            "reports": reports.iter().map(|r| json!({
                "process": r.process,
                "states_checked": r.states_checked,
                "truncated": r.truncated,
                "violations": r.violations.len(),
            })).collect::<Vec<_>>(),
        });
        println!("{}", output::document("verify", &output::digest(params.as_bytes()), payload));
    } else {
        println!("checked {count} generated terms (seed {seed}, depth {depth})");
        println!(
            "rule families covered: {} ({} of 8)",
            families.iter().cloned().collect::<Vec<_>>().join(", "),
            families.len()
        );
        if total_violations == 0 {
            println!("violations: none");
        } else {
            println!("violations: {total_violations}");
            for (i, r) in reports.iter().enumerate() {
                if !r.violations.is_empty() {
                    println!("  term {i}: {} ({} violations)", r.process, r.violations.len());
                }
            }
        }
    }
    if total_violations == 0 {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(2))
    }
}
