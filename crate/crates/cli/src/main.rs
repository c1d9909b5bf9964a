mod builtin;
mod run;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use run::{Flags, Report};

#[derive(Parser)]
#[command(name = "skewfep", version, about = "Batch verifier for embedding problems over quaternion division rings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file or a built-in scenario.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file.
    scenario: Option<PathBuf>,
    /// Run a built-in scenario by name (`all` runs every one).
    #[arg(long, conflicts_with = "scenario")]
    builtin: Option<String>,
    /// Print the catalog of built-in scenarios.
    #[arg(long, conflicts_with_all = ["scenario", "builtin"])]
    list_builtin: bool,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=256))]
    parallel: u64,
    #[arg(long, default_value_t = 20)]
    height_bound: u64,
    #[arg(long, default_value_t = 4)]
    degree_bound: usize,
    #[arg(long, default_value_t = 30)]
    precision: usize,
    /// Write the report here instead of standard output.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Leave per-check timings out of the report.
    #[arg(long)]
    no_timing: bool,
}

fn usage(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let Command::Run(args) = Cli::parse().command;
    if args.list_builtin {
        for b in builtin::BUILTINS {
            println!("{:<28} {}", b.name, b.summary());
        }
        return ExitCode::SUCCESS;
    }
    let flags = Flags {
        parallel: args.parallel as usize,
        height_bound: args.height_bound,
        degree_bound: args.degree_bound,
        precision: args.precision,
    };
    let inputs: Vec<(String, String)> = match (&args.scenario, &args.builtin) {
        (Some(path), _) => match std::fs::read_to_string(path) {
            Ok(t) => vec![(path.display().to_string(), t)],
            Err(e) => return usage(&format!("cannot read {}: {e}", path.display())),
        },
        (None, Some(name)) if name == "all" => builtin::BUILTINS
            .iter()
            .map(|b| (format!("builtin:{}", b.name), b.text.to_string()))
            .collect(),
        (None, Some(name)) => match builtin::find(name) {
            Some(b) => vec![(format!("builtin:{}", b.name), b.text.to_string())],
            None => return usage(&format!("no built-in scenario `{name}` (see --list-builtin)")),
        },
        (None, None) => return usage("give a scenario file, --builtin NAME or --list-builtin"),
    };
    let mut reports: Vec<Report> = Vec::new();
    for (name, text) in &inputs {
        match run::run(name, text, &flags) {
            Ok(r) => reports.push(r),
            Err(e) => {
                eprintln!("{name}: {e}");
                return ExitCode::from(2);
            }
        }
    }
    let text: String = reports.iter().map(|r| r.render(!args.no_timing)).collect::<Vec<_>>().join("\n");
    match &args.report {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                return usage(&format!("cannot write {}: {e}", path.display()));
            }
        }
        None => print!("{text}"),
    }
    if reports.iter().all(Report::success) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
