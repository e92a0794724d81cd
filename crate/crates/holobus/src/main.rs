use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use holobus::spec::ExperimentSpec;
use holobus::{run_spec_file, CliError, Status};
use holobus_core::frame::gate_table;

#[derive(Parser)]
#[command(name = "holobus", version, about = "Adiabatic spin-bus, twisted-chain gate and CNOT experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every grid point of a spec and write CSV and report files.
    Run {
        spec: PathBuf,
        /// Output directory (overrides the spec's `output`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: available cores).
        #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
        workers: Option<u16>,
    },
    /// Check a spec without running it.
    Validate { spec: PathBuf },
    /// Gate tables.
    Gates {
        #[command(subcommand)]
        command: GatesCommand,
    },
}

#[derive(Subcommand)]
enum GatesCommand {
    /// Print each named gate with its rotated Pauli frame.
    List,
}

fn exit(status: Status) -> ExitCode {
    ExitCode::from(status.code())
}

fn run(spec: PathBuf, out: Option<PathBuf>, workers: Option<u16>) -> ExitCode {
    let workers = workers
        .map(usize::from)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    match run_spec_file(&spec, out.as_deref(), workers) {
        Ok(summary) => {
            for f in &summary.files {
                println!("wrote {}", f.display());
            }
            println!(
                "{} rows, {} failed, {:.2} s on {} workers",
                summary.rows,
                summary.failed_rows,
                summary.wall_time.as_secs_f64(),
                workers
            );
            match summary.status {
                Status::Accuracy => eprintln!("error: accuracy contract failed (see report)"),
                Status::ResourceCap => eprintln!("error: resource cap hit (see report)"),
                _ => {}
            }
            exit(summary.status)
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit(e.status())
        }
    }
}

fn validate(spec: PathBuf) -> ExitCode {
    let parsed = match ExperimentSpec::load(&spec) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return exit(CliError::from(e).status());
        }
    };
    let diags = parsed.validate();
    for d in &diags {
        println!("{d}");
    }
    if diags.is_empty() {
        println!("ok");
    }
    exit(Status::of_diagnostics(&diags))
}

fn gates_list() -> ExitCode {
    for row in gate_table() {
        let u = row.gate.matrix();
        let m = row.frame.matrix();
        println!("{}", row.name);
        for i in 0..2 {
            let [a, b] = [u[(i, 0)], u[(i, 1)]].map(|z| format!("{}{:+}i", clean(z.re), clean(z.im)));
            println!("  U row {i}: [{a}, {b}]");
        }
        for (label, col) in ["x'", "y'", "z'"].iter().zip(0..3) {
            println!(
                "  {label} = ({}, {}, {})",
                clean(m[(0, col)]),
                clean(m[(1, col)]),
                clean(m[(2, col)])
            );
        }
    }
    ExitCode::SUCCESS
}

/// Rounds away floating-point residue so the table reads cleanly.
fn clean(x: f64) -> f64 {
    let r = (x * 1e12).round() / 1e12;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { spec, out, workers } => run(spec, out, workers),
        Command::Validate { spec } => validate(spec),
        Command::Gates {
            command: GatesCommand::List,
        } => gates_list(),
    }
}
