//! `adbqc` command-line front end.
//!
//! Exit codes: 0 accepted or check passed, 2 rejected or check failed,
//! 1 usage or configuration error.

mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "adbqc",
    version,
    about = "Ancilla-driven blind quantum computation simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one protocol instance and print its verification report.
    Run(RunArgs),
    /// Enumerate every branch of a gadget and compare with the target gate.
    Oracle(OracleArgs),
    /// Estimate how often an attack escapes trap detection.
    Attack(AttackArgs),
    /// Run a blindness audit.
    Blindness(BlindnessArgs),
}

/// Protocol selection shared by `run` and `attack`. Flags override `--config`.
#[derive(Args, Debug, Default)]
pub struct ProtocolArgs {
    /// sueki, p1 or p2.
    #[arg(long)]
    pub protocol: Option<String>,
    /// Total register qubits N (computation plus traps).
    #[arg(long)]
    pub qubits: Option<usize>,
    /// Gate-pattern layers M.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Trap count (not allowed for sueki).
    #[arg(long)]
    pub traps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// none, pauli:a,b,c, tamper:delta or probe:ghz|product|random[:seed].
    #[arg(long)]
    pub adversary: Option<String>,
    /// Algorithm gate, repeatable: h:0, cnot:0,1, single:0:b,g,d.
    #[arg(long = "gate")]
    pub gates: Vec<String>,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[command(flatten)]
    pub protocol: ProtocolArgs,
    /// Re-run a saved manifest instead of building a config from flags.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Save the manifest of this run.
    #[arg(long)]
    pub manifest_out: Option<PathBuf>,
    /// Write the transcript as JSON lines.
    #[arg(long)]
    pub transcript_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    /// hrz-sueki, p1-a, p1-b, p2 or cz.
    #[arg(long)]
    pub gadget: String,
    #[arg(long, default_value_t = 0)]
    pub theta_octant: u8,
    /// Random input states to try.
    #[arg(long, default_value_t = 4)]
    pub states: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct AttackArgs {
    #[command(flatten)]
    pub protocol: ProtocolArgs,
    /// Random Pauli attack a,b,c.
    #[arg(long, conflicts_with = "tamper")]
    pub pauli: Option<String>,
    /// Trap tampering with survival probability delta.
    #[arg(long)]
    pub tamper: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
}

#[derive(Args, Debug)]
pub struct BlindnessArgs {
    /// theta, nosig, tv or probe.
    #[arg(long)]
    pub audit: String,
    /// theta: restrict to one angle (default all eight).
    #[arg(long)]
    pub theta_octant: Option<u8>,
    /// theta: restrict to one S1 value.
    #[arg(long)]
    pub s1: Option<u8>,
    /// theta: pad angles to draw from (default all eight).
    #[arg(long)]
    pub gammas: Option<String>,
    /// nosig: the two client angles.
    #[arg(long, default_value = "0,2")]
    pub secrets: String,
    /// nosig: one checkpoint (default every checkpoint).
    #[arg(long)]
    pub checkpoint: Option<u8>,
    /// tv: protocol.
    #[arg(long, default_value = "p2")]
    pub protocol: String,
    /// tv: first gate-angle sequence.
    #[arg(long, default_value = "1")]
    pub secret_a: String,
    /// tv: second gate-angle sequence.
    #[arg(long, default_value = "5")]
    pub secret_b: String,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    /// probe: random probes to check.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Negative control that leaks the client's secret.
    #[arg(long)]
    pub leak: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Run(a) => commands::run(a),
        Command::Oracle(a) => commands::oracle(a),
        Command::Attack(a) => commands::attack(a),
        Command::Blindness(a) => commands::blindness(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
