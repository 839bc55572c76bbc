//! `oscar` — operator entry point.
//!
//! Subcommands: `keygen`, `cert-issue`, `secret-issue`, `inspect`, `demo`,
//! `sim-run`, `sim-sweep`. Run `oscar <subcommand> --help` for flags.

mod commands;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "oscar", version, about = "Object security tooling: keys, certificates, secrets, object inspection, loopback demo, and scenario simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a signature keypair into TLV object container files.
    Keygen(commands::keys::KeygenArgs),
    /// Issue a certificate for a subject public key under an anchor key.
    CertIssue(commands::keys::CertIssueArgs),
    /// Issue (or rotate) an access secret as an authority-signed object.
    SecretIssue(commands::keys::SecretIssueArgs),
    /// Pretty-print any TLV object file.
    Inspect(commands::inspect::InspectArgs),
    /// Producer, consumer, and authorization server over loopback datagrams.
    Demo(commands::demo::DemoArgs),
    /// Run one scenario and emit a CSV row.
    SimRun(commands::simcmd::SimRunArgs),
    /// Sweep client counts in both modes and report the energy crossover.
    SimSweep(commands::simcmd::SimSweepArgs),
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Keygen(args) => commands::keys::keygen(args),
        Command::CertIssue(args) => commands::keys::cert_issue(args),
        Command::SecretIssue(args) => commands::keys::secret_issue(args),
        Command::Inspect(args) => commands::inspect::inspect(args),
        Command::Demo(args) => commands::demo::demo(args),
        Command::SimRun(args) => commands::simcmd::sim_run(args),
        Command::SimSweep(args) => commands::simcmd::sim_sweep(args),
    };
    if let Err(err) = outcome {
        eprintln!("error: {err:#}");
        std::process::exit(err.exit_code());
    }
}
