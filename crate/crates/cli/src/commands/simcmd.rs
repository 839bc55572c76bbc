//! `sim-run` and `sim-sweep`.

use super::CmdResult;
use anyhow::{anyhow, Context};
use clap::Args;
use oscar_sim::{run_scenario, sweep_crossover, MetricsReport, Mode, Preset, ScenarioConfig};
use std::path::PathBuf;

#[derive(Args, Clone)]
pub struct CommonSimArgs {
    /// Scenario file; flags below override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Hardware preset when no config file is given.
    #[arg(long, value_parser = parse_preset, default_value = "gen16")]
    pub preset: Preset,
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub clients: Option<u32>,
    /// Mean resigning interval in seconds.
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    match s {
        "gen16" => Ok(Preset::Gen16),
        "gen32" => Ok(Preset::Gen32),
        other => Err(format!("unknown preset {other:?} (gen16 | gen32)")),
    }
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    oscar_sim::config::parse_mode(s)
}

impl CommonSimArgs {
    fn base_config(&self) -> anyhow::Result<ScenarioConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                ScenarioConfig::parse_str(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            None => ScenarioConfig::preset(self.preset, Mode::Oscar, 8, 1),
        };
        if let Some(mode) = self.mode {
            cfg.mode = mode;
        }
        if let Some(clients) = self.clients {
            cfg.n_clients = clients;
        }
        if let Some(beta) = self.beta {
            cfg.beta_s = beta;
        }
        if let Some(seed) = self.seed {
            cfg.rng_seed = seed;
        }
        Ok(cfg)
    }

    fn emit(&self, csv: &str) -> anyhow::Result<()> {
        match &self.out {
            Some(path) => std::fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?,
            None => print!("{csv}"),
        }
        Ok(())
    }
}

#[derive(Args)]
pub struct SimRunArgs {
    #[command(flatten)]
    pub common: CommonSimArgs,
}

pub fn sim_run(args: SimRunArgs) -> CmdResult {
    let cfg = args.common.base_config()?;
    let report = run_scenario(&cfg).map_err(|e| anyhow!("{e}"))?;
    eprintln!(
        "sim-run: {} -> server {:.3} J, latency mean {:.3} s over {} requests",
        MetricsReport::describe_config(&cfg),
        report.server_total_j(),
        report.latency.mean_s,
        report.completed_requests
    );
    args.common.emit(&MetricsReport::csv_table(std::slice::from_ref(&report)))?;
    Ok(())
}

#[derive(Args)]
pub struct SimSweepArgs {
    #[command(flatten)]
    pub common: CommonSimArgs,
    /// Client counts to sweep, comma-separated.
    #[arg(long, default_value = "3,4,6,8,12,16", value_delimiter = ',')]
    pub sweep_clients: Vec<u32>,
    /// Number of seeds per point (seed, seed+1, ...).
    #[arg(long, default_value_t = 5)]
    pub seeds: u64,
}

pub fn sim_sweep(args: SimSweepArgs) -> CmdResult {
    let base = args.common.base_config()?;
    let base_seed = base.rng_seed;
    let seeds: Vec<u64> = (0..args.seeds).map(|i| base_seed + i).collect();
    let outcome = sweep_crossover(&base, &args.sweep_clients, &seeds).map_err(|e| anyhow!("{e}"))?;

    eprintln!("sim-sweep: beta={}s slots={} seeds={:?}", base.beta_s, base.max_slots, seeds);
    eprintln!("ratio  clients  oscar_server_J (95% CI)   dtls_server_J (95% CI)");
    for p in &outcome.points {
        eprintln!(
            "{:5.2}  {:7}  {:10.3} (±{:.3})      {:10.3} (±{:.3})",
            p.ratio, p.n_clients, p.oscar_server_j, p.oscar_ci95_j, p.dtls_server_j, p.dtls_ci95_j
        );
    }
    match outcome.crossover_ratio {
        Some(r) => println!("crossover_ratio {r:.3}"),
        None => println!("crossover_ratio none"),
    }
    args.common.emit(&MetricsReport::csv_table(&outcome.reports))?;
    Ok(())
}
