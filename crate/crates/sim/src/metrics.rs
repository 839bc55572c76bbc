//! Run output: per-node energy, latency distribution, event counts, CSV.

use crate::config::{Mode, ScenarioConfig};
use crate::energy::ComponentEnergy;

#[derive(Debug, Clone, PartialEq)]
pub struct NodeEnergy {
    pub label: String,
    pub energy: ComponentEnergy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatencyStats {
    pub mean_s: f64,
    pub p95_s: f64,
    pub min_s: f64,
    pub max_s: f64,
    pub samples: usize,
}

impl LatencyStats {
    pub fn from_sorted_ns(sorted: &[u64]) -> LatencyStats {
        if sorted.is_empty() {
            return LatencyStats { mean_s: 0.0, p95_s: 0.0, min_s: 0.0, max_s: 0.0, samples: 0 };
        }
        let n = sorted.len();
        let sum: u128 = sorted.iter().map(|&v| v as u128).sum();
        let p95_idx = ((n as f64 * 0.95).ceil() as usize).clamp(1, n) - 1;
        LatencyStats {
            mean_s: sum as f64 / n as f64 / 1e9,
            p95_s: sorted[p95_idx] as f64 / 1e9,
            min_s: sorted[0] as f64 / 1e9,
            max_s: sorted[n - 1] as f64 / 1e9,
            samples: n,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counts {
    pub handshakes: u64,
    pub evictions: u64,
    pub retransmissions: u64,
    pub signatures: u64,
    pub verifications: u64,
    /// Requests abandoned after the retransmission budget; stays zero on a
    /// lossless link.
    pub abandoned: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub mode: Mode,
    pub n_clients: u32,
    pub max_slots: u32,
    pub beta_s: f64,
    pub seed: u64,
    /// Index 0 is the server, then one entry per client, then the PAN
    /// coordinator when the MAC has one.
    pub nodes: Vec<NodeEnergy>,
    pub client_mean_j_per_req: f64,
    pub latency: LatencyStats,
    pub counts: Counts,
    pub completed_requests: u64,
}

impl MetricsReport {
    pub fn server(&self) -> &NodeEnergy {
        &self.nodes[0]
    }

    pub fn server_total_j(&self) -> f64 {
        self.server().energy.total_j
    }

    pub const CSV_HEADER: &'static str = "mode,n_clients,max_slots,beta_s,seed,server_total_j,server_cpu_j,server_radio_j,client_mean_j_per_req,latency_mean_s,latency_p95_s,handshakes,evictions,signatures,verifications";

    pub fn csv_row(&self) -> String {
        let s = &self.server().energy;
        format!(
            "{},{},{},{},{},{:.6},{:.6},{:.6},{:.9},{:.6},{:.6},{},{},{},{}",
            self.mode.label(),
            self.n_clients,
            self.max_slots,
            self.beta_s,
            self.seed,
            s.total_j,
            s.cpu_j,
            s.radio_j,
            self.client_mean_j_per_req,
            self.latency.mean_s,
            self.latency.p95_s,
            self.counts.handshakes,
            self.counts.evictions,
            self.counts.signatures,
            self.counts.verifications,
        )
    }

    /// Full CSV for a batch of runs, header included.
    pub fn csv_table(reports: &[MetricsReport]) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in reports {
            out.push_str(&r.csv_row());
            out.push('\n');
        }
        out
    }

    pub fn describe_config(cfg: &ScenarioConfig) -> String {
        format!(
            "{} clients={} slots={} beta={}s duration={}s seed={}",
            cfg.mode.label(),
            cfg.n_clients,
            cfg.max_slots,
            cfg.beta_s,
            cfg.duration_s,
            cfg.rng_seed
        )
    }
}
