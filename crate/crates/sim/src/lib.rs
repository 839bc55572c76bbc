//! Discrete-event simulator for the object-security scalability study.
//!
//! A star of constrained CoAP clients around one constrained server, driven
//! by an exponential request workload over a duty-cycled radio, in one of
//! two modes:
//!
//! - **oscar** — the server answers every GET with an encrypted, nested
//!   signed object; signing happens offline on a `β`-periodic schedule and
//!   no per-client session state exists.
//! - **dtls** — the baseline: a DTLS-PSK server with a fixed number of
//!   session slots and LRU closure, paying a handshake whenever a client's
//!   session has been evicted.
//!
//! Runs are deterministic for a fixed seed. Energy is accounted
//! Energest-style: per-node time in CPU active/LPM and radio RX/TX states,
//! multiplied by a constant voltage and per-state current draws. Independent
//! runs (sweep points, seeds) execute in parallel when the `parallel`
//! feature (default) is enabled; disable it for a fully sequential build.

pub mod config;
pub mod energy;
pub mod engine;
pub mod mac;
pub mod metrics;
pub mod sweep;

pub use config::{ConfigError, EnergyModel, MacConfig, Mode, Preset, ScenarioConfig};
pub use energy::{account_energy, ComponentEnergy, EnergestLedger};
pub use engine::run_scenario;
pub use metrics::MetricsReport;
pub use sweep::{run_batch, run_batch_sequential, sweep_crossover, SweepOutcome, SweepPoint};

pub(crate) const NS_PER_S: f64 = 1e9;

pub(crate) fn s_to_ns(s: f64) -> u64 {
    (s * NS_PER_S).round() as u64
}

pub(crate) fn ms_to_ns(ms: f64) -> u64 {
    (ms * 1e6).round() as u64
}

pub(crate) fn ns_to_s(ns: u64) -> f64 {
    ns as f64 / NS_PER_S
}
