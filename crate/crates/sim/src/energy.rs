//! Energest-style accounting: accumulated time per hardware state,
//! converted to joules with a constant voltage and per-state current draws.

use crate::config::EnergyModel;
use crate::ns_to_s;

/// Accumulated nanoseconds per component state. CPU low-power time is the
/// remainder of the run, radio-off likewise.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EnergestLedger {
    pub cpu_active_ns: u64,
    pub radio_tx_ns: u64,
    pub radio_rx_ns: u64,
}

impl EnergestLedger {
    pub fn add_cpu(&mut self, ns: u64) {
        self.cpu_active_ns += ns;
    }

    pub fn add_tx(&mut self, ns: u64) {
        self.radio_tx_ns += ns;
    }

    pub fn add_rx(&mut self, ns: u64) {
        self.radio_rx_ns += ns;
    }
}

/// Joules per component over a run, plus the per-state seconds they came
/// from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentEnergy {
    pub cpu_j: f64,
    pub radio_j: f64,
    pub total_j: f64,
    pub cpu_active_s: f64,
    pub cpu_lpm_s: f64,
    pub radio_tx_s: f64,
    pub radio_rx_s: f64,
    pub radio_off_s: f64,
}

/// E = Σ_state t_state × V × I_state. Linear in every argument. State times
/// are clamped so they never exceed the simulated duration.
pub fn account_energy(ledger: &EnergestLedger, duration_ns: u64, model: &EnergyModel) -> ComponentEnergy {
    let cpu_active = ledger.cpu_active_ns.min(duration_ns);
    let cpu_lpm = duration_ns - cpu_active;
    let radio_busy = (ledger.radio_tx_ns + ledger.radio_rx_ns).min(duration_ns);
    let radio_off = duration_ns - radio_busy;

    let joules = |ns: u64, current_ma: f64| ns_to_s(ns) * model.voltage_v * current_ma / 1000.0;
    let cpu_j = joules(cpu_active, model.cpu_active_ma) + joules(cpu_lpm, model.cpu_lpm_ma);
    let radio_j = joules(ledger.radio_tx_ns, model.radio_tx_ma)
        + joules(ledger.radio_rx_ns, model.radio_rx_ma)
        + joules(radio_off, model.radio_off_ma);

    ComponentEnergy {
        cpu_j,
        radio_j,
        total_j: cpu_j + radio_j,
        cpu_active_s: ns_to_s(cpu_active),
        cpu_lpm_s: ns_to_s(cpu_lpm),
        radio_tx_s: ns_to_s(ledger.radio_tx_ns),
        radio_rx_s: ns_to_s(ledger.radio_rx_ns),
        radio_off_s: ns_to_s(radio_off),
    }
}
