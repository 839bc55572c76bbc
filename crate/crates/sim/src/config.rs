//! Scenario configuration: presets, validation, and the scenario file
//! format.
//!
//! Scenario files are plain text, one `key = value` pair per line, grouped
//! in `[section]` headers, `#` comments allowed:
//!
//! ```text
//! [scenario]
//! preset = gen16          # applied first; later keys override
//! mode = oscar            # oscar | dtls
//! clients = 8
//! slots = 3
//! beta_s = 60
//! duration_s = 10800
//! seed = 1
//!
//! [workload]
//! requests_per_min = 0.5
//! payload_bytes = 25
//!
//! [mac]
//! kind = async_lpl        # async_lpl | beacon
//! check_hz = 8
//! check_ms = 5
//! strobe_ack_ms = 2
//! wake_hold_ms = 20
//! beacon_interval_ms = 122.88
//! superframe_ms = 15.36
//!
//! [energy]
//! voltage_v = 2.8
//! cpu_active_ma = 4.9
//! cpu_lpm_ma = 0.0025
//! radio_rx_ma = 18.5
//! radio_tx_ma = 25.8
//! radio_off_ma = 0.001
//!
//! [cpu]
//! sign_s = 1.25
//! verify_s = 1.85
//! aead_s = 0.005
//! prf_s = 0.001
//! handshake_flight_s = 0.03
//!
//! [bytes]
//! frame_overhead = 23
//! frame_mtu = 127
//! dtls_record_overhead = 5
//! hs_flights = 65 44 81 90 85 45
//! close_alert = 30
//! no_session_alert = 30
//! beacon = 11
//!
//! [link]
//! loss_prob = 0
//! retransmit_timeout_s = 2
//! max_retransmits = 4
//! ```
//!
//! The `[demo]` section (producer/consumer identities, resource path,
//! capability policy, grants) is read by the loopback demo driver, not by
//! the simulator.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Invalid { line: usize, msg: String },
    #[error("field {0}: {1}")]
    Field(&'static str, String),
}

fn field_err(field: &'static str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Field(field, msg.into())
}

fn is_positive(v: f64) -> bool {
    v.is_finite() && v > 0.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Oscar,
    DtlsPsk,
}

impl Mode {
    pub fn label(self) -> &'static str {
        match self {
            Mode::Oscar => "oscar",
            Mode::DtlsPsk => "dtls",
        }
    }
}

/// Hardware-class presets with representative (non-normative) current
/// draws and crypto timings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// 16-bit MCU class with an older transceiver, asynchronous
    /// low-power-listening MAC.
    Gen16,
    /// 32-bit MCU class with a low-power prototype radio, beacon-enabled
    /// MAC with a PAN coordinator hop.
    Gen32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MacConfig {
    AsyncLpl {
        /// Receiver wake-ups per second.
        check_hz: f64,
        /// RX time spent per channel check, ms.
        check_ms: f64,
        /// Strobe-acknowledge time when the receiver is already awake, ms.
        strobe_ack_ms: f64,
        /// Post-activity awake window for strobe coalescing, ms.
        wake_hold_ms: f64,
    },
    BeaconEnabled {
        beacon_interval_ms: f64,
        superframe_ms: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyModel {
    pub voltage_v: f64,
    pub cpu_active_ma: f64,
    pub cpu_lpm_ma: f64,
    pub radio_rx_ma: f64,
    pub radio_tx_ma: f64,
    pub radio_off_ma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpuTimes {
    pub sign_s: f64,
    pub verify_s: f64,
    pub aead_s: f64,
    pub prf_s: f64,
    /// Symmetric-crypto and record processing per handshake flight.
    pub handshake_flight_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ByteModel {
    /// Link, adaptation, and UDP/IP overhead per datagram fragment.
    pub frame_overhead: u32,
    pub frame_mtu: u32,
    /// Compressed DTLS record overhead on application data.
    pub dtls_record_overhead: u32,
    /// Handshake flight payload sizes: CH1, HVR, CH2(cookie),
    /// ServerHello..Done, CKE/CCS/Fin, CCS/Fin.
    pub hs_flights: [u32; 6],
    pub close_alert: u32,
    pub no_session_alert: u32,
    pub beacon: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Workload {
    pub requests_per_min: f64,
    pub payload_bytes: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkModel {
    pub loss_prob: f64,
    pub retransmit_timeout_s: f64,
    pub max_retransmits: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub mode: Mode,
    pub n_clients: u32,
    pub max_slots: u32,
    pub beta_s: f64,
    pub duration_s: f64,
    pub rng_seed: u64,
    pub mac: MacConfig,
    pub energy: EnergyModel,
    pub cpu: CpuTimes,
    pub bytes: ByteModel,
    pub workload: Workload,
    pub link: LinkModel,
}

impl ScenarioConfig {
    pub fn preset(preset: Preset, mode: Mode, n_clients: u32, rng_seed: u64) -> Self {
        match preset {
            Preset::Gen16 => ScenarioConfig {
                mode,
                n_clients,
                max_slots: 3,
                beta_s: 60.0,
                duration_s: 10_800.0,
                rng_seed,
                mac: MacConfig::AsyncLpl { check_hz: 8.0, check_ms: 5.0, strobe_ack_ms: 2.0, wake_hold_ms: 20.0 },
                energy: EnergyModel {
                    voltage_v: 2.8,
                    cpu_active_ma: 4.9,
                    cpu_lpm_ma: 0.0025,
                    radio_rx_ma: 18.5,
                    radio_tx_ma: 25.8,
                    radio_off_ma: 0.001,
                },
                cpu: CpuTimes { sign_s: 1.25, verify_s: 1.85, aead_s: 0.005, prf_s: 0.001, handshake_flight_s: 0.09 },
                bytes: ByteModel {
                    frame_overhead: 23,
                    frame_mtu: 127,
                    dtls_record_overhead: 5,
                    hs_flights: [65, 44, 81, 90, 85, 45],
                    close_alert: 30,
                    no_session_alert: 30,
                    beacon: 11,
                },
                workload: Workload { requests_per_min: 0.5, payload_bytes: 25 },
                link: LinkModel { loss_prob: 0.0, retransmit_timeout_s: 2.0, max_retransmits: 4 },
            },
            Preset::Gen32 => {
                let mut cfg = Self::preset(Preset::Gen16, mode, n_clients, rng_seed);
                cfg.mac = MacConfig::BeaconEnabled { beacon_interval_ms: 122.88, superframe_ms: 15.36 };
                cfg.energy = EnergyModel {
                    voltage_v: 2.8,
                    cpu_active_ma: 6.4,
                    cpu_lpm_ma: 0.0014,
                    radio_rx_ma: 6.0,
                    radio_tx_ma: 6.0,
                    radio_off_ma: 0.0005,
                };
                cfg.cpu = CpuTimes { sign_s: 0.5, verify_s: 0.65, aead_s: 0.002, prf_s: 0.0005, handshake_flight_s: 0.045 };
                cfg
            }
        }
    }

    pub fn gen16(mode: Mode, n_clients: u32, rng_seed: u64) -> Self {
        Self::preset(Preset::Gen16, mode, n_clients, rng_seed)
    }

    pub fn gen32(mode: Mode, n_clients: u32, rng_seed: u64) -> Self {
        Self::preset(Preset::Gen32, mode, n_clients, rng_seed)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_clients < 1 {
            return Err(field_err("clients", "must be at least 1"));
        }
        if self.max_slots < 1 {
            return Err(field_err("slots", "must be at least 1"));
        }
        for (name, v) in [
            ("beta_s", self.beta_s),
            ("duration_s", self.duration_s),
            ("requests_per_min", self.workload.requests_per_min),
            ("retransmit_timeout_s", self.link.retransmit_timeout_s),
        ] {
            if !is_positive(v) {
                return Err(ConfigError::Field("scenario", format!("{name} must be positive, got {v}")));
            }
        }
        match self.mac {
            MacConfig::AsyncLpl { check_hz, check_ms, strobe_ack_ms, wake_hold_ms } => {
                if !is_positive(check_hz) || !is_positive(check_ms) || strobe_ack_ms < 0.0 || wake_hold_ms < 0.0 {
                    return Err(field_err("mac", "async_lpl parameters must be positive"));
                }
                if check_ms / 1000.0 * check_hz > 1.0 {
                    return Err(field_err("mac", "channel checks exceed full duty"));
                }
            }
            MacConfig::BeaconEnabled { beacon_interval_ms, superframe_ms } => {
                if !is_positive(beacon_interval_ms) || !is_positive(superframe_ms) || superframe_ms > beacon_interval_ms {
                    return Err(field_err("mac", "superframe must fit inside the beacon interval"));
                }
            }
        }
        let e = &self.energy;
        for (name, v) in [
            ("voltage_v", e.voltage_v),
            ("cpu_active_ma", e.cpu_active_ma),
            ("cpu_lpm_ma", e.cpu_lpm_ma),
            ("radio_rx_ma", e.radio_rx_ma),
            ("radio_tx_ma", e.radio_tx_ma),
            ("radio_off_ma", e.radio_off_ma),
        ] {
            if v < 0.0 {
                return Err(ConfigError::Field("energy", format!("{name} must be non-negative")));
            }
        }
        if e.radio_off_ma > e.radio_rx_ma {
            return Err(field_err("energy", "radio_off_ma exceeds radio_rx_ma"));
        }
        let c = &self.cpu;
        if c.sign_s < 0.0 || c.verify_s < 0.0 || c.aead_s < 0.0 || c.prf_s < 0.0 || c.handshake_flight_s < 0.0 {
            return Err(field_err("cpu", "times must be non-negative"));
        }
        if self.bytes.frame_mtu <= self.bytes.frame_overhead {
            return Err(field_err("bytes", "frame_mtu must exceed frame_overhead"));
        }
        if self.workload.payload_bytes == 0 || self.workload.payload_bytes > 1024 {
            return Err(field_err("workload", "payload_bytes must be in 1..=1024"));
        }
        if !(0.0..1.0).contains(&self.link.loss_prob) {
            return Err(field_err("link", "loss_prob must be in [0, 1)"));
        }
        Ok(())
    }

    /// Parses the scenario file format. A `preset` key in `[scenario]` is
    /// applied first; every other key overrides on top of it.
    pub fn parse_str(text: &str) -> Result<Self, ConfigError> {
        let entries = parse_entries(text)?;

        let mut preset = Preset::Gen16;
        let mut mode = Mode::Oscar;
        for e in &entries {
            if e.section == "scenario" && e.key == "preset" {
                preset = match e.value.as_str() {
                    "gen16" => Preset::Gen16,
                    "gen32" => Preset::Gen32,
                    other => return Err(e.invalid(format!("unknown preset {other:?} (gen16 | gen32)"))),
                };
            }
            if e.section == "scenario" && e.key == "mode" {
                mode = parse_mode(&e.value).map_err(|m| e.invalid(m))?;
            }
        }
        let mut cfg = ScenarioConfig::preset(preset, mode, 1, 1);

        for e in &entries {
            cfg.apply(e)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, e: &Entry) -> Result<(), ConfigError> {
        let inv = |msg: String| e.invalid(msg);
        match (e.section.as_str(), e.key.as_str()) {
            ("scenario", "preset") | ("scenario", "mode") => {} // handled in the first pass
            ("scenario", "clients") => self.n_clients = e.parse()?,
            ("scenario", "slots") => self.max_slots = e.parse()?,
            ("scenario", "beta_s") => self.beta_s = e.parse()?,
            ("scenario", "duration_s") => self.duration_s = e.parse()?,
            ("scenario", "seed") => self.rng_seed = e.parse()?,
            ("workload", "requests_per_min") => self.workload.requests_per_min = e.parse()?,
            ("workload", "payload_bytes") => self.workload.payload_bytes = e.parse()?,
            ("mac", "kind") => {
                self.mac = match e.value.as_str() {
                    "async_lpl" => MacConfig::AsyncLpl { check_hz: 8.0, check_ms: 5.0, strobe_ack_ms: 2.0, wake_hold_ms: 20.0 },
                    "beacon" => MacConfig::BeaconEnabled { beacon_interval_ms: 122.88, superframe_ms: 15.36 },
                    other => return Err(inv(format!("unknown mac kind {other:?} (async_lpl | beacon)"))),
                }
            }
            ("mac", "check_hz") => {
                if let MacConfig::AsyncLpl { check_hz, .. } = &mut self.mac {
                    *check_hz = e.parse()?;
                }
            }
            ("mac", "check_ms") => {
                if let MacConfig::AsyncLpl { check_ms, .. } = &mut self.mac {
                    *check_ms = e.parse()?;
                }
            }
            ("mac", "strobe_ack_ms") => {
                if let MacConfig::AsyncLpl { strobe_ack_ms, .. } = &mut self.mac {
                    *strobe_ack_ms = e.parse()?;
                }
            }
            ("mac", "wake_hold_ms") => {
                if let MacConfig::AsyncLpl { wake_hold_ms, .. } = &mut self.mac {
                    *wake_hold_ms = e.parse()?;
                }
            }
            ("mac", "beacon_interval_ms") => {
                if let MacConfig::BeaconEnabled { beacon_interval_ms, .. } = &mut self.mac {
                    *beacon_interval_ms = e.parse()?;
                }
            }
            ("mac", "superframe_ms") => {
                if let MacConfig::BeaconEnabled { superframe_ms, .. } = &mut self.mac {
                    *superframe_ms = e.parse()?;
                }
            }
            ("energy", "voltage_v") => self.energy.voltage_v = e.parse()?,
            ("energy", "cpu_active_ma") => self.energy.cpu_active_ma = e.parse()?,
            ("energy", "cpu_lpm_ma") => self.energy.cpu_lpm_ma = e.parse()?,
            ("energy", "radio_rx_ma") => self.energy.radio_rx_ma = e.parse()?,
            ("energy", "radio_tx_ma") => self.energy.radio_tx_ma = e.parse()?,
            ("energy", "radio_off_ma") => self.energy.radio_off_ma = e.parse()?,
            ("cpu", "sign_s") => self.cpu.sign_s = e.parse()?,
            ("cpu", "verify_s") => self.cpu.verify_s = e.parse()?,
            ("cpu", "aead_s") => self.cpu.aead_s = e.parse()?,
            ("cpu", "prf_s") => self.cpu.prf_s = e.parse()?,
            ("cpu", "handshake_flight_s") => self.cpu.handshake_flight_s = e.parse()?,
            ("bytes", "frame_overhead") => self.bytes.frame_overhead = e.parse()?,
            ("bytes", "frame_mtu") => self.bytes.frame_mtu = e.parse()?,
            ("bytes", "dtls_record_overhead") => self.bytes.dtls_record_overhead = e.parse()?,
            ("bytes", "hs_flights") => {
                let parts: Result<Vec<u32>, _> = e.value.split_whitespace().map(str::parse).collect();
                let parts = parts.map_err(|err| inv(format!("hs_flights: {err}")))?;
                if parts.len() != 6 {
                    return Err(inv(format!("hs_flights needs 6 sizes, got {}", parts.len())));
                }
                self.bytes.hs_flights = [parts[0], parts[1], parts[2], parts[3], parts[4], parts[5]];
            }
            ("bytes", "close_alert") => self.bytes.close_alert = e.parse()?,
            ("bytes", "no_session_alert") => self.bytes.no_session_alert = e.parse()?,
            ("bytes", "beacon") => self.bytes.beacon = e.parse()?,
            ("link", "loss_prob") => self.link.loss_prob = e.parse()?,
            ("link", "retransmit_timeout_s") => self.link.retransmit_timeout_s = e.parse()?,
            ("link", "max_retransmits") => self.link.max_retransmits = e.parse()?,
            ("demo", _) => {} // consumed by the demo driver
            (section, key) => return Err(inv(format!("unknown key [{section}] {key}"))),
        }
        Ok(())
    }
}

pub fn parse_mode(value: &str) -> Result<Mode, String> {
    match value {
        "oscar" => Ok(Mode::Oscar),
        "dtls" | "dtls_psk" => Ok(Mode::DtlsPsk),
        other => Err(format!("unknown mode {other:?} (oscar | dtls)")),
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Entry {
    pub section: String,
    pub key: String,
    pub value: String,
    pub line: usize,
}

impl Entry {
    pub(crate) fn invalid(&self, msg: String) -> ConfigError {
        ConfigError::Invalid { line: self.line, msg }
    }

    pub(crate) fn parse<T: std::str::FromStr>(&self) -> Result<T, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        self.value
            .parse()
            .map_err(|err| self.invalid(format!("{} = {}: {err}", self.key, self.value)))
    }
}

pub(crate) fn parse_entries(text: &str) -> Result<Vec<Entry>, ConfigError> {
    let mut section = String::new();
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.split('#').next().unwrap_or("").trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(name) = trimmed.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or(ConfigError::Invalid { line, msg: "unterminated section header".into() })?;
            section = name.trim().to_string();
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(ConfigError::Invalid { line, msg: format!("expected key = value, got {trimmed:?}") });
        };
        if section.is_empty() {
            return Err(ConfigError::Invalid { line, msg: "key before any [section]".into() });
        }
        entries.push(Entry {
            section: section.clone(),
            key: key.trim().to_string(),
            value: value.trim().to_string(),
            line,
        });
    }
    Ok(entries)
}

/// Demo-section values used by the loopback interop driver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemoConfig {
    pub producer_id: String,
    pub consumer: String,
    pub resource: String,
    pub capability: String,
    pub granted: Vec<String>,
}

impl Default for DemoConfig {
    fn default() -> Self {
        DemoConfig {
            producer_id: "prod-01".into(),
            consumer: "alice".into(),
            resource: "/temp".into(),
            capability: "temperature-sensor".into(),
            granted: vec!["/temp".into()],
        }
    }
}

impl DemoConfig {
    pub fn parse_str(text: &str) -> Result<Self, ConfigError> {
        let mut demo = DemoConfig::default();
        for e in parse_entries(text)? {
            if e.section != "demo" {
                continue;
            }
            match e.key.as_str() {
                "producer_id" => demo.producer_id = e.value.clone(),
                "consumer" => demo.consumer = e.value.clone(),
                "resource" => demo.resource = e.value.clone(),
                "capability" => demo.capability = e.value.clone(),
                "granted" => demo.granted = e.value.split_whitespace().map(str::to_string).collect(),
                other => return Err(e.invalid(format!("unknown key [demo] {other}"))),
            }
        }
        Ok(demo)
    }
}
