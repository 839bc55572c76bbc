//! The deterministic event engine.
//!
//! Nodes: index 0 is the server, 1..=n the clients, and (beacon MAC only)
//! n+1 the PAN coordinator relaying between clients and server. Every event
//! is ordered by (time, sequence); all randomness comes from per-purpose
//! ChaCha streams of the scenario seed, so a fixed config yields a
//! byte-identical report.
//!
//! In oscar mode the real role state machines run: clients hold real
//! consumers, the server a real producer, and every response is a genuine
//! encrypted-and-signed object that the consumer decrypts and verifies.
//! Configured CPU times (not wall-clock) are charged for the crypto
//! operations the roles report.
//!
//! In dtls mode the handshake runs at flight granularity against the real
//! LRU session table. While a handshake endpoint awaits the peer's next
//! flight it holds its radio in RX (interactive exchanges defeat duty
//! cycling); application data is not held, matching the stateless oscar
//! exchange.

use crate::config::{ConfigError, MacConfig, Mode, ScenarioConfig};
use crate::energy::{account_energy, EnergestLedger};
use crate::mac::MacRuntime;
use crate::metrics::{Counts, LatencyStats, MetricsReport, NodeEnergy};
use crate::{ns_to_s, s_to_ns};

use oscar_core::coap::{CoapMessage, Code, MessageType};
use oscar_core::crypto::SigningKey;
use oscar_core::keymat::AccessSecret;
use oscar_core::nodes::{
    AuthzServer, CapabilityPolicy, Consumer, CryptoOps, DtlsAction, DtlsEvent, DtlsSessionTable, Producer,
    ResignConfig,
};
use oscar_core::objsec::{issue_certificate, CertificatePayload};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

const SERVER: usize = 0;
const RESOURCE_PATH: &str = "/temp";
const CAPABILITY: &str = "temperature-sensor";

/// Runs one scenario to completion and reports energy, latency, and
/// counts.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<MetricsReport, ConfigError> {
    cfg.validate()?;
    let mut sim = Sim::new(cfg);
    sim.prime();
    sim.run();
    Ok(sim.report())
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum FrameKind {
    OscarRequest(Vec<u8>),
    OscarResponse(Vec<u8>),
    ClientHello1,
    HelloVerify,
    ClientHello2,
    ServerHello,
    ClientFinish,
    ServerFinish,
    AppDataRequest,
    AppDataResponse,
    CloseAlert,
    NoSession,
}

#[derive(Debug)]
enum EventKind {
    Arrival { client: usize },
    Deliver { from: usize, to: usize, kind: FrameKind, exchange: Option<usize> },
    Retry { exchange: usize, attempt: u32 },
    Resign,
}

struct Ev {
    at: u64,
    seq: u64,
    kind: EventKind,
}

impl PartialEq for Ev {
    fn eq(&self, other: &Self) -> bool {
        self.at == other.at && self.seq == other.seq
    }
}
impl Eq for Ev {}
impl PartialOrd for Ev {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Ev {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.at, self.seq).cmp(&(other.at, other.seq))
    }
}

#[derive(Debug, Default)]
struct Exchange {
    client: usize,
    started_ns: u64,
    completed: bool,
    latency_ns: Option<u64>,
    request_bytes: Vec<u8>,
    cl_tx_ns: u64,
    cl_rx_ns: u64,
    cl_cpu_ns: u64,
}

/// DTLS client-side progress through the flight sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum DState {
    Closed,
    AwaitHvr,
    AwaitSh,
    AwaitSf,
    Open,
}

struct DtlsClient {
    state: DState,
    active: Option<usize>,
    queue: VecDeque<usize>,
    /// RX hold while awaiting the next inbound handshake flight.
    hold_since: Option<u64>,
}

struct Sim<'a> {
    cfg: &'a ScenarioConfig,
    duration_ns: u64,
    rto_ns: u64,
    queue: BinaryHeap<Reverse<Ev>>,
    seq: u64,
    mac: MacRuntime,
    pan: Option<usize>,
    ledgers: Vec<EnergestLedger>,
    cpu_free: Vec<u64>,
    exchanges: Vec<Exchange>,
    counts: Counts,
    latencies: Vec<u64>,
    arrival_rngs: Vec<ChaCha8Rng>,
    mac_rng: ChaCha8Rng,
    misc_rng: ChaCha8Rng,
    loss_rng: ChaCha8Rng,
    // oscar state
    producer: Option<Producer>,
    consumers: Vec<Option<Consumer>>,
    resign_counter: u64,
    // dtls state
    table: Option<DtlsSessionTable>,
    dclients: Vec<DtlsClient>,
    server_hold: Vec<Option<u64>>,
    dtls_req_bytes: u32,
    dtls_resp_bytes: u32,
}

impl<'a> Sim<'a> {
    fn new(cfg: &'a ScenarioConfig) -> Self {
        let n = cfg.n_clients as usize;
        let beacon = matches!(cfg.mac, MacConfig::BeaconEnabled { .. });
        let node_count = 1 + n + usize::from(beacon);
        let pan = beacon.then_some(1 + n);

        let stream_rng = |stream: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
            rng.set_stream(stream);
            rng
        };

        // Representative application-data sizes for the dtls baseline: the
        // same CoAP shapes oscar uses, plus the compressed record overhead.
        let mut get = CoapMessage::new(MessageType::Confirmable, Code::Get, 0).with_token(vec![0; 4]);
        get.add_uri_path(RESOURCE_PATH);
        let dtls_req_bytes = get.encode().expect("static request").len() as u32 + cfg.bytes.dtls_record_overhead;
        let mut resp = CoapMessage::new(MessageType::Ack, Code::Content, 0).with_token(vec![0; 4]);
        resp.payload = vec![0; cfg.workload.payload_bytes as usize];
        let dtls_resp_bytes = resp.encode().expect("static response").len() as u32 + cfg.bytes.dtls_record_overhead;

        Sim {
            cfg,
            duration_ns: s_to_ns(cfg.duration_s),
            rto_ns: s_to_ns(cfg.link.retransmit_timeout_s),
            queue: BinaryHeap::new(),
            seq: 0,
            mac: MacRuntime::new(&cfg.mac, &cfg.bytes, node_count),
            pan,
            ledgers: vec![EnergestLedger::default(); node_count],
            cpu_free: vec![0; node_count],
            exchanges: Vec::new(),
            counts: Counts::default(),
            latencies: Vec::new(),
            arrival_rngs: (0..n).map(|i| stream_rng(1000 + i as u64)).collect(),
            mac_rng: stream_rng(1),
            misc_rng: stream_rng(2),
            loss_rng: stream_rng(3),
            producer: None,
            consumers: Vec::new(),
            resign_counter: 0,
            table: None,
            dclients: Vec::new(),
            server_hold: vec![None; node_count],
            dtls_req_bytes,
            dtls_resp_bytes,
        }
    }

    fn push(&mut self, at: u64, kind: EventKind) {
        self.seq += 1;
        self.queue.push(Reverse(Ev { at, seq: self.seq, kind }));
    }

    fn peer_name(client: usize) -> String {
        format!("c{client}")
    }

    fn representation(&self, counter: u64) -> Vec<u8> {
        let mut bytes = vec![0x5A; self.cfg.workload.payload_bytes as usize];
        let stamp = counter.to_be_bytes();
        let n = bytes.len().min(stamp.len());
        bytes[..n].copy_from_slice(&stamp[..n]);
        bytes
    }

    /// Provisions the world. In oscar mode the roles are real: secrets and
    /// certificates are pre-shared out of band, as in the measured setup.
    fn prime(&mut self) {
        let n = self.cfg.n_clients as usize;
        match self.cfg.mode {
            Mode::Oscar => {
                let authority_key = SigningKey::from_seed(&[0xA0; 32]);
                let producer_key = SigningKey::from_seed(&[0xB0; 32]);
                let mut authz = AuthzServer::new(authority_key, "authz");
                let cert = issue_certificate(
                    &CertificatePayload {
                        subject_id: "prod-01".into(),
                        public_key: producer_key.verifying_key().to_bytes().to_vec(),
                        capabilities: vec![CAPABILITY.into()],
                        location: None,
                        not_before: 0,
                        not_after: u64::MAX / 2,
                    },
                    &SigningKey::from_seed(&[0xA0; 32]),
                    "authz",
                )
                .expect("static certificate");
                authz.publish_certificate(cert.clone()).expect("certificate is well-formed");
                authz.map_resource_producer(RESOURCE_PATH, "prod-01");
                let secret = AccessSecret::new(1, vec![0xC0; 16], vec![RESOURCE_PATH.into()], 1).expect("static secret");
                authz.register_secret(secret.clone());

                let mut producer = Producer::new("prod-01", producer_key, ResignConfig::from_interval(self.cfg.beta_s, 1));
                producer.add_trust_anchor(authz.anchor());
                producer.add_resource(RESOURCE_PATH, self.representation(0)).expect("static resource");
                producer.install_secret(secret.clone()).expect("first secret");

                self.consumers = (0..n)
                    .map(|i| {
                        let mut policy = CapabilityPolicy::new();
                        policy.require(RESOURCE_PATH, CAPABILITY);
                        let mut c = Consumer::new(&Self::peer_name(i + 1), policy);
                        c.trust_store_mut().add_anchor(authz.anchor());
                        c.trust_store_mut().add_certificate(cert.clone()).expect("anchored certificate");
                        c.install_secret(secret.clone());
                        Some(c)
                    })
                    .collect();
                self.producer = Some(producer);

                let beta_ns = s_to_ns(self.cfg.beta_s);
                let phase = self.misc_rng.gen_range(0..beta_ns.max(1));
                self.push(phase, EventKind::Resign);
            }
            Mode::DtlsPsk => {
                self.table = Some(DtlsSessionTable::with_cookie_salt(self.cfg.max_slots as usize, self.cfg.rng_seed));
                self.dclients = (0..n)
                    .map(|_| DtlsClient { state: DState::Closed, active: None, queue: VecDeque::new(), hold_since: None })
                    .collect();
            }
        }

        for i in 0..n {
            let first = self.exp_arrival(i);
            if first < self.duration_ns {
                self.push(first, EventKind::Arrival { client: i + 1 });
            }
        }
    }

    fn exp_arrival(&mut self, client_idx: usize) -> u64 {
        let mean_s = 60.0 / self.cfg.workload.requests_per_min;
        let u: f64 = self.arrival_rngs[client_idx].gen();
        s_to_ns(-mean_s * (1.0 - u).ln())
    }

    fn schedule_next_arrival(&mut self, client: usize, now: u64) {
        let gap = self.exp_arrival(client - 1);
        let next = now + gap;
        if next < self.duration_ns {
            self.push(next, EventKind::Arrival { client });
        }
    }

    fn run(&mut self) {
        while let Some(Reverse(ev)) = self.queue.pop() {
            match ev.kind {
                EventKind::Arrival { client } => self.on_arrival(client, ev.at),
                EventKind::Deliver { from, to, kind, exchange } => self.on_deliver(from, to, kind, exchange, ev.at),
                EventKind::Retry { exchange, attempt } => self.on_retry(exchange, attempt, ev.at),
                EventKind::Resign => self.on_resign(ev.at),
            }
        }
    }

    // ---- charging helpers -------------------------------------------------

    fn charge_cpu(&mut self, node: usize, seconds: f64, exchange: Option<usize>, now: u64) -> u64 {
        let ns = s_to_ns(seconds);
        let start = now.max(self.cpu_free[node]);
        let done = start + ns;
        self.cpu_free[node] = done;
        self.ledgers[node].add_cpu(ns);
        if let Some(x) = exchange {
            if self.exchanges[x].client == node {
                self.exchanges[x].cl_cpu_ns += ns;
            }
        }
        done
    }

    fn cpu_cost_s(&self, ops: &CryptoOps) -> f64 {
        let c = &self.cfg.cpu;
        ops.sign as f64 * c.sign_s + ops.verify as f64 * c.verify_s + ops.aead as f64 * c.aead_s + ops.prf as f64 * c.prf_s
    }

    fn attribute_radio(&mut self, exchange: Option<usize>, node: usize, tx_ns: u64, rx_ns: u64) {
        if let Some(x) = exchange {
            if self.exchanges[x].client == node {
                self.exchanges[x].cl_tx_ns += tx_ns;
                self.exchanges[x].cl_rx_ns += rx_ns;
            }
        }
    }

    fn frame_app_bytes(&self, kind: &FrameKind) -> u32 {
        let b = &self.cfg.bytes;
        match kind {
            FrameKind::OscarRequest(bytes) | FrameKind::OscarResponse(bytes) => bytes.len() as u32,
            FrameKind::ClientHello1 => b.hs_flights[0],
            FrameKind::HelloVerify => b.hs_flights[1],
            FrameKind::ClientHello2 => b.hs_flights[2],
            FrameKind::ServerHello => b.hs_flights[3],
            FrameKind::ClientFinish => b.hs_flights[4],
            FrameKind::ServerFinish => b.hs_flights[5],
            FrameKind::AppDataRequest => self.dtls_req_bytes,
            FrameKind::AppDataResponse => self.dtls_resp_bytes,
            FrameKind::CloseAlert => b.close_alert,
            FrameKind::NoSession => b.no_session_alert,
        }
    }

    /// Sends one datagram, via the PAN coordinator when the MAC has one.
    /// Charges all hops and schedules the delivery event. Returns when the
    /// last bit lands (or `ready` for a lost frame).
    fn send_frame(&mut self, from: usize, to: usize, kind: FrameKind, exchange: Option<usize>, ready: u64) -> u64 {
        let app_bytes = self.frame_app_bytes(&kind);
        if self.cfg.link.loss_prob > 0.0 && self.loss_rng.gen::<f64>() < self.cfg.link.loss_prob {
            let tx = self.mac.lost_unicast_tx_ns(app_bytes);
            self.ledgers[from].add_tx(tx);
            self.attribute_radio(exchange, from, tx, 0);
            return ready;
        }
        let legs: Vec<(usize, usize)> = match self.pan {
            Some(pan) if from != pan && to != pan => vec![(from, pan), (pan, to)],
            _ => vec![(from, to)],
        };
        let mut t = ready;
        for (leg_from, leg_to) in legs {
            let charges = self.mac.unicast(leg_from, leg_to, app_bytes, t, &mut self.mac_rng);
            self.ledgers[leg_from].add_tx(charges.tx_ns);
            self.ledgers[leg_to].add_rx(charges.rx_ns);
            self.attribute_radio(exchange, leg_from, charges.tx_ns, 0);
            self.attribute_radio(exchange, leg_to, 0, charges.rx_ns);
            t = charges.delivered_ns;
        }
        self.push(t, EventKind::Deliver { from, to, kind, exchange });
        t
    }

    fn complete(&mut self, exchange: usize, at: u64) {
        let x = &mut self.exchanges[exchange];
        if x.completed {
            return;
        }
        x.completed = true;
        let latency = at - x.started_ns;
        x.latency_ns = Some(latency);
        self.latencies.push(latency);
    }

    // ---- handshake RX holds ------------------------------------------------

    fn hold_server(&mut self, client: usize, since: u64) {
        self.server_hold[client] = Some(since);
    }

    fn release_server_hold(&mut self, client: usize, now: u64) {
        if let Some(since) = self.server_hold[client].take() {
            let rx = now.saturating_sub(since).min(self.rto_ns);
            self.ledgers[SERVER].add_rx(rx);
        }
    }

    fn release_client_hold(&mut self, client: usize, exchange: Option<usize>, now: u64) {
        if let Some(since) = self.dclients[client - 1].hold_since.take() {
            let rx = now.saturating_sub(since).min(self.rto_ns);
            self.ledgers[client].add_rx(rx);
            self.attribute_radio(exchange, client, 0, rx);
        }
    }

    // ---- event handlers ----------------------------------------------------

    fn on_arrival(&mut self, client: usize, now: u64) {
        self.schedule_next_arrival(client, now);
        let x = self.exchanges.len();
        self.exchanges.push(Exchange { client, started_ns: now, ..Exchange::default() });

        match self.cfg.mode {
            Mode::Oscar => {
                let consumer = self.consumers[client - 1].as_mut().expect("oscar consumer");
                let (bytes, _) = consumer.request(RESOURCE_PATH, now).expect("provisioned secret");
                self.exchanges[x].request_bytes = bytes.clone();
                self.send_frame(client, SERVER, FrameKind::OscarRequest(bytes), Some(x), now);
            }
            Mode::DtlsPsk => {
                let cs = &mut self.dclients[client - 1];
                if cs.active.is_none() {
                    cs.active = Some(x);
                    self.client_progress(client, now);
                } else {
                    cs.queue.push_back(x);
                }
            }
        }
        self.push(now + self.rto_ns, EventKind::Retry { exchange: x, attempt: 1 });
    }

    /// Drives the dtls client's active exchange from its current state:
    /// also the retransmission path (resend the flight in flight).
    fn client_progress(&mut self, client: usize, now: u64) {
        let cs = &self.dclients[client - 1];
        let Some(x) = cs.active else { return };
        match cs.state {
            DState::Closed | DState::AwaitHvr => {
                self.dclients[client - 1].state = DState::AwaitHvr;
                let sent = self.send_frame(client, SERVER, FrameKind::ClientHello1, Some(x), now);
                self.dclients[client - 1].hold_since = Some(sent);
            }
            DState::AwaitSh => {
                let sent = self.send_frame(client, SERVER, FrameKind::ClientHello2, Some(x), now);
                self.dclients[client - 1].hold_since = Some(sent);
            }
            DState::AwaitSf => {
                let sent = self.send_frame(client, SERVER, FrameKind::ClientFinish, Some(x), now);
                self.dclients[client - 1].hold_since = Some(sent);
            }
            DState::Open => {
                self.send_frame(client, SERVER, FrameKind::AppDataRequest, Some(x), now);
            }
        }
    }

    fn on_deliver(&mut self, from: usize, to: usize, kind: FrameKind, exchange: Option<usize>, now: u64) {
        if to == SERVER {
            self.on_server_frame(from, kind, exchange, now);
        } else {
            self.on_client_frame(to, kind, exchange, now);
        }
    }

    fn on_server_frame(&mut self, from: usize, kind: FrameKind, exchange: Option<usize>, now: u64) {
        let peer = Self::peer_name(from);
        match kind {
            FrameKind::OscarRequest(bytes) => {
                let producer = self.producer.as_mut().expect("oscar producer");
                let (response, ops) = producer.handle_datagram(&peer, &bytes, now).expect("well-formed request");
                self.counts.signatures += ops.sign as u64;
                let cost = self.cpu_cost_s(&ops);
                let done = self.charge_cpu(SERVER, cost, None, now);
                self.send_frame(SERVER, from, FrameKind::OscarResponse(response), exchange, done);
            }
            FrameKind::ClientHello1 => {
                let done = self.charge_cpu(SERVER, self.cfg.cpu.handshake_flight_s, None, now);
                let table = self.table.as_mut().expect("dtls table");
                let actions = table.handle(DtlsEvent::ClientHello { peer, cookie: None }, now);
                for action in actions {
                    if let DtlsAction::SendHelloVerify { .. } = action {
                        let sent = self.send_frame(SERVER, from, FrameKind::HelloVerify, exchange, done);
                        self.hold_server(from, sent);
                    }
                }
            }
            FrameKind::ClientHello2 => {
                self.release_server_hold(from, now);
                let done = self.charge_cpu(SERVER, self.cfg.cpu.handshake_flight_s, None, now);
                let table = self.table.as_mut().expect("dtls table");
                let cookie = table.cookie_for(&peer);
                let actions = table.handle(DtlsEvent::ClientHello { peer, cookie: Some(cookie) }, now);
                for action in actions {
                    match action {
                        DtlsAction::SendCloseAlert { peer: victim } => {
                            self.counts.evictions += 1;
                            let victim_node: usize = victim[1..].parse().expect("peer name");
                            self.send_frame(SERVER, victim_node, FrameKind::CloseAlert, None, done);
                        }
                        DtlsAction::SendServerHelloFlight { .. } => {
                            self.counts.handshakes += 1;
                            let sent = self.send_frame(SERVER, from, FrameKind::ServerHello, exchange, done);
                            self.hold_server(from, sent);
                        }
                        _ => {}
                    }
                }
            }
            FrameKind::ClientFinish => {
                self.release_server_hold(from, now);
                let done = self.charge_cpu(SERVER, self.cfg.cpu.handshake_flight_s, None, now);
                let table = self.table.as_mut().expect("dtls table");
                let actions = table.handle(DtlsEvent::HandshakeContinue { peer }, now);
                for action in actions {
                    match action {
                        DtlsAction::SendFinishedFlight { .. } => {
                            self.send_frame(SERVER, from, FrameKind::ServerFinish, exchange, done);
                        }
                        DtlsAction::SendNoSession { .. } => {
                            self.send_frame(SERVER, from, FrameKind::NoSession, exchange, done);
                        }
                        _ => {}
                    }
                }
            }
            FrameKind::AppDataRequest => {
                let table = self.table.as_mut().expect("dtls table");
                let actions = table.handle(DtlsEvent::AppData { peer }, now);
                if actions.is_empty() {
                    // Record decrypt of the request plus encrypt of the
                    // response.
                    let done = self.charge_cpu(SERVER, 2.0 * self.cfg.cpu.aead_s, None, now);
                    self.send_frame(SERVER, from, FrameKind::AppDataResponse, exchange, done);
                } else {
                    self.send_frame(SERVER, from, FrameKind::NoSession, exchange, now);
                }
            }
            other => debug_assert!(false, "server received unexpected frame {other:?}"),
        }
    }

    fn on_client_frame(&mut self, client: usize, kind: FrameKind, exchange: Option<usize>, now: u64) {
        match self.cfg.mode {
            Mode::Oscar => {
                let FrameKind::OscarResponse(bytes) = kind else {
                    debug_assert!(false, "oscar client received {kind:?}");
                    return;
                };
                let Some(x) = exchange else { return };
                if self.exchanges[x].completed {
                    return;
                }
                let msg = CoapMessage::decode(&bytes).expect("producer responses decode");
                let consumer = self.consumers[client - 1].as_mut().expect("oscar consumer");
                match consumer.accept_response(&msg, now) {
                    Ok((_payload, ops)) => {
                        self.counts.verifications += ops.verify as u64;
                        let cost = self.cpu_cost_s(&ops);
                        let done = self.charge_cpu(client, cost, Some(x), now);
                        self.complete(x, done);
                    }
                    Err(err) => {
                        debug_assert!(false, "consumer rejected in-sim response: {err}");
                        self.counts.abandoned += 1;
                        self.exchanges[x].completed = true;
                    }
                }
            }
            Mode::DtlsPsk => self.on_dtls_client_frame(client, kind, exchange, now),
        }
    }

    fn on_dtls_client_frame(&mut self, client: usize, kind: FrameKind, exchange: Option<usize>, now: u64) {
        let state = self.dclients[client - 1].state;
        match kind {
            FrameKind::HelloVerify if state == DState::AwaitHvr => {
                self.release_client_hold(client, exchange, now);
                self.dclients[client - 1].state = DState::AwaitSh;
                self.client_progress(client, now);
            }
            FrameKind::ServerHello if state == DState::AwaitSh => {
                self.release_client_hold(client, exchange, now);
                let done = self.charge_cpu(client, self.cfg.cpu.handshake_flight_s, exchange, now);
                self.dclients[client - 1].state = DState::AwaitSf;
                self.client_progress(client, done);
            }
            FrameKind::ServerFinish if state == DState::AwaitSf => {
                self.release_client_hold(client, exchange, now);
                let done = self.charge_cpu(client, self.cfg.cpu.handshake_flight_s, exchange, now);
                self.dclients[client - 1].state = DState::Open;
                self.client_progress(client, done);
            }
            FrameKind::AppDataResponse => {
                let Some(x) = exchange else { return };
                if self.exchanges[x].completed {
                    return;
                }
                // Encrypt of the request plus decrypt of the response.
                let done = self.charge_cpu(client, 2.0 * self.cfg.cpu.aead_s, Some(x), now);
                self.complete(x, done);
                let cs = &mut self.dclients[client - 1];
                cs.active = None;
                if let Some(next) = cs.queue.pop_front() {
                    cs.active = Some(next);
                    self.client_progress(client, done);
                }
            }
            FrameKind::CloseAlert => {
                self.dclients[client - 1].state = DState::Closed;
            }
            FrameKind::NoSession => {
                self.dclients[client - 1].state = DState::Closed;
                self.client_progress(client, now);
            }
            // Stale flights (duplicates, late arrivals) are ignored.
            _ => {}
        }
    }

    fn on_retry(&mut self, exchange: usize, attempt: u32, now: u64) {
        if self.exchanges[exchange].completed {
            return;
        }
        if attempt > self.cfg.link.max_retransmits {
            self.counts.abandoned += 1;
            self.exchanges[exchange].completed = true;
            if self.cfg.mode == Mode::DtlsPsk {
                let client = self.exchanges[exchange].client;
                let cs = &mut self.dclients[client - 1];
                if cs.active == Some(exchange) {
                    cs.active = cs.queue.pop_front();
                    if cs.active.is_some() {
                        self.client_progress(client, now);
                    }
                }
            }
            return;
        }
        let client = self.exchanges[exchange].client;
        match self.cfg.mode {
            Mode::Oscar => {
                self.counts.retransmissions += 1;
                let bytes = self.exchanges[exchange].request_bytes.clone();
                self.send_frame(client, SERVER, FrameKind::OscarRequest(bytes), Some(exchange), now);
                let backoff = self.rto_ns << attempt;
                self.push(now + backoff, EventKind::Retry { exchange, attempt: attempt + 1 });
            }
            Mode::DtlsPsk => {
                if self.dclients[client - 1].active == Some(exchange) {
                    self.counts.retransmissions += 1;
                    self.client_progress(client, now);
                    let backoff = self.rto_ns << attempt;
                    self.push(now + backoff, EventKind::Retry { exchange, attempt: attempt + 1 });
                } else {
                    // Still queued behind another exchange; check again later.
                    self.push(now + self.rto_ns, EventKind::Retry { exchange, attempt });
                }
            }
        }
    }

    fn on_resign(&mut self, now: u64) {
        if now >= self.duration_ns {
            return;
        }
        self.resign_counter += 1;
        let payload = self.representation(self.resign_counter);
        let producer = self.producer.as_mut().expect("oscar producer");
        let ops = producer.refresh_resource(RESOURCE_PATH, payload, now).expect("known path");
        self.counts.signatures += ops.sign as u64;
        self.charge_cpu(SERVER, self.cfg.cpu.sign_s, None, now);
        self.push(now + s_to_ns(self.cfg.beta_s), EventKind::Resign);
    }

    // ---- reporting ----------------------------------------------------------

    fn report(&mut self) -> MetricsReport {
        for node in 0..self.ledgers.len() {
            let busy = self.ledgers[node].radio_rx_ns + self.ledgers[node].radio_tx_ns;
            let (idle_rx, beacon_tx) = self.mac.idle_charges(busy, self.duration_ns, Some(node) == self.pan);
            self.ledgers[node].add_rx(idle_rx);
            self.ledgers[node].add_tx(beacon_tx);
        }

        let label = |i: usize| {
            if i == SERVER {
                "server".to_string()
            } else if Some(i) == self.pan {
                "pan".to_string()
            } else {
                Self::peer_name(i)
            }
        };
        let nodes: Vec<NodeEnergy> = self
            .ledgers
            .iter()
            .enumerate()
            .map(|(i, ledger)| NodeEnergy { label: label(i), energy: account_energy(ledger, self.duration_ns, &self.cfg.energy) })
            .collect();

        self.latencies.sort_unstable();
        let latency = LatencyStats::from_sorted_ns(&self.latencies);

        let e = &self.cfg.energy;
        let per_req: Vec<f64> = self
            .exchanges
            .iter()
            .filter(|x| x.latency_ns.is_some())
            .map(|x| {
                (ns_to_s(x.cl_tx_ns) * e.radio_tx_ma + ns_to_s(x.cl_rx_ns) * e.radio_rx_ma + ns_to_s(x.cl_cpu_ns) * e.cpu_active_ma)
                    * e.voltage_v
                    / 1000.0
            })
            .collect();
        let completed = per_req.len() as u64;
        let client_mean_j_per_req = if per_req.is_empty() { 0.0 } else { per_req.iter().sum::<f64>() / per_req.len() as f64 };

        MetricsReport {
            mode: self.cfg.mode,
            n_clients: self.cfg.n_clients,
            max_slots: self.cfg.max_slots,
            beta_s: self.cfg.beta_s,
            seed: self.cfg.rng_seed,
            nodes,
            client_mean_j_per_req,
            latency,
            counts: self.counts,
            completed_requests: completed,
        }
    }
}
