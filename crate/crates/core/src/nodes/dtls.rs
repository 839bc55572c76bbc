//! DTLS-PSK baseline: a fixed-slot session table with LRU closure.
//!
//! The handshake is modeled at flight granularity. A new client first
//! proves liveness by echoing the stateless cookie; only then, if the table
//! is full, does the server send a closing alert to the least recently used
//! session, free the slot, and proceed immediately. Ties break toward the
//! lowest slot index. A ClientHello without a valid cookie never evicts
//! anything.

use crate::crypto::sha256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionSlot {
    pub peer: String,
    pub last_used_ns: u64,
    pub established: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DtlsEvent {
    /// Flight 1 (`cookie: None`) or flight 3 (`cookie: Some`).
    ClientHello { peer: String, cookie: Option<u64> },
    /// Flight 5: ClientKeyExchange / ChangeCipherSpec / Finished.
    HandshakeContinue { peer: String },
    AppData { peer: String },
    Timeout { peer: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DtlsAction {
    /// Flight 2.
    SendHelloVerify { peer: String, cookie: u64 },
    /// Closing alert to the evicted LRU peer.
    SendCloseAlert { peer: String },
    /// Flight 4: ServerHello .. ServerHelloDone.
    SendServerHelloFlight { peer: String },
    /// Flight 6: ChangeCipherSpec / Finished; session established.
    SendFinishedFlight { peer: String },
    /// Alert for traffic on a session this server no longer holds.
    SendNoSession { peer: String },
}

#[derive(Debug, Clone)]
pub struct DtlsSessionTable {
    max_slots: usize,
    slots: Vec<Option<SessionSlot>>,
    cookie_salt: u64,
}

impl DtlsSessionTable {
    pub fn new(max_slots: usize) -> Self {
        DtlsSessionTable { max_slots, slots: vec![None; max_slots], cookie_salt: 0 }
    }

    pub fn with_cookie_salt(max_slots: usize, cookie_salt: u64) -> Self {
        DtlsSessionTable { max_slots, slots: vec![None; max_slots], cookie_salt }
    }

    pub fn max_slots(&self) -> usize {
        self.max_slots
    }

    pub fn slots(&self) -> &[Option<SessionSlot>] {
        &self.slots
    }

    pub fn established_count(&self) -> usize {
        self.slots.iter().flatten().filter(|s| s.established).count()
    }

    pub fn occupied_count(&self) -> usize {
        self.slots.iter().flatten().count()
    }

    pub fn has_established(&self, peer: &str) -> bool {
        self.slots.iter().flatten().any(|s| s.peer == peer && s.established)
    }

    /// Stateless cookie: recomputed, never stored.
    pub fn cookie_for(&self, peer: &str) -> u64 {
        let mut input = self.cookie_salt.to_be_bytes().to_vec();
        input.extend_from_slice(peer.as_bytes());
        let digest = sha256(&input);
        u64::from_be_bytes(digest[..8].try_into().unwrap())
    }

    fn slot_index(&self, peer: &str) -> Option<usize> {
        self.slots.iter().position(|s| s.as_ref().is_some_and(|s| s.peer == peer))
    }

    /// argmin over last_used_ns, ties to the lowest index.
    fn lru_index(&self) -> Option<usize> {
        self.slots
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.as_ref().map(|s| (i, s.last_used_ns)))
            .min_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)))
            .map(|(i, _)| i)
    }

    pub fn handle(&mut self, event: DtlsEvent, now_ns: u64) -> Vec<DtlsAction> {
        match event {
            DtlsEvent::ClientHello { peer, cookie: None } => {
                // Stateless: answer with the verify request, allocate nothing.
                vec![DtlsAction::SendHelloVerify { cookie: self.cookie_for(&peer), peer }]
            }
            DtlsEvent::ClientHello { peer, cookie: Some(cookie) } => {
                if cookie != self.cookie_for(&peer) {
                    // Bogus cookie echoes are dropped silently.
                    return Vec::new();
                }
                let mut actions = Vec::new();
                let idx = match self.slot_index(&peer) {
                    Some(idx) => idx,
                    None => match self.slots.iter().position(Option::is_none) {
                        Some(idx) => idx,
                        None => {
                            // Good intentions demonstrated: close the LRU
                            // session and proceed immediately.
                            let idx = self.lru_index().expect("table is full");
                            let victim = self.slots[idx].take().expect("occupied");
                            actions.push(DtlsAction::SendCloseAlert { peer: victim.peer });
                            idx
                        }
                    },
                };
                self.slots[idx] = Some(SessionSlot { peer: peer.clone(), last_used_ns: now_ns, established: false });
                actions.push(DtlsAction::SendServerHelloFlight { peer });
                actions
            }
            DtlsEvent::HandshakeContinue { peer } => match self.slot_index(&peer) {
                Some(idx) => {
                    let slot = self.slots[idx].as_mut().expect("occupied");
                    slot.established = true;
                    slot.last_used_ns = now_ns;
                    vec![DtlsAction::SendFinishedFlight { peer }]
                }
                None => vec![DtlsAction::SendNoSession { peer }],
            },
            DtlsEvent::AppData { peer } => match self.slot_index(&peer) {
                Some(idx) if self.slots[idx].as_ref().expect("occupied").established => {
                    self.slots[idx].as_mut().expect("occupied").last_used_ns = now_ns;
                    Vec::new()
                }
                _ => vec![DtlsAction::SendNoSession { peer }],
            },
            DtlsEvent::Timeout { peer } => {
                // Abandoned half-open handshake: free the slot.
                if let Some(idx) = self.slot_index(&peer) {
                    if !self.slots[idx].as_ref().expect("occupied").established {
                        self.slots[idx] = None;
                    }
                }
                Vec::new()
            }
        }
    }
}
