//! Protocol roles as deterministic state machines.
//!
//! Each role maps `(state, input, now) -> (state', outputs)` with no
//! internal threads or timers; the harness (the simulator, or a datagram
//! socket driver) owns the event loop and the clock. Times are nanoseconds
//! from an arbitrary epoch. Handlers report the crypto work they performed
//! via [`CryptoOps`] so an energy model can charge configured CPU times.

mod authz;
mod consumer;
mod dtls;
mod producer;

pub use authz::{AuthzError, AuthzServer, Grant};
pub use consumer::{CapabilityPolicy, Consumer, ConsumerError, PendingRequest};
pub use dtls::{DtlsAction, DtlsEvent, DtlsSessionTable, SessionSlot};
pub use producer::{Producer, ProducerError, ResignConfig};

/// Count of primitive crypto operations a handler executed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CryptoOps {
    pub sign: u32,
    pub verify: u32,
    pub aead: u32,
    pub prf: u32,
}

impl CryptoOps {
    pub fn merge(mut self, other: CryptoOps) -> CryptoOps {
        self.sign += other.sign;
        self.verify += other.verify;
        self.aead += other.aead;
        self.prf += other.prf;
        self
    }
}
