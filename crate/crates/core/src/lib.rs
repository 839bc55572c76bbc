//! Object security for constrained RESTful environments.
//!
//! Instead of securing a transport channel, this crate protects the content
//! itself: resource representations are signed offline by their producer and
//! encrypted per response under a key derived from a shared *access secret*,
//! the CoAP MessageID of the request, and the sender identity. A replayed
//! response decrypts under the wrong key and is rejected without any
//! per-consumer state on the server.
//!
//! Module map:
//!
//! - [`objsec`] — the secured object container: canonical TLV encoding,
//!   signing, verification, AEAD encryption, certificates, and nesting of a
//!   signed object inside an encrypted one.
//! - [`keymat`] — access secrets, per-response content-key derivation, and
//!   the trust store shared by all roles.
//! - [`coap`] — a minimal RFC 7252 message codec, MessageID duplicate
//!   detection, and the Accept-cipher negotiation option.
//! - [`nodes`] — deterministic state machines for the producer, consumer,
//!   and authorization-server roles, plus the DTLS-PSK baseline session
//!   table with LRU closure used as a comparison point.
//! - [`crypto`] — the primitive layer (Ed25519, AES-128-CCM-8, HKDF-SHA256)
//!   behind the registered suite table in [`suite`].

pub mod coap;
pub mod crypto;
pub mod keymat;
pub mod nodes;
pub mod objsec;
pub mod suite;

mod wire;
