//! Minimal CoAP layer: the RFC 7252 subset this architecture needs.
//!
//! Covers the 4-byte header, tokens, delta-encoded options, and payload
//! framing for the codes used by the roles, plus MessageID duplicate
//! detection and the experimental Accept-cipher option that carries suite
//! preferences in GET requests. No block-wise transfer, no Observe.

mod codec;
mod dedup;

pub use codec::{
    make_accept_cipher_option, negotiate_suite, CoapError, CoapMessage, CoapOption, Code, MessageType,
    MAX_ACCEPT_CIPHER_SUITES, MAX_TOKEN_LEN, OPTION_ACCEPT_CIPHER, OPTION_URI_PATH,
};
pub use dedup::{DuplicateWindow, DEFAULT_DUP_SPAN_NS, DUP_WINDOW_CAPACITY};
