//! The consumer: fetches, decrypts, and verifies secured content.
//!
//! A consumer never exposes a decrypted payload whose nested signature did
//! not verify against a certificate from its trust store, and never trusts
//! content beyond what the signer's certified capabilities allow for the
//! requested path.

use crate::coap::{make_accept_cipher_option, CoapMessage, Code, MessageType};
use crate::keymat::{derive_content_key, lookup_secret_for_resource, AccessSecret, TrustStore};
use crate::objsec::{decrypt_object, verify_object, ObjectKind, SecureObject};
use crate::suite::SUITE_ED25519_AESCCM8_HKDF;
use std::collections::BTreeMap;
use thiserror::Error;

use super::CryptoOps;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConsumerError {
    #[error("no secret scopes {0}; fetch a grant first")]
    NoSecret(String),
    #[error("decryption or replay failure")]
    AuthFailure,
    #[error("no certificate for signer {0}")]
    UnknownSigner(String),
    #[error("signer certificate outside validity window")]
    CertificateExpired,
    #[error("signer lacks capability {required} for {path}")]
    CapabilityMismatch { path: String, required: String },
    #[error("server answered {0}")]
    ErrorResponse(String),
}

/// Path-prefix to required-capability rules; the longest matching prefix
/// wins.
#[derive(Debug, Clone, Default)]
pub struct CapabilityPolicy {
    rules: Vec<(String, String)>,
}

impl CapabilityPolicy {
    pub fn new() -> Self {
        CapabilityPolicy::default()
    }

    pub fn require(&mut self, path_prefix: &str, capability: &str) {
        self.rules.push((path_prefix.to_string(), capability.to_string()));
    }

    pub fn required_for(&self, path: &str) -> Option<&str> {
        self.rules
            .iter()
            .filter(|(prefix, _)| path == prefix || path.starts_with(&format!("{prefix}/")))
            .max_by_key(|(prefix, _)| prefix.len())
            .map(|(_, cap)| cap.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PendingRequest {
    pub path: String,
    pub message_id: u16,
    pub sent_at_ns: u64,
}

pub struct Consumer {
    principal: String,
    suites: Vec<u8>,
    secrets: Vec<AccessSecret>,
    trust: TrustStore,
    policy: CapabilityPolicy,
    pending: BTreeMap<Vec<u8>, PendingRequest>,
    next_mid: u16,
    next_token: u32,
}

impl Consumer {
    pub fn new(principal: &str, policy: CapabilityPolicy) -> Self {
        Consumer {
            principal: principal.to_string(),
            suites: vec![SUITE_ED25519_AESCCM8_HKDF],
            secrets: Vec::new(),
            trust: TrustStore::new(),
            policy,
            pending: BTreeMap::new(),
            next_mid: 0,
            next_token: 0,
        }
    }

    pub fn principal(&self) -> &str {
        &self.principal
    }

    pub fn set_suites(&mut self, suites: Vec<u8>) {
        self.suites = suites;
    }

    pub fn trust_store(&self) -> &TrustStore {
        &self.trust
    }

    pub fn trust_store_mut(&mut self) -> &mut TrustStore {
        &mut self.trust
    }

    /// Installs a secret, keeping only the highest epoch per key id.
    pub fn install_secret(&mut self, secret: AccessSecret) {
        match self.secrets.iter_mut().find(|s| s.key_id() == secret.key_id()) {
            Some(existing) if existing.epoch() >= secret.epoch() => {}
            Some(existing) => *existing = secret,
            None => self.secrets.push(secret),
        }
    }

    pub fn has_secret_for(&self, path: &str) -> bool {
        lookup_secret_for_resource(&self.secrets, path).is_ok()
    }

    /// For test harnesses that model an adversary holding every secret.
    pub fn secrets(&self) -> &[AccessSecret] {
        &self.secrets
    }

    /// Builds a Confirmable GET with this consumer's Accept-cipher
    /// preferences. Fails before any network send when no secret scopes the
    /// path. MessageIDs increment per request modulo 2^16.
    pub fn request(&mut self, path: &str, now_ns: u64) -> Result<(Vec<u8>, PendingRequest), ConsumerError> {
        if lookup_secret_for_resource(&self.secrets, path).is_err() {
            return Err(ConsumerError::NoSecret(path.to_string()));
        }
        let message_id = self.next_mid;
        self.next_mid = self.next_mid.wrapping_add(1);
        self.next_token = self.next_token.wrapping_add(1);
        let token = self.next_token.to_be_bytes().to_vec();

        let mut msg = CoapMessage::new(MessageType::Confirmable, Code::Get, message_id).with_token(token.clone());
        msg.add_uri_path(path);
        let accept = make_accept_cipher_option(&self.suites).map_err(|_| ConsumerError::NoSecret(path.into()))?;
        msg.add_option(accept.number, accept.value);

        let pending = PendingRequest { path: path.to_string(), message_id, sent_at_ns: now_ns };
        self.pending.insert(token, pending.clone());
        let bytes = msg.encode().expect("request construction is well-formed");
        Ok((bytes, pending))
    }

    /// Used by drivers to re-send the identical request on retransmission.
    pub fn pending_count(&self) -> usize {
        self.pending.len()
    }

    /// Processes a response: derive the key from the *request's* MessageID
    /// and the sender identity in the object header, decrypt, decode the
    /// nested signed object, verify it against the signer's certificate,
    /// then check validity window and capability policy. Returns the inner
    /// payload.
    pub fn accept_response(&mut self, response: &CoapMessage, now_ns: u64) -> Result<(Vec<u8>, CryptoOps), ConsumerError> {
        let Some(pending) = self.pending.get(&response.token).cloned() else {
            // No live request context: a re-delivered response for an
            // already-consumed exchange is treated as replay.
            return Err(ConsumerError::AuthFailure);
        };
        if response.code != Code::Content {
            return Err(ConsumerError::ErrorResponse(response.code.dotted()));
        }

        let mut ops = CryptoOps::default();
        let obj = SecureObject::decode(&response.payload).map_err(|_| ConsumerError::AuthFailure)?;
        if obj.kind != ObjectKind::Encrypted {
            return Err(ConsumerError::AuthFailure);
        }
        let sender_id = obj.header.signer_or_sender_id.clone();
        let secret = self
            .secrets
            .iter()
            .find(|s| s.key_id() == obj.header.key_id)
            .ok_or_else(|| ConsumerError::NoSecret(pending.path.clone()))?;

        let key = derive_content_key(secret, pending.message_id, &sender_id);
        ops.prf += 1;
        ops.aead += 1;
        let plaintext = decrypt_object(&obj, &key).map_err(|_| ConsumerError::AuthFailure)?;

        let nested = SecureObject::decode_nested(&plaintext, 2).map_err(|_| ConsumerError::AuthFailure)?;
        if nested.kind != ObjectKind::Signed {
            return Err(ConsumerError::AuthFailure);
        }
        let signer = nested.header.signer_or_sender_id.clone();
        let Some((_, cert_payload)) = self.trust.certificate(&signer) else {
            return Err(ConsumerError::UnknownSigner(signer));
        };
        let signer_key = crate::crypto::VerifyingKey::from_bytes(&cert_payload.public_key)
            .map_err(|_| ConsumerError::UnknownSigner(signer.clone()))?;
        ops.verify += 1;
        if !verify_object(&nested, &signer_key) {
            return Err(ConsumerError::AuthFailure);
        }
        if !cert_payload.valid_at(now_ns / 1_000_000_000) {
            return Err(ConsumerError::CertificateExpired);
        }
        if let Some(required) = self.policy.required_for(&pending.path) {
            if !cert_payload.capabilities.iter().any(|c| c == required) {
                return Err(ConsumerError::CapabilityMismatch {
                    path: pending.path.clone(),
                    required: required.to_string(),
                });
            }
        }

        self.pending.remove(&response.token);
        Ok((nested.body, ops))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coap::OPTION_ACCEPT_CIPHER;

    fn consumer_with_secret() -> Consumer {
        let mut c = Consumer::new("alice", CapabilityPolicy::new());
        c.install_secret(AccessSecret::new(1, vec![9; 16], vec!["/temp".into()], 1).unwrap());
        c
    }

    #[test]
    fn request_carries_accept_cipher() {
        let mut c = consumer_with_secret();
        let (bytes, pending) = c.request("/temp", 0).unwrap();
        let msg = CoapMessage::decode(&bytes).unwrap();
        assert_eq!(msg.code, Code::Get);
        assert_eq!(msg.mtype, MessageType::Confirmable);
        assert_eq!(msg.uri_path(), "/temp");
        assert_eq!(msg.option(OPTION_ACCEPT_CIPHER), Some([SUITE_ED25519_AESCCM8_HKDF].as_slice()));
        assert_eq!(pending.message_id, msg.message_id);
    }

    #[test]
    fn no_secret_fails_before_send() {
        let mut c = Consumer::new("alice", CapabilityPolicy::new());
        assert!(matches!(c.request("/temp", 0), Err(ConsumerError::NoSecret(_))));
        assert_eq!(c.pending_count(), 0);
    }

    #[test]
    fn message_id_wraps_modulo_u16() {
        let mut c = consumer_with_secret();
        c.next_mid = 65535;
        let (_, p1) = c.request("/temp", 0).unwrap();
        let (_, p2) = c.request("/temp", 0).unwrap();
        assert_eq!(p1.message_id, 65535);
        assert_eq!(p2.message_id, 0);
    }

    #[test]
    fn policy_longest_prefix_wins() {
        let mut policy = CapabilityPolicy::new();
        policy.require("/s", "any-sensor");
        policy.require("/s/temp", "temperature-sensor");
        assert_eq!(policy.required_for("/s/temp"), Some("temperature-sensor"));
        assert_eq!(policy.required_for("/s/temp/1"), Some("temperature-sensor"));
        assert_eq!(policy.required_for("/s/hum"), Some("any-sensor"));
        assert_eq!(policy.required_for("/stemp"), None);
        assert_eq!(policy.required_for("/other"), None);
    }

    #[test]
    fn higher_epoch_replaces_lower() {
        let mut c = consumer_with_secret();
        c.install_secret(AccessSecret::new(1, vec![8; 16], vec!["/temp".into()], 5).unwrap());
        assert_eq!(c.secrets()[0].epoch(), 5);
        c.install_secret(AccessSecret::new(1, vec![7; 16], vec!["/temp".into()], 2).unwrap());
        assert_eq!(c.secrets()[0].epoch(), 5);
    }
}
