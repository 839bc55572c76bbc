//! Access secrets and per-response content-key derivation.
//!
//! An access secret `S` is a symmetric token scoped to a group of resource
//! paths; possession grants read capability. The content key protecting a
//! single response is derived as
//!
//! ```text
//! k = HKDF-SHA256(ikm = S, info = message_id_be ‖ sender_id)[..16]
//! ```
//!
//! so distinct (MessageID, senderID) pairs yield unrelated keys and a
//! replayed response fails decryption. Rotations carry a strictly
//! increasing epoch and travel as authority-signed objects suitable for an
//! idempotent PUT.

use crate::crypto::{self, SigningKey, VerifyingKey};
use crate::objsec::{self, CertificatePayload, ObjectKind, SecureObject};
use crate::suite::SUITE_ED25519_AESCCM8_HKDF;
use crate::wire::Reader;
use std::collections::BTreeMap;
use thiserror::Error;

pub const MIN_SECRET_LEN: usize = 16;
pub const MAX_SECRET_LEN: usize = 32;
pub const CONTENT_KEY_LEN: usize = crypto::AEAD_KEY_LEN;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KeymatError {
    #[error("secret length {0} outside [{MIN_SECRET_LEN}, {MAX_SECRET_LEN}]")]
    SecretLength(usize),
    #[error("no secret scopes resource {0}")]
    NoSecret(String),
    #[error("multiple secrets scope resource {0}")]
    AmbiguousScope(String),
    #[error("invalid key material")]
    KeyInvalid,
    #[error("certificate does not verify under any trust anchor")]
    UntrustedCertificate,
    #[error("malformed secret body: {0}")]
    Malformed(&'static str),
}

/// The token from which per-response content keys are derived.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccessSecret {
    key_id: u16,
    secret: Vec<u8>,
    resource_scope: Vec<String>,
    epoch: u64,
}

impl AccessSecret {
    pub fn new(key_id: u16, secret: Vec<u8>, resource_scope: Vec<String>, epoch: u64) -> Result<Self, KeymatError> {
        if secret.len() < MIN_SECRET_LEN || secret.len() > MAX_SECRET_LEN {
            return Err(KeymatError::SecretLength(secret.len()));
        }
        Ok(AccessSecret { key_id, secret, resource_scope, epoch })
    }

    pub fn key_id(&self) -> u16 {
        self.key_id
    }

    pub fn epoch(&self) -> u64 {
        self.epoch
    }

    pub fn secret(&self) -> &[u8] {
        &self.secret
    }

    pub fn resource_scope(&self) -> &[String] {
        &self.resource_scope
    }

    pub fn scopes_path(&self, path: &str) -> bool {
        self.resource_scope.iter().any(|p| p == path)
    }

    /// Body encoding used inside rotation objects.
    pub fn encode_body(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&self.key_id.to_be_bytes());
        out.extend_from_slice(&self.epoch.to_be_bytes());
        out.push(self.secret.len() as u8);
        out.extend_from_slice(&self.secret);
        out.push(self.resource_scope.len() as u8);
        for path in &self.resource_scope {
            out.push(path.len() as u8);
            out.extend_from_slice(path.as_bytes());
        }
        out
    }

    pub fn decode_body(bytes: &[u8]) -> Result<Self, KeymatError> {
        let mut r = Reader::new(bytes);
        let key_id = r.u16_be("key id").map_err(KeymatError::Malformed)?;
        let epoch = r.u64_be("epoch").map_err(KeymatError::Malformed)?;
        let secret_len = r.u8("secret length").map_err(KeymatError::Malformed)? as usize;
        let secret = r.bytes(secret_len, "secret").map_err(KeymatError::Malformed)?.to_vec();
        let scope_count = r.u8("scope count").map_err(KeymatError::Malformed)? as usize;
        let mut resource_scope = Vec::with_capacity(scope_count);
        for _ in 0..scope_count {
            let len = r.u8("path length").map_err(KeymatError::Malformed)? as usize;
            let path = std::str::from_utf8(r.bytes(len, "path").map_err(KeymatError::Malformed)?)
                .map_err(|_| KeymatError::Malformed("path not utf-8"))?
                .to_string();
            resource_scope.push(path);
        }
        if !r.is_empty() {
            return Err(KeymatError::Malformed("trailing bytes"));
        }
        AccessSecret::new(key_id, secret, resource_scope, epoch)
    }
}

/// Per-response symmetric key and the inputs it was derived from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContentKey {
    bytes: [u8; CONTENT_KEY_LEN],
    derived_from: (u16, u16, String),
}

impl ContentKey {
    pub fn bytes(&self) -> &[u8; CONTENT_KEY_LEN] {
        &self.bytes
    }

    /// (key_id, message_id, sender_id) this key was derived for.
    pub fn derived_from(&self) -> (u16, u16, &str) {
        (self.derived_from.0, self.derived_from.1, &self.derived_from.2)
    }
}

/// Derives the content key for one response: a pure function of the secret,
/// the request MessageID, and the sender identity.
pub fn derive_content_key(secret: &AccessSecret, message_id: u16, sender_id: &str) -> ContentKey {
    let mut info = Vec::with_capacity(2 + sender_id.len());
    info.extend_from_slice(&message_id.to_be_bytes());
    info.extend_from_slice(sender_id.as_bytes());
    let mut bytes = [0u8; CONTENT_KEY_LEN];
    crypto::hkdf_sha256(&secret.secret, &info, &mut bytes);
    ContentKey {
        bytes,
        derived_from: (secret.key_id, message_id, sender_id.to_string()),
    }
}

/// Builds the next rotation: same key id and scope, fresh secret bytes,
/// epoch incremented, signed by the authority. The result is the PUT
/// payload a producer will accept.
pub fn rotate_access_secret(
    old: &AccessSecret,
    new_secret: &[u8],
    authority_key: &SigningKey,
    authority_id: &str,
) -> Result<SecureObject, KeymatError> {
    let rotated = AccessSecret::new(old.key_id, new_secret.to_vec(), old.resource_scope.clone(), old.epoch + 1)?;
    objsec::sign_object_with(
        &rotated.encode_body(),
        authority_key,
        authority_id,
        SUITE_ED25519_AESCCM8_HKDF,
        rotated.key_id,
        ObjectKind::Signed,
    )
    .map_err(|_| KeymatError::KeyInvalid)
}

/// Finds the unique secret scoping `path`. Resource-to-secret lookup must
/// be a function; zero or several matches are errors.
pub fn lookup_secret_for_resource<'a>(store: &'a [AccessSecret], path: &str) -> Result<&'a AccessSecret, KeymatError> {
    let mut hits = store.iter().filter(|s| s.scopes_path(path));
    match (hits.next(), hits.next()) {
        (None, _) => Err(KeymatError::NoSecret(path.to_string())),
        (Some(s), None) => Ok(s),
        (Some(_), Some(_)) => Err(KeymatError::AmbiguousScope(path.to_string())),
    }
}

/// Trust anchors plus the certificates fetched under them. Every stored
/// certificate verifies under some anchor; insertion enforces it.
#[derive(Debug, Clone, Default)]
pub struct TrustStore {
    anchors: Vec<VerifyingKey>,
    certificates: BTreeMap<String, (SecureObject, CertificatePayload)>,
}

impl TrustStore {
    pub fn new() -> Self {
        TrustStore::default()
    }

    pub fn add_anchor(&mut self, anchor: VerifyingKey) {
        if !self.anchors.contains(&anchor) {
            self.anchors.push(anchor);
        }
    }

    pub fn anchors(&self) -> &[VerifyingKey] {
        &self.anchors
    }

    pub fn verifies_under_anchor(&self, obj: &SecureObject) -> bool {
        self.anchors.iter().any(|a| objsec::verify_object(obj, a))
    }

    pub fn add_certificate(&mut self, cert: SecureObject) -> Result<(), KeymatError> {
        if cert.kind != ObjectKind::Certificate {
            return Err(KeymatError::Malformed("not a certificate"));
        }
        if !self.verifies_under_anchor(&cert) {
            return Err(KeymatError::UntrustedCertificate);
        }
        let payload = CertificatePayload::decode(&cert.body).map_err(|_| KeymatError::Malformed("certificate body"))?;
        self.certificates.insert(payload.subject_id.clone(), (cert, payload));
        Ok(())
    }

    pub fn certificate(&self, subject_id: &str) -> Option<&(SecureObject, CertificatePayload)> {
        self.certificates.get(subject_id)
    }

    pub fn certificate_count(&self) -> usize {
        self.certificates.len()
    }
}
