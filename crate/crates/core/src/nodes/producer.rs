//! The producer: a constrained server holding pre-signed representations.
//!
//! Signing happens offline on the producer's own schedule
//! (`refresh_resource`); a GET is answered online with nothing more than a
//! key derivation and one AEAD pass over the cached signed object. The
//! producer keeps no per-consumer state beyond the bounded duplicate
//! window.

use crate::coap::{
    negotiate_suite, CoapMessage, Code, DuplicateWindow, MessageType, OPTION_ACCEPT_CIPHER, OPTION_URI_PATH,
};
use crate::crypto::{SigningKey, VerifyingKey};
use crate::keymat::{derive_content_key, lookup_secret_for_resource, AccessSecret, KeymatError};
use crate::objsec::{encrypt_object, sign_object, ObjectHeader, ObjectKind, SecureObject};
use crate::suite::SUITE_ED25519_AESCCM8_HKDF;
use std::collections::BTreeMap;
use thiserror::Error;

use super::CryptoOps;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProducerError {
    #[error("unknown resource path {0}")]
    UnknownPath(String),
    #[error("message is not a request this producer serves")]
    NotARequest,
    #[error("datagram did not decode as CoAP: {0}")]
    BadDatagram(crate::coap::CoapError),
    #[error("secret scope overlaps an existing secret")]
    ScopeOverlap,
    #[error(transparent)]
    Keymat(#[from] KeymatError),
    #[error("object error: {0}")]
    Object(#[from] crate::objsec::ObjectError),
}

/// Offline signing load: `mean_interval` is update period / resource count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResignConfig {
    pub mean_interval_s: f64,
    pub resource_count: u32,
    pub mean_update_s: f64,
}

impl ResignConfig {
    pub fn from_interval(mean_interval_s: f64, resource_count: u32) -> Self {
        ResignConfig {
            mean_interval_s,
            resource_count,
            mean_update_s: mean_interval_s * resource_count as f64,
        }
    }

    pub fn consistent(&self) -> bool {
        (self.mean_interval_s - self.mean_update_s / self.resource_count as f64).abs() < 1e-9
    }
}

#[derive(Debug, Clone)]
struct Resource {
    plaintext: Vec<u8>,
    signed: SecureObject,
    signed_bytes: Vec<u8>,
}

pub struct Producer {
    sender_id: String,
    signing_key: SigningKey,
    certificate: Option<SecureObject>,
    supported_suites: Vec<u8>,
    resign: ResignConfig,
    resources: BTreeMap<String, Resource>,
    secrets: Vec<AccessSecret>,
    anchors: Vec<VerifyingKey>,
    dup: DuplicateWindow,
    next_mid: u16,
}

impl Producer {
    pub fn new(sender_id: &str, signing_key: SigningKey, resign: ResignConfig) -> Self {
        Producer {
            sender_id: sender_id.to_string(),
            signing_key,
            certificate: None,
            supported_suites: vec![SUITE_ED25519_AESCCM8_HKDF],
            resign,
            resources: BTreeMap::new(),
            secrets: Vec::new(),
            anchors: Vec::new(),
            dup: DuplicateWindow::default(),
            next_mid: 0,
        }
    }

    pub fn sender_id(&self) -> &str {
        &self.sender_id
    }

    pub fn verifying_key(&self) -> VerifyingKey {
        self.signing_key.verifying_key()
    }

    pub fn set_certificate(&mut self, cert: SecureObject) {
        self.certificate = Some(cert);
    }

    pub fn certificate(&self) -> Option<&SecureObject> {
        self.certificate.as_ref()
    }

    pub fn set_supported_suites(&mut self, suites: Vec<u8>) {
        self.supported_suites = suites;
    }

    pub fn add_trust_anchor(&mut self, anchor: VerifyingKey) {
        self.anchors.push(anchor);
    }

    pub fn resign_config(&self) -> ResignConfig {
        self.resign
    }

    /// Installs an access secret. Scopes must partition: a path already
    /// scoped under a different key id is rejected.
    pub fn install_secret(&mut self, secret: AccessSecret) -> Result<(), ProducerError> {
        if self
            .secrets
            .iter()
            .any(|s| s.key_id() != secret.key_id() && s.resource_scope().iter().any(|p| secret.scopes_path(p)))
        {
            return Err(ProducerError::ScopeOverlap);
        }
        self.secrets.retain(|s| s.key_id() != secret.key_id());
        self.secrets.push(secret);
        Ok(())
    }

    pub fn secret_for_key_id(&self, key_id: u16) -> Option<&AccessSecret> {
        self.secrets.iter().find(|s| s.key_id() == key_id)
    }

    /// Registers a resource and signs its initial representation.
    pub fn add_resource(&mut self, path: &str, plaintext: Vec<u8>) -> Result<CryptoOps, ProducerError> {
        let signed = sign_object(&plaintext, &self.signing_key, &self.sender_id)?;
        let signed_bytes = signed.encode()?;
        self.resources.insert(path.to_string(), Resource { plaintext, signed, signed_bytes });
        Ok(CryptoOps { sign: 1, ..CryptoOps::default() })
    }

    /// Offline re-signing: replaces the cached signed object. No network
    /// activity; the only cost is one signature.
    pub fn refresh_resource(&mut self, path: &str, new_plaintext: Vec<u8>, _now_ns: u64) -> Result<CryptoOps, ProducerError> {
        if !self.resources.contains_key(path) {
            return Err(ProducerError::UnknownPath(path.to_string()));
        }
        let signed = sign_object(&new_plaintext, &self.signing_key, &self.sender_id)?;
        let signed_bytes = signed.encode()?;
        self.resources.insert(path.to_string(), Resource { plaintext: new_plaintext, signed, signed_bytes });
        Ok(CryptoOps { sign: 1, ..CryptoOps::default() })
    }

    pub fn signed_representation(&self, path: &str) -> Option<&SecureObject> {
        self.resources.get(path).map(|r| &r.signed)
    }

    pub fn plaintext(&self, path: &str) -> Option<&[u8]> {
        self.resources.get(path).map(|r| r.plaintext.as_slice())
    }

    /// Stored request contexts (the bounded duplicate window); the producer
    /// holds nothing else per peer.
    pub fn stored_context_count(&self) -> usize {
        self.dup.len()
    }

    /// Decodes and dispatches one datagram. Returns the encoded response.
    pub fn handle_datagram(&mut self, peer: &str, datagram: &[u8], now_ns: u64) -> Result<(Vec<u8>, CryptoOps), ProducerError> {
        let msg = CoapMessage::decode(datagram).map_err(ProducerError::BadDatagram)?;
        match msg.code {
            Code::Get => self.handle_get(peer, &msg, now_ns),
            Code::Put => self.handle_put_secret(peer, &msg, now_ns),
            _ => Err(ProducerError::NotARequest),
        }
    }

    /// Serves a GET: derives the content key from the request MessageID and
    /// this producer's identity, then encrypts the cached signed object.
    /// Duplicates are answered with the identical prior response before any
    /// key derivation happens.
    pub fn handle_get(&mut self, peer: &str, msg: &CoapMessage, now_ns: u64) -> Result<(Vec<u8>, CryptoOps), ProducerError> {
        if msg.code != Code::Get {
            return Err(ProducerError::NotARequest);
        }
        if self.dup.check_duplicate(peer, msg.message_id, now_ns) {
            if let Some(cached) = self.dup.cached_response(peer, msg.message_id, now_ns) {
                return Ok((cached.to_vec(), CryptoOps::default()));
            }
        }

        let suite = match msg.option(OPTION_ACCEPT_CIPHER) {
            Some(offered) => negotiate_suite(&self.supported_suites, offered),
            None => self.supported_suites.first().copied(),
        };
        let Some(suite) = suite else {
            return self.finish(peer, msg, self.error_response(msg, Code::NotAcceptable), CryptoOps::default());
        };

        if !msg.unknown_critical_options(&[OPTION_URI_PATH, OPTION_ACCEPT_CIPHER]).is_empty() {
            return self.finish(peer, msg, self.error_response(msg, Code::BadOption), CryptoOps::default());
        }

        let path = msg.uri_path();
        let Some(resource) = self.resources.get(&path) else {
            return self.finish(peer, msg, self.error_response(msg, Code::Unauthorized), CryptoOps::default());
        };
        let Ok(secret) = lookup_secret_for_resource(&self.secrets, &path) else {
            return self.finish(peer, msg, self.error_response(msg, Code::Unauthorized), CryptoOps::default());
        };

        let key = derive_content_key(secret, msg.message_id, &self.sender_id);
        let header = ObjectHeader::new(suite, &self.sender_id, secret.key_id(), Some(msg.message_id));
        let encrypted = encrypt_object(&resource.signed_bytes, &key, header)?;
        let ops = CryptoOps { prf: 1, aead: 1, ..CryptoOps::default() };

        let mut response = self.response_shell(msg, Code::Content);
        response.payload = encrypted.encode()?;
        self.finish(peer, msg, response, ops)
    }

    fn finish_changed(&mut self, peer: &str, msg: &CoapMessage, ops: CryptoOps) -> Result<(Vec<u8>, CryptoOps), ProducerError> {
        let response = self.response_shell(msg, Code::Changed);
        self.finish(peer, msg, response, ops)
    }

    /// Installs a rotated access secret carried as an authority-signed
    /// object in a PUT. Idempotent: re-applying the accepted epoch answers
    /// 2.04 without a state change; stale epochs and unknown signers answer
    /// 4.01.
    pub fn handle_put_secret(&mut self, peer: &str, msg: &CoapMessage, now_ns: u64) -> Result<(Vec<u8>, CryptoOps), ProducerError> {
        if msg.code != Code::Put {
            return Err(ProducerError::NotARequest);
        }
        if self.dup.check_duplicate(peer, msg.message_id, now_ns) {
            if let Some(cached) = self.dup.cached_response(peer, msg.message_id, now_ns) {
                return Ok((cached.to_vec(), CryptoOps::default()));
            }
        }

        let mut ops = CryptoOps::default();
        let obj = match SecureObject::decode(&msg.payload) {
            Ok(obj) if obj.kind == ObjectKind::Signed => obj,
            _ => return self.finish(peer, msg, self.error_response(msg, Code::BadOption), ops),
        };
        ops.verify = 1;
        if !self.anchors.iter().any(|a| crate::objsec::verify_object(&obj, a)) {
            return self.finish(peer, msg, self.error_response(msg, Code::Unauthorized), ops);
        }
        let Ok(incoming) = AccessSecret::decode_body(&obj.body) else {
            return self.finish(peer, msg, self.error_response(msg, Code::BadOption), ops);
        };

        let current = self.secret_for_key_id(incoming.key_id());
        let accept = match current {
            Some(cur) if incoming.epoch() > cur.epoch() => true,
            // Replaying the installed rotation is a no-op success.
            Some(cur) if incoming.epoch() == cur.epoch() && *cur == incoming => {
                return self.finish_changed(peer, msg, ops);
            }
            Some(_) => false,
            None => true,
        };
        if !accept {
            return self.finish(peer, msg, self.error_response(msg, Code::Unauthorized), ops);
        }
        if self.install_secret(incoming).is_err() {
            return self.finish(peer, msg, self.error_response(msg, Code::Unauthorized), ops);
        }
        self.finish_changed(peer, msg, ops)
    }

    fn response_shell(&mut self, req: &CoapMessage, code: Code) -> CoapMessage {
        let (mtype, mid) = match req.mtype {
            MessageType::Confirmable => (MessageType::Ack, req.message_id),
            _ => {
                self.next_mid = self.next_mid.wrapping_add(1);
                (MessageType::NonConfirmable, self.next_mid)
            }
        };
        CoapMessage::new(mtype, code, mid).with_token(req.token.clone())
    }

    fn error_response(&self, req: &CoapMessage, code: Code) -> CoapMessage {
        let (mtype, mid) = match req.mtype {
            MessageType::Confirmable => (MessageType::Ack, req.message_id),
            _ => (MessageType::NonConfirmable, req.message_id),
        };
        CoapMessage::new(mtype, code, mid).with_token(req.token.clone())
    }

    fn finish(
        &mut self,
        peer: &str,
        req: &CoapMessage,
        response: CoapMessage,
        ops: CryptoOps,
    ) -> Result<(Vec<u8>, CryptoOps), ProducerError> {
        let bytes = response.encode().map_err(ProducerError::BadDatagram)?;
        self.dup.record_response(peer, req.message_id, bytes.clone());
        Ok((bytes, ops))
    }
}
