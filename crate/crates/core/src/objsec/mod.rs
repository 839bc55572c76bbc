//! Secured content objects.
//!
//! A [`SecureObject`] is a tagged envelope in a fixed-order TLV encoding:
//!
//! ```text
//! ┌─────────┬──────┬───────┬────────┬────┬────────┬───────────┬──────────┬──────┬───────┐
//! │ version │ kind │ suite │ id_len │ id │ key_id │ [msg_id]  │ body_len │ body │ auth  │
//! │   1 B   │ 1 B  │  1 B  │  1 B   │ ≤32│  2 B   │ 2 B (enc) │   2 B    │  ..  │ rest  │
//! └─────────┴──────┴───────┴────────┴────┴────────┴───────────┴──────────┴──────┴───────┘
//! ```
//!
//! `auth` is a signature for `Signed`/`Certificate` kinds and the AEAD tag
//! for `Encrypted`. The `msg_id` field is present only on `Encrypted`
//! objects and binds the ciphertext to the CoAP MessageID whose derived key
//! protects it. Signatures cover the full header and body (the encoding
//! minus `auth`), so a signer identity cannot be swapped after the fact.
//!
//! The encoding is canonical: decoding accepts exactly one byte string per
//! object and re-encoding a decoded object reproduces the input.
//!
//! Encrypted bodies may carry a nested encoded `Signed` object; explicit
//! unwrapping is depth-limited by [`MAX_NESTING_DEPTH`].

mod cert;

pub use cert::{issue_certificate, CertificatePayload};

use crate::crypto::{self, SigningKey, VerifyingKey, AEAD_KEY_LEN, AEAD_NONCE_LEN};
use crate::keymat::ContentKey;
use crate::suite::SUITE_ED25519_AESCCM8_HKDF;
use crate::wire::Reader;
use thiserror::Error;

pub const FORMAT_VERSION: u8 = 1;
/// Maximum depth of explicitly unwrapped object nesting.
pub const MAX_NESTING_DEPTH: usize = 4;
pub const MAX_BODY_LEN: usize = u16::MAX as usize;
pub const MAX_ID_LEN: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ObjectError {
    #[error("malformed object: {0}")]
    Malformed(&'static str),
    #[error("body exceeds {MAX_BODY_LEN} bytes")]
    OversizeBody,
    #[error("object nesting exceeds depth {MAX_NESTING_DEPTH}")]
    NestingTooDeep,
    #[error("invalid key material")]
    KeyInvalid,
    #[error("certificate validity window is not well-ordered")]
    ValidityInverted,
    #[error("authenticated decryption failed")]
    AuthFailure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectKind {
    Signed,
    Encrypted,
    Certificate,
}

impl ObjectKind {
    fn to_byte(self) -> u8 {
        match self {
            ObjectKind::Signed => 0,
            ObjectKind::Encrypted => 1,
            ObjectKind::Certificate => 2,
        }
    }

    fn from_byte(b: u8) -> Result<Self, ObjectError> {
        match b {
            0 => Ok(ObjectKind::Signed),
            1 => Ok(ObjectKind::Encrypted),
            2 => Ok(ObjectKind::Certificate),
            _ => Err(ObjectError::Malformed("unknown kind")),
        }
    }
}

/// Header fields covered by the signature / AEAD associated data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectHeader {
    pub version: u8,
    pub cipher_suite_id: u8,
    /// Identity of the signer (signed kinds) or sender (encrypted kind).
    pub signer_or_sender_id: String,
    /// Identifier of the access secret in force.
    pub key_id: u16,
    /// CoAP MessageID the content key was derived for; `Encrypted` only.
    pub binding_message_id: Option<u16>,
}

impl ObjectHeader {
    pub fn new(cipher_suite_id: u8, id: &str, key_id: u16, binding_message_id: Option<u16>) -> Self {
        ObjectHeader {
            version: FORMAT_VERSION,
            cipher_suite_id,
            signer_or_sender_id: id.to_string(),
            key_id,
            binding_message_id,
        }
    }

    fn validate(&self, kind: ObjectKind) -> Result<(), ObjectError> {
        let id = self.signer_or_sender_id.as_bytes();
        if id.is_empty() || id.len() > MAX_ID_LEN {
            return Err(ObjectError::Malformed("identity length out of range"));
        }
        match (kind, self.binding_message_id) {
            (ObjectKind::Encrypted, None) => Err(ObjectError::Malformed("encrypted object without message binding")),
            (ObjectKind::Signed | ObjectKind::Certificate, Some(_)) => {
                Err(ObjectError::Malformed("message binding on a signed kind"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecureObject {
    pub kind: ObjectKind,
    pub header: ObjectHeader,
    /// Payload bytes, ciphertext, or a nested encoded object.
    pub body: Vec<u8>,
    /// Signature or AEAD tag, per kind.
    pub auth: Vec<u8>,
}

impl SecureObject {
    /// Canonical encoding.
    pub fn encode(&self) -> Result<Vec<u8>, ObjectError> {
        self.header.validate(self.kind)?;
        if self.body.len() > MAX_BODY_LEN {
            return Err(ObjectError::OversizeBody);
        }
        let mut out = self.preamble();
        out.extend_from_slice(&(self.body.len() as u16).to_be_bytes());
        out.extend_from_slice(&self.body);
        out.extend_from_slice(&self.auth);
        Ok(out)
    }

    /// Header fields alone: everything before the body length. Used as the
    /// AEAD associated data so the ciphertext is bound to its header.
    fn preamble(&self) -> Vec<u8> {
        let id = self.header.signer_or_sender_id.as_bytes();
        let mut out = Vec::with_capacity(10 + id.len());
        out.push(self.header.version);
        out.push(self.kind.to_byte());
        out.push(self.header.cipher_suite_id);
        out.push(id.len() as u8);
        out.extend_from_slice(id);
        out.extend_from_slice(&self.header.key_id.to_be_bytes());
        if self.kind == ObjectKind::Encrypted {
            let mid = self.header.binding_message_id.expect("validated");
            out.extend_from_slice(&mid.to_be_bytes());
        }
        out
    }

    /// The bytes a signature covers: header and body, i.e. the encoding
    /// without `auth`.
    pub fn signing_input(&self) -> Result<Vec<u8>, ObjectError> {
        self.header.validate(self.kind)?;
        if self.body.len() > MAX_BODY_LEN {
            return Err(ObjectError::OversizeBody);
        }
        let mut out = self.preamble();
        out.extend_from_slice(&(self.body.len() as u16).to_be_bytes());
        out.extend_from_slice(&self.body);
        Ok(out)
    }

    /// Decodes a top-level object.
    pub fn decode(bytes: &[u8]) -> Result<Self, ObjectError> {
        Self::decode_nested(bytes, 1)
    }

    /// Decodes an object found `depth` levels deep (the top level is 1).
    /// Callers unwrapping nested bodies pass their current depth plus one.
    pub fn decode_nested(bytes: &[u8], depth: usize) -> Result<Self, ObjectError> {
        if depth > MAX_NESTING_DEPTH {
            return Err(ObjectError::NestingTooDeep);
        }
        let mut r = Reader::new(bytes);
        let version = r.u8("version").map_err(ObjectError::Malformed)?;
        if version != FORMAT_VERSION {
            return Err(ObjectError::Malformed("unknown version"));
        }
        let kind = ObjectKind::from_byte(r.u8("kind").map_err(ObjectError::Malformed)?)?;
        let cipher_suite_id = r.u8("cipher suite").map_err(ObjectError::Malformed)?;
        let id_len = r.u8("id length").map_err(ObjectError::Malformed)? as usize;
        if id_len == 0 || id_len > MAX_ID_LEN {
            return Err(ObjectError::Malformed("identity length out of range"));
        }
        let id_bytes = r.bytes(id_len, "identity").map_err(ObjectError::Malformed)?;
        let signer_or_sender_id = std::str::from_utf8(id_bytes)
            .map_err(|_| ObjectError::Malformed("identity not utf-8"))?
            .to_string();
        let key_id = r.u16_be("key id").map_err(ObjectError::Malformed)?;
        let binding_message_id = if kind == ObjectKind::Encrypted {
            Some(r.u16_be("message binding").map_err(ObjectError::Malformed)?)
        } else {
            None
        };
        let body_len = r.u16_be("body length").map_err(ObjectError::Malformed)? as usize;
        let body = r.bytes(body_len, "body").map_err(ObjectError::Malformed)?.to_vec();
        let auth = r.take_rest().to_vec();

        if kind == ObjectKind::Certificate {
            // A certificate body must parse as a certificate payload.
            CertificatePayload::decode(&body)?;
        }

        Ok(SecureObject {
            kind,
            header: ObjectHeader {
                version,
                cipher_suite_id,
                signer_or_sender_id,
                key_id,
                binding_message_id,
            },
            body,
            auth,
        })
    }
}

/// Signs `payload` into a `Signed` object under the default suite.
pub fn sign_object(payload: &[u8], signing_key: &SigningKey, signer_id: &str) -> Result<SecureObject, ObjectError> {
    sign_object_with(payload, signing_key, signer_id, SUITE_ED25519_AESCCM8_HKDF, 0, ObjectKind::Signed)
}

/// Signing with explicit suite, key id, and kind (`Signed` or
/// `Certificate`).
pub fn sign_object_with(
    payload: &[u8],
    signing_key: &SigningKey,
    signer_id: &str,
    cipher_suite_id: u8,
    key_id: u16,
    kind: ObjectKind,
) -> Result<SecureObject, ObjectError> {
    if kind == ObjectKind::Encrypted {
        return Err(ObjectError::Malformed("cannot sign an encrypted kind"));
    }
    let mut obj = SecureObject {
        kind,
        header: ObjectHeader::new(cipher_suite_id, signer_id, key_id, None),
        body: payload.to_vec(),
        auth: Vec::new(),
    };
    let input = obj.signing_input()?;
    obj.auth = signing_key.sign(&input);
    Ok(obj)
}

/// True iff `auth` is a valid signature by `public_key` over header ‖ body.
/// Returns false (never errors) on any mismatch or on a non-signed kind.
pub fn verify_object(obj: &SecureObject, public_key: &VerifyingKey) -> bool {
    if obj.kind == ObjectKind::Encrypted {
        return false;
    }
    match obj.signing_input() {
        Ok(input) => public_key.verify(&input, &obj.auth),
        Err(_) => false,
    }
}

/// AEAD nonce: truncated hash of (key_id ‖ senderID ‖ binding_message_id).
/// Each derived key protects at most one response per MessageID per sender,
/// so the nonce never repeats under one key.
fn aead_nonce(header: &ObjectHeader) -> [u8; AEAD_NONCE_LEN] {
    let mut input = Vec::with_capacity(4 + header.signer_or_sender_id.len());
    input.extend_from_slice(&header.key_id.to_be_bytes());
    input.extend_from_slice(header.signer_or_sender_id.as_bytes());
    input.extend_from_slice(&header.binding_message_id.unwrap_or(0).to_be_bytes());
    let digest = crypto::sha256(&input);
    let mut nonce = [0u8; AEAD_NONCE_LEN];
    nonce.copy_from_slice(&digest[..AEAD_NONCE_LEN]);
    nonce
}

/// Encrypts `plaintext` into an `Encrypted` object. The header (which
/// carries the MessageID binding) doubles as associated data, so decryption
/// with the same key under a mutated header fails.
pub fn encrypt_object(plaintext: &[u8], content_key: &ContentKey, header: ObjectHeader) -> Result<SecureObject, ObjectError> {
    header.validate(ObjectKind::Encrypted)?;
    if plaintext.len() > MAX_BODY_LEN {
        return Err(ObjectError::OversizeBody);
    }
    let mut obj = SecureObject {
        kind: ObjectKind::Encrypted,
        header,
        body: Vec::new(),
        auth: Vec::new(),
    };
    let aad = obj.preamble();
    let nonce = aead_nonce(&obj.header);
    let key: &[u8; AEAD_KEY_LEN] = content_key.bytes();
    let mut sealed = crypto::aead_seal(key, &nonce, &aad, plaintext);
    let tag = sealed.split_off(sealed.len() - crypto::AEAD_TAG_LEN);
    obj.body = sealed;
    obj.auth = tag;
    Ok(obj)
}

/// Decrypts an `Encrypted` object; the plaintext may itself decode as a
/// nested `Signed` object.
pub fn decrypt_object(obj: &SecureObject, content_key: &ContentKey) -> Result<Vec<u8>, ObjectError> {
    if obj.kind != ObjectKind::Encrypted {
        return Err(ObjectError::Malformed("not an encrypted object"));
    }
    obj.header.validate(obj.kind)?;
    let aad = obj.preamble();
    let nonce = aead_nonce(&obj.header);
    let mut sealed = obj.body.clone();
    sealed.extend_from_slice(&obj.auth);
    crypto::aead_open(content_key.bytes(), &nonce, &aad, &sealed).map_err(|_| ObjectError::AuthFailure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keymat::{derive_content_key, AccessSecret};

    fn key() -> SigningKey {
        SigningKey::from_seed(&[3u8; 32])
    }

    fn secret() -> AccessSecret {
        AccessSecret::new(7, vec![0x11; 16], vec!["/temp".into()], 1).unwrap()
    }

    #[test]
    fn signed_empty_body_layout() {
        let obj = sign_object(b"", &key(), "x").unwrap();
        let bytes = obj.encode().unwrap();
        // Fixed header fields total 8 bytes; the 1-byte id and 64-byte
        // signature are extra, the empty body contributes nothing.
        let (fixed, id_len, sig_len) = (8, 1, 64);
        assert_eq!(bytes.len(), fixed + id_len + sig_len);
        assert_eq!(SecureObject::decode(&bytes).unwrap(), obj);
    }

    #[test]
    fn decode_rejects_degenerate_inputs() {
        assert_eq!(SecureObject::decode(b"").unwrap_err(), ObjectError::Malformed("version"));
        let obj = sign_object(b"payload", &key(), "prod-01").unwrap();
        let mut bytes = obj.encode().unwrap();
        bytes[0] = 0xFF;
        assert!(matches!(SecureObject::decode(&bytes), Err(ObjectError::Malformed("unknown version"))));
        bytes[0] = FORMAT_VERSION;
        bytes[1] = 9;
        assert!(matches!(SecureObject::decode(&bytes), Err(ObjectError::Malformed("unknown kind"))));
    }

    #[test]
    fn sign_covers_header_and_body() {
        let payload = [0xA5u8; 25];
        let obj = sign_object(&payload, &key(), "prod-01").unwrap();
        let pk = key().verifying_key();
        assert!(verify_object(&obj, &pk));

        let mut flipped = obj.clone();
        flipped.body[3] ^= 0x01;
        assert!(!verify_object(&flipped, &pk));

        let mut renamed = obj.clone();
        renamed.header.signer_or_sender_id = "prod-02".into();
        assert!(!verify_object(&renamed, &pk));

        let other = SigningKey::from_seed(&[9u8; 32]).verifying_key();
        assert!(!verify_object(&obj, &other));
    }

    #[test]
    fn encrypt_binds_message_id() {
        let s = secret();
        let k42 = derive_content_key(&s, 42, "prod-01");
        let header = ObjectHeader::new(SUITE_ED25519_AESCCM8_HKDF, "prod-01", s.key_id(), Some(42));
        let obj = encrypt_object(b"representation bytes here", &k42, header).unwrap();

        assert_eq!(decrypt_object(&obj, &k42).unwrap(), b"representation bytes here");

        // A key derived for the next MessageID must not open it.
        let k43 = derive_content_key(&s, 43, "prod-01");
        assert_eq!(decrypt_object(&obj, &k43).unwrap_err(), ObjectError::AuthFailure);

        let mut tampered = obj.clone();
        tampered.body[0] ^= 0x01;
        assert_eq!(decrypt_object(&tampered, &k42).unwrap_err(), ObjectError::AuthFailure);
    }

    #[test]
    fn nesting_round_trip_and_depth_cap() {
        let s = secret();
        let signed = sign_object(&[1, 2, 3], &key(), "prod-01").unwrap();
        let inner = signed.encode().unwrap();
        let ck = derive_content_key(&s, 7, "prod-01");
        let header = ObjectHeader::new(SUITE_ED25519_AESCCM8_HKDF, "prod-01", s.key_id(), Some(7));
        let outer = encrypt_object(&inner, &ck, header).unwrap();
        let wire = outer.encode().unwrap();

        let decoded = SecureObject::decode(&wire).unwrap();
        assert_eq!(decoded.kind, ObjectKind::Encrypted);
        let plain = decrypt_object(&decoded, &ck).unwrap();
        let nested = SecureObject::decode_nested(&plain, 2).unwrap();
        assert_eq!(nested, signed);
        assert!(verify_object(&nested, &key().verifying_key()));

        assert_eq!(
            SecureObject::decode_nested(&plain, MAX_NESTING_DEPTH + 1).unwrap_err(),
            ObjectError::NestingTooDeep
        );
    }

    #[test]
    fn oversize_body_rejected() {
        let mut obj = sign_object(b"x", &key(), "a").unwrap();
        obj.body = vec![0; MAX_BODY_LEN + 1];
        assert_eq!(obj.encode().unwrap_err(), ObjectError::OversizeBody);
    }
}
