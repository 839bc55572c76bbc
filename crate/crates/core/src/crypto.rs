//! Primitive layer: Ed25519 signatures, AES-128-CCM-8 AEAD, HKDF-SHA256.
//!
//! Everything above this module talks in terms of these newtypes so the
//! concrete algorithms stay swappable behind the suite table.

use aes::Aes128;
use ccm::aead::{Aead, KeyInit, Payload};
use ccm::consts::{U13, U8};
use ccm::Ccm;
use ed25519_dalek as ed25519;
use hkdf::Hkdf;
use sha2::{Digest, Sha256};
use thiserror::Error;

/// AES-128-CCM with an 8-byte tag and 13-byte nonce.
type AesCcm8 = Ccm<Aes128, U8, U13>;

pub const SIGNATURE_LEN: usize = 64;
pub const VERIFYING_KEY_LEN: usize = 32;
pub const SIGNING_SEED_LEN: usize = 32;
pub const AEAD_KEY_LEN: usize = 16;
pub const AEAD_TAG_LEN: usize = 8;
pub const AEAD_NONCE_LEN: usize = 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum CryptoError {
    #[error("invalid key material")]
    KeyInvalid,
    #[error("authentication failure")]
    AuthFailure,
}

/// Private signature key (Ed25519 seed form).
#[derive(Clone)]
pub struct SigningKey(ed25519::SigningKey);

/// Public signature-verification key.
#[derive(Clone, PartialEq, Eq)]
pub struct VerifyingKey(ed25519::VerifyingKey);

impl SigningKey {
    pub fn generate<R: rand::CryptoRng + rand::RngCore>(rng: &mut R) -> Self {
        SigningKey(ed25519::SigningKey::generate(rng))
    }

    pub fn from_seed(seed: &[u8; SIGNING_SEED_LEN]) -> Self {
        SigningKey(ed25519::SigningKey::from_bytes(seed))
    }

    pub fn seed(&self) -> [u8; SIGNING_SEED_LEN] {
        self.0.to_bytes()
    }

    pub fn verifying_key(&self) -> VerifyingKey {
        VerifyingKey(self.0.verifying_key())
    }

    pub fn sign(&self, message: &[u8]) -> Vec<u8> {
        use ed25519::Signer;
        self.0.sign(message).to_bytes().to_vec()
    }
}

impl std::fmt::Debug for SigningKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("SigningKey(..)")
    }
}

impl VerifyingKey {
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
        let arr: [u8; VERIFYING_KEY_LEN] = bytes.try_into().map_err(|_| CryptoError::KeyInvalid)?;
        ed25519::VerifyingKey::from_bytes(&arr)
            .map(VerifyingKey)
            .map_err(|_| CryptoError::KeyInvalid)
    }

    pub fn to_bytes(&self) -> [u8; VERIFYING_KEY_LEN] {
        self.0.to_bytes()
    }

    /// Returns true iff `signature` is a valid signature over `message`.
    pub fn verify(&self, message: &[u8], signature: &[u8]) -> bool {
        use ed25519::Verifier;
        let Ok(arr) = <&[u8; SIGNATURE_LEN]>::try_from(signature) else {
            return false;
        };
        let sig = ed25519::Signature::from_bytes(arr);
        self.0.verify(message, &sig).is_ok()
    }
}

impl std::fmt::Debug for VerifyingKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "VerifyingKey({:02x?})", &self.to_bytes()[..4])
    }
}

impl PartialOrd for VerifyingKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for VerifyingKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.to_bytes().cmp(&other.to_bytes())
    }
}

/// Authenticated encryption; returns ciphertext with the 8-byte tag appended.
pub fn aead_seal(key: &[u8; AEAD_KEY_LEN], nonce: &[u8; AEAD_NONCE_LEN], aad: &[u8], plaintext: &[u8]) -> Vec<u8> {
    let cipher = AesCcm8::new(key.into());
    cipher
        .encrypt(nonce.into(), Payload { msg: plaintext, aad })
        .expect("CCM encryption is infallible for in-range lengths")
}

/// Opens `ciphertext_and_tag`; fails on any key, nonce, aad, or tag mismatch.
pub fn aead_open(
    key: &[u8; AEAD_KEY_LEN],
    nonce: &[u8; AEAD_NONCE_LEN],
    aad: &[u8],
    ciphertext_and_tag: &[u8],
) -> Result<Vec<u8>, CryptoError> {
    let cipher = AesCcm8::new(key.into());
    cipher
        .decrypt(nonce.into(), Payload { msg: ciphertext_and_tag, aad })
        .map_err(|_| CryptoError::AuthFailure)
}

/// HKDF-SHA256 with no salt: extract from `ikm`, expand with `info` into `out`.
pub fn hkdf_sha256(ikm: &[u8], info: &[u8], out: &mut [u8]) {
    let hk = Hkdf::<Sha256>::new(None, ikm);
    hk.expand(info, out).expect("output length within HKDF bounds");
}

pub fn sha256(data: &[u8]) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update(data);
    hasher.finalize().into()
}
