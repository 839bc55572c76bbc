//! The authorization server: authenticates consumers and hands out access
//! secrets and producer certificates. Semi-trusted: it can read content
//! (it knows the secrets) but cannot forge it (it holds no producer
//! signing keys).

use crate::crypto::{SigningKey, VerifyingKey};
use crate::keymat::{rotate_access_secret, AccessSecret, KeymatError};
use crate::objsec::{CertificatePayload, ObjectKind, SecureObject};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AuthzError {
    #[error("principal {principal} is not authorized for {scope}")]
    NotAuthorized { principal: String, scope: String },
    #[error("unknown key id {0}")]
    UnknownKeyId(u16),
    #[error(transparent)]
    Keymat(#[from] KeymatError),
}

/// What a successful grant returns: the highest-epoch secrets covering the
/// scope plus the certificates of the producers serving it.
#[derive(Debug, Clone)]
pub struct Grant {
    pub secrets: Vec<AccessSecret>,
    pub certificates: Vec<SecureObject>,
}

pub struct AuthzServer {
    authority_key: SigningKey,
    authority_id: String,
    grants: BTreeMap<String, Vec<String>>,
    secrets: BTreeMap<u16, AccessSecret>,
    cert_repo: BTreeMap<String, SecureObject>,
    resource_producers: Vec<(String, String)>,
}

impl AuthzServer {
    pub fn new(authority_key: SigningKey, authority_id: &str) -> Self {
        AuthzServer {
            authority_key,
            authority_id: authority_id.to_string(),
            grants: BTreeMap::new(),
            secrets: BTreeMap::new(),
            cert_repo: BTreeMap::new(),
            resource_producers: Vec::new(),
        }
    }

    /// The trust anchor consumers and producers pin.
    pub fn anchor(&self) -> VerifyingKey {
        self.authority_key.verifying_key()
    }

    pub fn authority_id(&self) -> &str {
        &self.authority_id
    }

    /// Registers an authenticated principal and the path prefixes it may
    /// read. Authentication itself happens on the secure channel this store
    /// sits behind.
    pub fn register_principal(&mut self, principal: &str, scopes: Vec<String>) {
        self.grants.insert(principal.to_string(), scopes);
    }

    /// Registers or replaces a secret; keeps the highest epoch per key id.
    pub fn register_secret(&mut self, secret: AccessSecret) {
        match self.secrets.get(&secret.key_id()) {
            Some(cur) if cur.epoch() >= secret.epoch() => {}
            _ => {
                self.secrets.insert(secret.key_id(), secret);
            }
        }
    }

    /// Producers publish their certificates here during subscription.
    pub fn publish_certificate(&mut self, cert: SecureObject) -> Result<(), AuthzError> {
        if cert.kind != ObjectKind::Certificate {
            return Err(AuthzError::Keymat(KeymatError::Malformed("not a certificate")));
        }
        let payload =
            CertificatePayload::decode(&cert.body).map_err(|_| AuthzError::Keymat(KeymatError::Malformed("certificate body")))?;
        self.cert_repo.insert(payload.subject_id, cert);
        Ok(())
    }

    pub fn certificate_for(&self, subject: &str) -> Option<&SecureObject> {
        self.cert_repo.get(subject)
    }

    /// Maps a resource prefix to the producer subject serving it, for
    /// certificate bundling in grants.
    pub fn map_resource_producer(&mut self, prefix: &str, subject: &str) {
        self.resource_producers.push((prefix.to_string(), subject.to_string()));
    }

    fn prefix_covers(prefix: &str, path: &str) -> bool {
        path == prefix || path.starts_with(&format!("{prefix}/"))
    }

    /// Releases the secrets whose scope lies inside the principal's granted
    /// scopes and intersects the requested scope, plus producer
    /// certificates for it.
    pub fn grant(&self, principal: &str, scope: &str) -> Result<Grant, AuthzError> {
        let not_authorized = || AuthzError::NotAuthorized { principal: principal.to_string(), scope: scope.to_string() };
        let granted = self.grants.get(principal).ok_or_else(not_authorized)?;
        if !granted.iter().any(|g| Self::prefix_covers(g, scope)) {
            return Err(not_authorized());
        }

        let secrets: Vec<AccessSecret> = self
            .secrets
            .values()
            .filter(|s| {
                s.resource_scope().iter().all(|p| granted.iter().any(|g| Self::prefix_covers(g, p)))
                    && s.resource_scope().iter().any(|p| Self::prefix_covers(scope, p) || Self::prefix_covers(p, scope))
            })
            .cloned()
            .collect();
        if secrets.is_empty() {
            return Err(not_authorized());
        }

        let certificates: Vec<SecureObject> = self
            .resource_producers
            .iter()
            .filter(|(prefix, _)| Self::prefix_covers(prefix, scope) || Self::prefix_covers(scope, prefix))
            .filter_map(|(_, subject)| self.cert_repo.get(subject).cloned())
            .collect();

        Ok(Grant { secrets, certificates })
    }

    /// Like [`grant`](Self::grant), but each released secret is wrapped in
    /// an authority-signed object, the form that crosses a channel to the
    /// consumer (and that a producer accepts over PUT).
    pub fn grant_signed(&self, principal: &str, scope: &str) -> Result<(Vec<SecureObject>, Vec<SecureObject>), AuthzError> {
        let grant = self.grant(principal, scope)?;
        let mut signed = Vec::with_capacity(grant.secrets.len());
        for secret in &grant.secrets {
            let obj = crate::objsec::sign_object_with(
                &secret.encode_body(),
                &self.authority_key,
                &self.authority_id,
                crate::suite::SUITE_ED25519_AESCCM8_HKDF,
                secret.key_id(),
                ObjectKind::Signed,
            )
            .map_err(|_| AuthzError::Keymat(KeymatError::KeyInvalid))?;
            signed.push(obj);
        }
        Ok((signed, grant.certificates))
    }

    /// Rotates the secret for `key_id`: registers the new epoch and returns
    /// the signed object a producer will accept over PUT.
    pub fn rotate_secret(&mut self, key_id: u16, new_secret: &[u8]) -> Result<SecureObject, AuthzError> {
        let current = self.secrets.get(&key_id).ok_or(AuthzError::UnknownKeyId(key_id))?.clone();
        let obj = rotate_access_secret(&current, new_secret, &self.authority_key, &self.authority_id)?;
        let rotated = AccessSecret::decode_body(&obj.body)?;
        self.secrets.insert(key_id, rotated);
        Ok(obj)
    }
}
