//! Registered cipher suites.
//!
//! A suite identifier names the signature algorithm, AEAD, and key
//! derivation a peer uses for secured objects. The registry is pluggable;
//! the default build registers a single modern suite. Suite identifiers are
//! what the Accept-cipher option carries during negotiation (see
//! [`crate::coap`]).

/// Ed25519 signatures, AES-128-CCM-8 AEAD, HKDF-SHA256 key derivation.
pub const SUITE_ED25519_AESCCM8_HKDF: u8 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CipherSuite {
    pub id: u8,
    pub name: &'static str,
    pub signature_len: usize,
    pub tag_len: usize,
}

/// Table of suites known to this build, ordered by preference.
#[derive(Debug, Clone)]
pub struct SuiteRegistry {
    suites: Vec<CipherSuite>,
}

impl Default for SuiteRegistry {
    fn default() -> Self {
        SuiteRegistry {
            suites: vec![CipherSuite {
                id: SUITE_ED25519_AESCCM8_HKDF,
                name: "ed25519-aesccm8-hkdfsha256",
                signature_len: crate::crypto::SIGNATURE_LEN,
                tag_len: crate::crypto::AEAD_TAG_LEN,
            }],
        }
    }
}

impl SuiteRegistry {
    pub fn get(&self, id: u8) -> Option<&CipherSuite> {
        self.suites.iter().find(|s| s.id == id)
    }

    pub fn is_registered(&self, id: u8) -> bool {
        self.get(id).is_some()
    }

    /// Registers an additional suite; replaces an existing entry with the
    /// same id.
    pub fn register(&mut self, suite: CipherSuite) {
        self.suites.retain(|s| s.id != suite.id);
        self.suites.push(suite);
    }

    pub fn ids(&self) -> Vec<u8> {
        self.suites.iter().map(|s| s.id).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_registry_has_the_default_suite() {
        let reg = SuiteRegistry::default();
        assert!(reg.is_registered(SUITE_ED25519_AESCCM8_HKDF));
        assert!(!reg.is_registered(0));
        assert_eq!(reg.get(1).unwrap().signature_len, 64);
    }

    #[test]
    fn register_replaces_same_id() {
        let mut reg = SuiteRegistry::default();
        reg.register(CipherSuite { id: 1, name: "other", signature_len: 96, tag_len: 16 });
        assert_eq!(reg.ids(), vec![1]);
        assert_eq!(reg.get(1).unwrap().name, "other");
    }
}
