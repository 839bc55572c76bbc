//! Certificates: a `Signed` object with a pre-defined body format.

use super::{sign_object_with, ObjectError, ObjectKind, SecureObject, MAX_ID_LEN};
use crate::crypto::SigningKey;
use crate::suite::SUITE_ED25519_AESCCM8_HKDF;
use crate::wire::Reader;

/// Body of a `Certificate` object: the subject's verification key plus the
/// capabilities a consumer checks against its resource policy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificatePayload {
    pub subject_id: String,
    pub public_key: Vec<u8>,
    /// Capability labels, e.g. `temperature-sensor`.
    pub capabilities: Vec<String>,
    pub location: Option<String>,
    /// Seconds since epoch; `not_before` must precede `not_after`.
    pub not_before: u64,
    pub not_after: u64,
}

impl CertificatePayload {
    pub fn encode(&self) -> Result<Vec<u8>, ObjectError> {
        let subject = self.subject_id.as_bytes();
        if subject.is_empty() || subject.len() > MAX_ID_LEN {
            return Err(ObjectError::Malformed("subject length out of range"));
        }
        if self.public_key.len() > u16::MAX as usize {
            return Err(ObjectError::Malformed("public key too long"));
        }
        if self.capabilities.len() > u8::MAX as usize {
            return Err(ObjectError::Malformed("too many capabilities"));
        }
        if self.not_before >= self.not_after {
            return Err(ObjectError::ValidityInverted);
        }
        let mut out = Vec::new();
        out.push(subject.len() as u8);
        out.extend_from_slice(subject);
        out.extend_from_slice(&(self.public_key.len() as u16).to_be_bytes());
        out.extend_from_slice(&self.public_key);
        out.push(self.capabilities.len() as u8);
        for cap in &self.capabilities {
            let bytes = cap.as_bytes();
            if bytes.is_empty() || bytes.len() > u8::MAX as usize {
                return Err(ObjectError::Malformed("capability length out of range"));
            }
            out.push(bytes.len() as u8);
            out.extend_from_slice(bytes);
        }
        match &self.location {
            None => out.push(0),
            Some(loc) => {
                let bytes = loc.as_bytes();
                if bytes.len() > u8::MAX as usize {
                    return Err(ObjectError::Malformed("location too long"));
                }
                out.push(1);
                out.push(bytes.len() as u8);
                out.extend_from_slice(bytes);
            }
        }
        out.extend_from_slice(&self.not_before.to_be_bytes());
        out.extend_from_slice(&self.not_after.to_be_bytes());
        Ok(out)
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, ObjectError> {
        let mut r = Reader::new(bytes);
        let subject_len = r.u8("subject length").map_err(ObjectError::Malformed)? as usize;
        if subject_len == 0 || subject_len > MAX_ID_LEN {
            return Err(ObjectError::Malformed("subject length out of range"));
        }
        let subject_id = std::str::from_utf8(r.bytes(subject_len, "subject").map_err(ObjectError::Malformed)?)
            .map_err(|_| ObjectError::Malformed("subject not utf-8"))?
            .to_string();
        let pk_len = r.u16_be("public key length").map_err(ObjectError::Malformed)? as usize;
        let public_key = r.bytes(pk_len, "public key").map_err(ObjectError::Malformed)?.to_vec();
        let cap_count = r.u8("capability count").map_err(ObjectError::Malformed)? as usize;
        let mut capabilities = Vec::with_capacity(cap_count);
        for _ in 0..cap_count {
            let len = r.u8("capability length").map_err(ObjectError::Malformed)? as usize;
            if len == 0 {
                return Err(ObjectError::Malformed("capability length out of range"));
            }
            let cap = std::str::from_utf8(r.bytes(len, "capability").map_err(ObjectError::Malformed)?)
                .map_err(|_| ObjectError::Malformed("capability not utf-8"))?
                .to_string();
            capabilities.push(cap);
        }
        let location = match r.u8("location flag").map_err(ObjectError::Malformed)? {
            0 => None,
            1 => {
                let len = r.u8("location length").map_err(ObjectError::Malformed)? as usize;
                let loc = std::str::from_utf8(r.bytes(len, "location").map_err(ObjectError::Malformed)?)
                    .map_err(|_| ObjectError::Malformed("location not utf-8"))?
                    .to_string();
                Some(loc)
            }
            _ => return Err(ObjectError::Malformed("bad location flag")),
        };
        let not_before = r.u64_be("not_before").map_err(ObjectError::Malformed)?;
        let not_after = r.u64_be("not_after").map_err(ObjectError::Malformed)?;
        if not_before >= not_after {
            return Err(ObjectError::ValidityInverted);
        }
        if !r.is_empty() {
            return Err(ObjectError::Malformed("trailing bytes in certificate"));
        }
        Ok(CertificatePayload {
            subject_id,
            public_key,
            capabilities,
            location,
            not_before,
            not_after,
        })
    }

    pub fn valid_at(&self, now_s: u64) -> bool {
        self.not_before <= now_s && now_s < self.not_after
    }
}

/// Issues a certificate: a `Certificate`-kind signed object, verifiable
/// under the anchor's public key.
pub fn issue_certificate(
    payload: &CertificatePayload,
    anchor_key: &SigningKey,
    anchor_id: &str,
) -> Result<SecureObject, ObjectError> {
    let body = payload.encode()?;
    sign_object_with(&body, anchor_key, anchor_id, SUITE_ED25519_AESCCM8_HKDF, 0, ObjectKind::Certificate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objsec::verify_object;

    fn payload() -> CertificatePayload {
        CertificatePayload {
            subject_id: "prod-01".into(),
            public_key: vec![0xAA; 32],
            capabilities: vec!["temperature-sensor".into()],
            location: Some("bldg-4".into()),
            not_before: 100,
            not_after: 10_000,
        }
    }

    #[test]
    fn round_trip() {
        let p = payload();
        let bytes = p.encode().unwrap();
        assert_eq!(CertificatePayload::decode(&bytes).unwrap(), p);
    }

    #[test]
    fn inverted_validity_rejected() {
        let mut p = payload();
        p.not_after = p.not_before;
        assert_eq!(p.encode().unwrap_err(), ObjectError::ValidityInverted);
        let anchor = SigningKey::from_seed(&[1u8; 32]);
        assert_eq!(issue_certificate(&p, &anchor, "authz").unwrap_err(), ObjectError::ValidityInverted);
    }

    #[test]
    fn issued_certificate_verifies_under_anchor() {
        let anchor = SigningKey::from_seed(&[2u8; 32]);
        let cert = issue_certificate(&payload(), &anchor, "authz").unwrap();
        assert_eq!(cert.kind, ObjectKind::Certificate);
        assert!(verify_object(&cert, &anchor.verifying_key()));
        let other = SigningKey::from_seed(&[3u8; 32]);
        assert!(!verify_object(&cert, &other.verifying_key()));

        // Certificates survive the wire: kind is preserved and the body
        // still parses.
        let wire = cert.encode().unwrap();
        let decoded = SecureObject::decode(&wire).unwrap();
        assert_eq!(decoded, cert);
        assert_eq!(CertificatePayload::decode(&decoded.body).unwrap(), payload());
    }

    #[test]
    fn expiry_is_a_policy_question() {
        // verify_object checks the signature only; the validity window is
        // the consumer's policy check.
        let anchor = SigningKey::from_seed(&[2u8; 32]);
        let cert = issue_certificate(&payload(), &anchor, "authz").unwrap();
        assert!(verify_object(&cert, &anchor.verifying_key()));
        let p = CertificatePayload::decode(&cert.body).unwrap();
        assert!(!p.valid_at(10_001));
        assert!(!p.valid_at(99));
        assert!(p.valid_at(100));
    }
}
