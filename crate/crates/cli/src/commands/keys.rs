//! Key, certificate, and access-secret file tooling.
//!
//! Key files are TLV object containers: a self-signed `Signed` object whose
//! body is a one-byte tag (1 private seed, 2 public key) followed by the
//! key bytes. Certificates and issued secrets are ordinary secured objects,
//! so `inspect` reads everything this module writes.

use super::{CmdError, CmdResult};
use anyhow::{anyhow, bail, Context};
use clap::Args;
use oscar_core::crypto::{SigningKey, VerifyingKey};
use oscar_core::keymat::AccessSecret;
use oscar_core::objsec::{issue_certificate, sign_object, CertificatePayload, ObjectKind, SecureObject};
use oscar_core::suite::SUITE_ED25519_AESCCM8_HKDF;
use rand::RngCore;
use std::path::{Path, PathBuf};

pub const KEY_TAG_PRIVATE: u8 = 1;
pub const KEY_TAG_PUBLIC: u8 = 2;

#[derive(Args)]
pub struct KeygenArgs {
    /// Identity the key belongs to (signer/sender id).
    #[arg(long)]
    pub id: String,
    /// Output path prefix; writes `<prefix>.key` and `<prefix>.pub`.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn keygen(args: KeygenArgs) -> CmdResult {
    let mut rng = rand::rngs::OsRng;
    let mut seed = [0u8; 32];
    rng.fill_bytes(&mut seed);
    let key = SigningKey::from_seed(&seed);

    write_key_object(&args.out.with_extension("key"), KEY_TAG_PRIVATE, &seed, &args.id, &key)?;
    write_key_object(
        &args.out.with_extension("pub"),
        KEY_TAG_PUBLIC,
        &key.verifying_key().to_bytes(),
        &args.id,
        &key,
    )?;
    println!(
        "keygen: wrote {}.key and {}.pub for {:?}",
        args.out.display(),
        args.out.display(),
        args.id
    );
    Ok(())
}

fn write_key_object(path: &Path, tag: u8, bytes: &[u8], id: &str, key: &SigningKey) -> Result<(), CmdError> {
    let mut body = vec![tag];
    body.extend_from_slice(bytes);
    let obj = sign_object(&body, key, id).context("building key container")?;
    let encoded = obj.encode().context("encoding key container")?;
    std::fs::write(path, encoded).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn load_object(path: &Path) -> anyhow::Result<SecureObject> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    SecureObject::decode(&bytes).with_context(|| format!("decoding {}", path.display()))
}

/// Loads a `.key` file; checks the container's self-signature.
pub fn load_signing_key(path: &Path) -> anyhow::Result<(SigningKey, String)> {
    let obj = load_object(path)?;
    if obj.kind != ObjectKind::Signed || obj.body.first() != Some(&KEY_TAG_PRIVATE) || obj.body.len() != 33 {
        bail!("{} is not a private key container", path.display());
    }
    let seed: [u8; 32] = obj.body[1..33].try_into().expect("length checked");
    let key = SigningKey::from_seed(&seed);
    if !oscar_core::objsec::verify_object(&obj, &key.verifying_key()) {
        bail!("{}: key container self-signature does not verify", path.display());
    }
    Ok((key, obj.header.signer_or_sender_id))
}

/// Loads a `.pub` file.
pub fn load_verifying_key(path: &Path) -> anyhow::Result<(VerifyingKey, String)> {
    let obj = load_object(path)?;
    if obj.kind != ObjectKind::Signed || obj.body.first() != Some(&KEY_TAG_PUBLIC) || obj.body.len() != 33 {
        bail!("{} is not a public key container", path.display());
    }
    let key = VerifyingKey::from_bytes(&obj.body[1..33]).map_err(|e| anyhow!("{}: {e}", path.display()))?;
    Ok((key, obj.header.signer_or_sender_id))
}

#[derive(Args)]
pub struct CertIssueArgs {
    /// Anchor (authority) private key file.
    #[arg(long)]
    pub anchor_key: PathBuf,
    /// Subject public key file.
    #[arg(long)]
    pub subject_pub: PathBuf,
    /// Capabilities to certify, repeatable.
    #[arg(long = "capability")]
    pub capabilities: Vec<String>,
    /// Optional location attribute.
    #[arg(long)]
    pub location: Option<String>,
    /// Validity start, seconds since epoch.
    #[arg(long, default_value_t = 0)]
    pub not_before: u64,
    /// Validity end, seconds since epoch (default ~10 years).
    #[arg(long, default_value_t = 315_360_000)]
    pub not_after: u64,
    /// Output certificate file.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn cert_issue(args: CertIssueArgs) -> CmdResult {
    let (anchor_key, anchor_id) = load_signing_key(&args.anchor_key)?;
    let (subject_key, subject_id) = load_verifying_key(&args.subject_pub)?;
    let payload = CertificatePayload {
        subject_id: subject_id.clone(),
        public_key: subject_key.to_bytes().to_vec(),
        capabilities: args.capabilities,
        location: args.location,
        not_before: args.not_before,
        not_after: args.not_after,
    };
    let cert = issue_certificate(&payload, &anchor_key, &anchor_id).context("issuing certificate")?;
    std::fs::write(&args.out, cert.encode().context("encoding certificate")?)
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!("cert-issue: {} certified by {} -> {}", subject_id, anchor_id, args.out.display());
    Ok(())
}

#[derive(Args)]
pub struct SecretIssueArgs {
    /// Authority private key file; the object is signed with it.
    #[arg(long)]
    pub authority_key: PathBuf,
    /// Access-secret key id.
    #[arg(long)]
    pub key_id: u16,
    /// Resource paths the secret scopes, repeatable.
    #[arg(long = "scope")]
    pub scopes: Vec<String>,
    /// Epoch of the issued secret.
    #[arg(long, default_value_t = 1)]
    pub epoch: u64,
    /// Output object file (PUT-able to a producer).
    #[arg(long)]
    pub out: PathBuf,
}

pub fn secret_issue(args: SecretIssueArgs) -> CmdResult {
    if args.scopes.is_empty() {
        return Err(anyhow!("at least one --scope is required").into());
    }
    let (authority_key, authority_id) = load_signing_key(&args.authority_key)?;
    let mut secret_bytes = vec![0u8; 16];
    rand::rngs::OsRng.fill_bytes(&mut secret_bytes);
    let secret = AccessSecret::new(args.key_id, secret_bytes, args.scopes, args.epoch).context("building secret")?;
    let obj = oscar_core::objsec::sign_object_with(
        &secret.encode_body(),
        &authority_key,
        &authority_id,
        SUITE_ED25519_AESCCM8_HKDF,
        args.key_id,
        ObjectKind::Signed,
    )
    .context("signing secret")?;
    std::fs::write(&args.out, obj.encode().context("encoding secret object")?)
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!(
        "secret-issue: key_id {} epoch {} scoping {:?} -> {}",
        args.key_id,
        args.epoch,
        secret.resource_scope(),
        args.out.display()
    );
    Ok(())
}
