//! `inspect`: pretty-print any TLV object file.

use super::CmdResult;
use clap::Args;
use oscar_core::keymat::AccessSecret;
use oscar_core::objsec::{CertificatePayload, ObjectKind};
use std::path::PathBuf;

#[derive(Args)]
pub struct InspectArgs {
    /// Object file to inspect.
    pub file: PathBuf,
}

pub fn inspect(args: InspectArgs) -> CmdResult {
    let obj = super::keys::load_object(&args.file)?;
    println!("file:    {}", args.file.display());
    println!("kind:    {:?}", obj.kind);
    println!("version: {}", obj.header.version);
    println!("suite:   {}", obj.header.cipher_suite_id);
    println!("id:      {}", obj.header.signer_or_sender_id);
    println!("key_id:  {}", obj.header.key_id);
    if let Some(mid) = obj.header.binding_message_id {
        println!("binding: MessageID {mid}");
    }
    println!("body:    {} bytes", obj.body.len());
    println!("auth:    {} bytes", obj.auth.len());

    match obj.kind {
        ObjectKind::Certificate => {
            let payload = CertificatePayload::decode(&obj.body)
                .expect("decode validated the certificate body");
            println!("certificate:");
            println!("  subject:      {}", payload.subject_id);
            println!("  public key:   {}", hex::encode(&payload.public_key));
            println!("  capabilities: {}", payload.capabilities.join(", "));
            if let Some(loc) = &payload.location {
                println!("  location:     {loc}");
            }
            println!("  validity:     [{}, {})", payload.not_before, payload.not_after);
        }
        ObjectKind::Signed => {
            if obj.body.len() == 33 && (obj.body[0] == super::keys::KEY_TAG_PRIVATE || obj.body[0] == super::keys::KEY_TAG_PUBLIC) {
                let label = if obj.body[0] == super::keys::KEY_TAG_PRIVATE { "private signing seed" } else { "public key" };
                println!("key container: {label}");
                if obj.body[0] == super::keys::KEY_TAG_PUBLIC {
                    println!("  bytes: {}", hex::encode(&obj.body[1..]));
                }
            } else if let Ok(secret) = AccessSecret::decode_body(&obj.body) {
                println!("access secret:");
                println!("  key_id: {}", secret.key_id());
                println!("  epoch:  {}", secret.epoch());
                println!("  scope:  {}", secret.resource_scope().join(" "));
                println!("  secret: {} bytes", secret.secret().len());
            } else {
                println!("payload: {}", preview(&obj.body));
            }
        }
        ObjectKind::Encrypted => {
            println!("ciphertext: {}", preview(&obj.body));
        }
    }
    Ok(())
}

fn preview(bytes: &[u8]) -> String {
    let head = &bytes[..bytes.len().min(24)];
    if bytes.len() > 24 {
        format!("{}… ({} bytes)", hex::encode(head), bytes.len())
    } else {
        format!("{} ({} bytes)", hex::encode(head), bytes.len())
    }
}
