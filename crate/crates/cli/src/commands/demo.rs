//! `demo`: the full flow over loopback UDP datagrams.
//!
//! Three sockets: an authorization server, a producer, and the consumer
//! driving them. Steps: (1) the consumer fetches a grant, (2) sends a GET,
//! (3) receives the encrypted response, (4) decrypts and verifies the
//! nested signed object. Exits 0 on full verification; on failure the exit
//! code names the step (2 grant, 3 request, 4 response, 5 verify).

use super::{fail_at, CmdResult};
use anyhow::{anyhow, bail, Context};
use clap::Args;
use oscar_core::coap::CoapMessage;
use oscar_core::crypto::SigningKey;
use oscar_core::keymat::AccessSecret;
use oscar_core::nodes::{AuthzServer, CapabilityPolicy, Consumer, Producer, ResignConfig};
use oscar_core::objsec::{issue_certificate, CertificatePayload, ObjectKind, SecureObject};
use oscar_sim::config::DemoConfig;
use std::net::UdpSocket;
use std::path::PathBuf;
use std::time::{Duration, Instant};

#[derive(Args)]
pub struct DemoArgs {
    /// Scenario file; its [demo] section configures identities and policy.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Flip one byte of the response before verification.
    #[arg(long)]
    pub tamper: bool,
    /// Request a grant for a scope the consumer was never given.
    #[arg(long)]
    pub wrong_scope: bool,
}

struct Services {
    authz_addr: std::net::SocketAddr,
    producer_addr: std::net::SocketAddr,
    shutdown: std::sync::mpsc::Sender<()>,
    threads: Vec<std::thread::JoinHandle<()>>,
}

impl Services {
    fn stop(self) {
        let _ = self.shutdown.send(());
        let _ = self.shutdown.send(());
        for t in self.threads {
            let _ = t.join();
        }
    }
}

fn spawn_services(demo: &DemoConfig) -> anyhow::Result<Services> {
    let authority_key = SigningKey::from_seed(&[0xD0; 32]);
    let producer_key = SigningKey::from_seed(&[0xD1; 32]);
    let anchor = authority_key.verifying_key();

    let cert = issue_certificate(
        &CertificatePayload {
            subject_id: demo.producer_id.clone(),
            public_key: producer_key.verifying_key().to_bytes().to_vec(),
            capabilities: vec![demo.capability.clone()],
            location: None,
            not_before: 0,
            not_after: u64::MAX / 2,
        },
        &authority_key,
        "authz",
    )
    .context("issuing demo certificate")?;

    let secret = AccessSecret::new(1, vec![0xCC; 16], vec![demo.resource.clone()], 1).context("demo secret")?;

    let mut authz = AuthzServer::new(authority_key, "authz");
    authz.publish_certificate(cert).context("publishing certificate")?;
    authz.map_resource_producer(&demo.resource, &demo.producer_id);
    authz.register_secret(secret.clone());
    authz.register_principal(&demo.consumer, demo.granted.clone());

    let mut producer = Producer::new(&demo.producer_id, producer_key, ResignConfig::from_interval(60.0, 1));
    producer.add_trust_anchor(anchor);
    producer.add_resource(&demo.resource, vec![0x17; 25]).context("signing initial representation")?;
    producer.install_secret(secret).context("installing producer secret")?;

    let authz_sock = UdpSocket::bind("127.0.0.1:0").context("binding authz socket")?;
    let producer_sock = UdpSocket::bind("127.0.0.1:0").context("binding producer socket")?;
    let authz_addr = authz_sock.local_addr()?;
    let producer_addr = producer_sock.local_addr()?;
    authz_sock.set_read_timeout(Some(Duration::from_millis(50)))?;
    producer_sock.set_read_timeout(Some(Duration::from_millis(50)))?;

    let (shutdown, rx) = std::sync::mpsc::channel::<()>();
    let rx = std::sync::Arc::new(std::sync::Mutex::new(rx));

    let rx_a = rx.clone();
    let authz_thread = std::thread::spawn(move || {
        let mut buf = [0u8; 4096];
        loop {
            if rx_a.lock().unwrap().try_recv().is_ok() {
                return;
            }
            let Ok((n, peer)) = authz_sock.recv_from(&mut buf) else { continue };
            let reply = handle_grant_request(&authz, &buf[..n]);
            let _ = authz_sock.send_to(&reply, peer);
        }
    });

    let start = Instant::now();
    let rx_p = rx;
    let producer_thread = std::thread::spawn(move || {
        let mut buf = [0u8; 4096];
        loop {
            if rx_p.lock().unwrap().try_recv().is_ok() {
                return;
            }
            let Ok((n, peer)) = producer_sock.recv_from(&mut buf) else { continue };
            let now_ns = start.elapsed().as_nanos() as u64;
            if let Ok((response, _ops)) = producer.handle_datagram(&peer.to_string(), &buf[..n], now_ns) {
                let _ = producer_sock.send_to(&response, peer);
            }
        }
    });

    Ok(Services { authz_addr, producer_addr, shutdown, threads: vec![authz_thread, producer_thread] })
}

/// Grant wire form: request `grant <principal> <scope>`; response either
/// `ok` followed by length-prefixed signed-secret and certificate objects,
/// or `err <reason>`.
fn handle_grant_request(authz: &AuthzServer, datagram: &[u8]) -> Vec<u8> {
    let text = String::from_utf8_lossy(datagram);
    let mut parts = text.split_whitespace();
    let (Some("grant"), Some(principal), Some(scope)) = (parts.next(), parts.next(), parts.next()) else {
        return b"err malformed grant request".to_vec();
    };
    match authz.grant_signed(principal, scope) {
        Ok((secrets, certs)) => {
            let mut out = b"ok ".to_vec();
            let mut push_group = |objs: &[SecureObject]| {
                out.extend_from_slice(&(objs.len() as u16).to_be_bytes());
                for obj in objs {
                    let bytes = obj.encode().expect("grant objects encode");
                    out.extend_from_slice(&(bytes.len() as u32).to_be_bytes());
                    out.extend_from_slice(&bytes);
                }
            };
            push_group(&secrets);
            push_group(&certs);
            out
        }
        Err(err) => format!("err {err}").into_bytes(),
    }
}

fn parse_grant_reply(reply: &[u8]) -> anyhow::Result<(Vec<SecureObject>, Vec<SecureObject>)> {
    if let Some(msg) = reply.strip_prefix(b"err ".as_slice()) {
        bail!("{}", String::from_utf8_lossy(msg));
    }
    let body = reply.strip_prefix(b"ok ".as_slice()).ok_or_else(|| anyhow!("malformed grant reply"))?;
    let mut pos = 0usize;
    let mut take_group = |body: &[u8]| -> anyhow::Result<Vec<SecureObject>> {
        let count = u16::from_be_bytes(body[pos..pos + 2].try_into()?) as usize;
        pos += 2;
        let mut objs = Vec::with_capacity(count);
        for _ in 0..count {
            let len = u32::from_be_bytes(body[pos..pos + 4].try_into()?) as usize;
            pos += 4;
            objs.push(SecureObject::decode(&body[pos..pos + len]).map_err(|e| anyhow!("grant object: {e}"))?);
            pos += len;
        }
        Ok(objs)
    };
    let secrets = take_group(body)?;
    let certs = take_group(body)?;
    Ok((secrets, certs))
}

pub fn demo(args: DemoArgs) -> CmdResult {
    let demo_cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            DemoConfig::parse_str(&text).context("parsing [demo] section")?
        }
        None => DemoConfig::default(),
    };
    let services = spawn_services(&demo_cfg)?;
    let outcome = run_consumer(&args, &demo_cfg, &services);
    services.stop();
    outcome?;
    println!("demo: OK");
    Ok(())
}

fn run_consumer(args: &DemoArgs, demo: &DemoConfig, services: &Services) -> CmdResult {
    let sock = UdpSocket::bind("127.0.0.1:0").context("binding consumer socket")?;
    sock.set_read_timeout(Some(Duration::from_secs(2)))?;
    let mut buf = [0u8; 4096];

    // Step 1: grant over the authenticated-channel abstraction.
    let scope = if args.wrong_scope { "/forbidden".to_string() } else { demo.resource.clone() };
    let request = format!("grant {} {}", demo.consumer, scope);
    sock.send_to(request.as_bytes(), services.authz_addr).context("sending grant request")?;
    let (n, _) = sock
        .recv_from(&mut buf)
        .map_err(|e| fail_at("grant", 2, anyhow!("no reply from authorization server: {e}")))?;
    let (signed_secrets, certs) = parse_grant_reply(&buf[..n]).map_err(|e| fail_at("grant", 2, e))?;

    let mut policy = CapabilityPolicy::new();
    policy.require(&demo.resource, &demo.capability);
    let mut consumer = Consumer::new(&demo.consumer, policy);
    let anchor = SigningKey::from_seed(&[0xD0; 32]).verifying_key();
    consumer.trust_store_mut().add_anchor(anchor.clone());
    let mut installed = 0usize;
    for obj in &signed_secrets {
        if obj.kind == ObjectKind::Signed && oscar_core::objsec::verify_object(obj, &anchor) {
            let secret = AccessSecret::decode_body(&obj.body).map_err(|e| fail_at("grant", 2, anyhow!("secret body: {e}")))?;
            consumer.install_secret(secret);
            installed += 1;
        }
    }
    for cert in certs.iter().cloned() {
        consumer
            .trust_store_mut()
            .add_certificate(cert)
            .map_err(|e| fail_at("grant", 2, anyhow!("certificate rejected: {e}")))?;
    }
    if installed == 0 {
        return Err(fail_at("grant", 2, anyhow!("no usable secret in grant")));
    }
    println!(
        "step 1/4 grant: principal {:?} scope {:?} -> {} secret(s), {} certificate(s)",
        demo.consumer,
        scope,
        installed,
        certs.len()
    );

    // Step 2: GET with Accept-cipher.
    let (request_bytes, pending) = consumer
        .request(&demo.resource, 0)
        .map_err(|e| fail_at("request", 3, anyhow!("{e}")))?;
    sock.send_to(&request_bytes, services.producer_addr)
        .map_err(|e| fail_at("request", 3, anyhow!("{e}")))?;
    println!("step 2/4 request: GET {} (MessageID {})", demo.resource, pending.message_id);

    // Step 3: the encrypted response.
    let (n, _) = sock
        .recv_from(&mut buf)
        .map_err(|e| fail_at("response", 4, anyhow!("no response from producer: {e}")))?;
    let mut response_bytes = buf[..n].to_vec();
    if args.tamper {
        let idx = response_bytes.len() - 10;
        response_bytes[idx] ^= 0x40;
        println!("tamper: flipped one response byte");
    }
    let response = CoapMessage::decode(&response_bytes).map_err(|e| fail_at("response", 4, anyhow!("{e}")))?;
    println!(
        "step 3/4 response: {} with {} byte payload",
        response.code.dotted(),
        response.payload.len()
    );

    // Step 4: decrypt, decode the nested signed object, verify.
    let (payload, _ops) = consumer
        .accept_response(&response, 1)
        .map_err(|e| fail_at("verify", 5, anyhow!("{e}")))?;
    println!(
        "step 4/4 verify: signer {:?} capability {:?} ok, payload {} bytes",
        demo.producer_id,
        demo.capability,
        payload.len()
    );
    Ok(())
}
