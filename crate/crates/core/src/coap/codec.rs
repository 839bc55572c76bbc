//! RFC 7252 message codec (subset).

use crate::wire::Reader;
use thiserror::Error;

pub const MAX_TOKEN_LEN: usize = 8;
/// Uri-Path, RFC 7252 §5.10.
pub const OPTION_URI_PATH: u16 = 11;
/// Accept-cipher: suite preference list, experimental-use number space.
pub const OPTION_ACCEPT_CIPHER: u16 = 65001;
pub const MAX_ACCEPT_CIPHER_SUITES: usize = 8;

const COAP_VERSION: u8 = 1;
const PAYLOAD_MARKER: u8 = 0xFF;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum CoapError {
    #[error("malformed message: {0}")]
    Malformed(&'static str),
    #[error("token longer than {MAX_TOKEN_LEN} bytes")]
    TokenTooLong,
    #[error("more than {MAX_ACCEPT_CIPHER_SUITES} suites in accept option")]
    TooManySuites,
    #[error("empty suite list")]
    EmptySuites,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MessageType {
    Confirmable,
    NonConfirmable,
    Ack,
    Reset,
}

impl MessageType {
    fn to_bits(self) -> u8 {
        match self {
            MessageType::Confirmable => 0,
            MessageType::NonConfirmable => 1,
            MessageType::Ack => 2,
            MessageType::Reset => 3,
        }
    }

    fn from_bits(bits: u8) -> Self {
        match bits & 0x3 {
            0 => MessageType::Confirmable,
            1 => MessageType::NonConfirmable,
            2 => MessageType::Ack,
            _ => MessageType::Reset,
        }
    }
}

/// The request/response codes used by this artifact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Code {
    Get,
    Put,
    /// 2.05
    Content,
    /// 2.04
    Changed,
    /// 4.01
    Unauthorized,
    /// 4.02
    BadOption,
    /// 4.06
    NotAcceptable,
}

impl Code {
    pub fn to_byte(self) -> u8 {
        match self {
            Code::Get => 0x01,
            Code::Put => 0x03,
            Code::Changed => 0x44,
            Code::Content => 0x45,
            Code::Unauthorized => 0x81,
            Code::BadOption => 0x82,
            Code::NotAcceptable => 0x86,
        }
    }

    pub fn from_byte(b: u8) -> Result<Self, CoapError> {
        match b {
            0x01 => Ok(Code::Get),
            0x03 => Ok(Code::Put),
            0x44 => Ok(Code::Changed),
            0x45 => Ok(Code::Content),
            0x81 => Ok(Code::Unauthorized),
            0x82 => Ok(Code::BadOption),
            0x86 => Ok(Code::NotAcceptable),
            _ => Err(CoapError::Malformed("unknown code")),
        }
    }

    pub fn is_request(self) -> bool {
        matches!(self, Code::Get | Code::Put)
    }

    /// Dotted display form, e.g. `2.05`.
    pub fn dotted(self) -> String {
        let b = self.to_byte();
        format!("{}.{:02}", b >> 5, b & 0x1F)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoapOption {
    pub number: u16,
    pub value: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoapMessage {
    pub mtype: MessageType,
    pub code: Code,
    pub message_id: u16,
    pub token: Vec<u8>,
    /// Kept sorted ascending by number on the wire; the encoder sorts.
    pub options: Vec<CoapOption>,
    pub payload: Vec<u8>,
}

impl CoapMessage {
    pub fn new(mtype: MessageType, code: Code, message_id: u16) -> Self {
        CoapMessage { mtype, code, message_id, token: Vec::new(), options: Vec::new(), payload: Vec::new() }
    }

    pub fn with_token(mut self, token: Vec<u8>) -> Self {
        self.token = token;
        self
    }

    pub fn add_option(&mut self, number: u16, value: Vec<u8>) {
        self.options.push(CoapOption { number, value });
    }

    /// Adds one Uri-Path option per path segment.
    pub fn add_uri_path(&mut self, path: &str) {
        for segment in path.split('/').filter(|s| !s.is_empty()) {
            self.add_option(OPTION_URI_PATH, segment.as_bytes().to_vec());
        }
    }

    /// Reassembles the Uri-Path options into a `/`-joined path.
    pub fn uri_path(&self) -> String {
        let mut path = String::new();
        for opt in self.options.iter().filter(|o| o.number == OPTION_URI_PATH) {
            path.push('/');
            path.push_str(&String::from_utf8_lossy(&opt.value));
        }
        path
    }

    /// First option with the given number.
    pub fn option(&self, number: u16) -> Option<&[u8]> {
        self.options.iter().find(|o| o.number == number).map(|o| o.value.as_slice())
    }

    /// Critical options (odd numbers, RFC 7252 §5.4.1) not in `known`;
    /// the caller answers 4.02 when this is non-empty on a request.
    pub fn unknown_critical_options(&self, known: &[u16]) -> Vec<u16> {
        let mut out: Vec<u16> = self
            .options
            .iter()
            .map(|o| o.number)
            .filter(|n| n % 2 == 1 && !known.contains(n))
            .collect();
        out.dedup();
        out
    }

    /// Copy with options in canonical (sorted) order. Sorting is stable, so
    /// repeated options such as Uri-Path segments keep their order.
    pub fn normalized(&self) -> Self {
        let mut msg = self.clone();
        msg.options.sort_by_key(|o| o.number);
        msg
    }

    pub fn encode(&self) -> Result<Vec<u8>, CoapError> {
        if self.token.len() > MAX_TOKEN_LEN {
            return Err(CoapError::TokenTooLong);
        }
        let mut sorted = self.options.clone();
        sorted.sort_by_key(|o| o.number);

        let mut out = Vec::with_capacity(8 + self.payload.len());
        out.push((COAP_VERSION << 6) | (self.mtype.to_bits() << 4) | (self.token.len() as u8));
        out.push(self.code.to_byte());
        out.extend_from_slice(&self.message_id.to_be_bytes());
        out.extend_from_slice(&self.token);

        let mut prev = 0u16;
        for opt in &sorted {
            let delta = (opt.number - prev) as u32;
            let len = opt.value.len() as u32;
            if len > 65535 + 269 {
                return Err(CoapError::Malformed("option value too long"));
            }
            let (dn, dext) = nibble_split(delta);
            let (ln, lext) = nibble_split(len);
            out.push((dn << 4) | ln);
            out.extend_from_slice(&dext);
            out.extend_from_slice(&lext);
            out.extend_from_slice(&opt.value);
            prev = opt.number;
        }
        if !self.payload.is_empty() {
            out.push(PAYLOAD_MARKER);
            out.extend_from_slice(&self.payload);
        }
        Ok(out)
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, CoapError> {
        let mut r = Reader::new(bytes);
        let b0 = r.u8("header").map_err(CoapError::Malformed)?;
        if b0 >> 6 != COAP_VERSION {
            return Err(CoapError::Malformed("unsupported version"));
        }
        let mtype = MessageType::from_bits(b0 >> 4);
        let tkl = (b0 & 0x0F) as usize;
        if tkl > MAX_TOKEN_LEN {
            return Err(CoapError::Malformed("reserved token length"));
        }
        let code = Code::from_byte(r.u8("code").map_err(CoapError::Malformed)?)?;
        let message_id = r.u16_be("message id").map_err(CoapError::Malformed)?;
        let token = r.bytes(tkl, "token").map_err(CoapError::Malformed)?.to_vec();

        let mut options = Vec::new();
        let mut payload = Vec::new();
        let mut prev = 0u32;
        while !r.is_empty() {
            let b = r.u8("option header").map_err(CoapError::Malformed)?;
            if b == PAYLOAD_MARKER {
                if r.is_empty() {
                    return Err(CoapError::Malformed("payload marker with empty payload"));
                }
                payload = r.take_rest().to_vec();
                break;
            }
            let delta = nibble_read(&mut r, b >> 4, "option delta")?;
            let len = nibble_read(&mut r, b & 0x0F, "option length")? as usize;
            prev += delta;
            if prev > u16::MAX as u32 {
                return Err(CoapError::Malformed("option number overflow"));
            }
            let value = r.bytes(len, "option value").map_err(CoapError::Malformed)?.to_vec();
            options.push(CoapOption { number: prev as u16, value });
        }

        Ok(CoapMessage { mtype, code, message_id, token, options, payload })
    }
}

fn nibble_split(value: u32) -> (u8, Vec<u8>) {
    match value {
        0..=12 => (value as u8, Vec::new()),
        13..=268 => (13, vec![(value - 13) as u8]),
        _ => (14, ((value - 269) as u16).to_be_bytes().to_vec()),
    }
}

fn nibble_read(r: &mut Reader<'_>, nibble: u8, field: &'static str) -> Result<u32, CoapError> {
    match nibble {
        0..=12 => Ok(nibble as u32),
        13 => Ok(r.u8(field).map_err(CoapError::Malformed)? as u32 + 13),
        14 => Ok(r.u16_be(field).map_err(CoapError::Malformed)? as u32 + 269),
        _ => Err(CoapError::Malformed("reserved nibble 15")),
    }
}

/// Builds the Accept-cipher option: one byte per suite id, most preferred
/// first.
pub fn make_accept_cipher_option(suites: &[u8]) -> Result<CoapOption, CoapError> {
    if suites.is_empty() {
        return Err(CoapError::EmptySuites);
    }
    if suites.len() > MAX_ACCEPT_CIPHER_SUITES {
        return Err(CoapError::TooManySuites);
    }
    Ok(CoapOption { number: OPTION_ACCEPT_CIPHER, value: suites.to_vec() })
}

/// Server-side choice: the client's most preferred suite the server
/// supports, or `None` (answer 4.06).
pub fn negotiate_suite(supported: &[u8], client_preference: &[u8]) -> Option<u8> {
    client_preference.iter().copied().find(|s| supported.contains(s))
}
