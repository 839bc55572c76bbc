//! MessageID duplicate detection.
//!
//! A bounded ring of recent (peer, MessageID) sightings. Running the check
//! before any key derivation is what couples replay protection to the
//! transfer layer: a duplicate request is answered by retransmitting the
//! cached prior response instead of encrypting afresh, so a derived key is
//! never reused for new content.

use std::collections::VecDeque;

/// 247 s, the EXCHANGE_LIFETIME-style window of RFC 7252.
pub const DEFAULT_DUP_SPAN_NS: u64 = 247 * 1_000_000_000;
/// Total sightings kept; constant in the number of peers.
pub const DUP_WINDOW_CAPACITY: usize = 32;

#[derive(Debug, Clone)]
struct Sighting {
    peer: String,
    message_id: u16,
    seen_at_ns: u64,
    response: Option<Vec<u8>>,
}

#[derive(Debug, Clone)]
pub struct DuplicateWindow {
    span_ns: u64,
    entries: VecDeque<Sighting>,
}

impl Default for DuplicateWindow {
    fn default() -> Self {
        DuplicateWindow::new(DEFAULT_DUP_SPAN_NS)
    }
}

impl DuplicateWindow {
    pub fn new(span_ns: u64) -> Self {
        DuplicateWindow { span_ns, entries: VecDeque::with_capacity(DUP_WINDOW_CAPACITY) }
    }

    /// True iff the same (peer, message_id) was seen within the span.
    /// Always records the sighting.
    pub fn check_duplicate(&mut self, peer: &str, message_id: u16, now_ns: u64) -> bool {
        let dup = self.entries.iter().any(|e| {
            e.peer == peer && e.message_id == message_id && now_ns.saturating_sub(e.seen_at_ns) <= self.span_ns
        });
        if self.entries.len() == DUP_WINDOW_CAPACITY {
            self.entries.pop_front();
        }
        self.entries.push_back(Sighting { peer: peer.to_string(), message_id, seen_at_ns: now_ns, response: None });
        dup
    }

    /// Attaches the encoded response to the newest sighting of
    /// (peer, message_id) so a duplicate can be answered byte-identically.
    pub fn record_response(&mut self, peer: &str, message_id: u16, response: Vec<u8>) {
        if let Some(e) = self
            .entries
            .iter_mut()
            .rev()
            .find(|e| e.peer == peer && e.message_id == message_id)
        {
            e.response = Some(response);
        }
    }

    /// The cached response for a duplicate, if still within the span.
    pub fn cached_response(&self, peer: &str, message_id: u16, now_ns: u64) -> Option<&[u8]> {
        self.entries
            .iter()
            .rev()
            .filter(|e| {
                e.peer == peer && e.message_id == message_id && now_ns.saturating_sub(e.seen_at_ns) <= self.span_ns
            })
            .find_map(|e| e.response.as_deref())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
