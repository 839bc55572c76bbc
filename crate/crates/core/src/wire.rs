//! Small byte-level reader shared by the fixed-order codecs.

/// Cursor over an immutable byte slice. Every read is bounds-checked and
/// reports the field name that was being parsed.
pub(crate) struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    pub(crate) fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.remaining() == 0
    }

    pub(crate) fn u8(&mut self, field: &'static str) -> Result<u8, &'static str> {
        let b = *self.buf.get(self.pos).ok_or(field)?;
        self.pos += 1;
        Ok(b)
    }

    pub(crate) fn u16_be(&mut self, field: &'static str) -> Result<u16, &'static str> {
        let bytes = self.bytes(2, field)?;
        Ok(u16::from_be_bytes([bytes[0], bytes[1]]))
    }

    pub(crate) fn u64_be(&mut self, field: &'static str) -> Result<u64, &'static str> {
        let bytes = self.bytes(8, field)?;
        let mut arr = [0u8; 8];
        arr.copy_from_slice(bytes);
        Ok(u64::from_be_bytes(arr))
    }

    pub(crate) fn bytes(&mut self, n: usize, field: &'static str) -> Result<&'a [u8], &'static str> {
        if self.remaining() < n {
            return Err(field);
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    /// Consumes and returns everything left in the buffer.
    pub(crate) fn take_rest(&mut self) -> &'a [u8] {
        let out = &self.buf[self.pos..];
        self.pos = self.buf.len();
        out
    }
}
