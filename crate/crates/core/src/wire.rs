//! Framed binary encoding shared by every on-disk and on-the-wire format.
//!
//! Each format starts with a 4-byte magic and a u16 version, followed by
//! format-specific fields. Integers are little-endian; variable-size chunks
//! are u32-length-prefixed. Encodings are canonical: a value has exactly one
//! byte representation, which lets Fiat-Shamir hashes cover serialized bytes
//! directly.

use crate::pairing::{
    g1_from_bytes, g1_to_bytes, g2_from_bytes, g2_to_bytes, gt_from_bytes, gt_to_bytes,
    scalar_from_bytes, scalar_to_bytes, Scalar, G1, G2, Gt,
};

/// Current version written into every header.
pub const FORMAT_VERSION: u16 = 1;

pub const MAGIC_PARAMS: [u8; 4] = *b"TCPP";
pub const MAGIC_ISSUER_SECRET: [u8; 4] = *b"TCSK";
pub const MAGIC_PROVIDER_STORE: [u8; 4] = *b"TCPS";
pub const MAGIC_SIGNATURE: [u8; 4] = *b"TCSG";
pub const MAGIC_ENDPOINT: [u8; 4] = *b"TCEC";
pub const MAGIC_PROOF: [u8; 4] = *b"TCPF";

/// Errors raised when decoding framed binary data.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WireError {
    #[error("buffer too short: need {need} more bytes at offset {offset}")]
    UnexpectedEof { offset: usize, need: usize },
    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: [u8; 4], found: [u8; 4] },
    #[error("unsupported format version {0}")]
    BadVersion(u16),
    #[error("invalid group element at offset {0}")]
    BadElement(usize),
    #[error("{0}")]
    Invalid(String),
    #[error("{extra} trailing bytes after decoding")]
    TrailingBytes { extra: usize },
}

/// Append-only canonical encoder.
#[derive(Default)]
pub struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_header(magic: [u8; 4]) -> Self {
        let mut w = Self::new();
        w.buf.extend_from_slice(&magic);
        w.put_u16(FORMAT_VERSION);
        w
    }

    pub fn put_u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn put_u16(&mut self, v: u16) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn put_u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn put_u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    /// u32-length-prefixed byte chunk.
    pub fn put_bytes(&mut self, v: &[u8]) {
        self.put_u32(v.len() as u32);
        self.buf.extend_from_slice(v);
    }

    pub fn put_str(&mut self, v: &str) {
        self.put_bytes(v.as_bytes());
    }

    pub fn put_scalar(&mut self, v: &Scalar) {
        self.buf.extend_from_slice(&scalar_to_bytes(v));
    }

    pub fn put_g1(&mut self, v: &G1) {
        self.buf.extend_from_slice(&g1_to_bytes(v));
    }

    pub fn put_g2(&mut self, v: &G2) {
        self.buf.extend_from_slice(&g2_to_bytes(v));
    }

    pub fn put_gt(&mut self, v: &Gt) {
        self.buf.extend_from_slice(&gt_to_bytes(v));
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.buf
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }
}

/// Cursor-based decoder matching [`Writer`].
pub struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }

    /// Checks magic and version, positioning the cursor after the header.
    pub fn expect_header(data: &'a [u8], magic: [u8; 4]) -> Result<Self, WireError> {
        let mut r = Self::new(data);
        let found = r.take(4)?;
        let found: [u8; 4] = found.try_into().expect("take(4) returns 4 bytes");
        if found != magic {
            return Err(WireError::BadMagic {
                expected: magic,
                found,
            });
        }
        let version = r.get_u16()?;
        if version != FORMAT_VERSION {
            return Err(WireError::BadVersion(version));
        }
        Ok(r)
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], WireError> {
        if self.data.len() - self.pos < n {
            return Err(WireError::UnexpectedEof {
                offset: self.pos,
                need: n - (self.data.len() - self.pos),
            });
        }
        let out = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    pub fn get_u8(&mut self) -> Result<u8, WireError> {
        Ok(self.take(1)?[0])
    }

    pub fn get_u16(&mut self) -> Result<u16, WireError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    pub fn get_u32(&mut self) -> Result<u32, WireError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub fn get_u64(&mut self) -> Result<u64, WireError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn get_bytes(&mut self) -> Result<&'a [u8], WireError> {
        let len = self.get_u32()? as usize;
        self.take(len)
    }

    pub fn get_str(&mut self) -> Result<String, WireError> {
        let raw = self.get_bytes()?;
        String::from_utf8(raw.to_vec()).map_err(|_| WireError::Invalid("non-utf8 string".into()))
    }

    pub fn get_scalar(&mut self) -> Result<Scalar, WireError> {
        let at = self.pos;
        scalar_from_bytes(self.take(32)?).map_err(|_| WireError::BadElement(at))
    }

    pub fn get_g1(&mut self) -> Result<G1, WireError> {
        let at = self.pos;
        g1_from_bytes(self.take(48)?).map_err(|_| WireError::BadElement(at))
    }

    pub fn get_g2(&mut self) -> Result<G2, WireError> {
        let at = self.pos;
        g2_from_bytes(self.take(96)?).map_err(|_| WireError::BadElement(at))
    }

    pub fn get_gt(&mut self) -> Result<Gt, WireError> {
        let at = self.pos;
        gt_from_bytes(self.take(576)?).map_err(|_| WireError::BadElement(at))
    }

    /// Fails unless the cursor consumed the whole buffer.
    pub fn finish(self) -> Result<(), WireError> {
        if self.pos != self.data.len() {
            return Err(WireError::TrailingBytes {
                extra: self.data.len() - self.pos,
            });
        }
        Ok(())
    }

    pub fn remaining(&self) -> usize {
        self.data.len() - self.pos
    }
}
