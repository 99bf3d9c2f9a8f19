//! Shared binary primitives: fixed-width big-endian integers and
//! u32-length-prefixed byte strings. Every on-chain and on-disk encoding in
//! this crate is built from these so that hashes are bit-stable across runs.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("unexpected end of input at byte {0}")]
    UnexpectedEof(usize),
    #[error("{0} trailing bytes after decode")]
    TrailingBytes(usize),
    #[error("string field is not valid utf-8")]
    InvalidUtf8,
}

pub fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_be_bytes());
}

pub fn put_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_be_bytes());
}

pub fn put_bytes(out: &mut Vec<u8>, b: &[u8]) {
    put_u32(out, b.len() as u32);
    out.extend_from_slice(b);
}

pub fn put_str(out: &mut Vec<u8>, s: &str) {
    put_bytes(out, s.as_bytes());
}

/// Cursor over an encoded buffer. Reads advance; `finish` rejects leftovers.
pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    pub fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], CodecError> {
        if self.remaining() < n {
            return Err(CodecError::UnexpectedEof(self.pos));
        }
        let slice = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    pub fn read_u32(&mut self) -> Result<u32, CodecError> {
        let b = self.take(4)?;
        Ok(u32::from_be_bytes(b.try_into().unwrap()))
    }

    pub fn read_u64(&mut self) -> Result<u64, CodecError> {
        let b = self.take(8)?;
        Ok(u64::from_be_bytes(b.try_into().unwrap()))
    }

    pub fn read_array32(&mut self) -> Result<[u8; 32], CodecError> {
        let b = self.take(32)?;
        Ok(b.try_into().unwrap())
    }

    pub fn read_bytes(&mut self) -> Result<&'a [u8], CodecError> {
        let len = self.read_u32()? as usize;
        self.take(len)
    }

    pub fn read_string(&mut self) -> Result<String, CodecError> {
        let b = self.read_bytes()?;
        String::from_utf8(b.to_vec()).map_err(|_| CodecError::InvalidUtf8)
    }

    pub fn finish(self) -> Result<(), CodecError> {
        if self.remaining() != 0 {
            return Err(CodecError::TrailingBytes(self.remaining()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_mixed_fields() {
        let mut buf = Vec::new();
        put_u64(&mut buf, 1522257730000);
        put_str(&mut buf, "read");
        put_bytes(&mut buf, &[0xde, 0xad]);
        put_u32(&mut buf, 7);

        let mut r = Reader::new(&buf);
        assert_eq!(r.read_u64().unwrap(), 1522257730000);
        assert_eq!(r.read_string().unwrap(), "read");
        assert_eq!(r.read_bytes().unwrap(), &[0xde, 0xad]);
        assert_eq!(r.read_u32().unwrap(), 7);
        r.finish().unwrap();
    }

    #[test]
    fn eof_and_trailing_are_rejected() {
        let mut buf = Vec::new();
        put_u32(&mut buf, 9);
        let mut r = Reader::new(&buf);
        assert!(matches!(r.read_u64(), Err(CodecError::UnexpectedEof(_))));

        let mut r = Reader::new(&buf);
        r.read_u32().unwrap();
        // extend with junk to exercise TrailingBytes
        let mut buf2 = buf.clone();
        buf2.push(0);
        let mut r2 = Reader::new(&buf2);
        r2.read_u32().unwrap();
        assert_eq!(r2.finish(), Err(CodecError::TrailingBytes(1)));
        r.finish().unwrap();
    }

    #[test]
    fn bad_utf8_is_rejected() {
        let mut buf = Vec::new();
        put_bytes(&mut buf, &[0xff, 0xfe]);
        let mut r = Reader::new(&buf);
        assert_eq!(r.read_string(), Err(CodecError::InvalidUtf8));
    }
}
