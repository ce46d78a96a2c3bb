//! MSB-first bit I/O with unsigned/signed Exp-Golomb codes.

use crate::CodecError;

#[derive(Debug, Default, Clone)]
pub struct BitWriter {
    buf: Vec<u8>,
    bit_len: usize,
}

impl BitWriter {
    pub fn new() -> Self {
        BitWriter::default()
    }

    #[inline]
    pub fn put_bit(&mut self, bit: bool) {
        let byte = self.bit_len / 8;
        if byte == self.buf.len() {
            self.buf.push(0);
        }
        if bit {
            self.buf[byte] |= 0x80 >> (self.bit_len % 8);
        }
        self.bit_len += 1;
    }

    /// Writes the low `n` bits of `v`, most significant first.
    pub fn put_bits(&mut self, v: u32, n: u32) {
        debug_assert!(n <= 32);
        for i in (0..n).rev() {
            self.put_bit(v >> i & 1 != 0);
        }
    }

    /// Unsigned Exp-Golomb.
    pub fn put_ue(&mut self, v: u32) {
        debug_assert!(v < u32::MAX);
        let code = v + 1;
        let len = 32 - code.leading_zeros();
        for _ in 0..len - 1 {
            self.put_bit(false);
        }
        self.put_bits(code, len);
    }

    /// Signed Exp-Golomb: 0, 1, -1, 2, -2, ...
    pub fn put_se(&mut self, v: i32) {
        self.put_ue(se_to_ue(v));
    }

    pub fn bit_len(&self) -> usize {
        self.bit_len
    }

    /// Appends another writer's bits.
    pub fn append(&mut self, other: &BitWriter) {
        for i in 0..other.bit_len {
            self.put_bit(other.buf[i / 8] & (0x80 >> (i % 8)) != 0);
        }
    }

    /// Pads with zero bits to a byte boundary and returns the buffer.
    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }
}

#[inline]
pub fn se_to_ue(v: i32) -> u32 {
    if v > 0 {
        (v as u32) * 2 - 1
    } else {
        (-(v as i64) as u32) * 2
    }
}

#[inline]
pub fn ue_to_se(code: u32) -> i32 {
    let half = code.div_ceil(2) as i64;
    if code % 2 == 1 {
        half as i32
    } else {
        (-half) as i32
    }
}

/// Bit length of ue(v).
#[inline]
pub fn ue_len(v: u32) -> u32 {
    let len = 32 - (v + 1).leading_zeros();
    2 * len - 1
}

#[inline]
pub fn se_len(v: i32) -> u32 {
    ue_len(se_to_ue(v))
}

pub struct BitReader<'a> {
    data: &'a [u8],
    pos: usize,
    limit: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        BitReader {
            data,
            pos: 0,
            limit: data.len() * 8,
        }
    }

    /// Restricts reads to the first `bits` bits.
    pub fn with_limit(data: &'a [u8], bits: usize) -> Self {
        BitReader {
            data,
            pos: 0,
            limit: bits.min(data.len() * 8),
        }
    }

    pub fn bits_read(&self) -> usize {
        self.pos
    }

    pub fn bits_left(&self) -> usize {
        self.limit - self.pos
    }

    #[inline]
    pub fn get_bit(&mut self) -> Result<bool, CodecError> {
        if self.pos >= self.limit {
            return Err(CodecError::Corrupt("read past end of stream"));
        }
        let b = self.data[self.pos / 8] & (0x80 >> (self.pos % 8)) != 0;
        self.pos += 1;
        Ok(b)
    }

    pub fn get_bits(&mut self, n: u32) -> Result<u32, CodecError> {
        debug_assert!(n <= 32);
        let mut v = 0u32;
        for _ in 0..n {
            v = v << 1 | self.get_bit()? as u32;
        }
        Ok(v)
    }

    pub fn get_ue(&mut self) -> Result<u32, CodecError> {
        let mut zeros = 0u32;
        while !self.get_bit()? {
            zeros += 1;
            if zeros > 31 {
                return Err(CodecError::Corrupt("exp-golomb prefix too long"));
            }
        }
        let rest = self.get_bits(zeros)?;
        Ok((1u32 << zeros) - 1 + rest)
    }

    pub fn get_se(&mut self) -> Result<i32, CodecError> {
        Ok(ue_to_se(self.get_ue()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ue_examples() {
        // classic table: 0 -> 1, 1 -> 010, 2 -> 011, 3 -> 00100
        let mut w = BitWriter::new();
        w.put_ue(0);
        w.put_ue(1);
        w.put_ue(2);
        w.put_ue(3);
        assert_eq!(w.bit_len(), 1 + 3 + 3 + 5);
        let bytes = w.into_bytes();
        let mut r = BitReader::new(&bytes);
        assert_eq!(r.get_ue().unwrap(), 0);
        assert_eq!(r.get_ue().unwrap(), 1);
        assert_eq!(r.get_ue().unwrap(), 2);
        assert_eq!(r.get_ue().unwrap(), 3);
    }

    #[test]
    fn ue_roundtrip_dense_and_large() {
        let mut w = BitWriter::new();
        for v in 0..=4096u32 {
            w.put_ue(v);
        }
        for k in 12..=20 {
            w.put_ue((1 << k) - 1);
            w.put_ue(1 << k);
        }
        let bytes = w.into_bytes();
        let mut r = BitReader::new(&bytes);
        for v in 0..=4096u32 {
            assert_eq!(r.get_ue().unwrap(), v);
        }
        for k in 12..=20 {
            assert_eq!(r.get_ue().unwrap(), (1 << k) - 1);
            assert_eq!(r.get_ue().unwrap(), 1 << k);
        }
    }

    #[test]
    fn se_mapping() {
        assert_eq!(se_to_ue(0), 0);
        assert_eq!(se_to_ue(1), 1);
        assert_eq!(se_to_ue(-1), 2);
        assert_eq!(se_to_ue(2), 3);
        assert_eq!(ue_to_se(0), 0);
        assert_eq!(ue_to_se(1), 1);
        assert_eq!(ue_to_se(2), -1);
        assert_eq!(ue_to_se(3), 2);
    }

    #[test]
    fn truncated_stream_errors() {
        let mut w = BitWriter::new();
        w.put_ue(70000);
        let bytes = w.into_bytes();
        let mut r = BitReader::with_limit(&bytes, 5);
        assert!(r.get_ue().is_err());
    }

    #[test]
    fn all_zero_prefix_errors() {
        let bytes = vec![0u8; 16];
        let mut r = BitReader::new(&bytes);
        assert!(matches!(r.get_ue(), Err(CodecError::Corrupt(_))));
    }

    proptest! {
        #[test]
        fn ue_len_matches_writer(v in 0u32..(1 << 20)) {
            let mut w = BitWriter::new();
            w.put_ue(v);
            prop_assert_eq!(w.bit_len() as u32, ue_len(v));
        }

        #[test]
        fn se_roundtrip(v in -(1i32 << 19)..(1i32 << 19)) {
            let mut w = BitWriter::new();
            w.put_se(v);
            prop_assert_eq!(w.bit_len() as u32, se_len(v));
            let bytes = w.into_bytes();
            let mut r = BitReader::new(&bytes);
            prop_assert_eq!(r.get_se().unwrap(), v);
        }
    }
}
