//! Finite binary words, packed MSB-first.
//!
//! `BitString` is the universal object type of the workbench: strings,
//! programs, encodings and conditions are all bit strings. Ordering is
//! canonical everywhere: shorter strings first, then lexicographic
//! (`0 < 1`) within a length.
//!
//! Wire form is `{len, hex}` where `hex` packs the bits MSB-first and
//! zero-pads on the right to a byte boundary. The pad bits are kept zero
//! internally so equality, hashing and serialization agree bit for bit.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BitsError {
    #[error("bit string literal may contain only '0' and '1', found {0:?}")]
    BadLiteral(char),
    #[error("invalid hex payload: {0}")]
    BadHex(String),
    #[error("hex payload length {got} bytes does not match len={len} bits")]
    LengthMismatch { len: usize, got: usize },
    #[error("pad bits past the declared length must be zero")]
    DirtyPadding,
    #[error("expected `len:hex`, got {0:?}")]
    BadWireFormat(String),
}

/// A finite sequence of bits. Empty is allowed.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    len: usize,
    bytes: Vec<u8>,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Bit at position `i` (0 = leftmost), as 0 or 1.
    pub fn bit(&self, i: usize) -> u8 {
        assert!(
            i < self.len,
            "bit index {i} out of range for len {}",
            self.len
        );
        (self.bytes[i / 8] >> (7 - (i % 8))) & 1
    }

    pub fn push(&mut self, bit: u8) {
        debug_assert!(bit <= 1);
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        if bit & 1 == 1 {
            let i = self.len;
            self.bytes[i / 8] |= 1 << (7 - (i % 8));
        }
        self.len += 1;
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        (0..self.len).map(move |i| self.bit(i))
    }

    pub fn from_bits<I: IntoIterator<Item = u8>>(bits: I) -> Self {
        let mut out = Self::new();
        for b in bits {
            out.push(b);
        }
        out
    }

    /// Append all bits of `other`.
    pub fn extend_bits(&mut self, other: &BitString) {
        for b in other.iter() {
            self.push(b);
        }
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut out = self.clone();
        out.extend_bits(other);
        out
    }

    /// The `len` low bits of `value`, most significant first.
    /// `from_u64_msb(0b0110, 4)` is the string `0110`.
    pub fn from_u64_msb(value: u64, len: usize) -> Self {
        assert!(len <= 64);
        let mut out = Self::new();
        for i in (0..len).rev() {
            out.push(((value >> i) & 1) as u8);
        }
        out
    }

    /// Parse a `0`/`1` literal such as `"0110"`.
    pub fn from_binary_str(s: &str) -> Result<Self, BitsError> {
        let mut out = Self::new();
        for c in s.chars() {
            match c {
                '0' => out.push(0),
                '1' => out.push(1),
                other => return Err(BitsError::BadLiteral(other)),
            }
        }
        Ok(out)
    }

    pub fn binary_string(&self) -> String {
        self.iter()
            .map(|b| if b == 1 { '1' } else { '0' })
            .collect()
    }

    /// Hex of the packed bytes (MSB-first, right-padded with zero bits).
    pub fn hex(&self) -> String {
        hex::encode(&self.bytes)
    }

    pub fn from_len_hex(len: usize, hex_str: &str) -> Result<Self, BitsError> {
        let bytes = hex::decode(hex_str).map_err(|e| BitsError::BadHex(e.to_string()))?;
        if bytes.len() != len.div_ceil(8) {
            return Err(BitsError::LengthMismatch {
                len,
                got: bytes.len(),
            });
        }
        // Reject dirty pad bits so every (len, bytes) pair has one canonical form.
        if !len.is_multiple_of(8) && !bytes.is_empty() {
            let mask = 0xffu8 >> (len % 8);
            if bytes[bytes.len() - 1] & mask != 0 {
                return Err(BitsError::DirtyPadding);
            }
        }
        Ok(Self { len, bytes })
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.len, self.hex())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b\"{}\"", self.binary_string())
    }
}

impl FromStr for BitString {
    type Err = BitsError;

    /// Parses the wire form `len:hex`, e.g. `4:60` for `0110` and `0:` for
    /// the empty string.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (len_part, hex_part) = s
            .split_once(':')
            .ok_or_else(|| BitsError::BadWireFormat(s.to_string()))?;
        let len: usize = len_part
            .trim()
            .parse()
            .map_err(|_| BitsError::BadWireFormat(s.to_string()))?;
        Self::from_len_hex(len, hex_part.trim())
    }
}

/// Serde facade matching the `{len, hex}` record used by every file format.
#[derive(Serialize, Deserialize)]
struct WireBits {
    len: usize,
    hex: String,
}

impl Serialize for BitString {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        WireBits {
            len: self.len,
            hex: self.hex(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = WireBits::deserialize(deserializer)?;
        BitString::from_len_hex(wire.len, &wire.hex).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        BitString::from_binary_str(s).unwrap()
    }

    #[test]
    fn empty_round_trips() {
        let e = BitString::new();
        assert_eq!(e.len(), 0);
        assert_eq!(e.hex(), "");
        assert_eq!(e.to_string(), "0:");
        assert_eq!("0:".parse::<BitString>().unwrap(), e);
    }

    #[test]
    fn packing_is_msb_first() {
        let b = bs("0110");
        assert_eq!(b.hex(), "60");
        assert_eq!(b.to_string(), "4:60");
        assert_eq!(bs("0001110110").hex(), "1d80");
    }

    #[test]
    fn bit_access_matches_literal() {
        let b = bs("10110001");
        let got: Vec<u8> = b.iter().collect();
        assert_eq!(got, vec![1, 0, 1, 1, 0, 0, 0, 1]);
        assert_eq!(b.bit(0), 1);
        assert_eq!(b.bit(7), 1);
    }

    #[test]
    fn canonical_order_is_length_then_lex() {
        let mut v = [bs("1"), bs("00"), bs("0"), BitString::new(), bs("01")];
        v.sort();
        let got: Vec<String> = v.iter().map(|b| b.binary_string()).collect();
        assert_eq!(got, vec!["", "0", "1", "00", "01"]);
    }

    #[test]
    fn u64_msb_matches_literal() {
        assert_eq!(BitString::from_u64_msb(0b0110, 4), bs("0110"));
        assert_eq!(BitString::from_u64_msb(0, 0), BitString::new());
        assert_eq!(BitString::from_u64_msb(1, 3), bs("001"));
    }

    #[test]
    fn dirty_padding_is_rejected() {
        // len 4 with low nibble set cannot be a canonical packing.
        assert_eq!(
            BitString::from_len_hex(4, "61"),
            Err(BitsError::DirtyPadding)
        );
        assert!(BitString::from_len_hex(4, "60").is_ok());
    }

    #[test]
    fn wire_parse_errors() {
        assert!(matches!(
            "junk".parse::<BitString>(),
            Err(BitsError::BadWireFormat(_))
        ));
        assert!(matches!(
            "4:6".parse::<BitString>(),
            Err(BitsError::BadHex(_))
        ));
        assert!(matches!(
            "9:60".parse::<BitString>(),
            Err(BitsError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn serde_wire_shape() {
        let b = bs("0110");
        let json = serde_json::to_string(&b).unwrap();
        assert_eq!(json, r#"{"len":4,"hex":"60"}"#);
        let back: BitString = serde_json::from_str(&json).unwrap();
        assert_eq!(back, b);
    }
}
