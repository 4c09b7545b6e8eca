//! Canonical encodings for words and finite sets.
//!
//! A word is encoded by doubling each bit (`0 -> 00`, `1 -> 11`) and
//! appending the terminator `01`. A set is the concatenation of its
//! elements' encodings in canonical order (length, then lexicographic),
//! followed by the list terminator `10`. The pairs `00`/`11` never collide
//! with the terminators, so the stream is decodable without lookahead and
//! short machine programs can produce it.
//!
//! A program *describes* a set only through this exact canonical encoding:
//! permuted or duplicated listings do not count. That makes the measured
//! description complexity of a set a well-defined minimum.

use crate::bits::BitString;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("malformed set encoding (bad pair or missing terminator)")]
    MalformedEncoding,
    #[error("well-formed but non-canonical listing (unsorted or duplicate elements)")]
    NonCanonical,
    #[error("a set model must have at least one element")]
    EmptySet,
}

/// A non-empty finite set of bit strings in canonical order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiniteSetModel {
    elements: Vec<BitString>,
}

impl FiniteSetModel {
    /// Build from an element list, sorting and deduplicating.
    pub fn canonicalize(words: &[BitString]) -> Result<Self, CodecError> {
        if words.is_empty() {
            return Err(CodecError::EmptySet);
        }
        let mut elements = words.to_vec();
        elements.sort();
        elements.dedup();
        Ok(FiniteSetModel { elements })
    }

    pub fn singleton(word: BitString) -> Self {
        FiniteSetModel {
            elements: vec![word],
        }
    }

    pub fn elements(&self) -> &[BitString] {
        &self.elements
    }

    pub fn cardinality(&self) -> usize {
        self.elements.len()
    }

    /// `log2` of the cardinality, as a real.
    pub fn log_size(&self) -> f64 {
        (self.elements.len() as f64).log2()
    }

    pub fn contains(&self, x: &BitString) -> bool {
        self.elements.binary_search(x).is_ok()
    }

    pub fn max_element_len(&self) -> usize {
        self.elements.iter().map(|e| e.len()).max().unwrap_or(0)
    }
}

/// See [`FiniteSetModel::canonicalize`].
pub fn canonicalize(words: &[BitString]) -> Result<FiniteSetModel, CodecError> {
    FiniteSetModel::canonicalize(words)
}

/// Double every bit and append the `01` terminator.
/// Output length is exactly `2*len(w) + 2`.
pub fn encode_element(w: &BitString) -> BitString {
    let mut out = BitString::new();
    for b in w.iter() {
        out.push(b);
        out.push(b);
    }
    out.push(0);
    out.push(1);
    out
}

/// Concatenate the canonical elements' encodings and append `10`.
pub fn encode_set(s: &FiniteSetModel) -> BitString {
    let mut out = BitString::new();
    for e in s.elements() {
        out.extend_bits(&encode_element(e));
    }
    out.push(1);
    out.push(0);
    out
}

/// Exact inverse of [`encode_set`]: succeeds only on canonical encodings.
pub fn decode_set(bits: &BitString) -> Result<FiniteSetModel, CodecError> {
    let mut elements: Vec<BitString> = Vec::new();
    let mut pos = 0usize;
    loop {
        if pos + 2 > bits.len() {
            return Err(CodecError::MalformedEncoding);
        }
        let pair = (bits.bit(pos), bits.bit(pos + 1));
        pos += 2;
        if pair == (1, 0) {
            // List terminator; nothing may follow.
            if pos != bits.len() {
                return Err(CodecError::MalformedEncoding);
            }
            break;
        }
        // Element starting with the pair just read.
        let mut word = BitString::new();
        let mut cur = pair;
        loop {
            match cur {
                (0, 0) => word.push(0),
                (1, 1) => word.push(1),
                (0, 1) => break,
                (1, 0) => return Err(CodecError::MalformedEncoding),
                _ => unreachable!(),
            }
            if pos + 2 > bits.len() {
                return Err(CodecError::MalformedEncoding);
            }
            cur = (bits.bit(pos), bits.bit(pos + 1));
            pos += 2;
        }
        elements.push(word);
    }
    if elements.is_empty() {
        return Err(CodecError::EmptySet);
    }
    for w in elements.windows(2) {
        if w[0] >= w[1] {
            return Err(CodecError::NonCanonical);
        }
    }
    Ok(FiniteSetModel { elements })
}
