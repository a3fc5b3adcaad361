//! Word-packed fixed-length binary genome.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

/// A fixed-length string of bits stored 64 to a word.
///
/// Bits past `len` in the last word are always zero, so word-level
/// popcounts and comparisons never see garbage.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawBitString", into = "RawBitString")]
pub struct BitString {
    len: usize,
    words: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct RawBitString {
    len: usize,
    words: Vec<u64>,
}

impl TryFrom<RawBitString> for BitString {
    type Error = Error;

    fn try_from(raw: RawBitString) -> Result<Self> {
        if raw.words.len() != words_for(raw.len) {
            return Err(Error::InvalidInput(format!(
                "{} words cannot hold exactly {} bits",
                raw.words.len(),
                raw.len
            )));
        }
        let s = BitString {
            len: raw.len,
            words: raw.words,
        };
        if s.words.last().is_some_and(|w| w & !s.tail_mask() != 0) {
            return Err(Error::InvalidInput(
                "bits set past the end of the string".into(),
            ));
        }
        Ok(s)
    }
}

impl From<BitString> for RawBitString {
    fn from(s: BitString) -> Self {
        RawBitString {
            len: s.len,
            words: s.words,
        }
    }
}

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        BitString {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut s = BitString {
            len,
            words: vec![u64::MAX; words_for(len)],
        };
        s.clear_tail();
        s
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut s = BitString::zeros(bits.len());
        for (i, _) in bits.iter().enumerate().filter(|(_, &b)| b) {
            s.set(i, true);
        }
        s
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, index: usize) -> bool {
        assert!(
            index < self.len,
            "bit index {index} out of range {}",
            self.len
        );
        (self.words[index / WORD_BITS] >> (index % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, index: usize, value: bool) {
        assert!(
            index < self.len,
            "bit index {index} out of range {}",
            self.len
        );
        let mask = 1u64 << (index % WORD_BITS);
        if value {
            self.words[index / WORD_BITS] |= mask;
        } else {
            self.words[index / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, index: usize) {
        assert!(
            index < self.len,
            "bit index {index} out of range {}",
            self.len
        );
        self.words[index / WORD_BITS] ^= 1u64 << (index % WORD_BITS);
    }

    /// Number of 1-bits.
    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn complement(&self) -> BitString {
        let mut out = BitString {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        out.clear_tail();
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    fn tail_mask(&self) -> u64 {
        match self.len % WORD_BITS {
            0 => u64::MAX,
            r => (1u64 << r) - 1,
        }
    }

    fn clear_tail(&mut self) {
        let mask = self.tail_mask();
        if let Some(last) = self.words.last_mut() {
            *last &= mask;
        }
    }
}

/// Number of positions where `a` and `b` differ.
pub fn hamming_distance(a: &BitString, b: &BitString) -> Result<usize> {
    if a.len != b.len {
        return Err(Error::LengthMismatch {
            expected: a.len,
            actual: b.len,
        });
    }
    Ok(a.words
        .iter()
        .zip(&b.words)
        .map(|(x, y)| (x ^ y).count_ones() as usize)
        .sum())
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for bit in self.iter() {
            f.write_str(if bit { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 128 {
            write!(f, "BitString({self})")
        } else {
            write!(f, "BitString(len={}, ones={})", self.len, self.count_ones())
        }
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidInput(format!("'{other}' is not a bit"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BitString::from_bools(&bits))
    }
}
