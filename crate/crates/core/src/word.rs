//! Finite words over an alphabet of at most 64 symbols.
//!
//! Words print as one character per symbol: `0-9`, then `a-z`, `A-Z`, `_`, `-`.
//! Alphabets with at most ten symbols therefore read as plain digit strings.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

const DIGITS: &[u8; 64] = b"0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_-";

pub fn symbol_char(s: u8) -> char {
    DIGITS[s as usize] as char
}

pub fn char_symbol(c: char) -> Option<u8> {
    DIGITS.iter().position(|&d| d as char == c).map(|p| p as u8)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn new(symbols: Vec<u8>) -> Self {
        Word(symbols)
    }

    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| char_symbol(c).ok_or_else(|| Error::InvalidInput(format!("bad symbol {c:?}"))))
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.0 {
            write!(f, "{}", symbol_char(s))?;
        }
        Ok(())
    }
}

impl From<&[u8]> for Word {
    fn from(s: &[u8]) -> Self {
        Word(s.to_vec())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Word::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Smallest `d` dividing `w.len()` with `w` invariant under rotation by `d`.
pub fn primitive_period(w: &[u8]) -> usize {
    let n = w.len();
    (1..=n)
        .filter(|&d| n.is_multiple_of(d))
        .find(|&d| (0..n).all(|i| w[i] == w[(i + d) % n]))
        .unwrap_or(n)
}

/// Lexicographically least rotation.
pub fn canonical_rotation(w: &[u8]) -> Vec<u8> {
    let n = w.len();
    if n == 0 {
        return Vec::new();
    }
    let best = (0..n)
        .min_by(|&a, &b| (0..n).map(|i| w[(a + i) % n]).cmp((0..n).map(|i| w[(b + i) % n])))
        .unwrap_or(0);
    rotate(w, best)
}

pub fn rotate(w: &[u8], by: usize) -> Vec<u8> {
    let n = w.len();
    (0..n).map(|i| w[(by + i) % n]).collect()
}

/// True when `needle` occurs as a cyclic factor of `cycle` (wrapping as often as needed).
pub fn contains_cyclic_factor(cycle: &[u8], needle: &[u8]) -> bool {
    cyclic_factor_position(cycle, needle).is_some()
}

pub fn cyclic_factor_position(cycle: &[u8], needle: &[u8]) -> Option<usize> {
    let n = cycle.len();
    if n == 0 {
        return if needle.is_empty() { Some(0) } else { None };
    }
    (0..n).find(|&start| needle.iter().enumerate().all(|(k, &s)| cycle[(start + k) % n] == s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codec_roundtrip_for_large_alphabet() {
        let w = Word((0..64).collect());
        assert_eq!(Word::parse(&w.to_string()).unwrap(), w);
        assert!(Word::parse("0!").is_err());
    }

    #[test]
    fn periods_and_rotations() {
        assert_eq!(primitive_period(&[0, 1, 0, 1]), 2);
        assert_eq!(primitive_period(&[0, 0, 1]), 3);
        assert_eq!(canonical_rotation(&[1, 0, 0]), vec![0, 0, 1]);
        assert!(contains_cyclic_factor(&[0, 1], &[1, 0, 1, 0]));
        assert!(!contains_cyclic_factor(&[0, 0, 1], &[1, 1]));
    }
}
