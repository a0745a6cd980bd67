//! Bit strings: finite sequences of 0/1 symbols where `0` and `00` are
//! distinct values. The canonical text rendering is the literal 0/1
//! character string, with `-` standing for the empty string so that
//! line-oriented formats stay parseable.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::Error;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitString {
    bits: Vec<u8>,
}

impl BitString {
    pub fn empty() -> Self {
        BitString { bits: Vec::new() }
    }

    /// Builds from a slice of 0/1 values. Panics on other values.
    pub fn from_bits(bits: &[u8]) -> Self {
        assert!(bits.iter().all(|&b| b <= 1), "bits must be 0 or 1");
        BitString {
            bits: bits.to_vec(),
        }
    }

    /// Big-endian encoding of `value` in exactly `width` bits.
    /// Panics if the value does not fit.
    pub fn from_value(value: u128, width: usize) -> Self {
        assert!(
            width >= 128 - value.leading_zeros() as usize,
            "value {value} does not fit in {width} bits"
        );
        let mut bits = Vec::with_capacity(width);
        for i in (0..width).rev() {
            bits.push(((value >> i) & 1) as u8);
        }
        BitString { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, i: usize) -> u8 {
        self.bits[i]
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn push(&mut self, bit: u8) {
        assert!(bit <= 1);
        self.bits.push(bit);
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut bits = Vec::with_capacity(self.len() + other.len());
        bits.extend_from_slice(&self.bits);
        bits.extend_from_slice(&other.bits);
        BitString { bits }
    }

    /// All-same-bit string of the given length.
    pub fn repeated(bit: u8, len: usize) -> Self {
        assert!(bit <= 1);
        BitString {
            bits: vec![bit; len],
        }
    }

    pub fn starts_with(&self, prefix: &BitString) -> bool {
        self.bits.len() >= prefix.bits.len() && self.bits[..prefix.bits.len()] == prefix.bits[..]
    }

    /// The suffix after removing `n` leading bits. Panics if too short.
    pub fn suffix_from(&self, n: usize) -> BitString {
        BitString {
            bits: self.bits[n..].to_vec(),
        }
    }

    /// Big-endian natural number value. None when longer than 127 bits.
    pub fn value(&self) -> Option<u128> {
        if self.bits.len() > 127 {
            return None;
        }
        let mut v: u128 = 0;
        for &b in &self.bits {
            v = (v << 1) | b as u128;
        }
        Some(v)
    }

    /// Big-endian value modulo `m`, computed by Horner's rule so the
    /// string length is unrestricted. Panics if `m == 0`.
    pub fn value_mod(&self, m: u64) -> u64 {
        assert!(m > 0);
        let mut r: u64 = 0;
        for &b in &self.bits {
            r = (r.wrapping_mul(2) % m + b as u64) % m;
        }
        r
    }

    /// Length-then-lexicographic order ("0" < "1" < "00" < "01" < ...).
    pub fn length_lex_cmp(a: &BitString, b: &BitString) -> Ordering {
        a.len().cmp(&b.len()).then_with(|| a.bits.cmp(&b.bits))
    }

    /// All strings of the given length, in numeric (lexicographic) order.
    pub fn all_of_length(len: usize) -> impl Iterator<Item = BitString> {
        assert!(len < 64, "universe of length {len} is not materializable");
        (0u128..(1u128 << len)).map(move |v| BitString::from_value(v, len))
    }

    pub fn parse(s: &str) -> Result<Self, Error> {
        if s == "-" {
            return Ok(BitString::empty());
        }
        if s.is_empty() {
            return Err(Error::Parse {
                line: 0,
                msg: "empty token is not a bit string (use -)".into(),
            });
        }
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(0),
                '1' => bits.push(1),
                other => {
                    return Err(Error::Parse {
                        line: 0,
                        msg: format!("invalid bit character {other:?}"),
                    })
                }
            }
        }
        Ok(BitString { bits })
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bits.is_empty() {
            return f.write_str("-");
        }
        for &b in &self.bits {
            f.write_str(if b == 0 { "0" } else { "1" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        BitString::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_and_double_zero_are_distinct() {
        let a = BitString::parse("0").unwrap();
        let b = BitString::parse("00").unwrap();
        assert_ne!(a, b);
        assert_eq!(a.len(), 1);
        assert_eq!(b.len(), 2);
    }

    #[test]
    fn empty_renders_as_dash() {
        assert_eq!(BitString::empty().to_string(), "-");
        assert_eq!(BitString::parse("-").unwrap(), BitString::empty());
    }

    #[test]
    fn value_round_trip() {
        for v in 0..32u128 {
            let s = BitString::from_value(v, 5);
            assert_eq!(s.len(), 5);
            assert_eq!(s.value(), Some(v));
        }
    }

    #[test]
    fn value_mod_matches_value() {
        let s = BitString::parse("101101").unwrap();
        let v = s.value().unwrap() as u64;
        for m in 1..20u64 {
            assert_eq!(s.value_mod(m), v % m);
        }
    }

    #[test]
    fn length_lex_order() {
        let mut xs: Vec<BitString> = ["1", "00", "0", "01", "-"]
            .iter()
            .map(|s| BitString::parse(s).unwrap())
            .collect();
        xs.sort_by(BitString::length_lex_cmp);
        let rendered: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
        assert_eq!(rendered, vec!["-", "0", "1", "00", "01"]);
    }

    #[test]
    fn parse_rejects_junk() {
        assert!(BitString::parse("01x").is_err());
        assert!(BitString::parse("").is_err());
    }

    #[test]
    fn all_of_length_is_numeric_order() {
        let xs: Vec<String> = BitString::all_of_length(2).map(|x| x.to_string()).collect();
        assert_eq!(xs, vec!["00", "01", "10", "11"]);
    }
}
