//! Fixed-width bit strings.
//!
//! A [`Bits`] value is written most-significant bit first, so `"01"` is the
//! two-bit string whose integer value is 1. This matches the basis-state
//! ordering used by the simulator: the first character of a register's string
//! is the register's most significant qubit.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Widest string that fits the `u64` backing store.
pub const MAX_BITS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Bits {
    value: u64,
    width: usize,
}

impl Bits {
    pub fn new(value: u64, width: usize) -> Result<Self> {
        if width > MAX_BITS {
            return Err(Error::capacity(format!(
                "bit string of width {width} exceeds {MAX_BITS}"
            )));
        }
        if width < MAX_BITS && value >> width != 0 {
            return Err(Error::contract(format!("value {value} does not fit in {width} bits")));
        }
        Ok(Bits { value, width })
    }

    pub fn zero(width: usize) -> Self {
        Bits { value: 0, width }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn width(self) -> usize {
        self.width
    }

    /// Bit `i` counted from the left (most significant) end, 0-based.
    pub fn bit(self, i: usize) -> bool {
        assert!(i < self.width, "bit index {i} out of range for width {}", self.width);
        (self.value >> (self.width - 1 - i)) & 1 == 1
    }

    pub fn popcount(self) -> u32 {
        self.value.count_ones()
    }

    /// Inner product modulo two.
    pub fn dot(self, other: Bits) -> bool {
        inner_product(self.value, other.value)
    }

    pub fn from_bools(bits: &[bool]) -> Result<Self> {
        let value = bits.iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b));
        Bits::new(value, bits.len())
    }

    pub fn to_bools(self) -> Vec<bool> {
        (0..self.width).map(|i| self.bit(i)).collect()
    }
}

/// Parity of the bitwise AND of two strings.
pub fn inner_product(a: u64, b: u64) -> bool {
    (a & b).count_ones() % 2 == 1
}

/// Number of bits needed to hold the values `0..n`; at least 1.
pub fn width_for(n: u64) -> usize {
    if n <= 2 {
        1
    } else {
        (64 - (n - 1).leading_zeros()) as usize
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.width {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Bits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.len() > MAX_BITS {
            return Err(Error::capacity(format!(
                "bit string of length {} exceeds {MAX_BITS}",
                s.len()
            )));
        }
        let mut value = 0u64;
        for c in s.chars() {
            value = (value << 1)
                | match c {
                    '0' => 0,
                    '1' => 1,
                    other => return Err(Error::contract(format!("invalid bit character {other:?} in {s:?}"))),
                };
        }
        Bits::new(value, s.len())
    }
}

impl Serialize for Bits {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bits {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
