//! Fixed-width bit patterns and the promise sets built from them.
//!
//! Bits are numbered `1..=width` from the left, so the string `"0110"` has
//! bit 1 = 0 and bit 2 = 1. This matches the way an input tuple
//! `x^1 x^2 ... x^m` lists one bit per party, party 1 first. The numeric
//! value of a string reads it as a big-endian binary number (`"0110"` is 6),
//! which is also the basis-state index used by [`crate::quantum`].

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Widest bit string representable.
pub const MAX_WIDTH: usize = 32;

/// Widest width for which whole parity classes are materialized.
pub const MAX_PROMISE_WIDTH: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_bit(bit: u8) -> Self {
        if bit & 1 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn flip(self) -> Self {
        Self::from_bit(self.bit() ^ 1)
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// A bit pattern of fixed width between 1 and [`MAX_WIDTH`].
///
/// Ordering is by width first, then by numeric value, so strings of equal
/// width sort in ascending binary order (`000 < 011 < 101 < 110`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    width: u8,
    value: u64,
}

fn check_width(width: usize) -> Result<()> {
    if width == 0 || width > MAX_WIDTH {
        return Err(Error::InvalidWidth {
            width,
            max: MAX_WIDTH,
        });
    }
    Ok(())
}

impl BitString {
    pub fn zeros(width: usize) -> Result<Self> {
        Self::from_value(width, 0)
    }

    pub fn ones(width: usize) -> Result<Self> {
        check_width(width)?;
        Ok(BitString {
            width: width as u8,
            value: (1u64 << width) - 1,
        })
    }

    /// Builds the string whose big-endian reading is `value`.
    pub fn from_value(width: usize, value: u64) -> Result<Self> {
        check_width(width)?;
        if value >> width != 0 {
            return Err(Error::Parse(format!(
                "{value} does not fit in {width} bits"
            )));
        }
        Ok(BitString {
            width: width as u8,
            value,
        })
    }

    /// Builds a string from bits listed left to right; each entry must be 0 or 1.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        check_width(bits.len())?;
        let mut value = 0u64;
        for &b in bits {
            if b > 1 {
                return Err(Error::Parse(format!("{bits:?}")));
            }
            value = (value << 1) | u64::from(b);
        }
        Ok(BitString {
            width: bits.len() as u8,
            value,
        })
    }

    /// The string with a single 1 at position `j`.
    pub fn unit(width: usize, j: usize) -> Result<Self> {
        check_width(width)?;
        if j == 0 || j > width {
            return Err(Error::LengthMismatch {
                left: width,
                right: j,
            });
        }
        Ok(BitString {
            width: width as u8,
            value: 1u64 << (width - j),
        })
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    /// Bit at 1-based position `j`, counted from the left.
    ///
    /// Panics if `j` is not in `1..=width`.
    pub fn bit(&self, j: usize) -> u8 {
        assert!(j >= 1 && j <= self.width(), "bit index {j} out of range");
        ((self.value >> (self.width() - j)) & 1) as u8
    }

    pub fn bits(&self) -> Vec<u8> {
        (1..=self.width()).map(|j| self.bit(j)).collect()
    }

    /// XOR of all bits.
    pub fn parity(&self) -> u8 {
        (self.value.count_ones() & 1) as u8
    }

    pub fn parity_class(&self) -> Parity {
        Parity::from_bit(self.parity())
    }

    /// Number of 1 bits.
    pub fn weight(&self) -> usize {
        self.value.count_ones() as usize
    }

    /// 1-based positions of the 1 bits, ascending.
    pub fn support(&self) -> Vec<usize> {
        (1..=self.width()).filter(|&j| self.bit(j) == 1).collect()
    }

    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        self.same_width(other)?;
        Ok(BitString {
            width: self.width,
            value: self.value ^ other.value,
        })
    }

    /// Number of positions where the two strings disagree.
    pub fn hamming(&self, other: &BitString) -> Result<usize> {
        Ok(self.xor(other)?.weight())
    }

    pub fn complement(&self) -> BitString {
        BitString {
            width: self.width,
            value: !self.value & ((1u64 << self.width) - 1),
        }
    }

    /// Copy with bit `j` toggled.
    pub fn flip(&self, j: usize) -> BitString {
        assert!(j >= 1 && j <= self.width(), "bit index {j} out of range");
        BitString {
            width: self.width,
            value: self.value ^ (1u64 << (self.width() - j)),
        }
    }

    /// All `2^width` strings in ascending order.
    pub fn all(width: usize) -> Result<impl Iterator<Item = BitString>> {
        check_width(width)?;
        if width > MAX_PROMISE_WIDTH {
            return Err(Error::InvalidWidth {
                width,
                max: MAX_PROMISE_WIDTH,
            });
        }
        Ok((0..1u64 << width).map(move |value| BitString {
            width: width as u8,
            value,
        }))
    }

    fn same_width(&self, other: &BitString) -> Result<()> {
        if self.width != other.width {
            return Err(Error::LengthMismatch {
                left: self.width(),
                right: other.width(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 1..=self.width() {
            f.write_str(if self.bit(j) == 1 { "1" } else { "0" })?;
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

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Parse(s.to_string())),
            })
            .collect::<Result<Vec<u8>>>()?;
        if bits.is_empty() || bits.len() > MAX_WIDTH {
            return Err(Error::Parse(s.to_string()));
        }
        BitString::from_bits(&bits)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Which distance class a Hamming-characterized promise keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HammingKind {
    /// `u` plus every same-parity string at distance 2, 6, 10, ...
    OddMultipleOf2,
    /// Every same-parity string at distance 0, 4, 8, ... (includes `u`).
    EvenMultipleOf2,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PromiseLabel {
    EvenClass,
    OddClass,
    HammingOdd2(BitString),
    HammingEven2(BitString),
    /// An even-parity set `A` together with every odd-parity string.
    MixedUnion,
    Explicit,
}

/// A nonempty set of equal-width tuples that inputs are guaranteed to come from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PromiseSet {
    width: usize,
    members: BTreeSet<BitString>,
    label: PromiseLabel,
}

impl PromiseSet {
    pub fn explicit<I: IntoIterator<Item = BitString>>(width: usize, members: I) -> Result<Self> {
        Self::labeled(width, members.into_iter().collect(), PromiseLabel::Explicit)
    }

    fn labeled(width: usize, members: BTreeSet<BitString>, label: PromiseLabel) -> Result<Self> {
        check_width(width)?;
        if members.is_empty() {
            return Err(Error::InvalidPromise("empty member set".into()));
        }
        if let Some(bad) = members.iter().find(|v| v.width() != width) {
            return Err(Error::LengthMismatch {
                left: width,
                right: bad.width(),
            });
        }
        Ok(PromiseSet {
            width,
            members,
            label,
        })
    }

    /// All `width`-bit strings.
    pub fn full(width: usize) -> Result<Self> {
        Self::explicit(width, BitString::all(width)?)
    }

    /// `E^m` or `O^m`: every `width`-bit string of the given parity.
    pub fn parity_class(width: usize, parity: Parity) -> Result<Self> {
        let members = BitString::all(width)?
            .filter(|v| v.parity_class() == parity)
            .collect();
        let label = match parity {
            Parity::Even => PromiseLabel::EvenClass,
            Parity::Odd => PromiseLabel::OddClass,
        };
        Self::labeled(width, members, label)
    }

    /// Same-parity strings selected by their Hamming distance to `u`.
    pub fn hamming_promise(u: &BitString, kind: HammingKind) -> Result<Self> {
        let class = Self::parity_class(u.width(), u.parity_class())?;
        let keep = |d: usize| match kind {
            HammingKind::OddMultipleOf2 => d == 0 || d % 4 == 2,
            HammingKind::EvenMultipleOf2 => d.is_multiple_of(4),
        };
        let members = class
            .members
            .into_iter()
            .filter(|v| keep(u.hamming(v).expect("same width")))
            .collect();
        let label = match kind {
            HammingKind::OddMultipleOf2 => PromiseLabel::HammingOdd2(*u),
            HammingKind::EvenMultipleOf2 => PromiseLabel::HammingEven2(*u),
        };
        Self::labeled(u.width(), members, label)
    }

    /// `A ∪ O^m` for an even-parity set `A`.
    pub fn mixed_union(width: usize, even_part: &BTreeSet<BitString>) -> Result<Self> {
        if let Some(bad) = even_part.iter().find(|v| v.parity() != 0) {
            return Err(Error::InvalidPromise(format!(
                "{bad} is not of even parity"
            )));
        }
        let mut members = Self::parity_class(width, Parity::Odd)?.members;
        for v in even_part {
            if v.width() != width {
                return Err(Error::LengthMismatch {
                    left: width,
                    right: v.width(),
                });
            }
            members.insert(*v);
        }
        Self::labeled(width, members, PromiseLabel::MixedUnion)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn label(&self) -> &PromiseLabel {
        &self.label
    }

    pub fn members(&self) -> &BTreeSet<BitString> {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = &BitString> {
        self.members.iter()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: &BitString) -> bool {
        self.members.contains(v)
    }

    pub fn is_subset_of(&self, other: &PromiseSet) -> bool {
        self.members.is_subset(&other.members)
    }

    /// The common parity of all members, if there is one.
    pub fn uniform_parity(&self) -> Option<Parity> {
        let first = self.members.iter().next()?.parity_class();
        self.members
            .iter()
            .all(|v| v.parity_class() == first)
            .then_some(first)
    }

    /// Copy without `v`. Fails if that would leave the set empty.
    pub fn excluding(&self, v: &BitString) -> Result<Self> {
        let mut members = self.members.clone();
        members.remove(v);
        Self::labeled(self.width, members, PromiseLabel::Explicit)
    }

    /// Image of the set under XOR with `delta`, i.e. after complementing the
    /// input vectors selected by `delta`.
    pub fn translate(&self, delta: &BitString) -> Result<Self> {
        let members = self
            .members
            .iter()
            .map(|v| v.xor(delta))
            .collect::<Result<BTreeSet<_>>>()?;
        let label = match &self.label {
            PromiseLabel::EvenClass | PromiseLabel::OddClass => {
                match Parity::from_bit(delta.parity()) {
                    Parity::Even => self.label.clone(),
                    Parity::Odd if self.label == PromiseLabel::EvenClass => PromiseLabel::OddClass,
                    Parity::Odd => PromiseLabel::EvenClass,
                }
            }
            PromiseLabel::HammingOdd2(u) => PromiseLabel::HammingOdd2(u.xor(delta)?),
            PromiseLabel::HammingEven2(u) => PromiseLabel::HammingEven2(u.xor(delta)?),
            PromiseLabel::MixedUnion | PromiseLabel::Explicit => PromiseLabel::Explicit,
        };
        Self::labeled(self.width, members, label)
    }
}
