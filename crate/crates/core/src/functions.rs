//! Accumulative boolean functions and their reference evaluation.
//!
//! Party `j` holds the vector `X_j = (x_1^j, ..., x_n^j)`. The `i`-th tuple is
//! `x_i^1 x_i^2 ... x_i^m`, one bit from each party, and the function value is
//! the XOR over `i` of a per-tuple term. The evaluation here sees every input
//! at once and serves as the oracle the protocols are checked against.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitcore::{BitString, PromiseSet, MAX_WIDTH};
use crate::error::{Error, Result};
use crate::groups::reduction_toggles;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// `f_u`: term is 1 iff the tuple equals `u`; uniform-parity promise.
    SingleMinterm { u: BitString },
    /// `f_B`: term is 1 iff the tuple lies in `B`; uniform-parity promise.
    MintermSet { b: BTreeSet<BitString> },
    /// `g_A`: term is 1 iff the tuple lies in the even set `A`; promise `A ∪ O^m`.
    MixedParity { a: BTreeSet<BitString> },
    /// `g_11`: two parties, term `x ∧ y`, promise `{11, 01, 10}`.
    TwoPartyAnd,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::SingleMinterm { .. } => "F_u",
            Family::MintermSet { .. } => "F_B",
            Family::MixedParity { .. } => "G_A",
            Family::TwoPartyAnd => "G_11",
        }
    }
}

/// A fully specified instance family: the function, the promise, and the
/// number of tuples `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionSpec {
    width: usize,
    n: usize,
    family: Family,
    promise: PromiseSet,
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidSpec("n must be at least 1".into()));
    }
    Ok(())
}

impl FunctionSpec {
    pub fn f_u(u: BitString, promise: PromiseSet, n: usize) -> Result<Self> {
        check_n(n)?;
        if promise.width() != u.width() {
            return Err(Error::LengthMismatch {
                left: u.width(),
                right: promise.width(),
            });
        }
        if !promise.contains(&u) {
            return Err(Error::InvalidSpec(format!("{u} is not in the promise set")));
        }
        if promise.uniform_parity().is_none() {
            return Err(Error::InvalidSpec(
                "F_u needs a uniform-parity promise".into(),
            ));
        }
        Ok(FunctionSpec {
            width: u.width(),
            n,
            family: Family::SingleMinterm { u },
            promise,
        })
    }

    pub fn f_b(b: BTreeSet<BitString>, promise: PromiseSet, n: usize) -> Result<Self> {
        check_n(n)?;
        if b.is_empty() {
            return Err(Error::InvalidSpec("B must be nonempty".into()));
        }
        if !b.iter().all(|v| promise.contains(v)) {
            return Err(Error::InvalidSpec(
                "B must be a subset of the promise".into(),
            ));
        }
        if promise.uniform_parity().is_none() {
            return Err(Error::InvalidSpec(
                "F_B needs a uniform-parity promise".into(),
            ));
        }
        Ok(FunctionSpec {
            width: promise.width(),
            n,
            family: Family::MintermSet { b },
            promise,
        })
    }

    pub fn g_a(width: usize, a: BTreeSet<BitString>, n: usize) -> Result<Self> {
        check_n(n)?;
        if a.is_empty() {
            return Err(Error::InvalidSpec("A must be nonempty".into()));
        }
        let promise = PromiseSet::mixed_union(width, &a)?;
        Ok(FunctionSpec {
            width,
            n,
            family: Family::MixedParity { a },
            promise,
        })
    }

    pub fn g_11(n: usize) -> Result<Self> {
        check_n(n)?;
        let promise =
            PromiseSet::explicit(2, ["11", "01", "10"].map(|s| s.parse().expect("static")))?;
        Ok(FunctionSpec {
            width: 2,
            n,
            family: Family::TwoPartyAnd,
            promise,
        })
    }

    /// Number of parties `m`.
    pub fn width(&self) -> usize {
        self.width
    }

    /// Number of tuples `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn promise(&self) -> &PromiseSet {
        &self.promise
    }

    /// Same function and promise with a different tuple count.
    pub fn with_n(&self, n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(FunctionSpec { n, ..self.clone() })
    }

    /// The per-tuple term `t(tuple)`.
    pub fn term(&self, tuple: &BitString) -> u8 {
        let hit = match &self.family {
            Family::SingleMinterm { u } => tuple == u,
            Family::MintermSet { b } => b.contains(tuple),
            Family::MixedParity { a } => a.contains(tuple),
            Family::TwoPartyAnd => tuple.bit(1) == 1 && tuple.bit(2) == 1,
        };
        u8::from(hit)
    }

    /// The `f_{u2}` instance an `f_u` instance maps to after complementing
    /// the input vectors where `u` and `u2` differ.
    pub fn retarget(&self, u2: BitString) -> Result<Self> {
        let Family::SingleMinterm { u } = &self.family else {
            return Err(Error::InvalidSpec("retarget applies to F_u only".into()));
        };
        let delta = u.xor(&u2)?;
        Self::f_u(u2, self.promise.translate(&delta)?, self.n)
    }
}

/// Every tuple must lie in the promise. A violation reports the 1-based
/// tuple position.
pub fn validate_promise(spec: &FunctionSpec, inputs: &InputMatrix) -> Result<()> {
    check_shape(spec, inputs)?;
    for (i, tuple) in inputs.tuples().enumerate() {
        if !spec.promise.contains(&tuple) {
            return Err(Error::PromiseViolation {
                index: i + 1,
                tuple,
            });
        }
    }
    Ok(())
}

pub(crate) fn check_shape(spec: &FunctionSpec, inputs: &InputMatrix) -> Result<()> {
    if inputs.parties() != spec.width {
        return Err(Error::LengthMismatch {
            left: spec.width,
            right: inputs.parties(),
        });
    }
    if inputs.len() != spec.n {
        return Err(Error::LengthMismatch {
            left: spec.n,
            right: inputs.len(),
        });
    }
    Ok(())
}

/// XOR over all tuples of the family's term.
pub fn oracle_eval(spec: &FunctionSpec, inputs: &InputMatrix) -> Result<u8> {
    validate_promise(spec, inputs)?;
    Ok(inputs.tuples().fold(0, |acc, t| acc ^ spec.term(&t)))
}

/// `m` input vectors of `n` bits each.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InputMatrix {
    rows: Vec<Vec<u8>>,
}

impl InputMatrix {
    pub fn from_rows(rows: Vec<Vec<u8>>) -> Result<Self> {
        if rows.is_empty() || rows.len() > MAX_WIDTH {
            return Err(Error::InvalidWidth {
                width: rows.len(),
                max: MAX_WIDTH,
            });
        }
        let n = rows[0].len();
        if n == 0 {
            return Err(Error::InvalidSpec("input vectors must be nonempty".into()));
        }
        for row in &rows {
            if row.len() != n {
                return Err(Error::LengthMismatch {
                    left: n,
                    right: row.len(),
                });
            }
            if row.iter().any(|&b| b > 1) {
                return Err(Error::Parse(format!("{row:?}")));
            }
        }
        Ok(InputMatrix { rows })
    }

    /// Builds the matrix whose `i`-th tuple is `tuples[i]`.
    pub fn from_tuples(tuples: &[BitString]) -> Result<Self> {
        let first = tuples
            .first()
            .ok_or_else(|| Error::InvalidSpec("need at least one tuple".into()))?;
        let m = first.width();
        let mut rows = vec![Vec::with_capacity(tuples.len()); m];
        for t in tuples {
            if t.width() != m {
                return Err(Error::LengthMismatch {
                    left: m,
                    right: t.width(),
                });
            }
            for (j, row) in rows.iter_mut().enumerate() {
                row.push(t.bit(j + 1));
            }
        }
        Self::from_rows(rows)
    }

    /// Number of parties `m`.
    pub fn parties(&self) -> usize {
        self.rows.len()
    }

    /// Number of tuples `n`.
    pub fn len(&self) -> usize {
        self.rows[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Input vector of party `j` (1-based).
    pub fn row(&self, j: usize) -> &[u8] {
        &self.rows[j - 1]
    }

    /// Tuple `i` (0-based), one bit per party.
    pub fn tuple(&self, i: usize) -> BitString {
        let bits: Vec<u8> = self.rows.iter().map(|r| r[i]).collect();
        BitString::from_bits(&bits).expect("validated shape")
    }

    pub fn tuples(&self) -> impl Iterator<Item = BitString> + '_ {
        (0..self.len()).map(|i| self.tuple(i))
    }

    /// Copy with every bit of party `j`'s vector complemented.
    pub fn complement_row(&self, j: usize) -> InputMatrix {
        let mut rows = self.rows.clone();
        for b in rows[j - 1].iter_mut() {
            *b ^= 1;
        }
        InputMatrix { rows }
    }
}

impl fmt::Display for InputMatrix {
    /// `m` lines of `n` characters, no trailing newline.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, row) in self.rows.iter().enumerate() {
            if j > 0 {
                f.write_str("\n")?;
            }
            for b in row {
                f.write_str(if *b == 1 { "1" } else { "0" })?;
            }
        }
        Ok(())
    }
}

impl FromStr for InputMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rows = s
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| {
                l.chars()
                    .map(|c| match c {
                        '0' => Ok(0),
                        '1' => Ok(1),
                        _ => Err(Error::Parse(l.to_string())),
                    })
                    .collect::<Result<Vec<u8>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(rows)
    }
}

/// Complements the input vectors of the parties where `u` and `u2` differ.
pub fn reduce_instance(u: &BitString, u2: &BitString, inputs: &InputMatrix) -> Result<InputMatrix> {
    if u.width() != inputs.parties() {
        return Err(Error::LengthMismatch {
            left: u.width(),
            right: inputs.parties(),
        });
    }
    Ok(reduction_toggles(u, u2)?
        .into_iter()
        .fold(inputs.clone(), |acc, j| acc.complement_row(j)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputMode {
    /// Every promise-respecting matrix once, refusing if there are more than `cap`.
    Exhaustive { cap: u128 },
    /// `count` matrices with tuples drawn uniformly from the promise.
    Random { count: usize, seed: u64 },
}

/// Stream of input matrices for `spec`.
pub fn gen_inputs(spec: &FunctionSpec, mode: InputMode) -> Result<InputStream> {
    let members: Vec<BitString> = spec.promise.iter().copied().collect();
    let n = spec.n;
    match mode {
        InputMode::Exhaustive { cap } => {
            let needed = (members.len() as u128)
                .checked_pow(n as u32)
                .unwrap_or(u128::MAX);
            if needed > cap {
                return Err(Error::CapExceeded { needed, cap });
            }
            Ok(InputStream::Exhaustive {
                members,
                digits: Some(vec![0; n]),
            })
        }
        InputMode::Random { count, seed } => Ok(InputStream::Random {
            members,
            n,
            remaining: count,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }),
    }
}

/// Number of matrices an exhaustive sweep of `spec` visits, saturating.
pub fn exhaustive_count(spec: &FunctionSpec) -> u128 {
    (spec.promise.len() as u128)
        .checked_pow(spec.n as u32)
        .unwrap_or(u128::MAX)
}

/// Iterator over input matrices, in odometer order or drawn from a seeded RNG.
#[allow(clippy::large_enum_variant)]
pub enum InputStream {
    Exhaustive {
        members: Vec<BitString>,
        digits: Option<Vec<usize>>,
    },
    Random {
        members: Vec<BitString>,
        n: usize,
        remaining: usize,
        rng: ChaCha8Rng,
    },
}

impl Iterator for InputStream {
    type Item = InputMatrix;

    fn next(&mut self) -> Option<InputMatrix> {
        match self {
            InputStream::Exhaustive { members, digits } => {
                let current = digits.as_mut()?;
                let tuples: Vec<BitString> = current.iter().map(|&d| members[d]).collect();
                // odometer, last tuple fastest
                let mut k = current.len();
                loop {
                    if k == 0 {
                        *digits = None;
                        break;
                    }
                    k -= 1;
                    current[k] += 1;
                    if current[k] < members.len() {
                        break;
                    }
                    current[k] = 0;
                }
                Some(InputMatrix::from_tuples(&tuples).expect("promise members share a width"))
            }
            InputStream::Random {
                members,
                n,
                remaining,
                rng,
            } => {
                if *remaining == 0 {
                    return None;
                }
                *remaining -= 1;
                let tuples: Vec<BitString> = (0..*n)
                    .map(|_| members[rng.random_range(0..members.len())])
                    .collect();
                Some(InputMatrix::from_tuples(&tuples).expect("promise members share a width"))
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SpecRecord {
    family: String,
    m: usize,
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    u: Option<BitString>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    b: Option<Vec<BitString>>,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    a: Option<Vec<BitString>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    promise: Option<Vec<BitString>>,
}

impl Serialize for FunctionSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let promise = || Some(self.promise.iter().copied().collect());
        let record = match &self.family {
            Family::SingleMinterm { u } => SpecRecord {
                family: "F_u".into(),
                m: self.width,
                n: self.n,
                u: Some(*u),
                b: None,
                a: None,
                promise: promise(),
            },
            Family::MintermSet { b } => SpecRecord {
                family: "F_B".into(),
                m: self.width,
                n: self.n,
                u: None,
                b: Some(b.iter().copied().collect()),
                a: None,
                promise: promise(),
            },
            Family::MixedParity { a } => SpecRecord {
                family: "G_A".into(),
                m: self.width,
                n: self.n,
                u: None,
                b: None,
                a: Some(a.iter().copied().collect()),
                promise: None,
            },
            Family::TwoPartyAnd => SpecRecord {
                family: "G_11".into(),
                m: 2,
                n: self.n,
                u: None,
                b: None,
                a: None,
                promise: None,
            },
        };
        record.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FunctionSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = SpecRecord::deserialize(d)?;
        let need = |field: Option<Vec<BitString>>, name: &str| {
            field.ok_or_else(|| D::Error::custom(format!("missing field {name}")))
        };
        let spec = match r.family.as_str() {
            "F_u" => {
                let u = r.u.ok_or_else(|| D::Error::custom("missing field u"))?;
                let promise = PromiseSet::explicit(r.m, need(r.promise, "promise")?)
                    .map_err(D::Error::custom)?;
                FunctionSpec::f_u(u, promise, r.n)
            }
            "F_B" => {
                let b = need(r.b, "B")?.into_iter().collect();
                let promise = PromiseSet::explicit(r.m, need(r.promise, "promise")?)
                    .map_err(D::Error::custom)?;
                FunctionSpec::f_b(b, promise, r.n)
            }
            "G_A" => FunctionSpec::g_a(r.m, need(r.a, "A")?.into_iter().collect(), r.n),
            "G_11" => FunctionSpec::g_11(r.n),
            other => return Err(D::Error::custom(format!("unknown family {other}"))),
        };
        let spec = spec.map_err(D::Error::custom)?;
        if spec.width != r.m {
            return Err(D::Error::custom("width does not match m"));
        }
        Ok(spec)
    }
}
