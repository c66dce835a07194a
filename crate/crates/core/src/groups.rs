//! Local-operation words, the recursive operation matrices, and the Klein
//! four-group that indexes them.
//!
//! An [`OpWord`] lists the gate each party applies to its own qubit (or, in
//! the classical protocols, whether it toggles its own bit). The matrices
//! `M_m` and `M'_m` are built by the block recursion
//!
//! ```text
//! M_1 = I     M_{i+1}  = | I·M_i   H·M'_i |     M'_{i+1} = | I·M'_i  H·M_i  |
//! M'_1 = H               | H·M'_i  I·M_i  |                | H·M_i   I·M'_i |
//! ```
//!
//! where `A·X` prefixes every word of `X` with the symbol `A`. Rows of both
//! matrices are indexed by the even-parity strings in ascending order;
//! columns by even strings for `M_m` and odd strings for `M'_m`. With that
//! ordering the cell at `(u, p)` is the word with `H` exactly where `u ⊕ p`
//! has a 1, which [`direct_entry`] computes without recursion.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bitcore::{BitString, Parity, PromiseSet};
use crate::error::{Error, Result};

/// Widest matrix [`build_op_matrix`] will materialize (512 x 512 cells).
pub const MAX_MATRIX_WIDTH: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateSymbol {
    I,
    H,
    /// `R` (phase `i` on `|1>`) followed by `H`.
    HR,
}

impl GateSymbol {
    pub fn as_str(self) -> &'static str {
        match self {
            GateSymbol::I => "I",
            GateSymbol::H => "H",
            GateSymbol::HR => "HR",
        }
    }
}

/// One gate symbol per party, party 1 first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpWord(Vec<GateSymbol>);

impl OpWord {
    pub fn new(symbols: Vec<GateSymbol>) -> Self {
        OpWord(symbols)
    }

    pub fn identity(width: usize) -> Self {
        OpWord(vec![GateSymbol::I; width])
    }

    pub fn symbols(&self) -> &[GateSymbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of non-identity symbols.
    pub fn hcount(&self) -> usize {
        self.0.iter().filter(|&&s| s != GateSymbol::I).count()
    }

    fn prefixed(&self, head: GateSymbol) -> OpWord {
        let mut symbols = Vec::with_capacity(self.0.len() + 1);
        symbols.push(head);
        symbols.extend_from_slice(&self.0);
        OpWord(symbols)
    }

    /// `I -> H`, `H -> HR`: the substitution that turns `M_m` into `N_m`.
    pub fn to_phase_alphabet(&self) -> OpWord {
        OpWord(
            self.0
                .iter()
                .map(|s| match s {
                    GateSymbol::I => GateSymbol::H,
                    _ => GateSymbol::HR,
                })
                .collect(),
        )
    }
}

impl fmt::Display for OpWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            f.write_str(s.as_str())?;
        }
        Ok(())
    }
}

/// Parses the concatenated form, e.g. `"IHH"` or `"HHRHR"` (= H, HR, HR).
/// `R` only ever follows `H`, so the reading is unambiguous.
impl FromStr for OpWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut symbols = Vec::new();
        let mut chars = s.trim().chars().peekable();
        while let Some(c) = chars.next() {
            let sym = match c {
                'I' => GateSymbol::I,
                'H' if chars.peek() == Some(&'R') => {
                    chars.next();
                    GateSymbol::HR
                }
                'H' => GateSymbol::H,
                _ => return Err(Error::Parse(s.to_string())),
            };
            symbols.push(sym);
        }
        if symbols.is_empty() {
            return Err(Error::Parse(s.to_string()));
        }
        Ok(OpWord(symbols))
    }
}

impl Serialize for OpWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for OpWord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MatrixKind {
    M,
    #[serde(rename = "Mprime")]
    MPrime,
    N,
}

impl MatrixKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MatrixKind::M => "M",
            MatrixKind::MPrime => "Mprime",
            MatrixKind::N => "N",
        }
    }
}

impl FromStr for MatrixKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "M" | "m" => Ok(MatrixKind::M),
            "Mprime" | "M'" | "mprime" => Ok(MatrixKind::MPrime),
            "N" | "n" => Ok(MatrixKind::N),
            _ => Err(Error::Parse(s.to_string())),
        }
    }
}

/// A square matrix of [`OpWord`]s with labelled rows and columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpMatrix {
    width: usize,
    kind: MatrixKind,
    rows: Vec<BitString>,
    cols: Vec<BitString>,
    cells: Vec<Vec<OpWord>>,
}

impl OpMatrix {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn row_labels(&self) -> &[BitString] {
        &self.rows
    }

    pub fn col_labels(&self) -> &[BitString] {
        &self.cols
    }

    pub fn cells(&self) -> &[Vec<OpWord>] {
        &self.cells
    }

    /// Word at row label `row`, column label `col`.
    pub fn cell(&self, row: &BitString, col: &BitString) -> Option<&OpWord> {
        let r = self.rows.binary_search(row).ok()?;
        let c = self.cols.binary_search(col).ok()?;
        Some(&self.cells[r][c])
    }
}

fn sorted_class(width: usize, parity: Parity) -> Result<Vec<BitString>> {
    Ok(PromiseSet::parity_class(width, parity)?
        .iter()
        .copied()
        .collect())
}

type Cells = Vec<Vec<OpWord>>;

fn block(tl: Cells, tr: Cells, bl: Cells, br: Cells) -> Cells {
    let mut out = Vec::with_capacity(tl.len() * 2);
    for (mut left, right) in tl.into_iter().zip(tr) {
        left.extend(right);
        out.push(left);
    }
    for (mut left, right) in bl.into_iter().zip(br) {
        left.extend(right);
        out.push(left);
    }
    out
}

fn prefix_all(head: GateSymbol, cells: &Cells) -> Cells {
    cells
        .iter()
        .map(|row| row.iter().map(|w| w.prefixed(head)).collect())
        .collect()
}

/// Unfolds the recursion, returning the cells of `(M_width, M'_width)`.
fn recursive_cells(width: usize) -> (Cells, Cells) {
    use GateSymbol::{H, I};
    let mut m = vec![vec![OpWord(vec![I])]];
    let mut mp = vec![vec![OpWord(vec![H])]];
    for _ in 1..width {
        let next_m = block(
            prefix_all(I, &m),
            prefix_all(H, &mp),
            prefix_all(H, &mp),
            prefix_all(I, &m),
        );
        let next_mp = block(
            prefix_all(I, &mp),
            prefix_all(H, &m),
            prefix_all(H, &m),
            prefix_all(I, &mp),
        );
        m = next_m;
        mp = next_mp;
    }
    (m, mp)
}

/// Builds `M_width`, `M'_width` or `N_width` from the block recursion.
pub fn build_op_matrix(width: usize, kind: MatrixKind) -> Result<OpMatrix> {
    if width == 0 || width > MAX_MATRIX_WIDTH {
        return Err(Error::InvalidWidth {
            width,
            max: MAX_MATRIX_WIDTH,
        });
    }
    let (m, mp) = recursive_cells(width);
    let rows = sorted_class(width, Parity::Even)?;
    let (cols, cells) = match kind {
        MatrixKind::M => (rows.clone(), m),
        MatrixKind::MPrime => (sorted_class(width, Parity::Odd)?, mp),
        MatrixKind::N => (
            rows.clone(),
            m.iter()
                .map(|row| row.iter().map(OpWord::to_phase_alphabet).collect())
                .collect(),
        ),
    };
    Ok(OpMatrix {
        width,
        kind,
        rows,
        cols,
        cells,
    })
}

/// `N_m`: `M_m` with `I` replaced by `H` and `H` by `HR`.
pub fn build_n_matrix(width: usize) -> Result<OpMatrix> {
    build_op_matrix(width, MatrixKind::N)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Alphabet {
    /// `I` where `u` and `p` agree, `H` where they differ.
    IH,
    /// `H` where `u` and `p` agree, `HR` where they differ.
    HHR,
}

/// The operation word for row `u`, column `p`, computed from `u ⊕ p`.
pub fn direct_entry(u: &BitString, p: &BitString, alphabet: Alphabet) -> Result<OpWord> {
    let diff = u.xor(p)?;
    let (same, differ) = match alphabet {
        Alphabet::IH => (GateSymbol::I, GateSymbol::H),
        Alphabet::HHR => (GateSymbol::H, GateSymbol::HR),
    };
    Ok(OpWord(
        diff.bits()
            .into_iter()
            .map(|b| if b == 1 { differ } else { same })
            .collect(),
    ))
}

/// Element of the Klein four-group `{a, b, c, d}` with identity `a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum V4Element {
    A,
    B,
    C,
    D,
}

use V4Element::{A, B, C, D};

const V4_TABLE: [[V4Element; 4]; 4] = [[A, B, C, D], [B, A, D, C], [C, D, A, B], [D, C, B, A]];

impl V4Element {
    pub const ALL: [V4Element; 4] = [A, B, C, D];

    fn index(self) -> usize {
        self as usize
    }

    /// Labels `a, b, c, d` as `000, 011, 101, 110`.
    pub fn even_triple(self) -> BitString {
        BitString::from_value(3, [0b000, 0b011, 0b101, 0b110][self.index()]).expect("3 bits")
    }

    /// Labels `a, b, c, d` as `001, 010, 100, 111`.
    pub fn odd_triple(self) -> BitString {
        BitString::from_value(3, [0b001, 0b010, 0b100, 0b111][self.index()]).expect("3 bits")
    }

    pub fn from_even_triple(v: &BitString) -> Option<V4Element> {
        Self::ALL.into_iter().find(|g| g.even_triple() == *v)
    }

    pub fn from_odd_triple(v: &BitString) -> Option<V4Element> {
        Self::ALL.into_iter().find(|g| g.odd_triple() == *v)
    }

    /// The three-party word `III`, `IHH`, `HIH` or `HHI` this element stands for.
    pub fn word(self) -> OpWord {
        ["III", "IHH", "HIH", "HHI"][self.index()]
            .parse()
            .expect("static word")
    }
}

impl std::ops::Mul for V4Element {
    type Output = V4Element;

    fn mul(self, other: V4Element) -> V4Element {
        V4_TABLE[self.index()][other.index()]
    }
}

pub fn v4_mul(g: V4Element, h: V4Element) -> V4Element {
    g * h
}

impl fmt::Display for V4Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["a", "b", "c", "d"][self.index()])
    }
}

/// Party indices (1-based) whose whole input vector must be complemented so
/// that an `f_u` instance becomes an `f_{u2}` instance.
pub fn reduction_toggles(u: &BitString, u2: &BitString) -> Result<BTreeSet<usize>> {
    Ok(u.xor(u2)?.support().into_iter().collect())
}
