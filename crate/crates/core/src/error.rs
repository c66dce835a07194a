use crate::bitcore::BitString;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid width {width}: must be in 1..={max}")]
    InvalidWidth { width: usize, max: usize },

    #[error("cannot parse {0:?} as a bit string")]
    Parse(String),

    #[error("{width} qubits exceeds the statevector cap of {cap}")]
    WidthTooLarge { width: usize, cap: usize },

    #[error("sign assignment has no entry for basis state {0}")]
    IncompleteAssignment(BitString),

    #[error("parity mismatch: {0} does not share the parity of {1}")]
    ParityMismatch(BitString, BitString),

    #[error("promise violated by tuple {tuple} at position {index}")]
    PromiseViolation { index: usize, tuple: BitString },

    #[error("enumeration needs {needed} items, cap is {cap}")]
    CapExceeded { needed: u128, cap: u128 },

    #[error("no protocol backend for this instance: {0}")]
    UnsupportedDispatch(String),

    #[error("strategy search over {width} parties exceeds the limit of {max}")]
    SearchTooLarge { width: usize, max: usize },

    #[error("invalid function spec: {0}")]
    InvalidSpec(String),

    #[error("invalid promise set: {0}")]
    InvalidPromise(String),
}
