//! Simulation and exhaustive verification of one-round protocols for
//! multiparty accumulative boolean functions.
//!
//! `m` parties each hold an `n`-bit vector. The function is the XOR over
//! positions `i` of a term evaluated on the `m`-bit column at `i`, and the
//! columns are promised to lie in a fixed set. The crate runs protocols that
//! compute such functions with `m − 1` (or `2m − 3`) bits of communication,
//! some using shared entangled qubits and some purely classical, and checks
//! every announced value against a direct evaluation.
//!
//! - [`bitcore`]: bit strings, parity classes and promise sets.
//! - [`functions`]: function families, input matrices and the reference evaluation.
//! - [`groups`]: operation matrices and the Klein four-group on three-bit words.
//! - [`quantum`]: a small dense statevector engine.
//! - [`signsolve`]: XOR constraints on basis-state signs and their solution.
//! - [`protocols`]: party-local protocol runs, transcripts and verification sweeps.
//! - [`games`]: exhaustive search over deterministic local strategies.
//! - [`cli`]: the `entangle-cc` command line.
//!
//! ```
//! use entangle_cc::bitcore::{Parity, PromiseSet};
//! use entangle_cc::functions::{FunctionSpec, InputMode};
//! use entangle_cc::protocols::{verify, Runner};
//!
//! let spec = FunctionSpec::f_u("000".parse()?, PromiseSet::parity_class(3, Parity::Even)?, 2)?;
//! let report = verify(&spec, Runner::Entangled(None), InputMode::Exhaustive { cap: 1 << 10 }, 0)?;
//! assert_eq!((report.trials, report.mismatches, report.max_cbits), (16, 0, 2));
//! # Ok::<(), entangle_cc::error::Error>(())
//! ```

pub mod bitcore;
pub mod cli;
pub mod error;
pub mod functions;
pub mod games;
pub mod groups;
pub mod protocols;
pub mod quantum;
pub mod signsolve;

pub use error::{Error, Result};

// The guide's code blocks run as doc-tests, one module per chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/bit-strings.md")]
    mod bit_strings {}
    #[doc = include_str!("../../../book/src/functions.md")]
    mod functions {}
    #[doc = include_str!("../../../book/src/operation-matrices.md")]
    mod operation_matrices {}
    #[doc = include_str!("../../../book/src/quantum-states.md")]
    mod quantum_states {}
    #[doc = include_str!("../../../book/src/sign-solving.md")]
    mod sign_solving {}
    #[doc = include_str!("../../../book/src/protocols.md")]
    mod protocols {}
    #[doc = include_str!("../../../book/src/games.md")]
    mod games {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
