//! Party-faithful simulations of the one-round protocols.
//!
//! Every party is a [`PartyView`] holding only its own input vector and the
//! bits it produced locally. Gate choices, toggles and message payloads are
//! computed from a single view plus public data, so a party cannot read
//! another party's inputs. All messages go to party 1, which announces the
//! value.
//!
//! The shared quantum register for tuple `i` is simulated as one statevector.
//! Measuring it jointly and handing bit `j` to party `j` has the same
//! statistics as each party measuring its own qubit.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bitcore::{BitString, HammingKind, Parity, PromiseSet};
use crate::error::{Error, Result};
use crate::functions::{
    gen_inputs, oracle_eval, validate_promise, Family, FunctionSpec, InputMatrix, InputMode,
};
use crate::groups::GateSymbol;
use crate::quantum::{
    build_signed_state, ghz, psi3, StateVector, SupportParity, DEFAULT_TOL, MAX_QUBITS,
};
use crate::signsolve::{solve_for, SignSolution};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Message {
    pub from: usize,
    pub to: usize,
    pub payload: Vec<u8>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Transcript {
    messages: Vec<Message>,
}

impl Transcript {
    fn send(&mut self, from: usize, to: usize, payload: Vec<u8>) {
        self.messages.push(Message { from, to, payload });
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    /// Sum of payload lengths.
    pub fn total_cbits(&self) -> usize {
        self.messages.iter().map(|m| m.payload.len()).sum()
    }

    /// Payloads addressed to `to`, in sending order.
    fn inbox(&self, to: usize) -> impl Iterator<Item = &Message> {
        self.messages.iter().filter(move |m| m.to == to)
    }
}

/// What one party knows: its index, its input vector, and the bits it
/// produced itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartyView {
    index: usize,
    inputs: Vec<u8>,
    measured: Vec<u8>,
    toggles: Vec<u8>,
}

impl PartyView {
    fn new(index: usize, inputs: &[u8]) -> Self {
        PartyView {
            index,
            inputs: inputs.to_vec(),
            measured: Vec::with_capacity(inputs.len()),
            toggles: Vec::new(),
        }
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn inputs(&self) -> &[u8] {
        &self.inputs
    }

    pub fn measured(&self) -> &[u8] {
        &self.measured
    }

    pub fn toggles(&self) -> &[u8] {
        &self.toggles
    }

    fn record_measurement(&mut self, bit: u8) {
        self.measured.push(bit);
    }

    /// XOR of the party's measurement outcomes.
    fn measured_parity(&self) -> u8 {
        self.measured.iter().fold(0, |a, b| a ^ b)
    }

    fn toggle_parity(&self) -> u8 {
        self.toggles.iter().fold(0, |a, b| a ^ b)
    }

    /// Number of ones in the input vector after complementing it when `flip` is 1.
    fn count_ones(&self, flip: u8) -> usize {
        self.inputs.iter().filter(|&&x| x ^ flip == 1).count()
    }
}

fn split_views(inputs: &InputMatrix) -> Vec<PartyView> {
    (1..=inputs.parties())
        .map(|j| PartyView::new(j, inputs.row(j)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProtocolOutcome {
    /// The bit announced by party 1.
    pub value: u8,
    pub transcript: Transcript,
    /// Support parity of each register after the local operations; empty for
    /// classical protocols.
    pub support: Vec<SupportParity>,
}

/// Shared-state backend for the entangled family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Backend {
    /// Three qubits in `ψ₃`, `I`/`H` operations.
    Psi3,
    /// Four qubits in the sign-solved odd-class state, `I`/`H` operations.
    Psi4,
    /// GHZ state, `H`/`HR` operations.
    Ghz,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Psi3 => "psi3",
            Backend::Psi4 => "psi4",
            Backend::Ghz => "ghz",
        })
    }
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "psi3" => Ok(Backend::Psi3),
            "psi4" => Ok(Backend::Psi4),
            "ghz" => Ok(Backend::Ghz),
            _ => Err(Error::Parse(s.to_string())),
        }
    }
}

/// Public data fixed before any input is seen: the shared state, the
/// reference string `u` that drives every party's gate choice, and the
/// constant party 1 folds into its output.
#[derive(Clone, Debug)]
pub struct EntangledPlan {
    backend: Backend,
    u: BitString,
    state: StateVector,
    /// 1 when a matching tuple leaves the register with odd support.
    match_parity: u8,
}

impl EntangledPlan {
    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn reference(&self) -> &BitString {
        &self.u
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    /// Same plan with a different zero-amplitude tolerance.
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.state = self.state.with_tol(tol);
        self
    }

    /// Gate party `j` applies when its bit for the current tuple is `x`.
    pub fn gate(&self, j: usize, x: u8) -> GateSymbol {
        let same = self.u.bit(j) == x;
        match (self.backend, same) {
            (Backend::Psi3 | Backend::Psi4, true) => GateSymbol::I,
            (Backend::Psi3 | Backend::Psi4, false) => GateSymbol::H,
            (Backend::Ghz, true) => GateSymbol::H,
            (Backend::Ghz, false) => GateSymbol::HR,
        }
    }

    /// Constant party 1 adds to the XOR of all parties' bits.
    pub fn output_offset(&self, n: usize) -> u8 {
        (n as u8 & 1) & (1 ^ self.match_parity)
    }
}

/// Promise members on which the function's term is 1.
fn effective_minterms(spec: &FunctionSpec) -> Vec<BitString> {
    spec.promise()
        .iter()
        .filter(|p| spec.term(p) == 1)
        .copied()
        .collect()
}

fn unsupported(backend: Backend, why: &str) -> Error {
    Error::UnsupportedDispatch(format!("{backend}: {why}"))
}

fn plan_psi3(spec: &FunctionSpec, ones: &[BitString]) -> Result<EntangledPlan> {
    let fail = |why| Err(unsupported(Backend::Psi3, why));
    if spec.width() != 3 {
        return fail("needs three parties");
    }
    if spec.promise().uniform_parity() != Some(Parity::Even) {
        return fail("needs an even promise");
    }
    let [u] = ones else {
        return fail("needs exactly one minterm inside the promise");
    };
    Ok(EntangledPlan {
        backend: Backend::Psi3,
        u: *u,
        state: psi3(),
        match_parity: 0,
    })
}

fn plan_psi4(spec: &FunctionSpec, ones: &[BitString]) -> Result<EntangledPlan> {
    let fail = |why| Err(unsupported(Backend::Psi4, why));
    if spec.width() != 4 {
        return fail("needs four parties");
    }
    if spec.promise().uniform_parity() != Some(Parity::Odd) {
        return fail("needs an odd promise");
    }
    let u = match ones {
        [u] if !spec.promise().contains(&u.complement()) => *u,
        [u, v] if *v == u.complement() => *u,
        _ => return fail("needs a single minterm without its complement, or a complementary pair"),
    };
    match solve_for(&u, spec.promise())? {
        SignSolution::Consistent(sg) => Ok(EntangledPlan {
            backend: Backend::Psi4,
            u,
            state: build_signed_state(4, &sg)?,
            match_parity: 1,
        }),
        SignSolution::Inconsistent { .. } => fail("sign constraints are inconsistent"),
    }
}

fn plan_ghz(spec: &FunctionSpec, ones: &[BitString]) -> Result<EntangledPlan> {
    let fail = |why| Err(unsupported(Backend::Ghz, why));
    let m = spec.width();
    if !(3..=MAX_QUBITS).contains(&m) {
        return fail("needs between 3 and 20 parties");
    }
    // A match must be a tuple at distance 0 mod 4 from u, a non-match one at 2 mod 4.
    let fits = |u: &BitString| {
        spec.promise().iter().all(|p| {
            let d = u.hamming(p).expect("same width");
            d.is_multiple_of(2) && d.is_multiple_of(4) == (spec.term(p) == 1)
        })
    };
    match ones.iter().find(|u| fits(u)) {
        Some(u) => Ok(EntangledPlan {
            backend: Backend::Ghz,
            u: *u,
            state: ghz(m)?,
            match_parity: 0,
        }),
        None => fail("promise distances from every minterm are not 0 and 2 mod 4 as required"),
    }
}

/// Chooses the backend for `spec`, or checks the requested one.
///
/// Without a request the order is `ψ₃`, then `ψ₄`, then GHZ.
pub fn plan_entangled(spec: &FunctionSpec, backend: Option<Backend>) -> Result<EntangledPlan> {
    if !matches!(
        spec.family(),
        Family::SingleMinterm { .. } | Family::MintermSet { .. }
    ) {
        return Err(Error::UnsupportedDispatch(format!(
            "the entangled protocol covers F_u and F_B, not {}",
            spec.family().name()
        )));
    }
    let ones = effective_minterms(spec);
    match backend {
        Some(Backend::Psi3) => plan_psi3(spec, &ones),
        Some(Backend::Psi4) => plan_psi4(spec, &ones),
        Some(Backend::Ghz) => plan_ghz(spec, &ones),
        None => plan_psi3(spec, &ones)
            .or_else(|_| plan_psi4(spec, &ones))
            .or_else(|_| plan_ghz(spec, &ones))
            .map_err(|_| {
                Error::UnsupportedDispatch(format!(
                    "no entangled backend fits {} with promise {:?}",
                    spec.family().name(),
                    spec.promise().label()
                ))
            }),
    }
}

/// Runs the entangled protocol with the automatically chosen backend.
pub fn run_entangled<R: Rng + ?Sized>(
    spec: &FunctionSpec,
    inputs: &InputMatrix,
    rng: &mut R,
) -> Result<ProtocolOutcome> {
    let plan = plan_entangled(spec, None)?;
    run_with_plan(&plan, spec, inputs, rng)
}

/// Runs the entangled protocol under a fixed plan.
pub fn run_with_plan<R: Rng + ?Sized>(
    plan: &EntangledPlan,
    spec: &FunctionSpec,
    inputs: &InputMatrix,
    rng: &mut R,
) -> Result<ProtocolOutcome> {
    validate_promise(spec, inputs)?;
    let mut views = split_views(inputs);
    let mut support = Vec::with_capacity(spec.n());
    for i in 0..spec.n() {
        let word = views
            .iter()
            .map(|v| plan.gate(v.index, v.inputs[i]))
            .collect::<Vec<_>>();
        let after = plan.state.apply_word(&crate::groups::OpWord::new(word))?;
        support.push(after.support_parity());
        let outcome = after.sample_measurement(rng);
        for v in views.iter_mut() {
            v.record_measurement(outcome.bit(v.index));
        }
    }

    let mut transcript = Transcript::default();
    for v in &views[1..] {
        transcript.send(v.index, 1, vec![v.measured_parity()]);
    }
    let received = transcript.inbox(1).fold(0, |a, m| a ^ m.payload[0]);
    let value = plan.output_offset(spec.n()) ^ views[0].measured_parity() ^ received;
    Ok(ProtocolOutcome {
        value,
        transcript,
        support,
    })
}

fn mod4_reference(spec: &FunctionSpec) -> Result<BitString> {
    let Family::SingleMinterm { u } = spec.family() else {
        return Err(Error::UnsupportedDispatch(format!(
            "the mod-4 protocol covers F_u, not {}",
            spec.family().name()
        )));
    };
    if spec.width() < 3 {
        return Err(Error::UnsupportedDispatch(
            "the mod-4 protocol needs at least three parties".into(),
        ));
    }
    let allowed = PromiseSet::hamming_promise(u, HammingKind::OddMultipleOf2)?;
    if !spec.promise().is_subset_of(&allowed) {
        return Err(Error::UnsupportedDispatch(
            "the mod-4 protocol needs every promise member at distance 0 or 2 mod 4 from u".into(),
        ));
    }
    Ok(*u)
}

/// Classical protocol with `2m − 3` cbits for `F_u` over its odd-multiple-of-2
/// Hamming promise.
///
/// Party `j` first complements its vector when `u_j = 1`, which turns the
/// instance into one for `0^m`. It then counts the ones it holds. The sum of
/// all counts is `2 · (mismatches)` mod 4.
pub fn run_classical_mod4(spec: &FunctionSpec, inputs: &InputMatrix) -> Result<ProtocolOutcome> {
    let u = mod4_reference(spec)?;
    validate_promise(spec, inputs)?;
    let m = spec.width();
    let views = split_views(inputs);
    let counts: Vec<usize> = views
        .iter()
        .map(|v| v.count_ones(u.bit(v.index)) % 4)
        .collect();

    let mut transcript = Transcript::default();
    for v in &views[1..m - 1] {
        let c = counts[v.index - 1];
        transcript.send(v.index, 1, vec![(c >> 1) as u8, (c & 1) as u8]);
    }
    transcript.send(m, 1, vec![(counts[m - 1] >> 1) as u8]);

    // party 1: every tuple has even weight, so the low bits of all counts XOR to zero
    let (full, high_only): (Vec<&Message>, Vec<&Message>) =
        transcript.inbox(1).partition(|msg| msg.payload.len() == 2);
    let mut sum = counts[0];
    let mut missing_low = counts[0] & 1;
    for msg in full {
        sum += 2 * msg.payload[0] as usize + msg.payload[1] as usize;
        missing_low ^= msg.payload[1] as usize;
    }
    for msg in high_only {
        sum += 2 * msg.payload[0] as usize + missing_low;
    }
    let p = (sum % 4) / 2;
    let value = ((spec.n() - p) % 2) as u8;
    Ok(ProtocolOutcome {
        value,
        transcript,
        support: Vec::new(),
    })
}

/// The even member of `A` every party uses as its toggle reference.
fn mixed_reference(spec: &FunctionSpec) -> Result<BitString> {
    match spec.family() {
        Family::MixedParity { a } if spec.width() >= 3 => {
            Ok(*a.iter().next().expect("A is nonempty"))
        }
        Family::MixedParity { .. } => Err(Error::UnsupportedDispatch(
            "the mixed-parity protocol needs at least three parties".into(),
        )),
        other => Err(Error::UnsupportedDispatch(format!(
            "the mixed-parity protocol covers G_A and G_11, not {}",
            other.name()
        ))),
    }
}

/// Classical protocol for `G_A` (`m − 1` cbits) and `G_11` (1 cbit).
///
/// For `G_A` party `j` starts every toggle bit at bit `j` of the initial
/// pattern, which is `u` for odd `m` and `u` with its last bit flipped for
/// even `m`. It toggles the bit for tuple `i` when `u_j ≠ x_i^j`, and for odd
/// `m` toggles every bit once more at the end. Each final pattern then has
/// odd parity exactly when its tuple lies in `A`.
pub fn run_classical_mixed(spec: &FunctionSpec, inputs: &InputMatrix) -> Result<ProtocolOutcome> {
    if *spec.family() == Family::TwoPartyAnd {
        return run_g11(spec, inputs);
    }
    let u = mixed_reference(spec)?;
    validate_promise(spec, inputs)?;
    let m = spec.width();
    let init = if m % 2 == 1 { u } else { u.flip(m) };
    let mut views = split_views(inputs);
    for v in views.iter_mut() {
        let start = init.bit(v.index);
        let uj = u.bit(v.index);
        let last = (m % 2) as u8;
        v.toggles = v.inputs.iter().map(|&x| start ^ uj ^ x ^ last).collect();
    }

    let mut transcript = Transcript::default();
    for v in &views[1..] {
        transcript.send(v.index, 1, vec![v.toggle_parity()]);
    }
    let value = transcript
        .inbox(1)
        .fold(views[0].toggle_parity(), |a, msg| a ^ msg.payload[0]);
    Ok(ProtocolOutcome {
        value,
        transcript,
        support: Vec::new(),
    })
}

/// Alice answers `x`, Bob answers `1 ⊕ y`; their XOR is `x ∧ y` on `{11, 01, 10}`.
fn run_g11(spec: &FunctionSpec, inputs: &InputMatrix) -> Result<ProtocolOutcome> {
    validate_promise(spec, inputs)?;
    let mut views = split_views(inputs);
    views[0].toggles = views[0].inputs.clone();
    views[1].toggles = views[1].inputs.iter().map(|y| 1 ^ y).collect();
    let mut transcript = Transcript::default();
    transcript.send(2, 1, vec![views[1].toggle_parity()]);
    let value = views[0].toggle_parity() ^ transcript.messages[0].payload[0];
    Ok(ProtocolOutcome {
        value,
        transcript,
        support: Vec::new(),
    })
}

/// Which protocol a sweep exercises.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Runner {
    Entangled(Option<Backend>),
    ClassicalMod4,
    ClassicalMixed,
}

impl Runner {
    /// The exact cbit count every run must produce.
    pub fn cbit_bound(&self, spec: &FunctionSpec) -> usize {
        let m = spec.width();
        match self {
            Runner::Entangled(_) => m - 1,
            Runner::ClassicalMod4 => 2 * m - 3,
            Runner::ClassicalMixed => m - 1,
        }
    }

    /// Fails early when the protocol does not apply to `spec`.
    pub fn check(&self, spec: &FunctionSpec) -> Result<()> {
        match self {
            Runner::Entangled(b) => plan_entangled(spec, *b).map(|_| ()),
            Runner::ClassicalMod4 => mod4_reference(spec).map(|_| ()),
            Runner::ClassicalMixed if *spec.family() == Family::TwoPartyAnd => Ok(()),
            Runner::ClassicalMixed => mixed_reference(spec).map(|_| ()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub trials: usize,
    pub mismatches: usize,
    pub min_cbits: usize,
    pub max_cbits: usize,
    pub expected_cbits: usize,
    /// Registers whose post-operation support mixed both parities.
    pub support_violations: usize,
    /// Lowest-numbered failing trial, if any.
    pub first_mismatch: Option<usize>,
}

impl VerifyReport {
    /// No mismatches, no impure supports, and every transcript at the bound.
    pub fn passed(&self) -> bool {
        self.mismatches == 0
            && self.support_violations == 0
            && self.min_cbits == self.expected_cbits
            && self.max_cbits == self.expected_cbits
    }
}

struct Trial {
    mismatch: bool,
    cbits: usize,
    impure: usize,
}

/// Runs `runner` on every input `coverage` produces and compares each value
/// with the oracle. Trial `k` draws its measurements from `seed + k`.
///
/// Trials run on the current rayon pool; the report does not depend on the
/// pool size.
pub fn verify(
    spec: &FunctionSpec,
    runner: Runner,
    coverage: InputMode,
    seed: u64,
) -> Result<VerifyReport> {
    verify_with_tol(spec, runner, coverage, seed, DEFAULT_TOL)
}

/// [`verify`] with an explicit zero-amplitude tolerance for the entangled runs.
pub fn verify_with_tol(
    spec: &FunctionSpec,
    runner: Runner,
    coverage: InputMode,
    seed: u64,
    tol: f64,
) -> Result<VerifyReport> {
    runner.check(spec)?;
    let plan = match runner {
        Runner::Entangled(b) => Some(plan_entangled(spec, b)?.with_tol(tol)),
        _ => None,
    };
    let inputs: Vec<InputMatrix> = gen_inputs(spec, coverage)?.collect();
    let trials: Vec<Result<Trial>> = inputs
        .par_iter()
        .enumerate()
        .map(|(k, x)| {
            let expected = oracle_eval(spec, x)?;
            let outcome = match (&plan, runner) {
                (Some(plan), _) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
                    run_with_plan(plan, spec, x, &mut rng)?
                }
                (None, Runner::ClassicalMod4) => run_classical_mod4(spec, x)?,
                (None, _) => run_classical_mixed(spec, x)?,
            };
            Ok(Trial {
                mismatch: outcome.value != expected,
                cbits: outcome.transcript.total_cbits(),
                impure: outcome
                    .support
                    .iter()
                    .filter(|s| **s == SupportParity::Mixed)
                    .count(),
            })
        })
        .collect();

    let mut report = VerifyReport {
        trials: trials.len(),
        mismatches: 0,
        min_cbits: usize::MAX,
        max_cbits: 0,
        expected_cbits: runner.cbit_bound(spec),
        support_violations: 0,
        first_mismatch: None,
    };
    for (k, t) in trials.into_iter().enumerate() {
        let t = t?;
        if t.mismatch {
            report.mismatches += 1;
            report.first_mismatch.get_or_insert(k);
        }
        report.min_cbits = report.min_cbits.min(t.cbits);
        report.max_cbits = report.max_cbits.max(t.cbits);
        report.support_violations += t.impure;
    }
    if report.trials == 0 {
        report.min_cbits = 0;
    }
    Ok(report)
}
