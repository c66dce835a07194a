//! Dense statevector simulation of one shared `m`-qubit register.
//!
//! Qubit `j` (1-based) belongs to party `j`. Basis states are indexed by the
//! numeric value of their [`BitString`] label, so party 1's qubit is the most
//! significant bit of the index.
//!
//! Only the gates the protocols need are modelled: `I`, the Hadamard `H`, and
//! `HR`, which applies the phase gate `R = diag(1, i)` and then `H`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::bitcore::BitString;
use crate::error::{Error, Result};
use crate::groups::{GateSymbol, OpWord};
use crate::signsolve::SignAssignment;

/// Largest register the dense engine will allocate.
pub const MAX_QUBITS: usize = 20;

/// Amplitudes at or below this magnitude count as zero.
pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SupportParity {
    Even,
    Odd,
    Mixed,
}

impl fmt::Display for SupportParity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SupportParity::Even => "Even",
            SupportParity::Odd => "Odd",
            SupportParity::Mixed => "Mixed",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    width: usize,
    amps: Vec<Complex64>,
    tol: f64,
}

fn check_qubits(width: usize) -> Result<()> {
    if width == 0 {
        return Err(Error::InvalidWidth {
            width,
            max: MAX_QUBITS,
        });
    }
    if width > MAX_QUBITS {
        return Err(Error::WidthTooLarge {
            width,
            cap: MAX_QUBITS,
        });
    }
    Ok(())
}

impl StateVector {
    /// The computational basis state `|v>`.
    pub fn basis(v: &BitString) -> Result<Self> {
        check_qubits(v.width())?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << v.width()];
        amps[v.value() as usize] = Complex64::new(1.0, 0.0);
        Ok(StateVector {
            width: v.width(),
            amps,
            tol: DEFAULT_TOL,
        })
    }

    /// Wraps raw amplitudes; `amps.len()` must be `2^width`. No normalization
    /// is performed.
    pub fn from_amplitudes(width: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_qubits(width)?;
        if amps.len() != 1 << width {
            return Err(Error::LengthMismatch {
                left: 1 << width,
                right: amps.len(),
            });
        }
        Ok(StateVector {
            width,
            amps,
            tol: DEFAULT_TOL,
        })
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, v: &BitString) -> Complex64 {
        assert_eq!(v.width(), self.width, "basis label width");
        self.amps[v.value() as usize]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest componentwise distance to `other`.
    pub fn max_distance(&self, other: &StateVector) -> f64 {
        assert_eq!(self.width, other.width);
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Applies `word[j]` to qubit `j + 1` for every party.
    pub fn apply_word(&self, word: &OpWord) -> Result<StateVector> {
        if word.len() != self.width {
            return Err(Error::LengthMismatch {
                left: self.width,
                right: word.len(),
            });
        }
        let mut out = self.clone();
        for (j, sym) in word.symbols().iter().enumerate() {
            out.apply_gate(j + 1, *sym);
        }
        Ok(out)
    }

    fn apply_gate(&mut self, qubit: usize, gate: GateSymbol) {
        let mask = 1usize << (self.width - qubit);
        let phase = match gate {
            GateSymbol::I => return,
            GateSymbol::H => Complex64::new(1.0, 0.0),
            GateSymbol::HR => Complex64::new(0.0, 1.0),
        };
        for i in 0..self.amps.len() {
            if i & mask != 0 {
                continue;
            }
            let a0 = self.amps[i];
            let a1 = self.amps[i | mask] * phase;
            self.amps[i] = (a0 + a1) * FRAC_1_SQRT_2;
            self.amps[i | mask] = (a0 - a1) * FRAC_1_SQRT_2;
        }
    }

    /// Basis states with amplitude magnitude above the tolerance, ascending.
    pub fn support(&self) -> Vec<BitString> {
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > self.tol)
            .map(|(i, _)| BitString::from_value(self.width, i as u64).expect("index fits"))
            .collect()
    }

    pub fn support_parity(&self) -> SupportParity {
        let mut seen = [false; 2];
        for v in self.support() {
            seen[v.parity() as usize] = true;
        }
        match seen {
            [true, false] => SupportParity::Even,
            [false, true] => SupportParity::Odd,
            _ => SupportParity::Mixed,
        }
    }

    /// Draws a basis state with probability `|amplitude|^2`, restricted to the
    /// support so that sub-tolerance noise is never observed.
    pub fn sample_measurement<R: Rng + ?Sized>(&self, rng: &mut R) -> BitString {
        let support: Vec<(usize, f64)> = self
            .amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > self.tol)
            .map(|(i, a)| (i, a.norm_sqr()))
            .collect();
        let total: f64 = support.iter().map(|(_, p)| p).sum();
        let mut r = rng.random::<f64>() * total;
        let mut pick = support.last().expect("nonzero state").0;
        for &(i, p) in &support {
            if r < p {
                pick = i;
                break;
            }
            r -= p;
        }
        BitString::from_value(self.width, pick as u64).expect("index fits")
    }
}

impl fmt::Display for StateVector {
    /// One line per support state in ascending order, e.g. `-0.500000 |011>`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in self.support() {
            writeln!(
                f,
                "{} |{}>",
                format_amplitude(self.amplitude(&v), self.tol),
                v
            )?;
        }
        Ok(())
    }
}

/// `+0.500000`, `-0.707107i`, or `+0.500000-0.500000i`.
pub fn format_amplitude(a: Complex64, tol: f64) -> String {
    let re = if a.re.abs() > tol { a.re } else { 0.0 };
    let im = if a.im.abs() > tol { a.im } else { 0.0 };
    match (re != 0.0, im != 0.0) {
        (_, false) => format!("{re:+.6}"),
        (false, true) => format!("{im:+.6}i"),
        (true, true) => format!("{re:+.6}{im:+.6}i"),
    }
}

/// `(|0...0> + |1...1>) / sqrt(2)`.
pub fn ghz(width: usize) -> Result<StateVector> {
    check_qubits(width)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << width];
    amps[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    amps[(1 << width) - 1] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    StateVector::from_amplitudes(width, amps)
}

/// `(|000> - |011> - |101> - |110>) / 2`.
pub fn psi3() -> StateVector {
    let mut amps = vec![Complex64::new(0.0, 0.0); 8];
    amps[0b000] = Complex64::new(0.5, 0.0);
    amps[0b011] = Complex64::new(-0.5, 0.0);
    amps[0b101] = Complex64::new(-0.5, 0.0);
    amps[0b110] = Complex64::new(-0.5, 0.0);
    StateVector::from_amplitudes(3, amps).expect("three qubits")
}

/// Uniform-magnitude superposition over the parity class of `sg`, with a
/// minus sign on every basis state `v` where `sg(v) = 1`.
pub fn build_signed_state(width: usize, sg: &SignAssignment) -> Result<StateVector> {
    check_qubits(width)?;
    if sg.width() != width {
        return Err(Error::LengthMismatch {
            left: width,
            right: sg.width(),
        });
    }
    let scale = 1.0 / ((1u64 << (width - 1)) as f64).sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << width];
    for v in BitString::all(width)?.filter(|v| v.parity_class() == sg.class()) {
        let sign = match sg.get(&v) {
            Some(0) => 1.0,
            Some(_) => -1.0,
            None => return Err(Error::IncompleteAssignment(v)),
        };
        amps[v.value() as usize] = Complex64::new(sign * scale, 0.0);
    }
    StateVector::from_amplitudes(width, amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitcore::{HammingKind, Parity, PromiseSet};
    use crate::groups::{direct_entry, Alphabet};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn b(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn w(s: &str) -> OpWord {
        s.parse().unwrap()
    }

    /// Real state from `(coefficient, basis)` pairs.
    fn real_state(width: usize, terms: &[(f64, &str)]) -> StateVector {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << width];
        for (c, v) in terms {
            amps[b(v).value() as usize] = Complex64::new(*c, 0.0);
        }
        StateVector::from_amplitudes(width, amps).unwrap()
    }

    #[test]
    fn ghz_examples() {
        let g2 = ghz(2).unwrap();
        assert!((g2.amplitude(&b("00")).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((g2.amplitude(&b("11")).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(ghz(3).unwrap().support(), vec![b("000"), b("111")]);
        assert_eq!(ghz(3).unwrap().support_parity(), SupportParity::Mixed);
        assert_eq!(ghz(4).unwrap().support_parity(), SupportParity::Even);
        assert!(matches!(ghz(21), Err(Error::WidthTooLarge { .. })));
        assert!(ghz(0).is_err());
    }

    #[test]
    fn psi3_examples() {
        let s = psi3();
        assert_eq!(s.support(), vec![b("000"), b("011"), b("101"), b("110")]);
        assert_eq!(s.amplitude(&b("000")).re, 0.5);
        assert_eq!(s.amplitude(&b("011")).re, -0.5);
        assert!((s.norm() - 1.0).abs() < 1e-15);
        assert_eq!(s.support_parity(), SupportParity::Even);
    }

    #[test]
    fn psi3_images_under_two_hadamards() {
        let s = psi3();
        let cases = [
            (
                "IHH",
                [(0.5, "001"), (0.5, "010"), (0.5, "111"), (-0.5, "100")],
            ),
            (
                "HIH",
                [(0.5, "001"), (0.5, "100"), (0.5, "111"), (-0.5, "010")],
            ),
            (
                "HHI",
                [(0.5, "010"), (-0.5, "001"), (0.5, "100"), (0.5, "111")],
            ),
        ];
        for (word, terms) in cases {
            let out = s.apply_word(&w(word)).unwrap();
            let expected = real_state(3, &terms);
            assert!(out.max_distance(&expected) < 1e-12, "{word}: {out}");
            assert_eq!(out.support_parity(), SupportParity::Odd);
        }
        assert_eq!(s.apply_word(&w("III")).unwrap(), s);
    }

    #[test]
    fn apply_word_checks_length() {
        assert!(psi3().apply_word(&w("IH")).is_err());
    }

    #[test]
    fn signed_state_examples() {
        let mut signs = BTreeMap::new();
        for v in ["001", "010", "100"] {
            signs.insert(b(v), 0);
        }
        signs.insert(b("111"), 1);
        let sg = SignAssignment::new(3, Parity::Odd, signs.clone()).unwrap();
        let s = build_signed_state(3, &sg).unwrap();
        let expected = real_state(
            3,
            &[(0.5, "001"), (0.5, "010"), (0.5, "100"), (-0.5, "111")],
        );
        assert!(s.max_distance(&expected) < 1e-15);

        let zero = SignAssignment::constant(5, Parity::Odd).unwrap();
        let s5 = build_signed_state(5, &zero).unwrap();
        assert_eq!(s5.support().len(), 16);
        assert!(s5.amplitudes().iter().all(|a| a.re >= 0.0));
        assert!((s5.norm() - 1.0).abs() < 1e-12);

        signs.remove(&b("010"));
        let partial = SignAssignment::new(3, Parity::Odd, signs).unwrap();
        assert_eq!(
            build_signed_state(3, &partial),
            Err(Error::IncompleteAssignment(b("010")))
        );
    }

    #[test]
    fn double_hadamard_is_identity() {
        let all_h = OpWord::new(vec![GateSymbol::H; 4]);
        let s = ghz(4).unwrap().apply_word(&w("HHRIH")).unwrap();
        let back = s.apply_word(&all_h).unwrap().apply_word(&all_h).unwrap();
        assert!(back.max_distance(&s) < 1e-12);
    }

    #[test]
    fn ghz_phase_law_up_to_width_6() {
        for m in 1..=6 {
            let g = ghz(m).unwrap();
            for u in BitString::all(m).unwrap() {
                for p in BitString::all(m)
                    .unwrap()
                    .filter(|p| p.parity() == u.parity())
                {
                    let k = u.hamming(&p).unwrap() / 2;
                    let word = direct_entry(&u, &p, Alphabet::HHR).unwrap();
                    let out = g.apply_word(&word).unwrap();
                    let expected = if k % 2 == 1 {
                        SupportParity::Odd
                    } else {
                        SupportParity::Even
                    };
                    assert_eq!(out.support_parity(), expected, "m={m} u={u} p={p}");
                }
            }
        }
    }

    #[test]
    fn hamming_promise_words_on_ghz() {
        let u = b("00000");
        let g = ghz(5).unwrap();
        let p = PromiseSet::hamming_promise(&u, HammingKind::OddMultipleOf2).unwrap();
        for v in p.iter() {
            let out = g
                .apply_word(&direct_entry(&u, v, Alphabet::HHR).unwrap())
                .unwrap();
            let expected = if *v == u {
                SupportParity::Even
            } else {
                SupportParity::Odd
            };
            assert_eq!(out.support_parity(), expected);
        }
    }

    #[test]
    fn measurement_examples() {
        let s = psi3();
        let e3 = PromiseSet::parity_class(3, Parity::Even).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            assert!(e3.contains(&s.sample_measurement(&mut rng)));
        }
        let zero = StateVector::basis(&b("0000")).unwrap();
        assert_eq!(zero.sample_measurement(&mut rng), b("0000"));

        let g = ghz(3).unwrap();
        let mut counts = [0usize; 2];
        for seed in 0..1000u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let v = g.sample_measurement(&mut rng);
            counts[(v == b("111")) as usize] += 1;
            assert!(v == b("000") || v == b("111"));
        }
        assert!(counts[0] > 400 && counts[1] > 400, "{counts:?}");
    }

    #[test]
    fn measurement_is_seed_deterministic() {
        let s = ghz(6).unwrap().apply_word(&w("HHHHHH")).unwrap();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..50)
                .map(|_| s.sample_measurement(&mut rng))
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(3), draw(3));
    }

    #[test]
    fn display_format() {
        assert_eq!(
            psi3().to_string(),
            "+0.500000 |000>\n-0.500000 |011>\n-0.500000 |101>\n-0.500000 |110>\n"
        );
        assert_eq!(
            format_amplitude(Complex64::new(0.0, -0.5), 1e-12),
            "-0.500000i"
        );
        assert_eq!(
            format_amplitude(Complex64::new(0.25, 0.25), 1e-12),
            "+0.250000+0.250000i"
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn word(m: usize) -> impl Strategy<Value = OpWord> {
            proptest::collection::vec(
                prop_oneof![
                    Just(GateSymbol::I),
                    Just(GateSymbol::H),
                    Just(GateSymbol::HR)
                ],
                m,
            )
            .prop_map(OpWord::new)
        }

        fn words() -> impl Strategy<Value = (usize, Vec<OpWord>)> {
            (1usize..=8).prop_flat_map(|m| (Just(m), proptest::collection::vec(word(m), 1..5)))
        }

        proptest! {
            #[test]
            fn words_are_unitary((m, ws) in words(), seed in any::<u64>()) {
                let mut s = ghz(m).unwrap();
                for wd in &ws {
                    s = s.apply_word(wd).unwrap();
                    prop_assert!((s.norm() - 1.0).abs() < 1e-12);
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let v = s.sample_measurement(&mut rng);
                prop_assert!(s.amplitude(&v).norm() > s.tol());
            }
        }
    }
}
