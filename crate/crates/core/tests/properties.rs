use std::collections::BTreeSet;

use entangle_cc::bitcore::{BitString, HammingKind, Parity, PromiseSet};
use entangle_cc::functions::{oracle_eval, reduce_instance, FunctionSpec, InputMatrix};
use entangle_cc::protocols::{run_classical_mixed, run_classical_mod4, run_entangled};
use entangle_cc::quantum::SupportParity;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bits(width: usize) -> impl Strategy<Value = BitString> {
    (0u64..1 << width).prop_map(move |v| BitString::from_value(width, v).unwrap())
}

/// `n` tuples drawn from `promise`.
fn tuples_from(
    promise: &PromiseSet,
    n: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = InputMatrix> {
    let members: Vec<BitString> = promise.iter().copied().collect();
    prop::collection::vec(prop::sample::select(members), n)
        .prop_map(|ts| InputMatrix::from_tuples(&ts).unwrap())
}

fn hamming_case() -> impl Strategy<Value = (FunctionSpec, InputMatrix)> {
    (3usize..=7)
        .prop_flat_map(bits)
        .prop_flat_map(|u| {
            let promise = PromiseSet::hamming_promise(&u, HammingKind::OddMultipleOf2).unwrap();
            (Just(u), Just(promise.clone()), tuples_from(&promise, 1..=6))
        })
        .prop_map(|(u, promise, x)| (FunctionSpec::f_u(u, promise, x.len()).unwrap(), x))
}

fn mixed_case() -> impl Strategy<Value = (FunctionSpec, InputMatrix)> {
    (3usize..=6)
        .prop_flat_map(|m| {
            let evens: Vec<BitString> = PromiseSet::parity_class(m, Parity::Even)
                .unwrap()
                .iter()
                .copied()
                .collect();
            (
                Just(m),
                prop::sample::subsequence(evens.clone(), 1..=evens.len()),
            )
        })
        .prop_flat_map(|(m, a)| {
            let a: BTreeSet<BitString> = a.into_iter().collect();
            let promise = PromiseSet::mixed_union(m, &a).unwrap();
            (Just(m), Just(a), tuples_from(&promise, 1..=6))
        })
        .prop_map(|(m, a, x)| (FunctionSpec::g_a(m, a, x.len()).unwrap(), x))
}

proptest! {
    #[test]
    fn entangled_value_matches_oracle_for_any_seed((spec, x) in hamming_case(), s1: u64, s2: u64) {
        let a = run_entangled(&spec, &x, &mut ChaCha8Rng::seed_from_u64(s1)).unwrap();
        let b = run_entangled(&spec, &x, &mut ChaCha8Rng::seed_from_u64(s2)).unwrap();
        let want = oracle_eval(&spec, &x).unwrap();
        prop_assert_eq!(a.value, want);
        prop_assert_eq!(b.value, want);
        prop_assert_eq!(a.transcript.total_cbits(), spec.width() - 1);
        prop_assert!(a.support.iter().all(|s| *s != SupportParity::Mixed));
    }

    #[test]
    fn mod4_value_matches_oracle((spec, x) in hamming_case()) {
        let out = run_classical_mod4(&spec, &x).unwrap();
        prop_assert_eq!(out.value, oracle_eval(&spec, &x).unwrap());
        prop_assert_eq!(out.transcript.total_cbits(), 2 * spec.width() - 3);
    }

    #[test]
    fn mixed_value_matches_oracle((spec, x) in mixed_case()) {
        let out = run_classical_mixed(&spec, &x).unwrap();
        prop_assert_eq!(out.value, oracle_eval(&spec, &x).unwrap());
        prop_assert_eq!(out.transcript.total_cbits(), spec.width() - 1);
    }

    #[test]
    fn mixed_value_is_parity_of_all_bits((spec, x) in mixed_case()) {
        let all = (1..=x.parties()).flat_map(|j| x.row(j).to_vec()).fold(0, |a, b| a ^ b);
        prop_assert_eq!(oracle_eval(&spec, &x).unwrap(), (x.len() as u8 & 1) ^ all);
    }

    #[test]
    fn reduction_preserves_value((spec, x) in hamming_case(), target in 0u64..128) {
        let m = spec.width();
        let u2 = BitString::from_value(m, target % (1 << m)).unwrap();
        let g = spec.retarget(u2).unwrap();
        let entangle_cc::functions::Family::SingleMinterm { u } = spec.family() else { unreachable!() };
        let y = reduce_instance(u, &u2, &x).unwrap();
        prop_assert_eq!(oracle_eval(&spec, &x).unwrap(), oracle_eval(&g, &y).unwrap());
        prop_assert_eq!(reduce_instance(&u2, u, &y).unwrap(), x);
    }

    #[test]
    fn matrix_text_roundtrip(rows in (1usize..6, 1usize..8).prop_flat_map(|(m, n)| {
        prop::collection::vec(prop::collection::vec(0u8..2, n), m)
    })) {
        let x = InputMatrix::from_rows(rows).unwrap();
        prop_assert_eq!(x.to_string().parse::<InputMatrix>().unwrap(), x);
    }
}
