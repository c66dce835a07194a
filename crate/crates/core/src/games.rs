//! Single-tuple non-locality games against deterministic local strategies.
//!
//! Each party sees one input bit and answers one bit. The parties win when
//! the XOR of their answers equals the target value on every promise member.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::bitcore::{BitString, PromiseSet};
use crate::error::{Error, Result};
use crate::functions::FunctionSpec;

/// Largest party count the exhaustive `4^m` search accepts.
pub const MAX_GAME_WIDTH: usize = 12;

/// One response map `{0,1} → {0,1}` per party.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LocalStrategy {
    maps: Vec<[u8; 2]>,
}

impl LocalStrategy {
    pub fn new(maps: Vec<[u8; 2]>) -> Result<Self> {
        if maps.is_empty() || maps.len() > MAX_GAME_WIDTH {
            return Err(Error::InvalidWidth {
                width: maps.len(),
                max: MAX_GAME_WIDTH,
            });
        }
        if maps.iter().flatten().any(|&b| b > 1) {
            return Err(Error::InvalidSpec("responses must be bits".into()));
        }
        Ok(LocalStrategy { maps })
    }

    /// Strategy number `k` in canonical order: base-4 digits, party 1 most
    /// significant, digit `2·a(0) + a(1)`.
    pub fn from_index(width: usize, k: u64) -> Self {
        let maps = (1..=width)
            .map(|j| {
                let digit = (k >> (2 * (width - j))) & 3;
                [(digit >> 1) as u8, (digit & 1) as u8]
            })
            .collect();
        LocalStrategy { maps }
    }

    pub fn width(&self) -> usize {
        self.maps.len()
    }

    /// Party `j`'s (1-based) answer to input bit `x`.
    pub fn respond(&self, j: usize, x: u8) -> u8 {
        self.maps[j - 1][x as usize]
    }

    /// XOR of every party's answer on `tuple`.
    pub fn play(&self, tuple: &BitString) -> u8 {
        (1..=self.width()).fold(0, |acc, j| acc ^ self.respond(j, tuple.bit(j)))
    }
}

impl fmt::Display for LocalStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, [a0, a1]) in self.maps.iter().enumerate() {
            if j > 0 {
                f.write_str("\n")?;
            }
            write!(f, "a_{}(0)={a0} a_{}(1)={a1}", j + 1, j + 1)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameSpec {
    width: usize,
    promise: PromiseSet,
    target: BTreeMap<BitString, u8>,
}

impl GameSpec {
    /// `target` must assign a bit to every promise member and nothing else.
    pub fn new(promise: PromiseSet, target: BTreeMap<BitString, u8>) -> Result<Self> {
        if target.len() != promise.len() || !promise.iter().all(|p| target.contains_key(p)) {
            return Err(Error::InvalidSpec(
                "target must cover exactly the promise".into(),
            ));
        }
        if target.values().any(|&t| t > 1) {
            return Err(Error::InvalidSpec("targets must be bits".into()));
        }
        Ok(GameSpec {
            width: promise.width(),
            promise,
            target,
        })
    }

    pub fn from_fn(promise: PromiseSet, t: impl Fn(&BitString) -> u8) -> Result<Self> {
        let target = promise.iter().map(|p| (*p, t(p))).collect();
        Self::new(promise, target)
    }

    /// Target 1 on `u`, 0 elsewhere.
    pub fn minterm(promise: PromiseSet, u: &BitString) -> Result<Self> {
        Self::from_fn(promise, |p| u8::from(p == u))
    }

    /// The single-tuple game behind a function family.
    pub fn from_function(spec: &FunctionSpec) -> Result<Self> {
        Self::from_fn(spec.promise().clone(), |p| spec.term(p))
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn promise(&self) -> &PromiseSet {
        &self.promise
    }

    pub fn target(&self, p: &BitString) -> Option<u8> {
        self.target.get(p).copied()
    }

    pub fn wins(&self, strategy: &LocalStrategy) -> bool {
        strategy.width() == self.width && self.target.iter().all(|(p, t)| strategy.play(p) == *t)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GameOutcome {
    Winnable(LocalStrategy),
    Impossible,
}

/// Searches all `4^m` strategies and returns the first winner in canonical
/// order, whatever the thread count.
pub fn ccf_search(game: &GameSpec) -> Result<GameOutcome> {
    let m = game.width;
    if m > MAX_GAME_WIDTH {
        return Err(Error::SearchTooLarge {
            width: m,
            max: MAX_GAME_WIDTH,
        });
    }
    let found = (0..1u64 << (2 * m))
        .into_par_iter()
        .find_first(|&k| game.wins(&LocalStrategy::from_index(m, k)));
    Ok(match found {
        Some(k) => GameOutcome::Winnable(LocalStrategy::from_index(m, k)),
        None => GameOutcome::Impossible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitcore::Parity;
    use std::collections::BTreeSet;

    fn b(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn mixed_game(width: usize, a: &BTreeSet<BitString>) -> GameSpec {
        let promise = PromiseSet::mixed_union(width, a).unwrap();
        GameSpec::from_fn(promise, |p| 1 ^ p.parity()).unwrap()
    }

    #[test]
    fn even_three_party_minterm_is_impossible() {
        let e3 = PromiseSet::parity_class(3, Parity::Even).unwrap();
        for u in e3.iter() {
            let game = GameSpec::minterm(e3.clone(), u).unwrap();
            assert_eq!(ccf_search(&game).unwrap(), GameOutcome::Impossible);
        }
    }

    #[test]
    fn two_party_and_is_impossible() {
        let game = GameSpec::minterm(PromiseSet::full(2).unwrap(), &b("11")).unwrap();
        assert_eq!(ccf_search(&game).unwrap(), GameOutcome::Impossible);
    }

    #[test]
    fn restricted_and_is_winnable() {
        let spec = FunctionSpec::g_11(1).unwrap();
        let game = GameSpec::from_function(&spec).unwrap();
        let GameOutcome::Winnable(s) = ccf_search(&game).unwrap() else {
            panic!("expected a winner");
        };
        assert!(game.wins(&s));
    }

    #[test]
    fn mixed_parity_game_is_winnable() {
        let game = mixed_game(3, &[b("000")].into());
        let witness = LocalStrategy::new(vec![[1, 0], [0, 1], [0, 1]]).unwrap();
        assert!(game.wins(&witness));
        let GameOutcome::Winnable(found) = ccf_search(&game).unwrap() else {
            panic!("expected a winner");
        };
        assert!(game.wins(&found));
        assert_eq!(found, LocalStrategy::from_index(3, 0b01_01_10));
        assert_eq!(
            found.to_string(),
            "a_1(0)=0 a_1(1)=1\na_2(0)=0 a_2(1)=1\na_3(0)=1 a_3(1)=0"
        );
    }

    #[test]
    fn every_mixed_parity_game_is_winnable() {
        for m in 3..=4 {
            let evens: Vec<BitString> = PromiseSet::parity_class(m, Parity::Even)
                .unwrap()
                .iter()
                .copied()
                .collect();
            for mask in 1u32..(1 << evens.len()) {
                let a: BTreeSet<_> = (0..evens.len())
                    .filter(|k| mask >> k & 1 == 1)
                    .map(|k| evens[k])
                    .collect();
                let game = mixed_game(m, &a);
                assert!(matches!(
                    ccf_search(&game).unwrap(),
                    GameOutcome::Winnable(_)
                ));
            }
        }
    }

    #[test]
    fn supersets_of_impossible_games_stay_impossible() {
        let u = b("000");
        let full = GameSpec::minterm(PromiseSet::full(3).unwrap(), &u).unwrap();
        assert_eq!(ccf_search(&full).unwrap(), GameOutcome::Impossible);
        let e3 = PromiseSet::parity_class(3, Parity::Even).unwrap();
        for extra in PromiseSet::parity_class(3, Parity::Odd).unwrap().iter() {
            let wider = PromiseSet::explicit(3, e3.iter().copied().chain([*extra])).unwrap();
            let game = GameSpec::minterm(wider, &u).unwrap();
            assert_eq!(ccf_search(&game).unwrap(), GameOutcome::Impossible);
        }
    }

    #[test]
    fn search_cap() {
        let game = GameSpec::minterm(
            PromiseSet::explicit(13, [BitString::zeros(13).unwrap()]).unwrap(),
            &BitString::zeros(13).unwrap(),
        )
        .unwrap();
        assert_eq!(
            ccf_search(&game),
            Err(Error::SearchTooLarge { width: 13, max: 12 })
        );
    }

    #[test]
    fn target_must_cover_promise() {
        let e3 = PromiseSet::parity_class(3, Parity::Even).unwrap();
        assert!(GameSpec::new(e3, [(b("000"), 1)].into()).is_err());
    }
}
