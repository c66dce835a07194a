//! Sign constraints for uniform-magnitude entangled states, and a
//! parity-labelled union-find that solves them.
//!
//! The state is a superposition over one parity class with a sign
//! `(-1)^sg(v)` on each basis state `v`. Applying `H` to the two qubits where
//! `u` and an input tuple `p` disagree (positions `i`, `j`) mixes pairs of
//! basis states `s`, `t = s ⊕ e_i ⊕ e_j`. Every same-parity term cancels
//! exactly when `s_i ⊕ s_j ⊕ sg(s) ⊕ sg(t) = 1` for all such pairs.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::bitcore::{BitString, Parity, PromiseSet};
use crate::error::{Error, Result};

/// `sg(s) ⊕ sg(t) = rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SignConstraint {
    pub s: BitString,
    pub t: BitString,
    pub rhs: u8,
}

impl fmt::Display for SignConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sg({}) ^ sg({}) = {}", self.s, self.t, self.rhs)
    }
}

/// A (possibly partial) map from the basis states of one parity class to
/// sign bits, 1 meaning a minus sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignAssignment {
    width: usize,
    class: Parity,
    signs: BTreeMap<BitString, u8>,
}

impl SignAssignment {
    pub fn new(width: usize, class: Parity, signs: BTreeMap<BitString, u8>) -> Result<Self> {
        for (v, bit) in &signs {
            if v.width() != width {
                return Err(Error::LengthMismatch {
                    left: width,
                    right: v.width(),
                });
            }
            if v.parity_class() != class || *bit > 1 {
                return Err(Error::InvalidSpec(format!(
                    "sign entry {v} -> {bit} outside the {class} class"
                )));
            }
        }
        Ok(SignAssignment {
            width,
            class,
            signs,
        })
    }

    /// All-plus assignment over the whole class.
    pub fn constant(width: usize, class: Parity) -> Result<Self> {
        let signs = PromiseSet::parity_class(width, class)?
            .iter()
            .map(|v| (*v, 0))
            .collect();
        Self::new(width, class, signs)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn class(&self) -> Parity {
        self.class
    }

    pub fn get(&self, v: &BitString) -> Option<u8> {
        self.signs.get(v).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BitString, &u8)> {
        self.signs.iter()
    }

    pub fn satisfies(&self, constraints: &[SignConstraint]) -> bool {
        constraints
            .iter()
            .all(|c| match (self.get(&c.s), self.get(&c.t)) {
                (Some(a), Some(b)) => a ^ b == c.rhs,
                _ => false,
            })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SignSolution {
    Consistent(SignAssignment),
    /// A cycle of constraints whose right-hand sides sum to 1.
    Inconsistent {
        witness: Vec<SignConstraint>,
    },
}

/// Constraints that make the two-Hadamard image of the signed state land in
/// the opposite parity class for every promise member at distance 2 from `u`.
///
/// The state lives on the parity class of `u`.
pub fn gen_constraints(u: &BitString, promise: &PromiseSet) -> Result<Vec<SignConstraint>> {
    if promise.width() != u.width() {
        return Err(Error::LengthMismatch {
            left: u.width(),
            right: promise.width(),
        });
    }
    if let Some(p) = promise.iter().find(|p| p.parity() != u.parity()) {
        return Err(Error::ParityMismatch(*p, *u));
    }
    let class = PromiseSet::parity_class(u.width(), u.parity_class())?;
    let mut out = Vec::new();
    for p in promise.iter() {
        let diff = u.xor(p)?;
        if diff.weight() != 2 {
            continue;
        }
        let pos = diff.support();
        let (i, j) = (pos[0], pos[1]);
        for s in class.iter() {
            let t = s.xor(&diff)?;
            if *s < t {
                out.push(SignConstraint {
                    s: *s,
                    t,
                    rhs: 1 ^ s.bit(i) ^ s.bit(j),
                });
            }
        }
    }
    Ok(out)
}

struct ParityUnionFind {
    parent: Vec<usize>,
    /// Parity of the path from a node to its parent.
    rel: Vec<u8>,
    size: Vec<usize>,
}

impl ParityUnionFind {
    fn new(n: usize) -> Self {
        ParityUnionFind {
            parent: (0..n).collect(),
            rel: vec![0; n],
            size: vec![1; n],
        }
    }

    /// Root of `x` and the parity from `x` to that root.
    fn find(&mut self, x: usize) -> (usize, u8) {
        let p = self.parent[x];
        if p == x {
            return (x, 0);
        }
        let (root, up) = self.find(p);
        self.rel[x] ^= up;
        self.parent[x] = root;
        (root, self.rel[x])
    }

    /// Records `value(a) ^ value(b) = rhs`. Returns `Ok(true)` when two
    /// components were merged, `Ok(false)` when the relation was already
    /// implied, and `Err(())` when it contradicts what is known.
    fn union(&mut self, a: usize, b: usize, rhs: u8) -> std::result::Result<bool, ()> {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            return if pa ^ pb == rhs { Ok(false) } else { Err(()) };
        }
        let (big, small) = if self.size[ra] >= self.size[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small] = big;
        self.rel[small] = pa ^ pb ^ rhs;
        self.size[big] += self.size[small];
        Ok(true)
    }
}

/// Parity-constrained two-colouring of the class `(width, class)`.
///
/// Each connected component is anchored so that its numerically smallest
/// member gets sign 0; states touched by no constraint get 0.
pub fn solve(width: usize, class: Parity, constraints: &[SignConstraint]) -> Result<SignSolution> {
    let members: Vec<BitString> = PromiseSet::parity_class(width, class)?
        .iter()
        .copied()
        .collect();
    let index = |v: &BitString| -> Result<usize> {
        if v.width() != width {
            return Err(Error::LengthMismatch {
                left: width,
                right: v.width(),
            });
        }
        members
            .binary_search(v)
            .map_err(|_| Error::InvalidSpec(format!("{v} is not in the {class} class")))
    };

    let mut uf = ParityUnionFind::new(members.len());
    // spanning-forest edges, kept to extract a witness cycle on conflict
    let mut tree: Vec<Vec<(usize, SignConstraint)>> = vec![Vec::new(); members.len()];
    for c in constraints {
        let (a, b) = (index(&c.s)?, index(&c.t)?);
        match uf.union(a, b, c.rhs) {
            Ok(true) => {
                tree[a].push((b, *c));
                tree[b].push((a, *c));
            }
            Ok(false) => {}
            Err(()) => {
                let mut witness = tree_path(&tree, a, b);
                witness.push(*c);
                return Ok(SignSolution::Inconsistent { witness });
            }
        }
    }

    let mut root_label: BTreeMap<usize, u8> = BTreeMap::new();
    let mut signs = BTreeMap::new();
    for (i, v) in members.iter().enumerate() {
        let (root, parity) = uf.find(i);
        let anchor = *root_label.entry(root).or_insert(parity);
        signs.insert(*v, parity ^ anchor);
    }
    Ok(SignSolution::Consistent(SignAssignment::new(
        width, class, signs,
    )?))
}

/// Constraints along the unique forest path from `from` to `to`.
fn tree_path(tree: &[Vec<(usize, SignConstraint)>], from: usize, to: usize) -> Vec<SignConstraint> {
    let mut prev: Vec<Option<(usize, SignConstraint)>> = vec![None; tree.len()];
    let mut seen = vec![false; tree.len()];
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    while let Some(x) = queue.pop_front() {
        if x == to {
            break;
        }
        for &(y, c) in &tree[x] {
            if !seen[y] {
                seen[y] = true;
                prev[y] = Some((x, c));
                queue.push_back(y);
            }
        }
    }
    let mut path = Vec::new();
    let mut cur = to;
    while let Some((x, c)) = prev[cur] {
        path.push(c);
        cur = x;
    }
    path.reverse();
    path
}

/// Convenience: constraints for `u` over `promise`, solved on `u`'s class.
pub fn solve_for(u: &BitString, promise: &PromiseSet) -> Result<SignSolution> {
    let constraints = gen_constraints(u, promise)?;
    solve(u.width(), u.parity_class(), &constraints)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitcore::HammingKind;
    use crate::quantum::{build_signed_state, psi3};

    fn b(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn promise_without_complement(u: &BitString) -> PromiseSet {
        PromiseSet::parity_class(u.width(), u.parity_class())
            .unwrap()
            .excluding(&u.complement())
            .unwrap()
    }

    #[test]
    fn constraint_examples() {
        let u = b("0001");
        let promise = PromiseSet::explicit(4, [u, b("0010")]).unwrap();
        let cs = gen_constraints(&u, &promise).unwrap();
        assert_eq!(cs.len(), 4);
        let find = |s: &str, t: &str| cs.iter().find(|c| c.s == b(s) && c.t == b(t)).unwrap().rhs;
        assert_eq!(find("0001", "0010"), 0);
        assert_eq!(find("0100", "0111"), 1);
        assert_eq!(find("1000", "1011"), 1);
        assert_eq!(find("1101", "1110"), 0);

        let only_u = PromiseSet::explicit(4, [u]).unwrap();
        assert!(gen_constraints(&u, &only_u).unwrap().is_empty());

        let bad = PromiseSet::explicit(4, [u, b("0000")]).unwrap();
        assert!(matches!(
            gen_constraints(&u, &bad),
            Err(Error::ParityMismatch(..))
        ));
    }

    #[test]
    fn solves_the_four_party_state() {
        let u = b("0001");
        let cs = gen_constraints(&u, &promise_without_complement(&u)).unwrap();
        assert_eq!(cs.len(), 6 * 4);
        let SignSolution::Consistent(sg) = solve(4, Parity::Odd, &cs).unwrap() else {
            panic!("expected a solution");
        };
        for (v, bit) in sg.iter() {
            let expected = if v.weight() == 1 { 0 } else { 1 };
            assert_eq!(*bit, expected, "{v}");
        }
        assert!(sg.satisfies(&cs));
    }

    #[test]
    fn exactly_two_assignments_by_brute_force() {
        let u = b("0001");
        let cs = gen_constraints(&u, &promise_without_complement(&u)).unwrap();
        let class: Vec<BitString> = PromiseSet::parity_class(4, Parity::Odd)
            .unwrap()
            .iter()
            .copied()
            .collect();
        let mut hits = Vec::new();
        for mask in 0u32..256 {
            let signs = class
                .iter()
                .enumerate()
                .map(|(k, v)| (*v, ((mask >> k) & 1) as u8))
                .collect();
            let sg = SignAssignment::new(4, Parity::Odd, signs).unwrap();
            if sg.satisfies(&cs) {
                hits.push(mask);
            }
        }
        assert_eq!(hits.len(), 2);
        assert_eq!(hits[0] ^ hits[1], 0xff);
    }

    #[test]
    fn every_odd_u_at_four_parties_solves() {
        for u in PromiseSet::parity_class(4, Parity::Odd).unwrap().iter() {
            let cs = gen_constraints(u, &promise_without_complement(u)).unwrap();
            match solve(4, Parity::Odd, &cs).unwrap() {
                SignSolution::Consistent(sg) => assert!(sg.satisfies(&cs)),
                SignSolution::Inconsistent { .. } => panic!("u={u}"),
            }
        }
    }

    #[test]
    fn three_party_even_class_recovers_psi3() {
        let u = b("000");
        let e3 = PromiseSet::parity_class(3, Parity::Even).unwrap();
        let SignSolution::Consistent(sg) = solve_for(&u, &e3).unwrap() else {
            panic!()
        };
        let s = build_signed_state(3, &sg).unwrap();
        assert!(s.max_distance(&psi3()) < 1e-15);
    }

    #[test]
    fn direct_contradiction() {
        let (s, t) = (b("001"), b("010"));
        let cs = [
            SignConstraint { s, t, rhs: 0 },
            SignConstraint { s, t, rhs: 1 },
        ];
        let SignSolution::Inconsistent { witness } = solve(3, Parity::Odd, &cs).unwrap() else {
            panic!()
        };
        assert_eq!(witness.len(), 2);
        assert_eq!(witness.iter().map(|c| c.rhs).sum::<u8>() % 2, 1);
    }

    #[test]
    fn witness_is_an_odd_cycle() {
        let (a, b_, c) = (b("0001"), b("0010"), b("0100"));
        let cs = [
            SignConstraint {
                s: a,
                t: b_,
                rhs: 0,
            },
            SignConstraint {
                s: b_,
                t: c,
                rhs: 0,
            },
            SignConstraint { s: a, t: c, rhs: 1 },
        ];
        let SignSolution::Inconsistent { witness } = solve(4, Parity::Odd, &cs).unwrap() else {
            panic!()
        };
        assert_eq!(witness.len(), 3);
        assert_eq!(witness.iter().map(|c| c.rhs).sum::<u8>() % 2, 1);
        // every vertex on the cycle has even degree
        let mut degree = BTreeMap::new();
        for c in &witness {
            *degree.entry(c.s).or_insert(0) += 1;
            *degree.entry(c.t).or_insert(0) += 1;
        }
        assert!(degree.values().all(|d| d % 2 == 0));
    }

    #[test]
    fn empty_constraints_give_all_plus() {
        let SignSolution::Consistent(sg) = solve(3, Parity::Odd, &[]).unwrap() else {
            panic!()
        };
        assert_eq!(sg, SignAssignment::constant(3, Parity::Odd).unwrap());
    }

    #[test]
    fn wider_classes_are_answered_either_way() {
        // No claim is made beyond four parties; the solver just has to answer
        // and, when it finds an assignment, that assignment must hold.
        for m in 5..=8 {
            let u = BitString::unit(m, m).unwrap();
            let promise = PromiseSet::hamming_promise(&u, HammingKind::OddMultipleOf2).unwrap();
            let cs = gen_constraints(&u, &promise).unwrap();
            match solve(m, Parity::Odd, &cs).unwrap() {
                SignSolution::Consistent(sg) => assert!(sg.satisfies(&cs)),
                SignSolution::Inconsistent { witness } => {
                    assert_eq!(witness.iter().map(|c| c.rhs as u32).sum::<u32>() % 2, 1)
                }
            }
        }
    }
}
