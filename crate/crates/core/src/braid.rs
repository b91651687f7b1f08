//! Kauffman bracket of Markov-closed braids by direct state summation.
//!
//! This is the ground-truth evaluator for every braid moment used by the walk.
//! It knows nothing about the closed-form table in [`crate::moments`].

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::AnyonModel;
use crate::scalar::{c_re, Real, C};

/// Largest word the state sum will enumerate (`2^letters` states).
pub const MAX_LETTERS: usize = 24;

/// One braid generator `b_index` (`inverse == false`) or `b_index†`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    /// 1-based: `b_i` crosses strands `i` and `i + 1`.
    pub index: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn pos(index: usize) -> Self {
        Letter { index, inverse: false }
    }

    pub fn neg(index: usize) -> Self {
        Letter { index, inverse: true }
    }

    pub fn dagger(self) -> Self {
        Letter { index: self.index, inverse: !self.inverse }
    }
}

/// A braid word in diagram order: `letters[0]` is the first crossing traversed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<Letter>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<Letter>) -> Result<Self> {
        if strands == 0 {
            return Err(Error::InvalidConfig("a braid needs at least one strand".into()));
        }
        for l in &letters {
            if l.index == 0 || l.index >= strands {
                return Err(Error::GeneratorOutOfRange { index: l.index, strands });
            }
        }
        Ok(BraidWord { strands, letters })
    }

    pub fn identity(strands: usize) -> Result<Self> {
        Self::new(strands, Vec::new())
    }

    /// Builds a word from an operator product written left to right, e.g.
    /// `b†_{s'−1} b†_{s'−2} b_{s−2} b_{s−1}` as
    /// `[(s'−1, true), (s'−2, true), (s−2, false), (s−1, false)]`.
    ///
    /// The rightmost operator acts first. Generator labels are arbitrary
    /// integers; only the strands they touch are kept.
    pub fn from_operators(ops: &[(i64, bool)]) -> Result<Self> {
        let Some(lo) = ops.iter().map(|&(g, _)| g).min() else {
            return Self::identity(1);
        };
        let hi = ops.iter().map(|&(g, _)| g).max().unwrap_or(lo);
        let strands = (hi - lo) as usize + 2;
        let letters = ops
            .iter()
            .rev()
            .map(|&(g, inverse)| Letter { index: (g - lo) as usize + 1, inverse })
            .collect();
        Self::new(strands, letters)
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Adds `extra` untouched strands on the right.
    pub fn with_extra_strands(&self, extra: usize) -> Self {
        BraidWord { strands: self.strands + extra, letters: self.letters.clone() }
    }

    /// The word followed by its inverse, `W†W` in operator order.
    pub fn then_inverse(&self) -> Self {
        let mut letters = self.letters.clone();
        letters.extend(self.letters.iter().rev().map(|l| l.dagger()));
        BraidWord { strands: self.strands, letters }
    }

    /// Hermitian conjugate: reversed letters, each inverted.
    pub fn dagger(&self) -> Self {
        BraidWord {
            strands: self.strands,
            letters: self.letters.iter().rev().map(|l| l.dagger()).collect(),
        }
    }

    /// Underlying permutation: `perm[top] = bottom` position of each strand.
    pub fn permutation(&self) -> Vec<usize> {
        // at[p] = strand currently at position p
        let mut at: Vec<usize> = (0..self.strands).collect();
        for l in &self.letters {
            at.swap(l.index - 1, l.index);
        }
        let mut perm = vec![0; self.strands];
        for (pos, &strand) in at.iter().enumerate() {
            perm[strand] = pos;
        }
        perm
    }

    /// Number of components of the Markov closure.
    pub fn closure_components(&self) -> usize {
        let perm = self.permutation();
        let mut seen = vec![false; perm.len()];
        let mut cycles = 0;
        for start in 0..perm.len() {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = perm[i];
            }
        }
        cycles
    }
}

struct DisjointSets {
    parent: Vec<usize>,
    rank: Vec<u8>,
    sets: usize,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n).collect(), rank: vec![0; n], sets: n }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        self.sets -= 1;
        match self.rank[a].cmp(&self.rank[b]) {
            std::cmp::Ordering::Less => self.parent[a] = b,
            std::cmp::Ordering::Greater => self.parent[b] = a,
            std::cmp::Ordering::Equal => {
                self.parent[b] = a;
                self.rank[a] += 1;
            }
        }
    }
}

/// One resolution of every crossing of a closed braid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SmoothingState {
    /// Bit `j` set: crossing `j` is resolved into a cup–cap pair,
    /// clear: it is resolved into two parallel strands.
    pub assignment: u32,
    /// Net power of `A` collected by this state.
    pub a_exponent: i32,
    /// Loops left in the Markov closure after smoothing.
    pub loop_count: usize,
}

impl SmoothingState {
    /// Resolves `word` with the given assignment and counts loops.
    ///
    /// `b_i` weights the parallel smoothing by `A` and the cup–cap smoothing
    /// by `A⁻¹`; `b_i†` the other way round.
    pub fn resolve(word: &BraidWord, assignment: u32) -> Self {
        let strands = word.strands;
        let crossings = word.letters.len();
        // Endpoints: one per strand top, then two fresh ones below each crossing.
        let mut sets = DisjointSets::new(strands + 2 * crossings);
        let mut current: Vec<usize> = (0..strands).collect();
        let mut a_exponent = 0i32;
        for (j, letter) in word.letters.iter().enumerate() {
            let (left, right) = (letter.index - 1, letter.index);
            let (in_l, in_r) = (current[left], current[right]);
            let (out_l, out_r) = (strands + 2 * j, strands + 2 * j + 1);
            let cup_cap = assignment >> j & 1 == 1;
            if cup_cap {
                sets.union(in_l, in_r);
                sets.union(out_l, out_r);
            } else {
                sets.union(in_l, out_l);
                sets.union(in_r, out_r);
            }
            let weight = if cup_cap { -1 } else { 1 };
            a_exponent += if letter.inverse { -weight } else { weight };
            current[left] = out_l;
            current[right] = out_r;
        }
        // Markov closure: every bottom endpoint returns to its own top.
        for (pos, &bottom) in current.iter().enumerate() {
            sets.union(bottom, pos);
        }
        SmoothingState { assignment, a_exponent, loop_count: sets.sets }
    }
}

/// Enumerates all smoothing states and tallies them as
/// `(power of A, loop count) → multiplicity`.
pub fn state_tally(word: &BraidWord) -> Result<BTreeMap<(i32, usize), u64>> {
    let crossings = word.letters.len();
    if crossings > MAX_LETTERS {
        return Err(Error::LetterBudget { letters: crossings, max: MAX_LETTERS });
    }
    let mut tally = BTreeMap::new();
    for assignment in 0..(1u32 << crossings) {
        let state = SmoothingState::resolve(word, assignment);
        *tally.entry((state.a_exponent, state.loop_count)).or_insert(0) += 1;
    }
    Ok(tally)
}

/// Kauffman bracket `⟨L⟩(A)` of the Markov closure of `word`, normalized so
/// that a single unknotted loop has bracket 1.
pub fn state_sum_bracket<T: Real>(word: &BraidWord, a: C<T>) -> Result<C<T>> {
    let tally = state_tally(word)?;
    let loop_value = -(a * a + (a * a).inv());
    let mut total = C::new(T::zero(), T::zero());
    for (&(exponent, loops), &count) in &tally {
        let term = a.powi(exponent) * loop_value.powi(loops as i32 - 1);
        total = total + term * T::from_u64(count).expect("state count fits scalar");
    }
    Ok(total)
}

/// Vacuum-pair expectation `⟨Φ₀|B|Φ₀⟩ = ⟨L⟩(A) / d^{n−1}` where `n` counts the
/// anyon strands the word spans.
///
/// Extra untouched strands multiply the bracket by `d` and raise `n` by one,
/// so the result does not depend on them.
pub fn markov_expectation<T: Real>(word: &BraidWord, model: &AnyonModel<T>) -> Result<C<T>> {
    let bracket = state_sum_bracket(word, model.a())?;
    let norm = model.d().powi(word.strands as i32 - 1);
    Ok(bracket / c_re(norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Level;

    fn model(k: u32) -> AnyonModel<f64> {
        AnyonModel::new(Level::Finite(k)).unwrap()
    }

    #[test]
    fn unknot_and_unlink() {
        let a = C::new(0.3, 0.7).unscale(C::new(0.3, 0.7).norm());
        let one = BraidWord::identity(1).unwrap();
        assert!((state_sum_bracket(&one, a).unwrap() - C::new(1.0, 0.0)).norm() < 1e-15);
        let two = BraidWord::identity(2).unwrap();
        let want = -(a * a + (a * a).inv());
        assert!((state_sum_bracket(&two, a).unwrap() - want).norm() < 1e-14);
    }

    #[test]
    fn hopf_link() {
        let a = C::new(0.0, 1.0) * C::new(0.0, -0.2).exp();
        let hopf = BraidWord::new(2, vec![Letter::pos(1), Letter::pos(1)]).unwrap();
        let want = -a.powi(4) - a.powi(-4);
        assert!((state_sum_bracket(&hopf, a).unwrap() - want).norm() < 1e-13);
        assert_eq!(hopf.closure_components(), 2);
    }

    #[test]
    fn kink_weights_fix_the_crossing_convention() {
        // A one-crossing closure is an unknot with a single curl: ⟨σ₁⟩ = −A³.
        let a = C::new(0.0, 1.0) * C::new(0.0, -0.3).exp();
        let curl = BraidWord::new(2, vec![Letter::pos(1)]).unwrap();
        assert!((state_sum_bracket(&curl, a).unwrap() + a.powi(3)).norm() < 1e-13);
        let curl = BraidWord::new(2, vec![Letter::neg(1)]).unwrap();
        assert!((state_sum_bracket(&curl, a).unwrap() + a.powi(-3)).norm() < 1e-13);
    }

    #[test]
    fn unitarity_and_conjugation() {
        let words = [
            vec![Letter::pos(1), Letter::neg(2), Letter::pos(1)],
            vec![Letter::pos(2), Letter::pos(2), Letter::pos(1), Letter::neg(3)],
            vec![Letter::neg(1), Letter::pos(3), Letter::pos(2), Letter::pos(1), Letter::pos(2)],
        ];
        for k in [1, 2, 3, 5, 10] {
            let m = model(k);
            for letters in &words {
                let w = BraidWord::new(4, letters.clone()).unwrap();
                let unit = markov_expectation(&w.then_inverse(), &m).unwrap();
                assert!((unit - C::new(1.0, 0.0)).norm() < 1e-10, "k={k} {unit}");
                let fwd = markov_expectation(&w, &m).unwrap();
                let back = markov_expectation(&w.dagger(), &m).unwrap();
                assert!((back - fwd.conj()).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn untouched_strands_do_not_change_expectation() {
        let w = BraidWord::from_operators(&[(4, true), (4, true), (2, false), (3, false)]).unwrap();
        assert_eq!(w.strands(), 4);
        for k in [2, 3, 7] {
            let m = model(k);
            let base = markov_expectation(&w, &m).unwrap();
            for extra in 1..4 {
                let padded = w.with_extra_strands(extra);
                let bracket = state_sum_bracket(&w, m.a()).unwrap();
                let padded_bracket = state_sum_bracket(&padded, m.a()).unwrap();
                let scale = m.d().powi(extra as i32);
                assert!((padded_bracket - bracket * scale).norm() < 1e-12);
                assert!((markov_expectation(&padded, &m).unwrap() - base).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn letter_budget_and_range_are_enforced() {
        let long = BraidWord::new(2, vec![Letter::pos(1); MAX_LETTERS + 1]).unwrap();
        assert!(matches!(
            state_sum_bracket(&long, C::new(0.0, 1.0)),
            Err(Error::LetterBudget { .. })
        ));
        assert!(BraidWord::new(3, vec![Letter::pos(3)]).is_err());
        assert!(BraidWord::new(3, vec![Letter::pos(0)]).is_err());
    }

    #[test]
    fn permutation_cycles() {
        let w = BraidWord::new(3, vec![Letter::pos(1), Letter::pos(2)]).unwrap();
        assert_eq!(w.closure_components(), 1);
        let w = BraidWord::new(4, vec![Letter::pos(1), Letter::neg(1), Letter::pos(3)]).unwrap();
        assert_eq!(w.closure_components(), 3);
    }
}
