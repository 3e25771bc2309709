//! Replayable proof traces over `b t`.
//!
//! A trace rewrites a letter sequence with two kinds of moves: inserting or
//! deleting an adjacent inverse pair, and replacing the factor
//! `B^(n-1) t b^n T` by `[t, b^n] = T B^n t b^n` (or back). Replaying a
//! trace needs nothing but these moves, so it is an exact certificate for
//! equalities in `<b, t | r(n)>`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::word::bt::{b, prod, t};
use crate::word::{reduce, Letter, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `B^(n-1) t b^n T -> T B^n t b^n`
    Forward,
    /// `T B^n t b^n -> B^(n-1) t b^n T`
    Reverse,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceStep {
    /// Insert `letter letter^-1` before `position`.
    FreeInsert { position: usize, letter: Letter },
    /// Delete the inverse pair starting at `position`.
    FreeDelete { position: usize },
    BaseMove { position: usize, direction: Direction, n: i64 },
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum TraceError {
    #[error("step {step}: position {position} out of range for a word of length {len}")]
    OutOfRange { step: usize, position: usize, len: usize },
    #[error("step {step}: letters at {position} are not an inverse pair")]
    NotInversePair { step: usize, position: usize },
    #[error("step {step}: factor at {position} does not match the base relation for n = {n}")]
    FactorMismatch { step: usize, position: usize, n: i64 },
    #[error("step {step}: base move uses n = {found}, certificate has n = {expected}")]
    WrongTwist { step: usize, found: i64, expected: i64 },
    #[error("replay ended at a word of length {0}, not the identity")]
    NotEmpty(usize),
}

/// The two sides of `B^(n-1) t b^n T = [t, b^n]`.
pub fn base_sides(n: i64) -> (Word, Word) {
    let lhs = prod(&[&b(-(n - 1)), &t(1), &b(n), &t(-1)]);
    let rhs = t(1).commutator(&b(n));
    (lhs, rhs)
}

/// The relator `lhs * rhs^-1` of the base relation.
pub fn base_relator_word(n: i64) -> Word {
    let (l, r) = base_sides(n);
    l.concat(&r.inverse())
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProofTrace {
    pub steps: Vec<TraceStep>,
}

impl ProofTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn base_moves(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, TraceStep::BaseMove { .. })).count()
    }

    pub fn all_free(&self) -> bool {
        self.base_moves() == 0
    }

    /// Applies every step to `start` and returns the resulting letters.
    /// Base moves must use twist parameter `n`.
    pub fn replay(&self, start: &[Letter], n: i64) -> Result<Vec<Letter>, TraceError> {
        let (lhs, rhs) = base_sides(n);
        let mut cur = start.to_vec();
        for (step, s) in self.steps.iter().enumerate() {
            match *s {
                TraceStep::FreeInsert { position, letter } => {
                    if position > cur.len() {
                        return Err(TraceError::OutOfRange { step, position, len: cur.len() });
                    }
                    cur.splice(position..position, [letter, letter.inv()]);
                }
                TraceStep::FreeDelete { position } => {
                    if position + 2 > cur.len() {
                        return Err(TraceError::OutOfRange { step, position, len: cur.len() });
                    }
                    if !cur[position].cancels(cur[position + 1]) {
                        return Err(TraceError::NotInversePair { step, position });
                    }
                    cur.drain(position..position + 2);
                }
                TraceStep::BaseMove { position, direction, n: found } => {
                    if found != n {
                        return Err(TraceError::WrongTwist { step, found, expected: n });
                    }
                    let (from, to) = match direction {
                        Direction::Forward => (&lhs, &rhs),
                        Direction::Reverse => (&rhs, &lhs),
                    };
                    let end = position + from.len();
                    if end > cur.len() {
                        return Err(TraceError::OutOfRange { step, position, len: cur.len() });
                    }
                    if cur[position..end] != *from.letters() {
                        return Err(TraceError::FactorMismatch { step, position, n });
                    }
                    cur.splice(position..end, to.letters().iter().copied());
                }
            }
        }
        Ok(cur)
    }

    /// Replays from `start` and requires the identity at the end.
    pub fn check(&self, start: &[Letter], n: i64) -> Result<(), TraceError> {
        let end = self.replay(start, n)?;
        if end.is_empty() {
            Ok(())
        } else {
            Err(TraceError::NotEmpty(end.len()))
        }
    }
}

/// A product of conjugates `prod u_i rho^e_i u_i^-1` of the base relator
/// `rho`, witnessing that its free value is trivial in the group.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RelatorProduct {
    pub factors: Vec<(Word, i8)>,
}

impl RelatorProduct {
    pub fn value(&self, n: i64) -> Word {
        let rho = base_relator_word(n);
        let rho_inv = rho.inverse();
        self.factors.iter().fold(Word::empty(), |acc, (u, e)| {
            let r = if *e > 0 { &rho } else { &rho_inv };
            acc.concat(u).concat(r).concat(&u.inverse())
        })
    }

    pub fn append(&mut self, mut other: RelatorProduct) {
        self.factors.append(&mut other.factors);
    }

    pub fn inverse(&self) -> RelatorProduct {
        RelatorProduct { factors: self.factors.iter().rev().map(|(u, e)| (u.clone(), -e)).collect() }
    }
}

/// Writes `x` as `w rho^e w^-1` when its cyclic reduction is a rotation of
/// `rho` or `rho^-1`.
pub fn relator_instance(x: &Word, n: i64) -> Option<(Word, i8)> {
    let rho = base_relator_word(n);
    let (core, conj) = x.cyclic_reduce();
    for (r, e) in [(rho.clone(), 1i8), (rho.inverse(), -1i8)] {
        if let Some(k) = core.rotation_offset(&r) {
            // core = s1^-1 r s1 where s1 is the first k letters of r.
            let s1 = Word::from_letters(r.letters()[..k].to_vec());
            let w = s1.concat(&conj).inverse();
            return Some((w, e));
        }
    }
    None
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("link {link} of the derivation is neither a free equality nor a single base-relation step")]
pub struct ChainError {
    pub link: usize,
}

/// Consecutive words of a displayed derivation. Each link must be a free
/// equality or differ by exactly one instance of the base relation.
pub fn chain_relators(stages: &[Word], n: i64) -> Result<RelatorProduct, ChainError> {
    let mut out = RelatorProduct::default();
    for (link, pair) in stages.windows(2).enumerate() {
        let x = pair[0].concat(&pair[1].inverse());
        if x.is_empty() {
            continue;
        }
        let inst = relator_instance(&x, n).ok_or(ChainError { link })?;
        out.factors.push(inst);
    }
    Ok(out)
}

/// Free reduction of `raw`, recording each deletion as a trace step.
fn free_deletions(raw: &[Letter], steps: &mut Vec<TraceStep>) -> Vec<Letter> {
    let mut stack: Vec<Letter> = Vec::with_capacity(raw.len());
    for &l in raw {
        match stack.last() {
            Some(&top) if top.cancels(l) => {
                steps.push(TraceStep::FreeDelete { position: stack.len() - 1 });
                stack.pop();
            }
            _ => stack.push(l),
        }
    }
    stack
}

/// Builds a trace taking `start` to the identity, given a relator product
/// whose value equals `reduce(start)`.
pub fn trace_from_relators(start: &[Letter], relators: &RelatorProduct, n: i64) -> ProofTrace {
    let mut steps = Vec::new();
    let reduced = free_deletions(start, &mut steps);

    let (lhs, rhs) = base_sides(n);
    let rho = base_relator_word(n);
    let rho_inv = rho.inverse();
    let mut expanded: Vec<Letter> = Vec::new();
    let mut anchors = Vec::with_capacity(relators.factors.len());
    for (u, e) in &relators.factors {
        expanded.extend_from_slice(u.letters());
        anchors.push((expanded.len(), *e));
        expanded.extend_from_slice(if *e > 0 { rho.letters() } else { rho_inv.letters() });
        expanded.extend_from_slice(u.inverse().letters());
    }

    // Reducing `expanded` lands on `reduced`; run those deletions backwards
    // as insertions.
    let mut deletions = Vec::new();
    let mut stack: Vec<Letter> = Vec::with_capacity(expanded.len());
    for &l in &expanded {
        match stack.last() {
            Some(&top) if top.cancels(l) => {
                deletions.push(TraceStep::FreeInsert { position: stack.len() - 1, letter: top });
                stack.pop();
            }
            _ => stack.push(l),
        }
    }
    debug_assert_eq!(stack, reduced, "relator product does not match the start word");
    steps.extend(deletions.into_iter().rev());

    let mut shift: isize = 0;
    let mut word = expanded;
    for (anchor, e) in anchors {
        let position = (anchor as isize + shift) as usize;
        let (direction, from, to) = if e > 0 {
            (Direction::Forward, &lhs, &rhs)
        } else {
            (Direction::Reverse, &rhs, &lhs)
        };
        steps.push(TraceStep::BaseMove { position, direction, n });
        word.splice(position..position + from.len(), to.letters().iter().copied());
        shift += to.len() as isize - from.len() as isize;
    }
    let rest = free_deletions(&word, &mut steps);
    debug_assert!(rest.is_empty());
    ProofTrace { steps }
}

/// True when `reduce(start)` equals the relator product's free value.
pub fn product_matches(start: &[Letter], relators: &RelatorProduct, n: i64) -> bool {
    reduce(start.iter().copied()) == relators.value(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::{base_relation, TwistKnotParams};
    use crate::word::Alphabet;

    #[test]
    fn base_relator_is_a_rotation_of_the_eliminated_relator() {
        for n in 1..=8 {
            let rho = base_relator_word(n);
            assert!(rho.is_cyclically_reduced());
            assert_eq!(rho.len() as i64, 4 * n + 3);
            assert!(rho.same_relator(&base_relation(TwistKnotParams::new(n).unwrap())));
        }
    }

    #[test]
    fn instances_are_found() {
        let bt = Alphabet::bt();
        for n in 1..=5 {
            let rho = base_relator_word(n);
            for g in ["", "t", "bTT", "BtbT"] {
                let g = bt.parse(g).unwrap();
                for (r, e) in [(rho.clone(), 1), (rho.inverse(), -1)] {
                    let x = g.concat(&r).concat(&g.inverse());
                    let (w, found) = relator_instance(&x, n).unwrap();
                    assert_eq!(found, e);
                    let rebuilt = RelatorProduct { factors: vec![(w, found)] }.value(n);
                    assert_eq!(rebuilt, x);
                }
            }
        }
        assert!(relator_instance(&bt.parse("tb").unwrap(), 2).is_none());
    }

    #[test]
    fn single_base_move() {
        let n = 3;
        let (l, r) = base_sides(n);
        let start: Vec<Letter> = [l.letters(), r.inverse().letters()].concat();
        let rel = RelatorProduct { factors: vec![(Word::empty(), 1)] };
        assert!(product_matches(&start, &rel, n));
        let trace = trace_from_relators(&start, &rel, n);
        assert_eq!(trace.base_moves(), 1);
        assert_eq!(trace.check(&start, n), Ok(()));
        assert!(matches!(trace.check(&start, n + 1), Err(TraceError::WrongTwist { .. })));
    }

    #[test]
    fn malformed_steps_are_reported() {
        let bt = Alphabet::bt();
        let w = bt.parse("tb").unwrap();
        let trace = ProofTrace { steps: vec![TraceStep::FreeDelete { position: 0 }] };
        assert_eq!(trace.replay(w.letters(), 1), Err(TraceError::NotInversePair { step: 0, position: 0 }));
        let trace = ProofTrace { steps: vec![TraceStep::FreeInsert { position: 5, letter: Letter::pos(0) }] };
        assert!(matches!(trace.replay(w.letters(), 1), Err(TraceError::OutOfRange { step: 0, .. })));
        let trace = ProofTrace {
            steps: vec![TraceStep::BaseMove { position: 0, direction: Direction::Forward, n: 1 }],
        };
        assert!(matches!(trace.replay(w.letters(), 1), Err(TraceError::OutOfRange { .. })));
        let long = bt.parse("tbtbtbtbtb").unwrap();
        assert!(matches!(trace.replay(long.letters(), 1), Err(TraceError::FactorMismatch { .. })));
    }
}
