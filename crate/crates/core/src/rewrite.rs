//! Budgeted Knuth–Bendix completion for group presentations under shortlex.
//!
//! Completion is not expected to terminate on one-relator knot groups, so
//! every entry point takes limits and the resulting system may be partial.
//! A partial system still only contains rules that hold in the group, so
//! rewriting a word to the empty word is always a proof of triviality.

use std::cmp::Ordering;
use std::collections::{HashSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::presentation::GroupPresentation;
use crate::word::{Alphabet, Letter, LetterOrder, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KbLimits {
    pub max_rules: usize,
    pub max_lhs_len: usize,
    pub max_iterations: usize,
}

impl Default for KbLimits {
    fn default() -> Self {
        KbLimits { max_rules: 4000, max_lhs_len: 40, max_iterations: 1_000_000 }
    }
}

impl KbLimits {
    pub fn scaled(self, factor: usize) -> Self {
        KbLimits {
            max_rules: self.max_rules * factor,
            max_lhs_len: self.max_lhs_len + 8 * (factor - 1),
            max_iterations: self.max_iterations * factor,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RewriteRule {
    pub lhs: Vec<Letter>,
    pub rhs: Vec<Letter>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompletionStatus {
    Confluent,
    Partial,
}

/// One application of a rule at a position of the current word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteStep {
    pub position: usize,
    pub rule: usize,
}

/// Why a triviality check gave up.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnknownReason {
    /// Rewriting stopped at a nonempty word. When `confluent` is set the word
    /// is in fact nontrivial, but the verdict stays one-sided.
    NormalFormNonempty { confluent: bool, normal_form_len: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TrivialityVerdict {
    Confirmed(Vec<RewriteStep>),
    Unknown(UnknownReason),
}

impl TrivialityVerdict {
    pub fn is_confirmed(&self) -> bool {
        matches!(self, TrivialityVerdict::Confirmed(_))
    }
}

/// Suffix trie over reversed left-hand sides.
#[derive(Clone, Debug)]
struct SuffixIndex {
    width: usize,
    next: Vec<u32>,
    rule: Vec<u32>,
    max_len: usize,
}

const NONE: u32 = u32::MAX;

impl SuffixIndex {
    fn new(width: usize) -> Self {
        SuffixIndex { width, next: vec![NONE; width], rule: vec![NONE], max_len: 0 }
    }

    fn insert(&mut self, lhs: &[Letter], id: usize) {
        let mut node = 0usize;
        for l in lhs.iter().rev() {
            let slot = node * self.width + l.code();
            if self.next[slot] == NONE {
                let fresh = self.rule.len();
                self.rule.push(NONE);
                self.next.extend(std::iter::repeat_n(NONE, self.width));
                self.next[slot] = fresh as u32;
            }
            node = self.next[slot] as usize;
        }
        self.rule[node] = id as u32;
        self.max_len = self.max_len.max(lhs.len());
    }

    fn remove(&mut self, lhs: &[Letter]) {
        let mut node = 0usize;
        for l in lhs.iter().rev() {
            node = self.next[node * self.width + l.code()] as usize;
        }
        self.rule[node] = NONE;
    }

    /// Shortest rule whose lhs is a suffix of `w`.
    fn match_suffix(&self, w: &[Letter]) -> Option<usize> {
        let mut node = 0usize;
        for l in w.iter().rev().take(self.max_len) {
            let nx = self.next[node * self.width + l.code()];
            if nx == NONE {
                return None;
            }
            node = nx as usize;
            if self.rule[node] != NONE {
                return Some(self.rule[node] as usize);
            }
        }
        None
    }
}

#[derive(Clone, Debug)]
pub struct RewriteSystem {
    alphabet: Alphabet,
    order: LetterOrder,
    rules: Vec<RewriteRule>,
    status: CompletionStatus,
    index: SuffixIndex,
}

impl RewriteSystem {
    /// Only the free cancellation rules `x X -> 1`.
    pub fn free(alphabet: &Alphabet) -> Self {
        let order = LetterOrder::standard(alphabet.len());
        let rules = free_rules(alphabet.len());
        Self::assemble(alphabet.clone(), order, rules, CompletionStatus::Confluent)
    }

    fn assemble(alphabet: Alphabet, order: LetterOrder, rules: Vec<RewriteRule>, status: CompletionStatus) -> Self {
        let mut index = SuffixIndex::new(2 * alphabet.len());
        for (i, r) in rules.iter().enumerate() {
            index.insert(&r.lhs, i);
        }
        RewriteSystem { alphabet, order, rules, status, index }
    }

    pub fn rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    pub fn status(&self) -> CompletionStatus {
        self.status
    }

    pub fn is_confluent(&self) -> bool {
        self.status == CompletionStatus::Confluent
    }

    pub fn order(&self) -> &LetterOrder {
        &self.order
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Rewrites to normal form, recording every rule application.
    pub fn rewrite_letters(&self, input: &[Letter], mut log: Option<&mut Vec<RewriteStep>>) -> Vec<Letter> {
        let mut out: Vec<Letter> = Vec::with_capacity(input.len());
        let mut pending: Vec<Letter> = input.iter().rev().copied().collect();
        while let Some(l) = pending.pop() {
            out.push(l);
            if let Some(ri) = self.index.match_suffix(&out) {
                let rule = &self.rules[ri];
                let start = out.len() - rule.lhs.len();
                if let Some(log) = log.as_deref_mut() {
                    log.push(RewriteStep { position: start, rule: ri });
                }
                out.truncate(start);
                pending.extend(rule.rhs.iter().rev());
            }
        }
        out
    }

    pub fn normal_form(&self, w: &Word) -> Word {
        Word::from_letters(self.rewrite_letters(w.letters(), None))
    }

    pub fn is_trivial(&self, w: &Word) -> TrivialityVerdict {
        let mut log = Vec::new();
        let nf = self.rewrite_letters(w.letters(), Some(&mut log));
        if nf.is_empty() {
            TrivialityVerdict::Confirmed(log)
        } else {
            TrivialityVerdict::Unknown(UnknownReason::NormalFormNonempty {
                confluent: self.is_confluent(),
                normal_form_len: nf.len(),
            })
        }
    }

    pub fn equal_in_group(&self, u: &Word, v: &Word) -> TrivialityVerdict {
        self.is_trivial(&u.inverse().concat(v))
    }

    /// Replays a recorded derivation from `start`, checking every step
    /// against this system's rules. Returns the final word.
    pub fn replay(&self, start: &[Letter], steps: &[RewriteStep]) -> Result<Vec<Letter>, usize> {
        let mut cur = start.to_vec();
        for (i, s) in steps.iter().enumerate() {
            let rule = self.rules.get(s.rule).ok_or(i)?;
            let end = s.position + rule.lhs.len();
            if end > cur.len() || cur[s.position..end] != rule.lhs[..] {
                return Err(i);
            }
            cur.splice(s.position..end, rule.rhs.iter().copied());
        }
        Ok(cur)
    }

    /// Rule listing, one `lhs -> rhs` per line in rule order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for r in &self.rules {
            let _ = writeln!(out, "{} -> {}", format_letters(&self.alphabet, &r.lhs), format_letters(&self.alphabet, &r.rhs));
        }
        out
    }
}

fn format_letters(alphabet: &Alphabet, letters: &[Letter]) -> String {
    if letters.is_empty() {
        return "1".into();
    }
    letters.iter().map(|&l| alphabet.letter_name(l)).collect::<Vec<_>>().join(if alphabet.names().iter().all(|n| n.len() == 1) { "" } else { " " })
}

fn free_rules(rank: usize) -> Vec<RewriteRule> {
    (0..2 * rank)
        .map(Letter::from_code)
        .map(|l| RewriteRule { lhs: vec![l, l.inv()], rhs: Vec::new() })
        .collect()
}

/// Balanced splits `u = v^-1` of every rotation of every relator and its inverse.
fn relator_equations(pres: &GroupPresentation) -> Vec<(Vec<Letter>, Vec<Letter>)> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for core in pres.cores() {
        for c in [core.clone(), core.inverse()] {
            for k in 0..c.len() {
                let rot = c.rotate(k).into_letters();
                let m = rot.len().div_ceil(2);
                let lhs = rot[..m].to_vec();
                let rhs: Vec<Letter> = rot[m..].iter().rev().map(|l| l.inv()).collect();
                if seen.insert((lhs.clone(), rhs.clone())) {
                    out.push((lhs, rhs));
                }
            }
        }
    }
    out
}

struct Completion {
    order: LetterOrder,
    limits: KbLimits,
    rules: Vec<RewriteRule>,
    alive: Vec<bool>,
    index: SuffixIndex,
    queue: VecDeque<(Vec<Letter>, Vec<Letter>)>,
    live_count: usize,
    dropped: bool,
    exhausted: bool,
}

impl Completion {
    fn reduce(&self, w: &[Letter]) -> Vec<Letter> {
        let mut out: Vec<Letter> = Vec::with_capacity(w.len());
        let mut pending: Vec<Letter> = w.iter().rev().copied().collect();
        while let Some(l) = pending.pop() {
            out.push(l);
            if let Some(ri) = self.index.match_suffix(&out) {
                let rule = &self.rules[ri];
                out.truncate(out.len() - rule.lhs.len());
                pending.extend(rule.rhs.iter().rev());
            }
        }
        out
    }

    fn push_rule(&mut self, lhs: Vec<Letter>, rhs: Vec<Letter>) -> usize {
        let id = self.rules.len();
        self.index.insert(&lhs, id);
        self.rules.push(RewriteRule { lhs, rhs });
        self.alive.push(true);
        self.live_count += 1;
        id
    }

    fn kill(&mut self, id: usize) {
        self.alive[id] = false;
        self.index.remove(&self.rules[id].lhs);
        self.live_count -= 1;
    }

    fn drain(&mut self) {
        while let Some((u, v)) = self.queue.pop_front() {
            if self.live_count > self.limits.max_rules {
                self.exhausted = true;
                self.queue.clear();
                return;
            }
            let u = self.reduce(&u);
            let v = self.reduce(&v);
            if u == v {
                continue;
            }
            let (lhs, rhs) = match self.order.shortlex(&u, &v) {
                Ordering::Greater => (u, v),
                _ => (v, u),
            };
            if lhs.len() > self.limits.max_lhs_len {
                self.dropped = true;
                continue;
            }
            let id = self.push_rule(lhs, rhs);
            self.interreduce(id);
        }
    }

    fn interreduce(&mut self, id: usize) {
        let lhs = self.rules[id].lhs.clone();
        for j in 0..self.rules.len() {
            if j == id || !self.alive[j] {
                continue;
            }
            if contains(&self.rules[j].lhs, &lhs) {
                self.kill(j);
                let r = self.rules[j].clone();
                self.queue.push_back((r.lhs, r.rhs));
            } else if contains(&self.rules[j].rhs, &lhs) {
                let rhs = self.reduce(&self.rules[j].rhs);
                self.rules[j].rhs = rhs;
            }
        }
    }

    /// Critical pairs from suffixes of `lhs_i` overlapping prefixes of `lhs_j`.
    fn overlaps(&mut self, i: usize, j: usize) {
        let li = self.rules[i].lhs.clone();
        let lj = self.rules[j].lhs.clone();
        for k in 1..li.len().min(lj.len()) {
            if li[li.len() - k..] != lj[..k] {
                continue;
            }
            let mut left = self.rules[i].rhs.clone();
            left.extend_from_slice(&lj[k..]);
            let mut right = li[..li.len() - k].to_vec();
            right.extend_from_slice(&self.rules[j].rhs);
            self.queue.push_back((left, right));
        }
    }
}

fn contains(hay: &[Letter], needle: &[Letter]) -> bool {
    hay.len() >= needle.len() && hay.windows(needle.len()).any(|w| w == needle)
}

/// Runs completion from the relators of `pres` under the standard order.
pub fn knuth_bendix(pres: &GroupPresentation, limits: KbLimits) -> RewriteSystem {
    knuth_bendix_with_order(pres, limits, LetterOrder::standard(pres.rank()))
}

pub fn knuth_bendix_with_order(pres: &GroupPresentation, limits: KbLimits, order: LetterOrder) -> RewriteSystem {
    let mut kb = Completion {
        order,
        limits,
        rules: Vec::new(),
        alive: Vec::new(),
        index: SuffixIndex::new(2 * pres.rank()),
        queue: VecDeque::new(),
        live_count: 0,
        dropped: false,
        exhausted: false,
    };
    for r in free_rules(pres.rank()) {
        kb.push_rule(r.lhs, r.rhs);
    }
    kb.queue.extend(relator_equations(pres));
    kb.drain();

    let mut iterations = 0usize;
    let mut exhausted = kb.exhausted;
    let mut i = 0;
    'outer: while !exhausted && i < kb.rules.len() {
        for j in 0..=i {
            let pairs: &[(usize, usize)] = if i == j { &[(i, i)] } else { &[(i, j), (j, i)] };
            for &(x, y) in pairs {
                if !kb.alive[x] || !kb.alive[y] {
                    continue;
                }
                kb.overlaps(x, y);
                kb.drain();
                iterations += 1;
                if iterations >= limits.max_iterations || kb.exhausted || kb.live_count > limits.max_rules {
                    exhausted = true;
                    break 'outer;
                }
            }
        }
        i += 1;
    }

    let status = if exhausted || kb.dropped { CompletionStatus::Partial } else { CompletionStatus::Confluent };
    let rules: Vec<RewriteRule> = kb
        .rules
        .into_iter()
        .zip(kb.alive)
        .filter_map(|(r, a)| a.then_some(r))
        .collect();
    RewriteSystem::assemble(pres.alphabet().clone(), kb.order, rules, status)
}

/// Builds a system for `pres` and tests `w`.
pub fn is_trivial(w: &Word, pres: &GroupPresentation, limits: KbLimits) -> TrivialityVerdict {
    knuth_bendix(pres, limits).is_trivial(w)
}

pub fn equal_in_group(u: &Word, v: &Word, pres: &GroupPresentation, limits: KbLimits) -> TrivialityVerdict {
    is_trivial(&u.inverse().concat(v), pres, limits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::{base_presentation, base_relation, knot_group, TwistKnotParams};
    use crate::word::bt::{b, d, t};

    fn p(n: i64) -> TwistKnotParams {
        TwistKnotParams::new(n).unwrap()
    }

    fn small() -> KbLimits {
        KbLimits { max_rules: 300, max_lhs_len: 16, max_iterations: 20_000 }
    }

    #[test]
    fn free_group_is_confluent() {
        let pres = GroupPresentation::new(Alphabet::bt(), vec![]).unwrap();
        let rws = knuth_bendix(&pres, KbLimits::default());
        assert!(rws.is_confluent());
        assert_eq!(rws.rules().len(), 4);
        let raw = [b(1), t(1), t(-1), b(-1), t(1)].iter().flat_map(|w| w.letters().to_vec()).collect::<Vec<_>>();
        assert_eq!(Word::from_letters(rws.rewrite_letters(&raw, None)), t(1));
        assert!(rws.normal_form(&Word::empty()).is_empty());
    }

    #[test]
    fn abelian_group_completes() {
        let bt = Alphabet::bt();
        let pres = GroupPresentation::new(bt.clone(), vec![d()]).unwrap();
        let rws = knuth_bendix(&pres, KbLimits::default());
        assert!(rws.is_confluent());
        let w = bt.parse("tbTtBtT b").unwrap();
        assert_eq!(rws.normal_form(&w), bt.parse("bt").unwrap());
    }

    #[test]
    fn relators_are_trivial() {
        let g = knot_group(p(1));
        let rws = knuth_bendix(&g, small());
        for r in g.relator_words() {
            assert!(rws.is_trivial(&r).is_confirmed());
            let w = t(1).concat(&b(2));
            assert_eq!(rws.normal_form(&w.concat(&r)), rws.normal_form(&w));
        }
        assert!(rws.is_trivial(&Word::empty()).is_confirmed());
        assert!(!rws.is_trivial(&b(1)).is_confirmed());
        assert!(!rws.is_trivial(&d()).is_confirmed());
    }

    #[test]
    fn base_relation_equalities() {
        for n in 1..=2 {
            let g = knot_group(p(n));
            let lhs = t(1).concat(&b(n)).concat(&t(-1));
            let rhs = b(n - 1).concat(&t(-1)).concat(&b(-n)).concat(&t(1)).concat(&b(n));
            assert!(equal_in_group(&lhs, &rhs, &g, small()).is_confirmed());
            let rws = knuth_bendix(&base_presentation(p(n)), small());
            assert!(rws.is_trivial(&g.relator_words()[0]).is_confirmed());
        }
        let rws = knuth_bendix(&knot_group(p(1)), small());
        let w = t(1).concat(&b(1));
        assert!(rws.equal_in_group(&w, &w).is_confirmed());
        assert!(rws.equal_in_group(&w, &w.concat(&base_relation(p(1)))).is_confirmed());
    }

    #[test]
    fn derivations_replay() {
        let g = knot_group(p(2));
        let rws = knuth_bendix(&g, small());
        let w = g.relator_words()[0].conjugate(&t(3));
        let TrivialityVerdict::Confirmed(steps) = rws.is_trivial(&w) else { panic!("not confirmed") };
        assert_eq!(rws.replay(w.letters(), &steps), Ok(vec![]));
        let mut bad = steps.clone();
        bad[0].position += 1;
        assert!(rws.replay(w.letters(), &bad).is_err());
    }

    #[test]
    fn normal_form_idempotent_and_rules_interreduced() {
        let rws = knuth_bendix(&knot_group(p(1)), small());
        let bt = Alphabet::bt();
        let w = bt.parse("tbTTbbtBtbTTTb").unwrap();
        let nf = rws.normal_form(&w);
        assert_eq!(rws.normal_form(&nf), nf);
        for (i, r) in rws.rules().iter().enumerate() {
            assert_eq!(rws.order().shortlex(&r.lhs, &r.rhs), Ordering::Greater);
            for (j, s) in rws.rules().iter().enumerate() {
                if i != j {
                    assert!(!contains(&r.lhs, &s.lhs), "rule {i} contains rule {j}");
                }
            }
        }
    }

    #[test]
    fn dump_is_reproducible() {
        let g = knot_group(p(1));
        let a = knuth_bendix(&g, small()).dump();
        let b = knuth_bendix(&g, small()).dump();
        assert_eq!(a, b);
        assert!(a.starts_with("bB -> 1\n"));
    }
}
