//! Bounded search for products of conjugates of a candidate that are trivial.
//!
//! Tuples `(g_1, ..., g_m)` are visited in graded order: by `m`, then total
//! length, then the concatenated letters in shortlex, then the individual
//! lengths. Rotating a tuple or right-multiplying every `g_i` by one word
//! conjugates the product, so only the least tuple of each such orbit inside
//! the length box is tested. The only oracle that can accept is a
//! Knuth-Bendix system.

use std::cmp::Ordering;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certificate::ConjugateProduct;
use crate::presentation::GroupPresentation;
use crate::rep::RepresentationF64;
use crate::rewrite::{knuth_bendix, KbLimits, RewriteSystem};
use crate::word::{Letter, LetterOrder, Word};

/// Unknown tuples whose image is this close to `I` are retried with a
/// larger rewrite budget.
pub const NEAR_IDENTITY: f64 = 1e-6;
/// At most this many near-identity tuples are retried.
pub const RETRY_LIMIT: usize = 16;
/// Budget factor for the retry system.
pub const RETRY_SCALE: usize = 4;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("search bounds must be positive")]
    NonPositive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBounds {
    pub max_conjugates: usize,
    pub max_conjugator_length: usize,
    pub oracle_budget: KbLimits,
}

impl SearchBounds {
    pub fn new(max_conjugates: usize, max_conjugator_length: usize, oracle_budget: KbLimits) -> Result<Self, SearchError> {
        let b = oracle_budget;
        if [max_conjugates, max_conjugator_length, b.max_rules, b.max_lhs_len, b.max_iterations].contains(&0) {
            return Err(SearchError::NonPositive);
        }
        Ok(SearchBounds { max_conjugates, max_conjugator_length, oracle_budget })
    }
}

#[derive(Clone, Debug, Default)]
pub struct SearchOptions {
    /// Worker threads; 0 means one per available core.
    pub workers: usize,
    /// Representation used to rank unknown tuples for the retry pass.
    pub rank_with: Option<RepresentationF64>,
    /// Known trivial products over conjugates of the candidate's conjugacy
    /// class. Each is transported to the candidate and, if it fits the
    /// bounds, tested before enumeration starts.
    pub hints: Vec<ConjugateProduct>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub candidate: String,
    pub bounds: SearchBounds,
    /// The candidate has infinite order in the abelianization.
    pub obstructed: bool,
    pub tuples_tested: u64,
    /// Tuples skipped because a smaller tuple of their orbit is tested.
    pub tuples_pruned: u64,
    pub retried: usize,
    /// The certificate came from a transported hint, not from enumeration.
    pub transported: bool,
    pub elapsed_seconds: String,
    pub conjugators: Option<Vec<String>>,
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub product: Option<ConjugateProduct>,
    pub report: SearchReport,
}

/// Whether `w` has infinite order in the abelianization of `pres`. Products
/// of conjugates of such a word map to nonzero multiples of its image, so
/// none of them is trivial.
pub fn abelian_obstruction(pres: &GroupPresentation, w: &Word) -> bool {
    let h1 = pres.abelianization();
    !h1.is_torsion(&w.abelian_image(pres.rank()))
}

/// All reduced words of length at most `max_len`, in shortlex order.
pub fn words_up_to(rank: usize, max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for code in 0..2 * rank {
                let l = Letter::from_code(code);
                if w.last().is_some_and(|x| x.cancels(l)) {
                    continue;
                }
                let mut letters = w.letters().to_vec();
                letters.push(l);
                next.push(Word::from_letters(letters));
            }
        }
        let order = LetterOrder::standard(rank);
        next.sort_by(|u, v| order.shortlex(u.letters(), v.letters()));
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Position of a tuple in the enumeration order.
fn tuple_cmp(order: &LetterOrder, a: &[Word], b: &[Word]) -> Ordering {
    let total = |t: &[Word]| t.iter().map(Word::len).sum::<usize>();
    a.len()
        .cmp(&b.len())
        .then(total(a).cmp(&total(b)))
        .then_with(|| {
            let cat = |t: &[Word]| t.iter().flat_map(|w| w.letters().iter().copied()).collect::<Vec<_>>();
            order.shortlex(&cat(a), &cat(b))
        })
        .then_with(|| a.iter().map(Word::len).cmp(b.iter().map(Word::len)))
}

/// A rotation of `tuple`, right-multiplied by a common word and still inside
/// the box, that comes earlier in the enumeration, if there is one.
///
/// An earlier image has first entry `x <= g_1`, so `h = g_r^-1 x` ranges over
/// the words `x` listed before `g_1`.
fn smaller_image(order: &LetterOrder, tuple: &[Word], words: &[Word], index_of_first: usize, max_len: usize) -> Option<Vec<Word>> {
    let m = tuple.len();
    for r in 0..m {
        let head_inv = tuple[r].inverse();
        for x in &words[..=index_of_first] {
            let h = head_inv.concat(x);
            if r == 0 && h.is_empty() {
                continue;
            }
            let image: Option<Vec<Word>> = (0..m)
                .map(|i| {
                    let g = tuple[(r + i) % m].concat(&h);
                    (g.len() <= max_len).then_some(g)
                })
                .collect();
            if let Some(image) = image {
                if tuple_cmp(order, &image, tuple) == Ordering::Less {
                    return Some(image);
                }
            }
        }
    }
    None
}

fn is_canonical(order: &LetterOrder, tuple: &[Word], words: &[Word], index_of_first: usize, max_len: usize) -> bool {
    smaller_image(order, tuple, words, index_of_first, max_len).is_none()
}

/// The least tuple of the orbit of `tuple` inside the box. `None` if some
/// entry is longer than `max_len`.
pub fn canonical_tuple(tuple: &[Word], rank: usize, max_len: usize) -> Option<Vec<Word>> {
    if tuple.iter().any(|g| g.len() > max_len) {
        return None;
    }
    let order = LetterOrder::standard(rank);
    let words = words_up_to(rank, max_len);
    let mut current = tuple.to_vec();
    loop {
        let first = words.iter().position(|w| *w == current[0]).expect("entries fit the box");
        match smaller_image(&order, &current, &words, first, max_len) {
            Some(next) => current = next,
            None => return Some(current),
        }
    }
}

/// Some `h` with `base^h == w` as reduced words, if `w` is a conjugate of
/// `base` in the free group.
pub fn free_conjugator(base: &Word, w: &Word) -> Option<Word> {
    let (core_b, conj_b) = base.cyclic_reduce();
    let (core_w, conj_w) = w.cyclic_reduce();
    let k = core_w.rotation_offset(&core_b)?;
    // core_w = core_b.rotate(k) is core_b conjugated by its first k letters,
    // or equally by the inverse of the remaining ones; take the shorter.
    let letters = core_b.letters();
    let p = if 2 * k <= letters.len() {
        Word::from_letters(letters[..k].to_vec())
    } else {
        Word::from_letters(letters[k..].to_vec()).inverse()
    };
    let h = conj_b.inverse().concat(&p).concat(&conj_w);
    (base.conjugate(&h) == *w).then_some(h)
}

/// Rewrites a product of conjugates of `base` as conjugates of `w = base^h`:
/// `base^g = w^(h^-1 g)`.
pub fn transport(cp: &ConjugateProduct, w: &Word) -> Option<ConjugateProduct> {
    let h = free_conjugator(cp.base(), w)?;
    let hi = h.inverse();
    let conjugators = cp.conjugators().iter().map(|g| hi.concat(g)).collect();
    Some(ConjugateProduct::new(w.clone(), conjugators).expect("nonempty"))
}

/// Indices into `words` of every tuple with `m` entries and the given total
/// length, in enumeration order.
fn grade(order: &LetterOrder, words: &[Word], m: usize, total: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut by_len: Vec<Vec<usize>> = vec![Vec::new(); max_len + 1];
    for (i, w) in words.iter().enumerate() {
        by_len[w.len()].push(i);
    }
    let mut out = Vec::new();
    let mut lens = vec![0usize; m];
    compositions(total, max_len, &mut lens, 0, &mut |lens| {
        let mut idx = vec![0usize; m];
        loop {
            out.push((0..m).map(|i| by_len[lens[i]][idx[i]]).collect::<Vec<_>>());
            let mut k = m;
            loop {
                if k == 0 {
                    return;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < by_len[lens[k]].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    });
    out.sort_by(|a, b| {
        let ta: Vec<Word> = a.iter().map(|&i| words[i].clone()).collect();
        let tb: Vec<Word> = b.iter().map(|&i| words[i].clone()).collect();
        tuple_cmp(order, &ta, &tb)
    });
    out
}

fn compositions(rest: usize, max_part: usize, lens: &mut Vec<usize>, at: usize, emit: &mut dyn FnMut(&[usize])) {
    if at == lens.len() {
        if rest == 0 {
            emit(lens);
        }
        return;
    }
    let slots = lens.len() - at - 1;
    for part in 0..=rest.min(max_part) {
        if rest - part > slots * max_part {
            continue;
        }
        lens[at] = part;
        compositions(rest - part, max_part, lens, at + 1, emit);
    }
}

struct WorkerOutcome {
    tested: u64,
    pruned: u64,
    confirmed: Option<Vec<Word>>,
    near: Vec<(f64, Vec<Word>)>,
}

#[allow(clippy::too_many_arguments)]
fn scan(
    chunk: &[Vec<usize>],
    words: &[Word],
    order: &LetterOrder,
    candidate: &Word,
    max_len: usize,
    system: &RewriteSystem,
    rep: Option<&RepresentationF64>,
) -> WorkerOutcome {
    let mut out = WorkerOutcome { tested: 0, pruned: 0, confirmed: None, near: Vec::new() };
    for idx in chunk {
        let tuple: Vec<Word> = idx.iter().map(|&i| words[i].clone()).collect();
        if !is_canonical(order, &tuple, words, idx[0], max_len) {
            out.pruned += 1;
            continue;
        }
        out.tested += 1;
        let product = expand_tuple(candidate, &tuple);
        // The whole grade is scanned so the counts do not depend on the
        // partition; the chunk is in order, so the first hit is its least.
        if out.confirmed.is_none() && system.is_trivial(&product).is_confirmed() {
            out.confirmed = Some(tuple);
            continue;
        }
        if let Some(rep) = rep {
            let dev = rep.evaluate(&product).distance_from_identity();
            if dev < NEAR_IDENTITY {
                out.near.push((dev, tuple));
            }
        }
    }
    out
}

fn expand_tuple(candidate: &Word, tuple: &[Word]) -> Word {
    tuple.iter().fold(Word::empty(), |acc, g| acc.concat(&candidate.conjugate(g)))
}

/// Searches with the default options.
pub fn search(pres: &GroupPresentation, candidate: &Word, bounds: &SearchBounds) -> SearchResult {
    search_with(pres, candidate, bounds, &SearchOptions::default())
}

pub fn search_with(pres: &GroupPresentation, candidate: &Word, bounds: &SearchBounds, options: &SearchOptions) -> SearchResult {
    let started = Instant::now();
    let mut report = SearchReport {
        candidate: pres.alphabet().format(candidate),
        bounds: *bounds,
        obstructed: false,
        tuples_tested: 0,
        tuples_pruned: 0,
        retried: 0,
        transported: false,
        elapsed_seconds: String::new(),
        conjugators: None,
    };
    let finish = |mut report: SearchReport, found: Option<Vec<Word>>| {
        report.elapsed_seconds = format!("{:.3}", started.elapsed().as_secs_f64());
        report.conjugators = found.as_ref().map(|t| t.iter().map(|g| pres.alphabet().format(g)).collect());
        let product = found.map(|t| ConjugateProduct::new(candidate.clone(), t).expect("tuples are nonempty"));
        SearchResult { product, report }
    };
    if abelian_obstruction(pres, candidate) {
        report.obstructed = true;
        return finish(report, None);
    }

    let order = LetterOrder::standard(pres.rank());
    let max_len = bounds.max_conjugator_length;
    let system = knuth_bendix(pres, bounds.oracle_budget);

    for hint in &options.hints {
        let Some(moved) = transport(hint, candidate) else { continue };
        if moved.len() > bounds.max_conjugates {
            continue;
        }
        let Some(tuple) = canonical_tuple(moved.conjugators(), pres.rank(), max_len) else { continue };
        // The rewrite system is not confluent, so the orbit minimum may
        // stay unknown where the transported tuple itself is confirmed.
        let mut tries = vec![tuple];
        if tries[0] != moved.conjugators() {
            tries.push(moved.conjugators().to_vec());
        }
        for tuple in tries {
            report.tuples_tested += 1;
            if system.is_trivial(&expand_tuple(candidate, &tuple)).is_confirmed() {
                report.transported = true;
                return finish(report, Some(tuple));
            }
        }
    }

    let words = words_up_to(pres.rank(), max_len);
    let workers = match options.workers {
        0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
        w => w,
    };
    let mut near: Vec<(f64, Vec<Word>)> = Vec::new();

    for m in 1..=bounds.max_conjugates {
        for total in 0..=m * max_len {
            let tuples = grade(&order, &words, m, total, max_len);
            if tuples.is_empty() {
                continue;
            }
            // Deterministic partition by first conjugator.
            let mut parts: Vec<Vec<Vec<usize>>> = vec![Vec::new(); workers];
            for t in tuples {
                parts[t[0] % workers].push(t);
            }
            let outcomes: Vec<WorkerOutcome> = std::thread::scope(|s| {
                let handles: Vec<_> = parts
                    .iter()
                    .map(|chunk| {
                        let (words, order, system) = (&words, &order, &system);
                        s.spawn(move || scan(chunk, words, order, candidate, max_len, system, options.rank_with.as_ref()))
                    })
                    .collect();
                handles.into_iter().map(|h| h.join().expect("search worker panicked")).collect()
            });
            let mut best: Option<Vec<Word>> = None;
            for o in outcomes {
                report.tuples_tested += o.tested;
                report.tuples_pruned += o.pruned;
                near.extend(o.near);
                if let Some(t) = o.confirmed {
                    if best.as_ref().is_none_or(|b| tuple_cmp(&order, &t, b) == Ordering::Less) {
                        best = Some(t);
                    }
                }
            }
            if best.is_some() {
                return finish(report, best);
            }
        }
    }

    // Retry the most nearly trivial unknowns with a larger budget.
    if !near.is_empty() {
        near.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| tuple_cmp(&order, &a.1, &b.1)));
        near.truncate(RETRY_LIMIT);
        near.sort_by(|a, b| tuple_cmp(&order, &a.1, &b.1));
        let big = knuth_bendix(pres, bounds.oracle_budget.scaled(RETRY_SCALE));
        for (_, tuple) in near {
            report.retried += 1;
            if big.is_trivial(&expand_tuple(candidate, &tuple)).is_confirmed() {
                return finish(report, Some(tuple));
            }
        }
    }
    finish(report, None)
}
