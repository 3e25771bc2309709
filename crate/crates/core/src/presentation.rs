//! Group presentations for the knot groups of the negative twist knots.
//!
//! The `(-n)`-twist knot group is presented on `a b t` with relators
//! `t a T A b` and `t b^n A T B^n`. Eliminating `a = [t, b^n]` leaves a
//! one-relator presentation on `b t`, which is what everything downstream
//! works with.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::word::bt::{b, prod, t};
use crate::word::{Alphabet, Letter, Scope, Word, WordError};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error("twist parameter must be at least 1, got {0}")]
    BadTwist(i64),
    #[error("relator {0} is freely trivial")]
    EmptyRelator(usize),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
}

/// `n` for the `(-n)`-twist knot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct TwistKnotParams(u32);

impl TwistKnotParams {
    pub fn new(n: i64) -> Result<Self, PresentationError> {
        if n >= 1 && n <= u32::MAX as i64 {
            Ok(TwistKnotParams(n as u32))
        } else {
            Err(PresentationError::BadTwist(n))
        }
    }

    pub fn n(self) -> i64 {
        self.0 as i64
    }
}

impl TryFrom<i64> for TwistKnotParams {
    type Error = PresentationError;

    fn try_from(n: i64) -> Result<Self, Self::Error> {
        TwistKnotParams::new(n)
    }
}

impl From<TwistKnotParams> for i64 {
    fn from(p: TwistKnotParams) -> i64 {
        p.n()
    }
}

impl fmt::Display for TwistKnotParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A relator kept cyclically reduced. The original spelling is
/// `conjugator^-1 * core * conjugator`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Relator {
    pub core: Word,
    pub conjugator: Word,
}

impl Relator {
    pub fn new(w: &Word) -> Self {
        let (core, conjugator) = w.cyclic_reduce();
        Relator { core, conjugator }
    }

    pub fn word(&self) -> Word {
        self.core.conjugate(&self.conjugator)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPresentation {
    alphabet: Alphabet,
    relators: Vec<Relator>,
}

impl GroupPresentation {
    pub fn new(alphabet: Alphabet, relators: Vec<Word>) -> Result<Self, PresentationError> {
        let mut out = Vec::with_capacity(relators.len());
        for (i, r) in relators.iter().enumerate() {
            alphabet.check(r)?;
            if r.is_empty() {
                return Err(PresentationError::EmptyRelator(i));
            }
            out.push(Relator::new(r));
        }
        Ok(GroupPresentation { alphabet, relators: out })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn rank(&self) -> usize {
        self.alphabet.len()
    }

    pub fn relators(&self) -> &[Relator] {
        &self.relators
    }

    /// Original relator spellings.
    pub fn relator_words(&self) -> Vec<Word> {
        self.relators.iter().map(Relator::word).collect()
    }

    /// Cyclically reduced relator cores.
    pub fn cores(&self) -> Vec<Word> {
        self.relators.iter().map(|r| r.core.clone()).collect()
    }

    pub fn abelianization(&self) -> AbelianGroup {
        AbelianGroup::from_relations(self.rank(), self.relators.iter().map(|r| r.core.abelian_image(self.rank())).collect())
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("generators: {}\n", self.alphabet.names().join(" "));
        for r in &self.relators {
            out.push_str(&format!("relator: {}\n", self.alphabet.format(&r.word())));
        }
        out
    }

    pub fn to_record(&self) -> PresentationRecord {
        PresentationRecord {
            generators: self.alphabet.names().to_vec(),
            relators: self.relators.iter().map(|r| self.alphabet.format(&r.word())).collect(),
        }
    }

    pub fn from_record(rec: &PresentationRecord) -> Result<Self, PresentationError> {
        let alphabet = Alphabet::new(&rec.generators)?;
        let relators = rec
            .relators
            .iter()
            .map(|r| alphabet.parse(r))
            .collect::<Result<Vec<_>, _>>()?;
        GroupPresentation::new(alphabet, relators)
    }
}

/// Structured export of a presentation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationRecord {
    pub generators: Vec<String>,
    pub relators: Vec<String>,
}

impl FromStr for GroupPresentation {
    type Err = PresentationError;

    /// Reads the line format: `generators: b t`, then `relator: <expr>` lines.
    /// `#` starts a comment.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut alphabet: Option<Alphabet> = None;
        let mut relators = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| PresentationError::Format { line: i + 1, msg: msg.to_string() };
            let (key, value) = line.split_once(':').ok_or_else(|| err("expected `key: value`"))?;
            match (key.trim(), &alphabet) {
                ("generators", None) => {
                    let names: Vec<&str> = value.split_whitespace().collect();
                    alphabet = Some(Alphabet::new(&names)?);
                }
                ("generators", Some(_)) => return Err(err("duplicate generators line")),
                ("relator", Some(a)) => relators.push(Scope::new(a).parse(value)?),
                ("relator", None) => return Err(err("relator before generators line")),
                _ => return Err(err("unknown key")),
            }
        }
        let alphabet = alphabet.ok_or(PresentationError::Format { line: 0, msg: "missing generators line".into() })?;
        GroupPresentation::new(alphabet, relators)
    }
}

const A: Letter = Letter::pos(0);
const B3: Letter = Letter::pos(1);
const T3: Letter = Letter::pos(2);

fn abt_power(l: Letter, k: i64) -> Word {
    Word::letter(l).pow(k)
}

/// Three-generator presentation `<a, b, t | t a T = B a, t (b^n A) T = b^n>`.
pub fn twist_presentation(n: TwistKnotParams) -> GroupPresentation {
    let (plus_x, plus_y, minus_x, minus_y) = seifert_pushoffs(n);
    let tt = Word::letter(T3);
    let rel = |plus: &Word, minus: &Word| prod(&[&tt, plus, &tt.inverse(), &minus.inverse()]);
    let r1 = rel(&plus_x, &minus_x);
    let r2 = rel(&plus_y, &minus_y);
    GroupPresentation::new(Alphabet::abt(), vec![r1, r2]).expect("twist relators are nonempty")
}

/// Push-offs of the Seifert surface curves `x, y` to the front and back:
/// `(x+, y+, x-, y-) = (a, b^n A, B a, b^n)` over `a b t`.
pub fn seifert_pushoffs(n: TwistKnotParams) -> (Word, Word, Word, Word) {
    let a = Word::letter(A);
    let bn = abt_power(B3, n.n());
    let xplus = a.clone();
    let yplus = bn.concat(&a.inverse());
    let xminus = Word::letter(B3.inv()).concat(&a);
    (xplus, yplus, xminus, bn)
}

/// `[t, b^n]` over `b t`.
pub fn a_substitution(n: TwistKnotParams) -> Word {
    t(1).commutator(&b(n.n()))
}

/// Maps a word over `a b t` to `b t`, replacing `a` by `[t, b^n]`.
pub fn substitute(w: &Word, n: TwistKnotParams) -> Word {
    let a = a_substitution(n);
    let a_inv = a.inverse();
    let mut out = Word::empty();
    for &l in w.letters() {
        let piece = match l.gen() {
            0 if l.is_inverse() => a_inv.clone(),
            0 => a.clone(),
            g => Word::letter(Letter::new(g as u8 - 1, l.is_inverse())),
        };
        out = out.concat(&piece);
    }
    out
}

/// The one-relator presentation `<b, t | r(n)>` obtained by eliminating `a`,
/// together with the substitution used for `a`.
pub fn eliminate_a(n: TwistKnotParams) -> (GroupPresentation, Word) {
    let full = twist_presentation(n);
    let words = full.relator_words();
    let r = substitute(&words[0], n);
    debug_assert!(substitute(&words[1], n).is_empty());
    let pres = GroupPresentation::new(Alphabet::bt(), vec![r]).expect("eliminated relator is nonempty");
    (pres, a_substitution(n))
}

/// `<b, t | r(n)>`.
pub fn knot_group(n: TwistKnotParams) -> GroupPresentation {
    eliminate_a(n).0
}

/// The relator of `t b^n T = b^(n-1) T B^n t b^n`.
pub fn base_relation(n: TwistKnotParams) -> Word {
    let n = n.n();
    let lhs = prod(&[&t(1), &b(n), &t(-1)]);
    let rhs = prod(&[&b(n - 1), &t(-1), &b(-n), &t(1), &b(n)]);
    lhs.concat(&rhs.inverse())
}

pub fn base_relator(n: TwistKnotParams) -> Relator {
    Relator::new(&base_relation(n))
}

/// `<b, t | R_base(n)>`.
pub fn base_presentation(n: TwistKnotParams) -> GroupPresentation {
    GroupPresentation::new(Alphabet::bt(), vec![base_relation(n)]).expect("base relator is nonempty")
}

/// The relator of `T B^n t = B^(n-1) t b^n T B^n`, the mirror image of the
/// base relation under `t -> T, b -> B`.
pub fn mirror_relation(n: TwistKnotParams) -> Word {
    let n = n.n();
    let lhs = prod(&[&t(-1), &b(-n), &t(1)]);
    let rhs = prod(&[&b(-(n - 1)), &t(1), &b(n), &t(-1), &b(-n)]);
    lhs.concat(&rhs.inverse())
}

/// Finitely generated abelian group `Z^free_rank + sum Z/torsion_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianGroup {
    pub free_rank: usize,
    pub torsion: Vec<u64>,
    rank: usize,
    /// Relation lattice in Hermite form, used for membership tests.
    #[serde(skip)]
    lattice: Vec<Vec<i64>>,
}

impl AbelianGroup {
    pub fn from_relations(rank: usize, rows: Vec<Vec<i64>>) -> Self {
        let lattice = hermite_rows(rows.clone(), rank);
        let diag = smith_diagonal(rows, rank);
        let nonzero: Vec<u64> = diag.iter().copied().filter(|&d| d != 0).collect();
        let free_rank = rank - nonzero.len();
        let torsion = nonzero.into_iter().filter(|&d| d > 1).collect();
        AbelianGroup { free_rank, torsion, rank, lattice }
    }

    pub fn is_infinite_cyclic(&self) -> bool {
        self.free_rank == 1 && self.torsion.is_empty()
    }

    /// Whether the element with exponent vector `v` has finite order.
    pub fn is_torsion(&self, v: &[i64]) -> bool {
        let k = self.torsion.iter().fold(1i64, |acc, &d| acc * d as i64);
        self.is_zero(&v.iter().map(|x| x * k).collect::<Vec<_>>())
    }

    /// Whether the exponent vector `v` lies in the relation lattice, i.e.
    /// the element maps to zero.
    pub fn is_zero(&self, v: &[i64]) -> bool {
        let mut v = v.to_vec();
        v.resize(self.rank, 0);
        for row in &self.lattice {
            let Some(p) = row.iter().position(|&x| x != 0) else { continue };
            if v[p] % row[p] != 0 {
                return false;
            }
            let q = v[p] / row[p];
            for (x, r) in v.iter_mut().zip(row) {
                *x -= q * r;
            }
        }
        v.iter().all(|&x| x == 0)
    }
}

// Row-style Hermite form over Z: echelon rows with positive pivots.
fn hermite_rows(mut rows: Vec<Vec<i64>>, cols: usize) -> Vec<Vec<i64>> {
    for r in &mut rows {
        r.resize(cols, 0);
    }
    let mut out = Vec::new();
    for col in 0..cols {
        loop {
            let mut live: Vec<usize> = (0..rows.len()).filter(|&i| rows[i][col] != 0).collect();
            if live.len() <= 1 {
                if let Some(&i) = live.first() {
                    let mut row = rows.swap_remove(i);
                    if row[col] < 0 {
                        row.iter_mut().for_each(|x| *x = -*x);
                    }
                    out.push(row);
                }
                break;
            }
            live.sort_by_key(|&i| rows[i][col].abs());
            let pivot = rows[live[0]].clone();
            for &i in &live[1..] {
                let q = rows[i][col] / pivot[col];
                for (x, p) in rows[i].iter_mut().zip(&pivot) {
                    *x -= q * p;
                }
            }
        }
    }
    out
}

fn smith_diagonal(rows: Vec<Vec<i64>>, cols: usize) -> Vec<u64> {
    let mut m: Vec<Vec<i64>> = rows.into_iter().map(|mut r| {
        r.resize(cols, 0);
        r
    }).collect();
    let mut diag = Vec::new();
    let mut k = 0;
    while k < m.len() && k < cols {
        // Pick the smallest nonzero entry in the remaining block as pivot.
        let Some((pi, pj)) = (k..m.len())
            .flat_map(|i| (k..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| m[i][j] != 0)
            .min_by_key(|&(i, j)| m[i][j].abs())
        else {
            break;
        };
        m.swap(k, pi);
        for row in &mut m {
            row.swap(k, pj);
        }
        let p = m[k][k];
        let mut clean = true;
        let (top, rest) = m.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in rest.iter_mut() {
            let q = row[k] / p;
            for j in k..cols {
                row[j] -= q * pivot_row[j];
            }
            clean &= row[k] == 0;
        }
        for j in k + 1..cols {
            let q = m[k][j] / p;
            for row in m.iter_mut() {
                row[j] -= q * row[k];
            }
            clean &= m[k][j] == 0;
        }
        if !clean {
            continue;
        }
        // Divisibility: fold any entry not divisible by the pivot back in.
        let bad = (k + 1..m.len()).find(|&i| (k + 1..cols).any(|j| m[i][j] % p != 0));
        if let Some(i) = bad {
            let (top, rest) = m.split_at_mut(k + 1);
            for (dst, src) in top[k][k..cols].iter_mut().zip(&rest[i - k - 1][k..cols]) {
                *dst += *src;
            }
            continue;
        }
        diag.push(p.unsigned_abs());
        k += 1;
    }
    diag
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::involution;

    fn p(n: i64) -> TwistKnotParams {
        TwistKnotParams::new(n).unwrap()
    }

    fn f3(w: &Word) -> String {
        Alphabet::abt().format(w)
    }

    fn f2(w: &Word) -> String {
        Alphabet::bt().format(w)
    }

    #[test]
    fn twist_params_reject_nonpositive() {
        assert_eq!(TwistKnotParams::new(0), Err(PresentationError::BadTwist(0)));
        assert!(TwistKnotParams::new(-3).is_err());
        assert_eq!(p(4).n(), 4);
    }

    #[test]
    fn three_generator_relators() {
        let g = twist_presentation(p(1));
        let words: Vec<String> = g.relator_words().iter().map(f3).collect();
        assert_eq!(words, ["taTAb", "tbATB"]);
        let g = twist_presentation(p(2));
        assert_eq!(f3(&g.relator_words()[1]), "tbbATBB");
        for r in g.relators() {
            assert!(r.core.is_cyclically_reduced());
        }
        let r = g.relator_words();
        // r1 kills b, r2 kills a in the abelianization.
        assert_eq!(r[0].abelian_image(3), vec![0, 1, 0]);
        assert_eq!(r[1].abelian_image(3), vec![-1, 0, 0]);
        assert!(g.abelianization().is_infinite_cyclic());
    }

    #[test]
    fn pushoffs() {
        let (xp, yp, xm, ym) = seifert_pushoffs(p(1));
        assert_eq!([f3(&xp), f3(&yp), f3(&xm), f3(&ym)], ["a", "bA", "Ba", "b"]);
        assert_eq!(f3(&seifert_pushoffs(p(3)).1), "bbbA");
        let tt = Word::letter(T3);
        for n in 1..=10 {
            let (xp, yp, xm, ym) = seifert_pushoffs(p(n));
            let r = twist_presentation(p(n)).relator_words();
            assert_eq!(prod(&[&tt, &xp, &tt.inverse(), &xm.inverse()]), r[0]);
            assert_eq!(prod(&[&tt, &yp, &tt.inverse(), &ym.inverse()]), r[1]);
        }
    }

    #[test]
    fn substitution() {
        let abt = Alphabet::abt();
        assert_eq!(f2(&substitute(&abt.parse("a").unwrap(), p(1))), "TBtb");
        assert_eq!(f2(&substitute(&abt.parse("A").unwrap(), p(1))), "BTbt");
        assert_eq!(f2(&substitute(&abt.parse("b").unwrap(), p(5))), "b");
    }

    #[test]
    fn elimination() {
        let (g, sub) = eliminate_a(p(1));
        assert_eq!(f2(&g.relator_words()[0]), "BtbTBTbtb");
        assert_eq!(f2(&sub), "TBtb");
        let (g, _) = eliminate_a(p(2));
        assert_eq!(f2(&g.relator_words()[0]), "BBtbbTBBTbbtb");
        for n in 1..=10 {
            let full = twist_presentation(p(n)).relator_words();
            assert!(substitute(&full[1], p(n)).is_empty());
            let r = &knot_group(p(n)).relator_words()[0];
            assert_eq!(r.len() as i64, 4 * n + 5);
            assert_eq!(r.exponent_sum(1), 0);
            assert_eq!(r.exponent_sum(0), 1);
            let h1 = knot_group(p(n)).abelianization();
            assert!(h1.is_infinite_cyclic());
            assert!(h1.is_zero(&b(1).abelian_image(2)));
            assert!(!h1.is_zero(&t(1).abelian_image(2)));
        }
    }

    #[test]
    fn remark_identity_b_is_commutator() {
        // b = [a^-1, t^-1] modulo the first relator.
        let abt = Alphabet::abt();
        for n in 1..=10 {
            let g = twist_presentation(p(n));
            let r1 = g.relator_words()[0].clone();
            let w = abt.parse("B [A, T]").unwrap();
            assert!(w.same_relator(&r1));
            let eliminated = substitute(&w, p(n));
            assert!(eliminated.same_relator(&knot_group(p(n)).relator_words()[0]));
        }
    }

    #[test]
    fn base_relation_words() {
        assert_eq!(f2(&base_relation(p(1))), "tbTBTbt");
        for n in 1..=8 {
            let r = base_relation(p(n));
            assert_eq!(r.exponent_sum(1), 0);
            assert_eq!(r.exponent_sum(0), 1);
            let mirrored = involution(&r, &Alphabet::bt()).unwrap();
            assert!(mirrored.same_relator(&mirror_relation(p(n))));
            // r(n) and R_base(n) are the same cyclic word.
            let core = knot_group(p(n)).relators()[0].core.clone();
            assert!(core.same_relator(&r));
        }
    }

    #[test]
    fn text_format_round_trip() {
        let g = knot_group(p(2));
        let text = g.to_text();
        assert_eq!(text, "generators: b t\nrelator: BBtbbTBBTbbtb\n");
        let back: GroupPresentation = format!("# knot 5_2\n{text}").parse().unwrap();
        assert_eq!(back, g);
        let rec = g.to_record();
        assert_eq!(GroupPresentation::from_record(&rec).unwrap(), g);
        assert!("relator: t".parse::<GroupPresentation>().is_err());
        assert!("generators: b t\nrelator: bB".parse::<GroupPresentation>().is_err());
    }

    #[test]
    fn abelian_invariants() {
        let g = AbelianGroup::from_relations(2, vec![vec![2, 0], vec![0, 3]]);
        assert_eq!(g.free_rank, 0);
        assert_eq!(g.torsion, vec![6]);
        let g = AbelianGroup::from_relations(3, vec![vec![2, 4, 0]]);
        assert_eq!(g.free_rank, 2);
        assert_eq!(g.torsion, vec![2]);
        assert!(g.is_zero(&[4, 8, 0]));
        assert!(!g.is_zero(&[1, 2, 0]));
        assert!(!g.is_zero(&[0, 0, 1]));
    }
}
