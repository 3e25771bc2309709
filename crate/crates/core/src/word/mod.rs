//! Free-group words over a small named alphabet.
//!
//! A [`Word`] is always freely reduced; every constructor cancels adjacent
//! inverse pairs. Letters refer to generators by index, so the same word
//! can be printed against any [`Alphabet`] with enough generators.

mod parse;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use parse::{parse_word, Scope};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown generator `{name}` at position {pos}")]
    UnknownGenerator { pos: usize, name: String },
    #[error("invalid generator name `{0}`")]
    InvalidName(String),
    #[error("duplicate generator name `{0}`")]
    DuplicateName(String),
    #[error("word uses generator index {index} outside an alphabet of size {size}")]
    AlphabetMismatch { index: usize, size: usize },
    #[error("operation requires the alphabet {{b, t}}, got {{{0}}}")]
    NotBt(String),
}

/// A generator or its inverse.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Letter {
    gen: u8,
    inverse: bool,
}

impl Letter {
    pub const fn new(gen: u8, inverse: bool) -> Self {
        Letter { gen, inverse }
    }

    pub const fn pos(gen: u8) -> Self {
        Letter::new(gen, false)
    }

    pub const fn neg(gen: u8) -> Self {
        Letter::new(gen, true)
    }

    pub fn gen(self) -> usize {
        self.gen as usize
    }

    pub fn is_inverse(self) -> bool {
        self.inverse
    }

    /// +1 for a generator, -1 for an inverse generator.
    pub fn sign(self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    pub fn inv(self) -> Self {
        Letter::new(self.gen, !self.inverse)
    }

    pub fn cancels(self, other: Letter) -> bool {
        self.gen == other.gen && self.inverse != other.inverse
    }

    /// Dense code `2 * gen + inverse`, used for tables indexed by letter.
    pub fn code(self) -> usize {
        2 * self.gen as usize + self.inverse as usize
    }

    pub fn from_code(code: usize) -> Self {
        Letter::new((code / 2) as u8, code % 2 == 1)
    }
}

/// Ordered generator names. Lowercase names are generators, the uppercase
/// spelling of a name denotes its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self, WordError> {
        let mut out: Vec<String> = Vec::with_capacity(names.len());
        for name in names {
            let name = name.as_ref();
            let valid = name.chars().next().is_some_and(|c| c.is_ascii_lowercase())
                && name.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_');
            if !valid {
                return Err(WordError::InvalidName(name.to_string()));
            }
            if out.iter().any(|n| n == name) {
                return Err(WordError::DuplicateName(name.to_string()));
            }
            out.push(name.to_string());
        }
        if out.len() > u8::MAX as usize {
            return Err(WordError::InvalidName(format!("{} generators", out.len())));
        }
        Ok(Alphabet { names: out })
    }

    /// The two-generator alphabet `b t` used after eliminating `a`.
    pub fn bt() -> Self {
        Alphabet::new(&["b", "t"]).unwrap()
    }

    /// The three-generator alphabet `a b t`.
    pub fn abt() -> Self {
        Alphabet::new(&["a", "b", "t"]).unwrap()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// The positive letter for a named generator.
    pub fn letter(&self, name: &str) -> Option<Letter> {
        self.index_of(name).map(|i| Letter::pos(i as u8))
    }

    pub fn is_bt(&self) -> bool {
        self.names == ["b", "t"]
    }

    fn single_char(&self) -> bool {
        self.names.iter().all(|n| n.len() == 1)
    }

    pub fn letter_name(&self, l: Letter) -> String {
        let name = &self.names[l.gen()];
        if l.is_inverse() {
            name.to_ascii_uppercase()
        } else {
            name.clone()
        }
    }

    /// Checks that every letter of `w` names a generator of this alphabet.
    pub fn check(&self, w: &Word) -> Result<(), WordError> {
        match w.letters.iter().find(|l| l.gen() >= self.len()) {
            Some(l) => Err(WordError::AlphabetMismatch { index: l.gen(), size: self.len() }),
            None => Ok(()),
        }
    }

    /// Prints `w` in letter notation: `TBtb`, or `1` for the identity.
    /// Multi-character names are separated by spaces.
    pub fn format(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        let sep = if self.single_char() { "" } else { " " };
        w.letters
            .iter()
            .map(|&l| self.letter_name(l))
            .collect::<Vec<_>>()
            .join(sep)
    }

    pub fn parse(&self, text: &str) -> Result<Word, WordError> {
        parse_word(text, self)
    }
}

/// A freely reduced word. The empty word is the identity.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

/// Cancels adjacent inverse pairs until none remain.
pub fn reduce<I: IntoIterator<Item = Letter>>(raw: I) -> Word {
    let mut out: Vec<Letter> = Vec::new();
    for l in raw {
        match out.last() {
            Some(&top) if top.cancels(l) => {
                out.pop();
            }
            _ => out.push(l),
        }
    }
    Word { letters: out }
}

impl Word {
    pub fn empty() -> Self {
        Word { letters: Vec::new() }
    }

    pub fn letter(l: Letter) -> Self {
        Word { letters: vec![l] }
    }

    /// Builds a word from letters that are already known to be reduced.
    /// Falls back to reduction if they are not.
    pub fn from_letters(letters: Vec<Letter>) -> Self {
        if letters.windows(2).any(|p| p[0].cancels(p[1])) {
            reduce(letters)
        } else {
            Word { letters }
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.letters.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.letters.last().copied()
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(|l| l.inv()).collect() }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut i = self.letters.len();
        let mut j = 0;
        while i > 0 && j < other.letters.len() && self.letters[i - 1].cancels(other.letters[j]) {
            i -= 1;
            j += 1;
        }
        let mut letters = Vec::with_capacity(i + other.letters.len() - j);
        letters.extend_from_slice(&self.letters[..i]);
        letters.extend_from_slice(&other.letters[j..]);
        Word { letters }
    }

    /// `k`-fold product; negative `k` uses the inverse.
    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let (core, conj) = base.cyclic_reduce();
        let reps = k.unsigned_abs() as usize;
        let mut letters = Vec::with_capacity(core.len() * reps);
        for _ in 0..reps {
            letters.extend_from_slice(&core.letters);
        }
        // A cyclically reduced core concatenates without cancellation.
        conj.inverse().concat(&Word { letters }).concat(&conj)
    }

    /// `g^-1 x g`.
    pub fn conjugate(&self, g: &Word) -> Word {
        g.inverse().concat(self).concat(g)
    }

    /// `[x, y] = x^-1 y^-1 x y`.
    pub fn commutator(&self, y: &Word) -> Word {
        reduce(
            self.letters
                .iter()
                .rev()
                .map(|l| l.inv())
                .chain(y.letters.iter().rev().map(|l| l.inv()))
                .chain(self.letters.iter().copied())
                .chain(y.letters.iter().copied()),
        )
    }

    pub fn exponent_sum(&self, gen: usize) -> i64 {
        self.letters.iter().filter(|l| l.gen() == gen).map(|l| l.sign()).sum()
    }

    /// Exponent sums of generators `0..rank`.
    pub fn abelian_image(&self, rank: usize) -> Vec<i64> {
        let mut v = vec![0; rank];
        for l in &self.letters {
            if l.gen() < rank {
                v[l.gen()] += l.sign();
            }
        }
        v
    }

    /// Replaces every letter by its inverse in place (`t -> t^-1`, `b -> b^-1`).
    pub fn flip_signs(&self) -> Word {
        Word { letters: self.letters.iter().map(|l| l.inv()).collect() }
    }

    /// Splits `w` as `conjugator^-1 * core * conjugator` with `core` cyclically reduced.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let n = self.letters.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.letters[k].cancels(self.letters[n - 1 - k]) {
            k += 1;
        }
        let core = Word { letters: self.letters[k..n - k].to_vec() };
        let conjugator = Word { letters: self.letters[n - k..].to_vec() };
        (core, conjugator)
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.first(), self.last()) {
            (Some(a), Some(b)) => self.len() == 1 || !a.cancels(b),
            _ => true,
        }
    }

    /// Cyclic rotation moving the first `k` letters to the end. Only meaningful
    /// (and only reduced) for cyclically reduced words.
    pub fn rotate(&self, k: usize) -> Word {
        let mut letters = self.letters.clone();
        if !letters.is_empty() {
            letters.rotate_left(k % self.letters.len());
        }
        Word::from_letters(letters)
    }

    /// True when `self` is a cyclic rotation of `other`.
    pub fn is_rotation_of(&self, other: &Word) -> bool {
        self.rotation_offset(other).is_some()
    }

    /// The `k` with `other.rotate(k) == self`, if any.
    pub fn rotation_offset(&self, other: &Word) -> Option<usize> {
        if self.len() != other.len() {
            return None;
        }
        if self.is_empty() {
            return Some(0);
        }
        (0..other.len()).find(|&k| {
            self.letters
                .iter()
                .enumerate()
                .all(|(i, l)| *l == other.letters[(i + k) % other.len()])
        })
    }

    /// Equality of cyclic words up to inversion.
    pub fn same_relator(&self, other: &Word) -> bool {
        let a = self.cyclic_reduce().0;
        let b = other.cyclic_reduce().0;
        a.is_rotation_of(&b) || a.is_rotation_of(&b.inverse())
    }

    /// True when `needle` occurs as a factor of `self`.
    pub fn contains(&self, needle: &Word) -> bool {
        needle.is_empty() || self.letters.windows(needle.len()).any(|w| w == needle.letters.as_slice())
    }
}

/// Total order on letters used by shortlex comparison. The default ranks
/// generators by index with each generator before its inverse, which for
/// `b t` gives `b < B < t < T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LetterOrder {
    rank: Vec<u16>,
}

impl LetterOrder {
    pub fn standard(rank: usize) -> Self {
        LetterOrder { rank: (0..2 * rank as u16).collect() }
    }

    /// Order given by an explicit list of letters, smallest first.
    pub fn from_sequence(seq: &[Letter]) -> Self {
        let size = seq.iter().map(|l| l.code() + 1).max().unwrap_or(0);
        let mut rank = vec![u16::MAX; size.max(seq.len())];
        for (i, l) in seq.iter().enumerate() {
            rank[l.code()] = i as u16;
        }
        LetterOrder { rank }
    }

    pub fn rank(&self, l: Letter) -> u16 {
        self.rank.get(l.code()).copied().unwrap_or(u16::MAX)
    }

    pub fn cmp_letters(&self, a: Letter, b: Letter) -> Ordering {
        self.rank(a).cmp(&self.rank(b)).then(a.code().cmp(&b.code()))
    }

    /// Length first, then lexicographic under this letter order.
    pub fn shortlex(&self, u: &[Letter], v: &[Letter]) -> Ordering {
        u.len().cmp(&v.len()).then_with(|| {
            u.iter()
                .zip(v)
                .map(|(&a, &b)| self.cmp_letters(a, b))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
    }
}

/// Shortlex comparison under the standard letter order.
pub fn shortlex_cmp(u: &Word, v: &Word) -> Ordering {
    u.len().cmp(&v.len()).then_with(|| {
        u.letters
            .iter()
            .zip(&v.letters)
            .map(|(a, b)| a.code().cmp(&b.code()))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

/// The sign-flip automorphism of the `b t` free group.
pub fn involution(w: &Word, alphabet: &Alphabet) -> Result<Word, WordError> {
    if !alphabet.is_bt() {
        return Err(WordError::NotBt(alphabet.names().join(", ")));
    }
    alphabet.check(w)?;
    Ok(w.flip_signs())
}

/// Letters of `b t` as word constructors.
pub mod bt {
    use super::{Letter, Word};

    pub const B: Letter = Letter::pos(0);
    pub const T: Letter = Letter::pos(1);

    pub fn b(k: i64) -> Word {
        Word::letter(B).pow(k)
    }

    pub fn t(k: i64) -> Word {
        Word::letter(T).pow(k)
    }

    /// `D = [t, b]`.
    pub fn d() -> Word {
        t(1).commutator(&b(1))
    }

    /// Product of the given words, freely reduced.
    pub fn prod(parts: &[&Word]) -> Word {
        parts.iter().fold(Word::empty(), |acc, w| acc.concat(w))
    }
}

impl fmt::Display for Word {
    /// Prints with single-letter names `a, b, c, ...`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("1");
        }
        for l in &self.letters {
            let c = (b'a' + l.gen) as char;
            let c = if l.inverse { c.to_ascii_uppercase() } else { c };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}
