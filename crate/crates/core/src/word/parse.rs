//! Recursive-descent parser for word expressions.
//!
//! ```text
//! word   := factor* ;
//! factor := atom suffix* ;
//! atom   := GEN | INVGEN | "1" | "[" word "," word "]" | "(" word ")" ;
//! suffix := "^" SIGNED_INT | "^" atom ;
//! ```
//!
//! `x^k` with an integer `k` is a power, `x^g` with any other atom is the
//! conjugate `g^-1 x g`. Whitespace is ignored.

use std::collections::BTreeMap;

use super::{Alphabet, Letter, Word, WordError};

/// Generator names plus optional word macros (`D = [t,b]`, ...).
#[derive(Clone, Debug)]
pub struct Scope<'a> {
    alphabet: &'a Alphabet,
    macros: BTreeMap<String, Word>,
}

impl<'a> Scope<'a> {
    pub fn new(alphabet: &'a Alphabet) -> Self {
        Scope { alphabet, macros: BTreeMap::new() }
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.alphabet
    }

    /// Defines `name` as a macro. Names may not shadow a generator or its
    /// inverse spelling.
    pub fn define(&mut self, name: &str, value: Word) -> Result<(), WordError> {
        let valid = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
            && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        let lower = name.to_ascii_lowercase();
        if !valid || self.alphabet.index_of(&lower).is_some() {
            return Err(WordError::InvalidName(name.to_string()));
        }
        self.alphabet.check(&value)?;
        self.macros.insert(name.to_string(), value);
        Ok(())
    }

    /// Parses and defines a `NAME=expr` binding.
    pub fn define_binding(&mut self, binding: &str) -> Result<(), WordError> {
        let Some((name, expr)) = binding.split_once('=') else {
            return Err(WordError::Syntax { pos: 0, msg: "expected NAME=expr".into() });
        };
        let value = self.parse(expr)?;
        self.define(name.trim(), value)
    }

    pub fn parse(&self, text: &str) -> Result<Word, WordError> {
        let mut p = Parser { scope: self, src: text.as_bytes(), pos: 0 };
        let w = p.word()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.error(format!("unexpected `{}`", p.src[p.pos] as char)));
        }
        Ok(w)
    }
}

/// Parses `text` against `alphabet` (no macros).
pub fn parse_word(text: &str, alphabet: &Alphabet) -> Result<Word, WordError> {
    Scope::new(alphabet).parse(text)
}

struct Parser<'s, 'a> {
    scope: &'s Scope<'a>,
    src: &'s [u8],
    pos: usize,
}

impl Parser<'_, '_> {
    fn error(&self, msg: String) -> WordError {
        WordError::Syntax { pos: self.pos, msg }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), WordError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected `{}`", c as char)))
        }
    }

    fn starts_atom(c: u8) -> bool {
        c.is_ascii_alphabetic() || c == b'[' || c == b'(' || c == b'1'
    }

    fn word(&mut self) -> Result<Word, WordError> {
        let mut acc = Word::empty();
        while let Some(c) = self.peek() {
            if !Self::starts_atom(c) {
                break;
            }
            let f = self.factor()?;
            acc = acc.concat(&f);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Word, WordError> {
        let mut x = self.atom()?;
        while self.peek() == Some(b'^') {
            self.pos += 1;
            match self.peek() {
                Some(c) if c == b'-' || c == b'+' || c.is_ascii_digit() => {
                    let k = self.integer()?;
                    x = x.pow(k);
                }
                Some(c) if Self::starts_atom(c) => {
                    let g = self.atom()?;
                    x = x.conjugate(&g);
                }
                _ => return Err(self.error("expected an exponent or a conjugator after `^`".into())),
            }
        }
        Ok(x)
    }

    fn integer(&mut self) -> Result<i64, WordError> {
        self.skip_ws();
        let start = self.pos;
        let mut neg = false;
        if let Some(&c) = self.src.get(self.pos) {
            if c == b'-' || c == b'+' {
                neg = c == b'-';
                self.pos += 1;
                self.skip_ws();
            }
        }
        let digits_start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if digits_start == self.pos {
            self.pos = start;
            return Err(self.error("expected an integer".into()));
        }
        let text = std::str::from_utf8(&self.src[digits_start..self.pos]).unwrap();
        let value: i64 = text
            .parse()
            .map_err(|_| WordError::Syntax { pos: digits_start, msg: "exponent out of range".into() })?;
        Ok(if neg { -value } else { value })
    }

    fn atom(&mut self) -> Result<Word, WordError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let w = self.word()?;
                self.expect(b')')?;
                Ok(w)
            }
            Some(b'[') => {
                self.pos += 1;
                let x = self.word()?;
                self.expect(b',')?;
                let y = self.word()?;
                self.expect(b']')?;
                Ok(x.commutator(&y))
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(Word::empty())
            }
            Some(c) if c.is_ascii_alphabetic() => self.name(),
            Some(c) => Err(self.error(format!("unexpected `{}`", c as char))),
            None => Err(self.error("unexpected end of input".into())),
        }
    }

    /// Longest-match lookup over generator spellings and macro names.
    fn name(&mut self) -> Result<Word, WordError> {
        let rest = &self.src[self.pos..];
        let mut best: Option<(usize, Word)> = None;
        let mut consider = |len: usize, w: Word| {
            if best.as_ref().is_none_or(|(l, _)| len > *l) {
                best = Some((len, w));
            }
        };
        for (i, name) in self.scope.alphabet.names().iter().enumerate() {
            let upper = name.to_ascii_uppercase();
            if rest.starts_with(name.as_bytes()) {
                consider(name.len(), Word::letter(Letter::pos(i as u8)));
            }
            if rest.starts_with(upper.as_bytes()) {
                consider(name.len(), Word::letter(Letter::neg(i as u8)));
            }
        }
        for (name, value) in &self.scope.macros {
            if rest.starts_with(name.as_bytes()) {
                consider(name.len(), value.clone());
            }
        }
        match best {
            Some((len, w)) => {
                self.pos += len;
                Ok(w)
            }
            None => {
                let len = rest
                    .iter()
                    .take_while(|c| c.is_ascii_alphanumeric() || **c == b'_')
                    .count()
                    .max(1);
                Err(WordError::UnknownGenerator {
                    pos: self.pos,
                    name: String::from_utf8_lossy(&rest[..len]).into_owned(),
                })
            }
        }
    }
}
