//! Words over `{1..n, 1b..nb}`, their types and weights, and the tensor basis they index.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::exterior::{GlWeight, SubsetIndex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("cannot parse word {0:?}")]
    Parse(String),
    #[error("cannot parse type {0:?}")]
    ParseType(String),
    #[error("letter {value} exceeds rank {n}")]
    LetterRange { value: u32, n: usize },
    #[error("words of different lengths {0} and {1}")]
    LengthMismatch(usize, usize),
}

/// A letter `a` (plain) or `ab` (barred).
///
/// Letters are totally ordered by `1b < 2b < .. < nb < n < .. < 2 < 1`; the order does not
/// depend on `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub value: u32,
    pub barred: bool,
}

impl Letter {
    pub fn plain(value: u32) -> Self {
        Self { value, barred: false }
    }

    pub fn bar(value: u32) -> Self {
        Self { value, barred: true }
    }

    /// `a -> a`, `ab -> -a`.
    pub fn z_label(&self) -> i32 {
        if self.barred {
            -(self.value as i32)
        } else {
            self.value as i32
        }
    }

    pub fn from_z_label(z: i32) -> Option<Self> {
        match z.cmp(&0) {
            Ordering::Greater => Some(Self::plain(z as u32)),
            Ordering::Less => Some(Self::bar(z.unsigned_abs())),
            Ordering::Equal => None,
        }
    }

    pub fn sign(&self) -> Sign {
        if self.barred {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    /// The basis vector of `V` or `V(-1)` this letter indexes.
    pub fn basis_vector(&self, n: usize) -> SubsetIndex {
        SubsetIndex { n, members: 1 << (self.value - 1), dual: self.barred }
    }

    fn order_key(&self) -> (bool, i64) {
        if self.barred {
            (false, self.value as i64)
        } else {
            (true, -(self.value as i64))
        }
    }
}

/// Signed label of an optional letter; an absent edge is 0.
pub fn z_label(l: Option<Letter>) -> i32 {
    l.map_or(0, |l| l.z_label())
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.value, if self.barred { "'" } else { "" })
    }
}

/// The letters of rank `n` in increasing order.
pub fn alphabet(n: usize) -> Vec<Letter> {
    let mut a: Vec<Letter> = (1..=n as u32).map(Letter::bar).collect();
    a.extend((1..=n as u32).rev().map(Letter::plain));
    a
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

/// A word in `{+, -}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TypeString {
    pub signs: Vec<Sign>,
}

impl TypeString {
    pub fn new(signs: Vec<Sign>) -> Self {
        Self { signs }
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    /// All types of length `r`.
    pub fn all(r: usize) -> Vec<TypeString> {
        (0..1u32 << r)
            .map(|m| TypeString::new((0..r).map(|i| if m >> (r - 1 - i) & 1 == 1 { Sign::Minus } else { Sign::Plus }).collect()))
            .collect()
    }
}

impl fmt::Display for TypeString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.signs {
            write!(f, "{}", if *s == Sign::Plus { '+' } else { '-' })?;
        }
        Ok(())
    }
}

impl FromStr for TypeString {
    type Err = WordError;
    fn from_str(s: &str) -> Result<Self, WordError> {
        s.trim()
            .chars()
            .map(|c| match c {
                '+' => Ok(Sign::Plus),
                '-' => Ok(Sign::Minus),
                _ => Err(WordError::ParseType(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(TypeString::new)
    }
}

/// A word; its letters index a tensor basis vector of `V(u)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word {
    pub letters: Vec<Letter>,
}

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Self { letters }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn max_value(&self) -> u32 {
        self.letters.iter().map(|l| l.value).max().unwrap_or(0)
    }

    pub fn check_rank(&self, n: usize) -> Result<(), WordError> {
        match self.letters.iter().find(|l| l.value == 0 || l.value as usize > n) {
            Some(l) => Err(WordError::LetterRange { value: l.value, n }),
            None => Ok(()),
        }
    }

    /// Bracketed signed form, valid for any rank.
    pub fn bracketed(&self) -> String {
        let s: Vec<String> = self.letters.iter().map(|l| l.z_label().to_string()).collect();
        format!("[{}]", s.join(","))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.letters.cmp(&other.letters)
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    /// Digits with `'` for bars when every letter is a single digit, otherwise bracketed.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.iter().all(|l| l.value <= 9) {
            for l in &self.letters {
                write!(f, "{l}")?;
            }
            Ok(())
        } else {
            write!(f, "{}", self.bracketed())
        }
    }
}

impl FromStr for Word {
    type Err = WordError;
    /// `12'1` (digits, `'` bars the previous letter) or `[1,-2,1]`.
    fn from_str(s: &str) -> Result<Self, WordError> {
        let err = || WordError::Parse(s.to_string());
        let t = s.trim();
        if let Some(body) = t.strip_prefix('[') {
            let body = body.strip_suffix(']').ok_or_else(err)?;
            if body.trim().is_empty() {
                return Ok(Word::default());
            }
            return body
                .split(',')
                .map(|x| x.trim().parse::<i32>().ok().and_then(Letter::from_z_label).ok_or_else(err))
                .collect::<Result<Vec<_>, _>>()
                .map(Word::new);
        }
        let mut letters: Vec<Letter> = Vec::new();
        for c in t.chars() {
            match c {
                '\'' => {
                    let last = letters.last_mut().ok_or_else(err)?;
                    if last.barred {
                        return Err(err());
                    }
                    last.barred = true;
                }
                '1'..='9' => letters.push(Letter::plain(c.to_digit(10).unwrap())),
                _ => return Err(err()),
            }
        }
        Ok(Word::new(letters))
    }
}

pub fn type_of(w: &Word) -> TypeString {
    TypeString::new(w.letters.iter().map(Letter::sign).collect())
}

/// `lambda_a = #a - #ab`.
pub fn weight_of_word(w: &Word, n: usize) -> Result<GlWeight, WordError> {
    w.check_rank(n)?;
    let mut g = GlWeight::zero(n);
    for l in &w.letters {
        g.coords[l.value as usize - 1] += if l.barred { -1 } else { 1 };
    }
    Ok(g)
}

pub fn lex_compare(x: &Word, y: &Word) -> Result<Ordering, WordError> {
    if x.len() != y.len() {
        return Err(WordError::LengthMismatch(x.len(), y.len()));
    }
    Ok(x.cmp(y))
}

/// Lazy enumeration of words of length `r` in increasing order, optionally restricted to a
/// type and a weight.
pub struct WordIter {
    n: usize,
    choices: Vec<Vec<Letter>>,
    idx: Vec<usize>,
    weight: Option<GlWeight>,
    done: bool,
}

impl Iterator for WordIter {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        while !self.done {
            let w = Word::new(self.idx.iter().zip(&self.choices).map(|(&i, c)| c[i]).collect());
            self.advance();
            match &self.weight {
                Some(target) if weight_of_word(&w, self.n).ok().as_ref() != Some(target) => continue,
                _ => return Some(w),
            }
        }
        None
    }
}

impl WordIter {
    fn advance(&mut self) {
        for pos in (0..self.idx.len()).rev() {
            self.idx[pos] += 1;
            if self.idx[pos] < self.choices[pos].len() {
                return;
            }
            self.idx[pos] = 0;
        }
        self.done = true;
    }
}

pub fn enumerate_words(r: usize, n: usize, u: Option<&TypeString>, weight: Option<&GlWeight>) -> WordIter {
    let full = alphabet(n);
    let choices: Vec<Vec<Letter>> = (0..r)
        .map(|i| match u.and_then(|t| t.signs.get(i)) {
            Some(Sign::Plus) => full.iter().copied().filter(|l| !l.barred).collect(),
            Some(Sign::Minus) => full.iter().copied().filter(|l| l.barred).collect(),
            None => full.clone(),
        })
        .collect();
    let bad_type = u.is_some_and(|t| t.len() != r);
    let bad_weight = weight.is_some_and(|w| w.n() != n);
    WordIter { n, done: bad_type || bad_weight || choices.iter().any(Vec::is_empty), idx: vec![0; r], choices, weight: weight.cloned() }
}
