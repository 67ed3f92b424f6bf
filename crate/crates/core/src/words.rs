//! Finite words over explicit alphabets.
//!
//! Letters are opaque tokens (`a`, `0`, `(1,2)`, ...). A [`Word`] stores
//! indices into a shared [`Alphabet`], so mixing words over different
//! alphabets is caught at run time instead of producing garbage.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Index of a letter inside its alphabet.
pub type Letter = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    tokens: Vec<String>,
    index: HashMap<String, Letter>,
}

impl Alphabet {
    pub fn new<I, S>(tokens: I) -> Result<Arc<Self>>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        if tokens.is_empty() {
            return Err(Error::InvalidAlphabet("alphabet is empty".into()));
        }
        let mut index = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            if t.is_empty() || t.chars().any(char::is_whitespace) {
                return Err(Error::InvalidAlphabet(format!("invalid token `{t}`")));
            }
            if index.insert(t.clone(), i as Letter).is_some() {
                return Err(Error::InvalidAlphabet(format!("duplicate letter `{t}`")));
            }
        }
        Ok(Arc::new(Self { tokens, index }))
    }

    /// One letter per character, e.g. `Alphabet::from_chars("ab")`.
    pub fn from_chars(letters: &str) -> Result<Arc<Self>> {
        Self::new(letters.chars().map(String::from))
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn token(&self, letter: Letter) -> &str {
        &self.tokens[letter as usize]
    }

    pub fn letter(&self, token: &str) -> Option<Letter> {
        self.index.get(token).copied()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        0..self.tokens.len() as Letter
    }

    /// True when every token is a single character, so words can be
    /// written without separators.
    pub fn is_compact(&self) -> bool {
        self.tokens.iter().all(|t| t.chars().count() == 1)
    }

    /// Parses a word. Whitespace-separated input is read token by token;
    /// otherwise a compact alphabet reads one letter per character.
    pub fn parse_word(self: &Arc<Self>, text: &str) -> Result<Word> {
        let text = text.trim();
        let symbols = if text.chars().any(char::is_whitespace) || !self.is_compact() {
            text.split_whitespace()
                .map(|t| self.letter(t).ok_or_else(|| Error::UnknownLetter(t.to_string())))
                .collect::<Result<Vec<_>>>()?
        } else {
            text.chars()
                .map(|c| {
                    let t = c.to_string();
                    self.letter(&t).ok_or(Error::UnknownLetter(t))
                })
                .collect::<Result<Vec<_>>>()?
        };
        Ok(Word { alphabet: Arc::clone(self), symbols })
    }

    pub(crate) fn describe(&self) -> String {
        format!("{{{}}}", self.tokens.join(","))
    }
}

pub(crate) fn same_alphabet(a: &Arc<Alphabet>, b: &Arc<Alphabet>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

pub(crate) fn check_alphabet(expected: &Arc<Alphabet>, found: &Arc<Alphabet>) -> Result<()> {
    if same_alphabet(expected, found) {
        Ok(())
    } else {
        Err(Error::AlphabetMismatch { expected: expected.describe(), found: found.describe() })
    }
}

/// A finite word. Equality and ordering look at the letters and the
/// alphabet contents.
#[derive(Clone)]
pub struct Word {
    alphabet: Arc<Alphabet>,
    symbols: Vec<Letter>,
}

impl Word {
    pub fn new(alphabet: Arc<Alphabet>, symbols: Vec<Letter>) -> Result<Self> {
        if let Some(&bad) = symbols.iter().find(|&&s| s as usize >= alphabet.len()) {
            return Err(Error::UnknownLetter(format!("#{bad}")));
        }
        Ok(Self { alphabet, symbols })
    }

    pub(crate) fn from_raw(alphabet: Arc<Alphabet>, symbols: Vec<Letter>) -> Self {
        debug_assert!(symbols.iter().all(|&s| (s as usize) < alphabet.len()));
        Self { alphabet, symbols }
    }

    pub fn empty(alphabet: Arc<Alphabet>) -> Self {
        Self { alphabet, symbols: Vec::new() }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn letters(&self) -> &[Letter] {
        &self.symbols
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.symbols.first().copied()
    }

    /// The factor `w[start..end)`.
    pub fn factor(&self, start: usize, end: usize) -> Word {
        Word::from_raw(Arc::clone(&self.alphabet), self.symbols[start..end].to_vec())
    }

    pub fn prefix(&self, n: usize) -> Word {
        self.factor(0, n.min(self.len()))
    }

    pub fn concat(&self, other: &Word) -> Result<Word> {
        check_alphabet(&self.alphabet, &other.alphabet)?;
        let mut symbols = self.symbols.clone();
        symbols.extend_from_slice(&other.symbols);
        Ok(Word::from_raw(Arc::clone(&self.alphabet), symbols))
    }

    pub fn repeat(&self, k: usize) -> Word {
        Word::from_raw(Arc::clone(&self.alphabet), self.symbols.repeat(k))
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        same_alphabet(&self.alphabet, &other.alphabet) && other.symbols.starts_with(&self.symbols)
    }

    pub fn count(&self, letter: Letter) -> usize {
        self.symbols.iter().filter(|&&s| s == letter).count()
    }
}

impl PartialEq for Word {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols && same_alphabet(&self.alphabet, &other.alphabet)
    }
}

impl Eq for Word {}

impl Hash for Word {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.symbols.hash(state);
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.symbols.cmp(&other.symbols)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.alphabet.is_compact() { "" } else { " " };
        for (i, &s) in self.symbols.iter().enumerate() {
            if i > 0 {
                f.write_str(sep)?;
            }
            f.write_str(self.alphabet.token(s))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word(\"{self}\")")
    }
}

/// Start indices of every occurrence of `needle` in `hay`, ascending.
pub(crate) fn occurrences_raw(needle: &[Letter], hay: &[Letter]) -> Vec<usize> {
    if needle.is_empty() || needle.len() > hay.len() {
        return Vec::new();
    }
    hay.windows(needle.len())
        .enumerate()
        .filter_map(|(i, w)| (w == needle).then_some(i))
        .collect()
}

/// Every `i` with `w[i, i+|u|) = u`, in increasing order.
pub fn occurrences(u: &Word, w: &Word) -> Result<Vec<usize>> {
    check_alphabet(w.alphabet(), u.alphabet())?;
    if u.is_empty() {
        return Err(Error::EmptyWord);
    }
    Ok(occurrences_raw(u.letters(), w.letters()))
}

/// Groups the start positions of all length-`n` factors of `w`.
pub(crate) fn factor_positions(w: &[Letter], n: usize) -> HashMap<&[Letter], Vec<usize>> {
    let mut map: HashMap<&[Letter], Vec<usize>> = HashMap::new();
    if n == 0 || n > w.len() {
        return map;
    }
    for (i, f) in w.windows(n).enumerate() {
        map.entry(f).or_default().push(i);
    }
    map
}

/// Number of distinct length-`n` factors of `w`.
pub fn complexity(w: &Word, n: usize) -> Result<usize> {
    if n > w.len() {
        return Err(Error::FactorTooLong { n, len: w.len() });
    }
    if n == 0 {
        return Ok(1);
    }
    let set: std::collections::HashSet<&[Letter]> = w.letters().windows(n).collect();
    Ok(set.len())
}

/// All distinct factors of length `n`; the complexity `p(n)` is the
/// size of the returned set.
pub fn factor_set(w: &Word, n: usize) -> Result<BTreeSet<Word>> {
    if n > w.len() {
        return Err(Error::FactorTooLong { n, len: w.len() });
    }
    if n == 0 {
        return Ok(BTreeSet::from([Word::empty(Arc::clone(w.alphabet()))]));
    }
    Ok(w.letters()
        .windows(n)
        .map(|f| Word::from_raw(Arc::clone(w.alphabet()), f.to_vec()))
        .collect())
}

/// Largest `k` such that `u^k` is a factor of `w` (0 when `u` is absent).
pub fn max_power(u: &Word, w: &Word) -> Result<usize> {
    let occ = occurrences(u, w)?;
    Ok(max_power_raw(u.len(), &occ, w.len()))
}

fn max_power_raw(period: usize, occ: &[usize], len: usize) -> usize {
    let mut is_occ = vec![false; len + 1];
    for &i in occ {
        is_occ[i] = true;
    }
    // run[i] = number of back-to-back copies of u starting at i
    let mut run = vec![0usize; len + period + 1];
    let mut best = 0;
    for i in (0..len).rev() {
        if is_occ[i] {
            run[i] = 1 + run[i + period];
            best = best.max(run[i]);
        }
    }
    best
}
