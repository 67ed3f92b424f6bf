//! Morphisms of free monoids, substitutions and their incidence matrices.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::linalg::IntegerMatrix;
use crate::words::{check_alphabet, complexity, same_alphabet, Alphabet, Letter, Word};

/// A map from the letters of `domain` to non-empty words over `codomain`,
/// extended to words by concatenation.
#[derive(Clone)]
pub struct Morphism {
    domain: Arc<Alphabet>,
    codomain: Arc<Alphabet>,
    images: Vec<Vec<Letter>>,
}

impl Morphism {
    pub fn new(domain: Arc<Alphabet>, codomain: Arc<Alphabet>, images: Vec<Word>) -> Result<Self> {
        if images.len() != domain.len() {
            return Err(Error::Dimension(format!(
                "{} images for an alphabet of {} letters",
                images.len(),
                domain.len()
            )));
        }
        let mut raw = Vec::with_capacity(images.len());
        for (letter, img) in domain.letters().zip(images) {
            check_alphabet(&codomain, img.alphabet())?;
            if img.is_empty() {
                return Err(Error::EmptyImage(domain.token(letter).to_string()));
            }
            raw.push(img.into_letters());
        }
        Ok(Self { domain, codomain, images: raw })
    }

    pub(crate) fn from_raw(
        domain: Arc<Alphabet>,
        codomain: Arc<Alphabet>,
        images: Vec<Vec<Letter>>,
    ) -> Self {
        debug_assert_eq!(images.len(), domain.len());
        debug_assert!(images.iter().all(|w| !w.is_empty()));
        Self { domain, codomain, images }
    }

    /// Endomorphism of a compact alphabet from `(letter, image)` strings,
    /// e.g. `Morphism::from_pairs(&[("a", "ab"), ("b", "a")])`.
    pub fn from_pairs(pairs: &[(&str, &str)]) -> Result<Self> {
        let alphabet = Alphabet::new(pairs.iter().map(|(l, _)| *l))?;
        let images = pairs
            .iter()
            .map(|(_, img)| alphabet.parse_word(img))
            .collect::<Result<Vec<_>>>()?;
        Self::new(Arc::clone(&alphabet), alphabet, images)
    }

    pub fn identity(alphabet: Arc<Alphabet>) -> Self {
        let images = alphabet.letters().map(|l| vec![l]).collect();
        Self { domain: Arc::clone(&alphabet), codomain: alphabet, images }
    }

    pub fn domain(&self) -> &Arc<Alphabet> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<Alphabet> {
        &self.codomain
    }

    pub fn is_endomorphism(&self) -> bool {
        same_alphabet(&self.domain, &self.codomain)
    }

    pub fn image(&self, letter: Letter) -> Word {
        Word::from_raw(Arc::clone(&self.codomain), self.images[letter as usize].clone())
    }

    pub(crate) fn image_raw(&self, letter: Letter) -> &[Letter] {
        &self.images[letter as usize]
    }

    pub fn image_len(&self, letter: Letter) -> usize {
        self.images[letter as usize].len()
    }

    pub fn images(&self) -> impl Iterator<Item = Word> + '_ {
        self.domain.letters().map(|l| self.image(l))
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        check_alphabet(&self.domain, w.alphabet())?;
        Ok(Word::from_raw(Arc::clone(&self.codomain), self.apply_raw(w.letters())))
    }

    pub(crate) fn apply_raw(&self, w: &[Letter]) -> Vec<Letter> {
        let len = w.iter().map(|&c| self.images[c as usize].len()).sum();
        let mut out = Vec::with_capacity(len);
        for &c in w {
            out.extend_from_slice(&self.images[c as usize]);
        }
        out
    }

    /// `self ∘ inner`: first `inner`, then `self`.
    pub fn compose(&self, inner: &Morphism) -> Result<Morphism> {
        check_alphabet(&self.domain, &inner.codomain)?;
        let images = inner.images.iter().map(|w| self.apply_raw(w)).collect();
        Ok(Morphism::from_raw(Arc::clone(&inner.domain), Arc::clone(&self.codomain), images))
    }

    pub fn power(&self, k: usize) -> Result<Morphism> {
        if !self.is_endomorphism() {
            return Err(Error::NotEndomorphism);
        }
        let mut out = Morphism::identity(Arc::clone(&self.domain));
        for _ in 0..k {
            out = self.compose(&out)?;
        }
        Ok(out)
    }

    /// Entry `(i, j)` counts occurrences of letter `i` in the image of `j`.
    pub fn incidence_matrix(&self) -> IntegerMatrix {
        let mut m = IntegerMatrix::zeros(self.codomain.len(), self.domain.len());
        for (j, img) in self.images.iter().enumerate() {
            for &i in img {
                m[(i as usize, j)] += 1;
            }
        }
        m
    }

    /// Vector of image lengths indexed by domain letter.
    pub fn lengths(&self) -> Vec<BigInt> {
        self.images.iter().map(|w| BigInt::from(w.len())).collect()
    }
}

impl PartialEq for Morphism {
    fn eq(&self, other: &Self) -> bool {
        same_alphabet(&self.domain, &other.domain)
            && same_alphabet(&self.codomain, &other.codomain)
            && self.images == other.images
    }
}

impl Eq for Morphism {}

impl fmt::Display for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.domain.letters().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{} -> {}", self.domain.token(l), self.image(l))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Morphism({self})")
    }
}

/// An endomorphism together with a seed letter whose image begins with it.
#[derive(Clone, PartialEq, Eq)]
pub struct Substitution {
    morphism: Morphism,
    seed: Letter,
    primitive: bool,
}

impl Substitution {
    /// Uses the smallest letter `a` (alphabet order) with `σ(a)` beginning
    /// with `a`. Fails with [`Error::NoSeed`] when there is none.
    pub fn new(morphism: Morphism) -> Result<Self> {
        if !morphism.is_endomorphism() {
            return Err(Error::NotEndomorphism);
        }
        let seed = morphism
            .domain
            .letters()
            .find(|&a| morphism.images[a as usize][0] == a)
            .ok_or(Error::NoSeed(1))?;
        Ok(Self::with_seed_unchecked(morphism, seed))
    }

    pub fn with_seed(morphism: Morphism, seed: Letter) -> Result<Self> {
        if !morphism.is_endomorphism() {
            return Err(Error::NotEndomorphism);
        }
        if seed as usize >= morphism.domain.len() || morphism.images[seed as usize][0] != seed {
            return Err(Error::NoSeed(1));
        }
        Ok(Self::with_seed_unchecked(morphism, seed))
    }

    fn with_seed_unchecked(morphism: Morphism, seed: Letter) -> Self {
        let primitive = is_primitive_matrix(&morphism.incidence_matrix());
        Self { morphism, seed, primitive }
    }

    /// Replaces the morphism by its smallest power `k ≤ d` that admits a
    /// seed letter and returns that power along with the substitution.
    pub fn seeded(morphism: Morphism) -> Result<(Self, usize)> {
        if !morphism.is_endomorphism() {
            return Err(Error::NotEndomorphism);
        }
        let d = morphism.domain.len();
        let mut power = morphism.clone();
        for k in 1..=d {
            if let Ok(s) = Self::new(power.clone()) {
                return Ok((s, k));
            }
            power = morphism.compose(&power)?;
        }
        Err(Error::NoSeed(d))
    }

    pub fn from_pairs(pairs: &[(&str, &str)]) -> Result<Self> {
        Self::new(Morphism::from_pairs(pairs)?)
    }

    pub fn morphism(&self) -> &Morphism {
        &self.morphism
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.morphism.domain
    }

    pub fn seed(&self) -> Letter {
        self.seed
    }

    pub fn is_primitive(&self) -> bool {
        self.primitive
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        self.morphism.apply(w)
    }

    pub fn incidence_matrix(&self) -> IntegerMatrix {
        self.morphism.incidence_matrix()
    }

    /// `σ^k`, keeping the seed (σ(a) begins with a implies σ^k(a) does too).
    pub fn power(&self, k: usize) -> Result<Substitution> {
        if k == 0 {
            return Err(Error::InvalidArgument("power must be at least 1".into()));
        }
        Ok(Self::with_seed_unchecked(self.morphism.power(k)?, self.seed))
    }

    /// The letter every image begins with, if there is one.
    pub fn proper_letter(&self) -> Option<Letter> {
        let first = self.morphism.images[0][0];
        self.morphism.images.iter().all(|w| w[0] == first).then_some(first)
    }

    pub fn is_proper(&self) -> bool {
        self.proper_letter().is_some()
    }

    /// Common image length, if all images have the same length.
    pub fn constant_length(&self) -> Option<usize> {
        let l = self.morphism.images[0].len();
        self.morphism.images.iter().all(|w| w.len() == l).then_some(l)
    }

    /// A prefix of the fixed point starting with the seed, of length at
    /// least `n`, obtained by iterating on the seed.
    pub fn fixed_point_prefix(&self, n: usize) -> Result<Word> {
        if !self.primitive {
            return Err(Error::NotPrimitive);
        }
        if self.morphism.images.iter().all(|w| w.len() == 1) {
            return Err(Error::NoGrowth);
        }
        let mut w = vec![self.seed];
        while w.len() < n.max(1) {
            let next = self.morphism.apply_raw(&w);
            if next.len() == w.len() {
                return Err(Error::NoGrowth);
            }
            w = next;
        }
        Ok(Word::from_raw(Arc::clone(self.alphabet()), w))
    }

    /// Heuristic periodicity test on fixed-point prefixes.
    pub fn periodicity_probe(&self, horizon: usize) -> Result<Periodicity> {
        let horizon = horizon.max(1);
        let long = self.fixed_point_prefix(16 * horizon)?;
        let window = &long.letters()[..4 * horizon];
        let repeats = |p: usize| window.iter().skip(p).zip(window).all(|(a, b)| a == b);
        if let Some(p) = (1..=horizon).find(|&p| repeats(p)) {
            if complexity(&long, p)? <= p {
                return Ok(Periodicity::Periodic { period: long.prefix(p) });
            }
        }
        let mut depth = 0;
        for n in 1..=horizon {
            if complexity(&long, n)? > n {
                depth = n;
            } else {
                break;
            }
        }
        Ok(Periodicity::AperiodicEvidence { depth, prefix_len: long.len() })
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.morphism.fmt(f)
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Substitution({self}; seed {})", self.alphabet().token(self.seed))
    }
}

/// Outcome of [`Substitution::periodicity_probe`]. Only the periodic
/// outcome is a proof; the other is evidence on finite prefixes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Periodicity {
    Periodic { period: Word },
    /// `p(n) ≥ n + 1` verified for every `n ≤ depth` on a prefix of
    /// length `prefix_len`.
    AperiodicEvidence { depth: usize, prefix_len: usize },
}

impl Periodicity {
    pub fn is_periodic(&self) -> bool {
        matches!(self, Periodicity::Periodic { .. })
    }
}

impl fmt::Display for Periodicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Periodicity::Periodic { period } => write!(f, "periodic (period word {period})"),
            Periodicity::AperiodicEvidence { depth, prefix_len } => write!(
                f,
                "aperiodic evidence (p(n) >= n+1 for n <= {depth} on a prefix of length {prefix_len}; not a proof)"
            ),
        }
    }
}

/// Primitivity of a square non-negative matrix: `M^k > 0` for
/// `k = (d−1)² + 1` (Wielandt's bound).
pub fn is_primitive_matrix(m: &IntegerMatrix) -> bool {
    if !m.is_square() || m.rows() == 0 {
        return false;
    }
    let d = m.rows();
    // Boolean powers are enough; entries only matter as zero / non-zero.
    let support: Vec<Vec<bool>> =
        (0..d).map(|i| (0..d).map(|j| m[(i, j)] != BigInt::from(0)).collect()).collect();
    let k = (d - 1) * (d - 1) + 1;
    let mut acc = support.clone();
    for _ in 1..k {
        acc = bool_mul(&acc, &support);
    }
    acc.iter().all(|r| r.iter().all(|&x| x))
}

fn bool_mul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let d = a.len();
    (0..d)
        .map(|i| (0..d).map(|j| (0..d).any(|k| a[i][k] && b[k][j])).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex() -> Substitution {
        Substitution::from_pairs(&[("a", "aba"), ("b", "baab")]).unwrap()
    }

    fn fib() -> Substitution {
        Substitution::from_pairs(&[("a", "ab"), ("b", "a")]).unwrap()
    }

    fn tm() -> Substitution {
        Substitution::from_pairs(&[("0", "01"), ("1", "10")]).unwrap()
    }

    fn per() -> Substitution {
        Substitution::from_pairs(&[("a", "ab"), ("b", "ab")]).unwrap()
    }

    #[test]
    fn apply_examples() {
        let s = ex();
        let ab = s.alphabet().parse_word("ab").unwrap();
        assert_eq!(s.apply(&ab).unwrap().to_string(), "ababaab");
        let empty = Word::empty(s.alphabet().clone());
        assert!(s.apply(&empty).unwrap().is_empty());
        let f = fib();
        let aba = f.alphabet().parse_word("aba").unwrap();
        assert_eq!(f.apply(&aba).unwrap().to_string(), "abaab");
    }

    #[test]
    fn compose_examples() {
        let f = fib().morphism().clone();
        let ff = f.compose(&f).unwrap();
        assert_eq!(ff.image(0).to_string(), "aba");
        assert_eq!(ff.image(1).to_string(), "ab");
        let id = Morphism::identity(f.domain().clone());
        assert_eq!(id.compose(&f).unwrap(), f);
        let e = ex().morphism().clone();
        let m = e.incidence_matrix();
        assert_eq!(m, IntegerMatrix::from_rows(&[[2, 2], [1, 2]]));
        assert_eq!(e.compose(&e).unwrap().incidence_matrix(), m.mul(&m).unwrap());
    }

    #[test]
    fn incidence_examples() {
        let id = Morphism::identity(Alphabet::from_chars("xyz").unwrap());
        assert_eq!(id.incidence_matrix(), IntegerMatrix::identity(3));
    }

    #[test]
    fn primitivity() {
        assert!(fib().is_primitive());
        assert!(ex().is_primitive());
        let red = Substitution::from_pairs(&[("a", "ab"), ("b", "b")]).unwrap();
        assert!(!red.is_primitive());
    }

    #[test]
    fn properness_and_constant_length() {
        assert_eq!(fib().proper_letter(), Some(0));
        assert_eq!(ex().proper_letter(), None);
        assert_eq!(tm().proper_letter(), None);
        assert_eq!(tm().constant_length(), Some(2));
        assert_eq!(ex().constant_length(), None);
        let s = Substitution::from_pairs(&[("a", "abc"), ("b", "bca"), ("c", "cab")]).unwrap();
        assert_eq!(s.constant_length(), Some(3));
    }

    #[test]
    fn fixed_point_examples() {
        assert_eq!(ex().fixed_point_prefix(10).unwrap().prefix(10).to_string(), "ababaababa");
        assert_eq!(fib().fixed_point_prefix(8).unwrap().prefix(8).to_string(), "abaababa");
        assert_eq!(per().fixed_point_prefix(6).unwrap().prefix(6).to_string(), "ababab");
        let red = Substitution::from_pairs(&[("a", "ab"), ("b", "b")]).unwrap();
        assert_eq!(red.fixed_point_prefix(4), Err(Error::NotPrimitive));
    }

    #[test]
    fn seed_policy() {
        // Both letters qualify; the first in alphabet order wins.
        let s = Substitution::from_pairs(&[("a", "ab"), ("b", "ba")]).unwrap();
        assert_eq!(s.seed(), 0);
        // No seed until the square: a -> b..., b -> a...
        let m = Morphism::from_pairs(&[("a", "ba"), ("b", "ab")]).unwrap();
        assert_eq!(Substitution::new(m.clone()), Err(Error::NoSeed(1)));
        let (s, k) = Substitution::seeded(m).unwrap();
        assert_eq!(k, 2);
        assert_eq!(s.morphism().image(0).to_string(), "abba");
    }

    #[test]
    fn periodicity_examples() {
        match per().periodicity_probe(8).unwrap() {
            Periodicity::Periodic { period } => assert_eq!(period.to_string(), "ab"),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(
            fib().periodicity_probe(30).unwrap(),
            Periodicity::AperiodicEvidence { depth: 30, prefix_len: fib().fixed_point_prefix(480).unwrap().len() }
        );
        assert!(!ex().periodicity_probe(32).unwrap().is_periodic());
    }
}
