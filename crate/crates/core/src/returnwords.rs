//! Return words, the coding morphism `Θ`, derived substitutions and the
//! recodings `λ` between nested anchors.
//!
//! A return word to `u` is a word `w` such that `wu` is a factor, `u` is a
//! prefix of `wu` and `u` occurs exactly twice in `wu`. Return words are
//! numbered `1, 2, …` in order of first appearance.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::morphism::{Morphism, Substitution};
use crate::words::{check_alphabet, occurrences_raw, Alphabet, Letter, Word};

/// Largest expansion tried when seeding the closure.
const MAX_SEED_LEN: usize = 1 << 22;
/// Largest number of return words the closure accepts before giving up.
const MAX_RETURN_WORDS: usize = 1 << 16;

/// Return words to an anchor, their coding morphism and optionally the
/// coding of the scanned span.
#[derive(Debug, Clone)]
pub struct ReturnCoding {
    anchor: Word,
    theta: Morphism,
    derived_word: Option<Word>,
    certified: bool,
    lookup: HashMap<Vec<Letter>, Letter>,
}

impl ReturnCoding {
    fn from_words(anchor: Word, words: Vec<Vec<Letter>>, certified: bool) -> Result<Self> {
        let base = Arc::clone(anchor.alphabet());
        let codes = index_alphabet(words.len())?;
        let lookup = words.iter().enumerate().map(|(i, w)| (w.clone(), i as Letter)).collect();
        let theta = Morphism::from_raw(codes, base, words);
        Ok(Self { anchor, theta, derived_word: None, certified, lookup })
    }

    pub fn anchor(&self) -> &Word {
        &self.anchor
    }

    /// `Θ`, from the index alphabet `{1, …, n}` to the base alphabet.
    pub fn theta(&self) -> &Morphism {
        &self.theta
    }

    /// The index alphabet `R_u`.
    pub fn codes(&self) -> &Arc<Alphabet> {
        self.theta.domain()
    }

    pub fn len(&self) -> usize {
        self.theta.domain().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn return_word(&self, index: Letter) -> Word {
        self.theta.image(index)
    }

    pub fn return_words(&self) -> Vec<Word> {
        self.theta.images().collect()
    }

    pub fn derived_word(&self) -> Option<&Word> {
        self.derived_word.as_ref()
    }

    /// Whether the set is known to be complete. Prefix scans never are.
    pub fn is_certified(&self) -> bool {
        self.certified
    }

    pub fn min_return_len(&self) -> usize {
        self.theta.domain().letters().map(|j| self.theta.image_len(j)).min().unwrap_or(0)
    }

    pub fn max_return_len(&self) -> usize {
        self.theta.domain().letters().map(|j| self.theta.image_len(j)).max().unwrap_or(0)
    }

    /// Index of a return word, if it belongs to the set.
    pub fn index_of(&self, w: &[Letter]) -> Option<Letter> {
        self.lookup.get(w).copied()
    }

    /// Splits `w` (which must begin with the anchor and be followed by it)
    /// into return words to the anchor and codes them.
    pub fn decompose(&self, w: &Word) -> Result<Word> {
        check_alphabet(self.anchor.alphabet(), w.alphabet())?;
        let pieces = split_on_anchor(w.letters(), self.anchor.letters());
        let codes = pieces
            .into_iter()
            .map(|piece| {
                piece.and_then(|p| self.index_of(p)).ok_or_else(|| Error::Decomposition {
                    word: w.to_string(),
                    anchor: self.anchor.to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Word::from_raw(Arc::clone(self.codes()), codes))
    }
}

/// Splits `w` at the occurrences of `anchor` inside `w·anchor` that start
/// before `|w|`. Yields `None` for a leading chunk that does not start with
/// the anchor.
fn split_on_anchor<'a>(w: &'a [Letter], anchor: &[Letter]) -> Vec<Option<&'a [Letter]>> {
    let mut extended = w.to_vec();
    extended.extend_from_slice(anchor);
    let mut cuts: Vec<usize> =
        occurrences_raw(anchor, &extended).into_iter().filter(|&i| i <= w.len()).collect();
    let bad_start = cuts.first() != Some(&0) && !w.is_empty();
    if bad_start {
        cuts.insert(0, 0);
    }
    cuts.windows(2)
        .enumerate()
        .map(|(i, c)| if i == 0 && bad_start { None } else { Some(&w[c[0]..c[1]]) })
        .collect()
}

/// Alphabet `{1, …, n}` used to index return words.
pub(crate) fn index_alphabet(n: usize) -> Result<Arc<Alphabet>> {
    Alphabet::new((1..=n).map(|i| i.to_string()))
}

/// Return words to `u` observed between consecutive occurrences of `u` in
/// `prefix`. The result is not certified: a short prefix may miss some.
pub fn return_words_in_prefix(prefix: &Word, u: &Word) -> Result<ReturnCoding> {
    check_alphabet(prefix.alphabet(), u.alphabet())?;
    if u.is_empty() {
        return Err(Error::EmptyWord);
    }
    if !u.is_prefix_of(prefix) {
        return Err(Error::AnchorNotPrefix { anchor: u.to_string() });
    }
    let occ = occurrences_raw(u.letters(), prefix.letters());
    if occ.len() < 2 {
        return Err(Error::AnchorNotRecurrent(u.to_string()));
    }
    let mut words: Vec<Vec<Letter>> = Vec::new();
    let mut seen: HashMap<&[Letter], Letter> = HashMap::new();
    let mut coding = Vec::with_capacity(occ.len() - 1);
    for pair in occ.windows(2) {
        let piece = &prefix.letters()[pair[0]..pair[1]];
        let idx = *seen.entry(piece).or_insert_with(|| {
            words.push(piece.to_vec());
            (words.len() - 1) as Letter
        });
        coding.push(idx);
    }
    let mut rc = ReturnCoding::from_words(u.clone(), words, false)?;
    rc.derived_word = Some(Word::from_raw(Arc::clone(rc.codes()), coding));
    Ok(rc)
}

/// A complete return-word coding for a seed letter together with the
/// derived substitution `τ` satisfying `σ∘Θ = Θ∘τ`.
#[derive(Debug, Clone)]
pub struct DerivedSubstitution {
    coding: ReturnCoding,
    tau: Substitution,
}

impl DerivedSubstitution {
    pub fn coding(&self) -> &ReturnCoding {
        &self.coding
    }

    pub fn theta(&self) -> &Morphism {
        self.coding.theta()
    }

    pub fn tau(&self) -> &Substitution {
        &self.tau
    }

    /// Whether every `τ(j)` begins with the letter `1`.
    pub fn tau_is_proper(&self) -> bool {
        self.tau.proper_letter() == Some(0)
    }

    /// Re-checks `σ∘Θ = Θ∘τ` letter by letter.
    pub fn verify(&self, sigma: &Substitution) -> Result<()> {
        verify_conjugacy(sigma.morphism(), self.coding.theta(), self.tau.morphism())
    }
}

/// Checks `outer∘Θ = Θ∘inner` on every letter.
pub(crate) fn verify_conjugacy(outer: &Morphism, theta: &Morphism, inner: &Morphism) -> Result<()> {
    let left = outer.compose(theta)?;
    let right = theta.compose(inner)?;
    if left == right {
        Ok(())
    } else {
        Err(Error::Certificate(format!("σΘ = Θτ fails: σΘ = [{left}], Θτ = [{right}]")))
    }
}

/// The complete set of return words to the seed letter `a` of `σ`, with
/// the derived substitution `τ`.
///
/// Seeds from the return words visible in `σ^m(a)` (smallest `m` where `a`
/// recurs), then closes the set under "decompose `σ(Θ(j))`". Indices are
/// assigned by first appearance in the fixed point, read off the fixed
/// point of `τ`. The result carries the checked identity `σΘ = Θτ`.
pub fn return_words_closure(sigma: &Substitution) -> Result<DerivedSubstitution> {
    if !sigma.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    let a = sigma.seed();
    let morphism = sigma.morphism();
    let anchor = [a];

    let mut expansion = vec![a];
    while expansion.iter().filter(|&&c| c == a).count() < 2 {
        let next = morphism.apply_raw(&expansion);
        if next.len() == expansion.len() || next.len() > MAX_SEED_LEN {
            return Err(Error::AnchorNotRecurrent(sigma.alphabet().token(a).to_string()));
        }
        expansion = next;
    }
    let occ = occurrences_raw(&anchor, &expansion);

    let mut words: Vec<Vec<Letter>> = Vec::new();
    let mut index: HashMap<Vec<Letter>, usize> = HashMap::new();
    let mut push = |w: &[Letter], words: &mut Vec<Vec<Letter>>| -> usize {
        if let Some(&i) = index.get(w) {
            return i;
        }
        words.push(w.to_vec());
        index.insert(w.to_vec(), words.len() - 1);
        words.len() - 1
    };
    for pair in occ.windows(2) {
        push(&expansion[pair[0]..pair[1]], &mut words);
    }
    let first = 0usize;

    // images[j] = coding of σ(Θ(j)) under the provisional numbering
    let mut images: Vec<Vec<usize>> = Vec::new();
    let mut cursor = 0;
    while cursor < words.len() {
        let img = morphism.apply_raw(&words[cursor]);
        let mut coded = Vec::new();
        for piece in split_on_anchor(&img, &anchor) {
            let piece = piece.ok_or_else(|| Error::Decomposition {
                word: Word::from_raw(Arc::clone(sigma.alphabet()), img.clone()).to_string(),
                anchor: sigma.alphabet().token(a).to_string(),
            })?;
            coded.push(push(piece, &mut words));
        }
        images.push(coded);
        cursor += 1;
        if words.len() > MAX_RETURN_WORDS {
            return Err(Error::Certificate("return-word closure did not terminate".into()));
        }
    }

    // First appearance order along the fixed point of τ started at the
    // first return word of x.
    let n = words.len();
    let mut order: Vec<usize> = vec![first];
    let mut rank: Vec<Option<usize>> = vec![None; n];
    rank[first] = Some(0);
    let mut y = vec![first];
    while order.len() < n {
        let mut next = Vec::new();
        for &j in &y {
            next.extend_from_slice(&images[j]);
        }
        if next.len() <= y.len() && next == y {
            break;
        }
        for &j in &next {
            if rank[j].is_none() {
                rank[j] = Some(order.len());
                order.push(j);
            }
        }
        if next.len() > MAX_SEED_LEN {
            break;
        }
        y = next;
    }
    if order.len() < n {
        return Err(Error::Certificate(format!(
            "only {} of {} return words are reachable from the first one under τ",
            order.len(),
            n
        )));
    }

    let ordered_words: Vec<Vec<Letter>> = order.iter().map(|&j| words[j].clone()).collect();
    let anchor_word = Word::from_raw(Arc::clone(sigma.alphabet()), anchor.to_vec());
    let mut coding = ReturnCoding::from_words(anchor_word, ordered_words, true)?;
    let tau_images: Vec<Vec<Letter>> = order
        .iter()
        .map(|&j| images[j].iter().map(|&k| rank[k].expect("ranked") as Letter).collect())
        .collect();
    let codes = Arc::clone(coding.codes());
    let tau_morphism = Morphism::from_raw(Arc::clone(&codes), Arc::clone(&codes), tau_images);
    let tau = Substitution::with_seed(tau_morphism, 0).map_err(|_| {
        Error::Certificate("τ(1) does not begin with 1".into())
    })?;
    let y_prefix: Vec<Letter> = y.iter().map(|&j| rank[j].expect("ranked") as Letter).collect();
    coding.derived_word = Some(Word::from_raw(codes, y_prefix));

    let derived = DerivedSubstitution { coding, tau };
    derived.verify(sigma)?;
    Ok(derived)
}

/// `λ : R_u → R_v*` with `Θ_v∘λ = Θ_u`, for an anchor `v` that is a prefix
/// of `u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recoding {
    lambda: Morphism,
}

impl Recoding {
    pub fn lambda(&self) -> &Morphism {
        &self.lambda
    }
}

/// Decomposes each return word to `u` over the return words to `v`.
pub fn derived_recoding(c_u: &ReturnCoding, c_v: &ReturnCoding) -> Result<Recoding> {
    check_alphabet(c_u.anchor.alphabet(), c_v.anchor.alphabet())?;
    if c_v.anchor.is_empty() || !c_v.anchor.is_prefix_of(&c_u.anchor) {
        return Err(Error::AnchorNotPrefix { anchor: c_v.anchor.to_string() });
    }
    let images = c_u
        .codes()
        .letters()
        .map(|j| c_v.decompose(&c_u.return_word(j)).map(Word::into_letters))
        .collect::<Result<Vec<_>>>()?;
    if let Some(j) = images.iter().position(Vec::is_empty) {
        return Err(Error::Decomposition {
            word: c_u.return_word(j as Letter).to_string(),
            anchor: c_v.anchor.to_string(),
        });
    }
    let lambda = Morphism::from_raw(Arc::clone(c_u.codes()), Arc::clone(c_v.codes()), images);
    if c_v.theta.compose(&lambda)? != c_u.theta {
        return Err(Error::Certificate("Θ_v λ = Θ_u fails".into()));
    }
    Ok(Recoding { lambda })
}

/// The chain of recodings for anchors `u_n = x[0, α^n)`, `α = K²(K+1)`.
#[derive(Debug, Clone)]
pub struct SadicDecomposition {
    pub alpha: usize,
    /// Codings for `u_0, …, u_depth`; `Θ_0` is `λ_0`.
    pub codings: Vec<ReturnCoding>,
    /// `λ_1, …, λ_depth`.
    pub recodings: Vec<Recoding>,
    /// `λ_0 λ_1 ⋯ λ_depth(1)`.
    pub reconstruction: Word,
}

impl SadicDecomposition {
    /// `λ_0 ∘ λ_1 ∘ ⋯ ∘ λ_depth` as a single morphism.
    pub fn composite(&self) -> Result<Morphism> {
        let mut acc = self.codings[0].theta().clone();
        for r in &self.recodings {
            acc = acc.compose(r.lambda())?;
        }
        Ok(acc)
    }
}

/// Builds the recodings `λ_n : R_n → R_{n−1}*` between return-word codings
/// of the prefixes `u_n` of length `α^n` and checks that the composite
/// applied to `1` is a prefix of the input.
pub fn sadic_decomposition(prefix: &Word, k: usize, depth: usize) -> Result<SadicDecomposition> {
    if k == 0 {
        return Err(Error::InvalidArgument("K must be positive".into()));
    }
    let alpha = k
        .checked_mul(k)
        .and_then(|x| x.checked_mul(k + 1))
        .ok_or_else(|| Error::InvalidArgument("K too large".into()))?;
    let top = u32::try_from(depth)
        .ok()
        .and_then(|d| alpha.checked_pow(d))
        .ok_or_else(|| Error::InvalidArgument("α^depth overflows".into()))?;
    let need = top.saturating_mul(k + 1);
    if prefix.len() < need {
        return Err(Error::PrefixTooShort { have: prefix.len(), need });
    }
    let mut codings = Vec::with_capacity(depth + 1);
    let mut len = 1usize;
    for _ in 0..=depth {
        let coding = return_words_in_prefix(prefix, &prefix.prefix(len)).map_err(|e| match e {
            Error::AnchorNotRecurrent(_) => Error::PrefixTooShort { have: prefix.len(), need },
            other => other,
        })?;
        codings.push(coding);
        len = len.saturating_mul(alpha);
    }
    let recodings = codings
        .windows(2)
        .map(|pair| derived_recoding(&pair[1], &pair[0]))
        .collect::<Result<Vec<_>>>()?;
    let mut decomposition = SadicDecomposition {
        alpha,
        codings,
        recodings,
        reconstruction: Word::empty(Arc::clone(prefix.alphabet())),
    };
    let composite = decomposition.composite()?;
    let reconstruction = composite.image(0);
    if !reconstruction.is_prefix_of(prefix) {
        return Err(Error::Certificate(format!(
            "λ_0⋯λ_{depth}(1) = {reconstruction} is not a prefix of the input"
        )));
    }
    decomposition.reconstruction = reconstruction;
    Ok(decomposition)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words_of(c: &ReturnCoding) -> Vec<String> {
        c.return_words().iter().map(ToString::to_string).collect()
    }

    fn tau_images(d: &DerivedSubstitution) -> Vec<String> {
        d.tau().morphism().images().map(|w| w.to_string()).collect()
    }

    #[test]
    fn prefix_scan_examples() {
        let ex = Substitution::from_pairs(&[("a", "aba"), ("b", "baab")]).unwrap();
        let x = ex.fixed_point_prefix(40).unwrap();
        let a = x.prefix(1);
        let c = return_words_in_prefix(&x, &a).unwrap();
        assert_eq!(words_of(&c), ["ab", "a"]);
        assert!(!c.is_certified());

        let fib = Substitution::from_pairs(&[("a", "ab"), ("b", "a")]).unwrap();
        let x = fib.fixed_point_prefix(40).unwrap();
        let c = return_words_in_prefix(&x, &x.prefix(1)).unwrap();
        assert_eq!(words_of(&c), ["ab", "a"]);
        assert!(c.derived_word().unwrap().to_string().starts_with("12112"));

        let alpha = Alphabet::from_chars("ab").unwrap();
        let x = alpha.parse_word("ababab").unwrap();
        let c = return_words_in_prefix(&x, &alpha.parse_word("ab").unwrap()).unwrap();
        assert_eq!(words_of(&c), ["ab"]);
    }

    #[test]
    fn prefix_scan_errors() {
        let alpha = Alphabet::from_chars("ab").unwrap();
        let x = alpha.parse_word("abbb").unwrap();
        assert!(matches!(
            return_words_in_prefix(&x, &alpha.parse_word("a").unwrap()),
            Err(Error::AnchorNotRecurrent(_))
        ));
        assert!(matches!(
            return_words_in_prefix(&x, &alpha.parse_word("b").unwrap()),
            Err(Error::AnchorNotPrefix { .. })
        ));
    }

    #[test]
    fn closure_examples() {
        let ex = Substitution::from_pairs(&[("a", "aba"), ("b", "baab")]).unwrap();
        let d = return_words_closure(&ex).unwrap();
        assert_eq!(words_of(d.coding()), ["ab", "a"]);
        assert_eq!(tau_images(&d), ["1121", "12"]);
        assert!(d.coding().is_certified());
        assert!(d.tau_is_proper());

        let fib = Substitution::from_pairs(&[("a", "ab"), ("b", "a")]).unwrap();
        let d = return_words_closure(&fib).unwrap();
        assert_eq!(tau_images(&d), ["12", "1"]);

        let per = Substitution::from_pairs(&[("a", "ab"), ("b", "ab")]).unwrap();
        let d = return_words_closure(&per).unwrap();
        assert_eq!(words_of(d.coding()), ["ab"]);
        assert_eq!(tau_images(&d), ["11"]);
    }

    #[test]
    fn closure_thue_morse_needs_power_for_properness() {
        let tm = Substitution::from_pairs(&[("0", "01"), ("1", "10")]).unwrap();
        let d = return_words_closure(&tm).unwrap();
        assert_eq!(words_of(d.coding()), ["011", "01", "0"]);
        assert_eq!(tau_images(&d), ["123", "13", "2"]);
        assert!(!d.tau_is_proper());
    }

    #[test]
    fn closure_rejects_non_primitive() {
        let red = Substitution::from_pairs(&[("a", "ab"), ("b", "b")]).unwrap();
        assert!(matches!(return_words_closure(&red), Err(Error::NotPrimitive)));
    }

    #[test]
    fn recoding_examples() {
        let fib = Substitution::from_pairs(&[("a", "ab"), ("b", "a")]).unwrap();
        let x = fib.fixed_point_prefix(200).unwrap();
        let c_a = return_words_in_prefix(&x, &x.prefix(1)).unwrap();
        let c_ab = return_words_in_prefix(&x, &x.prefix(2)).unwrap();
        assert_eq!(words_of(&c_ab), ["aba", "ab"]);
        let r = derived_recoding(&c_ab, &c_a).unwrap();
        assert_eq!(r.lambda().image(0).to_string(), "12");
        assert_eq!(r.lambda().image(1).to_string(), "1");

        let id = derived_recoding(&c_a, &c_a).unwrap();
        assert_eq!(*id.lambda(), Morphism::identity(c_a.codes().clone()));

        let ex = Substitution::from_pairs(&[("a", "aba"), ("b", "baab")]).unwrap();
        let x = ex.fixed_point_prefix(500).unwrap();
        let c_a = return_words_in_prefix(&x, &x.prefix(1)).unwrap();
        let c_ab = return_words_in_prefix(&x, &x.prefix(2)).unwrap();
        let r = derived_recoding(&c_ab, &c_a).unwrap();
        assert_eq!(c_a.theta().compose(r.lambda()).unwrap(), *c_ab.theta());
    }

    #[test]
    fn recoding_requires_prefix_anchor() {
        let fib = Substitution::from_pairs(&[("a", "ab"), ("b", "a")]).unwrap();
        let x = fib.fixed_point_prefix(200).unwrap();
        let c_a = return_words_in_prefix(&x, &x.prefix(1)).unwrap();
        let c_ab = return_words_in_prefix(&x, &x.prefix(2)).unwrap();
        assert!(matches!(derived_recoding(&c_a, &c_ab), Err(Error::AnchorNotPrefix { .. })));
    }

    #[test]
    fn sadic_decomposition_examples() {
        let fib = Substitution::from_pairs(&[("a", "ab"), ("b", "a")]).unwrap();
        let x = fib.fixed_point_prefix(10_000).unwrap();
        let d = sadic_decomposition(&x, 2, 2).unwrap();
        assert_eq!(d.alpha, 12);
        assert_eq!(d.recodings.len(), 2);
        assert!(d.reconstruction.is_prefix_of(&x));

        let d0 = sadic_decomposition(&x, 2, 0).unwrap();
        assert!(d0.recodings.is_empty());
        assert_eq!(words_of(&d0.codings[0]), ["ab", "a"]);

        let per = Substitution::from_pairs(&[("a", "ab"), ("b", "ab")]).unwrap();
        let x = per.fixed_point_prefix(1000).unwrap();
        let d = sadic_decomposition(&x, 1, 2).unwrap();
        for c in &d.codings {
            assert_eq!(c.len(), 1);
        }
        for r in &d.recodings {
            let img = r.lambda().image(0);
            assert!(img.letters().iter().all(|&l| l == 0));
        }
    }

    #[test]
    fn sadic_decomposition_short_prefix() {
        let fib = Substitution::from_pairs(&[("a", "ab"), ("b", "a")]).unwrap();
        let x = fib.fixed_point_prefix(100).unwrap().prefix(100);
        assert_eq!(
            sadic_decomposition(&x, 2, 2).unwrap_err(),
            Error::PrefixTooShort { have: 100, need: 432 }
        );
    }
}
