//! S-adic sequences, Sturmian words and linear-recurrence diagnostics.
//!
//! A directive `σ_0, σ_1, …, σ_last` drawn from a finite family generates
//! the word `σ_0σ_1⋯σ_last(a)`; when every morphism maps the relevant first
//! letter to a word starting with it, these words are prefixes of one
//! another. Sturmian words of slope `α = [0; a_1, a_2, …]` are generated by
//! `τ^{a_1−1} σ^{a_2} τ^{a_3} ⋯` with `τ(0)=0, τ(1)=10, σ(0)=01, σ(1)=1`.

use std::collections::HashSet;
use std::sync::Arc;
use std::thread;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::morphism::Morphism;
use crate::words::{check_alphabet, complexity, factor_positions, Alphabet, Letter, Word};

/// Index of `τ` in [`sturmian_family`].
pub const TAU: usize = 0;
/// Index of `σ` in [`sturmian_family`].
pub const SIGMA: usize = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectiveSequence {
    names: Vec<String>,
    family: Vec<Morphism>,
    directive: Vec<usize>,
    seed: Letter,
}

impl DirectiveSequence {
    /// Checks that indices are in range, that `σ_i ∘ σ_{i+1}` is defined
    /// for consecutive entries and that `seed` is a letter of the
    /// innermost domain.
    pub fn new(
        names: Vec<String>,
        family: Vec<Morphism>,
        directive: Vec<usize>,
        seed: Letter,
    ) -> Result<Self> {
        if names.len() != family.len() {
            return Err(Error::InvalidArgument(format!(
                "{} names for {} morphisms",
                names.len(),
                family.len()
            )));
        }
        let Some(&last) = directive.last() else {
            return Err(Error::InvalidArgument("empty directive".into()));
        };
        if let Some(&bad) = directive.iter().find(|&&i| i >= family.len()) {
            return Err(Error::InvalidArgument(format!(
                "directive index {bad} is out of range for a family of {}",
                family.len()
            )));
        }
        for pair in directive.windows(2) {
            check_alphabet(family[pair[0]].domain(), family[pair[1]].codomain())?;
        }
        if seed as usize >= family[last].domain().len() {
            return Err(Error::InvalidArgument(format!("seed letter {seed} is out of range")));
        }
        Ok(Self { names, family, directive, seed })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn family(&self) -> &[Morphism] {
        &self.family
    }

    pub fn directive(&self) -> &[usize] {
        &self.directive
    }

    pub fn seed(&self) -> Letter {
        self.seed
    }

    /// The `i`-th morphism of the directive.
    pub fn morphism_at(&self, i: usize) -> &Morphism {
        &self.family[self.directive[i]]
    }

    /// Alphabet of the generated word.
    pub fn output_alphabet(&self) -> &Arc<Alphabet> {
        self.morphism_at(0).codomain()
    }

    /// `|σ_0⋯σ_last(seed)|`, saturating.
    pub fn image_len(&self) -> usize {
        let mut lens: Vec<usize> = vec![1; self.output_alphabet().len()];
        for i in 0..self.directive.len() {
            lens = compose_lengths(&lens, self.morphism_at(i));
        }
        lens[self.seed as usize]
    }

    /// Maximal runs of equal indices, as `(index, length)`.
    pub fn runs(&self) -> Vec<(usize, usize)> {
        let mut runs: Vec<(usize, usize)> = Vec::new();
        for &i in &self.directive {
            match runs.last_mut() {
                Some((j, n)) if *j == i => *n += 1,
                _ => runs.push((i, 1)),
            }
        }
        runs
    }
}

/// Lengths `|μ σ(c)|` given `outer[b] = |μ(b)|`.
fn compose_lengths(outer: &[usize], sigma: &Morphism) -> Vec<usize> {
    (0..sigma.domain().len() as Letter)
        .map(|c| sigma.image_raw(c))
        .map(|img| img.iter().fold(0usize, |acc, &b| acc.saturating_add(outer[b as usize])))
        .collect()
}

/// Length-`n` prefix of `σ_0σ_1⋯σ_last(a)`.
pub fn sadic_prefix(d: &DirectiveSequence, n: usize) -> Result<Word> {
    let mut w = vec![d.seed];
    for i in (0..d.directive.len()).rev() {
        // A prefix of length n of σ(w) only depends on the first n letters of w.
        w.truncate(n);
        w = d.morphism_at(i).apply_raw(&w);
    }
    if w.len() < n {
        return Err(Error::DirectiveTooShort { have: w.len(), need: n });
    }
    w.truncate(n);
    Ok(Word::from_raw(Arc::clone(d.output_alphabet()), w))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowCheck {
    pub s0: usize,
    /// Entry `r` tells whether `σ_{r+1}⋯σ_{r+s0}(c)` contains every letter,
    /// for every `c`.
    pub windows: Vec<bool>,
}

impl WindowCheck {
    pub fn passed(&self) -> bool {
        !self.windows.is_empty() && self.windows.iter().all(|&w| w)
    }
}

/// Positivity of every `s0`-window of the directive, excluding `σ_0`.
pub fn primitive_window_check(d: &DirectiveSequence, s0: usize) -> WindowCheck {
    let last = d.directive.len() - 1;
    let mut windows = Vec::new();
    if s0 == 0 {
        return WindowCheck { s0, windows };
    }
    let mut r = 0;
    while r + s0 <= last {
        windows.push(window_is_positive(d, r + 1, r + s0));
        r += 1;
    }
    WindowCheck { s0, windows }
}

/// Whether `σ_lo⋯σ_hi(c)` contains every letter of the codomain of `σ_lo`.
fn window_is_positive(d: &DirectiveSequence, lo: usize, hi: usize) -> bool {
    // support[c] = letters occurring in σ_i⋯σ_hi(c), built from the right.
    let inner = d.morphism_at(hi);
    let mut support: Vec<HashSet<Letter>> = (0..inner.domain().len() as Letter)
        .map(|c| inner.image_raw(c).iter().copied().collect())
        .collect();
    for i in (lo..hi).rev() {
        let m = d.morphism_at(i);
        support = support
            .iter()
            .map(|letters| letters.iter().flat_map(|&b| m.image_raw(b).iter().copied()).collect())
            .collect();
    }
    let size = d.morphism_at(lo).codomain().len();
    support.iter().all(|s| s.len() == size)
}

/// `[a_0; a_1, a_2, …]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContinuedFraction {
    coefficients: Vec<u64>,
}

impl ContinuedFraction {
    pub fn new(coefficients: Vec<u64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidContinuedFraction("no coefficients".into()));
        }
        if let Some(k) = coefficients.iter().skip(1).position(|&a| a == 0) {
            return Err(Error::InvalidContinuedFraction(format!("a_{} is 0", k + 1)));
        }
        Ok(Self { coefficients })
    }

    pub fn coefficients(&self) -> &[u64] {
        &self.coefficients
    }

    /// `(p_k, q_k)` for `k = 0..len`.
    pub fn convergents(&self) -> Vec<(BigUint, BigUint)> {
        let (mut p0, mut q0) = (BigUint::zero(), BigUint::one());
        let (mut p1, mut q1) = (BigUint::one(), BigUint::zero());
        let mut out = Vec::with_capacity(self.coefficients.len());
        for &a in &self.coefficients {
            let p = &p1 * a + &p0;
            let q = &q1 * a + &q0;
            (p0, q0) = (p1, q1);
            (p1, q1) = (p.clone(), q.clone());
            out.push((p, q));
        }
        out
    }

    /// Largest `C` with some `a_k = C`, `k ≥ 1`.
    pub fn max_partial_quotient(&self) -> Option<u64> {
        self.coefficients.iter().skip(1).copied().max()
    }

    fn check_unit_interval(&self) -> Result<()> {
        if self.coefficients[0] != 0 || self.coefficients.len() < 2 {
            return Err(Error::InvalidContinuedFraction(
                "expected [0; a_1, …] with at least one partial quotient".into(),
            ));
        }
        Ok(())
    }
}

/// `τ` and `σ` over `{0, 1}`, named `"tau"` and `"sigma"`.
pub fn sturmian_family() -> (Vec<String>, Vec<Morphism>) {
    let tau = Morphism::from_pairs(&[("0", "0"), ("1", "10")]).expect("valid morphism");
    let alphabet = Arc::clone(tau.domain());
    let sigma = Morphism::new(
        Arc::clone(&alphabet),
        Arc::clone(&alphabet),
        vec![
            alphabet.parse_word("01").expect("valid word"),
            alphabet.parse_word("1").expect("valid word"),
        ],
    )
    .expect("valid morphism");
    (vec!["tau".into(), "sigma".into()], vec![tau, sigma])
}

/// `τ^{a_1−1} σ^{a_2} τ^{a_3} ⋯`, cut after the first morphism at which
/// `|σ_0⋯σ_n(0)| ≥ target`.
pub fn sturmian_directive(cf: &ContinuedFraction, target: usize) -> Result<DirectiveSequence> {
    cf.check_unit_interval()?;
    let (names, family) = sturmian_family();
    let mut directive = Vec::new();
    let mut lens = vec![1usize, 1];
    let mut reached = 1;
    'blocks: for (k, &a) in cf.coefficients.iter().enumerate().skip(1) {
        let (index, count) = match k {
            1 => (TAU, a - 1),
            _ if k % 2 == 1 => (TAU, a),
            _ => (SIGMA, a),
        };
        for _ in 0..count {
            directive.push(index);
            lens = compose_lengths(&lens, &family[index]);
            reached = lens[0];
            if reached >= target {
                break 'blocks;
            }
        }
    }
    if reached < target || directive.is_empty() {
        return Err(Error::DirectiveTooShort { have: reached, need: target });
    }
    DirectiveSequence::new(names, family, directive, 0)
}

/// First `n` letters of the coding of the orbit of 0 under rotation by
/// `α`: `s_k = ⌊(k+1)p/q⌋ − ⌊kp/q⌋` with `p/q` the first convergent having
/// `q > n`.
pub fn rotation_coding_prefix(cf: &ContinuedFraction, n: usize) -> Result<Word> {
    cf.check_unit_interval()?;
    let convergents = cf.convergents();
    let need = BigUint::from(n);
    let Some((p, q)) = convergents.iter().find(|(_, q)| *q > need) else {
        let have = convergents.last().map(|(_, q)| q.to_string()).unwrap_or_default();
        return Err(Error::InsufficientPrecision { have, need: n });
    };
    let alphabet = Alphabet::from_chars("01")?;
    let mut letters = Vec::with_capacity(n);
    let mut rem = BigUint::zero();
    for _ in 0..n {
        rem += p;
        let (carry, r) = rem.div_rem(q);
        letters.push(carry.to_u32().expect("carry is 0 or 1"));
        rem = r;
    }
    Ok(Word::from_raw(alphabet, letters))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnchorStats {
    pub anchor: Word,
    pub occurrences: usize,
    /// Number of distinct observed return words.
    pub card: usize,
    pub min_return: usize,
    pub max_return: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LrEstimate {
    /// `max |w| / |u|` over scanned anchors and observed return words.
    pub ratio: Option<Ratio<usize>>,
    /// Anchor attaining the ratio.
    pub witness: Option<Word>,
    pub max_anchor_len: usize,
    pub prefix_len: usize,
    pub anchors: Vec<AnchorStats>,
    /// Factors seen fewer than three times, and left out.
    pub skipped: usize,
    /// Always false: only a finite prefix was read.
    pub certified: bool,
}

/// Scans every factor of length `1..=m` occurring at least three times.
pub fn lr_estimate(prefix: &Word, m: usize) -> Result<LrEstimate> {
    if m == 0 {
        return Err(Error::InvalidArgument("maximal anchor length must be positive".into()));
    }
    let letters = prefix.letters();
    let top = m.min(letters.len());
    let per_length = scan_lengths(letters, top);

    let mut anchors = Vec::new();
    let mut skipped = 0;
    let mut best: Option<(Ratio<usize>, Word)> = None;
    for (n, (stats, skip)) in (1..=top).zip(per_length) {
        skipped += skip;
        for (factor, s) in stats {
            let anchor = Word::from_raw(Arc::clone(prefix.alphabet()), factor);
            let ratio = Ratio::new(s.max_return, n);
            if best.as_ref().is_none_or(|(r, _)| ratio > *r) {
                best = Some((ratio, anchor.clone()));
            }
            anchors.push(AnchorStats {
                anchor,
                occurrences: s.occurrences,
                card: s.card,
                min_return: s.min_return,
                max_return: s.max_return,
            });
        }
    }
    let (ratio, witness) = best.map_or((None, None), |(r, w)| (Some(r), Some(w)));
    Ok(LrEstimate {
        ratio,
        witness,
        max_anchor_len: m,
        prefix_len: letters.len(),
        anchors,
        skipped,
        certified: false,
    })
}

struct RawStats {
    occurrences: usize,
    card: usize,
    min_return: usize,
    max_return: usize,
}

type LengthScan = (Vec<(Vec<Letter>, RawStats)>, usize);

/// Anchor statistics for each length `1..=top`, lengths spread over threads.
fn scan_lengths(letters: &[Letter], top: usize) -> Vec<LengthScan> {
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(top.max(1));
    let mut results: Vec<Option<LengthScan>> = (0..top).map(|_| None).collect();
    thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|t| {
                scope.spawn(move || {
                    (1..=top)
                        .skip(t)
                        .step_by(workers)
                        .map(|n| (n, scan_length(letters, n)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (n, scan) in h.join().expect("scan thread panicked") {
                results[n - 1] = Some(scan);
            }
        }
    });
    results.into_iter().map(|r| r.expect("every length scanned")).collect()
}

fn scan_length(letters: &[Letter], n: usize) -> LengthScan {
    let positions = factor_positions(letters, n);
    let mut stats = Vec::new();
    let mut skipped = 0;
    for (factor, occ) in positions {
        if occ.len() < 3 {
            skipped += 1;
            continue;
        }
        let returns: HashSet<&[Letter]> = occ.windows(2).map(|p| &letters[p[0]..p[1]]).collect();
        let gaps = occ.windows(2).map(|p| p[1] - p[0]);
        stats.push((
            factor.to_vec(),
            RawStats {
                occurrences: occ.len(),
                card: returns.len(),
                min_return: gaps.clone().min().unwrap_or(0),
                max_return: gaps.max().unwrap_or(0),
            },
        ));
    }
    stats.sort_by(|a, b| a.0.cmp(&b.0));
    (stats, skipped)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyCheck {
    pub passed: bool,
    pub witness: Option<String>,
}

impl PropertyCheck {
    fn pass() -> Self {
        Self { passed: true, witness: None }
    }

    fn fail(witness: String) -> Self {
        Self { passed: false, witness: Some(witness) }
    }
}

/// Necessary conditions for linear recurrence with constant `K`, checked
/// on a prefix for factor lengths up to `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LrDiagnostics {
    pub k: usize,
    pub max_len: usize,
    /// `p(n) ≤ Kn`.
    pub complexity: PropertyCheck,
    /// No factor `u^{K+1}` with `|u| ≤ m`.
    pub power_free: PropertyCheck,
    /// Each length-`n` factor occurs in each length-`(K+1)n` window.
    pub window: PropertyCheck,
    /// `Card ℛ_u ≤ K(K+1)²` for every anchor seen at least three times.
    pub return_card: PropertyCheck,
}

impl LrDiagnostics {
    pub fn passed(&self) -> bool {
        self.complexity.passed && self.power_free.passed && self.window.passed && self.return_card.passed
    }
}

pub fn lr_diagnostics(prefix: &Word, k: usize, m: usize) -> Result<LrDiagnostics> {
    if k == 0 || m == 0 {
        return Err(Error::InvalidArgument("K and the maximal length must be positive".into()));
    }
    let letters = prefix.letters();
    let len = letters.len();
    let top = m.min(len);

    let mut complexity_check = PropertyCheck::pass();
    for n in 1..=top {
        let p = complexity(prefix, n)?;
        if p > k * n {
            complexity_check = PropertyCheck::fail(format!("p({n}) = {p} > {}", k * n));
            break;
        }
    }

    let power_free = match find_power(letters, k + 1, m) {
        Some((start, period)) => {
            PropertyCheck::fail(prefix.factor(start, start + (k + 1) * period).to_string())
        }
        None => PropertyCheck::pass(),
    };

    let mut window = PropertyCheck::pass();
    'lengths: for n in 1..=top {
        let span = (k + 1) * n;
        if span > len {
            break;
        }
        let mut factors: Vec<_> = factor_positions(letters, n).into_iter().collect();
        factors.sort();
        for (factor, occ) in factors {
            // Window [s, s+span) contains an occurrence iff one starts in [s, s+Kn].
            let first = occ[0];
            let last = *occ.last().expect("non-empty");
            let gap = occ.windows(2).map(|p| p[1] - p[0]).max().unwrap_or(0);
            if first > k * n || gap > k * n + 1 || last < len - span {
                let u = Word::from_raw(Arc::clone(prefix.alphabet()), factor.to_vec());
                window = PropertyCheck::fail(format!("{u} misses a window of length {span}"));
                break 'lengths;
            }
        }
    }

    let bound = k * (k + 1) * (k + 1);
    let estimate = lr_estimate(prefix, m)?;
    let return_card = match estimate.anchors.iter().find(|a| a.card > bound) {
        Some(a) => PropertyCheck::fail(format!("{} has {} return words > {bound}", a.anchor, a.card)),
        None => PropertyCheck::pass(),
    };

    Ok(LrDiagnostics { k, max_len: m, complexity: complexity_check, power_free, window, return_card })
}

/// First `(start, q)` with `w[start, start + e·q)` of period `q`, smallest
/// `q ≤ m` first.
fn find_power(w: &[Letter], e: usize, m: usize) -> Option<(usize, usize)> {
    for q in 1..=m {
        if e * q > w.len() {
            break;
        }
        let need = (e - 1) * q;
        let mut run = 0;
        for t in 0..w.len() - q {
            if w[t] == w[t + q] {
                run += 1;
                if run == need {
                    return Some((t + 1 - need, q));
                }
            } else {
                run = 0;
            }
        }
    }
    None
}
