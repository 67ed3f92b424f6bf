//! Decision procedures for the finiteness of Cantor factors.
//!
//! For a proper substitution with transposed incidence matrix `M`, let
//! `r` be the Krylov rank of `e = (1,…,1)` and `Q(X) = Σ a_i X^i` the
//! characteristic polynomial of `M` restricted to `span{e, …, M^r e}`.
//! With `g = gcd(a_0, …, a_r)`:
//!
//! * the set of Cantor factors is finite iff `g = 1`;
//! * the set of non-periodic Cantor factors is finite iff `g = 1` or `g`
//!   is prime.
//!
//! The prime divisors of `g` are exactly the primes `p` with every `p^n` in
//! the periodic spectrum, i.e. the constant-base odometers `(p, p, …)`
//! that are factors. Constant-length substitutions are handled through the
//! maximal equicontinuous factor `(h, l, l, …)` instead.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{is_prime, is_proper_prime_power, prime_divisors, strip_common_primes};
use crate::error::{Error, Result};
use crate::linalg::{det, krylov, IntPolynomial, IntegerMatrix, KrylovRelation};
use crate::morphism::{Morphism, Periodicity, Substitution};
use crate::properize::{properize, ProperizationResult};
use crate::words::{occurrences_raw, Letter};

pub const DEFAULT_PROBE_HORIZON: usize = 64;
const DEKKING_START: usize = 16;
const DEKKING_CAP: usize = 1 << 22;

/// `r` and the monic polynomial `Q` of the Krylov restriction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictedCharPoly {
    pub r: usize,
    pub q: IntPolynomial,
    pub krylov: KrylovRelation,
}

impl RestrictedCharPoly {
    /// `gcd(|a_0|, …, |a_r|)`.
    pub fn g(&self) -> BigInt {
        self.q.lower_coeff_gcd()
    }
}

/// `Q(X) = X^{r+1} − Σ c_i X^i` from the Krylov relation of `e`; fails if a
/// coefficient is not an integer.
pub fn restricted_char_poly(m: &IntegerMatrix) -> Result<RestrictedCharPoly> {
    let krylov = krylov(m)?;
    let mut coeffs = Vec::with_capacity(krylov.r + 2);
    for c in &krylov.coefficients.0 {
        if !c.is_integer() {
            return Err(Error::NonIntegral(c.to_string()));
        }
        coeffs.push(-c.to_integer());
    }
    coeffs.push(BigInt::one());
    Ok(RestrictedCharPoly { r: krylov.r, q: IntPolynomial::new(coeffs), krylov })
}

/// Maximal equicontinuous factor base `(h, l, l, …)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OdometerBase {
    pub h: BigUint,
    pub l: usize,
}

/// Height `h` of a constant-length substitution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DekkingHeight {
    pub h: BigUint,
    /// gcd of the positive return times of `x_0`.
    pub occurrence_gcd: BigUint,
    /// Prefix length at which the gcd was seen unchanged across a doubling.
    pub stabilized_at: usize,
}

/// `h = max{n ≥ 1 : gcd(n, l) = 1, n | gcd{i ≥ 0 : x_i = x_0}}`, with the
/// occurrence gcd read on doubling prefixes until it stops changing.
pub fn dekking_h(sigma: &Substitution, l: usize) -> Result<DekkingHeight> {
    if l < 2 {
        return Err(Error::InvalidArgument("constant length must be at least 2".into()));
    }
    let gcd_at = |n: usize| -> Result<u64> {
        let x = sigma.fixed_point_prefix(n)?;
        let letters = &x.letters()[..n];
        let first = letters[0];
        Ok(letters
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &c)| c == first)
            .fold(0u64, |g, (i, _)| g.gcd(&(i as u64))))
    };
    let mut n = DEKKING_START;
    let mut current = gcd_at(n)?;
    loop {
        if 2 * n > DEKKING_CAP {
            return Err(Error::Certificate(format!(
                "occurrence gcd did not stabilize below prefix length {DEKKING_CAP}"
            )));
        }
        let next = gcd_at(2 * n)?;
        if next == current && next != 0 {
            let g = BigUint::from(next);
            return Ok(DekkingHeight {
                h: strip_common_primes(&g, &BigUint::from(l)),
                occurrence_gcd: g,
                stabilized_at: 2 * n,
            });
        }
        current = next;
        n *= 2;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerdictPath {
    ConstantLength { l: usize },
    Proper,
    /// Went through the proper substitution `ζ`.
    Properized { tau_power: usize, zeta_power: usize, zeta_size: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstantLengthData {
    pub l: usize,
    pub height: DekkingHeight,
    pub base: OdometerBase,
}

/// Full report of the Cantor-factor analysis.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub substitution: Substitution,
    /// The input morphism was raised to this power to obtain a seed letter.
    pub seed_power: usize,
    pub periodicity: Periodicity,
    pub path: VerdictPath,
    /// Transposed incidence matrix the polynomial was computed from.
    pub matrix: IntegerMatrix,
    pub r: usize,
    pub q: IntPolynomial,
    pub g: BigInt,
    pub f_finite: bool,
    pub fstar_finite: bool,
    pub constant_length: Option<ConstantLengthData>,
    /// Primes `p` with every `p^n` in the periodic spectrum (the prime
    /// divisors of `g`); each gives the odometer factor `(p, p, …)`.
    pub odometer_primes: Vec<BigUint>,
    /// Finite superset of the primes in the periodic spectrum, when the
    /// determinant certificate applies.
    pub candidate_primes: Option<Vec<BigUint>>,
    pub properization: Option<ProperizationResult>,
    pub notes: Vec<String>,
}

impl Verdict {
    /// The finiteness criteria assume a non-periodic subshift.
    pub fn is_valid(&self) -> bool {
        !self.periodicity.is_periodic()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerdictOptions {
    pub probe_horizon: usize,
}

impl Default for VerdictOptions {
    fn default() -> Self {
        Self { probe_horizon: DEFAULT_PROBE_HORIZON }
    }
}

/// Applies the seed-letter policy to `morphism` and analyses the result.
pub fn analyze_morphism(morphism: &Morphism, options: VerdictOptions) -> Result<Verdict> {
    let (sigma, power) = Substitution::seeded(morphism.clone())?;
    let mut verdict = cantor_factor_verdict_with(&sigma, options)?;
    verdict.seed_power = power;
    if power > 1 {
        verdict.notes.push(format!("no letter begins its own image; analysed σ^{power}"));
    }
    Ok(verdict)
}

pub fn cantor_factor_verdict(sigma: &Substitution) -> Result<Verdict> {
    cantor_factor_verdict_with(sigma, VerdictOptions::default())
}

pub fn cantor_factor_verdict_with(sigma: &Substitution, options: VerdictOptions) -> Result<Verdict> {
    if !sigma.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    if let Some(l) = sigma.constant_length() {
        return constant_length_verdict_with(sigma, l, options);
    }
    let periodicity = sigma.periodicity_probe(options.probe_horizon)?;
    let candidate_primes = spectrum_prime_candidates(sigma)?;
    let properization = properize(sigma)?;
    let path = if properization.pass_through {
        VerdictPath::Proper
    } else {
        VerdictPath::Properized {
            tau_power: properization.tau_power,
            zeta_power: properization.zeta_power,
            zeta_size: properization.alphabet.len(),
        }
    };
    let matrix = properization.zeta.incidence_matrix().transpose();
    let rcp = restricted_char_poly(&matrix)?;
    let g = rcp.g();
    let g_abs = g.magnitude().clone();
    let f_finite = g.is_one();
    let fstar_finite = f_finite || is_prime(&g_abs);

    let mut notes = Vec::new();
    if properization.zeta_power > 1 {
        notes.push(format!(
            "ζ built from τ^{} was not letter-proper; its square is used",
            properization.tau_power
        ));
    }
    push_common_notes(&mut notes, &periodicity, &g_abs);

    Ok(Verdict {
        substitution: sigma.clone(),
        seed_power: 1,
        periodicity,
        path,
        matrix,
        r: rcp.r,
        q: rcp.q,
        odometer_primes: prime_divisors(&g_abs).0,
        g,
        f_finite,
        fstar_finite,
        constant_length: None,
        candidate_primes,
        properization: Some(properization),
        notes,
    })
}

fn push_common_notes(notes: &mut Vec<String>, periodicity: &Periodicity, g: &BigUint) {
    if periodicity.is_periodic() {
        notes.push(format!(
            "subshift is {periodicity}; the finiteness criteria assume a non-periodic subshift"
        ));
    }
    if is_proper_prime_power(g) {
        notes.push(format!(
            "{g} is a power of a single prime; only that prime has all its powers in the periodic spectrum"
        ));
    }
}

/// Constant-length path: the set of Cantor factors is infinite, and the
/// non-periodic ones are finite iff `l` is prime.
pub fn constant_length_verdict(sigma: &Substitution, l: usize) -> Result<Verdict> {
    constant_length_verdict_with(sigma, l, VerdictOptions::default())
}

pub fn constant_length_verdict_with(
    sigma: &Substitution,
    l: usize,
    options: VerdictOptions,
) -> Result<Verdict> {
    if !sigma.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    if sigma.constant_length() != Some(l) {
        return Err(Error::InvalidArgument(format!("substitution is not of constant length {l}")));
    }
    let periodicity = sigma.periodicity_probe(options.probe_horizon)?;
    let height = dekking_h(sigma, l)?;
    let matrix = sigma.incidence_matrix().transpose();
    let rcp = restricted_char_poly(&matrix)?;
    let g = rcp.g();
    let l_big = BigUint::from(l);
    let mut notes = Vec::new();
    push_common_notes(&mut notes, &periodicity, &l_big);
    Ok(Verdict {
        substitution: sigma.clone(),
        seed_power: 1,
        periodicity,
        path: VerdictPath::ConstantLength { l },
        matrix,
        r: rcp.r,
        q: rcp.q,
        odometer_primes: prime_divisors(g.magnitude()).0,
        g,
        f_finite: false,
        fstar_finite: is_prime(&l_big),
        constant_length: Some(ConstantLengthData {
            l,
            base: OdometerBase { h: height.h.clone(), l },
            height,
        }),
        candidate_primes: spectrum_prime_candidates(sigma)?,
        properization: None,
        notes,
    })
}

/// Result of searching `M^m e ≡ 0 (mod p^n)` for one `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSearch {
    pub n: u32,
    /// Largest `m` inspected: `n(r+1) + r + 1`.
    pub bound: usize,
    /// Smallest `m ≤ bound` that works.
    pub witness: Option<usize>,
}

impl PowerSearch {
    pub fn found(&self) -> bool {
        self.witness.is_some()
    }
}

/// For each `n ≤ n_max`, the smallest `m ≤ n(r+1)+r+1` with
/// `M^m e ≡ 0 (mod p^n)`, for an arbitrary square integer matrix.
pub fn vanishing_powers(m: &IntegerMatrix, p: u64, n_max: u32) -> Result<Vec<PowerSearch>> {
    let r = krylov(m)?.r;
    let d = m.rows();
    let max_bound = n_max as usize * (r + 1) + r + 1;
    let mut iterates = Vec::with_capacity(max_bound + 1);
    let mut v = vec![BigInt::one(); d];
    for _ in 0..=max_bound {
        let next = m.mul_vec(&v)?;
        iterates.push(v);
        v = next;
    }
    let p = BigInt::from(p);
    Ok((1..=n_max)
        .map(|n| {
            let bound = n as usize * (r + 1) + r + 1;
            let modulus = p.pow(n);
            let witness = iterates[..=bound]
                .iter()
                .position(|v| v.iter().all(|x| x.is_multiple_of(&modulus)));
            PowerSearch { n, bound, witness }
        })
        .collect())
}

/// Whether `p^n` divides `gcd{|σ^m(c)|}` for some `m` in the search range,
/// for `n = 1..=n_max`. Requires a proper substitution.
pub fn power_in_spectrum(sigma: &Substitution, p: u64, n_max: u32) -> Result<Vec<PowerSearch>> {
    if !sigma.is_proper() {
        return Err(Error::NotProper);
    }
    if !is_prime(&BigUint::from(p)) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    vanishing_powers(&sigma.incidence_matrix().transpose(), p, n_max)
}

/// Primes dividing `|u|·|det M_σ|`, `u` the first return word to the seed;
/// `None` when the determinant vanishes.
pub fn spectrum_prime_candidates(sigma: &Substitution) -> Result<Option<Vec<BigUint>>> {
    let d = det(&sigma.incidence_matrix())?;
    if d.is_zero() {
        return Ok(None);
    }
    let u = first_return_len(sigma)?;
    let product = d.abs().magnitude() * BigUint::from(u);
    let (mut primes, rest) = prime_divisors(&product);
    if let Some(rest) = rest {
        primes.push(rest);
    }
    Ok(Some(primes))
}

fn first_return_len(sigma: &Substitution) -> Result<usize> {
    let seed: Letter = sigma.seed();
    let mut n = 16;
    loop {
        let x = sigma.fixed_point_prefix(n)?;
        let occ = occurrences_raw(&[seed], x.letters());
        if occ.len() >= 2 {
            return Ok(occ[1]);
        }
        if n > DEKKING_CAP {
            return Err(Error::AnchorNotRecurrent(sigma.alphabet().token(seed).to_string()));
        }
        n *= 2;
    }
}

/// `((2K(2K+1)²)^{4K²})^{K(K+1)²}`.
pub fn factor_count_bound(k: u32) -> Result<BigUint> {
    if k == 0 {
        return Err(Error::InvalidArgument("K must be positive".into()));
    }
    let k64 = u64::from(k);
    let base = BigUint::from(2 * k64 * (2 * k64 + 1) * (2 * k64 + 1));
    let exponent = 4 * k64 * k64 * k64 * (k64 + 1) * (k64 + 1);
    let exponent = u32::try_from(exponent)
        .map_err(|_| Error::InvalidArgument(format!("exponent for K = {k} is too large")))?;
    Ok(base.pow(exponent))
}
