//! Construction of a proper substitution `ζ` generating a subshift
//! isomorphic to the one of a primitive substitution `σ`.
//!
//! With `a` the seed letter, `Θ` the return-word coding and `τ` the derived
//! substitution (`σΘ = Θτ`), `ζ` acts on `B = {(j,p) : 1 ≤ p ≤ |Θ(j)|}`:
//!
//! ```text
//! ζ(j,p) = ψ(τ^k(j)_p)                        for p < |Θ(j)|
//! ζ(j,p) = ψ(τ^k(j)[|Θ(j)|, |τ^k(j)|])        for p = |Θ(j)|
//! ```
//!
//! where `ψ(j) = (j,1)(j,2)…(j,|Θ(j)|)` and `k` is the smallest power with
//! `τ^k` proper and `|τ^k(j)| ≥ |Θ(j)|` for every `j`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::morphism::{is_primitive_matrix, Morphism, Substitution};
use crate::returnwords::{return_words_closure, DerivedSubstitution};
use crate::words::{Alphabet, Letter};

/// Upper bound on the power of `τ` searched for.
const MAX_TAU_POWER: usize = 64;
/// Extra powers of `τ` tried when `ζ` is not letter-proper.
const PROPERNESS_RETRIES: usize = 2;

#[derive(Debug, Clone)]
pub struct ProperizationResult {
    /// The alphabet `B` of pairs `(j,p)`, or `A` on pass-through.
    pub alphabet: Arc<Alphabet>,
    pub zeta: Substitution,
    /// Letter map `B → A`, `φ(j,p) = Θ(j)_p`.
    pub phi: Morphism,
    /// `ψ : R_a → B⁺`; absent on pass-through.
    pub psi: Option<Morphism>,
    /// Return words and `τ`; absent on pass-through.
    pub derived: Option<DerivedSubstitution>,
    /// Power of `τ` used in the construction.
    pub tau_power: usize,
    /// `ζ` is the constructed substitution raised to this power (1 or 2).
    pub zeta_power: usize,
    /// Powers of `τ` tried beyond the minimal one before settling.
    pub escalations: usize,
    pub pass_through: bool,
}

impl ProperizationResult {
    pub fn proper_letter(&self) -> Letter {
        self.zeta.proper_letter().expect("ζ is verified proper")
    }
}

/// Builds a proper substitution for a primitive `σ`, or returns `σ`
/// unchanged when it is already proper.
pub fn properize(sigma: &Substitution) -> Result<ProperizationResult> {
    if !sigma.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    if sigma.is_proper() {
        let alphabet = Arc::clone(sigma.alphabet());
        return Ok(ProperizationResult {
            phi: Morphism::identity(Arc::clone(&alphabet)),
            alphabet,
            zeta: sigma.clone(),
            psi: None,
            derived: None,
            tau_power: 1,
            zeta_power: 1,
            escalations: 0,
            pass_through: true,
        });
    }

    let derived = return_words_closure(sigma)?;
    let theta = derived.theta();
    let tau = derived.tau();
    let theta_len: Vec<usize> = theta.domain().letters().map(|j| theta.image_len(j)).collect();

    let admissible = |t: &Substitution| {
        t.proper_letter() == Some(0)
            && t.alphabet().letters().all(|j| t.morphism().image_len(j) >= theta_len[j as usize])
    };
    let mut k = 1;
    let mut tau_k = tau.clone();
    while !admissible(&tau_k) {
        k += 1;
        if k > MAX_TAU_POWER {
            return Err(Error::Properization(format!(
                "no power τ^k with k ≤ {MAX_TAU_POWER} is proper and long enough"
            )));
        }
        tau_k = tau.power(k)?;
    }

    let (alphabet, phi, psi) = pair_alphabet(theta)?;

    let mut chosen = None;
    for extra in 0..=PROPERNESS_RETRIES {
        let power = k + extra;
        let t = if extra == 0 { tau_k.clone() } else { tau.power(power)? };
        if !admissible(&t) {
            continue;
        }
        let zeta = build_zeta(&alphabet, &psi, &theta_len, &t)?;
        check_length_conservation(&zeta, &psi, &theta_len, &t)?;
        if zeta.is_proper() {
            chosen = Some((zeta, power, 1, extra));
            break;
        }
    }
    let (zeta, tau_power, zeta_power, escalations) = match chosen {
        Some(found) => found,
        None => {
            // ζ(c) begins with some (m,1) and ζ(m,1) begins with (1,1), so
            // ζ² is always letter-proper.
            let zeta = build_zeta(&alphabet, &psi, &theta_len, &tau_k)?;
            (zeta.power(2)?, k, 2, PROPERNESS_RETRIES)
        }
    };

    if zeta.proper_letter() != Some(0) {
        return Err(Error::Properization(format!("ζ = [{zeta}] is not proper")));
    }
    if !zeta.is_primitive() || !is_primitive_matrix(&zeta.incidence_matrix()) {
        return Err(Error::Properization("ζ is not primitive".into()));
    }
    if phi.compose(&psi)? != *theta {
        return Err(Error::Certificate("φ∘ψ ≠ Θ".into()));
    }

    Ok(ProperizationResult {
        alphabet,
        zeta,
        phi,
        psi: Some(psi),
        tau_power,
        zeta_power,
        escalations,
        derived: Some(derived),
        pass_through: false,
    })
}

/// `B`, `φ : B → A` and `ψ : R_a → B⁺`. `B` is ordered by `(j, p)`.
fn pair_alphabet(theta: &Morphism) -> Result<(Arc<Alphabet>, Morphism, Morphism)> {
    let mut tokens = Vec::new();
    let mut phi_images = Vec::new();
    let mut psi_images = Vec::new();
    for j in theta.domain().letters() {
        let word = theta.image(j);
        let mut block = Vec::with_capacity(word.len());
        for (p, &letter) in word.letters().iter().enumerate() {
            block.push(tokens.len() as Letter);
            tokens.push(format!("({},{})", j + 1, p + 1));
            phi_images.push(vec![letter]);
        }
        psi_images.push(block);
    }
    let alphabet = Alphabet::new(tokens)?;
    let phi = Morphism::from_raw(Arc::clone(&alphabet), Arc::clone(theta.codomain()), phi_images);
    let psi = Morphism::from_raw(Arc::clone(theta.domain()), Arc::clone(&alphabet), psi_images);
    Ok((alphabet, phi, psi))
}

fn build_zeta(
    alphabet: &Arc<Alphabet>,
    psi: &Morphism,
    theta_len: &[usize],
    tau_k: &Substitution,
) -> Result<Substitution> {
    let mut images = Vec::with_capacity(alphabet.len());
    for j in tau_k.alphabet().letters() {
        let image = tau_k.morphism().image(j);
        let image = image.letters();
        let len = theta_len[j as usize];
        for p in 1..len {
            images.push(psi.apply_raw(&image[p - 1..p]));
        }
        images.push(psi.apply_raw(&image[len - 1..]));
    }
    let morphism = Morphism::from_raw(Arc::clone(alphabet), Arc::clone(alphabet), images);
    Substitution::with_seed(morphism, 0)
        .map_err(|_| Error::Properization("ζ(1,1) does not begin with (1,1)".into()))
}

/// `Σ_p |ζ(j,p)| = Σ_i |ψ(τ^k(j)_i)|` for every `j`.
fn check_length_conservation(
    zeta: &Substitution,
    psi: &Morphism,
    theta_len: &[usize],
    tau_k: &Substitution,
) -> Result<()> {
    let mut offset = 0;
    for j in tau_k.alphabet().letters() {
        let block = theta_len[j as usize];
        let zeta_total: usize =
            (offset..offset + block).map(|b| zeta.morphism().image_len(b as Letter)).sum();
        let psi_total: usize =
            tau_k.morphism().image(j).letters().iter().map(|&i| psi.image_len(i)).sum();
        if zeta_total != psi_total {
            return Err(Error::Certificate(format!(
                "length conservation fails at j = {}: {zeta_total} ≠ {psi_total}",
                j + 1
            )));
        }
        offset += block;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::IntegerMatrix;

    #[test]
    fn worked_example() {
        let sigma = Substitution::from_pairs(&[("a", "aba"), ("b", "baab")]).unwrap();
        let r = properize(&sigma).unwrap();
        assert!(!r.pass_through);
        assert_eq!(r.tau_power, 1);
        assert_eq!(r.zeta_power, 1);
        assert_eq!(r.alphabet.tokens(), ["(1,1)", "(1,2)", "(2,1)"]);
        let images: Vec<String> = r.zeta.morphism().images().map(|w| w.to_string()).collect();
        assert_eq!(
            images,
            ["(1,1) (1,2)", "(1,1) (1,2) (2,1) (1,1) (1,2)", "(1,1) (1,2) (2,1)"]
        );
        let phi: Vec<String> = r.phi.images().map(|w| w.to_string()).collect();
        assert_eq!(phi, ["a", "b", "a"]);
        let psi = r.psi.as_ref().unwrap();
        assert_eq!(psi.image(0).to_string(), "(1,1) (1,2)");
        assert_eq!(psi.image(1).to_string(), "(2,1)");
        assert_eq!(
            r.zeta.incidence_matrix().transpose(),
            IntegerMatrix::from_rows(&[[1, 1, 0], [2, 2, 1], [1, 1, 1]])
        );
    }

    #[test]
    fn proper_input_passes_through() {
        let fib = Substitution::from_pairs(&[("a", "ab"), ("b", "a")]).unwrap();
        let r = properize(&fib).unwrap();
        assert!(r.pass_through);
        assert_eq!(r.zeta, fib);
        assert_eq!(r.proper_letter(), 0);
    }

    #[test]
    fn thue_morse_needs_square_of_zeta() {
        let tm = Substitution::from_pairs(&[("0", "01"), ("1", "10")]).unwrap();
        let r = properize(&tm).unwrap();
        assert!(!r.pass_through);
        assert_eq!(r.tau_power, 2);
        assert_eq!(r.zeta_power, 2);
        assert!(r.zeta.is_proper());
        assert!(r.zeta.is_primitive());
        let d = r.derived.as_ref().unwrap();
        d.verify(&tm).unwrap();
        assert_eq!(r.phi.compose(r.psi.as_ref().unwrap()).unwrap(), *d.theta());
    }

    #[test]
    fn non_primitive_rejected() {
        let red = Substitution::from_pairs(&[("a", "ab"), ("b", "b")]).unwrap();
        assert!(matches!(properize(&red), Err(Error::NotPrimitive)));
    }
}
