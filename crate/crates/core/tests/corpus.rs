use num_bigint::{BigInt, BigUint};

use subshift::analysis::{analyze_morphism, cantor_factor_verdict, VerdictOptions, VerdictPath};
use subshift::properize::properize;
use subshift::returnwords::return_words_closure;
use subshift::words::factor_set;
use subshift::{Morphism, Substitution};

const PREFIX: usize = 10_000;

fn sub(pairs: &[(&str, &str)]) -> Substitution {
    Substitution::from_pairs(pairs).unwrap()
}

fn corpus() -> Vec<(&'static str, Substitution)> {
    vec![
        ("EX", sub(&[("a", "aba"), ("b", "baab")])),
        ("FIB", sub(&[("a", "ab"), ("b", "a")])),
        ("TM", sub(&[("0", "01"), ("1", "10")])),
        ("PER", sub(&[("a", "ab"), ("b", "ab")])),
        ("CYC3", sub(&[("a", "abc"), ("b", "bca"), ("c", "cab")])),
        ("TM2", sub(&[("0", "0110"), ("1", "1001")])),
        ("H3", sub(&[("a", "ab"), ("b", "ca"), ("c", "bd"), ("d", "bc")])),
    ]
}

#[test]
fn properized_language_maps_onto_original() {
    for (name, sigma) in corpus() {
        let p = properize(&sigma).unwrap();
        let y = p.zeta.fixed_point_prefix(PREFIX).unwrap().prefix(PREFIX);
        let image = p.phi.apply(&y).unwrap().prefix(PREFIX);
        let x = sigma.fixed_point_prefix(PREFIX).unwrap().prefix(PREFIX);
        for n in 1..=10 {
            assert_eq!(
                factor_set(&image, n).unwrap(),
                factor_set(&x, n).unwrap(),
                "{name}: factors of length {n} differ"
            );
        }
    }
}

#[test]
fn derived_substitutions_are_certified() {
    for (name, sigma) in corpus() {
        let d = return_words_closure(&sigma).unwrap();
        d.verify(&sigma).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(d.coding().is_certified(), "{name}");
        assert!(d.tau().is_primitive(), "{name}");
    }
}

#[test]
fn verdicts() {
    let expect = |name: &str, v: &subshift::analysis::Verdict, f: bool, fstar: bool| {
        assert_eq!((v.f_finite, v.fstar_finite), (f, fstar), "{name}: {:?}", v.notes);
    };
    for (name, sigma) in corpus() {
        let v = cantor_factor_verdict(&sigma).unwrap();
        match name {
            "EX" => {
                expect(name, &v, false, true);
                assert_eq!(v.g, BigInt::from(2));
            }
            "FIB" => expect(name, &v, true, true),
            "TM" | "PER" => expect(name, &v, false, true),
            "CYC3" => {
                expect(name, &v, false, true);
                assert_eq!(v.path, VerdictPath::ConstantLength { l: 3 });
            }
            "TM2" => expect(name, &v, false, false),
            "H3" => {
                expect(name, &v, false, true);
                let cl = v.constant_length.as_ref().unwrap();
                assert_eq!(cl.base.h, BigUint::from(3u32));
            }
            _ => unreachable!(),
        }
        assert_eq!(v.is_valid(), name != "PER", "{name}");
    }
}

#[test]
fn periodic_input_is_flagged() {
    let v = cantor_factor_verdict(&sub(&[("a", "ab"), ("b", "ab")])).unwrap();
    assert!(v.periodicity.is_periodic());
    assert!(v.notes.iter().any(|n| n.contains("non-periodic")));
}

#[test]
fn seed_policy_raises_power() {
    let m = Morphism::from_pairs(&[("a", "ba"), ("b", "ab")]).unwrap();
    let v = analyze_morphism(&m, VerdictOptions::default()).unwrap();
    assert_eq!(v.seed_power, 2);
    assert_eq!(v.path, VerdictPath::ConstantLength { l: 4 });
    assert!(!v.fstar_finite);
}

#[test]
fn properized_powers_agree_on_finiteness_of_f() {
    // ℱ finiteness is a property of the subshift, so it cannot depend on
    // which power of σ is analysed.
    for (name, sigma) in corpus() {
        if sigma.constant_length().is_some() {
            continue;
        }
        let base = cantor_factor_verdict(&sigma).unwrap();
        let squared = cantor_factor_verdict(&sigma.power(2).unwrap()).unwrap();
        assert_eq!(base.f_finite, squared.f_finite, "{name}");
        assert_eq!(base.odometer_primes, squared.odometer_primes, "{name}");
    }
}
