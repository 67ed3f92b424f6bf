//! Small number-theoretic helpers on big integers.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

const TRIAL_LIMIT: u64 = 1 << 20;
const WITNESSES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Miller–Rabin with the first thirteen primes as bases; deterministic
/// below 3.3·10²⁴.
pub fn is_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    for &p in &WITNESSES {
        let p = BigUint::from(p);
        if *n == p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'outer: for &a in &WITNESSES {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Distinct prime divisors of `n`, ascending. A cofactor that survives
/// trial division and is not prime is returned separately.
pub fn prime_divisors(n: &BigUint) -> (Vec<BigUint>, Option<BigUint>) {
    let mut primes = Vec::new();
    if n.is_zero() {
        return (primes, None);
    }
    let mut rest = n.clone();
    let mut p = 2u64;
    while p <= TRIAL_LIMIT {
        let bp = BigUint::from(p);
        if &bp * &bp > rest {
            break;
        }
        if (&rest % &bp).is_zero() {
            primes.push(bp.clone());
            while (&rest % &bp).is_zero() {
                rest /= &bp;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest.is_one() {
        return (primes, None);
    }
    if is_prime(&rest) || rest.to_u64().is_some_and(|r| r <= TRIAL_LIMIT * TRIAL_LIMIT) {
        primes.push(rest);
        primes.sort();
        return (primes, None);
    }
    (primes, Some(rest))
}

/// Largest divisor of `n` coprime to `l`.
pub fn strip_common_primes(n: &BigUint, l: &BigUint) -> BigUint {
    let mut n = n.clone();
    loop {
        let g = n.gcd(l);
        if g.is_one() || n.is_zero() {
            return n;
        }
        n /= g;
    }
}

/// True when `n = p^e` for a prime `p` and `e ≥ 2`.
pub fn is_proper_prime_power(n: &BigUint) -> bool {
    let (primes, rest) = prime_divisors(n);
    rest.is_none() && primes.len() == 1 && primes[0] != *n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..60).filter(|&x| is_prime(&b(x))).collect();
        assert_eq!(primes, [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
        assert!(is_prime(&b(1_000_000_007)));
        assert!(!is_prime(&b(3_215_031_751))); // strong pseudoprime to bases 2, 3, 5, 7
    }

    #[test]
    fn divisors() {
        assert_eq!(prime_divisors(&b(360)).0, [b(2), b(3), b(5)]);
        assert_eq!(prime_divisors(&b(1)).0, Vec::<BigUint>::new());
        assert_eq!(prime_divisors(&b(97)).0, [b(97)]);
        assert_eq!(strip_common_primes(&b(12), &b(2)), b(3));
        assert_eq!(strip_common_primes(&b(2), &b(2)), b(1));
        assert!(is_proper_prime_power(&b(4)));
        assert!(!is_proper_prime_power(&b(2)));
        assert!(!is_proper_prime_power(&b(6)));
    }
}
