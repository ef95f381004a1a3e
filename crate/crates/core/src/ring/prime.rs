use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

const BASES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Miller-Rabin with the first 13 prime bases. This is deterministic below
/// 3.3 * 10^24; callers must reject larger inputs.
pub(crate) fn is_prime(n: &BigInt) -> bool {
    if n < &BigInt::from(2) {
        return false;
    }
    for &p in &BASES {
        let p = BigInt::from(p);
        if *n == p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let one = BigInt::one();
    let n1 = n - &one;
    let mut d = n1.clone();
    let mut s = 0u32;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    'outer: for &a in &BASES {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x == one || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

pub(crate) fn deterministic_bound() -> BigInt {
    "3317044064679887385961981".parse().unwrap()
}

/// Inverse of `a` modulo `n`, if it exists.
pub(crate) fn mod_inverse(a: &BigInt, n: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(n).extended_gcd(n);
    if !e.gcd.abs().is_one() {
        return None;
    }
    Some(e.x.mod_floor(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primes() {
        let primes: Vec<u32> = (0..60).filter(|&k| is_prime(&BigInt::from(k))).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
    }

    #[test]
    fn carmichael_and_large() {
        assert!(!is_prime(&BigInt::from(561)));
        assert!(!is_prime(&BigInt::from(3_215_031_751u64)));
        assert!(is_prime(&BigInt::from(1_000_000_007u64)));
        assert!(is_prime(&"170141183460469231731687303715884105727".parse().unwrap()));
    }

    #[test]
    fn inverse() {
        assert_eq!(mod_inverse(&BigInt::from(3), &BigInt::from(7)), Some(BigInt::from(5)));
        assert_eq!(mod_inverse(&BigInt::from(2), &BigInt::from(6)), None);
    }
}
