//! Integer and rational helpers shared by the exact modules.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Primes `<= bound` in increasing order (sieve of Eratosthenes).
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i as u64)
        .collect()
}

/// The `index`-th prime (0-based): 2, 3, 5, ...
pub fn nth_prime(index: usize) -> u64 {
    let mut count = 0;
    let mut n = 1u64;
    loop {
        n += 1;
        if is_prime(n) {
            if count == index {
                return n;
            }
            count += 1;
        }
    }
}

/// Prime divisors of `|n|` by trial division, increasing.
pub fn prime_divisors(n: &BigInt) -> Vec<u64> {
    let mut m = n.abs();
    let mut out = Vec::new();
    if m.is_zero() {
        return out;
    }
    let mut d = 2u64;
    loop {
        let dd = BigInt::from(d);
        if &dd * &dd > m {
            break;
        }
        if (&m % &dd).is_zero() {
            out.push(d);
            while (&m % &dd).is_zero() {
                m /= &dd;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > BigInt::one() {
        let last = m
            .to_u64()
            .expect("remaining cofactor exceeds 64 bits; trial division bound reached");
        out.push(last);
    }
    out
}

/// p-adic valuation of a nonzero integer.
pub fn vp_int(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero(), "valuation of zero");
    let pp = BigInt::from(p);
    let mut m = n.clone();
    let mut v = 0;
    while (&m % &pp).is_zero() {
        m /= &pp;
        v += 1;
    }
    v
}

/// p-adic valuation of a nonzero rational.
pub fn vp_rat(q: &BigRational, p: u64) -> i64 {
    vp_int(q.numer(), p) as i64 - vp_int(q.denom(), p) as i64
}

pub fn pow_big(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

/// Non-negative residue of `a` modulo `m`.
pub fn mod_floor(a: &BigInt, m: &BigInt) -> BigInt {
    a.mod_floor(m)
}

pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.extended_gcd(m);
    if !g.gcd.is_one() && g.gcd != -BigInt::one() {
        return None;
    }
    let inv = if g.gcd.is_one() { g.x } else { -g.x };
    Some(inv.mod_floor(m))
}

/// Reduce a p-integral rational into `ℤ/m` (m a power of p).
pub fn rat_mod(q: &BigRational, m: &BigInt) -> Option<BigInt> {
    let inv = mod_inverse(q.denom(), m)?;
    Some((q.numer() * inv).mod_floor(m))
}

/// Legendre symbol (a/p) for an odd prime p.
pub fn legendre(a: i64, p: u64) -> i32 {
    let p_i = p as i64;
    let a = a.rem_euclid(p_i);
    if a == 0 {
        return 0;
    }
    let r = modpow_u64(a as u64, (p - 1) / 2, p);
    if r == 1 {
        1
    } else {
        -1
    }
}

pub fn modpow_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc: u128 = 1 % m as u128;
    let mm = m as u128;
    let mut b = base as u128 % mm;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % mm;
        }
        b = b * b % mm;
        exp >>= 1;
    }
    base = acc as u64;
    base
}

/// Tonelli–Shanks square root modulo an odd prime.
pub fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if modpow_u64(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let mulm = |x: u64, y: u64| ((x as u128 * y as u128) % p as u128) as u64;
    let mut q = p - 1;
    let mut s = 0;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while modpow_u64(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = modpow_u64(z, q, p);
    let mut t = modpow_u64(a, q, p);
    let mut r = modpow_u64(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mulm(tt, tt);
            i += 1;
        }
        let b = modpow_u64(c, 1 << (m - i - 1), p);
        m = i;
        c = mulm(b, b);
        t = mulm(t, c);
        r = mulm(r, b);
    }
    Some(r)
}

/// Parse `"n"` or `"n/d"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(BigRational::from_integer(n))
        }
    }
}

pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rat_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Very large numerators: go through logarithms.
        let sign = if q.is_negative() { -1.0 } else { 1.0 };
        sign * (ln_big(q.numer()) - ln_big(q.denom())).exp()
    })
}

/// Natural log of a positive big integer, accurate for huge values.
pub fn ln_big(n: &BigInt) -> f64 {
    assert!(n.sign() == Sign::Plus, "log of non-positive integer");
    let bits = n.bits();
    if bits < 1000 {
        return n.to_f64().expect("finite").ln();
    }
    let shift = bits - 60;
    let top: BigInt = n >> shift;
    top.to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of a positive rational.
pub fn ln_rat(q: &BigRational) -> f64 {
    ln_big(q.numer()) - ln_big(q.denom())
}

/// Base-p digits of `n`, least significant first.
pub fn digits_base(mut n: u64, p: u64) -> Vec<u64> {
    let mut out = Vec::new();
    while n > 0 {
        out.push(n % p);
        n /= p;
    }
    out
}

/// `binom(u, n) mod p` via Lucas' theorem on base-p digits. Digits of `u`
/// beyond the supplied slice are treated as zero.
pub fn binom_mod_p_lucas(u_digits: &[u64], n: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    let mut m = n;
    let mut i = 0;
    while m > 0 {
        let ni = m % p;
        let ui = u_digits.get(i).copied().unwrap_or(0);
        if ni > ui {
            return 0;
        }
        acc = acc * small_binom_mod(ui, ni, p) % p;
        m /= p;
        i += 1;
    }
    acc
}

fn small_binom_mod(n: u64, k: u64, p: u64) -> u64 {
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..k {
        num = num * ((n - i) % p) % p;
        den = den * ((i + 1) % p) % p;
    }
    num * modpow_u64(den, p - 2, p) % p
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        assert_eq!(primes_up_to(10), vec![2, 3, 5, 7]);
        assert_eq!(nth_prime(0), 2);
        assert_eq!(nth_prime(4), 11);
        assert!(is_prime(47));
        assert!(!is_prime(49));
    }

    #[test]
    fn divisors_and_valuations() {
        assert_eq!(prime_divisors(&BigInt::from(-360)), vec![2, 3, 5]);
        assert_eq!(vp_int(&BigInt::from(48), 2), 4);
        let q = BigRational::new(BigInt::from(6), BigInt::from(35));
        assert_eq!(vp_rat(&q, 5), -1);
        assert_eq!(vp_rat(&q, 3), 1);
    }

    #[test]
    fn lucas_matches_direct_binomials() {
        let p = 3;
        for u in 0..60u64 {
            let digits = digits_base(u, p);
            for n in 0..=u {
                let direct = (factorial(u) / (factorial(n) * factorial(u - n))) % BigUint::from(p);
                assert_eq!(
                    BigUint::from(binom_mod_p_lucas(&digits, n, p)),
                    direct,
                    "u={u} n={n}"
                );
            }
        }
    }

    #[test]
    fn rational_round_trip() {
        let q = parse_rational("-6/4").unwrap();
        assert_eq!(format_rational(&q), "-3/2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn logs_of_huge_integers() {
        let n = num_traits::pow(BigInt::from(10), 400);
        assert!((ln_big(&n) - 400.0 * 10f64.ln()).abs() < 1e-9);
    }
}
