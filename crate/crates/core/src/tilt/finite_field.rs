use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;

use crate::arith::is_prime;
use crate::error::{Error, Result};

/// A coefficient of `F_{p^k}`: residues `c_0 + c_1 x + … + c_{k−1} x^{k−1}`
/// modulo the field's defining polynomial, each `c_i < p`.
pub type Coeff = Vec<u64>;

/// `F_{p^k} = F_p[x]/(f)` for the first monic irreducible `f` of degree `k`
/// in the order given by reading its lower coefficients as base-`p` digits.
#[derive(PartialEq, Eq)]
pub struct FiniteField {
    p: u64,
    k: usize,
    /// Monic modulus, lowest coefficient first, length `k + 1`.
    modulus: Vec<u64>,
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}", self.p, self.k)
    }
}

fn cache() -> &'static Mutex<HashMap<(u64, usize), Arc<FiniteField>>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), Arc<FiniteField>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

#[inline]
fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mulmod(x, y, p)) % p;
        }
    }
    trim(&mut out);
    out
}

/// Remainder of `a` modulo a nonzero polynomial `m` (any leading coefficient).
fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = crate::arith::modpow_u64(m[dm], p - 2, p);
    while r.len() > dm {
        let dr = r.len() - 1;
        let c = mulmod(r[dr], lead_inv, p);
        for i in 0..=dm {
            let sub = mulmod(c, m[i], p);
            r[dr - dm + i] = (r[dr - dm + i] + p - sub) % p;
        }
        trim(&mut r);
    }
    r
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = poly_rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

fn poly_powmod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = poly_rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_rem(&poly_mul(&acc, &b, p), m, p);
        }
        b = poly_rem(&poly_mul(&b, &b, p), m, p);
        e >>= 1;
    }
    acc
}

/// Rabin's irreducibility test for a monic `f` of degree `k` over `F_p`.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let k = f.len() - 1;
    if k == 1 {
        return true;
    }
    if f[0] == 0 {
        return false;
    }
    let x = vec![0u64, 1];
    // frob[j] = x^{p^j} mod f
    let mut frob = vec![poly_rem(&x, f, p)];
    for _ in 0..k {
        let last = frob.last().unwrap().clone();
        frob.push(poly_powmod(&last, p, f, p));
    }
    let mut xr = poly_rem(&x, f, p);
    trim(&mut xr);
    let mut top = frob[k].clone();
    trim(&mut top);
    if top != xr {
        return false;
    }
    let mut n = k;
    let mut q = 2;
    let mut prime_factors = Vec::new();
    while q * q <= n {
        if n % q == 0 {
            prime_factors.push(q);
            while n % q == 0 {
                n /= q;
            }
        }
        q += 1;
    }
    if n > 1 {
        prime_factors.push(n);
    }
    for q in prime_factors {
        let h = &frob[k / q];
        let mut diff = h.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        trim(&mut diff);
        let g = poly_gcd(f, &diff, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

impl FiniteField {
    /// The (cached) field `F_{p^k}`.
    pub fn get(p: u64, k: usize) -> Result<Arc<FiniteField>> {
        if !is_prime(p) {
            return Err(Error::InvalidArgument(format!("{p} is not prime")));
        }
        if k == 0 || k > 64 {
            return Err(Error::InvalidArgument(format!("extension degree {k} out of range 1..=64")));
        }
        if p > u32::MAX as u64 {
            return Err(Error::InvalidArgument(format!("prime {p} too large for the coefficient model")));
        }
        if let Some(f) = cache().lock().expect("field cache").get(&(p, k)) {
            return Ok(f.clone());
        }
        let field = Arc::new(Self::search(p, k));
        cache()
            .lock()
            .expect("field cache")
            .insert((p, k), field.clone());
        Ok(field)
    }

    fn search(p: u64, k: usize) -> FiniteField {
        let mut digits = vec![0u64; k];
        loop {
            let mut f = digits.clone();
            f.push(1);
            if is_irreducible(&f, p) {
                return FiniteField { p, k, modulus: f };
            }
            // Next base-p counter value.
            let mut i = 0;
            loop {
                digits[i] += 1;
                if digits[i] < p {
                    break;
                }
                digits[i] = 0;
                i += 1;
                assert!(i < k, "an irreducible polynomial of every degree exists");
            }
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn order(&self) -> BigUint {
        num_traits::pow(BigUint::from(self.p), self.k)
    }

    pub fn zero(&self) -> Coeff {
        vec![0; self.k]
    }

    pub fn one(&self) -> Coeff {
        self.from_int(1)
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, n: i64) -> Coeff {
        let mut c = self.zero();
        c[0] = n.rem_euclid(self.p as i64) as u64;
        c
    }

    /// Coefficient vector from arbitrary integers (reduced, padded or reduced modulo `f`).
    pub fn from_slice(&self, coeffs: &[u64]) -> Coeff {
        let reduced: Vec<u64> = coeffs.iter().map(|c| c % self.p).collect();
        let mut r = poly_rem(&reduced, &self.modulus, self.p);
        r.resize(self.k, 0);
        r
    }

    pub fn is_zero(&self, a: &[u64]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self, a: &[u64]) -> bool {
        a[0] == 1 % self.p && a[1..].iter().all(|&c| c == 0)
    }

    /// Whether `a` lies in the prime field `F_p`.
    pub fn in_prime_field(&self, a: &[u64]) -> bool {
        a[1..].iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Coeff {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.p).collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> Coeff {
        a.iter().zip(b).map(|(x, y)| (x + self.p - y) % self.p).collect()
    }

    pub fn neg(&self, a: &[u64]) -> Coeff {
        a.iter().map(|x| (self.p - x) % self.p).collect()
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Coeff {
        let prod = poly_mul(a, b, self.p);
        let mut r = poly_rem(&prod, &self.modulus, self.p);
        r.resize(self.k, 0);
        r
    }

    /// Multiply by an element of the prime field.
    pub fn scale(&self, a: &[u64], c: u64) -> Coeff {
        a.iter().map(|&x| mulmod(x, c % self.p, self.p)).collect()
    }

    pub fn pow(&self, a: &[u64], e: &BigUint) -> Coeff {
        let mut acc = self.one();
        let mut base = a.to_vec();
        let bits = e.bits();
        for i in 0..bits {
            if e.bit(i) {
                acc = self.mul(&acc, &base);
            }
            if i + 1 < bits {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    pub fn pow_u64(&self, a: &[u64], e: u64) -> Coeff {
        self.pow(a, &BigUint::from(e))
    }

    pub fn inv(&self, a: &[u64]) -> Result<Coeff> {
        if self.is_zero(a) {
            return Err(Error::ZeroElement);
        }
        let e = self.order() - BigUint::from(2u32);
        Ok(self.pow(a, &e))
    }

    /// The absolute Frobenius `a ↦ a^p`.
    pub fn frobenius(&self, a: &[u64]) -> Coeff {
        self.pow_u64(a, self.p)
    }

    /// The unique `p`-th root, `a^{p^{k−1}}`.
    pub fn pth_root(&self, a: &[u64]) -> Coeff {
        let mut r = a.to_vec();
        for _ in 1..self.k {
            r = self.frobenius(&r);
        }
        r
    }

    pub fn random<R: Rng>(&self, rng: &mut R) -> Coeff {
        (0..self.k).map(|_| rng.gen_range(0..self.p)).collect()
    }

    pub fn random_nonzero<R: Rng>(&self, rng: &mut R) -> Coeff {
        loop {
            let c = self.random(rng);
            if !self.is_zero(&c) {
                return c;
            }
        }
    }

    /// Multiplicative order check helper: `a^{q−1} = 1` for nonzero `a`.
    pub fn satisfies_fermat(&self, a: &[u64]) -> bool {
        let e = self.order() - BigUint::one();
        self.is_one(&self.pow(a, &e))
    }
}
