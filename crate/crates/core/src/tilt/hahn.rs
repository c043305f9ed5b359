use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::finite_field::{Coeff, FiniteField};
use crate::error::{Error, Result};

pub type Exponent = Rational64;

/// A truncated Hahn series `Σ c_a t^a` over `F_{p^k}` with rational exponents.
///
/// Terms with exponent `>= cap` are unknown and never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct HahnSeries {
    field: Arc<FiniteField>,
    terms: BTreeMap<Exponent, Coeff>,
    cap: Exponent,
}

impl fmt::Debug for HahnSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for HahnSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let coeff: Vec<String> = c.iter().map(|x| x.to_string()).collect();
            write!(f, "[{}]t^{}", coeff.join(","), e)?;
        }
        write!(f, " + O(t^{})", self.cap)
    }
}

fn ratio(e: Exponent) -> String {
    if e.denom().is_one() {
        e.numer().to_string()
    } else {
        format!("{}/{}", e.numer(), e.denom())
    }
}

pub fn parse_exponent(s: &str) -> Result<Exponent> {
    let bad = || Error::Parse(format!("bad exponent {s:?}"));
    match s.trim().split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Rational64::new(n, d))
        }
        None => Ok(Rational64::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

impl HahnSeries {
    pub fn zero(field: Arc<FiniteField>, cap: Exponent) -> Self {
        HahnSeries {
            field,
            terms: BTreeMap::new(),
            cap,
        }
    }

    pub fn one(field: Arc<FiniteField>, cap: Exponent) -> Self {
        let one = field.one();
        Self::monomial(field, one, Exponent::zero(), cap)
    }

    /// `c · t^a`, or zero when `a >= cap` or `c = 0`.
    pub fn monomial(field: Arc<FiniteField>, c: Coeff, a: Exponent, cap: Exponent) -> Self {
        let mut s = Self::zero(field, cap);
        s.insert(a, c);
        s
    }

    /// `t^a` with coefficient 1.
    pub fn t_pow(field: Arc<FiniteField>, a: Exponent, cap: Exponent) -> Self {
        let one = field.one();
        Self::monomial(field, one, a, cap)
    }

    pub fn from_terms(
        field: Arc<FiniteField>,
        terms: impl IntoIterator<Item = (Exponent, Coeff)>,
        cap: Exponent,
    ) -> Self {
        let mut s = Self::zero(field, cap);
        for (a, c) in terms {
            let merged = match s.terms.remove(&a) {
                Some(old) => s.field.add(&old, &c),
                None => c,
            };
            s.insert(a, merged);
        }
        s
    }

    fn insert(&mut self, a: Exponent, c: Coeff) {
        if a < self.cap && !self.field.is_zero(&c) {
            self.terms.insert(a, c);
        }
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    pub fn cap(&self) -> Exponent {
        self.cap
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, Coeff> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Least exponent, or `None` for a series indistinguishable from zero.
    pub fn valuation(&self) -> Option<Exponent> {
        self.terms.keys().next().copied()
    }

    pub fn leading(&self) -> Option<(Exponent, &Coeff)> {
        self.terms.iter().next().map(|(a, c)| (*a, c))
    }

    pub fn coefficient(&self, a: Exponent) -> Coeff {
        self.terms.get(&a).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn truncate(&self, cap: Exponent) -> Self {
        let cap = cap.min(self.cap);
        HahnSeries {
            field: self.field.clone(),
            terms: self.terms.range(..cap).map(|(a, c)| (*a, c.clone())).collect(),
            cap,
        }
    }

    pub fn with_cap(&self, cap: Exponent) -> Self {
        self.truncate(cap)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.field.p() != other.field.p() {
            return Err(Error::PrimeMismatch {
                left: self.field.p(),
                right: other.field.p(),
            });
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch(format!(
                "{:?} vs {:?}",
                self.field, other.field
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let cap = self.cap.min(other.cap);
        let mut out = self.truncate(cap);
        for (a, c) in other.terms.range(..cap) {
            let merged = match out.terms.remove(a) {
                Some(old) => self.field.add(&old, c),
                None => c.clone(),
            };
            out.insert(*a, merged);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        HahnSeries {
            field: self.field.clone(),
            terms: self
                .terms
                .iter()
                .map(|(a, c)| (*a, self.field.neg(c)))
                .collect(),
            cap: self.cap,
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Multiply by a coefficient-field scalar.
    pub fn scale(&self, c: &[u64]) -> Self {
        let mut out = Self::zero(self.field.clone(), self.cap);
        for (a, x) in &self.terms {
            out.insert(*a, self.field.mul(x, c));
        }
        out
    }

    /// Cap of a product: the minimum cap, lowered further if a factor has
    /// negative valuation.
    fn product_cap(&self, other: &Self) -> Exponent {
        let mut cap = self.cap.min(other.cap);
        if let Some(v) = other.valuation() {
            cap = cap.min(self.cap + v);
        }
        if let Some(v) = self.valuation() {
            cap = cap.min(other.cap + v);
        }
        cap
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let cap = self.product_cap(other);
        let mut acc: BTreeMap<Exponent, Coeff> = BTreeMap::new();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let e = *a + *b;
                if e >= cap {
                    // Exponents of `other` ascend, so the rest are larger still.
                    break;
                }
                let prod = self.field.mul(x, y);
                match acc.get_mut(&e) {
                    Some(c) => *c = self.field.add(c, &prod),
                    None => {
                        acc.insert(e, prod);
                    }
                }
            }
        }
        Ok(Self::from_terms(self.field.clone(), acc, cap))
    }

    /// Inverse via the geometric series off the leading term.
    ///
    /// For `x = c t^a (1 + r)` known below `cap`, the relative precision
    /// `cap − a` carries over, so the result is known below `cap − 2a`.
    pub fn inv(&self) -> Result<Self> {
        let (a, c) = self.leading().ok_or(Error::ZeroElement)?;
        let field = self.field.clone();
        let c_inv = field.inv(c)?;
        let rel = self.cap - a;
        // r = (x / (c t^a)) − 1, with exponents shifted to start above 0.
        let mut r = Self::zero(field.clone(), rel);
        for (e, x) in self.terms.iter().skip(1) {
            r.insert(*e - a, field.mul(x, &c_inv));
        }
        let neg_r = r.neg();
        let mut sum = Self::one(field.clone(), rel);
        let mut power = Self::one(field.clone(), rel);
        while !power.is_zero() {
            power = power.mul(&neg_r)?.truncate(rel);
            if power.is_zero() {
                break;
            }
            sum = sum.add(&power)?;
        }
        let mut out = Self::zero(field.clone(), rel - a);
        for (e, x) in sum.terms {
            out.insert(e - a, field.mul(&x, &c_inv));
        }
        Ok(out)
    }

    pub fn pow(&self, n: u64) -> Result<Self> {
        let mut acc: Option<Self> = None;
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base)?,
                });
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc.unwrap_or_else(|| Self::one(self.field.clone(), self.cap)))
    }

    /// `Σ c t^a ↦ Σ c^p t^{pa}`.
    pub fn frobenius(&self) -> Self {
        let p = Exponent::from_integer(self.p() as i64);
        HahnSeries {
            field: self.field.clone(),
            terms: self
                .terms
                .iter()
                .map(|(a, c)| (*a * p, self.field.frobenius(c)))
                .collect(),
            cap: self.cap * p,
        }
    }

    pub fn frobenius_pow(&self, m: i64) -> Self {
        let mut x = self.clone();
        for _ in 0..m.unsigned_abs() {
            x = if m > 0 { x.frobenius() } else { x.inverse_frobenius() };
        }
        x
    }

    /// `Σ c t^a ↦ Σ c^{1/p} t^{a/p}`.
    pub fn inverse_frobenius(&self) -> Self {
        let p = Exponent::from_integer(self.p() as i64);
        HahnSeries {
            field: self.field.clone(),
            terms: self
                .terms
                .iter()
                .map(|(a, c)| (*a / p, self.field.pth_root(c)))
                .collect(),
            cap: self.cap / p,
        }
    }

    /// Agreement of all terms below the smaller cap.
    pub fn eq_within_precision(&self, other: &Self) -> bool {
        match self.sub(other) {
            Ok(d) => d.is_zero(),
            Err(_) => false,
        }
    }

    /// Multiply the leading coefficient to 1, when it lies in `F_p`.
    pub fn normalize_leading(&self) -> Self {
        match self.leading() {
            Some((_, c)) if self.field.in_prime_field(c) && !self.field.is_one(c) => {
                let inv = self.field.inv(c).expect("leading coefficient is nonzero");
                self.scale(&inv)
            }
            _ => self.clone(),
        }
    }

    /// A random series with positive valuation: `terms` monomials whose
    /// exponents are drawn from `{n/d : d ∈ denominators, 0 < n/d < cap}`.
    pub fn random_positive<R: Rng>(
        field: Arc<FiniteField>,
        rng: &mut R,
        cap: Exponent,
        terms: usize,
        denominators: &[i64],
    ) -> Self {
        let mut s = Self::zero(field.clone(), cap);
        let cap_f = cap.to_f64().unwrap_or(1.0);
        while s.terms.is_empty() {
            for _ in 0..terms.max(1) {
                let d = denominators[rng.gen_range(0..denominators.len())];
                let max_n = ((cap_f * d as f64).ceil() as i64 - 1).max(1);
                let n = rng.gen_range(1..=max_n);
                let a = Rational64::new(n, d);
                let c = field.random_nonzero(rng);
                let merged = match s.terms.remove(&a) {
                    Some(old) => field.add(&old, &c),
                    None => c,
                };
                s.insert(a, merged);
            }
        }
        s
    }

    pub fn to_json(&self) -> HahnJson {
        HahnJson {
            p: self.p(),
            k: self.field.degree(),
            cap: ratio(self.cap),
            terms: self
                .terms
                .iter()
                .map(|(a, c)| HahnTermJson {
                    exponent: ratio(*a),
                    coeff: c.clone(),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &HahnJson) -> Result<Self> {
        let field = FiniteField::get(json.p, json.k)?;
        let cap = parse_exponent(&json.cap)?;
        let mut terms = Vec::new();
        for t in &json.terms {
            if t.coeff.len() > json.k {
                return Err(Error::Parse(format!(
                    "coefficient {:?} longer than the extension degree {}",
                    t.coeff, json.k
                )));
            }
            terms.push((parse_exponent(&t.exponent)?, field.from_slice(&t.coeff)));
        }
        Ok(Self::from_terms(field, terms, cap))
    }

    /// Whether every exponent is non-negative (membership in the valuation ring).
    pub fn is_integral(&self) -> bool {
        self.valuation().is_none_or(|v| !v.is_negative())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HahnTermJson {
    pub exponent: String,
    pub coeff: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HahnJson {
    pub p: u64,
    pub k: usize,
    pub cap: String,
    pub terms: Vec<HahnTermJson>,
}
