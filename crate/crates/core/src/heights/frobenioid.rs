use std::collections::BTreeMap;
use std::ops::Add;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::adelic::{beltrami_at, Arithmeticoid};
use crate::arith::{pow_big, rat_to_f64};
use crate::error::{Error, Result};
use crate::numfield::{ord, places_over, support_places, FieldElement, NumberField, Place};

/// A divisor `Σ c_v [v]` on the finite places; zero coefficients are not stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Divisor<C> {
    entries: BTreeMap<Place, C>,
}

impl<C: Clone + Zero + PartialOrd> Divisor<C> {
    pub fn zero() -> Self {
        Divisor {
            entries: BTreeMap::new(),
        }
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (Place, C)>) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (v, c) in entries {
            if v.is_archimedean() {
                return Err(Error::PlaceMismatch("divisors live on finite places".into()));
            }
            if !c.is_zero() {
                out.insert(v, c);
            }
        }
        Ok(Divisor { entries: out })
    }

    pub fn entries(&self) -> &BTreeMap<Place, C> {
        &self.entries
    }

    pub fn coefficient(&self, v: &Place) -> C {
        self.entries.get(v).cloned().unwrap_or_else(C::zero)
    }

    pub fn is_effective(&self) -> bool {
        self.entries.values().all(|c| *c >= C::zero())
    }

    pub fn map<D: Clone + Zero + PartialOrd>(&self, f: impl Fn(&C) -> D) -> Divisor<D> {
        Divisor {
            entries: self
                .entries
                .iter()
                .map(|(v, c)| (*v, f(c)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }
}

impl<C: Clone + Zero + PartialOrd + Add<Output = C>> Divisor<C> {
    /// The monoid law: pointwise sum of coefficients.
    pub fn add(&self, other: &Self) -> Self {
        let mut entries = self.entries.clone();
        for (v, c) in &other.entries {
            let sum = entries.remove(v).unwrap_or_else(C::zero) + c.clone();
            if !sum.is_zero() {
                entries.insert(*v, sum);
            }
        }
        Divisor { entries }
    }
}

/// Exponent domain of a Frobenioid's divisor monoid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrobenioidMode {
    /// `ℤ_{≥0}`: the Frobenioid of the number field.
    Integral,
    /// `ℚ_{≥0}`: the perfection.
    Perfect,
    /// `ℝ_{≥0}`: the realification.
    Realified,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Frobenioid {
    pub field: NumberField,
    pub mode: FrobenioidMode,
}

impl Frobenioid {
    /// Whether an effective rational divisor lies in this monoid.
    pub fn contains(&self, d: &Divisor<BigRational>) -> bool {
        d.is_effective()
            && match self.mode {
                FrobenioidMode::Integral => d.entries.values().all(|c| c.is_integer()),
                FrobenioidMode::Perfect | FrobenioidMode::Realified => true,
            }
    }

    pub fn perfection(&self) -> Self {
        Frobenioid {
            field: self.field,
            mode: FrobenioidMode::Perfect,
        }
    }

    pub fn realify(&self) -> Self {
        Frobenioid {
            field: self.field,
            mode: FrobenioidMode::Realified,
        }
    }
}

pub fn frobenioid_of(field: NumberField) -> Frobenioid {
    Frobenioid {
        field,
        mode: FrobenioidMode::Integral,
    }
}

/// The value monoid of an arithmeticoid: divisors whose coefficient at `v`
/// is `(e_v / f_v) · ord_v(x)`, which is the perfection of the integral one.
pub fn frobenioid_of_arithmeticoid(y: &Arithmeticoid) -> Frobenioid {
    frobenioid_of(y.field()).perfection()
}

impl Frobenioid {
    /// The divisor of `x` measured by `|·|_{K_y}`: `(e_v / f_v) ord_v(x)` at `v`.
    pub fn value_divisor(y: &Arithmeticoid, x: &FieldElement) -> Result<Divisor<BigRational>> {
        let d = principal_divisor(x)?;
        let mut out = Vec::new();
        for (v, k) in d.entries() {
            let scale = beltrami_at(y, *v) / BigRational::from_integer(BigInt::from(v.f()));
            out.push((*v, scale * BigRational::from_integer(k.clone())));
        }
        Divisor::from_entries(out)
    }
}

/// `div(x) = Σ ord_v(x) [v]` in `Φ^{gp}`, positive at zeros.
pub fn principal_divisor(x: &FieldElement) -> Result<Divisor<BigInt>> {
    if x.is_zero() {
        return Err(Error::ZeroElement);
    }
    let mut entries = Vec::new();
    for v in support_places(x)? {
        entries.push((v, BigInt::from(ord(x, &v)?)));
    }
    Divisor::from_entries(entries)
}

/// The inclusion into the perfection.
pub fn perfection(d: &Divisor<BigInt>) -> Divisor<BigRational> {
    d.map(|c| BigRational::from_integer(c.clone()))
}

pub fn realify(d: &Divisor<BigRational>) -> Divisor<f64> {
    d.map(rat_to_f64)
}

/// Pullback under `𝛗^m`: the coefficient at `v | p` is scaled by `p^{−m}`.
pub fn frobenius_pullback(d: &Divisor<BigRational>, m: i64) -> Divisor<BigRational> {
    let entries = d.entries.iter().map(|(v, c)| {
        let p = v.prime().expect("finite place");
        let pm = BigRational::from_integer(pow_big(p, m.unsigned_abs() as u32));
        let c = if m >= 0 { c / pm } else { c * pm };
        (*v, c)
    });
    Divisor {
        entries: entries.collect(),
    }
}

/// An element generating the prime ideal `v`, found by a norm-form search.
fn prime_generator(field: NumberField, v: Place) -> Result<FieldElement> {
    let fp = v.finite().ok_or_else(|| Error::PlaceMismatch("finite place expected".into()))?;
    let p = fp.p();
    if field.is_rational() || fp.f() == 2 {
        return Ok(FieldElement::from_int(field, p as i64));
    }
    let t = field.omega_trace();
    let n = field.omega_norm();
    let disc = (4 * n - t * t) as u64;
    let target = p as i128;
    let b_max = ((4 * p) as f64 / disc as f64).sqrt().ceil() as i64 + 1;
    let a_max = (2.0 * (p as f64).sqrt()).ceil() as i64 + b_max + 1;
    for b in 0..=b_max {
        for a in -a_max..=a_max {
            let (ai, bi) = (a as i128, b as i128);
            let norm = ai * ai + (t as i128) * ai * bi + (n as i128) * bi * bi;
            if norm != target {
                continue;
            }
            let x = FieldElement::from_ints(field, a, b);
            if ord(&x, &v)? == 1 {
                return Ok(x);
            }
            let c = x.conjugate();
            if ord(&c, &v)? == 1 {
                return Ok(c);
            }
        }
    }
    Err(Error::NonPrincipal(format!("{v} is not principal in {field}")))
}

/// An `x` with `div(x) = d`, when the ideal is principal.
pub fn principal_generator(field: NumberField, d: &Divisor<BigInt>) -> Result<FieldElement> {
    let mut x = FieldElement::one(field);
    for (v, k) in d.entries() {
        let p = v.prime().expect("finite place");
        if !places_over(field, p)?.contains(v) {
            return Err(Error::PlaceMismatch(format!("{v} is not a place of {field}")));
        }
        let k = k
            .to_i64()
            .ok_or_else(|| Error::InvalidArgument(format!("exponent {k} too large")))?;
        x = &x * &prime_generator(field, *v)?.pow(k)?;
    }
    debug_assert_eq!(&principal_divisor(&x)?, d);
    Ok(x)
}

impl Divisor<BigRational> {
    /// Whether every coefficient is an integer multiple of `p^{−k}` for the
    /// prime `p` below its place.
    pub fn has_p_power_denominators(&self) -> bool {
        self.entries.iter().all(|(v, c)| {
            let p = BigInt::from(v.prime().expect("finite"));
            let mut d = c.denom().abs();
            while (&d % &p).is_zero() {
                d /= &p;
            }
            d.is_one()
        })
    }
}
