use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::element::FieldElement;
use super::field::NumberField;
use super::place::{split_root, splitting, FinitePlace, Place, Splitting};
use crate::arith::{ln_rat, mod_inverse, pow_big, prime_divisors, vp_int, vp_rat};
use crate::error::{Error, Result};

/// Normalized additive valuation at a finite place (`ord(π_v) = 1`).
pub fn ord(x: &FieldElement, v: &Place) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::InfiniteOrder);
    }
    let fp = v
        .finite()
        .ok_or_else(|| Error::InvalidArgument("ord is only defined at finite places".into()))?;
    let p = fp.p();
    let field = x.field();
    let (a, b, den) = x.integral_parts();
    let vden = vp_int(&den, p) as i64;
    Ok(match splitting(field, p) {
        Splitting::Rational => vp_int(&a, p) as i64 - vden,
        Splitting::Inert => {
            let va = if a.is_zero() { u32::MAX } else { vp_int(&a, p) };
            let vb = if b.is_zero() { u32::MAX } else { vp_int(&b, p) };
            va.min(vb) as i64 - vden
        }
        Splitting::Ramified => vp_rat(&x.norm(), p),
        Splitting::Split => split_numerator_ord(field, &a, &b, fp) - vden,
    })
}

fn split_numerator_ord(field: NumberField, a: &BigInt, b: &BigInt, fp: &FinitePlace) -> i64 {
    let p = fp.p();
    let t = BigInt::from(field.omega_trace());
    let n = BigInt::from(field.omega_norm());
    let norm = a * a + &t * a * b + &n * b * b;
    // v(A + Bω) <= v_p(N(A + Bω)), so precision one beyond the norm suffices.
    let k = vp_int(&norm, p) + 1;
    let r = split_root(field, fp, k);
    let img = (a + b * r).mod_floor(&pow_big(p, k));
    vp_int(&img, p) as i64
}

/// A local uniformizer at a finite place, as a field element.
pub fn uniformizer(field: NumberField, v: &Place) -> Result<FieldElement> {
    let p = v
        .prime()
        .ok_or_else(|| Error::InvalidArgument("no uniformizer at the archimedean place".into()))?;
    if splitting(field, p) != Splitting::Ramified {
        return Ok(FieldElement::from_int(field, p as i64));
    }
    let d = field.d().expect("ramified places only occur in quadratic fields");
    if d % p == 0 {
        FieldElement::sqrt_minus_d(field)
    } else {
        // p = 2 with d ≡ 1 (mod 4): N(1 + √−d) = 1 + d ≡ 2 (mod 4).
        Ok(FieldElement::from_ints(field, 1, 1))
    }
}

/// An element of `O_v / p^m O_v`, written `a + bω` (with `b = 0` when the
/// completion is `ℚ_p`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalResidue {
    p: u64,
    m: u32,
    f: u32,
    quadratic: bool,
    t: i64,
    n: i64,
    a: BigInt,
    b: BigInt,
}

impl LocalResidue {
    /// The residue `a + bω` in `O_v / p^m` at the finite place `v`.
    pub fn from_coords(field: NumberField, v: &Place, m: u32, a: BigInt, b: BigInt) -> Result<Self> {
        let fp = *v
            .finite()
            .ok_or_else(|| Error::InvalidArgument("residues live at finite places".into()))?;
        let p = fp.p();
        let modulus = pow_big(p, m);
        let quadratic = matches!(splitting(field, p), Splitting::Inert | Splitting::Ramified);
        if !quadratic && !b.is_zero() {
            return Err(Error::InvalidArgument(format!(
                "the completion at {v} is Q_{p}; the w-coordinate must be 0"
            )));
        }
        Ok(LocalResidue {
            p,
            m,
            f: fp.f(),
            quadratic,
            t: if quadratic { field.omega_trace() } else { 0 },
            n: if quadratic { field.omega_norm() } else { 0 },
            a: a.mod_floor(&modulus),
            b: b.mod_floor(&modulus),
        })
    }

    fn modulus(&self) -> BigInt {
        pow_big(self.p, self.m)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.m
    }

    pub fn coords(&self) -> (&BigInt, &BigInt) {
        (&self.a, &self.b)
    }

    /// Size `p^f` of the residue field of the place.
    pub fn residue_field_size(&self) -> BigInt {
        pow_big(self.p, self.f)
    }

    pub fn is_one(&self) -> bool {
        self.one_like() == *self
    }

    pub fn one_like(&self) -> Self {
        LocalResidue {
            a: BigInt::one().mod_floor(&self.modulus()),
            b: BigInt::zero(),
            ..self.clone()
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(
            (self.p, self.m, self.quadratic),
            (other.p, other.m, other.quadratic),
            "residues from different rings"
        );
        let m = self.modulus();
        let bd = &self.b * &other.b;
        let a = (&self.a * &other.a - BigInt::from(self.n) * &bd).mod_floor(&m);
        let b = (&self.a * &other.b + &self.b * &other.a + BigInt::from(self.t) * bd).mod_floor(&m);
        LocalResidue {
            a,
            b,
            ..self.clone()
        }
    }

    pub fn pow(&self, e: &BigInt) -> Self {
        assert!(!e.is_negative(), "negative exponent on a residue");
        let mut acc = self.one_like();
        let mut base = self.clone();
        let mut e = e.clone();
        while !e.is_zero() {
            if e.is_odd() {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
}

/// `ord_v(x)` together with the residue of `x / π_v^{ord}` in `O_v / p^m`.
pub fn unit_residue(x: &FieldElement, v: &Place, m: u32) -> Result<(i64, LocalResidue)> {
    let k = ord(x, v)?;
    let fp = *v.finite().expect("ord succeeded, so v is finite");
    let p = fp.p();
    let field = x.field();
    let modulus = pow_big(p, m);
    let kind = splitting(field, p);
    let quadratic = matches!(kind, Splitting::Inert | Splitting::Ramified);
    let mk = |a: BigInt, b: BigInt| LocalResidue {
        p,
        m,
        f: fp.f(),
        quadratic,
        t: if quadratic { field.omega_trace() } else { 0 },
        n: if quadratic { field.omega_norm() } else { 0 },
        a: a.mod_floor(&modulus),
        b: if quadratic { b.mod_floor(&modulus) } else { BigInt::zero() },
    };
    let (a, b, den) = x.integral_parts();
    let vden = vp_int(&den, p);
    let den_unit = &den / pow_big(p, vden);
    let den_inv = mod_inverse(&den_unit, &modulus).expect("prime-to-p part is invertible");
    Ok(match kind {
        Splitting::Rational => {
            let va = vp_int(&a, p);
            let au = &a / pow_big(p, va);
            (k, mk(au * den_inv, BigInt::zero()))
        }
        Splitting::Split => {
            let vnum = (k + vden as i64) as u32;
            let r = split_root(field, &fp, m + vnum);
            let img = (&a + &b * r).mod_floor(&pow_big(p, m + vnum));
            let unit = img / pow_big(p, vnum);
            (k, mk(unit * den_inv, BigInt::zero()))
        }
        Splitting::Inert => {
            let shift = pow_big(p, (k + vden as i64) as u32);
            (k, mk(&a / &shift * &den_inv, &b / &shift * &den_inv))
        }
        Splitting::Ramified => {
            let pi = uniformizer(field, v)?;
            let u = x * &pi.pow(-k)?;
            let (ua, ub, uden) = u.integral_parts();
            let inv = mod_inverse(&uden, &modulus)
                .ok_or_else(|| Error::InvalidArgument("unit has p in its denominator".into()))?;
            (k, mk(ua * &inv, ub * inv))
        }
    })
}

/// `log |x|_v` for the Artin-normalized absolute value.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LogAbs {
    /// `log|x|_v = exponent · log p`, exactly.
    Finite {
        prime: u64,
        #[serde(serialize_with = "crate::numfield::ser_rational")]
        exponent: BigRational,
    },
    /// `|x|_∞` itself (the norm to ℝ, a positive rational) and its logarithm.
    Archimedean {
        #[serde(serialize_with = "crate::numfield::ser_rational")]
        modulus: BigRational,
        log: f64,
    },
}

impl LogAbs {
    pub fn ln(&self) -> f64 {
        match self {
            LogAbs::Finite { prime, exponent } => {
                crate::arith::rat_to_f64(exponent) * (*prime as f64).ln()
            }
            LogAbs::Archimedean { log, .. } => *log,
        }
    }
}

/// Artin-normalized archimedean absolute value: `|N_{L/ℚ}(x)|`, exact.
pub fn archimedean_modulus(x: &FieldElement) -> BigRational {
    x.norm().abs()
}

pub fn standard_abs(x: &FieldElement, v: &Place) -> Result<LogAbs> {
    if x.is_zero() {
        return Err(Error::ZeroElement);
    }
    match v {
        Place::Archimedean => {
            let modulus = archimedean_modulus(x);
            let log = ln_rat(&modulus);
            Ok(LogAbs::Archimedean { modulus, log })
        }
        Place::Finite(fp) => {
            let k = ord(x, v)?;
            Ok(LogAbs::Finite {
                prime: fp.p(),
                exponent: BigRational::from_integer(BigInt::from(-(fp.f() as i64) * k)),
            })
        }
    }
}

/// Rational primes below which `x` can have nonzero order.
pub fn support_primes(x: &FieldElement) -> Vec<u64> {
    let (a, b, den) = x.integral_parts();
    let field = x.field();
    let t = BigInt::from(field.omega_trace());
    let n = BigInt::from(field.omega_norm());
    let num_norm = if field.is_rational() {
        a
    } else {
        &a * &a + &t * &a * &b + &n * &b * &b
    };
    let mut ps = prime_divisors(&num_norm);
    ps.extend(prime_divisors(&den));
    ps.sort_unstable();
    ps.dedup();
    ps
}

/// Finite places with nonzero order, ascending.
pub fn support_places(x: &FieldElement) -> Result<Vec<Place>> {
    let mut out = Vec::new();
    for p in support_primes(x) {
        for v in super::place::places_over(x.field(), p)? {
            if ord(x, &v)? != 0 {
                out.push(v);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct ProductFormulaReport {
    /// `Σ_{v|p} log|x|_v / log p`, exact, per prime in the support.
    #[serde(serialize_with = "crate::numfield::ser_rational_map")]
    pub finite_exponent_sum: BTreeMap<u64, BigRational>,
    /// `v_p(|x|_∞)` for the exact archimedean modulus.
    #[serde(serialize_with = "crate::numfield::ser_rational_map")]
    pub archimedean_exponents: BTreeMap<u64, BigRational>,
    pub archimedean_log: f64,
    /// Whether every finite sum is exactly the negated archimedean exponent.
    pub exact_cancellation: bool,
    pub residual: f64,
}

pub fn product_formula_check(x: &FieldElement) -> Result<ProductFormulaReport> {
    if x.is_zero() {
        return Err(Error::ZeroElement);
    }
    let field = x.field();
    let mut finite: BTreeMap<u64, BigRational> = BTreeMap::new();
    for p in support_primes(x) {
        let mut sum = BigRational::zero();
        for v in super::place::places_over(field, p)? {
            if let LogAbs::Finite { exponent, .. } = standard_abs(x, &v)? {
                sum += exponent;
            }
        }
        if !sum.is_zero() {
            finite.insert(p, sum);
        }
    }
    let modulus = archimedean_modulus(x);
    let mut arch = BTreeMap::new();
    let mut primes = prime_divisors(modulus.numer());
    primes.extend(prime_divisors(modulus.denom()));
    for p in primes {
        let e = vp_rat(&modulus, p);
        if e != 0 {
            arch.insert(p, BigRational::from_integer(e.into()));
        }
    }
    let exact = finite.len() == arch.len()
        && finite
            .iter()
            .all(|(p, s)| arch.get(p).is_some_and(|a| *a == -s.clone()));
    let archimedean_log = ln_rat(&modulus);
    let finite_log: f64 = finite
        .iter()
        .map(|(p, s)| crate::arith::rat_to_f64(s) * (*p as f64).ln())
        .sum();
    Ok(ProductFormulaReport {
        finite_exponent_sum: finite,
        archimedean_exponents: arch,
        archimedean_log,
        exact_cancellation: exact,
        residual: (finite_log + archimedean_log).abs(),
    })
}

/// The torsion subgroup of `L*`.
pub fn roots_of_unity(field: NumberField) -> Vec<FieldElement> {
    let generator = match field.d() {
        Some(1) => FieldElement::omega(field),
        Some(3) => FieldElement::omega(field),
        _ => FieldElement::from_int(field, -1),
    };
    let mut out = vec![FieldElement::one(field)];
    let mut cur = generator.clone();
    while !cur.is_one() {
        out.push(cur.clone());
        cur = &cur * &generator;
    }
    out
}

pub fn is_root_of_unity(x: &FieldElement) -> bool {
    roots_of_unity(x.field()).contains(x)
}
