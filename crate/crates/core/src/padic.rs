//! Fixed-precision p-adic numbers with relative-precision tracking.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::arith::{mod_inverse, pow_big, rat_mod, vp_int, vp_rat};
use crate::error::{Error, Result};

/// `p^val · unit + O(p^{val + prec})` with `p ∤ unit`, or, when `unit = 0`,
/// the indistinguishable-from-zero value `O(p^val)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Qp {
    p: u64,
    val: i64,
    unit: BigInt,
    prec: u32,
}

impl Qp {
    pub fn zero(p: u64, abs_prec: i64) -> Self {
        Qp {
            p,
            val: abs_prec,
            unit: BigInt::zero(),
            prec: 0,
        }
    }

    /// `x` known to relative precision `prec`.
    pub fn from_int(p: u64, x: &BigInt, prec: u32) -> Self {
        if x.is_zero() {
            return Self::zero(p, prec as i64);
        }
        let v = vp_int(x, p);
        let unit = (x / pow_big(p, v)).mod_floor(&pow_big(p, prec));
        Qp {
            p,
            val: v as i64,
            unit,
            prec,
        }
    }

    pub fn from_i64(p: u64, x: i64, prec: u32) -> Self {
        Self::from_int(p, &BigInt::from(x), prec)
    }

    pub fn from_rational(p: u64, q: &BigRational, prec: u32) -> Self {
        if q.is_zero() {
            return Self::zero(p, prec as i64);
        }
        let v = vp_rat(q, p);
        let pv = BigRational::from_integer(pow_big(p, v.unsigned_abs() as u32));
        let u = if v >= 0 { q / pv } else { q * pv };
        let unit = rat_mod(&u, &pow_big(p, prec)).expect("unit part is p-integral");
        Qp {
            p,
            val: v,
            unit,
            prec,
        }
    }

    /// `p^val · unit` with the given relative precision.
    pub fn from_parts(p: u64, val: i64, unit: BigInt, prec: u32) -> Result<Self> {
        let modulus = pow_big(p, prec);
        let unit = unit.mod_floor(&modulus);
        if prec > 0 && (&unit % BigInt::from(p)).is_zero() {
            return Err(Error::NonUnit(format!("{unit} is divisible by {p}")));
        }
        Ok(Qp { p, val, unit, prec })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Valuation; for an `O(p^k)` value this is the lower bound `k`.
    pub fn valuation(&self) -> i64 {
        self.val
    }

    pub fn unit(&self) -> &BigInt {
        &self.unit
    }

    pub fn relative_precision(&self) -> u32 {
        self.prec
    }

    pub fn absolute_precision(&self) -> i64 {
        self.val + self.prec as i64
    }

    pub fn is_zero(&self) -> bool {
        self.unit.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        !self.is_zero() && self.val == 0
    }

    /// Drop relative precision to at most `prec`.
    pub fn truncate(&self, prec: u32) -> Self {
        if prec >= self.prec || self.is_zero() {
            return self.clone();
        }
        Qp {
            p: self.p,
            val: self.val,
            unit: self.unit.mod_floor(&pow_big(self.p, prec)),
            prec,
        }
    }

    /// Representative `p^val · unit` as an exact rational.
    pub fn to_rational(&self) -> BigRational {
        if self.is_zero() {
            return BigRational::zero();
        }
        let u = BigRational::from_integer(self.unit.clone());
        let s = BigRational::from_integer(pow_big(self.p, self.val.unsigned_abs() as u32));
        if self.val >= 0 {
            u * s
        } else {
            u / s
        }
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.p, other.p, "p-adic numbers for different primes");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        let abs = self.absolute_precision().min(other.absolute_precision());
        let v = self.val.min(other.val);
        if abs <= v {
            return Self::zero(self.p, abs);
        }
        let lift = |x: &Qp| -> BigInt {
            if x.is_zero() || x.val >= abs {
                BigInt::zero()
            } else {
                &x.unit * pow_big(x.p, (x.val - v) as u32)
            }
        };
        let modulus = pow_big(self.p, (abs - v) as u32);
        let s = (lift(self) + lift(other)).mod_floor(&modulus);
        if s.is_zero() {
            return Self::zero(self.p, abs);
        }
        let k = vp_int(&s, self.p);
        let val = v + k as i64;
        let prec = (abs - val) as u32;
        let unit = (s / pow_big(self.p, k)).mod_floor(&pow_big(self.p, prec));
        Qp {
            p: self.p,
            val,
            unit,
            prec,
        }
    }

    pub fn neg(&self) -> Self {
        Qp {
            unit: (-&self.unit).mod_floor(&pow_big(self.p, self.prec)),
            ..self.clone()
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.p, self.val + other.val);
        }
        let prec = self.prec.min(other.prec);
        Qp {
            p: self.p,
            val: self.val + other.val,
            unit: (&self.unit * &other.unit).mod_floor(&pow_big(self.p, prec)),
            prec,
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroElement);
        }
        let m = pow_big(self.p, self.prec);
        Ok(Qp {
            p: self.p,
            val: -self.val,
            unit: mod_inverse(&self.unit, &m).expect("unit is invertible"),
            prec: self.prec,
        })
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut acc = Qp::from_i64(self.p, 1, self.prec.max(1));
        if self.is_zero() && e > 0 {
            return Ok(Self::zero(self.p, self.val * e));
        }
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            k >>= 1;
        }
        Ok(acc)
    }

    /// Equality of the two values to the weaker of their absolute precisions.
    pub fn eq_within_precision(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

impl fmt::Display for Qp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "O({}^{})", self.p, self.val);
        }
        write!(
            f,
            "{}^{} * {} + O({}^{})",
            self.p,
            self.val,
            self.unit,
            self.p,
            self.absolute_precision()
        )
    }
}

/// Parse an element of `ℤ_p^*` given as an integer or rational with
/// `p`-adic valuation 0.
pub fn parse_unit(p: u64, text: &str, prec: u32) -> Result<Qp> {
    let q = crate::arith::parse_rational(text)?;
    if q.is_zero() || vp_rat(&q, p) != 0 {
        return Err(Error::NonUnit(format!("{text} is not a {p}-adic unit")));
    }
    Ok(Qp::from_rational(p, &q, prec))
}

impl Qp {
    /// Signed integer representative of a unit, in `(-p^prec/2, p^prec/2]`.
    pub fn balanced_unit(&self) -> BigInt {
        let m = pow_big(self.p, self.prec);
        let half = &m / 2;
        if self.unit > half {
            &self.unit - m
        } else {
            self.unit.clone()
        }
    }

    pub fn is_negative_representative(&self) -> bool {
        self.balanced_unit().is_negative()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_operations() {
        let p = 5;
        let a = Qp::from_rational(p, &BigRational::new(3.into(), 25.into()), 10);
        assert_eq!(a.valuation(), -2);
        let inv = a.inverse().unwrap();
        let one = a.mul(&inv);
        assert!(one.eq_within_precision(&Qp::from_i64(p, 1, 10)));
        let b = Qp::from_i64(p, 7, 10);
        let s = a.add(&b).sub(&b);
        assert!(s.eq_within_precision(&a));
    }

    #[test]
    fn cancellation_loses_precision() {
        let p = 3;
        let a = Qp::from_i64(p, 1, 6);
        let b = Qp::from_i64(p, 1 + 81, 6);
        let d = b.sub(&a);
        assert_eq!(d.valuation(), 4);
        assert_eq!(d.absolute_precision(), 6);
        assert_eq!(d.relative_precision(), 2);
    }

    #[test]
    fn powers_and_units() {
        let q = Qp::from_i64(2, 12, 8);
        assert_eq!(q.pow(3).unwrap().valuation(), 6);
        assert_eq!(q.pow(-2).unwrap().valuation(), -4);
        assert!(parse_unit(3, "2", 5).unwrap().is_unit());
        assert!(parse_unit(3, "6", 5).is_err());
        assert_eq!(parse_unit(3, "-1", 4).unwrap().balanced_unit(), BigInt::from(-1));
    }
}
