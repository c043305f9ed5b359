use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::field::NumberField;
use crate::arith::{format_rational, parse_rational};
use crate::error::{Error, Result};

/// An element `a + bω` of a supported field, with exact rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    field: NumberField,
    a: BigRational,
    b: BigRational,
}

impl FieldElement {
    pub fn new(field: NumberField, a: BigRational, b: BigRational) -> Self {
        let b = if field.is_rational() { BigRational::zero() } else { b };
        FieldElement { field, a, b }
    }

    pub fn from_int(field: NumberField, n: i64) -> Self {
        Self::new(field, BigRational::from_integer(n.into()), BigRational::zero())
    }

    pub fn from_ints(field: NumberField, a: i64, b: i64) -> Self {
        Self::new(
            field,
            BigRational::from_integer(a.into()),
            BigRational::from_integer(b.into()),
        )
    }

    pub fn from_rational(field: NumberField, q: BigRational) -> Self {
        Self::new(field, q, BigRational::zero())
    }

    pub fn zero(field: NumberField) -> Self {
        Self::from_int(field, 0)
    }

    pub fn one(field: NumberField) -> Self {
        Self::from_int(field, 1)
    }

    /// The basis element `ω` (zero for ℚ, which has no second basis vector).
    pub fn omega(field: NumberField) -> Self {
        Self::from_ints(field, 0, 1)
    }

    /// `√−d` as an element (`ω` or `2ω − 1`).
    pub fn sqrt_minus_d(field: NumberField) -> Result<Self> {
        if field.is_rational() {
            return Err(Error::InvalidArgument("ℚ has no √−d".into()));
        }
        Ok(if field.half_integral_basis() {
            Self::from_ints(field, -1, 2)
        } else {
            Self::omega(field)
        })
    }

    pub fn field(&self) -> NumberField {
        self.field
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    fn t(&self) -> BigRational {
        BigRational::from_integer(self.field.omega_trace().into())
    }

    fn n(&self) -> BigRational {
        BigRational::from_integer(self.field.omega_norm().into())
    }

    /// Field norm down to ℚ (the element itself over ℚ).
    pub fn norm(&self) -> BigRational {
        if self.field.is_rational() {
            return self.a.clone();
        }
        &self.a * &self.a + self.t() * &self.a * &self.b + self.n() * &self.b * &self.b
    }

    pub fn trace(&self) -> BigRational {
        if self.field.is_rational() {
            return self.a.clone();
        }
        BigRational::from_integer(2.into()) * &self.a + self.t() * &self.b
    }

    pub fn conjugate(&self) -> Self {
        let t = self.t();
        Self::new(self.field, &self.a + &self.b * t, -self.b.clone())
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroElement);
        }
        if self.field.is_rational() {
            return Ok(Self::from_rational(self.field, self.a.recip()));
        }
        let n = self.norm();
        let c = self.conjugate();
        Ok(Self::new(self.field, c.a / &n, c.b / &n))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut acc = Self::one(self.field);
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    /// `(A, B, den)` with `self = (A + Bω)/den`, `den > 0` minimal.
    pub fn integral_parts(&self) -> (BigInt, BigInt, BigInt) {
        let den = self.a.denom().lcm(self.b.denom());
        let a = (&self.a * BigRational::from_integer(den.clone())).to_integer();
        let b = (&self.b * BigRational::from_integer(den.clone())).to_integer();
        (a, b, den)
    }

    pub fn is_integral(&self) -> bool {
        self.a.denom().is_one() && self.b.denom().is_one()
    }

    /// Real and imaginary parts of the complex embedding `√−d ↦ i√d`.
    pub fn complex_embedding(&self) -> (f64, f64) {
        let a = crate::arith::rat_to_f64(&self.a);
        let b = crate::arith::rat_to_f64(&self.b);
        match self.field.d() {
            None => (a, 0.0),
            Some(d) => {
                let s = (d as f64).sqrt();
                if self.field.half_integral_basis() {
                    (a + b / 2.0, b * s / 2.0)
                } else {
                    (a, b * s)
                }
            }
        }
    }

    /// Parses expressions such as `2+i`, `-3/4`, `1-2*w`, `5*sqrt(-7)`.
    ///
    /// Unit symbols: `i` (only in `ℚ(i)`), `w` for the basis element `ω`,
    /// `sqrt(-d)` for `√−d`.
    pub fn parse(field: NumberField, text: &str) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty element".into()));
        }
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut current = String::new();
        let mut negative = false;
        let mut depth = 0i32;
        for (idx, ch) in s.chars().enumerate() {
            match ch {
                '(' => {
                    depth += 1;
                    current.push(ch);
                }
                ')' => {
                    depth -= 1;
                    current.push(ch);
                }
                '+' | '-' if depth == 0 => {
                    if idx == 0 {
                        negative = ch == '-';
                        continue;
                    }
                    if current.is_empty() {
                        return Err(Error::Parse(format!("dangling sign in {text:?}")));
                    }
                    terms.push((negative, std::mem::take(&mut current)));
                    negative = ch == '-';
                }
                _ => current.push(ch),
            }
        }
        if current.is_empty() {
            return Err(Error::Parse(format!("dangling sign in {text:?}")));
        }
        terms.push((negative, current));

        let mut acc = Self::zero(field);
        for (neg, term) in terms {
            let mut value = Self::parse_term(field, &term)?;
            if neg {
                value = -&value;
            }
            acc = &acc + &value;
        }
        Ok(acc)
    }

    fn parse_term(field: NumberField, term: &str) -> Result<Self> {
        let unit_of = |u: &str| -> Result<Option<Self>> {
            if u == "i" {
                if field.d() != Some(1) {
                    return Err(Error::Parse(format!("'i' is only available in Q(i), not {field}")));
                }
                return Ok(Some(Self::omega(field)));
            }
            if u == "w" {
                if field.is_rational() {
                    return Err(Error::Parse("'w' is not available over Q".into()));
                }
                return Ok(Some(Self::omega(field)));
            }
            if let Some(inner) = u.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
                let radicand: i64 = inner
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad radical {u:?}")))?;
                if field.d().map(|d| -(d as i64)) != Some(radicand) {
                    return Err(Error::Parse(format!("{u} does not lie in {field}")));
                }
                return Ok(Some(Self::sqrt_minus_d(field)?));
            }
            Ok(None)
        };
        let (coef, unit) = if let Some((c, u)) = term.split_once('*') {
            (c.to_string(), Some(u.to_string()))
        } else if let Some(u) = unit_of(term)? {
            return Ok(u);
        } else {
            // Trailing unit without '*', e.g. "3i" or "2w".
            let split = term
                .char_indices()
                .find(|(_, c)| !(c.is_ascii_digit() || *c == '/'))
                .map(|(i, _)| i);
            match split {
                Some(i) => (term[..i].to_string(), Some(term[i..].to_string())),
                None => (term.to_string(), None),
            }
        };
        let q = parse_rational(&coef)?;
        match unit {
            None => Ok(Self::from_rational(field, q)),
            Some(u) => {
                let unit = unit_of(&u)?.ok_or_else(|| Error::Parse(format!("unknown symbol {u:?}")))?;
                Ok(&Self::from_rational(field, q) * &unit)
            }
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return f.write_str(&format_rational(&self.a));
        }
        let symbol = match self.field.d() {
            Some(1) => "i".to_string(),
            _ => "w".to_string(),
        };
        let b_abs = self.b.abs();
        let b_str = if b_abs.is_one() {
            symbol
        } else {
            format!("{}*{}", format_rational(&b_abs), symbol)
        };
        if self.a.is_zero() {
            if self.b.is_negative() {
                write!(f, "-{b_str}")
            } else {
                f.write_str(&b_str)
            }
        } else {
            let sign = if self.b.is_negative() { '-' } else { '+' };
            write!(f, "{}{}{}", format_rational(&self.a), sign, b_str)
        }
    }
}

impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        assert_eq!(self.field, rhs.field, "field mismatch in addition");
        FieldElement::new(self.field, &self.a + &rhs.a, &self.b + &rhs.b)
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        assert_eq!(self.field, rhs.field, "field mismatch in subtraction");
        FieldElement::new(self.field, &self.a - &rhs.a, &self.b - &rhs.b)
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement::new(self.field, -self.a.clone(), -self.b.clone())
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        assert_eq!(self.field, rhs.field, "field mismatch in multiplication");
        let t = self.t();
        let n = self.n();
        let bd = &self.b * &rhs.b;
        let a = &self.a * &rhs.a - &n * &bd;
        let b = &self.a * &rhs.b + &self.b * &rhs.a + t * bd;
        FieldElement::new(self.field, a, b)
    }
}
