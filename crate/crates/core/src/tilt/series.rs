use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::hahn::HahnSeries;
use crate::arith::{pow_big, rat_mod};
use crate::error::{Error, Result};

/// A power series over `ℤ_p`, coefficients stored modulo `p^N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZpSeries {
    p: u64,
    precision: u32,
    coeffs: Vec<BigInt>,
}

impl ZpSeries {
    /// Reduce exact p-integral rational coefficients modulo `p^precision`.
    pub fn from_rationals(p: u64, precision: u32, coeffs: &[BigRational]) -> Result<Self> {
        let m = pow_big(p, precision);
        let mut out = Vec::with_capacity(coeffs.len());
        for (degree, c) in coeffs.iter().enumerate() {
            let r = rat_mod(c, &m).ok_or(Error::NonIntegral { p, degree })?;
            out.push(r);
        }
        Ok(ZpSeries {
            p,
            precision,
            coeffs: out,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn max_degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, n: usize) -> &BigInt {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }
}

/// Exact rational coefficients of `exp(Σ_{j≥0} T^{p^j}/p^j)` through `max_degree`,
/// from the recurrence `n a_n = Σ_{p^j ≤ n} a_{n − p^j}`.
pub fn artin_hasse_rational(p: u64, max_degree: usize) -> Vec<BigRational> {
    let mut a = vec![BigRational::one()];
    for n in 1..=max_degree {
        let mut s = BigRational::zero();
        let mut pj = 1usize;
        while pj <= n {
            s += &a[n - pj];
            pj = match pj.checked_mul(p as usize) {
                Some(x) => x,
                None => break,
            };
        }
        a.push(s / BigRational::from_integer(BigInt::from(n)));
    }
    a
}

/// The Artin–Hasse exponential, checked p-integral and reduced mod `p^N`.
pub fn artin_hasse(p: u64, max_degree: usize, coeff_precision: u32) -> Result<ZpSeries> {
    if max_degree < 1 {
        return Err(Error::InvalidArgument("max_degree must be at least 1".into()));
    }
    if !crate::arith::is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    ZpSeries::from_rationals(p, coeff_precision, &artin_hasse_rational(p, max_degree))
}

/// `Σ_n (c_n mod p) a^n` for a series `a` of positive valuation.
///
/// Terms beyond the stored degree are unknown, so the result is capped at
/// `min(cap(a), (max_degree + 1) · v(a))`.
pub fn evaluate_series(s: &ZpSeries, a: &HahnSeries) -> Result<HahnSeries> {
    if s.p != a.p() {
        return Err(Error::PrimeMismatch {
            left: s.p,
            right: a.p(),
        });
    }
    let field = a.field().clone();
    let v = a.valuation().unwrap_or(a.cap());
    if !v.is_positive() {
        return Err(Error::Divergent(format!(
            "series evaluation needs positive valuation, got {v}"
        )));
    }
    let degree_bound = Rational64::from_integer(s.max_degree() as i64 + 1) * v;
    let cap = a.cap().min(degree_bound);
    let p_big = BigInt::from(s.p);
    let residue = |c: &BigInt| -> i64 {
        (c % &p_big).to_i64().expect("residue fits")
    };
    let mut result = HahnSeries::monomial(
        field.clone(),
        field.from_int(residue(s.coeff(0))),
        Rational64::zero(),
        cap,
    );
    let a = a.truncate(cap);
    let mut power = HahnSeries::one(field.clone(), cap);
    for n in 1..=s.max_degree() {
        if Rational64::from_integer(n as i64) * v >= cap {
            break;
        }
        power = power.mul(&a)?.truncate(cap);
        let c = residue(s.coeff(n));
        if c != 0 {
            result = result.add(&power.scale(&field.from_int(c)))?;
        }
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tilt::FiniteField;

    #[test]
    fn leading_coefficients() {
        for p in [2u64, 3, 5] {
            let ah = artin_hasse(p, 10, 6).unwrap();
            assert!(ah.coeff(0).is_one());
            assert!(ah.coeff(1).is_one());
        }
        // p = 3: a_2 = 1/2, i.e. the inverse of 2 mod 3^N.
        let ah = artin_hasse(3, 4, 5).unwrap();
        assert_eq!((ah.coeff(2) * 2) % 243, BigInt::one());
    }

    #[test]
    fn exp_series_is_not_integral() {
        // Plain exp(T) has 1/p at degree p; the Artin–Hasse correction removes it.
        let exp_coeffs: Vec<BigRational> = (0..=3u64)
            .map(|n| BigRational::new(BigInt::one(), crate::arith::factorial(n).into()))
            .collect();
        assert_eq!(
            ZpSeries::from_rationals(3, 4, &exp_coeffs),
            Err(Error::NonIntegral { p: 3, degree: 3 })
        );
    }

    #[test]
    fn evaluation_at_zero_and_t() {
        let f = FiniteField::get(2, 4).unwrap();
        let ah = artin_hasse(2, 20, 4).unwrap();
        let cap = Rational64::from_integer(6);
        let zero = HahnSeries::zero(f.clone(), cap);
        assert_eq!(evaluate_series(&ah, &zero).unwrap(), HahnSeries::one(f.clone(), cap));
        let t = HahnSeries::t_pow(f.clone(), Rational64::one(), cap);
        let val = evaluate_series(&ah, &t).unwrap();
        let minus_one = val.sub(&HahnSeries::one(f.clone(), cap)).unwrap();
        assert_eq!(minus_one.valuation(), Some(Rational64::one()));
        let one = HahnSeries::one(f, cap);
        assert!(matches!(evaluate_series(&ah, &one), Err(Error::Divergent(_))));
    }
}
