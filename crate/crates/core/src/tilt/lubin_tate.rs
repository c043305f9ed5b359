use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{CheckedMul, Signed, ToPrimitive, Zero};

use super::hahn::HahnSeries;
use crate::arith::{binom_mod_p_lucas, pow_big};
use crate::error::{Error, Result};
use crate::padic::Qp;

fn base_p_digits(mut n: BigInt, p: u64, len: usize) -> Vec<u64> {
    let pb = BigInt::from(p);
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        let (q, r) = n.div_mod_floor(&pb);
        out.push(r.to_u64().expect("digit below p"));
        n = q;
    }
    out
}

/// The `ℤ_p`-module action `[u](a) = (1 + a)^u − 1` of the multiplicative
/// formal group, for any p-adic integer `u`.
///
/// `u` is known modulo `p^N`, which determines `binom(u, n) mod p` for
/// `n < p^N`; the result is therefore capped at `min(cap(a), p^N · v(a))`.
pub fn lubin_tate_endo(u: &Qp, a: &HahnSeries) -> Result<HahnSeries> {
    if u.p() != a.p() {
        return Err(Error::PrimeMismatch {
            left: u.p(),
            right: a.p(),
        });
    }
    let p = a.p();
    if !u.is_zero() && u.valuation() < 0 {
        return Err(Error::NegativeValuation(format!("{u} is not a p-adic integer")));
    }
    let field = a.field().clone();
    let v = a.valuation().unwrap_or(a.cap());
    if !v.is_positive() {
        return Err(Error::Divergent(format!(
            "the binomial series needs positive valuation, got {v}"
        )));
    }
    let abs = u.absolute_precision().max(0) as u32;
    let int_rep = if u.is_zero() {
        BigInt::zero()
    } else {
        (u.unit() * pow_big(p, u.valuation() as u32)).mod_floor(&pow_big(p, abs))
    };
    let digits = base_p_digits(int_rep, p, abs as usize);
    let digit_bound = pow_big(p, abs);
    let cap = match digit_bound.to_i64() {
        Some(b) if Rational64::from_integer(b).checked_mul(&v).is_some() => {
            a.cap().min(Rational64::from_integer(b) * v)
        }
        _ => a.cap(),
    };
    let a = a.truncate(cap);
    let mut result = HahnSeries::zero(field.clone(), cap);
    let mut power = HahnSeries::one(field.clone(), cap);
    let mut n: u64 = 1;
    while Rational64::from_integer(n as i64) * v < cap {
        power = power.mul(&a)?.truncate(cap);
        let c = binom_mod_p_lucas(&digits, n, p);
        if c != 0 {
            result = result.add(&power.scale(&field.from_int(c as i64)))?;
        }
        n += 1;
    }
    Ok(result)
}

/// The Lubin–Tate action of a unit `u ∈ ℤ_p^*` on `𝔪_F`.
pub fn lubin_tate_act(u: &Qp, a: &HahnSeries) -> Result<HahnSeries> {
    if !u.is_unit() {
        return Err(Error::NonUnit(format!("{u} is not a p-adic unit")));
    }
    lubin_tate_endo(u, a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tilt::FiniteField;
    use num_traits::One;

    #[test]
    fn identity_and_doubling() {
        let f = FiniteField::get(2, 3).unwrap();
        let cap = Rational64::from_integer(8);
        let t = HahnSeries::t_pow(f.clone(), Rational64::one(), cap);
        let one = Qp::from_i64(2, 1, 10);
        assert_eq!(lubin_tate_act(&one, &t).unwrap(), t);
        let two = Qp::from_i64(2, 2, 10);
        let doubled = lubin_tate_endo(&two, &t).unwrap();
        assert_eq!(doubled, HahnSeries::t_pow(f, Rational64::from_integer(2), cap));
        assert!(matches!(lubin_tate_act(&two, &t), Err(Error::NonUnit(_))));
    }

    #[test]
    fn minus_one_inverts_group_law() {
        // [−1](a) = (1 + a)^{−1} − 1.
        let f = FiniteField::get(3, 2).unwrap();
        let cap = Rational64::from_integer(5);
        let a = HahnSeries::t_pow(f.clone(), Rational64::new(1, 2), cap);
        let m1 = Qp::from_i64(3, -1, 12);
        let lhs = lubin_tate_act(&m1, &a).unwrap();
        let one = HahnSeries::one(f, cap);
        let rhs = one.add(&a).unwrap().inv().unwrap().sub(&one).unwrap();
        assert!(lhs.eq_within_precision(&rhs));
        assert!(lhs.valuation().unwrap().is_positive());
    }
}
