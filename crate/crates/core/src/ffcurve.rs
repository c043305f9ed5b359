//! Closed classical points of local Fargues–Fontaine curves and of the
//! archimedean curve `ℝ>0`.
//!
//! A non-archimedean point carries its Beltrami exponent `e`, meaning
//! `|p|_{K_y} = p^{−e}`, and optionally a concrete Hahn representative in
//! `𝔪_F` taken modulo the Lubin–Tate action of `ℤ_p^*`.

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::arith::{ln_rat, pow_big};
use crate::error::{Error, Result};
use crate::numfield::{places_over, NumberField, Place};
use crate::padic::Qp;
use crate::tilt::{artin_hasse, evaluate_series, lubin_tate_act, Coeff, HahnSeries};

#[derive(Clone, Debug, PartialEq)]
pub struct LocalPointNonArch {
    place: Place,
    beltrami: BigRational,
    concrete: Option<HahnSeries>,
}

const ARCH_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalPointArch {
    s: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LocalPoint {
    NonArch(LocalPointNonArch),
    Arch(LocalPointArch),
}

/// The value returned by [`beltrami`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Beltrami {
    Finite {
        #[serde(
            serialize_with = "crate::numfield::ser_rational",
            deserialize_with = "de_rational"
        )]
        exponent: BigRational,
    },
    Archimedean {
        s: f64,
    },
}

fn de_rational<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
    let s = String::deserialize(d)?;
    crate::arith::parse_rational(&s).map_err(serde::de::Error::custom)
}

fn pow_rat(p: u64, m: i64) -> BigRational {
    let pm = pow_big(p, m.unsigned_abs() as u32);
    if m >= 0 {
        BigRational::from_integer(pm)
    } else {
        BigRational::new(BigInt::one(), pm)
    }
}

impl LocalPointNonArch {
    /// An abstract point given by its Beltrami exponent.
    pub fn new(place: Place, beltrami: BigRational) -> Result<Self> {
        if place.is_archimedean() {
            return Err(Error::PlaceMismatch("expected a finite place".into()));
        }
        if !beltrami.is_positive() {
            return Err(Error::InvalidArgument(format!(
                "Beltrami exponent must be positive, got {beltrami}"
            )));
        }
        Ok(LocalPointNonArch {
            place,
            beltrami,
            concrete: None,
        })
    }

    /// A concrete point from a representative `a` with `v(a) > 0`; the
    /// exponent is calibrated as `e = v(a)` and `a` is replaced by its
    /// canonical representative.
    pub fn from_concrete(place: Place, a: &HahnSeries) -> Result<Self> {
        let p = place
            .prime()
            .ok_or_else(|| Error::PlaceMismatch("expected a finite place".into()))?;
        if a.p() != p {
            return Err(Error::PrimeMismatch { left: p, right: a.p() });
        }
        let v = match a.valuation() {
            Some(v) if v.is_positive() => v,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "a point needs 0 < v(a), got {other:?}"
                )))
            }
        };
        Ok(LocalPointNonArch {
            place,
            beltrami: BigRational::new((*v.numer()).into(), (*v.denom()).into()),
            concrete: Some(canonical_representative(a)?),
        })
    }

    pub fn place(&self) -> Place {
        self.place
    }

    pub fn p(&self) -> u64 {
        self.place.prime().expect("finite place")
    }

    pub fn beltrami(&self) -> &BigRational {
        &self.beltrami
    }

    pub fn concrete(&self) -> Option<&HahnSeries> {
        self.concrete.as_ref()
    }

    /// Forget the concrete layer.
    pub fn abstract_point(&self) -> Self {
        LocalPointNonArch {
            concrete: None,
            ..self.clone()
        }
    }

    /// Replace the concrete layer by `[u](a)`.
    pub fn act_unit(&self, u: &Qp) -> Result<Self> {
        let a = self
            .concrete
            .as_ref()
            .ok_or_else(|| Error::MissingConcrete(self.place.label()))?;
        let moved = lubin_tate_act(u, a)?;
        Ok(LocalPointNonArch {
            place: self.place,
            beltrami: self.beltrami.clone(),
            concrete: Some(moved),
        })
    }

    /// Equality of point classes: Beltrami exponents agree and, when both
    /// sides carry a concrete layer, the leading data agree up to `F_p^*`.
    pub fn same_class(&self, other: &Self) -> bool {
        if self.place != other.place || self.beltrami != other.beltrami {
            return false;
        }
        match (&self.concrete, &other.concrete) {
            (Some(a), Some(b)) => class_key(a) == class_key(b),
            _ => true,
        }
    }
}

impl LocalPointArch {
    pub fn new(s: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::InvalidArgument(format!("s must be positive, got {s}")));
        }
        Ok(LocalPointArch { s })
    }

    pub fn s(&self) -> f64 {
        self.s
    }
}

impl LocalPoint {
    pub fn place(&self) -> Place {
        match self {
            LocalPoint::NonArch(y) => y.place,
            LocalPoint::Arch(_) => Place::Archimedean,
        }
    }

    pub fn as_non_arch(&self) -> Option<&LocalPointNonArch> {
        match self {
            LocalPoint::NonArch(y) => Some(y),
            LocalPoint::Arch(_) => None,
        }
    }

    pub fn as_arch(&self) -> Option<&LocalPointArch> {
        match self {
            LocalPoint::Arch(y) => Some(y),
            LocalPoint::NonArch(_) => None,
        }
    }

    /// Equality of the underlying points, ignoring the choice of concrete
    /// representative within a class. Archimedean exponents are floats built
    /// by multiplication, so they are compared up to relative rounding.
    pub fn same_point(&self, other: &Self) -> bool {
        match (self, other) {
            (LocalPoint::NonArch(a), LocalPoint::NonArch(b)) => a.same_class(b),
            (LocalPoint::Arch(a), LocalPoint::Arch(b)) => {
                (a.s - b.s).abs() <= ARCH_TOLERANCE * a.s.max(b.s)
            }
            _ => false,
        }
    }
}

/// `(v(a), leading coefficient up to F_p^*)`.
fn class_key(a: &HahnSeries) -> Option<(Rational64, Coeff)> {
    let (v, c) = a.leading()?;
    let field = a.field();
    let p = field.p();
    let best = (1..p)
        .map(|lambda| field.scale(c, lambda))
        .min()
        .expect("p >= 2");
    Some((v, best))
}

/// Among the Lubin–Tate translates `[u](a)`, pick the one whose leading
/// coefficient is 1 when the leading coefficient lies in `F_p`; otherwise
/// `a` itself.
pub fn canonical_representative(a: &HahnSeries) -> Result<HahnSeries> {
    let (v, c) = match a.leading() {
        Some((v, c)) => (v, c.clone()),
        None => return Ok(a.clone()),
    };
    let field = a.field().clone();
    if !field.in_prime_field(&c) || field.is_one(&c) {
        return Ok(a.clone());
    }
    let p = field.p();
    let inv = field.inv(&c)?[0];
    // `[u](a)` is determined by `u mod p^N` below `p^N · v(a)`, so take `N`
    // large enough to cover the cap.
    let mut n = 1u32;
    let mut reach = Rational64::from_integer(p as i64) * v;
    while reach < a.cap() {
        n += 1;
        reach = match reach.checked_mul_int(p as i64) {
            Some(r) => r,
            None => break,
        };
    }
    let u = Qp::from_i64(p, inv as i64, n);
    lubin_tate_act(&u, a)
}

trait CheckedMulInt: Sized {
    fn checked_mul_int(&self, k: i64) -> Option<Self>;
}

impl CheckedMulInt for Rational64 {
    fn checked_mul_int(&self, k: i64) -> Option<Self> {
        self.numer().checked_mul(k).map(|n| Rational64::new(n, *self.denom()))
    }
}

/// `e ↦ p^m e`, and `a ↦ Frob^m(a)` on the concrete layer.
pub fn frobenius_point(y: &LocalPointNonArch, m: i64) -> LocalPointNonArch {
    if m == 0 {
        return y.clone();
    }
    LocalPointNonArch {
        place: y.place,
        beltrami: &y.beltrami * pow_rat(y.p(), m),
        concrete: y.concrete.as_ref().map(|a| a.frobenius_pow(m)),
    }
}

/// Frobenius on any local point; the identity at the archimedean place.
pub fn frobenius_local(y: &LocalPoint, m: i64) -> LocalPoint {
    match y {
        LocalPoint::NonArch(y) => LocalPoint::NonArch(frobenius_point(y, m)),
        LocalPoint::Arch(a) => LocalPoint::Arch(*a),
    }
}

pub fn beltrami(y: &LocalPoint) -> Beltrami {
    match y {
        LocalPoint::NonArch(y) => Beltrami::Finite {
            exponent: y.beltrami.clone(),
        },
        LocalPoint::Arch(a) => Beltrami::Archimedean { s: a.s },
    }
}

/// `e = f_v` at finite places, `s = 1` at the archimedean place.
pub fn standard_point(v: Place) -> LocalPoint {
    match v {
        Place::Archimedean => LocalPoint::Arch(LocalPointArch { s: 1.0 }),
        Place::Finite(fp) => LocalPoint::NonArch(LocalPointNonArch {
            place: v,
            beltrami: BigRational::from_integer(BigInt::from(fp.f())),
            concrete: None,
        }),
    }
}

pub fn standard_non_arch(v: Place) -> Result<LocalPointNonArch> {
    match standard_point(v) {
        LocalPoint::NonArch(y) => Ok(y),
        LocalPoint::Arch(_) => Err(Error::PlaceMismatch("expected a finite place".into())),
    }
}

/// `s ↦ |z| · s`.
pub fn arch_act(z_modulus: f64, y: &LocalPointArch) -> Result<LocalPointArch> {
    if !(z_modulus.is_finite() && z_modulus > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "modulus must be positive, got {z_modulus}"
        )));
    }
    LocalPointArch::new(z_modulus * y.s)
}

/// `|log e₁ − log e₂|`, resp. `|log s₁ − log s₂|`.
pub fn local_distance(y1: &LocalPoint, y2: &LocalPoint) -> Result<f64> {
    match (y1, y2) {
        (LocalPoint::NonArch(a), LocalPoint::NonArch(b)) => {
            if a.place != b.place {
                return Err(Error::PlaceMismatch(format!("{} vs {}", a.place, b.place)));
            }
            if a.beltrami == b.beltrami {
                return Ok(0.0);
            }
            Ok(ln_rat(&(&a.beltrami / &b.beltrami)).abs())
        }
        (LocalPoint::Arch(a), LocalPoint::Arch(b)) => Ok((a.s.ln() - b.s.ln()).abs()),
        _ => Err(Error::PlaceMismatch(format!(
            "{} vs {}",
            y1.place(),
            y2.place()
        ))),
    }
}

/// The multiplicative description `AH(a) ∈ 1 + 𝔪_F` of the point given
/// additively by `a`.
pub fn switch_description(a: &HahnSeries) -> Result<HahnSeries> {
    let v = match a.valuation() {
        Some(v) if v.is_positive() => v,
        other => {
            return Err(Error::InvalidArgument(format!(
                "switching descriptions needs 0 < v(a), got {other:?}"
            )))
        }
    };
    // Enough terms that `(degree + 1) v(a)` reaches the cap of `a`.
    let ratio = a.cap() / v;
    let degree = ratio.ceil().to_integer().max(1);
    let degree = usize::try_from(degree)
        .ok()
        .filter(|d| *d <= 1 << 16)
        .ok_or_else(|| Error::Precision(format!("cap/v(a) = {ratio} is too large")))?;
    let ah = artin_hasse(a.p(), degree, 1)?;
    evaluate_series(&ah, a)
}

/// The fiber over a point of `Y_{ℚ_p}` after moving it: one local point per
/// place `v | p`, with Beltrami exponent `f_v · E` where `E` is the moved
/// exponent. Returned as a set of tuples ordered by place.
pub fn correspondence_fiber<F>(
    field: NumberField,
    base: &LocalPointNonArch,
    moved: F,
) -> Result<Vec<Vec<LocalPoint>>>
where
    F: Fn(&LocalPointNonArch) -> LocalPointNonArch,
{
    if field.degree() > 2 {
        return Err(Error::UnsupportedField(format!("{field} has degree > 2")));
    }
    let p = base.p();
    let target = moved(base);
    if target.p() != p {
        return Err(Error::PrimeMismatch {
            left: p,
            right: target.p(),
        });
    }
    let mut tuple = Vec::new();
    for v in places_over(field, p)? {
        let e = &target.beltrami * BigRational::from_integer(BigInt::from(v.f()));
        let concrete = if v.f() == 1 {
            target.concrete.clone()
        } else {
            None
        };
        tuple.push(LocalPoint::NonArch(LocalPointNonArch {
            place: v,
            beltrami: e,
            concrete,
        }));
    }
    let fiber = vec![tuple];
    debug_assert!(fiber.len() as u32 <= field.degree());
    Ok(fiber)
}

/// `Y_{ℚ_p}` base point with exponent `e` at the unique place of ℚ over `p`.
pub fn rational_point(p: u64, e: BigRational) -> Result<LocalPointNonArch> {
    let v = places_over(NumberField::rationals(), p)?[0];
    LocalPointNonArch::new(v, e)
}

pub fn rat_to_exponent(e: &BigRational) -> Option<Rational64> {
    Some(Rational64::new(e.numer().to_i64()?, e.denom().to_i64()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tilt::FiniteField;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn frobenius_scales_exponent() {
        let y = rational_point(5, q(1, 1)).unwrap();
        assert_eq!(frobenius_point(&y, 1).beltrami(), &q(5, 1));
        assert_eq!(frobenius_point(&y, 0), y);
        assert_eq!(frobenius_point(&frobenius_point(&y, 1), -1), y);
        let y3 = rational_point(3, q(1, 1)).unwrap();
        assert_eq!(
            beltrami(&LocalPoint::NonArch(frobenius_point(&y3, 1))),
            Beltrami::Finite { exponent: q(3, 1) }
        );
    }

    #[test]
    fn standard_points() {
        let qi = NumberField::gaussian();
        let over5 = places_over(qi, 5).unwrap();
        let over3 = places_over(qi, 3).unwrap();
        assert_eq!(
            standard_point(over5[0]).as_non_arch().unwrap().beltrami(),
            &q(1, 1)
        );
        assert_eq!(
            standard_point(over3[0]).as_non_arch().unwrap().beltrami(),
            &q(2, 1)
        );
        assert_eq!(standard_point(Place::Archimedean).as_arch().unwrap().s(), 1.0);
    }

    #[test]
    fn arch_action() {
        let y = LocalPointArch::new(1.0).unwrap();
        assert_eq!(arch_act(1.0, &y).unwrap(), y);
        assert_eq!(arch_act(2.0, &y).unwrap().s(), 2.0);
        assert!(arch_act(0.0, &y).is_err());
    }

    #[test]
    fn distance_translates_by_log_p() {
        let y = LocalPoint::NonArch(rational_point(7, q(1, 1)).unwrap());
        let fy = frobenius_local(&y, 1);
        assert_eq!(local_distance(&y, &y).unwrap(), 0.0);
        assert!((local_distance(&y, &fy).unwrap() - 7f64.ln()).abs() < 1e-15);
        let z = LocalPoint::NonArch(rational_point(5, q(1, 1)).unwrap());
        assert!(local_distance(&y, &z).is_err());
    }

    #[test]
    fn concrete_calibration_and_frobenius() {
        let f = FiniteField::get(3, 2).unwrap();
        let cap = Rational64::from_integer(6);
        let a = HahnSeries::monomial(f.clone(), f.from_int(2), Rational64::new(1, 2), cap)
            .add(&HahnSeries::t_pow(f, Rational64::from_integer(1), cap))
            .unwrap();
        let v = places_over(NumberField::rationals(), 3).unwrap()[0];
        let y = LocalPointNonArch::from_concrete(v, &a).unwrap();
        assert_eq!(y.beltrami(), &q(1, 2));
        let rep = y.concrete().unwrap();
        assert!(y.concrete().unwrap().field().is_one(rep.leading().unwrap().1));
        let fy = frobenius_point(&y, 1);
        assert_eq!(fy.beltrami(), &q(3, 2));
        assert_eq!(
            fy.concrete().unwrap().valuation(),
            Some(Rational64::new(3, 2))
        );
    }

    #[test]
    fn unit_action_keeps_class() {
        let f = FiniteField::get(5, 1).unwrap();
        let cap = Rational64::from_integer(4);
        let a = HahnSeries::t_pow(f, Rational64::new(1, 3), cap);
        let v = places_over(NumberField::rationals(), 5).unwrap()[0];
        let y = LocalPointNonArch::from_concrete(v, &a).unwrap();
        let moved = y.act_unit(&Qp::from_i64(5, 3, 6)).unwrap();
        assert_eq!(moved.beltrami(), y.beltrami());
        assert!(moved.same_class(&y));
        assert_ne!(moved.concrete(), y.concrete());
        assert!(matches!(
            y.abstract_point().act_unit(&Qp::from_i64(5, 3, 6)),
            Err(Error::MissingConcrete(_))
        ));
    }

    #[test]
    fn switch_preserves_valuation() {
        let f = FiniteField::get(2, 2).unwrap();
        let cap = Rational64::from_integer(5);
        let t = HahnSeries::t_pow(f.clone(), Rational64::one(), cap);
        let ah = switch_description(&t).unwrap();
        let one = HahnSeries::one(f.clone(), cap);
        assert_eq!(ah.sub(&one).unwrap().valuation(), Some(Rational64::one()));
        assert_eq!(ah.cap(), cap);
        assert!(switch_description(&HahnSeries::zero(f, cap)).is_err());
    }

    #[test]
    fn fibers() {
        let base = rational_point(5, q(1, 1)).unwrap();
        let fib = correspondence_fiber(NumberField::rationals(), &base, |y| y.clone()).unwrap();
        assert_eq!(fib.len(), 1);
        assert_eq!(fib[0], vec![LocalPoint::NonArch(base.clone())]);
        let qi = NumberField::gaussian();
        let fib = correspondence_fiber(qi, &base, |y| frobenius_point(y, 1)).unwrap();
        assert!(fib.len() <= 2);
        assert_eq!(fib[0].len(), 2);
        for y in &fib[0] {
            assert_eq!(y.as_non_arch().unwrap().beltrami(), &q(5, 1));
        }
        let ident = correspondence_fiber(qi, &base, |y| y.clone()).unwrap();
        for y in &ident[0] {
            assert_eq!(y, &standard_point(y.place()));
        }
        let inert = rational_point(3, q(1, 1)).unwrap();
        let fib = correspondence_fiber(qi, &inert, |y| y.clone()).unwrap();
        assert_eq!(fib[0], vec![standard_point(places_over(qi, 3).unwrap()[0])]);
    }
}
