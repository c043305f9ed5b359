use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::field::NumberField;
use crate::arith::{is_prime, legendre, pow_big, primes_up_to};
use crate::error::{Error, Result};

/// How a rational prime decomposes in the field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Splitting {
    /// The only possibility over ℚ.
    Rational,
    Split,
    Inert,
    Ramified,
}

/// A finite place: a prime ideal above `p`.
///
/// For split primes, `index` 0 is the ideal on which `ω ≡ r (mod p)` for the
/// smaller root `r` of `x² − tx + n` modulo `p`, and `index` 1 the other one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinitePlace {
    p: u64,
    index: u8,
    e: u8,
    f: u8,
}

impl FinitePlace {
    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn index(&self) -> u8 {
        self.index
    }
    pub fn e(&self) -> u32 {
        self.e as u32
    }
    pub fn f(&self) -> u32 {
        self.f as u32
    }
}

/// A place of a supported field. Ordered with the archimedean place first,
/// then finite places by `(p, index)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Archimedean,
    Finite(FinitePlace),
}

/// JSON form of a place; `prime` is `null` for the archimedean place.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaceRecord {
    pub prime: Option<u64>,
    pub e: u32,
    pub f: u32,
    pub conjugate_index: u32,
}

impl Place {
    pub fn is_archimedean(&self) -> bool {
        matches!(self, Place::Archimedean)
    }

    pub fn prime(&self) -> Option<u64> {
        match self {
            Place::Archimedean => None,
            Place::Finite(fp) => Some(fp.p),
        }
    }

    pub fn finite(&self) -> Option<&FinitePlace> {
        match self {
            Place::Archimedean => None,
            Place::Finite(fp) => Some(fp),
        }
    }

    /// Ramification index; 1 at the archimedean place.
    pub fn e(&self) -> u32 {
        self.finite().map_or(1, |f| f.e())
    }

    /// Residue degree; for the archimedean place, the local degree `[L_∞ : ℝ]`
    /// is reported through [`Place::local_degree`] instead and this returns 1.
    pub fn f(&self) -> u32 {
        self.finite().map_or(1, |f| f.f())
    }

    pub fn conjugate_index(&self) -> u32 {
        self.finite().map_or(0, |f| f.index as u32)
    }

    /// `[L_v : ℚ_v]`.
    pub fn local_degree(&self, field: NumberField) -> u32 {
        match self {
            Place::Archimedean => field.degree(),
            Place::Finite(fp) => fp.e() * fp.f(),
        }
    }

    pub fn to_record(&self) -> PlaceRecord {
        PlaceRecord {
            prime: self.prime(),
            e: self.e(),
            f: self.f(),
            conjugate_index: self.conjugate_index(),
        }
    }

    /// Resolve a record against a field, checking its splitting data.
    pub fn from_record(field: NumberField, rec: &PlaceRecord) -> Result<Place> {
        let place = match rec.prime {
            None => Place::Archimedean,
            Some(p) => {
                let candidates = places_over(field, p)?;
                *candidates
                    .get(rec.conjugate_index as usize)
                    .ok_or_else(|| Error::PlaceMismatch(format!("{rec:?} is not a place of {field}")))?
            }
        };
        if place.e() != rec.e || place.f() != rec.f {
            return Err(Error::PlaceMismatch(format!(
                "{rec:?} has wrong (e, f) for {field}; expected ({}, {})",
                place.e(),
                place.f()
            )));
        }
        Ok(place)
    }

    /// Short label such as `inf`, `v5`, `v5'`.
    pub fn label(&self) -> String {
        match self {
            Place::Archimedean => "inf".to_string(),
            Place::Finite(fp) => {
                if fp.index == 0 {
                    format!("v{}", fp.p)
                } else {
                    format!("v{}'", fp.p)
                }
            }
        }
    }

    /// Inverse of [`Place::label`].
    pub fn parse_label(field: NumberField, label: &str) -> Result<Place> {
        let s = label.trim();
        if s == "inf" || s == "∞" {
            return Ok(Place::Archimedean);
        }
        let body = s
            .strip_prefix('v')
            .ok_or_else(|| Error::Parse(format!("bad place label {label:?}")))?;
        let (digits, index) = match body.strip_suffix('\'') {
            Some(d) => (d, 1usize),
            None => (body, 0usize),
        };
        let p: u64 = digits
            .parse()
            .map_err(|_| Error::Parse(format!("bad place label {label:?}")))?;
        let places = places_over(field, p)?;
        places
            .get(index)
            .copied()
            .ok_or_else(|| Error::PlaceMismatch(format!("{label} is not a place of {field}")))
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl Serialize for Place {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_record().serialize(s)
    }
}

/// Kronecker-symbol splitting type of `p` in `field`.
pub fn splitting(field: NumberField, p: u64) -> Splitting {
    if field.is_rational() {
        return Splitting::Rational;
    }
    let disc = field.discriminant();
    if p == 2 {
        if disc % 2 == 0 {
            return Splitting::Ramified;
        }
        return match disc.rem_euclid(8) {
            1 => Splitting::Split,
            _ => Splitting::Inert,
        };
    }
    match legendre(disc, p) {
        0 => Splitting::Ramified,
        1 => Splitting::Split,
        _ => Splitting::Inert,
    }
}

/// All places above the prime `p`, ordered by conjugate index.
pub fn places_over(field: NumberField, p: u64) -> Result<Vec<Place>> {
    if !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    let mk = |index, e, f| Place::Finite(FinitePlace { p, index, e, f });
    Ok(match splitting(field, p) {
        Splitting::Rational => vec![mk(0, 1, 1)],
        Splitting::Split => vec![mk(0, 1, 1), mk(1, 1, 1)],
        Splitting::Inert => vec![mk(0, 1, 2)],
        Splitting::Ramified => vec![mk(0, 2, 1)],
    })
}

/// The archimedean place followed by every finite place over a prime `<= bound`.
pub fn places_up_to(field: NumberField, bound: u64) -> Result<Vec<Place>> {
    if bound < 2 {
        return Err(Error::InvalidArgument(format!("bound {bound} must be at least 2")));
    }
    let mut out = vec![Place::Archimedean];
    for p in primes_up_to(bound) {
        out.extend(places_over(field, p)?);
    }
    Ok(out)
}

/// Roots of `x² − tx + n` modulo `p`, ascending (split primes only).
pub fn split_roots_mod_p(field: NumberField, p: u64) -> Vec<u64> {
    let t = field.omega_trace() as i128;
    let n = field.omega_norm() as i128;
    let pp = p as i128;
    if p == 2 {
        return (0..2u64)
            .filter(|&x| {
                let x = x as i128;
                (x * x - t * x + n).rem_euclid(pp) == 0
            })
            .collect();
    }
    let disc = (t * t - 4 * n).rem_euclid(pp) as u64;
    let Some(s) = crate::arith::sqrt_mod_prime(disc, p) else {
        return Vec::new();
    };
    let half = crate::arith::modpow_u64(2, p - 2, p) as u128;
    let r1 = ((t.rem_euclid(pp) as u128 + s as u128) * half % p as u128) as u64;
    let r2 = ((t.rem_euclid(pp) as u128 + (p - s) as u128) * half % p as u128) as u64;
    let mut roots = vec![r1, r2];
    roots.sort_unstable();
    roots.dedup();
    roots
}

/// Hensel lift of the root attached to a split place, modulo `p^k`.
pub fn split_root(field: NumberField, place: &FinitePlace, k: u32) -> BigInt {
    let roots = split_roots_mod_p(field, place.p);
    assert_eq!(roots.len(), 2, "split_root called on a non-split place");
    let modulus = pow_big(place.p, k.max(1));
    let t = BigInt::from(field.omega_trace());
    let n = BigInt::from(field.omega_norm());
    let mut r = BigInt::from(roots[place.index as usize]);
    loop {
        let fr = (&r * &r - &t * &r + &n).mod_floor(&modulus);
        if fr.is_zero() {
            return r;
        }
        let dfr = (BigInt::from(2) * &r - &t).mod_floor(&modulus);
        let inv = crate::arith::mod_inverse(&dfr, &modulus)
            .expect("derivative is a unit at a split prime");
        r = (&r - fr * inv).mod_floor(&modulus);
    }
}

/// Sum of `e_v f_v` over the places above `p`.
pub fn local_degree_sum(field: NumberField, p: u64) -> Result<u32> {
    Ok(places_over(field, p)?
        .iter()
        .map(|v| v.e() * v.f())
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent Kronecker symbol `(D/p)` from brute-force squares.
    fn kronecker_oracle(disc: i64, p: u64) -> i32 {
        if p == 2 {
            return match disc.rem_euclid(8) {
                0 | 2 | 4 | 6 => 0,
                1 | 7 => 1,
                _ => -1,
            };
        }
        let a = disc.rem_euclid(p as i64) as u64;
        if a == 0 {
            return 0;
        }
        if (1..p).any(|x| x * x % p == a) {
            1
        } else {
            -1
        }
    }

    #[test]
    fn rational_places() {
        let v = places_up_to(NumberField::rationals(), 10).unwrap();
        let labels: Vec<_> = v.iter().map(|p| p.label()).collect();
        assert_eq!(labels, ["inf", "v2", "v3", "v5", "v7"]);
    }

    #[test]
    fn gaussian_splitting() {
        let g = NumberField::gaussian();
        let over2 = places_over(g, 2).unwrap();
        assert_eq!(over2.len(), 1);
        assert_eq!((over2[0].e(), over2[0].f()), (2, 1));
        let over5 = places_over(g, 5).unwrap();
        assert_eq!(over5.len(), 2);
        assert!(over5.iter().all(|v| v.e() == 1 && v.f() == 1));
        assert_eq!(places_over(g, 3).unwrap()[0].f(), 2);
    }

    #[test]
    fn eisenstein_seven_splits() {
        assert_eq!(splitting(NumberField::eisenstein(), 7), Splitting::Split);
    }

    #[test]
    fn splitting_matches_kronecker_oracle() {
        for d in [1u64, 2, 3, 5, 6, 7, 11, 15, 19, 23, 31] {
            let field = NumberField::imaginary_quadratic(d).unwrap();
            for p in primes_up_to(60) {
                let expected = match kronecker_oracle(field.discriminant(), p) {
                    0 => Splitting::Ramified,
                    1 => Splitting::Split,
                    _ => Splitting::Inert,
                };
                assert_eq!(splitting(field, p), expected, "d={d} p={p}");
                assert_eq!(local_degree_sum(field, p).unwrap(), 2);
            }
        }
    }

    #[test]
    fn split_roots_agree_with_brute_force() {
        for d in [1u64, 2, 3, 5, 7, 11, 23] {
            let field = NumberField::imaginary_quadratic(d).unwrap();
            let (t, n) = (field.omega_trace() as u64, field.omega_norm() as u64);
            for p in primes_up_to(200) {
                let brute: Vec<u64> = (0..p)
                    .filter(|&x| (x * x + n + (p - t) * x) % p == 0)
                    .collect();
                if splitting(field, p) == Splitting::Split {
                    assert_eq!(split_roots_mod_p(field, p), brute, "d={d} p={p}");
                }
            }
        }
    }

    #[test]
    fn hensel_roots() {
        let g = NumberField::gaussian();
        for v in places_over(g, 5).unwrap() {
            let r = split_root(g, v.finite().unwrap(), 6);
            let m = pow_big(5, 6);
            assert!((&r * &r + BigInt::from(1)).mod_floor(&m).is_zero());
        }
        let f = NumberField::imaginary_quadratic(7).unwrap();
        assert_eq!(splitting(f, 2), Splitting::Split);
        let v = places_over(f, 2).unwrap()[1];
        let r = split_root(f, v.finite().unwrap(), 10);
        let m = pow_big(2, 10);
        assert!((&r * &r - &r + BigInt::from(2)).mod_floor(&m).is_zero());
    }

    #[test]
    fn record_round_trip() {
        let g = NumberField::gaussian();
        for v in places_up_to(g, 30).unwrap() {
            let rec = v.to_record();
            assert_eq!(Place::from_record(g, &rec).unwrap(), v);
            assert_eq!(Place::parse_label(g, &v.label()).unwrap(), v);
        }
        let bad = PlaceRecord {
            prime: Some(5),
            e: 2,
            f: 1,
            conjugate_index: 0,
        };
        assert!(Place::from_record(g, &bad).is_err());
    }
}
