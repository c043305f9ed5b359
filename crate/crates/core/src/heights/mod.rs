//! Heights relative to an arithmeticoid, stabilized heights, ideloid degrees,
//! Frobenioids and Tate-parameter utilities.

mod frobenioid;
mod ideloid;
mod tate;

pub use frobenioid::{
    frobenioid_of, frobenioid_of_arithmeticoid, frobenius_pullback, perfection, principal_divisor,
    principal_generator, realify, Divisor, Frobenioid, FrobenioidMode,
};
pub use ideloid::{arithmetic_degree, DegreeReport, Ideloid, IdeloidEntry};
pub use tate::{
    compare_teichmueller_lifts, default_j_coefficients_path, invert_j_series, j_of_q,
    reversion_coefficients, JCoefficients, TeichmuellerComparison,
};

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::adelic::{beltrami_at, lstar_act, normalization_coordinate, s_at, Arithmeticoid};
use crate::arith::{format_rational, ln_big, ln_rat, primes_up_to, rat_to_f64};
use crate::error::{Error, Result};
use crate::numfield::{archimedean_modulus, ord, support_places, FieldElement, NumberField, Place};

/// Relative tolerance below which two sampled heights count as equal.
pub const STRICT_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectivePoint {
    coords: Vec<FieldElement>,
}

impl ProjectivePoint {
    pub fn new(coords: Vec<FieldElement>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidArgument(
                "a projective point needs at least two coordinates".into(),
            ));
        }
        if coords.iter().all(|x| x.is_zero()) {
            return Err(Error::ZeroElement);
        }
        let field = coords[0].field();
        if coords.iter().any(|x| x.field() != field) {
            return Err(Error::FieldMismatch("coordinates from different fields".into()));
        }
        Ok(ProjectivePoint { coords })
    }

    /// The point `(1 : z)`.
    pub fn scalar(z: &FieldElement) -> Self {
        ProjectivePoint {
            coords: vec![FieldElement::one(z.field()), z.clone()],
        }
    }

    pub fn coords(&self) -> &[FieldElement] {
        &self.coords
    }

    pub fn field(&self) -> NumberField {
        self.coords[0].field()
    }

    pub fn scale(&self, lambda: &FieldElement) -> Result<Self> {
        if lambda.is_zero() {
            return Err(Error::ZeroElement);
        }
        Ok(ProjectivePoint {
            coords: self.coords.iter().map(|x| x * lambda).collect(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlaceContribution {
    pub place: Place,
    /// `α_v` as text: exact at finite places.
    pub alpha: String,
    /// `log|x_j|_{K_y}` for the maximizing coordinate.
    pub log_abs: f64,
    /// At finite places, the contribution divided by `log p`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<String>,
    #[serde(skip)]
    pub exact: Option<BigRational>,
    pub contribution: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeightReport {
    pub label: String,
    pub contributions: Vec<PlaceContribution>,
    pub total: f64,
}

impl HeightReport {
    /// Finite contributions, exact, as coefficients of `log p` per prime.
    pub fn finite_exponents(&self) -> std::collections::BTreeMap<u64, BigRational> {
        let mut out = std::collections::BTreeMap::new();
        for c in &self.contributions {
            if let (Some(p), Some(e)) = (c.place.prime(), &c.exact) {
                *out.entry(p).or_insert_with(BigRational::zero) += e;
            }
        }
        out.retain(|_, e: &mut BigRational| !e.is_zero());
        out
    }

    pub fn archimedean(&self) -> f64 {
        self.contributions
            .iter()
            .filter(|c| c.place.is_archimedean())
            .map(|c| c.contribution)
            .sum()
    }

    /// CSV rows `place,alpha,log_abs,contribution`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("place,alpha,log_abs,contribution\n");
        for c in &self.contributions {
            out.push_str(&format!(
                "{},{},{:.16e},{:.16e}\n",
                c.place.label(),
                c.alpha,
                c.log_abs,
                c.contribution
            ));
        }
        out
    }
}

/// `Σ_v max_j α_v log|x_j|_{K_y}` with the normalization coordinate of `y`.
pub fn height(y: &Arithmeticoid, point: &ProjectivePoint) -> Result<HeightReport> {
    let field = y.field();
    if point.field() != field {
        return Err(Error::FieldMismatch(format!("{} vs {field}", point.field())));
    }
    let coords: Vec<&FieldElement> = point.coords.iter().filter(|x| !x.is_zero()).collect();
    let alpha = normalization_coordinate(y);
    let mut places: BTreeSet<Place> = BTreeSet::new();
    for x in &coords {
        places.extend(support_places(x)?);
    }
    let mut contributions = Vec::new();

    // Archimedean place: α_∞ · (s · log|x|_∞), clamped only through the max.
    let s = s_at(y);
    let a_inf = alpha.archimedean();
    let (best_log, best) = coords
        .iter()
        .map(|x| {
            let log_abs = s * ln_rat(&archimedean_modulus(x));
            (log_abs, a_inf * log_abs)
        })
        .fold((f64::NEG_INFINITY, f64::NEG_INFINITY), |acc, t| if t.1 > acc.1 { t } else { acc });
    contributions.push(PlaceContribution {
        place: Place::Archimedean,
        alpha: format!("{a_inf:.16e}"),
        log_abs: best_log,
        exponent: None,
        exact: None,
        contribution: best,
    });

    for v in places {
        let p = v.prime().expect("finite place");
        let e = beltrami_at(y, v);
        let a = alpha.finite(v).expect("finite place");
        let mut best: Option<(BigRational, BigRational)> = None;
        for x in &coords {
            // log|x|_{K_y} / log p = −e · ord_v(x)
            let log_abs = -(&e * BigRational::from_integer(BigInt::from(ord(x, &v)?)));
            let term = &a * &log_abs;
            if best.as_ref().is_none_or(|(_, b)| term > *b) {
                best = Some((log_abs, term));
            }
        }
        let (log_abs, term) = best.expect("at least one nonzero coordinate");
        let lp = (p as f64).ln();
        contributions.push(PlaceContribution {
            place: v,
            alpha: format_rational(&a),
            log_abs: rat_to_f64(&log_abs) * lp,
            exponent: Some(format_rational(&term)),
            contribution: rat_to_f64(&term) * lp,
            exact: Some(term),
        });
    }
    let total = contributions.iter().map(|c| c.contribution).sum();
    Ok(HeightReport {
        label: y.label().to_string(),
        contributions,
        total,
    })
}

/// Height of a scalar through `(1 : z)`.
pub fn height_scalar(y: &Arithmeticoid, z: &FieldElement) -> Result<HeightReport> {
    height(y, &ProjectivePoint::scalar(z))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilizedHeight {
    /// `h_y(z)`.
    pub base: f64,
    /// `max_{α ∈ sample ∪ {1}} h_{α·y}(z)`: a lower bound for the supremum.
    pub value: f64,
    pub argmax: String,
    pub sample_size: usize,
    /// Whether the maximum exceeds the base height beyond rounding.
    pub strict: bool,
}

/// Sampled `L*`-stabilized height.
pub fn stabilized_height(
    y: &Arithmeticoid,
    z: &FieldElement,
    sample: &[FieldElement],
) -> Result<StabilizedHeight> {
    let base = height_scalar(y, z)?.total;
    let mut value = base;
    let mut argmax = "1".to_string();
    for alpha in sample {
        if alpha.is_zero() {
            return Err(Error::ZeroElement);
        }
        let h = height_scalar(&lstar_act(alpha, y)?, z)?.total;
        if h > value {
            value = h;
            argmax = alpha.to_string();
        }
    }
    Ok(StabilizedHeight {
        base,
        value,
        argmax,
        sample_size: sample.len() + 1,
        strict: value > base + STRICT_TOLERANCE * base.abs().max(1.0),
    })
}

/// `±1`, the primes up to 50, their inverses, and products of two or three
/// of those primes together with their inverses.
pub fn default_sample(field: NumberField) -> Vec<FieldElement> {
    let primes = primes_up_to(50);
    let mut values: Vec<BigInt> = primes.iter().map(|&p| BigInt::from(p)).collect();
    for (i, &p) in primes.iter().enumerate() {
        for (j, &q) in primes.iter().enumerate().skip(i) {
            values.push(BigInt::from(p * q));
            for &r in primes.iter().skip(j) {
                values.push(BigInt::from(p * q * r));
            }
        }
    }
    let mut out = vec![
        FieldElement::from_int(field, 1),
        FieldElement::from_int(field, -1),
    ];
    for n in values {
        let q = BigRational::from_integer(n);
        out.push(FieldElement::from_rational(field, q.recip()));
        out.push(FieldElement::from_rational(field, q));
    }
    out
}

/// One row of the `a + b = c` comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AbcRow {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    /// `h_{y₀}(abc)`.
    pub height_standard: f64,
    /// `h_{(abc)·y₀}(abc)`.
    pub height_moved: f64,
    pub log_radical: f64,
    pub log_c: f64,
}

/// Both heights of `abc` and the classical `abc` quantities, over ℚ.
pub fn abc_table(triples: &[(i64, i64)]) -> Result<Vec<AbcRow>> {
    let qq = NumberField::rationals();
    let y0 = Arithmeticoid::standard(qq);
    let mut rows = Vec::new();
    for &(a, b) in triples {
        let c = a
            .checked_add(b)
            .ok_or_else(|| Error::InvalidArgument("a + b overflows".into()))?;
        if a == 0 || b == 0 || c == 0 {
            return Err(Error::InvalidArgument("a, b, c must be nonzero".into()));
        }
        if num_integer::gcd(a, b) != 1 {
            return Err(Error::InvalidArgument(format!("{a} and {b} are not coprime")));
        }
        let abc = BigInt::from(a) * BigInt::from(b) * BigInt::from(c);
        let x = FieldElement::from_rational(qq, BigRational::from_integer(abc.clone()));
        let moved = lstar_act(&x, &y0)?;
        let radical: BigInt = crate::arith::prime_divisors(&abc)
            .into_iter()
            .map(BigInt::from)
            .fold(BigInt::one(), |acc, p| acc * p);
        rows.push(AbcRow {
            a,
            b,
            c,
            height_standard: height_scalar(&y0, &x)?.total,
            height_moved: height_scalar(&moved, &x)?.total,
            log_radical: ln_big(&radical),
            log_c: ln_big(&BigInt::from(c).abs()),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adelic::global_frobenius;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn height_of_five() {
        let qq = NumberField::rationals();
        let y0 = Arithmeticoid::standard(qq);
        for z in [q(5, 1), q(1, 5)] {
            let r = height_scalar(&y0, &FieldElement::from_rational(qq, z)).unwrap();
            assert!((r.total - 5f64.ln()).abs() < 1e-12);
        }
        let r = height_scalar(&y0, &FieldElement::from_int(qq, 1)).unwrap();
        assert_eq!(r.total, 0.0);
        let r = height_scalar(&y0, &FieldElement::from_rational(qq, q(1, 5))).unwrap();
        assert_eq!(r.finite_exponents().get(&5), Some(&q(1, 1)));
    }

    #[test]
    fn projective_invariance() {
        let qi = NumberField::gaussian();
        let y = global_frobenius(&Arithmeticoid::standard(qi), 1);
        let p = ProjectivePoint::new(vec![
            FieldElement::from_ints(qi, 3, 1),
            FieldElement::from_ints(qi, 0, 7),
            FieldElement::zero(qi),
        ])
        .unwrap();
        let lambda = FieldElement::from_ints(qi, 2, -5);
        let h1 = height(&y, &p).unwrap();
        let h2 = height(&y, &p.scale(&lambda).unwrap()).unwrap();
        assert!((h1.total - h2.total).abs() < 1e-9);
        assert!(ProjectivePoint::new(vec![FieldElement::zero(qi), FieldElement::zero(qi)]).is_err());
    }

    #[test]
    fn stabilized_is_at_least_height() {
        let qq = NumberField::rationals();
        let y0 = Arithmeticoid::standard(qq);
        let z = FieldElement::from_int(qq, 5);
        let s = stabilized_height(&y0, &z, &[]).unwrap();
        assert_eq!(s.value, s.base);
        let sample = default_sample(qq);
        let s = stabilized_height(&y0, &z, &sample).unwrap();
        assert!(s.value >= s.base);
        assert!(s.value >= 5f64.ln() - 1e-12);
    }

    #[test]
    fn moved_contribution_at_five() {
        // Under 5·y₀: e₅ = 5, α₅ = 1/5, and the contribution at 5 of (1 : 5)
        // is max(0, (1/5)(−5)) log 5 = 0, while at infinity it is log 5.
        let qq = NumberField::rationals();
        let y = lstar_act(&FieldElement::from_int(qq, 5), &Arithmeticoid::standard(qq)).unwrap();
        let r = height_scalar(&y, &FieldElement::from_int(qq, 5)).unwrap();
        let at5 = r.contributions.iter().find(|c| c.place.prime() == Some(5)).unwrap();
        assert_eq!(at5.alpha, "1/5");
        assert_eq!(at5.exact, Some(q(0, 1)));
        assert!((r.total - 5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn abc_rows() {
        let rows = abc_table(&[(1, 8), (5, 27)]).unwrap();
        assert!((rows[0].log_radical - 6f64.ln()).abs() < 1e-12);
        assert!((rows[0].height_standard - 72f64.ln()).abs() < 1e-12);
        assert!(abc_table(&[(2, 4)]).is_err());
    }
}
