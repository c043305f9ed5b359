//! Arithmeticoids: points of the adelic product of local curves.
//!
//! An arithmeticoid is stored as a sparse set of deviations from the standard
//! point `y₀` (`e_v = f_v`, `s = 1`) together with a global Frobenius shift
//! applied lazily at every finite place.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{format_rational, ln_rat, parse_rational, primes_up_to, rat_to_f64, vp_rat};
use crate::error::{Error, Result};
use crate::ffcurve::{
    frobenius_local, frobenius_point, local_distance, standard_point, LocalPoint, LocalPointArch,
    LocalPointNonArch,
};
use crate::numfield::{
    archimedean_modulus, ord, places_over, support_places, FieldElement, NumberField, Place,
    PlaceRecord,
};
use crate::padic::Qp;
use crate::tilt::{HahnJson, HahnSeries};

/// Places beyond this prime sit past index 1100 of the canonical
/// enumeration, where `2^{−n}` underflows to zero.
const ENUMERATION_PRIME_BOUND: u64 = 20_000;

/// Number of canonical places included when two shifts differ.
const SHIFT_WINDOW: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct Arithmeticoid {
    field: NumberField,
    label: String,
    deviations: BTreeMap<Place, LocalPoint>,
    frobenius_shift: i64,
}

impl Arithmeticoid {
    /// The standard arithmeticoid `y₀`.
    pub fn standard(field: NumberField) -> Self {
        Arithmeticoid {
            field,
            label: "y0".to_string(),
            deviations: BTreeMap::new(),
            frobenius_shift: 0,
        }
    }

    pub fn field(&self) -> NumberField {
        self.field
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Stored deviations, before the Frobenius shift is applied.
    pub fn deviations(&self) -> &BTreeMap<Place, LocalPoint> {
        &self.deviations
    }

    pub fn frobenius_shift(&self) -> i64 {
        self.frobenius_shift
    }

    fn base_point(&self, v: Place) -> LocalPoint {
        self.deviations
            .get(&v)
            .cloned()
            .unwrap_or_else(|| standard_point(v))
    }

    /// The local component at `v`.
    pub fn point_at(&self, v: Place) -> LocalPoint {
        frobenius_local(&self.base_point(v), self.frobenius_shift)
    }

    fn store(&mut self, v: Place, base: LocalPoint) {
        let is_standard = match &base {
            LocalPoint::NonArch(y) => y.concrete().is_none() && base == standard_point(v),
            LocalPoint::Arch(_) => base == standard_point(v),
        };
        if is_standard {
            self.deviations.remove(&v);
        } else {
            self.deviations.insert(v, base);
        }
    }

    /// Replace the local component at `v`.
    pub fn with_point(mut self, point: LocalPoint) -> Result<Self> {
        let v = point.place();
        self.check_place(v)?;
        let base = frobenius_local(&point, -self.frobenius_shift);
        self.store(v, base);
        Ok(self)
    }

    fn check_place(&self, v: Place) -> Result<()> {
        if let Some(p) = v.prime() {
            if !places_over(self.field, p)?.contains(&v) {
                return Err(Error::PlaceMismatch(format!("{v} is not a place of {}", self.field)));
            }
        }
        Ok(())
    }

    /// Places where `self` may differ from a Frobenius translate of `y₀`.
    pub fn support(&self) -> BTreeSet<Place> {
        self.deviations.keys().copied().collect()
    }

    /// Equality of arithmeticoids up to the choice of concrete representatives.
    pub fn same_as(&self, other: &Self) -> bool {
        if self.field != other.field || self.frobenius_shift != other.frobenius_shift {
            return false;
        }
        let mut places = self.support();
        places.extend(other.support());
        places.insert(Place::Archimedean);
        places
            .into_iter()
            .all(|v| self.point_at(v).same_point(&other.point_at(v)))
    }
}

/// `𝛗^m`: Frobenius at every finite place, the identity at infinity.
pub fn global_frobenius(y: &Arithmeticoid, m: i64) -> Arithmeticoid {
    let mut out = y.clone();
    out.frobenius_shift += m;
    out
}

/// The action of `x ∈ L*`: Frobenius to the power `ord_v(x)` at each finite
/// place and `s ↦ |x|_∞ s` at infinity.
pub fn lstar_act(x: &FieldElement, y: &Arithmeticoid) -> Result<Arithmeticoid> {
    if x.is_zero() {
        return Err(Error::ZeroElement);
    }
    if x.field() != y.field {
        return Err(Error::FieldMismatch(format!("{} vs {}", x.field(), y.field)));
    }
    let mut out = y.clone();
    for v in support_places(x)? {
        let k = ord(x, &v)?;
        let moved = match y.base_point(v) {
            LocalPoint::NonArch(b) => LocalPoint::NonArch(frobenius_point(&b, k)),
            arch => arch,
        };
        out.store(v, moved);
    }
    let modulus = archimedean_modulus(x);
    if !modulus.is_one() {
        let s = match y.base_point(Place::Archimedean) {
            LocalPoint::Arch(a) => a.s(),
            LocalPoint::NonArch(_) => unreachable!("archimedean slot holds an archimedean point"),
        };
        let moved = LocalPointArch::new(rat_to_f64(&modulus) * s)?;
        out.store(Place::Archimedean, LocalPoint::Arch(moved));
    }
    Ok(out)
}

/// Whether `x` fixes `y`, decided exactly: every order vanishes and the
/// archimedean modulus is 1.
pub fn stabilizer_check(x: &FieldElement, y: &Arithmeticoid) -> Result<bool> {
    if x.is_zero() {
        return Err(Error::ZeroElement);
    }
    if x.field() != y.field {
        return Err(Error::FieldMismatch(format!("{} vs {}", x.field(), y.field)));
    }
    Ok(support_places(x)?.is_empty() && archimedean_modulus(x).is_one())
}

/// The `ℤ_p^*` action through Lubin–Tate on the concrete layer.
pub fn aut_act(units: &BTreeMap<Place, Qp>, y: &Arithmeticoid) -> Result<Arithmeticoid> {
    let mut out = y.clone();
    for (v, u) in units {
        y.check_place(*v)?;
        let base = match y.base_point(*v) {
            LocalPoint::NonArch(b) => b,
            LocalPoint::Arch(_) => {
                return Err(Error::PlaceMismatch("units act at finite places only".into()))
            }
        };
        if let Some(p) = v.prime() {
            if u.p() != p {
                return Err(Error::PrimeMismatch { left: p, right: u.p() });
            }
        }
        out.store(*v, LocalPoint::NonArch(base.act_unit(u)?));
    }
    Ok(out)
}

/// The first `count` places in the canonical order: infinity, then finite
/// places by rational prime and conjugate index.
pub fn canonical_places(field: NumberField, count: usize) -> Result<Vec<Place>> {
    let mut out = vec![Place::Archimedean];
    let mut bound = 64u64;
    while out.len() < count {
        out.truncate(1);
        for p in primes_up_to(bound) {
            out.extend(places_over(field, p)?);
            if out.len() >= count {
                break;
            }
        }
        bound *= 2;
    }
    out.truncate(count);
    Ok(out)
}

/// 1-based position of `v` in the canonical enumeration, or `None` when it
/// is so far out that its weight is below the smallest positive double.
pub fn place_index(field: NumberField, v: Place) -> Result<Option<u64>> {
    let fp = match v {
        Place::Archimedean => return Ok(Some(1)),
        Place::Finite(fp) => fp,
    };
    if fp.p() > ENUMERATION_PRIME_BOUND {
        return Ok(None);
    }
    let mut n = 1u64;
    for p in primes_up_to(fp.p() - 1) {
        n += places_over(field, p)?.len() as u64;
    }
    Ok(Some(n + 1 + fp.index() as u64))
}

fn weight(n: u64) -> f64 {
    if n > 1100 {
        0.0
    } else {
        (-(n as f64)).exp2()
    }
}

/// `Σ_n 2^{−n} d_n / (1 + d_n)` over the canonical enumeration.
pub fn distance(y1: &Arithmeticoid, y2: &Arithmeticoid) -> Result<f64> {
    if y1.field != y2.field {
        return Err(Error::FieldMismatch(format!("{} vs {}", y1.field, y2.field)));
    }
    let field = y1.field;
    let mut places = y1.support();
    places.extend(y2.support());
    places.insert(Place::Archimedean);
    if y1.frobenius_shift != y2.frobenius_shift {
        places.extend(canonical_places(field, SHIFT_WINDOW)?);
    }
    let mut terms = Vec::new();
    for v in places {
        let Some(n) = place_index(field, v)? else {
            continue;
        };
        let d = local_distance(&y1.point_at(v), &y2.point_at(v))?;
        terms.push((n, d));
    }
    terms.sort_by_key(|t| t.0);
    Ok(terms
        .iter()
        .map(|&(n, d)| weight(n) * d / (1.0 + d))
        .sum())
}

/// `α_v` at one place.
#[derive(Clone, Debug, PartialEq)]
pub enum Alpha {
    Exact(BigRational),
    Real(f64),
}

/// The coordinates `α_v` with `(L_v, |·|_v) = (L_v, |·|_{K_y}^{α_v})`.
///
/// Places outside `entries` carry the default `α = p^{−shift}`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizationCoordinate {
    field: NumberField,
    shift: i64,
    entries: BTreeMap<Place, BigRational>,
    archimedean: f64,
}

impl NormalizationCoordinate {
    pub fn field(&self) -> NumberField {
        self.field
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn entries(&self) -> &BTreeMap<Place, BigRational> {
        &self.entries
    }

    pub fn archimedean(&self) -> f64 {
        self.archimedean
    }

    pub fn finite(&self, v: Place) -> Option<BigRational> {
        let p = v.prime()?;
        Some(
            self.entries
                .get(&v)
                .cloned()
                .unwrap_or_else(|| default_alpha(p, self.shift)),
        )
    }

    pub fn alpha(&self, v: Place) -> Alpha {
        match v {
            Place::Archimedean => Alpha::Real(self.archimedean),
            _ => Alpha::Exact(self.finite(v).expect("finite place")),
        }
    }
}

fn default_alpha(p: u64, shift: i64) -> BigRational {
    let pm = crate::arith::pow_big(p, shift.unsigned_abs() as u32);
    if shift >= 0 {
        BigRational::new(BigInt::one(), pm)
    } else {
        BigRational::from_integer(pm)
    }
}

/// Beltrami exponent of `y` at a finite place.
pub fn beltrami_at(y: &Arithmeticoid, v: Place) -> BigRational {
    match y.point_at(v) {
        LocalPoint::NonArch(p) => p.beltrami().clone(),
        LocalPoint::Arch(_) => unreachable!("finite place"),
    }
}

/// The archimedean exponent `s` of `y`.
pub fn s_at(y: &Arithmeticoid) -> f64 {
    match y.point_at(Place::Archimedean) {
        LocalPoint::Arch(a) => a.s(),
        LocalPoint::NonArch(_) => unreachable!("archimedean place"),
    }
}

/// `α_v = f_v / e_v` at finite places, `α_∞ = 1/s`.
pub fn normalization_coordinate(y: &Arithmeticoid) -> NormalizationCoordinate {
    let mut entries = BTreeMap::new();
    for v in y.support() {
        if v.is_archimedean() {
            continue;
        }
        let alpha = BigRational::from_integer(BigInt::from(v.f())) / beltrami_at(y, v);
        if alpha != default_alpha(v.prime().expect("finite"), y.frobenius_shift) {
            entries.insert(v, alpha);
        }
    }
    NormalizationCoordinate {
        field: y.field,
        shift: y.frobenius_shift,
        entries,
        archimedean: 1.0 / s_at(y),
    }
}

/// Whether `(p^{−e_v})^{α_v} = p^{−f_v}` at `v`, checked exactly.
pub fn restores_standard(y: &Arithmeticoid, v: Place) -> bool {
    match v {
        Place::Archimedean => {
            let c = normalization_coordinate(y);
            (c.archimedean * s_at(y) - 1.0).abs() <= 4.0 * f64::EPSILON
        }
        _ => {
            let alpha = normalization_coordinate(y).finite(v).expect("finite");
            alpha * beltrami_at(y, v) == BigRational::from_integer(BigInt::from(v.f()))
        }
    }
}

/// The projective class of a normalization vector.
#[derive(Clone, Debug)]
pub struct HyperplanePoint {
    coordinate: NormalizationCoordinate,
}

impl HyperplanePoint {
    pub fn coordinate(&self) -> &NormalizationCoordinate {
        &self.coordinate
    }

    /// Whether every coordinate is 1.
    pub fn is_all_ones(&self) -> bool {
        self.coordinate.shift == 0
            && self.coordinate.entries.is_empty()
            && self.coordinate.archimedean == 1.0
    }
}

/// Equality up to one global positive scalar `λ`.
///
/// The scalar is gauged on the first place in canonical order outside both
/// sparse supports. Such places are cofinite and carry `p^{−shift}`, so
/// `λ p^{−shift₁} = p^{−shift₂}` for infinitely many `p` forces equal shifts
/// and `λ = 1`; the remaining coordinates must then agree exactly.
impl PartialEq for HyperplanePoint {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = (&self.coordinate, &other.coordinate);
        if a.field != b.field || a.shift != b.shift {
            return false;
        }
        let places: BTreeSet<Place> = a.entries.keys().chain(b.entries.keys()).copied().collect();
        a.archimedean == b.archimedean && places.into_iter().all(|v| a.finite(v) == b.finite(v))
    }
}

pub fn period_map(y: &Arithmeticoid) -> HyperplanePoint {
    HyperplanePoint {
        coordinate: normalization_coordinate(y),
    }
}

/// The hyperplane equation `Σ_v α_v log|x|_{K_y} = 0` for one `x ∈ L*`.
#[derive(Clone, Debug, Serialize)]
pub struct HyperplaneReport {
    /// `Σ_{v|p} α_v log|x|_{K_y} / log p`, exact.
    #[serde(serialize_with = "crate::numfield::ser_rational_map")]
    pub finite_exponent_sum: BTreeMap<u64, BigRational>,
    /// `v_p` of the archimedean modulus `|x|_∞`.
    #[serde(serialize_with = "crate::numfield::ser_rational_map")]
    pub archimedean_exponents: BTreeMap<u64, BigRational>,
    /// `α_∞ log|x|_{K_y}` at infinity.
    pub archimedean_term: f64,
    pub exact_cancellation: bool,
    pub residual: f64,
}

pub fn hyperplane_check(y: &Arithmeticoid, x: &FieldElement) -> Result<HyperplaneReport> {
    if x.is_zero() {
        return Err(Error::ZeroElement);
    }
    if x.field() != y.field {
        return Err(Error::FieldMismatch(format!("{} vs {}", x.field(), y.field)));
    }
    let coord = normalization_coordinate(y);
    let mut finite: BTreeMap<u64, BigRational> = BTreeMap::new();
    for v in support_places(x)? {
        let k = BigRational::from_integer(BigInt::from(ord(x, &v)?));
        // log|x|_{K_y} = −e_v · ord_v(x) · log p
        let log_abs = -(beltrami_at(y, v) * k);
        let term = coord.finite(v).expect("finite") * log_abs;
        *finite.entry(v.prime().expect("finite")).or_insert_with(BigRational::zero) += term;
    }
    finite.retain(|_, c| !c.is_zero());
    let modulus = archimedean_modulus(x);
    let mut arch_exp = BTreeMap::new();
    for p in crate::arith::prime_divisors(modulus.numer())
        .into_iter()
        .chain(crate::arith::prime_divisors(modulus.denom()))
    {
        arch_exp.insert(p, BigRational::from_integer(BigInt::from(vp_rat(&modulus, p))));
    }
    let s = s_at(y);
    let archimedean_term = coord.archimedean * (s * ln_rat(&modulus));
    let mut primes: BTreeSet<u64> = finite.keys().copied().collect();
    primes.extend(arch_exp.keys());
    let zero = BigRational::zero();
    let exact_cancellation = primes.iter().all(|p| {
        let a = finite.get(p).unwrap_or(&zero);
        let b = arch_exp.get(p).unwrap_or(&zero);
        (a + b).is_zero()
    });
    let finite_log: f64 = finite
        .iter()
        .map(|(p, c)| rat_to_f64(c) * (*p as f64).ln())
        .sum();
    Ok(HyperplaneReport {
        finite_exponent_sum: finite,
        archimedean_exponents: arch_exp,
        archimedean_term,
        exact_cancellation,
        residual: (finite_log + archimedean_term).abs(),
    })
}

/// A formal Tate symbol `q_j`, recorded through `|q_j|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TateSymbol {
    pub label: String,
    #[serde(
        serialize_with = "crate::numfield::ser_rational",
        deserialize_with = "de_rational"
    )]
    pub abs: BigRational,
}

fn de_rational<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
    let s = String::deserialize(d)?;
    parse_rational(&s).map_err(serde::de::Error::custom)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MutationEntry {
    pub label: String,
    #[serde(serialize_with = "crate::numfield::ser_rational")]
    pub abs_before: BigRational,
    #[serde(serialize_with = "crate::numfield::ser_rational")]
    pub abs_after: BigRational,
    pub mutated: bool,
    pub admissible: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MutationReport {
    pub entries: Vec<MutationEntry>,
    pub inadmissible_count: usize,
    /// The mutated curve keeps no `O*`-multiple of the inverted parameters,
    /// so it needs a fresh parameter list.
    pub requires_fresh_parameters: bool,
}

/// `σ(q_j) = q_j^{−1}` for `j ≤ r`, with admissibility `|σ(q_j)| < 1`
/// recomputed. `r = 0` is the identity.
pub fn mutate_tate_parameters(params: &[TateSymbol], r: usize) -> Result<MutationReport> {
    if r > params.len() {
        return Err(Error::InvalidArgument(format!(
            "r = {r} exceeds the {} parameters",
            params.len()
        )));
    }
    for q in params {
        if !q.abs.is_positive() || q.abs >= BigRational::one() {
            return Err(Error::InvalidArgument(format!(
                "|{}| = {} is not in (0, 1)",
                q.label,
                format_rational(&q.abs)
            )));
        }
    }
    let entries: Vec<MutationEntry> = params
        .iter()
        .enumerate()
        .map(|(j, q)| {
            let mutated = j < r;
            let after = if mutated { q.abs.recip() } else { q.abs.clone() };
            MutationEntry {
                label: q.label.clone(),
                admissible: after < BigRational::one(),
                abs_before: q.abs.clone(),
                abs_after: after,
                mutated,
            }
        })
        .collect();
    let inadmissible_count = entries.iter().filter(|e| !e.admissible).count();
    Ok(MutationReport {
        entries,
        inadmissible_count,
        requires_fresh_parameters: inadmissible_count > 0,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviationJson {
    pub place: PlaceRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hahn: Option<HahnJson>,
}

/// File form of an arithmeticoid. Deviations are recorded before the
/// Frobenius shift.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArithmeticoidJson {
    pub field: String,
    pub label: String,
    pub deviations: Vec<DeviationJson>,
    #[serde(default)]
    pub frobenius_shift: i64,
}

impl Arithmeticoid {
    pub fn to_json(&self) -> ArithmeticoidJson {
        let deviations = self
            .deviations
            .iter()
            .map(|(v, pt)| match pt {
                LocalPoint::Arch(a) => DeviationJson {
                    place: v.to_record(),
                    e: None,
                    s: Some(a.s()),
                    hahn: None,
                },
                LocalPoint::NonArch(y) => DeviationJson {
                    place: v.to_record(),
                    e: Some(format_rational(y.beltrami())),
                    s: None,
                    hahn: y.concrete().map(|a| a.to_json()),
                },
            })
            .collect();
        ArithmeticoidJson {
            field: self.field.spec_string(),
            label: self.label.clone(),
            deviations,
            frobenius_shift: self.frobenius_shift,
        }
    }

    pub fn from_json(json: &ArithmeticoidJson) -> Result<Self> {
        let field = NumberField::parse(&json.field)?;
        let mut y = Arithmeticoid::standard(field).with_label(json.label.clone());
        y.frobenius_shift = json.frobenius_shift;
        for dev in &json.deviations {
            let v = Place::from_record(field, &dev.place)?;
            if y.deviations.contains_key(&v) {
                return Err(Error::Parse(format!("duplicate deviation at {v}")));
            }
            let point = match v {
                Place::Archimedean => {
                    if dev.e.is_some() || dev.hahn.is_some() {
                        return Err(Error::Parse("archimedean deviation takes only s".into()));
                    }
                    let s = dev
                        .s
                        .ok_or_else(|| Error::Parse("archimedean deviation needs s".into()))?;
                    LocalPoint::Arch(LocalPointArch::new(s)?)
                }
                _ => {
                    if dev.s.is_some() {
                        return Err(Error::Parse(format!("finite deviation at {v} takes e, not s")));
                    }
                    let e = dev.e.as_deref().map(parse_rational).transpose()?;
                    let pt = match (&dev.hahn, e) {
                        (Some(h), e) => {
                            let pt = LocalPointNonArch::from_concrete(v, &HahnSeries::from_json(h)?)?;
                            if let Some(e) = e {
                                if &e != pt.beltrami() {
                                    return Err(Error::Parse(format!(
                                        "e = {e} disagrees with the valuation {} of the representative",
                                        pt.beltrami()
                                    )));
                                }
                            }
                            pt
                        }
                        (None, Some(e)) => LocalPointNonArch::new(v, e)?,
                        (None, None) => {
                            return Err(Error::Parse(format!("deviation at {v} needs e or hahn")))
                        }
                    };
                    LocalPoint::NonArch(pt)
                }
            };
            y.store(v, point);
        }
        Ok(y)
    }
}

/// `ord_v` profile of `x` on the support, as used by the `L*`-action.
pub fn order_profile(x: &FieldElement) -> Result<BTreeMap<Place, i64>> {
    let mut out = BTreeMap::new();
    for v in support_places(x)? {
        out.insert(v, ord(x, &v)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tilt::FiniteField;
    use num_rational::Rational64;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn place(field: NumberField, p: u64) -> Place {
        places_over(field, p).unwrap()[0]
    }

    #[test]
    fn frobenius_lazily_everywhere() {
        let qq = NumberField::rationals();
        let y0 = Arithmeticoid::standard(qq);
        let fy = global_frobenius(&y0, 1);
        for p in [2u64, 3, 5, 97, 7919] {
            assert_eq!(beltrami_at(&fy, place(qq, p)), q(p as i64, 1));
        }
        assert_eq!(s_at(&fy), 1.0);
        assert!(global_frobenius(&fy, -1).same_as(&y0));
        assert!(global_frobenius(&y0, 0).same_as(&y0));
    }

    #[test]
    fn lstar_examples() {
        let qq = NumberField::rationals();
        let y0 = Arithmeticoid::standard(qq);
        let y = lstar_act(&FieldElement::from_int(qq, 12), &y0).unwrap();
        assert_eq!(beltrami_at(&y, place(qq, 2)), q(4, 1));
        assert_eq!(beltrami_at(&y, place(qq, 3)), q(3, 1));
        assert_eq!(beltrami_at(&y, place(qq, 5)), q(1, 1));
        assert_eq!(s_at(&y), 12.0);
        let fifth = FieldElement::from_rational(qq, q(1, 5));
        let y = lstar_act(&fifth, &y0).unwrap();
        assert_eq!(beltrami_at(&y, place(qq, 5)), q(1, 5));
        assert_eq!(s_at(&y), 0.2);
        assert!(lstar_act(&FieldElement::zero(qq), &y0).is_err());
    }

    #[test]
    fn stabilizers() {
        let qi = NumberField::gaussian();
        let y0 = Arithmeticoid::standard(qi);
        let i = FieldElement::from_ints(qi, 0, 1);
        assert!(stabilizer_check(&i, &y0).unwrap());
        assert!(lstar_act(&i, &y0).unwrap().same_as(&y0));
        assert!(!stabilizer_check(&FieldElement::from_ints(qi, 2, 1), &y0).unwrap());
        let qq = NumberField::rationals();
        let y0 = Arithmeticoid::standard(qq);
        assert!(stabilizer_check(&FieldElement::from_int(qq, -1), &y0).unwrap());
        assert!(!stabilizer_check(&FieldElement::from_int(qq, 2), &y0).unwrap());
    }

    #[test]
    fn frobenius_commutes_with_lstar() {
        let qi = NumberField::gaussian();
        let y0 = Arithmeticoid::standard(qi);
        let x = FieldElement::from_ints(qi, 3, -2);
        let a = global_frobenius(&lstar_act(&x, &y0).unwrap(), 2);
        let b = lstar_act(&x, &global_frobenius(&y0, 2)).unwrap();
        assert!(a.same_as(&b));
    }

    #[test]
    fn distance_basics() {
        let qq = NumberField::rationals();
        let y0 = Arithmeticoid::standard(qq);
        let fy = global_frobenius(&y0, 1);
        assert_eq!(distance(&y0, &y0).unwrap(), 0.0);
        let d = distance(&y0, &fy).unwrap();
        assert!(d > 0.0 && d < 1.0);
        assert_eq!(d, distance(&fy, &y0).unwrap());
        assert_eq!(place_index(qq, place(qq, 2)).unwrap(), Some(2));
        assert_eq!(place_index(qq, place(qq, 5)).unwrap(), Some(4));
        let qi = NumberField::gaussian();
        let over5 = places_over(qi, 5).unwrap();
        // inf, 2, 3, 5, 5'
        assert_eq!(place_index(qi, over5[1]).unwrap(), Some(5));
        assert_eq!(canonical_places(qi, 5).unwrap()[4], over5[1]);
    }

    #[test]
    fn normalization_examples() {
        let qq = NumberField::rationals();
        let y0 = Arithmeticoid::standard(qq);
        let c = normalization_coordinate(&y0);
        assert_eq!(c.finite(place(qq, 7)), Some(q(1, 1)));
        assert_eq!(c.archimedean(), 1.0);
        let fy = global_frobenius(&y0, 1);
        let c = normalization_coordinate(&fy);
        for p in [2u64, 3, 11] {
            assert_eq!(c.finite(place(qq, p)), Some(q(1, p as i64)));
            assert!(restores_standard(&fy, place(qq, p)));
        }
        let y = lstar_act(&FieldElement::from_int(qq, 18), &y0).unwrap();
        let c = normalization_coordinate(&y);
        assert_eq!(c.finite(place(qq, 2)), Some(q(1, 2)));
        assert_eq!(c.finite(place(qq, 3)), Some(q(1, 9)));
        assert!(restores_standard(&y, Place::Archimedean));
    }

    #[test]
    fn period_map_examples() {
        let qq = NumberField::rationals();
        let y0 = Arithmeticoid::standard(qq);
        assert!(period_map(&y0).is_all_ones());
        assert!(period_map(&y0) != period_map(&global_frobenius(&y0, 1)));
        assert!(period_map(&y0) == period_map(&y0.clone().with_label("copy")));
        let x = FieldElement::from_rational(qq, q(-45, 14));
        for y in [&y0, &global_frobenius(&y0, 3)] {
            let r = hyperplane_check(y, &x).unwrap();
            assert!(r.exact_cancellation);
            assert!(r.residual < 1e-12);
        }
    }

    #[test]
    fn mutation_examples() {
        let sym = |l: &str, a| TateSymbol {
            label: l.into(),
            abs: a,
        };
        let r = mutate_tate_parameters(&[sym("q", q(1, 2))], 1).unwrap();
        assert_eq!(r.entries[0].abs_after, q(2, 1));
        assert!(!r.entries[0].admissible);
        assert_eq!(r.inadmissible_count, 1);
        let three = [sym("q1", q(1, 2)), sym("q2", q(1, 3)), sym("q3", q(2, 3))];
        assert_eq!(mutate_tate_parameters(&three, 2).unwrap().inadmissible_count, 2);
        let id = mutate_tate_parameters(&three, 0).unwrap();
        assert!(!id.requires_fresh_parameters);
        assert!(id.entries.iter().all(|e| e.abs_after == e.abs_before));
        assert!(mutate_tate_parameters(&three, 4).is_err());
        assert!(mutate_tate_parameters(&[sym("q", q(1, 1))], 1).is_err());
    }

    #[test]
    fn aut_action_and_json() {
        let qq = NumberField::rationals();
        let f = FiniteField::get(3, 1).unwrap();
        let a = HahnSeries::t_pow(f, Rational64::new(1, 2), Rational64::from_integer(5));
        let v3 = place(qq, 3);
        let y = Arithmeticoid::standard(qq)
            .with_point(LocalPoint::NonArch(LocalPointNonArch::from_concrete(v3, &a).unwrap()))
            .unwrap();
        let u = |n| {
            let mut m = BTreeMap::new();
            m.insert(v3, Qp::from_i64(3, n, 8));
            m
        };
        assert_eq!(aut_act(&u(1), &y).unwrap(), y);
        let uv = aut_act(&u(2), &aut_act(&u(5), &y).unwrap()).unwrap();
        let direct = aut_act(&u(10), &y).unwrap();
        let (LocalPoint::NonArch(l), LocalPoint::NonArch(r)) = (uv.point_at(v3), direct.point_at(v3))
        else {
            panic!("finite place")
        };
        assert!(l.concrete().unwrap().eq_within_precision(r.concrete().unwrap()));
        assert!(period_map(&uv) == period_map(&y));
        assert!(matches!(
            aut_act(&u(2), &Arithmeticoid::standard(qq)),
            Err(Error::MissingConcrete(_))
        ));

        let y2 = lstar_act(&FieldElement::from_int(qq, 10), &global_frobenius(&y, -1)).unwrap();
        let text = serde_json::to_string(&y2.to_json()).unwrap();
        let back = Arithmeticoid::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, y2);
    }
}
