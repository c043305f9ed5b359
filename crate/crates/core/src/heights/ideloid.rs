use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::adelic::{beltrami_at, normalization_coordinate, s_at, Arithmeticoid};
use crate::arith::{ln_rat, prime_divisors, rat_to_f64, vp_rat};
use crate::error::{Error, Result};
use crate::numfield::{
    archimedean_modulus, support_places, unit_residue, FieldElement, LocalResidue,
    NumberField, Place,
};

#[derive(Clone, Debug, PartialEq)]
pub struct IdeloidEntry {
    pub order: BigRational,
    /// Residue of the unit part; `None` is the trivial unit.
    pub unit_tag: Option<LocalResidue>,
}

/// An idele-like tuple `(x_v)` with finite support: the order and unit tag
/// at finitely many finite places, and `|x_∞|` at infinity.
#[derive(Clone, Debug, PartialEq)]
pub struct Ideloid {
    field: NumberField,
    entries: BTreeMap<Place, IdeloidEntry>,
    archimedean: BigRational,
}

impl Ideloid {
    pub fn trivial(field: NumberField) -> Self {
        Ideloid {
            field,
            entries: BTreeMap::new(),
            archimedean: BigRational::one(),
        }
    }

    pub fn field(&self) -> NumberField {
        self.field
    }

    pub fn entries(&self) -> &BTreeMap<Place, IdeloidEntry> {
        &self.entries
    }

    /// `|x_∞|` in the Artin normalization.
    pub fn archimedean(&self) -> &BigRational {
        &self.archimedean
    }

    /// Order `order` at `v`, trivial elsewhere.
    pub fn at_place(field: NumberField, v: Place, order: BigRational) -> Result<Self> {
        if v.is_archimedean() {
            return Err(Error::PlaceMismatch("orders live at finite places".into()));
        }
        let mut out = Self::trivial(field);
        if !order.is_zero() {
            out.entries.insert(
                v,
                IdeloidEntry {
                    order,
                    unit_tag: None,
                },
            );
        }
        Ok(out)
    }

    /// Set `|x_∞|`.
    pub fn with_archimedean(mut self, modulus: BigRational) -> Result<Self> {
        if !modulus.is_positive() {
            return Err(Error::InvalidArgument("archimedean modulus must be positive".into()));
        }
        self.archimedean = modulus;
        Ok(self)
    }

    /// The diagonal image of `x ∈ L*`, with unit tags modulo the maximal ideal.
    pub fn principal(x: &FieldElement) -> Result<Self> {
        if x.is_zero() {
            return Err(Error::ZeroElement);
        }
        let mut entries = BTreeMap::new();
        for v in support_places(x)? {
            let (k, tag) = unit_residue(x, &v, 1)?;
            entries.insert(
                v,
                IdeloidEntry {
                    order: BigRational::from_integer(BigInt::from(k)),
                    unit_tag: Some(tag),
                },
            );
        }
        Ok(Ideloid {
            field: x.field(),
            entries,
            archimedean: archimedean_modulus(x),
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(format!("{} vs {}", self.field, other.field)));
        }
        let mut entries = self.entries.clone();
        for (v, e) in &other.entries {
            match entries.get_mut(v) {
                None => {
                    entries.insert(*v, e.clone());
                }
                Some(mine) => {
                    mine.order += &e.order;
                    mine.unit_tag = match (mine.unit_tag.take(), &e.unit_tag) {
                        (Some(a), Some(b)) if a.precision() == b.precision() => Some(a.mul(b)),
                        (Some(a), None) => Some(a),
                        (None, Some(b)) => Some(b.clone()),
                        (None, None) => None,
                        (Some(_), Some(_)) => {
                            return Err(Error::InvalidArgument(format!(
                                "unit tags at {v} have different precision"
                            )))
                        }
                    };
                }
            }
        }
        entries.retain(|_, e| !(e.order.is_zero() && e.unit_tag.as_ref().is_none_or(|t| t.is_one())));
        Ok(Ideloid {
            field: self.field,
            entries,
            archimedean: &self.archimedean * &other.archimedean,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeReport {
    /// `Σ_{v|p} α_v log|x_v|_{K_y} / log p`, exact.
    #[serde(serialize_with = "crate::numfield::ser_rational_map")]
    pub finite_exponent_sum: BTreeMap<u64, BigRational>,
    /// `α_∞ log|x_∞|_{K_y}`.
    pub archimedean: f64,
    /// `v_p(|x_∞|)`, so the archimedean term is `Σ_p v_p · log p` exactly.
    #[serde(serialize_with = "crate::numfield::ser_rational_map")]
    pub archimedean_exponents: BTreeMap<u64, BigRational>,
    pub total: f64,
}

impl DegreeReport {
    /// The degree as an exact formal sum `Σ_p c_p log p`.
    pub fn net_exponents(&self) -> BTreeMap<u64, BigRational> {
        let mut out = self.finite_exponent_sum.clone();
        for (p, e) in &self.archimedean_exponents {
            *out.entry(*p).or_insert_with(BigRational::zero) += e;
        }
        out.retain(|_, e| !e.is_zero());
        out
    }
}

/// `deg_y((x_v)) = Σ_v α_v log|x_v|_{K_y}`.
pub fn arithmetic_degree(y: &Arithmeticoid, ideloid: &Ideloid) -> Result<DegreeReport> {
    if y.field() != ideloid.field {
        return Err(Error::FieldMismatch(format!("{} vs {}", y.field(), ideloid.field)));
    }
    let alpha = normalization_coordinate(y);
    let mut finite: BTreeMap<u64, BigRational> = BTreeMap::new();
    for (v, entry) in &ideloid.entries {
        let p = v.prime().expect("finite place");
        let log_abs = -(beltrami_at(y, *v) * &entry.order);
        let term = alpha.finite(*v).expect("finite place") * log_abs;
        *finite.entry(p).or_insert_with(BigRational::zero) += term;
    }
    finite.retain(|_, e| !e.is_zero());
    let m = &ideloid.archimedean;
    let archimedean = alpha.archimedean() * (s_at(y) * ln_rat(m));
    let mut arch_exp = BTreeMap::new();
    let primes: BTreeSet<u64> = prime_divisors(m.numer())
        .into_iter()
        .chain(prime_divisors(m.denom()))
        .collect();
    for p in primes {
        arch_exp.insert(p, BigRational::from_integer(BigInt::from(vp_rat(m, p))));
    }
    let total = finite
        .iter()
        .map(|(p, e)| rat_to_f64(e) * (*p as f64).ln())
        .sum::<f64>()
        + archimedean;
    Ok(DegreeReport {
        finite_exponent_sum: finite,
        archimedean,
        archimedean_exponents: arch_exp,
        total,
    })
}
