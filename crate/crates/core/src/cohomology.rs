//! Kummer classes `L_v^* → lim L_v^*/L_v^{*p^n}`, Tate classes of
//! semistable curves, and collation across arithmeticoids.
//!
//! A class at precision `n` is recorded as the order of `x` modulo `p^n`
//! together with a tag for its principal-unit part: `u^{q−1}` for
//! `u = x / π^{ord}`, reduced modulo a power of `p` fine enough to separate
//! the principal units modulo `p^n`-th powers.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::pow_big;
use crate::error::{Error, Result};
use crate::numfield::{
    ord, unit_residue, FieldElement, LocalResidue, NumberField, Place, PlaceRecord,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KummerClass {
    place: Place,
    precision: u32,
    order_part: BigInt,
    unit_tag: LocalResidue,
}

/// Precision of the unit tag for classes at precision `n`.
pub fn tag_precision(v: &Place, n: u32) -> u32 {
    let p = v.prime().unwrap_or(2);
    if p != 2 && v.e() == 1 {
        n + 1
    } else {
        n + 2
    }
}

impl KummerClass {
    pub fn place(&self) -> Place {
        self.place
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// `ord_v(x) mod p^n`.
    pub fn order_part(&self) -> &BigInt {
        &self.order_part
    }

    pub fn unit_tag(&self) -> &LocalResidue {
        &self.unit_tag
    }

    pub fn is_trivial(&self) -> bool {
        self.order_part.is_zero() && self.unit_tag.is_one()
    }

    fn modulus(&self) -> BigInt {
        pow_big(self.place.prime().expect("finite place"), self.precision)
    }

    /// The group law: orders add, unit tags multiply.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.place != other.place || self.precision != other.precision {
            return Err(Error::PlaceMismatch(format!(
                "classes at {} (n = {}) and {} (n = {})",
                self.place, self.precision, other.place, other.precision
            )));
        }
        Ok(KummerClass {
            place: self.place,
            precision: self.precision,
            order_part: (&self.order_part + &other.order_part).mod_floor(&self.modulus()),
            unit_tag: self.unit_tag.mul(&other.unit_tag),
        })
    }

    /// Scale the order part by `c`, keeping the unit tag.
    pub fn scale_order(&self, c: &BigInt) -> Self {
        KummerClass {
            order_part: (&self.order_part * c).mod_floor(&self.modulus()),
            ..self.clone()
        }
    }
}

/// The Kummer class of `x ≠ 0` at the finite place `v`, precision `n ≥ 1`.
pub fn kummer_class(x: &FieldElement, v: &Place, n: u32) -> Result<KummerClass> {
    if x.is_zero() {
        return Err(Error::ZeroElement);
    }
    let p = v
        .prime()
        .ok_or_else(|| Error::PlaceMismatch("Kummer classes live at finite places".into()))?;
    if n == 0 {
        return Err(Error::InvalidArgument("precision must be at least 1".into()));
    }
    let m = tag_precision(v, n);
    let (k, u) = unit_residue(x, v, m)?;
    let q1 = u.residue_field_size() - BigInt::one();
    Ok(KummerClass {
        place: *v,
        precision: n,
        order_part: BigInt::from(k).mod_floor(&pow_big(p, n)),
        unit_tag: u.pow(&q1),
    })
}

/// Classes at finitely many finite places plus the archimedean Ext slot.
#[derive(Clone, Debug, PartialEq)]
pub struct AdelicClass {
    field: NumberField,
    classes: BTreeMap<Place, KummerClass>,
    archimedean: Complex64,
}

impl AdelicClass {
    pub fn trivial(field: NumberField) -> Self {
        AdelicClass {
            field,
            classes: BTreeMap::new(),
            archimedean: Complex64::new(1.0, 0.0),
        }
    }

    pub fn field(&self) -> NumberField {
        self.field
    }

    pub fn classes(&self) -> &BTreeMap<Place, KummerClass> {
        &self.classes
    }

    pub fn archimedean(&self) -> Complex64 {
        self.archimedean
    }

    pub fn with_archimedean(mut self, q: Complex64) -> Result<Self> {
        if !(q.norm() > 0.0 && q.re.is_finite() && q.im.is_finite()) {
            return Err(Error::InvalidArgument(format!("{q} is not in C*")));
        }
        self.archimedean = q;
        Ok(self)
    }

    /// Insert a local class; trivial classes are not stored.
    pub fn with_class(mut self, c: KummerClass) -> Self {
        if c.is_trivial() {
            self.classes.remove(&c.place);
        } else {
            self.classes.insert(c.place, c);
        }
        self
    }

    /// The diagonal class of `x` at the given places.
    pub fn of_element(x: &FieldElement, places: &[Place], n: u32) -> Result<Self> {
        let mut out = Self::trivial(x.field());
        for v in places {
            out = out.with_class(kummer_class(x, v, n)?);
        }
        Ok(out)
    }
}

/// The class `𝐪` of a curve: Kummer classes of the Tate parameters at the
/// semistable places, the Schottky parameter at infinity, trivial elsewhere.
pub fn tate_class(
    field: NumberField,
    semistable: &[(Place, FieldElement)],
    schottky_arch: Complex64,
    n: u32,
) -> Result<AdelicClass> {
    let mut out = AdelicClass::trivial(field).with_archimedean(schottky_arch)?;
    for (v, q) in semistable {
        if q.field() != field {
            return Err(Error::FieldMismatch(format!("{} vs {field}", q.field())));
        }
        if q.is_zero() || ord(q, v)? <= 0 {
            return Err(Error::InvalidArgument(format!(
                "Tate parameter {q} at {v} does not satisfy |q| < 1"
            )));
        }
        out = out.with_class(kummer_class(q, v, n)?);
    }
    Ok(out)
}

/// Membership in the integral (Fontaine) subspace: all order parts vanish.
pub fn bloch_kato_member(c: &AdelicClass) -> bool {
    c.classes.values().all(|k| k.order_part.is_zero())
}

/// A per-place isomorphism: order parts are multiplied by
/// `unit_scale · p^{frobenius_shift}`. `place = None` applies at every place.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Transform {
    pub label: String,
    #[serde(default)]
    pub place: Option<PlaceRecord>,
    pub unit_scale: i64,
    #[serde(default)]
    pub frobenius_shift: u32,
    /// Transforms sharing a label and member index compose into one
    /// isomorphism; distinct members give distinct images.
    #[serde(default)]
    pub member: usize,
}

fn apply(c: &AdelicClass, transforms: &[&Transform]) -> Result<AdelicClass> {
    let mut out = AdelicClass::trivial(c.field).with_archimedean(c.archimedean)?;
    for (v, k) in &c.classes {
        let p = v.prime().expect("finite place");
        let mut scale = BigInt::one();
        for t in transforms {
            let applies = match &t.place {
                None => true,
                Some(rec) => Place::from_record(c.field, rec)? == *v,
            };
            if !applies {
                continue;
            }
            if t.unit_scale.rem_euclid(p as i64) == 0 {
                return Err(Error::NonUnit(format!("{} at {v}", t.unit_scale)));
            }
            scale *= BigInt::from(t.unit_scale) * pow_big(p, t.frobenius_shift);
        }
        out = out.with_class(k.scale_order(&scale));
    }
    Ok(out)
}

/// The union of the transformed classes, with exact duplicates merged.
///
/// Output order follows labels, then member indices.
pub fn collate(
    classes: &BTreeMap<String, AdelicClass>,
    transforms: &[Transform],
) -> Result<Vec<AdelicClass>> {
    let mut out: Vec<AdelicClass> = Vec::new();
    for (label, c) in classes {
        let mut members: BTreeMap<usize, Vec<&Transform>> = BTreeMap::new();
        for t in transforms.iter().filter(|t| &t.label == label) {
            members.entry(t.member).or_default().push(t);
        }
        if members.is_empty() {
            return Err(Error::InvalidArgument(format!("no transform for {label:?}")));
        }
        for ts in members.values() {
            let image = apply(c, ts)?;
            if !out.contains(&image) {
                out.push(image);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KummerClassJson {
    pub place: PlaceRecord,
    pub precision: u32,
    pub order_part: String,
    /// `[a, b]` for the tag `a + bω`.
    pub unit_tag: [String; 2],
    pub tag_precision: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdelicClassJson {
    pub field: String,
    pub classes: Vec<KummerClassJson>,
    /// `[re, im]`.
    pub archimedean: [f64; 2],
}

impl KummerClass {
    pub fn to_json(&self) -> KummerClassJson {
        let (a, b) = self.unit_tag.coords();
        KummerClassJson {
            place: self.place.to_record(),
            precision: self.precision,
            order_part: self.order_part.to_string(),
            unit_tag: [a.to_string(), b.to_string()],
            tag_precision: self.unit_tag.precision(),
        }
    }

    pub fn from_json(field: NumberField, j: &KummerClassJson) -> Result<Self> {
        let v = Place::from_record(field, &j.place)?;
        if j.precision == 0 {
            return Err(Error::Parse("precision must be at least 1".into()));
        }
        if j.tag_precision != tag_precision(&v, j.precision) {
            return Err(Error::Parse(format!(
                "tag precision {} does not match {}",
                j.tag_precision,
                tag_precision(&v, j.precision)
            )));
        }
        let num = |s: &str| -> Result<BigInt> {
            s.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad integer {s:?}")))
        };
        let p = v.prime().expect("finite place");
        let tag = LocalResidue::from_coords(
            field,
            &v,
            j.tag_precision,
            num(&j.unit_tag[0])?,
            num(&j.unit_tag[1])?,
        )?;
        Ok(KummerClass {
            place: v,
            precision: j.precision,
            order_part: num(&j.order_part)?.mod_floor(&pow_big(p, j.precision)),
            unit_tag: tag,
        })
    }
}

impl AdelicClass {
    pub fn to_json(&self) -> AdelicClassJson {
        AdelicClassJson {
            field: self.field.spec_string(),
            classes: self.classes.values().map(|k| k.to_json()).collect(),
            archimedean: [self.archimedean.re, self.archimedean.im],
        }
    }

    pub fn from_json(j: &AdelicClassJson) -> Result<Self> {
        let field = NumberField::parse(&j.field)?;
        let mut out = AdelicClass::trivial(field)
            .with_archimedean(Complex64::new(j.archimedean[0], j.archimedean[1]))?;
        for k in &j.classes {
            let c = KummerClass::from_json(field, k)?;
            if out.classes.contains_key(&c.place) {
                return Err(Error::Parse(format!("duplicate class at {}", c.place)));
            }
            out = out.with_class(c);
        }
        Ok(out)
    }
}
