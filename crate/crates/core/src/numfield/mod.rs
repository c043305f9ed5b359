//! Exact arithmetic for `ℚ` and imaginary quadratic fields: elements, places,
//! valuations and the classical product formula.

mod element;
mod field;
mod local;
mod place;

pub use element::FieldElement;
pub use field::{FieldKind, NumberField};
pub use local::{
    archimedean_modulus, is_root_of_unity, ord, product_formula_check, roots_of_unity,
    standard_abs, support_places, support_primes, uniformizer, unit_residue, LocalResidue,
    LogAbs, ProductFormulaReport,
};
pub use place::{
    local_degree_sum, places_over, places_up_to, split_root, split_roots_mod_p, splitting,
    FinitePlace, Place, PlaceRecord, Splitting,
};

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::Serializer;

/// Serialize an exact rational as the string `"n"` or `"n/d"`.
pub fn ser_rational<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&crate::arith::format_rational(q))
}

pub fn ser_rational_map<S: Serializer>(
    m: &BTreeMap<u64, BigRational>,
    s: S,
) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(m.len()))?;
    for (k, v) in m {
        map.serialize_entry(&k.to_string(), &crate::arith::format_rational(v))?;
    }
    map.end()
}
