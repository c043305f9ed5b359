//! Hahn series over finite fields as a finite-precision model of perfectoid
//! fields of characteristic p.

mod finite_field;
mod hahn;
mod lubin_tate;
mod series;
mod witt;

pub use finite_field::{Coeff, FiniteField};
pub use hahn::{parse_exponent, Exponent, HahnJson, HahnSeries, HahnTermJson};
pub use lubin_tate::{lubin_tate_act, lubin_tate_endo};
pub use series::{artin_hasse, artin_hasse_rational, evaluate_series, ZpSeries};
pub use witt::{
    primitive_element, teichmueller_lift, universal_polynomials, MPoly, UniversalPolynomials,
    WittVector, MAX_WITT_LENGTH,
};
