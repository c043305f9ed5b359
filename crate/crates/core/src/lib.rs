//! Desk-scale laboratory for arithmetic Teichmüller constructions over
//! ℚ and imaginary quadratic fields.
//!
//! The crate is organised bottom-up:
//!
//! * [`numfield`] exact arithmetic in the base field, places, valuations and
//!   the classical product formula;
//! * [`tilt`] Hahn series over finite fields as a model of perfectoid tilts,
//!   with Frobenius, the Artin–Hasse exponential, the Lubin–Tate action and
//!   short Witt vectors;
//! * [`ffcurve`] closed classical points of local Fargues–Fontaine curves and
//!   the archimedean curve `ℝ>0`;
//! * [`adelic`] arithmeticoids, the global Frobenius, the `L*`-action, metrics,
//!   normalization coordinates and the period map;
//! * [`heights`] deformed heights, ideloid degrees, Frobenioids and Tate
//!   parameter utilities;
//! * [`cohomology`] Kummer classes, Tate classes and collation;
//! * [`szpiro`] the universal cover of `SL2(ℝ)`, the height quasimorphism and
//!   the geometric Szpiro chain of inequalities;
//! * [`cli`] configuration and the command-line driver.

pub mod adelic;
pub mod arith;
pub mod cli;
pub mod cohomology;
pub mod error;
pub mod ffcurve;
pub mod heights;
pub mod numfield;
pub mod padic;
pub mod rng;
pub mod szpiro;
pub mod tilt;

pub use error::{Error, Result};
