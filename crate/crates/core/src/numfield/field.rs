use std::fmt;

use crate::error::{Error, Result};

/// The supported base fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldKind {
    Rationals,
    /// `ℚ(√−d)` with `d` squarefree and positive.
    ImaginaryQuadratic { d: u64 },
}

/// `ℚ` or an imaginary quadratic field, with the integral basis `{1, ω}`.
///
/// `ω = √−d` when `d ≡ 1, 2 (mod 4)` and `ω = (1 + √−d)/2` when `d ≡ 3 (mod 4)`;
/// in both cases `ω² = tω − n` with `(t, n)` given by [`NumberField::omega_trace`]
/// and [`NumberField::omega_norm`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NumberField {
    kind: FieldKind,
}

fn squarefree(d: u64) -> bool {
    let mut k = 2u64;
    while k * k <= d {
        if d % (k * k) == 0 {
            return false;
        }
        k += 1;
    }
    true
}

impl NumberField {
    pub fn rationals() -> Self {
        NumberField {
            kind: FieldKind::Rationals,
        }
    }

    pub fn imaginary_quadratic(d: u64) -> Result<Self> {
        if d == 0 || !squarefree(d) {
            return Err(Error::UnsupportedField(format!(
                "d = {d} must be a positive squarefree integer"
            )));
        }
        Ok(NumberField {
            kind: FieldKind::ImaginaryQuadratic { d },
        })
    }

    pub fn gaussian() -> Self {
        NumberField {
            kind: FieldKind::ImaginaryQuadratic { d: 1 },
        }
    }

    pub fn eisenstein() -> Self {
        NumberField {
            kind: FieldKind::ImaginaryQuadratic { d: 3 },
        }
    }

    /// Parses `"Q"`, `"Q(i)"` or `"Q(sqrt(-d))"` (whitespace ignored).
    pub fn parse(spec: &str) -> Result<Self> {
        let s: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
        if s == "Q" || s == "QQ" {
            return Ok(Self::rationals());
        }
        if s == "Q(i)" {
            return Ok(Self::gaussian());
        }
        let inner = s
            .strip_prefix("Q(sqrt(")
            .and_then(|r| r.strip_suffix("))"))
            .ok_or_else(|| Error::UnsupportedField(spec.to_string()))?;
        let radicand: i64 = inner
            .parse()
            .map_err(|_| Error::UnsupportedField(spec.to_string()))?;
        if radicand >= 0 {
            return Err(Error::UnsupportedField(format!(
                "{spec}: only imaginary quadratic fields (negative radicand) are supported"
            )));
        }
        Self::imaginary_quadratic(radicand.unsigned_abs())
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn degree(&self) -> u32 {
        match self.kind {
            FieldKind::Rationals => 1,
            FieldKind::ImaginaryQuadratic { .. } => 2,
        }
    }

    pub fn d(&self) -> Option<u64> {
        match self.kind {
            FieldKind::Rationals => None,
            FieldKind::ImaginaryQuadratic { d } => Some(d),
        }
    }

    pub fn is_rational(&self) -> bool {
        self.kind == FieldKind::Rationals
    }

    /// True when `ω = (1 + √−d)/2`.
    pub fn half_integral_basis(&self) -> bool {
        matches!(self.kind, FieldKind::ImaginaryQuadratic { d } if d % 4 == 3)
    }

    /// `t` in `ω² = tω − n`.
    pub fn omega_trace(&self) -> i64 {
        if self.half_integral_basis() {
            1
        } else {
            0
        }
    }

    /// `n` in `ω² = tω − n`, i.e. the norm of `ω`.
    pub fn omega_norm(&self) -> i64 {
        match self.kind {
            FieldKind::Rationals => 0,
            FieldKind::ImaginaryQuadratic { d } => {
                if d % 4 == 3 {
                    ((1 + d) / 4) as i64
                } else {
                    d as i64
                }
            }
        }
    }

    pub fn discriminant(&self) -> i64 {
        match self.kind {
            FieldKind::Rationals => 1,
            FieldKind::ImaginaryQuadratic { d } => {
                if d % 4 == 3 {
                    -(d as i64)
                } else {
                    -4 * d as i64
                }
            }
        }
    }

    /// Canonical textual form accepted by [`NumberField::parse`].
    pub fn spec_string(&self) -> String {
        match self.kind {
            FieldKind::Rationals => "Q".to_string(),
            FieldKind::ImaginaryQuadratic { d } => format!("Q(sqrt(-{d}))"),
        }
    }
}

impl fmt::Display for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec_string())
    }
}
