use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{mod_inverse, pow_big, rat_to_f64};
use crate::error::{Error, Result};
use crate::ffcurve::LocalPointNonArch;
use crate::padic::Qp;

/// `c_{−1}, c_0, c_1, …` of `j(q) = Σ_{n ≥ −1} c_n q^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JCoefficients {
    coeffs: Vec<BigInt>,
}

/// The data file shipped with the crate, overridable through
/// `TEICHLAB_J_COEFFICIENTS`.
pub fn default_j_coefficients_path() -> PathBuf {
    match std::env::var_os("TEICHLAB_J_COEFFICIENTS") {
        Some(p) => PathBuf::from(p),
        None => PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/data/j_coefficients.txt")),
    }
}

impl JCoefficients {
    /// Parse `n c_n` lines; `#` starts a comment. Indices must run
    /// contiguously from −1.
    pub fn parse(text: &str) -> Result<Self> {
        let mut coeffs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let bad = || Error::Parse(format!("j-coefficient line {}: {line:?}", lineno + 1));
            let n: i64 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let c: BigInt = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            if parts.next().is_some() {
                return Err(bad());
            }
            if n != coeffs.len() as i64 - 1 {
                return Err(Error::Parse(format!(
                    "j-coefficient indices must be contiguous from -1; got {n} at line {}",
                    lineno + 1
                )));
            }
            coeffs.push(c);
        }
        if coeffs.first().is_none_or(|c| !c.is_one()) {
            return Err(Error::Parse("j-coefficients must start with c_{-1} = 1".into()));
        }
        Ok(JCoefficients { coeffs })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::MissingData(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn load_default() -> Result<Self> {
        Self::load(&default_j_coefficients_path())
    }

    /// `c_n`, for `n ≥ −1`.
    pub fn get(&self, n: i64) -> Option<&BigInt> {
        usize::try_from(n + 1).ok().and_then(|i| self.coeffs.get(i))
    }

    /// Largest `n` with `c_n` available.
    pub fn max_index(&self) -> i64 {
        self.coeffs.len() as i64 - 2
    }

    /// Coefficients of `q · j(q) = Σ_{n ≥ 0} c_{n−1} q^n`.
    fn shifted(&self) -> &[BigInt] {
        &self.coeffs
    }
}

fn truncated_mul(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Coefficients `g_1, …, g_N` of the reversion `q = Σ g_n w^n` of
/// `w = 1/j(q)`, by Lagrange inversion `g_n = [q^{n−1}] h(q)^n / n` with
/// `h(q) = q j(q)`.
pub fn reversion_coefficients(coeffs: &JCoefficients, count: usize) -> Result<Vec<BigInt>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let h = coeffs.shifted();
    if h.len() < count {
        return Err(Error::MissingData(format!(
            "reversion to {count} terms needs c_n up to n = {}, file has up to {}",
            count as i64 - 2,
            coeffs.max_index()
        )));
    }
    let h = &h[..count];
    let mut out = Vec::with_capacity(count);
    let mut power = vec![BigInt::one()];
    for n in 1..=count {
        power = truncated_mul(&power, h, count);
        let (g, r) = power[n - 1].div_rem(&BigInt::from(n));
        if !r.is_zero() {
            return Err(Error::Precision(format!(
                "reversion coefficient {n} is not integral"
            )));
        }
        out.push(g);
    }
    Ok(out)
}

/// The Tate parameter `q` with `j(q) = j`, to relative precision `m`.
///
/// Requires `v_p(j) < 0`; then `v_p(q) = −v_p(j)`.
pub fn invert_j_series(j: &Qp, m: u32, coeffs: &JCoefficients) -> Result<Qp> {
    if j.is_zero() || j.valuation() >= 0 {
        return Err(Error::NotTateCurve(if j.is_zero() { 0 } else { j.valuation() }));
    }
    let p = j.p();
    let m = m.min(j.relative_precision());
    let k = -j.valuation();
    let modulus = pow_big(p, m);
    // w = 1/j = p^k · u.
    let u = mod_inverse(j.unit(), &modulus)
        .ok_or_else(|| Error::NonUnit(format!("{} mod {p}", j.unit())))?;
    // Terms g_n w^n contribute p^{(n−1)k} to the unit part; stop once that
    // reaches p^m.
    let count = ((m as i64 - 1) / k + 1) as usize;
    let g = reversion_coefficients(coeffs, count)?;
    let pk = pow_big(p, k as u32);
    let mut acc = BigInt::zero();
    let mut scale = BigInt::one();
    let mut upow = u.clone();
    for gn in &g {
        acc = (acc + gn * &scale * &upow).mod_floor(&modulus);
        scale *= &pk;
        upow = (upow * &u).mod_floor(&modulus);
    }
    Qp::from_parts(p, k, acc, m)
}

/// `j(q) = q^{−1} + 744 + Σ c_n q^n` for `v_p(q) > 0`, to the relative
/// precision of `q`.
pub fn j_of_q(q: &Qp, coeffs: &JCoefficients) -> Result<Qp> {
    if q.is_zero() || q.valuation() <= 0 {
        return Err(Error::InvalidArgument(format!("need v_p(q) > 0, got {q}")));
    }
    let p = q.p();
    let m = q.relative_precision();
    let k = q.valuation();
    let modulus = pow_big(p, m);
    let count = ((m as i64 - 1) / k + 1) as usize;
    let h = coeffs.shifted();
    if h.len() < count {
        return Err(Error::MissingData(format!(
            "evaluating j needs c_n up to n = {}",
            count as i64 - 2
        )));
    }
    let pk = pow_big(p, k as u32);
    // q j(q) = Σ c_{n−1} p^{nk} U^n, a unit; then j = p^{−k} U^{−1} (q j(q)).
    let mut acc = BigInt::zero();
    let mut term = BigInt::one();
    for c in &h[..count] {
        acc = (acc + c * &term).mod_floor(&modulus);
        term = (term * &pk * q.unit()).mod_floor(&modulus);
    }
    let uinv = mod_inverse(q.unit(), &modulus).expect("unit");
    Qp::from_parts(p, -k, (acc * uinv).mod_floor(&modulus), m)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TeichmuellerComparison {
    /// `log_p` of the norm under each point: `−e_i · v(x)`.
    #[serde(serialize_with = "crate::numfield::ser_rational")]
    pub log_p_norm1: BigRational,
    #[serde(serialize_with = "crate::numfield::ser_rational")]
    pub log_p_norm2: BigRational,
    pub norm1: f64,
    pub norm2: f64,
    pub equal: bool,
}

/// Norms `p^{−e_i v}` of a Teichmüller lift of an element of valuation `v`
/// under two untilts.
pub fn compare_teichmueller_lifts(
    x_valuation: &BigRational,
    y1: &LocalPointNonArch,
    y2: &LocalPointNonArch,
) -> Result<TeichmuellerComparison> {
    if y1.place() != y2.place() {
        return Err(Error::PlaceMismatch(format!("{} vs {}", y1.place(), y2.place())));
    }
    let p = y1.p() as f64;
    let l1 = -(y1.beltrami() * x_valuation);
    let l2 = -(y2.beltrami() * x_valuation);
    let n1 = p.powf(rat_to_f64(&l1));
    let n2 = p.powf(rat_to_f64(&l2));
    Ok(TeichmuellerComparison {
        equal: l1 == l2,
        log_p_norm1: l1,
        log_p_norm2: l2,
        norm1: n1,
        norm2: n2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffcurve::{frobenius_point, rational_point};

    fn coeffs() -> JCoefficients {
        JCoefficients::load_default().unwrap()
    }

    #[test]
    fn file_head() {
        let c = coeffs();
        assert_eq!(c.get(0), Some(&BigInt::from(744)));
        assert_eq!(c.get(1), Some(&BigInt::from(196884)));
        assert!(c.max_index() >= 100);
    }

    #[test]
    fn reversion_head() {
        let g = reversion_coefficients(&coeffs(), 3).unwrap();
        assert_eq!(g, vec![BigInt::from(1), BigInt::from(744), BigInt::from(750420)]);
    }

    #[test]
    fn round_trip() {
        let c = coeffs();
        for p in [2u64, 3, 7] {
            for k in 1..=4i64 {
                let j = Qp::from_parts(p, -k, BigInt::from(1 + p as i64 * 5), 20).unwrap();
                let q = invert_j_series(&j, 20, &c).unwrap();
                assert_eq!(q.valuation(), k);
                assert!(j_of_q(&q, &c).unwrap().eq_within_precision(&j));
            }
        }
        let unit_j = Qp::from_i64(5, 3, 10);
        assert_eq!(invert_j_series(&unit_j, 10, &c), Err(Error::NotTateCurve(0)));
    }

    #[test]
    fn parse_rejects_gaps() {
        assert!(JCoefficients::parse("-1 1\n1 2\n").is_err());
        assert!(JCoefficients::parse("-1 2\n").is_err());
        assert!(JCoefficients::load(Path::new("/nonexistent/j.txt")).is_err());
    }

    #[test]
    fn teichmueller_norms() {
        let y = rational_point(3, BigRational::one()).unwrap();
        let v = BigRational::new(1.into(), 2.into());
        let same = compare_teichmueller_lifts(&v, &y, &y).unwrap();
        assert!(same.equal);
        let moved = compare_teichmueller_lifts(&v, &y, &frobenius_point(&y, 1)).unwrap();
        assert!(!moved.equal);
        assert_eq!(&moved.log_p_norm2 / &moved.log_p_norm1, BigRational::from_integer(3.into()));
        let zero = compare_teichmueller_lifts(&BigRational::zero(), &y, &frobenius_point(&y, 1)).unwrap();
        assert_eq!((zero.norm1, zero.norm2), (1.0, 1.0));
    }
}
