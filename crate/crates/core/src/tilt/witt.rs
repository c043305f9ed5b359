use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::finite_field::FiniteField;
use super::hahn::{Exponent, HahnSeries};
use crate::arith::pow_big;
use crate::error::{Error, Result};

pub const MAX_WITT_LENGTH: usize = 3;

/// Multivariate polynomial with rational coefficients, keyed by exponent vectors.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MPoly {
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl MPoly {
    fn constant(nvars: usize, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![0; nvars], c);
        }
        MPoly { terms }
    }

    fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(e, BigRational::one());
        MPoly { terms }
    }

    fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let entry = terms.entry(e.clone()).or_insert_with(BigRational::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(e);
            }
        }
        MPoly { terms }
    }

    fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return MPoly::default();
        }
        MPoly {
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-BigRational::one()))
    }

    fn mul(&self, other: &Self) -> Self {
        let mut terms: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let entry = terms.entry(e).or_insert_with(BigRational::zero);
                *entry += c1 * c2;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        MPoly { terms }
    }

    fn pow(&self, n: u64, nvars: usize) -> Self {
        let mut acc = MPoly::constant(nvars, BigRational::one());
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, BigRational> {
        &self.terms
    }

    /// Coefficients as integers; panics if some coefficient is not integral.
    pub fn integer_terms(&self) -> BTreeMap<Vec<u32>, BigInt> {
        self.terms
            .iter()
            .map(|(e, c)| {
                assert!(c.is_integer(), "universal Witt polynomial must be integral");
                (e.clone(), c.to_integer())
            })
            .collect()
    }
}

/// Ghost component `w_n = Σ_{i≤n} p^i V_{offset+i}^{p^{n−i}}`.
fn ghost(p: u64, n: usize, offset: usize, nvars: usize) -> MPoly {
    let mut w = MPoly::default();
    for i in 0..=n {
        let coeff = BigRational::from_integer(pow_big(p, i as u32));
        let e = num_traits::pow(p, n - i);
        w = w.add(&MPoly::var(nvars, offset + i).pow(e, nvars).scale(&coeff));
    }
    w
}

/// Solve `target_n = Σ_{i≤n} p^i Q_i^{p^{n−i}}` for `Q_0, …, Q_{N−1}`.
fn solve_ghost(p: u64, targets: &[MPoly], nvars: usize) -> Vec<MPoly> {
    let mut out: Vec<MPoly> = Vec::new();
    for (n, target) in targets.iter().enumerate() {
        let mut rest = target.clone();
        for (i, q) in out.iter().enumerate() {
            let coeff = BigRational::from_integer(pow_big(p, i as u32));
            rest = rest.sub(&q.pow(num_traits::pow(p, n - i), nvars).scale(&coeff));
        }
        let inv = BigRational::new(BigInt::one(), pow_big(p, n as u32));
        out.push(rest.scale(&inv));
    }
    out
}

/// The universal integer polynomials `S_i`, `P_i` (in `X_0..X_{N−1}, Y_0..Y_{N−1}`)
/// and the negation polynomials `N_i` (in `X_0..X_{N−1}`).
#[derive(Clone, Debug)]
pub struct UniversalPolynomials {
    pub sum: Vec<MPoly>,
    pub product: Vec<MPoly>,
    pub negation: Vec<MPoly>,
}

pub fn universal_polynomials(p: u64, n: usize) -> UniversalPolynomials {
    let nv = 2 * n;
    let sums: Vec<MPoly> = (0..n).map(|k| ghost(p, k, 0, nv).add(&ghost(p, k, n, nv))).collect();
    let prods: Vec<MPoly> = (0..n).map(|k| ghost(p, k, 0, nv).mul(&ghost(p, k, n, nv))).collect();
    let negs: Vec<MPoly> = (0..n).map(|k| ghost(p, k, 0, n).scale(&-BigRational::one())).collect();
    UniversalPolynomials {
        sum: solve_ghost(p, &sums, nv),
        product: solve_ghost(p, &prods, nv),
        negation: solve_ghost(p, &negs, n),
    }
}

/// Reduction modulo p of a universal polynomial: `(exponents, coefficient)` pairs.
type ModPoly = Vec<(Vec<u32>, u64)>;

struct ReducedPolys {
    sum: Vec<ModPoly>,
    product: Vec<ModPoly>,
    negation: Vec<ModPoly>,
}

fn reduce(poly: &MPoly, p: u64) -> ModPoly {
    let pb = BigInt::from(p);
    poly.integer_terms()
        .into_iter()
        .filter_map(|(e, c)| {
            let r = c.mod_floor(&pb).to_u64().expect("residue");
            (r != 0).then_some((e, r))
        })
        .collect()
}

fn reduced(p: u64, n: usize) -> Arc<ReducedPolys> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), Arc<ReducedPolys>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().expect("witt cache").get(&(p, n)) {
        return r.clone();
    }
    let u = universal_polynomials(p, n);
    let r = Arc::new(ReducedPolys {
        sum: u.sum.iter().map(|q| reduce(q, p)).collect(),
        product: u.product.iter().map(|q| reduce(q, p)).collect(),
        negation: u.negation.iter().map(|q| reduce(q, p)).collect(),
    });
    cache.lock().expect("witt cache").insert((p, n), r.clone());
    r
}

/// A Witt vector of length `N ≤ 3` over the Hahn model of `O_F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittVector {
    components: Vec<HahnSeries>,
}

fn check_length(n: usize) -> Result<()> {
    if n == 0 || n > MAX_WITT_LENGTH {
        return Err(Error::WittLength(n));
    }
    Ok(())
}

/// Evaluate a mod-p polynomial at the given series values.
fn evaluate(poly: &ModPoly, values: &[HahnSeries], field: &Arc<FiniteField>, cap: Exponent) -> Result<HahnSeries> {
    let nvars = values.len();
    let mut max_exp = vec![0u32; nvars];
    for (e, _) in poly {
        for (m, x) in max_exp.iter_mut().zip(e) {
            *m = (*m).max(*x);
        }
    }
    let mut powers: Vec<Vec<HahnSeries>> = Vec::with_capacity(nvars);
    for (i, v) in values.iter().enumerate() {
        let mut row = vec![HahnSeries::one(field.clone(), cap)];
        for k in 1..=max_exp[i] as usize {
            let next = row[k - 1].mul(v)?.truncate(cap);
            row.push(next);
        }
        powers.push(row);
    }
    let mut acc = HahnSeries::zero(field.clone(), cap);
    for (e, c) in poly {
        let mut term = HahnSeries::monomial(field.clone(), field.from_int(*c as i64), Exponent::zero(), cap);
        for (i, &k) in e.iter().enumerate() {
            if k > 0 {
                term = term.mul(&powers[i][k as usize])?.truncate(cap);
            }
        }
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

impl WittVector {
    pub fn new(components: Vec<HahnSeries>) -> Result<Self> {
        check_length(components.len())?;
        let p = components[0].p();
        for c in &components {
            if c.p() != p {
                return Err(Error::PrimeMismatch { left: p, right: c.p() });
            }
            if !c.is_integral() {
                return Err(Error::NegativeValuation(format!(
                    "Witt component {c} is not in the valuation ring"
                )));
            }
        }
        Ok(WittVector { components })
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn p(&self) -> u64 {
        self.components[0].p()
    }

    pub fn components(&self) -> &[HahnSeries] {
        &self.components
    }

    fn field(&self) -> &Arc<FiniteField> {
        self.components[0].field()
    }

    fn cap(&self) -> Exponent {
        self.components.iter().map(|c| c.cap()).min().expect("nonempty")
    }

    /// `(x_0, 0, …, 0)`-style constant vectors.
    pub fn zero(field: Arc<FiniteField>, cap: Exponent, n: usize) -> Result<Self> {
        check_length(n)?;
        Ok(WittVector {
            components: vec![HahnSeries::zero(field, cap); n],
        })
    }

    pub fn one(field: Arc<FiniteField>, cap: Exponent, n: usize) -> Result<Self> {
        teichmueller_lift(&HahnSeries::one(field, cap), n)
    }

    /// `p · 1 = (0, 1, 0, …)` in characteristic p.
    pub fn p_times_one(field: Arc<FiniteField>, cap: Exponent, n: usize) -> Result<Self> {
        let mut w = Self::zero(field.clone(), cap, n)?;
        if n > 1 {
            w.components[1] = HahnSeries::one(field, cap);
        }
        Ok(w)
    }

    fn binary(&self, other: &Self, polys: &[ModPoly]) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::WittLength(other.len()));
        }
        if self.p() != other.p() {
            return Err(Error::PrimeMismatch { left: self.p(), right: other.p() });
        }
        let cap = self.cap().min(other.cap());
        let values: Vec<HahnSeries> = self
            .components
            .iter()
            .chain(other.components.iter())
            .map(|c| c.truncate(cap))
            .collect();
        let field = self.field().clone();
        let components = polys
            .iter()
            .map(|q| evaluate(q, &values, &field, cap))
            .collect::<Result<Vec<_>>>()?;
        Ok(WittVector { components })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let r = reduced(self.p(), self.len());
        self.binary(other, &r.sum)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let r = reduced(self.p(), self.len());
        self.binary(other, &r.product)
    }

    pub fn neg(&self) -> Result<Self> {
        let r = reduced(self.p(), self.len());
        let cap = self.cap();
        let field = self.field().clone();
        let components = r
            .negation
            .iter()
            .map(|q| evaluate(q, &self.components, &field, cap))
            .collect::<Result<Vec<_>>>()?;
        Ok(WittVector { components })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg()?)
    }

    pub fn eq_within_precision(&self, other: &Self) -> bool {
        self.len() == other.len()
            && self
                .components
                .iter()
                .zip(&other.components)
                .all(|(a, b)| a.eq_within_precision(b))
    }

    /// Component-wise Frobenius, the Witt-vector Frobenius in characteristic p.
    pub fn frobenius(&self) -> Self {
        WittVector {
            components: self.components.iter().map(|c| c.frobenius()).collect(),
        }
    }
}

/// `[a] = (a, 0, …, 0)`.
pub fn teichmueller_lift(a: &HahnSeries, n: usize) -> Result<WittVector> {
    check_length(n)?;
    if !a.is_integral() {
        return Err(Error::NegativeValuation(format!("{a} has negative valuation")));
    }
    let mut components = vec![a.clone()];
    for _ in 1..n {
        components.push(HahnSeries::zero(a.field().clone(), a.cap()));
    }
    Ok(WittVector { components })
}

/// The degree-one primitive element `[a] − p`.
pub fn primitive_element(a: &HahnSeries, n: usize) -> Result<WittVector> {
    let lift = teichmueller_lift(a, n)?;
    let p = WittVector::p_times_one(a.field().clone(), a.cap(), n)?;
    lift.sub(&p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use num_rational::Rational64;

    #[test]
    fn first_polynomials() {
        let u = universal_polynomials(2, 2);
        // S_0 = X_0 + Y_0.
        let s0 = u.sum[0].integer_terms();
        assert_eq!(s0.len(), 2);
        assert_eq!(s0[&vec![1, 0, 0, 0]], BigInt::one());
        assert_eq!(s0[&vec![0, 0, 1, 0]], BigInt::one());
        // S_1 = X_1 + Y_1 − X_0 Y_0 for p = 2.
        let s1 = u.sum[1].integer_terms();
        assert_eq!(s1[&vec![0, 1, 0, 0]], BigInt::one());
        assert_eq!(s1[&vec![0, 0, 0, 1]], BigInt::one());
        assert_eq!(s1[&vec![1, 0, 1, 0]], BigInt::from(-1));
        assert_eq!(s1.len(), 3);
    }

    #[test]
    fn universal_polynomials_are_integral() {
        for p in [2u64, 3, 5] {
            let u = universal_polynomials(p, 3);
            for q in u.sum.iter().chain(&u.product).chain(&u.negation) {
                assert!(q.terms().values().all(|c| c.is_integer()));
            }
        }
    }

    #[test]
    fn teichmueller_is_multiplicative() {
        let f = FiniteField::get(3, 6).unwrap();
        let mut rng = seeded(9);
        let cap = Rational64::from_integer(4);
        for _ in 0..20 {
            let a = HahnSeries::random_positive(f.clone(), &mut rng, cap, 3, &[1, 2]);
            let b = HahnSeries::random_positive(f.clone(), &mut rng, cap, 3, &[1, 3]);
            let lhs = teichmueller_lift(&a, 3).unwrap().mul(&teichmueller_lift(&b, 3).unwrap()).unwrap();
            let rhs = teichmueller_lift(&a.mul(&b).unwrap(), 3).unwrap();
            assert!(lhs.eq_within_precision(&rhs));
        }
    }

    #[test]
    fn additive_group_laws() {
        let f = FiniteField::get(2, 4).unwrap();
        let mut rng = seeded(4);
        let cap = Rational64::from_integer(3);
        let x = WittVector::new(
            (0..3)
                .map(|_| HahnSeries::random_positive(f.clone(), &mut rng, cap, 2, &[1, 2]))
                .collect(),
        )
        .unwrap();
        let zero = WittVector::zero(f.clone(), cap, 3).unwrap();
        assert!(x.add(&x.neg().unwrap()).unwrap().eq_within_precision(&zero));
        let one = WittVector::one(f.clone(), cap, 3).unwrap();
        assert!(x.mul(&one).unwrap().eq_within_precision(&x));
        // 1 + 1 = 2 = p·1 for p = 2.
        let two = one.add(&one).unwrap();
        assert!(two.eq_within_precision(&WittVector::p_times_one(f, cap, 3).unwrap()));
    }

    #[test]
    fn length_limits() {
        let f = FiniteField::get(2, 2).unwrap();
        let a = HahnSeries::t_pow(f, Rational64::one(), Rational64::from_integer(3));
        assert_eq!(teichmueller_lift(&a, 4), Err(Error::WittLength(4)));
        assert!(primitive_element(&a, 2).is_ok());
        assert!(teichmueller_lift(&a.inv().unwrap(), 2).is_err());
    }
}
