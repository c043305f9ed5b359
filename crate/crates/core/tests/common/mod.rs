//! Independent oracles and random generators shared by the integration
//! tests. Nothing here calls the routine it is used to check.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use teichlab::adelic::{global_frobenius, lstar_act, Arithmeticoid};
use teichlab::ffcurve::{LocalPoint, LocalPointArch, LocalPointNonArch};
use teichlab::numfield::{places_over, FieldElement, NumberField};
use teichlab::rng::LabRng;
use teichlab::szpiro::{Mat2, ModMat};
use teichlab::tilt::{FiniteField, HahnSeries, WittVector};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// A random nonzero element with numerators in `[-bound, bound]` and small
/// denominators.
pub fn random_element(rng: &mut LabRng, field: NumberField, bound: i64) -> FieldElement {
    loop {
        let a = rat(rng.gen_range(-bound..=bound), rng.gen_range(1..=6));
        let b = rat(rng.gen_range(-bound..=bound), rng.gen_range(1..=6));
        let x = FieldElement::new(field, a, b);
        if !x.is_zero() {
            return x;
        }
    }
}

/// A random arithmeticoid built from `y₀` by a Frobenius shift, a few
/// `L*`-moves, and optional local replacements.
pub fn random_arithmeticoid(rng: &mut LabRng, field: NumberField) -> Arithmeticoid {
    let mut y = global_frobenius(&Arithmeticoid::standard(field), rng.gen_range(-2..=2));
    for _ in 0..rng.gen_range(0..3) {
        let x = random_element(rng, field, 30);
        y = lstar_act(&x, &y).unwrap();
    }
    if rng.gen_bool(0.5) {
        let p = [2u64, 3, 5, 7, 11, 13][rng.gen_range(0..6)];
        let vs = places_over(field, p).unwrap();
        let v = vs[rng.gen_range(0..vs.len())];
        let e = rat(rng.gen_range(1..=40), rng.gen_range(1..=6));
        y = y
            .with_point(LocalPoint::NonArch(LocalPointNonArch::new(v, e).unwrap()))
            .unwrap();
    }
    if rng.gen_bool(0.3) {
        let s = rng.gen_range(0.1..5.0);
        y = y
            .with_point(LocalPoint::Arch(LocalPointArch::new(s).unwrap()))
            .unwrap();
    }
    y
}

/// Exhaustive common-eigenvector search over the `ℓ + 1` points of `P¹(F_ℓ)`.
pub fn brute_force_irreducible(rep: &[ModMat], ell: u64) -> bool {
    let points = std::iter::once([1u64, 0]).chain((0..ell).map(|t| [t, 1]));
    for v in points {
        let fixed = rep.iter().all(|m| {
            let w0 = (m[0][0] * v[0] + m[0][1] * v[1]) % ell;
            let w1 = (m[1][0] * v[0] + m[1][1] * v[1]) % ell;
            (w0 * v[1] + ell * ell - w1 * v[0]) % ell == 0
        });
        if fixed {
            return false;
        }
    }
    true
}

pub fn random_mod_matrix(rng: &mut LabRng, ell: u64) -> ModMat {
    [
        [rng.gen_range(0..ell), rng.gen_range(0..ell)],
        [rng.gen_range(0..ell), rng.gen_range(0..ell)],
    ]
}

fn mod_mul(a: &ModMat, b: &ModMat, ell: u64) -> ModMat {
    let mut out = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = (a[i][0] * b[0][j] + a[i][1] * b[1][j]) % ell;
        }
    }
    out
}

/// A pair sharing an eigenline: upper-triangular matrices conjugated by a
/// random invertible matrix.
pub fn conjugated_triangular_pair(rng: &mut LabRng, ell: u64) -> [ModMat; 2] {
    let c = loop {
        let c = random_mod_matrix(rng, ell);
        if (c[0][0] * c[1][1] + ell * ell - c[0][1] * c[1][0]) % ell != 0 {
            break c;
        }
    };
    let det = (c[0][0] * c[1][1] + ell * ell - c[0][1] * c[1][0]) % ell;
    let inv_det = teichlab::arith::modpow_u64(det, ell - 2, ell);
    let c_inv = [
        [c[1][1] * inv_det % ell, (ell - c[0][1]) * inv_det % ell],
        [(ell - c[1][0]) * inv_det % ell, c[0][0] * inv_det % ell],
    ];
    let mut tri = || -> ModMat { [[rng.gen_range(0..ell), rng.gen_range(0..ell)], [0, rng.gen_range(0..ell)]] };
    let (a, b) = (tri(), tri());
    [
        mod_mul(&mod_mul(&c, &a, ell), &c_inv, ell),
        mod_mul(&mod_mul(&c, &b, ell), &c_inv, ell),
    ]
}

/// A random element of `SL2(ℝ)` as rotation · diagonal · unipotent.
pub fn random_sl2(rng: &mut LabRng) -> Mat2 {
    let (t, s, x): (f64, f64, f64) = (
        rng.gen_range(0.0..2.0 * PI),
        rng.gen_range(-1.5..1.5),
        rng.gen_range(-2.0..2.0),
    );
    let (c, sn) = (t.cos(), t.sin());
    let (es, ei) = (s.exp(), (-s).exp());
    // [[c, −sn], [sn, c]] · [[es, es·x], [0, ei]]
    [
        [c * es, c * es * x - sn * ei],
        [sn * es, sn * es * x + c * ei],
    ]
}

fn wrap(d: f64) -> f64 {
    let mut d = d.rem_euclid(2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    }
    d
}

/// `g̃(x) − x` from the turning angle between `v(x)` and `g v(x)`: the
/// displacement moves by less than π within a period, so it is the wrapped
/// turning angle relative to the anchor at `x = 0`.
pub fn displacement_oracle(g: &Mat2, lift0: f64, x: f64) -> f64 {
    let turn = |x: f64| {
        let (c, s) = (x.cos(), x.sin());
        let (u, w) = (g[0][0] * c + g[0][1] * s, g[1][0] * c + g[1][1] * s);
        // arg((u + iw) · conj(c + is))
        (w * c - u * s).atan2(u * c + w * s)
    };
    let r = x.rem_euclid(PI);
    lift0 + wrap(turn(r) - turn(0.0))
}

/// `½ sup (g̃(x) − x)` from the critical points `|g v(x)| = 1`.
///
/// With `S = gᵀg = [[a, b], [b, c]]` the condition reads
/// `A cos 2x + B sin 2x = C` for `A = (a − c)/2`, `B = b`,
/// `C = 1 − (a + c)/2`.
pub fn analytic_height(g: &Mat2, lift0: f64) -> f64 {
    let a = g[0][0] * g[0][0] + g[1][0] * g[1][0];
    let b = g[0][0] * g[0][1] + g[1][0] * g[1][1];
    let c = g[0][1] * g[0][1] + g[1][1] * g[1][1];
    let (aa, bb, cc) = ((a - c) / 2.0, b, 1.0 - (a + c) / 2.0);
    let r = aa.hypot(bb);
    let mut candidates = vec![0.0];
    if r > 1e-14 {
        let phase = bb.atan2(aa);
        let spread = (cc / r).clamp(-1.0, 1.0).acos();
        candidates.push((phase + spread) / 2.0);
        candidates.push((phase - spread) / 2.0);
    }
    candidates
        .into_iter()
        .map(|x| displacement_oracle(g, lift0, x))
        .fold(f64::NEG_INFINITY, f64::max)
        / 2.0
}

/// Series over ℤ indexed by rational exponents, truncated below `cap`.
type ZSeries = BTreeMap<Rational64, BigInt>;

fn z_lift(s: &HahnSeries) -> ZSeries {
    s.terms()
        .iter()
        .map(|(a, c)| (*a, BigInt::from(c[0])))
        .collect()
}

fn z_add(a: &ZSeries, b: &ZSeries) -> ZSeries {
    let mut out = a.clone();
    for (e, c) in b {
        *out.entry(*e).or_insert_with(BigInt::zero) += c;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn z_scale(a: &ZSeries, k: &BigInt) -> ZSeries {
    a.iter().map(|(e, c)| (*e, c * k)).filter(|(_, c)| !c.is_zero()).collect()
}

fn z_mul(a: &ZSeries, b: &ZSeries, cap: Rational64) -> ZSeries {
    let mut out = ZSeries::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e = *ea + *eb;
            if e < cap {
                *out.entry(e).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn z_pow(a: &ZSeries, n: u64, cap: Rational64) -> ZSeries {
    let mut out: ZSeries = [(Rational64::zero(), BigInt::one())].into_iter().collect();
    for _ in 0..n {
        out = z_mul(&out, a, cap);
    }
    out
}

/// Ghost components `w_n = Σ_{i ≤ n} p^i x_i^{p^{n−i}}`.
fn ghost(x: &[ZSeries], p: u64, cap: Rational64) -> Vec<ZSeries> {
    (0..x.len())
        .map(|n| {
            let mut w = ZSeries::new();
            for (i, xi) in x.iter().enumerate().take(n + 1) {
                let term = z_pow(xi, p.pow((n - i) as u32), cap);
                w = z_add(&w, &z_scale(&term, &BigInt::from(p).pow(i as u32)));
            }
            w
        })
        .collect()
}

/// Invert the ghost map over ℤ, insisting on exact divisibility.
fn unghost(w: &[ZSeries], p: u64, cap: Rational64) -> Vec<ZSeries> {
    let mut s: Vec<ZSeries> = Vec::new();
    for (n, wn) in w.iter().enumerate() {
        let mut rest = wn.clone();
        for (i, si) in s.iter().enumerate() {
            let term = z_pow(si, p.pow((n - i) as u32), cap);
            rest = z_add(&rest, &z_scale(&term, &-BigInt::from(p).pow(i as u32)));
        }
        let pn = BigInt::from(p).pow(n as u32);
        let sn = rest
            .into_iter()
            .map(|(e, c)| {
                let (q, r) = c.div_rem(&pn);
                assert!(r.is_zero(), "ghost component {n} not divisible by p^{n}");
                (e, q)
            })
            .collect();
        s.push(sn);
    }
    s
}

fn reduce(s: &ZSeries, field: &Arc<FiniteField>, cap: Rational64) -> HahnSeries {
    let p = BigInt::from(field.p());
    HahnSeries::from_terms(
        field.clone(),
        s.iter()
            .map(|(e, c)| (*e, vec![c.mod_floor(&p).to_u64().unwrap()])),
        cap,
    )
}

/// Sum or product of two Witt vectors over `F_p` through ghost components.
pub fn witt_ghost_oracle(x: &WittVector, y: &WittVector, product: bool) -> WittVector {
    let field = x.components()[0].field().clone();
    assert_eq!(field.degree(), 1, "oracle works over the prime field");
    let cap = x
        .components()
        .iter()
        .chain(y.components())
        .map(|c| c.cap())
        .min()
        .unwrap();
    let p = field.p();
    let lx: Vec<ZSeries> = x.components().iter().map(z_lift).collect();
    let ly: Vec<ZSeries> = y.components().iter().map(z_lift).collect();
    let (gx, gy) = (ghost(&lx, p, cap), ghost(&ly, p, cap));
    let combined: Vec<ZSeries> = gx
        .iter()
        .zip(&gy)
        .map(|(a, b)| if product { z_mul(a, b, cap) } else { z_add(a, b) })
        .collect();
    let s = unghost(&combined, p, cap);
    WittVector::new(s.iter().map(|c| reduce(c, &field, cap)).collect()).unwrap()
}

/// A random series in the valuation ring: a few monomials with exponents in
/// `[0, cap)` whose denominators divide 6.
pub fn random_integral_series(rng: &mut LabRng, field: &Arc<FiniteField>, cap: i64) -> HahnSeries {
    let terms: Vec<(Rational64, Vec<u64>)> = (0..rng.gen_range(1..=4))
        .map(|_| {
            let d = [1i64, 2, 3, 6][rng.gen_range(0..4)];
            let e = Rational64::new(rng.gen_range(0..cap * d), d);
            (e, field.random(rng))
        })
        .collect();
    HahnSeries::from_terms(field.clone(), terms, Rational64::from_integer(cap))
}

/// `exp(Σ_j T^{p^j}/p^j)` by the exponential series, exactly.
pub fn artin_hasse_by_exp(p: u64, degree: usize) -> Vec<BigRational> {
    let mut f = vec![BigRational::zero(); degree + 1];
    let mut pj = 1usize;
    while pj <= degree {
        f[pj] = BigRational::new(BigInt::one(), BigInt::from(pj));
        pj *= p as usize;
    }
    let mut out = vec![BigRational::zero(); degree + 1];
    let mut term = vec![BigRational::zero(); degree + 1];
    term[0] = BigRational::one();
    for k in 0..=degree {
        for (o, t) in out.iter_mut().zip(&term) {
            *o += t;
        }
        let mut next = vec![BigRational::zero(); degree + 1];
        for (i, t) in term.iter().enumerate() {
            if t.is_zero() {
                continue;
            }
            for (j, c) in f.iter().enumerate().take(degree + 1 - i) {
                if !c.is_zero() {
                    next[i + j] += t * c;
                }
            }
        }
        let kk = BigRational::from_integer(BigInt::from(k + 1));
        term = next.into_iter().map(|c| c / &kk).collect();
    }
    out
}

/// `c_{−1}, c_0, …, c_{max}` of `j = E4³/Δ`, with
/// `E4 = 1 + 240 Σ σ₃(n) qⁿ` and `Δ = q Π (1 − qⁿ)^24`.
pub fn j_coefficients_oracle(max: usize) -> Vec<BigInt> {
    let len = max + 2;
    let mul = |a: &[BigInt], b: &[BigInt]| -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); len];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate().take(len - i) {
                out[i + j] += x * y;
            }
        }
        out
    };
    let mut e4 = vec![BigInt::zero(); len];
    e4[0] = BigInt::one();
    for (n, c) in e4.iter_mut().enumerate().skip(1) {
        let sigma3: u64 = (1..=n as u64).filter(|d| n as u64 % d == 0).map(|d| d * d * d).sum();
        *c = BigInt::from(240u64 * sigma3);
    }
    let e4_cubed = mul(&mul(&e4, &e4), &e4);
    let mut prod = vec![BigInt::zero(); len];
    prod[0] = BigInt::one();
    for n in 1..len {
        let mut factor = vec![BigInt::zero(); len];
        factor[0] = BigInt::one();
        factor[n] = -BigInt::one();
        for _ in 0..24 {
            prod = mul(&prod, &factor);
        }
    }
    // Invert the unit power series `prod`.
    let mut inv = vec![BigInt::zero(); len];
    inv[0] = BigInt::one();
    for n in 1..len {
        let s: BigInt = (1..=n).map(|k| &prod[k] * &inv[n - k]).sum();
        inv[n] = -s;
    }
    mul(&e4_cubed, &inv)
}

pub fn is_p_integral(q: &BigRational, p: u64) -> bool {
    !q.denom().is_multiple_of(&BigInt::from(p))
}

/// `v_p` of a nonzero rational by repeated division.
pub fn vp(q: &BigRational, p: u64) -> i64 {
    let count = |n: &BigInt| {
        let (mut n, p, mut k) = (n.abs(), BigInt::from(p), 0i64);
        while n.is_multiple_of(&p) {
            n /= &p;
            k += 1;
        }
        k
    };
    count(q.numer()) - count(q.denom())
}

/// Prime factors of a positive integer below `2^63`, by trial division.
pub fn small_prime_factors(n: &BigInt) -> Vec<u64> {
    let mut n = n.abs().to_u64().expect("small integer");
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}
