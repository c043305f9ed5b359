//! The universal cover of `SL2(ℝ)`, the height quasimorphism, log- and
//! Θ-links, and the chain of inequalities behind the geometric Szpiro bound.

mod cover;
mod monodromy;
mod theta;

pub use cover::{
    det, height_q, lift, log_link_chain, mat_mul, phi_inf, rotation, z, HeightEstimate, Mat2,
    UnivCoverElt, DEFAULT_GRID, IDENTITY,
};
pub use monodromy::{
    int_det, int_inverse, int_mul, irreducible, monodromy_generate, preserves_line,
    reduce_matrix, reduce_mod, to_real, IntMat, ModMat, MonodromyDatum, INT_IDENTITY,
};
pub use theta::{
    check_ell, mobius, schottky, schottky_power, theta_exponents, theta_link, theta_values,
    ThetaLink,
};

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::seeded;

/// One Θ-tuple: `tuple[s][j]` is the lift attached to puncture `s` and
/// `j + 1 ∈ {1, …, ℓ*}`.
pub type ThetaTuple = Vec<Vec<UnivCoverElt>>;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocusSup {
    pub value: f64,
    pub error: f64,
    /// Index of the maximizing tuple.
    pub argmax: usize,
}

fn tuple_height(t: &ThetaTuple, grid: usize) -> Result<HeightEstimate> {
    let mut out = HeightEstimate {
        value: 0.0,
        error: 0.0,
    };
    for e in t.iter().flatten() {
        let h = height_q(e, grid)?;
        out.value += h.value;
        out.error += h.error;
    }
    Ok(out)
}

/// `max Σ_s Σ_j h(g̃_{s,j})` over a finite set of tuples: a lower bound for
/// the supremum over the whole Θ-locus.
pub fn theta_locus_sup(links: &[ThetaTuple], grid: usize) -> Result<LocusSup> {
    let mut best: Option<LocusSup> = None;
    for (i, t) in links.iter().enumerate() {
        let h = tuple_height(t, grid)?;
        if best.as_ref().is_none_or(|b| h.value > b.value) {
            best = Some(LocusSup {
                value: h.value,
                error: h.error,
                argmax: i,
            });
        }
    }
    best.ok_or_else(|| Error::InvalidArgument("empty set of Θ-tuples".into()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cor312Report {
    pub lhs: f64,
    pub mid: f64,
    pub rhs: f64,
    /// Allowance for `mid ≥ rhs`: the summed grid error estimates.
    pub tolerance: f64,
    pub pass: bool,
}

/// `γ̃_s^{(j)} = lift(γ_s)^{j²} · φ∞^{w_{s,j}}`, a lift of `γ_s^{j²}`.
pub fn theta_lifts(datum: &MonodromyDatum, ell: u64, windings: &[Vec<i64>]) -> Result<ThetaTuple> {
    check_ell(ell)?;
    let ell_star = ((ell - 1) / 2) as usize;
    let mut out = Vec::with_capacity(datum.punctures.len());
    for (s, g) in datum.punctures.iter().enumerate() {
        let base = lift(to_real(g), 0)?;
        let mut row = Vec::with_capacity(ell_star);
        for j in 1..=ell_star {
            let w = windings.get(s).and_then(|r| r.get(j - 1)).copied().unwrap_or(0);
            row.push(base.pow((j * j) as u32).compose(&phi_inf(w)));
        }
        out.push(row);
    }
    Ok(out)
}

/// `|Θ| ≥ Σ_s Σ_j h(γ̃_s^{(j)}) ≥ h(Π_s γ̃_s^{(1)} ⋯ γ̃_s^{(ℓ*)})`.
///
/// `lhs` is taken over the tuple with the given windings together with the
/// tuple of default lifts. Missing windings are `0`.
pub fn corollary312_check(
    datum: &MonodromyDatum,
    ell: u64,
    windings: &[Vec<i64>],
    grid: usize,
) -> Result<Cor312Report> {
    datum.validate()?;
    let tuple = theta_lifts(datum, ell, windings)?;
    let default = theta_lifts(datum, ell, &[])?;
    let mid = tuple_height(&tuple, grid)?;
    let product = tuple
        .iter()
        .flatten()
        .fold(UnivCoverElt::identity(), |acc, e| acc.compose(e));
    let rhs = height_q(&product, grid)?;
    let lhs = theta_locus_sup(&[tuple, default], grid)?;
    let tolerance = mid.error + rhs.error + 1e-9;
    Ok(Cor312Report {
        lhs: lhs.value,
        mid: mid.value,
        rhs: rhs.value,
        tolerance,
        pass: lhs.value >= mid.value && mid.value + tolerance >= rhs.value,
    })
}

/// CSV row of a randomized run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cor312Row {
    pub seed: u64,
    pub lhs: f64,
    pub mid: f64,
    pub rhs: f64,
    pub pass: bool,
}

pub const DEFAULT_ENTRY_BOUND: i64 = 4;

/// Draw a datum and windings in `[−2, 2]` from `seed`, then run the check.
pub fn cor312_experiment(
    seed: u64,
    ell: u64,
    genus: usize,
    punctures: usize,
    grid: usize,
) -> Result<(Cor312Row, Cor312Report)> {
    check_ell(ell)?;
    let datum = monodromy_generate(genus, punctures, seed, DEFAULT_ENTRY_BOUND)?;
    let mut rng = seeded(seed ^ WINDING_STREAM);
    let ell_star = ((ell - 1) / 2) as usize;
    let windings: Vec<Vec<i64>> = (0..punctures)
        .map(|_| (0..ell_star).map(|_| rng.gen_range(-2..=2)).collect())
        .collect();
    let report = corollary312_check(&datum, ell, &windings, grid)?;
    Ok((
        Cor312Row {
            seed,
            lhs: report.lhs,
            mid: report.mid,
            rhs: report.rhs,
            pass: report.pass,
        },
        report,
    ))
}

const WINDING_STREAM: u64 = 0x9e37_79b9_7f4a_7c15;

/// A vertex `θ_{n,m}` of the log-Θ lattice: the Θ-link tuple `θ_n` moved
/// `m` steps along the log-link direction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LatticeEntry {
    pub n: i64,
    pub m: i64,
    pub label: String,
    pub base: String,
    pub tau: [f64; 2],
    pub elements: Vec<UnivCoverElt>,
}

impl LatticeEntry {
    /// The canonical surjection `θ_{n,m} ↦ θ_n`.
    pub fn project(&self) -> &str {
        &self.base
    }
}

/// The grid `{θ_{n,m}}` over the given ranges. Each column `n` carries a
/// random `τ_n` and the lifts of `diag(j, 1/j)`; the vertical fibers are the
/// `φ∞`-translates.
pub fn log_theta_lattice(
    n_range: std::ops::RangeInclusive<i64>,
    m_range: std::ops::RangeInclusive<i64>,
    ell: u64,
    seed: u64,
) -> Result<Vec<LatticeEntry>> {
    let mut rng = seeded(seed);
    let mut out = Vec::new();
    for n in n_range {
        let tau = Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.5..2.0));
        let link = theta_link(tau, ell)?;
        let lifts = link
            .alphas
            .iter()
            .map(|a| lift(*a, 0))
            .collect::<Result<Vec<_>>>()?;
        for m in m_range.clone() {
            out.push(LatticeEntry {
                n,
                m,
                label: format!("theta_{{{n},{m}}}"),
                base: format!("theta_{{{n}}}"),
                tau: link.tau,
                elements: lifts.iter().map(|e| e.compose(&phi_inf(m))).collect(),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn trivial_datum() {
        let d = MonodromyDatum {
            genus: 0,
            handles: vec![],
            punctures: vec![INT_IDENTITY],
        };
        let r = corollary312_check(&d, 5, &[], 256).unwrap();
        assert!([r.lhs, r.mid, r.rhs].iter().all(|x| x.abs() < 1e-12), "{r:?}");
        assert!(r.pass);
    }

    #[test]
    fn single_unipotent() {
        let d = MonodromyDatum {
            genus: 0,
            handles: vec![],
            punctures: vec![[[1, 1], [0, 1]]],
        };
        assert!(d.validate().is_err());
        let d = MonodromyDatum {
            genus: 0,
            handles: vec![],
            punctures: vec![[[1, 1], [0, 1]], [[1, -1], [0, 1]]],
        };
        let r = corollary312_check(&d, 5, &[], DEFAULT_GRID).unwrap();
        assert!(r.pass && r.mid >= r.rhs - r.tolerance);
        assert!(corollary312_check(&d, 9, &[], DEFAULT_GRID).is_err());
    }

    #[test]
    fn seeded_runs() {
        for seed in 0..10 {
            let (row, rep) = cor312_experiment(seed, 7, (seed % 3) as usize, 3, 512).unwrap();
            assert!(row.pass, "{rep:?}");
            let again = cor312_experiment(seed, 7, (seed % 3) as usize, 3, 512).unwrap().0;
            assert_eq!(row, again);
        }
    }

    #[test]
    fn locus_sup() {
        let a = vec![vec![phi_inf(1)]];
        let b = vec![vec![phi_inf(2), phi_inf(-1)]];
        assert!((theta_locus_sup(std::slice::from_ref(&a), 64).unwrap().value - PI).abs() < 1e-12);
        let both = theta_locus_sup(&[a, b], 64).unwrap();
        assert!((both.value - PI).abs() < 1e-12);
        assert!(theta_locus_sup(&[], 64).is_err());
    }

    #[test]
    fn lattice_fibers() {
        let lat = log_theta_lattice(0..=1, -2..=2, 5, 3).unwrap();
        assert_eq!(lat.len(), 10);
        let fiber: Vec<_> = lat.iter().filter(|e| e.project() == "theta_{0}").collect();
        assert_eq!(fiber.len(), 5);
        let h0 = height_q(&fiber[0].elements[1], 1024).unwrap().value;
        for (k, e) in fiber.iter().enumerate() {
            assert_eq!(e.elements[1].matrix, fiber[0].elements[1].matrix);
            let h = height_q(&e.elements[1], 1024).unwrap().value;
            assert!((h - h0 - PI * k as f64).abs() < 1e-9);
        }
    }
}
