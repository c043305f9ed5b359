use std::f64::consts::TAU;

use num_complex::Complex64;
use num_rational::Rational64;
use serde::Serialize;

use super::cover::Mat2;
use crate::arith::is_prime;
use crate::error::{Error, Result};

/// The Θ-link data at `τ`: the diagonal matrices `α_j = diag(j, 1/j)`,
/// `j = 1, …, ℓ*`, with `ℓ* = (ℓ − 1)/2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThetaLink {
    pub tau: [f64; 2],
    pub ell: u64,
    pub ell_star: u64,
    pub alphas: Vec<Mat2>,
}

fn check_tau(tau: Complex64) -> Result<()> {
    if !(tau.im > 0.0) || !tau.re.is_finite() || !tau.im.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "τ = {tau} is not in the upper half plane"
        )));
    }
    Ok(())
}

pub fn check_ell(ell: u64) -> Result<()> {
    if ell < 5 || !is_prime(ell) {
        return Err(Error::InvalidArgument(format!("ℓ = {ell} is not a prime ≥ 5")));
    }
    Ok(())
}

pub fn theta_link(tau: Complex64, ell: u64) -> Result<ThetaLink> {
    check_tau(tau)?;
    check_ell(ell)?;
    let ell_star = (ell - 1) / 2;
    let alphas = (1..=ell_star)
        .map(|j| {
            let j = j as f64;
            [[j, 0.0], [0.0, 1.0 / j]]
        })
        .collect();
    Ok(ThetaLink {
        tau: [tau.re, tau.im],
        ell,
        ell_star,
        alphas,
    })
}

/// `(aτ + b) / (cτ + d)`.
pub fn mobius(g: &Mat2, tau: Complex64) -> Complex64 {
    (tau * g[0][0] + g[0][1]) / (tau * g[1][0] + g[1][1])
}

/// The Schottky parameter `q = e^{2πiτ}`.
pub fn schottky(tau: Complex64) -> Result<Complex64> {
    check_tau(tau)?;
    Ok((Complex64::i() * TAU * tau).exp())
}

/// `q_τ^α` along the branch `e^{2πiατ}` singled out by `τ`.
pub fn schottky_power(tau: Complex64, alpha: f64) -> Result<Complex64> {
    check_tau(tau)?;
    Ok((Complex64::i() * TAU * tau * alpha).exp())
}

/// The exponents `j²/2ℓ`, `j = 1, …, ℓ*`, of `2πiτ` in the theta values.
pub fn theta_exponents(ell: u64) -> Result<Vec<Rational64>> {
    check_ell(ell)?;
    Ok((1..=(ell as i64 - 1) / 2)
        .map(|j| Rational64::new(j * j, 2 * ell as i64))
        .collect())
}

/// `(q^{j²/2ℓ})_{j = 1..ℓ*}` computed as `exp(2πiτ · j²/2ℓ)`.
pub fn theta_values(tau: Complex64, ell: u64) -> Result<Vec<Complex64>> {
    check_tau(tau)?;
    Ok(theta_exponents(ell)?
        .into_iter()
        .map(|r| {
            let r = *r.numer() as f64 / *r.denom() as f64;
            (Complex64::i() * TAU * tau * r).exp()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaling_at_i() {
        let tau = Complex64::i();
        let q = schottky(tau).unwrap();
        assert!((q.re - (-TAU).exp()).abs() < 1e-18 && q.im.abs() < 1e-18);
        let link = theta_link(tau, 5).unwrap();
        let t4 = mobius(&link.alphas[1], tau);
        assert!((t4 - tau * 4.0).norm() < 1e-15);
        let q4 = schottky(t4).unwrap();
        assert!((q4 - q.powi(4)).norm() < 1e-20);
    }

    #[test]
    fn exponents_and_values() {
        assert_eq!(
            theta_exponents(5).unwrap(),
            vec![Rational64::new(1, 10), Rational64::new(4, 10)]
        );
        let v = theta_values(Complex64::new(0.3, 0.8), 11).unwrap();
        assert_eq!(v.len(), 5);
        assert!(v.windows(2).all(|w| w[1].norm() < w[0].norm()));
        let link = theta_link(Complex64::new(0.0, 1.0), 13).unwrap();
        assert!(link.alphas.iter().all(|a| (a[0][0] * a[1][1] - 1.0).abs() < 1e-15));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(schottky(Complex64::new(1.0, 0.0)).is_err());
        assert!(theta_link(Complex64::i(), 3).is_err());
        assert!(theta_link(Complex64::i(), 9).is_err());
        assert!(theta_values(Complex64::new(0.0, -1.0), 5).is_err());
    }
}
