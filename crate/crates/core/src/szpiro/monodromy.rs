use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, sqrt_mod_prime};
use crate::error::{Error, Result};
use crate::rng::seeded;

pub type IntMat = [[i64; 2]; 2];
pub type ModMat = [[u64; 2]; 2];

pub const INT_IDENTITY: IntMat = [[1, 0], [0, 1]];

const GENERATORS: [IntMat; 4] = [
    [[1, 1], [0, 1]],
    [[1, -1], [0, 1]],
    [[1, 0], [1, 1]],
    [[1, 0], [-1, 1]],
];

fn overflow() -> Error {
    Error::Precision("integer matrix entries overflow i64".into())
}

pub fn int_mul(a: &IntMat, b: &IntMat) -> Result<IntMat> {
    let mut out = [[0i64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let s = (a[i][0] as i128) * (b[0][j] as i128) + (a[i][1] as i128) * (b[1][j] as i128);
            out[i][j] = i64::try_from(s).map_err(|_| overflow())?;
        }
    }
    Ok(out)
}

/// Inverse of a determinant-one integer matrix.
pub fn int_inverse(a: &IntMat) -> IntMat {
    [[a[1][1], -a[0][1]], [-a[1][0], a[0][0]]]
}

pub fn int_det(a: &IntMat) -> i128 {
    a[0][0] as i128 * a[1][1] as i128 - a[0][1] as i128 * a[1][0] as i128
}

pub fn to_real(a: &IntMat) -> super::Mat2 {
    [
        [a[0][0] as f64, a[0][1] as f64],
        [a[1][0] as f64, a[1][1] as f64],
    ]
}

/// Monodromy of a genus-`g` surface with punctures: generators `a_i, b_i`
/// and `γ_s` in `SL2(ℤ)` subject to `Π [a_j, b_j] · Π γ_s = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonodromyDatum {
    pub genus: usize,
    pub handles: Vec<(IntMat, IntMat)>,
    pub punctures: Vec<IntMat>,
}

fn commutator(a: &IntMat, b: &IntMat) -> Result<IntMat> {
    int_mul(&int_mul(&int_mul(a, b)?, &int_inverse(a))?, &int_inverse(b))
}

impl MonodromyDatum {
    /// `Π [a_j, b_j] · Π γ_s`.
    pub fn relation_product(&self) -> Result<IntMat> {
        let mut acc = INT_IDENTITY;
        for (a, b) in &self.handles {
            acc = int_mul(&acc, &commutator(a, b)?)?;
        }
        for g in &self.punctures {
            acc = int_mul(&acc, g)?;
        }
        Ok(acc)
    }

    pub fn validate(&self) -> Result<()> {
        if self.handles.len() != self.genus {
            return Err(Error::InvalidArgument(format!(
                "genus {} with {} handle pairs",
                self.genus,
                self.handles.len()
            )));
        }
        let all = self
            .handles
            .iter()
            .flat_map(|(a, b)| [a, b])
            .chain(self.punctures.iter());
        for m in all {
            if int_det(m) != 1 {
                return Err(Error::InvalidArgument(format!("{m:?} is not in SL2(Z)")));
            }
        }
        if self.relation_product()? != INT_IDENTITY {
            return Err(Error::InvalidArgument("surface relation fails".into()));
        }
        Ok(())
    }

    /// Every generator, handles first.
    pub fn generators(&self) -> Vec<IntMat> {
        self.handles
            .iter()
            .flat_map(|(a, b)| [*a, *b])
            .chain(self.punctures.iter().copied())
            .collect()
    }
}

const MAX_WORD: usize = 3;

/// A random datum: each generator except the last puncture is a word of
/// length at most three in the elementary matrices, with entries bounded by
/// `entry_bound`; the last puncture is solved from the relation.
pub fn monodromy_generate(
    genus: usize,
    punctures: usize,
    seed: u64,
    entry_bound: i64,
) -> Result<MonodromyDatum> {
    if punctures == 0 {
        return Err(Error::InvalidArgument("at least one puncture is required".into()));
    }
    if entry_bound < 1 {
        return Err(Error::InvalidArgument("entry bound must be positive".into()));
    }
    let mut rng = seeded(seed);
    let mut word = || -> Result<IntMat> {
        loop {
            let len = rng.gen_range(1..=MAX_WORD);
            let mut m = INT_IDENTITY;
            for _ in 0..len {
                m = int_mul(&m, &GENERATORS[rng.gen_range(0..4)])?;
            }
            if m.iter().flatten().all(|x| x.abs() <= entry_bound) {
                return Ok(m);
            }
        }
    };
    let mut handles = Vec::with_capacity(genus);
    for _ in 0..genus {
        handles.push((word()?, word()?));
    }
    let mut ps = Vec::with_capacity(punctures);
    for _ in 1..punctures {
        ps.push(word()?);
    }
    let mut datum = MonodromyDatum {
        genus,
        handles,
        punctures: ps,
    };
    let last = int_inverse(&datum.relation_product()?);
    datum.punctures.push(last);
    Ok(datum)
}

pub fn reduce_mod(datum: &MonodromyDatum, ell: u64) -> Result<Vec<ModMat>> {
    if !is_prime(ell) {
        return Err(Error::InvalidArgument(format!("{ell} is not prime")));
    }
    Ok(datum
        .generators()
        .iter()
        .map(|m| reduce_matrix(m, ell))
        .collect())
}

pub fn reduce_matrix(m: &IntMat, ell: u64) -> ModMat {
    let r = |x: i64| x.rem_euclid(ell as i64) as u64;
    [[r(m[0][0]), r(m[0][1])], [r(m[1][0]), r(m[1][1])]]
}

fn apply(m: &ModMat, v: [u64; 2], ell: u64) -> [u64; 2] {
    [
        (m[0][0] * v[0] + m[0][1] * v[1]) % ell,
        (m[1][0] * v[0] + m[1][1] * v[1]) % ell,
    ]
}

/// Whether `m` preserves the line through `v`.
pub fn preserves_line(m: &ModMat, v: [u64; 2], ell: u64) -> bool {
    let w = apply(m, v, ell);
    (w[0] * v[1]) % ell == (w[1] * v[0]) % ell
}

/// Eigenlines of `m` over `F_ℓ`, or `None` when `m` is scalar.
fn eigenlines(m: &ModMat, ell: u64) -> Option<Vec<[u64; 2]>> {
    let [[a, b], [c, d]] = *m;
    if b == 0 && c == 0 && a == d {
        return None;
    }
    let tr = (a + d) % ell;
    let det = (a * d % ell + ell * ell - b * c % ell) % ell;
    // Roots of λ² − tr λ + det.
    let mut roots = Vec::new();
    if ell == 2 {
        roots.extend((0..2).filter(|&x| (x * x + tr * x + det) % 2 == 0));
    } else {
        let disc = (tr * tr % ell + 4 * (ell - det)) % ell;
        let Some(s) = sqrt_mod_prime(disc, ell) else {
            return Some(Vec::new());
        };
        let half = (ell + 1) / 2;
        roots.push((tr + s) % ell * half % ell);
        roots.push((tr + ell - s) % ell * half % ell);
        roots.dedup();
    }
    let mut lines = Vec::new();
    for lam in roots {
        // Kernel of m − λ: a nonzero row (p, q) gives the line (q, −p).
        let (p, q) = ((a + ell - lam) % ell, b);
        let (r, s) = (c, (d + ell - lam) % ell);
        let v = if p != 0 || q != 0 {
            [q, (ell - p) % ell]
        } else {
            [s, (ell - r) % ell]
        };
        if !lines.iter().any(|w: &[u64; 2]| (w[0] * v[1]) % ell == (w[1] * v[0]) % ell) {
            lines.push(v);
        }
    }
    Some(lines)
}

/// Whether the matrices have no common eigenvector over `F_ℓ`.
///
/// The first non-scalar matrix has at most two eigenlines, found from the
/// roots of its characteristic polynomial; the representation is reducible
/// exactly when one of them is preserved by every other matrix.
pub fn irreducible(rep: &[ModMat], ell: u64) -> Result<bool> {
    if !is_prime(ell) {
        return Err(Error::InvalidArgument(format!("{ell} is not prime")));
    }
    let rep: Vec<ModMat> = rep
        .iter()
        .map(|m| {
            let mut out = *m;
            out.iter_mut().flatten().for_each(|x| *x %= ell);
            out
        })
        .collect();
    let Some(lines) = rep.iter().find_map(|m| eigenlines(m, ell)) else {
        return Ok(false);
    };
    Ok(!lines
        .iter()
        .any(|v| rep.iter().all(|m| preserves_line(m, *v, ell))))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive search over the `ℓ + 1` points of `P¹(F_ℓ)`.
    fn brute_force_irreducible(rep: &[ModMat], ell: u64) -> bool {
        let points = std::iter::once([1, 0]).chain((0..ell).map(|t| [t, 1]));
        !points
            .into_iter()
            .any(|v| rep.iter().all(|m| preserves_line(m, v, ell)))
    }

    #[test]
    fn relation_by_construction() {
        for seed in 0..100 {
            let d = monodromy_generate((seed % 3) as usize, 1 + (seed % 5) as usize, seed, 8)
                .unwrap();
            assert_eq!(d.relation_product().unwrap(), INT_IDENTITY);
            d.validate().unwrap();
        }
    }

    #[test]
    fn known_verdicts() {
        let t = [[1, 1], [0, 1]];
        let u = [[1, 0], [1, 1]];
        assert!(irreducible(&[t, u], 5).unwrap());
        assert!(brute_force_irreducible(&[t, u], 5));
        let upper = [[[2, 3], [0, 3]], [[1, 4], [0, 1]]];
        assert!(!irreducible(&upper, 5).unwrap());
        assert!(!irreducible(&[[[3, 0], [0, 3]]], 7).unwrap());
    }

    #[test]
    fn agrees_with_brute_force() {
        let mut rng = seeded(11);
        for ell in [2u64, 3, 5, 7, 11] {
            for _ in 0..300 {
                let mut m = || -> ModMat {
                    [[rng.gen_range(0..ell), rng.gen_range(0..ell)], [
                        rng.gen_range(0..ell),
                        rng.gen_range(0..ell),
                    ]]
                };
                let rep = [m(), m()];
                assert_eq!(
                    irreducible(&rep, ell).unwrap(),
                    brute_force_irreducible(&rep, ell),
                    "{rep:?} mod {ell}"
                );
            }
        }
    }
}
