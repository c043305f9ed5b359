use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Mat2 = [[f64; 2]; 2];

pub const IDENTITY: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

const DET_TOLERANCE: f64 = 1e-12;

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

pub fn det(a: &Mat2) -> f64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn rotation(theta: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    [[c, -s], [s, c]]
}

/// Angle of `g · (cos x, sin x)` in `(−π, π]`.
fn image_angle(g: &Mat2, x: f64) -> f64 {
    let (s, c) = x.sin_cos();
    (g[1][0] * c + g[1][1] * s).atan2(g[0][0] * c + g[0][1] * s)
}

/// An element of the universal cover of `SL2(ℝ)`, acting on angle
/// coordinates through the vector action on the plane.
///
/// The pair `(g, g̃(0))` determines the lift: `g̃` is the unique continuous
/// increasing map with `g̃(x) ≡ arg(g · e^{ix}) (mod 2π)` and the given value
/// at `0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnivCoverElt {
    pub matrix: Mat2,
    pub lift0: f64,
}

/// `lift0 = arg(g·(1,0)) ∈ [0, 2π)` plus `2π · winding`.
pub fn lift(g: Mat2, winding: i64) -> Result<UnivCoverElt> {
    let d = det(&g);
    let scale = g.iter().flatten().fold(1.0f64, |m, x| m.max(x.abs()));
    if !d.is_finite() || (d - 1.0).abs() > DET_TOLERANCE * scale * scale {
        return Err(Error::InvalidArgument(format!("determinant {d} is not 1")));
    }
    let a = image_angle(&g, 0.0).rem_euclid(TAU);
    Ok(UnivCoverElt {
        matrix: g,
        lift0: a + TAU * winding as f64,
    })
}

/// `z²`-power: the central element `φ∞^m`, translation by `2πm`.
pub fn phi_inf(m: i64) -> UnivCoverElt {
    UnivCoverElt {
        matrix: IDENTITY,
        lift0: TAU * m as f64,
    }
}

/// The lift of `−I` with `z̃(0) = π`.
pub fn z() -> UnivCoverElt {
    UnivCoverElt {
        matrix: [[-1.0, 0.0], [0.0, -1.0]],
        lift0: PI,
    }
}

impl UnivCoverElt {
    pub fn identity() -> Self {
        phi_inf(0)
    }

    /// `g̃(x)`. Writing `x = kπ + r` with `r ∈ [0, π)`, the value `g̃(r)` is
    /// the branch of the image angle in `[g̃(0), g̃(0) + π)`.
    pub fn evaluate(&self, x: f64) -> f64 {
        let k = (x / PI).floor();
        let r = x - k * PI;
        let mut d = (image_angle(&self.matrix, r) - self.lift0).rem_euclid(TAU);
        // Rounding can push a value just below the anchor onto the far branch.
        if d >= 1.5 * PI {
            d -= TAU;
        }
        self.lift0 + d + k * PI
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        UnivCoverElt {
            matrix: mat_mul(&self.matrix, &other.matrix),
            lift0: self.evaluate(other.lift0),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::identity(), |acc, _| acc.compose(self))
    }

    /// Whether `lift0` is congruent to the image angle of `(1, 0)`.
    pub fn is_valid(&self, tol: f64) -> bool {
        let d = (self.lift0 - image_angle(&self.matrix, 0.0)).rem_euclid(TAU);
        d.min(TAU - d) <= tol
    }

    /// The displacement `g̃(x) − x`, which has period `π`.
    pub fn displacement(&self, x: f64) -> f64 {
        self.evaluate(x) - x
    }
}

/// A supremum with an estimate of how far the sampled value may sit below
/// the true one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HeightEstimate {
    pub value: f64,
    pub error: f64,
}

pub const DEFAULT_GRID: usize = 4096;

/// `h(g̃) = ½ sup_x (g̃(x) − x)`.
///
/// The displacement is sampled on a uniform grid of one period, then the
/// grid maximum is refined by ternary search on the two neighbouring cells.
/// The error estimate is the largest variation of `½(g̃(x) − x)` between
/// adjacent samples.
pub fn height_q(e: &UnivCoverElt, grid: usize) -> Result<HeightEstimate> {
    if grid < 64 {
        return Err(Error::InvalidArgument(format!("grid {grid} is below 64")));
    }
    let step = PI / grid as f64;
    let samples: Vec<f64> = (0..=grid).map(|i| e.displacement(i as f64 * step)).collect();
    let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
    for (i, &d) in samples.iter().enumerate() {
        if d > best {
            best = d;
            best_i = i;
        }
    }
    let error = samples
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .fold(0.0, f64::max)
        / 2.0;
    let (mut lo, mut hi) = ((best_i as f64 - 1.0) * step, (best_i as f64 + 1.0) * step);
    for _ in 0..100 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if e.displacement(m1) < e.displacement(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let refined = e.displacement((lo + hi) / 2.0);
    Ok(HeightEstimate {
        value: best.max(refined) / 2.0,
        error,
    })
}

/// `{e · φ∞^n : |n| ≤ range}`, ordered by `n`.
pub fn log_link_chain(e: &UnivCoverElt, range: u32) -> Vec<UnivCoverElt> {
    let r = range as i64;
    (-r..=r).map(|n| e.compose(&phi_inf(n))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn basic_lifts() {
        assert_eq!(lift(IDENTITY, 0).unwrap().lift0, 0.0);
        assert_eq!(lift([[-1.0, 0.0], [0.0, -1.0]], 0).unwrap().lift0, PI);
        assert_eq!(lift(IDENTITY, 1).unwrap(), phi_inf(1));
        assert!(lift([[2.0, 0.0], [0.0, 1.0]], 0).is_err());
    }

    #[test]
    fn evaluation() {
        for x in [-7.0, -0.3, 0.0, 1.0, 2.5, 9.9] {
            assert!(close(UnivCoverElt::identity().evaluate(x), x, 1e-12));
            assert!(close(z().evaluate(x), x + PI, 1e-12));
            let r = lift(rotation(0.7), 0).unwrap();
            assert!(close(r.evaluate(x), x + 0.7, 1e-12));
        }
    }

    #[test]
    fn composition() {
        let t = lift([[1.0, 1.0], [0.0, 1.0]], 0).unwrap();
        assert_eq!(t.compose(&UnivCoverElt::identity()), t);
        let zz = z().compose(&z());
        assert!(close(zz.lift0, TAU, 1e-12));
        assert_eq!(zz.matrix, IDENTITY);
        assert!(close(t.compose(&phi_inf(1)).lift0, t.lift0 + TAU, 1e-12));
        let a = phi_inf(1).compose(&t);
        let b = t.compose(&phi_inf(1));
        assert!(close(a.lift0, b.lift0, 1e-12));
    }

    #[test]
    fn heights_of_central_elements() {
        assert!(close(height_q(&UnivCoverElt::identity(), 64).unwrap().value, 0.0, 1e-15));
        for m in -10..=10 {
            let h = height_q(&phi_inf(m), DEFAULT_GRID).unwrap();
            assert!(close(h.value, PI * m as f64, 1e-9));
        }
        assert!(height_q(&z(), 32).is_err());
    }

    #[test]
    fn chain_heights() {
        let e = lift([[2.0, 1.0], [1.0, 1.0]], 0).unwrap();
        let h = height_q(&e, DEFAULT_GRID).unwrap().value;
        for (i, x) in log_link_chain(&e, 3).iter().enumerate() {
            assert_eq!(x.matrix, e.matrix);
            let hx = height_q(x, DEFAULT_GRID).unwrap().value;
            assert!(close(hx, h + PI * (i as f64 - 3.0), 1e-9));
        }
    }
}
