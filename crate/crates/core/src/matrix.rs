//! Fixed-size 2×2 linear algebra used throughout the crate.

use std::ops::{Add, Mul};

/// A general 2×2 real matrix stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[f64; 2]; 2]);

/// A symmetric 2×2 matrix `[[xx, xy], [xy, yy]]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Sym2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn det(&self) -> f64 {
        let [[a, b], [c, d]] = self.0;
        a * d - b * c
    }

    pub fn transpose(&self) -> Self {
        let [[a, b], [c, d]] = self.0;
        Mat2([[a, c], [b, d]])
    }

    /// Adjugate; equals the inverse for unit-determinant matrices.
    pub fn adjugate(&self) -> Self {
        let [[a, b], [c, d]] = self.0;
        Mat2([[d, -b], [-c, a]])
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        let [[a, b], [c, d]] = self.0;
        [a * v[0] + b * v[1], c * v[0] + d * v[1]]
    }

    /// `self · s · selfᵀ`
    pub fn congruence(&self, s: &Sym2) -> Sym2 {
        let [[a, b], [c, d]] = self.0;
        Sym2 {
            xx: a * a * s.xx + 2.0 * a * b * s.xy + b * b * s.yy,
            xy: a * c * s.xx + (a * d + b * c) * s.xy + b * d * s.yy,
            yy: c * c * s.xx + 2.0 * c * d * s.xy + d * d * s.yy,
        }
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        let [[a, b], [c, d]] = self.0;
        let [[e, f], [g, h]] = rhs.0;
        Mat2([[a * e + b * g, a * f + b * h], [c * e + d * g, c * f + d * h]])
    }
}

impl Sym2 {
    pub const ZERO: Sym2 = Sym2 {
        xx: 0.0,
        xy: 0.0,
        yy: 0.0,
    };

    pub fn new(xx: f64, xy: f64, yy: f64) -> Self {
        Sym2 { xx, xy, yy }
    }

    pub fn diagonal(xx: f64, yy: f64) -> Self {
        Sym2 { xx, xy: 0.0, yy }
    }

    pub fn det(&self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    pub fn scale(&self, f: f64) -> Self {
        Sym2 {
            xx: f * self.xx,
            xy: f * self.xy,
            yy: f * self.yy,
        }
    }

    /// `K S K` with `K = diag(1, -1)`: flips the sign of the off-diagonal.
    pub fn reflect(&self) -> Self {
        Sym2 {
            xx: self.xx,
            xy: -self.xy,
            yy: self.yy,
        }
    }

    /// `tr(adj(self) · other)`, the mixed term of `det(self + other)`.
    pub fn mixed_det(&self, other: &Sym2) -> f64 {
        self.xx * other.yy + self.yy * other.xx - 2.0 * self.xy * other.xy
    }

    pub fn max_abs(&self) -> f64 {
        self.xx.abs().max(self.xy.abs()).max(self.yy.abs())
    }

    pub fn max_abs_diff(&self, other: &Sym2) -> f64 {
        (self.xx - other.xx)
            .abs()
            .max((self.xy - other.xy).abs())
            .max((self.yy - other.yy).abs())
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.xx, self.xy, self.yy]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Sym2 {
            xx: a[0],
            xy: a[1],
            yy: a[2],
        }
    }
}

impl Add for Sym2 {
    type Output = Sym2;

    fn add(self, rhs: Sym2) -> Sym2 {
        Sym2 {
            xx: self.xx + rhs.xx,
            xy: self.xy + rhs.xy,
            yy: self.yy + rhs.yy,
        }
    }
}
