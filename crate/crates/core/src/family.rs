//! The marked cubic family `P_{λ,c}` and its normalizations.
//!
//! `P_{λ,c}` fixes `0` with multiplier `λ` and has critical points `1` and `c`.
//! Forgetting the marking of the critical points identifies `c` with `1/c`
//! and gives the coordinate `v = (c + 1/c)/2`; forgetting the fixed point as
//! well gives the monic centred form `z³ + a z + b` up to `b ↦ -b`, with
//! coordinates `(a, b²)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const FIBER_TOL: f64 = 1e-12;

/// A marked cubic `P_{λ,c}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicSlicePoint {
    pub lambda: Complex64,
    pub c: Complex64,
}

/// Coordinates of the unmarked classes: `v`, and `(a, b²)` of `z³ + a z + b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnmarkedCoords {
    pub v: Complex64,
    pub a: Complex64,
    pub b2: Complex64,
}

impl CubicSlicePoint {
    pub fn new(lambda: Complex64, c: Complex64) -> Result<Self> {
        if c == Complex64::new(0.0, 0.0) || !c.is_finite() {
            return Err(Error::InvalidInput(format!("critical parameter c = {c} must be finite and nonzero")));
        }
        if !lambda.is_finite() {
            return Err(Error::InvalidInput(format!("multiplier λ = {lambda} is not finite")));
        }
        Ok(Self { lambda, c })
    }

    /// `1/c`, the coordinate used by the polynomial form `Č(u)`.
    #[inline]
    pub fn u(&self) -> Complex64 {
        self.c.inv()
    }

    /// Taylor coefficients `(a₁, a₂, a₃)` at the origin.
    pub fn coefficients(&self) -> (Complex64, Complex64, Complex64) {
        let u = self.u();
        let l = self.lambda;
        (l, -l * (1.0 + u) / 2.0, l * u / 3.0)
    }

    #[inline]
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let u = self.u();
        self.lambda * z * (1.0 - (1.0 + u) * z / 2.0 + u * z * z / 3.0)
    }

    /// `P'(z) = λ (1 - z)(1 - z/c)`.
    #[inline]
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        self.lambda * (1.0 - z) * (1.0 - z * self.u())
    }

    pub fn critical_points(&self) -> [Complex64; 2] {
        [Complex64::new(1.0, 0.0), self.c]
    }

    /// The same polynomial class with the critical points exchanged.
    pub fn swapped(&self) -> Self {
        Self { lambda: self.lambda, c: self.u() }
    }

    pub fn coordinates(&self) -> UnmarkedCoords {
        coordinates(self)
    }

    pub fn escape_radius(&self) -> f64 {
        escape_radius(self)
    }
}

pub fn eval_cubic(p: &CubicSlicePoint, z: Complex64) -> Complex64 {
    p.eval(z)
}

/// The limit `Q_λ(z) = λ z (1 - z/2)` of `P_{λ,c}` as `c → ∞`.
#[inline]
pub fn quadratic(lambda: Complex64, z: Complex64) -> Complex64 {
    lambda * z * (1.0 - z / 2.0)
}

pub fn coordinates(p: &CubicSlicePoint) -> UnmarkedCoords {
    let l = p.lambda;
    let v = (p.c + p.u()) / 2.0;
    let a = l * (1.0 - v) / 2.0;
    let k = 1.0 + (v - 2.0) * l / 3.0;
    let b2 = l / 3.0 * ((v + 1.0) / 2.0) * k * k;
    UnmarkedCoords { v, a, b2 }
}

/// Inverts `c ↦ (c + 1/c)/2`, returning the preimage with `|c| ≥ 1`.
pub fn c_from_v(v: Complex64) -> Complex64 {
    let s = (v * v - 1.0).sqrt();
    let plus = v + s;
    let minus = v - s;
    if plus.norm() >= minus.norm() {
        plus
    } else {
        minus
    }
}

fn close(x: Complex64, y: Complex64) -> bool {
    let scale = 1f64.max(x.norm()).max(y.norm());
    (x - y).norm() <= FIBER_TOL * scale
}

/// Number of points `(λ, v)` lying over the class `z³ + a z + b`, `b² = b2`.
///
/// Equality tests use a relative tolerance of `1e-12`. Classes with a fixed
/// critical point that is not covered by the exceptional cases lose that
/// fixed point as a marking (its multiplier would be `0`) and have two
/// preimages.
pub fn fiber_cardinality(a: Complex64, b2: Complex64) -> u8 {
    let zero = Complex64::new(0.0, 0.0);
    let re = |x: f64| Complex64::new(x, 0.0);

    if close(b2, zero) {
        if close(a, zero) || close(a, re(1.0)) || close(a, re(1.5)) {
            return 1;
        }
        return 2;
    }
    // Fixed points solve z³ + (a - 1) z + b = 0; a double root means the
    // discriminant -4(a-1)³ - 27 b² vanishes.
    let am1 = a - 1.0;
    let disc = -4.0 * am1 * am1 * am1 - 27.0 * b2;
    let disc_scale = 1f64.max(4.0 * am1.norm().powi(3)).max(27.0 * b2.norm());
    if disc.norm() <= FIBER_TOL * disc_scale {
        if close(a, re(4.0 / 3.0)) && close(b2, re(-4.0 / 729.0)) {
            return 1;
        }
        return 2;
    }
    // A fixed critical point: b² + (a/3)(1 - 2a/3)² = 0.
    let k = 1.0 - 2.0 * a / 3.0;
    let crit_fixed = b2 + a / 3.0 * k * k;
    let crit_scale = 1f64.max(b2.norm()).max((a / 3.0 * k * k).norm());
    if crit_fixed.norm() <= FIBER_TOL * crit_scale {
        return 2;
    }
    3
}

/// Radius of a trap `|z| > R` in the basin of infinity:
/// `R = max(√(6|c|/|λ|), 6|c+1|, √(12|c|))`.
pub fn escape_radius(p: &CubicSlicePoint) -> f64 {
    let c = p.c.norm();
    (6.0 * c / p.lambda.norm())
        .sqrt()
        .max(6.0 * (p.c + 1.0).norm())
        .max((12.0 * c).sqrt())
}

/// Above this modulus of `c`, `P_{λ,c}` has a quadratic-like restriction whose
/// critical point is `1`, so `c` escapes. Valid for `|λ| ≤ 1`.
pub fn quadratic_like_bound(lambda_abs: f64) -> f64 {
    49.0 / (49.0 / 2.0 - 17.0) * (0.5 + 7.0 / (3.0 * lambda_abs))
}

/// `e^{2πi p/q}` from `cos`/`sin` of `2πp/q`.
pub fn root_of_unity(p: i64, q: u64) -> Complex64 {
    let angle = std::f64::consts::TAU * (p as f64) / (q as f64);
    Complex64::new(angle.cos(), angle.sin())
}
