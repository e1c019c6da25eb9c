//! The linearizing parametrization `ψ(z) = z + b₂z² + …` of a cubic germ
//! `f(z) = λz + a₂z² + a₃z³`, solving `f ∘ ψ = ψ ∘ λ`, and estimators for
//! its radius of convergence `1/r = limsup |bₙ|^{1/n}`.
//!
//! Coefficients grow or decay like `r⁻ⁿ`, which leaves double precision long
//! before the orders needed for the radius estimate. [`CoeffSequence`] stores
//! `βₙ = bₙ sⁿ` for a single scale `s`; the recursion is homogeneous in that
//! rescaling, so it runs directly on the stored values.

use num_complex::Complex64;

use crate::{Error, Result};

const RESCALE_HIGH: f64 = 1e100;
const RESCALE_LOW: f64 = 1e-100;

/// Default truncation order for attracting multipliers.
pub const DEFAULT_ORDER_ATTRACTING: usize = 4096;
/// Default truncation order on the unit circle, where small divisors slow
/// down the convergence of the lim sup.
pub const DEFAULT_ORDER_NEUTRAL: usize = 16384;
pub const DEFAULT_WINDOW: f64 = 0.5;

/// Truncated coefficients `b₁..b_N` stored as `βₙ = bₙ sⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffSequence {
    scaled: Vec<Complex64>,
    scale: f64,
}

impl CoeffSequence {
    /// Builds a sequence from already scaled values `βₙ = bₙ sⁿ`, `n = 1..`.
    pub fn from_scaled(scale: f64, scaled: Vec<Complex64>) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidInput(format!("scale {scale} must be positive and finite")));
        }
        Ok(Self { scaled, scale })
    }

    /// Truncation order `N`.
    pub fn order(&self) -> usize {
        self.scaled.len()
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn scaled(&self) -> &[Complex64] {
        &self.scaled
    }

    /// `bₙ` for `1 ≤ n ≤ N`. May overflow to infinity or underflow to zero.
    pub fn coeff(&self, n: usize) -> Complex64 {
        self.scaled[n - 1] * self.scale.powi(-(n as i32))
    }

    /// `log |bₙ|`, computed without leaving the scaled representation.
    pub fn log_abs(&self, n: usize) -> f64 {
        self.scaled[n - 1].norm().ln() - n as f64 * self.scale.ln()
    }
}

/// Solves `f ∘ ψ = ψ ∘ λ` for `f(z) = λz + a₂z² + a₃z³` to order `N`:
///
/// ```text
/// bₙ = (a₂ Σ_{i+j=n} bᵢbⱼ + a₃ Σ_{i+j+k=n} bᵢbⱼbₖ) / (λⁿ - λ)
/// ```
///
/// The coefficients of `ψ²` are kept as they are produced, so the cubic
/// convolution is `Σ bᵢ [ψ²]_{n-i}` and the whole run costs `O(N²)`.
pub fn linearize(a2: Complex64, a3: Complex64, lambda: Complex64, order: usize) -> Result<CoeffSequence> {
    if order == 0 {
        return Err(Error::InvalidInput("order must be at least 1".into()));
    }
    let lambda_abs = lambda.norm();
    if lambda_abs == 0.0 || !lambda.is_finite() {
        return Err(Error::InvalidInput(format!("multiplier λ = {lambda} must be finite and nonzero")));
    }
    let (lambda_log_abs, lambda_arg) = (lambda_abs.ln(), lambda.arg());
    let mut divisors = Vec::with_capacity(order + 1);
    divisors.push(Complex64::new(0.0, 0.0));
    divisors.push(Complex64::new(0.0, 0.0));
    for n in 2..=order {
        let lambda_n = Complex64::from_polar((n as f64 * lambda_log_abs).exp(), n as f64 * lambda_arg);
        let d = lambda_n - lambda;
        if d.norm() <= 1e-12 * lambda_abs.max(lambda_n.norm()) {
            return Err(Error::SmallDivisorZero { n });
        }
        divisors.push(d);
    }

    // Index 0 unused in both arrays so that index = power of z.
    let mut beta = vec![Complex64::new(0.0, 0.0); order + 1];
    let mut square = vec![Complex64::new(0.0, 0.0); order + 1];
    let mut scale = 1.0;
    beta[1] = Complex64::new(scale, 0.0);

    for n in 2..=order {
        // [ψ²]_n from β₁..β_{n-1}, folded to half the products.
        let mut s2 = Complex64::new(0.0, 0.0);
        for i in 1..=(n - 1) / 2 {
            s2 += beta[i] * beta[n - i];
        }
        s2 *= 2.0;
        if n % 2 == 0 {
            s2 += beta[n / 2] * beta[n / 2];
        }
        square[n] = s2;

        let mut s3 = Complex64::new(0.0, 0.0);
        if a3 != Complex64::new(0.0, 0.0) {
            for i in 1..=n.saturating_sub(2) {
                s3 += beta[i] * square[n - i];
            }
        }
        let b = (a2 * s2 + a3 * s3) / divisors[n];
        beta[n] = b;

        let m = b.norm();
        if !m.is_finite() {
            return Err(Error::InvalidInput(format!("coefficient {n} is not finite")));
        }
        if m > RESCALE_HIGH || (m > 0.0 && m < RESCALE_LOW) {
            let factor = m.powf(-1.0 / n as f64);
            let mut f = 1.0;
            for k in 1..=n {
                f *= factor;
                beta[k] *= f;
                square[k] *= f;
            }
            scale *= factor;
        }
    }
    beta.remove(0);
    Ok(CoeffSequence { scaled: beta, scale })
}

/// Two estimators of the radius of convergence over the tail window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusEstimate {
    pub r_hat: f64,
    /// `1 / max |bₙ|^{1/n}` over the window.
    pub r_tail: f64,
    /// `exp(-slope)` of the least-squares line through `(n, log|bₙ|)`.
    pub r_fit: f64,
    /// `|log(r_tail / r_fit)|`.
    pub uncertainty: f64,
}

impl RadiusEstimate {
    pub fn log_r(&self) -> f64 {
        self.r_hat.ln()
    }
}

/// Cauchy-Hadamard estimate from the last `window · N` coefficients.
pub fn hadamard_radius(seq: &CoeffSequence, window: f64) -> Result<RadiusEstimate> {
    let order = seq.order();
    if order < 64 {
        return Err(Error::InvalidInput(format!("order {order} is below the minimum of 64")));
    }
    if !(window > 0.0 && window <= 1.0) {
        return Err(Error::InvalidInput(format!("window {window} must lie in (0, 1]")));
    }
    let start = (((1.0 - window) * order as f64).ceil() as usize).max(1);
    let points: Vec<(f64, f64)> = (start..=order)
        .filter(|&n| seq.scaled[n - 1] != Complex64::new(0.0, 0.0))
        .map(|n| (n as f64, seq.log_abs(n)))
        .collect();
    if points.is_empty() {
        return Err(Error::DegenerateSequence);
    }

    let max_rate = points.iter().map(|&(n, l)| l / n).fold(f64::NEG_INFINITY, f64::max);
    let r_tail = (-max_rate).exp();

    let slope = if points.len() == 1 {
        max_rate
    } else {
        let k = points.len() as f64;
        let mean_n = points.iter().map(|p| p.0).sum::<f64>() / k;
        let mean_l = points.iter().map(|p| p.1).sum::<f64>() / k;
        let (mut sxy, mut sxx) = (0.0, 0.0);
        for &(n, l) in &points {
            sxy += (n - mean_n) * (l - mean_l);
            sxx += (n - mean_n) * (n - mean_n);
        }
        sxy / sxx
    };
    let r_fit = (-slope).exp();
    let r_hat = (r_tail * r_fit).sqrt();
    Ok(RadiusEstimate {
        r_hat,
        r_tail,
        r_fit,
        uncertainty: (r_tail / r_fit).ln().abs(),
    })
}

/// A partial sum of `ψ` together with a truncation warning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiValue {
    pub value: Complex64,
    /// Set when the last term exceeds `1e-10 · |value|`.
    pub truncated: bool,
}

/// Evaluates `Σ bₙ zⁿ` inside the estimated disk of convergence.
pub fn eval_psi(seq: &CoeffSequence, radius: &RadiusEstimate, z: Complex64) -> Result<PsiValue> {
    if z.norm() >= radius.r_hat {
        return Err(Error::OutsideDisk { modulus: z.norm(), radius: radius.r_hat });
    }
    let w = z / seq.scale;
    let mut value = Complex64::new(0.0, 0.0);
    for b in seq.scaled.iter().rev() {
        value = (value + b) * w;
    }
    let n = seq.order();
    let last = (seq.log_abs(n) + n as f64 * z.norm().ln()).exp();
    let truncated = last > 1e-10 * value.norm();
    Ok(PsiValue { value, truncated })
}

/// First `n` at which `|bₙ| ≤ n / (0.9 r)ⁿ` fails, if any.
///
/// For an injective `ψ` on `B(0, r)` the Bieberbach bound holds, so a
/// violation points at a faulty radius estimate.
pub fn bieberbach_violation(seq: &CoeffSequence, r_hat: f64) -> Option<usize> {
    let log_low = (0.9 * r_hat).ln();
    (1..=seq.order()).find(|&n| {
        let bound = (n as f64).ln() - n as f64 * log_low;
        seq.scaled[n - 1] != Complex64::new(0.0, 0.0) && seq.log_abs(n) > bound + 1e-9
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Naive recursion with explicit triple sums, in unscaled arithmetic.
    fn naive(a2: Complex64, a3: Complex64, lambda: Complex64, order: usize) -> Vec<Complex64> {
        let mut b = vec![c(0.0, 0.0); order + 1];
        b[1] = c(1.0, 0.0);
        for n in 2..=order {
            let mut s2 = c(0.0, 0.0);
            for i in 1..n {
                s2 += b[i] * b[n - i];
            }
            let mut s3 = c(0.0, 0.0);
            for i in 1..n {
                for j in 1..n {
                    if i + j < n {
                        s3 += b[i] * b[j] * b[n - i - j];
                    }
                }
            }
            b[n] = (a2 * s2 + a3 * s3) / (lambda.powu(n as u32) - lambda);
        }
        b
    }

    #[test]
    fn matches_naive_recursion() {
        let lambda = c(0.0, 0.4);
        let (a2, a3) = (c(-0.3, 0.1), c(0.05, -0.2));
        let seq = linearize(a2, a3, lambda, 40).unwrap();
        let reference = naive(a2, a3, lambda, 40);
        for n in 1..=40 {
            let (x, y) = (seq.coeff(n), reference[n]);
            assert!((x - y).norm() <= 1e-10 * y.norm().max(1e-300), "n = {n}: {x} vs {y}");
        }
    }

    #[test]
    fn leading_coefficient_is_one() {
        let seq = linearize(c(1.0, 2.0), c(-3.0, 0.5), c(0.3, 0.3), 10).unwrap();
        assert_eq!(seq.coeff(1), c(1.0, 0.0));
    }

    #[test]
    fn quadratic_second_coefficient() {
        let lambda = c(0.1, 0.6);
        let seq = linearize(-lambda / 2.0, c(0.0, 0.0), lambda, 8).unwrap();
        let expect = -1.0 / (2.0 * (lambda - 1.0));
        assert!((seq.coeff(2) - expect).norm() < 1e-14);
    }

    #[test]
    fn linear_map_linearizes_itself() {
        let seq = linearize(c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0), 100).unwrap();
        assert!((2..=100).all(|n| seq.coeff(n) == c(0.0, 0.0)));
        assert_eq!(hadamard_radius(&seq, 0.5), Err(Error::DegenerateSequence));
    }

    #[test]
    fn roots_of_unity_rejected() {
        let lambda = crate::family::root_of_unity(1, 3);
        let err = linearize(c(1.0, 0.0), c(0.0, 0.0), lambda, 10).unwrap_err();
        assert_eq!(err, Error::SmallDivisorZero { n: 4 });
    }

    #[test]
    fn geometric_sequences() {
        for rho in [0.1, 1.0, 2.0, 10.0] {
            let seq = CoeffSequence::from_scaled(rho, vec![c(1.0, 0.0); 4096]).unwrap();
            let est = hadamard_radius(&seq, 0.5).unwrap();
            assert!((est.r_hat - rho).abs() < 1e-6 * rho.max(1.0), "{rho}: {est:?}");
        }
    }

    #[test]
    fn polynomial_factor() {
        // bₙ = n 3ⁿ stored at scale 1/3.
        let seq = CoeffSequence::from_scaled(1.0 / 3.0, (1..=4096).map(|n| c(n as f64, 0.0)).collect()).unwrap();
        let est = hadamard_radius(&seq, 0.5).unwrap();
        assert!((est.r_hat - 1.0 / 3.0).abs() < 1e-3, "{est:?}");
        assert!(est.r_tail <= est.r_fit || est.r_fit <= est.r_tail);
    }

    #[test]
    fn short_sequences_rejected() {
        let seq = CoeffSequence::from_scaled(1.0, vec![c(1.0, 0.0); 63]).unwrap();
        assert!(matches!(hadamard_radius(&seq, 0.5), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn rescaling_keeps_values_representable() {
        // Small |c| makes a₃ large and the radius tiny; the coefficients
        // would overflow without rescaling.
        let p = crate::family::CubicSlicePoint::new(c(0.0, 0.4), c(1e-3, 0.0)).unwrap();
        let (_, a2, a3) = p.coefficients();
        let seq = linearize(a2, a3, p.lambda, 2048).unwrap();
        assert!(seq.scaled().iter().all(|b| b.is_finite()));
        assert!(seq.log_abs(2048).is_finite());
        assert!(seq.log_abs(2048) > 2000.0);
    }

    #[test]
    fn psi_basics() {
        let p = crate::family::CubicSlicePoint::new(c(0.0, 0.4), c(2.0, 0.0)).unwrap();
        let (lambda, a2, a3) = p.coefficients();
        let seq = linearize(a2, a3, lambda, 4096).unwrap();
        let est = hadamard_radius(&seq, 0.5).unwrap();
        assert_eq!(eval_psi(&seq, &est, c(0.0, 0.0)).unwrap().value, c(0.0, 0.0));

        let h = 1e-7;
        let d = (eval_psi(&seq, &est, c(h, 0.0)).unwrap().value - eval_psi(&seq, &est, c(-h, 0.0)).unwrap().value)
            / (2.0 * h);
        assert!((d - 1.0).norm() < 1e-7);

        for k in 0..32 {
            let z = Complex64::from_polar(0.5 * est.r_hat, k as f64 * std::f64::consts::TAU / 32.0);
            let psi = eval_psi(&seq, &est, z).unwrap();
            let psi_lz = eval_psi(&seq, &est, lambda * z).unwrap();
            assert!(!psi.truncated);
            assert!((p.eval(psi.value) - psi_lz.value).norm() < 1e-8);
        }

        let outside = c(est.r_hat, 0.0);
        assert!(matches!(eval_psi(&seq, &est, outside), Err(Error::OutsideDisk { .. })));
    }

    #[test]
    fn bieberbach_holds_for_the_cubic_family() {
        for cc in [c(2.0, 0.0), c(-0.5, 1.5), c(0.3, 0.1)] {
            let p = crate::family::CubicSlicePoint::new(c(0.0, 0.4), cc).unwrap();
            let (lambda, a2, a3) = p.coefficients();
            let seq = linearize(a2, a3, lambda, 4096).unwrap();
            let est = hadamard_radius(&seq, 0.5).unwrap();
            assert_eq!(bieberbach_violation(&seq, est.r_hat), None);
            assert!(est.r_hat >= est.r_tail.min(est.r_fit) && est.r_hat <= est.r_tail.max(est.r_fit));
        }
    }

    #[test]
    fn deterministic() {
        let p = crate::family::CubicSlicePoint::new(c(0.0, 0.4), c(1.5, -0.7)).unwrap();
        let (lambda, a2, a3) = p.coefficients();
        let x = linearize(a2, a3, lambda, 1024).unwrap();
        let y = linearize(a2, a3, lambda, 1024).unwrap();
        assert_eq!(x, y);
    }
}
