//! Parabolic multipliers `λ = e^{2πi p/q}`.
//!
//! The `q`-th iterate is tangent to the identity,
//! `P^q(z) = z + C(c) z^{q+1} + O(z^{q+2})`, and `C` is a polynomial `Č` of
//! degree `q` in `u = 1/c`. Its roots `cᵢ = 1/uᵢ` carry the atomic measure
//! `μ_{p/q} = (2π/q) Σ δ_{cᵢ}`.

use std::f64::consts::TAU;

use num_complex::{Complex, Complex64};
use twofloat::TwoFloat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::family::root_of_unity;
use crate::rotation::coprime;
use crate::{Error, Result};

pub const DEFAULT_ROOT_SEED: u64 = 0x5eed;
const MAX_SWEEPS: usize = 500;
const RESIDUAL_TOL: f64 = 1e-12;
const ROUNDING: f64 = 8.0 * f64::EPSILON;
const CLUSTER_TOL: f64 = 1e-7;
const DD_SWEEPS: usize = 100;
const DD_STEP: f64 = 1e-30;

/// A polynomial in `u = 1/c`, coefficients from the constant term up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UPoly {
    pub coeffs: Vec<Complex64>,
    /// Low-order parts: `coeffs[k] + low[k]` is the double-double value.
    /// Empty when only `coeffs` is known.
    #[serde(default)]
    pub low: Vec<Complex64>,
    pub p: u64,
    pub q: u64,
}

impl UPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Complex64 {
        *self.coeffs.last().expect("empty polynomial")
    }

    pub fn eval(&self, u: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * u + a)
    }

    /// `max |č_k - č_{q-k}| / max |č_k|`.
    pub fn palindrome_defect(&self) -> f64 {
        let n = self.coeffs.len();
        let top = self.coeffs.iter().map(|a| a.norm()).fold(0.0, f64::max);
        let worst = (0..n)
            .map(|k| (self.coeffs[k] - self.coeffs[n - 1 - k]).norm())
            .fold(0.0, f64::max);
        worst / top
    }
}

/// Coefficient of `z^{q+1}` in the `q`-th iterate of `λz + a₂z² + a₃z³`.
///
/// Composition runs on power series truncated after `z^{q+1}`.
pub fn iterate_coefficient(lambda: Complex64, a2: Complex64, a3: Complex64, q: usize) -> Complex64 {
    let zero = Complex64::new(0.0, 0.0);
    let len = q + 2;
    let mut f = vec![zero; len];
    f[1] = Complex64::new(1.0, 0.0);
    let mut sq = vec![zero; len];
    for _ in 0..q {
        for n in 2..len {
            let mut s = zero;
            for i in 1..n {
                s += f[i] * f[n - i];
            }
            sq[n] = s;
        }
        let mut next = vec![zero; len];
        for n in 1..len {
            let mut cube = zero;
            for i in 1..n.saturating_sub(1) {
                cube += f[i] * sq[n - i];
            }
            next[n] = lambda * f[n] + a2 * sq[n] + a3 * cube;
        }
        f = next;
    }
    f[q + 1]
}

fn check_rational(p: u64, q: u64) -> Result<()> {
    if q == 0 || !coprime(p, q) {
        return Err(Error::InvalidInput(format!("{p}/{q} is not a fraction in lowest terms")));
    }
    Ok(())
}

fn lambda_power(p: u64, q: u64, n: usize) -> Complex64 {
    root_of_unity(((p as u128 * n as u128) % q as u128) as i64, q)
}

/// Resonant coefficient from the formal normal form `λz + βz^{q+1}`.
///
/// The tangent-to-identity conjugacy is solved up to `z^q`; the first term
/// that cannot be removed gives `β`, and `P^q` then has `q β / λ` at `z^{q+1}`.
fn normal_form_coefficient(p: u64, q: u64, a2: Complex64, a3: Complex64) -> Complex64 {
    let zero = Complex64::new(0.0, 0.0);
    let lambda = root_of_unity(p as i64, q);
    let top = q as usize + 1;
    let mut h = vec![zero; top + 1];
    let mut sq = vec![zero; top + 1];
    h[1] = Complex64::new(1.0, 0.0);
    for n in 2..=top {
        sq[n] = (1..n).map(|i| h[i] * h[n - i]).sum();
        let cube: Complex64 = (1..n - 1).map(|i| h[i] * sq[n - i]).sum();
        let s = a2 * sq[n] + a3 * cube;
        if n == top {
            return s * q as f64 / lambda;
        }
        h[n] = s / (lambda_power(p, q, n) - lambda);
    }
    unreachable!()
}

/// `C(c) = Č(1/c)` at `λ = e^{2πi p/q}`.
pub fn c_coefficient(p: u64, q: u64, c: Complex64) -> Result<Complex64> {
    check_rational(p, q)?;
    let lambda = root_of_unity(p as i64, q);
    let u = c.inv();
    Ok(normal_form_coefficient(p, q, -lambda * (1.0 + u) / 2.0, lambda * u / 3.0))
}

type Dd = Complex<TwoFloat>;

fn dd(z: Complex64) -> Dd {
    Complex::new(TwoFloat::from(z.re), TwoFloat::from(z.im))
}

fn dd_split(z: Dd) -> (Complex64, Complex64) {
    (Complex64::new(z.re.hi(), z.im.hi()), Complex64::new(z.re.lo(), z.im.lo()))
}

fn dd_norm(z: Dd) -> f64 {
    Complex64::new(z.re.hi(), z.im.hi()).norm()
}

/// `e^{2πi k/q}` to double-double accuracy, by Newton on `z^q = 1`.
fn dd_root_of_unity(k: u64, q: u64) -> Dd {
    let one = dd(Complex64::new(1.0, 0.0));
    let mut z = dd(root_of_unity((k % q) as i64, q));
    for _ in 0..2 {
        let w = z.powu(q as u32);
        z = z - (w - one) * z / (w * TwoFloat::from(q as f64));
    }
    z
}

fn poly_mul_add(acc: &mut [Dd], a: &[Dd], b: &[Dd], scale: f64) {
    let scale = TwoFloat::from(scale);
    for (i, &x) in a.iter().enumerate() {
        let x = x * scale;
        for (j, &y) in b.iter().enumerate() {
            acc[i + j] = acc[i + j] + x * y;
        }
    }
}

/// `Č(u)` for `λ = e^{2πi p/q}`.
///
/// Same recursion as [`c_coefficient`], carried out on polynomials in `u`
/// in double-double arithmetic: the `z^n` coefficient of the conjugacy has
/// degree `n - 1`.
pub fn cq_poly(p: u64, q: u64) -> Result<UPoly> {
    check_rational(p, q)?;
    let zero = dd(Complex64::new(0.0, 0.0));
    let lambda = dd_root_of_unity(p, q);
    let half = lambda * TwoFloat::from(0.5);
    let third = lambda / TwoFloat::from(3.0);
    let top = q as usize + 1;
    let mut h: Vec<Vec<Dd>> = vec![Vec::new(); top + 1];
    let mut sq: Vec<Vec<Dd>> = vec![Vec::new(); top + 1];
    h[1] = vec![dd(Complex64::new(1.0, 0.0))];
    for n in 2..=top {
        let mut s2 = vec![zero; n - 1];
        for i in 1..=(n - 1) / 2 {
            poly_mul_add(&mut s2, &h[i], &h[n - i], 2.0);
        }
        if n % 2 == 0 {
            poly_mul_add(&mut s2, &h[n / 2], &h[n / 2], 1.0);
        }
        let mut cube = vec![zero; n - 1];
        for i in 1..n - 1 {
            poly_mul_add(&mut cube, &h[i], &sq[n - i], 1.0);
        }
        // a₂ = -λ(1 + u)/2, a₃ = λu/3.
        let mut s = vec![zero; n];
        for (k, &x) in s2.iter().enumerate() {
            let t = x * half;
            s[k] = s[k] - t;
            s[k + 1] = s[k + 1] - t;
        }
        for (k, &x) in cube.iter().enumerate() {
            s[k + 1] = s[k + 1] + x * third;
        }
        sq[n] = s2;
        if n == top {
            let f = dd(Complex64::new(q as f64, 0.0)) / lambda;
            let (coeffs, low) = s.into_iter().map(|x| dd_split(x * f)).unzip();
            return Ok(UPoly { coeffs, low, p, q });
        }
        let d = dd_root_of_unity((p as u128 * n as u128 % q as u128) as u64, q) - lambda;
        h[n] = s.into_iter().map(|x| x / d).collect();
    }
    unreachable!()
}

/// `C(Q)` for `Q(z) = λz(1 - z/2)`: the leading coefficient of `Č`.
pub fn quadratic_c(p: u64, q: u64) -> Result<Complex64> {
    check_rational(p, q)?;
    let lambda = root_of_unity(p as i64, q);
    let c0 = normal_form_coefficient(p, q, -lambda / 2.0, Complex64::new(0.0, 0.0));
    if c0.norm() < f64::MIN_POSITIVE || !c0.is_finite() {
        return Err(Error::ZeroLeading { q });
    }
    Ok(c0)
}

/// Roots closer than `1e-7` to each other.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootCluster {
    pub center: Complex64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootReport {
    pub roots: Vec<Complex64>,
    /// Backward error `|Č(uᵢ)| / Σ |čₖ| |uᵢ|^k`.
    pub residuals: Vec<f64>,
    pub clusters: Vec<RootCluster>,
    pub sweeps: usize,
}

impl RootReport {
    pub fn all_simple(&self) -> bool {
        self.clusters.iter().all(|c| c.multiplicity == 1)
    }
}

fn horner(monic: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut d = Complex64::new(0.0, 0.0);
    for &a in monic.iter().rev() {
        d = d * z + v;
        v = v * z + a;
    }
    (v, d)
}

/// `Σ |aₖ| |z|^k`, the scale of rounding in [`horner`].
fn magnitude(monic: &[Complex64], z: Complex64) -> f64 {
    let r = z.norm();
    monic.iter().rev().fold(0.0, |acc, a| acc * r + a.norm())
}

/// Backward error `|p(z)| / Σ |aₖ| |z|^k`.
fn residual(monic: &[Complex64], z: Complex64) -> f64 {
    horner(monic, z).0.norm() / magnitude(monic, z)
}

fn aberth(monic: &[Complex64], start: &[Complex64]) -> (Vec<Complex64>, usize) {
    let mut z = start.to_vec();
    let n = z.len();
    let mut frozen = vec![false; n];
    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS && frozen.iter().any(|f| !f) {
        sweeps += 1;
        for i in 0..n {
            if frozen[i] {
                continue;
            }
            let (v, d) = horner(monic, z[i]);
            if v.norm() <= ROUNDING * magnitude(monic, z[i]) {
                frozen[i] = true;
                continue;
            }
            let ratio = v / d;
            let repulsion: Complex64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let step = ratio / (1.0 - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                if step.norm() <= f64::EPSILON * z[i].norm() {
                    frozen[i] = true;
                }
            }
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (v, d) = horner(monic, *zi);
            let next = *zi - v / d;
            if next.is_finite() && residual(monic, next) < residual(monic, *zi) {
                *zi = next;
            } else {
                break;
            }
        }
    }
    (z, sweeps)
}

fn dd_horner(monic: &[Dd], z: Dd) -> (Dd, Dd) {
    let zero = dd(Complex64::new(0.0, 0.0));
    let (mut v, mut d) = (zero, zero);
    for &a in monic.iter().rev() {
        d = d * z + v;
        v = v * z + a;
    }
    (v, d)
}

fn dd_residual(monic: &[Dd], z: Dd) -> f64 {
    let r = dd_norm(z);
    let scale = monic.iter().rev().fold(0.0, |acc, &a| acc * r + dd_norm(a));
    dd_norm(dd_horner(monic, z).0) / scale
}

/// Aberth sweeps in double-double from close approximations.
fn dd_refine(monic: &[Dd], start: &[Complex64]) -> Vec<Dd> {
    let one = dd(Complex64::new(1.0, 0.0));
    let mut z: Vec<Dd> = start.iter().map(|&u| dd(u)).collect();
    let n = z.len();
    let mut frozen = vec![false; n];
    for _ in 0..DD_SWEEPS {
        if frozen.iter().all(|&f| f) {
            break;
        }
        for i in 0..n {
            if frozen[i] {
                continue;
            }
            let (v, d) = dd_horner(monic, z[i]);
            let ratio = v / d;
            let repulsion = (0..n).filter(|&j| j != i).fold(dd(Complex64::new(0.0, 0.0)), |acc, j| acc + one / (z[i] - z[j]));
            let step = ratio / (one - ratio * repulsion);
            let size = dd_norm(step);
            if size.is_finite() {
                z[i] = z[i] - step;
            }
            if !(size > DD_STEP * dd_norm(z[i])) {
                frozen[i] = true;
            }
        }
    }
    z
}

fn clusters(roots: &[Complex64]) -> Vec<RootCluster> {
    let n = roots.len();
    let mut label: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if (roots[i] - roots[j]).norm() < CLUSTER_TOL {
                let (a, b) = (label[i], label[j]);
                for l in label.iter_mut() {
                    if *l == b {
                        *l = a;
                    }
                }
            }
        }
    }
    let mut out: Vec<RootCluster> = Vec::new();
    for id in 0..n {
        let members: Vec<Complex64> = (0..n).filter(|&k| label[k] == id).map(|k| roots[k]).collect();
        if !members.is_empty() {
            let center = members.iter().sum::<Complex64>() / members.len() as f64;
            out.push(RootCluster { center, multiplicity: members.len() });
        }
    }
    out
}

/// All roots of `poly` by Ehrlich-Aberth iteration, finished in
/// double-double arithmetic using [`UPoly::low`] when present.
///
/// Starts from the unit circle with seeded angular jitter, then from radii
/// `0.5` and `2` if a backward error stays above `1e-12`.
pub fn cq_roots(poly: &UPoly, seed: u64) -> Result<RootReport> {
    let deg = poly.degree();
    if deg == 0 {
        return Err(Error::InvalidInput("polynomial has degree 0".into()));
    }
    let lead = poly.leading();
    if lead.norm() == 0.0 {
        return Err(Error::InvalidInput("leading coefficient is zero".into()));
    }
    let monic: Vec<Complex64> = poly.coeffs.iter().map(|&a| a / lead).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Vec<Complex64>, Vec<f64>, usize)> = None;
    for radius in [1.0, 0.5, 2.0] {
        let start: Vec<Complex64> = (0..deg)
            .map(|k| {
                let jitter = rng.gen_range(0.0..0.5);
                Complex64::from_polar(radius, TAU * (k as f64 + jitter) / deg as f64)
            })
            .collect();
        let (roots, sweeps) = aberth(&monic, &start);
        let residuals: Vec<f64> = roots.iter().map(|&z| residual(&monic, z)).collect();
        let worst = residuals.iter().cloned().fold(0.0, f64::max);
        let done = worst < RESIDUAL_TOL;
        let better = best.as_ref().map_or(true, |b| worst < b.1.iter().cloned().fold(0.0, f64::max));
        if better {
            best = Some((roots, residuals, sweeps));
        }
        if done {
            break;
        }
    }
    let (start, _, sweeps) = best.expect("at least one attempt");
    let lead_dd = dd(lead) + poly.low.last().map_or(dd(Complex64::new(0.0, 0.0)), |&l| dd(l));
    let monic_dd: Vec<Dd> = (0..=deg)
        .map(|k| (dd(poly.coeffs[k]) + poly.low.get(k).map_or(dd(Complex64::new(0.0, 0.0)), |&l| dd(l))) / lead_dd)
        .collect();
    let refined = dd_refine(&monic_dd, &start);
    let residuals: Vec<f64> = refined.iter().map(|&z| dd_residual(&monic_dd, z)).collect();
    let roots: Vec<Complex64> = refined.iter().map(|&z| dd_split(z).0).collect();
    let worst = residuals.iter().cloned().fold(0.0, f64::max);
    if !(worst < RESIDUAL_TOL) {
        return Err(Error::NoConvergence { worst_residual: worst, residuals });
    }
    let clusters = clusters(&roots);
    Ok(RootReport { roots, residuals, clusters, sweeps })
}

/// Weighted point masses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiracMeasure {
    pub points: Vec<Complex64>,
    pub weights: Vec<f64>,
    pub total_mass: f64,
}

impl DiracMeasure {
    pub fn new(points: Vec<Complex64>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::InvalidInput(format!("{} points but {} weights", points.len(), weights.len())));
        }
        let total_mass = weights.iter().sum();
        Ok(Self { points, weights, total_mass })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `μ_{p/q} = (2π/q) Σ δ_{cᵢ}`, `cᵢ = 1/uᵢ` over the roots of `Č`.
pub fn parabolic_measure(p: u64, q: u64) -> Result<DiracMeasure> {
    parabolic_measure_seeded(p, q, DEFAULT_ROOT_SEED)
}

pub fn parabolic_measure_seeded(p: u64, q: u64, seed: u64) -> Result<DiracMeasure> {
    let poly = cq_poly(p, q)?;
    let report = cq_roots(&poly, seed)?;
    Ok(measure_from_roots(&report.roots))
}

pub fn measure_from_roots(roots_u: &[Complex64]) -> DiracMeasure {
    let q = roots_u.len();
    DiracMeasure {
        points: roots_u.iter().map(|u| u.inv()).collect(),
        weights: vec![TAU / q as f64; q],
        total_mass: TAU,
    }
}

/// Asymptotic size of the parabolic point `0` of `P_{λ,c}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParabolicData {
    /// `1 / |C|^{1/q}`, or `+∞` when `C = 0`.
    pub l: f64,
    /// Number of attracting petals.
    pub m: u64,
    pub c: Complex64,
}

pub fn asymptotic_size(p: u64, q: u64, c: Complex64) -> Result<ParabolicData> {
    if c == Complex64::new(0.0, 0.0) || !c.is_finite() {
        return Err(Error::InvalidInput(format!("c = {c} must be finite and nonzero")));
    }
    let coeff = c_coefficient(p, q, c)?;
    let scale = quadratic_c(p, q)?.norm() * c.inv().norm().max(1.0).powi(q as i32);
    if coeff.norm() <= RESIDUAL_TOL * scale {
        return Ok(ParabolicData { l: f64::INFINITY, m: 2 * q, c: coeff });
    }
    Ok(ParabolicData { l: coeff.norm().powf(-1.0 / q as f64), m: q, c: coeff })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Polynomials in `(z, u)` with full degree, indexed `[z][u]`.
    type Bi = Vec<Vec<Complex64>>;

    fn bi_mul(a: &Bi, b: &Bi) -> Bi {
        let (zl, ul) = (a.len() + b.len() - 1, a[0].len() + b[0].len() - 1);
        let mut out = vec![vec![c(0.0, 0.0); ul]; zl];
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                for (k, &x) in ai.iter().enumerate() {
                    for (l, &y) in bj.iter().enumerate() {
                        out[i + j][k + l] += x * y;
                    }
                }
            }
        }
        out
    }

    fn bi_add_scaled(acc: &mut Bi, a: &Bi, s: &Bi) {
        let term = bi_mul(a, s);
        if acc.len() < term.len() {
            acc.resize(term.len(), vec![]);
        }
        for (i, row) in term.iter().enumerate() {
            if acc[i].len() < row.len() {
                acc[i].resize(row.len(), c(0.0, 0.0));
            }
            for (k, &x) in row.iter().enumerate() {
                acc[i][k] += x;
            }
        }
    }

    /// Untruncated `P^q` in `(z, u)`; returns the `u`-coefficients of `z^{q+1}`.
    fn brute_force(lambda: Complex64, q: usize) -> Vec<Complex64> {
        // P(w) = λw - λ(1+u)/2 w² + λu/3 w³, coefficients as polynomials in u.
        let c1: Bi = vec![vec![lambda]];
        let c2: Bi = vec![vec![-lambda / 2.0, -lambda / 2.0]];
        let c3: Bi = vec![vec![c(0.0, 0.0), lambda / 3.0]];
        let mut f: Bi = vec![vec![c(0.0, 0.0)], vec![c(1.0, 0.0)]];
        for _ in 0..q {
            let f2 = bi_mul(&f, &f);
            let f3 = bi_mul(&f2, &f);
            let mut next: Bi = vec![vec![c(0.0, 0.0)]];
            bi_add_scaled(&mut next, &f, &c1);
            bi_add_scaled(&mut next, &f2, &c2);
            bi_add_scaled(&mut next, &f3, &c3);
            f = next;
        }
        let mut row = f[q + 1].clone();
        while row.len() > q + 1 {
            let top = row.pop().unwrap();
            assert!(top.norm() < 1e-12, "degree above q");
        }
        row
    }

    fn assert_poly(got: &UPoly, want: &[Complex64]) {
        assert_eq!(got.coeffs.len(), want.len());
        for (a, b) in got.coeffs.iter().zip(want) {
            assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn hand_derived_low_degree() {
        assert_poly(&cq_poly(0, 1).unwrap(), &[c(-0.5, 0.0), c(-0.5, 0.0)]);
        assert_poly(&cq_poly(1, 2).unwrap(), &[c(-0.5, 0.0), c(-1.0 / 3.0, 0.0), c(-0.5, 0.0)]);
    }

    #[test]
    fn brute_force_composition_agrees() {
        for (p, q) in [(0u64, 1u64), (1, 2), (1, 3), (2, 3), (1, 4)] {
            let want = brute_force(root_of_unity(p as i64, q), q as usize);
            let got = cq_poly(p, q).unwrap();
            for (a, b) in got.coeffs.iter().zip(&want) {
                assert!((a - b).norm() < 1e-12, "{p}/{q}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn leading_coefficient_is_quadratic() {
        assert!((quadratic_c(0, 1).unwrap() - c(-0.5, 0.0)).norm() < 1e-15);
        assert!((quadratic_c(1, 2).unwrap() - c(-0.5, 0.0)).norm() < 1e-15);
        for (p, q) in [(1, 5), (3, 8), (8, 13)] {
            let poly = cq_poly(p, q).unwrap();
            let c0 = quadratic_c(p, q).unwrap();
            assert!((poly.leading() - c0).norm() / c0.norm() < 1e-10);
        }
    }

    #[test]
    fn low_degree_roots() {
        let r1 = cq_roots(&cq_poly(0, 1).unwrap(), 1).unwrap();
        assert!((r1.roots[0] + 1.0).norm() < 1e-14);
        let mut r2 = cq_roots(&cq_poly(1, 2).unwrap(), 1).unwrap().roots;
        r2.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        let s = 2.0 * 2f64.sqrt() / 3.0;
        assert!((r2[0] - c(-1.0 / 3.0, -s)).norm() < 1e-12);
        assert!((r2[1] - c(-1.0 / 3.0, s)).norm() < 1e-12);
    }

    #[test]
    fn measure_of_zero_over_one() {
        let m = parabolic_measure(0, 1).unwrap();
        assert_eq!(m.len(), 1);
        assert!((m.points[0] + 1.0).norm() < 1e-14);
        assert_eq!(m.weights[0], TAU);
        assert_eq!(m.total_mass, TAU);
    }

    #[test]
    fn asymptotic_size_examples() {
        let d = asymptotic_size(0, 1, c(1.0, 0.0)).unwrap();
        assert!((d.c + 1.0).norm() < 1e-15);
        assert!((d.l - 1.0).abs() < 1e-15);
        assert_eq!(d.m, 1);
        let d = asymptotic_size(0, 1, c(-1.0, 0.0)).unwrap();
        assert_eq!(d.l, f64::INFINITY);
        assert_eq!(d.m, 2);
    }

    #[test]
    fn roots_close_under_inversion() {
        let poly = cq_poly(5, 13).unwrap();
        let roots = cq_roots(&poly, 7).unwrap().roots;
        for r in &roots {
            let inv = r.inv();
            let d = roots.iter().map(|s| (s - inv).norm()).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-8);
        }
    }

    #[test]
    fn clusters_pair_double_roots() {
        // (u - 1)² (u + 2)
        let poly = UPoly { coeffs: vec![c(2.0, 0.0), c(-3.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], low: Vec::new(), p: 0, q: 3 };
        let report = cq_roots(&poly, 3);
        if let Ok(rep) = report {
            assert!(!rep.all_simple());
            assert!(rep.clusters.iter().any(|cl| cl.multiplicity == 2 && (cl.center - 1.0).norm() < 1e-6));
        }
    }

    #[test]
    fn rejects_non_reduced_fractions() {
        assert!(cq_poly(2, 4).is_err());
        assert!(cq_poly(1, 0).is_err());
    }
}
