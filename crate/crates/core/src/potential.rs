//! Potentials `u = μ ∗ ℓ`, `ℓ(z) = log|z| / 2π`, so that `Δu = μ`.
//!
//! Grid fields carry their geometry and a validity mask; all reductions run
//! in a fixed index order so that results do not depend on the thread count.

use std::f64::consts::TAU;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::parabolic::{parabolic_measure, DiracMeasure};
use crate::rotation::RotationNumber;
use crate::series::{self, DEFAULT_WINDOW};
use crate::{Error, Result};

/// `Σ (wᵢ/2π) log|z - cᵢ|`; `-∞` at the atoms.
///
/// Terms are summed in sorted order, so the result does not depend on the
/// order of the atoms.
pub fn dirac_potential(m: &DiracMeasure, z: Complex64) -> f64 {
    let mut terms: Vec<f64> = m
        .points
        .iter()
        .zip(&m.weights)
        .map(|(&c, &w)| w / TAU * (z - c).norm().ln())
        .collect();
    terms.sort_by(f64::total_cmp);
    terms.iter().sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialValue {
    pub value: f64,
    pub uncertainty: f64,
}

/// The Siegel slice `λ = e^{2πiθ}` with `log r(Q_λ)` computed once.
#[derive(Debug, Clone)]
pub struct SiegelSlice {
    pub lambda: Complex64,
    pub order: usize,
    log_r_quadratic: f64,
    uncertainty_quadratic: f64,
}

impl SiegelSlice {
    pub fn new(theta: &RotationNumber, order: usize) -> Result<Self> {
        let lambda = Complex64::from_polar(1.0, TAU * theta.value());
        let seq = series::linearize(-lambda / 2.0, Complex64::new(0.0, 0.0), lambda, order)?;
        let est = series::hadamard_radius(&seq, DEFAULT_WINDOW)?;
        Ok(Self {
            lambda,
            order,
            log_r_quadratic: est.log_r(),
            uncertainty_quadratic: est.uncertainty,
        })
    }

    /// `log r(Q_λ)` and its estimator uncertainty.
    pub fn log_r_quadratic(&self) -> (f64, f64) {
        (self.log_r_quadratic, self.uncertainty_quadratic)
    }

    /// `log r(P_{λ,c})` and its estimator uncertainty.
    pub fn log_r(&self, c: Complex64) -> Result<(f64, f64)> {
        let u = c.inv();
        let seq = series::linearize(-self.lambda * (1.0 + u) / 2.0, self.lambda * u / 3.0, self.lambda, self.order)?;
        let est = series::hadamard_radius(&seq, DEFAULT_WINDOW)?;
        Ok((est.log_r(), est.uncertainty))
    }

    /// `u_θ(c) = -log r(P_{λ,c}) + log|c| + log r(Q_λ)`, and `u_θ(0) = 0`.
    pub fn potential(&self, c: Complex64) -> Result<PotentialValue> {
        if c == Complex64::new(0.0, 0.0) {
            return Ok(PotentialValue { value: 0.0, uncertainty: 0.0 });
        }
        let (log_r, unc) = self.log_r(c)?;
        Ok(PotentialValue {
            value: -log_r + c.norm().ln() + self.log_r_quadratic,
            uncertainty: unc + self.uncertainty_quadratic,
        })
    }
}

pub fn siegel_potential(theta: &RotationNumber, c: Complex64, order: usize) -> Result<PotentialValue> {
    SiegelSlice::new(theta, order)?.potential(c)
}

/// Sample positions of a rectangular grid. Row `0` is the top row:
/// sample `(row, col)` sits at `origin + step·col - i·step·row`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridGeometry {
    pub origin: Complex64,
    pub step: f64,
    pub width: usize,
    pub height: usize,
}

impl GridGeometry {
    /// `n × n` nodes spanning `[center ± half_width]²`, edges included.
    pub fn nodes(center: Complex64, half_width: f64, n: usize) -> Result<Self> {
        if n < 2 || !(half_width > 0.0) {
            return Err(Error::InvalidInput(format!("{n} nodes over half width {half_width}")));
        }
        Ok(Self {
            origin: center + Complex64::new(-half_width, half_width),
            step: 2.0 * half_width / (n - 1) as f64,
            width: n,
            height: n,
        })
    }

    /// Centres of the `n × n` pixels tiling `[center ± half_width]²`.
    pub fn pixel_centers(center: Complex64, half_width: f64, n: usize) -> Result<Self> {
        if n == 0 || !(half_width > 0.0) {
            return Err(Error::InvalidInput(format!("{n} pixels over half width {half_width}")));
        }
        let step = 2.0 * half_width / n as f64;
        Ok(Self {
            origin: center + Complex64::new(-half_width + step / 2.0, half_width - step / 2.0),
            step,
            width: n,
            height: n,
        })
    }

    #[inline]
    pub fn point(&self, row: usize, col: usize) -> Complex64 {
        self.origin + Complex64::new(self.step * col as f64, -self.step * row as f64)
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Real samples on a grid; `mask[k]` is `true` for valid samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridField {
    pub geometry: GridGeometry,
    pub values: Vec<f64>,
    pub mask: Vec<bool>,
}

impl GridField {
    pub fn new(geometry: GridGeometry, values: Vec<f64>) -> Result<Self> {
        if values.len() != geometry.len() {
            return Err(Error::InvalidInput(format!(
                "{} values for a {}×{} grid",
                values.len(),
                geometry.width,
                geometry.height
            )));
        }
        let mask = values.iter().map(|v| v.is_finite()).collect();
        Ok(Self { geometry, values, mask })
    }

    /// Samples `f` row by row in parallel; `None` and non-finite values are masked.
    pub fn from_fn<F>(geometry: GridGeometry, f: F) -> Self
    where
        F: Fn(Complex64) -> Option<f64> + Sync,
    {
        let values: Vec<f64> = (0..geometry.height)
            .into_par_iter()
            .flat_map_iter(|row| {
                let f = &f;
                (0..geometry.width).map(move |col| f(geometry.point(row, col)).unwrap_or(f64::NAN))
            })
            .collect();
        let mask = values.iter().map(|v| v.is_finite()).collect();
        Self { geometry, values, mask }
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        let k = row * self.geometry.width + col;
        self.mask[k].then(|| self.values[k])
    }

    pub fn mask_disk(&mut self, center: Complex64, radius: f64) {
        let g = self.geometry;
        for row in 0..g.height {
            for col in 0..g.width {
                if (g.point(row, col) - center).norm() <= radius {
                    self.mask[row * g.width + col] = false;
                }
            }
        }
    }

    pub fn masked_fraction_interior(&self) -> f64 {
        let g = self.geometry;
        if g.width < 3 || g.height < 3 {
            return 0.0;
        }
        let interior = (g.width - 2) * (g.height - 2);
        let masked = (1..g.height - 1)
            .flat_map(|r| (1..g.width - 1).map(move |c| (r, c)))
            .filter(|&(r, c)| !self.mask[r * g.width + c])
            .count();
        masked as f64 / interior as f64
    }

    /// 5-point stencil sum at an interior sample, if all five are valid.
    pub fn stencil(&self, row: usize, col: usize) -> Option<f64> {
        let centre = self.get(row, col)?;
        let sum = self.get(row - 1, col)? + self.get(row + 1, col)? + self.get(row, col - 1)? + self.get(row, col + 1)?;
        Some(sum - 4.0 * centre)
    }

    /// Bilinear interpolation at `z`, if the four surrounding samples are valid.
    pub fn interpolate(&self, z: Complex64) -> Option<f64> {
        let g = self.geometry;
        let x = (z.re - g.origin.re) / g.step;
        let y = (g.origin.im - z.im) / g.step;
        if !(x >= 0.0 && y >= 0.0) {
            return None;
        }
        let (c0, r0) = (x.floor() as usize, y.floor() as usize);
        let (c1, r1) = ((c0 + 1).min(g.width - 1), (r0 + 1).min(g.height - 1));
        if c0 >= g.width || r0 >= g.height {
            return None;
        }
        let (fx, fy) = (x - c0 as f64, y - r0 as f64);
        let top = self.get(r0, c0)? * (1.0 - fx) + self.get(r0, c1)? * fx;
        let bottom = self.get(r1, c0)? * (1.0 - fx) + self.get(r1, c1)? * fx;
        Some(top * (1.0 - fy) + bottom * fy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridMass {
    /// Sum of the 5-point stencil over the interior.
    pub laplacian: f64,
    /// `2π` times the slope of circle means against `log ρ`.
    pub asymptotic: f64,
}

/// Total mass of `Δf` on the grid window by two estimators.
///
/// The stencil sum telescopes to the flux through the outermost ring, which
/// is what is evaluated; masked interior samples therefore do not remove the
/// mass they hide. Circle means are centred at `0` and taken over the outer
/// 20% of the largest circle inside the window.
pub fn grid_mass(f: &GridField) -> Result<GridMass> {
    let g = f.geometry;
    if g.width < 3 || g.height < 3 {
        return Err(Error::InvalidInput("grid must be at least 3×3".into()));
    }
    let fraction = f.masked_fraction_interior();
    if fraction > 0.01 {
        return Err(Error::MaskTooLarge { fraction });
    }
    let (w, h) = (g.width, g.height);
    let mut laplacian = 0.0;
    let mut edge = |outer: Option<f64>, inner: Option<f64>| {
        if let (Some(o), Some(i)) = (outer, inner) {
            laplacian += o - i;
        }
    };
    for col in 1..w - 1 {
        edge(f.get(0, col), f.get(1, col));
        edge(f.get(h - 1, col), f.get(h - 2, col));
    }
    for row in 1..h - 1 {
        edge(f.get(row, 0), f.get(row, 1));
        edge(f.get(row, w - 1), f.get(row, w - 2));
    }

    let (left, top) = (g.origin.re, g.origin.im);
    let (right, bottom) = (g.point(0, w - 1).re, g.point(h - 1, 0).im);
    if !(left < 0.0 && right > 0.0 && bottom < 0.0 && top > 0.0) {
        return Err(Error::InvalidInput("the window does not contain 0".into()));
    }
    let rho_max = (-left).min(right).min(-bottom).min(top);
    const RADII: usize = 16;
    const ANGLES: usize = 1024;
    let mut points = Vec::with_capacity(RADII);
    for k in 0..RADII {
        let rho = rho_max * (0.8 + 0.19 * k as f64 / (RADII - 1) as f64);
        let (mut sum, mut count) = (0.0, 0usize);
        for j in 0..ANGLES {
            if let Some(v) = f.interpolate(Complex64::from_polar(rho, TAU * j as f64 / ANGLES as f64)) {
                sum += v;
                count += 1;
            }
        }
        if count > ANGLES / 2 {
            points.push((rho.ln(), sum / count as f64));
        }
    }
    if points.len() < 2 {
        return Err(Error::MaskTooLarge { fraction: 1.0 });
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(x, y) in &points {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    Ok(GridMass { laplacian, asymptotic: TAU * sxy / sxx })
}

/// Gaussian bumps `exp(-|z - z₀|² / 2w²)` on a square lattice of centres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestDictionary {
    pub centers: Vec<Complex64>,
    pub widths: Vec<f64>,
}

impl TestDictionary {
    pub fn lattice(half_width: f64, per_side: usize, widths: &[f64]) -> Self {
        let step = 2.0 * half_width / (per_side - 1) as f64;
        let centers = (0..per_side)
            .flat_map(|i| (0..per_side).map(move |j| Complex64::new(-half_width + step * j as f64, -half_width + step * i as f64)))
            .collect();
        Self { centers, widths: widths.to_vec() }
    }

    pub fn len(&self) -> usize {
        self.centers.len() * self.widths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn eval(&self, k: usize, z: Complex64) -> f64 {
        let center = self.centers[k % self.centers.len()];
        let width = self.widths[k / self.centers.len()];
        (-(z - center).norm_sqr() / (2.0 * width * width)).exp()
    }

    /// Largest Lipschitz constant over the dictionary.
    pub fn max_gradient(&self) -> f64 {
        let w = self.widths.iter().cloned().fold(f64::INFINITY, f64::min);
        1.0 / (w * std::f64::consts::E.sqrt())
    }
}

impl Default for TestDictionary {
    /// 13 × 13 centres on `[-3, 3]²`, widths `0.15` and `0.45`.
    fn default() -> Self {
        Self::lattice(3.0, 13, &[0.15, 0.45])
    }
}

#[derive(Debug, Clone, Copy)]
pub enum MeasureRef<'a> {
    Dirac(&'a DiracMeasure),
    /// The measure `Δf` read off the 5-point stencil: a point mass equal to
    /// the stencil sum at every interior sample with a complete stencil.
    GridLaplacian(&'a GridField),
}

fn pairings(m: MeasureRef<'_>, dict: &TestDictionary) -> Vec<f64> {
    match m {
        MeasureRef::Dirac(d) => (0..dict.len())
            .map(|k| d.points.iter().zip(&d.weights).map(|(&c, &w)| w * dict.eval(k, c)).sum())
            .collect(),
        MeasureRef::GridLaplacian(f) => {
            let g = f.geometry;
            let atoms: Vec<(Complex64, f64)> = (1..g.height - 1)
                .flat_map(|r| (1..g.width - 1).map(move |c| (r, c)))
                .filter_map(|(r, c)| f.stencil(r, c).map(|s| (g.point(r, c), s)))
                .collect();
            (0..dict.len())
                .map(|k| atoms.iter().map(|&(z, w)| w * dict.eval(k, z)).sum())
                .collect()
        }
    }
}

/// `max_φ |∫φ dμ_a - ∫φ dμ_b|` over the dictionary.
pub fn weak_star_gap(a: MeasureRef<'_>, b: MeasureRef<'_>, dict: &TestDictionary) -> f64 {
    pairings(a, dict)
        .iter()
        .zip(pairings(b, dict))
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub p: u64,
    pub q: u64,
    pub sup_gap: f64,
    pub weak_star_gap: f64,
    pub u_n_at_zero: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    /// Largest combined radius uncertainty of `u_θ` over the grid.
    pub theta_uncertainty: f64,
    /// Seconds spent on the `u_θ` field.
    pub theta_seconds: f64,
}

/// Compares `μ_{p_n/q_n}` with `μ_θ` along the first `depth` convergents.
///
/// `u_θ` is sampled on `grid` with series of order `order`; samples within
/// two grid steps of an atom of `μ_n` are left out of the sup.
pub fn convergence_table(
    theta: &RotationNumber,
    depth: usize,
    grid: &GridGeometry,
    order: usize,
    dict: &TestDictionary,
) -> Result<ConvergenceReport> {
    let convergents = theta.convergents(depth)?;
    if let Some(last) = convergents.last() {
        if last.q > 144 {
            return Err(Error::InvalidInput(format!("q = {} exceeds 144", last.q)));
        }
    }
    let start = Instant::now();
    let slice = SiegelSlice::new(theta, order)?;
    let samples: Vec<Result<PotentialValue>> = (0..grid.len())
        .into_par_iter()
        .map(|k| slice.potential(grid.point(k / grid.width, k % grid.width)))
        .collect();
    let mut values = Vec::with_capacity(samples.len());
    let mut theta_uncertainty: f64 = 0.0;
    for s in samples {
        let s = s?;
        values.push(s.value);
        theta_uncertainty = theta_uncertainty.max(s.uncertainty);
    }
    let u_theta = GridField::new(*grid, values)?;
    let theta_seconds = start.elapsed().as_secs_f64();

    let mut rows = Vec::with_capacity(convergents.len());
    for conv in convergents {
        let start = Instant::now();
        let mu = parabolic_measure(conv.p, conv.q)?;
        let mut u_n = GridField::from_fn(*grid, |c| Some(dirac_potential(&mu, c)));
        for &atom in &mu.points {
            u_n.mask_disk(atom, 2.0 * grid.step);
        }
        let sup_gap = (0..grid.len())
            .filter(|&k| u_n.mask[k] && u_theta.mask[k])
            .map(|k| u_n.values[k] - u_theta.values[k])
            .fold(f64::NEG_INFINITY, f64::max);
        let weak = weak_star_gap(MeasureRef::Dirac(&mu), MeasureRef::GridLaplacian(&u_theta), dict);
        rows.push(ConvergenceRow {
            p: conv.p,
            q: conv.q,
            sup_gap,
            weak_star_gap: weak,
            u_n_at_zero: dirac_potential(&mu, Complex64::new(0.0, 0.0)),
            seconds: start.elapsed().as_secs_f64(),
        });
    }
    Ok(ConvergenceReport { rows, theta_uncertainty, theta_seconds })
}
