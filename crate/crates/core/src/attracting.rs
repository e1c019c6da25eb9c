//! The attracting case `0 < |λ| < 1`.
//!
//! On the basin of `0` the linearizing coordinate is `φ = lim Pⁿ/λⁿ`. The
//! disk of convergence of `ψ` is mapped by `ψ` onto a domain `U` with a
//! critical point on its boundary, and `r = |φ(crit)|` for every critical
//! point on `∂U`. The series radius decides which critical point that is;
//! when it cannot, `ψ` is continued along `[0, φ(crit)]`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::family::{quadratic_like_bound, CubicSlicePoint};
use crate::series::{self, RadiusEstimate, DEFAULT_ORDER_ATTRACTING, DEFAULT_WINDOW};
use crate::{Error, Result};

pub const DEFAULT_MAX_ITER: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrbitTag {
    AttractedToZero,
    Escaped,
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitClass {
    pub tag: OrbitTag,
    pub iterations_used: usize,
}

/// `φ(z)` when the orbit of `z` reaches the linearization zone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiOutcome {
    pub class: OrbitClass,
    pub value: Option<Complex64>,
}

impl PhiOutcome {
    /// `|φ(z)|`, with `+∞` for orbits that are not attracted to `0`.
    pub fn modulus(&self) -> f64 {
        match self.value {
            Some(v) => v.norm(),
            None => f64::INFINITY,
        }
    }

    pub fn in_basin(&self) -> bool {
        self.class.tag == OrbitTag::AttractedToZero
    }
}

pub fn phi(p: &CubicSlicePoint, z: Complex64) -> PhiOutcome {
    phi_with(p, z, DEFAULT_MAX_ITER)
}

/// Iterates until the orbit is within `1e-4 · min(1, |c|)` of `0` and the
/// product `Π Pⁿ⁺¹(z) / (λ Pⁿ(z))` has settled to `1e-12`.
pub fn phi_with(p: &CubicSlicePoint, z: Complex64, max_iter: usize) -> PhiOutcome {
    let zero = Complex64::new(0.0, 0.0);
    let done = |tag, iterations_used, value| PhiOutcome { class: OrbitClass { tag, iterations_used }, value };
    if z == zero {
        return done(OrbitTag::AttractedToZero, 0, Some(zero));
    }
    let escape = p.escape_radius();
    let zone = 1e-4 * p.c.norm().min(1.0);
    let u = p.u();
    let half = (1.0 + u) / 2.0;
    let third = u / 3.0;

    let mut w = z;
    let mut acc = z;
    for n in 1..=max_iter {
        if w.norm() > escape {
            return done(OrbitTag::Escaped, n - 1, None);
        }
        let ratio = 1.0 - half * w + third * w * w;
        w = p.lambda * w * ratio;
        acc *= ratio;
        if w == zero {
            return done(OrbitTag::AttractedToZero, n, Some(zero));
        }
        if w.norm() <= zone && (ratio - 1.0).norm() < 1e-12 {
            return done(OrbitTag::AttractedToZero, n, Some(acc));
        }
    }
    done(OrbitTag::Undecided, max_iter, None)
}

/// `(φ(z), φ'(z))` by the same iteration as [`phi_with`].
fn phi_and_derivative(p: &CubicSlicePoint, z: Complex64, max_iter: usize) -> Option<(Complex64, Complex64)> {
    let escape = p.escape_radius();
    let zone = 1e-4 * p.c.norm().min(1.0);
    let u = p.u();
    let half = (1.0 + u) / 2.0;
    let third = u / 3.0;
    let (mut w, mut acc, mut slope) = (z, z, Complex64::new(1.0, 0.0));
    for _ in 0..max_iter {
        if w.norm() > escape || !w.is_finite() {
            return None;
        }
        let ratio = 1.0 - half * w + third * w * w;
        slope *= 1.0 - (1.0 + u) * w + u * w * w;
        w = p.lambda * w * ratio;
        acc *= ratio;
        if w.norm() <= zone && (ratio - 1.0).norm() < 1e-12 {
            return Some((acc, slope));
        }
    }
    None
}

/// Follows `ψ(t w)` from `t = 0` to `t = 1` by continuation and reports
/// whether the path ends at `x`.
///
/// For `|w| ≤ r` the path stays in `U`, so it ends at a critical point `x`
/// with `φ(x) = w` only if `x ∈ ∂U`.
fn continuation_reaches(p: &CubicSlicePoint, x: Complex64, w: Complex64, max_iter: usize) -> bool {
    let tol = 1e-13 * w.norm();
    let (mut t, mut dt) = (0.0f64, 0.05f64);
    let mut z = Complex64::new(0.0, 0.0);
    let mut slope = Complex64::new(1.0, 0.0);
    while t < 1.0 && dt > 1e-15 {
        let next = (t + dt).min(1.0);
        let guess = z + (next - t) * w / slope;
        let reach = (guess - z).norm();
        let mut y = guess;
        let mut accepted = None;
        for k in 0..16 {
            let Some((f, d)) = phi_and_derivative(p, y, max_iter) else { break };
            let r = f - next * w;
            if r.norm() <= tol {
                accepted = Some((y, d));
                break;
            }
            let delta = r / d;
            if !delta.is_finite() || (k == 0 && delta.norm() > 0.5 * reach + 1e-12 * y.norm()) {
                break;
            }
            y -= delta;
        }
        match accepted {
            Some((y, d)) => {
                (z, slope, t) = (y, d, next);
                dt *= 1.5;
            }
            None => dt *= 0.5,
        }
    }
    (z - x).norm() <= 1e-3 * x.norm().max(1e-300)
}

/// Decides the main critical point from `φ(1)` and `φ(c)` without the series.
///
/// The one with the smaller `|φ|` is tested by continuation; if it is not on
/// `∂U` the other one is.
fn main_by_continuation(p: &CubicSlicePoint, f1: Complex64, fc: Complex64, max_iter: usize) -> MainCritical {
    let one = Complex64::new(1.0, 0.0);
    let (m1, mc) = (f1.norm(), fc.norm());
    let reaches_one = || continuation_reaches(p, one, f1, max_iter);
    let reaches_c = || continuation_reaches(p, p.c, fc, max_iter);
    if (m1 - mc).abs() <= 1e-9 * m1.max(mc) {
        return match (reaches_one(), reaches_c()) {
            (true, false) => MainCritical::CritOne,
            (false, true) => MainCritical::CritC,
            _ => MainCritical::Both,
        };
    }
    if m1 < mc {
        if reaches_one() { MainCritical::CritOne } else { MainCritical::CritC }
    } else if reaches_c() {
        MainCritical::CritC
    } else {
        MainCritical::CritOne
    }
}

/// Which critical point lies on `∂U`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MainCritical {
    CritOne,
    CritC,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttractingRadius {
    /// Series estimate of `r`, or `|φ(main)|` when the other critical point
    /// left the basin and the series was skipped.
    pub r: f64,
    pub phi_at_1: Complex64,
    pub phi_at_c: Complex64,
    pub main: MainCritical,
    pub tolerance_used: f64,
    pub estimate: Option<RadiusEstimate>,
}

impl AttractingRadius {
    /// `r` read off `|φ|` at the main critical point.
    pub fn refined(&self) -> f64 {
        match self.main {
            MainCritical::CritOne => self.phi_at_1.norm(),
            MainCritical::CritC => self.phi_at_c.norm(),
            MainCritical::Both => (self.phi_at_1.norm() * self.phi_at_c.norm()).sqrt(),
        }
    }

    pub fn uncertainty(&self) -> f64 {
        self.estimate.map_or(0.0, |e| e.uncertainty)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusOptions {
    pub order: usize,
    pub window: f64,
    pub max_iter: usize,
    /// Skip the series when exactly one critical point leaves the basin: the
    /// other one is then necessarily on `∂U`.
    pub escape_shortcut: bool,
}

impl Default for RadiusOptions {
    fn default() -> Self {
        Self {
            order: DEFAULT_ORDER_ATTRACTING,
            window: DEFAULT_WINDOW,
            max_iter: DEFAULT_MAX_ITER,
            escape_shortcut: false,
        }
    }
}

fn check_attracting(lambda: Complex64) -> Result<()> {
    let m = lambda.norm();
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::InvalidInput(format!("|λ| = {m} is not in (0, 1)")));
    }
    Ok(())
}

fn as_complex(outcome: &PhiOutcome) -> Complex64 {
    outcome.value.unwrap_or(Complex64::new(f64::INFINITY, 0.0))
}

pub fn radius_attracting(p: &CubicSlicePoint) -> Result<AttractingRadius> {
    radius_attracting_with(p, &RadiusOptions::default())
}

pub fn radius_attracting_with(p: &CubicSlicePoint, opts: &RadiusOptions) -> Result<AttractingRadius> {
    check_attracting(p.lambda)?;
    let one = phi_with(p, Complex64::new(1.0, 0.0), opts.max_iter);
    let at_c = phi_with(p, p.c, opts.max_iter);

    if opts.escape_shortcut && one.in_basin() != at_c.in_basin() {
        let main = if one.in_basin() { MainCritical::CritOne } else { MainCritical::CritC };
        let r = if one.in_basin() { one.modulus() } else { at_c.modulus() };
        return Ok(AttractingRadius {
            r,
            phi_at_1: as_complex(&one),
            phi_at_c: as_complex(&at_c),
            main,
            tolerance_used: 0.0,
            estimate: None,
        });
    }

    let (_, a2, a3) = p.coefficients();
    let seq = series::linearize(a2, a3, p.lambda, opts.order)?;
    let est = series::hadamard_radius(&seq, opts.window)?;
    let r = est.r_hat;
    let tol = (1e-3f64).max(3.0 * est.uncertainty);
    let (m1, mc) = (one.modulus(), at_c.modulus());
    let d1 = ((m1 - r) / r).abs();
    let dc = ((mc - r) / r).abs();

    let main = match (d1 <= tol, dc <= tol) {
        (true, true) => match (one.value, at_c.value) {
            (Some(f1), Some(fc)) => main_by_continuation(p, f1, fc, opts.max_iter),
            _ => MainCritical::Both,
        },
        (true, false) => MainCritical::CritOne,
        (false, true) => MainCritical::CritC,
        (false, false) => {
            if d1.min(dc) > 10.0 * tol || !d1.min(dc).is_finite() {
                return Err(Error::NoMatch { radius: r, phi_one: m1, phi_c: mc, tolerance: tol });
            }
            if d1 <= dc {
                MainCritical::CritOne
            } else {
                MainCritical::CritC
            }
        }
    };
    Ok(AttractingRadius {
        r,
        phi_at_1: as_complex(&one),
        phi_at_c: as_complex(&at_c),
        main,
        tolerance_used: tol,
        estimate: Some(est),
    })
}

/// Series radius of `Q_λ(z) = λz(1 - z/2)`.
pub fn quadratic_radius(lambda: Complex64, order: usize) -> Result<RadiusEstimate> {
    let seq = series::linearize(-lambda / 2.0, Complex64::new(0.0, 0.0), lambda, order)?;
    series::hadamard_radius(&seq, DEFAULT_WINDOW)
}

/// Main critical point (`None` when neither is attracted) and
/// `log|φ(c)/φ(1)|`.
struct Side {
    main: Option<MainCritical>,
    g: Option<f64>,
}

fn side_of_curve(p: &CubicSlicePoint) -> Side {
    let one = phi(p, Complex64::new(1.0, 0.0));
    let at_c = phi(p, p.c);
    let main = match (one.value, at_c.value) {
        (Some(f1), Some(fc)) => Some(main_by_continuation(p, f1, fc, DEFAULT_MAX_ITER)),
        (Some(_), None) => Some(MainCritical::CritOne),
        (None, Some(_)) => Some(MainCritical::CritC),
        (None, None) => None,
    };
    let g = match (one.value, at_c.value) {
        (Some(a), Some(b)) if a.norm() > 0.0 && b.norm() > 0.0 => Some(b.norm().ln() - a.norm().ln()),
        _ => None,
    };
    Side { main, g }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZCurvePoint {
    pub ray_index: usize,
    pub c: Complex64,
    /// `Ψ(c) = φ(c) / φ(1)`.
    pub psi: Complex64,
    /// The classification along the ray was not monotone; the crossing is the
    /// outermost one found on a denser scan.
    pub ambiguous: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZCurveOptions {
    /// Log-spaced samples per ray before bisection.
    pub scan: usize,
    /// Bisection stops when `log(ρ_hi / ρ_lo)` is below this.
    pub log_tolerance: f64,
}

impl Default for ZCurveOptions {
    fn default() -> Self {
        Self { scan: 48, log_tolerance: 1e-12 }
    }
}

pub fn zcurve(lambda: Complex64, n_rays: usize) -> Result<Vec<ZCurvePoint>> {
    zcurve_with(lambda, n_rays, &ZCurveOptions::default())
}

/// Traces `Z_λ` ray by ray: `arg c = 2πk/n_rays`, bisecting `|c|` between a
/// parameter whose main critical point is `c` and one whose main critical
/// point is `1`. Output is ordered by ray.
pub fn zcurve_with(lambda: Complex64, n_rays: usize, opts: &ZCurveOptions) -> Result<Vec<ZCurvePoint>> {
    check_attracting(lambda)?;
    if n_rays < 16 {
        return Err(Error::InvalidInput(format!("{n_rays} rays; at least 16 are required")));
    }
    (0..n_rays)
        .into_par_iter()
        .map(|k| trace_ray(lambda, k, n_rays, opts))
        .collect()
}

fn trace_ray(lambda: Complex64, k: usize, n_rays: usize, opts: &ZCurveOptions) -> Result<ZCurvePoint> {
    let angle = std::f64::consts::TAU * k as f64 / n_rays as f64;
    let dir = Complex64::from_polar(1.0, angle);
    let at = |log_rho: f64| CubicSlicePoint { lambda, c: dir * log_rho.exp() };
    let side = |log_rho: f64| side_of_curve(&at(log_rho));

    let log_max = (1.01 * quadratic_like_bound(lambda.norm())).ln();
    let scan = |samples: usize| -> Vec<(f64, MainCritical)> {
        (0..samples)
            .filter_map(|i| {
                let t = -log_max + 2.0 * log_max * i as f64 / (samples - 1) as f64;
                match side(t).main {
                    Some(m @ (MainCritical::CritC | MainCritical::CritOne)) => Some((t, m)),
                    _ => None,
                }
            })
            .collect()
    };
    // Outward transitions from CritC to CritOne, skipping undecided samples.
    let transitions = |samples: &[(f64, MainCritical)]| {
        let changes = samples.windows(2).filter(|w| w[0].1 != w[1].1).count();
        let found: Vec<(f64, f64)> = samples
            .windows(2)
            .filter(|w| w[0].1 == MainCritical::CritC && w[1].1 == MainCritical::CritOne)
            .map(|w| (w[0].0, w[1].0))
            .collect();
        (found, changes)
    };

    let (found, changes) = transitions(&scan(opts.scan));
    let (bracket, mut ambiguous) = if changes == 1 && found.len() == 1 {
        (found[0], false)
    } else {
        let (found, _) = transitions(&scan(4 * opts.scan));
        match found.last() {
            Some(&b) => (b, true),
            None => return Err(Error::RayAmbiguous { ray: k }),
        }
    };

    // Where neither side is decided, fall back on the sign of log|φ(c)/φ(1)|.
    let (mut lo, mut hi) = bracket;
    let (mut g_lo, mut g_hi) = (side(lo).g, side(hi).g);
    while hi - lo > opts.log_tolerance {
        let mid = 0.5 * (lo + hi);
        let s = side(mid);
        let inner = match (s.main, s.g, g_lo, g_hi) {
            (Some(MainCritical::CritC), ..) => true,
            (Some(MainCritical::CritOne), ..) => false,
            (_, Some(g), Some(gl), _) => g.signum() == gl.signum(),
            (_, Some(g), None, Some(gh)) => g.signum() != gh.signum(),
            _ => return Err(Error::RayAmbiguous { ray: k }),
        };
        if inner {
            (lo, g_lo) = (mid, s.g);
        } else {
            (hi, g_hi) = (mid, s.g);
        }
    }
    if let (Some(gl), Some(gh)) = (g_lo, g_hi) {
        ambiguous |= gl.signum() == gh.signum();
    }
    let p = at(0.5 * (lo + hi));
    let one = phi(&p, Complex64::new(1.0, 0.0));
    let at_c = phi(&p, p.c);
    match (one.value, at_c.value) {
        (Some(f1), Some(fc)) if f1.norm() > 0.0 => Ok(ZCurvePoint { ray_index: k, c: p.c, psi: fc / f1, ambiguous }),
        _ => Err(Error::RayAmbiguous { ray: k }),
    }
}
