//! Parameter-plane rasters, height fields and the raw sidecar format.
//!
//! Palette version 1:
//!
//! | class                                   | RGBA                 |
//! |-----------------------------------------|----------------------|
//! | both critical points attracted to `0`   | `255 255 255 255`    |
//! | `1` not attracted, `c` attracted        | `250 200 200 255`    |
//! | `c` not attracted, `1` attracted        | `200 215 250 255`    |
//! | neither attracted                       | `200 200 200 255`    |
//! | some orbit undecided                    | ` 40 170  70 255`    |
//! | locus of critical point `1`             | `170  20  20 255`    |
//! | locus of critical point `c`             | ` 20  40 170 255`    |
//! | both loci                               | `110  20 120 255`    |
//! | level line of `log|φ(c)/φ(1)| / log|λ|` | ` 70  70  70 255`    |
//! | masked height-field sample              | `255   0 255 255`    |
//!
//! A pixel is on the locus of a critical point when the class of that
//! critical point differs somewhere in its 3×3 neighbourhood.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attracting::{phi_with, radius_attracting_with, OrbitTag, RadiusOptions, DEFAULT_MAX_ITER};
use crate::family::{c_from_v, quadratic_like_bound, CubicSlicePoint};
use crate::potential::{GridField, GridGeometry};
use crate::{Error, Result};

pub const PALETTE_VERSION: u32 = 1;
pub const SIDECAR_MAGIC: &[u8; 4] = b"SLCF";
pub const SIDECAR_VERSION: u32 = 1;
const SIDECAR_HEADER: usize = 40;

pub type Rgba = [u8; 4];

pub const BOTH_ATTRACTED: Rgba = [255, 255, 255, 255];
pub const ONE_FREE: Rgba = [250, 200, 200, 255];
pub const C_FREE: Rgba = [200, 215, 250, 255];
pub const NONE_ATTRACTED: Rgba = [200, 200, 200, 255];
pub const UNDECIDED: Rgba = [40, 170, 70, 255];
pub const LOCUS_ONE: Rgba = [170, 20, 20, 255];
pub const LOCUS_C: Rgba = [20, 40, 170, 255];
pub const LOCUS_BOTH: Rgba = [110, 20, 120, 255];
pub const LEVEL_LINE: Rgba = [70, 70, 70, 255];
pub const MASKED: Rgba = [255, 0, 255, 255];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coordinate {
    C,
    V,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub center: Complex64,
    pub half_width: f64,
    pub resolution: usize,
    pub coordinate: Coordinate,
}

impl GridSpec {
    pub fn new(center: Complex64, half_width: f64, resolution: usize, coordinate: Coordinate) -> Result<Self> {
        let g = Self { center, half_width, resolution, coordinate };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolution < 16 {
            return Err(Error::InvalidInput(format!("resolution {} is below 16", self.resolution)));
        }
        if !(self.half_width > 0.0 && self.half_width.is_finite()) || !self.center.is_finite() {
            return Err(Error::InvalidInput(format!("window {} ± {}", self.center, self.half_width)));
        }
        Ok(())
    }

    /// Pixel centres; row `0` is the top of the image.
    pub fn geometry(&self) -> GridGeometry {
        GridGeometry::pixel_centers(self.center, self.half_width, self.resolution).expect("validated spec")
    }
}

/// A square window holding the support of `μ_λ`: the quadratic-like bound
/// with a 25% margin.
pub fn support_half_width(lambda_abs: f64) -> f64 {
    1.25 * quadratic_like_bound(lambda_abs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SliceMode {
    Classify,
    Equipotential,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenderOptions {
    pub max_iter: usize,
    /// Average 2×2 subpixels.
    pub supersample: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self { max_iter: DEFAULT_MAX_ITER, supersample: false }
    }
}

/// Orbit classes of the critical points `1` and `c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PixelClass {
    pub one: OrbitTag,
    pub c: OrbitTag,
}

impl PixelClass {
    pub fn swapped(self) -> Self {
        Self { one: self.c, c: self.one }
    }

    /// `3·one + c` with `AttractedToZero = 0`, `Escaped = 1`, `Undecided = 2`.
    pub fn code(self) -> u8 {
        let k = |t| match t {
            OrbitTag::AttractedToZero => 0,
            OrbitTag::Escaped => 1,
            OrbitTag::Undecided => 2,
        };
        3 * k(self.one) + k(self.c)
    }

    fn unordered(self) -> Self {
        if self.code() <= self.swapped().code() {
            self
        } else {
            self.swapped()
        }
    }

    fn fill(self) -> Rgba {
        use OrbitTag::*;
        match (self.one, self.c) {
            (Undecided, _) | (_, Undecided) => UNDECIDED,
            (AttractedToZero, AttractedToZero) => BOTH_ATTRACTED,
            (Escaped, AttractedToZero) => ONE_FREE,
            (AttractedToZero, Escaped) => C_FREE,
            (Escaped, Escaped) => NONE_ATTRACTED,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSample {
    pub class: PixelClass,
    /// `log|φ(c)/φ(1)| / log|λ|` when both critical points are attracted.
    pub level: Option<f64>,
}

/// Classifies both critical orbits of `P_{λ,c}`.
pub fn classify_point(lambda: Complex64, c: Complex64, max_iter: usize) -> PointSample {
    let Ok(p) = CubicSlicePoint::new(lambda, c) else {
        let class = PixelClass { one: OrbitTag::Undecided, c: OrbitTag::Undecided };
        return PointSample { class, level: None };
    };
    let one = phi_with(&p, Complex64::new(1.0, 0.0), max_iter);
    let at_c = phi_with(&p, c, max_iter);
    let class = PixelClass { one: one.class.tag, c: at_c.class.tag };
    let level = match (one.value, at_c.value) {
        (Some(a), Some(b)) if lambda.norm() < 1.0 => Some((b.norm().ln() - a.norm().ln()) / lambda.norm().ln()),
        _ => None,
    };
    PointSample { class, level }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegendEntry {
    pub label: String,
    pub rgba: Rgba,
}

pub fn legend() -> Vec<LegendEntry> {
    [
        ("both critical points attracted", BOTH_ATTRACTED),
        ("critical point 1 not attracted", ONE_FREE),
        ("critical point c not attracted", C_FREE),
        ("neither attracted", NONE_ATTRACTED),
        ("undecided", UNDECIDED),
        ("locus of critical point 1", LOCUS_ONE),
        ("locus of critical point c", LOCUS_C),
        ("both loci", LOCUS_BOTH),
        ("level line", LEVEL_LINE),
        ("masked", MASKED),
    ]
    .into_iter()
    .map(|(label, rgba)| LegendEntry { label: label.to_string(), rgba })
    .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SliceImage {
    pub spec: GridSpec,
    /// RGBA8, row-major, top row first.
    pub pixels: Vec<u8>,
    /// Classes at the pixel centres.
    pub classes: Vec<PixelClass>,
    pub legend: Vec<LegendEntry>,
    /// Class codes at the pixel centres.
    pub raw: Option<GridField>,
}

fn sample_grid(lambda: Complex64, geometry: GridGeometry, coordinate: Coordinate, max_iter: usize) -> Vec<PointSample> {
    (0..geometry.height)
        .into_par_iter()
        .flat_map_iter(|row| {
            (0..geometry.width).map(move |col| {
                let z = geometry.point(row, col);
                let c = match coordinate {
                    Coordinate::C => z,
                    Coordinate::V => c_from_v(z),
                };
                classify_point(lambda, c, max_iter)
            })
        })
        .collect()
}

/// Flags pixels whose 3×3 neighbourhood holds a different `key`.
fn boundary<K: PartialEq>(keys: &[K], n: usize) -> Vec<bool> {
    let mut out = vec![false; keys.len()];
    for row in 0..n {
        for col in 0..n {
            let k = &keys[row * n + col];
            'scan: for r in row.saturating_sub(1)..=(row + 1).min(n - 1) {
                for c in col.saturating_sub(1)..=(col + 1).min(n - 1) {
                    if keys[r * n + c] != *k {
                        out[row * n + col] = true;
                        break 'scan;
                    }
                }
            }
        }
    }
    out
}

fn near_integer(x: f64) -> bool {
    (x - x.round()).abs() <= 0.02
}

fn c_plane_colors(samples: &[PointSample], n: usize, mode: SliceMode) -> Vec<Rgba> {
    let ones: Vec<OrbitTag> = samples.iter().map(|s| s.class.one).collect();
    let cs: Vec<OrbitTag> = samples.iter().map(|s| s.class.c).collect();
    let (locus_one, locus_c) = (boundary(&ones, n), boundary(&cs, n));
    let loci = mode != SliceMode::Equipotential;
    let levels = mode != SliceMode::Classify;
    samples
        .iter()
        .enumerate()
        .map(|(k, s)| match (loci && locus_one[k], loci && locus_c[k]) {
            (true, true) => LOCUS_BOTH,
            (true, false) => LOCUS_ONE,
            (false, true) => LOCUS_C,
            (false, false) if levels && s.level.is_some_and(near_integer) => LEVEL_LINE,
            _ => s.class.fill(),
        })
        .collect()
}

fn v_plane_colors(samples: &[PointSample], n: usize) -> Vec<Rgba> {
    let keys: Vec<PixelClass> = samples.iter().map(|s| s.class.unordered()).collect();
    let locus = boundary(&keys, n);
    keys.iter()
        .zip(locus)
        .map(|(k, on)| match (on, k.fill()) {
            (true, _) => LOCUS_ONE,
            (false, UNDECIDED) => UNDECIDED,
            (false, BOTH_ATTRACTED) => BOTH_ATTRACTED,
            (false, NONE_ATTRACTED) => NONE_ATTRACTED,
            _ => ONE_FREE,
        })
        .collect()
}

fn downsample(colors: &[Rgba], n: usize) -> Vec<u8> {
    let fine = 2 * n;
    let mut out = Vec::with_capacity(4 * n * n);
    for row in 0..n {
        for col in 0..n {
            for ch in 0..4 {
                let sum: u32 = [(0, 0), (0, 1), (1, 0), (1, 1)]
                    .iter()
                    .map(|&(dr, dc)| colors[(2 * row + dr) * fine + 2 * col + dc][ch] as u32)
                    .sum();
                out.push(((sum + 2) / 4) as u8);
            }
        }
    }
    out
}

fn render(lambda: Complex64, g: &GridSpec, opts: &RenderOptions, paint: impl Fn(&[PointSample], usize) -> Vec<Rgba>) -> Result<SliceImage> {
    g.validate()?;
    let m = lambda.norm();
    if !(m > 0.0 && m <= 1.0) {
        return Err(Error::InvalidInput(format!("|λ| = {m} is not in (0, 1]")));
    }
    let n = g.resolution;
    let geometry = g.geometry();
    let samples = sample_grid(lambda, geometry, g.coordinate, opts.max_iter);
    let pixels = if opts.supersample {
        let fine = GridGeometry::pixel_centers(g.center, g.half_width, 2 * n)?;
        let fine_samples = sample_grid(lambda, fine, g.coordinate, opts.max_iter);
        downsample(&paint(&fine_samples, 2 * n), n)
    } else {
        paint(&samples, n).concat()
    };
    let classes: Vec<PixelClass> = samples.iter().map(|s| s.class).collect();
    let raw = GridField::new(geometry, classes.iter().map(|c| c.code() as f64).collect())?;
    Ok(SliceImage { spec: *g, pixels, classes, legend: legend(), raw: Some(raw) })
}

/// Classifies both critical orbits over a `c`-plane window.
pub fn render_slice(lambda: Complex64, g: &GridSpec, mode: SliceMode, opts: &RenderOptions) -> Result<SliceImage> {
    if g.coordinate != Coordinate::C {
        return Err(Error::InvalidInput("render_slice expects a c-plane grid".into()));
    }
    render(lambda, g, opts, |s, n| c_plane_colors(s, n, mode))
}

/// The same classification over a `v`-plane window, `c` taken on the branch
/// `|c| ≥ 1`. Critical points are unmarked, so a single hue is used.
pub fn vslice(lambda: Complex64, g: &GridSpec, opts: &RenderOptions) -> Result<SliceImage> {
    if g.coordinate != Coordinate::V {
        return Err(Error::InvalidInput("vslice expects a v-plane grid".into()));
    }
    render(lambda, g, opts, v_plane_colors)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeightField {
    pub spec: GridSpec,
    /// `log r(P_{λ,c}) - log|c|`; samples without a matched radius are masked.
    pub field: GridField,
    /// Grayscale RGBA8 over the unmasked range, masked samples in magenta.
    pub pixels: Vec<u8>,
}

/// Samples `log r(P_{λ,c}) - log|c|` over a `c`-plane window.
///
/// Where only one critical point is attracted, `r` is `|φ|` at that point;
/// elsewhere `r` is read off `|φ|` at the main critical point chosen by the
/// series estimate.
pub fn heightfield(lambda: Complex64, g: &GridSpec, order: usize) -> Result<HeightField> {
    g.validate()?;
    if g.coordinate != Coordinate::C {
        return Err(Error::InvalidInput("heightfield expects a c-plane grid".into()));
    }
    let m = lambda.norm();
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::InvalidInput(format!("|λ| = {m} is not in (0, 1)")));
    }
    let opts = RadiusOptions { order, escape_shortcut: true, ..RadiusOptions::default() };
    let field = GridField::from_fn(g.geometry(), |c| {
        let p = CubicSlicePoint::new(lambda, c).ok()?;
        let rad = radius_attracting_with(&p, &opts).ok()?;
        Some(rad.refined().ln() - c.norm().ln())
    });
    let (lo, hi) = field
        .values
        .iter()
        .zip(&field.mask)
        .filter(|(_, &ok)| ok)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (&v, _)| (lo.min(v), hi.max(v)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let pixels = field
        .values
        .iter()
        .zip(&field.mask)
        .flat_map(|(&v, &ok)| {
            if ok {
                let g = (255.0 * (v - lo) / span).round() as u8;
                [g, g, g, 255]
            } else {
                MASKED
            }
        })
        .collect();
    Ok(HeightField { spec: *g, field, pixels })
}

/// PNG bytes of an RGBA8 raster.
pub fn encode_png(width: usize, height: usize, rgba: &[u8]) -> Result<Vec<u8>> {
    if rgba.len() != 4 * width * height {
        return Err(Error::InvalidInput(format!("{} bytes for a {width}×{height} RGBA raster", rgba.len())));
    }
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, width as u32, height as u32);
        enc.set_color(png::ColorType::Rgba);
        enc.set_depth(png::BitDepth::Eight);
        let io = |e: png::EncodingError| Error::InvalidInput(format!("png encoding: {e}"));
        let mut writer = enc.write_header().map_err(io)?;
        writer.write_image_data(rgba).map_err(io)?;
    }
    Ok(out)
}

/// A raw float grid with its window, as stored in an `SLCF` sidecar.
#[derive(Debug, Clone, PartialEq)]
pub struct Sidecar {
    pub width: u32,
    pub height: u32,
    pub center: Complex64,
    pub half_width: f64,
    /// Row-major, top row first.
    pub values: Vec<f64>,
}

impl Sidecar {
    pub fn from_field(spec: &GridSpec, field: &GridField) -> Self {
        let values = field
            .values
            .iter()
            .zip(&field.mask)
            .map(|(&v, &ok)| if ok { v } else { f64::NAN })
            .collect();
        Self {
            width: field.geometry.width as u32,
            height: field.geometry.height as u32,
            center: spec.center,
            half_width: spec.half_width,
            values,
        }
    }

    /// Little-endian: `SLCF`, version, width, height, centre, half width, values.
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(SIDECAR_HEADER + 8 * self.values.len());
        out.extend_from_slice(SIDECAR_MAGIC);
        out.write_all(&SIDECAR_VERSION.to_le_bytes()).unwrap();
        out.write_all(&self.width.to_le_bytes()).unwrap();
        out.write_all(&self.height.to_le_bytes()).unwrap();
        for x in [self.center.re, self.center.im, self.half_width] {
            out.write_all(&x.to_le_bytes()).unwrap();
        }
        for v in &self.values {
            out.write_all(&v.to_le_bytes()).unwrap();
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let bad = |why: &str| Error::InvalidInput(format!("sidecar: {why}"));
        if bytes.len() < SIDECAR_HEADER {
            return Err(bad("truncated header"));
        }
        if &bytes[..4] != SIDECAR_MAGIC {
            return Err(bad("bad magic"));
        }
        let u32_at = |k: usize| u32::from_le_bytes(bytes[k..k + 4].try_into().unwrap());
        let f64_at = |k: usize| f64::from_le_bytes(bytes[k..k + 8].try_into().unwrap());
        let version = u32_at(4);
        if version != SIDECAR_VERSION {
            return Err(bad(&format!("unsupported version {version}")));
        }
        let (width, height) = (u32_at(8), u32_at(12));
        let count = (width as u64) * (height as u64);
        let body = (bytes.len() - SIDECAR_HEADER) as u64;
        if body % 8 != 0 || body / 8 != count {
            return Err(bad(&format!("{body} payload bytes for a {width}×{height} grid")));
        }
        let values = bytes[SIDECAR_HEADER..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(Self {
            width,
            height,
            center: Complex64::new(f64_at(16), f64_at(24)),
            half_width: f64_at(32),
            values,
        })
    }
}
