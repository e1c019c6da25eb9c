use std::f64::consts::TAU;

use cubic_slice::family::{root_of_unity, CubicSlicePoint};
use cubic_slice::parabolic::{
    asymptotic_size, c_coefficient, cq_poly, cq_roots, iterate_coefficient, parabolic_measure, DEFAULT_ROOT_SEED,
};
use cubic_slice::potential::{dirac_potential, SiegelSlice};
use cubic_slice::rotation::RotationNumber;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn convergents() -> Vec<(u64, u64)> {
    RotationNumber::golden(10).convergents(10).unwrap().iter().map(|k| (k.p, k.q)).collect()
}

fn random_point(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(10f64.powf(rng.gen_range(-0.5..0.5)), rng.gen_range(0.0..TAU))
}

#[test]
fn product_form_reconstructs_the_polynomial() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (p, q) in convergents().into_iter().filter(|&(_, q)| q <= 34) {
        let poly = cq_poly(p, q).unwrap();
        let roots = cq_roots(&poly, DEFAULT_ROOT_SEED).unwrap().roots;
        for _ in 0..20 {
            let u = random_point(&mut rng);
            let product = roots.iter().fold(poly.leading(), |acc, &r| acc * (u - r));
            let direct = poly.eval(u);
            assert!((product - direct).norm() <= 1e-8 * direct.norm(), "{p}/{q} at {u}");
        }
    }
}

#[test]
fn polynomial_matches_the_iterate_at_sample_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (p, q) in convergents().into_iter().filter(|&(_, q)| q <= 21) {
        let poly = cq_poly(p, q).unwrap();
        let lambda = root_of_unity(p as i64, q);
        for _ in 0..5 {
            let u = random_point(&mut rng);
            let direct = iterate_coefficient(lambda, -lambda * (1.0 + u) / 2.0, lambda * u / 3.0, q as usize);
            assert!((poly.eval(u) - direct).norm() <= 1e-9 * direct.norm().max(1.0), "{p}/{q}");
        }
    }
}

#[test]
fn atoms_have_unit_product() {
    for (p, q) in convergents() {
        let m = parabolic_measure(p, q).unwrap();
        let log_product: f64 = m.points.iter().map(|z| z.norm().ln()).sum();
        assert!(log_product.abs() < 1e-8, "{p}/{q}: {log_product}");
    }
}

#[test]
fn log_size_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (p, q) in convergents().into_iter().filter(|&(_, q)| q <= 55) {
        let m = parabolic_measure(p, q).unwrap();
        let at_infinity = asymptotic_size(p, q, c(1e300, 0.0)).unwrap().l;
        let log_lq = -cq_poly(p, q).unwrap().leading().norm().ln() / q as f64;
        assert!((at_infinity.ln() - log_lq).abs() < 1e-8);
        for _ in 0..10 {
            let z = random_point(&mut rng);
            let lhs = -asymptotic_size(p, q, z).unwrap().l.ln();
            let sum: f64 = m.points.iter().map(|a| (z - a).norm().ln()).sum();
            let rhs = -log_lq - z.norm().ln() + sum / q as f64;
            assert!((lhs - rhs).abs() < 1e-8, "{p}/{q} at {z}: {lhs} vs {rhs}");
            // The same identity through the potential of the measure.
            let pot = dirac_potential(&m, z);
            assert!((lhs - (-log_lq - z.norm().ln() + pot)).abs() < 1e-8);
        }
    }
}

#[test]
fn size_scales_as_a_length() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (p, q) in convergents().into_iter().filter(|&(_, q)| q <= 34) {
        for _ in 0..5 {
            let z = random_point(&mut rng);
            let a = asymptotic_size(p, q, z).unwrap().l;
            let b = asymptotic_size(p, q, z.inv()).unwrap().l;
            assert!((b - a / z.norm()).abs() <= 1e-8 * b, "{p}/{q} at {z}");
        }
    }
}

#[test]
fn orbit_decay_matches_the_size() {
    // P(z) = z - z² + z³/3 at λ = 1, c = 1.
    let point = CubicSlicePoint::new(c(1.0, 0.0), c(1.0, 0.0)).unwrap();
    let mut z = c(0.1, 0.0);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for n in 1..=100_000u32 {
        z = point.eval(z);
        if n >= 10_000 && n % 1000 == 0 {
            xs.push((n as f64).ln());
            ys.push(z.norm().ln());
        }
    }
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let fitted = (my - slope * mx).exp();
    let data = asymptotic_size(0, 1, c(1.0, 0.0)).unwrap();
    assert_eq!(data.m, 1);
    assert!((slope + 1.0 / data.m as f64).abs() < 0.05, "slope {slope}");
    assert!((fitted / data.l - 1.0).abs() < 0.05, "fitted {fitted}, formula {}", data.l);
}

#[test]
fn convergent_coefficients_are_bounded_by_the_siegel_radius() {
    let golden = RotationNumber::golden(64);
    let (log_r, _) = SiegelSlice::new(&golden, 16384).unwrap().log_r(c(3.0, 0.0)).unwrap();
    let bound = (-log_r).exp() + 0.05;
    for (p, q) in convergents().into_iter().rev().take(3) {
        let size = c_coefficient(p, q, c(3.0, 0.0)).unwrap().norm().powf(1.0 / q as f64);
        assert!(size <= bound, "{p}/{q}: {size} > {bound}");
    }
}
