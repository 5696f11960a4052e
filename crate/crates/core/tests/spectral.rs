use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqg_core::{Domain, SineBasis, SpectralField};

fn random_coeffs(shape: (usize, usize), seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = SpectralField::zeros(shape);
    a.coeffs_mut().mapv_inplace(|_| rng.gen_range(-1.0..1.0));
    a
}

fn max_diff(a: &ndarray::Array2<f64>, b: &ndarray::Array2<f64>) -> f64 {
    (a - b).iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    // synthesis against the eigenfunctions summed one by one
    #[test]
    fn synthesis_matches_direct_sum(lx in 0.5f64..4.0, ly in 0.5f64..4.0, nx in 4usize..12, ny in 4usize..12, seed in 0u64..1000) {
        let d = Domain::new(lx, ly, nx, ny).unwrap();
        let b = SineBasis::new(d);
        let a = random_coeffs(b.shape(), seed);
        let g = b.from_spectral(&a).unwrap();
        let sp = b.spectrum();
        for i in 0..nx {
            for k in 0..ny {
                let mut direct = 0.0;
                for ((j, m), c) in a.coeffs().indexed_iter() {
                    direct += c * sp.eigenfunction(j + 1, m + 1, d.point(i, k));
                }
                prop_assert!((g.get(i, k) - direct).abs() < 1e-12 * (nx * ny) as f64);
            }
        }
    }

    #[test]
    fn transform_is_an_isometry(lx in 0.5f64..4.0, ly in 0.5f64..4.0, nx in 4usize..40, ny in 4usize..40, seed in 0u64..1000) {
        let b = SineBasis::new(Domain::new(lx, ly, nx, ny).unwrap());
        let a = random_coeffs(b.shape(), seed);
        let g = b.from_spectral(&a).unwrap();
        prop_assert!((g.l2_norm(b.domain()) - a.l2_norm()).abs() <= 1e-12 * a.l2_norm());
        let back = b.to_spectral(&g).unwrap();
        prop_assert!(max_diff(back.coeffs(), a.coeffs()) < 1e-12);
    }

    #[test]
    fn fractional_powers_compose(s1 in 0.0f64..1.0, s2 in 0.0f64..1.0, seed in 0u64..1000) {
        let b = SineBasis::new(Domain::new(2.0, 1.5, 16, 12).unwrap());
        let a = random_coeffs(b.shape(), seed);
        let two = b.apply_lambda_s(&b.apply_lambda_s(&a, s1).unwrap(), s2).unwrap();
        let one = b.apply_lambda_s(&a, s1 + s2).unwrap();
        let scale = one.coeffs().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        prop_assert!(max_diff(two.coeffs(), one.coeffs()) <= 1e-13 * scale);
        // ||Lambda^s a||_2 is the Dirichlet norm of order s
        let norm = b.dirichlet_norm(&a, s1).unwrap();
        let direct = b.apply_lambda_s(&a, s1).unwrap().l2_norm();
        prop_assert!((norm - direct).abs() <= 1e-12 * direct);
    }
}

#[test]
fn lambda_exponent_range_is_enforced() {
    let b = SineBasis::new(Domain::square_pi(8).unwrap());
    let a = random_coeffs(b.shape(), 1);
    assert!(b.apply_lambda_s(&a, -0.1).is_err());
    assert!(b.apply_lambda_s(&a, 2.1).is_err());
    assert!(b.apply_lambda_s(&a, 2.0).is_ok());
}

#[test]
fn riesz_velocity_of_one_mode() {
    // u = grad-perp of psi = w_jk / sqrt(lambda_jk), written out by hand
    let (lx, ly) = (2.0, 3.0);
    let d = Domain::new(lx, ly, 31, 47).unwrap();
    let b = SineBasis::new(d);
    let norm = 2.0 / (lx * ly).sqrt();
    for (j, k) in [(1, 1), (2, 5), (7, 3)] {
        let (kx, ky) = (j as f64 * PI / lx, k as f64 * PI / ly);
        let root = (kx * kx + ky * ky).sqrt();
        let u = b.riesz_velocity(&SpectralField::mode(b.shape(), j, k)).unwrap();
        let u1 = d.sample(|x, y| -norm * ky * (kx * x).sin() * (ky * y).cos() / root);
        let u2 = d.sample(|x, y| norm * kx * (kx * x).cos() * (ky * y).sin() / root);
        assert!(max_diff(u.u1.values(), u1.values()) < 1e-12, "mode ({j}, {k})");
        assert!(max_diff(u.u2.values(), u2.values()) < 1e-12, "mode ({j}, {k})");
        let div = b.divergence(&u).unwrap();
        assert!(div.max_abs() < 1e-11, "mode ({j}, {k}): {}", div.max_abs());
    }
}

#[test]
fn gradient_of_one_mode() {
    let d = Domain::new(1.0, 2.5, 24, 40).unwrap();
    let b = SineBasis::new(d);
    let sp = b.spectrum().clone();
    let (j, k) = (3, 4);
    let (kx, ky) = (j as f64 * PI / d.lx(), k as f64 * PI / d.ly());
    let (gx, gy) = b.gradient(&SpectralField::mode(b.shape(), j, k)).unwrap();
    let n = sp.normalization();
    let ex = d.sample(|x, y| n * kx * (kx * x).cos() * (ky * y).sin());
    let ey = d.sample(|x, y| n * ky * (kx * x).sin() * (ky * y).cos());
    assert!(max_diff(gx.values(), ex.values()) < 1e-12);
    assert!(max_diff(gy.values(), ey.values()) < 1e-12);
}

#[test]
fn shape_mismatch_is_rejected() {
    let b = SineBasis::new(Domain::square_pi(8).unwrap());
    assert!(b.from_spectral(&SpectralField::zeros((8, 9))).is_err());
}
