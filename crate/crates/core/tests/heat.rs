use std::f64::consts::PI;

use proptest::prelude::*;
use sqg_core::heat::{
    c_s, heat_evolve, lambda_s_one, verify_cancellation_bounds, verify_gradient_bounds, verify_intpk,
    verify_kernel_gaussian_bounds, verify_theta_bounds, HeatKernel, HeatSweep, IntervalKernel,
};
use sqg_core::quadrature::GaussLegendre;
use sqg_core::{Domain, SineBasis, SpectralField, Spectrum};

fn square() -> Domain {
    Domain::square_pi(16).unwrap()
}

fn random_spectral(shape: (usize, usize), seed: u64) -> SpectralField {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    SpectralField::new(ndarray::Array2::from_shape_fn(shape, |_| rng.gen_range(-1.0..1.0)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn semigroup_property(seed in 0u64..1000, t in 0.0f64..2.0, s in 0.0f64..2.0) {
        let d = square();
        let sp = Spectrum::new(&d);
        let f = random_spectral(d.shape(), seed);
        let two = heat_evolve(&sp, &heat_evolve(&sp, &f, t).unwrap(), s).unwrap();
        let one = heat_evolve(&sp, &f, t + s).unwrap();
        let err = (two.coeffs() - one.coeffs()).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        prop_assert!(err <= 1e-12);
    }

    #[test]
    fn evolution_decays_at_the_ground_rate(seed in 0u64..1000, t in 0.0f64..3.0) {
        let d = square();
        let sp = Spectrum::new(&d);
        let f = random_spectral(d.shape(), seed);
        let e = heat_evolve(&sp, &f, t).unwrap();
        prop_assert!(e.l2_norm() <= (-sp.lambda_min() * t).exp() * f.l2_norm() * (1.0 + 1e-14));
        let b = SineBasis::new(d);
        for s in [0.5, 1.0, 2.0] {
            prop_assert!(b.dirichlet_norm(&e, s).unwrap() <= b.dirichlet_norm(&f, s).unwrap() * (1.0 + 1e-14));
        }
    }

    #[test]
    fn kernel_symmetric_and_separable(x1 in 0.01f64..3.1, x2 in 0.01f64..1.9, y1 in 0.01f64..3.1, y2 in 0.01f64..1.9, t in 0.01f64..1.0) {
        let d = Domain::new(PI, 2.0, 8, 8).unwrap();
        let h = HeatKernel::new(&d);
        let a = h.kernel_point([x1, x2], [y1, y2], t).unwrap();
        let b = h.kernel_point([y1, y2], [x1, x2], t).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        let p = h.axis(0).eigen(x1, y1, t).unwrap() * h.axis(1).eigen(x2, y2, t).unwrap();
        prop_assert!((a - p).abs() <= 1e-12 * (1.0 + a.abs()));
        // far apart at small t the series sits at round-off, the image sums do not
        prop_assert!(a > -1e-13);
        prop_assert!(h.axis(0).image(x1, y1, t) * h.axis(1).image(x2, y2, t) > 0.0);
    }

    #[test]
    fn theta_between_zero_and_one_and_decreasing(x in 0.001f64..3.1, y in 0.001f64..3.1, t in 1e-4f64..5.0) {
        let h = HeatKernel::new(&square());
        let a = h.theta([x, y], t);
        let b = h.theta([x, y], t * 1.1);
        prop_assert!((0.0..=1.0 + 1e-10).contains(&a));
        prop_assert!(b <= a + 1e-10);
    }
}

#[test]
fn eigenseries_and_image_sum_agree() {
    let k = IntervalKernel::new(PI, 4096);
    let mut worst: f64 = 0.0;
    for t in [1e-3, 1e-2, 0.1, 1.0] {
        for i in 1..40 {
            for j in 1..40 {
                let (x, y) = (PI * i as f64 / 40.0, PI * j as f64 / 40.0);
                worst = worst.max((k.eigen(x, y, t).unwrap() - k.image(x, y, t)).abs());
            }
        }
    }
    assert!(worst < 1e-10, "{worst}");
    assert!((k.eigen(1.0, 1.5, 0.1).unwrap() - k.image(1.0, 1.5, 0.1)).abs() < 1e-10);
}

#[test]
fn boundary_limit_vanishes() {
    let h = HeatKernel::new(&square());
    assert!(h.kernel_point([1.0, 1.0], [0.0, 2.0], 0.3).unwrap().abs() < 1e-15);
    assert!(h.kernel_point([1.0, 1.0], [PI, 2.0], 0.3).unwrap().abs() < 1e-14);
}

#[test]
fn theta_limits() {
    let h = HeatKernel::new(&square());
    let c = [PI / 2.0, PI / 2.0];
    assert!(h.theta(c, 20.0) < 1e-6);
    // leading-mode oracle: Theta ~ (4/pi)^2 e^{-2t} at the center
    let lead = (4.0 / PI).powi(2) * (-40.0f64).exp();
    assert!((h.theta(c, 20.0) - lead).abs() < 1e-6 * lead);
    assert!(h.theta(c, 1e-4) >= 0.999);
    // image-sum oracle per direction
    let k = IntervalKernel::new(PI, 4096);
    let per_axis = 1.0 - 2.0 * libm::erfc(PI / 2.0 / (2.0 * 1e-4f64.sqrt()));
    assert!((k.theta(PI / 2.0, 1e-4) - per_axis).abs() < 1e-14);
}

#[test]
fn kernel_mass_equals_theta() {
    let d = Domain::new(PI, 2.0, 8, 8).unwrap();
    let h = HeatKernel::new(&d);
    let rule = GaussLegendre::new(20);
    let breaks = |l: f64| (0..=64).map(|i| l * i as f64 / 64.0).collect::<Vec<_>>();
    for (x, t) in [([1.0, 0.5], 0.05), ([0.2, 1.7], 0.3), ([2.0, 1.0], 1.0)] {
        let bx = breaks(d.lx());
        let by = breaks(d.ly());
        let mass = rule.composite(&bx, |y1| {
            rule.composite(&by, |y2| h.kernel_image(x, [y1, y2], t))
        });
        assert!((mass - h.theta(x, t)).abs() < 1e-8, "{mass} {}", h.theta(x, t));
    }
}

#[test]
fn whole_plane_limit_far_from_boundary() {
    let h = HeatKernel::new(&square());
    let t: f64 = 1e-3;
    let x = [PI / 2.0, PI / 2.0];
    for r in [0.0, 0.05, 0.1] {
        let y = [x[0] + r, x[1] - r];
        let gauss = (-(2.0 * r * r) / (4.0 * t)).exp() / (4.0 * PI * t);
        let ratio = h.kernel_point(x, y, t).unwrap() / gauss;
        assert!((0.9..=1.1).contains(&ratio), "{ratio}");
    }
}

#[test]
fn gradient_vanishes_at_symmetric_diagonal_point() {
    let h = HeatKernel::new(&square());
    let x = [PI / 2.0, PI / 2.0];
    let g = h.kernel_grad_x(x, x, 0.05).unwrap();
    let v = h.kernel_point(x, x, 0.05).unwrap();
    assert!(g[0].abs() <= 1e-8 * v && g[1].abs() <= 1e-8 * v);
}

/// `c_s int t^{-1-s/2} (1 - Theta) dt` with `Theta` from the eigenseries of the
/// sine expansion of 1, on geometric Gauss-Legendre panels.
fn lambda_s_one_spectral(d: &Domain, x: [f64; 2], s: f64) -> f64 {
    let h = HeatKernel::new(d);
    let rule = GaussLegendre::new(16);
    let (lo, hi) = (1e-4f64, 200.0f64);
    let n = 160;
    let breaks: Vec<f64> = (0..=n).map(|i| lo * (hi / lo).powf(i as f64 / n as f64)).collect();
    let a = s / 2.0;
    let body = rule.composite(&breaks, |t| t.powf(-1.0 - a) * (1.0 - h.theta_eigen(x, t).unwrap()));
    c_s(s).unwrap() * (body + hi.powf(-a) / a)
}

#[test]
fn lambda_one_matches_spectral_oracle() {
    let d = square();
    let c = [PI / 2.0, PI / 2.0];
    let v = lambda_s_one(&d, c, 1.0).unwrap();
    let o = lambda_s_one_spectral(&d, c, 1.0);
    assert!(v > 0.0);
    assert!((v - o).abs() < 1e-6, "{v} {o}");
    let v2 = lambda_s_one(&d, [1.0, 1.3], 0.6).unwrap();
    let o2 = lambda_s_one_spectral(&d, [1.0, 1.3], 0.6);
    assert!((v2 - o2).abs() < 1e-6, "{v2} {o2}");
}

#[test]
fn lambda_one_grows_toward_the_boundary() {
    let d = square();
    let near = lambda_s_one(&d, [0.2, PI / 2.0], 1.0).unwrap();
    let far = lambda_s_one(&d, [1.0, PI / 2.0], 1.0).unwrap();
    assert!(near > far);
    assert!(lambda_s_one(&d, [0.0, 1.0], 1.0).is_err());
    assert!(lambda_s_one(&d, [1.0, 1.0], 2.0).is_err());
}

#[test]
fn theta_bound_fits() {
    let reports = verify_theta_bounds(&square(), &HeatSweep { t_min: 1e-4, ..HeatSweep::default() }).unwrap();
    for r in &reports {
        println!("{} constant={:.4e} stability={:.3} verdict={:?}", r.id, r.constant, r.stability, r.verdict);
        assert!(r.passed());
    }
}

#[test]
fn kernel_bound_fits() {
    let sweep = HeatSweep::default();
    let d = square();
    for r in verify_kernel_gaussian_bounds(&d, &sweep).unwrap() {
        println!("{} K={:?} constant={:.4e} coarse={:.4e} stability={:.3} verdict={:?} {:?}", r.id, r.parameter, r.constant, r.coarse_constant, r.stability, r.verdict, r.details);
    }
    for r in verify_gradient_bounds(&d, &sweep).unwrap() {
        println!("{} constant={:.4e} stability={:.3} verdict={:?}", r.id, r.constant, r.stability, r.verdict);
    }
    for r in verify_cancellation_bounds(&d, &sweep).unwrap() {
        println!("{} K~={:?} constant={:.4e} coarse={:.4e} stability={:.3} verdict={:?} {:?}", r.id, r.parameter, r.constant, r.coarse_constant, r.stability, r.verdict, r.details);
    }
}

#[test]
fn intpk_fits() {
    for r in verify_intpk(2.0, &[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (0.0, 1.0), (3.0, 0.0)]).unwrap() {
        println!("{} constant={:.4e} stability={:.3}", r.id, r.constant, r.stability);
        assert!(r.passed(), "{r:?}");
    }
}
