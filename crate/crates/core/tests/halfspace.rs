use std::f64::consts::PI;

use sqg_core::halfspace::*;
use sqg_core::quadrature::GaussLegendre;
use sqg_core::{Domain, GaussianBump, GridField, Parity, SineBasis};

fn pt(a: f64, b: f64) -> HalfSpacePoint {
    HalfSpacePoint::new(a, b).unwrap()
}

fn free(x: HalfSpacePoint, y: HalfSpacePoint, t: f64) -> f64 {
    let r2 = (x.tangential - y.tangential).powi(2) + (x.normal - y.normal).powi(2);
    (-r2 / (4.0 * t)).exp() / (4.0 * PI * t)
}

#[test]
fn kernel_vanishes_on_the_boundary_and_is_symmetric() {
    for t in [0.01, 0.3, 2.0] {
        assert_eq!(hs_kernel(pt(0.2, 0.7), pt(-0.4, 0.0), t).unwrap(), 0.0);
        let (x, y) = (pt(0.1, 0.4), pt(-0.3, 1.1));
        assert_eq!(hs_kernel(x, y, t).unwrap(), hs_kernel(y, x, t).unwrap());
    }
    assert!(hs_kernel(pt(0.0, 1.0), pt(0.0, 1.0), 0.0).is_err());
    assert!(HalfSpacePoint::new(0.0, -1.0).is_err());
}

#[test]
fn kernel_far_from_the_boundary_is_the_free_gaussian() {
    let t = 0.01;
    for (xd, yd) in [(2.0, 2.5), (3.0, 1.0), (5.0, 5.0)] {
        let (x, y) = (pt(0.0, xd), pt(0.05, yd));
        let ratio = hs_kernel(x, y, t).unwrap() / free(x, y, t);
        // H / free = 1 - e^{-x2 y2 / t}
        let oracle = 1.0 - (-xd * yd / t).exp();
        assert!((1.0 - 1e-6..=1.0 + 1e-13).contains(&ratio), "{xd} {yd} {ratio}");
        assert!((ratio - oracle).abs() < 1e-13);
    }
}

#[test]
fn theta_is_the_error_function() {
    assert_eq!(hs_theta(0.0, 1.0).unwrap(), 0.0);
    assert!((hs_theta(2.0, 1.0).unwrap() - hs_theta_quadrature(2.0, 1.0).unwrap()).abs() < 1e-10);
    for xd in [0.01, 0.3, 1.0, 3.0] {
        for t in [1e-3, 0.1, 1.0, 10.0] {
            let a = hs_theta(xd, t).unwrap();
            assert!((a - hs_theta_quadrature(xd, t).unwrap()).abs() < 1e-10, "{xd} {t}");
        }
    }
    // x2 / sqrt t >= 20
    assert!(hs_theta(1.0, 1.0 / 400.0).unwrap() >= 1.0 - 1e-12);
    assert!(hs_theta(2.0, 1e-4).unwrap() >= 1.0 - 1e-12);
}

#[test]
fn kernel_integrates_to_theta() {
    let gl = GaussLegendre::new(40);
    for (xd, t) in [(0.5, 0.1), (1.0, 1.0), (0.2, 0.01f64)] {
        let x = pt(0.0, xd);
        let s = t.sqrt();
        let b1: Vec<f64> = (0..=24).map(|i| -12.0 * s + s * i as f64).collect();
        let b2: Vec<f64> = (0..=24).map(|i| (xd + 12.0 * s) * i as f64 / 24.0).collect();
        let v = gl.composite(&b2, |y2| gl.composite(&b1, |y1| hs_kernel(x, pt(y1, y2), t).unwrap()));
        assert!((v - hs_theta(xd, t).unwrap()).abs() < 1e-8, "{xd} {t}: {v}");
    }
}

#[test]
fn lambda_one_identity() {
    let raw = hs_lambda_one_raw(1.0).unwrap();
    assert!((raw - 2.256758).abs() < 1e-6);
    assert!((raw / (4.0 / PI.sqrt()) - 1.0).abs() < 1e-6);
    assert!((hs_lambda_one_raw(2.0).unwrap() / (2.0 / PI.sqrt()) - 1.0).abs() < 1e-6);
    for xd in [0.5, 1.0, 2.0, 4.0] {
        let scaled = hs_lambda_one_raw(xd).unwrap() * xd;
        assert!((scaled / (4.0 / PI.sqrt()) - 1.0).abs() < 1e-6, "{xd}");
    }
    assert!((hs_c1().unwrap() * 2.0 * PI.sqrt() - 1.0).abs() < 1e-10);
    assert!((hs_lambda_one(1.0).unwrap() - 2.0 / PI).abs() < 1e-6);
    assert!(hs_lambda_one_raw(0.0).is_err());
    let r = hs_lambda_one_check(&[0.5, 1.0, 2.0]).unwrap();
    assert!(r.passed() && (r.constant - 4.0 / PI.sqrt()).abs() < 1e-6, "{r:?}");
    assert!(hs_lambda_one_check(&[]).is_err());
}

#[test]
fn cancellation_identity() {
    let r = hs_cancellation_check(&[(1.0, 0.25), (0.5, 0.1), (2.0, 1.0), (0.1, 100.0)]).unwrap();
    assert!(r.passed(), "{r:?}");
    assert!((r.constant - 1.0 / PI.sqrt()).abs() < 1e-8);
    // t >> x2^2: the envelope is ~1 and the integral scales like t^{-1/2}
    let (a, b) = (
        hs_cancellation_integral(pt(0.0, 0.01), 100.0).unwrap(),
        hs_cancellation_integral(pt(0.0, 0.01), 400.0).unwrap(),
    );
    assert!((a / b - 2.0).abs() < 1e-6);
    let g = hs_sum_gradient(pt(0.3, 0.8), pt(-1.1, 0.2), 0.4).unwrap();
    assert_eq!(g[0], 0.0);
}

#[test]
fn gradient_ratio_constant_is_finite_and_stable() {
    let r = hs_gradient_ratio_check().unwrap();
    assert!(r.passed(), "{r:?}");
}

fn bump(c: [f64; 2], s: f64) -> impl Fn(f64, f64) -> f64 {
    move |y1, y2| (-((y1 - c[0]).powi(2) + (y2 - c[1]).powi(2)) / (2.0 * s * s)).exp()
}

fn support(c: [f64; 2], s: f64) -> [[f64; 2]; 2] {
    [[c[0] - 8.0 * s, c[0] + 8.0 * s], [c[1] - 8.0 * s, c[1] + 8.0 * s]]
}

/// `u2` by polar quadrature around `x`, without any splitting: the angular
/// integral of `cos(phi) theta` vanishes like `r`, so the radial integrand
/// is bounded.
fn u2_polar(theta: &dyn Fn(f64, f64) -> f64, sup: [[f64; 2]; 2], x: [f64; 2]) -> f64 {
    let gl = GaussLegendre::new(48);
    let inside = |y1: f64, y2: f64| y1 >= sup[0][0] && y1 <= sup[0][1] && y2 >= sup[1][0] && y2 <= sup[1][1];
    let rmax = [sup[0][0], sup[0][1]]
        .iter()
        .flat_map(|a| [sup[1][0], sup[1][1]].map(|b| (a - x[0]).hypot(b - x[1])))
        .fold(0.0, f64::max);
    let rb: Vec<f64> = (0..=60).map(|i| rmax * i as f64 / 60.0).collect();
    let pb: Vec<f64> = (0..=32).map(|i| 2.0 * PI * i as f64 / 32.0).collect();
    let v = gl.composite(&rb, |r| {
        gl.composite(&pb, |phi| {
            let (y1, y2) = (x[0] + r * phi.cos(), x[1] + r * phi.sin());
            if !inside(y1, y2) {
                return 0.0;
            }
            let s = x[0] - y1;
            let m = (s * s + (x[1] + y2).powi(2)).powf(-1.5);
            // r * s * r^-3 = -cos(phi) / r
            (-phi.cos() / r - r * s * m) * theta(y1, y2)
        })
    });
    -VELOCITY_CONSTANT * v
}

#[test]
fn u2_of_zero_and_of_symmetric_data() {
    let zero = |_: f64, _: f64| 0.0;
    let f = CompactField {
        support: [[-1.0, 1.0], [0.5, 1.5]],
        theta: &zero,
    };
    let s = hs_velocity_u2(&f, pt(0.0, 1.0), 0.2, 1.0, 0.5).unwrap();
    assert_eq!((s.value, s.inner, s.outer), (0.0, 0.0, 0.0));
    // theta even about x1 = 0.4: the residual is even, the kernel odd
    let even = bump([0.4, 2.5], 0.25);
    let f = CompactField {
        support: support([0.4, 2.5], 0.25),
        theta: &even,
    };
    let s = hs_velocity_u2(&f, pt(0.4, 2.4), 0.3, 1.0, 0.5).unwrap();
    assert!(s.inner.abs() < 1e-12 && s.value.abs() < 1e-12, "{s:?}");
}

#[test]
fn u2_of_a_bump_against_polar_quadrature() {
    let (c, sg) = ([0.0, 2.0], 0.2);
    let theta = bump(c, sg);
    let f = CompactField {
        support: support(c, sg),
        theta: &theta,
    };
    for x in [[0.15, 1.9], [-0.2, 2.3], [0.9, 1.2]] {
        let s = hs_velocity_u2(&f, pt(x[0], x[1]), 0.25, 2.0, 0.5).unwrap();
        let direct = u2_polar(&theta, f.support, x);
        assert!((s.value - direct).abs() < 1e-6 * direct.abs().max(1e-3), "{x:?}: {} vs {direct}", s.value);
        assert!(s.inner.abs() <= s.inner_bound && s.outer.abs() <= s.outer_bound, "{s:?}");
        assert!((s.inner + s.outer - s.value).abs() < 1e-15);
    }
}

#[test]
fn u2_rejects_bad_input() {
    let theta = bump([0.0, 0.5], 0.1);
    let touching = CompactField {
        support: [[-1.0, 1.0], [0.0, 1.0]],
        theta: &theta,
    };
    assert!(hs_velocity_u2(&touching, pt(0.0, 0.5), 0.1, 1.0, 0.5).is_err());
    assert!(hs_boundary_slip(&touching, 0.0).is_err());
    let ok = CompactField {
        support: [[-1.0, 1.0], [0.1, 1.0]],
        theta: &theta,
    };
    assert!(hs_velocity_u2(&ok, pt(0.0, 0.5), 2.0, 1.0, 0.5).is_err());
}

#[test]
fn boundary_slip() {
    let zero = |_: f64, _: f64| 0.0;
    let f = CompactField {
        support: [[-1.0, 1.0], [0.5, 1.5]],
        theta: &zero,
    };
    assert_eq!(hs_boundary_slip(&f, 0.0).unwrap(), 0.0);
    let slip = |h: f64| {
        let theta = bump([0.0, h], 0.2);
        let f = CompactField {
            support: support([0.0, h], 0.2),
            theta: &theta,
        };
        hs_boundary_slip(&f, 0.0).unwrap()
    };
    assert!(slip(2.0).abs() > 1e-10);
    // directly above: u1 ~ -c 2 mass / R^2
    let (a, b) = (slip(5.0), slip(10.0));
    let mass = 2.0 * PI * 0.04;
    assert!((a / b - 4.0).abs() < 0.02, "{a} {b}");
    assert!((b * 100.0 / (-VELOCITY_CONSTANT * 2.0 * mass) - 1.0).abs() < 0.01);
}

#[test]
fn velocity_signs_match_the_rectangle_solver() {
    // a bump near the bottom wall of a large square, far from the other walls
    let l = 12.0;
    let d = Domain::new(l, l, 383, 383).unwrap();
    let b = SineBasis::new(d);
    let g = GaussianBump {
        center: [6.0, 1.5],
        sigma: [0.15, 0.15],
        amplitude: 1.0,
    };
    let a = b.to_spectral(&g.sample(&d)).unwrap();
    let u = b.riesz_velocity(&a).unwrap();
    let (i, k) = (201, 47);
    let x = d.point(i, k);
    let theta = bump(g.center, 0.15);
    let f = CompactField {
        support: support(g.center, 0.15),
        theta: &theta,
    };
    let hs = hs_velocity_u2(&f, pt(x[0], x[1]), 0.1, 1.0, 0.5).unwrap().value;
    assert!((u.u2.get(i, k) / hs - 1.0).abs() < 0.02, "{} vs {hs}", u.u2.get(i, k));
    // u1 on the wall from the cosine-in-y series of -d_y psi
    let psi = b.apply_lambda_inverse(&a).unwrap();
    let mut c = psi.coeffs().clone();
    for ((_, kk), v) in c.indexed_iter_mut() {
        *v *= -((kk + 1) as f64) * PI / l;
    }
    let wall = b.evaluate_series_at(&c, Parity::Sine, Parity::Cosine, [6.4, 0.0]);
    let slip = hs_boundary_slip(&f, 6.4).unwrap();
    assert!((wall / slip - 1.0).abs() < 0.02, "{wall} vs {slip}");
}

#[test]
fn odd_reflection_round_trip() {
    let f = GridField::from_fn((5, 4), |i, k| (i * 7 + k) as f64 * 0.1 + 0.05);
    let e = odd_reflection(&f);
    assert_eq!(e.shape(), (5, 9));
    for i in 0..5 {
        assert_eq!(e.get(i, 4), 0.0);
        for k in 1..=4 {
            assert_eq!(e.get(i, 4 + k), -e.get(i, 4 - k));
        }
    }
    assert_eq!(upper_half(&e).unwrap(), f);
    let p = pt(0.3, 0.2);
    assert_eq!(p.reflected(), [0.3, -0.2]);
}
