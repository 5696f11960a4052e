//! Acceptance run: one PASS/FAIL line per criterion, every tolerance pinned
//! below. The process exits 0 once all criteria have been evaluated; set
//! `SQG_ACCEPTANCE_STRICT=1` to turn any FAIL into a non-zero exit.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqg_core::dissipation::{
    compute_d_spectral, cordoba_gap, cordoba_report, finite_difference_lower_bound, gradient_lower_bound,
    HeatQuadratureOracle, LowerBoundSweep, Phi, DEALIAS_FACTOR,
};
use sqg_core::fields::random_smooth;
use sqg_core::galerkin::{run, Outcome, Stepper};
use sqg_core::halfspace::hs_lambda_one_raw;
use sqg_core::heat::IntervalKernel;
use sqg_core::interior::{
    commutator_grad_report, commutator_h_report, gradient_evolution_monitor, holder_evolution_monitor,
    monitor_report, odd_periodic_extension, torus_commutator_grad, torus_commutator_h, weighted_holder_seminorm,
};
use sqg_core::{Cutoff, Domain, GaussianBump, GridField, SineBasis, Solver, SolverConfig, SpectralField};

const EIGEN_TOL: f64 = 1e-12;
const KERNEL_TOL: f64 = 1e-10;
const LAMBDA_ONE_TOL: f64 = 1e-6;
const D_TOL: f64 = 1e-5;
const D_FLOOR: f64 = -1e-10;
const CORDOBA_FLOOR: f64 = -1e-10;
const BAND: (f64, f64) = (0.5, 2.0);
const TORUS_TOL: f64 = 1e-12;
const SUP_SLACK: f64 = 1e-8;
const CONTAMINATION_TOL: f64 = 1e-12;
const SELF_CONVERGENCE_TOL: f64 = 1e-6;
const RK_RATIO_FLOOR: f64 = 3.5;
const HOLDER_EPSILON: f64 = 0.1;
const BRUTE_TOL: f64 = 1e-14;

struct Check {
    passed: bool,
    summary: String,
}

fn verdict(passed: bool, summary: String) -> Check {
    Check { passed, summary }
}

fn within_band(values: &[f64]) -> (bool, f64) {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = max / min;
    (min > 0.0 && min.is_finite() && max.is_finite() && spread <= BAND.1 && 1.0 / spread >= BAND.0, spread)
}

fn eigen_identity() -> Check {
    let mut worst: f64 = 0.0;
    for (lx, ly) in [(PI, PI), (3.0, 2.0)] {
        let d = Domain::new(lx, ly, 32, 32).unwrap();
        let b = SineBasis::new(d);
        for j in 1..=32 {
            for k in 1..=32 {
                let w = d.sample(|x, y| 2.0 / (lx * ly).sqrt() * (j as f64 * PI * x / lx).sin() * (k as f64 * PI * y / ly).sin());
                let lambda = (j as f64 * PI / lx).powi(2) + (k as f64 * PI / ly).powi(2);
                let a = b.to_spectral(&w).unwrap();
                for s in [0.5, 1.0, 2.0] {
                    let lw = b.from_spectral(&b.apply_lambda_s(&a, s).unwrap()).unwrap();
                    let scale = lambda.powf(0.5 * s);
                    let err = lw.zip_map(&w, |p, q| p - scale * q).unwrap().max_abs() / scale;
                    worst = worst.max(err);
                }
            }
        }
    }
    verdict(worst <= EIGEN_TOL, format!("max relative error {worst:.2e} <= {EIGEN_TOL:.0e}"))
}

fn kernel_cross_oracle() -> Check {
    // Errors are relative to max(|K|, 1/sqrt(4 pi t)), the free Gaussian peak,
    // so that values far below the kernel's scale do not demand exact zeros.
    let mut worst: f64 = 0.0;
    for l in [PI, 2.0] {
        let k = IntervalKernel::new(l, 4096);
        for t in [1e-3, 1e-2, 0.1, 1.0] {
            let peak = 1.0 / (4.0 * PI * t).sqrt();
            for i in 1..60 {
                for j in 1..60 {
                    let (x, y) = (l * i as f64 / 60.0, l * j as f64 / 60.0);
                    let image = k.image(x, y, t);
                    let eigen = k.eigen(x, y, t).unwrap();
                    worst = worst.max((eigen - image).abs() / image.abs().max(peak));
                }
            }
        }
    }
    verdict(worst <= KERNEL_TOL, format!("max relative error {worst:.2e} <= {KERNEL_TOL:.0e}"))
}

fn half_space_identity() -> Check {
    let mut worst: f64 = 0.0;
    for x in [0.5, 1.0, 2.0] {
        let exact = 4.0 / (x * PI.sqrt());
        worst = worst.max((hs_lambda_one_raw(x).unwrap() - exact).abs() / exact);
    }
    verdict(worst <= LAMBDA_ONE_TOL, format!("max relative error {worst:.2e} <= {LAMBDA_ONE_TOL:.0e}"))
}

fn dissipation_consistency() -> Check {
    let b = SineBasis::new(Domain::square_pi(64).unwrap());
    let d = *b.domain();
    let bump = b.to_spectral(&GaussianBump::standard(&d, 1.0).sample(&d)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let (mut worst, mut min_d): (f64, f64) = (0.0, f64::INFINITY);
    for (name, a) in [("w11", SpectralField::mode(b.shape(), 1, 1)), ("bump", bump)] {
        let field = compute_d_spectral(&b, &a, 1.0, DEALIAS_FACTOR).unwrap();
        min_d = min_d.min(field.min());
        let oracle = HeatQuadratureOracle::new(&b, &a, 1.0).unwrap();
        // the bump's spot points sit where it is not negligible
        let range = if name == "bump" { 22..42 } else { 2..62 };
        for _ in 0..20 {
            let (i, k) = (rng.gen_range(range.clone()), rng.gen_range(range.clone()));
            let heat = oracle.evaluate(d.point(i, k)).unwrap();
            worst = worst.max((field.values().get(i, k) - heat).abs() / heat.abs());
        }
    }
    verdict(
        worst <= D_TOL && min_d >= D_FLOOR,
        format!("40 spot points, max relative error {worst:.2e} <= {D_TOL:.0e}; min D {min_d:.2e} >= {D_FLOOR:.0e}"),
    )
}

fn cordoba() -> Check {
    let (c, f) = (SineBasis::new(Domain::square_pi(64).unwrap()), SineBasis::new(Domain::square_pi(128).unwrap()));
    let (mut ok, mut min_bracket, mut worst_ratio, mut min_c) = (true, f64::INFINITY, 1.0_f64, f64::INFINITY);
    for seed in 0..10 {
        let a = random_smooth(c.shape(), 12, 3.0, 1000 + seed);
        for phi in [Phi::Square, Phi::Quartic] {
            let r = cordoba_report(&c, &f, &a, phi, 1.0, -CORDOBA_FLOOR).unwrap();
            let g = cordoba_gap(&c, &a, phi, 1.0, -CORDOBA_FLOOR).unwrap();
            let mb = r.details.iter().find(|d| d.0 == "min_bracket").map_or(f64::NEG_INFINITY, |d| d.1);
            min_bracket = min_bracket.min(mb);
            min_c = min_c.min(r.constant).min(r.coarse_constant);
            let ratio = r.stability.max(1.0 / r.stability);
            worst_ratio = worst_ratio.max(ratio);
            ok &= mb >= CORDOBA_FLOOR && r.constant > 0.0 && r.coarse_constant > 0.0 && g.c == r.coarse_constant;
            ok &= ratio <= BAND.1;
        }
    }
    verdict(
        ok,
        format!("20 fits, min bracket {min_bracket:.2e} >= {CORDOBA_FLOOR:.0e}; min c {min_c:.4} > 0; worst 64->128 drift {worst_ratio:.3} <= 2"),
    )
}

fn bump_corpus(d: &Domain) -> Vec<GaussianBump> {
    vec![
        GaussianBump::standard(d, 1.0),
        GaussianBump { center: [1.3, 1.8], sigma: [0.3, 0.25], amplitude: 1.0 },
    ]
}

fn nonlinear_lower_bounds() -> Check {
    let sweep = LowerBoundSweep::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for datum in 0..2 {
        let (mut g1, mut g2) = (Vec::new(), Vec::new());
        for n in [64, 128] {
            let b = SineBasis::new(Domain::square_pi(n).unwrap());
            let d = *b.domain();
            let q = b.to_spectral(&bump_corpus(&d)[datum].sample(&d)).unwrap();
            let holder = weighted_holder_seminorm(&d, &b.from_spectral(&q).unwrap(), 0.5).unwrap().norm;
            for ell in [0.25, 0.5] {
                for h in [2, 4, 8] {
                    g1.push(finite_difference_lower_bound(&b, &q, [h, 0], ell, 1.0, &sweep).unwrap().gamma());
                }
                for fit in gradient_lower_bound(&b, &q, 0.5, holder, ell, 1.0, &sweep).unwrap() {
                    g2.push(fit.gamma());
                }
            }
        }
        let (s1, r1) = within_band(&g1);
        let (s2, r2) = within_band(&g2);
        ok &= s1 && s2;
        parts.push(format!("bump {datum}: gamma1 spread {r1:.3} over {} fits, gamma2 spread {r2:.3} over {}", g1.len(), g2.len()));
    }
    verdict(ok, format!("{} (band factor 2)", parts.join("; ")))
}

fn commutators() -> Check {
    let d = Domain::square_pi(64).unwrap();
    let ext = odd_periodic_extension(&GaussianBump::standard(&d, 1.0).sample(&d));
    let period = [2.0 * PI, 2.0 * PI];
    let mut torus = torus_commutator_grad(&ext, period);
    for h in [[1, 0], [0, 2], [3, -1], [8, 4]] {
        torus = torus.max(torus_commutator_h(&ext, period, h));
    }

    let fine = Domain::square_pi(1023).unwrap();
    let b = SineBasis::new(fine);
    let theta = GaussianBump::standard(&fine, 1.0).sample(&fine);
    let chi = Cutoff::new(&fine, 0.5).unwrap();
    let g0 = commutator_h_report(&b, &theta, &chi, &[2, 4, 8]).unwrap();

    let wide = Domain::new(4.0, 4.0, 255, 255).unwrap();
    let bw = SineBasis::new(wide);
    let g3 = commutator_grad_report(&bw, &GaussianBump::standard(&wide, 1.0).sample(&wide), &[0.2, 0.4, 0.8]).unwrap();

    let ok = torus <= TORUS_TOL && g0.passed() && g3.passed() && g0.constant.is_finite() && g3.constant.is_finite();
    verdict(
        ok,
        format!(
            "torus {torus:.2e} <= {TORUS_TOL:.0e}; Gamma0 {:.3e} (h in 2,4,8 dx, drift {:.4}); Gamma3 {:.3e} (ell in 0.2,0.4,0.8, drift {:.4})",
            g0.constant, g0.stability, g3.constant, g3.stability
        ),
    )
}

fn conservation() -> Check {
    let d = Domain::square_pi(128).unwrap();
    let theta0 = GaussianBump::standard(&d, 1.0).sample(&d);
    let cfg = SolverConfig { n: 128, dt: 1e-3, t_end: 1.0, record_every: 50, keep_snapshots: false, ..Default::default() };
    let traj = run(d, &theta0, cfg).unwrap();
    let linf0 = traj.rows[0].linf;
    let decreasing = traj.rows.windows(2).all(|w| w[1].l2 < w[0].l2);
    let sup = traj.rows.iter().map(|r| r.linf).fold(0.0, f64::max);
    let ok = traj.outcome == Outcome::Completed
        && decreasing
        && sup <= linf0 * (1.0 + SUP_SLACK)
        && traj.max_contamination <= CONTAMINATION_TOL;
    verdict(
        ok,
        format!(
            "{} checkpoints, L2 strictly decreasing: {decreasing}; max sup / sup0 - 1 = {:.2e} <= {SUP_SLACK:.0e}; contamination {:.2e} <= {CONTAMINATION_TOL:.0e}",
            traj.rows.len(),
            sup / linf0 - 1.0,
            traj.max_contamination
        ),
    )
}

fn final_state(n: usize, dt: f64, t_end: f64, stepper: Stepper, theta0: impl Fn(&Domain) -> GridField) -> SpectralField {
    let d = Domain::square_pi(n).unwrap();
    let mut s = Solver::new(d, SolverConfig { n, dt, stepper, ..Default::default() }).unwrap();
    let mut state = s.initial_state(&theta0(&d)).unwrap();
    for _ in 0..(t_end / dt).round() as usize {
        s.step(&mut state).unwrap();
    }
    state.theta
}

fn self_convergence() -> Check {
    let bump = |d: &Domain| GaussianBump::standard(d, 1.0).sample(d);
    let coarse = final_state(128, 2e-3, 0.5, Stepper::IfRk3, bump);
    let fine = final_state(256, 2e-3, 0.5, Stepper::IfRk3, bump);
    // orthonormal modes: the L2 distance is the coefficient distance
    let gap = fine.add(&coarse.resized(fine.shape()).scaled(-1.0)).unwrap().l2_norm();

    let wide = |d: &Domain| GaussianBump { center: [1.4, 1.7], sigma: [0.45, 0.35], amplitude: 3.0 }.sample(d);
    let reference = final_state(32, 0.1 / 320.0, 0.1, Stepper::IfRk3, wide);
    let err = |dt: f64| final_state(32, dt, 0.1, Stepper::IfRk3, wide).add(&reference.scaled(-1.0)).unwrap().l2_norm();
    let ratio = err(0.01) / err(0.005);
    verdict(
        gap <= SELF_CONVERGENCE_TOL && ratio >= RK_RATIO_FLOOR,
        format!("||theta_128 - theta_256||_2 at t = 0.5: {gap:.2e} <= {SELF_CONVERGENCE_TOL:.0e}; IF-RK3 error ratio {ratio:.2} >= {RK_RATIO_FLOOR}"),
    )
}

fn monitors() -> Check {
    let d = Domain::square_pi(64).unwrap();
    let cfg = SolverConfig { n: 64, dt: 2e-3, t_end: 1.0, record_every: 25, ..Default::default() };
    let mut holder = Vec::new();
    let mut gradient = Vec::new();
    for amplitude in [1.0, 2.0] {
        let traj = run(d, &GaussianBump::standard(&d, amplitude).sample(&d), cfg.clone()).unwrap();
        let sup = traj.rows[0].linf;
        holder.push(holder_evolution_monitor(&traj, HOLDER_EPSILON / sup, 0.5).unwrap());
        gradient.push(gradient_evolution_monitor(&traj).unwrap());
    }
    let rh = monitor_report("monitor.holder", &holder[0], &holder[1]);
    let rg = monitor_report("monitor.gradient", &gradient[0], &gradient[1]);
    let bounded = holder.iter().chain(&gradient).all(|m| m.is_finite());
    verdict(
        bounded && rh.passed() && rg.passed(),
        format!(
            "bounded on [0, 1]: {bounded}; Gamma {:.3} / {:.3} (ratio {:.3}); Gamma1 {:.3} / {:.3} (ratio {:.3}); band [0.5, 2]",
            holder[0].gamma, holder[1].gamma, holder[1].gamma / holder[0].gamma,
            gradient[0].gamma, gradient[1].gamma, gradient[1].gamma / gradient[0].gamma
        ),
    )
}

fn brute_force() -> Check {
    // Independent oracle: every ordered pair (x, y) with |y - x| < d(x).
    let d = Domain::square_pi(16).unwrap();
    let mut worst: f64 = 0.0;
    let mut fields = vec![d.sample(|x, y| x.sin() * y.sin()), GaussianBump::standard(&d, 1.0).sample(&d)];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    fields.push(GridField::from_fn(d.shape(), |_, _| rng.gen_range(-1.0..1.0)));
    for f in &fields {
        for alpha in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let mut best = 0.0_f64;
            for i in 0..16 {
                for k in 0..16 {
                    let dist = d.grid_distance(i, k);
                    for a in 0..16 {
                        for c in 0..16 {
                            let hx = (a as f64 - i as f64) * d.dx();
                            let hy = (c as f64 - k as f64) * d.dy();
                            let r = (hx * hx + hy * hy).sqrt();
                            if r > 0.0 && r < dist {
                                best = best.max(dist.powf(alpha) * (f.get(a, c) - f.get(i, k)).abs() / r.powf(alpha));
                            }
                        }
                    }
                }
            }
            let fast = weighted_holder_seminorm(&d, f, alpha).unwrap().seminorm;
            worst = worst.max((fast - best).abs() / best);
        }
    }
    verdict(worst <= BRUTE_TOL, format!("3 fields x 5 alphas, max relative difference {worst:.2e} <= {BRUTE_TOL:.0e}"))
}

type Criterion = (&'static str, fn() -> Check);

fn main() {
    let criteria: [Criterion; 11] = [
        ("eigen-identity", eigen_identity),
        ("heat-kernel cross-oracle", kernel_cross_oracle),
        ("half-space Lambda 1", half_space_identity),
        ("D(f) consistency", dissipation_consistency),
        ("Cordoba inequality", cordoba),
        ("nonlinear lower bounds", nonlinear_lower_bounds),
        ("commutator controls", commutators),
        ("solver conservation", conservation),
        ("self-convergence", self_convergence),
        ("monitors", monitors),
        ("brute-force Holder", brute_force),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("{tag} {:>2} {name}: {} [{:.1} s]", i + 1, o.summary, start.elapsed().as_secs_f64());
        if !o.passed {
            failed.push(i + 1);
        }
    }
    println!("{} of {} criteria pass; failing: {failed:?}", criteria.len() - failed.len(), criteria.len());
    if !failed.is_empty() && std::env::var("SQG_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
