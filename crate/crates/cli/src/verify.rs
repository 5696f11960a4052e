use std::f64::consts::PI;

use clap::ValueEnum;
use sqg_core::cutoff::verify_cutoff_bounds;
use sqg_core::dissipation::{
    cordoba_report, finite_difference_lower_bound_report, gradient_lower_bound_report, LowerBoundSweep, Phi,
};
use sqg_core::fields::random_smooth;
use sqg_core::halfspace::{hs_c1, hs_cancellation_check, hs_gradient_ratio_check, hs_lambda_one_check};
use sqg_core::heat::{
    verify_cancellation_bounds, verify_gradient_bounds, verify_intpk, verify_kernel_gaussian_bounds,
    verify_theta_bounds, HeatSweep, IntervalKernel,
};
use sqg_core::interior::{
    commutator_grad_report, commutator_h_report, odd_periodic_extension, riesz_diff_bound_check,
    riesz_grad_bound_check, torus_commutator_grad, torus_commutator_h,
};
use sqg_core::{BoundKind, Cutoff, Domain, GaussianBump, SineBasis};

use crate::config::RunConfig;
use crate::rows::Row;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Suite {
    Kernel,
    Cordoba,
    LowerBounds,
    Commutators,
    Riesz,
    Halfspace,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Kernel => "kernel",
            Suite::Cordoba => "cordoba",
            Suite::LowerBounds => "lower-bounds",
            Suite::Commutators => "commutators",
            Suite::Riesz => "riesz",
            Suite::Halfspace => "halfspace",
        }
    }

    pub fn run(self, cfg: &RunConfig) -> Result<Vec<Row>, CliError> {
        match self {
            Suite::Kernel => kernel(cfg),
            Suite::Cordoba => cordoba(cfg),
            Suite::LowerBounds => lower_bounds(cfg),
            Suite::Commutators => commutators(cfg),
            Suite::Riesz => riesz(cfg),
            Suite::Halfspace => halfspace(cfg),
        }
    }
}

const TORUS_TOLERANCE: f64 = 1e-12;
const CROSS_ORACLE_TOLERANCE: f64 = 1e-10;

fn rows(reports: impl IntoIterator<Item = sqg_core::BoundFitReport>) -> Vec<Row> {
    reports.into_iter().map(|r| Row::from(&r)).collect()
}

fn basis(cfg: &RunConfig, n: usize) -> Result<SineBasis, CliError> {
    Ok(SineBasis::new(cfg.domain.with_points(n)?))
}

fn kernel(cfg: &RunConfig) -> Result<Vec<Row>, CliError> {
    let k = &cfg.verify.kernel;
    let domain = cfg.domain.with_points(k.points)?;

    // eigenseries against image sum on each side, error relative to the
    // larger of |K| and the free Gaussian peak
    let mut worst = 0.0_f64;
    let mut count = 0;
    for l in [domain.lx(), domain.ly()] {
        let kern = IntervalKernel::new(l, 4096);
        for &t in &k.cross_times {
            let peak = 1.0 / (4.0 * PI * t).sqrt();
            for i in 1..4 * k.points {
                for j in 1..4 * k.points {
                    let (x, y) = (l * i as f64 / (4 * k.points) as f64, l * j as f64 / (4 * k.points) as f64);
                    let image = kern.image(x, y, t);
                    worst = worst.max((kern.eigen(x, y, t)? - image).abs() / image.abs().max(peak));
                    count += 1;
                }
            }
        }
    }
    let mut out = vec![Row::check(
        "kernel.cross_oracle",
        BoundKind::Upper,
        worst,
        worst <= CROSS_ORACLE_TOLERANCE,
        format!("t in {:?}, {} (x, y) pairs per side", k.cross_times, count / 2),
        count,
    )
    .detail("tolerance", CROSS_ORACLE_TOLERANCE)];

    let sweep = HeatSweep { points: k.points, horizon: k.horizon, t_min: k.t_min, window: k.window, ..Default::default() };
    out.extend(rows(verify_theta_bounds(&domain, &sweep)?));
    out.extend(rows(verify_kernel_gaussian_bounds(&domain, &sweep)?));
    out.extend(rows(verify_gradient_bounds(&domain, &sweep)?));
    out.extend(rows(verify_cancellation_bounds(&domain, &sweep)?));
    out.extend(rows(verify_intpk(k.intpk_k, &[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (0.0, 1.0)])?));
    let fine = cfg.domain.with_points(k.cutoff_points)?;
    out.extend(rows(verify_cutoff_bounds(&fine, &k.cutoff_ells, &k.cutoff_js, &k.cutoff_alphas)?));
    Ok(out)
}

fn cordoba(cfg: &RunConfig) -> Result<Vec<Row>, CliError> {
    let c = &cfg.verify.cordoba;
    let coarse = basis(cfg, c.n)?;
    let fine = SineBasis::new(coarse.domain().refined(2)?);
    let phis = c.phis.iter().map(|p| Phi::parse(p)).collect::<Result<Vec<_>, _>>().map_err(|e| CliError::Input(e.to_string()))?;
    let mut out = Vec::new();
    for i in 0..c.fields {
        let seed = cfg.seed.wrapping_add(i as u64);
        let a = random_smooth(coarse.shape(), c.modes, c.kappa, seed);
        for &phi in &phis {
            let mut r = cordoba_report(&coarse, &fine, &a, phi, c.s, c.tolerance)?;
            r.id = format!("{}.field{i}", r.id);
            out.push(Row::from(&r).detail("seed", seed as f64));
        }
    }
    Ok(out)
}

fn lower_bounds(cfg: &RunConfig) -> Result<Vec<Row>, CliError> {
    let c = &cfg.verify.lower_bounds;
    let coarse = basis(cfg, c.n)?;
    let fine = SineBasis::new(coarse.domain().refined(2)?);
    let d = *coarse.domain();
    let q = coarse.to_spectral(&GaussianBump::standard(&d, 1.0).sample(&d))?;
    let sweep = LowerBoundSweep::default();
    let mut out = Vec::new();
    for &ell in &c.ells {
        for &h in &c.h_steps {
            out.push(Row::from(&finite_difference_lower_bound_report(&coarse, &fine, &q, [h, 0], ell, c.s, &sweep)?));
        }
        out.extend(rows(gradient_lower_bound_report(&coarse, &fine, &q, c.alpha, ell, c.s, &sweep)?));
    }
    Ok(out)
}

fn commutators(cfg: &RunConfig) -> Result<Vec<Row>, CliError> {
    let c = &cfg.verify.commutators;

    let small = cfg.domain.with_points(c.torus_n)?;
    let ext = odd_periodic_extension(&GaussianBump::standard(&small, 1.0).sample(&small));
    let period = [2.0 * small.lx(), 2.0 * small.ly()];
    let shifts = [[1, 0], [0, 2], [3, -1]];
    let torus = shifts.iter().map(|&h| torus_commutator_h(&ext, period, h)).fold(torus_commutator_grad(&ext, period), f64::max);
    let mut out = vec![Row::check(
        "commutator.torus",
        BoundKind::Upper,
        torus,
        torus <= TORUS_TOLERANCE,
        format!("odd periodic extension of the standard bump, n = {}, shifts {shifts:?} and the gradient", c.torus_n),
        shifts.len() + 1,
    )
    .detail("tolerance", TORUS_TOLERANCE)];

    let d = cfg.domain.with_points(c.shift_n)?;
    let chi = Cutoff::new(&d, c.shift_ell)?;
    out.push(Row::from(&commutator_h_report(
        &SineBasis::new(d),
        &GaussianBump::standard(&d, 1.0).sample(&d),
        &chi,
        &c.h_steps,
    )?));

    let wide = Domain::new(c.gradient_side, c.gradient_side, c.gradient_n, c.gradient_n)?;
    out.push(Row::from(&commutator_grad_report(
        &SineBasis::new(wide),
        &GaussianBump::standard(&wide, 1.0).sample(&wide),
        &c.gradient_ells,
    )?));
    Ok(out)
}

fn riesz(cfg: &RunConfig) -> Result<Vec<Row>, CliError> {
    let c = &cfg.verify.riesz;
    let b = basis(cfg, c.n)?;
    let d = *b.domain();
    let fields = [
        ("bump", b.to_spectral(&GaussianBump::standard(&d, 1.0).sample(&d))?),
        ("random", random_smooth(b.shape(), 8, 3.0, cfg.seed)),
    ];
    let mut out = Vec::new();
    for (name, a) in &fields {
        for &h in &c.h_steps {
            let mut r = riesz_diff_bound_check(&b, a, [h, 0], c.ell, &c.policy)?;
            r.id = format!("{}.{name}.h{h}", r.id);
            out.push(Row::from(&r));
        }
        let mut r = riesz_grad_bound_check(&b, a, c.ell, &c.policy)?;
        r.id = format!("{}.{name}", r.id);
        out.push(Row::from(&r));
    }
    Ok(out)
}

fn halfspace(cfg: &RunConfig) -> Result<Vec<Row>, CliError> {
    let c = &cfg.verify.halfspace;
    let samples: Vec<(f64, f64)> = c.cancellation.iter().map(|s| (s[0], s[1])).collect();
    let c1 = hs_c1()?;
    let exact = 0.5 / PI.sqrt();
    let err = (c1 - exact).abs() / exact;
    Ok(vec![
        Row::from(&hs_lambda_one_check(&c.heights)?),
        Row::check("halfspace.c1", BoundKind::Upper, c1, err <= 1e-10, "quadrature of the normalization".into(), 1)
            .detail("closed_form", exact)
            .detail("relative_error", err),
        Row::from(&hs_cancellation_check(&samples)?),
        Row::from(&hs_gradient_ratio_check()?),
    ])
}
