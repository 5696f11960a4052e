//! Commutators of the cutoff with `Lambda`:
//!
//! ```text
//! C_h(theta)   = delta_h Lambda theta - Lambda(chi delta_h theta)
//! C_chi(theta) = grad Lambda theta    - Lambda(chi grad theta)
//! ```
//!
//! evaluated where `d(x) >= ell` and normalized by `|h| ||theta||_inf / d^2`
//! (or `||theta||_inf / d^2`). The products `chi delta_h theta` and
//! `chi grad theta` vanish near the boundary, so their sine expansions
//! converge fast and `Lambda` is applied to them spectrally.
//!
//! The torus functions are the control case: with `chi = 1` and no boundary,
//! both commutators vanish identically, so what they return is rounding.

use ndarray::Array2;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::difference::{delta_h, step_length, PartialField};
use crate::cutoff::Cutoff;
use crate::domain::GridField;
use crate::error::{Error, Result};
use crate::report::{BoundFitReport, BoundKind};
use crate::spectral::SineBasis;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutatorReport {
    /// `max |C| d^2 / (|h| ||theta||_inf)` over `d(x) >= ell` (no `|h|` for the
    /// gradient commutator): the fitted `Gamma_0` or `Gamma_3`.
    pub gamma: f64,
    pub argmax: Option<[usize; 2]>,
    pub points: usize,
    pub theta_sup: f64,
    pub ell: f64,
    /// Displacement in grid steps, for the shift commutator.
    pub h: Option<[i64; 2]>,
}

fn lambda_grid(basis: &SineBasis, f: &GridField) -> Result<GridField> {
    let a = basis.to_spectral(f)?;
    basis.from_spectral(&basis.apply_lambda_s(&a, 1.0)?)
}

fn check_cutoff(basis: &SineBasis, chi: &Cutoff) -> Result<()> {
    if basis.domain() != chi.domain() {
        return Err(Error::InvalidDomain("cutoff built on a different grid".into()));
    }
    Ok(())
}

fn fit(
    basis: &SineBasis,
    chi: &Cutoff,
    sup: f64,
    scale: f64,
    magnitude: impl Fn(usize, usize) -> Option<f64>,
) -> (f64, Option<[usize; 2]>, usize) {
    let domain = basis.domain();
    let (nx, ny) = domain.shape();
    let mut best = 0.0;
    let mut arg = None;
    let mut points = 0;
    for i in 0..nx {
        for k in 0..ny {
            let d = domain.grid_distance(i, k);
            if d < chi.ell() {
                continue;
            }
            let Some(m) = magnitude(i, k) else { continue };
            points += 1;
            if sup == 0.0 {
                continue;
            }
            let r = m * d * d / (scale * sup);
            if r > best || arg.is_none() {
                best = r.max(best);
                arg = Some([i, k]);
            }
        }
    }
    (best, arg, points)
}

/// The shift commutator for a displacement of `h` grid steps, which must
/// satisfy `0 < |h| <= ell / 16`.
pub fn commutator_h(basis: &SineBasis, theta: &GridField, h: [i64; 2], chi: &Cutoff) -> Result<(PartialField, CommutatorReport)> {
    check_cutoff(basis, chi)?;
    let domain = basis.domain();
    theta.check_shape(domain)?;
    let len = step_length(domain, h);
    if len == 0.0 {
        return Err(Error::Displacement(h[0], h[1], "zero displacement".into()));
    }
    if len > chi.ell() / 16.0 * (1.0 + 1e-12) {
        return Err(Error::Displacement(
            h[0],
            h[1],
            format!("|h| = {len} exceeds ell/16 = {}", chi.ell() / 16.0),
        ));
    }
    let a = basis.to_spectral(theta)?;
    let lam = basis.from_spectral(&basis.apply_lambda_s(&a, 1.0)?)?;
    let shifted_lam = delta_h(domain, &lam, h)?;
    // where x + h leaves the grid, d(x) < |h| < ell/4 and chi vanishes
    let dth = delta_h(domain, theta, h)?;
    let f = chi.field().zip_map(dth.values(), |c, v| c * v)?;
    let lf = lambda_grid(basis, &f)?;
    let c = shifted_lam.values().zip_map(&lf, |p, q| p - q)?;
    let out = PartialField::masked(c, &shifted_lam);
    let sup = basis.sup_norm(&a)?;
    let (gamma, argmax, points) = fit(basis, chi, sup, len, |i, k| out.get(i, k).map(f64::abs));
    Ok((
        out,
        CommutatorReport {
            gamma,
            argmax,
            points,
            theta_sup: sup,
            ell: chi.ell(),
            h: Some(h),
        },
    ))
}

/// The gradient commutator, componentwise.
pub fn commutator_grad(basis: &SineBasis, theta: &GridField, chi: &Cutoff) -> Result<((GridField, GridField), CommutatorReport)> {
    check_cutoff(basis, chi)?;
    theta.check_shape(basis.domain())?;
    let a = basis.to_spectral(theta)?;
    let (lx, ly) = basis.gradient(&basis.apply_lambda_s(&a, 1.0)?)?;
    let (gx, gy) = basis.gradient(&a)?;
    let fx = lambda_grid(basis, &chi.field().zip_map(&gx, |c, v| c * v)?)?;
    let fy = lambda_grid(basis, &chi.field().zip_map(&gy, |c, v| c * v)?)?;
    let cx = lx.zip_map(&fx, |p, q| p - q)?;
    let cy = ly.zip_map(&fy, |p, q| p - q)?;
    let sup = basis.sup_norm(&a)?;
    let (gamma, argmax, points) = fit(basis, chi, sup, 1.0, |i, k| Some(cx.get(i, k).hypot(cy.get(i, k))));
    Ok((
        (cx, cy),
        CommutatorReport {
            gamma,
            argmax,
            points,
            theta_sup: sup,
            ell: chi.ell(),
            h: None,
        },
    ))
}

/// Report for a set of fitted constants that should not depend on the swept
/// parameter: the verdict asks for `max / min <= 2`. `constant` is the first
/// entry's value and `coarse_constant` the last one's.
fn sweep_report(id: &str, label: &str, entries: &[(f64, f64)]) -> Result<BoundFitReport> {
    let (Some(first), Some(last)) = (entries.first(), entries.last()) else {
        return Err(Error::EmptySweep(id.into()));
    };
    let hi = entries.iter().map(|e| e.1).fold(f64::NEG_INFINITY, f64::max);
    let lo = entries.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
    let sweep = entries.iter().map(|e| format!("{label}={}", e.0)).collect::<Vec<_>>().join(", ");
    let mut r = BoundFitReport::from_fits(id, BoundKind::Upper, last.1, first.1, sweep, entries.len())
        .with_detail("spread", hi / lo)
        .fail_if(!(hi / lo <= 2.0));
    for (p, g) in entries {
        r = r.with_detail(format!("gamma.{label}={p}"), *g);
    }
    Ok(r)
}

/// `Gamma_0` over displacements `(m, 0)` for each `m` in `steps`.
pub fn commutator_h_report(basis: &SineBasis, theta: &GridField, chi: &Cutoff, steps: &[i64]) -> Result<BoundFitReport> {
    let entries = steps
        .iter()
        .map(|&m| Ok((m as f64, commutator_h(basis, theta, [m, 0], chi)?.1.gamma)))
        .collect::<Result<Vec<_>>>()?;
    Ok(sweep_report("commutator.shift", "h_steps", &entries)?.with_parameter(chi.ell()))
}

/// `Gamma_3` over cutoff scales.
pub fn commutator_grad_report(basis: &SineBasis, theta: &GridField, ells: &[f64]) -> Result<BoundFitReport> {
    let entries = ells
        .iter()
        .map(|&ell| {
            let chi = Cutoff::new(basis.domain(), ell)?;
            Ok((ell, commutator_grad(basis, theta, &chi)?.1.gamma))
        })
        .collect::<Result<Vec<_>>>()?;
    sweep_report("commutator.gradient", "ell", &entries)
}

/// Values of a sine-grid field extended oddly across every wall, on the
/// periodic grid of `2 (n + 1)` points per direction (period `2 L`). Wall
/// points hold 0.
pub fn odd_periodic_extension(f: &GridField) -> Array2<f64> {
    let (nx, ny) = f.shape();
    let (px, py) = (2 * (nx + 1), 2 * (ny + 1));
    let mut out = Array2::zeros((px, py));
    for ((i, k), &v) in f.values().indexed_iter() {
        let (a, b) = (i + 1, k + 1);
        out[[a, b]] = v;
        out[[px - a, b]] = -v;
        out[[a, py - b]] = -v;
        out[[px - a, py - b]] = v;
    }
    out
}

/// Real field with a Fourier multiplier applied, on a doubly periodic grid
/// with the given periods.
fn periodic_multiplier(f: &Array2<f64>, period: [f64; 2], m: impl Fn(f64, f64, bool) -> Complex64) -> Array2<f64> {
    let (p1, p2) = f.dim();
    let mut planner = FftPlanner::new();
    let (f1, f2) = (planner.plan_fft_forward(p1), planner.plan_fft_forward(p2));
    let (i1, i2) = (planner.plan_fft_inverse(p1), planner.plan_fft_inverse(p2));
    let mut c: Array2<Complex64> = f.mapv(|v| Complex64::new(v, 0.0));
    let transform = |c: &mut Array2<Complex64>, a: &dyn rustfft::Fft<f64>, b: &dyn rustfft::Fft<f64>| {
        for mut row in c.rows_mut() {
            let mut buf = row.to_vec();
            b.process(&mut buf);
            row.iter_mut().zip(buf).for_each(|(x, y)| *x = y);
        }
        for mut col in c.columns_mut() {
            let mut buf = col.to_vec();
            a.process(&mut buf);
            col.iter_mut().zip(buf).for_each(|(x, y)| *x = y);
        }
    };
    transform(&mut c, f1.as_ref(), f2.as_ref());
    let wave = |m: usize, p: usize, l: f64| {
        let s = if m <= p / 2 { m as f64 } else { m as f64 - p as f64 };
        (2.0 * PI * s / l, p.is_multiple_of(2) && m == p / 2)
    };
    for ((a, b), v) in c.indexed_iter_mut() {
        let (k1, n1) = wave(a, p1, period[0]);
        let (k2, n2) = wave(b, p2, period[1]);
        *v *= m(k1, k2, n1 || n2);
    }
    transform(&mut c, i1.as_ref(), i2.as_ref());
    let scale = 1.0 / (p1 * p2) as f64;
    c.mapv(|v| v.re * scale)
}

fn periodic_lambda(f: &Array2<f64>, period: [f64; 2]) -> Array2<f64> {
    periodic_multiplier(f, period, |k1, k2, _| Complex64::new(k1.hypot(k2), 0.0))
}

fn periodic_derivative(f: &Array2<f64>, period: [f64; 2], axis: usize, lambda: bool) -> Array2<f64> {
    periodic_multiplier(f, period, |k1, k2, nyquist| {
        // the Nyquist row has no real derivative
        if nyquist {
            return Complex64::default();
        }
        let k = if axis == 0 { k1 } else { k2 };
        let l = if lambda { k1.hypot(k2) } else { 1.0 };
        Complex64::new(0.0, k * l)
    })
}

fn periodic_shift_difference(f: &Array2<f64>, h: [i64; 2]) -> Array2<f64> {
    let (p1, p2) = f.dim();
    Array2::from_shape_fn((p1, p2), |(i, k)| {
        let a = (i as i64 + h[0]).rem_euclid(p1 as i64) as usize;
        let b = (k as i64 + h[1]).rem_euclid(p2 as i64) as usize;
        f[[a, b]] - f[[i, k]]
    })
}

/// `max |delta_h Lambda f - Lambda delta_h f|` on a periodic grid.
pub fn torus_commutator_h(f: &Array2<f64>, period: [f64; 2], h: [i64; 2]) -> f64 {
    let left = periodic_shift_difference(&periodic_lambda(f, period), h);
    let right = periodic_lambda(&periodic_shift_difference(f, h), period);
    left.iter().zip(right.iter()).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
}

/// `max |grad Lambda f - Lambda grad f|` on a periodic grid.
pub fn torus_commutator_grad(f: &Array2<f64>, period: [f64; 2]) -> f64 {
    let mut worst = 0.0_f64;
    for axis in 0..2 {
        let left = periodic_derivative(f, period, axis, true);
        let right = periodic_lambda(&periodic_derivative(f, period, axis, false), period);
        worst = left.iter().zip(right.iter()).fold(worst, |m, (a, b)| m.max((a - b).abs()));
    }
    worst
}
