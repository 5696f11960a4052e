//! Pointwise bounds for the Riesz velocity in terms of the dissipation of a
//! localized field:
//!
//! ```text
//! |delta_h u| <= C (sqrt(rho D(f)) + ||theta||_inf (|h|/d + |h|/rho) + |delta_h theta|),  f = chi delta_h theta
//! |grad u|    <= C (sqrt(rho D(f)) + ||theta||_inf (1/d + 1/rho)     + |grad theta|),    f = chi grad theta
//! ```
//!
//! at points with `d(x) >= ell`, with `D` the `s = 1` bracket (summed over
//! components for the vector `f`). The scale `rho` is chosen per point by a
//! [`RhoPolicy`].

use serde::{Deserialize, Serialize};

use super::difference::step_length;
use crate::cutoff::Cutoff;
use crate::dissipation::{compute_d, odd_shift};
use crate::domain::GridField;
use crate::error::{Error, Result};
use crate::report::{BoundFitReport, BoundKind};
use crate::spectral::{SineBasis, SpectralField};

/// Numbers the proofs leave open.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoPolicy {
    /// `rho <= c d(x)` in the difference bound.
    pub c: f64,
    /// `rho = 1 / (c5 |grad theta|)` in the gradient bound.
    pub c5: f64,
    /// Lower limit on `rho`, in grid spacings.
    pub floor_spacings: f64,
}

impl Default for RhoPolicy {
    fn default() -> Self {
        Self {
            c: 0.5,
            c5: 1.0,
            floor_spacings: 2.0,
        }
    }
}

impl RhoPolicy {
    fn floor(&self, basis: &SineBasis) -> f64 {
        self.floor_spacings * basis.domain().dx().max(basis.domain().dy())
    }

    /// `min(||theta||_inf |h| / |delta_h theta|, c d)`, floored.
    pub fn difference(&self, sup: f64, h: f64, dtheta: f64, d: f64, floor: f64) -> f64 {
        let natural = if dtheta != 0.0 { sup * h / dtheta.abs() } else { f64::INFINITY };
        natural.min(self.c * d).max(floor)
    }

    /// `min(1 / (c5 |grad theta|), d)`, floored.
    pub fn gradient(&self, grad: f64, d: f64, floor: f64) -> f64 {
        let natural = if grad != 0.0 { 1.0 / (self.c5 * grad) } else { f64::INFINITY };
        natural.min(d).max(floor)
    }
}

/// Smallest constant on one grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RieszFit {
    pub constant: f64,
    pub argmax: Option<[usize; 2]>,
    pub points: usize,
    pub theta_sup: f64,
}

fn fit_points(
    basis: &SineBasis,
    ell: f64,
    sup: f64,
    mut ratio: impl FnMut(usize, usize, f64) -> Option<(f64, f64)>,
) -> RieszFit {
    let domain = basis.domain();
    let (nx, ny) = domain.shape();
    let mut best = 0.0_f64;
    let mut arg = None;
    let mut points = 0;
    for i in 0..nx {
        for k in 0..ny {
            let d = domain.grid_distance(i, k);
            if d < ell {
                continue;
            }
            let Some((lhs, rhs)) = ratio(i, k, d) else { continue };
            points += 1;
            let r = if rhs > 0.0 {
                lhs / rhs
            } else if lhs > 0.0 {
                f64::INFINITY
            } else {
                0.0
            };
            if r > best {
                best = r;
                arg = Some([i, k]);
            }
        }
    }
    RieszFit {
        constant: best,
        argmax: arg,
        points,
        theta_sup: sup,
    }
}

/// The difference bound on the grid of `basis` for a displacement of `h`
/// grid steps (`0 < |h| <= ell / 2`).
pub fn riesz_diff_fit(basis: &SineBasis, a: &SpectralField, h: [i64; 2], chi: &Cutoff, policy: &RhoPolicy) -> Result<RieszFit> {
    let domain = basis.domain();
    let len = step_length(domain, h);
    if len == 0.0 || len > 0.5 * chi.ell() * (1.0 + 1e-12) {
        return Err(Error::Displacement(h[0], h[1], format!("need 0 < |h| <= ell/2 = {}", 0.5 * chi.ell())));
    }
    let theta = basis.from_spectral(a)?;
    let sup = basis.sup_norm(a)?;
    let u = basis.riesz_velocity(a)?;
    // the odd periodic extension makes delta_h theta defined everywhere
    let dth = odd_shift(&theta, h).zip_map(&theta, |p, q| p - q)?;
    let f = chi.field().zip_map(&dth, |c, v| c * v)?;
    let dis = compute_d(basis, &f, 1.0)?;
    let floor = policy.floor(basis);
    let (nx, ny) = domain.shape();
    Ok(fit_points(basis, chi.ell(), sup, |i, k, d| {
        let (a2, b2) = (i as i64 + h[0], k as i64 + h[1]);
        if a2 < 0 || b2 < 0 || a2 >= nx as i64 || b2 >= ny as i64 {
            return None;
        }
        let (a2, b2) = (a2 as usize, b2 as usize);
        let du = (u.u1.get(a2, b2) - u.u1.get(i, k)).hypot(u.u2.get(a2, b2) - u.u2.get(i, k));
        let dt = dth.get(i, k);
        let rho = policy.difference(sup, len, dt, d, floor);
        let rhs = (rho * dis.values().get(i, k).max(0.0)).sqrt() + sup * (len / d + len / rho) + dt.abs();
        Some((du, rhs))
    }))
}

/// The gradient bound on the grid of `basis`.
pub fn riesz_grad_fit(basis: &SineBasis, a: &SpectralField, chi: &Cutoff, policy: &RhoPolicy) -> Result<RieszFit> {
    let sup = basis.sup_norm(a)?;
    let (gx, gy) = basis.gradient(a)?;
    let du = basis.velocity_gradient(a)?;
    let dx = compute_d(basis, &chi.field().zip_map(&gx, |c, v| c * v)?, 1.0)?;
    let dy = compute_d(basis, &chi.field().zip_map(&gy, |c, v| c * v)?, 1.0)?;
    let floor = policy.floor(basis);
    let frob = |i: usize, k: usize| {
        du.iter()
            .flat_map(|row| row.iter())
            .map(|g: &GridField| g.get(i, k).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    Ok(fit_points(basis, chi.ell(), sup, |i, k, d| {
        let g = gx.get(i, k).hypot(gy.get(i, k));
        let rho = policy.gradient(g, d, floor);
        let dsum = (dx.values().get(i, k) + dy.values().get(i, k)).max(0.0);
        let rhs = (rho * dsum).sqrt() + sup * (1.0 / d + 1.0 / rho) + g;
        Some((frob(i, k), rhs))
    }))
}

fn two_grid_report(id: &str, coarse: RieszFit, fine: RieszFit, sweep: String) -> BoundFitReport {
    let size = coarse.points + fine.points;
    if coarse.theta_sup == 0.0 && fine.theta_sup == 0.0 {
        // both sides vanish: nothing to fit
        let mut r = BoundFitReport::from_fits(id, BoundKind::Upper, 1.0, 1.0, sweep, size);
        r.constant = 0.0;
        r.coarse_constant = 0.0;
        return r;
    }
    BoundFitReport::from_fits(id, BoundKind::Upper, coarse.constant, fine.constant, sweep, size)
}

/// Difference bound fitted on the grid of `basis` and on the twice refined
/// grid (same physical `h`). `a` holds the sine coefficients of `theta` on
/// the coarse grid.
pub fn riesz_diff_bound_check(
    basis: &SineBasis,
    a: &SpectralField,
    h: [i64; 2],
    ell: f64,
    policy: &RhoPolicy,
) -> Result<BoundFitReport> {
    let fine = SineBasis::new(basis.domain().refined(2)?);
    let c = riesz_diff_fit(basis, a, h, &Cutoff::new(basis.domain(), ell)?, policy)?;
    let f = riesz_diff_fit(
        &fine,
        &a.resized(fine.shape()),
        [2 * h[0], 2 * h[1]],
        &Cutoff::new(fine.domain(), ell)?,
        policy,
    )?;
    let sweep = format!("d >= {ell}, h = {h:?} steps, grids {:?} and {:?}", basis.shape(), fine.shape());
    Ok(two_grid_report("riesz.difference", c, f, sweep)
        .with_parameter(step_length(basis.domain(), h))
        .with_detail("rho.c", policy.c))
}

/// Gradient bound fitted on the grid of `basis` and on the twice refined grid.
pub fn riesz_grad_bound_check(basis: &SineBasis, a: &SpectralField, ell: f64, policy: &RhoPolicy) -> Result<BoundFitReport> {
    let fine = SineBasis::new(basis.domain().refined(2)?);
    let c = riesz_grad_fit(basis, a, &Cutoff::new(basis.domain(), ell)?, policy)?;
    let f = riesz_grad_fit(&fine, &a.resized(fine.shape()), &Cutoff::new(fine.domain(), ell)?, policy)?;
    let sweep = format!("d >= {ell}, grids {:?} and {:?}", basis.shape(), fine.shape());
    Ok(two_grid_report("riesz.gradient", c, f, sweep).with_detail("rho.c5", policy.c5))
}
