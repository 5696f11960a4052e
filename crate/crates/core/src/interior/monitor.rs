//! Read-only monitors over the snapshots of a solver trajectory.
//!
//! The Hölder monitor follows the restricted seminorm
//! `s(t) = sup_{d(x) >= ell, |h| <= hmax} |delta_h theta| / |h|^alpha` and
//! fits `Gamma = max_t s(t) / (s(0) + ell^{-alpha} ||theta_0||_inf)`. The
//! gradient monitor follows `g(t) = sup_x d(x) |grad theta|` and fits
//! `Gamma_1 = max_t g(t) / (g(0) + (1 + ||theta_0||_inf)^4)`.

use serde::{Deserialize, Serialize};

use super::holder::{restricted_holder_seminorm, weighted_gradient_sup, weighted_holder_seminorm};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::galerkin::Trajectory;
use crate::report::{BoundFitReport, BoundKind};
use crate::spectral::SineBasis;

/// Upper limit of `epsilon = alpha ||theta_0||_inf` treated as small.
pub const SMALLNESS_PROXY: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Weighted interior seminorm at the same times (Hölder monitor only).
    pub weighted: Option<Vec<f64>>,
    pub theta0_sup: f64,
    /// Denominator of the fitted constant.
    pub reference: f64,
    pub gamma: f64,
    pub epsilon: Option<f64>,
    pub small: Option<bool>,
    pub nonincreasing: bool,
}

impl MonitorSeries {
    fn build(times: Vec<f64>, values: Vec<f64>, theta0_sup: f64, reference: f64) -> Self {
        let max = values.iter().copied().fold(0.0, f64::max);
        let gamma = if reference > 0.0 { max / reference } else { 0.0 };
        let nonincreasing = values.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12) + 1e-300);
        Self {
            times,
            values,
            weighted: None,
            theta0_sup,
            reference,
            gamma,
            epsilon: None,
            small: None,
            nonincreasing,
        }
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.gamma.is_finite()
            && self.values.iter().all(|v| v.is_finite())
            && self.weighted.as_ref().is_none_or(|w| w.iter().all(|v| v.is_finite()))
    }
}

fn snapshots(traj: &Trajectory) -> Result<(SineBasis, f64)> {
    let first = traj
        .snapshots
        .first()
        .ok_or_else(|| Error::EmptySweep("trajectory kept no snapshots".into()))?;
    let basis = SineBasis::new(traj.domain);
    let sup = basis.sup_norm(&first.theta)?;
    Ok((basis, sup))
}

/// Largest `|h|` of the restricted seminorm: `ell / 16`, but never below two
/// grid spacings (otherwise no offset is admissible on desk grids).
pub fn monitor_hmax(domain: &Domain, ell: f64) -> f64 {
    (ell / 16.0).max(2.0 * domain.dx().max(domain.dy()))
}

pub fn holder_evolution_monitor(traj: &Trajectory, alpha: f64, ell: f64) -> Result<MonitorSeries> {
    let (basis, sup0) = snapshots(traj)?;
    let domain = &traj.domain;
    let hmax = monitor_hmax(domain, ell);
    let (mut times, mut values, mut weighted) = (Vec::new(), Vec::new(), Vec::new());
    for s in &traj.snapshots {
        let f = basis.from_spectral(&s.theta)?;
        times.push(s.t);
        values.push(restricted_holder_seminorm(domain, &f, alpha, ell, hmax)?.seminorm);
        weighted.push(weighted_holder_seminorm(domain, &f, alpha)?.seminorm);
    }
    let reference = values[0] + ell.powf(-alpha) * sup0;
    let mut m = MonitorSeries::build(times, values, sup0, reference);
    let eps = alpha * sup0;
    m.weighted = Some(weighted);
    m.epsilon = Some(eps);
    m.small = Some(eps <= SMALLNESS_PROXY * (1.0 + 1e-12));
    Ok(m)
}

pub fn gradient_evolution_monitor(traj: &Trajectory) -> Result<MonitorSeries> {
    let (basis, sup0) = snapshots(traj)?;
    let (mut times, mut values) = (Vec::new(), Vec::new());
    for s in &traj.snapshots {
        times.push(s.t);
        values.push(weighted_gradient_sup(&traj.domain, &basis.gradient(&s.theta)?)?.0);
    }
    let reference = values[0] + (1.0 + sup0).powi(4);
    Ok(MonitorSeries::build(times, values, sup0, reference))
}

/// Compares the constants fitted on two runs (for instance two amplitudes
/// of the same datum). Zero data on both runs passes with constant 0.
pub fn monitor_report(id: &str, a: &MonitorSeries, b: &MonitorSeries) -> BoundFitReport {
    let sweep = format!("{} and {} snapshots", a.values.len(), b.values.len());
    let size = a.values.len() + b.values.len();
    let mut r = if a.max() == 0.0 && b.max() == 0.0 {
        let mut r = BoundFitReport::from_fits(id, BoundKind::Upper, 1.0, 1.0, sweep, size);
        r.constant = 0.0;
        r.coarse_constant = 0.0;
        r
    } else {
        BoundFitReport::from_fits(id, BoundKind::Upper, a.gamma, b.gamma, sweep, size)
    };
    r = r.fail_if(!a.is_finite() || !b.is_finite());
    for (tag, m) in [("first", a), ("second", b)] {
        r = r.with_detail(format!("max.{tag}"), m.max()).with_detail(format!("theta0_sup.{tag}"), m.theta0_sup);
        if let Some(e) = m.epsilon {
            r = r.with_detail(format!("epsilon.{tag}"), e);
        }
        if let Some(w) = &m.weighted {
            let growth = w.iter().copied().fold(0.0, f64::max) / w[0];
            r = r.with_detail(format!("weighted_growth.{tag}"), if w[0] > 0.0 { growth } else { 0.0 });
        }
    }
    r
}
