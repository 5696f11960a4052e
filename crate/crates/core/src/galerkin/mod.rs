//! Pseudospectral Galerkin solver for critical SQG on a Dirichlet rectangle,
//!
//! ```text
//! d/dt theta_n + P_n(u_n . grad theta_n) + Lambda theta_n = 0,   u_n = grad^perp Lambda^{-1} theta_n,
//! ```
//!
//! with `P_n` the isotropic band truncation `j, k <= n`. The dissipation is
//! integrated exactly by the factor `exp(-sqrt(lambda_jk) dt)`; the advection
//! term is explicit (integrating-factor RK2 or SSP-RK3) and is evaluated on
//! the odd-odd extended torus (see [`torus`]).

pub mod energy;
pub mod io;
mod torus;

use ndarray::{Array2, Zip};
use serde::{Deserialize, Serialize};

use crate::domain::{Domain, GridField};
use crate::error::{Error, Result};
use crate::interior::{weighted_gradient_sup, weighted_holder_seminorm};
use crate::spectral::{SineBasis, SpectralField};

pub use energy::{h2_energy_check, h2_energy_fit, H2Fit};
pub use torus::{Dealias, ProductInfo};
use torus::TorusProduct;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stepper {
    /// Integrating-factor Heun method, second order.
    IfRk2,
    /// Integrating-factor Shu-Osher SSP scheme, third order.
    IfRk3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Retained modes per direction.
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    pub dealias: Dealias,
    pub stepper: Stepper,
    /// Diagnostics (and snapshots) every this many steps, and at `t_end`.
    pub record_every: usize,
    /// `false` drops the advection term: pure dissipation.
    pub nonlinear: bool,
    /// Exponent of the weighted Hölder diagnostic; `None` skips it.
    pub holder_alpha: Option<f64>,
    /// If set, the initial datum must be below `1e-10 ||theta_0||_inf`
    /// within `support_ell / 4` of the boundary.
    pub support_ell: Option<f64>,
    /// Largest admitted relative `L^2` mass in the outer quarter of the band.
    pub resolution_tolerance: f64,
    /// Growth of `||Lambda^2 theta||` that counts as blow-up.
    pub blowup_factor: f64,
    pub keep_snapshots: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            n: 64,
            dt: 1e-3,
            t_end: 1.0,
            dealias: Dealias::TwoThirds,
            stepper: Stepper::IfRk3,
            record_every: 10,
            nonlinear: true,
            holder_alpha: None,
            support_ell: Some(0.5),
            resolution_tolerance: 1e-6,
            blowup_factor: 1e6,
            keep_snapshots: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self, domain: &Domain) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.n == 0 || self.n > domain.nx().min(domain.ny()) {
            return bad(format!("n = {} must lie in 1..={}", self.n, domain.nx().min(domain.ny())));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt = {} must be positive", self.dt));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end = {} must be nonnegative", self.t_end));
        }
        if self.record_every == 0 {
            return bad("record_every must be at least 1".into());
        }
        if let Some(a) = self.holder_alpha {
            if !(a > 0.0 && a < 1.0) {
                return bad(format!("holder_alpha = {a} must lie in (0, 1)"));
            }
        }
        if !(self.resolution_tolerance > 0.0 && self.blowup_factor > 1.0) {
            return bad("resolution_tolerance must be positive and blowup_factor above 1".into());
        }
        Ok(())
    }
}

/// Time and band-limited coefficients of the Galerkin solution.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub t: f64,
    pub theta: SpectralField,
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    /// Number of CFL substeps the step was split into.
    pub substeps: usize,
    pub max_speed: f64,
    pub contamination: f64,
}

/// One diagnostics record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub l2: f64,
    pub linf: f64,
    /// `||Lambda^2 theta||_2`.
    pub h2: f64,
    /// `||Lambda^{5/2} theta||_2`.
    pub h25: f64,
    /// Weighted interior Hölder seminorm, `NaN` when not requested.
    pub holder: f64,
    /// `sup d(x) |grad theta|`.
    pub grad_weighted: f64,
    /// Exact `d/dt ||Lambda^2 theta||^2` of the Galerkin system.
    pub dh2sq_dt: f64,
    /// `int_0^t ||Lambda^{5/2} theta||^2`, trapezoid over every step.
    pub h25_integral: f64,
    /// Largest torus contamination since the previous record.
    pub contamination: f64,
    /// Relative `L^2` mass in the outer quarter of the band.
    pub tail: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Outcome {
    Completed,
    BlowUp { t: f64, growth: f64 },
    Unresolved { t: f64, tail: f64 },
}

impl Outcome {
    pub fn into_result(self) -> Result<()> {
        match self {
            Outcome::Completed => Ok(()),
            Outcome::BlowUp { t, growth } => Err(Error::BlowUp {
                t,
                reason: format!("||Lambda^2 theta|| grew by a factor {growth:.3e}"),
            }),
            Outcome::Unresolved { t, tail } => Err(Error::Resolution {
                t,
                reason: format!("relative spectral tail {tail:.3e} above tolerance"),
            }),
        }
    }
}

/// Everything a run produces.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub domain: Domain,
    pub config: SolverConfig,
    pub rows: Vec<DiagnosticsRow>,
    /// States at the recorded times (empty unless `keep_snapshots`).
    pub snapshots: Vec<SolverState>,
    pub outcome: Outcome,
    pub steps: usize,
    pub max_substeps: usize,
    pub max_contamination: f64,
    /// Largest per-step trapezoid energy residual
    /// `|(E_{k+1} - E_k)/dt + D_k + D_{k+1}|` divided by `dt^2 ||Lambda^{3/2} theta_k||^2`,
    /// `E = ||theta||^2`, `D = ||Lambda^{1/2} theta||^2`.
    pub energy_law_ratio: f64,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }
}

struct Factors {
    dt: f64,
    full: Array2<f64>,
    half: Array2<f64>,
    back_half: Array2<f64>,
}

pub struct Solver {
    basis: SineBasis,
    cfg: SolverConfig,
    torus: TorusProduct,
    rate: Array2<f64>,
    factors: Option<Factors>,
}

impl std::fmt::Debug for Solver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Solver").field("domain", self.basis.domain()).field("config", &self.cfg).finish()
    }
}

fn weighted_sum(a: &Array2<f64>, lambda: &Array2<f64>, p: f64) -> f64 {
    a.iter().zip(lambda.iter()).map(|(c, l)| l.powf(p) * c * c).sum()
}

impl Solver {
    pub fn new(domain: Domain, cfg: SolverConfig) -> Result<Self> {
        cfg.validate(&domain)?;
        let basis = SineBasis::new(domain);
        let rate = basis.spectrum().eigenvalues().mapv(f64::sqrt);
        let torus = TorusProduct::new(&domain, cfg.n, cfg.dealias);
        Ok(Self {
            basis,
            cfg,
            torus,
            rate,
            factors: None,
        })
    }

    pub fn basis(&self) -> &SineBasis {
        &self.basis
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    /// Torus points per period used for the advection product.
    pub fn torus_points(&self) -> usize {
        self.torus.points()
    }

    /// `theta_n(0) = P_n theta_0`.
    pub fn initial_state(&self, theta0: &GridField) -> Result<SolverState> {
        let a = self.basis.to_spectral(theta0)?.band_limited(self.cfg.n);
        Ok(SolverState {
            t: 0.0,
            theta: a,
            steps: 0,
        })
    }

    /// `P_n(u . grad theta)` for a field band-limited to `n`.
    pub fn nonlinear_term(&mut self, theta: &SpectralField) -> Result<(SpectralField, ProductInfo)> {
        if theta.shape() != self.basis.shape() {
            return Err(Error::DimensionMismatch {
                expected: self.basis.shape(),
                found: theta.shape(),
            });
        }
        let mut out = Array2::zeros(theta.shape());
        let info = self.torus.advection(theta.coeffs(), &mut out);
        Ok((SpectralField::new(out), info))
    }

    /// Advection part of the right-hand side, `-P_n(u . grad theta)`.
    fn rhs(&mut self, a: &Array2<f64>) -> (Array2<f64>, ProductInfo) {
        let mut out = Array2::zeros(a.dim());
        if !self.cfg.nonlinear {
            return (
                out,
                ProductInfo {
                    max_speed: 0.0,
                    contamination: 0.0,
                },
            );
        }
        let info = self.torus.advection(a, &mut out);
        out.mapv_inplace(|v| -v);
        (out, info)
    }

    fn prepare_factors(&mut self, dt: f64) {
        if self.factors.as_ref().is_some_and(|f| f.dt == dt) {
            return;
        }
        self.factors = Some(Factors {
            dt,
            full: self.rate.mapv(|r| (-r * dt).exp()),
            half: self.rate.mapv(|r| (-0.5 * r * dt).exp()),
            back_half: self.rate.mapv(|r| (0.5 * r * dt).exp()),
        });
    }

    fn advance(&mut self, a: &mut Array2<f64>, h: f64, first: Option<(Array2<f64>, ProductInfo)>) -> ProductInfo {
        self.prepare_factors(h);
        let (k1, mut info) = first.unwrap_or_else(|| self.rhs(a));
        let f = self.factors.take().expect("factors prepared");
        let mut worst = |i: ProductInfo| {
            info.max_speed = info.max_speed.max(i.max_speed);
            info.contamination = info.contamination.max(i.contamination);
        };
        match self.cfg.stepper {
            Stepper::IfRk2 => {
                let mut v = Zip::from(&*a).and(&k1).and(&f.full).map_collect(|&x, &k, &e| e * (x + h * k));
                let (k2, i2) = self.rhs(&v);
                worst(i2);
                Zip::from(&mut v).and(&k2).and(&*a).and(&f.full).for_each(|v, &k, &x, &e| {
                    *v = 0.5 * e * x + 0.5 * (*v + h * k);
                });
                *a = v;
            }
            Stepper::IfRk3 => {
                let t1 = Zip::from(&*a).and(&k1).and(&f.full).map_collect(|&x, &k, &e| e * (x + h * k));
                let (k2, i2) = self.rhs(&t1);
                worst(i2);
                let t2 = Zip::from(&*a)
                    .and(&t1)
                    .and(&k2)
                    .and(&f.half)
                    .and(&f.back_half)
                    .map_collect(|&x, &y, &k, &eh, &eb| 0.75 * eh * x + 0.25 * eb * (y + h * k));
                let (k3, i3) = self.rhs(&t2);
                worst(i3);
                Zip::from(&mut *a).and(&t2).and(&k3).and(&f.full).and(&f.half).for_each(|x, &y, &k, &e, &eh| {
                    *x = e * *x / 3.0 + 2.0 / 3.0 * eh * (y + h * k);
                });
            }
        }
        self.factors = Some(f);
        info
    }

    /// Advances `state` by `dt`, split into equal substeps when
    /// `dt > 0.5 dx / max |u|` (with `dx` the retained-mode spacing).
    pub fn step_by(&mut self, state: &mut SolverState, dt: f64) -> Result<StepInfo> {
        if state.theta.shape() != self.basis.shape() {
            return Err(Error::DimensionMismatch {
                expected: self.basis.shape(),
                found: state.theta.shape(),
            });
        }
        let mut a = state.theta.coeffs().clone();
        let first = self.rhs(&a);
        let n = self.cfg.n as f64 + 1.0;
        let spacing = (self.basis.domain().lx() / n).min(self.basis.domain().ly() / n);
        let speed = first.1.max_speed;
        let substeps = if speed > 0.0 {
            ((dt * speed / (0.5 * spacing)).ceil() as usize).max(1)
        } else {
            1
        };
        let h = dt / substeps as f64;
        let mut info = self.advance(&mut a, h, Some(first));
        for _ in 1..substeps {
            let i = self.advance(&mut a, h, None);
            info.max_speed = info.max_speed.max(i.max_speed);
            info.contamination = info.contamination.max(i.contamination);
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("solution at t = {}", state.t + dt)));
        }
        state.theta = SpectralField::new(a);
        state.t += dt;
        state.steps += 1;
        Ok(StepInfo {
            substeps,
            max_speed: info.max_speed,
            contamination: info.contamination,
        })
    }

    /// One step of the configured size.
    pub fn step(&mut self, state: &mut SolverState) -> Result<StepInfo> {
        let dt = self.cfg.dt;
        self.step_by(state, dt)
    }

    fn tail(&self, a: &Array2<f64>) -> f64 {
        let cut = (3 * self.cfg.n).div_ceil(4);
        let (mut outer, mut total) = (0.0, 0.0);
        for ((j, k), v) in a.indexed_iter() {
            total += v * v;
            if j >= cut || k >= cut {
                outer += v * v;
            }
        }
        if total > 0.0 {
            (outer / total).sqrt()
        } else {
            0.0
        }
    }

    /// Diagnostics of one state (the integral and contamination columns are
    /// left at zero; `run` fills them in).
    pub fn diagnostics(&mut self, state: &SolverState) -> Result<DiagnosticsRow> {
        let a = state.theta.coeffs();
        let lambda = self.basis.spectrum().eigenvalues().clone();
        let grid = self.basis.from_spectral(&state.theta)?;
        let holder = match self.cfg.holder_alpha {
            Some(alpha) => weighted_holder_seminorm(self.basis.domain(), &grid, alpha)?.seminorm,
            None => f64::NAN,
        };
        let grad = self.basis.gradient(&state.theta)?;
        let (grad_weighted, _) = weighted_gradient_sup(self.basis.domain(), &grad)?;
        // d/dt sum lambda^2 a^2 = 2 sum lambda^2 a (N(a) - sqrt(lambda) a)
        let (n, _) = self.rhs(a);
        let dh2sq_dt = 2.0
            * Zip::from(a)
                .and(&n)
                .and(&lambda)
                .and(&self.rate)
                .fold(0.0, |acc, &x, &nv, &l, &r| acc + l * l * x * (nv - r * x));
        Ok(DiagnosticsRow {
            t: state.t,
            l2: state.theta.l2_norm(),
            linf: self.basis.sup_norm(&state.theta)?,
            h2: weighted_sum(a, &lambda, 2.0).sqrt(),
            h25: weighted_sum(a, &lambda, 2.5).sqrt(),
            holder,
            grad_weighted,
            dh2sq_dt,
            h25_integral: 0.0,
            contamination: 0.0,
            tail: self.tail(a),
        })
    }

    fn check_support(&self, theta0: &GridField) -> Result<()> {
        let Some(ell) = self.cfg.support_ell else {
            return Ok(());
        };
        let d = self.basis.domain();
        let sup = theta0.max_abs();
        let mut near = 0.0_f64;
        for ((i, k), v) in theta0.values().indexed_iter() {
            if d.grid_distance(i, k) < 0.25 * ell {
                near = near.max(v.abs());
            }
        }
        if near > 1e-10 * sup {
            return Err(Error::InvalidParameter(format!(
                "initial datum reaches {near:.3e} within {} of the boundary (sup {sup:.3e})",
                0.25 * ell
            )));
        }
        Ok(())
    }

    /// Solves on `[0, t_end]` from `P_n theta_0`.
    pub fn run(&mut self, theta0: &GridField) -> Result<Trajectory> {
        theta0.check_shape(self.basis.domain())?;
        self.check_support(theta0)?;
        let mut state = self.initial_state(theta0)?;
        let lambda = self.basis.spectrum().eigenvalues().clone();
        let mut traj = Trajectory {
            domain: *self.basis.domain(),
            config: self.cfg.clone(),
            rows: Vec::new(),
            snapshots: Vec::new(),
            outcome: Outcome::Completed,
            steps: 0,
            max_substeps: 1,
            max_contamination: 0.0,
            energy_law_ratio: 0.0,
        };
        let first = self.diagnostics(&state)?;
        let h2_0 = first.h2;
        let mut integral = 0.0;
        let mut contamination = 0.0_f64;
        if !self.record(&mut traj, &state, first)? {
            return Ok(traj);
        }
        let steps = (self.cfg.t_end / self.cfg.dt - 1e-9).ceil().max(0.0) as usize;
        for s in 0..steps {
            let dt = if s + 1 == steps {
                self.cfg.t_end - s as f64 * self.cfg.dt
            } else {
                self.cfg.dt
            };
            let a0 = state.theta.coeffs();
            let (e0, d0, z0, scale) = (
                weighted_sum(a0, &lambda, 0.0),
                weighted_sum(a0, &lambda, 0.5),
                weighted_sum(a0, &lambda, 2.5),
                weighted_sum(a0, &lambda, 1.5),
            );
            let info = self.step_by(&mut state, dt)?;
            let a1 = state.theta.coeffs();
            let (e1, d1, z1) = (
                weighted_sum(a1, &lambda, 0.0),
                weighted_sum(a1, &lambda, 0.5),
                weighted_sum(a1, &lambda, 2.5),
            );
            if scale > 0.0 {
                let residual = ((e1 - e0) / dt + d0 + d1).abs();
                traj.energy_law_ratio = traj.energy_law_ratio.max(residual / (dt * dt * scale));
            }
            integral += 0.5 * dt * (z0 + z1);
            contamination = contamination.max(info.contamination);
            traj.max_contamination = traj.max_contamination.max(info.contamination);
            traj.max_substeps = traj.max_substeps.max(info.substeps);
            traj.steps += 1;
            if (s + 1) % self.cfg.record_every == 0 || s + 1 == steps {
                let mut row = self.diagnostics(&state)?;
                row.h25_integral = integral;
                row.contamination = contamination;
                contamination = 0.0;
                if h2_0 > 0.0 && row.h2 > self.cfg.blowup_factor * h2_0 {
                    traj.outcome = Outcome::BlowUp {
                        t: row.t,
                        growth: row.h2 / h2_0,
                    };
                }
                if !self.record(&mut traj, &state, row)? {
                    return Ok(traj);
                }
            }
        }
        Ok(traj)
    }

    /// Appends a record; `false` once the run has to stop.
    fn record(&self, traj: &mut Trajectory, state: &SolverState, row: DiagnosticsRow) -> Result<bool> {
        if !row.l2.is_finite() || !row.h2.is_finite() {
            return Err(Error::NonFinite(format!("diagnostics at t = {}", row.t)));
        }
        if row.tail > self.cfg.resolution_tolerance && traj.outcome == Outcome::Completed {
            traj.outcome = Outcome::Unresolved { t: row.t, tail: row.tail };
        }
        traj.rows.push(row);
        if self.cfg.keep_snapshots {
            traj.snapshots.push(state.clone());
        }
        Ok(traj.outcome == Outcome::Completed)
    }
}

/// Convenience wrapper: builds a solver and runs it.
pub fn run(domain: Domain, theta0: &GridField, cfg: SolverConfig) -> Result<Trajectory> {
    Solver::new(domain, cfg)?.run(theta0)
}
