//! The dissipation bracket `D(f) = f Lambda^s f - 1/2 Lambda^s (f^2)` and the
//! lower bounds built on it.

use ndarray::{Array1, Array2};

use crate::domain::{Domain, GridField};
use crate::error::{Error, Result};
use crate::heat::{c_s, lambda_s_one, HeatKernel};
use crate::quadrature::GaussLegendre;
use crate::report::{BoundFitReport, BoundKind};
use crate::spectral::{SineBasis, SpectralField};

/// Refinement factor of the grid on which nonlinear functions of `f` are
/// formed before `Lambda^s` is applied.
pub const DEALIAS_FACTOR: usize = 4;

fn check_s(s: f64) -> Result<()> {
    if s > 0.0 && s < 2.0 {
        Ok(())
    } else {
        Err(Error::ExponentOutOfRange { s, range: "(0, 2)" })
    }
}

/// Pointwise values of `D(f)` on the grid together with the exponent used.
#[derive(Debug, Clone, PartialEq)]
pub struct DissipationField {
    values: GridField,
    s: f64,
}

impl DissipationField {
    pub fn values(&self) -> &GridField {
        &self.values
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn min(&self) -> f64 {
        self.values.values().iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Grid values of `Lambda^s phi(f)` for the sine series `a`.
///
/// `phi(f)` is sampled on a grid refined by `factor`, transformed there and
/// mapped back to the original points, which sit at refined indices
/// `factor (i + 1) - 1`.
pub fn lambda_s_of(
    basis: &SineBasis,
    a: &SpectralField,
    phi: impl Fn(f64) -> f64,
    s: f64,
    factor: usize,
) -> Result<GridField> {
    let fine = SineBasis::new(basis.domain().refined(factor)?);
    let f = basis.resample(a, &fine)?;
    let composed = fine.to_spectral(&f.map(phi))?;
    let lifted = fine.from_spectral(&fine.apply_lambda_s(&composed, s)?)?;
    let (nx, ny) = basis.shape();
    Ok(GridField::from_fn((nx, ny), |i, k| {
        lifted.get(factor * (i + 1) - 1, factor * (k + 1) - 1)
    }))
}

/// `D(f)` for a grid field, transformed to the sine basis first.
pub fn compute_d(basis: &SineBasis, f: &GridField, s: f64) -> Result<DissipationField> {
    let a = basis.to_spectral(f)?;
    compute_d_spectral(basis, &a, s, DEALIAS_FACTOR)
}

/// `D(f)` for a sine series, with `f^2` formed on a grid refined by `factor`.
pub fn compute_d_spectral(basis: &SineBasis, a: &SpectralField, s: f64, factor: usize) -> Result<DissipationField> {
    check_s(s)?;
    let f = basis.from_spectral(a)?;
    let lf = basis.from_spectral(&basis.apply_lambda_s(a, s)?)?;
    let lf2 = lambda_s_of(basis, a, |v| v * v, s, factor)?;
    let mut values = f.values() * lf.values();
    values.zip_mut_with(lf2.values(), |d, &l| *d -= 0.5 * l);
    Ok(DissipationField {
        values: GridField::new(values),
        s,
    })
}

/// Nodes and weights along each axis, and the field sampled on that grid.
type GlobalRule = (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>, Array2<f64>);

/// Independent evaluation of `D(f)(x)` from the heat representation
///
/// `D(f)(x) = c_s/2 int_0^inf t^{-1-s/2} int H(x, y, t) (f(x) - f(y))^2 dy dt
///            + 1/2 f(x)^2 Lambda^s 1 (x)`.
///
/// The inner integral is a tensor Gauss-Legendre rule with `H` from the image
/// sums and `f` summed directly from its coefficients at the nodes. Short
/// times use a window of half-width `12 sqrt(t)` around `x`; once the
/// Gaussian is wider than the data's shortest wavelength a fixed rule over the
/// whole rectangle is used, with `f` tabulated once. The time integral runs in
/// `u = t^{(2-s)/2}` near zero and in `ln t` beyond.
pub struct HeatQuadratureOracle<'a> {
    basis: &'a SineBasis,
    a: &'a SpectralField,
    s: f64,
    heat: HeatKernel,
    coeffs: Array2<f64>,
    kx: Array1<f64>,
    ky: Array1<f64>,
    /// panel width above which the global rule is used
    width: f64,
    global: GlobalRule,
}

impl<'a> HeatQuadratureOracle<'a> {
    pub fn new(basis: &'a SineBasis, a: &'a SpectralField, s: f64) -> Result<Self> {
        check_s(s)?;
        let domain = basis.domain();
        let (coeffs, kx, ky) = trimmed(basis, a);
        let kmax = kx.iter().chain(ky.iter()).copied().fold(0.0, f64::max);
        let width = (3.0 / kmax).min(domain.min_side() / 24.0);
        let (g1, v1) = panels(0.0, domain.lx(), width);
        let (g2, v2) = panels(0.0, domain.ly(), width);
        let f = tabulate(&coeffs, &kx, &ky, &g1, &g2, basis.spectrum().normalization());
        Ok(Self {
            basis,
            a,
            s,
            heat: HeatKernel::new(domain),
            coeffs,
            kx,
            ky,
            width,
            global: (g1, v1, g2, v2, f),
        })
    }

    fn axis_weights(&self, axis: usize, x: f64, t: f64, nodes: &[f64], weights: &[f64]) -> Result<Vec<f64>> {
        let k = self.heat.axis(axis);
        let l = k.length();
        nodes
            .iter()
            .zip(weights)
            .map(|(&y, &w)| Ok(w * if t <= l * l { k.value(x, y, t) } else { k.eigen(x, y, t)? }))
            .collect()
    }

    /// `int H(x, y, t) (f(x) - f(y))^2 dy`.
    fn inner(&self, x: [f64; 2], fx: f64, t: f64) -> Result<f64> {
        let rt = t.sqrt();
        let local;
        let (y1, v1, y2, v2, f) = if rt < self.width {
            let d = self.basis.domain();
            let (y1, v1) = panels((x[0] - 12.0 * rt).max(0.0), (x[0] + 12.0 * rt).min(d.lx()), rt);
            let (y2, v2) = panels((x[1] - 12.0 * rt).max(0.0), (x[1] + 12.0 * rt).min(d.ly()), rt);
            let f = tabulate(&self.coeffs, &self.kx, &self.ky, &y1, &y2, self.basis.spectrum().normalization());
            local = (y1, v1, y2, v2, f);
            (&local.0, &local.1, &local.2, &local.3, &local.4)
        } else {
            let g = &self.global;
            (&g.0, &g.1, &g.2, &g.3, &g.4)
        };
        let w1 = self.axis_weights(0, x[0], t, y1, v1)?;
        let w2 = self.axis_weights(1, x[1], t, y2, v2)?;
        let mut acc = 0.0;
        for (i, wi) in w1.iter().enumerate() {
            let mut row = 0.0;
            for (k, wk) in w2.iter().enumerate() {
                let diff = fx - f[[i, k]];
                row += wk * diff * diff;
            }
            acc += wi * row;
        }
        Ok(acc)
    }

    pub fn evaluate(&self, x: [f64; 2]) -> Result<f64> {
        let domain = self.basis.domain();
        domain.distance_to_boundary(x)?;
        let s = self.s;
        let fx = self.basis.evaluate_at(self.a, x);
        let half = 0.5 * s;
        let mut total = 0.0;
        // near zero: t = u^q, q = 2/(2 - s); the integrand is smooth in u
        let t1: f64 = 1e-5;
        let q = 2.0 / (2.0 - s);
        let u1 = t1.powf(1.0 / q);
        let rule = GaussLegendre::new(16);
        for p in 0..2 {
            let (ua, ub) = (u1 * p as f64 / 2.0, u1 * (p + 1) as f64 / 2.0);
            for (u, w) in rule.mapped(ua, ub) {
                let t = u.powf(q);
                let jac = q * u.powf(q - 1.0);
                total += w * jac * t.powf(-1.0 - half) * self.inner(x, fx, t)?;
            }
        }
        // ln t panels up to where Theta and the data have decayed below e^{-40}
        let t_max = 40.0 / self.basis.spectrum().lambda_min();
        let rule = GaussLegendre::new(10);
        let (la, lb) = (t1.ln(), t_max.ln());
        let n = ((lb - la) / 1.0).ceil() as usize;
        for p in 0..n {
            let a0 = la + (lb - la) * p as f64 / n as f64;
            let b0 = la + (lb - la) * (p + 1) as f64 / n as f64;
            for (tau, w) in rule.mapped(a0, b0) {
                let t = tau.exp();
                total += w * t.powf(-half) * self.inner(x, fx, t)?;
            }
        }
        Ok(0.5 * c_s(s)? * total + 0.5 * fx * fx * lambda_s_one(domain, x, s)?)
    }
}

/// One-shot form of [`HeatQuadratureOracle::evaluate`].
pub fn d_heat_quadrature(basis: &SineBasis, a: &SpectralField, s: f64, x: [f64; 2]) -> Result<f64> {
    HeatQuadratureOracle::new(basis, a, s)?.evaluate(x)
}

/// Gauss-Legendre nodes and weights on `[a, b]` with panels no wider than `width`.
fn panels(a: f64, b: f64, width: f64) -> (Vec<f64>, Vec<f64>) {
    let rule = GaussLegendre::new(8);
    let n = ((b - a) / width).ceil().max(1.0) as usize;
    let mut ys = Vec::with_capacity(8 * n);
    let mut ws = Vec::with_capacity(8 * n);
    for p in 0..n {
        let pa = a + (b - a) * p as f64 / n as f64;
        let pb = a + (b - a) * (p + 1) as f64 / n as f64;
        for (y, w) in rule.mapped(pa, pb) {
            ys.push(y);
            ws.push(w);
        }
    }
    (ys, ws)
}

/// `f` on the tensor nodes `y1 x y2`: `norm S1 A S2^T`.
fn tabulate(c: &Array2<f64>, kx: &Array1<f64>, ky: &Array1<f64>, y1: &[f64], y2: &[f64], norm: f64) -> Array2<f64> {
    let s1 = Array2::from_shape_fn((y1.len(), kx.len()), |(i, j)| (kx[j] * y1[i]).sin());
    let s2 = Array2::from_shape_fn((ky.len(), y2.len()), |(k, i)| (ky[k] * y2[i]).sin());
    s1.dot(c).dot(&s2) * norm
}

/// Drops trailing rows/columns of negligible coefficients and returns the
/// wavenumbers of the rest.
fn trimmed(basis: &SineBasis, a: &SpectralField) -> (Array2<f64>, Array1<f64>, Array1<f64>) {
    let c = a.coeffs();
    let m = c.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let floor = 1e-16 * m;
    let (nx, ny) = c.dim();
    let jx = (0..nx).rev().find(|&j| c.row(j).iter().any(|v| v.abs() > floor)).map_or(1, |j| j + 1);
    let jy = (0..ny).rev().find(|&k| c.column(k).iter().any(|v| v.abs() > floor)).map_or(1, |k| k + 1);
    let d: &Domain = basis.domain();
    let kx = Array1::from_shape_fn(jx, |j| (j + 1) as f64 * std::f64::consts::PI / d.lx());
    let ky = Array1::from_shape_fn(jy, |k| (k + 1) as f64 * std::f64::consts::PI / d.ly());
    (c.slice(ndarray::s![..jx, ..jy]).to_owned(), kx, ky)
}

/// Convex functions with `Phi(0) = 0` for the Córdoba bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Phi {
    Linear,
    /// `f^2 / 2`
    Square,
    /// `f^4`
    Quartic,
    /// `|f|^p`, `p >= 2`
    AbsPower(f64),
}

impl Phi {
    /// Catalog lookup: `linear`, `square`, `quartic`, `abs-power:<p>`.
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "linear" => Ok(Phi::Linear),
            "square" => Ok(Phi::Square),
            "quartic" => Ok(Phi::Quartic),
            other => {
                let p = other
                    .strip_prefix("abs-power:")
                    .and_then(|p| p.parse::<f64>().ok())
                    .ok_or_else(|| Error::InvalidParameter(format!("convex function '{other}' is not in the catalog")))?;
                Phi::abs_power(p)
            }
        }
    }

    pub fn abs_power(p: f64) -> Result<Self> {
        if p >= 2.0 && p.is_finite() {
            Ok(Phi::AbsPower(p))
        } else {
            Err(Error::InvalidParameter(format!("|f|^p needs p >= 2 to be C^2, got {p}")))
        }
    }

    pub fn name(&self) -> String {
        match self {
            Phi::Linear => "linear".into(),
            Phi::Square => "square".into(),
            Phi::Quartic => "quartic".into(),
            Phi::AbsPower(p) => format!("abs-power:{p}"),
        }
    }

    pub fn value(&self, f: f64) -> f64 {
        match *self {
            Phi::Linear => f,
            Phi::Square => 0.5 * f * f,
            Phi::Quartic => f * f * f * f,
            Phi::AbsPower(p) => f.abs().powf(p),
        }
    }

    pub fn derivative(&self, f: f64) -> f64 {
        match *self {
            Phi::Linear => 1.0,
            Phi::Square => f,
            Phi::Quartic => 4.0 * f * f * f,
            Phi::AbsPower(p) => p * f.signum() * f.abs().powf(p - 1.0),
        }
    }
}

/// Output of [`cordoba_gap`].
#[derive(Debug, Clone)]
pub struct CordobaGap {
    /// `Phi'(f) Lambda^s f - Lambda^s Phi(f)`.
    pub bracket: GridField,
    /// `bracket - (c/d^s)(f Phi'(f) - Phi(f))` with the fitted `c`.
    pub gap: GridField,
    /// Largest `c` keeping `gap >= -tolerance`; `+inf` when the damping term
    /// vanishes identically.
    pub c: f64,
    /// Grid index where `c` is attained.
    pub argmin: Option<[usize; 2]>,
}

/// Points with `f Phi' - Phi` below this fraction of its maximum do not
/// constrain the fitted repulsion constant.
const DAMPING_FLOOR: f64 = 1e-12;

/// The Córdoba bracket and its boundary-repulsion fit for the sine series `a`.
pub fn cordoba_gap(basis: &SineBasis, a: &SpectralField, phi: Phi, s: f64, tolerance: f64) -> Result<CordobaGap> {
    check_s(s)?;
    let domain = basis.domain();
    let f = basis.from_spectral(a)?;
    let lf = basis.from_spectral(&basis.apply_lambda_s(a, s)?)?;
    let lphi = lambda_s_of(basis, a, |v| phi.value(v), s, DEALIAS_FACTOR)?;
    let bracket = GridField::from_fn(f.shape(), |i, k| {
        phi.derivative(f.get(i, k)) * lf.get(i, k) - lphi.get(i, k)
    });
    let damping = f.map(|v| v * phi.derivative(v) - phi.value(v));
    let dmax = damping.max_abs();
    let mut c = f64::INFINITY;
    let mut argmin = None;
    if dmax > 0.0 {
        for ((i, k), &g) in damping.values().indexed_iter() {
            if g > DAMPING_FLOOR * dmax {
                let ratio = (bracket.get(i, k) + tolerance) * domain.grid_distance(i, k).powf(s) / g;
                if ratio < c {
                    c = ratio;
                    argmin = Some([i, k]);
                }
            }
        }
    }
    let cc = if c.is_finite() { c } else { 0.0 };
    let gap = GridField::from_fn(f.shape(), |i, k| {
        bracket.get(i, k) - cc * damping.get(i, k) / domain.grid_distance(i, k).powf(s)
    });
    Ok(CordobaGap { bracket, gap, c, argmin })
}

/// Córdoba fit of the same series on two grids of one rectangle.
pub fn cordoba_report(
    coarse: &SineBasis,
    fine: &SineBasis,
    a: &SpectralField,
    phi: Phi,
    s: f64,
    tolerance: f64,
) -> Result<BoundFitReport> {
    let gc = cordoba_gap(coarse, &a.resized(coarse.shape()), phi, s, tolerance)?;
    let gf = cordoba_gap(fine, &a.resized(fine.shape()), phi, s, tolerance)?;
    let min_bracket = gc.bracket.values().iter().chain(gf.bracket.values().iter()).copied().fold(f64::INFINITY, f64::min);
    let sweep = format!("grid points, n = {:?} and {:?}", coarse.shape(), fine.shape());
    let report = if gc.c.is_infinite() && gf.c.is_infinite() {
        // no damping term: the inequality reduces to the bracket sign
        BoundFitReport::from_fits(format!("cordoba.{}", phi.name()), BoundKind::Lower, 1.0, 1.0, sweep, 0)
            .with_detail("c_unconstrained", 1.0)
    } else {
        let n = coarse.shape().0 * coarse.shape().1 + fine.shape().0 * fine.shape().1;
        BoundFitReport::from_fits(format!("cordoba.{}", phi.name()), BoundKind::Lower, gc.c, gf.c, sweep, n)
    };
    Ok(report
        .with_parameter(s)
        .with_detail("min_bracket", min_bracket)
        .fail_if(min_bracket < -tolerance))
}

/// The threshold multiplier `M` used when none is measured.
pub const DEFAULT_THRESHOLD: f64 = 10.0;

/// Settings shared by the two nonlinear lower-bound fits.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundSweep {
    /// Points with `|f| < floor ||f||_inf` are skipped.
    pub floor: f64,
    /// Threshold multipliers `M` scanned.
    pub thresholds: Vec<f64>,
}

impl Default for LowerBoundSweep {
    fn default() -> Self {
        Self {
            floor: 1e-2,
            thresholds: vec![0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, DEFAULT_THRESHOLD, 16.0],
        }
    }
}

/// One lower-bound fit at one resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundFit {
    /// `(M, gamma(M), active points)` for every scanned threshold.
    pub by_threshold: Vec<(f64, f64, usize)>,
    /// Number of points with `d(x) >= ell` above the significance floor.
    pub points: usize,
}

impl LowerBoundFit {
    pub fn gamma_at(&self, m: f64) -> Option<f64> {
        self.by_threshold.iter().find(|r| r.0 == m).map(|r| r.1)
    }

    /// The fitted constant: `gamma` at the smallest scanned threshold that
    /// activates at least one point (the most demanding one). `+inf` when no
    /// point is significant.
    pub fn gamma(&self) -> f64 {
        self.by_threshold.iter().find(|r| r.2 > 0).map_or(f64::INFINITY, |r| r.1)
    }

    fn reference(&self) -> Option<&(f64, f64, usize)> {
        self.by_threshold.iter().find(|r| r.2 > 0).or(self.by_threshold.first())
    }

    /// Largest scanned `M` that still has active points and whose `gamma` is
    /// within the tight band `[0.8, 1.25]` of the reference value: the end of
    /// the plateau on which the fit does not depend on `M`.
    pub fn plateau_threshold(&self) -> Option<f64> {
        let g0 = self.reference()?.1;
        self.by_threshold
            .iter()
            .filter(|r| r.2 > 0 && r.1 / g0 >= 0.8 && r.1 / g0 <= 1.25)
            .map(|r| r.0)
            .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))))
    }

    fn annotate(&self, mut r: BoundFitReport, tag: &str) -> BoundFitReport {
        for (m, g, n) in &self.by_threshold {
            r = r.with_detail(format!("{tag}gamma.M{m}"), *g).with_detail(format!("{tag}active.M{m}"), *n as f64);
        }
        r.with_detail(format!("{tag}points"), self.points as f64)
    }
}

/// Values of the odd `2L`-periodic extension of grid data shifted by `m`
/// grid steps: the sine series of `g` evaluated at `x + m h`.
pub(crate) fn odd_shift(g: &GridField, m: [i64; 2]) -> GridField {
    let (nx, ny) = g.shape();
    let fold = |i: i64, n: usize| -> (usize, f64) {
        let period = 2 * (n as i64 + 1);
        let p = (i + 1).rem_euclid(period);
        if p == 0 || p == n as i64 + 1 {
            (0, 0.0)
        } else if p <= n as i64 {
            (p as usize - 1, 1.0)
        } else {
            ((period - p) as usize - 1, -1.0)
        }
    };
    GridField::from_fn((nx, ny), |i, k| {
        let (a, sa) = fold(i as i64 + m[0], nx);
        let (b, sb) = fold(k as i64 + m[1], ny);
        sa * sb * g.get(a, b)
    })
}

fn fit_thresholds(
    domain: &Domain,
    f: &GridField,
    d: &DissipationField,
    ell: f64,
    sweep: &LowerBoundSweep,
    threshold_scale: impl Fn(f64) -> f64,
    first_term: impl Fn(f64, f64) -> f64,
) -> LowerBoundFit {
    let s = d.s();
    let fmax = f.max_abs();
    let mut mins: Vec<(f64, f64, usize)> = sweep.thresholds.iter().map(|&m| (m, f64::INFINITY, 0)).collect();
    let mut points = 0;
    for ((i, k), &fv) in f.values().indexed_iter() {
        let dist = domain.grid_distance(i, k);
        if dist < ell || fv.abs() < sweep.floor * fmax || fmax == 0.0 {
            continue;
        }
        points += 1;
        let dv = d.values().get(i, k);
        let second = fv * fv / dist.powf(s);
        let first = first_term(fv.abs(), dist);
        for slot in mins.iter_mut() {
            let active = fv.abs() >= slot.0 * threshold_scale(dist);
            let g = if active {
                slot.2 += 1;
                dv / (first + second)
            } else {
                dv / second
            };
            slot.1 = slot.1.min(g);
        }
    }
    LowerBoundFit { by_threshold: mins, points }
}

/// Fit of the finite-difference lower bound for `f = chi delta_h q`:
/// `D(f) >= gamma |h|^{-s} |f|^{2+s} / ||q||_inf^s + gamma f^2/d^s` where
/// `|f| >= M ||q||_inf |h| / d(x)`, and `D(f) >= gamma f^2/d^s` elsewhere, over
/// points with `d(x) >= ell`. `q(x + h)` is the sine series of `q` at the
/// shifted point, i.e. its odd reflection across the walls.
pub fn finite_difference_lower_bound(
    basis: &SineBasis,
    q: &SpectralField,
    h: [i64; 2],
    ell: f64,
    s: f64,
    sweep: &LowerBoundSweep,
) -> Result<LowerBoundFit> {
    check_s(s)?;
    if h == [0, 0] {
        return Err(Error::Displacement(h[0], h[1], "zero displacement".into()));
    }
    let domain = basis.domain();
    let chi = crate::cutoff::Cutoff::new(domain, ell)?;
    let qg = basis.from_spectral(q)?;
    let dq = odd_shift(&qg, h).zip_map(&qg, |a, b| a - b)?;
    let f = dq.zip_map(chi.field(), |a, c| a * c)?;
    let d = compute_d(basis, &f, s)?;
    let qmax = qg.max_abs();
    let hlen = (h[0] as f64 * domain.dx()).hypot(h[1] as f64 * domain.dy());
    Ok(fit_thresholds(
        domain,
        &f,
        &d,
        ell,
        sweep,
        |dist| qmax * hlen / dist,
        |fa, _| hlen.powf(-s) * fa.powf(2.0 + s) / qmax.powf(s),
    ))
}

/// Fit of the gradient lower bound for each component `f = chi d_i q`:
/// `D(f) >= gamma |f|^{2 + s/(1-alpha)} d^{s alpha/(1-alpha)} / N^{s/(1-alpha)}
/// + gamma f^2/d^s` where `|f| >= M ||q||_inf / d(x)`, with `N` the given
/// Hölder norm of `q`. Returns one fit per component.
pub fn gradient_lower_bound(
    basis: &SineBasis,
    q: &SpectralField,
    alpha: f64,
    holder_norm: f64,
    ell: f64,
    s: f64,
    sweep: &LowerBoundSweep,
) -> Result<[LowerBoundFit; 2]> {
    check_s(s)?;
    if !(alpha > 0.05 && alpha < 0.95) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0.05, 0.95), got {alpha}")));
    }
    if !(holder_norm.is_finite() && holder_norm >= 0.0) {
        return Err(Error::NonFinite("Hölder norm of q".into()));
    }
    let domain = basis.domain();
    let chi = crate::cutoff::Cutoff::new(domain, ell)?;
    let qmax = basis.from_spectral(q)?.max_abs();
    let (gx, gy) = basis.gradient(q)?;
    let e = s / (1.0 - alpha);
    let fit = |g: &GridField| -> Result<LowerBoundFit> {
        let f = g.zip_map(chi.field(), |a, c| a * c)?;
        let d = compute_d(basis, &f, s)?;
        Ok(fit_thresholds(
            domain,
            &f,
            &d,
            ell,
            sweep,
            |dist| qmax / dist,
            |fa, dist| fa.powf(2.0 + e) * dist.powf(alpha * e) / holder_norm.powf(e),
        ))
    };
    Ok([fit(&gx)?, fit(&gy)?])
}

fn fit_report(id: String, coarse: &LowerBoundFit, fine: &LowerBoundFit, sweep: String) -> BoundFitReport {
    let mut r = BoundFitReport::from_fits(id, BoundKind::Lower, coarse.gamma(), fine.gamma(), sweep, coarse.points + fine.points);
    if coarse.points == 0 && fine.points == 0 {
        // f vanishes: the inequality holds for every gamma
        r.stability = 1.0;
        r.verdict = crate::report::Verdict::Pass;
    }
    if let Some(m) = fine.plateau_threshold() {
        r = r.with_parameter(m);
    }
    let r = coarse.annotate(r, "coarse.");
    fine.annotate(r, "")
}

/// Finite-difference lower bound fitted on two grids of one rectangle, with
/// `h` the same number of grid steps on both. Adds the rescaling check
/// `q -> 2 q` (the fit must not move by more than 10%).
#[allow(clippy::too_many_arguments)]
pub fn finite_difference_lower_bound_report(
    coarse: &SineBasis,
    fine: &SineBasis,
    q: &SpectralField,
    h: [i64; 2],
    ell: f64,
    s: f64,
    sweep: &LowerBoundSweep,
) -> Result<BoundFitReport> {
    let qc = q.resized(coarse.shape());
    let fc = finite_difference_lower_bound(coarse, &qc, h, ell, s, sweep)?;
    let ff = finite_difference_lower_bound(fine, &q.resized(fine.shape()), h, ell, s, sweep)?;
    let doubled = finite_difference_lower_bound(coarse, &qc.scaled(2.0), h, ell, s, sweep)?;
    // a vanishing difference quotient has nothing to rescale
    let scaling = if fc.points == 0 { 1.0 } else { doubled.gamma() / fc.gamma() };
    let sweep_desc = format!("d(x) >= {ell}, h = {h:?} steps, n = {:?} and {:?}", coarse.shape(), fine.shape());
    Ok(fit_report(format!("nlb.h{}_{}.ell{ell}", h[0], h[1]), &fc, &ff, sweep_desc)
        .with_detail("scaling_ratio", scaling)
        .fail_if(!(1.0 / 1.1..=1.1).contains(&scaling)))
}

/// Gradient lower bound fitted on two grids, one report per component. The
/// Hölder norm of `q` is the weighted interior norm; the fit with the plain
/// (unweighted) Hölder norm is recorded in the details.
pub fn gradient_lower_bound_report(
    coarse: &SineBasis,
    fine: &SineBasis,
    q: &SpectralField,
    alpha: f64,
    ell: f64,
    s: f64,
    sweep: &LowerBoundSweep,
) -> Result<Vec<BoundFitReport>> {
    use crate::interior::{uniform_holder_seminorm, weighted_holder_seminorm};
    let mut per_grid = Vec::new();
    for b in [coarse, fine] {
        let qb = q.resized(b.shape());
        let g = b.from_spectral(&qb)?;
        let weighted = weighted_holder_seminorm(b.domain(), &g, alpha)?.norm;
        let uniform = uniform_holder_seminorm(b.domain(), &g, alpha)?.norm;
        let w = gradient_lower_bound(b, &qb, alpha, weighted, ell, s, sweep)?;
        let u = gradient_lower_bound(b, &qb, alpha, uniform, ell, s, sweep)?;
        per_grid.push((w, u, weighted, uniform));
    }
    let sweep_desc = format!("d(x) >= {ell}, alpha = {alpha}, n = {:?} and {:?}", coarse.shape(), fine.shape());
    let mut out = Vec::new();
    for (c, name) in ["x", "y"].iter().enumerate() {
        let (wc, uc, nc, _) = &per_grid[0];
        let (wf, uf, nf, unf) = &per_grid[1];
        let r = fit_report(format!("nlbd.{name}.ell{ell}"), &wc[c], &wf[c], sweep_desc.clone())
            .with_detail("holder_norm.coarse", *nc)
            .with_detail("holder_norm", *nf)
            .with_detail("uniform_holder_norm", *unf)
            .with_detail("uniform.gamma.coarse", uc[c].gamma())
            .with_detail("uniform.gamma", uf[c].gamma());
        out.push(r);
    }
    Ok(out)
}
