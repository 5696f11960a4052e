//! Good cutoffs on a rectangle: smooth functions that vanish within `ell/4`
//! of the boundary and equal one beyond `ell/2`.
//!
//! On a rectangle the cutoff is a product of one-dimensional wall profiles,
//! `chi(y) = prod_i S(y_i/ell) S((L_i - y_i)/ell)`, with `S` the quintic
//! smoothstep moved to `[1/4, 1/2]`. Because each factor is `C^2`, so is the
//! product; `S(d(y)/ell)` itself would have a crease along the diagonals of
//! the corners, where the distance function is only Lipschitz.

use crate::domain::{Domain, GridField};
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::report::{BoundFitReport, BoundKind, Extremum};

const LOWER: f64 = 0.25;
const UPPER: f64 = 0.5;

/// Quintic smoothstep on `[1/4, 1/2]` and its first two derivatives.
pub fn smoothstep(u: f64) -> [f64; 3] {
    let w = 1.0 / (UPPER - LOWER);
    let v = (u - LOWER) * w;
    if v <= 0.0 {
        return [0.0, 0.0, 0.0];
    }
    if v >= 1.0 {
        return [1.0, 0.0, 0.0];
    }
    let s = v * v * v * (10.0 + v * (-15.0 + 6.0 * v));
    let ds = 30.0 * v * v * (1.0 - v) * (1.0 - v) * w;
    let d2s = 60.0 * v * (1.0 - v) * (1.0 - 2.0 * v) * w * w;
    [s, ds, d2s]
}

#[derive(Debug, Clone)]
pub struct Cutoff {
    domain: Domain,
    ell: f64,
    chi: GridField,
    grad: (GridField, GridField),
}

impl Cutoff {
    /// Builds the cutoff at scale `ell` on the grid of `domain`.
    ///
    /// `ell` must not exceed `min(L1, L2)/4` and must span at least four grid
    /// spacings so the transition band is resolved.
    pub fn new(domain: &Domain, ell: f64) -> Result<Self> {
        if !(ell > 0.0 && ell.is_finite()) {
            return Err(Error::CutoffScale {
                ell,
                reason: "scale must be positive".into(),
            });
        }
        if ell > domain.ell_max() * (1.0 + 1e-12) {
            return Err(Error::CutoffScale {
                ell,
                reason: format!("exceeds min(L1, L2)/4 = {}", domain.ell_max()),
            });
        }
        let h = domain.dx().max(domain.dy());
        if ell < 4.0 * h {
            return Err(Error::CutoffScale {
                ell,
                reason: format!("under-resolved: fewer than 4 grid spacings ({h})"),
            });
        }
        Ok(Self::unchecked(domain, ell))
    }

    fn unchecked(domain: &Domain, ell: f64) -> Self {
        let mut c = Self {
            domain: *domain,
            ell,
            chi: GridField::zeros(domain.shape()),
            grad: (GridField::zeros(domain.shape()), GridField::zeros(domain.shape())),
        };
        c.chi = domain.sample(|x, y| c.value([x, y]));
        c.grad = (
            domain.sample(|x, y| c.gradient([x, y])[0]),
            domain.sample(|x, y| c.gradient([x, y])[1]),
        );
        c
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// Grid values of `chi`.
    pub fn field(&self) -> &GridField {
        &self.chi
    }

    /// Grid values of `grad chi`.
    pub fn gradient_field(&self) -> &(GridField, GridField) {
        &self.grad
    }

    /// Wall profile along one axis: value, first and second derivative.
    fn axis(&self, y: f64, l: f64) -> [f64; 3] {
        let a = smoothstep(y / self.ell);
        let b = smoothstep((l - y) / self.ell);
        let inv = 1.0 / self.ell;
        [
            a[0] * b[0],
            inv * (a[1] * b[0] - a[0] * b[1]),
            inv * inv * (a[2] * b[0] - 2.0 * a[1] * b[1] + a[0] * b[2]),
        ]
    }

    pub fn value(&self, p: [f64; 2]) -> f64 {
        self.axis(p[0], self.domain.lx())[0] * self.axis(p[1], self.domain.ly())[0]
    }

    pub fn gradient(&self, p: [f64; 2]) -> [f64; 2] {
        let a = self.axis(p[0], self.domain.lx());
        let b = self.axis(p[1], self.domain.ly());
        [a[1] * b[0], a[0] * b[1]]
    }

    pub fn hessian(&self, p: [f64; 2]) -> [[f64; 2]; 2] {
        let a = self.axis(p[0], self.domain.lx());
        let b = self.axis(p[1], self.domain.ly());
        let off = a[1] * b[1];
        [[a[2] * b[0], off], [off, a[0] * b[2]]]
    }

    /// Quadrature nodes per axis: fine panels in the two wall bands
    /// `[0, ell/2]` and `[L - ell/2, L]`, panels of width `ell/4` between.
    fn axis_nodes(&self, l: f64, rule: &GaussLegendre) -> Vec<(f64, f64, bool)> {
        let half = 0.5 * self.ell;
        let mut out = Vec::new();
        let mut push = |a: f64, b: f64, band: bool| {
            for (x, w) in rule.mapped(a, b) {
                out.push((x, w, band));
            }
        };
        for i in 0..4 {
            push(half * i as f64 / 4.0, half * (i + 1) as f64 / 4.0, true);
        }
        let n = ((l - 2.0 * half) / (0.25 * self.ell)).ceil().max(1.0) as usize;
        for i in 0..n {
            let a = half + (l - 2.0 * half) * i as f64 / n as f64;
            let b = half + (l - 2.0 * half) * (i + 1) as f64 / n as f64;
            push(a, b, false);
        }
        for i in 0..4 {
            push(l - half + half * i as f64 / 4.0, l - half + half * (i + 1) as f64 / 4.0, true);
        }
        out
    }

    /// `int (1 - chi(y)) |x - y|^{-(2 + j)} dy` and
    /// `int |grad chi(y)| |x - y|^{-(2 - alpha)} dy` for a point with
    /// `d(x) >= ell`, where both integrands are smooth.
    pub fn kernel_integrals(&self, x: [f64; 2], js: &[f64], alphas: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let d = self.domain.distance_to_boundary(x)?;
        if d < self.ell * (1.0 - 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "kernel integrals need d(x) >= ell (d = {d}, ell = {})",
                self.ell
            )));
        }
        let rule = GaussLegendre::new(12);
        let nx = self.axis_nodes(self.domain.lx(), &rule);
        let ny = self.axis_nodes(self.domain.ly(), &rule);
        let mut outer = vec![0.0; js.len()];
        let mut grad = vec![0.0; alphas.len()];
        for &(y1, w1, b1) in &nx {
            for &(y2, w2, b2) in &ny {
                if !(b1 || b2) {
                    continue;
                }
                let y = [y1, y2];
                let w = w1 * w2;
                let r = (x[0] - y1).hypot(x[1] - y2);
                let lr = r.ln();
                let one_minus = 1.0 - self.value(y);
                if one_minus > 0.0 {
                    for (acc, &j) in outer.iter_mut().zip(js) {
                        *acc += w * one_minus * (-(2.0 + j) * lr).exp();
                    }
                }
                let g = self.gradient(y);
                let gn = g[0].hypot(g[1]);
                if gn > 0.0 {
                    for (acc, &a) in grad.iter_mut().zip(alphas) {
                        *acc += w * gn * (-(2.0 - a) * lr).exp();
                    }
                }
            }
        }
        Ok((outer, grad))
    }
}

/// Points with `d(x) >= ell` used by the kernel-integral checks: a geometric
/// ladder of distances along the mid-line of the `x` wall and along the
/// diagonal of the lower-left corner.
fn probe_points(domain: &Domain, ell: f64) -> Vec<[f64; 2]> {
    let dmax = 0.5 * domain.min_side();
    let mut out = Vec::new();
    let mut d = ell;
    while d <= dmax * (1.0 + 1e-12) {
        out.push([d, 0.5 * domain.ly()]);
        out.push([d, d]);
        d *= 1.5;
    }
    out.push([0.5 * domain.lx(), 0.5 * domain.ly()]);
    out
}

/// Fits of the cutoff bounds over a list of scales. The fitted constants at
/// the largest and smallest scale play the roles of coarse and fine fits.
///
/// The integral bounds are uniform in `ell` for `j > -1` and `alpha < 1`;
/// at `j = -1` or `alpha = 1` the constant grows like `ln(1/ell)` and beyond
/// that like a power of `1/ell`.
///
/// Reports: `cutoff.grad` (`max |grad chi| ell`), `cutoff.hessian`
/// (`max |D^2 chi| ell^2`), both measured by central finite differences of
/// `chi`; `chij.j{j}` for each `j`; `nachij.alpha{alpha}` for each `alpha`.
pub fn verify_cutoff_bounds(domain: &Domain, ells: &[f64], js: &[f64], alphas: &[f64]) -> Result<Vec<BoundFitReport>> {
    if ells.len() < 2 {
        return Err(Error::EmptySweep("at least two cutoff scales are needed".into()));
    }
    let mut ells = ells.to_vec();
    ells.sort_by(|a, b| b.total_cmp(a));
    let mut grad = Vec::new();
    let mut hess = Vec::new();
    let mut outer = vec![Vec::new(); js.len()];
    let mut inner = vec![Vec::new(); alphas.len()];
    let mut size = 0;
    for &ell in &ells {
        let c = Cutoff::new(domain, ell)?;
        let (g, h) = finite_difference_maxima(&c);
        grad.push(g * ell);
        hess.push(h * ell * ell);
        let mut ext_j: Vec<Extremum> = js.iter().map(|_| Extremum::new(BoundKind::Upper)).collect();
        let mut ext_a: Vec<Extremum> = alphas.iter().map(|_| Extremum::new(BoundKind::Upper)).collect();
        let points = probe_points(domain, ell);
        size = size.max(points.len());
        for x in points {
            let d = domain.distance_to_boundary(x)?;
            let (oi, gi) = c.kernel_integrals(x, js, alphas)?;
            for ((e, v), &j) in ext_j.iter_mut().zip(oi).zip(js) {
                e.push(v * d.powf(j));
            }
            for ((e, v), &a) in ext_a.iter_mut().zip(gi).zip(alphas) {
                e.push(v * d.powf(1.0 - a));
            }
        }
        for (acc, e) in outer.iter_mut().zip(ext_j) {
            acc.push(e.value());
        }
        for (acc, e) in inner.iter_mut().zip(ext_a) {
            acc.push(e.value());
        }
    }
    let sweep = format!("ell in {ells:?}");
    let build = |id: String, values: &[f64], n: usize| {
        let mut r = BoundFitReport::from_fits(id, BoundKind::Upper, values[0], values[values.len() - 1], sweep.clone(), n);
        for (ell, v) in ells.iter().zip(values) {
            r = r.with_detail(format!("ell={ell}"), *v);
        }
        r
    };
    let mut out = vec![
        build("cutoff.grad".into(), &grad, ells.len()),
        build("cutoff.hessian".into(), &hess, ells.len()),
    ];
    for (j, v) in js.iter().zip(&outer) {
        out.push(build(format!("chij.j{j}"), v, size).with_parameter(*j));
    }
    for (a, v) in alphas.iter().zip(&inner) {
        out.push(build(format!("nachij.alpha{a}"), v, size).with_parameter(*a));
    }
    Ok(out)
}

/// Maxima of `|grad chi|` and of the Frobenius norm of the Hessian, by
/// central differences of `chi` over the corner square `[0, ell]^2` (all
/// other wall regions are copies of its slices).
fn finite_difference_maxima(c: &Cutoff) -> (f64, f64) {
    let ell = c.ell();
    let eta = ell * 1e-4;
    let n = 128;
    let mut g: f64 = 0.0;
    let mut h: f64 = 0.0;
    for i in 0..=n {
        for k in 0..=n {
            let p = [ell * (0.2 + 0.4 * i as f64 / n as f64), ell * (0.2 + 0.4 * k as f64 / n as f64)];
            let f = |dx: f64, dy: f64| c.value([p[0] + dx, p[1] + dy]);
            let gx = (f(eta, 0.0) - f(-eta, 0.0)) / (2.0 * eta);
            let gy = (f(0.0, eta) - f(0.0, -eta)) / (2.0 * eta);
            let e2 = eta * eta;
            let hxx = (f(eta, 0.0) - 2.0 * f(0.0, 0.0) + f(-eta, 0.0)) / e2;
            let hyy = (f(0.0, eta) - 2.0 * f(0.0, 0.0) + f(0.0, -eta)) / e2;
            let hxy = (f(eta, eta) - f(eta, -eta) - f(-eta, eta) + f(-eta, -eta)) / (4.0 * e2);
            g = g.max(gx.hypot(gy));
            h = h.max((hxx * hxx + hyy * hyy + 2.0 * hxy * hxy).sqrt());
        }
    }
    (g, h)
}
