//! Closed forms on the half plane `{x2 > 0}`: the Dirichlet heat kernel, its
//! heat content `Theta`, `Lambda 1`, the normal-derivative cancellation, the
//! Riesz velocity of a compactly supported scalar and its boundary slip.
//!
//! Velocity convention: `u = grad^perp Lambda^{-1} theta` with the Dirichlet
//! stream function `psi = c int (1/|x - y| - 1/|x - y~|) theta(y) dy`,
//! `c = 1/(2 pi)` and `y~ = (y1, -y2)`. This gives
//!
//! ```text
//! u2(x)     = -c int (|x - y|^-3 - |x - y~|^-3) (x1 - y1) theta(y) dy
//! u1(x1, 0) = -c int 2 y2 ((x1 - y1)^2 + y2^2)^{-3/2} theta(y) dy
//! ```

use std::cell::Cell;
use std::f64::consts::PI;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::domain::GridField;
use crate::error::{Error, Result};
use crate::heat::gaussian;
use crate::quadrature::{adaptive, geometric_breaks, Tolerance};
use crate::report::{BoundFitReport, BoundKind, Extremum};

/// Magnitude of the velocity constant (the 2D Riesz normalization).
pub const VELOCITY_CONSTANT: f64 = 1.0 / (2.0 * PI);

/// A point of the closed half plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfSpacePoint {
    pub tangential: f64,
    pub normal: f64,
}

impl HalfSpacePoint {
    pub fn new(tangential: f64, normal: f64) -> Result<Self> {
        if !(normal >= 0.0) || !tangential.is_finite() || !normal.is_finite() {
            return Err(Error::OutsideDomain(tangential, normal));
        }
        Ok(Self { tangential, normal })
    }

    /// Mirror image across the boundary line.
    pub fn reflected(&self) -> [f64; 2] {
        [self.tangential, -self.normal]
    }

    pub fn on_boundary(&self) -> bool {
        self.normal == 0.0
    }
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("time must be positive, got {t}")))
    }
}

/// `G_t(x1 - y1) [G_t(x2 - y2) - G_t(x2 + y2)]`, with the bracket formed as
/// `G_t(x2 - y2) (1 - e^{-x2 y2 / t})` to keep relative accuracy.
pub fn hs_kernel(x: HalfSpacePoint, y: HalfSpacePoint, t: f64) -> Result<f64> {
    check_time(t)?;
    let p = x.normal * y.normal / t;
    Ok(gaussian(x.tangential - y.tangential, t) * gaussian(x.normal - y.normal, t) * -(-p).exp_m1())
}

/// `grad_x H / H`: the bracket of the closed-form gradient. Needs `x2 y2 > 0`.
pub fn hs_log_gradient_x(x: HalfSpacePoint, y: HalfSpacePoint, t: f64) -> Result<[f64; 2]> {
    check_time(t)?;
    let p = x.normal * y.normal / t;
    if p <= 0.0 {
        return Err(Error::InvalidParameter("log-gradient needs both points off the boundary".into()));
    }
    // e^{-p} / (1 - e^{-p}) = 1 / (e^p - 1)
    Ok([
        -(x.tangential - y.tangential) / (2.0 * t),
        -(x.normal - y.normal) / (2.0 * t) + y.normal / t / p.exp_m1(),
    ])
}

pub fn hs_kernel_grad_x(x: HalfSpacePoint, y: HalfSpacePoint, t: f64) -> Result<[f64; 2]> {
    let h = hs_kernel(x, y, t)?;
    if h == 0.0 {
        // y on the boundary: H = 0 and only the normal derivative survives
        let g = gaussian(x.tangential - y.tangential, t) * gaussian(x.normal, t);
        return Ok([0.0, g * x.normal * y.normal.max(0.0) / t]);
    }
    let l = hs_log_gradient_x(x, y, t)?;
    Ok([h * l[0], h * l[1]])
}

/// `(grad_x + grad_y) H`, summed from the two one-sided gradients (the
/// kernel is symmetric, so `grad_y H(x, y) = grad_x H(y, x)`).
pub fn hs_sum_gradient(x: HalfSpacePoint, y: HalfSpacePoint, t: f64) -> Result<[f64; 2]> {
    let a = hs_kernel_grad_x(x, y, t)?;
    let b = hs_kernel_grad_x(y, x, t)?;
    Ok([a[0] + b[0], a[1] + b[1]])
}

/// The normal component of `(grad_x + grad_y) H` in closed form:
/// `((x2 + y2)/t) G_t(x2 + y2) G_t(x1 - y1)`.
pub fn hs_sum_gradient_normal(x: HalfSpacePoint, y: HalfSpacePoint, t: f64) -> Result<f64> {
    check_time(t)?;
    let s = x.normal + y.normal;
    Ok(s / t * gaussian(s, t) * gaussian(x.tangential - y.tangential, t))
}

/// `Theta(x2, t) = erf(x2 / (2 sqrt t))`.
pub fn hs_theta(x_normal: f64, t: f64) -> Result<f64> {
    check_time(t)?;
    if !(x_normal >= 0.0) {
        return Err(Error::OutsideDomain(0.0, x_normal));
    }
    Ok(libm::erf(x_normal / (2.0 * t.sqrt())))
}

/// `Theta` by quadrature of `(2 pi)^{-1/2} int_{-a}^{a} e^{-xi^2/2} dxi`,
/// `a = x2 / sqrt(2t)`.
pub fn hs_theta_quadrature(x_normal: f64, t: f64) -> Result<f64> {
    check_time(t)?;
    let a = x_normal / (2.0 * t).sqrt();
    if a == 0.0 {
        return Ok(0.0);
    }
    let top = a.min(40.0);
    let breaks: Vec<f64> = (0..=8).map(|i| top * i as f64 / 8.0).collect();
    let tol = Tolerance {
        abs: 1e-16,
        rel: 1e-14,
        max_intervals: 2000,
    };
    let half = adaptive(|xi| (-0.5 * xi * xi).exp(), &breaks, tol)?.value;
    Ok(2.0 * half / (2.0 * PI).sqrt())
}

fn tight() -> Tolerance {
    Tolerance {
        abs: 1e-15,
        rel: 1e-12,
        max_intervals: 4000,
    }
}

/// `int_0^inf t^{-3/2} (1 - Theta(x2, t)) dt` by quadrature: on
/// `[t0, T]` directly in `t`, and beyond `T` in the variable `v = t^{-1/2}`,
/// where the integrand becomes `2 (1 - Theta)` on the finite range `(0, T^{-1/2}]`.
/// Below `t0` the integrand is under `e^{-900}`.
pub fn hs_lambda_one_raw(x_normal: f64) -> Result<f64> {
    if !(x_normal > 0.0 && x_normal.is_finite()) {
        return Err(Error::InvalidParameter(format!("Lambda 1 needs x2 > 0, got {x_normal}")));
    }
    let one_minus = |t: f64| libm::erfc(x_normal / (2.0 * t.sqrt()));
    let t0 = x_normal * x_normal / (4.0 * 30.0 * 30.0);
    let big = 100.0 * x_normal * x_normal;
    let near = adaptive(|t| t.powf(-1.5) * one_minus(t), &geometric_breaks(t0, big, 40), tight())?;
    let vmax = big.powf(-0.5);
    let far = adaptive(
        |v| if v > 0.0 { 2.0 * one_minus(v.powi(-2)) } else { 2.0 },
        &[0.0, 0.5 * vmax, vmax],
        tight(),
    )?;
    Ok(near.value + far.value)
}

/// Checks `x2 * raw Lambda 1 (x2) = 4/sqrt(pi)` at each sample height to
/// `1e-6` relative. The two fits are the smallest and largest product seen.
pub fn hs_lambda_one_check(heights: &[f64]) -> Result<BoundFitReport> {
    if heights.is_empty() {
        return Err(Error::EmptySweep("Lambda 1 heights".into()));
    }
    let exact = 4.0 / PI.sqrt();
    let mut hi = Extremum::new(BoundKind::Upper);
    let mut lo = Extremum::new(BoundKind::Lower);
    for &x in heights {
        let p = x * hs_lambda_one_raw(x)?;
        hi.push(p);
        lo.push(p);
    }
    let worst = ((hi.value() - exact) / exact).abs().max(((lo.value() - exact) / exact).abs());
    Ok(BoundFitReport::from_fits(
        "halfspace.lambda_one",
        BoundKind::Upper,
        lo.value(),
        hi.value(),
        format!("x2 in {heights:?}"),
        heights.len(),
    )
    .with_detail("closed_form", exact)
    .with_detail("relative_error", worst)
    .fail_if(!(worst <= 1e-6)))
}

/// `c_1` from `1 = c_1 int_0^inf (1 - e^{-tau}) tau^{-3/2} dtau`, by
/// quadrature in `v = sqrt(tau)` (integrand `2 (1 - e^{-v^2}) / v^2`), the
/// tail `v > V` in `w = 1/v` (integrand `2 (1 - e^{-1/w^2})`).
pub fn hs_c1() -> Result<f64> {
    let cap = 8.0;
    let core = adaptive(
        |v| if v > 0.0 { -2.0 * (-v * v).exp_m1() / (v * v) } else { 2.0 },
        &[0.0, 1.0, 2.0, 4.0, cap],
        tight(),
    )?;
    let tail = adaptive(
        |w| if w > 0.0 { -2.0 * (-1.0 / (w * w)).exp_m1() } else { 2.0 },
        &[0.0, 0.5 / cap, 1.0 / cap],
        tight(),
    )?;
    Ok(1.0 / (core.value + tail.value))
}

/// Normalized `Lambda 1 (x2) = c_1 * raw`, which is `2 / (pi x2)`.
pub fn hs_lambda_one(x_normal: f64) -> Result<f64> {
    Ok(hs_c1()? * hs_lambda_one_raw(x_normal)?)
}

/// Iterated adaptive integral over a rectangle; the first inner failure is
/// reported.
fn integrate_2d(f: impl Fn(f64, f64) -> f64, b1: &[f64], b2: &[f64], tol: Tolerance) -> Result<f64> {
    let failure: Cell<Option<Error>> = Cell::new(None);
    let outer = adaptive(
        |y2| match adaptive(|y1| f(y1, y2), b1, tol) {
            Ok(e) => e.value,
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        },
        b2,
        tol,
    )?;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(outer.value),
    }
}

/// Sorted breakpoints of `[a, b]` including the interior `extra` points.
fn breaks(a: f64, b: f64, extra: &[f64]) -> Vec<f64> {
    let mut v = vec![a, b];
    v.extend(extra.iter().copied().filter(|&e| e > a && e < b));
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// `int |(grad_x + grad_y) H(x, y, t)| dy` over the half plane by 2D
/// quadrature, using the closed-form normal component.
pub fn hs_cancellation_integral(x: HalfSpacePoint, t: f64) -> Result<f64> {
    check_time(t)?;
    let r = 14.0 * t.sqrt();
    let b1 = breaks(x.tangential - r, x.tangential + r, &[x.tangential]);
    let b2 = breaks(0.0, (r - x.normal).max(r), &[2.0 * t.sqrt(), 6.0 * t.sqrt()]);
    let tol = Tolerance {
        abs: 1e-300,
        rel: 1e-11,
        max_intervals: 2000,
    };
    integrate_2d(
        |y1, y2| {
            let y = HalfSpacePoint {
                tangential: y1,
                normal: y2,
            };
            hs_sum_gradient_normal(x, y, t).map_or(f64::NAN, f64::abs)
        },
        &b1,
        &b2,
        tol,
    )
}

/// Constant of `int |(grad_x + grad_y) H| dy = C t^{-1/2} e^{-x2^2/(4t)}`
/// from the closed inner integral `int_{x2/sqrt t}^inf xi e^{-xi^2/4} dxi = 2 e^{-x2^2/(4t)}`:
/// `C = 2 / sqrt(4 pi) = 1 / sqrt(pi)`.
pub fn hs_cancellation_constant() -> f64 {
    1.0 / PI.sqrt()
}

/// Fits `C` in the cancellation identity over `(x2, t)` samples, checks it
/// against the closed-form constant to `1e-8`, and checks that the
/// tangential component of `(grad_x + grad_y) H` is exactly zero on a
/// sample of `y`.
pub fn hs_cancellation_check(samples: &[(f64, f64)]) -> Result<BoundFitReport> {
    if samples.is_empty() {
        return Err(Error::EmptySweep("half-space cancellation".into()));
    }
    let c = hs_cancellation_constant();
    let mut hi = Extremum::new(BoundKind::Upper);
    let mut lo = Extremum::new(BoundKind::Lower);
    let mut tangential = 0.0_f64;
    let mut normal_mismatch = 0.0_f64;
    for &(xd, t) in samples {
        let x = HalfSpacePoint::new(0.3, xd)?;
        let v = hs_cancellation_integral(x, t)?;
        let ratio = v / (t.powf(-0.5) * (-xd * xd / (4.0 * t)).exp());
        hi.push(ratio);
        lo.push(ratio);
        for i in 0..7 {
            for k in 0..7 {
                let y = HalfSpacePoint::new(0.3 + (i as f64 - 3.0) * 0.4 * t.sqrt(), 0.05 + 0.5 * k as f64 * t.sqrt())?;
                let g = hs_sum_gradient(x, y, t)?;
                tangential = tangential.max(g[0].abs());
                let closed = hs_sum_gradient_normal(x, y, t)?;
                if closed > 1e-250 {
                    normal_mismatch = normal_mismatch.max((g[1] - closed).abs() / closed);
                }
            }
        }
    }
    let worst = ((hi.value() - c) / c).abs().max(((lo.value() - c) / c).abs());
    Ok(BoundFitReport::from_fits(
        "halfspace.cancellation",
        BoundKind::Upper,
        lo.value(),
        hi.value(),
        format!("{} (x2, t) samples", samples.len()),
        samples.len(),
    )
    .with_detail("closed_form", c)
    .with_detail("relative_error", worst)
    .with_detail("tangential_max", tangential)
    .with_detail("normal_component_mismatch", normal_mismatch)
    .fail_if(!(worst <= 1e-8) || tangential != 0.0 || !(normal_mismatch <= 1e-10)))
}

/// Fits `C` in `|grad_x H| / H <= C [t^{-1/2} (1 + |x - y|/sqrt t) + 1/x2]`
/// on two sample sets (the second twice as dense in each direction).
pub fn hs_gradient_ratio_check() -> Result<BoundFitReport> {
    let fit = |m: usize| -> Result<f64> {
        let mut best = Extremum::new(BoundKind::Upper);
        let xs = geometric_breaks(1e-3, 10.0, m);
        let ts = geometric_breaks(1e-4, 10.0, m);
        for &t in &ts {
            for &xd in &xs {
                for &yd in &xs {
                    for s in [0.0, 0.5, 2.0, 6.0] {
                        let x = HalfSpacePoint::new(0.0, xd)?;
                        let y = HalfSpacePoint::new(s * t.sqrt(), yd)?;
                        let l = hs_log_gradient_x(x, y, t)?;
                        let dist = (s * t.sqrt()).hypot(xd - yd);
                        let rhs = (1.0 + dist / t.sqrt()) / t.sqrt() + 1.0 / xd;
                        best.push(l[0].hypot(l[1]) / rhs);
                    }
                }
            }
        }
        Ok(best.value())
    };
    let (coarse, fine) = (fit(12)?, fit(24)?);
    Ok(BoundFitReport::from_fits(
        "halfspace.gradient_ratio",
        BoundKind::Upper,
        coarse,
        fine,
        "x2, y2 in [1e-3, 10], t in [1e-4, 10], |x1 - y1|/sqrt t in {0, 0.5, 2, 6}",
        4 * (13usize.pow(3) + 25usize.pow(3)),
    ))
}

/// A scalar on the half plane with compact support in a rectangle
/// `[a1, b1] x [a2, b2]`, `a2 > 0`.
pub struct CompactField<'a> {
    pub support: [[f64; 2]; 2],
    pub theta: &'a dyn Fn(f64, f64) -> f64,
}

impl CompactField<'_> {
    fn value(&self, y1: f64, y2: f64) -> f64 {
        let [[a1, b1], [a2, b2]] = self.support;
        if y1 < a1 || y1 > b1 || y2 < a2 || y2 > b2 {
            0.0
        } else {
            (self.theta)(y1, y2)
        }
    }

    /// `sup |theta|` and `int |theta|` by sampling and quadrature.
    fn norms(&self) -> Result<(f64, f64)> {
        let [[a1, b1], [a2, b2]] = self.support;
        let mut sup = 0.0_f64;
        for i in 0..=200 {
            for k in 0..=200 {
                let (y1, y2) = (a1 + (b1 - a1) * i as f64 / 200.0, a2 + (b2 - a2) * k as f64 / 200.0);
                sup = sup.max(self.value(y1, y2).abs());
            }
        }
        let l1 = integrate_2d(|y1, y2| self.value(y1, y2).abs(), &[a1, b1], &[a2, b2], loose())?;
        Ok((sup, l1))
    }

    /// Partial Hölder constant `sup |theta(y1 + h, y2) - theta(y1, y2)| / |h|^alpha`
    /// over a 160 x 160 sample of the support (with a margin of one support
    /// width in `y1`, so differences leaving the support count).
    pub fn partial_holder(&self, alpha: f64) -> f64 {
        let [[a1, b1], [a2, b2]] = self.support;
        let w = b1 - a1;
        let m = 160;
        let step = 3.0 * w / (3 * m) as f64;
        let row: Vec<f64> = (0..3 * m).map(|i| a1 - w + step * i as f64).collect();
        let mut best = 0.0_f64;
        for k in 0..=m {
            let y2 = a2 + (b2 - a2) * k as f64 / m as f64;
            let v: Vec<f64> = row.iter().map(|&y1| self.value(y1, y2)).collect();
            for i in 0..v.len() {
                for j in i + 1..v.len() {
                    let h = step * (j - i) as f64;
                    best = best.max((v[j] - v[i]).abs() / h.powf(alpha));
                }
            }
        }
        best
    }

    fn check(&self, strip: f64) -> Result<()> {
        let [[a1, b1], [a2, b2]] = self.support;
        if !(a1 < b1 && a2 < b2) {
            return Err(Error::InvalidParameter("empty support rectangle".into()));
        }
        if a2 <= strip {
            return Err(Error::InvalidParameter(format!(
                "support reaches the boundary strip x2 <= {strip}"
            )));
        }
        Ok(())
    }
}

fn loose() -> Tolerance {
    Tolerance {
        abs: 1e-14,
        rel: 1e-10,
        max_intervals: 4000,
    }
}

/// `u2` and the parts of its near/far decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct U2Split {
    pub value: f64,
    pub inner: f64,
    pub outer: f64,
    pub delta: f64,
    pub l: f64,
    pub alpha: f64,
    /// Measured partial Hölder constant of `theta` in `x1`.
    pub c1_alpha: f64,
    /// `c C_{1,alpha} 2 pi (sqrt 2 delta)^alpha / alpha`, which dominates `|inner|`.
    pub inner_bound: f64,
    /// `c (2 pi log(L/delta) ||theta||_inf + L^{-2} ||theta||_1)`, which dominates `|outer|`.
    pub outer_bound: f64,
}

/// Width of the boundary strip the support must avoid.
pub const SUPPORT_STRIP: f64 = 1e-3;

/// `u2(x)` from the inner/outer split at scale `delta` (`delta <= L`), with
/// the partial Hölder exponent `alpha` used for the inner envelope.
pub fn hs_velocity_u2(field: &CompactField, x: HalfSpacePoint, delta: f64, l: f64, alpha: f64) -> Result<U2Split> {
    field.check(SUPPORT_STRIP)?;
    if !(delta > 0.0 && delta <= l) {
        return Err(Error::InvalidParameter(format!("need 0 < delta <= L, got {delta}, {l}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let c = VELOCITY_CONSTANT;
    let (x1, x2) = (x.tangential, x.normal);
    let kernel = |y1: f64, y2: f64| {
        let s = x1 - y1;
        let r2 = s * s + (x2 - y2).powi(2);
        let m2 = s * s + (x2 + y2).powi(2);
        s * (r2.powf(-1.5) - m2.powf(-1.5))
    };
    // inner square, in polar coordinates about x: theta(y) - theta(x1, y2)
    // removes the odd principal part, and the Jacobian r cancels the
    // remaining 1/r
    let (lo1, hi1, lo2, hi2) = (x1 - delta, x1 + delta, x2 - delta, x2 + delta);
    let angles: Vec<f64> = (0..=8).map(|i| 0.25 * PI * i as f64).collect();
    let failure: Cell<Option<Error>> = Cell::new(None);
    let inner = adaptive(
        |phi| {
            let (cs, sn) = (phi.cos(), phi.sin());
            let reach = delta / cs.abs().max(sn.abs());
            let radial = |r: f64| {
                let (y1, y2) = (x1 + r * cs, x2 + r * sn);
                if y2 <= 0.0 {
                    return 0.0;
                }
                let image = ((x1 - y1).powi(2) + (x2 + y2).powi(2)).powf(-1.5);
                let residual = field.value(y1, y2) - field.value(x1, y2);
                // r * (x1 - y1) * (r^-3 - image)
                (-cs / r - r * (x1 - y1) * image) * residual
            };
            match adaptive(|r| if r > 0.0 { radial(r) } else { 0.0 }, &[0.0, 0.5 * reach, reach], loose()) {
                Ok(e) => e.value,
                Err(e) => {
                    failure.set(Some(e));
                    0.0
                }
            }
        },
        &angles,
        loose(),
    )?
    .value;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    // outer: the support rectangle minus the square, in up to nine tiles
    let [[a1, b1], [a2, b2]] = field.support;
    let cuts1 = breaks(a1, b1, &[lo1, hi1]);
    let cuts2 = breaks(a2, b2, &[lo2, hi2]);
    let mut outer = 0.0;
    for w1 in cuts1.windows(2) {
        for w2 in cuts2.windows(2) {
            let mid = (0.5 * (w1[0] + w1[1]), 0.5 * (w2[0] + w2[1]));
            if mid.0 > lo1 && mid.0 < hi1 && mid.1 > lo2 && mid.1 < hi2 {
                continue;
            }
            outer += integrate_2d(|y1, y2| kernel(y1, y2) * field.value(y1, y2), w1, w2, loose())?;
        }
    }
    let (sup, l1) = field.norms()?;
    let c1_alpha = field.partial_holder(alpha);
    Ok(U2Split {
        value: -c * (inner + outer),
        inner: -c * inner,
        outer: -c * outer,
        delta,
        l,
        alpha,
        c1_alpha,
        inner_bound: c * c1_alpha * 2.0 * PI * (2f64.sqrt() * delta).powf(alpha) / alpha,
        outer_bound: c * (2.0 * PI * (l / delta).ln() * sup + l1 / (l * l)),
    })
}

/// Tangential velocity on the boundary, `u1(x1, 0)`.
pub fn hs_boundary_slip(field: &CompactField, x1: f64) -> Result<f64> {
    field.check(SUPPORT_STRIP)?;
    let [[a1, b1], [a2, b2]] = field.support;
    let v = integrate_2d(
        |y1, y2| 2.0 * y2 * ((x1 - y1).powi(2) + y2 * y2).powf(-1.5) * field.value(y1, y2),
        &breaks(a1, b1, &[x1]),
        &[a2, 0.5 * (a2 + b2), b2],
        loose(),
    )?;
    Ok(-VELOCITY_CONSTANT * v)
}

/// Odd reflection across `x2 = 0` of a field sampled at `x2 = (k + 1) dy`,
/// `k = 0..n2`. The result has `2 n2 + 1` columns for `x2 = (k' - n2) dy`;
/// the middle column (the boundary) is zero.
pub fn odd_reflection(theta: &GridField) -> GridField {
    let (n1, n2) = theta.shape();
    let v = theta.values();
    GridField::new(Array2::from_shape_fn((n1, 2 * n2 + 1), |(i, k)| {
        if k < n2 {
            -v[[i, n2 - 1 - k]]
        } else if k == n2 {
            0.0
        } else {
            v[[i, k - n2 - 1]]
        }
    }))
}

/// The upper half (`x2 > 0`) of a reflected field.
pub fn upper_half(extended: &GridField) -> Result<GridField> {
    let (n1, m) = extended.shape();
    if m % 2 == 0 {
        return Err(Error::InvalidParameter("extended field needs an odd number of columns".into()));
    }
    let n2 = m / 2;
    let v = extended.values();
    Ok(GridField::new(Array2::from_shape_fn((n1, n2), |(i, k)| v[[i, n2 + 1 + k]])))
}
