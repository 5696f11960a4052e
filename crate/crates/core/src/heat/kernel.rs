//! Dirichlet heat kernels of an interval and of a rectangle.
//!
//! On `(0, l)` the kernel has two exact representations:
//!
//! * the eigenseries `(2/l) sum_j exp(-t (j pi/l)^2) sin(j pi x/l) sin(j pi y/l)`,
//! * the image sum `sum_m [G_t(x - y - 2lm) - G_t(x + y - 2lm)]` with the
//!   free Gaussian `G_t(z) = (4 pi t)^{-1/2} exp(-z^2/(4t))`.
//!
//! The eigenseries converges fast for large `t`, the image sum for small `t`.
//! The rectangle kernel is the product of the two interval kernels.
//!
//! Bound sweeps need kernel values far below the smallest double, so the
//! image sum is also available in factored form ([`Jet`]): a log-scale times
//! an O(1) mantissa in which every image term is a ratio `<= 1`.

use std::f64::consts::PI;

use libm::{erf, erfc};

use crate::domain::Domain;
use crate::error::{Error, Result};

/// `ln(1e16)`: eigenseries are truncated where `exp(-t lambda) <= 1e-16`.
const TAIL_LOG: f64 = 36.841_361_487_904_734;

/// Number of images on each side used by the image sums. With `t <= l^2`
/// the first neglected image is damped by at least `exp(-64)`.
pub const IMAGES: i32 = 8;

/// Default eigenseries mode budget.
pub const DEFAULT_MODE_BUDGET: usize = 4096;

/// The free one-dimensional Gaussian `G_t(z)`.
pub fn gaussian(z: f64, t: f64) -> f64 {
    (-z * z / (4.0 * t)).exp() / (4.0 * PI * t).sqrt()
}

/// `int_a^b G_t(x - u) du`, evaluated without cancellation in the tails.
pub fn gaussian_mass(x: f64, a: f64, b: f64, t: f64) -> f64 {
    let s = 2.0 * t.sqrt();
    if x - b >= 0.0 {
        0.5 * (erfc((x - b) / s) - erfc((x - a) / s))
    } else if x - a <= 0.0 {
        0.5 * (erfc((a - x) / s) - erfc((b - x) / s))
    } else {
        0.5 * (erf((x - a) / s) + erf((b - x) / s))
    }
}

/// Kernel value and first two `x`-derivatives as `exp(log_scale) * (p, dp, d2p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub log_scale: f64,
    pub p: f64,
    pub dp: f64,
    pub d2p: f64,
}

impl Jet {
    /// `ln p(x, y, t)`; `-inf` if the mantissa is not positive.
    pub fn ln_value(&self) -> f64 {
        if self.p > 0.0 {
            self.log_scale + self.p.ln()
        } else {
            f64::NEG_INFINITY
        }
    }

    pub fn value(&self) -> f64 {
        self.p * self.log_scale.exp()
    }

    pub fn dx(&self) -> f64 {
        self.dp * self.log_scale.exp()
    }

    pub fn dxx(&self) -> f64 {
        self.d2p * self.log_scale.exp()
    }

    /// `d/dx ln p`.
    pub fn log_derivative(&self) -> f64 {
        self.dp / self.p
    }
}

/// The translation-defect part `A = (d/dx + d/dy) p` and `dA/dx`, scaled by
/// `exp(delta^2/(4t))` where `delta = min(x, l - x)`; `log_scale` undoes it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefectJet {
    pub log_scale: f64,
    pub a: f64,
    pub da: f64,
}

/// Heat kernel of the interval `(0, l)`.
#[derive(Debug, Clone, Copy)]
pub struct IntervalKernel {
    l: f64,
    mode_budget: usize,
}

fn check_time(t: f64) -> Result<()> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    Ok(())
}

impl IntervalKernel {
    pub fn new(l: f64, mode_budget: usize) -> Self {
        Self { l, mode_budget }
    }

    pub fn length(&self) -> f64 {
        self.l
    }

    /// Modes needed so the first dropped term is below `1e-16`.
    pub fn required_modes(&self, t: f64) -> usize {
        if t <= 0.0 {
            return usize::MAX;
        }
        ((self.l / PI) * (TAIL_LOG / t).sqrt()).ceil().max(1.0) as usize
    }

    fn budget_for(&self, t: f64) -> Result<usize> {
        check_time(t)?;
        let required = self.required_modes(t);
        if required > self.mode_budget {
            return Err(Error::Unresolved {
                t,
                required,
                available: self.mode_budget,
            });
        }
        Ok(required)
    }

    fn wavenumber(&self, j: usize) -> f64 {
        j as f64 * PI / self.l
    }

    /// Eigenseries value; refuses `t` below the resolvable threshold.
    pub fn eigen(&self, x: f64, y: f64, t: f64) -> Result<f64> {
        let modes = self.budget_for(t)?;
        let s: f64 = (1..=modes)
            .map(|j| {
                let k = self.wavenumber(j);
                (-t * k * k).exp() * (k * x).sin() * (k * y).sin()
            })
            .sum();
        Ok(2.0 / self.l * s)
    }

    /// Termwise `x`-derivative of the eigenseries.
    pub fn eigen_dx(&self, x: f64, y: f64, t: f64) -> Result<f64> {
        let modes = self.budget_for(t)?;
        let s: f64 = (1..=modes)
            .map(|j| {
                let k = self.wavenumber(j);
                (-t * k * k).exp() * k * (k * x).cos() * (k * y).sin()
            })
            .sum();
        Ok(2.0 / self.l * s)
    }

    /// Plain image sum with `|m| <= IMAGES`.
    pub fn image(&self, x: f64, y: f64, t: f64) -> f64 {
        (-IMAGES..=IMAGES)
            .map(|m| {
                let shift = 2.0 * self.l * m as f64;
                gaussian(x - y - shift, t) - gaussian(x + y - shift, t)
            })
            .sum()
    }

    /// Factored image sum with derivatives.
    ///
    /// The pair is first reflected so that `x + y <= l`; then the dominant
    /// cancellation `G(x - y) - G(x + y)` is evaluated as `-expm1(-xy/t)`.
    pub fn jet(&self, x: f64, y: f64, t: f64) -> Jet {
        let flip = x + y > self.l;
        let (x, y) = if flip { (self.l - x, self.l - y) } else { (x, y) };
        let l = self.l;
        let d = x - y;
        let mut p = -(-x * y / t).exp_m1();
        let w0 = x + y;
        let q0 = (-x * y / t).exp();
        let mut dp = -d / (2.0 * t) + w0 / (2.0 * t) * q0;
        let inv4t2 = 1.0 / (4.0 * t * t);
        let half_t = 0.5 / t;
        let mut d2p = (d * d * inv4t2 - half_t) - (w0 * w0 * inv4t2 - half_t) * q0;
        for m in (-IMAGES..=IMAGES).filter(|&m| m != 0) {
            let lm = l * m as f64;
            let z = d - 2.0 * lm;
            let w = x + y - 2.0 * lm;
            let r = (-lm * (lm - d) / t).exp();
            let q = (-(y - lm) * (x - lm) / t).exp();
            p += r - q;
            dp += -z / (2.0 * t) * r + w / (2.0 * t) * q;
            d2p += (z * z * inv4t2 - half_t) * r - (w * w * inv4t2 - half_t) * q;
        }
        Jet {
            log_scale: -d * d / (4.0 * t) - 0.5 * (4.0 * PI * t).ln(),
            p,
            dp: if flip { -dp } else { dp },
            d2p,
        }
    }

    /// Kernel value from the factored image sum.
    pub fn value(&self, x: f64, y: f64, t: f64) -> f64 {
        self.jet(x, y, t).value()
    }

    /// `(d/dx + d/dy) p` and its `x`-derivative. Only the reflected images
    /// survive, since `G_t(x - y - 2lm)` is translation invariant.
    pub fn defect(&self, x: f64, y: f64, t: f64) -> DefectJet {
        let delta = x.min(self.l - x);
        let mut a = 0.0;
        let mut da = 0.0;
        for m in -IMAGES..=IMAGES {
            let w = x + y - 2.0 * self.l * m as f64;
            let g = (-(w * w - delta * delta) / (4.0 * t)).exp();
            a += w / t * g;
            da += (1.0 / t - w * w / (2.0 * t * t)) * g;
        }
        DefectJet {
            log_scale: -delta * delta / (4.0 * t) - 0.5 * (4.0 * PI * t).ln(),
            a,
            da,
        }
    }

    /// `1 - theta(x, t)`, where `theta` solves the heat equation from 1.
    ///
    /// For `t <= l^2` this is twice the Gaussian mass of the negative
    /// half-periods of the odd periodic extension of 1; otherwise the
    /// eigenseries over odd modes.
    pub fn one_minus_theta(&self, x: f64, t: f64) -> f64 {
        if t <= self.l * self.l {
            let l = self.l;
            2.0 * (-IMAGES..=IMAGES)
                .map(|m| {
                    let b = 2.0 * l * m as f64;
                    gaussian_mass(x, b - l, b, t)
                })
                .sum::<f64>()
        } else {
            1.0 - self.theta_series(x, t, usize::MAX)
        }
    }

    pub fn theta(&self, x: f64, t: f64) -> f64 {
        if t <= self.l * self.l {
            1.0 - self.one_minus_theta(x, t)
        } else {
            self.theta_series(x, t, usize::MAX)
        }
    }

    fn theta_series(&self, x: f64, t: f64, cap: usize) -> f64 {
        let modes = self.required_modes(t).min(cap);
        (1..=modes)
            .step_by(2)
            .map(|j| {
                let k = self.wavenumber(j);
                4.0 / (j as f64 * PI) * (-t * k * k).exp() * (k * x).sin()
            })
            .sum()
    }

    /// `theta` from the eigenseries of the sine expansion of 1.
    pub fn theta_eigen(&self, x: f64, t: f64) -> Result<f64> {
        let modes = self.budget_for(t)?;
        Ok(self.theta_series(x, t, modes))
    }
}

/// Heat kernel of a rectangle as the product of two interval kernels.
#[derive(Debug, Clone, Copy)]
pub struct HeatKernel {
    kx: IntervalKernel,
    ky: IntervalKernel,
}

impl HeatKernel {
    pub fn new(domain: &Domain) -> Self {
        Self::with_budget(domain, DEFAULT_MODE_BUDGET)
    }

    pub fn with_budget(domain: &Domain, mode_budget: usize) -> Self {
        Self {
            kx: IntervalKernel::new(domain.lx(), mode_budget),
            ky: IntervalKernel::new(domain.ly(), mode_budget),
        }
    }

    pub fn axis(&self, i: usize) -> &IntervalKernel {
        if i == 0 {
            &self.kx
        } else {
            &self.ky
        }
    }

    /// `H_D(x, y, t)` by the eigenseries, refusing unresolvable `t`.
    pub fn kernel_point(&self, x: [f64; 2], y: [f64; 2], t: f64) -> Result<f64> {
        Ok(self.kx.eigen(x[0], y[0], t)? * self.ky.eigen(x[1], y[1], t)?)
    }

    /// `nabla_x H_D` by the differentiated eigenseries.
    pub fn kernel_grad_x(&self, x: [f64; 2], y: [f64; 2], t: f64) -> Result<[f64; 2]> {
        let (p1, p2) = (self.kx.eigen(x[0], y[0], t)?, self.ky.eigen(x[1], y[1], t)?);
        Ok([
            self.kx.eigen_dx(x[0], y[0], t)? * p2,
            p1 * self.ky.eigen_dx(x[1], y[1], t)?,
        ])
    }

    /// `H_D` from the image sums; valid for `0 < t <= min(lx, ly)^2`.
    pub fn kernel_image(&self, x: [f64; 2], y: [f64; 2], t: f64) -> f64 {
        self.kx.image(x[0], y[0], t) * self.ky.image(x[1], y[1], t)
    }

    /// `ln H_D` from the factored image sums.
    pub fn ln_kernel(&self, x: [f64; 2], y: [f64; 2], t: f64) -> f64 {
        self.kx.jet(x[0], y[0], t).ln_value() + self.ky.jet(x[1], y[1], t).ln_value()
    }

    pub fn theta(&self, x: [f64; 2], t: f64) -> f64 {
        self.kx.theta(x[0], t) * self.ky.theta(x[1], t)
    }

    /// `1 - Theta`, accurate when `Theta` is close to 1.
    pub fn one_minus_theta(&self, x: [f64; 2], t: f64) -> f64 {
        let a = self.kx.one_minus_theta(x[0], t);
        let b = self.ky.one_minus_theta(x[1], t);
        a + b - a * b
    }

    pub fn theta_eigen(&self, x: [f64; 2], t: f64) -> Result<f64> {
        Ok(self.kx.theta_eigen(x[0], t)? * self.ky.theta_eigen(x[1], t)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_and_image_agree_on_the_interval() {
        let k = IntervalKernel::new(PI, DEFAULT_MODE_BUDGET);
        for t in [1e-3, 1e-2, 0.1, 1.0] {
            for (x, y) in [(1.0, 1.5), (0.05, 3.0), (2.0, 2.0), (0.3, 0.01)] {
                let e = k.eigen(x, y, t).unwrap();
                let i = k.image(x, y, t);
                let j = k.value(x, y, t);
                assert!((e - i).abs() < 1e-10, "t={t} x={x} y={y}: {e} vs {i}");
                assert!((j - i).abs() < 1e-12 * (1.0 + i.abs()));
            }
        }
    }

    #[test]
    fn refuses_small_times() {
        let k = IntervalKernel::new(PI, 64);
        match k.eigen(1.0, 1.0, 1e-4) {
            Err(Error::Unresolved { required, available, .. }) => {
                assert_eq!(available, 64);
                assert!(required > 64);
            }
            other => panic!("expected refusal, got {other:?}"),
        }
        assert!(matches!(k.eigen(1.0, 1.0, -1.0), Err(Error::NegativeTime(_))));
    }

    #[test]
    fn jet_derivatives_match_finite_differences() {
        let k = IntervalKernel::new(2.0, DEFAULT_MODE_BUDGET);
        let h = 1e-5;
        for (x, y, t) in [(0.3, 0.7, 0.05), (1.9, 1.2, 0.2), (1.0, 1.0, 0.5), (1.5, 0.4, 1.0)] {
            let jet = k.jet(x, y, t);
            let fd1 = (k.image(x + h, y, t) - k.image(x - h, y, t)) / (2.0 * h);
            let fd2 = (k.image(x + h, y, t) - 2.0 * k.image(x, y, t) + k.image(x - h, y, t)) / (h * h);
            assert!((jet.dx() - fd1).abs() < 1e-6 * (1.0 + fd1.abs()), "{} {fd1}", jet.dx());
            assert!((jet.dxx() - fd2).abs() < 1e-3 * (1.0 + fd2.abs()), "{} {fd2}", jet.dxx());
            let ed = k.eigen_dx(x, y, t).unwrap();
            assert!((jet.dx() - ed).abs() < 1e-9 * (1.0 + ed.abs()));
        }
    }

    #[test]
    fn defect_matches_direct_derivative() {
        let k = IntervalKernel::new(PI, DEFAULT_MODE_BUDGET);
        let h = 1e-5;
        let (x, y, t) = (0.8, 0.5, 0.03);
        let p = |x: f64, y: f64| k.image(x, y, t);
        let fd = (p(x + h, y + h) - p(x - h, y - h)) / (2.0 * h);
        let d = k.defect(x, y, t);
        assert!((d.a * d.log_scale.exp() - fd).abs() < 1e-6 * (1.0 + fd.abs()));
    }

    #[test]
    fn theta_image_and_eigen_agree() {
        let k = IntervalKernel::new(PI, DEFAULT_MODE_BUDGET);
        for t in [1e-3, 0.1, 1.0, 5.0, 12.0] {
            for x in [0.01, 0.5, PI / 2.0, 3.0] {
                let a = k.theta(x, t);
                let b = k.theta_eigen(x, t).unwrap();
                assert!((a - b).abs() < 1e-12, "t={t} x={x}: {a} {b}");
            }
        }
    }

    #[test]
    fn rectangle_kernel_is_separable_and_symmetric() {
        let d = Domain::new(PI, 2.0, 8, 8).unwrap();
        let h = HeatKernel::new(&d);
        let (x, y, t) = ([0.4, 1.1], [2.5, 0.3], 0.2);
        let full = h.kernel_point(x, y, t).unwrap();
        let swapped = h.kernel_point(y, x, t).unwrap();
        assert!((full - swapped).abs() < 1e-12);
        let prod = h.axis(0).eigen(x[0], y[0], t).unwrap() * h.axis(1).eigen(x[1], y[1], t).unwrap();
        assert!((full - prod).abs() < 1e-12);
        assert!((h.ln_kernel(x, y, t).exp() - full).abs() < 1e-12);
        assert!(h.kernel_point(x, [0.0, 1.0], t).unwrap().abs() < 1e-14);
    }
}
