//! The Dirichlet heat semigroup, its kernel, and the quantities built from it.

mod bounds;
mod intpk;
mod kernel;

pub use bounds::{
    verify_cancellation_bounds, verify_gradient_bounds, verify_kernel_gaussian_bounds, verify_theta_bounds,
    HeatSweep,
};
pub use intpk::{exp_integral_e1, intpk_closed_form, intpk_quadrature, verify_intpk};
pub use kernel::{gaussian, gaussian_mass, DefectJet, HeatKernel, IntervalKernel, Jet, DEFAULT_MODE_BUDGET, IMAGES};

use statrs::function::gamma::gamma;

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::quadrature::{adaptive, geometric_breaks, Tolerance};
use crate::spectral::{SpectralField, Spectrum};

/// `e^{t Delta} f`: multiplies coefficient `jk` by `exp(-t lambda_jk)`.
pub fn heat_evolve(spectrum: &Spectrum, f: &SpectralField, t: f64) -> Result<SpectralField> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    crate::domain::check_shape(spectrum.eigenvalues().dim(), f.shape())?;
    let mut c = f.coeffs().clone();
    c.zip_mut_with(spectrum.eigenvalues(), |a, &l| *a *= (-t * l).exp());
    Ok(SpectralField::new(c))
}

/// `c_s` with `lambda^{s/2} = c_s int_0^inf (1 - e^{-t lambda}) t^{-1-s/2} dt`,
/// i.e. `(s/2) / Gamma(1 - s/2)`, for `0 < s < 2`.
pub fn c_s(s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 2.0) {
        return Err(Error::ExponentOutOfRange { s, range: "(0, 2)" });
    }
    Ok(0.5 * s / gamma(1.0 - 0.5 * s))
}

/// Time horizon beyond which `Theta` is below `exp(-60)` on this domain.
pub(crate) fn theta_horizon(domain: &Domain) -> f64 {
    60.0 / Spectrum::new(domain).lambda_min()
}

/// `(Lambda^s 1)(x) = c_s int_0^inf t^{-1-s/2} (1 - Theta(x, t)) dt`.
pub fn lambda_s_one(domain: &Domain, x: [f64; 2], s: f64) -> Result<f64> {
    let cs = c_s(s)?;
    let d = domain.distance_to_boundary(x)?;
    if d <= 0.0 {
        return Err(Error::InvalidParameter("lambda_s_one needs an interior point".into()));
    }
    let kernel = HeatKernel::new(domain);
    let t_lo = d * d / 400.0;
    let t_hi = theta_horizon(domain);
    let breaks = geometric_breaks(t_lo, t_hi, 40);
    let tol = Tolerance {
        abs: 0.0,
        rel: 1e-11,
        max_intervals: 4000,
    };
    let a = 0.5 * s;
    let body = adaptive(|t| t.powf(-1.0 - a) * kernel.one_minus_theta(x, t), &breaks, tol)?;
    // Below t_lo the integrand is under erfc(10); above t_hi it is t^{-1-s/2}.
    let tail = t_hi.powf(-a) / a;
    Ok(cs * (body.value + tail))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn evolve_on_eigenfunction() {
        let d = Domain::square_pi(8).unwrap();
        let sp = Spectrum::new(&d);
        let w = SpectralField::mode(d.shape(), 1, 1);
        assert_eq!(heat_evolve(&sp, &w, 0.0).unwrap(), w);
        let e = heat_evolve(&sp, &w, 1.0).unwrap();
        assert!((e.get(1, 1) - (-2.0f64).exp()).abs() < 1e-16);
        assert!(matches!(heat_evolve(&sp, &w, -1.0), Err(Error::NegativeTime(_))));
    }

    #[test]
    fn c_s_reproduces_the_fractional_power() {
        assert!((c_s(1.0).unwrap() - 0.5 / PI.sqrt()).abs() < 1e-15);
        // direct quadrature of the subordination formula at lambda = 3, s = 0.6
        let (lam, s): (f64, f64) = (3.0, 0.6);
        let a = s / 2.0;
        let f = |t: f64| -(-t * lam).exp_m1() * t.powf(-1.0 - a);
        let breaks = geometric_breaks(1e-12, 1e4, 60);
        let mut v = adaptive(f, &breaks, Tolerance::default()).unwrap().value;
        v += (1e-12f64).powf(1.0 - a) * lam / (1.0 - a) + (1e4f64).powf(-a) / a;
        assert!((c_s(s).unwrap() * v - lam.powf(a)).abs() < 1e-9);
        assert!(c_s(2.0).is_err() && c_s(0.0).is_err());
    }
}
