//! The elementary time integral
//! `I(rho, p; m, j, K) = int_0^{rho^2} t^{-1-m/2} (p/sqrt t)^j exp(-p^2/(K t)) dt`.
//!
//! With `u = p^2/(K t)` it equals `K^{(m+j)/2} p^{-m} Gamma((m+j)/2, p^2/(K rho^2))`,
//! an upper incomplete gamma function (the exponential integral `E1` when
//! `m = j = 0`). The closed form is kept separate from the quadrature so each
//! can check the other.

use statrs::function::gamma::{gamma, gamma_ur};

use crate::error::{Error, Result};
use crate::quadrature::{adaptive, Tolerance};
use crate::report::{BoundFitReport, BoundKind, Extremum};

fn check(rho: f64, p: f64, m: f64, j: f64, k: f64) -> Result<()> {
    if !(p > 0.0 && p.is_finite()) || !(rho > 0.0) || !(k > 0.0) || m < 0.0 || j < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "intpk needs rho > 0, p > 0, K > 0, m, j >= 0 (got rho={rho}, p={p}, m={m}, j={j}, K={k})"
        )));
    }
    if m + j == 0.0 && rho.is_infinite() {
        return Err(Error::InvalidParameter("rho = infinity requires m + j > 0".into()));
    }
    Ok(())
}

/// Exponential integral `E1(x) = int_x^inf e^{-u}/u du` for `x > 0`.
pub fn exp_integral_e1(x: f64) -> f64 {
    const EULER: f64 = 0.577_215_664_901_532_9;
    if x <= 0.0 {
        return f64::INFINITY;
    }
    if x < 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..200 {
            term *= -x / k as f64;
            let add = term / k as f64;
            sum += add;
            if add.abs() < 1e-17 * sum.abs().max(1e-300) {
                break;
            }
        }
        -EULER - x.ln() - sum
    } else {
        // modified Lentz evaluation of the continued fraction
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let a = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}

/// Closed form of the integral.
pub fn intpk_closed_form(rho: f64, p: f64, m: f64, j: f64, k: f64) -> Result<f64> {
    check(rho, p, m, j, k)?;
    let u0 = if rho.is_infinite() { 0.0 } else { p * p / (k * rho * rho) };
    let a = 0.5 * (m + j);
    let upper = if a == 0.0 {
        exp_integral_e1(u0)
    } else if u0 == 0.0 {
        gamma(a)
    } else {
        gamma_ur(a, u0) * gamma(a)
    };
    Ok(k.powf(a) * p.powf(-m) * upper)
}

/// Adaptive quadrature of the integral in the variable `tau = ln t`.
pub fn intpk_quadrature(rho: f64, p: f64, m: f64, j: f64, k: f64) -> Result<f64> {
    check(rho, p, m, j, k)?;
    let a = 0.5 * (m + j);
    let c = p * p / k;
    // below t = c/800 the factor exp(-c/t) is under e^{-800}
    let lo = (c / 800.0).ln();
    let (hi, tail) = if rho.is_infinite() {
        let t_hi = c * (80.0 / a).exp();
        (t_hi.ln(), p.powf(j) * t_hi.powf(-a) / a)
    } else {
        ((rho * rho).ln(), 0.0)
    };
    if hi <= lo {
        return Ok(0.0);
    }
    let integrand = |tau: f64| {
        let t = tau.exp();
        (-(1.0 + 0.5 * m) * tau + j * (p.ln() - 0.5 * tau) - c / t + tau).exp()
    };
    let n = (((hi - lo) / 0.5).ceil() as usize).clamp(4, 400);
    let breaks: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let tol = Tolerance {
        abs: 0.0,
        rel: 1e-12,
        max_intervals: 4000,
    };
    Ok(adaptive(integrand, &breaks, tol)?.value + tail)
}

/// Fits the constants of the two intpk bounds over a `(rho, p)` sweep for each
/// listed `(m, j)` pair; the finer sweep doubles the sampling density.
pub fn verify_intpk(k: f64, pairs: &[(f64, f64)]) -> Result<Vec<BoundFitReport>> {
    let sweep = |density: usize| -> Vec<f64> {
        let n = 8 * density;
        (0..=n).map(|i| 10f64.powf(-2.0 + 4.0 * i as f64 / n as f64)).collect()
    };
    let mut out = Vec::new();
    for &(m, j) in pairs {
        let mut fits = [0.0; 2];
        let mut size = 0;
        for (slot, density) in [1usize, 2].into_iter().enumerate() {
            let values = sweep(density);
            let mut ext = Extremum::new(BoundKind::Upper);
            for &rho in values.iter().chain(std::iter::once(&f64::INFINITY)) {
                if rho.is_infinite() && m + j == 0.0 {
                    continue;
                }
                for &p in &values {
                    let v = intpk_quadrature(rho, p, m, j, k)?;
                    let ratio = if m + j > 0.0 {
                        v * p.powf(m)
                    } else {
                        v / (1.0 + 2.0 * ((k.sqrt() * rho / p).ln()).max(0.0))
                    };
                    ext.push(ratio);
                }
            }
            fits[slot] = ext.value();
            size = ext.count();
        }
        let id = if m + j > 0.0 {
            format!("intpk.pbeta.m{m}.j{j}")
        } else {
            "intpk.pzero".to_string()
        };
        out.push(
            BoundFitReport::from_fits(id, BoundKind::Upper, fits[0], fits[1], "rho, p in [1e-2, 1e2] log-spaced", size)
                .with_parameter(k),
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e1_reference_values() {
        // E1(1) and E1(0.1), E1(5) from tables
        assert!((exp_integral_e1(1.0) - 0.219_383_934_395_520_3).abs() < 1e-14);
        assert!((exp_integral_e1(0.1) - 1.822_923_958_419_39).abs() < 1e-13);
        assert!((exp_integral_e1(5.0) - 0.001_148_295_591_275_326).abs() < 1e-16);
    }

    #[test]
    fn quadrature_matches_closed_form() {
        for &(rho, p, m, j, k) in &[
            (f64::INFINITY, 1.0, 2.0, 0.0, 1.0),
            (1.0, 0.3, 1.0, 1.0, 2.0),
            (5.0, 0.01, 0.0, 0.0, 4.0),
            (0.5, 2.0, 3.0, 0.0, 1.0),
            (f64::INFINITY, 0.2, 0.0, 1.0, 8.0),
        ] {
            let q = intpk_quadrature(rho, p, m, j, k).unwrap();
            let c = intpk_closed_form(rho, p, m, j, k).unwrap();
            assert!((q - c).abs() <= 1e-10 * c.abs().max(1e-300), "{rho} {p} {m} {j}: {q} vs {c}");
        }
        // m = 2, j = 0, K = 1, p = 1, rho = inf is Gamma(1)
        assert!((intpk_closed_form(f64::INFINITY, 1.0, 2.0, 0.0, 1.0).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_invalid_arguments() {
        assert!(intpk_quadrature(f64::INFINITY, 1.0, 0.0, 0.0, 1.0).is_err());
        assert!(intpk_quadrature(1.0, -1.0, 1.0, 0.0, 1.0).is_err());
    }
}
