//! Synthetic data: Gaussian bumps and random band-limited fields.

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::domain::{Domain, GridField};
use crate::spectral::SpectralField;

/// An anisotropic Gaussian `A exp(-(x1-c1)^2/(2 s1^2) - (x2-c2)^2/(2 s2^2))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianBump {
    pub center: [f64; 2],
    pub sigma: [f64; 2],
    pub amplitude: f64,
}

impl GaussianBump {
    /// The reference datum: centered, widths 0.2 and 0.14, so that it is
    /// below 1e-13 on the boundary of `(0, pi)^2` and not radially symmetric.
    pub fn standard(domain: &Domain, amplitude: f64) -> Self {
        Self {
            center: [0.5 * domain.lx(), 0.5 * domain.ly()],
            sigma: [0.2, 0.14],
            amplitude,
        }
    }

    pub fn value(&self, p: [f64; 2]) -> f64 {
        let a = (p[0] - self.center[0]) / self.sigma[0];
        let b = (p[1] - self.center[1]) / self.sigma[1];
        self.amplitude * (-0.5 * (a * a + b * b)).exp()
    }

    pub fn sample(&self, domain: &Domain) -> GridField {
        domain.sample(|x, y| self.value([x, y]))
    }

    /// Largest value on the boundary of the rectangle.
    pub fn boundary_value(&self, domain: &Domain) -> f64 {
        let reach = |c: f64, l: f64, s: f64| {
            let d = c.min(l - c);
            (-0.5 * (d / s).powi(2)).exp()
        };
        self.amplitude.abs()
            * reach(self.center[0], domain.lx(), self.sigma[0]).max(reach(self.center[1], domain.ly(), self.sigma[1]))
    }
}

/// A random sine series with Gaussian coefficients damped by
/// `exp(-(j^2 + k^2)/(2 kappa^2))` and cut at `modes` per direction,
/// rescaled so that its largest coefficient magnitude is one.
pub fn random_smooth(shape: (usize, usize), modes: usize, kappa: f64, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Array2::zeros(shape);
    for ((j, k), v) in c.indexed_iter_mut() {
        if j < modes && k < modes {
            let (a, b) = ((j + 1) as f64, (k + 1) as f64);
            let z: f64 = StandardNormal.sample(&mut rng);
            *v = z * (-(a * a + b * b) / (2.0 * kappa * kappa)).exp();
        }
    }
    let m = c.iter().fold(0.0_f64, |m: f64, v: &f64| m.max(v.abs()));
    if m > 0.0 {
        c.mapv_inplace(|v| v / m);
    }
    SpectralField::new(c)
}
