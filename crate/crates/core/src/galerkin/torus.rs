//! The advection term on the doubly periodic torus `[0, 2 lx) x [0, 2 ly)`.
//!
//! A sine series on the rectangle is the restriction of its odd-odd
//! extension, and the Riesz velocity of an odd-odd scalar is again the
//! reflection-equivariant one, so `u . grad theta` can be formed with plain
//! FFTs on the torus. The product comes back as a general torus spectrum; its
//! odd-odd part is the Dirichlet Galerkin term, and whatever is left in the
//! retained band is reported as contamination.
//!
//! Spectra are stored transposed (`[m2][m1]`) so that each 2D transform needs
//! a single transpose.

use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::Array2;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::domain::Domain;

/// How the quadratic product is protected from aliasing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dealias {
    /// At least `3 n + 1` torus points per period.
    TwoThirds,
    /// At least `4 n + 2` points per period (twofold oversampling of the
    /// product's band).
    RefinedGrid,
}

impl Dealias {
    /// Torus points per period for `n` retained modes: the smallest
    /// `2^a 3^b 5^c` not below the alias-free minimum.
    pub fn torus_points(self, n: usize) -> usize {
        let min = match self {
            Dealias::TwoThirds => 3 * n + 1,
            Dealias::RefinedGrid => 4 * n + 2,
        };
        (min..).find(|&p| is_smooth(p)).unwrap_or(min)
    }
}

fn is_smooth(mut p: usize) -> bool {
    for f in [2, 3, 5] {
        while p.is_multiple_of(f) {
            p /= f;
        }
    }
    p == 1
}

/// Output of one evaluation of the advection term.
#[derive(Debug, Clone, Copy)]
pub struct ProductInfo {
    /// `max |u|` over the torus grid.
    pub max_speed: f64,
    /// Norm of the non-odd-odd part of the product's retained band, relative
    /// to the norm of the whole retained band.
    pub contamination: f64,
}

pub(crate) struct TorusProduct {
    n: usize,
    p: usize,
    kx: f64,
    ky: f64,
    norm: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    grad: Vec<Complex64>,
    vel: Vec<Complex64>,
    scratch: Vec<Complex64>,
    transpose_buf: Vec<Complex64>,
}

impl TorusProduct {
    pub(crate) fn new(domain: &Domain, n: usize, dealias: Dealias) -> Self {
        let p = dealias.torus_points(n);
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(p);
        let inverse = planner.plan_fft_inverse(p);
        let scratch_len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        Self {
            n,
            p,
            kx: PI / domain.lx(),
            ky: PI / domain.ly(),
            norm: 2.0 / (domain.lx() * domain.ly()).sqrt(),
            forward,
            inverse,
            grad: vec![Complex64::default(); p * p],
            vel: vec![Complex64::default(); p * p],
            scratch: vec![Complex64::default(); scratch_len],
            transpose_buf: vec![Complex64::default(); p * p],
        }
    }

    pub(crate) fn points(&self) -> usize {
        self.p
    }

    fn index(&self, m: i64) -> usize {
        m.rem_euclid(self.p as i64) as usize
    }

    /// Blocked out-of-place transpose of `data` into `buf`; the buffers are
    /// then swapped.
    fn transpose(data: &mut Vec<Complex64>, buf: &mut Vec<Complex64>, p: usize) {
        const B: usize = 16;
        for r0 in (0..p).step_by(B) {
            for c0 in (0..p).step_by(B) {
                for r in r0..(r0 + B).min(p) {
                    for c in c0..(c0 + B).min(p) {
                        buf[c * p + r] = data[r * p + c];
                    }
                }
            }
        }
        std::mem::swap(data, buf);
    }

    /// Rows `|m| <= n` of a `[m][.]` array: the only ones a band-limited
    /// spectrum occupies.
    fn band_rows(fft: &Arc<dyn Fft<f64>>, data: &mut [Complex64], scratch: &mut [Complex64], n: usize, p: usize) {
        let (low, rest) = data.split_at_mut((n + 1) * p);
        fft.process_with_scratch(low, scratch);
        let high = &mut rest[(p - 2 * n - 1) * p..];
        if !high.is_empty() {
            fft.process_with_scratch(high, scratch);
        }
    }

    /// `[m2][m1]` spectrum to `[p1][p2]` values.
    fn synthesize(&mut self, which: Which) {
        let (n, p) = (self.n, self.p);
        let data = match which {
            Which::Grad => &mut self.grad,
            Which::Vel => &mut self.vel,
        };
        Self::band_rows(&self.inverse, data, &mut self.scratch, n, p);
        Self::transpose(data, &mut self.transpose_buf, p);
        self.inverse.process_with_scratch(data, &mut self.scratch);
    }

    /// `[p1][p2]` values to an unnormalized `[m2][m1]` spectrum, exact only
    /// in the rows `|m2| <= n`.
    fn analyze(&mut self) {
        let (n, p) = (self.n, self.p);
        self.forward.process_with_scratch(&mut self.grad, &mut self.scratch);
        Self::transpose(&mut self.grad, &mut self.transpose_buf, p);
        Self::band_rows(&self.forward, &mut self.grad, &mut self.scratch, n, p);
    }

    /// Writes the sine coefficients of `P_n(u . grad theta)` into `out` (modes
    /// outside the band are left untouched) for the sine coefficients `a`.
    pub(crate) fn advection(&mut self, a: &Array2<f64>, out: &mut Array2<f64>) -> ProductInfo {
        let (n, p) = (self.n, self.p);
        self.grad.fill(Complex64::default());
        self.vel.fill(Complex64::default());
        let mut any = false;
        for j in 1..=n {
            for k in 1..=n {
                let c = a[[j - 1, k - 1]];
                if c == 0.0 {
                    continue;
                }
                any = true;
                let quarter = 0.25 * self.norm * c;
                for s1 in [1i64, -1] {
                    for s2 in [1i64, -1] {
                        let (m1, m2) = (s1 * j as i64, s2 * k as i64);
                        // sin a sin b = -(1/4) sum s1 s2 e^{i(s1 a + s2 b)}
                        let f = -((s1 * s2) as f64) * quarter;
                        let (kx, ky) = (m1 as f64 * self.kx, m2 as f64 * self.ky);
                        let kap = kx.hypot(ky);
                        let at = self.index(m2) * p + self.index(m1);
                        // theta_x + i theta_y and u1 + i u2, u = (-d_y, d_x) Lambda^{-1} theta
                        self.grad[at] = Complex64::new(-ky * f, kx * f);
                        self.vel[at] = Complex64::new(-kx * f / kap, -ky * f / kap);
                    }
                }
            }
        }
        if !any {
            for v in out.slice_mut(ndarray::s![..n, ..n]).iter_mut() {
                *v = 0.0;
            }
            return ProductInfo {
                max_speed: 0.0,
                contamination: 0.0,
            };
        }
        self.synthesize(Which::Grad);
        self.synthesize(Which::Vel);
        let mut max_speed = 0.0_f64;
        for (g, u) in self.grad.iter_mut().zip(self.vel.iter()) {
            max_speed = max_speed.max(u.re.hypot(u.im));
            *g = Complex64::new(u.re * g.re + u.im * g.im, 0.0);
        }
        self.analyze();
        let scale = 1.0 / (p * p) as f64;
        let at = |m1: i64, m2: i64| self.grad[self.index(m2) * p + self.index(m1)] * scale;
        let (mut total, mut residual) = (0.0, 0.0);
        for j in 0..=n as i64 {
            for k in 0..=n as i64 {
                if j == 0 || k == 0 {
                    // pure cosine content along one axis
                    for (s1, s2) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                        if (j == 0 && s1 < 0) || (k == 0 && s2 < 0) {
                            continue;
                        }
                        let g = at(s1 * j, s2 * k).norm_sqr();
                        total += g;
                        residual += g;
                    }
                    continue;
                }
                let g = [at(j, k), at(j, -k), at(-j, k), at(-j, -k)];
                let signed = g[0] - g[1] - g[2] + g[3];
                let coef = -signed.re / self.norm;
                out[[j as usize - 1, k as usize - 1]] = coef;
                let quarter = 0.25 * self.norm * coef;
                for (gv, s) in g.iter().zip([1.0, -1.0, -1.0, 1.0]) {
                    total += gv.norm_sqr();
                    residual += (gv + s * quarter).norm_sqr();
                }
            }
        }
        let contamination = if total > 0.0 { (residual / total).sqrt() } else { 0.0 };
        ProductInfo {
            max_speed,
            contamination,
        }
    }
}

#[derive(Clone, Copy)]
enum Which {
    Grad,
    Vel,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_sizes() {
        assert_eq!(Dealias::TwoThirds.torus_points(128), 400);
        assert_eq!(Dealias::TwoThirds.torus_points(256), 800);
        assert_eq!(Dealias::RefinedGrid.torus_points(16), 72);
        assert!(is_smooth(360) && !is_smooth(7 * 64));
    }

    #[test]
    fn zero_input_gives_zero() {
        let d = Domain::square_pi(8).unwrap();
        let mut t = TorusProduct::new(&d, 8, Dealias::TwoThirds);
        let mut out = Array2::from_elem((8, 8), 1.0);
        let info = t.advection(&Array2::zeros((8, 8)), &mut out);
        assert_eq!(info.max_speed, 0.0);
        assert!(out.iter().all(|&v| v == 0.0));
    }
}
