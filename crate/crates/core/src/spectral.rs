//! Dirichlet spectral calculus on a rectangle.
//!
//! Fields vanishing on the boundary are expanded in the orthonormal
//! eigenfunctions `w_jk = 2/sqrt(lx ly) sin(j pi x/lx) sin(k pi y/ly)` with
//! eigenvalues `lambda_jk = (j pi/lx)^2 + (k pi/ly)^2`. Every mode's leading
//! lobe is positive, so `w_11 > 0` in the interior.
//!
//! Transforms are DST-I (sine) and DCT-I (cosine evaluation of derivatives).
//! On the DST-I grid the sampled eigenfunctions are exactly orthonormal under
//! the midpoint rule, so `to_spectral` and `from_spectral` are inverse up to
//! round-off.

use std::sync::Arc;

use ndarray::{Array1, Array2, Axis};
use rustdct::{Dct1, DctPlanner, Dst1};

use crate::domain::{check_shape, Domain, GridField};
use crate::error::{Error, Result};

/// Sine coefficients `a[j-1, k-1]` of a field vanishing on the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    coeffs: Array2<f64>,
}

impl SpectralField {
    pub fn new(coeffs: Array2<f64>) -> Self {
        Self { coeffs }
    }

    pub fn zeros(shape: (usize, usize)) -> Self {
        Self {
            coeffs: Array2::zeros(shape),
        }
    }

    /// The single eigenfunction `w_jk` (one-based mode numbers).
    pub fn mode(shape: (usize, usize), j: usize, k: usize) -> Self {
        let mut a = Array2::zeros(shape);
        a[[j - 1, k - 1]] = 1.0;
        Self { coeffs: a }
    }

    pub fn coeffs(&self) -> &Array2<f64> {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut Array2<f64> {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Array2<f64> {
        self.coeffs
    }

    pub fn shape(&self) -> (usize, usize) {
        self.coeffs.dim()
    }

    /// One-based accessor.
    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.coeffs[[j - 1, k - 1]]
    }

    /// `L^2` norm, equal to the Euclidean norm of the coefficients.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            coeffs: &self.coeffs * factor,
        }
    }

    pub fn add(&self, other: &SpectralField) -> Result<SpectralField> {
        check_shape(self.shape(), other.shape())?;
        Ok(Self {
            coeffs: &self.coeffs + &other.coeffs,
        })
    }

    /// Zero-pads or truncates to `shape`, keeping the low modes.
    pub fn resized(&self, shape: (usize, usize)) -> SpectralField {
        let mut out = Array2::zeros(shape);
        let (a, b) = self.shape();
        for j in 0..a.min(shape.0) {
            for k in 0..b.min(shape.1) {
                out[[j, k]] = self.coeffs[[j, k]];
            }
        }
        SpectralField { coeffs: out }
    }

    /// Keeps modes with `j <= n && k <= n` (isotropic band truncation).
    pub fn band_limited(&self, n: usize) -> SpectralField {
        let mut out = self.coeffs.clone();
        for ((j, k), v) in out.indexed_iter_mut() {
            if j >= n || k >= n {
                *v = 0.0;
            }
        }
        SpectralField { coeffs: out }
    }
}

/// Eigenvalues and normalization of the Dirichlet Laplacian on a rectangle.
#[derive(Debug, Clone)]
pub struct Spectrum {
    lx: f64,
    ly: f64,
    eigenvalues: Array2<f64>,
}

impl Spectrum {
    pub fn new(domain: &Domain) -> Self {
        let (nx, ny) = domain.shape();
        let (lx, ly) = (domain.lx(), domain.ly());
        let eigenvalues = Array2::from_shape_fn((nx, ny), |(j, k)| {
            let a = (j + 1) as f64 * std::f64::consts::PI / lx;
            let b = (k + 1) as f64 * std::f64::consts::PI / ly;
            a * a + b * b
        });
        Self { lx, ly, eigenvalues }
    }

    /// `lambda_jk` for one-based mode numbers; defined for any `j, k >= 1`.
    pub fn eigenvalue(&self, j: usize, k: usize) -> f64 {
        let a = j as f64 * std::f64::consts::PI / self.lx;
        let b = k as f64 * std::f64::consts::PI / self.ly;
        a * a + b * b
    }

    pub fn eigenvalues(&self) -> &Array2<f64> {
        &self.eigenvalues
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalue(1, 1)
    }

    /// The constant `2 / sqrt(lx ly)` in front of every eigenfunction.
    pub fn normalization(&self) -> f64 {
        2.0 / (self.lx * self.ly).sqrt()
    }

    /// `w_jk(p)` evaluated directly.
    pub fn eigenfunction(&self, j: usize, k: usize, p: [f64; 2]) -> f64 {
        use std::f64::consts::PI;
        self.normalization()
            * (j as f64 * PI * p[0] / self.lx).sin()
            * (k as f64 * PI * p[1] / self.ly).sin()
    }

    /// The positive ground state `w_11`.
    pub fn ground_state(&self, p: [f64; 2]) -> f64 {
        self.eigenfunction(1, 1, p)
    }
}

/// Which trigonometric family a series uses along one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Sine,
    Cosine,
}

struct AxisPlan {
    n: usize,
    dst: Arc<dyn Dst1<f64>>,
    dct: Arc<dyn Dct1<f64>>,
}

impl AxisPlan {
    fn new(planner: &mut DctPlanner<f64>, n: usize) -> Self {
        Self {
            n,
            dst: planner.plan_dst1(n),
            dct: planner.plan_dct1(n + 2),
        }
    }

    /// `out_i = sum_j c_j sin(pi i j / (n+1))`; also the (unnormalized) analysis.
    fn sine(&self, lane: &mut [f64], scratch: &mut Vec<f64>) {
        // the rustdct DST-I reads its scratch before writing it
        scratch.clear();
        scratch.resize(self.dst.get_scratch_len(), 0.0);
        self.dst.process_dst1_with_scratch(lane, scratch);
    }

    /// `out_i = sum_j c_j cos(pi i j / (n+1))` for interior `i`.
    fn cosine(&self, lane: &mut [f64], buf: &mut Vec<f64>, scratch: &mut Vec<f64>) {
        buf.clear();
        buf.push(0.0);
        buf.extend_from_slice(lane);
        buf.push(0.0);
        scratch.clear();
        scratch.resize(self.dct.get_scratch_len(), 0.0);
        self.dct.process_dct1_with_scratch(buf, scratch);
        lane.copy_from_slice(&buf[1..=self.n]);
    }
}


/// Spectral calculus for one domain: transforms, fractional powers,
/// gradients and the Riesz velocity.
pub struct SineBasis {
    domain: Domain,
    spectrum: Spectrum,
    plan_x: AxisPlan,
    plan_y: AxisPlan,
}

impl std::fmt::Debug for SineBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SineBasis").field("domain", &self.domain).finish()
    }
}

/// Divergence-free velocity `u = grad^perp Lambda^{-1} theta` on the grid.
#[derive(Debug, Clone)]
pub struct VelocityField {
    pub u1: GridField,
    pub u2: GridField,
}

impl VelocityField {
    pub fn max_speed(&self) -> f64 {
        self.u1
            .values()
            .iter()
            .zip(self.u2.values().iter())
            .fold(0.0_f64, |m, (a, b)| m.max(a.hypot(*b)))
    }
}

impl SineBasis {
    pub fn new(domain: Domain) -> Self {
        let mut planner = DctPlanner::new();
        let plan_x = AxisPlan::new(&mut planner, domain.nx());
        let plan_y = AxisPlan::new(&mut planner, domain.ny());
        Self {
            spectrum: Spectrum::new(&domain),
            domain,
            plan_x,
            plan_y,
        }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn shape(&self) -> (usize, usize) {
        self.domain.shape()
    }

    fn check(&self, shape: (usize, usize)) -> Result<()> {
        check_shape(self.domain.shape(), shape)
    }

    fn transform_axis(&self, data: &mut Array2<f64>, axis: usize, parity: Parity) {
        let plan = if axis == 0 { &self.plan_x } else { &self.plan_y };
        let mut lane_buf = vec![0.0; plan.n];
        let mut buf = Vec::with_capacity(plan.n + 2);
        let mut scratch = Vec::new();
        for mut lane in data.lanes_mut(Axis(axis)) {
            for (dst, src) in lane_buf.iter_mut().zip(lane.iter()) {
                *dst = *src;
            }
            match parity {
                Parity::Sine => plan.sine(&mut lane_buf, &mut scratch),
                Parity::Cosine => plan.cosine(&mut lane_buf, &mut buf, &mut scratch),
            }
            for (dst, src) in lane.iter_mut().zip(lane_buf.iter()) {
                *dst = *src;
            }
        }
    }

    /// Evaluates `norm * sum_jk c_jk X_j(x) Y_k(y)` on the grid, where `X`, `Y`
    /// are sines or cosines as requested.
    pub fn synthesize(&self, coeffs: &Array2<f64>, px: Parity, py: Parity) -> Result<GridField> {
        self.check(coeffs.dim())?;
        let mut data = coeffs * self.spectrum.normalization();
        self.transform_axis(&mut data, 0, px);
        self.transform_axis(&mut data, 1, py);
        Ok(GridField::new(data))
    }

    pub fn to_spectral(&self, g: &GridField) -> Result<SpectralField> {
        self.check(g.shape())?;
        let mut data = g.values().clone();
        self.transform_axis(&mut data, 0, Parity::Sine);
        self.transform_axis(&mut data, 1, Parity::Sine);
        let w = self.spectrum.normalization() * self.domain.dx() * self.domain.dy();
        data.mapv_inplace(|v| v * w);
        Ok(SpectralField::new(data))
    }

    pub fn from_spectral(&self, a: &SpectralField) -> Result<GridField> {
        self.synthesize(a.coeffs(), Parity::Sine, Parity::Sine)
    }

    /// Multiplies every coefficient by `lambda^{p}` for an arbitrary real `p`.
    pub fn multiply_by_eigen_power(&self, a: &SpectralField, p: f64) -> Result<SpectralField> {
        self.check(a.shape())?;
        let mut c = a.coeffs().clone();
        c.zip_mut_with(self.spectrum.eigenvalues(), |v, &l| *v *= l.powf(p));
        Ok(SpectralField::new(c))
    }

    /// `Lambda^s a`, `Lambda^s = (-Delta)^{s/2}`, for `s` in `[0, 2]`.
    pub fn apply_lambda_s(&self, a: &SpectralField, s: f64) -> Result<SpectralField> {
        if !(0.0..=2.0).contains(&s) {
            return Err(Error::ExponentOutOfRange { s, range: "[0, 2]" });
        }
        self.multiply_by_eigen_power(a, s / 2.0)
    }

    pub fn apply_lambda_inverse(&self, a: &SpectralField) -> Result<SpectralField> {
        self.multiply_by_eigen_power(a, -0.5)
    }

    /// `||f||_{s,D} = (sum lambda^s a^2)^{1/2}` for any real `s`.
    pub fn dirichlet_norm(&self, a: &SpectralField, s: f64) -> Result<f64> {
        self.check(a.shape())?;
        Ok(a.coeffs()
            .iter()
            .zip(self.spectrum.eigenvalues().iter())
            .map(|(c, l)| l.powf(s) * c * c)
            .sum::<f64>()
            .sqrt())
    }

    fn wavenumber_x(&self, j: usize) -> f64 {
        (j + 1) as f64 * std::f64::consts::PI / self.domain.lx()
    }

    fn wavenumber_y(&self, k: usize) -> f64 {
        (k + 1) as f64 * std::f64::consts::PI / self.domain.ly()
    }

    fn weighted(&self, a: &Array2<f64>, f: impl Fn(f64, f64) -> f64) -> Array2<f64> {
        let mut c = a.clone();
        for ((j, k), v) in c.indexed_iter_mut() {
            *v *= f(self.wavenumber_x(j), self.wavenumber_y(k));
        }
        c
    }

    /// Grid values of `(d/dx f, d/dy f)` by termwise differentiation.
    pub fn gradient(&self, a: &SpectralField) -> Result<(GridField, GridField)> {
        self.check(a.shape())?;
        let cx = self.weighted(a.coeffs(), |kx, _| kx);
        let cy = self.weighted(a.coeffs(), |_, ky| ky);
        Ok((
            self.synthesize(&cx, Parity::Cosine, Parity::Sine)?,
            self.synthesize(&cy, Parity::Sine, Parity::Cosine)?,
        ))
    }

    /// `u = grad^perp Lambda^{-1} theta = (-d/dy psi, d/dx psi)` with `psi = Lambda^{-1} theta`.
    pub fn riesz_velocity(&self, theta: &SpectralField) -> Result<VelocityField> {
        let psi = self.apply_lambda_inverse(theta)?;
        let c1 = self.weighted(psi.coeffs(), |_, ky| -ky);
        let c2 = self.weighted(psi.coeffs(), |kx, _| kx);
        Ok(VelocityField {
            u1: self.synthesize(&c1, Parity::Sine, Parity::Cosine)?,
            u2: self.synthesize(&c2, Parity::Cosine, Parity::Sine)?,
        })
    }

    /// `[[d1 u1, d2 u1], [d1 u2, d2 u2]]` of the Riesz velocity.
    pub fn velocity_gradient(&self, theta: &SpectralField) -> Result<[[GridField; 2]; 2]> {
        let psi = self.apply_lambda_inverse(theta)?;
        let c = psi.coeffs();
        let dxu1 = self.synthesize(&self.weighted(c, |kx, ky| -kx * ky), Parity::Cosine, Parity::Cosine)?;
        let dyu1 = self.synthesize(&self.weighted(c, |_, ky| ky * ky), Parity::Sine, Parity::Sine)?;
        let dxu2 = self.synthesize(&self.weighted(c, |kx, _| -kx * kx), Parity::Sine, Parity::Sine)?;
        let dyu2 = dxu1.map(|v| -v);
        Ok([[dxu1, dyu1], [dxu2, dyu2]])
    }

    /// Divergence of grid velocity data by spectral differentiation: `u1` is
    /// re-expanded in sines along `x`, `u2` along `y`, then differentiated.
    pub fn divergence(&self, u: &VelocityField) -> Result<GridField> {
        self.check(u.u1.shape())?;
        self.check(u.u2.shape())?;
        let d1 = self.differentiate_sine_axis(u.u1.values(), 0);
        let d2 = self.differentiate_sine_axis(u.u2.values(), 1);
        Ok(GridField::new(d1 + d2))
    }

    fn differentiate_sine_axis(&self, values: &Array2<f64>, axis: usize) -> Array2<f64> {
        let mut data = values.clone();
        self.transform_axis(&mut data, axis, Parity::Sine);
        let (n, l) = if axis == 0 {
            (self.domain.nx(), self.domain.lx())
        } else {
            (self.domain.ny(), self.domain.ly())
        };
        let scale = 2.0 / (n + 1) as f64;
        for (idx, mut lane) in data.axis_iter_mut(Axis(axis)).enumerate() {
            let kappa = (idx + 1) as f64 * std::f64::consts::PI / l;
            lane.mapv_inplace(|v| v * kappa * scale);
        }
        self.transform_axis(&mut data, axis, Parity::Cosine);
        data
    }

    /// Direct evaluation of a mixed series at an arbitrary point.
    pub fn evaluate_series_at(&self, coeffs: &Array2<f64>, px: Parity, py: Parity, p: [f64; 2]) -> f64 {
        let (nx, ny) = coeffs.dim();
        let basis = |parity: Parity, arg: f64| match parity {
            Parity::Sine => arg.sin(),
            Parity::Cosine => arg.cos(),
        };
        let bx: Array1<f64> = (0..nx).map(|j| basis(px, self.wavenumber_x(j) * p[0])).collect();
        let by: Array1<f64> = (0..ny).map(|k| basis(py, self.wavenumber_y(k) * p[1])).collect();
        self.spectrum.normalization() * bx.dot(&coeffs.dot(&by))
    }

    /// `f(p)` for the sine series `a`.
    pub fn evaluate_at(&self, a: &SpectralField, p: [f64; 2]) -> f64 {
        self.evaluate_series_at(a.coeffs(), Parity::Sine, Parity::Sine, p)
    }

    /// `sup |f|` of the sine series, not just of its grid samples: the
    /// largest local extrema of `|f|` on the grid are polished by Newton's
    /// method on the series itself.
    pub fn sup_norm(&self, a: &SpectralField) -> Result<f64> {
        let g = self.from_spectral(a)?;
        let v = g.values();
        let (nx, ny) = v.dim();
        let mut candidates = Vec::new();
        for i in 0..nx {
            for k in 0..ny {
                let m = v[[i, k]].abs();
                let is_peak = (i.saturating_sub(1)..(i + 2).min(nx))
                    .all(|a| (k.saturating_sub(1)..(k + 2).min(ny)).all(|b| v[[a, b]].abs() <= m));
                if is_peak && m > 0.0 {
                    candidates.push((m, [i, k]));
                }
            }
        }
        candidates.sort_by(|p, q| q.0.total_cmp(&p.0));
        let mut best = g.max_abs();
        for &(_, [i, k]) in candidates.iter().take(6) {
            if let Some(m) = self.polish_extremum(a, self.domain.point(i, k)) {
                best = best.max(m);
            }
        }
        Ok(best)
    }

    /// Newton iteration for a critical point of the series started at `p`;
    /// returns `|f|` there if the iteration stays within two grid cells.
    fn polish_extremum(&self, a: &SpectralField, start: [f64; 2]) -> Option<f64> {
        use Parity::{Cosine, Sine};
        let c = a.coeffs();
        let cx = self.weighted(c, |kx, _| kx);
        let cy = self.weighted(c, |_, ky| ky);
        let cxx = self.weighted(c, |kx, _| -kx * kx);
        let cxy = self.weighted(c, |kx, ky| kx * ky);
        let cyy = self.weighted(c, |_, ky| -ky * ky);
        let reach = 2.0 * self.domain.dx().hypot(self.domain.dy());
        let mut p = start;
        for _ in 0..30 {
            let g = [
                self.evaluate_series_at(&cx, Cosine, Sine, p),
                self.evaluate_series_at(&cy, Sine, Cosine, p),
            ];
            let (hxx, hxy, hyy) = (
                self.evaluate_series_at(&cxx, Sine, Sine, p),
                self.evaluate_series_at(&cxy, Cosine, Cosine, p),
                self.evaluate_series_at(&cyy, Sine, Sine, p),
            );
            let det = hxx * hyy - hxy * hxy;
            if det <= 0.0 {
                return None;
            }
            let step = [-(hyy * g[0] - hxy * g[1]) / det, -(hxx * g[1] - hxy * g[0]) / det];
            p = [p[0] + step[0], p[1] + step[1]];
            if (p[0] - start[0]).hypot(p[1] - start[1]) > reach || !self.domain.contains_closed(p) {
                return None;
            }
            if step[0].hypot(step[1]) < 1e-13 {
                break;
            }
        }
        Some(self.evaluate_at(a, p).abs())
    }

    /// Band-limited interpolation of the series `a` onto another grid of the
    /// same rectangle (zero padding or truncation of the coefficients).
    pub fn resample(&self, a: &SpectralField, target: &SineBasis) -> Result<GridField> {
        if !self.domain.same_rectangle(target.domain()) {
            return Err(Error::InvalidDomain("resampling between different rectangles".into()));
        }
        target.from_spectral(&a.resized(target.shape()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{PI, SQRT_2};

    fn basis(n: usize) -> SineBasis {
        SineBasis::new(Domain::square_pi(n).unwrap())
    }

    fn random_field(b: &SineBasis, seed: u64) -> GridField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        GridField::from_fn(b.shape(), |_, _| rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn ground_state_has_unit_coefficient() {
        let b = basis(16);
        let sp = b.spectrum().clone();
        let g = b.domain().sample(|x, y| sp.ground_state([x, y]));
        let a = b.to_spectral(&g).unwrap();
        assert!((a.get(1, 1) - 1.0).abs() < 1e-12);
        let others = a.coeffs().iter().skip(1).fold(0.0_f64, |m, v| m.max(v.abs()));
        assert!(others < 1e-12, "{others}");
    }

    #[test]
    fn zero_maps_to_zero() {
        let b = basis(8);
        let g = b.from_spectral(&SpectralField::zeros(b.shape())).unwrap();
        assert_eq!(g.max_abs(), 0.0);
    }

    #[test]
    fn round_trip_and_direct_quadrature() {
        let b = Domain::new(1.5, 2.5, 20, 13).map(SineBasis::new).unwrap();
        let g = random_field(&b, 7);
        let a = b.to_spectral(&g).unwrap();
        let back = b.from_spectral(&a).unwrap();
        let err = (back.values() - g.values()).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        assert!(err <= 1e-12 * g.max_abs(), "{err}");

        // one coefficient by the plain quadrature sum
        let d = b.domain();
        let (j, k) = (3, 5);
        let mut q = 0.0;
        for i in 0..d.nx() {
            for l in 0..d.ny() {
                q += g.get(i, l) * b.spectrum().eigenfunction(j, k, d.point(i, l)) * d.dx() * d.dy();
            }
        }
        assert!((q - a.get(j, k)).abs() < 1e-13);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let b = basis(8);
        let g = GridField::zeros((8, 9));
        assert!(matches!(b.to_spectral(&g), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn lambda_powers_on_eigenfunctions() {
        let b = basis(8);
        let w11 = SpectralField::mode(b.shape(), 1, 1);
        let l = b.apply_lambda_s(&w11, 1.0).unwrap();
        assert!((l.get(1, 1) - SQRT_2).abs() < 1e-15);
        let w21 = SpectralField::mode(b.shape(), 2, 1);
        assert!((b.apply_lambda_s(&w21, 2.0).unwrap().get(2, 1) - 5.0).abs() < 1e-13);
        assert_eq!(b.apply_lambda_s(&w21, 0.0).unwrap(), w21);
        assert!(b.apply_lambda_s(&w21, 2.5).is_err());
        assert!(b.apply_lambda_s(&w21, -0.1).is_err());
        let inv = b.apply_lambda_inverse(&w11).unwrap();
        assert!((inv.get(1, 1) - 1.0 / SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn lambda_inverse_undoes_lambda() {
        let b = basis(12);
        let a = b.to_spectral(&random_field(&b, 3)).unwrap();
        let back = b.apply_lambda_inverse(&b.apply_lambda_s(&a, 1.0).unwrap()).unwrap();
        let err = (back.coeffs() - a.coeffs()).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        assert!(err <= 1e-12 * a.l2_norm());
    }

    #[test]
    fn gradient_matches_closed_form() {
        let b = basis(31);
        let (gx, gy) = b.gradient(&SpectralField::mode(b.shape(), 1, 1)).unwrap();
        let d = b.domain();
        // center is grid point 15 for n = 31
        assert!(gx.get(15, 15).abs() < 1e-14 && gy.get(15, 15).abs() < 1e-14);
        for i in 0..31 {
            for k in 0..31 {
                let [x, y] = d.point(i, k);
                let ex = 2.0 / PI * x.cos() * y.sin();
                let ey = 2.0 / PI * x.sin() * y.cos();
                assert!((gx.get(i, k) - ex).abs() < 1e-10);
                assert!((gy.get(i, k) - ey).abs() < 1e-10);
            }
        }
        let (zx, zy) = b.gradient(&SpectralField::zeros(b.shape())).unwrap();
        assert_eq!(zx.max_abs() + zy.max_abs(), 0.0);
    }

    #[test]
    fn single_mode_velocity() {
        let b = basis(15);
        let u = b.riesz_velocity(&SpectralField::mode(b.shape(), 1, 1)).unwrap();
        let c = 2.0 / (PI * SQRT_2);
        let d = b.domain();
        for i in 0..15 {
            for k in 0..15 {
                let [x, y] = d.point(i, k);
                assert!((u.u1.get(i, k) + c * x.sin() * y.cos()).abs() < 1e-13);
                assert!((u.u2.get(i, k) - c * x.cos() * y.sin()).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn velocity_is_divergence_free() {
        let b = Domain::new(2.0, 1.0, 24, 17).map(SineBasis::new).unwrap();
        let theta = b.to_spectral(&random_field(&b, 11)).unwrap();
        let u = b.riesz_velocity(&theta).unwrap();
        let div = b.divergence(&u).unwrap();
        assert!(div.max_abs() <= 1e-10 * u.max_speed(), "{}", div.max_abs());
        let zero = b.riesz_velocity(&SpectralField::zeros(b.shape())).unwrap();
        assert_eq!(zero.max_speed(), 0.0);
    }

    #[test]
    fn velocity_gradient_consistent_with_velocity() {
        let b = basis(20);
        let theta = SpectralField::mode(b.shape(), 2, 3);
        let g = b.velocity_gradient(&theta).unwrap();
        let u = b.riesz_velocity(&theta).unwrap();
        let div = g[0][0].zip_map(&g[1][1], |a, c| a + c).unwrap();
        assert!(div.max_abs() < 1e-13);
        // d/dy u1 at one point against a centered difference of the closed form
        let d = b.domain();
        let psi = 1.0 / 13f64.sqrt();
        let u1 = |x: f64, y: f64| -psi * 3.0 * (2.0 / PI) * (2.0 * x).sin() * (3.0 * y).cos();
        let [x, y] = d.point(6, 9);
        let h = 1e-5;
        let fd = (u1(x, y + h) - u1(x, y - h)) / (2.0 * h);
        assert!((g[0][1].get(6, 9) - fd).abs() < 1e-7);
        assert!((u.u1.get(6, 9) - u1(x, y)).abs() < 1e-13);
    }

    #[test]
    fn unit_norm_by_quadrature() {
        let b = Domain::new(1.3, 0.7, 40, 40).map(SineBasis::new).unwrap();
        let d = b.domain();
        for (j, k) in [(1, 1), (2, 5), (7, 3)] {
            let g = b.from_spectral(&SpectralField::mode(b.shape(), j, k)).unwrap();
            assert!((g.l2_norm(d) - 1.0).abs() < 1e-10);
        }
    }
}
