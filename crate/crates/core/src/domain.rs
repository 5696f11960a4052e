//! Rectangles, collocation grids and grid-valued fields.
//!
//! The grid is the DST-I grid: `n` strictly interior points per direction,
//! `x_i = i * L / (n + 1)` for `i = 1..=n`. Boundary values are implicitly zero.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A rectangle `(0, lx) x (0, ly)` with an `nx x ny` interior collocation grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    lx: f64,
    ly: f64,
    nx: usize,
    ny: usize,
}

impl Domain {
    pub const MIN_POINTS: usize = 4;

    pub fn new(lx: f64, ly: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(lx > 0.0 && lx.is_finite() && ly > 0.0 && ly.is_finite()) {
            return Err(Error::InvalidDomain(format!(
                "side lengths must be positive and finite, got ({lx}, {ly})"
            )));
        }
        if nx < Self::MIN_POINTS || ny < Self::MIN_POINTS {
            return Err(Error::InvalidDomain(format!(
                "need at least {} points per direction, got ({nx}, {ny})",
                Self::MIN_POINTS
            )));
        }
        Ok(Self { lx, ly, nx, ny })
    }

    /// The square `(0, pi)^2` with `n x n` interior points.
    pub fn square_pi(n: usize) -> Result<Self> {
        Self::new(std::f64::consts::PI, std::f64::consts::PI, n, n)
    }

    pub fn lx(&self) -> f64 {
        self.lx
    }

    pub fn ly(&self) -> f64 {
        self.ly
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn dx(&self) -> f64 {
        self.lx / (self.nx + 1) as f64
    }

    pub fn dy(&self) -> f64 {
        self.ly / (self.ny + 1) as f64
    }

    /// Coordinate of the zero-based grid index `i` along the first axis.
    pub fn x(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.dx()
    }

    pub fn y(&self, k: usize) -> f64 {
        (k + 1) as f64 * self.dy()
    }

    pub fn point(&self, i: usize, k: usize) -> [f64; 2] {
        [self.x(i), self.y(k)]
    }

    pub fn min_side(&self) -> f64 {
        self.lx.min(self.ly)
    }

    /// Largest admissible cutoff scale, `min(lx, ly) / 4`.
    pub fn ell_max(&self) -> f64 {
        self.min_side() / 4.0
    }

    pub fn contains_closed(&self, p: [f64; 2]) -> bool {
        p[0] >= 0.0 && p[0] <= self.lx && p[1] >= 0.0 && p[1] <= self.ly
    }

    /// Exact distance to the boundary of the rectangle.
    pub fn distance_to_boundary(&self, p: [f64; 2]) -> Result<f64> {
        if !self.contains_closed(p) {
            return Err(Error::OutsideDomain(p[0], p[1]));
        }
        Ok(self.distance_unchecked(p))
    }

    pub(crate) fn distance_unchecked(&self, p: [f64; 2]) -> f64 {
        p[0].min(self.lx - p[0]).min(p[1]).min(self.ly - p[1])
    }

    /// Distance to the boundary of grid point `(i, k)`.
    pub fn grid_distance(&self, i: usize, k: usize) -> f64 {
        self.distance_unchecked(self.point(i, k))
    }

    /// Same rectangle with `factor (n + 1) - 1` points per direction; the
    /// original grid point `i` becomes refined index `factor (i + 1) - 1`.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::InvalidParameter("refinement factor must be >= 1".into()));
        }
        Self::new(
            self.lx,
            self.ly,
            factor * (self.nx + 1) - 1,
            factor * (self.ny + 1) - 1,
        )
    }

    /// Same rectangle with a different resolution.
    pub fn with_points(&self, nx: usize, ny: usize) -> Result<Self> {
        Self::new(self.lx, self.ly, nx, ny)
    }

    pub fn same_rectangle(&self, other: &Domain) -> bool {
        self.lx == other.lx && self.ly == other.ly
    }

    /// Samples `f` on the interior grid.
    pub fn sample<F: Fn(f64, f64) -> f64>(&self, f: F) -> GridField {
        GridField::from_fn(self.shape(), |i, k| f(self.x(i), self.y(k)))
    }

    pub fn distance_field(&self) -> GridField {
        self.sample(|x, y| self.distance_unchecked([x, y]))
    }
}

/// Point values on the interior collocation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    values: Array2<f64>,
}

impl GridField {
    pub fn new(values: Array2<f64>) -> Self {
        Self { values }
    }

    pub fn zeros(shape: (usize, usize)) -> Self {
        Self {
            values: Array2::zeros(shape),
        }
    }

    pub fn from_fn<F: FnMut(usize, usize) -> f64>(shape: (usize, usize), mut f: F) -> Self {
        Self {
            values: Array2::from_shape_fn(shape, |(i, k)| f(i, k)),
        }
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut Array2<f64> {
        &mut self.values
    }

    pub fn into_values(self) -> Array2<f64> {
        self.values
    }

    pub fn shape(&self) -> (usize, usize) {
        self.values.dim()
    }

    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.values[[i, k]]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Checks the field against a domain's grid shape.
    pub fn check_shape(&self, domain: &Domain) -> Result<()> {
        check_shape(domain.shape(), self.shape())
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> GridField {
        GridField {
            values: self.values.mapv(f),
        }
    }

    pub fn zip_map<F: Fn(f64, f64) -> f64>(&self, other: &GridField, f: F) -> Result<GridField> {
        check_shape(self.shape(), other.shape())?;
        let mut values = self.values.clone();
        values.zip_mut_with(&other.values, |a, &b| *a = f(*a, b));
        Ok(GridField { values })
    }

    /// Midpoint-rule `L^2` norm on a grid of spacing `dx x dy`.
    pub fn l2_norm(&self, domain: &Domain) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * domain.dx() * domain.dy()).sqrt()
    }
}

pub(crate) fn check_shape(expected: (usize, usize), found: (usize, usize)) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}
