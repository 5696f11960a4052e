//! Grid shift differences `delta_h f(x) = f(x + h) - f(x)`.

use ndarray::Array2;

use crate::domain::{Domain, GridField};
use crate::error::{Error, Result};

/// A grid field that is only defined on part of the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialField {
    values: GridField,
    defined: Array2<bool>,
}

impl PartialField {
    /// Values; undefined points hold 0.
    /// `values` restricted to the points where `like` is defined.
    pub(crate) fn masked(values: GridField, like: &PartialField) -> Self {
        let mut values = values;
        for (v, &d) in values.values_mut().iter_mut().zip(like.defined.iter()) {
            if !d {
                *v = 0.0;
            }
        }
        Self {
            values,
            defined: like.defined.clone(),
        }
    }

    pub fn values(&self) -> &GridField {
        &self.values
    }

    pub fn is_defined(&self, i: usize, k: usize) -> bool {
        self.defined[[i, k]]
    }

    pub fn get(&self, i: usize, k: usize) -> Option<f64> {
        self.defined[[i, k]].then(|| self.values.get(i, k))
    }

    pub fn defined_count(&self) -> usize {
        self.defined.iter().filter(|&&d| d).count()
    }

    /// Largest `|value|` over the defined points.
    pub fn max_abs(&self) -> f64 {
        self.values
            .values()
            .iter()
            .zip(self.defined.iter())
            .filter(|(_, &d)| d)
            .fold(0.0, |m, (v, _)| m.max(v.abs()))
    }
}

/// `f(x + h) - f(x)` for a grid-aligned displacement of `h` steps, defined
/// exactly where `x + h` is again a grid point of the domain.
pub fn delta_h(domain: &Domain, f: &GridField, h: [i64; 2]) -> Result<PartialField> {
    f.check_shape(domain)?;
    let (nx, ny) = domain.shape();
    if h[0].unsigned_abs() as usize >= nx || h[1].unsigned_abs() as usize >= ny {
        return Err(Error::Displacement(h[0], h[1], "longer than the grid".into()));
    }
    let v = f.values();
    let mut defined = Array2::from_elem((nx, ny), false);
    let mut out = Array2::zeros((nx, ny));
    for i in 0..nx {
        let a = i as i64 + h[0];
        if a < 0 || a >= nx as i64 {
            continue;
        }
        for k in 0..ny {
            let b = k as i64 + h[1];
            if b < 0 || b >= ny as i64 {
                continue;
            }
            defined[[i, k]] = true;
            out[[i, k]] = v[[a as usize, b as usize]] - v[[i, k]];
        }
    }
    Ok(PartialField {
        values: GridField::new(out),
        defined,
    })
}

/// Physical length of a displacement given in grid steps.
pub fn step_length(domain: &Domain, h: [i64; 2]) -> f64 {
    (h[0] as f64 * domain.dx()).hypot(h[1] as f64 * domain.dy())
}
