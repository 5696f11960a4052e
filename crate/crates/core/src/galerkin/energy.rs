//! The local `H^2` energy estimate of the Galerkin system,
//!
//! ```text
//! d/dt y + z^2 <= C y z,      y = ||Lambda^2 theta||^2,  z = ||Lambda^{5/2} theta||,
//! ```
//!
//! and its integrated form `sup y + int z^2 <= K y(0)` on `[0, T_loc]`. After
//! Young's inequality `y' <= C^2 y^2 / 2`, so `y <= 2 y(0)` as long as
//! `t <= T_loc = 1 / (C^2 y(0))`.

use serde::{Deserialize, Serialize};

use super::Trajectory;
use crate::report::{BoundFitReport, BoundKind, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct H2Fit {
    /// Smallest `C` with `y' + z^2 <= C y z` at every record (0 when the
    /// left side is never positive).
    pub c: f64,
    pub t_loc: f64,
    /// Smallest `K` with `y(t) + int_0^t z^2 <= K y(0)` for records in `[0, T_loc]`.
    pub k: f64,
    /// `int z^2` over the whole trajectory.
    pub integral: f64,
}

pub fn h2_energy_fit(traj: &Trajectory) -> H2Fit {
    let mut c = 0.0_f64;
    for r in &traj.rows {
        let y = r.h2 * r.h2;
        let lhs = r.dh2sq_dt + r.h25 * r.h25;
        if lhs > 0.0 && y > 0.0 {
            c = c.max(lhs / (y * r.h25));
        }
    }
    let y0 = traj.rows.first().map_or(0.0, |r| r.h2 * r.h2);
    let t_loc = if c > 0.0 && y0 > 0.0 { 1.0 / (c * c * y0) } else { f64::INFINITY };
    let k = if y0 > 0.0 {
        traj.rows
            .iter()
            .filter(|r| r.t <= t_loc)
            .map(|r| (r.h2 * r.h2 + r.h25_integral) / y0)
            .fold(0.0, f64::max)
    } else {
        0.0
    };
    H2Fit {
        c,
        t_loc,
        k,
        integral: traj.rows.last().map_or(0.0, |r| r.h25_integral),
    }
}

/// Compares the fits of two runs of the same datum (typically `dt` and
/// `dt / 2`). The `C = 0` branch (no record with `y' + z^2 > 0`, as for pure
/// dissipation) passes when it occurs in both runs.
pub fn h2_energy_check(coarse: &Trajectory, fine: &Trajectory) -> BoundFitReport {
    let (a, b) = (h2_energy_fit(coarse), h2_energy_fit(fine));
    let sweep = format!("{} and {} records", coarse.rows.len(), fine.rows.len());
    let size = coarse.rows.len() + fine.rows.len();
    let mut r = if a.c == 0.0 && b.c == 0.0 {
        let mut r = BoundFitReport::from_fits("galerkin.h2_energy", BoundKind::Upper, 1.0, 1.0, sweep, size);
        r.constant = 0.0;
        r.coarse_constant = 0.0;
        r
    } else {
        BoundFitReport::from_fits("galerkin.h2_energy", BoundKind::Upper, a.c, b.c, sweep, size)
    };
    let finite = b.integral.is_finite() && b.k.is_finite() && a.k.is_finite();
    if !finite {
        r.verdict = Verdict::Fail;
    }
    r.with_detail("k", b.k)
        .with_detail("k.coarse", a.k)
        .with_detail("t_loc", b.t_loc)
        .with_detail("h25_integral", b.integral)
}
