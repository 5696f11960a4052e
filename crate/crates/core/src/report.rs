//! Fitted-constant reports shared by every verification sweep.

use serde::{Deserialize, Serialize};

/// Whether a constant is an upper-bound constant (smallest `C` that works) or
/// a lower-bound constant (largest `c` that works).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

/// Outcome of fitting one inequality's constant over a parameter sweep at two
/// resolutions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundFitReport {
    pub id: String,
    pub kind: BoundKind,
    /// Fitted constant at the finer resolution.
    pub constant: f64,
    /// Same fit at the coarser resolution.
    pub coarse_constant: f64,
    /// `constant / coarse_constant`.
    pub stability: f64,
    /// A secondary fitted parameter (Gaussian exponent, threshold), if any.
    pub parameter: Option<f64>,
    pub sweep: String,
    pub sweep_size: usize,
    pub verdict: Verdict,
    /// Free-form extra fits: alternative exponents, branch splits, witnesses.
    #[serde(default)]
    pub details: Vec<(String, f64)>,
}

/// Accepted drift of a fitted constant under refinement.
pub const STABILITY_BAND: (f64, f64) = (0.5, 2.0);

pub fn is_stable(ratio: f64) -> bool {
    ratio.is_finite() && ratio >= STABILITY_BAND.0 && ratio <= STABILITY_BAND.1
}

impl BoundFitReport {
    /// Builds a report whose verdict is "constant positive, finite and stable".
    pub fn from_fits(
        id: impl Into<String>,
        kind: BoundKind,
        coarse: f64,
        fine: f64,
        sweep: impl Into<String>,
        sweep_size: usize,
    ) -> Self {
        let stability = fine / coarse;
        let ok = fine.is_finite() && coarse.is_finite() && fine > 0.0 && coarse > 0.0 && is_stable(stability);
        Self {
            id: id.into(),
            kind,
            constant: fine,
            coarse_constant: coarse,
            stability,
            parameter: None,
            sweep: sweep.into(),
            sweep_size,
            verdict: Verdict::from_bool(ok),
            details: Vec::new(),
        }
    }

    pub fn with_parameter(mut self, p: f64) -> Self {
        self.parameter = Some(p);
        self
    }

    pub fn with_detail(mut self, key: impl Into<String>, value: f64) -> Self {
        self.details.push((key.into(), value));
        self
    }

    pub fn fail_if(mut self, cond: bool) -> Self {
        if cond {
            self.verdict = Verdict::Fail;
        }
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }
}

/// Running maximum or minimum of a ratio, remembering the sample count.
#[derive(Debug, Clone, Copy)]
pub struct Extremum {
    kind: BoundKind,
    value: f64,
    count: usize,
}

impl Extremum {
    pub fn new(kind: BoundKind) -> Self {
        let value = match kind {
            BoundKind::Upper => f64::NEG_INFINITY,
            BoundKind::Lower => f64::INFINITY,
        };
        Self { kind, value, count: 0 }
    }

    pub fn push(&mut self, v: f64) {
        self.count += 1;
        self.value = match self.kind {
            BoundKind::Upper => self.value.max(v),
            BoundKind::Lower => self.value.min(v),
        };
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn count(&self) -> usize {
        self.count
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_follows_stability() {
        let r = BoundFitReport::from_fits("x", BoundKind::Upper, 1.0, 1.5, "s", 3);
        assert!(r.passed());
        let r = BoundFitReport::from_fits("x", BoundKind::Upper, 1.0, 2.5, "s", 3);
        assert!(!r.passed());
        let r = BoundFitReport::from_fits("x", BoundKind::Lower, 0.0, 0.0, "s", 3);
        assert!(!r.passed());
    }

    #[test]
    fn extremum_tracks_direction() {
        let mut up = Extremum::new(BoundKind::Upper);
        let mut lo = Extremum::new(BoundKind::Lower);
        for v in [3.0, -1.0, 2.0] {
            up.push(v);
            lo.push(v);
        }
        assert_eq!((up.value(), lo.value(), up.count()), (3.0, -1.0, 3));
    }

    #[test]
    fn serializes_round_trip() {
        let r = BoundFitReport::from_fits("hb.upper", BoundKind::Upper, 1.0, 1.1, "grid", 10)
            .with_parameter(5.0)
            .with_detail("K=8", 0.7);
        let s = serde_json::to_string(&r).unwrap();
        let back: BoundFitReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }
}
