//! The report file written by `solve` and `verify` and read by `report`.
//! JSON cannot hold `inf` or `NaN`, so non-finite numbers are written as the
//! strings `"inf"`, `"-inf"` and `"nan"`.

use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sqg_core::{BoundFitReport, BoundKind, Verdict};

use crate::CliError;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            v if v.is_finite() => s.serialize_f64(v),
            v if v.is_nan() => s.serialize_str("nan"),
            v if v > 0.0 => s.serialize_str("inf"),
            _ => s.serialize_str("-inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(v) => Ok(Num(v)),
            Raw::Text(t) => match t.as_str() {
                "inf" => Ok(Num(f64::INFINITY)),
                "-inf" => Ok(Num(f64::NEG_INFINITY)),
                "nan" => Ok(Num(f64::NAN)),
                other => Err(serde::de::Error::custom(format!("not a number: {other:?}"))),
            },
        }
    }
}

impl std::fmt::Display for Num {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_finite() && self.0 != 0.0 && (self.0.abs() < 1e-3 || self.0.abs() >= 1e5) {
            write!(f, "{:.4e}", self.0)
        } else if self.0.is_finite() {
            write!(f, "{:.6}", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// One verified inequality or monitor.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Row {
    pub id: String,
    pub statement: String,
    pub kind: BoundKind,
    pub verdict: Verdict,
    pub constant: Num,
    pub coarse_constant: Num,
    pub stability: Num,
    pub parameter: Option<Num>,
    pub sweep: String,
    pub sweep_size: usize,
    pub details: Vec<(String, Num)>,
}

impl PartialEq for Row {
    // bitwise on numbers, so that NaN fields compare equal to themselves
    fn eq(&self, other: &Self) -> bool {
        let bits = |n: &Num| n.0.to_bits();
        self.id == other.id
            && self.statement == other.statement
            && self.kind == other.kind
            && self.verdict == other.verdict
            && bits(&self.constant) == bits(&other.constant)
            && bits(&self.coarse_constant) == bits(&other.coarse_constant)
            && bits(&self.stability) == bits(&other.stability)
            && self.parameter.map(|p| p.0.to_bits()) == other.parameter.map(|p| p.0.to_bits())
            && self.sweep == other.sweep
            && self.sweep_size == other.sweep_size
            && self.details.len() == other.details.len()
            && self.details.iter().zip(&other.details).all(|(a, b)| a.0 == b.0 && bits(&a.1) == bits(&b.1))
    }
}

impl From<&BoundFitReport> for Row {
    fn from(r: &BoundFitReport) -> Self {
        Row {
            id: r.id.clone(),
            statement: statement(&r.id).to_string(),
            kind: r.kind,
            verdict: r.verdict,
            constant: Num(r.constant),
            coarse_constant: Num(r.coarse_constant),
            stability: Num(r.stability),
            parameter: r.parameter.map(Num),
            sweep: r.sweep.clone(),
            sweep_size: r.sweep_size,
            details: r.details.iter().map(|(k, v)| (k.clone(), Num(*v))).collect(),
        }
    }
}

impl Row {
    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }

    /// A single-run check with no refinement: both constants are `value`.
    pub fn check(id: &str, kind: BoundKind, value: f64, passed: bool, sweep: String, size: usize) -> Row {
        Row {
            id: id.into(),
            statement: statement(id).into(),
            kind,
            verdict: Verdict::from_bool(passed),
            constant: Num(value),
            coarse_constant: Num(value),
            stability: Num(1.0),
            parameter: None,
            sweep,
            sweep_size: size,
            details: Vec::new(),
        }
    }

    pub fn detail(mut self, key: &str, value: f64) -> Row {
        self.details.push((key.into(), Num(value)));
        self
    }
}

/// Plain-language name of the inequality behind a report id.
pub fn statement(id: &str) -> &'static str {
    let table: &[(&str, &str)] = &[
        ("kernel.cross_oracle", "interval heat kernel: eigenseries equals image sum"),
        ("thetalow", "heat content lower bound near the boundary"),
        ("thetaup", "heat content upper bound near the boundary"),
        ("hb.upper", "two-sided Gaussian bound on the Dirichlet heat kernel (upper)"),
        ("hb.lower", "two-sided Gaussian bound on the Dirichlet heat kernel (lower)"),
        ("grbx", "gradient of the heat kernel relative to the kernel"),
        ("naxnaxb", "translation defect of the heat kernel, mixed derivatives"),
        ("cancel", "translation defect of the heat kernel"),
        ("intpk", "integrated heat kernel powers"),
        ("cutoff", "derivative bounds of the good cutoff"),
        ("chij", "kernel integrals of the cutoff"),
        ("nachij", "Hölder kernel integrals of the cutoff"),
        ("cordoba", "pointwise Córdoba-Córdoba inequality with boundary repulsion"),
        ("nlbd", "nonlinear lower bound on D for gradients"),
        ("nlb", "nonlinear lower bound on D for finite differences"),
        ("commutator.torus", "commutators vanish on the torus"),
        ("commutator.shift", "commutator of finite differences with Lambda"),
        ("commutator.gradient", "commutator of the gradient with Lambda"),
        ("riesz.difference", "finite differences of the Riesz velocity"),
        ("riesz.gradient", "gradient of the Riesz velocity"),
        ("halfspace.lambda_one", "Lambda 1 on the half line"),
        ("halfspace.c1", "normalization constant of Lambda on the half line"),
        ("halfspace.cancellation", "normal-derivative cancellation of the half-space kernel"),
        ("halfspace.gradient_ratio", "logarithmic gradient of the half-space kernel"),
        ("galerkin.h2_energy", "local H2 energy estimate"),
        ("solve.max_principle", "maximum principle"),
        ("solve.l2_decay", "L2 decay"),
        ("solve.contamination", "odd symmetry of the torus product"),
        ("solve.energy_law", "discrete energy law"),
        ("solve.outcome", "run completed without blow-up or resolution failure"),
        ("monitor.holder", "interior Hölder bound in time"),
        ("monitor.gradient", "interior gradient bound in time"),
    ];
    table
        .iter()
        .find(|(prefix, _)| id.starts_with(prefix))
        .map_or("unclassified", |e| e.1)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportFile {
    pub format: u32,
    pub command: String,
    pub suite: Option<String>,
    pub seed: u64,
    pub rows: Vec<Row>,
}

impl ReportFile {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read report {}: {e}", path.display())))?;
        let file: ReportFile =
            serde_json::from_str(&text).map_err(|e| CliError::Input(format!("report {}: {e}", path.display())))?;
        if file.format != FORMAT_VERSION {
            return Err(CliError::Input(format!("report {}: unsupported format {}", path.display(), file.format)));
        }
        Ok(file)
    }

    /// Writes `<stem>.json` and `<stem>.csv` into `dir`.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<(), CliError> {
        std::fs::write(dir.join(format!("{stem}.json")), serde_json::to_string_pretty(self)?)?;
        write_rows_csv(&dir.join(format!("{stem}.csv")), &self.rows)
    }
}

pub const CSV_HEADER: [&str; 10] =
    ["id", "statement", "kind", "verdict", "constant", "coarse_constant", "stability", "parameter", "sweep", "sweep_size"];

pub fn write_rows_csv(path: &Path, rows: &[Row]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Io(e.to_string()))?;
    let err = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(err)?;
    for r in rows {
        let num = |n: Num| n.0.to_string();
        w.write_record([
            r.id.clone(),
            r.statement.clone(),
            format!("{:?}", r.kind).to_lowercase(),
            if r.passed() { "pass".into() } else { "fail".into() },
            num(r.constant),
            num(r.coarse_constant),
            num(r.stability),
            r.parameter.map(num).unwrap_or_default(),
            r.sweep.clone(),
            r.sweep_size.to_string(),
        ])
        .map_err(err)?;
    }
    w.flush()?;
    Ok(())
}
