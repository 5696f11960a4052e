//! Run configuration, read from TOML. Every table and key is optional; a
//! missing key takes the default shown in `docs/formats.md`.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sqg_core::galerkin::io::CheckpointFormat;
use sqg_core::{Domain, GaussianBump, GridField, SineBasis, SolverConfig};

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Seed for every synthetic field (random data, random test corpora).
    pub seed: u64,
    pub domain: DomainConfig,
    pub initial: InitialData,
    pub solver: SolverConfig,
    pub monitors: MonitorConfig,
    pub output: OutputConfig,
    pub verify: VerifyConfig,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Input(format!("config {}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is always representable in TOML")
    }
}

/// The rectangle `(0, lx) x (0, ly)` and its interior grid. `points`
/// is the solver grid and defaults to the solver's mode count; the
/// verification suites set their own grids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DomainConfig {
    pub lx: f64,
    pub ly: f64,
    pub points: Option<usize>,
}

impl Default for DomainConfig {
    fn default() -> Self {
        Self { lx: PI, ly: PI, points: None }
    }
}

impl DomainConfig {
    pub fn build(&self, default_points: usize) -> Result<Domain, CliError> {
        let n = self.points.unwrap_or(default_points);
        self.with_points(n)
    }

    /// The rectangle with an explicit grid, ignoring `points`.
    pub fn with_points(&self, n: usize) -> Result<Domain, CliError> {
        Domain::new(self.lx, self.ly, n, n).map_err(|e| CliError::Input(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialData {
    Zero,
    /// Gaussian bump; center and widths default to the standard bump.
    Bump {
        #[serde(default = "one")]
        amplitude: f64,
        center: Option<[f64; 2]>,
        sigma: Option<[f64; 2]>,
    },
    /// Random smooth sine series (see `random_smooth`), scaled to `amplitude`
    /// in its largest coefficient. Drawn from the run seed.
    Random {
        #[serde(default = "one")]
        amplitude: f64,
        modes: usize,
        kappa: f64,
    },
    /// One eigenfunction `w_jk`.
    Mode {
        #[serde(default = "one")]
        amplitude: f64,
        j: usize,
        k: usize,
    },
}

fn one() -> f64 {
    1.0
}

impl Default for InitialData {
    fn default() -> Self {
        InitialData::Bump { amplitude: 1.0, center: None, sigma: None }
    }
}

impl InitialData {
    pub fn sample(&self, domain: &Domain, seed: u64) -> Result<GridField, CliError> {
        let basis = || SineBasis::new(*domain);
        let synth = |a: sqg_core::SpectralField| basis().from_spectral(&a).map_err(CliError::from);
        match self {
            InitialData::Zero => Ok(GridField::zeros(domain.shape())),
            InitialData::Bump { amplitude, center, sigma } => {
                let standard = GaussianBump::standard(domain, *amplitude);
                let bump = GaussianBump {
                    center: center.unwrap_or(standard.center),
                    sigma: sigma.unwrap_or(standard.sigma),
                    amplitude: *amplitude,
                };
                Ok(bump.sample(domain))
            }
            InitialData::Random { amplitude, modes, kappa } => {
                synth(sqg_core::fields::random_smooth(domain.shape(), *modes, *kappa, seed).scaled(*amplitude))
            }
            InitialData::Mode { amplitude, j, k } => {
                let (nx, ny) = domain.shape();
                if *j == 0 || *k == 0 || *j > nx || *k > ny {
                    return Err(CliError::Input(format!("mode ({j}, {k}) outside 1..={nx} x 1..={ny}")));
                }
                synth(sqg_core::SpectralField::mode(domain.shape(), *j, *k).scaled(*amplitude))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonitorConfig {
    /// Allowed relative excess of `||theta(t)||_inf` over `||theta_0||_inf`.
    pub sup_slack: f64,
    /// Largest tolerated torus contamination.
    pub contamination: f64,
    /// Largest tolerated trapezoid energy-law ratio.
    pub energy_law: f64,
    /// Hölder monitor with `alpha = holder_epsilon / ||theta_0||_inf`.
    pub holder: bool,
    pub holder_epsilon: f64,
    /// Cutoff scale of the restricted Hölder seminorm.
    pub ell: f64,
    /// Weighted gradient monitor.
    pub gradient: bool,
}

impl Default for MonitorConfig {
    fn default() -> Self {
        Self {
            sup_slack: 1e-8,
            contamination: 1e-12,
            energy_law: 10.0,
            holder: true,
            holder_epsilon: 0.1,
            ell: 0.5,
            gradient: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub checkpoint_format: CheckpointFormat,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { checkpoint_format: CheckpointFormat::Binary }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub kernel: KernelSuite,
    pub cordoba: CordobaSuite,
    pub lower_bounds: LowerBoundSuite,
    pub commutators: CommutatorSuite,
    pub riesz: RieszSuite,
    pub halfspace: HalfSpaceSuite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelSuite {
    /// Interior sample points per direction at the coarse level.
    pub points: usize,
    pub t_min: f64,
    pub horizon: f64,
    pub window: f64,
    /// Times of the eigenseries / image-sum cross-check.
    pub cross_times: Vec<f64>,
    /// Grid of the cutoff checks (the smallest scale needs 4 spacings).
    pub cutoff_points: usize,
    pub cutoff_ells: Vec<f64>,
    pub cutoff_js: Vec<f64>,
    pub cutoff_alphas: Vec<f64>,
    /// Exponent `k` of the integrated-kernel formulas.
    pub intpk_k: f64,
}

impl Default for KernelSuite {
    fn default() -> Self {
        Self {
            points: 16,
            t_min: 1e-3,
            horizon: 1.0,
            window: 0.1,
            cross_times: vec![1e-3, 1e-2, 0.1, 1.0],
            cutoff_points: 128,
            cutoff_ells: vec![0.1, 0.2, 0.4],
            cutoff_js: vec![-0.5, 0.0, 1.0, 2.0],
            cutoff_alphas: vec![0.0, 0.5, 0.9],
            intpk_k: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CordobaSuite {
    /// Coarse grid; the fine grid has `2 n + 1` points.
    pub n: usize,
    pub fields: usize,
    pub modes: usize,
    pub kappa: f64,
    pub s: f64,
    pub phis: Vec<String>,
    pub tolerance: f64,
}

impl Default for CordobaSuite {
    fn default() -> Self {
        Self {
            n: 32,
            fields: 3,
            modes: 8,
            kappa: 3.0,
            s: 1.0,
            phis: vec!["square".into(), "quartic".into()],
            tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LowerBoundSuite {
    pub n: usize,
    pub h_steps: Vec<i64>,
    pub ells: Vec<f64>,
    pub alpha: f64,
    pub s: f64,
}

impl Default for LowerBoundSuite {
    fn default() -> Self {
        Self { n: 64, h_steps: vec![2, 4, 8], ells: vec![0.25, 0.5], alpha: 0.5, s: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CommutatorSuite {
    /// Grid of the shift commutator on the configured rectangle.
    pub shift_n: usize,
    pub shift_ell: f64,
    pub h_steps: Vec<i64>,
    /// The gradient commutator runs on the square `(0, side)^2`.
    pub gradient_side: f64,
    pub gradient_n: usize,
    pub gradient_ells: Vec<f64>,
    pub torus_n: usize,
}

impl Default for CommutatorSuite {
    fn default() -> Self {
        Self {
            shift_n: 511,
            shift_ell: 0.5,
            h_steps: vec![1, 2, 4],
            gradient_side: 4.0,
            gradient_n: 255,
            gradient_ells: vec![0.2, 0.4, 0.8],
            torus_n: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RieszSuite {
    pub n: usize,
    pub ell: f64,
    pub h_steps: Vec<i64>,
    pub policy: sqg_core::interior::RhoPolicy,
}

impl Default for RieszSuite {
    fn default() -> Self {
        Self { n: 64, ell: 0.5, h_steps: vec![2, 4], policy: Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HalfSpaceSuite {
    pub heights: Vec<f64>,
    /// `(x2, t)` samples of the cancellation identity.
    pub cancellation: Vec<[f64; 2]>,
}

impl Default for HalfSpaceSuite {
    fn default() -> Self {
        Self {
            heights: vec![0.5, 1.0, 2.0],
            cancellation: vec![[0.5, 0.1], [1.0, 0.1], [1.0, 1.0], [2.0, 0.5], [0.2, 0.01]],
        }
    }
}
