use std::path::{Path, PathBuf};

use osc_core::nonlinearity::NonlinearitySpec;
use osc_core::thresholds::Operator;
use osc_core::{Nonlinearity, PrimitiveCalculus};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Everything a run needs; unknown keys are rejected so typos fail early.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub nonlinearity: NonlinearitySpec,
    pub operator: OperatorSpec,
    #[serde(default)]
    pub geometry: Geometry,
    #[serde(default)]
    pub scan: Option<Scan>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub analysis: AnalysisSpec,
    #[serde(default)]
    pub shoot: Option<ShootSpec>,
    #[serde(default)]
    pub diagram: DiagramSpec,
    #[serde(default)]
    pub minimize: MinimizeSpec,
    #[serde(default)]
    pub certify: CertifySpec,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum OperatorSpec {
    Plap { p: f64 },
    Pucci {
        #[serde(rename = "Lambda")]
        lambda_ell: f64,
    },
}

impl OperatorSpec {
    pub fn operator(&self) -> Operator {
        match *self {
            OperatorSpec::Plap { p } => Operator::PLaplacian { p },
            OperatorSpec::Pucci { lambda_ell } => Operator::Pucci { lambda_ell },
        }
    }

    /// `(p, Λ)` for the primitive calculus; Pucci runs are 2-homogeneous.
    pub fn p_and_lambda(&self) -> (f64, f64) {
        match *self {
            OperatorSpec::Plap { p } => (p, 1.0),
            OperatorSpec::Pucci { lambda_ell } => (2.0, lambda_ell),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    #[serde(rename = "N")]
    pub n_dim: usize,
    #[serde(rename = "R")]
    pub radius: f64,
}

impl Default for Geometry {
    fn default() -> Self {
        Self { n_dim: 1, radius: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scan {
    pub c_min: f64,
    pub c_max: f64,
    pub points: usize,
    #[serde(default)]
    pub log_spacing: bool,
    /// Bisection depth of the extra points placed around each zero of `f`.
    #[serde(default)]
    pub refine_depth: u32,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub tol_ode: f64,
    pub event_tol: f64,
    pub tol_stat: f64,
    /// Slack allowed on every inequality before it counts as violated.
    pub property_tol: f64,
    /// Largest acceptable drift of the shooting energy identity.
    pub energy_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol_ode: 1e-10,
            event_tol: 1e-12,
            tol_stat: 1e-8,
            property_tol: 1e-8,
            energy_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSpec {
    pub count: usize,
    pub beta: f64,
    pub m: Option<f64>,
    /// Upper end of the `F`, `F̄`, `F_Λ` samples; the largest stored zero when absent.
    pub sample_max: Option<f64>,
    pub samples: usize,
    /// Random abscissae for the primitive spot checks.
    pub spot_checks: usize,
}

impl Default for AnalysisSpec {
    fn default() -> Self {
        Self {
            count: 12,
            beta: 1.0,
            m: None,
            sample_max: None,
            samples: 200,
            spot_checks: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShootSpec {
    pub c: f64,
    #[serde(default = "one")]
    pub lambda: f64,
    #[serde(default = "default_trajectory_points")]
    pub trajectory_points: usize,
}

fn one() -> f64 {
    1.0
}

fn default_trajectory_points() -> usize {
    1000
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagramSpec {
    pub lambda_star: Vec<f64>,
    /// Targets given as multiples of `λ̄`; triggers a threshold analysis.
    pub lambda_bar_multiples: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MinimizeSpec {
    pub k: usize,
    /// Fixed `λ`; otherwise `lambda_bar_multiple · λ̄`.
    pub lambda: Option<f64>,
    pub lambda_bar_multiple: f64,
    pub cells: usize,
    pub grading: f64,
    pub max_iter: usize,
}

impl Default for MinimizeSpec {
    fn default() -> Self {
        Self {
            k: 5,
            lambda: None,
            lambda_bar_multiple: 10.0,
            cells: 300,
            grading: 2.0,
            max_iter: 5000,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CertifySpec {
    /// Diagram CSV written by `osc diagram`, relative to the config file.
    pub diagram: Option<PathBuf>,
    /// Known limits replacing the numerical estimates.
    pub l_minus: Option<f64>,
    pub l_plus: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    /// Relative to the config file; `--out` wins.
    pub dir: Option<PathBuf>,
}

/// A parsed, validated config with the bytes it came from.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub config: RunConfig,
    pub nonlinearity: Nonlinearity,
    pub raw: Vec<u8>,
    pub base_dir: PathBuf,
}

impl Loaded {
    pub fn primitive(&self) -> Result<PrimitiveCalculus, CliError> {
        let (p, lambda_ell) = self.config.operator.p_and_lambda();
        PrimitiveCalculus::new(self.nonlinearity.clone(), p, lambda_ell).map_err(|e| CliError::config(e.to_string()))
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }
}

pub fn load(path: &Path) -> Result<Loaded, CliError> {
    let raw = std::fs::read(path).map_err(|e| CliError::config(format!("reading {}: {e}", path.display())))?;
    let config: RunConfig =
        serde_json::from_slice(&raw).map_err(|e| CliError::config(format!("parsing {}: {e}", path.display())))?;
    let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let nonlinearity = Nonlinearity::from_spec(&config.nonlinearity).map_err(|e| CliError::config(e.to_string()))?;
    let loaded = Loaded {
        config,
        nonlinearity,
        raw,
        base_dir,
    };
    validate(&loaded)?;
    Ok(loaded)
}

fn positive(name: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::config(format!("{name} must be positive and finite, got {x}")))
    }
}

pub fn validate(loaded: &Loaded) -> Result<(), CliError> {
    let cfg = &loaded.config;
    match cfg.operator {
        OperatorSpec::Plap { p } if !(p > 1.0 && p.is_finite()) => {
            return Err(CliError::config(format!("operator.plap.p must exceed 1, got {p}")))
        }
        OperatorSpec::Pucci { lambda_ell } if !(lambda_ell >= 1.0 && lambda_ell.is_finite()) => {
            return Err(CliError::config(format!("operator.pucci.Lambda must be at least 1, got {lambda_ell}")))
        }
        _ => {}
    }
    if cfg.geometry.n_dim == 0 {
        return Err(CliError::config("geometry.N must be at least 1"));
    }
    positive("geometry.R", cfg.geometry.radius)?;
    let t = &cfg.tolerances;
    for (name, x) in [
        ("tolerances.tol_ode", t.tol_ode),
        ("tolerances.event_tol", t.event_tol),
        ("tolerances.tol_stat", t.tol_stat),
        ("tolerances.property_tol", t.property_tol),
        ("tolerances.energy_tol", t.energy_tol),
    ] {
        positive(name, x)?;
    }
    if let Some(scan) = &cfg.scan {
        positive("scan.c_min", scan.c_min)?;
        positive("scan.c_max", scan.c_max)?;
    }
    if let Some(s) = &cfg.shoot {
        positive("shoot.c", s.c)?;
        positive("shoot.lambda", s.lambda)?;
    }
    for &l in cfg.diagram.lambda_star.iter().chain(&cfg.diagram.lambda_bar_multiples) {
        positive("diagram lambda target", l)?;
    }
    if cfg.analysis.count == 0 {
        return Err(CliError::config("analysis.count must be at least 1"));
    }
    positive("analysis.beta", cfg.analysis.beta)?;
    let m = &cfg.minimize;
    if m.k == 0 || m.cells == 0 {
        return Err(CliError::config("minimize.k and minimize.cells must be at least 1"));
    }
    positive("minimize.grading", m.grading)?;
    positive("minimize.lambda_bar_multiple", m.lambda_bar_multiple)?;
    if let Some(l) = m.lambda {
        positive("minimize.lambda", l)?;
    }
    if let Some(d) = &cfg.certify.diagram {
        let path = loaded.resolve(d);
        if !path.is_file() {
            return Err(CliError::config(format!("certify.diagram {} does not exist", path.display())));
        }
    }
    match (cfg.certify.l_minus, cfg.certify.l_plus) {
        (Some(a), Some(b)) if a.is_nan() || b.is_nan() || a > b => {
            return Err(CliError::config(format!("certify limits need L- ≤ L+, got {a} and {b}")))
        }
        (Some(_), None) | (None, Some(_)) => {
            return Err(CliError::config("certify.l_minus and certify.l_plus go together"))
        }
        _ => {}
    }
    Ok(())
}
