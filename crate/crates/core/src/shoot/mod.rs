//! Radial shooting from the center of a ball.
//!
//! A trajectory starts at height `c` with zero slope and is integrated
//! outward until it first reaches zero at `ρ`. Homogeneity then turns `ρ`
//! into the `λ` for which the profile solves the Dirichlet problem on `B_R`.

pub mod diagram;
pub mod plap;
pub mod pucci;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ode::OdeError;
use crate::primitive::PrimitiveError;
use crate::thresholds::ThresholdError;

pub use diagram::{BifurcationDiagram, DiagramConfig, DiagramPoint};
pub use plap::{shoot, ShootConfig};
pub use pucci::{pucci_shoot, PucciShootConfig};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ShootError {
    #[error("f({c}) = 0: the trajectory from c = {c} is constant")]
    StalledAtCriticalPoint { c: f64 },
    #[error("integration failed: {0}")]
    NonintegrableStep(#[from] OdeError),
    #[error("invalid shooting input: {0}")]
    Domain(String),
    #[error("trajectory did not reach zero")]
    NotAZeroHit,
    #[error("empty c-grid")]
    EmptyGrid,
    #[error(transparent)]
    Primitive(#[from] PrimitiveError),
    #[error(transparent)]
    Threshold(#[from] ThresholdError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    HitZero { rho: f64 },
    /// Slope returned to zero at `r_turn` with `v_turn > 0`.
    Bounced { r_turn: f64, v_turn: f64 },
    Stalled,
    HorizonExceeded,
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::HitZero { .. } => "hit_zero",
            Outcome::Bounced { .. } => "bounced",
            Outcome::Stalled => "stalled",
            Outcome::HorizonExceeded => "horizon_exceeded",
        }
    }

    pub fn rho(&self) -> Option<f64> {
        match self {
            Outcome::HitZero { rho } => Some(*rho),
            _ => None,
        }
    }
}

/// One trajectory sample. `dissipation` is `(N−1) ∫_0^r |v'|^p / t dt`
/// (zero for Pucci trajectories).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub r: f64,
    pub v: f64,
    pub dv: f64,
    pub dissipation: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub energy_residual_max: Option<f64>,
    pub f_at_max_ok: bool,
    pub area_condition_ok: bool,
    pub lower_bound: Option<f64>,
    pub lower_bound_slack: Option<f64>,
    /// Minimum normalized slack of the Pucci gradient inequality.
    pub pucci_min_slack: Option<f64>,
    pub q_sign_changes: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShootResult {
    pub c: f64,
    pub outcome: Outcome,
    pub lambda_shoot: f64,
    pub trajectory: Vec<TrajectoryPoint>,
    pub lambda_rescaled: Option<f64>,
    pub diagnostics: Diagnostics,
    pub steps: usize,
    pub rejected_steps: usize,
}

impl ShootResult {
    pub(crate) fn stalled(c: f64, lambda_shoot: f64) -> Self {
        Self {
            c,
            outcome: Outcome::Stalled,
            lambda_shoot,
            trajectory: vec![TrajectoryPoint {
                r: 0.0,
                v: c,
                dv: 0.0,
                dissipation: 0.0,
            }],
            lambda_rescaled: None,
            diagnostics: Diagnostics::default(),
            steps: 0,
            rejected_steps: 0,
        }
    }

    /// Every `stride`-th sample plus the last, for compact output.
    pub fn downsampled(&self, count: usize) -> Vec<TrajectoryPoint> {
        let n = self.trajectory.len();
        if count == 0 || n <= count {
            return self.trajectory.clone();
        }
        let mut out: Vec<TrajectoryPoint> = (0..count - 1)
            .map(|k| self.trajectory[k * (n - 1) / (count - 1)])
            .collect();
        out.push(self.trajectory[n - 1]);
        out
    }
}

/// `λ = λ_shoot (ρ/R)^exponent`: exponent `p` for the p-Laplacian, 2 for Pucci.
pub fn rescale(res: &ShootResult, radius: f64, exponent: f64) -> Result<f64, ShootError> {
    let rho = res.outcome.rho().ok_or(ShootError::NotAZeroHit)?;
    rescale_rho(rho, res.lambda_shoot, radius, exponent)
}

pub fn rescale_rho(rho: f64, lambda_shoot: f64, radius: f64, exponent: f64) -> Result<f64, ShootError> {
    if !(radius > 0.0) {
        return Err(ShootError::Domain(format!("radius must be positive, got {radius}")));
    }
    Ok(lambda_shoot * (rho / radius).powf(exponent))
}

/// Tolerance for sign-type checks on primitives at height `c`.
pub(crate) fn primitive_tol(f_c: f64) -> f64 {
    1e-8 * (1.0 + f_c.abs())
}

/// Stall test: `f(c)` at the rounding level of the evaluation.
pub(crate) fn is_critical(fc: f64, c: f64) -> bool {
    fc.abs() <= 4.0 * f64::EPSILON * c.abs().max(1.0)
}
