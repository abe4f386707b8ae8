//! Truncated energies `I_n(λ, u) = ∫ Φ(r, u') − λ ∫ F_n(u)` on radial
//! grids, their minimization, and the comparison-ramp negativity test.
//!
//! The constant surface factor `ω_{N−1}` is dropped: energies are per unit
//! solid angle, which leaves signs and minimizers unchanged.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nonlinearity::Nonlinearity;
use crate::primitive::{PrimitiveCalculus, PrimitiveError};
use crate::quadrature::gk21;

pub mod grid;
pub mod minimize;
pub mod potential;

pub use grid::{GridFunction, RadialGrid};
pub use minimize::{
    minimize, minimize_from, run_sequence, sequence_csv, MinimizeOptions, MinimizeResult, SequenceItem,
    SequenceReport, StartKind,
};
pub use potential::{check_hypotheses, HypothesisReport, PLaplacePotential, Potential, RadialWeightPotential};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VariationalError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("f(α_n) = {value} at α_n = {alpha} exceeds the zero tolerance {tol}")]
    NotAZero { alpha: f64, value: f64, tol: f64 },
    #[error("no stationary point after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        best: Box<MinimizeResult>,
    },
    #[error(transparent)]
    Primitive(#[from] PrimitiveError),
}

/// `f_n = f(0)` below 0, `f` on `[0, α_n]`, `0` above `α_n`.
#[derive(Debug, Clone)]
pub struct TruncatedNonlinearity {
    pc: PrimitiveCalculus,
    alpha_n: f64,
    f0: f64,
    f_alpha: f64,
    cap: f64,
}

impl TruncatedNonlinearity {
    /// Requires `|f(α_n)| ≤ zero_tol` so that `f_n` is continuous.
    pub fn new(pc: PrimitiveCalculus, alpha_n: f64, zero_tol: f64) -> Result<Self, VariationalError> {
        let value = pc.nonlinearity().eval(alpha_n);
        if !(value.abs() <= zero_tol) {
            return Err(VariationalError::NotAZero {
                alpha: alpha_n,
                value,
                tol: zero_tol,
            });
        }
        Self::capped(pc, alpha_n)
    }

    /// Truncation at an arbitrary level; `f_n` may jump at `α_n`.
    pub fn capped(pc: PrimitiveCalculus, alpha_n: f64) -> Result<Self, VariationalError> {
        if !(alpha_n > 0.0 && alpha_n.is_finite()) {
            return Err(VariationalError::Domain(format!("truncation level must be positive, got {alpha_n}")));
        }
        let f0 = pc.nonlinearity().eval(0.0);
        let f_alpha = pc.nonlinearity().eval(alpha_n);
        let cap = pc.antiderivative(alpha_n)?;
        Ok(Self {
            pc,
            alpha_n,
            f0,
            f_alpha,
            cap,
        })
    }

    pub fn base(&self) -> &Nonlinearity {
        self.pc.nonlinearity()
    }

    pub fn primitive(&self) -> &PrimitiveCalculus {
        &self.pc
    }

    pub fn alpha_n(&self) -> f64 {
        self.alpha_n
    }

    /// Jump of `f_n` at `α_n`, `|f(α_n)|`.
    pub fn jump_at_alpha(&self) -> f64 {
        self.f_alpha.abs()
    }

    pub fn f_n(&self, s: f64) -> f64 {
        if s < 0.0 {
            self.f0
        } else if s <= self.alpha_n {
            self.pc.nonlinearity().eval(s)
        } else {
            0.0
        }
    }

    pub fn big_f_n(&self, s: f64) -> Result<f64, VariationalError> {
        Ok(if s < 0.0 {
            self.f0 * s
        } else if s < self.alpha_n {
            self.pc.antiderivative(s)?
        } else {
            self.cap
        })
    }
}

pub(crate) fn check_lambda(lambda: f64) -> Result<(), VariationalError> {
    if lambda >= 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(VariationalError::Domain(format!("λ must be finite and ≥ 0, got {lambda}")))
    }
}

/// `Σ_j w_j [Φ(r_{j+½}, Du_j) − λ F_n(u_{j+½})]` with `w_j = ∫ r^{N−1}` over
/// cell `j` and `Du_j` the difference quotient.
pub fn assemble_energy<P: Potential + ?Sized>(
    u: &GridFunction,
    tn: &TruncatedNonlinearity,
    pot: &P,
    lambda: f64,
) -> Result<f64, VariationalError> {
    let g = &u.grid;
    let v = &u.values;
    let mut gradient_part = 0.0;
    let mut potential_part = 0.0;
    for j in 0..g.cells() {
        let w = g.cell_weight(j);
        let du = (v[j + 1] - v[j]) / g.cell_width(j);
        gradient_part += w * pot.phi(g.cell_mid(j), du);
        if lambda != 0.0 {
            potential_part += w * tn.big_f_n(0.5 * (v[j] + v[j + 1]))?;
        }
    }
    Ok(gradient_part - lambda * potential_part)
}

/// `∫_a^{a+Δ} g` as `Δ ∫_0^1 g(a + Δt) dt`, one 21-point Kronrod rule per
/// piece between `breaks`. Passing the increment keeps it free of the
/// rounding in `(a + Δ) − a`.
fn increment_rule(g: impl Fn(f64) -> f64, a: f64, delta: f64, breaks: &[f64]) -> f64 {
    if delta == 0.0 {
        return 0.0;
    }
    let unit = |t: f64| g(a + delta * t);
    let mut cuts: Vec<f64> = breaks
        .iter()
        .map(|&k| (k - a) / delta)
        .filter(|&t| t > 0.0 && t < 1.0)
        .collect();
    cuts.sort_by(f64::total_cmp);
    let mut total = 0.0;
    let mut t0 = 0.0;
    for t in cuts {
        total += gk21(&unit, t0, t).0;
        t0 = t;
    }
    total += gk21(&unit, t0, 1.0).0;
    delta * total
}

/// `I(v) − I(u)` accumulated cell by cell from integrals of `Φ'` and `f_n`
/// across the change. Subtracting two assembled energies loses everything
/// below `ε Σ |terms|`, which is where the last Armijo steps live.
pub fn energy_difference<P: Potential + ?Sized>(
    u: &GridFunction,
    v: &GridFunction,
    tn: &TruncatedNonlinearity,
    pot: &P,
    lambda: f64,
) -> Result<f64, VariationalError> {
    let g = &u.grid;
    let (a, b) = (&u.values, &v.values);
    let breaks = [0.0, tn.alpha_n()];
    let mut total = 0.0;
    for j in 0..g.cells() {
        if a[j] == b[j] && a[j + 1] == b[j + 1] {
            continue;
        }
        let w = g.cell_weight(j);
        let h = g.cell_width(j);
        let rm = g.cell_mid(j);
        let (d0, d1) = (b[j] - a[j], b[j + 1] - a[j + 1]);
        let xa = (a[j + 1] - a[j]) / h;
        total += w * increment_rule(|xi| pot.dphi(rm, xi), xa, (d1 - d0) / h, &[0.0]);
        if lambda != 0.0 {
            let ma = 0.5 * (a[j] + a[j + 1]);
            let dm = 0.5 * (d0 + d1);
            // long segments: the primitive is accurate and cancellation harmless
            let df = if dm.abs() > 1.0 {
                tn.big_f_n(0.5 * (b[j] + b[j + 1]))? - tn.big_f_n(ma)?
            } else {
                increment_rule(|s| tn.f_n(s), ma, dm, &breaks)
            };
            total -= lambda * w * df;
        }
    }
    Ok(total)
}

/// Exact gradient of [`assemble_energy`] with respect to every nodal value.
/// The Dirichlet entry is returned as well and is ignored by the optimizer.
pub fn energy_gradient<P: Potential + ?Sized>(
    u: &GridFunction,
    tn: &TruncatedNonlinearity,
    pot: &P,
    lambda: f64,
) -> Vec<f64> {
    let g = &u.grid;
    let v = &u.values;
    let mut grad = vec![0.0; v.len()];
    for j in 0..g.cells() {
        let w = g.cell_weight(j);
        let h = g.cell_width(j);
        let flux = w * pot.dphi(g.cell_mid(j), (v[j + 1] - v[j]) / h) / h;
        let source = 0.5 * lambda * w * tn.f_n(0.5 * (v[j] + v[j + 1]));
        grad[j] += -flux - source;
        grad[j + 1] += flux - source;
    }
    grad
}

/// `w(r) = γ min(1, (R − r)/δ)` sampled on the grid.
pub fn comparison_function(gamma: f64, delta: f64, grid: &RadialGrid) -> Result<GridFunction, VariationalError> {
    let radius = grid.radius();
    if !(delta > 0.0 && delta < radius) || !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(VariationalError::Domain(format!(
            "need 0 < δ < R and γ ≥ 0, got δ = {delta}, γ = {gamma}, R = {radius}"
        )));
    }
    Ok(GridFunction::from_fn(grid, |r| gamma * ((radius - r) / delta).min(1.0)))
}

/// Discrete `I_n(λ, w)` for the comparison ramp, and whether it is negative.
pub fn negativity_test<P: Potential + ?Sized>(
    tn: &TruncatedNonlinearity,
    pot: &P,
    lambda: f64,
    gamma: f64,
    delta: f64,
    grid: &RadialGrid,
) -> Result<(bool, f64), VariationalError> {
    check_lambda(lambda)?;
    let w = comparison_function(gamma, delta, grid)?;
    let e = assemble_energy(&w, tn, pot, lambda)?;
    Ok((e < 0.0, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradientCheck {
    pub max_abs_error: f64,
    pub gradient_scale: f64,
    pub relative_error: f64,
}

/// Central differences of the energy against [`energy_gradient`], error
/// relative to the max-norm of the analytic gradient.
pub fn gradient_check<P: Potential + ?Sized>(
    u: &GridFunction,
    tn: &TruncatedNonlinearity,
    pot: &P,
    lambda: f64,
    step: f64,
) -> Result<GradientCheck, VariationalError> {
    let grad = energy_gradient(u, tn, pot, lambda);
    let mut worst: f64 = 0.0;
    let mut probe = u.clone();
    #[allow(clippy::needless_range_loop)]
    for j in 0..u.values.len() - 1 {
        let h = step * (1.0 + u.values[j].abs());
        probe.values[j] = u.values[j] + h;
        let ep = assemble_energy(&probe, tn, pot, lambda)?;
        probe.values[j] = u.values[j] - h;
        let em = assemble_energy(&probe, tn, pot, lambda)?;
        probe.values[j] = u.values[j];
        worst = worst.max(((ep - em) / (2.0 * h) - grad[j]).abs());
    }
    let scale = grad[..grad.len() - 1].iter().fold(0.0f64, |m, g| m.max(g.abs()));
    Ok(GradientCheck {
        max_abs_error: worst,
        gradient_scale: scale,
        relative_error: if scale > 0.0 { worst / scale } else { worst },
    })
}
