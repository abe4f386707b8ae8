//! Existence and nonexistence thresholds on balls.
//!
//! `λ̲` bounds from below every `λ` at which radial solutions can blow up
//! (or shrink) towards `ℓ`; `λ_n` is the level above which the truncated
//! energy is negative on a boundary-layer ramp of height `γ_n`, and `λ̄`
//! is its limit.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nonlinearity::{Direction, Nonlinearity, NonlinearityError, NonlinearityKind, ZeroSequence};
use crate::primitive::{LimitEstimate, LimitOptions, LimitTarget, PrimitiveCalculus, PrimitiveError};
use crate::roots::golden_max;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThresholdError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no boundary-layer width gives C1 > 0 for γ = {gamma}")]
    InfeasibleDelta { gamma: f64 },
    #[error("F̄({gamma}) = {fbar} is not positive")]
    NonpositiveFbar { gamma: f64, fbar: f64 },
    #[error("reduction not applicable: {0}")]
    NotApplicable(String),
    #[error(transparent)]
    Primitive(#[from] PrimitiveError),
    #[error(transparent)]
    Nonlinearity(#[from] NonlinearityError),
}

/// Volume of the unit ball in `R^N`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / n as f64 * unit_ball_volume(n - 2),
    }
}

/// Ball of radius `R` in `R^N` with boundary layer `Ω_δ` of width `δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallGeometry {
    pub n: usize,
    pub r: f64,
    pub delta: f64,
}

impl BallGeometry {
    pub fn new(n: usize, r: f64, delta: f64) -> Result<Self, ThresholdError> {
        if n == 0 {
            return Err(ThresholdError::Domain("dimension must be at least 1".into()));
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(ThresholdError::Domain(format!("radius must be positive, got {r}")));
        }
        if !(delta > 0.0 && delta < r) {
            return Err(ThresholdError::Domain(format!("need 0 < δ < R, got δ = {delta}, R = {r}")));
        }
        Ok(Self { n, r, delta })
    }

    /// `|Ω| = ω_N R^N`
    pub fn measure(&self) -> f64 {
        unit_ball_volume(self.n) * self.r.powi(self.n as i32)
    }

    /// `|Ω_δ| = ω_N (R^N − (R−δ)^N)`
    pub fn layer_measure(&self) -> f64 {
        unit_ball_volume(self.n) * (self.r.powi(self.n as i32) - (self.r - self.delta).powi(self.n as i32))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Operator {
    PLaplacian { p: f64 },
    Pucci { lambda_ell: f64 },
}

fn check_limits(l_minus: f64, l_plus: f64) -> Result<(), ThresholdError> {
    if l_minus.is_nan() || l_plus.is_nan() {
        return Err(ThresholdError::Domain("limit estimates must not be NaN".into()));
    }
    if l_minus > l_plus {
        return Err(ThresholdError::Domain(format!("L⁻ = {l_minus} exceeds L⁺ = {l_plus}")));
    }
    Ok(())
}

/// `L⁺ − min{0, L⁻}`, or `None` in the degenerate cases where `λ̲ = ∞`.
fn effective_limit(l_minus: f64, l_plus: f64) -> Option<f64> {
    if l_plus < 0.0 || (l_minus == 0.0 && l_plus == 0.0) {
        None
    } else {
        Some(l_plus - l_minus.min(0.0))
    }
}

/// `λ̲ = (p−1) / (p R^p (L⁺ − min{0, L⁻}))`; `∞` when `L⁺ < 0` or
/// `L⁻ = L⁺ = 0`, and `0` when the denominator is infinite.
pub fn lambda_under_plap(p: f64, r: f64, l_minus: f64, l_plus: f64) -> Result<f64, ThresholdError> {
    if !(p > 1.0) || !(r > 0.0) {
        return Err(ThresholdError::Domain(format!("need p > 1 and R > 0, got p = {p}, R = {r}")));
    }
    check_limits(l_minus, l_plus)?;
    Ok(match effective_limit(l_minus, l_plus) {
        None => f64::INFINITY,
        Some(d) => (p - 1.0) / (p * r.powf(p) * d),
    })
}

/// `λ̲ = 1 / (2 Λ R² (L⁺_Λ − min{0, L⁻_Λ}))` with the same degenerate cases.
pub fn lambda_under_pucci(lambda_ell: f64, r: f64, l_minus: f64, l_plus: f64) -> Result<f64, ThresholdError> {
    if !(lambda_ell >= 1.0) || !(r > 0.0) {
        return Err(ThresholdError::Domain(format!(
            "need Λ ≥ 1 and R > 0, got Λ = {lambda_ell}, R = {r}"
        )));
    }
    check_limits(l_minus, l_plus)?;
    Ok(match effective_limit(l_minus, l_plus) {
        None => f64::INFINITY,
        Some(d) => 1.0 / (2.0 * lambda_ell * r * r * d),
    })
}

/// One entry of the threshold sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaTerm {
    pub n: usize,
    pub gamma: f64,
    pub delta: f64,
    pub c1: f64,
    pub c2: f64,
    pub fbar: f64,
    pub lambda: f64,
}

/// Relative boundary-layer widths `δ/R` tried per term.
pub fn delta_fractions() -> Vec<f64> {
    (0..64).map(|k| 10f64.powf(-4.0 * (1.0 - k as f64 / 64.0))).collect()
}

/// `C1 = |Ω|/(1+M) − |Ω_δ|` towards zero, `|Ω|/(2(1+M)) − |Ω_δ|` towards infinity.
pub fn c1_constant(geom: &BallGeometry, m: f64, direction: Direction) -> f64 {
    let share = match direction {
        Direction::Zero => 1.0 / (1.0 + m),
        Direction::Infinity => 1.0 / (2.0 * (1.0 + m)),
    };
    share * geom.measure() - geom.layer_measure()
}

/// `C2 = (β/p) |Ω| / δ^p`
pub fn c2_constant(geom: &BallGeometry, beta: f64, p: f64) -> f64 {
    beta / p * geom.measure() / geom.delta.powf(p)
}

/// `λ_n = (C2/C1) γ_n^p / F̄(γ_n)` minimized over the `δ`-grid, for each
/// supplied `γ_n` (`n` is 1-based in the output).
pub fn lambda_n_sequence(
    pc: &PrimitiveCalculus,
    n_dim: usize,
    radius: f64,
    gammas: &[f64],
    m: f64,
    beta: f64,
    direction: Direction,
) -> Result<Vec<LambdaTerm>, ThresholdError> {
    if !(m >= 0.0) || !(beta > 0.0) {
        return Err(ThresholdError::Domain(format!("need M ≥ 0 and β > 0, got M = {m}, β = {beta}")));
    }
    let p = pc.p();
    gammas
        .par_iter()
        .enumerate()
        .map(|(i, &gamma)| {
            if !(gamma > 0.0) {
                return Err(ThresholdError::Domain(format!("γ must be positive, got {gamma}")));
            }
            let fbar = pc.running_range(gamma)?;
            if !(fbar > 0.0) {
                return Err(ThresholdError::NonpositiveFbar { gamma, fbar });
            }
            let mut best: Option<LambdaTerm> = None;
            for t in delta_fractions() {
                let geom = BallGeometry::new(n_dim, radius, t * radius)?;
                let c1 = c1_constant(&geom, m, direction);
                if c1 <= 0.0 {
                    continue;
                }
                let c2 = c2_constant(&geom, beta, p);
                let lambda = c2 / c1 * gamma.powf(p) / fbar;
                if best.is_none_or(|b| lambda < b.lambda) {
                    best = Some(LambdaTerm {
                        n: i + 1,
                        gamma,
                        delta: geom.delta,
                        c1,
                        c2,
                        fbar,
                        lambda,
                    });
                }
            }
            best.ok_or(ThresholdError::InfeasibleDelta { gamma })
        })
        .collect()
}

/// Mean of the last quartile of the sequence and whether that quartile
/// (plus one preceding term) is monotone.
pub fn lambda_bar(terms: &[LambdaTerm]) -> Option<(f64, bool)> {
    if terms.is_empty() {
        return None;
    }
    let q = (terms.len() / 4).max(1);
    let tail = &terms[terms.len() - q..];
    let mean = tail.iter().map(|t| t.lambda).sum::<f64>() / q as f64;
    let window = &terms[terms.len().saturating_sub(q + 1)..];
    let up = window.windows(2).all(|w| w[1].lambda >= w[0].lambda);
    let down = window.windows(2).all(|w| w[1].lambda <= w[0].lambda);
    Some((mean, up || down))
}

/// The search interval for `γ_n`: `(α_{n−1}, α_n]` towards infinity,
/// `[α_{n+1}, α_n]` towards zero.
pub fn gamma_interval(zeros: &ZeroSequence, n: usize) -> Option<(f64, f64)> {
    if n == 0 || n > zeros.len() {
        return None;
    }
    match zeros.direction {
        Direction::Infinity => {
            let hi = zeros.alpha(n);
            let lo = if n == 1 { hi * 1e-3 } else { zeros.alpha(n - 1) };
            Some((lo, hi))
        }
        Direction::Zero => {
            if n + 1 > zeros.len() {
                return None;
            }
            Some((zeros.alpha(n + 1), zeros.alpha(n)))
        }
    }
}

/// Maximizer of `F̄(s)/s^p` on the `n`-th zero interval: coarse scan, then
/// golden section around the best sample.
pub fn select_gamma(pc: &PrimitiveCalculus, zeros: &ZeroSequence, n: usize) -> Result<f64, ThresholdError> {
    let (lo, hi) = gamma_interval(zeros, n)
        .ok_or_else(|| ThresholdError::Domain(format!("no zero interval for n = {n}")))?;
    let p = pc.p();
    let ratio = |s: f64| -> f64 { pc.running_range(s).map(|v| v / s.powf(p)).unwrap_or(f64::NEG_INFINITY) };
    let samples = 64;
    let xs: Vec<f64> = (0..=samples).map(|k| lo + (hi - lo) * k as f64 / samples as f64).collect();
    let (mut k_best, mut v_best) = (samples, ratio(hi));
    for (k, &x) in xs.iter().enumerate().skip(1) {
        let v = ratio(x);
        if v > v_best {
            k_best = k;
            v_best = v;
        }
    }
    let a = xs[k_best.saturating_sub(1)].max(lo);
    let b = xs[(k_best + 1).min(samples)];
    let (x, v) = golden_max(ratio, a, b, 1e-10 * hi);
    Ok(if v >= v_best { x } else { xs[k_best] })
}

/// Smallest `M ≥ 0` with `−min_{[0,γ]} F ≤ M F(γ)` on every `γ`. The flag
/// is false when some `F(γ) ≤ 0`, where no finite `M` can work.
pub fn estimate_m(pc: &PrimitiveCalculus, gammas: &[f64]) -> Result<(f64, bool), ThresholdError> {
    let mut m: f64 = 0.0;
    let mut holds = true;
    for &g in gammas {
        let f = pc.antiderivative(g)?;
        let low = pc.running_min(g)?;
        if f <= 0.0 {
            holds = false;
            continue;
        }
        m = m.max(-low / f);
    }
    Ok((m.max(0.0), holds))
}

/// `(p−1) c^p / (p R^p F̄(c))`: the least `λ` on `B_R` admitting a radial
/// solution of height `c`.
pub fn per_solution_lower_bound(pc: &PrimitiveCalculus, c: f64, p: f64, r: f64) -> Result<f64, ThresholdError> {
    let fbar = pc.running_range(c)?;
    if !(fbar > 0.0) {
        return Err(ThresholdError::NonpositiveFbar { gamma: c, fbar });
    }
    Ok((p - 1.0) * c.powf(p) / (p * r.powf(p) * fbar))
}

/// `c² / (2 Λ R² F̄_Λ(c))`, the Pucci analogue.
pub fn per_solution_lower_bound_pucci(pc: &PrimitiveCalculus, c: f64, r: f64) -> Result<f64, ThresholdError> {
    let fbar = pc.running_range_lambda(c)?;
    if !(fbar > 0.0) {
        return Err(ThresholdError::NonpositiveFbar { gamma: c, fbar });
    }
    Ok(c * c / (2.0 * pc.lambda_ell() * r * r * fbar))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub nonlinearity: Nonlinearity,
    /// False when `f(0) ≥ 0` and the input is returned unchanged.
    pub applied: bool,
    pub alpha1: Option<f64>,
}

/// For `f(0) < 0` towards infinity: `g = f⁺` on `[0, α_1]` and `g = f`
/// beyond. Thresholds for `g` apply to `f`.
pub fn reduce_negative_f0(nl: &Nonlinearity) -> Result<Reduction, ThresholdError> {
    if nl.f0 >= 0.0 {
        return Ok(Reduction {
            nonlinearity: nl.clone(),
            applied: false,
            alpha1: None,
        });
    }
    if nl.direction != Direction::Infinity {
        return Err(ThresholdError::NotApplicable(
            "f(0) < 0 is incompatible with zeros accumulating at 0".into(),
        ));
    }
    let alpha1 = nl.find_zeros(1)?.alpha(1);
    let g = Nonlinearity::new(
        NonlinearityKind::PositivePartBelow {
            base: Box::new(nl.clone()),
            threshold: alpha1,
        },
        Direction::Infinity,
    )?;
    Ok(Reduction {
        nonlinearity: g,
        applied: true,
        alpha1: Some(alpha1),
    })
}

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    pub n_dim: usize,
    pub radius: f64,
    /// Number of zeros (and `λ_n` terms) to compute.
    pub count: usize,
    pub beta: f64,
    /// Fixed `M`; estimated from the `γ_n` when absent.
    pub m: Option<f64>,
    /// Fixed `γ_n`; selected per zero interval when absent.
    pub gammas: Option<Vec<f64>>,
    pub limits: LimitOptions,
    pub ordering_tol: f64,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            n_dim: 1,
            radius: 1.0,
            count: 12,
            beta: 1.0,
            m: None,
            gammas: None,
            limits: LimitOptions::default(),
            ordering_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub operator: Operator,
    pub direction: Direction,
    pub zeros: Option<ZeroSequence>,
    pub limits: LimitEstimate,
    pub limits_lambda: LimitEstimate,
    #[serde(with = "crate::ext")]
    pub lambda_under: f64,
    #[serde(with = "crate::ext")]
    pub lambda_under_plap: f64,
    #[serde(with = "crate::ext")]
    pub lambda_under_pucci: f64,
    pub lambda_n_sequence: Vec<LambdaTerm>,
    #[serde(with = "crate::ext::option")]
    pub lambda_bar: Option<f64>,
    pub lambda_bar_monotone: bool,
    pub m: f64,
    pub m_bound_holds: bool,
    pub ordering_ok: bool,
    pub reduced_negative_f0: bool,
    pub formulas: Vec<String>,
    pub notes: Vec<String>,
}

/// Full threshold analysis: zeros, limit estimates, `λ̲` for both
/// operators, `λ_n` and `λ̄`. `pc` carries `p` and `Λ`.
pub fn analyze(pc: &PrimitiveCalculus, operator: Operator, opts: &AnalyzeOptions) -> Result<ThresholdReport, ThresholdError> {
    let mut notes = Vec::new();
    let reduction = reduce_negative_f0(pc.nonlinearity())?;
    let owned;
    let pc = if reduction.applied {
        notes.push(format!(
            "f(0) < 0: thresholds computed for g = f⁺ on [0, {}] and g = f beyond",
            reduction.alpha1.unwrap_or(f64::NAN)
        ));
        owned = PrimitiveCalculus::new(reduction.nonlinearity.clone(), pc.p(), pc.lambda_ell())?;
        &owned
    } else {
        pc
    };
    let direction = pc.nonlinearity().direction;
    let limits = pc.estimate_limits(direction, LimitTarget::F, &opts.limits)?;
    let limits_lambda = pc.estimate_limits(direction, LimitTarget::FLambda, &opts.limits)?;
    let under_plap = lambda_under_plap(pc.p(), opts.radius, limits.l_minus, limits.l_plus)?;
    let under_pucci = lambda_under_pucci(pc.lambda_ell(), opts.radius, limits_lambda.l_minus, limits_lambda.l_plus)?;
    let lambda_under = match operator {
        Operator::PLaplacian { .. } => under_plap,
        Operator::Pucci { .. } => under_pucci,
    };

    let zeros = match pc.nonlinearity().find_zeros(opts.count + 1) {
        Ok(z) => Some(z),
        Err(NonlinearityError::NoZerosFound { found, .. }) => {
            notes.push(format!("only {found} zeros found; λ_n sequence skipped"));
            None
        }
        Err(e) => return Err(e.into()),
    };

    let mut sequence = Vec::new();
    let (mut m, mut m_holds) = (0.0, true);
    if let Some(z) = &zeros {
        let gammas = match &opts.gammas {
            Some(g) => g.clone(),
            None => (1..=opts.count)
                .map(|n| select_gamma(pc, z, n))
                .collect::<Result<Vec<_>, _>>()?,
        };
        let (m_est, holds) = estimate_m(pc, &gammas)?;
        m = opts.m.unwrap_or(m_est);
        m_holds = holds && m >= m_est;
        match lambda_n_sequence(pc, opts.n_dim, opts.radius, &gammas, m, opts.beta, direction) {
            Ok(s) => sequence = s,
            Err(ThresholdError::NonpositiveFbar { gamma, fbar }) => {
                notes.push(format!("F̄({gamma}) = {fbar} ≤ 0; λ_n sequence skipped"));
            }
            Err(e) => return Err(e),
        }
    }
    let (lambda_bar_value, monotone) = match lambda_bar(&sequence) {
        Some((v, mono)) => (Some(v), mono),
        None => (None, false),
    };
    let ordering_ok = match lambda_bar_value {
        Some(bar) if lambda_under.is_finite() => lambda_under <= bar * (1.0 + opts.ordering_tol),
        _ => true,
    };
    if limits.classification != crate::primitive::LimitClass::FinitePair {
        notes.push(format!("limit classification {:?}", limits.classification));
    }
    notes.push("L⁻, L⁺, L⁻_Λ, L⁺_Λ are numerical estimates, not certified limits".into());
    Ok(ThresholdReport {
        operator,
        direction,
        zeros,
        limits,
        limits_lambda,
        lambda_under,
        lambda_under_plap: under_plap,
        lambda_under_pucci: under_pucci,
        lambda_n_sequence: sequence,
        lambda_bar: lambda_bar_value,
        lambda_bar_monotone: monotone,
        m,
        m_bound_holds: m_holds,
        ordering_ok,
        reduced_negative_f0: reduction.applied,
        formulas: vec![
            "lambda_under_plap = (p-1) / (p R^p (L+ - min(0, L-)))".into(),
            "lambda_under_pucci = 1 / (2 Lambda R^2 (L+_Lambda - min(0, L-_Lambda)))".into(),
            "lambda_n = (C2 / C1) gamma_n^p / Fbar(gamma_n)".into(),
            match direction {
                Direction::Zero => "C1 = |B_R| / (1 + M) - |layer_delta|".into(),
                Direction::Infinity => "C1 = |B_R| / (2 (1 + M)) - |layer_delta|".into(),
            },
            "C2 = (beta / p) |B_R| / delta^p".into(),
            "lambda_bar = mean of the last quartile of lambda_n".into(),
        ],
        notes,
    })
}
