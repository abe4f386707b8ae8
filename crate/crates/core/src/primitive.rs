//! Cached primitives of `f`: `F`, the running range `F̄`, the sign-weighted
//! `F_Λ`, the two-point minimum `F̲`, and tail estimates of `F(s)/s^p`.
//!
//! Values are accumulated over cells on which `f` keeps one sign, so `F`,
//! `F⁺`, `F⁻` and `F_Λ` are monotone inside every cell and running extrema
//! only need the cell endpoints. Cells are bounded by the knots of `f` and
//! by a fixed geometric base grid, which makes the checkpoint set
//! independent of query order.

use std::f64::consts::PI;

use parking_lot::RwLock;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nonlinearity::{Direction, Nonlinearity, NonlinearityKind};
use crate::quadrature::{integrate, QuadratureError, QuadratureOptions};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PrimitiveError {
    #[error("quadrature failed: {0}")]
    Quadrature(#[from] QuadratureError),
    #[error("domain error: {0}")]
    Domain(String),
}

/// Base grid `2^(BASE_EXP0 + k / BASE_PER_OCTAVE)`.
const BASE_EXP0: f64 = -40.0;
const BASE_PER_OCTAVE: f64 = 8.0;
/// Largest argument the cache will extend to.
pub const MAX_ARGUMENT: f64 = 1e9;

/// Index of the reciprocal zero below which the asymptotic expansion is used.
const RECIPROCAL_CUTOFF_INDEX: f64 = 2000.0;
const RECIPROCAL_EXPANSION_DEPTH: usize = 10;

fn base_point(k: i64) -> f64 {
    (BASE_EXP0 + k as f64 / BASE_PER_OCTAVE).exp2()
}

/// Smallest base index whose point is strictly above `x`.
fn base_index_above(x: f64) -> i64 {
    let mut k = ((x.log2() - BASE_EXP0) * BASE_PER_OCTAVE).floor() as i64;
    while base_point(k) <= x {
        k += 1;
    }
    while k > 0 && base_point(k - 1) > x {
        k -= 1;
    }
    k
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Checkpoint {
    x: f64,
    f: f64,
    plus: f64,
    minus: f64,
    min_f: f64,
    max_f: f64,
    min_fl: f64,
}

#[derive(Debug)]
struct Cache {
    pts: Vec<Checkpoint>,
}

/// Which primitive a limit estimate refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitTarget {
    /// `F(s)/s^p`
    F,
    /// `F_Λ(s)/s²`
    FLambda,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitClass {
    FinitePair,
    PlusInfinite,
    MinusInfinite,
    BothZero,
}

/// Numerical estimate of `liminf` / `limsup` of a ratio towards `ℓ`.
/// Never a certified limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate {
    #[serde(with = "crate::ext")]
    pub l_minus: f64,
    #[serde(with = "crate::ext")]
    pub l_plus: f64,
    pub window: Vec<f64>,
    pub classification: LimitClass,
    pub direction: Direction,
    pub is_estimate: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct LimitOptions {
    pub points: usize,
    pub decades: f64,
    /// Start of the grid; the grid runs from here towards `ℓ`.
    pub anchor: f64,
    /// Growth factor between windows that counts as divergence.
    pub divergence_factor: f64,
    /// Shrink factor between windows that counts as convergence to zero.
    pub vanishing_factor: f64,
}

impl Default for LimitOptions {
    fn default() -> Self {
        Self {
            points: 200,
            decades: 6.0,
            anchor: 1.0,
            divergence_factor: 10.0,
            vanishing_factor: 0.1,
        }
    }
}

/// Classify tail behaviour of sampled ratios. The samples must be ordered
/// from the anchor towards `ℓ`; the second half is the tail window.
pub fn classify_ratio_samples(
    abscissae: &[f64],
    ratios: &[f64],
    direction: Direction,
    opts: &LimitOptions,
) -> LimitEstimate {
    let half = ratios.len() / 2;
    let (prev, tail) = ratios.split_at(half);
    let inf = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let sup = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let absmax = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let (inf_t, sup_t, inf_p, sup_p) = (inf(tail), sup(tail), inf(prev), sup(prev));
    let k = opts.divergence_factor;
    let plus_diverges = sup_t > 0.0 && sup_t > k * sup_p.abs();
    let minus_diverges = inf_t < 0.0 && inf_t.abs() > k * inf_p.abs();

    let (l_minus, l_plus, classification) = if minus_diverges {
        let lp = if plus_diverges { f64::INFINITY } else { sup_t };
        (f64::NEG_INFINITY, lp, LimitClass::MinusInfinite)
    } else if plus_diverges {
        let lm = if inf_t > 0.0 && inf_t > k * inf_p.abs() { f64::INFINITY } else { inf_t };
        (lm, f64::INFINITY, LimitClass::PlusInfinite)
    } else if absmax(tail) < opts.vanishing_factor * absmax(prev) {
        (0.0, 0.0, LimitClass::BothZero)
    } else {
        (inf_t, sup_t, LimitClass::FinitePair)
    };
    LimitEstimate {
        l_minus,
        l_plus,
        window: abscissae[half..].to_vec(),
        classification,
        direction,
        is_estimate: true,
    }
}

/// Geometric grid of `opts.points` abscissae from the anchor towards `ℓ`.
pub fn limit_grid(direction: Direction, opts: &LimitOptions) -> Vec<f64> {
    let n = opts.points.max(2);
    let sign = match direction {
        Direction::Infinity => 1.0,
        Direction::Zero => -1.0,
    };
    (0..n)
        .map(|k| opts.anchor * 10f64.powf(sign * opts.decades * k as f64 / (n - 1) as f64))
        .collect()
}

/// Estimate the tail limits of an arbitrary ratio `s ↦ ratio(s)`.
pub fn estimate_ratio_limits<G>(
    ratio: G,
    direction: Direction,
    opts: &LimitOptions,
) -> Result<LimitEstimate, PrimitiveError>
where
    G: Fn(f64) -> Result<f64, PrimitiveError>,
{
    let xs = limit_grid(direction, opts);
    let ys = xs.iter().map(|&s| ratio(s)).collect::<Result<Vec<_>, _>>()?;
    Ok(classify_ratio_samples(&xs, &ys, direction, opts))
}

/// Primitive evaluators for one nonlinearity, exponent `p` and ellipticity
/// constant `Λ`. Safe to share across threads.
#[derive(Debug)]
pub struct PrimitiveCalculus {
    nl: Nonlinearity,
    p: f64,
    lambda_ell: f64,
    quad: QuadratureOptions,
    /// First checkpoint after the origin; `[0, head]` is handled directly.
    head: f64,
    cache: RwLock<Cache>,
}

impl Clone for PrimitiveCalculus {
    fn clone(&self) -> Self {
        Self {
            nl: self.nl.clone(),
            p: self.p,
            lambda_ell: self.lambda_ell,
            quad: self.quad,
            head: self.head,
            cache: RwLock::new(Cache {
                pts: self.cache.read().pts.clone(),
            }),
        }
    }
}

impl PrimitiveCalculus {
    pub fn new(nl: Nonlinearity, p: f64, lambda_ell: f64) -> Result<Self, PrimitiveError> {
        Self::with_quadrature(nl, p, lambda_ell, QuadratureOptions::default())
    }

    pub fn with_quadrature(
        nl: Nonlinearity,
        p: f64,
        lambda_ell: f64,
        quad: QuadratureOptions,
    ) -> Result<Self, PrimitiveError> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(PrimitiveError::Domain(format!("p must exceed 1, got {p}")));
        }
        if !(lambda_ell >= 1.0 && lambda_ell.is_finite()) {
            return Err(PrimitiveError::Domain(format!("Λ must be at least 1, got {lambda_ell}")));
        }
        let head = match nl.kind {
            NonlinearityKind::ReciprocalOscillation { .. } => {
                1.0 / (1.5 * PI + 2.0 * PI * RECIPROCAL_CUTOFF_INDEX)
            }
            _ => base_point(0),
        };
        let mut pc = Self {
            nl,
            p,
            lambda_ell,
            quad,
            head,
            cache: RwLock::new(Cache { pts: Vec::new() }),
        };
        let f_head = pc.head_integral(head)?;
        let (plus, minus) = if f_head >= 0.0 { (f_head, 0.0) } else { (0.0, -f_head) };
        let fl = plus - minus / (lambda_ell * lambda_ell);
        let origin = Checkpoint {
            x: 0.0,
            f: 0.0,
            plus: 0.0,
            minus: 0.0,
            min_f: 0.0,
            max_f: 0.0,
            min_fl: 0.0,
        };
        let first = Checkpoint {
            x: head,
            f: f_head,
            plus,
            minus,
            min_f: f_head.min(0.0),
            max_f: f_head.max(0.0),
            min_fl: fl.min(0.0),
        };
        pc.cache = RwLock::new(Cache {
            pts: vec![origin, first],
        });
        Ok(pc)
    }

    pub fn nonlinearity(&self) -> &Nonlinearity {
        &self.nl
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn lambda_ell(&self) -> f64 {
        self.lambda_ell
    }

    /// Same nonlinearity and cache settings with a different exponent.
    pub fn with_p(&self, p: f64) -> Result<Self, PrimitiveError> {
        let mut out = self.clone();
        if !(p > 1.0 && p.is_finite()) {
            return Err(PrimitiveError::Domain(format!("p must exceed 1, got {p}")));
        }
        out.p = p;
        Ok(out)
    }

    /// Same nonlinearity with a different `Λ`.
    pub fn with_lambda_ell(&self, lambda_ell: f64) -> Result<Self, PrimitiveError> {
        Self::with_quadrature(self.nl.clone(), self.p, lambda_ell, self.quad)
    }

    /// `∫_0^s f` for `s ≤ head`.
    fn head_integral(&self, s: f64) -> Result<f64, PrimitiveError> {
        match self.nl.kind {
            NonlinearityKind::ReciprocalOscillation { r } => Ok(reciprocal_primitive(1.0 / r, s)),
            _ => Ok(integrate(|t| self.nl.eval(t), 0.0, s, &self.quad)?),
        }
    }

    fn check_arg(s: f64) -> Result<(), PrimitiveError> {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(PrimitiveError::Domain(format!("argument must be finite and ≥ 0, got {s}")));
        }
        if s > MAX_ARGUMENT {
            return Err(PrimitiveError::Domain(format!(
                "argument {s} exceeds the supported range {MAX_ARGUMENT:e}"
            )));
        }
        Ok(())
    }

    fn extend_to(&self, s: f64) -> Result<(), PrimitiveError> {
        if self.cache.read().pts.last().expect("nonempty").x >= s {
            return Ok(());
        }
        let mut cache = self.cache.write();
        while cache.pts.last().expect("nonempty").x < s {
            let last = *cache.pts.last().expect("nonempty");
            let hi = base_point(base_index_above(last.x));
            let mut cuts = self.nl.knots(last.x, hi);
            cuts.push(hi);
            let mut cp = last;
            for x in cuts {
                if x <= cp.x {
                    continue;
                }
                let v = integrate(|t| self.nl.eval(t), cp.x, x, &self.cell_options(&cp))?;
                cp = self.advance(&cp, x, v);
                cache.pts.push(cp);
            }
        }
        Ok(())
    }

    /// Cells after the first also accept an absolute error tied to the
    /// accumulated primitive; near touch-zeros of `f` the integrand is pure
    /// rounding noise and a purely relative target is unreachable.
    fn cell_options(&self, cp: &Checkpoint) -> QuadratureOptions {
        let scale = cp.plus + cp.minus;
        QuadratureOptions {
            abs_tol: self.quad.abs_tol.max(self.quad.rel_tol * 1e-2 * scale),
            ..self.quad
        }
    }

    fn advance(&self, cp: &Checkpoint, x: f64, cell_integral: f64) -> Checkpoint {
        let f = cp.f + cell_integral;
        let (plus, minus) = if cell_integral >= 0.0 {
            (cp.plus + cell_integral, cp.minus)
        } else {
            (cp.plus, cp.minus - cell_integral)
        };
        let fl = plus - minus / (self.lambda_ell * self.lambda_ell);
        Checkpoint {
            x,
            f,
            plus,
            minus,
            min_f: cp.min_f.min(f),
            max_f: cp.max_f.max(f),
            min_fl: cp.min_fl.min(fl),
        }
    }

    /// Checkpoint-state at `s` itself.
    fn state(&self, s: f64) -> Result<Checkpoint, PrimitiveError> {
        Self::check_arg(s)?;
        if s == 0.0 {
            return Ok(self.cache.read().pts[0]);
        }
        if s < self.head {
            let v = self.head_integral(s)?;
            return Ok(self.advance(&self.cache.read().pts[0], s, v));
        }
        self.extend_to(s)?;
        let cp = {
            let cache = self.cache.read();
            let i = cache.pts.partition_point(|c| c.x <= s) - 1;
            cache.pts[i]
        };
        if cp.x == s {
            return Ok(cp);
        }
        let v = integrate(|t| self.nl.eval(t), cp.x, s, &self.cell_options(&cp))?;
        Ok(self.advance(&cp, s, v))
    }

    /// `F(s) = ∫_0^s f`.
    pub fn antiderivative(&self, s: f64) -> Result<f64, PrimitiveError> {
        Ok(self.state(s)?.f)
    }

    /// `∫_0^s f⁺`.
    pub fn positive_part(&self, s: f64) -> Result<f64, PrimitiveError> {
        Ok(self.state(s)?.plus)
    }

    /// `∫_0^s f⁻`, nonnegative.
    pub fn negative_part(&self, s: f64) -> Result<f64, PrimitiveError> {
        Ok(self.state(s)?.minus)
    }

    /// `min_{[0,s]} F`.
    pub fn running_min(&self, s: f64) -> Result<f64, PrimitiveError> {
        Ok(self.state(s)?.min_f)
    }

    /// `max_{[0,s]} F`.
    pub fn running_max(&self, s: f64) -> Result<f64, PrimitiveError> {
        Ok(self.state(s)?.max_f)
    }

    /// `F̄(s) = F(s) − min_{[0,s]} F`.
    pub fn running_range(&self, s: f64) -> Result<f64, PrimitiveError> {
        let st = self.state(s)?;
        Ok(st.f - st.min_f)
    }

    /// `F_Λ(s) = ∫f⁺ − Λ⁻² ∫f⁻`.
    pub fn antiderivative_lambda(&self, s: f64) -> Result<f64, PrimitiveError> {
        let st = self.state(s)?;
        Ok(st.plus - st.minus / (self.lambda_ell * self.lambda_ell))
    }

    /// `F̄_Λ(s) = F_Λ(s) − min_{[0,s]} F_Λ`.
    pub fn running_range_lambda(&self, s: f64) -> Result<f64, PrimitiveError> {
        let st = self.state(s)?;
        Ok(st.plus - st.minus / (self.lambda_ell * self.lambda_ell) - st.min_fl)
    }

    /// `F̲(s1, s2) = min_{t∈[0,s1]} ∫_t^{s2} f = F(s2) − max_{[0,s1]} F`.
    pub fn two_point_min(&self, s1: f64, s2: f64) -> Result<f64, PrimitiveError> {
        if s1 > s2 {
            return Err(PrimitiveError::Domain(format!(
                "two-point minimum needs s1 ≤ s2, got {s1} > {s2}"
            )));
        }
        Ok(self.antiderivative(s2)? - self.running_max(s1)?)
    }

    /// Tail estimate of `F(s)/s^p` or `F_Λ(s)/s²` towards `direction`.
    pub fn estimate_limits(
        &self,
        direction: Direction,
        target: LimitTarget,
        opts: &LimitOptions,
    ) -> Result<LimitEstimate, PrimitiveError> {
        match target {
            LimitTarget::F => estimate_ratio_limits(
                |s| Ok(self.antiderivative(s)? / s.powf(self.p)),
                direction,
                opts,
            ),
            LimitTarget::FLambda => estimate_ratio_limits(
                |s| Ok(self.antiderivative_lambda(s)? / (s * s)),
                direction,
                opts,
            ),
        }
    }

    /// Number of cached checkpoints, for diagnostics.
    pub fn checkpoint_count(&self) -> usize {
        self.cache.read().pts.len()
    }
}

/// `∫_0^s t^a (1 + sin(1/t)) dt` for small `s`, from
/// `s^{a+1}/(a+1) + ∫_{1/s}^∞ u^{−(a+2)} sin u du` and repeated
/// integration by parts of the oscillatory tail.
pub fn reciprocal_primitive(a: f64, s: f64) -> f64 {
    if s == 0.0 {
        return 0.0;
    }
    let u = 1.0 / s;
    s.powf(a + 1.0) / (a + 1.0) + sin_tail(a + 2.0, u, RECIPROCAL_EXPANSION_DEPTH)
}

/// `∫_U^∞ u^{−m} sin u du` by `depth` rounds of integration by parts.
fn sin_tail(m: f64, u: f64, depth: usize) -> f64 {
    if depth == 0 {
        return 0.0;
    }
    u.powf(-m) * u.cos() - m * cos_tail(m + 1.0, u, depth - 1)
}

/// `∫_U^∞ u^{−m} cos u du`.
fn cos_tail(m: f64, u: f64, depth: usize) -> f64 {
    if depth == 0 {
        return 0.0;
    }
    -u.powf(-m) * u.sin() + m * sin_tail(m + 1.0, u, depth - 1)
}
