//! The oscillating nonlinearity `f`, its catalog forms and zero sequences.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::roots::{brent, golden_max};

const THREE_HALVES_PI: f64 = 1.5 * PI;
const TWO_PI: f64 = 2.0 * PI;

/// Default bound on `|f(α_n)|` for accepted zeros.
pub const ZERO_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NonlinearityError {
    #[error("found only {found} of {requested} zeros accumulating at {direction:?} within the search horizon")]
    NoZerosFound {
        requested: usize,
        found: usize,
        direction: Direction,
    },
    #[error("zero near {at} could not be resolved (|f| = {residual:e})")]
    ZeroNotResolved { at: f64, residual: f64 },
    #[error("invalid nonlinearity: {0}")]
    Invalid(String),
}

/// Which end of `(0, ∞)` the analysis targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Zero,
    Infinity,
}

/// Sampled `(s, value)` pairs with strictly increasing abscissae starting at 0,
/// evaluated by linear interpolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl Table {
    pub fn new(samples: &[[f64; 2]]) -> Result<Self, NonlinearityError> {
        if samples.len() < 2 {
            return Err(NonlinearityError::Invalid(
                "table needs at least two samples".into(),
            ));
        }
        if samples[0][0] != 0.0 {
            return Err(NonlinearityError::Invalid(
                "first table abscissa must be 0".into(),
            ));
        }
        for w in samples.windows(2) {
            if !(w[1][0] > w[0][0]) {
                return Err(NonlinearityError::Invalid(format!(
                    "table abscissae must be strictly increasing ({} then {})",
                    w[0][0], w[1][0]
                )));
            }
        }
        if samples.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(NonlinearityError::Invalid("non-finite table entry".into()));
        }
        Ok(Self {
            xs: samples.iter().map(|p| p[0]).collect(),
            ys: samples.iter().map(|p| p[1]).collect(),
        })
    }

    pub fn samples(&self) -> Vec<[f64; 2]> {
        self.xs.iter().zip(&self.ys).map(|(x, y)| [*x, *y]).collect()
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.ys
    }

    pub fn last_abscissa(&self) -> f64 {
        *self.xs.last().expect("table is nonempty")
    }

    /// Linear interpolation; beyond the last sample the value is held
    /// constant (`extrapolate = false`) or continued along the last segment.
    fn eval(&self, s: f64, extrapolate: bool) -> f64 {
        let n = self.xs.len();
        if s <= 0.0 {
            return self.ys[0];
        }
        if s >= self.xs[n - 1] {
            if !extrapolate {
                return self.ys[n - 1];
            }
            let slope = (self.ys[n - 1] - self.ys[n - 2]) / (self.xs[n - 1] - self.xs[n - 2]);
            return self.ys[n - 1] + slope * (s - self.xs[n - 1]);
        }
        let i = self.xs.partition_point(|&x| x <= s) - 1;
        let t = (s - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        self.ys[i] + t * (self.ys[i + 1] - self.ys[i])
    }

    /// Zeros of the interpolant in `(0, last]`: sample points with value 0 and
    /// the crossing of every sign-changing segment.
    fn zeros(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for i in 0..self.xs.len() {
            if i > 0 && self.ys[i] == 0.0 {
                out.push(self.xs[i]);
            }
            if i + 1 < self.xs.len() {
                let (y0, y1) = (self.ys[i], self.ys[i + 1]);
                if y0 * y1 < 0.0 {
                    let t = y0 / (y0 - y1);
                    out.push(self.xs[i] + t * (self.xs[i + 1] - self.xs[i]));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum NonlinearityKind {
    /// `s^r (1 + sin s)`
    PowerTimesOnePlusSin { r: f64 },
    /// `s^{1/r} (1 + sin(1/s))`, extended by 0 at the origin
    ReciprocalOscillation { r: f64 },
    /// `g(s) (1 + sin s)` with `g` a nondecreasing positive table
    EnvelopeTimesOnePlusSin { envelope: Table },
    /// `sin s`
    PureSine,
    /// piecewise-linear interpolation of samples
    CustomTable { table: Table },
    /// `Σ c_k s^k`
    Polynomial { coefficients: Vec<f64> },
    /// `a sin(ω s + φ) + b`
    Sinusoid {
        amplitude: f64,
        frequency: f64,
        phase: f64,
        offset: f64,
    },
    /// `max(f, 0)` on `[0, threshold]` and `f` beyond it
    PositivePartBelow {
        base: Box<Nonlinearity>,
        threshold: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Nonlinearity {
    pub kind: NonlinearityKind,
    pub direction: Direction,
    /// `f(0)`, recorded for the sign check `f(0) ≥ 0`.
    pub f0: f64,
}

/// Wire form: `{"kind": "power_sin", "r": 1, "direction": "infinity"}` etc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonlinearitySpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequency: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<f64>,
    pub direction: Direction,
}

fn require_r(spec: &NonlinearitySpec) -> Result<f64, NonlinearityError> {
    match spec.r {
        Some(r) if r > 0.0 && r.is_finite() => Ok(r),
        Some(r) => Err(NonlinearityError::Invalid(format!("r must be positive, got {r}"))),
        None => Err(NonlinearityError::Invalid(format!(
            "kind {} requires \"r\"",
            spec.kind
        ))),
    }
}

impl Nonlinearity {
    pub fn new(kind: NonlinearityKind, direction: Direction) -> Result<Self, NonlinearityError> {
        match &kind {
            NonlinearityKind::PowerTimesOnePlusSin { r } | NonlinearityKind::ReciprocalOscillation { r } => {
                if !(*r > 0.0 && r.is_finite()) {
                    return Err(NonlinearityError::Invalid(format!("r must be positive, got {r}")));
                }
            }
            NonlinearityKind::EnvelopeTimesOnePlusSin { envelope } => {
                let ys = envelope.values();
                if ys.iter().any(|&y| y <= 0.0) {
                    return Err(NonlinearityError::Invalid("envelope must be positive".into()));
                }
                if ys.windows(2).any(|w| w[1] < w[0]) {
                    return Err(NonlinearityError::Invalid("envelope must be nondecreasing".into()));
                }
            }
            NonlinearityKind::Polynomial { coefficients } => {
                if coefficients.is_empty() || coefficients.iter().any(|c| !c.is_finite()) {
                    return Err(NonlinearityError::Invalid(
                        "polynomial needs finite coefficients".into(),
                    ));
                }
            }
            NonlinearityKind::Sinusoid {
                amplitude,
                frequency,
                phase,
                offset,
            } => {
                if ![*amplitude, *frequency, *phase, *offset].iter().all(|v| v.is_finite())
                    || *frequency <= 0.0
                {
                    return Err(NonlinearityError::Invalid(
                        "sinusoid needs finite parameters and positive frequency".into(),
                    ));
                }
            }
            NonlinearityKind::PositivePartBelow { threshold, .. } => {
                if !(*threshold >= 0.0) {
                    return Err(NonlinearityError::Invalid("threshold must be nonnegative".into()));
                }
            }
            NonlinearityKind::PureSine | NonlinearityKind::CustomTable { .. } => {}
        }
        let mut nl = Self {
            kind,
            direction,
            f0: 0.0,
        };
        nl.f0 = nl.eval(0.0);
        Ok(nl)
    }

    pub fn power_sin(r: f64, direction: Direction) -> Result<Self, NonlinearityError> {
        Self::new(NonlinearityKind::PowerTimesOnePlusSin { r }, direction)
    }

    pub fn reciprocal_sin(r: f64) -> Result<Self, NonlinearityError> {
        Self::new(NonlinearityKind::ReciprocalOscillation { r }, Direction::Zero)
    }

    pub fn pure_sine() -> Self {
        Self::new(NonlinearityKind::PureSine, Direction::Infinity).expect("valid")
    }

    pub fn table(samples: &[[f64; 2]], direction: Direction) -> Result<Self, NonlinearityError> {
        Self::new(
            NonlinearityKind::CustomTable {
                table: Table::new(samples)?,
            },
            direction,
        )
    }

    pub fn envelope_sin(samples: &[[f64; 2]]) -> Result<Self, NonlinearityError> {
        Self::new(
            NonlinearityKind::EnvelopeTimesOnePlusSin {
                envelope: Table::new(samples)?,
            },
            Direction::Infinity,
        )
    }

    pub fn polynomial(coefficients: &[f64], direction: Direction) -> Result<Self, NonlinearityError> {
        Self::new(
            NonlinearityKind::Polynomial {
                coefficients: coefficients.to_vec(),
            },
            direction,
        )
    }

    pub fn sinusoid(
        amplitude: f64,
        frequency: f64,
        phase: f64,
        offset: f64,
    ) -> Result<Self, NonlinearityError> {
        Self::new(
            NonlinearityKind::Sinusoid {
                amplitude,
                frequency,
                phase,
                offset,
            },
            Direction::Infinity,
        )
    }

    pub fn from_spec(spec: &NonlinearitySpec) -> Result<Self, NonlinearityError> {
        let kind = match spec.kind.as_str() {
            "power_sin" => NonlinearityKind::PowerTimesOnePlusSin { r: require_r(spec)? },
            "reciprocal_sin" => NonlinearityKind::ReciprocalOscillation { r: require_r(spec)? },
            "envelope_sin" => NonlinearityKind::EnvelopeTimesOnePlusSin {
                envelope: Table::new(spec.samples.as_deref().ok_or_else(|| {
                    NonlinearityError::Invalid("envelope_sin requires \"samples\"".into())
                })?)?,
            },
            "pure_sine" => NonlinearityKind::PureSine,
            "table" => NonlinearityKind::CustomTable {
                table: Table::new(spec.samples.as_deref().ok_or_else(|| {
                    NonlinearityError::Invalid("table requires \"samples\"".into())
                })?)?,
            },
            "polynomial" => NonlinearityKind::Polynomial {
                coefficients: spec.coefficients.clone().ok_or_else(|| {
                    NonlinearityError::Invalid("polynomial requires \"coefficients\"".into())
                })?,
            },
            "sinusoid" => NonlinearityKind::Sinusoid {
                amplitude: spec.amplitude.unwrap_or(1.0),
                frequency: spec.frequency.unwrap_or(1.0),
                phase: spec.phase.unwrap_or(0.0),
                offset: spec.offset.unwrap_or(0.0),
            },
            other => {
                return Err(NonlinearityError::Invalid(format!(
                    "unknown nonlinearity kind \"{other}\""
                )))
            }
        };
        Self::new(kind, spec.direction)
    }

    pub fn from_json(text: &str) -> Result<Self, NonlinearityError> {
        let spec: NonlinearitySpec =
            serde_json::from_str(text).map_err(|e| NonlinearityError::Invalid(e.to_string()))?;
        Self::from_spec(&spec)
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    /// `f(s)` for `s ≥ 0`. Negative arguments return `f(0)`, the convention
    /// used by the truncated problems.
    pub fn eval(&self, s: f64) -> f64 {
        if s < 0.0 {
            return self.eval(0.0);
        }
        match &self.kind {
            NonlinearityKind::PowerTimesOnePlusSin { r } => s.powf(*r) * one_plus_sin(s),
            NonlinearityKind::ReciprocalOscillation { r } => {
                if s == 0.0 {
                    0.0
                } else {
                    s.powf(1.0 / r) * one_plus_sin(1.0 / s)
                }
            }
            NonlinearityKind::EnvelopeTimesOnePlusSin { envelope } => {
                envelope.eval(s, true) * one_plus_sin(s)
            }
            NonlinearityKind::PureSine => s.sin(),
            NonlinearityKind::CustomTable { table } => table.eval(s, false),
            NonlinearityKind::Polynomial { coefficients } => {
                coefficients.iter().rev().fold(0.0, |acc, c| acc * s + c)
            }
            NonlinearityKind::Sinusoid {
                amplitude,
                frequency,
                phase,
                offset,
            } => amplitude * (frequency * s + phase).sin() + offset,
            NonlinearityKind::PositivePartBelow { base, threshold } => {
                let v = base.eval(s);
                if s <= *threshold {
                    v.max(0.0)
                } else {
                    v
                }
            }
        }
    }

    /// Points of `(lo, hi)`, ascending, where `f` may change sign, vanishes
    /// periodically, or loses smoothness. Between consecutive knots `f` keeps
    /// one sign.
    pub fn knots(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out = match &self.kind {
            NonlinearityKind::PowerTimesOnePlusSin { .. } => arithmetic_in(THREE_HALVES_PI, TWO_PI, lo, hi),
            NonlinearityKind::EnvelopeTimesOnePlusSin { envelope } => {
                let mut v = arithmetic_in(THREE_HALVES_PI, TWO_PI, lo, hi);
                v.extend(envelope.abscissae().iter().copied().filter(|&x| x > lo && x < hi));
                v
            }
            NonlinearityKind::ReciprocalOscillation { .. } => reciprocal_zeros_in(lo, hi),
            NonlinearityKind::PureSine => arithmetic_in(PI, PI, lo, hi),
            NonlinearityKind::Sinusoid { .. } => self.sinusoid_zeros(lo, hi),
            NonlinearityKind::CustomTable { table } => {
                let mut v: Vec<f64> = table.abscissae().iter().copied().filter(|&x| x > lo && x < hi).collect();
                v.extend(table.zeros().into_iter().filter(|&x| x > lo && x < hi));
                v
            }
            NonlinearityKind::Polynomial { .. } => self.scan_sign_changes(lo, hi),
            NonlinearityKind::PositivePartBelow { base, threshold } => {
                let mut v = base.knots(lo, hi);
                if *threshold > lo && *threshold < hi {
                    v.push(*threshold);
                }
                v
            }
        };
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * b.abs().max(1e-300));
        out
    }

    fn sinusoid_zeros(&self, lo: f64, hi: f64) -> Vec<f64> {
        let NonlinearityKind::Sinusoid {
            amplitude,
            frequency,
            phase,
            offset,
        } = &self.kind
        else {
            return Vec::new();
        };
        if *amplitude == 0.0 || offset.abs() > amplitude.abs() {
            return Vec::new();
        }
        // ω s + φ = θ0 + 2πk or π − θ0 + 2πk
        let theta0 = (-offset / amplitude).clamp(-1.0, 1.0).asin();
        let mut out = Vec::new();
        for base in [theta0, PI - theta0] {
            let start = (base - phase) / frequency;
            out.extend(arithmetic_in(start, TWO_PI / frequency, lo, hi));
        }
        out.sort_by(f64::total_cmp);
        out
    }

    fn scan_sign_changes(&self, lo: f64, hi: f64) -> Vec<f64> {
        if !(hi > lo) {
            return Vec::new();
        }
        let n = 256;
        let mut out = Vec::new();
        let mut x0 = lo;
        let mut f0 = self.eval(lo);
        for i in 1..=n {
            let x1 = if i == n { hi } else { lo + (hi - lo) * i as f64 / n as f64 };
            let f1 = self.eval(x1);
            if f0 == 0.0 && x0 > lo {
                out.push(x0);
            } else if f0 * f1 < 0.0 {
                if let Ok(z) = brent(|x| self.eval(x), x0, x1, 1e-15 * x1.abs().max(1.0), 200) {
                    out.push(z);
                }
            }
            x0 = x1;
            f0 = f1;
        }
        out.retain(|&x| x > lo && x < hi);
        out
    }

    /// First `count` positive zeros of `f` accumulating in the target
    /// direction, searching at most up to `horizon` for kinds without
    /// analytic zeros.
    pub fn find_zeros(&self, count: usize) -> Result<ZeroSequence, NonlinearityError> {
        self.find_zeros_within(count, 1e6)
    }

    pub fn find_zeros_within(&self, count: usize, horizon: f64) -> Result<ZeroSequence, NonlinearityError> {
        let candidates = self.zero_candidates(count, horizon);
        if candidates.len() < count {
            return Err(NonlinearityError::NoZerosFound {
                requested: count,
                found: candidates.len(),
                direction: self.direction,
            });
        }
        let mut alphas = Vec::with_capacity(count);
        for &guess in candidates.iter().take(count) {
            let z = self.polish_zero(guess);
            let residual = self.eval(z).abs();
            if residual > ZERO_TOLERANCE {
                return Err(NonlinearityError::ZeroNotResolved { at: z, residual });
            }
            alphas.push(z);
        }
        Ok(ZeroSequence {
            alphas,
            direction: self.direction,
            zero_tolerance: ZERO_TOLERANCE,
        })
    }

    fn zero_candidates(&self, count: usize, horizon: f64) -> Vec<f64> {
        let ascending_from = |first: f64, step: f64| -> Vec<f64> {
            (0..count).map(|k| first + step * k as f64).collect()
        };
        match (&self.kind, self.direction) {
            (NonlinearityKind::PowerTimesOnePlusSin { .. }, Direction::Infinity)
            | (NonlinearityKind::EnvelopeTimesOnePlusSin { .. }, Direction::Infinity) => {
                ascending_from(THREE_HALVES_PI, TWO_PI)
            }
            (NonlinearityKind::PureSine, Direction::Infinity) => ascending_from(PI, PI),
            (NonlinearityKind::ReciprocalOscillation { .. }, Direction::Zero) => (0..count)
                .map(|k| 1.0 / (THREE_HALVES_PI + TWO_PI * k as f64))
                .collect(),
            (NonlinearityKind::Sinusoid { .. }, Direction::Infinity) => {
                let mut z = Vec::new();
                let mut hi = TWO_PI;
                while z.len() < count && hi < horizon {
                    z = self.sinusoid_zeros(0.0, hi);
                    z.retain(|&x| x > 0.0);
                    hi *= 2.0;
                }
                z.truncate(count);
                z
            }
            (NonlinearityKind::CustomTable { table }, dir) => {
                let mut z: Vec<f64> = table.zeros().into_iter().filter(|&x| x > 0.0 && x <= horizon).collect();
                z.sort_by(f64::total_cmp);
                z.dedup();
                if dir == Direction::Zero {
                    z.reverse();
                }
                z
            }
            (NonlinearityKind::Polynomial { .. }, dir) => {
                let mut z = Vec::new();
                let mut lo = 0.0;
                let mut hi: f64 = 1.0;
                while lo < horizon {
                    let top = hi.min(horizon);
                    z.extend(self.scan_sign_changes(lo, top));
                    if self.eval(top) == 0.0 {
                        z.push(top);
                    }
                    lo = top;
                    hi *= 2.0;
                }
                if dir == Direction::Zero {
                    z.reverse();
                }
                z
            }
            (NonlinearityKind::PositivePartBelow { base, threshold }, Direction::Infinity) => {
                let mut z = vec![*threshold];
                if let Ok(rest) = base.find_zeros_within(count + 8, horizon) {
                    z.extend(rest.alphas.into_iter().filter(|&a| a > *threshold + 1e-12));
                }
                z.retain(|&x| x > 0.0);
                z.truncate(count);
                z
            }
            _ => Vec::new(),
        }
    }

    /// Bracketed polishing when `f` changes sign near `guess`; touch zeros
    /// are refined by golden-section minimization of `|f|`.
    fn polish_zero(&self, guess: f64) -> f64 {
        if self.eval(guess).abs() <= 1e-15 {
            return guess;
        }
        let h = 1e-6 * guess.abs().max(1e-12);
        let (a, b) = (guess - h, guess + h);
        let (fa, fb) = (self.eval(a), self.eval(b));
        let polished = if fa * fb < 0.0 {
            brent(|x| self.eval(x), a, b, 1e-16 * guess.abs(), 200).unwrap_or(guess)
        } else {
            golden_max(|x| -self.eval(x).abs(), a.max(0.0), b, 1e-15 * guess.abs().max(1e-300)).0
        };
        if self.eval(polished).abs() < self.eval(guess).abs() {
            polished
        } else {
            guess
        }
    }
}

/// `1 + sin x` as `2 sin²(x/2 + π/4)`, which keeps full relative accuracy
/// near the zeros `x = 3π/2 + 2πk`.
#[inline]
pub fn one_plus_sin(x: f64) -> f64 {
    let t = (0.5 * x + 0.25 * PI).sin();
    2.0 * t * t
}

fn arithmetic_in(first: f64, step: f64, lo: f64, hi: f64) -> Vec<f64> {
    let k0 = ((lo - first) / step).floor().max(0.0) as u64;
    let mut out = Vec::new();
    let mut k = k0;
    loop {
        let x = first + step * k as f64;
        if x >= hi {
            break;
        }
        if x > lo {
            out.push(x);
        }
        k += 1;
    }
    out
}

/// Zeros `1/(3π/2 + 2πk)` of `1 + sin(1/s)` lying in `(lo, hi)`.
fn reciprocal_zeros_in(lo: f64, hi: f64) -> Vec<f64> {
    if hi <= 0.0 {
        return Vec::new();
    }
    // 1/s in (1/hi, 1/lo)
    let u_lo = 1.0 / hi;
    let k_min = ((u_lo - THREE_HALVES_PI) / TWO_PI).ceil().max(0.0) as u64;
    let mut out = Vec::new();
    let mut k = k_min;
    loop {
        let x = 1.0 / (THREE_HALVES_PI + TWO_PI * k as f64);
        if x <= lo {
            break;
        }
        if x < hi {
            out.push(x);
        }
        k += 1;
    }
    out.reverse();
    out
}

/// Positive zeros `α_n` of `f`, strictly monotone towards the target end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSequence {
    pub alphas: Vec<f64>,
    pub direction: Direction,
    pub zero_tolerance: f64,
}

impl ZeroSequence {
    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    /// 1-based `α_n`.
    pub fn alpha(&self, n: usize) -> f64 {
        self.alphas[n - 1]
    }

    /// The `n` with `c ∈ (α_{n−1}, α_n]` (`α_0 = 0`) towards infinity, or
    /// `c ∈ (α_{n+1}, α_n]` towards zero (`0` when `c > α_1`). `None` when
    /// `c` lies beyond the stored zeros.
    pub fn interval_index(&self, c: f64) -> Option<usize> {
        match self.direction {
            Direction::Infinity => {
                let i = self.alphas.partition_point(|&a| a < c);
                (i < self.alphas.len()).then_some(i + 1)
            }
            Direction::Zero => {
                if self.alphas.is_empty() {
                    return None;
                }
                if c > self.alphas[0] {
                    return Some(0);
                }
                (0..self.alphas.len() - 1)
                    .find(|&i| c <= self.alphas[i] && c > self.alphas[i + 1])
                    .map(|i| i + 1)
            }
        }
    }

    pub fn is_strictly_monotone(&self) -> bool {
        self.alphas.windows(2).all(|w| match self.direction {
            Direction::Infinity => w[1] > w[0],
            Direction::Zero => w[1] < w[0],
        })
    }
}
