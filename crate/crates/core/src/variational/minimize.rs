//! Box-constrained minimization of the truncated energy.
//!
//! Search directions are gradients in the metric of the tridiagonal matrix
//! `K` built from `Φ''` and the convex part of `−λ f_n'`, restricted to the
//! free variables; nodes in the ε-active set get the diagonal of `K`. Steps
//! are projected onto `[0, α_n]` and accepted by monotone Armijo
//! backtracking along the projection arc, with a Jacobi step as fallback.
//! A plain Euclidean gradient would need `O(h_min^{−2})` iterations on
//! graded grids. Acceptance uses `energy_difference`, since differences of
//! assembled energies bottom out at rounding long before stationarity.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    assemble_energy, check_lambda, comparison_function, energy_difference, energy_gradient, negativity_test, GridFunction, Potential,
    RadialGrid, TruncatedNonlinearity, VariationalError,
};
use crate::nonlinearity::{Direction, ZeroSequence};
use crate::primitive::PrimitiveCalculus;
use crate::shoot::diagram::fmt_f;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartKind {
    Zero,
    Ramp,
    HalfAlpha,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimizeOptions {
    /// Bound on the masked, lumped Euler–Lagrange residual relative to
    /// `1 + λ max |f_n(u)|`.
    pub tol_stat: f64,
    pub max_iter: usize,
    pub armijo: f64,
    /// `(γ, δ)` of the ramp start; `(α_n, R/4)` when absent.
    pub ramp: Option<(f64, f64)>,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            tol_stat: 1e-8,
            max_iter: 5000,
            armijo: 1e-4,
            ramp: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeResult {
    pub u: GridFunction,
    pub energy: f64,
    pub residual: f64,
    /// Nodes sitting on `0` or `α_n` with the gradient pushing outwards.
    pub active: Vec<bool>,
    pub iterations: usize,
    pub converged: bool,
    pub start: StartKind,
    /// Energy after every accepted step, starting with the initial guess;
    /// accumulated from the accurate per-step differences.
    pub history: Vec<f64>,
    /// Final energy of every start, in start order.
    pub start_energies: Vec<(StartKind, f64)>,
}

fn project(x: f64, alpha: f64) -> f64 {
    x.clamp(0.0, alpha)
}

struct Stationarity {
    residual: f64,
    active: Vec<bool>,
}

fn stationarity(u: &GridFunction, grad: &[f64], lumped: &[f64], tn: &TruncatedNonlinearity, lambda: f64, eps: f64) -> Stationarity {
    let alpha = tn.alpha_n();
    let v = &u.values;
    let n = v.len() - 1;
    let mut raw: f64 = 0.0;
    let mut active = vec![false; v.len()];
    for j in 0..n {
        let moved = v[j] - project(v[j] - grad[j] / lumped[j], alpha);
        raw = raw.max(moved.abs());
        active[j] = (v[j] <= eps && grad[j] > 0.0) || (v[j] >= alpha - eps && grad[j] < 0.0);
    }
    let g = &u.grid;
    let source = (0..g.cells())
        .map(|j| tn.f_n(0.5 * (v[j] + v[j + 1])).abs())
        .fold(0.0, f64::max);
    Stationarity {
        residual: raw / (1.0 + lambda * source),
        active,
    }
}

/// Thomas algorithm for a symmetric tridiagonal system.
fn solve_tridiagonal(diag: &[f64], off: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut m = diag[0];
    c[0] = if n > 1 { off[0] / m } else { 0.0 };
    d[0] = rhs[0] / m;
    for i in 1..n {
        m = diag[i] - off[i - 1] * c[i - 1];
        if i + 1 < n {
            c[i] = off[i] / m;
        }
        d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / m;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    d
}

/// Tridiagonal metric `K`: stiffness from `Φ''` plus the convex part of
/// the source term, as `(diag, off)` over the free nodes `0..J`.
fn metric<P: Potential + ?Sized>(
    u: &GridFunction,
    pot: &P,
    tn: &TruncatedNonlinearity,
    lambda: f64,
) -> (Vec<f64>, Vec<f64>) {
    let g = &u.grid;
    let v = &u.values;
    let n = v.len() - 1;
    let slopes: Vec<f64> = (0..g.cells()).map(|j| (v[j + 1] - v[j]) / g.cell_width(j)).collect();
    // Φ'' degenerates (p > 2) or blows up (p < 2) at Du = 0
    let floor = 1e-3 * slopes.iter().fold(0.0f64, |m, s| m.max(s.abs())) + 1e-12;
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    for j in 0..g.cells() {
        let xi = if slopes[j].abs() < floor { floor } else { slopes[j] };
        let h = g.cell_width(j);
        let w = g.cell_weight(j);
        let k = w * pot.d2phi(g.cell_mid(j), xi).max(1e-300) / (h * h);
        // convex part of the source term: −λ w f_n'(m) / 4 on the 2×2 block
        let c = 0.25 * lambda * w * (-source_slope(tn, 0.5 * (v[j] + v[j + 1]))).max(0.0);
        diag[j] += k + c;
        if j + 1 < n {
            diag[j + 1] += k + c;
            off[j] = c - k;
        }
    }
    (diag, off)
}

/// `−K⁻¹ g` on the free nodes and `−g_j / K_jj` on the active ones.
fn scaled_direction(diag: &[f64], off: &[f64], grad: &[f64], active: &[bool]) -> Vec<f64> {
    let n = diag.len();
    let mut off = off.to_vec();
    for j in 0..n {
        if active[j] {
            if j > 0 {
                off[j - 1] = 0.0;
            }
            if j + 1 < n {
                off[j] = 0.0;
            }
        }
    }
    let rhs: Vec<f64> = grad[..n].iter().map(|x| -x).collect();
    let mut d = solve_tridiagonal(diag, &off, &rhs);
    d.push(0.0);
    d
}

fn source_slope(tn: &TruncatedNonlinearity, s: f64) -> f64 {
    let alpha = tn.alpha_n();
    if s <= 0.0 || s >= alpha {
        return 0.0;
    }
    let h = 1e-6 * (1.0 + s.abs()).min(alpha);
    let (lo, hi) = ((s - h).max(0.0), (s + h).min(alpha));
    (tn.f_n(hi) - tn.f_n(lo)) / (hi - lo)
}

/// One descent run from `start`, projected onto `[0, α_n]` first.
pub fn minimize_from<P: Potential + ?Sized>(
    tn: &TruncatedNonlinearity,
    pot: &P,
    lambda: f64,
    start: &GridFunction,
    kind: StartKind,
    opts: &MinimizeOptions,
) -> Result<MinimizeResult, VariationalError> {
    check_lambda(lambda)?;
    let alpha = tn.alpha_n();
    let mut u = start.clone();
    for x in u.values.iter_mut() {
        *x = project(*x, alpha);
    }
    *u.values.last_mut().expect("nonempty") = 0.0;
    let lumped = u.grid.lumped_weights();
    let mut energy = assemble_energy(&u, tn, pot, lambda)?;
    let mut history = vec![energy];
    let mut step = 1.0f64;
    let mut iterations = 0;
    let mut grad = energy_gradient(&u, tn, pot, lambda);
    let mut stat = stationarity(&u, &grad, &lumped, tn, lambda, 0.0);
    while stat.residual > opts.tol_stat && iterations < opts.max_iter {
        iterations += 1;
        let (kdiag, koff) = metric(&u, pot, tn, lambda);
        let mut jacobi: Vec<f64> = grad.iter().zip(&kdiag).map(|(g, k)| -g / k).collect();
        jacobi.push(0.0);
        let eps = (0..kdiag.len())
            .map(|j| (u.values[j] - project(u.values[j] + jacobi[j], alpha)).abs())
            .fold(0.0, f64::max)
            .min(1e-2 * alpha);
        let active = stationarity(&u, &grad, &lumped, tn, lambda, eps).active;
        let scaled = scaled_direction(&kdiag, &koff, &grad, &active);
        let mut accepted = false;
        'directions: for (dir, t0) in [(&scaled, 1.0), (&jacobi, (2.0 * step).min(1.0))] {
            let mut t = t0;
            while t > 1e-16 {
                let mut trial = u.clone();
                let mut decrease = 0.0;
                for j in 0..trial.values.len() - 1 {
                    trial.values[j] = project(u.values[j] + t * dir[j], alpha);
                    decrease += grad[j] * (trial.values[j] - u.values[j]);
                }
                if decrease >= 0.0 {
                    if trial.values == u.values {
                        break;
                    }
                    t *= 0.5;
                    continue;
                }
                let de = energy_difference(&u, &trial, tn, pot, lambda)?;
                if de <= opts.armijo * decrease {
                    step = t;
                    u = trial;
                    energy += de;
                    history.push(energy);
                    accepted = true;
                    break 'directions;
                }
                t *= 0.5;
            }
        }
        grad = energy_gradient(&u, tn, pot, lambda);
        stat = stationarity(&u, &grad, &lumped, tn, lambda, 0.0);
        if !accepted {
            break;
        }
    }
    let converged = stat.residual <= opts.tol_stat;
    let energy = assemble_energy(&u, tn, pot, lambda)?;
    Ok(MinimizeResult {
        u,
        energy,
        residual: stat.residual,
        active: stat.active,
        iterations,
        converged,
        start: kind,
        history,
        start_energies: Vec::new(),
    })
}

/// Multi-start minimization from `0`, the comparison ramp and `α_n/2`. The
/// lowest energy wins, ties going to the earlier start.
pub fn minimize<P: Potential + ?Sized>(
    tn: &TruncatedNonlinearity,
    pot: &P,
    lambda: f64,
    grid: &RadialGrid,
    opts: &MinimizeOptions,
) -> Result<MinimizeResult, VariationalError> {
    check_lambda(lambda)?;
    let alpha = tn.alpha_n();
    let (gamma, delta) = opts.ramp.unwrap_or((alpha, 0.25 * grid.radius()));
    let starts = [
        (StartKind::Zero, GridFunction::zeros(grid)),
        (StartKind::Ramp, comparison_function(gamma.min(alpha), delta, grid)?),
        (StartKind::HalfAlpha, GridFunction::from_fn(grid, |_| 0.5 * alpha)),
    ];
    let runs = starts
        .par_iter()
        .map(|(kind, u0)| minimize_from(tn, pot, lambda, u0, *kind, opts))
        .collect::<Result<Vec<_>, _>>()?;
    let start_energies: Vec<(StartKind, f64)> = runs.iter().map(|r| (r.start, r.energy)).collect();
    let mut best = runs
        .into_iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.energy.total_cmp(&b.energy).then(i.cmp(j)))
        .map(|(_, r)| r)
        .expect("three starts");
    best.start_energies = start_energies;
    if best.converged {
        Ok(best)
    } else {
        Err(VariationalError::NonConvergence {
            iterations: best.iterations,
            residual: best.residual,
            best: Box::new(best),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceItem {
    pub n: usize,
    pub alpha_n: f64,
    pub gamma: f64,
    pub delta: f64,
    pub sup_norm: f64,
    pub energy: f64,
    pub residual: f64,
    pub iterations: usize,
    /// Index `m` of the zero interval holding `‖u_n‖_∞`.
    pub interval_index: Option<usize>,
    pub ramp_energy: f64,
    pub ramp_negative: bool,
    pub trivial: bool,
    pub result: MinimizeResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceReport {
    pub direction: Direction,
    #[serde(with = "crate::ext")]
    pub lambda: f64,
    pub items: Vec<SequenceItem>,
    /// Sup-norms strictly move towards `ℓ` along the sequence.
    pub trend_toward_ell: bool,
    pub all_trivial: bool,
    pub warnings: Vec<String>,
}

/// Minimize `I_n` for `n = 1..=k`. `ramps[n−1]` gives `(γ_n, δ_n)` for the
/// ramp start and the negativity test; missing entries default to
/// `(α_n, R/4)`.
#[allow(clippy::too_many_arguments)]
pub fn run_sequence<P: Potential + ?Sized>(
    pc: &PrimitiveCalculus,
    pot: &P,
    lambda: f64,
    zeros: &ZeroSequence,
    ramps: &[(f64, f64)],
    grid: &RadialGrid,
    k: usize,
    lambda_bar: Option<f64>,
    opts: &MinimizeOptions,
) -> Result<SequenceReport, VariationalError> {
    check_lambda(lambda)?;
    if k == 0 || k > zeros.len() {
        return Err(VariationalError::Domain(format!(
            "need 1 ≤ K ≤ {} stored zeros, got {k}",
            zeros.len()
        )));
    }
    let tol = zeros.zero_tolerance.max(1e-9);
    let mut warnings = Vec::new();
    if let Some(bar) = lambda_bar {
        if !(lambda > bar) {
            warnings.push(format!("λ = {lambda} does not exceed λ̄ = {bar}"));
        }
    }
    let items = (1..=k)
        .into_par_iter()
        .map(|n| {
            let alpha = zeros.alpha(n);
            let tn = TruncatedNonlinearity::new(pc.clone(), alpha, tol)?;
            let (gamma, delta) = ramps.get(n - 1).copied().unwrap_or((alpha, 0.25 * grid.radius()));
            let gamma = gamma.min(alpha);
            let (ramp_negative, ramp_energy) = negativity_test(&tn, pot, lambda, gamma, delta, grid)?;
            let local = MinimizeOptions {
                ramp: Some((gamma, delta)),
                ..*opts
            };
            let result = minimize(&tn, pot, lambda, grid, &local)?;
            let sup_norm = result.u.sup_norm();
            Ok(SequenceItem {
                n,
                alpha_n: alpha,
                gamma,
                delta,
                sup_norm,
                energy: result.energy,
                residual: result.residual,
                iterations: result.iterations,
                interval_index: zeros.interval_index(sup_norm),
                ramp_energy,
                ramp_negative,
                trivial: sup_norm == 0.0,
                result,
            })
        })
        .collect::<Result<Vec<_>, VariationalError>>()?;
    let trend_toward_ell = items.windows(2).all(|w| match zeros.direction {
        Direction::Infinity => w[1].sup_norm > w[0].sup_norm,
        Direction::Zero => w[1].sup_norm < w[0].sup_norm,
    });
    let all_trivial = items.iter().all(|i| i.trivial);
    Ok(SequenceReport {
        direction: zeros.direction,
        lambda,
        items,
        trend_toward_ell,
        all_trivial,
        warnings,
    })
}

/// `n,alpha_n,sup_norm,energy,interval_index`
pub fn sequence_csv(report: &SequenceReport) -> String {
    let mut s = String::from("n,alpha_n,sup_norm,energy,interval_index\n");
    for it in &report.items {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            it.n,
            fmt_f(it.alpha_n),
            fmt_f(it.sup_norm),
            fmt_f(it.energy),
            it.interval_index.map(|i| i.to_string()).unwrap_or_default()
        );
    }
    s
}
