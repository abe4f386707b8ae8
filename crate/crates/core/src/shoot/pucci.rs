//! Radial Pucci maximal equation `−M⁺(D²v) = λ f(v)`.
//!
//! With `q = λ f(v) + (N−1) v'/(Λ r)` the radial form is `v'' = −Λ q` for
//! `q ≥ 0` and `v'' = −q/Λ` otherwise. Both branches vanish at `q = 0`, so
//! the right-hand side is continuous with a kink there; the integrator
//! lands on every sign change of `q` and restarts.

use serde::{Deserialize, Serialize};

use super::{
    is_critical, primitive_tol, rescale_rho, Diagnostics, Outcome, ShootError, ShootResult, TrajectoryPoint,
};
use crate::nonlinearity::Nonlinearity;
use crate::ode::{integrate, Crossing, Event, OdeOptions, Stop};
use crate::primitive::PrimitiveCalculus;
use crate::thresholds::per_solution_lower_bound_pucci;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PucciShootConfig {
    pub lambda_ell: f64,
    pub n: usize,
    pub c: f64,
    pub lambda_shoot: f64,
    pub r_max: f64,
    pub tol_ode: f64,
    pub event_tol: f64,
}

impl PucciShootConfig {
    pub fn new(lambda_ell: f64, n: usize, c: f64) -> Self {
        Self {
            lambda_ell,
            n,
            c,
            lambda_shoot: 1.0,
            r_max: 1e4,
            tol_ode: 1e-10,
            event_tol: 1e-12,
        }
    }
}

/// `v''` from the switching rule.
#[inline]
pub fn switched_second_derivative(q: f64, lambda_ell: f64) -> f64 {
    if q >= 0.0 {
        -lambda_ell * q
    } else {
        -q / lambda_ell
    }
}

pub fn pucci_shoot(cfg: &PucciShootConfig, nl: &Nonlinearity) -> Result<ShootResult, ShootError> {
    let valid = cfg.lambda_ell >= 1.0
        && cfg.n >= 1
        && cfg.c > 0.0
        && cfg.c.is_finite()
        && cfg.lambda_shoot > 0.0
        && cfg.r_max > 0.0
        && cfg.tol_ode > 0.0
        && cfg.event_tol > 0.0;
    if !valid {
        return Err(ShootError::Domain(format!("invalid Pucci configuration {cfg:?}")));
    }
    let (ll, c, lam) = (cfg.lambda_ell, cfg.c, cfg.lambda_shoot);
    let nm1 = (cfg.n - 1) as f64;
    let fc = nl.eval(c);
    if is_critical(fc, c) {
        return Err(ShootError::StalledAtCriticalPoint { c });
    }
    let origin = TrajectoryPoint {
        r: 0.0,
        v: c,
        dv: 0.0,
        dissipation: 0.0,
    };
    if fc < 0.0 {
        // v''(0) = −λ f(c)/(Λ N) > 0: the profile rises from the center
        return Ok(ShootResult {
            c,
            outcome: Outcome::Bounced { r_turn: 0.0, v_turn: c },
            lambda_shoot: lam,
            trajectory: vec![origin],
            lambda_rescaled: None,
            diagnostics: Diagnostics {
                q_sign_changes: Some(0),
                ..Diagnostics::default()
            },
            steps: 0,
            rejected_steps: 0,
        });
    }

    let a = -ll * lam * fc / cfg.n as f64;
    let r_char = (2.0 * c / a.abs()).sqrt().min(cfg.r_max);
    let r0 = (1e-6 * r_char).max(cfg.event_tol);
    let y0 = [c + 0.5 * a * r0 * r0, a * r0];
    let q_of = move |r: f64, y: &[f64; 2]| lam * nl.eval(y[0]) + nm1 * y[1] / (ll * r);
    let rhs = |r: f64, y: &[f64; 2]| -> [f64; 2] { [y[1], switched_second_derivative(q_of(r, y), ll)] };
    let events = [
        Event::new(|_r, y: &[f64; 2]| y[0], Crossing::Falling, true),
        Event::new(|_r, y: &[f64; 2]| y[1], Crossing::Rising, true),
        Event::new(q_of, Crossing::Either, false),
    ];
    let opts = OdeOptions {
        rtol: cfg.tol_ode,
        atol: cfg.tol_ode * c.min(1.0),
        h_init: r0,
        h_max: r_char * 0.1,
        event_tol: cfg.event_tol,
        ..OdeOptions::default()
    };
    let mut trajectory = vec![
        origin,
        TrajectoryPoint {
            r: r0,
            v: y0[0],
            dv: y0[1],
            dissipation: 0.0,
        },
    ];
    let run = integrate(rhs, r0, y0, cfg.r_max, &opts, &events, |r, y| {
        trajectory.push(TrajectoryPoint {
            r,
            v: y[0],
            dv: y[1],
            dissipation: 0.0,
        })
    })?;
    let outcome = match run.stop {
        Stop::Event { index: 0, r } => Outcome::HitZero { rho: r },
        Stop::Event { r, .. } => Outcome::Bounced {
            r_turn: r,
            v_turn: run.y[0],
        },
        Stop::End => Outcome::HorizonExceeded,
    };
    Ok(ShootResult {
        c,
        outcome,
        lambda_shoot: lam,
        trajectory,
        lambda_rescaled: None,
        diagnostics: Diagnostics {
            q_sign_changes: Some(run.restarts.len()),
            ..Diagnostics::default()
        },
        steps: run.steps,
        rejected_steps: run.rejected,
    })
}

/// Minimum over the samples of
/// `[λ (F_Λ(c) − F_Λ(v)) − v'²/(2Λ)] / (1 + |λ (F_Λ(c) − F_Λ(v))|)`.
pub fn pucci_gradient_slack(res: &ShootResult, pc: &PrimitiveCalculus, lambda: f64) -> Result<f64, ShootError> {
    let ll = pc.lambda_ell();
    let flc = pc.antiderivative_lambda(res.c)?;
    let mut worst = f64::INFINITY;
    for pt in &res.trajectory {
        let rhs = lambda * (flc - pc.antiderivative_lambda(pt.v.max(0.0))?);
        let lhs = pt.dv * pt.dv / (2.0 * ll);
        worst = worst.min((rhs - lhs) / (1.0 + rhs.abs()));
    }
    Ok(worst)
}

/// Rescaled `λ`, the pointwise gradient inequality, and the slack against
/// `c² / (2ΛR² F̄_Λ(c))`.
pub fn pucci_inequality_check(res: &mut ShootResult, pc: &PrimitiveCalculus, radius: f64) -> Result<(), ShootError> {
    let f_c = pc.antiderivative(res.c)?;
    let tol = primitive_tol(f_c);
    res.diagnostics.f_at_max_ok = f_c >= -tol;
    res.diagnostics.area_condition_ok = f_c - pc.running_max(res.c)? >= -tol;
    if let Some(rho) = res.outcome.rho() {
        let lambda = rescale_rho(rho, res.lambda_shoot, radius, 2.0)?;
        res.lambda_rescaled = Some(lambda);
        res.diagnostics.pucci_min_slack = Some(pucci_gradient_slack(res, pc, res.lambda_shoot)?);
        if let Ok(bound) = per_solution_lower_bound_pucci(pc, res.c, radius) {
            res.diagnostics.lower_bound = Some(bound);
            res.diagnostics.lower_bound_slack = Some(lambda - bound);
        }
    }
    Ok(())
}

/// Shoot and attach all diagnostics for `B_R`; `pc` carries `Λ`.
pub fn pucci_shoot_on_ball(
    cfg: &PucciShootConfig,
    pc: &PrimitiveCalculus,
    radius: f64,
) -> Result<ShootResult, ShootError> {
    let mut res = match pucci_shoot(cfg, pc.nonlinearity()) {
        Ok(r) => r,
        Err(ShootError::StalledAtCriticalPoint { c }) => {
            let mut r = ShootResult::stalled(c, cfg.lambda_shoot);
            r.diagnostics.q_sign_changes = Some(0);
            r
        }
        Err(e) => return Err(e),
    };
    pucci_inequality_check(&mut res, pc, radius)?;
    Ok(res)
}
