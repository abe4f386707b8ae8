//! Radial p-Laplacian: `−(r^{N−1}|v'|^{p−2}v')' = λ r^{N−1} f(v)`, `v(0) = c`, `v'(0) = 0`.
//!
//! Integrated in the flux `w = |v'|^{p−2}v'`, which stays smooth where
//! `v'` vanishes, together with the dissipation integral of the energy
//! identity.

use serde::{Deserialize, Serialize};

use super::{
    is_critical, primitive_tol, rescale_rho, Diagnostics, Outcome, ShootError, ShootResult, TrajectoryPoint,
};
use crate::nonlinearity::Nonlinearity;
use crate::ode::{integrate, Crossing, Event, OdeOptions, Stop};
use crate::primitive::PrimitiveCalculus;
use crate::thresholds::per_solution_lower_bound;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootConfig {
    pub p: f64,
    pub n: usize,
    pub c: f64,
    pub lambda_shoot: f64,
    pub r_max: f64,
    pub tol_ode: f64,
    pub event_tol: f64,
}

impl ShootConfig {
    pub fn new(p: f64, n: usize, c: f64) -> Self {
        Self {
            p,
            n,
            c,
            lambda_shoot: 1.0,
            r_max: 1e4,
            tol_ode: 1e-10,
            event_tol: 1e-12,
        }
    }

    fn validate(&self) -> Result<(), ShootError> {
        let ok = self.p > 1.0
            && self.n >= 1
            && self.c > 0.0
            && self.c.is_finite()
            && self.lambda_shoot > 0.0
            && self.r_max > 0.0
            && self.tol_ode > 0.0
            && self.event_tol > 0.0;
        if ok {
            Ok(())
        } else {
            Err(ShootError::Domain(format!("invalid shooting configuration {self:?}")))
        }
    }
}

/// `sign(w) |w|^{1/(p−1)}`
#[inline]
fn slope_from_flux(w: f64, p: f64) -> f64 {
    if p == 2.0 {
        w
    } else {
        w.signum() * w.abs().powf(1.0 / (p - 1.0))
    }
}

/// Shoot from height `c`. Errors with `StalledAtCriticalPoint` when
/// `f(c) = 0`. A negative `f(c)` bends the trajectory upward at once and
/// is reported as a bounce at `r = 0`.
pub fn shoot(cfg: &ShootConfig, nl: &Nonlinearity) -> Result<ShootResult, ShootError> {
    cfg.validate()?;
    let (p, c, lam) = (cfg.p, cfg.c, cfg.lambda_shoot);
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
        return Ok(ShootResult {
            c,
            outcome: Outcome::Bounced { r_turn: 0.0, v_turn: c },
            lambda_shoot: lam,
            trajectory: vec![origin],
            lambda_rescaled: None,
            diagnostics: Diagnostics::default(),
            steps: 0,
            rejected_steps: 0,
        });
    }

    // origin series: v ≈ c − (p−1)/p K r^{p/(p−1)}, w ≈ −(λ f(c)/N) r
    let q = p / (p - 1.0);
    let k = (lam * fc / cfg.n as f64).powf(1.0 / (p - 1.0));
    let r_char = (c / ((p - 1.0) / p * k)).powf(1.0 / q).min(cfg.r_max);
    let r0 = (1e-6 * r_char).max(cfg.event_tol);
    let d0 = (p - 1.0) / p * k * r0.powf(q);
    let w0 = -(lam * fc / cfg.n as f64) * r0;
    let e0 = nm1 * k.powf(p) * (p - 1.0) / p * r0.powf(q);

    // State is the drop d = c − v, not v: relative error control on v ≈ c
    // would swamp the small drop that F(c) − F(v) depends on.
    let rhs = |r: f64, y: &[f64; 3]| -> [f64; 3] {
        let dv = slope_from_flux(y[1], p);
        [-dv, -lam * nl.eval(c - y[0]) - nm1 * y[1] / r, nm1 * dv.abs().powf(p) / r]
    };
    let events = [
        Event::new(|_r, y: &[f64; 3]| c - y[0], Crossing::Falling, true),
        Event::new(|_r, y: &[f64; 3]| y[1], Crossing::Rising, true),
    ];
    let opts = OdeOptions {
        rtol: cfg.tol_ode,
        atol: cfg.tol_ode * c.min(1.0),
        h_init: r0,
        h_max: r_char.max(r0) * 0.1,
        h_rel_max: 0.1,
        event_tol: cfg.event_tol,
        ..OdeOptions::default()
    };
    let mut trajectory = vec![origin];
    let push = |traj: &mut Vec<TrajectoryPoint>, r: f64, y: &[f64; 3]| {
        traj.push(TrajectoryPoint {
            r,
            v: c - y[0],
            dv: slope_from_flux(y[1], p),
            dissipation: y[2],
        })
    };
    push(&mut trajectory, r0, &[d0, w0, e0]);
    let run = integrate(rhs, r0, [d0, w0, e0], cfg.r_max, &opts, &events, |r, y| {
        push(&mut trajectory, r, y)
    })?;
    let outcome = match run.stop {
        Stop::Event { index: 0, r } => Outcome::HitZero { rho: r },
        Stop::Event { r, .. } => Outcome::Bounced {
            r_turn: r,
            v_turn: c - run.y[0],
        },
        Stop::End => Outcome::HorizonExceeded,
    };
    Ok(ShootResult {
        c,
        outcome,
        lambda_shoot: lam,
        trajectory,
        lambda_rescaled: None,
        diagnostics: Diagnostics::default(),
        steps: run.steps,
        rejected_steps: run.rejected,
    })
}

/// `max |LHS − RHS| / (1 + |RHS|)` over the samples of
/// `(p−1)/p |v'|^p + (N−1)∫_0^r |v'|^p/t = λ (F(c) − F(v))`.
pub fn energy_residual(res: &ShootResult, pc: &PrimitiveCalculus, p: f64, lambda: f64) -> Result<f64, ShootError> {
    let fc = pc.antiderivative(res.c)?;
    let mut worst: f64 = 0.0;
    for pt in &res.trajectory {
        let lhs = (p - 1.0) / p * pt.dv.abs().powf(p) + pt.dissipation;
        let rhs = lambda * (fc - pc.antiderivative(pt.v.max(0.0))?);
        worst = worst.max((lhs - rhs).abs() / (1.0 + rhs.abs()));
    }
    Ok(worst)
}

/// Fill in rescaled `λ` and the necessary-condition diagnostics for a
/// trajectory on `B_R`: sign of `F(c)`, the area condition
/// `F(c) ≥ max_{[0,c]} F`, and the slack against the per-solution bound.
pub fn check_necessary_conditions(
    res: &mut ShootResult,
    pc: &PrimitiveCalculus,
    p: f64,
    radius: f64,
) -> Result<(), ShootError> {
    let f_c = pc.antiderivative(res.c)?;
    let tol = primitive_tol(f_c);
    res.diagnostics.f_at_max_ok = f_c >= -tol;
    res.diagnostics.area_condition_ok = f_c - pc.running_max(res.c)? >= -tol;
    if let Some(rho) = res.outcome.rho() {
        let lambda = rescale_rho(rho, res.lambda_shoot, radius, p)?;
        res.lambda_rescaled = Some(lambda);
        res.diagnostics.energy_residual_max = Some(energy_residual(res, pc, p, res.lambda_shoot)?);
        if let Ok(bound) = per_solution_lower_bound(pc, res.c, p, radius) {
            res.diagnostics.lower_bound = Some(bound);
            res.diagnostics.lower_bound_slack = Some(lambda - bound);
        }
    }
    Ok(())
}

/// Shoot and attach all diagnostics for `B_R`. `pc` must use the same `f`.
pub fn shoot_on_ball(
    cfg: &ShootConfig,
    pc: &PrimitiveCalculus,
    radius: f64,
) -> Result<ShootResult, ShootError> {
    let mut res = match shoot(cfg, pc.nonlinearity()) {
        Ok(r) => r,
        Err(ShootError::StalledAtCriticalPoint { c }) => ShootResult::stalled(c, cfg.lambda_shoot),
        Err(e) => return Err(e),
    };
    check_necessary_conditions(&mut res, pc, cfg.p, radius)?;
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinearity::Direction;
    use crate::shoot::rescale;
    use std::f64::consts::PI;

    fn linear() -> Nonlinearity {
        Nonlinearity::polynomial(&[0.0, 1.0], Direction::Infinity).unwrap()
    }

    fn one() -> Nonlinearity {
        Nonlinearity::polynomial(&[1.0], Direction::Infinity).unwrap()
    }

    #[test]
    fn cosine_oracle() {
        let res = shoot(&ShootConfig::new(2.0, 1, 1.0), &linear()).unwrap();
        let rho = res.outcome.rho().unwrap();
        assert!((rho - PI / 2.0).abs() < 1e-7 * PI / 2.0, "{rho}");
        let worst = res
            .trajectory
            .iter()
            .map(|pt| (pt.v - pt.r.cos()).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-8, "{worst}");
        assert_eq!(res.trajectory[0].r, 0.0);
        assert_eq!(res.trajectory[0].v, 1.0);
    }

    #[test]
    fn paraboloid_oracle() {
        let res = shoot(&ShootConfig::new(2.0, 3, 1.0), &one()).unwrap();
        assert!((res.outcome.rho().unwrap() - 6f64.sqrt()).abs() < 1e-7 * 6f64.sqrt());
    }

    #[test]
    fn degenerate_oracle() {
        let res = shoot(&ShootConfig::new(3.0, 1, 1.0), &one()).unwrap();
        let exact = 1.5f64.powf(2.0 / 3.0);
        assert!((res.outcome.rho().unwrap() - exact).abs() < 1e-6 * exact);
    }

    #[test]
    fn stalls_at_zero_of_f() {
        let nl = Nonlinearity::power_sin(1.0, Direction::Infinity).unwrap();
        assert!(matches!(
            shoot(&ShootConfig::new(2.0, 1, 1.5 * PI), &nl),
            Err(ShootError::StalledAtCriticalPoint { .. })
        ));
    }

    #[test]
    fn rescale_examples() {
        let mut res = ShootResult::stalled(1.0, 1.0);
        res.outcome = Outcome::HitZero { rho: PI / 2.0 };
        assert!((rescale(&res, 1.0, 2.0).unwrap() - PI * PI / 4.0).abs() < 1e-14);
        res.outcome = Outcome::HitZero { rho: 1.7 };
        assert_eq!(rescale(&res, 1.7, 2.0).unwrap(), 1.0);
        res.outcome = Outcome::HitZero { rho: 2.0 };
        assert!((rescale(&res, 1.0, 3.0).unwrap() - 8.0).abs() < 1e-14);
        res.outcome = Outcome::Stalled;
        assert!(matches!(rescale(&res, 1.0, 2.0), Err(ShootError::NotAZeroHit)));
    }

    #[test]
    fn energy_identity_on_oracles() {
        for (nl, n) in [(linear(), 1), (one(), 3)] {
            let pc = PrimitiveCalculus::new(nl, 2.0, 1.0).unwrap();
            let res = shoot_on_ball(&ShootConfig::new(2.0, n, 1.0), &pc, 1.0).unwrap();
            assert!(res.diagnostics.energy_residual_max.unwrap() < 1e-7);
            assert!(res.diagnostics.f_at_max_ok && res.diagnostics.area_condition_ok);
            assert!(res.diagnostics.lower_bound_slack.unwrap() >= 0.0);
        }
    }

    #[test]
    fn corrupted_trajectory_breaks_energy_identity() {
        let pc = PrimitiveCalculus::new(linear(), 2.0, 1.0).unwrap();
        let mut res = shoot(&ShootConfig::new(2.0, 1, 1.0), &linear()).unwrap();
        for pt in &mut res.trajectory {
            pt.dv *= 1.1;
        }
        assert!(energy_residual(&res, &pc, 2.0, 1.0).unwrap() > 0.01);
    }

    #[test]
    fn negative_primitive_at_max_is_flagged() {
        // F(1) = -0.5 for f = -s
        let nl = Nonlinearity::polynomial(&[0.0, -1.0], Direction::Infinity).unwrap();
        let pc = PrimitiveCalculus::new(nl, 2.0, 1.0).unwrap();
        let mut res = ShootResult::stalled(1.0, 1.0);
        check_necessary_conditions(&mut res, &pc, 2.0, 1.0).unwrap();
        assert!(!res.diagnostics.f_at_max_ok);
    }

    #[test]
    fn negative_f_at_start_bounces() {
        let nl = Nonlinearity::polynomial(&[-1.0], Direction::Infinity).unwrap();
        let res = shoot(&ShootConfig::new(2.0, 2, 1.0), &nl).unwrap();
        assert!(matches!(res.outcome, Outcome::Bounced { .. }));
    }
}
