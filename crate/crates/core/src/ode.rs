//! Dormand–Prince 5(4) integrator with adaptive steps and event location.
//!
//! Events are located by re-stepping from the start of the accepted step
//! with a bisected step length until the bracket is shorter than
//! `event_tol`. Terminal events stop the integration; non-terminal events
//! make the integrator land exactly on the event and restart from there,
//! which keeps high-order steps off derivative kinks of the right-hand side.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("step size underflow at r = {r} (h = {h:e})")]
    StepUnderflow { r: f64, h: f64 },
    #[error("step budget of {0} exhausted")]
    TooManySteps(usize),
    #[error("right-hand side produced a non-finite value at r = {0}")]
    NonFinite(f64),
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// difference between the 5th and 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Crossing {
    Rising,
    Falling,
    Either,
}

pub type EventFn<'a, const D: usize> = Box<dyn Fn(f64, &[f64; D]) -> f64 + 'a>;

pub struct Event<'a, const D: usize> {
    pub g: EventFn<'a, D>,
    pub crossing: Crossing,
    pub terminal: bool,
}

impl<'a, const D: usize> Event<'a, D> {
    pub fn new(
        g: impl Fn(f64, &[f64; D]) -> f64 + 'a,
        crossing: Crossing,
        terminal: bool,
    ) -> Self {
        Self {
            g: Box::new(g),
            crossing,
            terminal,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_max: f64,
    /// Cap `h ≤ h_rel_max · |r|`. Near a singular point at `r = 0` the
    /// solution is only smooth on scales below `r`, and the embedded error
    /// estimate under-reports for steps beyond that.
    pub h_rel_max: f64,
    pub event_tol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-10,
            h_init: 1e-4,
            h_max: f64::INFINITY,
            h_rel_max: f64::INFINITY,
            event_tol: 1e-12,
            max_steps: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stop {
    /// Terminal event with its index; `r` is the secant-refined crossing.
    Event { index: usize, r: f64 },
    End,
}

#[derive(Debug, Clone)]
pub struct OdeRun<const D: usize> {
    pub r: f64,
    pub y: [f64; D],
    pub stop: Stop,
    pub steps: usize,
    pub rejected: usize,
    /// Non-terminal event hits as (event index, r).
    pub restarts: Vec<(usize, f64)>,
}

fn axpy<const D: usize>(y: &[f64; D], h: f64, terms: &[(f64, &[f64; D])]) -> [f64; D] {
    let mut out = *y;
    for i in 0..D {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] += h * acc;
    }
    out
}

/// A single Dormand–Prince step. Returns the 5th-order solution, the
/// derivative at the new point, and the embedded error vector.
fn dp_step<F, const D: usize>(
    rhs: &F,
    r: f64,
    y: &[f64; D],
    k1: &[f64; D],
    h: f64,
) -> ([f64; D], [f64; D], [f64; D])
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
{
    let k2 = rhs(r + C2 * h, &axpy(y, h, &[(A21, k1)]));
    let k3 = rhs(r + C3 * h, &axpy(y, h, &[(A31, k1), (A32, &k2)]));
    let k4 = rhs(r + C4 * h, &axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]));
    let k5 = rhs(
        r + C5 * h,
        &axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
    );
    let k6 = rhs(
        r + h,
        &axpy(y, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
    );
    let y_new = axpy(y, h, &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
    let k7 = rhs(r + h, &y_new);
    let mut err = [0.0; D];
    for i in 0..D {
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    (y_new, k7, err)
}

fn fired(crossing: Crossing, before: f64, after: f64) -> bool {
    match crossing {
        Crossing::Rising => before < 0.0 && after >= 0.0,
        Crossing::Falling => before > 0.0 && after <= 0.0,
        Crossing::Either => (before < 0.0 && after >= 0.0) || (before > 0.0 && after <= 0.0),
    }
}

/// Integrate `y' = rhs(r, y)` from `(r0, y0)` towards `r_end`.
///
/// `on_step` sees every accepted point, including event landings.
pub fn integrate<F, S, const D: usize>(
    rhs: F,
    r0: f64,
    y0: [f64; D],
    r_end: f64,
    opts: &OdeOptions,
    events: &[Event<'_, D>],
    mut on_step: S,
) -> Result<OdeRun<D>, OdeError>
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
    S: FnMut(f64, &[f64; D]),
{
    let mut r = r0;
    let mut y = y0;
    let mut k1 = rhs(r, &y);
    let mut h = opts.h_init.min(r_end - r0).min(opts.h_max);
    // last nonzero sign of each event function
    let mut last_g: Vec<f64> = events.iter().map(|e| (e.g)(r, &y)).collect();
    let mut steps = 0;
    let mut rejected = 0;
    let mut restarts = Vec::new();

    while r < r_end {
        if steps >= opts.max_steps {
            return Err(OdeError::TooManySteps(opts.max_steps));
        }
        let h_floor = 1e-14 * r.abs().max(1e-3);
        if h < h_floor {
            return Err(OdeError::StepUnderflow { r, h });
        }
        let rel_cap = if r == 0.0 { f64::INFINITY } else { opts.h_rel_max * r.abs() };
        let h_try = h.min(r_end - r).min(rel_cap);
        let (y_new, k_new, err) = dp_step(&rhs, r, &y, &k1, h_try);
        let mut norm = 0.0;
        for i in 0..D {
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            norm += (err[i] / sc).powi(2);
        }
        let norm = (norm / D as f64).sqrt();
        if !norm.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
            if h_try <= h_floor {
                return Err(OdeError::NonFinite(r));
            }
            h = 0.25 * h_try;
            rejected += 1;
            continue;
        }
        if norm > 1.0 {
            h = h_try * (0.9 * norm.powf(-0.2)).max(0.2);
            rejected += 1;
            continue;
        }
        steps += 1;

        // earliest event inside the accepted step
        let mut first: Option<(usize, f64)> = None;
        for (i, ev) in events.iter().enumerate() {
            let g_new = (ev.g)(r + h_try, &y_new);
            if fired(ev.crossing, last_g[i], g_new) {
                let theta = locate(&rhs, r, &y, &k1, h_try, ev, last_g[i], opts.event_tol);
                if first.is_none_or(|(_, t)| theta < t) {
                    first = Some((i, theta));
                }
            }
        }

        if let Some((idx, theta)) = first {
            let h_ev = theta * h_try;
            let (y_ev, k_ev, _) = dp_step(&rhs, r, &y, &k1, h_ev);
            let r_ev = r + h_ev;
            let ev = &events[idx];
            if ev.terminal {
                let g_before = last_g[idx];
                let g_after = (ev.g)(r_ev, &y_ev);
                // secant back from the landing point to the crossing itself
                let r_cross = refine_crossing(&rhs, r, &y, &k1, h_ev, g_before, g_after, ev);
                on_step(r_ev, &y_ev);
                return Ok(OdeRun {
                    r: r_ev,
                    y: y_ev,
                    stop: Stop::Event { index: idx, r: r_cross },
                    steps,
                    rejected,
                    restarts,
                });
            }
            restarts.push((idx, r_ev));
            r = r_ev;
            y = y_ev;
            k1 = k_ev;
            for (i, e) in events.iter().enumerate() {
                let g = (e.g)(r, &y);
                if g != 0.0 {
                    last_g[i] = g;
                } else if i == idx {
                    last_g[i] = -last_g[i];
                }
            }
            on_step(r, &y);
            continue;
        }

        r += h_try;
        y = y_new;
        k1 = k_new;
        for (i, e) in events.iter().enumerate() {
            let g = (e.g)(r, &y);
            if g != 0.0 {
                last_g[i] = g;
            }
        }
        on_step(r, &y);
        let grow = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
        h = (h_try * grow).min(opts.h_max);
    }
    Ok(OdeRun {
        r,
        y,
        stop: Stop::End,
        steps,
        rejected,
        restarts,
    })
}

/// Bisection on the step fraction. Returns the smallest tested fraction at
/// which the event has fired.
#[allow(clippy::too_many_arguments)]
fn locate<F, const D: usize>(
    rhs: &F,
    r: f64,
    y: &[f64; D],
    k1: &[f64; D],
    h: f64,
    ev: &Event<'_, D>,
    g_start: f64,
    event_tol: f64,
) -> f64
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
{
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut g_lo = g_start;
    while (hi - lo) * h > event_tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (ym, _, _) = dp_step(rhs, r, y, k1, mid * h);
        let gm = (ev.g)(r + mid * h, &ym);
        if fired(ev.crossing, g_lo, gm) {
            hi = mid;
        } else {
            lo = mid;
            if gm != 0.0 {
                g_lo = gm;
            }
        }
    }
    hi
}

#[allow(clippy::too_many_arguments)]
fn refine_crossing<F, const D: usize>(
    rhs: &F,
    r: f64,
    y: &[f64; D],
    k1: &[f64; D],
    h_ev: f64,
    g_before: f64,
    g_after: f64,
    ev: &Event<'_, D>,
) -> f64
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
{
    if g_after == 0.0 {
        return r + h_ev;
    }
    // step back by a small fraction and interpolate linearly in g
    let back = (h_ev * 1e-3).max(1e-15 * r.abs().max(1.0)).min(h_ev);
    let h_b = h_ev - back;
    let (y_b, _, _) = dp_step(rhs, r, y, k1, h_b);
    let g_b = if h_b > 0.0 { (ev.g)(r + h_b, &y_b) } else { g_before };
    if g_b == g_after {
        return r + h_ev;
    }
    let t = g_b / (g_b - g_after);
    r + h_b + t.clamp(0.0, 1.0) * back
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_period() {
        // y'' = -y from y(0)=1: first zero at pi/2
        let opts = OdeOptions::default();
        let ev = [Event::new(|_r, y: &[f64; 2]| y[0], Crossing::Falling, true)];
        let run = integrate(
            |_r, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            [1.0, 0.0],
            10.0,
            &opts,
            &ev,
            |_, _| {},
        )
        .unwrap();
        match run.stop {
            Stop::Event { index, r } => {
                assert_eq!(index, 0);
                assert!((r - std::f64::consts::FRAC_PI_2).abs() < 1e-9, "{r}");
            }
            Stop::End => panic!("no event"),
        }
    }

    #[test]
    fn exponential_growth_accuracy() {
        let opts = OdeOptions::default();
        let run = integrate(|_r, y: &[f64; 1]| [y[0]], 0.0, [1.0], 2.0, &opts, &[], |_, _| {}).unwrap();
        assert_eq!(run.stop, Stop::End);
        assert!((run.y[0] - 2f64.exp()).abs() < 1e-8);
    }

    #[test]
    fn restart_events_are_recorded() {
        // y' = cos r, event on y' sign: cos changes sign at pi/2 and 3pi/2
        let opts = OdeOptions::default();
        let ev = [Event::new(|r: f64, _y: &[f64; 1]| r.cos(), Crossing::Either, false)];
        let run = integrate(|r, _y: &[f64; 1]| [r.cos()], 0.0, [0.0], 6.0, &opts, &ev, |_, _| {}).unwrap();
        assert_eq!(run.restarts.len(), 2);
        assert!((run.restarts[0].1 - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
        assert!((run.y[0] - 6f64.sin()).abs() < 1e-8);
    }
}
