//! Bifurcation diagrams `c ↦ λ(c)` on a fixed ball, their branches and
//! the solutions at a prescribed `λ*`.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::plap::{shoot, shoot_on_ball, ShootConfig};
use super::pucci::{pucci_shoot, pucci_shoot_on_ball, PucciShootConfig};
use super::{Outcome, ShootError, ShootResult};
use crate::nonlinearity::ZeroSequence;
use crate::primitive::PrimitiveCalculus;
use crate::roots::brent;
use crate::thresholds::Operator;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagramConfig {
    pub operator: Operator,
    pub n_dim: usize,
    pub radius: f64,
    pub lambda_shoot: f64,
    pub r_max: f64,
    pub tol_ode: f64,
    pub event_tol: f64,
}

impl DiagramConfig {
    pub fn plap(p: f64, n_dim: usize, radius: f64) -> Self {
        Self {
            operator: Operator::PLaplacian { p },
            n_dim,
            radius,
            lambda_shoot: 1.0,
            r_max: 1e4,
            tol_ode: 1e-10,
            event_tol: 1e-12,
        }
    }

    pub fn pucci(lambda_ell: f64, n_dim: usize, radius: f64) -> Self {
        Self {
            operator: Operator::Pucci { lambda_ell },
            ..Self::plap(2.0, n_dim, radius)
        }
    }

    /// Homogeneity exponent of the operator.
    pub fn exponent(&self) -> f64 {
        match self.operator {
            Operator::PLaplacian { p } => p,
            Operator::Pucci { .. } => 2.0,
        }
    }

    fn plap_config(&self, p: f64, c: f64) -> ShootConfig {
        ShootConfig {
            p,
            n: self.n_dim,
            c,
            lambda_shoot: self.lambda_shoot,
            r_max: self.r_max,
            tol_ode: self.tol_ode,
            event_tol: self.event_tol,
        }
    }

    fn pucci_config(&self, lambda_ell: f64, c: f64) -> PucciShootConfig {
        PucciShootConfig {
            lambda_ell,
            n: self.n_dim,
            c,
            lambda_shoot: self.lambda_shoot,
            r_max: self.r_max,
            tol_ode: self.tol_ode,
            event_tol: self.event_tol,
        }
    }

    /// Shoot from `c` with full diagnostics on `B_R`.
    pub fn shoot_with_diagnostics(&self, pc: &PrimitiveCalculus, c: f64) -> Result<ShootResult, ShootError> {
        match self.operator {
            Operator::PLaplacian { p } => shoot_on_ball(&self.plap_config(p, c), pc, self.radius),
            Operator::Pucci { lambda_ell } => pucci_shoot_on_ball(&self.pucci_config(lambda_ell, c), pc, self.radius),
        }
    }

    /// Rescaled `λ(c)` alone, `None` unless the trajectory reaches zero.
    pub fn lambda_at(&self, pc: &PrimitiveCalculus, c: f64) -> Result<Option<f64>, ShootError> {
        let res = match self.operator {
            Operator::PLaplacian { p } => shoot(&self.plap_config(p, c), pc.nonlinearity()),
            Operator::Pucci { lambda_ell } => pucci_shoot(&self.pucci_config(lambda_ell, c), pc.nonlinearity()),
        };
        match res {
            Ok(r) => Ok(r
                .outcome
                .rho()
                .map(|rho| self.lambda_shoot * (rho / self.radius).powf(self.exponent()))),
            Err(ShootError::StalledAtCriticalPoint { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramPoint {
    pub c: f64,
    pub outcome: Outcome,
    pub lambda: Option<f64>,
    pub f_c: f64,
    pub fbar_c: f64,
    pub lower_bound: Option<f64>,
    pub energy_residual: Option<f64>,
    pub pucci_slack: Option<f64>,
    pub f_at_max_ok: bool,
    pub area_ok: bool,
    pub zero_interval_index: Option<usize>,
    pub q_sign_changes: Option<usize>,
}

impl DiagramPoint {
    fn from_result(res: &ShootResult, pc: &PrimitiveCalculus, zeros: Option<&ZeroSequence>) -> Result<Self, ShootError> {
        Ok(Self {
            c: res.c,
            outcome: res.outcome,
            lambda: res.lambda_rescaled,
            f_c: pc.antiderivative(res.c)?,
            fbar_c: pc.running_range(res.c)?,
            lower_bound: res.diagnostics.lower_bound,
            energy_residual: res.diagnostics.energy_residual_max,
            pucci_slack: res.diagnostics.pucci_min_slack,
            f_at_max_ok: res.diagnostics.f_at_max_ok,
            area_ok: res.diagnostics.area_condition_ok,
            zero_interval_index: zeros.and_then(|z| z.interval_index(res.c)),
            q_sign_changes: res.diagnostics.q_sign_changes,
        })
    }

    pub fn is_hit(&self) -> bool {
        matches!(self.outcome, Outcome::HitZero { .. })
    }
}

/// Maximal run of consecutive grid points reaching zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub first: usize,
    pub last: usize,
    pub c_min: f64,
    pub c_max: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
}

/// A solution at `λ = λ*` located between two grid points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub lambda_star: f64,
    pub point: DiagramPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationDiagram {
    pub config: DiagramConfig,
    pub points: Vec<DiagramPoint>,
    pub branches: Vec<Branch>,
    pub zeros: Option<ZeroSequence>,
}

/// Evenly or log-spaced grid on `[c_min, c_max]`.
pub fn scan_grid(c_min: f64, c_max: f64, points: usize, log_spacing: bool) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![c_min],
        _ => (0..points)
            .map(|k| {
                let t = k as f64 / (points - 1) as f64;
                if log_spacing {
                    c_min * (c_max / c_min).powf(t)
                } else {
                    c_min + (c_max - c_min) * t
                }
            })
            .collect(),
    }
}

/// Add `α_n (1 ± 10^{−k})`, `k = 1..=depth`, for every zero inside the
/// grid's range. `λ(c)` is steep near the zeros, where solutions at large
/// `λ*` live.
pub fn refine_near_zeros(grid: &[f64], zeros: &ZeroSequence, depth: u32) -> Vec<f64> {
    let (lo, hi) = grid
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let mut out = grid.to_vec();
    for &a in &zeros.alphas {
        for k in 1..=depth {
            for s in [-1.0, 1.0] {
                let c = a * (1.0 + s * 10f64.powi(-(k as i32)));
                if c >= lo && c <= hi {
                    out.push(c);
                }
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// One diagnosed shoot per grid point, in grid order.
pub fn diagram(
    pc: &PrimitiveCalculus,
    cfg: &DiagramConfig,
    c_grid: &[f64],
    zeros: Option<&ZeroSequence>,
) -> Result<BifurcationDiagram, ShootError> {
    if c_grid.is_empty() {
        return Err(ShootError::EmptyGrid);
    }
    if let Some(bad) = c_grid.iter().find(|c| !(**c > 0.0 && c.is_finite())) {
        return Err(ShootError::Domain(format!("grid heights must be positive, got {bad}")));
    }
    let points = c_grid
        .par_iter()
        .map(|&c| {
            let res = cfg.shoot_with_diagnostics(pc, c)?;
            DiagramPoint::from_result(&res, pc, zeros)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let branches = find_branches(&points);
    Ok(BifurcationDiagram {
        config: *cfg,
        points,
        branches,
        zeros: zeros.cloned(),
    })
}

fn find_branches(points: &[DiagramPoint]) -> Vec<Branch> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < points.len() {
        if !points[i].is_hit() {
            i += 1;
            continue;
        }
        let first = i;
        while i + 1 < points.len() && points[i + 1].is_hit() {
            i += 1;
        }
        let run = &points[first..=i];
        let lambdas = run.iter().filter_map(|p| p.lambda);
        let (lmin, lmax) = lambdas.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), l| (a.min(l), b.max(l)));
        out.push(Branch {
            first,
            last: i,
            c_min: run[0].c,
            c_max: run[run.len() - 1].c,
            lambda_min: lmin,
            lambda_max: lmax,
        });
        i += 1;
    }
    out
}

impl BifurcationDiagram {
    pub fn hit_points(&self) -> impl Iterator<Item = &DiagramPoint> {
        self.points.iter().filter(|p| p.is_hit())
    }

    /// Solutions of `λ(c) = λ*` bracketed by adjacent points of a branch,
    /// polished by Brent's method in `c` and re-diagnosed.
    pub fn crossings(&self, pc: &PrimitiveCalculus, lambda_star: f64) -> Result<Vec<Crossing>, ShootError> {
        let brackets: Vec<(f64, f64, f64, f64)> = self
            .points
            .windows(2)
            .filter_map(|w| match (w[0].lambda, w[1].lambda) {
                (Some(a), Some(b)) if w[0].is_hit() && w[1].is_hit() => {
                    let (ga, gb) = (a - lambda_star, b - lambda_star);
                    (ga == 0.0 || ga * gb < 0.0).then_some((w[0].c, w[1].c, ga, gb))
                }
                _ => None,
            })
            .collect();
        let cfg = self.config;
        let zeros = self.zeros.as_ref();
        brackets
            .par_iter()
            .map(|&(a, b, ga, _)| {
                let c = if ga == 0.0 {
                    a
                } else {
                    let mut failure = None;
                    let g = |c: f64| match cfg.lambda_at(pc, c) {
                        Ok(Some(l)) => l - lambda_star,
                        Ok(None) => f64::INFINITY,
                        Err(e) => {
                            failure.get_or_insert(e);
                            f64::INFINITY
                        }
                    };
                    let root = brent(g, a, b, 1e-13 * b.abs(), 200)
                        .map_err(|e| ShootError::Domain(format!("crossing search in [{a}, {b}]: {e}")))?;
                    if let Some(e) = failure {
                        return Err(e);
                    }
                    root
                };
                let res = cfg.shoot_with_diagnostics(pc, c)?;
                Ok(Crossing {
                    lambda_star,
                    point: DiagramPoint::from_result(&res, pc, zeros)?,
                })
            })
            .collect()
    }

    /// CSV with one row per grid point; floats at 17 significant digits,
    /// empty cells for values that do not apply.
    pub fn to_csv(&self) -> String {
        let pucci = matches!(self.config.operator, Operator::Pucci { .. });
        let mut s = String::from("c,outcome,rho,lambda,F_c,Fbar_c,lower_bound,energy_residual,area_ok,zero_interval_index");
        if pucci {
            s.push_str(",q_sign_changes");
        }
        s.push('\n');
        for p in &self.points {
            let _ = write!(
                s,
                "{},{},{},{},{},{},{},{},{},{}",
                fmt_f(p.c),
                p.outcome.label(),
                fmt_opt(p.outcome.rho()),
                fmt_opt(p.lambda),
                fmt_f(p.f_c),
                fmt_f(p.fbar_c),
                fmt_opt(p.lower_bound),
                fmt_opt(p.energy_residual),
                p.area_ok,
                p.zero_interval_index.map(|i| i.to_string()).unwrap_or_default(),
            );
            if pucci {
                let _ = write!(s, ",{}", p.q_sign_changes.map(|i| i.to_string()).unwrap_or_default());
            }
            s.push('\n');
        }
        s
    }
}

pub fn fmt_f(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinearity::{Direction, Nonlinearity};
    use std::f64::consts::PI;

    #[test]
    fn linear_diagram_is_flat() {
        let nl = Nonlinearity::polynomial(&[0.0, 1.0], Direction::Infinity).unwrap();
        let pc = PrimitiveCalculus::new(nl, 2.0, 1.0).unwrap();
        let cfg = DiagramConfig::plap(2.0, 1, 1.0);
        let d = diagram(&pc, &cfg, &scan_grid(0.1, 10.0, 9, true), None).unwrap();
        for p in &d.points {
            assert!((p.lambda.unwrap() - PI * PI / 4.0).abs() < 1e-6);
        }
        assert_eq!(d.branches.len(), 1);
    }

    #[test]
    fn empty_grid_is_an_error() {
        let pc = PrimitiveCalculus::new(Nonlinearity::pure_sine(), 2.0, 1.0).unwrap();
        assert!(matches!(
            diagram(&pc, &DiagramConfig::plap(2.0, 1, 1.0), &[], None),
            Err(ShootError::EmptyGrid)
        ));
    }

    #[test]
    fn stalled_points_split_branches() {
        let nl = Nonlinearity::power_sin(1.0, Direction::Infinity).unwrap();
        let zeros = nl.find_zeros(3).unwrap();
        let pc = PrimitiveCalculus::new(nl, 2.0, 1.0).unwrap();
        let grid = vec![1.0, 3.0, 1.5 * PI, 5.0, 6.0];
        let d = diagram(&pc, &DiagramConfig::plap(2.0, 1, 1.0), &grid, Some(&zeros)).unwrap();
        assert_eq!(d.points[2].outcome, Outcome::Stalled);
        assert_eq!(d.branches.len(), 2);
        assert_eq!(d.points[0].zero_interval_index, Some(1));
        assert_eq!(d.points[3].zero_interval_index, Some(2));
    }

    #[test]
    fn csv_has_fixed_columns() {
        let nl = Nonlinearity::polynomial(&[0.0, 1.0], Direction::Infinity).unwrap();
        let pc = PrimitiveCalculus::new(nl, 2.0, 1.0).unwrap();
        let d = diagram(&pc, &DiagramConfig::pucci(1.0, 1, 1.0), &[0.5, 1.0], None).unwrap();
        let csv = d.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].ends_with("q_sign_changes"));
        assert!(lines.iter().all(|l| l.split(',').count() == 11));
    }

    #[test]
    fn refinement_points_bracket_zeros() {
        let nl = Nonlinearity::power_sin(1.0, Direction::Infinity).unwrap();
        let zeros = nl.find_zeros(2).unwrap();
        let g = refine_near_zeros(&scan_grid(1.0, 10.0, 4, false), &zeros, 3);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert!(g.contains(&(1.5 * PI * (1.0 - 1e-3))));
        assert!(!g.contains(&(1.5 * PI)));
    }
}
