use std::path::PathBuf;

use osc_core::primitive::{LimitOptions, LimitTarget};
use osc_core::shoot::diagram::{diagram, refine_near_zeros, scan_grid, BifurcationDiagram, DiagramConfig, DiagramPoint};
use osc_core::shoot::plap::{shoot_on_ball, ShootConfig};
use osc_core::shoot::pucci::{pucci_shoot_on_ball, PucciShootConfig};
use osc_core::shoot::{Outcome, ShootResult};
use osc_core::thresholds::{
    analyze, lambda_under_plap, lambda_under_pucci, per_solution_lower_bound, per_solution_lower_bound_pucci,
    reduce_negative_f0, AnalyzeOptions, Operator, ThresholdReport,
};
use osc_core::variational::{run_sequence, sequence_csv, MinimizeOptions, PLaplacePotential, RadialGrid, SequenceReport};
use osc_core::{Direction, PrimitiveCalculus, ZeroSequence};
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::config::{Loaded, OperatorSpec};
use crate::error::CliError;
use crate::output::{sha256_hex, write_atomic, write_json, Envelope, OutDir};

/// Flag values that replace config entries for one run.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Overrides {
    pub lambda_star: Option<Vec<f64>>,
    pub points: Option<usize>,
    pub tol_ode: Option<f64>,
    pub c: Option<f64>,
    pub lambda: Option<f64>,
}

pub struct Context {
    pub loaded: Loaded,
    pub out: OutDir,
    pub seed: u64,
    pub overrides: Overrides,
    hash: String,
}

/// Files written and inequalities that failed beyond tolerance.
#[derive(Debug, Default)]
pub struct Finished {
    pub written: Vec<PathBuf>,
    pub violations: Vec<String>,
}

#[derive(Debug, Serialize)]
struct WithOverrides<'a, T: Serialize> {
    overrides: &'a Overrides,
    #[serde(flatten)]
    body: T,
}

impl Context {
    pub fn new(mut loaded: Loaded, out: OutDir, seed: u64, overrides: Overrides) -> Result<Self, CliError> {
        let hash = sha256_hex(&loaded.raw);
        let cfg = &mut loaded.config;
        if let Some(t) = overrides.tol_ode {
            cfg.tolerances.tol_ode = t;
        }
        if let Some(n) = overrides.points {
            match cfg.scan.as_mut() {
                Some(scan) => scan.points = n,
                None => {
                    if let Some(s) = cfg.shoot.as_mut() {
                        s.trajectory_points = n;
                    }
                }
            }
        }
        if let Some(l) = &overrides.lambda_star {
            cfg.diagram.lambda_star = l.clone();
        }
        if let Some(s) = cfg.shoot.as_mut() {
            s.c = overrides.c.unwrap_or(s.c);
            s.lambda = overrides.lambda.unwrap_or(s.lambda);
        } else if let Some(c) = overrides.c {
            cfg.shoot = Some(crate::config::ShootSpec {
                c,
                lambda: overrides.lambda.unwrap_or(1.0),
                trajectory_points: overrides.points.unwrap_or(1000),
            });
        }
        crate::config::validate(&loaded)?;
        Ok(Self {
            loaded,
            out,
            seed,
            overrides,
            hash,
        })
    }

    fn emit<T: Serialize>(&self, command: &'static str, name: &str, body: T, done: &mut Finished) -> Result<(), CliError> {
        let path = self.out.file(name);
        let env = Envelope {
            tool: "osc",
            version: crate::output::VERSION,
            command,
            config_sha256: &self.hash,
            seed: self.seed,
            report: WithOverrides {
                overrides: &self.overrides,
                body,
            },
        };
        write_json(&path, &env)?;
        done.written.push(path);
        Ok(())
    }

    fn emit_text(&self, name: &str, text: &str, done: &mut Finished) -> Result<(), CliError> {
        let path = self.out.file(name);
        write_atomic(&path, text.as_bytes())?;
        done.written.push(path);
        Ok(())
    }

    fn analyze_options(&self) -> AnalyzeOptions {
        let cfg = &self.loaded.config;
        AnalyzeOptions {
            n_dim: cfg.geometry.n_dim,
            radius: cfg.geometry.radius,
            count: cfg.analysis.count,
            beta: cfg.analysis.beta,
            m: cfg.analysis.m,
            ..Default::default()
        }
    }

    fn threshold_report(&self, pc: &PrimitiveCalculus) -> Result<ThresholdReport, CliError> {
        analyze(pc, self.loaded.config.operator.operator(), &self.analyze_options())
            .map_err(CliError::during("threshold analysis"))
    }

    fn diagram_config(&self) -> DiagramConfig {
        let cfg = &self.loaded.config;
        let (n, r) = (cfg.geometry.n_dim, cfg.geometry.radius);
        let mut d = match cfg.operator {
            OperatorSpec::Plap { p } => DiagramConfig::plap(p, n, r),
            OperatorSpec::Pucci { lambda_ell } => DiagramConfig::pucci(lambda_ell, n, r),
        };
        d.tol_ode = cfg.tolerances.tol_ode;
        d.event_tol = cfg.tolerances.event_tol;
        d
    }
}

/// `a ≥ b` up to the configured slack, relative once `|b| > 1`.
fn at_least(a: f64, b: f64, tol: f64) -> bool {
    a >= b - tol * b.abs().max(1.0)
}

#[derive(Debug, Clone, Serialize)]
struct Check {
    name: &'static str,
    checked: usize,
    failures: usize,
    /// Most negative slack seen; negative beyond tolerance means failure.
    worst_slack: Option<f64>,
    pass: bool,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            checked: 0,
            failures: 0,
            worst_slack: None,
            pass: true,
        }
    }

    fn record(&mut self, slack: f64, ok: bool) {
        self.checked += 1;
        if slack.is_finite() {
            self.worst_slack = Some(self.worst_slack.map_or(slack, |w: f64| w.min(slack)));
        }
        if !ok {
            self.failures += 1;
            self.pass = false;
        }
    }

    fn flag(&self, violations: &mut Vec<String>) {
        if !self.pass {
            violations.push(format!(
                "{}: {} of {} checks failed (worst slack {:?})",
                self.name, self.failures, self.checked, self.worst_slack
            ));
        }
    }
}

/// The inequalities every radial solution must satisfy.
struct SolutionChecks {
    lower_bound: Check,
    energy: Check,
    pucci: Check,
    f_at_max: Check,
    area: Check,
}

impl SolutionChecks {
    fn new() -> Self {
        Self {
            lower_bound: Check::new("lambda >= per-solution lower bound"),
            energy: Check::new("energy identity residual within energy_tol"),
            pucci: Check::new("Pucci gradient inequality"),
            f_at_max: Check::new("F(c) >= F on [0, c]"),
            area: Check::new("area condition at the maximum"),
        }
    }

    fn add(&mut self, pt: &DiagramPoint, tol: f64, energy_tol: f64) {
        if !pt.is_hit() {
            return;
        }
        if let (Some(l), Some(b)) = (pt.lambda, pt.lower_bound) {
            self.lower_bound.record(l - b, at_least(l, b, tol));
        }
        if let Some(e) = pt.energy_residual {
            self.energy.record(energy_tol - e, e <= energy_tol);
        }
        if let Some(s) = pt.pucci_slack {
            self.pucci.record(s, s >= -tol);
        }
        self.f_at_max.record(f64::NAN, pt.f_at_max_ok);
        self.area.record(f64::NAN, pt.area_ok);
    }

    fn all(&self) -> [&Check; 5] {
        [&self.lower_bound, &self.energy, &self.pucci, &self.f_at_max, &self.area]
    }
}

fn check_shoot(res: &ShootResult, tol: f64, energy_tol: f64) -> Vec<String> {
    let mut out = Vec::new();
    if !matches!(res.outcome, Outcome::HitZero { .. }) {
        return out;
    }
    let d = &res.diagnostics;
    if let (Some(l), Some(b)) = (res.lambda_rescaled, d.lower_bound) {
        if !at_least(l, b, tol) {
            out.push(format!("lambda = {l} lies below the per-solution bound {b}"));
        }
    }
    if let Some(e) = d.energy_residual_max {
        if e > energy_tol {
            out.push(format!("energy identity residual {e:e} exceeds {energy_tol:e}"));
        }
    }
    if let Some(s) = d.pucci_min_slack {
        if s < -tol {
            out.push(format!("Pucci gradient inequality violated, slack {s:e}"));
        }
    }
    if !d.f_at_max_ok {
        out.push("F(c) is not the maximum of F on [0, c]".into());
    }
    if !d.area_condition_ok {
        out.push("area condition fails at the maximum".into());
    }
    out
}

#[derive(Debug, Serialize)]
struct PrimitiveSample {
    s: f64,
    f: f64,
    big_f: f64,
    fbar: f64,
    f_lambda: f64,
    fbar_lambda: f64,
}

#[derive(Debug, Serialize)]
struct SpotChecks {
    count: usize,
    failures: Vec<String>,
}

#[derive(Debug, Serialize)]
struct AnalyzeBody {
    thresholds: ThresholdReport,
    samples: Vec<PrimitiveSample>,
    spot_checks: SpotChecks,
}

fn sample(pc: &PrimitiveCalculus, s: f64) -> Result<PrimitiveSample, CliError> {
    let op = CliError::during("primitive evaluation");
    Ok(PrimitiveSample {
        s,
        f: pc.nonlinearity().eval(s),
        big_f: pc.antiderivative(s).map_err(&op)?,
        fbar: pc.running_range(s).map_err(&op)?,
        f_lambda: pc.antiderivative_lambda(s).map_err(&op)?,
        fbar_lambda: pc.running_range_lambda(s).map_err(&op)?,
    })
}

pub fn cmd_analyze(ctx: &Context) -> Result<Finished, CliError> {
    let mut done = Finished::default();
    let pc = ctx.loaded.primitive()?;
    let report = ctx.threshold_report(&pc)?;
    let a = &ctx.loaded.config.analysis;
    let largest_zero = report.zeros.as_ref().and_then(|z| z.alphas.iter().copied().reduce(f64::max));
    let s_max = a.sample_max.or(largest_zero).unwrap_or(10.0);
    let samples = (1..=a.samples)
        .map(|k| sample(&pc, s_max * k as f64 / a.samples as f64))
        .collect::<Result<Vec<_>, _>>()?;

    let tol = ctx.loaded.config.tolerances.property_tol;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut failures = Vec::new();
    for _ in 0..a.spot_checks {
        let s1: f64 = rng.gen_range(0.0..s_max);
        let s2: f64 = rng.gen_range(s1..=s_max);
        let x = sample(&pc, s2)?;
        let scale = tol * (1.0 + x.big_f.abs());
        if x.fbar < -scale || x.fbar < x.big_f - scale {
            failures.push(format!("F̄({s2}) = {} is below max(0, F) with F = {}", x.fbar, x.big_f));
        }
        // discounting f⁻ by 1/Λ² can only raise the primitive
        if x.f_lambda < x.big_f - scale {
            failures.push(format!("F_Λ({s2}) = {} is below F = {}", x.f_lambda, x.big_f));
        }
        let under = pc.two_point_min(s1, s2).map_err(CliError::during("two-point minimum"))?;
        if under > x.big_f + scale {
            failures.push(format!("two-point minimum over [{s1}, {s2}] exceeds F({s2})"));
        }
    }

    done.violations.extend(failures.iter().cloned());
    if !report.ordering_ok {
        done.violations.push(format!(
            "ordering lambda_under <= lambda_bar fails: {} > {:?}",
            report.lambda_under, report.lambda_bar
        ));
    }
    let body = AnalyzeBody {
        thresholds: report,
        samples,
        spot_checks: SpotChecks {
            count: a.spot_checks,
            failures,
        },
    };
    ctx.emit("analyze", "analyze.json", body, &mut done)?;
    Ok(done)
}

#[derive(Debug, Serialize)]
struct ShootBody {
    operator: Operator,
    #[serde(rename = "N")]
    n_dim: usize,
    #[serde(rename = "R")]
    radius: f64,
    outcome: &'static str,
    message: String,
    rho: Option<f64>,
    lambda_on_ball: Option<f64>,
    result: ShootResult,
}

fn describe(res: &ShootResult, radius: f64) -> String {
    match res.outcome {
        Outcome::HitZero { rho } => format!(
            "u reaches zero at r = {rho}; rescaled to B_R with R = {radius} this is a solution at lambda = {}",
            res.lambda_rescaled.map_or("?".into(), |l| l.to_string())
        ),
        Outcome::Bounced { r_turn, v_turn } => format!(
            "the slope returns to zero at r = {r_turn} while u = {v_turn} > 0; no solution of this height"
        ),
        Outcome::Stalled => format!(
            "f({}) = 0: c is a zero of f, so u ≡ c solves the radial equation and never reaches zero",
            res.c
        ),
        Outcome::HorizonExceeded => "u stays positive up to the integration horizon".into(),
    }
}

fn run_shoot(ctx: &Context, command: &'static str, pucci: bool) -> Result<Finished, CliError> {
    let cfg = &ctx.loaded.config;
    let spec = cfg
        .shoot
        .ok_or_else(|| CliError::config("a shoot section (or --c) with the initial height c is required"))?;
    let (n, radius) = (cfg.geometry.n_dim, cfg.geometry.radius);
    let pc = ctx.loaded.primitive()?;
    let tol = &cfg.tolerances;
    let res = match (cfg.operator, pucci) {
        (OperatorSpec::Plap { p }, false) => {
            let sc = ShootConfig {
                lambda_shoot: spec.lambda,
                tol_ode: tol.tol_ode,
                event_tol: tol.event_tol,
                ..ShootConfig::new(p, n, spec.c)
            };
            shoot_on_ball(&sc, &pc, radius).map_err(CliError::during("p-Laplacian shooting"))?
        }
        (OperatorSpec::Pucci { lambda_ell }, true) => {
            let sc = PucciShootConfig {
                lambda_shoot: spec.lambda,
                tol_ode: tol.tol_ode,
                event_tol: tol.event_tol,
                ..PucciShootConfig::new(lambda_ell, n, spec.c)
            };
            pucci_shoot_on_ball(&sc, &pc, radius).map_err(CliError::during("Pucci shooting"))?
        }
        (_, false) => return Err(CliError::config("shoot needs operator.plap; use pucci-shoot for Pucci")),
        (_, true) => return Err(CliError::config("pucci-shoot needs operator.pucci")),
    };
    let mut done = Finished {
        violations: check_shoot(&res, tol.property_tol, tol.energy_tol),
        ..Default::default()
    };
    let mut compact = res.clone();
    compact.trajectory = res.downsampled(spec.trajectory_points);
    let body = ShootBody {
        operator: cfg.operator.operator(),
        n_dim: n,
        radius,
        outcome: res.outcome.label(),
        message: describe(&res, radius),
        rho: res.outcome.rho(),
        lambda_on_ball: res.lambda_rescaled,
        result: compact,
    };
    let name = if pucci { "pucci_shoot.json" } else { "shoot.json" };
    ctx.emit(command, name, body, &mut done)?;
    Ok(done)
}

pub fn cmd_shoot(ctx: &Context) -> Result<Finished, CliError> {
    run_shoot(ctx, "shoot", false)
}

pub fn cmd_pucci_shoot(ctx: &Context) -> Result<Finished, CliError> {
    run_shoot(ctx, "pucci-shoot", true)
}

#[derive(Debug, Serialize)]
struct CrossingSummary {
    lambda_star: f64,
    count: usize,
    heights: Vec<f64>,
    zero_interval_indices: Vec<Option<usize>>,
}

#[derive(Debug, Serialize)]
struct DiagramSummary {
    csv: String,
    operator: Operator,
    grid_points: usize,
    hits: usize,
    branches: usize,
    lambda_bar: Option<f64>,
    lambda_min: Option<f64>,
    lambda_max: Option<f64>,
    crossings: Vec<CrossingSummary>,
    inequalities: Vec<Check>,
    all_pass: bool,
}

fn zeros_for_scan(pc: &PrimitiveCalculus, count: usize) -> Option<ZeroSequence> {
    pc.nonlinearity().find_zeros(count).ok()
}

fn scan(ctx: &Context, pc: &PrimitiveCalculus) -> Result<(BifurcationDiagram, Option<ZeroSequence>), CliError> {
    let cfg = &ctx.loaded.config;
    let s = cfg.scan.ok_or_else(|| CliError::config("a scan section is required"))?;
    let mut grid = scan_grid(s.c_min, s.c_max, s.points, s.log_spacing);
    if grid.is_empty() || s.c_min > s.c_max {
        return Err(CliError::config(format!(
            "empty c-grid: points = {}, c_min = {}, c_max = {}",
            s.points, s.c_min, s.c_max
        )));
    }
    let zeros = zeros_for_scan(pc, cfg.analysis.count + 1);
    if let (Some(z), true) = (&zeros, s.refine_depth > 0) {
        grid = refine_near_zeros(&grid, z, s.refine_depth);
    }
    let d = diagram(pc, &ctx.diagram_config(), &grid, zeros.as_ref()).map_err(CliError::during("diagram scan"))?;
    Ok((d, zeros))
}

pub fn cmd_diagram(ctx: &Context) -> Result<Finished, CliError> {
    let mut done = Finished::default();
    let cfg = &ctx.loaded.config;
    let pc = ctx.loaded.primitive()?;
    let (d, _) = scan(ctx, &pc)?;

    let mut targets = cfg.diagram.lambda_star.clone();
    let mut lambda_bar = None;
    if !cfg.diagram.lambda_bar_multiples.is_empty() {
        let bar = ctx.threshold_report(&pc)?.lambda_bar.ok_or_else(|| CliError::Computation {
            op: "threshold analysis",
            message: "λ̄ is unavailable, so λ̄ multiples cannot be resolved".into(),
        })?;
        lambda_bar = Some(bar);
        targets.extend(cfg.diagram.lambda_bar_multiples.iter().map(|m| m * bar));
    }

    let tol = &cfg.tolerances;
    let mut checks = SolutionChecks::new();
    for pt in &d.points {
        checks.add(pt, tol.property_tol, tol.energy_tol);
    }
    let mut crossings = Vec::new();
    for &l in &targets {
        let xs = d.crossings(&pc, l).map_err(CliError::during("crossing search"))?;
        for x in &xs {
            checks.add(&x.point, tol.property_tol, tol.energy_tol);
        }
        crossings.push(CrossingSummary {
            lambda_star: l,
            count: xs.len(),
            heights: xs.iter().map(|x| x.point.c).collect(),
            zero_interval_indices: xs.iter().map(|x| x.point.zero_interval_index).collect(),
        });
    }
    for c in checks.all() {
        c.flag(&mut done.violations);
    }
    let lambdas: Vec<f64> = d.hit_points().filter_map(|p| p.lambda).collect();
    let lambda_min = lambdas.iter().copied().reduce(f64::min);
    let lambda_max = lambdas.iter().copied().reduce(f64::max);
    ctx.emit_text("diagram.csv", &d.to_csv(), &mut done)?;
    let summary = DiagramSummary {
        csv: "diagram.csv".into(),
        operator: d.config.operator,
        grid_points: d.points.len(),
        hits: d.hit_points().count(),
        branches: d.branches.len(),
        lambda_bar,
        lambda_min,
        lambda_max,
        crossings,
        all_pass: checks.all().iter().all(|c| c.pass),
        inequalities: checks.all().into_iter().cloned().collect(),
    };
    ctx.emit("diagram", "diagram_summary.json", summary, &mut done)?;
    Ok(done)
}

#[derive(Debug, Serialize)]
struct MinimizeBody {
    lambda_bar: Option<f64>,
    cells: usize,
    grading: f64,
    sequence: SequenceReport,
}

pub fn cmd_minimize(ctx: &Context) -> Result<Finished, CliError> {
    let mut done = Finished::default();
    let cfg = &ctx.loaded.config;
    let p = match cfg.operator {
        OperatorSpec::Plap { p } => p,
        OperatorSpec::Pucci { .. } => {
            return Err(CliError::config("minimize works with the p-Laplacian energy; use operator.plap"))
        }
    };
    let m = &cfg.minimize;
    let pc = ctx.loaded.primitive()?;
    let report = ctx.threshold_report(&pc)?;
    let lambda = match (m.lambda, report.lambda_bar) {
        (Some(l), _) => l,
        (None, Some(bar)) => m.lambda_bar_multiple * bar,
        (None, None) => {
            return Err(CliError::Computation {
                op: "threshold analysis",
                message: "λ̄ is unavailable; set minimize.lambda".into(),
            })
        }
    };
    let zeros = match report.zeros.clone().filter(|z| z.len() >= m.k) {
        Some(z) => z,
        None => pc.nonlinearity().find_zeros(m.k).map_err(CliError::during("zero search"))?,
    };
    let ramps: Vec<(f64, f64)> = report.lambda_n_sequence.iter().map(|t| (t.gamma, t.delta)).collect();
    let grid = RadialGrid::graded(m.cells, cfg.geometry.radius, cfg.geometry.n_dim, m.grading)
        .map_err(|e| CliError::config(e.to_string()))?;
    let opts = MinimizeOptions {
        tol_stat: cfg.tolerances.tol_stat,
        max_iter: m.max_iter,
        ..Default::default()
    };
    let seq = run_sequence(&pc, &PLaplacePotential { p }, lambda, &zeros, &ramps, &grid, m.k, report.lambda_bar, &opts)
        .map_err(CliError::during("truncated minimization"))?;

    let tol = cfg.tolerances.property_tol;
    for it in &seq.items {
        if it.sup_norm > it.alpha_n * (1.0 + tol) {
            done.violations.push(format!("n = {}: sup norm {} exceeds α_n = {}", it.n, it.sup_norm, it.alpha_n));
        }
        // the ramp is admissible, so the minimizer cannot do worse
        if it.energy > it.ramp_energy + tol * (1.0 + it.ramp_energy.abs()) {
            done.violations.push(format!(
                "n = {}: minimizer energy {} exceeds the ramp energy {}",
                it.n, it.energy, it.ramp_energy
            ));
        }
    }
    ctx.emit_text("minimize.csv", &sequence_csv(&seq), &mut done)?;
    let body = MinimizeBody {
        lambda_bar: report.lambda_bar,
        cells: m.cells,
        grading: m.grading,
        sequence: seq,
    };
    ctx.emit("minimize", "minimize.json", body, &mut done)?;
    Ok(done)
}

#[derive(Debug, Deserialize)]
struct DiagramRow {
    c: f64,
    outcome: String,
    lambda: Option<f64>,
}

#[derive(Debug, Serialize)]
struct Empirical {
    diagram: PathBuf,
    solutions: usize,
    per_solution_bound: Check,
    min_lambda: Option<f64>,
    /// Informational: `λ̲` governs large solutions only.
    below_lambda_under: usize,
    all_at_or_above_lambda_under: bool,
}

#[derive(Debug, Serialize)]
struct Certificate {
    operator: Operator,
    #[serde(rename = "N")]
    n_dim: usize,
    #[serde(rename = "R")]
    radius: f64,
    ell: &'static str,
    #[serde(with = "osc_core::ext")]
    l_minus: f64,
    #[serde(with = "osc_core::ext")]
    l_plus: f64,
    limits_are_estimates: bool,
    limits_source: &'static str,
    #[serde(with = "osc_core::ext")]
    lambda_under: f64,
    formula: String,
    statement: String,
    caveat: &'static str,
    notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    empirical: Option<Empirical>,
}

fn read_diagram(path: &std::path::Path) -> Result<Vec<DiagramRow>, CliError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    reader
        .deserialize()
        .collect::<Result<Vec<DiagramRow>, _>>()
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

pub fn cmd_certify(ctx: &Context) -> Result<Finished, CliError> {
    let mut done = Finished::default();
    let cfg = &ctx.loaded.config;
    let radius = cfg.geometry.radius;
    let pc = ctx.loaded.primitive()?;
    let mut notes = Vec::new();
    let reduction = reduce_negative_f0(pc.nonlinearity()).map_err(CliError::during("f(0) < 0 reduction"))?;
    let reduced = if reduction.applied {
        notes.push(format!(
            "f(0) < 0: limits taken for g = f⁺ on [0, {}] and g = f beyond",
            reduction.alpha1.unwrap_or(f64::NAN)
        ));
        PrimitiveCalculus::new(reduction.nonlinearity, pc.p(), pc.lambda_ell()).map_err(CliError::during("primitive"))?
    } else {
        pc.clone()
    };
    let direction = pc.nonlinearity().direction;
    let (l_minus, l_plus, estimated) = match (cfg.certify.l_minus, cfg.certify.l_plus) {
        (Some(a), Some(b)) => (a, b, false),
        _ => {
            let target = match cfg.operator {
                OperatorSpec::Plap { .. } => LimitTarget::F,
                OperatorSpec::Pucci { .. } => LimitTarget::FLambda,
            };
            let est = reduced
                .estimate_limits(direction, target, &LimitOptions::default())
                .map_err(CliError::during("limit estimation"))?;
            notes.push(format!("limit classification {:?}", est.classification));
            (est.l_minus, est.l_plus, true)
        }
    };
    let (lambda_under, formula) = match cfg.operator {
        OperatorSpec::Plap { p } => (
            lambda_under_plap(p, radius, l_minus, l_plus),
            format!("lambda_under = (p-1) / (p R^p (L+ - min(0, L-))) with p = {p}, R = {radius}, L- = {l_minus}, L+ = {l_plus}"),
        ),
        OperatorSpec::Pucci { lambda_ell } => (
            lambda_under_pucci(lambda_ell, radius, l_minus, l_plus),
            format!(
                "lambda_under = 1 / (2 Lambda R^2 (L+ - min(0, L-))) with Lambda = {lambda_ell}, R = {radius}, L- = {l_minus}, L+ = {l_plus}"
            ),
        ),
    };
    let lambda_under = lambda_under.map_err(CliError::during("threshold formula"))?;
    if l_plus < 0.0 {
        notes.push("L+ < 0: lambda_under = inf".into());
    } else if l_minus == 0.0 && l_plus == 0.0 {
        notes.push("L- = L+ = 0: lambda_under = inf".into());
    }
    let ell = match direction {
        Direction::Zero => "0",
        Direction::Infinity => "inf",
    };
    let statement = format!(
        "no lambda in [0, {lambda_under}) is a bifurcation point from {} for radial solutions on B_R",
        if ell == "0" { "zero" } else { "infinity" }
    );

    let empirical = match &cfg.certify.diagram {
        None => None,
        Some(rel) => {
            let path = ctx.loaded.resolve(rel);
            let rows = read_diagram(&path)?;
            let tol = cfg.tolerances.property_tol;
            let mut check = Check::new("lambda >= per-solution lower bound");
            let mut min_lambda: Option<f64> = None;
            let mut below = 0;
            let mut solutions = 0;
            for row in rows.iter().filter(|r| r.outcome == "hit_zero") {
                let Some(l) = row.lambda else { continue };
                solutions += 1;
                let bound = match cfg.operator {
                    OperatorSpec::Plap { p } => per_solution_lower_bound(&pc, row.c, p, radius),
                    OperatorSpec::Pucci { .. } => per_solution_lower_bound_pucci(&pc, row.c, radius),
                }
                .map_err(CliError::during("per-solution bound"))?;
                check.record(l - bound, at_least(l, bound, tol));
                min_lambda = Some(min_lambda.map_or(l, |m| m.min(l)));
                if !at_least(l, lambda_under, tol) {
                    below += 1;
                }
            }
            check.flag(&mut done.violations);
            Some(Empirical {
                diagram: path,
                solutions,
                per_solution_bound: check,
                min_lambda,
                below_lambda_under: below,
                all_at_or_above_lambda_under: below == 0,
            })
        }
    };
    let cert = Certificate {
        operator: cfg.operator.operator(),
        n_dim: cfg.geometry.n_dim,
        radius,
        ell,
        l_minus,
        l_plus,
        limits_are_estimates: estimated,
        limits_source: if estimated { "numerical estimate" } else { "supplied in config" },
        lambda_under,
        formula,
        statement,
        caveat: "limits are numerical estimates",
        notes,
        empirical,
    };
    ctx.emit("certify", "certificate.json", cert, &mut done)?;
    Ok(done)
}
