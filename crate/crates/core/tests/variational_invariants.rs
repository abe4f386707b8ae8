use osc_core::shoot::plap::{shoot, ShootConfig};
use osc_core::thresholds::{analyze, AnalyzeOptions, Operator};
use osc_core::variational::{
    assemble_energy, check_hypotheses, energy_difference, gradient_check, minimize, negativity_test, run_sequence,
    sequence_csv, GridFunction, MinimizeOptions, PLaplacePotential, RadialGrid, RadialWeightPotential,
    TruncatedNonlinearity, VariationalError,
};
use osc_core::{Direction, Nonlinearity, PrimitiveCalculus};
use proptest::prelude::*;

fn power_sin() -> Nonlinearity {
    Nonlinearity::power_sin(1.0, Direction::Infinity).unwrap()
}

fn truncated(n: usize, p: f64) -> TruncatedNonlinearity {
    let nl = power_sin();
    let alpha = nl.find_zeros(n).unwrap().alpha(n);
    TruncatedNonlinearity::new(PrimitiveCalculus::new(nl, p, 1.0).unwrap(), alpha, 1e-9).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn truncation_is_continuous_at_the_zero(n in 1usize..8) {
        let tn = truncated(n, 2.0);
        let a = tn.alpha_n();
        prop_assert!(tn.jump_at_alpha() <= 1e-9);
        let below = tn.f_n(a * (1.0 - 1e-12));
        let above = tn.f_n(a * (1.0 + 1e-12));
        prop_assert!((below - above).abs() <= 1e-9, "{} vs {}", below, above);
        prop_assert_eq!(tn.f_n(-1.0), tn.f_n(0.0));
        prop_assert_eq!(tn.f_n(2.0 * a), 0.0);
        prop_assert!(tn.f_n(a).abs() <= 1e-9);
    }

    #[test]
    fn minimizer_stays_in_the_box_and_descends(n in 1usize..4, lambda in 1.0f64..200.0, n_dim in 1usize..=3) {
        let tn = truncated(n, 2.0);
        let g = RadialGrid::graded(80, 1.0, n_dim, 1.5).unwrap();
        let result = match minimize(&tn, &PLaplacePotential { p: 2.0 }, lambda, &g, &MinimizeOptions::default()) {
            Ok(r) => r,
            Err(VariationalError::NonConvergence { best, .. }) => *best,
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let a = tn.alpha_n();
        prop_assert!(result.u.values.iter().all(|&v| (0.0..=a).contains(&v)));
        prop_assert_eq!(*result.u.values.last().unwrap(), 0.0);
        for w in result.history.windows(2) {
            prop_assert!(w[1] <= w[0], "energy rises from {} to {}", w[0], w[1]);
        }
        prop_assert!(result.energy <= 1e-12, "zero is admissible, got E = {}", result.energy);
    }

    #[test]
    fn gradient_matches_central_differences(
        p in prop_oneof![Just(2.0f64), Just(3.0f64)],
        n_dim in 1usize..=3,
        grading in 1.0f64..2.5,
        lambda in 0.1f64..100.0,
        raw in proptest::collection::vec(0.05f64..1.0, 30),
    ) {
        let tn = truncated(3, p);
        let g = RadialGrid::graded(30, 1.0, n_dim, grading).unwrap();
        // decreasing profile keeps every cell slope away from zero
        let mut values = vec![0.0; 31];
        for j in (0..30).rev() {
            values[j] = values[j + 1] + raw[j];
        }
        let scale = 0.9 * tn.alpha_n() / values[0];
        values.iter_mut().for_each(|v| *v *= scale);
        let u = GridFunction::new(g, values).unwrap();
        let chk = gradient_check(&u, &tn, &PLaplacePotential { p }, lambda, 1e-6).unwrap();
        prop_assert!(chk.relative_error <= 1e-6, "{:?}", chk);
    }

    #[test]
    fn energy_difference_matches_assembly(seed in 0u64..1000, lambda in 0.5f64..50.0) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let tn = truncated(2, 2.0);
        let pot = PLaplacePotential { p: 2.0 };
        let g = RadialGrid::graded(40, 1.0, 2, 1.5).unwrap();
        let a = tn.alpha_n();
        let mut random = || {
            let mut values: Vec<f64> = (0..g.nodes.len()).map(|_| rng.gen_range(0.0..a)).collect();
            *values.last_mut().unwrap() = 0.0;
            GridFunction::new(g.clone(), values).unwrap()
        };
        let u = random();
        let v = random();
        let diff = energy_difference(&u, &v, &tn, &pot, lambda).unwrap();
        let direct = assemble_energy(&v, &tn, &pot, lambda).unwrap() - assemble_energy(&u, &tn, &pot, lambda).unwrap();
        let scale = assemble_energy(&u, &tn, &pot, lambda).unwrap().abs().max(1.0);
        prop_assert!((diff - direct).abs() <= 1e-11 * scale, "{} vs {}", diff, direct);
    }
}

#[test]
fn radial_weight_gradient_is_consistent() {
    let tn = truncated(2, 2.5);
    let pot = RadialWeightPotential {
        p: 2.5,
        a0: 1.0,
        a1: 0.7,
        radius: 1.0,
    };
    assert!(check_hypotheses(&pot, 1.0, 20.0, 25).all_ok());
    let g = RadialGrid::graded(40, 1.0, 2, 1.5).unwrap();
    let u = GridFunction::from_fn(&g, |r| 9.0 * (1.0 - r * r) + 0.5);
    let chk = gradient_check(&u, &tn, &pot, 7.0, 1e-6).unwrap();
    assert!(chk.relative_error <= 1e-6, "{chk:?}");
}

#[test]
fn nodal_values_converge_quadratically_on_the_linear_oracle() {
    // −(r^{N−1} u')' = λ r^{N−1} on (0, 1), u(1) = 0: u = λ (1 − r²)/(2N)
    let one = Nonlinearity::polynomial(&[1.0], Direction::Infinity).unwrap();
    let tn = TruncatedNonlinearity::capped(PrimitiveCalculus::new(one, 2.0, 1.0).unwrap(), 10.0).unwrap();
    let pot = PLaplacePotential { p: 2.0 };
    let lambda = 2.0;
    let opts = MinimizeOptions {
        tol_stat: 1e-12,
        ..Default::default()
    };
    for n_dim in 1..=3 {
        let mut errors = Vec::new();
        for cells in [20, 40, 80] {
            let g = RadialGrid::uniform(cells, 1.0, n_dim).unwrap();
            let r = minimize(&tn, &pot, lambda, &g, &opts).unwrap();
            let err = g
                .nodes
                .iter()
                .zip(&r.u.values)
                .map(|(x, v)| (v - lambda * (1.0 - x * x) / (2.0 * n_dim as f64)).abs())
                .fold(0.0, f64::max);
            let h = g.max_width();
            assert!(err <= 5.0 * h * h, "N = {n_dim}, J = {cells}: error {err:e}");
            errors.push(err);
        }
        if n_dim > 1 {
            let order = (errors[1] / errors[2]).log2();
            assert!(order >= 1.8, "N = {n_dim}: observed order {order}");
        }
    }
}

#[test]
fn minimizer_matches_shooting() {
    let nl = power_sin();
    let pc = PrimitiveCalculus::new(nl.clone(), 2.0, 1.0).unwrap();
    let zeros = nl.find_zeros(2).unwrap();
    let pot = PLaplacePotential { p: 2.0 };
    for (n, lambda) in [(1, 3.0), (1, 5.0), (2, 10.0)] {
        let tn = TruncatedNonlinearity::new(pc.clone(), zeros.alpha(n), 1e-9).unwrap();
        let mut last = f64::INFINITY;
        for cells in [200, 400] {
            let g = RadialGrid::graded(cells, 1.0, 1, 1.5).unwrap();
            let r = minimize(&tn, &pot, lambda, &g, &MinimizeOptions::default()).unwrap();
            let c = r.u.sup_norm();
            let rho = shoot(&ShootConfig::new(2.0, 1, c), &nl).unwrap().outcome.rho().unwrap();
            let err = (rho * rho - lambda).abs() / lambda;
            assert!(err <= 0.02, "α_{n}, λ = {lambda}, J = {cells}: {err}");
            assert!(err <= last * 1.01, "refinement should not hurt: {err} after {last}");
            last = err;
        }
    }
}

#[test]
fn comparison_ramp_certifies_nontrivial_minimizers() {
    let nl = power_sin();
    let pc = PrimitiveCalculus::new(nl.clone(), 2.0, 1.0).unwrap();
    let rep = analyze(&pc, Operator::PLaplacian { p: 2.0 }, &AnalyzeOptions::default()).unwrap();
    let pot = PLaplacePotential { p: 2.0 };
    let g = RadialGrid::graded(300, 1.0, 1, 2.0).unwrap();
    for term in rep.lambda_n_sequence.iter().take(3) {
        let alpha = nl.find_zeros(term.n).unwrap().alpha(term.n);
        let tn = TruncatedNonlinearity::new(pc.clone(), alpha, 1e-9).unwrap();
        let (neg, e) = negativity_test(&tn, &pot, 1.5 * term.lambda, term.gamma, term.delta, &g).unwrap();
        assert!(neg && e < 0.0, "n = {}: ramp energy {e}", term.n);
    }
}

#[test]
fn sequences_trend_towards_the_limit() {
    let pot = PLaplacePotential { p: 2.0 };
    let g = RadialGrid::graded(300, 1.0, 1, 2.0).unwrap();
    let cases = [
        (power_sin(), 10.0, 5),
        (Nonlinearity::reciprocal_sin(2.0).unwrap(), 10.0, 4),
    ];
    for (nl, factor, k) in cases {
        let pc = PrimitiveCalculus::new(nl.clone(), 2.0, 1.0).unwrap();
        let rep = analyze(&pc, Operator::PLaplacian { p: 2.0 }, &AnalyzeOptions::default()).unwrap();
        let bar = rep.lambda_bar.unwrap();
        let zeros = nl.find_zeros(12).unwrap();
        let ramps: Vec<(f64, f64)> = rep.lambda_n_sequence.iter().map(|t| (t.gamma, t.delta)).collect();
        let seq = run_sequence(&pc, &pot, factor * bar, &zeros, &ramps, &g, k, Some(bar), &MinimizeOptions::default())
            .unwrap();
        assert!(seq.trend_toward_ell, "{}", sequence_csv(&seq));
        assert!(!seq.all_trivial && seq.warnings.is_empty());
        for item in &seq.items {
            assert!(item.sup_norm <= item.alpha_n && item.sup_norm > 0.0);
            assert_eq!(item.interval_index, Some(item.n), "{}", sequence_csv(&seq));
        }
        assert_eq!(sequence_csv(&seq).lines().count(), k + 1);
    }
}
