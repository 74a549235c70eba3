use coreset_bounds::bounds::{compute_constants, epsilon_proj, rate, worst_rate_violation, ExponentVariant};
use coreset_bounds::frank_wolfe::{fw_initialize, fw_step};
use coreset_bounds::hull::{estimate_radius, max_over_vertices, objective, ConvexHull, ProbabilityVector};
use coreset_bounds::oracle::instances::{certificate_instance, dense_instance};
use coreset_bounds::oracle::{brute_inner, support_radius_upper_bound};
use coreset_bounds::posterior::{build_posterior, sample_losses, train_reference, Architecture, Dataset};
use coreset_bounds::{build_projection, run_algorithm1, LossKind, LossMatrix};
use proptest::prelude::*;

fn matrix(max_n: usize, max_j: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1..=max_n, 1..=max_j).prop_flat_map(|(n, j)| prop::collection::vec(prop::collection::vec(-2.0..2.0f64, j), n))
}

fn simplex(n: usize) -> impl Strategy<Value = ProbabilityVector> {
    prop::collection::vec(0.01..1.0f64, n).prop_map(|raw| {
        let total: f64 = raw.iter().sum();
        ProbabilityVector::new(raw.iter().map(|v| v / total).collect()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn inner_products_obey_cauchy_schwarz(rows in matrix(8, 12)) {
        let s = build_projection(LossMatrix::from_rows(&rows, LossKind::Custom).unwrap());
        for n in 0..s.n_data() {
            for m in 0..s.n_data() {
                let ip = s.inner(n, m).unwrap();
                prop_assert!(ip.abs() <= s.norms()[n] * s.norms()[m] * (1.0 + 1e-12) + 1e-15);
                prop_assert!((ip - s.inner(m, n).unwrap()).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn brute_inner_agrees_with_projection(rows in matrix(6, 10)) {
        let s = build_projection(LossMatrix::from_rows(&rows, LossKind::Custom).unwrap());
        for n in 0..s.n_data() {
            for m in 0..s.n_data() {
                prop_assert!((brute_inner(s.losses(), n, m).unwrap() - s.inner(n, m).unwrap()).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn gram_and_direct_norms_agree((rows, coeffs) in matrix(10, 10).prop_flat_map(|rows| {
        let n = rows.len();
        (Just(rows), prop::collection::vec(-1.0..1.0f64, n))
    })) {
        let s = build_projection(LossMatrix::from_rows(&rows, LossKind::Custom).unwrap());
        let direct = s.weighted_norm(&coeffs).unwrap();
        let gram = s.weighted_norm_gram(&coeffs).unwrap();
        prop_assert!((direct - gram).abs() <= 1e-9 * (1.0 + direct));
    }

    #[test]
    fn frank_wolfe_steps_are_monotone_and_feasible((rows, p) in matrix(12, 15).prop_flat_map(|rows| {
        let n = rows.len();
        (Just(rows), simplex(n))
    })) {
        let s = build_projection(LossMatrix::from_rows(&rows, LossKind::Custom).unwrap());
        let Ok(mut state) = fw_initialize(&s, &p) else { return Ok(()) };
        let sigma = state.sigma();
        for t in 1..=2 * s.n_data() {
            let before = state.objective();
            fw_step(&s, &mut state);
            prop_assert!(state.objective() <= before + 1e-12);
            let mass: f64 = state.dense_weights().iter().zip(s.norms()).map(|(w, u)| w * u).sum();
            prop_assert!((mass - sigma).abs() <= 1e-8 * sigma.max(1e-300));
            prop_assert!(state.dense_weights().iter().all(|&w| w >= 0.0));
            prop_assert!(state.step_sizes().iter().all(|&g| (0.0..=1.0).contains(&g)));
            prop_assert!(state.weights().nnz() <= t + 1);
        }
        // The initialization bound (sigma eta)^2.
        let l = s.combine(p.as_slice()).unwrap();
        let ll: f64 = l.iter().map(|v| v * v).sum();
        let init = fw_initialize(&s, &p).unwrap();
        prop_assert!(init.objective() <= (sigma * sigma - ll).max(0.0) + 1e-12);
    }

    #[test]
    fn selected_vertex_has_the_largest_objective(seed in 0u64..10_000) {
        let inst = dense_instance(seed);
        let s = build_projection(inst.losses);
        let sol = run_algorithm1(&s, &inst.hull, 5).unwrap();
        let pairs: Vec<_> = sol.runs.iter().zip(inst.hull.vertices()).map(|(r, p)| (r.weights.clone(), p.clone())).collect();
        prop_assert_eq!(max_over_vertices(&s, &pairs).unwrap().0, sol.vertex_index);
        for (w, p) in &pairs {
            prop_assert!(objective(&s, w, p).unwrap() <= sol.objective);
        }
    }

    #[test]
    fn rate_certificate_holds_on_dense_instances(seed in 0u64..10_000) {
        let inst = dense_instance(seed);
        let s = build_projection(inst.losses);
        let sol = run_algorithm1(&s, &inst.hull, inst.m).unwrap();
        let c = compute_constants(&s, &inst.hull).unwrap();
        for variant in [ExponentVariant::Appendix, ExponentVariant::TheoremText] {
            prop_assert_eq!(worst_rate_violation(&sol, &c, variant), None);
        }
    }

    #[test]
    fn constants_stay_in_range(seed in 0u64..10_000) {
        let inst = if seed % 2 == 0 { certificate_instance(seed) } else { dense_instance(seed) };
        let s = build_projection(inst.losses);
        let c = compute_constants(&s, &inst.hull).unwrap();
        prop_assert!(c.eta_bar <= 2.0);
        for i in 0..inst.hull.n_vertices() {
            prop_assert!(c.sigma_i[i] >= 0.0);
            prop_assert!((0.0..=1.0).contains(&c.eta_i[i]));
            prop_assert!((0.0..=1.0).contains(&c.beta_i[i]));
        }
    }

    #[test]
    fn radius_never_exceeds_the_support_bound(seed in 0u64..10_000) {
        let inst = if seed % 2 == 0 { certificate_instance(seed) } else { dense_instance(seed) };
        let s = build_projection(inst.losses);
        for p in inst.hull.vertices() {
            let est = estimate_radius(&s, p).unwrap();
            let ub = support_radius_upper_bound(&s, p, 200, seed);
            prop_assert!(est.radius <= ub + 1e-12, "{est:?} vs {ub}");
        }
    }

    #[test]
    fn rate_is_nonincreasing_in_m(
        sigma in 0.01..3.0f64, eta in 0.0..1.0f64, eta_bar in 0.01..2.0f64, beta in 0.0..1.0f64
    ) {
        for variant in [ExponentVariant::Appendix, ExponentVariant::TheoremText] {
            let mut prev = rate(sigma, eta, eta_bar, beta, 2, variant);
            prop_assert!(prev <= sigma * eta + 1e-15);
            for m in 3..60 {
                let r = rate(sigma, eta, eta_bar, beta, m, variant);
                prop_assert!(r <= prev * (1.0 + 1e-12));
                prev = r;
            }
        }
    }

    #[test]
    fn projection_error_halves_with_four_times_the_samples(n in 1usize..500, j in 1usize..5000, xi in 0.01..2.0f64) {
        let ratio = epsilon_proj(n, j, xi, 0.05) / epsilon_proj(n, 4 * j, xi, 0.05);
        prop_assert!((ratio - 2.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn posterior_scales_never_exceed_the_prior(seed in 0u64..1000, prior in 1e-6..1.0f64, hidden in 1usize..5) {
        let data = Dataset::blobs(40, 3, 1.0, None, seed).unwrap();
        let model = train_reference(&data, Architecture::Mlp { hidden }, 20, 0.2, seed).unwrap();
        let h = coreset_bounds::posterior::diagonal_hessian(&model, &data).unwrap();
        let post = build_posterior(&model.theta, &h, prior).unwrap();
        prop_assert!(post.std.iter().all(|&s| s > 0.0 && s <= prior));
    }

    #[test]
    fn loss_sampling_is_deterministic(seed in 0u64..1000) {
        let data = Dataset::blobs(30, 2, 1.0, None, seed).unwrap();
        let model = train_reference(&data, Architecture::Logistic, 10, 0.5, seed).unwrap();
        let post = build_posterior(&model.theta, &vec![0.0; model.n_params()], 0.5).unwrap();
        let a = sample_losses(&model, &post, &data, 40, seed, LossKind::ZeroOne).unwrap();
        let b = sample_losses(&model, &post, &data, 40, seed, LossKind::ZeroOne).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn uniform_hull_on_identical_rows_is_exact_after_one_step() {
    let rows = vec![vec![1.0, 0.0, 1.0]; 6];
    let s = build_projection(LossMatrix::from_rows(&rows, LossKind::ZeroOne).unwrap());
    let sol = run_algorithm1(&s, &ConvexHull::uniform(6).unwrap(), 6).unwrap();
    assert_eq!(sol.coreset_size(), 1);
    assert!(sol.objective < 1e-28);
}
