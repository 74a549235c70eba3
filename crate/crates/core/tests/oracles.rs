use coreset_bounds::geometry::{read_lmat, write_lmat};
use coreset_bounds::hull::{estimate_radius, objective, ConvexHull, ProbabilityVector};
use coreset_bounds::oracle::instances::{continuous_instance, scalar_threshold_losses, threshold_losses};
use coreset_bounds::oracle::{grid_max_over_hull, logistic_hessian_closed_form, reference_fw_k1, support_radius_upper_bound};
use coreset_bounds::posterior::{build_posterior, diagonal_hessian, sample_losses, train_reference};
use coreset_bounds::{build_projection, run_algorithm1, Architecture, Dataset, LossKind, LossMatrix};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{ContinuousCDF, Normal};

#[test]
fn singleton_hull_matches_the_reference_coreset() {
    for seed in 0..200 {
        let inst = continuous_instance(seed);
        let s = build_projection(inst.losses);
        let p = inst.hull.vertex(0);
        let sol = run_algorithm1(&s, &inst.hull, inst.m).unwrap();
        let reference = reference_fw_k1(&s, p, inst.m).unwrap();
        assert_eq!(sol.selected_run().selected_indices, reference.selected_indices, "seed {seed}");
        for (a, b) in sol.weights.to_dense().iter().zip(&reference.w_tilde) {
            assert!((a - b).abs() <= 1e-10 * (1.0 + b.abs()), "seed {seed}: {a} vs {b}");
        }
    }
}

#[test]
fn vertices_attain_the_hull_maximum() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        let n = rng.random_range(2..=5);
        let j = rng.random_range(2..=20);
        let k = rng.random_range(1..=3);
        let values = threshold_losses(n, j, &mut rng);
        if values.iter().all(|&v| v == 0.0) {
            continue;
        }
        let s = build_projection(LossMatrix::new(values, LossKind::ZeroOne).unwrap());
        let hull = ConvexHull::new(
            (0..k)
                .map(|_| {
                    let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 0.01).collect();
                    let t: f64 = raw.iter().sum();
                    ProbabilityVector::new(raw.iter().map(|v| v / t).collect()).unwrap()
                })
                .collect(),
        )
        .unwrap();
        let sol = run_algorithm1(&s, &hull, n).unwrap();
        let grid = grid_max_over_hull(&s, &sol.weights, &hull, 25).unwrap();
        let best = hull.vertices().iter().map(|p| objective(&s, &sol.weights, p).unwrap()).fold(0.0, f64::max);
        assert!(grid <= best + 1e-12, "grid {grid} above vertex maximum {best}");
    }
}

#[test]
fn radius_matches_the_support_oracle_on_small_polytopes() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let n = rng.random_range(3..=4);
        let values = Array2::from_shape_fn((n, n), |_| rng.sample::<f64, _>(StandardNormal));
        let s = build_projection(LossMatrix::new(values, LossKind::Custom).unwrap());
        let p = ProbabilityVector::uniform(n).unwrap();
        let est = estimate_radius(&s, &p).unwrap();
        let ub = support_radius_upper_bound(&s, &p, 20_000, 3);
        assert!(est.radius <= ub + 1e-12);
        assert!(ub - est.radius <= 1e-3 * ub, "{est:?} vs {ub}");
    }
}

#[test]
fn projected_inner_products_converge_to_exact_values() {
    let normal = Normal::new(0.0, 1.0).unwrap();
    let thresholds = [-1.0, -0.3, 0.0, 0.4, 1.2];
    let s = build_projection(scalar_threshold_losses(&thresholds, 0.0, 1.0, 40_000, 9));
    for (n, tn) in thresholds.iter().enumerate() {
        for (m, tm) in thresholds.iter().enumerate() {
            let exact = 1.0 - normal.cdf(tn.max(*tm));
            assert!((s.inner(n, m).unwrap() - exact).abs() < 0.02);
        }
    }
}

#[test]
fn finite_difference_hessian_matches_closed_form() {
    for seed in 0..20 {
        let classes = if seed % 4 == 3 { 3 } else { 2 };
        let mut data = Dataset::blobs(60, 1 + (seed as usize) % 4, 1.0, None, seed).unwrap();
        if classes == 3 {
            let labels = (0..data.len()).map(|n| n % 3).collect();
            data = Dataset::new(data.inputs().clone(), labels, 3).unwrap();
        }
        let model = train_reference(&data, Architecture::Logistic, 30, 0.3, seed).unwrap();
        let fd = diagonal_hessian(&model, &data).unwrap();
        let exact = logistic_hessian_closed_form(&model, &data).unwrap();
        for (a, b) in fd.iter().zip(&exact) {
            assert!((a - b).abs() <= 1e-4 * b.abs().max(1e-8), "seed {seed}: {a} vs {b}");
        }
    }
}

#[test]
fn tiny_prior_reproduces_the_training_error() {
    let data = Dataset::blobs(200, 2, 1.0, None, 4).unwrap();
    let model = train_reference(&data, Architecture::Logistic, 100, 0.5, 4).unwrap();
    let h = diagonal_hessian(&model, &data).unwrap();
    let post = build_posterior(&model.theta, &h, 1e-6).unwrap();
    let losses = sample_losses(&model, &post, &data, 200, 4, LossKind::ZeroOne).unwrap();
    let n = losses.n_data() as f64;
    let col_mean = losses.values().sum() / (n * losses.n_samples() as f64);
    assert!((col_mean - model.error_rate(&data)).abs() < 0.02);
}

#[test]
fn loss_matrix_file_round_trip() {
    let inst = continuous_instance(3);
    let mut bytes = Vec::new();
    write_lmat(&mut bytes, &inst.losses).unwrap();
    assert_eq!(read_lmat(bytes.as_slice()).unwrap(), inst.losses);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hull.json");
    std::fs::write(&path, inst.hull.to_json_string().unwrap()).unwrap();
    assert_eq!(ConvexHull::load(&path).unwrap(), inst.hull);
}
