//! Seeded synthetic instances shared by the property tests, the acceptance
//! suite and the benchmarks.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::geometry::{LossKind, LossMatrix};
use crate::hull::{ConvexHull, ProbabilityVector};

/// Smallest coordinate of a vertex from [`interior_hull`], before normalization.
const INTERIOR_FLOOR: f64 = 1e-3;

/// A loss matrix, a hull over its rows and an iteration budget.
#[derive(Debug, Clone)]
pub struct Instance {
    pub losses: LossMatrix,
    pub hull: ConvexHull,
    pub m: usize,
    pub seed: u64,
}

/// Zero-one losses of random half-planes under a 2-D Gaussian latent:
/// `l_n(theta_j) = 1[a_n . z_j + b_n > 0]`.
pub fn threshold_losses(n: usize, j: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
    let z: Vec<[f64; 2]> = (0..j).map(|_| [rng.sample(StandardNormal), rng.sample(StandardNormal)]).collect();
    let mut values = Array2::zeros((n, j));
    for row in 0..n {
        let a: [f64; 2] = [rng.sample(StandardNormal), rng.sample(StandardNormal)];
        let b: f64 = rng.sample(StandardNormal);
        for (col, zj) in z.iter().enumerate() {
            values[[row, col]] = f64::from(u8::from(a[0] * zj[0] + a[1] * zj[1] + b > 0.0));
        }
    }
    values
}

/// Zero-one losses in the shape produced by a tightly concentrated posterior:
/// most rows are constant (always right or always wrong) and a small
/// fraction of boundary rows flip between draws.
pub fn near_deterministic_losses(n: usize, j: usize, boundary_fraction: f64, rng: &mut ChaCha8Rng) -> Array2<f64> {
    let error_rate: f64 = rng.random_range(0.05..0.4);
    let boundary = threshold_losses(n, j, rng);
    let mut values = Array2::zeros((n, j));
    for row in 0..n {
        let u: f64 = rng.random();
        if u < boundary_fraction {
            values.row_mut(row).assign(&boundary.row(row));
        } else if u < boundary_fraction + error_rate {
            values.row_mut(row).fill(1.0);
        }
    }
    values
}

/// `K` vertices with coordinates bounded away from zero.
pub fn interior_hull(n: usize, k: usize, rng: &mut ChaCha8Rng) -> ConvexHull {
    let vertices = (0..k)
        .map(|_| {
            let raw: Vec<f64> = (0..n).map(|_| INTERIOR_FLOOR + rng.sample::<f64, _>(Exp1)).collect();
            let total: f64 = raw.iter().sum();
            ProbabilityVector::new(raw.iter().map(|v| v / total).collect()).expect("normalized")
        })
        .collect();
    ConvexHull::new(vertices).expect("equal lengths")
}

fn nonzero(values: &Array2<f64>) -> bool {
    values.iter().any(|&v| v != 0.0)
}

/// Rate-certificate family: `N` in `[5, 50]`, `J` in `[10, 100]`, `K` in
/// `[1, 3]`, strictly interior vertices, `m = N`, near-deterministic losses.
pub fn certificate_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(5..=50);
    let j = rng.random_range(10..=100);
    let k = rng.random_range(1..=3);
    let fraction = rng.random_range(0.05..0.3);
    let values = loop {
        let v = near_deterministic_losses(n, j, fraction, &mut rng);
        if nonzero(&v) {
            break v;
        }
    };
    let losses = LossMatrix::new(values, LossKind::ZeroOne).expect("binary values");
    Instance { losses, hull: interior_hull(n, k, &mut rng), m: n, seed }
}

/// Dense half-plane losses with the same size ranges as [`certificate_instance`].
pub fn dense_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(5..=50);
    let j = rng.random_range(10..=100);
    let k = rng.random_range(1..=3);
    let values = loop {
        let v = threshold_losses(n, j, &mut rng);
        if nonzero(&v) {
            break v;
        }
    };
    let losses = LossMatrix::new(values, LossKind::ZeroOne).expect("binary values");
    Instance { losses, hull: interior_hull(n, k, &mut rng), m: n, seed }
}

/// Continuous losses in `[0, 1)` on a singleton interior hull, `N <= 30`,
/// `J <= 50`, `m` in `[1, N]`.
pub fn continuous_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=30);
    let j = rng.random_range(2..=50);
    let values = Array2::from_shape_fn((n, j), |_| rng.random::<f64>());
    let losses = LossMatrix::new(values, LossKind::Custom).expect("finite values");
    let m = rng.random_range(1..=n);
    Instance { losses, hull: interior_hull(n, 1, &mut rng), m, seed }
}

/// Zero-one losses `1[theta_j > t_n]` under a scalar posterior
/// `theta ~ N(mu, s^2)`; the exact inner products are
/// `P(theta > max(t_n, t_m))`.
pub fn scalar_threshold_losses(thresholds: &[f64], mu: f64, s: f64, j: usize, seed: u64) -> LossMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let theta: Vec<f64> = (0..j).map(|_| mu + s * rng.sample::<f64, _>(StandardNormal)).collect();
    let values = Array2::from_shape_fn((thresholds.len(), j), |(n, col)| f64::from(u8::from(theta[col] > thresholds[n])));
    LossMatrix::new(values, LossKind::ZeroOne).expect("binary values")
}
