//! Seeded fixtures shared by the benchmarks.

use coreset_bounds::oracle::instances::{interior_hull, near_deterministic_losses, threshold_losses};
use coreset_bounds::{build_projection, ConvexHull, LossKind, LossMatrix, ProjectionSpace};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Zero-one losses for `n` points and `j` draws with a `k`-vertex interior hull.
/// `boundary_fraction = None` gives dense half-plane losses.
pub fn fixture(n: usize, j: usize, k: usize, boundary_fraction: Option<f64>, seed: u64) -> (LossMatrix, ConvexHull) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = match boundary_fraction {
        Some(f) => near_deterministic_losses(n, j, f, &mut rng),
        None => threshold_losses(n, j, &mut rng),
    };
    let losses = LossMatrix::new(values, LossKind::ZeroOne).expect("binary values");
    (losses, interior_hull(n, k, &mut rng))
}

pub fn projected(n: usize, j: usize, k: usize, boundary_fraction: Option<f64>, seed: u64) -> (ProjectionSpace, ConvexHull) {
    let (losses, hull) = fixture(n, j, k, boundary_fraction, seed);
    (build_projection(losses), hull)
}
