//! Brute-force counterparts of the production algorithms, used by tests and
//! the `verify` command. Each works from raw loss values with its own
//! arithmetic and shares no code with the module it checks.

pub mod instances;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{LossMatrix, ProjectionSpace};
use crate::hull::{ConvexHull, CoresetWeights, ProbabilityVector};
use crate::posterior::{Architecture, Dataset, ReferenceModel};

/// Largest barycentric grid evaluated by [`grid_max_over_hull`].
pub const MAX_GRID_POINTS: u64 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Lattice points per unit of barycentric coordinate.
    pub grid_resolution: usize,
    /// Random directions tried by the support-function radius bound.
    pub boundary_samples: usize,
    pub tolerance: f64,
    pub seeds: Vec<u64>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { grid_resolution: 25, boundary_samples: 20_000, tolerance: 1e-10, seeds: vec![0] }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_resolution < 2 {
            return Err(Error::Config(format!("grid resolution {} is below 2", self.grid_resolution)));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Config(format!("tolerance {} is not positive", self.tolerance)));
        }
        Ok(())
    }
}

fn raw(losses: &LossMatrix, n: usize) -> Vec<f64> {
    losses.values().row(n).iter().copied().collect()
}

/// `(1/J) sum_j l_n(theta_j) l_m(theta_j)`.
pub fn brute_inner(losses: &LossMatrix, n: usize, m: usize) -> Result<f64> {
    let len = losses.n_data();
    for index in [n, m] {
        if index >= len {
            return Err(Error::Index { index, len });
        }
    }
    let v = losses.values();
    let mut total = 0.0;
    for j in 0..losses.n_samples() {
        total += v[[n, j]] * v[[m, j]];
    }
    Ok(total / losses.n_samples() as f64)
}

fn brute_gram(losses: &LossMatrix) -> Vec<Vec<f64>> {
    let n = losses.n_data();
    let mut k = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in a..n {
            let v = brute_inner(losses, a, b).expect("indices in range");
            k[a][b] = v;
            k[b][a] = v;
        }
    }
    k
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Maximum of `J~(w~, p)` over the barycentric lattice with `resolution`
/// steps per coordinate, spanning the whole hull.
pub fn grid_max_over_hull(
    space: &ProjectionSpace,
    w_tilde: &CoresetWeights,
    hull: &ConvexHull,
    resolution: usize,
) -> Result<f64> {
    let losses = space.losses();
    let n = losses.n_data();
    let j = losses.n_samples();
    if w_tilde.n_data() != n || hull.n_data() != n {
        return Err(Error::Dimension { expected: n, found: hull.n_data() });
    }
    if resolution < 1 {
        return Err(Error::Config("grid resolution must be positive".into()));
    }
    let k = hull.n_vertices();
    let points = binomial((resolution + k - 1) as u64, (k - 1) as u64);
    if points > MAX_GRID_POINTS {
        return Err(Error::Resource(format!("{points} grid points exceed {MAX_GRID_POINTS}")));
    }
    let w = w_tilde.to_dense();
    let v = losses.values();
    // Residual functions at each vertex: e_k(theta_j) = sum_n (w_n - p^k_n) l_n(theta_j).
    let residuals: Vec<Vec<f64>> = hull
        .vertices()
        .iter()
        .map(|p| {
            (0..j).map(|col| (0..n).map(|row| (w[row] - p.as_slice()[row]) * v[[row, col]]).sum()).collect()
        })
        .collect();

    let mut best = f64::NEG_INFINITY;
    let mut counts = vec![0usize; k];
    counts[0] = resolution;
    loop {
        let mut total = 0.0;
        for col in 0..j {
            let e: f64 = (0..k).map(|i| counts[i] as f64 / resolution as f64 * residuals[i][col]).sum();
            total += e * e;
        }
        best = best.max(total / j as f64);
        if !next_composition(&mut counts) {
            break;
        }
    }
    Ok(best)
}

/// Advances to the next composition with the same total, starting from
/// `(r, 0, ..., 0)` and ending at `(0, ..., 0, r)`.
fn next_composition(c: &mut [usize]) -> bool {
    let k = c.len();
    let Some(i) = c.iter().position(|&v| v > 0) else {
        return false;
    };
    if i + 1 >= k {
        return false;
    }
    let v = c[i];
    c[i] = 0;
    c[0] = v - 1;
    c[i + 1] += 1;
    true
}

/// Output of [`reference_fw_k1`]: the coreset in `w~ = w p` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceCoreset {
    pub selected_indices: Vec<usize>,
    pub w_tilde: Vec<f64>,
    pub objective_trace: Vec<f64>,
}

/// Frank-Wolfe over `{w >= 0, sum_n w_n ||p_n l_n|| = sum_n ||p_n l_n||}`
/// targeting `w = 1`, written with the Gram matrix of `L_n = p_n l_n`.
pub fn reference_fw_k1(space: &ProjectionSpace, p: &ProbabilityVector, m: usize) -> Result<ReferenceCoreset> {
    let losses = space.losses();
    let n = losses.n_data();
    if p.len() != n {
        return Err(Error::Dimension { expected: n, found: p.len() });
    }
    if let Some(i) = p.as_slice().iter().position(|&v| v <= 0.0) {
        return Err(Error::Precondition(format!("p_{i} is zero")));
    }
    if m == 0 {
        return Err(Error::Config("m must be at least 1".into()));
    }
    let p = p.as_slice();
    let gram = brute_gram(losses);
    let kl: Vec<Vec<f64>> = (0..n).map(|a| (0..n).map(|b| p[a] * gram[a][b] * p[b]).collect()).collect();
    let sigma_n: Vec<f64> = (0..n).map(|a| kl[a][a].sqrt()).collect();
    let active: Vec<usize> = (0..n).filter(|&a| gram[a][a] > 0.0).collect();
    if active.is_empty() {
        return Err(Error::DegenerateInstance);
    }
    let sigma: f64 = active.iter().map(|&a| sigma_n[a]).sum();

    let quad = |x: &[f64], y: &[f64]| -> f64 {
        let mut t = 0.0;
        for a in 0..n {
            if x[a] == 0.0 {
                continue;
            }
            for b in 0..n {
                t += x[a] * kl[a][b] * y[b];
            }
        }
        t
    };
    let pick = |r: &[f64]| -> usize {
        let mut best = (active[0], f64::NEG_INFINITY);
        for &c in &active {
            let score: f64 = (0..n).map(|a| r[a] * kl[a][c]).sum::<f64>() / sigma_n[c];
            if score > best.1 {
                best = (c, score);
            }
        }
        best.0
    };

    let mut w = vec![0.0; n];
    let mut selected = Vec::new();
    let mut trace = Vec::new();
    let f0 = pick(&vec![1.0; n]);
    w[f0] = sigma / sigma_n[f0];
    selected.push(f0);
    let residual = |w: &[f64]| -> Vec<f64> { w.iter().map(|v| 1.0 - v).collect() };
    trace.push(quad(&residual(&w), &residual(&w)));
    for _ in 1..m {
        if *trace.last().expect("nonempty") < 1e-14 {
            break;
        }
        let r = residual(&w);
        let f = pick(&r);
        let mut d: Vec<f64> = w.iter().map(|v| -v).collect();
        d[f] += sigma / sigma_n[f];
        let denom = quad(&d, &d);
        let gamma = if denom > 0.0 { (quad(&d, &r) / denom).clamp(0.0, 1.0) } else { 0.0 };
        for a in 0..n {
            w[a] += gamma * d[a];
        }
        selected.push(f);
        let r = residual(&w);
        trace.push(quad(&r, &r));
    }
    let w_tilde = w.iter().zip(p).map(|(a, b)| a * b).collect();
    Ok(ReferenceCoreset { selected_indices: selected, w_tilde, objective_trace: trace })
}

/// Upper bound on the distance from `L = sum_n p_n u_n` to the relative
/// boundary of `Conv{ sigma u_n / ||u_n|| }`: the smallest support gap
/// `max_k <d, v_k> - <d, L>` over random unit directions `d` in the affine hull.
pub fn support_radius_upper_bound(space: &ProjectionSpace, p: &ProbabilityVector, samples: usize, seed: u64) -> f64 {
    let losses = space.losses();
    let n = losses.n_data();
    let j = losses.n_samples();
    let scale = 1.0 / (j as f64).sqrt();
    let rows: Vec<Vec<f64>> = (0..n).map(|a| raw(losses, a).iter().map(|v| v * scale).collect()).collect();
    let norms: Vec<f64> = rows.iter().map(|r| r.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
    let active: Vec<usize> = (0..n).filter(|&a| norms[a] > 0.0).collect();
    let sigma: f64 = active.iter().map(|&a| p.as_slice()[a] * norms[a]).sum();
    let target: Vec<f64> = (0..j).map(|c| (0..n).map(|a| p.as_slice()[a] * rows[a][c]).sum()).collect();
    let vertices: Vec<Vec<f64>> =
        active.iter().map(|&a| rows[a].iter().map(|v| sigma * v / norms[a]).collect()).collect();
    if vertices.is_empty() {
        return 0.0;
    }

    // Orthonormal basis of the direction space by modified Gram-Schmidt.
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let tol = 1e-9 * sigma.max(f64::MIN_POSITIVE);
    for v in &vertices[1..] {
        let mut e: Vec<f64> = v.iter().zip(&vertices[0]).map(|(a, b)| a - b).collect();
        for _ in 0..2 {
            for b in &basis {
                let c: f64 = e.iter().zip(b).map(|(x, y)| x * y).sum();
                e.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let len = e.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > tol {
            basis.push(e.iter().map(|x| x / len).collect());
        }
    }
    if basis.is_empty() {
        return 0.0;
    }

    let gap = |d: &[f64]| -> f64 {
        let h = vertices.iter().map(|v| v.iter().zip(d).map(|(a, b)| a * b).sum::<f64>()).fold(f64::NEG_INFINITY, f64::max);
        h - target.iter().zip(d).map(|(a, b)| a * b).sum::<f64>()
    };
    let mut best = f64::INFINITY;
    for b in &basis {
        best = best.min(gap(b));
        best = best.min(gap(&b.iter().map(|x| -x).collect::<Vec<_>>()));
    }
    let to_direction = |coef: &[f64]| -> Option<Vec<f64>> {
        let mut d = vec![0.0; j];
        for (c, b) in coef.iter().zip(&basis) {
            d.iter_mut().zip(b).for_each(|(x, y)| *x += c * y);
        }
        let len = d.iter().map(|x| x * x).sum::<f64>().sqrt();
        (len > 0.0).then(|| d.iter().map(|x| x / len).collect())
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best_coef: Option<Vec<f64>> = None;
    for _ in 0..samples {
        let coef: Vec<f64> = (0..basis.len()).map(|_| rng.sample(StandardNormal)).collect();
        if let Some(d) = to_direction(&coef) {
            let g = gap(&d);
            if g < best {
                best = g;
                best_coef = Some(coef);
            }
        }
    }
    // Random local search around the best sampled direction with a shrinking step.
    if let Some(mut coef) = best_coef {
        let norm = coef.iter().map(|x| x * x).sum::<f64>().sqrt();
        coef.iter_mut().for_each(|x| *x /= norm);
        let mut step = 0.1;
        for _ in 0..samples {
            let trial: Vec<f64> = coef.iter().map(|c| c + step * rng.sample::<f64, _>(StandardNormal)).collect();
            match to_direction(&trial) {
                Some(d) if gap(&d) < best => {
                    best = gap(&d);
                    let n = trial.iter().map(|x| x * x).sum::<f64>().sqrt();
                    coef = trial.iter().map(|x| x / n).collect();
                }
                _ => step = (step * 0.995).max(1e-9),
            }
        }
    }
    best.max(0.0)
}

/// Closed-form Hessian diagonal of mean cross-entropy for the logistic
/// architecture: `mean s(1-s) x_i^2` per weight and `mean s(1-s)` per bias
/// (softmax probabilities `p_k(1-p_k)` in the multiclass case).
pub fn logistic_hessian_closed_form(model: &ReferenceModel, data: &Dataset) -> Result<Vec<f64>> {
    if model.architecture != Architecture::Logistic {
        return Err(Error::Precondition("closed form exists for the logistic architecture only".into()));
    }
    let d = model.n_inputs;
    if data.n_features() != d {
        return Err(Error::Dimension { expected: d, found: data.n_features() });
    }
    let o = Architecture::n_outputs(model.n_classes);
    let t = &model.theta;
    let mut h = vec![0.0; t.len()];
    for row in 0..data.len() {
        let x = data.input(row);
        let z: Vec<f64> = (0..o).map(|k| (0..d).map(|i| t[k * d + i] * x[i]).sum::<f64>() + t[o * d + k]).collect();
        let curv: Vec<f64> = if o == 1 {
            let s = 1.0 / (1.0 + (-z[0]).exp());
            vec![s * (1.0 - s)]
        } else {
            let top = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let e: Vec<f64> = z.iter().map(|v| (v - top).exp()).collect();
            let total: f64 = e.iter().sum();
            e.iter().map(|v| (v / total) * (1.0 - v / total)).collect()
        };
        for k in 0..o {
            for i in 0..d {
                h[k * d + i] += curv[k] * x[i] * x[i];
            }
            h[o * d + k] += curv[k];
        }
    }
    let scale = 1.0 / data.len() as f64;
    Ok(h.iter().map(|v| v * scale).collect())
}
