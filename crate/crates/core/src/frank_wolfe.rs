//! Frank-Wolfe coreset construction over every vertex of a distribution hull.
//!
//! For hull vertex `p`, the feasible set of `w~` is the polytope
//! `{ w~ >= 0, sum_n w~_n ||u_n|| = sigma }` whose vertices are
//! `(sigma / ||u_n||) e_n`. Each iteration picks the data point best aligned
//! with the current residual `L - L(w~)` and moves toward it with an exact
//! line search. All iterates live in the `J`-dimensional projected space, so
//! one step costs `O(N J)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dot, ProjectionSpace};
use crate::hull::{max_over_vertices, ConvexHull, CoresetWeights, ProbabilityVector};

/// A vertex run stops once `J~` falls below this value.
pub const CONVERGED_OBJECTIVE: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct FWState {
    w_tilde: Vec<f64>,
    /// Steps taken after initialization.
    iteration: usize,
    objective_trace: Vec<f64>,
    selected_indices: Vec<usize>,
    step_sizes: Vec<f64>,
    converged: bool,
    vertex_index: usize,
    sigma: f64,
    target: Vec<f64>,
    approx: Vec<f64>,
}

impl FWState {
    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn objective_trace(&self) -> &[f64] {
        &self.objective_trace
    }

    pub fn objective(&self) -> f64 {
        *self.objective_trace.last().expect("initialized state has a trace")
    }

    pub fn selected_indices(&self) -> &[usize] {
        &self.selected_indices
    }

    pub fn step_sizes(&self) -> &[f64] {
        &self.step_sizes
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn dense_weights(&self) -> &[f64] {
        &self.w_tilde
    }

    pub fn weights(&self) -> CoresetWeights {
        CoresetWeights::from_dense(&self.w_tilde, self.vertex_index).expect("iterates stay nonnegative")
    }

    /// `||L - L(w~)||` in the projected space.
    pub fn residual_norm(&self) -> f64 {
        self.objective().max(0.0).sqrt()
    }

    fn record(&mut self) {
        let res: Vec<f64> = self.target.iter().zip(&self.approx).map(|(t, a)| t - a).collect();
        let value = dot(&res, &res);
        self.objective_trace.push(value);
        if value < CONVERGED_OBJECTIVE {
            self.converged = true;
        }
    }
}

/// Index maximizing `<direction, u_n> / ||u_n||` over non-degenerate rows; ties
/// resolve to the lowest index.
fn best_aligned(space: &ProjectionSpace, direction: &[f64]) -> Option<usize> {
    let norms = space.norms();
    let mut best: Option<(usize, f64)> = None;
    for n in space.non_degenerate() {
        let score = dot(direction, space.row(n)) / norms[n];
        if best.is_none_or(|(_, b)| score > b) {
            best = Some((n, score));
        }
    }
    best.map(|(n, _)| n)
}

pub fn fw_initialize(space: &ProjectionSpace, vertex: &ProbabilityVector) -> Result<FWState> {
    fw_initialize_at(space, vertex, 0)
}

fn fw_initialize_at(space: &ProjectionSpace, vertex: &ProbabilityVector, vertex_index: usize) -> Result<FWState> {
    let n_data = space.n_data();
    if vertex.len() != n_data {
        return Err(Error::Dimension { expected: n_data, found: vertex.len() });
    }
    let p = vertex.as_slice();
    let norms = space.norms();
    let target = space.combine(p)?.to_vec();
    let first = best_aligned(space, &target).ok_or(Error::DegenerateInstance)?;
    let sigma: f64 = space.non_degenerate().map(|n| p[n] * norms[n]).sum();

    let mut w_tilde = vec![0.0; n_data];
    let weight = sigma / norms[first];
    w_tilde[first] = weight;
    let approx = space.row(first).iter().map(|v| weight * v).collect();
    let mut state = FWState {
        w_tilde,
        iteration: 0,
        objective_trace: Vec::new(),
        selected_indices: vec![first],
        step_sizes: Vec::new(),
        converged: false,
        vertex_index,
        sigma,
        target,
        approx,
    };
    state.record();
    Ok(state)
}

/// One Frank-Wolfe iteration with closed-form line search; a no-op once converged.
pub fn fw_step(space: &ProjectionSpace, state: &mut FWState) {
    if state.converged {
        return;
    }
    let residual: Vec<f64> = state.target.iter().zip(&state.approx).map(|(t, a)| t - a).collect();
    if residual.iter().all(|&r| r == 0.0) {
        state.converged = true;
        return;
    }
    let Some(f) = best_aligned(space, &residual) else {
        state.converged = true;
        return;
    };
    let scale = state.sigma / space.norms()[f];
    let fw_vertex: Vec<f64> = space.row(f).iter().map(|v| scale * v).collect();
    let direction: Vec<f64> = fw_vertex.iter().zip(&state.approx).map(|(s, a)| s - a).collect();
    let denom = dot(&direction, &direction);
    let gamma = if denom > 0.0 { (dot(&direction, &residual) / denom).clamp(0.0, 1.0) } else { 0.0 };

    for w in state.w_tilde.iter_mut() {
        *w *= 1.0 - gamma;
    }
    state.w_tilde[f] += gamma * scale;
    for (a, s) in state.approx.iter_mut().zip(&fw_vertex) {
        *a = (1.0 - gamma) * *a + gamma * s;
    }
    state.iteration += 1;
    state.selected_indices.push(f);
    state.step_sizes.push(gamma);
    state.record();
}

/// Trace of one per-vertex run, as stored in reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexRun {
    pub vertex_index: usize,
    pub sigma: f64,
    pub objective_trace: Vec<f64>,
    pub selected_indices: Vec<usize>,
    pub step_sizes: Vec<f64>,
    pub converged: bool,
    pub weights: CoresetWeights,
}

impl VertexRun {
    fn from_state(state: &FWState) -> Self {
        Self {
            vertex_index: state.vertex_index,
            sigma: state.sigma,
            objective_trace: state.objective_trace.clone(),
            selected_indices: state.selected_indices.clone(),
            step_sizes: state.step_sizes.clone(),
            converged: state.converged,
            weights: state.weights(),
        }
    }

    pub fn final_objective(&self) -> f64 {
        *self.objective_trace.last().expect("nonempty trace")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoresetSolution {
    /// `w~^(I)` for the maximizing vertex `I`.
    pub weights: CoresetWeights,
    pub vertex_index: usize,
    pub fw_iters: usize,
    /// `J~(w~^(I), p^(I))`.
    pub objective: f64,
    pub runs: Vec<VertexRun>,
    /// Set when every loss row is zero and `w~ = p^(0)` was returned without a run.
    #[serde(default)]
    pub degenerate: bool,
}

impl CoresetSolution {
    pub fn coreset_size(&self) -> usize {
        self.weights.nnz()
    }

    pub fn selected_run(&self) -> &VertexRun {
        &self.runs[self.vertex_index]
    }

    /// Solution for an all-zero loss matrix, where every weighting is exact.
    pub fn degenerate(hull: &ConvexHull, fw_iters: usize) -> Self {
        let runs = hull
            .vertices()
            .iter()
            .enumerate()
            .map(|(i, p)| VertexRun {
                vertex_index: i,
                sigma: 0.0,
                objective_trace: vec![0.0],
                selected_indices: Vec::new(),
                step_sizes: Vec::new(),
                converged: true,
                weights: CoresetWeights::from_dense(p.as_slice(), i).expect("probabilities are nonnegative"),
            })
            .collect::<Vec<_>>();
        Self { weights: runs[0].weights.clone(), vertex_index: 0, fw_iters, objective: 0.0, runs, degenerate: true }
    }
}

/// Runs `m - 1` Frank-Wolfe steps from the greedy start for each hull vertex and
/// keeps the vertex whose final objective is largest.
pub fn run_algorithm1(space: &ProjectionSpace, hull: &ConvexHull, m: usize) -> Result<CoresetSolution> {
    if m == 0 {
        return Err(Error::Config("the number of Frank-Wolfe iterations must be at least 1".into()));
    }
    if hull.n_data() != space.n_data() {
        return Err(Error::Dimension { expected: space.n_data(), found: hull.n_data() });
    }
    let states: Vec<FWState> = hull
        .vertices()
        .par_iter()
        .enumerate()
        .map(|(i, vertex)| {
            let mut state = fw_initialize_at(space, vertex, i)?;
            for _ in 1..m {
                if state.converged {
                    break;
                }
                fw_step(space, &mut state);
            }
            Ok(state)
        })
        .collect::<Result<_>>()?;

    let pairs: Vec<(CoresetWeights, ProbabilityVector)> =
        states.iter().zip(hull.vertices()).map(|(s, v)| (s.weights(), v.clone())).collect();
    let (best, objective) = max_over_vertices(space, &pairs)?;
    Ok(CoresetSolution {
        weights: pairs[best].0.clone(),
        vertex_index: best,
        fw_iters: m,
        objective,
        runs: states.iter().map(VertexRun::from_state).collect(),
        degenerate: false,
    })
}
