//! Data-distribution classes given as convex hulls of probability vectors.

mod radius;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dot, ProjectionSpace};

pub use radius::{estimate_radius, RadiusEstimate, RadiusMethod, EXACT_VERTEX_LIMIT};

/// Absolute tolerance on `sum p = 1`.
pub const SIMPLEX_TOL: f64 = 1e-9;
/// Vectors within this distance of the simplex are renormalized instead of rejected.
pub const RENORMALIZE_TOL: f64 = 1e-6;
pub const MAX_HULL_VERTICES: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ProbabilityVector {
    p: Vec<f64>,
    #[serde(skip)]
    strictly_positive: bool,
}

impl ProbabilityVector {
    pub fn new(mut p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::EmptyInput("probability vector"));
        }
        if let Some((n, v)) = p.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
            return Err(Error::Probability(format!("entry {n} is {v}")));
        }
        let total: f64 = p.iter().sum();
        let gap = (total - 1.0).abs();
        if gap > RENORMALIZE_TOL {
            return Err(Error::Probability(format!("entries sum to {total}")));
        }
        if gap > SIMPLEX_TOL {
            log::warn!("renormalizing probability vector (sum = {total})");
            p.iter_mut().for_each(|v| *v /= total);
        }
        let strictly_positive = p.iter().all(|&v| v > 0.0);
        Ok(Self { p, strictly_positive })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput("probability vector"));
        }
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.strictly_positive
    }
}

impl<'de> Deserialize<'de> for ProbabilityVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let p = Vec::<f64>::deserialize(d)?;
        ProbabilityVector::new(p).map_err(serde::de::Error::custom)
    }
}

/// Convex hull of `K` probability vectors over the same `N` data points.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexHull {
    vertices: Vec<ProbabilityVector>,
}

#[derive(Serialize, Deserialize)]
struct HullFile {
    n_data: usize,
    vertices: Vec<ProbabilityVector>,
}

impl ConvexHull {
    pub fn new(vertices: Vec<ProbabilityVector>) -> Result<Self> {
        let first = vertices.first().ok_or(Error::EmptyInput("hull has no vertices"))?;
        if vertices.len() > MAX_HULL_VERTICES {
            return Err(Error::Resource(format!(
                "hull has {} vertices, at most {MAX_HULL_VERTICES} are supported",
                vertices.len()
            )));
        }
        let n = first.len();
        if let Some(v) = vertices.iter().find(|v| v.len() != n) {
            return Err(Error::Dimension { expected: n, found: v.len() });
        }
        Ok(Self { vertices })
    }

    /// The singleton hull `{p_n = 1/N}`.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![ProbabilityVector::uniform(n)?])
    }

    pub fn vertices(&self) -> &[ProbabilityVector] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &ProbabilityVector {
        &self.vertices[i]
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_data(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: HullFile = serde_json::from_str(s)?;
        let hull = Self::new(file.vertices)?;
        if hull.n_data() != file.n_data {
            return Err(Error::Dimension { expected: file.n_data, found: hull.n_data() });
        }
        Ok(hull)
    }

    pub fn to_json_string(&self) -> Result<String> {
        let file = HullFile { n_data: self.n_data(), vertices: self.vertices.clone() };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}

/// Sparse nonnegative coreset weights `w~` paired with the hull vertex they target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoresetWeights {
    n_data: usize,
    /// `(index, weight)` sorted by index, zero weights dropped.
    entries: Vec<(usize, f64)>,
    vertex_index: usize,
}

impl CoresetWeights {
    pub fn from_dense(dense: &[f64], vertex_index: usize) -> Result<Self> {
        if let Some((n, w)) = dense.iter().enumerate().find(|(_, w)| !w.is_finite() || **w < 0.0) {
            return Err(Error::Precondition(format!("coreset weight {n} is {w}")));
        }
        let entries = dense.iter().copied().enumerate().filter(|&(_, w)| w > 0.0).collect();
        Ok(Self { n_data: dense.len(), entries, vertex_index })
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn n_data(&self) -> usize {
        self.n_data
    }

    pub fn vertex_index(&self) -> usize {
        self.vertex_index
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn l1(&self) -> f64 {
        self.entries.iter().map(|&(_, w)| w).sum()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut dense = vec![0.0; self.n_data];
        for &(n, w) in &self.entries {
            dense[n] = w;
        }
        dense
    }

    /// `sum_n w_n ||u_n||`, which must equal `sigma^(i)` on the polytope.
    pub fn polytope_mass(&self, norms: &[f64]) -> f64 {
        self.entries.iter().map(|&(n, w)| w * norms[n]).sum()
    }

    /// Difference `w~ - p` as a dense vector.
    pub fn minus(&self, p: &ProbabilityVector) -> Result<Vec<f64>> {
        if p.len() != self.n_data {
            return Err(Error::Dimension { expected: self.n_data, found: p.len() });
        }
        let mut diff: Vec<f64> = p.as_slice().iter().map(|v| -v).collect();
        for &(n, w) in &self.entries {
            diff[n] += w;
        }
        Ok(diff)
    }
}

/// `J~(w~, p) = (w~ - p)^T K~ (w~ - p)`.
pub fn objective(space: &ProjectionSpace, w_tilde: &CoresetWeights, p: &ProbabilityVector) -> Result<f64> {
    if w_tilde.n_data() != space.n_data() {
        return Err(Error::Dimension { expected: space.n_data(), found: w_tilde.n_data() });
    }
    let diff = w_tilde.minus(p)?;
    let v = space.combine(&diff)?;
    let v = v.as_slice().expect("contiguous");
    Ok(dot(v, v))
}

/// Index and objective of the maximizing `(w~, p)` pair; ties go to the lowest index.
pub fn max_over_vertices(
    space: &ProjectionSpace,
    solutions: &[(CoresetWeights, ProbabilityVector)],
) -> Result<(usize, f64)> {
    if solutions.is_empty() {
        return Err(Error::EmptyInput("no per-vertex solutions"));
    }
    let mut best = (0, f64::NEG_INFINITY);
    for (i, (w, p)) in solutions.iter().enumerate() {
        let value = objective(space, w, p)?;
        if value > best.1 {
            best = (i, value);
        }
    }
    Ok(best)
}
