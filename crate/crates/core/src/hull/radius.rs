//! Distance from `L^(i) = sum_n p_n u_n` to the relative boundary of the
//! polytope `Conv{ sigma^(i) u_n / ||u_n|| }`.
//!
//! Every scaled vertex lies on the sphere of radius `sigma^(i)`, so all
//! distinct scaled vertices are extreme points. The computation works in an
//! orthonormal frame of their affine hull:
//!
//! * affinely independent vertices (a simplex, any size): exact, from the
//!   barycentric weights of `L^(i)` and the facet heights;
//! * at most [`EXACT_VERTEX_LIMIT`] distinct vertices: exact, by enumerating
//!   supporting hyperplanes through every `d`-subset of vertices;
//! * otherwise: the minimum over vertices `k` of a certified lower bound on
//!   the distance from `L^(i)` to `Conv(V \ {v_k})`. The nearest facet omits
//!   some vertex, so this never exceeds the true radius.
//!
//! Underestimates only push `beta` toward 1 and keep the rate bound valid.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::ProbabilityVector;
use crate::error::{Error, Result};
use crate::geometry::{dot, norm, ProjectionSpace};

/// Largest number of distinct non-simplex vertices handled by facet enumeration.
pub const EXACT_VERTEX_LIMIT: usize = 12;

/// Unit directions closer than this are merged into one scaled vertex.
const DIRECTION_TOL: f64 = 1e-10;
/// Relative singular-value cutoff for affine rank.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusMethod {
    /// All scaled vertices coincide; the relative boundary is empty.
    SinglePoint,
    Simplex,
    FacetEnumeration,
    LeaveOneOut,
    /// Some scaled vertex carries zero mass, so `L^(i)` may sit on the boundary.
    BoundaryVertex,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusEstimate {
    pub radius: f64,
    pub method: RadiusMethod,
    pub distinct_vertices: usize,
    pub affine_dim: usize,
}

struct ScaledVertices {
    /// Distinct scaled vertices, each of norm `sigma`.
    points: Vec<Vec<f64>>,
    /// Barycentric weight of each distinct vertex in `L`.
    weights: Vec<f64>,
    target: Vec<f64>,
    sigma: f64,
}

fn scaled_vertices(space: &ProjectionSpace, vertex: &ProbabilityVector) -> Result<ScaledVertices> {
    if vertex.len() != space.n_data() {
        return Err(Error::Dimension { expected: space.n_data(), found: vertex.len() });
    }
    let p = vertex.as_slice();
    let norms = space.norms();
    if space.non_degenerate().next().is_none() {
        return Err(Error::DegenerateInstance);
    }
    let sigma: f64 = space.non_degenerate().map(|n| p[n] * norms[n]).sum();
    let target = space.combine(p)?.to_vec();

    let mut directions: Vec<Vec<f64>> = Vec::new();
    let mut mass: Vec<f64> = Vec::new();
    for n in space.non_degenerate() {
        let a: Vec<f64> = space.row(n).iter().map(|v| v / norms[n]).collect();
        let share = p[n] * norms[n];
        match directions.iter().position(|d| distance(d, &a) <= DIRECTION_TOL) {
            Some(g) => mass[g] += share,
            None => {
                directions.push(a);
                mass.push(share);
            }
        }
    }
    let points = directions.into_iter().map(|a| a.into_iter().map(|v| v * sigma).collect()).collect();
    let weights = mass.into_iter().map(|m| if sigma > 0.0 { m / sigma } else { 0.0 }).collect();
    Ok(ScaledVertices { points, weights, target, sigma })
}

/// Distance `r^(i)` from `L^(i)` to the relative boundary of the scaled-vertex hull.
pub fn estimate_radius(space: &ProjectionSpace, vertex: &ProbabilityVector) -> Result<RadiusEstimate> {
    let sv = scaled_vertices(space, vertex)?;
    let count = sv.points.len();
    let mut estimate = RadiusEstimate {
        radius: 0.0,
        method: RadiusMethod::SinglePoint,
        distinct_vertices: count,
        affine_dim: 0,
    };
    if sv.sigma == 0.0 || sv.weights.contains(&0.0) {
        log::warn!("hull vertex puts zero mass on a scaled vertex; using r = 0");
        estimate.method = RadiusMethod::BoundaryVertex;
        return Ok(estimate);
    }
    if count == 1 {
        return Ok(estimate);
    }

    let frame = AffineFrame::new(&sv.points, &sv.target);
    let d = frame.dim();
    estimate.affine_dim = d;
    if d == 0 {
        return Ok(estimate);
    }
    let (radius, method) = if d == count - 1 {
        (simplex_radius(&frame, &sv.weights), RadiusMethod::Simplex)
    } else if count <= EXACT_VERTEX_LIMIT {
        (facet_radius(&frame, sv.sigma), RadiusMethod::FacetEnumeration)
    } else {
        (leave_one_out_radius(&frame, &sv.weights), RadiusMethod::LeaveOneOut)
    };
    estimate.radius = radius.max(0.0);
    estimate.method = method;
    Ok(estimate)
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Coordinates of the vertices and the target in an orthonormal basis of the
/// affine hull, with vertex 0 at the origin.
struct AffineFrame {
    coords: Vec<DVector<f64>>,
    target: DVector<f64>,
}

impl AffineFrame {
    fn new(points: &[Vec<f64>], target: &[f64]) -> Self {
        let j = points[0].len();
        let cols = points.len() - 1;
        let origin = &points[0];
        let diffs = DMatrix::from_fn(j, cols, |r, c| points[c + 1][r] - origin[r]);
        let svd = diffs.svd(true, false);
        let u = svd.u.expect("left singular vectors requested");
        let s_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let keep: Vec<usize> = (0..svd.singular_values.len())
            .filter(|&k| svd.singular_values[k] > RANK_TOL * s_max)
            .collect();
        let basis = DMatrix::from_fn(j, keep.len(), |r, c| u[(r, keep[c])]);
        let project = |v: &[f64]| {
            let shifted = DVector::from_iterator(j, v.iter().zip(origin).map(|(a, b)| a - b));
            basis.tr_mul(&shifted)
        };
        let coords = points.iter().map(|p| project(p)).collect();
        Self { coords, target: project(target) }
    }

    fn dim(&self) -> usize {
        self.target.len()
    }
}

/// Exact inradius-at-target of a simplex: `min_k lambda_k / ||grad lambda_k||`.
fn simplex_radius(frame: &AffineFrame, weights: &[f64]) -> f64 {
    let d = frame.dim();
    let m = DMatrix::from_fn(d, d, |r, c| frame.coords[c + 1][r]);
    let Some(inv) = m.try_inverse() else {
        return 0.0;
    };
    // Barycentric coordinate k >= 1 is row k-1 of inv applied to (x - v0).
    let mut grad0 = DVector::zeros(d);
    let mut best = f64::INFINITY;
    for k in 0..d {
        let row = inv.row(k).transpose();
        grad0 -= &row;
        best = best.min(weights[k + 1] / row.norm());
    }
    best.min(weights[0] / grad0.norm())
}

fn facet_radius(frame: &AffineFrame, sigma: f64) -> f64 {
    let d = frame.dim();
    let pts = &frame.coords;
    let tol = 1e-9 * sigma.max(f64::MIN_POSITIVE);
    let mut best = f64::INFINITY;
    for subset in Combinations::new(pts.len(), d) {
        let Some(normal) = hyperplane_normal(pts, &subset) else {
            continue;
        };
        let offset = normal.dot(&pts[subset[0]]);
        let side: Vec<f64> = pts.iter().map(|p| normal.dot(p) - offset).collect();
        let outward = if side.iter().all(|&s| s <= tol) {
            1.0
        } else if side.iter().all(|&s| s >= -tol) {
            -1.0
        } else {
            continue;
        };
        let dist = outward * (offset - normal.dot(&frame.target));
        best = best.min(dist);
    }
    if best.is_finite() {
        best
    } else {
        0.0
    }
}

/// Unit normal of the hyperplane through `d` affinely independent points in R^d.
fn hyperplane_normal(pts: &[DVector<f64>], subset: &[usize]) -> Option<DVector<f64>> {
    let d = pts[0].len();
    if d == 1 {
        return Some(DVector::from_element(1, 1.0));
    }
    let base = &pts[subset[0]];
    let mut a = DMatrix::zeros(d, d);
    for (r, &idx) in subset.iter().enumerate().skip(1) {
        let diff = &pts[idx] - base;
        a.set_row(r - 1, &diff.transpose());
    }
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("right singular vectors requested");
    let s = &svd.singular_values;
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&x, &y| s[x].total_cmp(&s[y]));
    let s_max = s[order[d - 1]];
    // Rank d-1: only the padding row may be null.
    if s[order[1]] <= RANK_TOL * s_max.max(f64::MIN_POSITIVE) {
        return None;
    }
    Some(vt.row(order[0]).transpose())
}

fn leave_one_out_radius(frame: &AffineFrame, weights: &[f64]) -> f64 {
    let shifted: Vec<Vec<f64>> = frame.coords.iter().map(|p| (p - &frame.target).iter().copied().collect()).collect();
    let mut order: Vec<usize> = (0..shifted.len()).collect();
    order.sort_by(|&a, &b| weights[a].total_cmp(&weights[b]));
    let max_iter = 100 + 20 * shifted.len();
    let mut best = f64::INFINITY;
    for k in order {
        let rest: Vec<&[f64]> = shifted.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, p)| p.as_slice()).collect();
        let x = min_norm_point(&rest, max_iter);
        best = best.min(separation_certificate(&rest, &x));
        if best <= 0.0 {
            return 0.0;
        }
    }
    best
}

/// Lower bound on the distance from the origin to `Conv(points)` from the
/// supporting half-space with normal `x`: `min_p <p, x/||x||>`, clamped at 0.
fn separation_certificate(points: &[&[f64]], x: &[f64]) -> f64 {
    let nx = norm(x);
    if nx == 0.0 {
        return 0.0;
    }
    let lower = points.iter().map(|p| dot(p, x) / nx).fold(f64::INFINITY, f64::min);
    lower.max(0.0)
}

/// Wolfe's minimum-norm-point algorithm over `Conv(points)`; returns a point
/// of the hull (the minimizer up to round-off, or the last iterate when the
/// iteration budget runs out).
pub(crate) fn min_norm_point(points: &[&[f64]], max_iter: usize) -> Vec<f64> {
    let sq: Vec<f64> = points.iter().map(|p| dot(p, p)).collect();
    let scale = sq.iter().cloned().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let start = (0..points.len()).min_by(|&a, &b| sq[a].total_cmp(&sq[b])).expect("nonempty");
    let mut corral = vec![start];
    let mut lambda = vec![1.0];
    let mut x = points[start].to_vec();

    'major: for _ in 0..max_iter {
        let xx = dot(&x, &x);
        if xx <= 1e-28 * scale {
            break;
        }
        let (j, xj) = (0..points.len())
            .map(|i| (i, dot(&x, points[i])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        if xx - xj <= 1e-12 * scale || corral.contains(&j) {
            break;
        }
        corral.push(j);
        lambda.push(0.0);
        loop {
            let Some(alpha) = affine_minimizer(points, &corral) else {
                break 'major;
            };
            if alpha.iter().all(|&a| a > 1e-14) {
                lambda = alpha;
                break;
            }
            let mut theta = 1.0;
            let mut drop = 0;
            for (i, (&l, &a)) in lambda.iter().zip(&alpha).enumerate() {
                if a <= 1e-14 && l > a {
                    let t = l / (l - a);
                    if t < theta {
                        theta = t;
                        drop = i;
                    }
                }
            }
            for (l, a) in lambda.iter_mut().zip(&alpha) {
                *l = (1.0 - theta) * *l + theta * a;
            }
            lambda[drop] = 0.0;
            let keep: Vec<usize> = (0..corral.len()).filter(|&i| lambda[i] > 1e-14).collect();
            corral = keep.iter().map(|&i| corral[i]).collect();
            lambda = keep.iter().map(|&i| lambda[i]).collect();
            let total: f64 = lambda.iter().sum();
            lambda.iter_mut().for_each(|l| *l /= total);
            if corral.len() == 1 {
                lambda = vec![1.0];
                break;
            }
        }
        x = vec![0.0; x.len()];
        for (&i, &l) in corral.iter().zip(&lambda) {
            for (xv, pv) in x.iter_mut().zip(points[i]) {
                *xv += l * pv;
            }
        }
    }
    x
}

/// Minimizer of `||sum a_i p_i||` subject to `sum a_i = 1` over the corral.
fn affine_minimizer(points: &[&[f64]], corral: &[usize]) -> Option<Vec<f64>> {
    let k = corral.len();
    let mut sys = DMatrix::zeros(k + 1, k + 1);
    for a in 0..k {
        for b in 0..k {
            sys[(a, b)] = dot(points[corral[a]], points[corral[b]]);
        }
        sys[(a, k)] = 1.0;
        sys[(k, a)] = 1.0;
    }
    let mut rhs = DVector::zeros(k + 1);
    rhs[k] = 1.0;
    let sol = sys.lu().solve(&rhs)?;
    let alpha: Vec<f64> = sol.iter().take(k).copied().collect();
    alpha.iter().all(|a| a.is_finite()).then_some(alpha)
}

/// Lexicographic `k`-subsets of `0..n`.
struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        let current = (k <= n && k > 0).then(|| (0..k).collect());
        Self { n, current }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for t in i + 1..k {
                    next[t] = next[t - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}
