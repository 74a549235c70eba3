//! Loss matrices and their random projections.
//!
//! Row `n` of a [`LossMatrix`] holds the losses of datum `n` at `J` shared
//! posterior draws. [`build_projection`] scales each row by `sqrt(1/J)` so
//! that plain dot products of the projected rows are Monte-Carlo estimates of
//! the posterior-weighted inner products between loss functions.

mod lmat;

use std::sync::OnceLock;

use ndarray::{Array1, Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use lmat::{read_csv, read_lmat, write_lmat, LMAT_MAGIC, LMAT_VERSION};

/// Above this many data points the Gram matrix is never materialized.
pub const DENSE_GRAM_LIMIT: usize = 4096;

/// Vectors longer than this are reduced with pairwise summation.
const PAIRWISE_THRESHOLD: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    ZeroOne,
    CrossEntropy,
    Custom,
}

impl LossKind {
    pub fn code(self) -> u8 {
        match self {
            LossKind::ZeroOne => 0,
            LossKind::CrossEntropy => 1,
            LossKind::Custom => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(LossKind::ZeroOne),
            1 => Some(LossKind::CrossEntropy),
            2 => Some(LossKind::Custom),
            _ => None,
        }
    }
}

/// Per-datum losses at `J` posterior samples, stored `N x J` row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LossMatrix {
    values: Array2<f64>,
    kind: LossKind,
}

impl LossMatrix {
    /// Validates shape, finiteness and (for 0-1 loss) binary entries.
    pub fn new(values: Array2<f64>, kind: LossKind) -> Result<Self> {
        let (n, j) = values.dim();
        if n == 0 {
            return Err(Error::EmptyInput("loss matrix has no rows"));
        }
        if j == 0 {
            return Err(Error::EmptyInput("loss matrix has no columns"));
        }
        for ((row, col), &value) in values.indexed_iter() {
            let bad = !value.is_finite() || (kind == LossKind::ZeroOne && value != 0.0 && value != 1.0);
            if bad {
                return Err(Error::InvalidLoss { row, col, value });
            }
        }
        let values = if values.is_standard_layout() {
            values
        } else {
            values.as_standard_layout().into_owned()
        };
        Ok(Self { values, kind })
    }

    pub fn from_rows(rows: &[Vec<f64>], kind: LossKind) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyInput("loss matrix has no rows"));
        }
        let j = rows[0].len();
        let mut flat = Vec::with_capacity(n * j);
        for row in rows {
            if row.len() != j {
                return Err(Error::Dimension { expected: j, found: row.len() });
            }
            flat.extend_from_slice(row);
        }
        let values = Array2::from_shape_vec((n, j), flat).expect("shape checked above");
        Self::new(values, kind)
    }

    pub fn n_data(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_samples(&self) -> usize {
        self.values.ncols()
    }

    pub fn kind(&self) -> LossKind {
        self.kind
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn row(&self, n: usize) -> &[f64] {
        row_slice(self.values.row(n))
    }

    /// Monte-Carlo estimate of the expected risk `mean_j sum_n p_n l_n(theta_j)`.
    pub fn expected_risk(&self, p: &[f64]) -> Result<f64> {
        check_len(self.n_data(), p.len())?;
        let j = self.n_samples() as f64;
        let mut total = 0.0;
        for (n, &pn) in p.iter().enumerate() {
            if pn != 0.0 {
                total += pn * sum(self.row(n)) / j;
            }
        }
        Ok(total)
    }
}

/// Scaled projection vectors `u_n = sqrt(1/J) l_n` with cached norms.
///
/// The Gram matrix is materialized on first use when `N` does not exceed
/// [`DENSE_GRAM_LIMIT`]; otherwise Gram entries are computed on the fly.
#[derive(Debug)]
pub struct ProjectionSpace {
    losses: LossMatrix,
    u: Array2<f64>,
    norms: Vec<f64>,
    gram: OnceLock<Option<Array2<f64>>>,
    gram_limit: usize,
}

pub fn build_projection(losses: LossMatrix) -> ProjectionSpace {
    build_projection_with_limit(losses, DENSE_GRAM_LIMIT)
}

/// As [`build_projection`] with a custom cap on dense Gram materialization.
pub fn build_projection_with_limit(losses: LossMatrix, gram_limit: usize) -> ProjectionSpace {
    let scale = (1.0 / losses.n_samples() as f64).sqrt();
    let u = losses.values().mapv(|v| v * scale);
    let norms = (0..u.nrows())
        .map(|n| {
            let row = row_slice(u.row(n));
            dot(row, row).sqrt()
        })
        .collect();
    ProjectionSpace { losses, u, norms, gram: OnceLock::new(), gram_limit }
}

impl ProjectionSpace {
    pub fn n_data(&self) -> usize {
        self.u.nrows()
    }

    pub fn n_samples(&self) -> usize {
        self.u.ncols()
    }

    pub fn losses(&self) -> &LossMatrix {
        &self.losses
    }

    pub fn u(&self) -> &Array2<f64> {
        &self.u
    }

    pub fn row(&self, n: usize) -> &[f64] {
        row_slice(self.u.row(n))
    }

    /// `||u_n||`, the projected norm of loss function `n`.
    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    /// Zero-norm rows cannot be normalized and never act as Frank-Wolfe vertices.
    pub fn is_degenerate(&self, n: usize) -> bool {
        self.norms[n] == 0.0
    }

    pub fn non_degenerate(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_data()).filter(move |&n| !self.is_degenerate(n))
    }

    /// Dense Gram matrix, or `None` above the materialization limit.
    pub fn gram(&self) -> Option<&Array2<f64>> {
        self.gram
            .get_or_init(|| {
                let n = self.n_data();
                if n > self.gram_limit {
                    return None;
                }
                let mut k = self.u.dot(&self.u.t());
                // Exact symmetry regardless of the blocking order.
                for a in 0..n {
                    for b in 0..a {
                        k[[a, b]] = k[[b, a]];
                    }
                }
                Some(k)
            })
            .as_ref()
    }

    /// `u_n^T u_m`.
    pub fn inner(&self, n: usize, m: usize) -> Result<f64> {
        let len = self.n_data();
        for index in [n, m] {
            if index >= len {
                return Err(Error::Index { index, len });
            }
        }
        Ok(dot(self.row(n), self.row(m)))
    }

    /// `sum_n coeffs_n u_n` as a `J`-vector.
    pub fn combine(&self, coeffs: &[f64]) -> Result<Array1<f64>> {
        check_len(self.n_data(), coeffs.len())?;
        let mut out = Array1::zeros(self.n_samples());
        for (n, &c) in coeffs.iter().enumerate() {
            if c != 0.0 {
                out.scaled_add(c, &self.u.row(n));
            }
        }
        Ok(out)
    }

    /// `sum_k w_k u_{n_k}` for sparse `(n_k, w_k)` pairs.
    pub fn combine_sparse(&self, entries: &[(usize, f64)]) -> Result<Array1<f64>> {
        let mut out = Array1::zeros(self.n_samples());
        for &(n, w) in entries {
            if n >= self.n_data() {
                return Err(Error::Index { index: n, len: self.n_data() });
            }
            out.scaled_add(w, &self.u.row(n));
        }
        Ok(out)
    }

    /// `||sum_n coeffs_n u_n||` via the explicit vector sum.
    pub fn weighted_norm(&self, coeffs: &[f64]) -> Result<f64> {
        let v = self.combine(coeffs)?;
        let v = v.as_slice().expect("contiguous");
        Ok(dot(v, v).sqrt())
    }

    /// `sqrt(coeffs^T K coeffs)` via the Gram matrix (or on-the-fly row
    /// products when the Gram matrix is not materialized).
    pub fn weighted_norm_gram(&self, coeffs: &[f64]) -> Result<f64> {
        check_len(self.n_data(), coeffs.len())?;
        let support: Vec<usize> = (0..coeffs.len()).filter(|&n| coeffs[n] != 0.0).collect();
        let mut quad = 0.0;
        match self.gram() {
            Some(k) => {
                for &a in &support {
                    for &b in &support {
                        quad += coeffs[a] * k[[a, b]] * coeffs[b];
                    }
                }
            }
            None => {
                for &a in &support {
                    for &b in &support {
                        quad += coeffs[a] * dot(self.row(a), self.row(b)) * coeffs[b];
                    }
                }
            }
        }
        Ok(quad.max(0.0).sqrt())
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::Dimension { expected, found });
    }
    Ok(())
}

pub(crate) fn row_slice(view: ArrayView1<'_, f64>) -> &[f64] {
    view.to_slice().expect("rows of standard-layout matrices are contiguous")
}

/// Dot product; plain summation up to 4096 terms, pairwise beyond.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    if a.len() <= PAIRWISE_THRESHOLD {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    } else {
        let mid = a.len() / 2;
        dot(&a[..mid], &b[..mid]) + dot(&a[mid..], &b[mid..])
    }
}

pub(crate) fn sum(a: &[f64]) -> f64 {
    if a.len() <= PAIRWISE_THRESHOLD {
        a.iter().sum()
    } else {
        let mid = a.len() / 2;
        sum(&a[..mid]) + sum(&a[mid..])
    }
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
