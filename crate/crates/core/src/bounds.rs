//! Geometric constants of a loss instance, the Frank-Wolfe error rate they
//! imply, and the finite-sample risk bounds built from a coreset.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frank_wolfe::CoresetSolution;
use crate::geometry::{dot, LossKind, LossMatrix, ProjectionSpace};
use crate::hull::{estimate_radius, ConvexHull, RadiusMethod};

/// Slack allowed when comparing a measured residual with the rate bound. The
/// Frank-Wolfe loop stops at `J~ < 1e-14`, so residuals below `1e-7` are noise.
pub const CERTIFICATE_TOL: f64 = 1e-7;
/// Relative slack on `sum_n w_n ||u_n|| = sigma`.
pub const FEASIBILITY_TOL: f64 = 1e-8;
/// Absolute slack on objective increases between iterations.
pub const MONOTONICITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    pub sigma_i: Vec<f64>,
    pub eta_i: Vec<f64>,
    pub beta_i: Vec<f64>,
    pub radius_i: Vec<f64>,
    pub radius_method_i: Vec<RadiusMethod>,
    /// Largest distance between two normalized loss directions.
    pub eta_bar: f64,
    pub sigma_hat: f64,
    pub eta_hat: f64,
    pub beta_hat: f64,
}

impl BoundConstants {
    /// Constants of an all-zero loss matrix: every term vanishes.
    pub fn zero(n_vertices: usize) -> Self {
        Self {
            sigma_i: vec![0.0; n_vertices],
            eta_i: vec![0.0; n_vertices],
            beta_i: vec![0.0; n_vertices],
            radius_i: vec![0.0; n_vertices],
            radius_method_i: vec![RadiusMethod::SinglePoint; n_vertices],
            eta_bar: 0.0,
            sigma_hat: 0.0,
            eta_hat: 0.0,
            beta_hat: 0.0,
        }
    }
}

/// `max_{n,m} || u_n/||u_n|| - u_m/||u_m|| ||` over non-degenerate rows.
pub fn max_direction_gap(space: &ProjectionSpace) -> f64 {
    let idx: Vec<usize> = space.non_degenerate().collect();
    let units: Vec<Vec<f64>> = idx
        .iter()
        .map(|&n| {
            let inv = 1.0 / space.norms()[n];
            space.row(n).iter().map(|v| v * inv).collect()
        })
        .collect();
    // Maximum is order independent, so the parallel reduction is deterministic.
    let max_sq = (0..units.len())
        .into_par_iter()
        .map(|a| {
            let mut best = 0.0f64;
            for b in a + 1..units.len() {
                let d: f64 = units[a].iter().zip(&units[b]).map(|(x, y)| (x - y) * (x - y)).sum();
                best = best.max(d);
            }
            best
        })
        .reduce(|| 0.0, f64::max);
    max_sq.sqrt().min(2.0)
}

pub fn compute_constants(space: &ProjectionSpace, hull: &ConvexHull) -> Result<BoundConstants> {
    if hull.n_data() != space.n_data() {
        return Err(Error::Dimension { expected: space.n_data(), found: hull.n_data() });
    }
    if space.non_degenerate().next().is_none() {
        return Err(Error::DegenerateInstance);
    }
    let eta_bar = max_direction_gap(space);
    let norms = space.norms();

    let k = hull.n_vertices();
    let mut c = BoundConstants::zero(k);
    c.eta_bar = eta_bar;
    for (i, vertex) in hull.vertices().iter().enumerate() {
        let p = vertex.as_slice();
        let sigma: f64 = space.non_degenerate().map(|n| p[n] * norms[n]).sum();
        let l = space.combine(p)?;
        let l = l.as_slice().expect("contiguous");
        let eta = if sigma > 0.0 { (1.0 - dot(l, l) / (sigma * sigma)).clamp(0.0, 1.0).sqrt() } else { 0.0 };

        let radius = estimate_radius(space, vertex)?;
        let scale = sigma * eta_bar;
        let beta = if scale > 0.0 {
            let mut r = radius.radius;
            if r > scale {
                log::warn!("vertex {i}: radius {r} exceeds sigma * eta_bar = {scale}; clamping");
                r = scale;
            }
            (1.0 - (r * r) / (scale * scale)).clamp(0.0, 1.0).sqrt()
        } else {
            0.0
        };

        c.sigma_i[i] = sigma;
        c.eta_i[i] = eta;
        c.beta_i[i] = beta;
        c.radius_i[i] = radius.radius;
        c.radius_method_i[i] = radius.method;
    }
    c.sigma_hat = c.sigma_i.iter().copied().fold(0.0, f64::max);
    c.eta_hat = c.eta_i.iter().copied().fold(0.0, f64::max);
    c.beta_hat = c.beta_i.iter().copied().fold(0.0, f64::max);
    Ok(c)
}

/// Which exponent of `beta` enters the rate denominator.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentVariant {
    /// `beta^{-2(m-2)}`, the looser form.
    #[default]
    Appendix,
    /// `beta^{-2(m-1)}`.
    TheoremText,
}

impl ExponentVariant {
    pub fn name(self) -> &'static str {
        match self {
            Self::Appendix => "appendix",
            Self::TheoremText => "theorem_text",
        }
    }
}

/// Bound on `||L - L(w~)||` after `m` Frank-Wolfe iterations (initialization
/// counts as the first).
pub fn theorem1_rate(constants: &BoundConstants, m: usize, variant: ExponentVariant) -> f64 {
    rate(constants.sigma_hat, constants.eta_hat, constants.eta_bar, constants.beta_hat, m, variant)
}

/// The rate formula on explicit constants.
pub fn rate(sigma: f64, eta: f64, eta_bar: f64, beta: f64, m: usize, variant: ExponentVariant) -> f64 {
    assert!(m >= 1, "iteration count starts at 1");
    if m == 1 {
        return sigma * eta;
    }
    if eta == 0.0 || beta == 0.0 {
        return 0.0;
    }
    let k = match variant {
        ExponentVariant::Appendix => (m - 2) as f64,
        ExponentVariant::TheoremText => (m - 1) as f64,
    };
    let growth = (-2.0 * k * beta.ln()).exp();
    let denom = (eta_bar * eta_bar * growth + eta * eta * (m - 1) as f64).sqrt();
    if !denom.is_finite() {
        return 0.0;
    }
    sigma * eta * eta_bar * beta / denom
}

/// Projection error scale `sqrt((2 xi^2 / J) ln(2 N^2 / delta))`.
pub fn epsilon_proj(n_data: usize, n_samples: usize, xi: f64, delta: f64) -> f64 {
    let n = n_data as f64;
    ((2.0 * xi * xi / n_samples as f64) * (2.0 * n * n / delta).ln()).sqrt()
}

/// `1/2` for zero-one losses; otherwise half the range that products
/// `l_n(theta) l_m(theta)` can take given each column's extremes.
pub fn default_xi(losses: &LossMatrix) -> f64 {
    if losses.kind() == LossKind::ZeroOne {
        return 0.5;
    }
    let values = losses.values();
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    for col in values.columns() {
        let a = col.iter().copied().fold(f64::INFINITY, f64::min);
        let b = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        hi = hi.max((a * a).max(b * b));
        lo = lo.min((a * b).min(a * a).min(b * b));
    }
    // Constant products carry no projection noise; keep xi positive.
    ((hi - lo) / 2.0).max(f64::EPSILON)
}

fn check_config(xi: f64, delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Config(format!("delta must lie in (0, 1), got {delta}")));
    }
    if !(xi > 0.0 && xi.is_finite()) {
        return Err(Error::Config(format!("xi must be positive, got {xi}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundConfig {
    /// `None` selects [`default_xi`].
    pub xi: Option<f64>,
    pub delta: f64,
    pub variant: ExponentVariant,
    pub seed: Option<u64>,
}

impl Default for BoundConfig {
    fn default() -> Self {
        Self { xi: None, delta: 0.05, variant: ExponentVariant::Appendix, seed: None }
    }
}

/// Resolved settings echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub m: usize,
    pub n_data: usize,
    pub n_samples: usize,
    pub n_vertices: usize,
    pub xi: f64,
    pub delta: f64,
    pub exponent_variant: ExponentVariant,
    pub seed: Option<u64>,
}

/// Second bound term in both forms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondBound {
    /// Headline value, equal to `direct`.
    pub value: f64,
    /// `sqrt(||u(w~) - u(p)||^2 + ||w~ - p||_1^2 eps)`, maximized over vertices.
    pub direct: f64,
    /// `sqrt(rate + ||w~ - p||_1^2 eps)` with the unsquared rate.
    pub rate_form: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoresetEntry {
    pub index: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub constants: BoundConstants,
    pub theorem1_rate: f64,
    pub epsilon_proj: f64,
    #[serde(rename = "bound_I")]
    pub bound_i: f64,
    #[serde(rename = "bound_II")]
    pub bound_ii: SecondBound,
    pub total_bound: f64,
    /// Largest Monte-Carlo risk over the hull vertices.
    pub expected_risk_estimate: f64,
    pub vertex_risks: Vec<f64>,
    pub selected_vertex: usize,
    pub coreset_size: usize,
    pub coreset: Vec<CoresetEntry>,
    pub objective_trace: Vec<f64>,
    pub config: ReportConfig,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub checks: Option<VerificationResult>,
}

pub fn theorem2_bounds(
    space: &ProjectionSpace,
    hull: &ConvexHull,
    solution: &CoresetSolution,
    constants: &BoundConstants,
    config: &BoundConfig,
) -> Result<BoundReport> {
    let xi = config.xi.unwrap_or_else(|| default_xi(space.losses()));
    check_config(xi, config.delta)?;
    if hull.n_data() != space.n_data() {
        return Err(Error::Dimension { expected: space.n_data(), found: hull.n_data() });
    }
    let eps = epsilon_proj(space.n_data(), space.n_samples(), xi, config.delta);
    let w = &solution.weights;
    let rate = if solution.degenerate { 0.0 } else { theorem1_rate(constants, solution.fw_iters, config.variant) };

    let uw = space.combine_sparse(w.entries())?;
    let uw = uw.as_slice().expect("contiguous");
    let l1 = w.l1();
    let bound_i = (dot(uw, uw) + l1 * l1 * eps).sqrt();

    let mut direct: f64 = 0.0;
    let mut rate_form: f64 = 0.0;
    let mut vertex_risks = Vec::with_capacity(hull.n_vertices());
    for p in hull.vertices() {
        let diff = w.minus(p)?;
        let r = space.combine(&diff)?;
        let r = r.as_slice().expect("contiguous");
        let d1: f64 = diff.iter().map(|v| v.abs()).sum();
        direct = direct.max((dot(r, r) + d1 * d1 * eps).sqrt());
        rate_form = rate_form.max((rate + d1 * d1 * eps).sqrt());
        vertex_risks.push(space.losses().expected_risk(p.as_slice())?);
    }
    let expected_risk_estimate = vertex_risks.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    Ok(BoundReport {
        constants: constants.clone(),
        theorem1_rate: rate,
        epsilon_proj: eps,
        bound_i,
        bound_ii: SecondBound { value: direct, direct, rate_form },
        total_bound: bound_i + direct,
        expected_risk_estimate,
        vertex_risks,
        selected_vertex: solution.vertex_index,
        coreset_size: w.nnz(),
        coreset: w.entries().iter().map(|&(index, weight)| CoresetEntry { index, weight }).collect(),
        objective_trace: solution.selected_run().objective_trace.clone(),
        config: ReportConfig {
            m: solution.fw_iters,
            n_data: space.n_data(),
            n_samples: space.n_samples(),
            n_vertices: hull.n_vertices(),
            xi,
            delta: config.delta,
            exponent_variant: config.variant,
            seed: config.seed,
        },
        checks: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationResult {
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl VerificationResult {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Largest violation of the rate bound along every vertex trace, as
/// `(vertex, iteration, residual, bound)`.
pub fn worst_rate_violation(
    solution: &CoresetSolution,
    constants: &BoundConstants,
    variant: ExponentVariant,
) -> Option<(usize, usize, f64, f64)> {
    let mut worst: Option<(usize, usize, f64, f64)> = None;
    for run in &solution.runs {
        for (t, &obj) in run.objective_trace.iter().enumerate() {
            let residual = obj.max(0.0).sqrt();
            let bound = theorem1_rate(constants, t + 1, variant);
            let excess = residual - bound;
            if excess > CERTIFICATE_TOL && worst.is_none_or(|w| excess > w.2 - w.3) {
                worst = Some((run.vertex_index, t, residual, bound));
            }
        }
    }
    worst
}

pub fn verify_bound(
    space: &ProjectionSpace,
    hull: &ConvexHull,
    solution: &CoresetSolution,
    report: &BoundReport,
) -> VerificationResult {
    let mut checks = Vec::new();
    let mut push = |name: &str, passed: bool, detail: String| {
        checks.push(Check { name: name.to_string(), passed, detail });
    };

    let risk = report.expected_risk_estimate.abs();
    push(
        "risk_within_bound",
        risk <= report.total_bound * (1.0 + 1e-12),
        format!("|risk| = {risk:.6e}, bound = {:.6e}", report.total_bound),
    );

    if solution.degenerate {
        let note = "all losses are zero; no Frank-Wolfe run".to_string();
        push("rate_certificate", true, note.clone());
        push("objective_monotone", true, note.clone());
        push("sparsity", true, note);
    } else {
        match worst_rate_violation(solution, &report.constants, report.config.exponent_variant) {
            None => push("rate_certificate", true, "every iterate within the rate bound".into()),
            Some((i, t, r, b)) => {
                push("rate_certificate", false, format!("vertex {i}, iteration {t}: residual {r:.6e} > bound {b:.6e}"))
            }
        }

        let mut monotone = None;
        for run in &solution.runs {
            for (t, pair) in run.objective_trace.windows(2).enumerate() {
                if pair[1] > pair[0] + MONOTONICITY_TOL && monotone.is_none() {
                    monotone = Some((run.vertex_index, t + 1, pair[0], pair[1]));
                }
            }
        }
        match monotone {
            None => push("objective_monotone", true, "objective never increases".into()),
            Some((i, t, a, b)) => push("objective_monotone", false, format!("vertex {i}, step {t}: {a:.6e} -> {b:.6e}")),
        }

        let nnz = solution.weights.nnz();
        push(
            "sparsity",
            nnz <= solution.fw_iters,
            format!("{nnz} nonzero weights after {} iterations", solution.fw_iters),
        );
    }

    let norms = space.norms();
    let mut infeasible = Vec::new();
    let runs = solution.runs.iter().map(|r| (r.vertex_index, &r.weights));
    for (i, w) in runs.chain(std::iter::once((solution.vertex_index, &solution.weights))) {
        let sigma: f64 = match hull.vertices().get(i) {
            Some(p) => space.non_degenerate().map(|n| p.as_slice()[n] * norms[n]).sum(),
            None => {
                infeasible.push(format!("vertex index {i} out of range"));
                continue;
            }
        };
        let mass = w.polytope_mass(norms);
        if (mass - sigma).abs() > FEASIBILITY_TOL * sigma {
            infeasible.push(format!("vertex {i}: mass {mass:.12e} vs sigma {sigma:.12e}"));
        }
        if w.entries().iter().any(|&(_, v)| v < 0.0) {
            infeasible.push(format!("vertex {i}: negative weight"));
        }
    }
    push(
        "polytope_feasibility",
        infeasible.is_empty(),
        if infeasible.is_empty() { "weights lie on every vertex polytope".into() } else { infeasible.join("; ") },
    );

    let passed = checks.iter().all(|c| c.passed);
    VerificationResult { passed, checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frank_wolfe::run_algorithm1;
    use crate::geometry::build_projection;
    use crate::hull::{CoresetWeights, ProbabilityVector};

    fn orthogonal() -> ProjectionSpace {
        let r2 = 2f64.sqrt();
        build_projection(LossMatrix::from_rows(&[vec![r2, 0.0], vec![0.0, r2]], LossKind::Custom).unwrap())
    }

    #[test]
    fn worked_example_constants() {
        let s = orthogonal();
        let c = compute_constants(&s, &ConvexHull::uniform(2).unwrap()).unwrap();
        assert!((c.sigma_hat - 1.0).abs() < 1e-12);
        assert!((c.eta_hat - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((c.eta_bar - 2f64.sqrt()).abs() < 1e-12);
        assert!((c.radius_i[0] - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((c.beta_hat - 0.75f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn worked_example_rates() {
        let s = orthogonal();
        let c = compute_constants(&s, &ConvexHull::uniform(2).unwrap()).unwrap();
        let a = theorem1_rate(&c, 2, ExponentVariant::Appendix);
        let t = theorem1_rate(&c, 2, ExponentVariant::TheoremText);
        let expected_a = 0.5f64.sqrt() * 2f64.sqrt() * 0.75f64.sqrt() / 2.5f64.sqrt();
        let expected_t = 0.5f64.sqrt() * 2f64.sqrt() * 0.75f64.sqrt() / (2.0 / 0.75 + 0.5f64).sqrt();
        assert!((a - expected_a).abs() < 1e-12);
        assert!((t - expected_t).abs() < 1e-12);
        assert!((a - 0.54772).abs() < 1e-5);
        assert!((t - 0.48666).abs() < 1e-5);
        assert!((theorem1_rate(&c, 1, ExponentVariant::Appendix) - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn identical_rows_give_zero_rate() {
        let s = build_projection(LossMatrix::from_rows(&vec![vec![1.0, 2.0]; 3], LossKind::Custom).unwrap());
        let c = compute_constants(&s, &ConvexHull::uniform(3).unwrap()).unwrap();
        assert_eq!(c.eta_bar, 0.0);
        assert!(c.eta_hat < 1e-7);
        for m in 2..6 {
            assert_eq!(theorem1_rate(&c, m, ExponentVariant::Appendix), 0.0);
        }
    }

    #[test]
    fn identical_vertices_share_constants() {
        let s = orthogonal();
        let p = ProbabilityVector::new(vec![0.3, 0.7]).unwrap();
        let one = compute_constants(&s, &ConvexHull::new(vec![p.clone()]).unwrap()).unwrap();
        let two = compute_constants(&s, &ConvexHull::new(vec![p.clone(), p]).unwrap()).unwrap();
        assert_eq!(one.sigma_hat, two.sigma_hat);
        assert_eq!(one.eta_hat, two.eta_hat);
        assert_eq!(one.beta_hat, two.beta_hat);
    }

    #[test]
    fn degenerate_constants_error() {
        let s = build_projection(LossMatrix::from_rows(&[vec![0.0, 0.0]], LossKind::ZeroOne).unwrap());
        assert!(matches!(compute_constants(&s, &ConvexHull::uniform(1).unwrap()), Err(Error::DegenerateInstance)));
    }

    #[test]
    fn rate_is_nonincreasing() {
        for variant in [ExponentVariant::Appendix, ExponentVariant::TheoremText] {
            let mut prev = f64::INFINITY;
            for m in 2..200 {
                let r = rate(1.3, 0.6, 1.1, 0.97, m, variant);
                assert!(r <= prev);
                prev = r;
            }
        }
        assert_eq!(rate(1.0, 0.5, 1.0, 0.0, 3, ExponentVariant::Appendix), 0.0);
        assert_eq!(rate(1.0, 0.5, 1.0, 1e-200, 10_000, ExponentVariant::Appendix), 0.0);
    }

    #[test]
    fn epsilon_examples() {
        let e = epsilon_proj(2, 2, 0.5, 0.1);
        assert!((e - (0.25 * 80f64.ln()).sqrt()).abs() < 1e-12);
        assert!((e - 1.04667).abs() < 1e-5);
        let ratio = epsilon_proj(20, 100, 0.5, 0.05) / epsilon_proj(20, 200, 0.5, 0.05);
        assert!((ratio - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn xi_defaults() {
        let zo = LossMatrix::from_rows(&[vec![0.0, 1.0]], LossKind::ZeroOne).unwrap();
        assert_eq!(default_xi(&zo), 0.5);
        let ce = LossMatrix::from_rows(&[vec![0.0, 2.0], vec![1.0, 0.5]], LossKind::CrossEntropy).unwrap();
        // Column ranges [0, 1] and [0.5, 2]: products span [0, 4].
        assert_eq!(default_xi(&ce), 2.0);
    }

    #[test]
    fn config_validation() {
        let s = orthogonal();
        let hull = ConvexHull::uniform(2).unwrap();
        let sol = run_algorithm1(&s, &hull, 2).unwrap();
        let c = compute_constants(&s, &hull).unwrap();
        for (xi, delta) in [(Some(0.5), 0.0), (Some(0.5), 1.0), (Some(0.0), 0.05), (Some(-1.0), 0.05)] {
            let cfg = BoundConfig { xi, delta, ..Default::default() };
            assert!(matches!(theorem2_bounds(&s, &hull, &sol, &c, &cfg), Err(Error::Config(_))));
        }
    }

    #[test]
    fn worked_example_report_and_checks() {
        let s = orthogonal();
        let hull = ConvexHull::uniform(2).unwrap();
        let sol = run_algorithm1(&s, &hull, 2).unwrap();
        let c = compute_constants(&s, &hull).unwrap();
        let cfg = BoundConfig { xi: Some(0.5), delta: 0.1, ..Default::default() };
        let report = theorem2_bounds(&s, &hull, &sol, &c, &cfg).unwrap();
        let eps = epsilon_proj(2, 2, 0.5, 0.1);
        // u(w~) = [0.5, 0.5], ||w~||_1 = 1.
        assert!((report.bound_i - (0.5 + eps).sqrt()).abs() < 1e-12);
        assert!(report.bound_ii.direct.abs() < 1e-12);
        assert!((report.bound_ii.rate_form - report.theorem1_rate.sqrt()).abs() < 1e-12);
        assert_eq!(report.coreset_size, 2);
        let checks = verify_bound(&s, &hull, &sol, &report);
        assert!(checks.passed, "{checks:?}");
    }

    #[test]
    fn corrupted_weights_fail_feasibility() {
        let s = orthogonal();
        let hull = ConvexHull::uniform(2).unwrap();
        let mut sol = run_algorithm1(&s, &hull, 2).unwrap();
        let c = compute_constants(&s, &hull).unwrap();
        let report = theorem2_bounds(&s, &hull, &sol, &c, &BoundConfig::default()).unwrap();
        sol.weights = CoresetWeights::from_dense(&[0.6, 0.5], 0).unwrap();
        let checks = verify_bound(&s, &hull, &sol, &report);
        assert!(!checks.passed);
        assert!(!checks.check("polytope_feasibility").unwrap().passed);
        assert!(checks.check("rate_certificate").unwrap().passed);
    }

    #[test]
    fn zero_losses_use_probability_weights() {
        let s = build_projection(LossMatrix::from_rows(&vec![vec![0.0, 0.0]; 3], LossKind::ZeroOne).unwrap());
        let hull = ConvexHull::uniform(3).unwrap();
        let sol = CoresetSolution::degenerate(&hull, 1);
        let c = BoundConstants::zero(1);
        let cfg = BoundConfig { xi: None, delta: 0.05, ..Default::default() };
        let report = theorem2_bounds(&s, &hull, &sol, &c, &cfg).unwrap();
        let eps = epsilon_proj(3, 2, 0.5, 0.05);
        assert!((report.bound_i - eps.sqrt()).abs() < 1e-12);
        assert_eq!(report.bound_ii.value, 0.0);
        assert_eq!(report.expected_risk_estimate, 0.0);
        assert!(verify_bound(&s, &hull, &sol, &report).passed);
    }
}
