//! End-to-end runs: loss matrix to bound report, and the desk-scale
//! data-to-bound workflow with nested training checkpoints.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    compute_constants, theorem2_bounds, verify_bound, BoundConfig, BoundConstants, BoundReport, ExponentVariant,
};
use crate::error::{Error, Result};
use crate::frank_wolfe::{run_algorithm1, CoresetSolution};
use crate::geometry::{build_projection, LossKind, LossMatrix, ProjectionSpace};
use crate::hull::ConvexHull;
use crate::posterior::{
    build_posterior, diagonal_hessian, sample_losses, train_reference, Architecture, Dataset, PosteriorSpec,
    ReferenceModel,
};

/// Everything produced by bounding one loss matrix.
#[derive(Debug)]
pub struct BoundRun {
    pub space: ProjectionSpace,
    pub solution: CoresetSolution,
    pub constants: BoundConstants,
    /// Carries the verification record in `checks`.
    pub report: BoundReport,
}

/// Coreset, constants, bounds and verification for one loss matrix. An
/// all-zero matrix is bounded with `w~ = p^(0)`.
pub fn bound_losses(losses: LossMatrix, hull: &ConvexHull, m: usize, config: &BoundConfig) -> Result<BoundRun> {
    let space = build_projection(losses);
    let (solution, constants) = match run_algorithm1(&space, hull, m) {
        Ok(solution) => {
            let constants = compute_constants(&space, hull)?;
            (solution, constants)
        }
        Err(Error::DegenerateInstance) => {
            log::warn!("every loss row is zero; using the hull vertex itself as the coreset");
            (CoresetSolution::degenerate(hull, m), BoundConstants::zero(hull.n_vertices()))
        }
        Err(e) => return Err(e),
    };
    let mut report = theorem2_bounds(&space, hull, &solution, &constants, config)?;
    report.checks = Some(verify_bound(&space, hull, &solution, &report));
    Ok(BoundRun { space, solution, constants, report })
}

/// Settings of the synthetic desk workflow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeskConfig {
    pub n_data: usize,
    pub n_features: usize,
    pub separation: f64,
    /// Redraw points closer than this to the class boundary.
    pub margin: Option<f64>,
    pub architecture: Architecture,
    pub epochs: usize,
    pub learning_rate: f64,
    pub prior_std: f64,
    pub n_samples: usize,
    pub loss_kind: LossKind,
    /// `None` uses the checkpoint size.
    pub fw_iters: Option<usize>,
    pub xi: Option<f64>,
    pub delta: f64,
    pub variant: ExponentVariant,
    pub seed: u64,
}

impl Default for DeskConfig {
    fn default() -> Self {
        Self {
            n_data: 200,
            n_features: 2,
            separation: 3.0,
            margin: None,
            architecture: Architecture::Logistic,
            epochs: 200,
            learning_rate: 0.5,
            prior_std: 1e-4,
            n_samples: 1000,
            loss_kind: LossKind::ZeroOne,
            fw_iters: None,
            xi: None,
            delta: 0.05,
            variant: ExponentVariant::Appendix,
            seed: 0,
        }
    }
}

/// Independent seeds for data generation, initialization and posterior sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageSeeds {
    pub data: u64,
    pub init: u64,
    pub sample: u64,
}

impl StageSeeds {
    pub fn derive(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self { data: rng.random(), init: rng.random(), sample: rng.random() }
    }
}

impl DeskConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::Config("the number of posterior samples must be at least 1".into()));
        }
        if !(self.prior_std > 0.0 && self.prior_std.is_finite()) {
            return Err(Error::Config(format!("prior_std must be positive, got {}", self.prior_std)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Config(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        if self.fw_iters == Some(0) {
            return Err(Error::Config("the number of Frank-Wolfe iterations must be at least 1".into()));
        }
        Ok(())
    }

    pub fn bound_config(&self) -> BoundConfig {
        BoundConfig { xi: self.xi, delta: self.delta, variant: self.variant, seed: Some(self.seed) }
    }

    pub fn dataset(&self) -> Result<Dataset> {
        Dataset::blobs(self.n_data, self.n_features, self.separation, self.margin, StageSeeds::derive(self.seed).data)
    }
}

/// Reference model, posterior and full-sample losses for one checkpoint.
#[derive(Debug, Clone)]
pub struct PosteriorStage {
    pub checkpoint: usize,
    pub model: ReferenceModel,
    pub hessian: Vec<f64>,
    pub posterior: PosteriorSpec,
    pub losses: LossMatrix,
}

/// Trains on the first `checkpoint` points and samples losses on all of `data`.
pub fn posterior_stage(data: &Dataset, checkpoint: usize, config: &DeskConfig) -> Result<PosteriorStage> {
    config.validate()?;
    let seeds = StageSeeds::derive(config.seed);
    let train = data.checkpoint(checkpoint)?;
    let model = train_reference(&train, config.architecture, config.epochs, config.learning_rate, seeds.init)?;
    let hessian = diagonal_hessian(&model, &train)?;
    let posterior = build_posterior(&model.theta, &hessian, config.prior_std)?;
    let losses = sample_losses(&model, &posterior, data, config.n_samples, seeds.sample, config.loss_kind)?;
    Ok(PosteriorStage { checkpoint, model, hessian, posterior, losses })
}

/// Loss of the trained parameters themselves, averaged over the full sample.
pub fn deterministic_risk(model: &ReferenceModel, data: &Dataset, kind: LossKind) -> f64 {
    match kind {
        LossKind::ZeroOne => model.error_rate(data),
        _ => model.mean_loss(data),
    }
}

#[derive(Debug)]
pub struct CheckpointRun {
    pub stage: PosteriorStage,
    pub bound: BoundRun,
    pub deterministic_risk: f64,
}

/// One checkpoint of the desk workflow with a uniform distribution over the full sample.
pub fn run_checkpoint(data: &Dataset, checkpoint: usize, config: &DeskConfig) -> Result<CheckpointRun> {
    let stage = posterior_stage(data, checkpoint, config)?;
    let hull = ConvexHull::uniform(data.len())?;
    let m = config.fw_iters.unwrap_or(checkpoint);
    let bound = bound_losses(stage.losses.clone(), &hull, m, &config.bound_config())?;
    let deterministic_risk = deterministic_risk(&stage.model, data, config.loss_kind);
    Ok(CheckpointRun { stage, bound, deterministic_risk })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub checkpoint: usize,
    pub m: usize,
    pub bound_i: f64,
    pub bound_ii: f64,
    pub bound_ii_rate_form: f64,
    pub total_bound: f64,
    pub expected_risk_estimate: f64,
    pub deterministic_risk: f64,
    pub coreset_size: usize,
}

impl SweepRow {
    pub fn from_run(checkpoint: usize, run: &CheckpointRun) -> Self {
        let r = &run.bound.report;
        Self {
            checkpoint,
            m: r.config.m,
            bound_i: r.bound_i,
            bound_ii: r.bound_ii.value,
            bound_ii_rate_form: r.bound_ii.rate_form,
            total_bound: r.total_bound,
            expected_risk_estimate: r.expected_risk_estimate,
            deterministic_risk: run.deterministic_risk,
            coreset_size: r.coreset_size,
        }
    }
}

/// Runs every checkpoint on the same data and sampling seed; rows are sorted
/// by checkpoint size.
pub fn sweep(data: &Dataset, checkpoints: &[usize], config: &DeskConfig) -> Result<Vec<SweepRow>> {
    if checkpoints.is_empty() {
        return Err(Error::Config("no checkpoints given".into()));
    }
    let mut sizes = checkpoints.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    sizes.iter().map(|&c| run_checkpoint(data, c, config).map(|run| SweepRow::from_run(c, &run))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> DeskConfig {
        DeskConfig { n_data: 60, n_samples: 50, epochs: 50, ..Default::default() }
    }

    #[test]
    fn zero_losses_bound_with_probability_weights() {
        let losses = LossMatrix::from_rows(&vec![vec![0.0; 4]; 3], LossKind::ZeroOne).unwrap();
        let hull = ConvexHull::uniform(3).unwrap();
        let run = bound_losses(losses, &hull, 2, &BoundConfig::default()).unwrap();
        assert!(run.solution.degenerate);
        assert_eq!(run.report.bound_ii.value, 0.0);
        assert!(run.report.checks.as_ref().unwrap().passed);
    }

    #[test]
    fn checkpoint_run_is_deterministic() {
        let cfg = small();
        let data = cfg.dataset().unwrap();
        let a = run_checkpoint(&data, 20, &cfg).unwrap();
        let b = run_checkpoint(&data, 20, &cfg).unwrap();
        assert_eq!(a.stage.losses, b.stage.losses);
        assert_eq!(a.bound.report, b.bound.report);
        assert_eq!(a.bound.report.config.m, 20);
        assert!(a.bound.report.checks.as_ref().unwrap().passed);
        assert!(a.bound.report.coreset_size <= 20);
    }

    #[test]
    fn sweep_sorts_and_rejects_empty() {
        let cfg = small();
        let data = cfg.dataset().unwrap();
        let rows = sweep(&data, &[40, 20], &cfg).unwrap();
        assert_eq!(rows.iter().map(|r| r.checkpoint).collect::<Vec<_>>(), vec![20, 40]);
        assert!(matches!(sweep(&data, &[], &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn invalid_settings_are_rejected() {
        let data = small().dataset().unwrap();
        for cfg in [
            DeskConfig { prior_std: 0.0, ..small() },
            DeskConfig { n_samples: 0, ..small() },
            DeskConfig { delta: 1.5, ..small() },
            DeskConfig { fw_iters: Some(0), ..small() },
        ] {
            assert!(matches!(run_checkpoint(&data, 10, &cfg), Err(Error::Config(_))));
        }
    }
}
