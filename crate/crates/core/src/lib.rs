//! Coreset construction and finite-sample risk bounds for Bayesian posteriors
//! over a convex class of data distributions.

pub mod bounds;
pub mod error;
pub mod frank_wolfe;
pub mod geometry;
pub mod hull;
pub mod oracle;
pub mod pipeline;
pub mod posterior;

pub use bounds::{
    compute_constants, theorem1_rate, theorem2_bounds, verify_bound, BoundConfig, BoundConstants, BoundReport,
    ExponentVariant, VerificationResult,
};
pub use error::{Error, Result};
pub use frank_wolfe::{fw_initialize, fw_step, run_algorithm1, CoresetSolution, FWState, VertexRun};
pub use geometry::{build_projection, LossKind, LossMatrix, ProjectionSpace};
pub use hull::{ConvexHull, CoresetWeights, ProbabilityVector};
pub use pipeline::{bound_losses, BoundRun, DeskConfig};
pub use posterior::{Architecture, Dataset, PosteriorSpec, ReferenceModel};
