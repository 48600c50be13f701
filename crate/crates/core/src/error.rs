//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Structurally invalid curve data (too few vertices, repeated points,
    /// non-finite numbers).
    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    /// An argument outside an operation's contract (grid too coarse,
    /// coincident parameters, bad ranges).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A sign predicate at `y` fell inside the tolerance margin; the caller
    /// should perturb `y` and retry.
    #[error("non-generic point: {0}")]
    NonGenericPoint(String),

    /// The curve fails a genericity check required by the operation.
    #[error("non-generic curve: {0}")]
    NonGenericCurve(String),

    /// Direction vector too close to orthogonal to an edge.
    #[error("non-generic direction: {0}")]
    NonGenericDirection(String),

    /// Near-tangent arcs or coincident vertices in the lune arrangement.
    #[error("non-generic arrangement: {0}")]
    NonGenericArrangement(String),

    /// Projection direction unsuitable for a knot diagram.
    #[error("non-generic projection: {0}")]
    NonGenericProjection(String),

    /// Curvature below tolerance at parameter `t`.
    #[error("degenerate curvature at t = {t}")]
    DegenerateCurvature { t: f64 },

    /// Adjacent edges at a vertex are collinear; no wedge exists.
    #[error("collinear edges at vertex {vertex}")]
    CollinearEdges { vertex: usize },

    /// Normal planes do not meet in a unique point.
    #[error("singular system: normal planes have no unique common point")]
    SingularSystem,

    /// Query direction lies on a lune boundary arc.
    #[error("direction on a lune boundary arc")]
    OnBoundary,

    /// The chase path steps over more than one event; refine the path.
    #[error("path too coarse: {0}")]
    PathTooCoarse(String),

    /// Scan segment crosses several sheets at once; perturb the segment.
    #[error("non-transverse segment: {0}")]
    NonTransverse(String),

    /// Probe offsets hit a non-generic point or an inconsistent chamber
    /// pattern; retry with a smaller delta.
    #[error("probe too coarse: {0}")]
    ProbeTooCoarse(String),

    /// No sphere through 4 vertices contains the whole curve. Reportable:
    /// preserve the input as a counterexample candidate.
    #[error("no superscribed sphere found after {quadruples_tried} quadruples")]
    NoSphereFound { quadruples_tried: usize },

    /// Witness search exhausted its budget below the target count.
    #[error("search failed: best n = {best_n} within budget {budget}")]
    SearchFailed { best_n: usize, budget: usize },

    /// A generator kept producing non-generic curves.
    #[error("genericity retry limit exceeded after {retries} attempts")]
    GenericityRetryExceeded { retries: usize },

    /// Estimate requested over zero samples.
    #[error("empty estimate: sample count is zero")]
    EmptyEstimate,

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors meaning "the input is degenerate for this operation";
    /// the CLI maps these to exit code 2.
    pub fn is_non_generic(&self) -> bool {
        matches!(
            self,
            Error::NonGenericPoint(_)
                | Error::NonGenericCurve(_)
                | Error::NonGenericDirection(_)
                | Error::NonGenericArrangement(_)
                | Error::NonGenericProjection(_)
                | Error::DegenerateCurvature { .. }
                | Error::CollinearEdges { .. }
                | Error::SingularSystem
                | Error::OnBoundary
                | Error::PathTooCoarse(_)
                | Error::NonTransverse(_)
                | Error::ProbeTooCoarse(_)
        )
    }

    /// True for errors meaning "a search ran and did not reach its target";
    /// the CLI maps these to exit code 3.
    pub fn is_search_failure(&self) -> bool {
        matches!(
            self,
            Error::SearchFailed { .. }
                | Error::NoSphereFound { .. }
                | Error::GenericityRetryExceeded { .. }
        )
    }
}
