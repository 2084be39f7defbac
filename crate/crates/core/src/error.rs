use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    #[error("invalid disc radius {0}")]
    InvalidRadius(f64),

    #[error("degenerate ray: direction point coincides with the origin")]
    DegenerateRay,

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("robot {robot}: {which} configuration is in collision")]
    ConfigurationInCollision { robot: usize, which: &'static str },

    #[error("roadmap disconnected: start and target not connected after {batches} batches")]
    RoadmapDisconnected { batches: usize },

    #[error("free space sampling exhausted after {attempts} attempts")]
    SamplingExhausted { attempts: usize },

    #[error("invalid roadmap: {0}")]
    InvalidRoadmap(String),

    #[error("unknown vertex id {id} (roadmap has {len} vertices)")]
    UnknownVertex { id: usize, len: usize },

    #[error("invalid composite vertex: {0}")]
    InvalidCompositeVertex(String),

    #[error("explicit composite roadmap exceeds cap: {size} > {cap}")]
    CapExceeded { size: u128, cap: usize },

    #[error("path suffix does not start at the junction node")]
    SuffixMismatch,

    #[error("invalid plan: {0}")]
    InvalidPlan(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
