use thiserror::Error;

/// Errors surfaced by the library. Validation failures carry the parameter
/// name so the CLI can report them without re-deriving context.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "balls must be disjoint with radii at most the center distance (r={r}, s={s}, dist={dist})"
    )]
    OverlappingBalls { r: f64, s: f64, dist: f64 },

    #[error("roads {i} and {j} are parallel")]
    ParallelRoads { i: u64, j: u64 },

    #[error("eps {eps} is below the scene speed cutoff {v_min}; roads relevant at this eps were never sampled")]
    EpsBelowCutoff { eps: f64, v_min: f64 },

    #[error("malformed scene record at line {line}: {reason}")]
    SceneParse { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
