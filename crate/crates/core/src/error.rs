use thiserror::Error;

pub type Result<T> = std::result::Result<T, WalkError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WalkError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A nonzero amplitude sits on the lattice edge and would be shifted off.
    #[error("walk reached the lattice boundary at site {site}")]
    Boundary { site: i64 },

    #[error("post-selection probability {probability:e} is too small to condition on")]
    DegeneratePostselection { probability: f64 },

    #[error("negative probability {value:e} at site {site}")]
    NegativeProbability { site: i64, value: f64 },

    #[error("no sign change of the end-site criterion on the scan grid (steps {steps}, ratio {ratio})")]
    NoBracket { steps: usize, ratio: f64 },

    #[error("lattice mismatch: half-width {left} vs {right}")]
    LatticeMismatch { left: usize, right: usize },

    #[error("state does not fit on a lattice of half-width {half_width}")]
    DoesNotFit { half_width: usize },
}

impl WalkError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        WalkError::InvalidParameter { name, reason: reason.into() }
    }
}
