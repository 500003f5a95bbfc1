use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown region `{0}`")]
    UnknownRegion(String),

    #[error("region alphabets differ: {left:?} vs {right:?}")]
    AlphabetMismatch { left: Vec<String>, right: Vec<String> },

    #[error("cannot combine bosonic and fermionic states")]
    StatisticsMismatch,

    #[error("{what} is not normalized (squared norm {norm_sqr})")]
    NotNormalized { what: &'static str, norm_sqr: f64 },

    /// The conditional weight P_L P'_R + P'_L P_R vanishes: no operational
    /// correlations are observable between the two regions, so the
    /// entanglement is undefined (and is *not* zero).
    #[error("no operational correlations observable (conditional weight {weight:e})")]
    NoOperationalCorrelations { weight: f64 },

    #[error("projection onto the one-particle-per-region subspace failed (probability {probability:e})")]
    ProjectionFailure { probability: f64 },

    #[error("{0}")]
    Domain(String),

    #[error("internal consistency violated: {0}")]
    Consistency(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
