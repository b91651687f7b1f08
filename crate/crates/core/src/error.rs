use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid level `{0}`: expected a positive integer or `inf`")]
    InvalidLevel(String),

    #[error("braid word has {letters} letters, state-sum budget is {max}")]
    LetterBudget { letters: usize, max: usize },

    #[error("generator b_{index} does not fit on {strands} strands")]
    GeneratorOutOfRange { index: usize, strands: usize },

    #[error("ring of {n} sites is too small, need at least {min}")]
    RingTooSmall { n: usize, min: usize },

    #[error("site {site} is outside the ring of {n} sites")]
    SiteOutOfRange { site: usize, n: usize },

    #[error("trace drifted by {deviation:e} at step {step}")]
    TraceDrift { step: usize, deviation: f64 },

    #[error("normalization eigenvalue {value:e} at mode {mode} is singular; pass a regularization")]
    SingularNormalization { mode: usize, value: f64 },

    #[error("distribution sums to {total}, expected 1")]
    Unnormalized { total: f64 },

    #[error("fit window holds {points} points, need at least {needed}")]
    DegenerateWindow { points: usize, needed: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
