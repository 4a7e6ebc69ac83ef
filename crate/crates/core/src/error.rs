use thiserror::Error;

/// Errors raised by the spectral solvers and analyses.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Grid refinement hit its limit before an eigenvalue settled.
    #[error(
        "eigenvalue {index} did not converge: last estimates {previous} and {current} \
         (relative change {change:.3e}, tolerance {tol:.1e})"
    )]
    Convergence {
        index: usize,
        previous: f64,
        current: f64,
        change: f64,
        tol: f64,
    },

    /// A per-mode solve failed while assembling a product spectrum.
    #[error("mode k={k} (omega={omega}): {source}")]
    Mode {
        k: usize,
        omega: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("missing dependency: {0}")]
    MissingDependency(String),

    /// Query beyond the certified completeness bound of a spectrum.
    #[error("lambda = {lambda} exceeds the completeness bound {lambda_max}")]
    Range { lambda: f64, lambda_max: f64 },

    /// Heat trace requested where the truncation tail dominates.
    #[error("t = {t} is below the valid sampling range (t_min = {t_min})")]
    BelowValidRange { t: f64, t_min: f64 },

    #[error("divergent quantity: {0}")]
    Divergence(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("insufficient data: {0}")]
    Insufficient(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures of the eigenvalue refinement loop, possibly wrapped
    /// in mode context.
    pub fn is_convergence(&self) -> bool {
        match self {
            Error::Convergence { .. } => true,
            Error::Mode { source, .. } => source.is_convergence(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
