use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported parameters: {0}")]
    Unsupported(String),

    #[error("quadrature did not converge after {subdivisions} subdivisions (estimate {value:e}, error {error:e})")]
    NonConvergence {
        subdivisions: usize,
        value: f64,
        error: f64,
    },

    #[error("series for {0} did not converge")]
    SeriesNonConvergence(&'static str),

    #[error("resource bound exceeded: {0}")]
    ResourceExceeded(String),

    #[error("line {line}: field `{field}`: {message}")]
    Parse {
        line: u64,
        field: String,
        message: String,
    },

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures that come from configuration or arguments rather than numerics or data.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidConfig(_)
                | Error::Domain(_)
                | Error::InvalidArgument(_)
                | Error::Unsupported(_)
        )
    }

    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::SeriesNonConvergence(_) | Error::ResourceExceeded(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
