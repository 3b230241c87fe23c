use std::path::PathBuf;

use crate::spec::Diagnostic;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid coordinate: {0}")]
    InvalidCoordinate(String),

    #[error("degenerate bearing: points coincide")]
    DegenerateBearing,

    #[error("density limit exceeded: {0} > {max}", max = crate::geo::MAX_DENSITY)]
    DensityLimit(usize),

    #[error("density must be at least 1")]
    ZeroDensity,

    #[error("field has no data: {0}")]
    NoData(String),

    #[error("matrix overflow: {fields} bound fields for {cells} cells")]
    MatrixOverflow { fields: usize, cells: usize },

    #[error("viewport must have positive width and height")]
    Viewport,

    /// Problem with an input dataset (network or thematic layer).
    #[error("{source_name}: {message}")]
    Data { source_name: String, message: String },

    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("specification has {} error(s)", .0.iter().filter(|d| d.is_error()).count())]
    Spec(Vec<Diagnostic>),

    #[error("{0}")]
    Geocode(String),
}

impl Error {
    pub(crate) fn data(source_name: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Data { source_name: source_name.into(), message: message.into() }
    }

    /// Diagnostics describing this error, for JSON output.
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        match self {
            Error::Spec(d) => d.clone(),
            Error::Data { source_name, message } => vec![Diagnostic::error(source_name.clone(), message.clone())],
            other => vec![Diagnostic::error("", other.to_string())],
        }
    }
}
