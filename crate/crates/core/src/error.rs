use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid polynomial order {order}: {reason}")]
    InvalidOrder { order: usize, reason: &'static str },

    #[error("interpolation target {0} lies outside [-1, 1]")]
    OutOfRange(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("invalid mesh: non-positive Jacobian {jacobian:e} in element {element}")]
    MeshValidity { element: usize, jacobian: f64 },

    #[error("inadmissible state {state:?} (element {element:?}, node {node:?}): {reason}")]
    Admissibility {
        element: Option<usize>,
        node: Option<usize>,
        state: [f64; 5],
        reason: &'static str,
    },

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("order error: {0}")]
    Order(String),

    #[error("numerically invalid flux matrix at node {node}: pivot {pivot:e}")]
    NumericalValidity { node: usize, pivot: f64 },

    #[error("residual evaluation failed at stage {stage}: {source}")]
    Stage {
        stage: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },

    #[error("control file errors:\n{}", .0.join("\n"))]
    Control(Vec<String>),
}

impl Error {
    /// Attach element/node location to an admissibility error.
    pub fn at(self, element: usize, node: usize) -> Self {
        match self {
            Error::Admissibility { state, reason, .. } => Error::Admissibility {
                element: Some(element),
                node: Some(node),
                state,
                reason,
            },
            other => other,
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, err: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            message: err.to_string(),
        }
    }

    pub fn is_admissibility(&self) -> bool {
        match self {
            Error::Admissibility { .. } => true,
            Error::Stage { source, .. } => source.is_admissibility(),
            _ => false,
        }
    }
}
