use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    #[error("invalid body: {0}")]
    InvalidBody(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported body for {op}: {reason}")]
    Unsupported { op: &'static str, reason: String },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("enumeration cap of {cap} lattice points exceeded")]
    EnumerationCap { cap: usize },

    #[error("requested {requested} eigenvalues but the embedded table only supports {available}")]
    TableExhausted { requested: usize, available: usize },

    #[error("mesh quality: {0}")]
    MeshQuality(String),

    #[error("degenerate triangle {index} (area {area:e})")]
    DegenerateTriangle { index: usize, area: f64 },

    #[error("eigensolver did not converge after {iterations} iterations (max residual {max_residual:e})")]
    NotConverged {
        iterations: usize,
        residuals: Vec<f64>,
        max_residual: f64,
    },

    #[error("Monte Carlo rejection efficiency {efficiency:.4} below 1%")]
    LowEfficiency { efficiency: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("unknown {kind}: {name}")]
    Unknown { kind: &'static str, name: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
