use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid truncation {0}: at least 2 Fock levels are required")]
    InvalidTruncation(usize),

    #[error("layout mismatch: {0}")]
    Layout(String),

    #[error("{what} index {index} out of range (must be < {bound})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        bound: usize,
    },

    #[error("operator is not Hermitian (max |H - H^dag| = {0:.3e})")]
    NotHermitian(f64),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("asymmetric coefficient tensor {tensor}: {detail}")]
    Asymmetric { tensor: &'static str, detail: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state is not normalized (norm = {0:.12})")]
    Unnormalized(f64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("unreachable target: {0}")]
    UnreachableTarget(String),

    #[error("validity condition violated: {0}")]
    Validity(String),

    #[error("integrator step size underflow at t = {t:.6} fs (h = {h:.3e} fs, error norm {err:.3e})")]
    StepSize { t: f64, h: f64, err: f64 },

    #[error("failed to parse {path}: {reason}")]
    Parse { path: PathBuf, reason: String },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn out_of_range(what: &'static str, index: usize, bound: usize) -> Self {
        Error::IndexOutOfRange { what, index, bound }
    }
}
