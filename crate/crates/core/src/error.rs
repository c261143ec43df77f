use thiserror::Error;

/// Errors raised across the filter, the generators and the railway toolkit.
#[derive(Debug, Error)]
pub enum VkfError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("length mismatch: {what} has {got} samples, expected {expected}")]
    LengthMismatch {
        what: String,
        expected: usize,
        got: usize,
    },

    #[error("non-finite value in {what} at index {index}")]
    NonFinite { what: String, index: usize },

    #[error(
        "aliasing: {what} reaches {freq} Hz at sample {index} (t = {time} s), \
         Nyquist limit is {nyquist} Hz"
    )]
    Aliasing {
        what: String,
        freq: f64,
        index: usize,
        time: f64,
        nyquist: f64,
    },

    #[error("unsupported difference order {0}, expected 1, 2 or 3")]
    UnsupportedOrder(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("system with {unknowns} unknowns needs {needed} bytes, budget is {budget} bytes")]
    MemoryBudget {
        unknowns: usize,
        needed: usize,
        budget: usize,
    },

    #[error(
        "factorization failed at row {row} (sample {sample:?}, order {order:?}): \
         pivot {pivot:e} is not safely positive"
    )]
    Factorization {
        row: usize,
        pivot: f64,
        sample: Option<usize>,
        order: Option<usize>,
    },

    #[error(
        "order {order} has an envelope component that is invisible in the data and \
         unpenalized by the smoothness term (Gram pivot {pivot:e}); check for a zero \
         or duplicated frequency track"
    )]
    Unobservable { order: usize, pivot: f64 },

    #[error(
        "solver did not reach tolerance {tolerance:e}: backward error {backward_error:e} \
         after {iterations} iterations"
    )]
    NotConverged {
        tolerance: f64,
        backward_error: f64,
        iterations: usize,
    },

    #[error("bin {index}: {source}")]
    Bin {
        index: usize,
        #[source]
        source: Box<VkfError>,
    },

    #[error("degenerate regression input: {0}")]
    DegenerateFit(String),

    #[error("no positional coverage: {0}")]
    NoCoverage(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl VkfError {
    /// True for failures of the numerical core rather than bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            VkfError::Factorization { .. }
            | VkfError::NotConverged { .. }
            | VkfError::Unobservable { .. }
            | VkfError::DegenerateFit(_) => true,
            VkfError::Bin { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, VkfError>;

pub(crate) fn check_finite(what: &str, values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(VkfError::NonFinite {
            what: what.to_string(),
            index,
        }),
        None => Ok(()),
    }
}

pub(crate) fn check_len(what: &str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(VkfError::LengthMismatch {
            what: what.to_string(),
            expected,
            got,
        });
    }
    Ok(())
}
