use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |m[i][j] - conj(m[j][i])| = {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    #[error("matrix does not have unit trace: Tr = {trace} (|Tr - 1| = {deviation:.3e})")]
    NotUnitTrace { trace: f64, deviation: f64 },

    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:.3e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("expected a {expected}x{expected} matrix, got {actual}x{actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("{len} entries cannot form a {dim}x{dim} matrix")]
    EntryCount { dim: usize, len: usize },

    #[error("parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("{}", annihilation_message(*link, *probability))]
    FilterAnnihilatesState {
        /// Zero-based link index when the failure happened inside a network.
        link: Option<usize>,
        probability: f64,
    },

    #[error("expected {expected} {what}, got {actual}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("Born-rule oracle supports at most 3 sources, got n = {0}")]
    DimensionTooLarge(usize),

    #[error("Kraus operators are not trace preserving: max |sum K^dag K - I| = {0:.3e}")]
    NotTracePreserving(f64),

    #[error("no crossing in [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi} have the same sign")]
    NoCrossing {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
}

fn annihilation_message(link: Option<usize>, probability: f64) -> String {
    match link {
        Some(j) => format!(
            "filters annihilate link {j}: post-selection success probability {probability:.3e}"
        ),
        None => format!("filter annihilates the state: success probability {probability:.3e}"),
    }
}

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }
}

/// Checks `lo <= value <= hi` (NaN rejected).
pub(crate) fn check_range(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<f64> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(value)
    } else {
        Err(Error::param(name, value, "out of range"))
    }
}
