use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("value {value} is out of range for window {window} (capacity {capacity})")]
    OutOfRange {
        value: String,
        window: usize,
        capacity: String,
    },

    #[error("operands use different windows ({left} vs {right})")]
    WindowMismatch { left: usize, right: usize },

    #[error("digit {digit} is not a valid digit at coordinate {coordinate} (α = {alpha})")]
    InvalidDigit {
        coordinate: usize,
        digit: u64,
        alpha: u64,
    },

    #[error("invalid base rule: {0}")]
    InvalidBase(String),

    #[error("invalid measure family: {0}")]
    InvalidFamily(String),

    #[error("window set is malformed: {0}")]
    InvalidWindowSet(String),

    #[error("window {window} is too small: {needed}")]
    WindowTooSmall { window: usize, needed: String },

    #[error("size limit exceeded: {needed} cells requested, cap is {cap}")]
    SizeLimit { needed: String, cap: u64 },

    #[error("shift {shift} is invalid for a cell space of size {size}")]
    InvalidShift { shift: u64, size: u64 },

    #[error("k = {k} is too small; the construction needs k {bound}")]
    KTooSmall { k: String, bound: String },

    #[error("no admissible index found within horizon {horizon}")]
    HorizonExhausted { horizon: usize },

    #[error("no witness found within the window budget {budget}")]
    NotFound { budget: usize },

    #[error("ε = {eps} is too large; the obstruction argument needs ε < {bound}")]
    EpsilonTooLarge { eps: String, bound: String },

    #[error("declared asymptotics are inconsistent: {0}")]
    InconsistentDeclarations(String),
}
