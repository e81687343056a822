use thiserror::Error;

/// Failure modes across the crate.
///
/// The variants carrying the reference driver's numeric codes keep its sign
/// convention: negative fatal, positive warning, zero success. Variants
/// without a reserved code report `-1` generically.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Size, tolerance, or scale parameter unusable (code -2).
    #[error("invalid argument: {reason}")]
    InvalidArgument { reason: String },

    /// |b1 - x| below tolerance, the leading gap is degenerate (code -3).
    #[error("free parameter x too close to b1 (|b1 - x| = {gap})")]
    InvalidFreeParameter { gap: f64 },

    /// |v1| below tolerance, the lead continuant vanished (code -4).
    #[error("leading continuant magnitude {value} below tolerance")]
    DegenerateLeadContinuant { value: f64 },

    /// Consecutive b values too close at a 1-based index (code -16).
    #[error("generator spacing |b{index} - b{prev}| below tolerance", prev = index - 1)]
    SpacingTooClose { index: usize },

    /// |v_i| below tolerance at a 1-based index (code -17).
    #[error("continuant v{index} below tolerance in magnitude")]
    LowContinuant { index: usize },

    /// Non-finite value produced while filling a product table (code -99).
    #[error("non-finite value in {what}")]
    Overflow { what: String },

    /// A closed-form denominator a_{i+1} b_i - a_i b_{i+1} vanished.
    #[error("degenerate single-pair denominator at index {index}")]
    DegenerateDenominator { index: usize },

    /// A pivot-like recursion value vanished (forward or backward sweep).
    #[error("pivot breakdown at index {index} in {sweep} sweep")]
    PivotBreakdown { index: usize, sweep: &'static str },

    /// Two recursion values collided where the construction divides by
    /// their difference.
    #[error("collision in {quantity} at index {index}")]
    Collision { quantity: &'static str, index: usize },

    /// A dense or tridiagonal system turned out singular.
    #[error("singular system: {detail}")]
    Singular { detail: String },

    /// Mismatched grid shapes.
    #[error("shape mismatch: {detail}")]
    ShapeMismatch { detail: String },

    /// Requested polynomial degree above the configured cap.
    #[error("degree {degree} exceeds cap {cap}")]
    CapExceeded { degree: usize, cap: usize },
}

impl Error {
    /// Numeric code following the reference driver's table.
    pub fn code(&self) -> i32 {
        match self {
            Error::InvalidArgument { .. } => -2,
            Error::InvalidFreeParameter { .. } => -3,
            Error::DegenerateLeadContinuant { .. } => -4,
            Error::SpacingTooClose { .. } => -16,
            Error::LowContinuant { .. } => -17,
            Error::Overflow { .. } => -99,
            _ => -1,
        }
    }
}

/// Outcome classification for operations that can succeed with a warning.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// A near-collision |v_i - beta_i v_{i-1}| < tol was observed at the
    /// stored 1-based index; results are produced but flagged unreliable
    /// (code +18).
    WarningUnreliable { index: usize },
    /// Fatal error carrying the numeric code.
    Failed(i32),
}

impl Status {
    pub fn code(&self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::WarningUnreliable { .. } => 18,
            Status::Failed(c) => *c,
        }
    }

    pub fn is_ok(&self) -> bool {
        !matches!(self, Status::Failed(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
