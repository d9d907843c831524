use thiserror::Error;

/// Every failure the library can report. Mathematical failures (a check
/// that does not hold) are distinguished from malformed input so the CLI
/// can map them to different exit codes.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("radical X^{e} - u is reducible over the current tower: {reason}")]
    RadicalReducible { e: u32, reason: String },
    #[error("radical tower deeper than 2 is not supported")]
    TowerTooDeep,
    #[error("the field does not contain a primitive {0}-th root of unity")]
    MissingRoot(u64),
    #[error("no {n}-th root of the given element lies in the field")]
    RootNotInField { n: u32 },
    #[error("scalars belong to different fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole order is zero, no residue to read")]
    PoleTooSmall,
    #[error("pole order overflow during basis conversion: {0}")]
    PoleOverflow(String),
    #[error("truncation too short: {0}")]
    TruncationTooShort(String),
    #[error("Newton polygon outside the supported generic shapes: {0}")]
    DegenerateNewtonPolygon(String),
    #[error("connection is not of generic ramified type: {0}")]
    NotGenericRamified(String),
    #[error("the w-linear coefficient c1 of the exponent vanishes")]
    C1Zero,
    #[error("pi restricted to W is not an isomorphism: {0}")]
    NotIso(String),
    #[error("no connection is compatible with the given local data")]
    EmptySolutionSet,
    #[error("verdict cannot be decided by the implemented branches: {0}")]
    Inconclusive(String),
    #[error("degree window too small, dimensions did not stabilise: {0}")]
    BoundTooSmall(String),
    #[error("cocycles belong to different connections")]
    ChartMismatch,
    #[error("degenerate family parameters: {0}")]
    DegenerateParameters(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// True when the error describes malformed input rather than a
    /// mathematical outcome.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Invalid(_) | Error::FieldMismatch | Error::TowerTooDeep | Error::Unsupported(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
