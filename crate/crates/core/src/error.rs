use alloc::string::String;
use core::fmt;

/// Errors surfaced by workbench operations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two shapes that must agree do not.
    ShapeMismatch { expected: String, found: String },
    /// A register label appears twice when building a composite shape.
    LabelCollision(String),
    /// A label was requested that the shape does not contain.
    UnknownLabel(String),
    /// An operation would build a register larger than the configured cap.
    DimCapExceeded { dim: usize, cap: usize },
    /// A matrix that must be Hermitian is not, within tolerance.
    NotHermitian { deviation: f64 },
    /// A matrix that must be positive semidefinite has a negative eigenvalue.
    NotPsd { min_eigenvalue: f64 },
    /// A matrix that must be unitary is not, within tolerance.
    NotUnitary { deviation: f64 },
    /// A state vector or density matrix is not normalized.
    NotNormalized { deviation: f64 },
    /// A pure-state-only operation received a mixed state.
    MixedState { purity: f64 },
    /// Paired inputs have inconsistent lengths.
    LengthMismatch { left: usize, right: usize },
    /// A stochastic adversary drew more copies than its budget allows.
    CopyBudgetExceeded { budget: usize, requested: usize },
    /// A money scheme offered to `owsg_from_symmetric_money` fails the
    /// symmetry requirement on some key pair.
    SymmetryViolation { key_a: usize, key_b: usize, delta: f64 },
    /// A forger queried the signing oracle more times than the game allows.
    QueryBudgetExceeded { budget: usize },
    /// A commitment was not built by `commitment_from_svsi`, so the binding
    /// attack cannot be replayed against the underlying family.
    ProvenanceMissing,
    /// Catch-all for malformed arguments; the message names the offender.
    InvalidArgument(String),
    /// A text fixture could not be parsed.
    ParseError(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ShapeMismatch { expected, found } => {
                write!(f, "shape mismatch: expected {expected}, found {found}")
            }
            Error::LabelCollision(label) => write!(f, "duplicate register label {label:?}"),
            Error::UnknownLabel(label) => write!(f, "unknown register label {label:?}"),
            Error::DimCapExceeded { dim, cap } => {
                write!(f, "total dimension {dim} exceeds cap {cap}")
            }
            Error::NotHermitian { deviation } => {
                write!(f, "matrix is not Hermitian (max deviation {deviation:.3e})")
            }
            Error::NotPsd { min_eigenvalue } => {
                write!(f, "matrix is not PSD (min eigenvalue {min_eigenvalue:.3e})")
            }
            Error::NotUnitary { deviation } => {
                write!(f, "matrix is not unitary (max deviation {deviation:.3e})")
            }
            Error::NotNormalized { deviation } => {
                write!(f, "state is not normalized (deviation {deviation:.3e})")
            }
            Error::MixedState { purity } => {
                write!(f, "expected a pure state, got purity {purity:.6}")
            }
            Error::LengthMismatch { left, right } => {
                write!(f, "length mismatch: {left} vs {right}")
            }
            Error::CopyBudgetExceeded { budget, requested } => {
                write!(f, "copy budget {budget} exceeded by request for {requested}")
            }
            Error::SymmetryViolation { key_a, key_b, delta } => write!(
                f,
                "verification is not symmetric on keys ({key_a},{key_b}): |delta| = {delta:.3e}"
            ),
            Error::QueryBudgetExceeded { budget } => {
                write!(f, "signing-oracle query budget {budget} exceeded")
            }
            Error::ProvenanceMissing => {
                write!(f, "commitment lacks the family it was constructed from")
            }
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::ParseError(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
