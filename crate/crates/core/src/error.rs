use num_complex::Complex64;

/// Errors raised across the toolkit.
///
/// `is_validation` separates bad input (CLI exit code 2) from numeric
/// failures such as an infeasible packing or a vanishing `T̂(a)` (exit code 3).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("annulus undefined at base point")]
    AnnulusAtBase,
    #[error("invalid parameter `{field}`: {rule}")]
    InvalidParameter { field: String, rule: String },
    #[error("infeasible packing in annulus {annulus}: {reason}")]
    InfeasiblePacking { annulus: u32, reason: String },
    #[error("point {0} is not in U")]
    NotInDomain(Complex64),
    #[error("measure has mass on the diagonal (atom {index})")]
    DiagonalMass { index: usize },
    #[error("evaluation point collides with atom {index}")]
    AtomCollision { index: usize },
    #[error("pole hit at {0}")]
    PoleHit(Complex64),
    #[error("derivation tail bound diverges")]
    DivergentTail,
    #[error("evaluation functional undefined here: T\u{302}(a) = 0 at {0}")]
    EvaluationUndefined(Complex64),
    #[error("functional does not normalize: L(mu)(z - b) = 0")]
    DegenerateNormalization,
    #[error("linear program: {0}")]
    Lp(String),
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("malformed input: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn invalid(field: impl Into<String>, rule: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            rule: rule.into(),
        }
    }

    /// True for input/configuration problems, false for numeric failures.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::UnknownScenario(_)
                | Error::Format(_)
                | Error::AnnulusAtBase
                | Error::DiagonalMass { .. }
                | Error::NotInDomain(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
