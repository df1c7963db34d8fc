use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("element is not a unit modulo the prime")]
    NonUnit,
    #[error("value is not a square modulo p")]
    NotASquare,
    #[error("branch does not square to the target modulo p")]
    BadBranch,
    #[error("nested commutator needs at least two entries")]
    TooShort,
    #[error("element order exceeds p^{cap}")]
    CapExceeded { cap: u32 },
    #[error("enumeration bound of {bound} elements exceeded")]
    TooLarge { bound: usize },
    #[error("no element of the requested level after {retries} retries")]
    SamplingFailed { retries: u32 },
    #[error("quaternion does not have norm one")]
    NotNormOne,
    #[error("element lies below the required filtration level {required}")]
    LevelTooLow { required: u64 },
    #[error("platform {family} does not support class {n}")]
    ClassUnsupported { family: &'static str, n: usize },
    #[error("no non-degenerate generators found after {retries} retries")]
    DegenerateGenerators { retries: u32 },
    #[error("share g_{i}^a_{j} is missing from the transcript")]
    MissingShare { i: usize, j: usize },
    #[error("a key subset needs at least two users")]
    SubsetTooSmall,
    #[error("target is not in the subgroup generated by the base")]
    NotInSubgroup,
    #[error("estimated work of {estimate} operations exceeds budget {budget}")]
    BudgetExceeded { estimate: u128, budget: u128 },
    #[error("no generator has a unit coordinate")]
    NoUnitCoordinate,
    #[error("commutator coordinates expose fewer than {alpha} digits")]
    InsufficientPrecision { alpha: u32 },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("malformed element encoding: {0}")]
    Decode(String),
}

impl Error {
    /// Stable variant name, for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonUnit => "NonUnit",
            Error::NotASquare => "NotASquare",
            Error::BadBranch => "BadBranch",
            Error::TooShort => "TooShort",
            Error::CapExceeded { .. } => "CapExceeded",
            Error::TooLarge { .. } => "TooLarge",
            Error::SamplingFailed { .. } => "SamplingFailed",
            Error::NotNormOne => "NotNormOne",
            Error::LevelTooLow { .. } => "LevelTooLow",
            Error::ClassUnsupported { .. } => "ClassUnsupported",
            Error::DegenerateGenerators { .. } => "DegenerateGenerators",
            Error::MissingShare { .. } => "MissingShare",
            Error::SubsetTooSmall => "SubsetTooSmall",
            Error::NotInSubgroup => "NotInSubgroup",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::NoUnitCoordinate => "NoUnitCoordinate",
            Error::InsufficientPrecision { .. } => "InsufficientPrecision",
            Error::InvalidParameters(_) => "InvalidParameters",
            Error::Decode(_) => "Decode",
        }
    }
}
