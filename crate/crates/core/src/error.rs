use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("basis element `{name}` has weight {weight}, outside [1, {max}]")]
    WeightOutOfRange { name: String, weight: u32, max: u32 },
    #[error("duplicate basis name `{0}`")]
    DuplicateBasisName(String),
    #[error("filtration length must be positive")]
    EmptyFiltration,
    #[error("unknown basis element `{name}` in space `{space}`")]
    UnknownBasis { space: String, name: String },
    #[error("space mismatch: expected `{expected}`, found `{found}`")]
    SpaceMismatch { expected: String, found: String },
    #[error("arity mismatch: expected {expected} arguments, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("graded symmetry violated: {0}")]
    SymmetryViolation(String),
    #[error("operator is not filtered: {0}")]
    NotFiltered(String),
    #[error("structure equation fails: {0}")]
    StructureInvalid(String),
    #[error("structure is not pro-nilpotent (s-filtration degree {0})")]
    NotPronilpotent(String),
    #[error("perturbed differential does not square to zero")]
    NotSquareZero,
    #[error("perturbation does not strictly raise filtration weight")]
    NotPositiveFiltration,
    #[error("invalid context: {0}")]
    InvalidContext(String),
    #[error("fixed-point iteration did not stabilize at arity {arity} within {bound} steps")]
    NoStabilization { arity: usize, bound: usize },
    #[error("not a Maurer-Cartan element: residual {0}")]
    NotMC(String),
    #[error("element is not in the Kuranishi set: h(y) = {0}")]
    NotInKuranishiSet(String),
    #[error("not an L-infinity morphism: residual {0}")]
    NotAMorphism(String),
    #[error("Maurer-Cartan unknowns are not one-dimensional (dimension {0})")]
    NotOneDimensional(usize),
    #[error("gauge oracle produced a non-MC element: residual {0}")]
    OracleMismatch(String),
    #[error("structure is curved; a flat structure is required")]
    NotFlat,
    #[error("structure is not DGLA-derived: {0}")]
    NotDgla(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Input errors map to exit code 2, mathematical defects to exit code 1.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Parse(_))
    }

    /// Stable variant name, used in reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::WeightOutOfRange { .. } => "WeightOutOfRange",
            Error::DuplicateBasisName(_) => "DuplicateBasisName",
            Error::EmptyFiltration => "EmptyFiltration",
            Error::UnknownBasis { .. } => "UnknownBasis",
            Error::SpaceMismatch { .. } => "SpaceMismatch",
            Error::ArityMismatch { .. } => "ArityMismatch",
            Error::DegreeMismatch(_) => "DegreeMismatch",
            Error::SymmetryViolation(_) => "SymmetryViolation",
            Error::NotFiltered(_) => "NotFiltered",
            Error::StructureInvalid(_) => "StructureInvalid",
            Error::NotPronilpotent(_) => "NotPronilpotent",
            Error::NotSquareZero => "NotSquareZero",
            Error::NotPositiveFiltration => "NotPositiveFiltration",
            Error::InvalidContext(_) => "InvalidContext",
            Error::NoStabilization { .. } => "NoStabilization",
            Error::NotMC(_) => "NotMC",
            Error::NotInKuranishiSet(_) => "NotInKuranishiSet",
            Error::NotAMorphism(_) => "NotAMorphism",
            Error::NotOneDimensional(_) => "NotOneDimensional",
            Error::OracleMismatch(_) => "OracleMismatch",
            Error::NotFlat => "NotFlat",
            Error::NotDgla(_) => "NotDgla",
            Error::Internal(_) => "Internal",
            Error::Parse(_) => "Parse",
        }
    }
}
