use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("composite of differentials is nonzero in degree {degree}")]
    CompositionNotZero { degree: i32 },

    #[error("length mismatch: {what} ({left} vs {right})")]
    LengthMismatch { what: &'static str, left: usize, right: usize },

    #[error("graded spaces do not match: {0}")]
    SpaceMismatch(String),

    #[error("window too small: {0}")]
    WindowTooSmall(String),

    #[error("generator `{0}` has degree {1}; simply connected models require degree >= 1")]
    DegreeZeroGenerator(String, i32),

    #[error("unknown generator or basis element `{0}`")]
    UnknownGenerator(String),

    #[error("malformed bracket expression `{0}`")]
    BadBracket(String),

    #[error("element is not in the expected span: {0}")]
    NotInSpan(String),

    #[error("Quillen model is not minimal: {0}")]
    NotMinimal(String),

    #[error("differential does not square to zero: {0}")]
    DifferentialNotSquareZero(String),

    #[error("structure algebra is not bounded; truncate it to finitely many degrees first")]
    UnboundedStructureAlgebra,

    #[error("structure algebra is not nilpotent within {0} steps")]
    NotNilpotent(usize),

    #[error("structure algebra must be connected (no negative degrees, degree 0 cycles only)")]
    NotConnected,

    #[error("twisting element is not Maurer-Cartan; defect: {0}")]
    NotMaurerCartan(String),

    #[error("outer action violates its axioms: {0}")]
    InvalidOuterAction(String),

    #[error("morphism defect: {0}")]
    InvalidMorphism(String),

    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),

    #[error("structure algebra has nonzero brackets; the simplified model needs an abelian one")]
    NonAbelianStructure,

    #[error("model specifications do not match: {0}")]
    SpecMismatch(String),

    #[error("capacity exceeded: {0}")]
    CapacityExceeded(String),

    #[error("invalid dg Lie algebra: {0}")]
    InvalidDgLie(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
