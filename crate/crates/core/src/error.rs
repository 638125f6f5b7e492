use thiserror::Error;

/// Every fallible operation in the crate reports one of these.
///
/// The variants fall into three families that the command-line driver maps
/// onto distinct exit codes: input/configuration problems, negative
/// mathematical verdicts, and internal assertion failures. The last family
/// means an identity that must hold for every valid input did not hold, which
/// signals a bug rather than a data condition.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("series cap mismatch: {left} vs {right}")]
    CapMismatch { left: usize, right: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid symplectic data: {0}")]
    InvalidSymplectic(String),

    #[error("field is not real: mode {mode:?} is not conjugate to its mirror")]
    NotReal { mode: Vec<i64> },

    #[error("tensor entry {idx:?} differs from permuted entry {other:?}")]
    Asymmetric { idx: Vec<usize>, other: Vec<usize> },

    #[error("order {order}: mode {mode:?} of component {idx:?} is not an exact third derivative")]
    NotExactCube {
        order: usize,
        mode: Vec<i64>,
        idx: Vec<usize>,
    },

    #[error("translation phase e^(i m.d) is not a Gaussian rational for d = {0}")]
    NonRepresentablePhase(String),

    #[error("matrix is not in the lattice symplectic group: {0}")]
    NotLatticeSymplectic(String),

    #[error("not of Ricci type: W does not vanish at order {order} (component {idx:?})")]
    NotRicciType { order: usize, idx: Vec<usize> },

    #[error("invalid structure map: {0}")]
    InvalidStructureMap(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal assertion failed: {0}")]
    Internal(String),
}

impl Error {
    pub fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    /// Negative mathematical verdicts, as opposed to malformed input or bugs.
    pub fn is_verdict(&self) -> bool {
        matches!(
            self,
            Error::NotRicciType { .. } | Error::NotExactCube { .. } | Error::InvalidStructureMap(_)
        )
    }

    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
