use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid angle: {0}")]
    InvalidAngle(String),
    #[error("could not parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },
    #[error("degenerate arc: start and end coincide at {0}")]
    DegenerateArc(String),
    #[error("degenerate chord: both endpoints are {0}")]
    DegenerateChord(String),
    #[error("unsupported degree {0}: only 2 and 3 are handled")]
    UnsupportedDegree(u32),
    #[error("no hole of period <= {max_period} contains {angle}")]
    NotFound { angle: String, max_period: usize },
    #[error("wrong gap type: expected {expected}, found {found}")]
    WrongType { expected: &'static str, found: String },
    #[error("{0} is not a vertex of the gap at the computed depth")]
    NotAVertex(String),
    #[error("the given angles are not a single periodic orbit")]
    NotAnOrbit,
    #[error("bound exceeded: {what} = {value} > {limit}")]
    BoundExceeded {
        what: &'static str,
        value: usize,
        limit: usize,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("root refinement did not converge (residual {residual:e})")]
    IllConditioned { residual: f64 },
    #[error("point does not escape within the iteration budget")]
    NotEscaping,
    #[error("numerical stall: {0}")]
    NumericalStall(String),
    #[error("escaping critical point is undetermined")]
    Undetermined,
}

pub type Result<T> = std::result::Result<T, Error>;
