use num_bigint::BigInt;

/// Unified error type for the whole analysis pipeline.
///
/// The CLI maps these onto its exit-code contract: input rejections
/// (bad grammar, singular matrices, non-positive weights, ill-formed
/// ambient spaces, unknown ids) exit 2, resource caps exit 3, and
/// anything else exits 1.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("parse error at offset {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("not a Delsarte polynomial: {0}")]
    NotDelsarte(String),

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("weight a_{index} = {value} is not positive")]
    NonPositiveWeight { index: usize, value: BigInt },

    #[error("surface is not well-formed: {}", .0.join("; "))]
    NotWellFormed(Vec<String>),

    #[error("enumeration cap exceeded: group has order {order}, cap is {cap}")]
    CapExceeded { order: BigInt, cap: BigInt },

    #[error("oracle bound exceeded: d = {d} > {bound}")]
    OracleBoundExceeded { d: BigInt, bound: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown example id: {0:?}")]
    UnknownExample(String),

    #[error("polytope is not full-dimensional")]
    DegeneratePolytope,

    #[error(
        "hollow polytope with nonempty Fine interior has {vertices} vertices; \
         only simplices are classified"
    )]
    NotSimplex { vertices: usize },

    #[error("unsupported input: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
