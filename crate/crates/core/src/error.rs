use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("vector length {len} exceeds the 64-coordinate limit")]
    TooLong { len: usize },

    #[error("not a bitstring: {0:?}")]
    BitString(String),

    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },

    #[error("factor {factor} has {sides} sides; polygons need at least 3")]
    PolygonTooSmall { factor: usize, sides: usize },

    #[error("product of polygons needs at least one factor")]
    NoFactors,

    #[error("factor index {0} out of range")]
    FactorIndex(usize),

    #[error("vertex tuple {0:?} out of range")]
    VertexOutOfRange(Vec<usize>),

    #[error("genus of the {0}-gon surface overflows")]
    GenusOverflow(usize),

    #[error("matrix shape {rows}x{cols} does not fit the polytope (expected {expected_rows}x{expected_cols})")]
    Shape { rows: usize, cols: usize, expected_rows: usize, expected_cols: usize },

    #[error("not a characteristic matrix: vertex minor {vertex:?} is singular")]
    NotCharacteristic { vertex: Vec<usize> },

    #[error("factor {0} is not a square")]
    NotSquareFactor(usize),

    #[error("matching does not pair up every opposite-pair weight")]
    MatchingNotPerfect,

    #[error("regrouped matrix fails the vertex condition at {vertex:?}")]
    RegroupInvalid { vertex: Vec<usize> },

    #[error("not factor-compatible: {0}")]
    NotFactorCompatible(String),

    #[error("half-sum for factor {factor} is not an integer")]
    NonIntegralMultiplicity { factor: usize },

    #[error("invariant formulas disagree for {what}: {left} vs {right}")]
    FormulaDisagreement { what: String, left: i128, right: i128 },

    #[error("Betti vector is not of product-of-curves form: {0}")]
    InconsistentBetti(String),

    #[error("triangularization stalled: {0}")]
    Triangularization(String),

    #[error("block form failed verification: {0}")]
    UnverifiedForm(String),

    #[error("obstruction check contradicted: {0}")]
    ObstructionViolated(String),

    #[error("size guardrail exceeded: {0}")]
    Guardrail(String),

    #[error("malformed instance: {0}")]
    Instance(String),
}
