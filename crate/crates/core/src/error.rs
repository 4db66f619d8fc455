use std::fmt;

/// Errors raised by validation, solvers and file parsing.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("NotSquare: row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("EmptySpace: a space needs at least one point")]
    EmptySpace,
    #[error("NonzeroDiagonal: d({i},{i}) = {value}")]
    NonzeroDiagonal { i: usize, value: f64 },
    #[error("NegativeDistance: d({i},{j}) = {value}")]
    NegativeDistance { i: usize, j: usize, value: f64 },
    #[error("NonFiniteDistance: d({i},{j}) = {value}")]
    NonFiniteDistance { i: usize, j: usize, value: f64 },
    #[error("AsymmetricMatrix: d({i},{j}) = {a} but d({j},{i}) = {b}")]
    AsymmetricMatrix { i: usize, j: usize, a: f64, b: f64 },
    #[error("ZeroOffDiagonal: d({i},{j}) = 0 for distinct points")]
    ZeroOffDiagonal { i: usize, j: usize },
    #[error("TriangleViolation({i},{j},{k}): d({i},{j}) > d({i},{k}) + d({k},{j})")]
    TriangleViolation { i: usize, j: usize, k: usize },
    #[error("InvalidMeasure: {0}")]
    InvalidMeasure(String),
    #[error("InvalidPartition: {0}")]
    InvalidPartition(String),
    #[error("InvalidSubset: {0}")]
    InvalidSubset(String),
    #[error("InvalidCorrespondence: {0}")]
    InvalidCorrespondence(String),
    #[error("InvalidCoupling: {0}")]
    InvalidCoupling(String),
    #[error("InfeasibleMarginals: {0}")]
    InfeasibleMarginals(String),
    #[error("InvalidParameter: {0}")]
    InvalidParameter(String),
    #[error("BudgetExceeded: {0}")]
    BudgetExceeded(String),
    #[error("SolverTolerance: KKT residual {residual:e} exceeds {limit:e}")]
    SolverTolerance { residual: f64, limit: f64 },
    #[error("SolverFailure: {0}")]
    SolverFailure(String),
    #[error("DegenerateOutput: blocks {i} and {j} are at distance zero")]
    DegenerateOutput { i: usize, j: usize },
    #[error("EmptyBlock: center {0} captures no point")]
    EmptyBlock(usize),
    #[error("MeasureRequired: {0}")]
    MeasureRequired(String),
    #[error("ParseError at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("FlagConflict: {0}")]
    FlagConflict(String),
    #[error("IoError: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short variant name, as printed by the command-line tools.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NotSquare { .. } => "NotSquare",
            Error::EmptySpace => "EmptySpace",
            Error::NonzeroDiagonal { .. } => "NonzeroDiagonal",
            Error::NegativeDistance { .. } => "NegativeDistance",
            Error::NonFiniteDistance { .. } => "NonFiniteDistance",
            Error::AsymmetricMatrix { .. } => "AsymmetricMatrix",
            Error::ZeroOffDiagonal { .. } => "ZeroOffDiagonal",
            Error::TriangleViolation { .. } => "TriangleViolation",
            Error::InvalidMeasure(_) => "InvalidMeasure",
            Error::InvalidPartition(_) => "InvalidPartition",
            Error::InvalidSubset(_) => "InvalidSubset",
            Error::InvalidCorrespondence(_) => "InvalidCorrespondence",
            Error::InvalidCoupling(_) => "InvalidCoupling",
            Error::InfeasibleMarginals(_) => "InfeasibleMarginals",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::BudgetExceeded(_) => "BudgetExceeded",
            Error::SolverTolerance { .. } => "SolverTolerance",
            Error::SolverFailure(_) => "SolverFailure",
            Error::DegenerateOutput { .. } => "DegenerateOutput",
            Error::EmptyBlock(_) => "EmptyBlock",
            Error::MeasureRequired(_) => "MeasureRequired",
            Error::Parse { .. } => "ParseError",
            Error::FlagConflict(_) => "FlagConflict",
            Error::Io(_) => "IoError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Whether a computation finished or stopped at its work budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Exact,
    BudgetExceeded,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Exact => f.write_str("OK"),
            Status::BudgetExceeded => f.write_str("BudgetExceeded"),
        }
    }
}
