use thiserror::Error;

use crate::tables::{AggregationCut, ValidationReport};

/// Errors raised by table construction and the transformation engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid table: {0}")]
    InvalidTable(ValidationReport),

    #[error("invalid margins: {0}")]
    InvalidMargins(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: String, found: String },

    #[error("cut ({i},{j}) out of bounds for a {rows}x{cols} table")]
    CutOutOfBounds {
        i: usize,
        j: usize,
        rows: usize,
        cols: usize,
    },

    #[error("odds-ratio undefined: cell ({row},{col}) is zero")]
    ZeroCell { row: usize, col: usize },

    #[error("negative association: H,H cell {hh} is below int(R) = {expected_hh}")]
    NegativeAssociation { hh: f64, expected_hh: u64 },

    #[error("degenerate margins: min(H row, H col) = {min_margin} does not exceed int(R) = {expected_hh}")]
    DegenerateMargin { min_margin: f64, expected_hh: u64 },

    #[error("at cut ({}, {}): {source}", cut.i, cut.j)]
    AtCut {
        cut: AggregationCut,
        #[source]
        source: Box<Error>,
    },

    #[error("inputs must sum to 1 (got {sum}); enable normalization")]
    NotNormalized { sum: f64 },

    #[error("support violation: p > 0 but q = 0 at cell ({row},{col})")]
    SupportViolation { row: usize, col: usize },

    #[error("structural zero: {axis} {index} has target {target} but no positive seed cell")]
    StructuralZero {
        axis: Axis,
        index: usize,
        target: f64,
    },

    #[error("{axis} {index} has a zero target but positive seed cells")]
    ZeroTargetPositiveSeed { axis: Axis, index: usize },

    #[error(
        "infeasible targets: reconstructed cell ({row},{col}) = {value} from tail sums \
         [{}, {}, {}, {}]",
        tails[0], tails[1], tails[2], tails[3]
    )]
    InfeasibleTarget {
        row: usize,
        col: usize,
        value: f64,
        tails: [f64; 4],
    },

    #[error("IPF did not converge in {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("table is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("division by zero: {0}")]
    ZeroDenominator(String),

    #[error("probability {0} outside (0, 1)")]
    InvalidProbability(f64),

    #[error("invalid counts: x = {x}, n = {n}")]
    InvalidCounts { x: u64, n: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("margins must be integers, got {0}")]
    NonInteger(f64),

    #[error("enumeration would produce {count} tables, above the cap of {cap}")]
    EnumerationCap { count: u64, cap: u64 },

    #[error("counterfactual {leg} failed: {source}")]
    Counterfactual {
        leg: String,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: u64,
        column: usize,
        message: String,
    },
}

/// Row or column direction, used in diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Row,
    Column,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Axis::Row => f.write_str("row"),
            Axis::Column => f.write_str("column"),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn at_cut(self, cut: AggregationCut) -> Self {
        Error::AtCut {
            cut,
            source: Box::new(self),
        }
    }
}
