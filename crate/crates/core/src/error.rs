use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("cannot parse rational from {0:?}")]
    ParseRational(String),

    #[error("{points} breakpoints but {values} values")]
    LengthMismatch { points: usize, values: usize },

    #[error("breakpoints must be strictly increasing from 0 to 1")]
    NotSorted,

    #[error("value at 0 ({at_zero}) differs from value at 1 ({at_one})")]
    PeriodicityViolated { at_zero: Rational, at_one: Rational },

    #[error("piece endpoint disagrees with the stored limit at {point}")]
    InconsistentLimits { point: Rational },

    #[error("{function}: parameters violate {constraint}")]
    ParamOutOfRange {
        function: String,
        constraint: String,
    },

    #[error("epsilon sequence has (1-f) + sum 2^(i-1) eps_i = {measure} > 1")]
    SeriesDiverges { measure: Rational },

    #[error("depth {0} exceeds the maximum of {max}", max = crate::compendium::MAX_DEPTH)]
    DepthTooLarge(usize),

    #[error("{function}: missing parameter {name}")]
    MissingParameter { function: String, name: String },

    #[error("{function}: bad value {value:?} for parameter {name}")]
    BadParameter {
        function: String,
        name: String,
        value: String,
    },

    #[error("unknown function {0:?}")]
    UnknownFunction(String),

    #[error("{name} is not constructible here; see {citation}")]
    NotImplemented { name: String, citation: String },

    #[error("vertex ({x}, {y}) is not a vertex of the face")]
    VertexNotInFace { x: Rational, y: Rational },

    #[error("no breakpoint with value 1, cannot determine f")]
    NoCandidateF,

    #[error("function is not minimal: {0}")]
    NotMinimal(String),

    #[error("no valid epsilon found after {0} halvings")]
    NoValidEpsilon(usize),

    #[error("function is discontinuous at {0}")]
    NotContinuous(Rational),

    #[error("grid 1/{n} does not contain all breakpoints and f")]
    GridTooCoarse { n: u64 },

    #[error("restricted function is not minimal for the finite group problem: {0}")]
    NotMinimalFinite(String),

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}
