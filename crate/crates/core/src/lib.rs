//! Exact-arithmetic tools for cut-generating functions of the one-dimensional
//! Gomory–Johnson infinite group problem: construction of known extreme
//! functions, minimality and extremality testing with perturbation witnesses,
//! and an independent finite-group oracle.

pub mod compendium;
pub mod complex;
pub mod error;
pub mod extremality;
pub mod linalg;
pub mod minimality;
pub mod oracle;
pub mod pwl;
pub mod rational;
mod scan;

pub use complex::{build_complex, delta_pi, delta_pi_limit, projections, Cell1D, DeltaComplex, Face};
pub use error::Error;
pub use extremality::{extremality_test, ExtremalityVerdict, Perturbation, Status};
pub use oracle::{oracle_check, OracleReport, OracleVerdict};
pub use minimality::{detect_f, is_subadditive, is_symmetric, minimality_test, MinimalityReport};
pub use pwl::{BreakpointDatum, PwlPeriodic, Side};
pub use rational::Rational;
