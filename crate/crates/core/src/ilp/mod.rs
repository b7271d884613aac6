//! The compressor tree integer program and its file formats.

mod lp_format;
mod model;
mod solution_file;

use thiserror::Error;

pub use lp_format::{decimal, to_lp_file};
pub use model::{
    column_count, Coef, Constraint, IlpModel, ModelViolation, ObjectiveMode, Sense, Slot, VarKind, Variable,
    ADDER_WEIGHT,
};
pub use solution_file::{assignment, parse_solution, SolutionFile, SolveStatus};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IlpError {
    #[error("solution file line {line}: {reason}")]
    SolutionFile { line: usize, reason: String },
    #[error("solution names unknown variable {0}")]
    UnknownVariable(String),
    #[error("solution value {name} = {value} is not integral")]
    Fractional { name: String, value: f64 },
}
