//! Counters, their metrics and the architecture libraries built from them.

mod couples;
mod gpc;
mod library_file;
mod metrics;
mod profile;

use thiserror::Error;

pub use couples::{compose_couples, Atom, SLICE_LES};
pub use gpc::{Gpc, GpcKind};
pub use library_file::{library_to_string, load_library, parse_library, save_library};
pub use metrics::{metrics, round_half_up, slack, GpcMetrics, MetricsRow};
pub use profile::{
    builtin_library, builtin_profile, final_adder, final_adder_cost, AdderSpan, ArchProfile, FinalRule,
    Overhead, ProfileKind, RuleViolation,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GpcError {
    #[error("{0}: a counter needs at least one input and one output bit")]
    Empty(String),
    #[error("{name}: {reason}")]
    Shape { name: String, reason: String },
    #[error("{0}: arithmetic slack negative (outputs cannot represent the largest input sum)")]
    NegativeSlack(String),
    #[error("malformed counter name {0:?}, expected C<inputs>:<outputs>")]
    Name(String),
    #[error("{gpc} has no cost under profile {profile}")]
    ProfileMismatch { gpc: String, profile: String },
    #[error("couple composition: {0}")]
    Couple(String),
    #[error("unknown profile {0:?}")]
    UnknownProfile(String),
    #[error("unknown final rule {0:?}, expected ragged-cpa or ternary")]
    UnknownRule(String),
    #[error("{0} is listed twice")]
    Duplicate(String),
    #[error("profile {profile} lacks the required counter {gpc}")]
    MissingRequired { profile: String, gpc: &'static str },
    #[error("{0}")]
    Profile(String),
    #[error("library file line {line}, column {column}: {message}")]
    LibrarySyntax { line: usize, column: usize, message: String },
    #[error("library file gpcs[{index}].{field}: {message}")]
    LibraryField { index: usize, field: &'static str, message: String },
    #[error("{0}")]
    Io(String),
}
