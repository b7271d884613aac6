//! Exact, external and heuristic synthesis plus the stage-budget manager.

pub mod builtin;
mod external;
mod heuristic;
mod solution;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::benchgen::Benchmark;
use crate::gpclib::ArchProfile;
use crate::ilp::{Coef, IlpError, IlpModel, ObjectiveMode, SolveStatus};

pub use external::{solve_external, SOLVER_CMD_ENV, TIME_BUDGET_ENV};
pub use heuristic::{heuristic_synthesize, Metric};
pub use solution::{CostBreakdown, Placement, Solution};

/// Default per-stage-budget time limit.
pub const DEFAULT_TIME_BUDGET: Duration = Duration::from_secs(300);
/// Largest heap, in bits, the built-in solver takes on by default.
pub const DEFAULT_BUILTIN_MAX_BITS: u32 = 64;
/// Default upper limit of the stage sweep.
pub const DEFAULT_STAGES_MAX: usize = 8;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("no feasible tree with at most {0} stages")]
    Infeasible(usize),
    #[error("time budget exhausted at {stages} stages without a feasible tree")]
    Timeout { stages: usize },
    #[error("heap holds {bits} bits, the built-in solver is limited to {limit}; raise the limit or use an external solver")]
    TooLarge { bits: u32, limit: u32 },
    #[error("{0}")]
    Config(String),
    #[error("external solver: {0}")]
    External(String),
    #[error(transparent)]
    Ilp(#[from] IlpError),
    #[error("internal error: {0}")]
    Internal(String),
}

impl SolveError {
    pub(crate) fn internal(e: impl fmt::Display) -> Self {
        SolveError::Internal(e.to_string())
    }
}

/// Which engine answers a synthesis request.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolverChoice {
    Builtin,
    External(String),
    Heuristic(Metric),
}

impl fmt::Display for SolverChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverChoice::Builtin => f.write_str("builtin"),
            SolverChoice::External(cmd) => write!(f, "external:{cmd}"),
            SolverChoice::Heuristic(m) => write!(f, "heuristic:{m}"),
        }
    }
}

impl FromStr for SolverChoice {
    type Err = SolveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "builtin" {
            Ok(SolverChoice::Builtin)
        } else if let Some(cmd) = s.strip_prefix("external:") {
            if cmd.trim().is_empty() {
                return Err(SolveError::Config("external solver command is empty".into()));
            }
            Ok(SolverChoice::External(cmd.to_string()))
        } else if s == "heuristic" {
            Ok(SolverChoice::Heuristic(Metric::Efficiency))
        } else if let Some(m) = s.strip_prefix("heuristic:") {
            Ok(SolverChoice::Heuristic(m.parse().map_err(SolveError::Config)?))
        } else {
            Err(SolveError::Config(format!(
                "unknown solver {s:?}, expected builtin, external:<command> or heuristic[:<metric>]"
            )))
        }
    }
}

#[derive(Clone, Debug)]
pub struct SynthOptions {
    pub solver: SolverChoice,
    pub stages_max: usize,
    pub time_budget: Duration,
    pub objective: ObjectiveMode,
    pub builtin_max_bits: u32,
}

impl Default for SynthOptions {
    fn default() -> Self {
        Self {
            solver: SolverChoice::Builtin,
            stages_max: DEFAULT_STAGES_MAX,
            time_budget: DEFAULT_TIME_BUDGET,
            objective: ObjectiveMode::Total,
            builtin_max_bits: DEFAULT_BUILTIN_MAX_BITS,
        }
    }
}

/// Result of one model solve.
#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub values: Option<Vec<i64>>,
    pub objective: Option<Coef>,
    pub wall: Duration,
}

/// Solves `model` with the built-in search. A supplied incumbent must be a
/// feasible assignment of the same model.
pub fn solve_builtin(model: &IlpModel, time_budget: Duration, incumbent: Option<&[i64]>) -> SolveOutcome {
    let start = Instant::now();
    let seed = incumbent.map(|v| model.placements(v));
    let result = builtin::solve(model, time_budget, seed.as_ref());
    let values = result.counts.and_then(|c| model.complete(&c));
    let values = values.filter(|v| model.check(v).is_ok());
    let status = match (result.outcome, values.is_some()) {
        (builtin::Outcome::Optimal, true) => SolveStatus::Optimal,
        (builtin::Outcome::Optimal, false) => SolveStatus::Infeasible,
        (builtin::Outcome::TimedOut, true) => SolveStatus::Feasible,
        (builtin::Outcome::TimedOut, false) => SolveStatus::Unknown,
    };
    SolveOutcome {
        status,
        objective: values.as_ref().map(|v| model.objective_value(v)),
        values,
        wall: start.elapsed(),
    }
}

/// A synthesized tree and how it was obtained.
#[derive(Clone, Debug)]
pub struct SynthResult {
    pub solution: Solution,
    pub status: SolveStatus,
    pub solver: String,
    pub objective: Option<Coef>,
    pub wall: Duration,
}

/// Sweeps the stage budget upward from zero. The first budget with a
/// feasible tree is kept and its cost minimised, so trees with fewer stages
/// always win over cheaper trees with more.
pub fn synthesize(benchmark: &Benchmark, profile: &ArchProfile, opts: &SynthOptions) -> Result<SynthResult, SolveError> {
    let start = Instant::now();
    if let SolverChoice::Heuristic(metric) = opts.solver {
        let solution = heuristic_synthesize(benchmark, profile, metric)?;
        return Ok(SynthResult {
            solution,
            status: SolveStatus::Feasible,
            solver: opts.solver.to_string(),
            objective: None,
            wall: start.elapsed(),
        });
    }
    let bits = benchmark.heap().total_bits();
    if opts.solver == SolverChoice::Builtin && bits > opts.builtin_max_bits {
        return Err(SolveError::TooLarge {
            bits,
            limit: opts.builtin_max_bits,
        });
    }
    let fallbacks: Vec<Solution> = Metric::ALL
        .iter()
        .filter_map(|&m| heuristic_synthesize(benchmark, profile, m).ok())
        .collect();
    let mut proven = true;
    for stages in 0..=opts.stages_max {
        let model = IlpModel::build(benchmark, profile, stages, opts.objective);
        let incumbent = fallbacks
            .iter()
            .filter(|h| h.stage_count <= stages)
            .filter_map(|h| h.padded_to(benchmark, profile, stages).ok())
            .filter_map(|h| h.slots(&model))
            .filter_map(|counts| model.complete(&counts))
            .filter(|v| model.check(v).is_ok())
            .min_by_key(|v| model.objective_value(v));
        let outcome = match &opts.solver {
            SolverChoice::Builtin => solve_builtin(&model, opts.time_budget, incumbent.as_deref()),
            SolverChoice::External(cmd) => {
                let t0 = Instant::now();
                let (status, values) = solve_external(&model, cmd, opts.time_budget)?;
                let (status, values) = match (status, values, incumbent) {
                    (SolveStatus::Unknown, None, Some(inc)) => (SolveStatus::Feasible, Some(inc)),
                    other => (other.0, other.1),
                };
                SolveOutcome {
                    status,
                    objective: values.as_ref().map(|v| model.objective_value(v)),
                    values,
                    wall: t0.elapsed(),
                }
            }
            SolverChoice::Heuristic(_) => unreachable!("handled above"),
        };
        match (outcome.status, outcome.values) {
            (SolveStatus::Infeasible, _) => continue,
            (SolveStatus::Unknown, _) | (_, None) => {
                proven = false;
                continue;
            }
            (status, Some(values)) => {
                let solution = Solution::decode(benchmark, profile, &model, &values)?;
                let status = if proven { status } else { SolveStatus::Feasible };
                return Ok(SynthResult {
                    solution,
                    status,
                    solver: opts.solver.to_string(),
                    objective: outcome.objective,
                    wall: start.elapsed(),
                });
            }
        }
    }
    if proven {
        Err(SolveError::Infeasible(opts.stages_max))
    } else {
        Err(SolveError::Timeout {
            stages: opts.stages_max,
        })
    }
}

/// Objective value in LEs, rounded down (drops the adder tie-break weight).
pub fn objective_les(objective: Coef) -> i64 {
    objective.floor().to_integer()
}
