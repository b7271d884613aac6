//! Bridge to an external MILP solver through LP files.

use std::fs;
use std::process::Command;
use std::time::Duration;

use crate::ilp::{assignment, parse_solution, to_lp_file, IlpModel, SolveStatus};

use super::SolveError;

/// Environment variable holding the default external solver command.
pub const SOLVER_CMD_ENV: &str = "CTSYNTH_SOLVER_CMD";
/// Environment variable holding the default time budget in seconds.
pub const TIME_BUDGET_ENV: &str = "CTSYNTH_TIME_BUDGET";

fn quote(path: &str) -> String {
    format!("'{}'", path.replace('\'', "'\\''"))
}

/// Runs `template` through `sh -c` after substituting `{lp}`, `{sol}` and
/// `{time}` (whole seconds), then reads the solution file it wrote.
/// Returns the status and, unless infeasible or empty, a model assignment
/// that has been checked against every constraint.
pub fn solve_external(
    model: &IlpModel,
    template: &str,
    time_budget: Duration,
) -> Result<(SolveStatus, Option<Vec<i64>>), SolveError> {
    if !template.contains("{lp}") || !template.contains("{sol}") {
        return Err(SolveError::Config(format!(
            "solver command {template:?} must contain {{lp}} and {{sol}}"
        )));
    }
    let dir = tempfile::tempdir().map_err(SolveError::internal)?;
    let lp = dir.path().join("model.lp");
    let sol = dir.path().join("model.sol");
    fs::write(&lp, to_lp_file(model)).map_err(SolveError::internal)?;
    let command = template
        .replace("{lp}", &quote(&lp.to_string_lossy()))
        .replace("{sol}", &quote(&sol.to_string_lossy()))
        .replace("{time}", &time_budget.as_secs().max(1).to_string());
    let output = Command::new("sh")
        .arg("-c")
        .arg(&command)
        .output()
        .map_err(|e| SolveError::External(format!("cannot run {command:?}: {e}")))?;
    let text = match fs::read_to_string(&sol) {
        Ok(text) => text,
        Err(_) => {
            let stderr = String::from_utf8_lossy(&output.stderr);
            return Err(SolveError::External(format!(
                "solver exited with {} and wrote no solution file: {}",
                output.status,
                stderr.trim()
            )));
        }
    };
    let file = parse_solution(&text)?;
    match file.status {
        Some(SolveStatus::Infeasible) => return Ok((SolveStatus::Infeasible, None)),
        Some(SolveStatus::Unknown) => return Ok((SolveStatus::Unknown, None)),
        _ if file.values.is_empty() => return Ok((SolveStatus::Unknown, None)),
        _ => {}
    }
    let values = assignment(model, &file)?;
    model
        .check(&values)
        .map_err(|v| SolveError::External(format!("solver returned an invalid point: {v}")))?;
    let status = file.status.unwrap_or(SolveStatus::Feasible);
    Ok((status, Some(values)))
}
