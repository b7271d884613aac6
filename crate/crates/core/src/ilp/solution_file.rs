//! Solver output import.
//!
//! Two layouts are accepted:
//!
//! * plain `name value` pairs, one per line, optionally with a
//!   `status <optimal|feasible|infeasible|unknown>` line;
//! * the CBC `solu` layout: a status headline such as
//!   `Optimal - objective value 3.00000000`, then
//!   `<index> <name> <value> <reduced cost>` rows.
//!
//! Variables not listed are zero.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::model::IlpModel;
use super::IlpError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    Feasible,
    Infeasible,
    Unknown,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Feasible => "feasible",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unknown => "unknown",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolutionFile {
    pub status: Option<SolveStatus>,
    pub values: IndexMap<String, f64>,
}

fn headline_status(line: &str) -> Option<SolveStatus> {
    let lower = line.trim().to_ascii_lowercase();
    if lower.starts_with("optimal") {
        Some(SolveStatus::Optimal)
    } else if lower.contains("infeasible") {
        Some(SolveStatus::Infeasible)
    } else if lower.starts_with("stopped") {
        // time or node limit; the values describe the incumbent if any
        Some(if lower.contains("objective value") {
            SolveStatus::Feasible
        } else {
            SolveStatus::Unknown
        })
    } else if lower.starts_with("unbounded") {
        Some(SolveStatus::Unknown)
    } else {
        None
    }
}

pub fn parse_solution(text: &str) -> Result<SolutionFile, IlpError> {
    let mut status = None;
    let mut values = IndexMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |reason: &str| IlpError::SolutionFile {
            line: i + 1,
            reason: format!("{reason}: {line:?}"),
        };
        if i == 0 || (status.is_none() && values.is_empty()) {
            if let Some(s) = headline_status(line) {
                status = Some(s);
                continue;
            }
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let (name, value) = match fields.as_slice() {
            ["status", word] => {
                status = Some(match *word {
                    "optimal" => SolveStatus::Optimal,
                    "feasible" => SolveStatus::Feasible,
                    "infeasible" => SolveStatus::Infeasible,
                    "unknown" => SolveStatus::Unknown,
                    _ => return Err(bad("unknown status")),
                });
                continue;
            }
            [name, value] => (*name, *value),
            // CBC rows may flag infeasible values with a leading "**"
            ["**", _idx, name, value, _reduced] | [_idx, name, value, _reduced] => (*name, *value),
            _ => return Err(bad("expected `name value`")),
        };
        let value: f64 = value.parse().map_err(|_| bad("value is not a number"))?;
        if !value.is_finite() {
            return Err(bad("value is not finite"));
        }
        if values.insert(name.to_string(), value).is_some() {
            return Err(bad("variable listed twice"));
        }
    }
    Ok(SolutionFile { status, values })
}

/// Maps solver values onto the model's variables, rounding to the nearest
/// integer. Unknown names and values far from an integer are errors.
pub fn assignment(model: &IlpModel, file: &SolutionFile) -> Result<Vec<i64>, IlpError> {
    let mut values = vec![0i64; model.variables().len()];
    let index: IndexMap<&str, usize> = model
        .variables()
        .iter()
        .enumerate()
        .map(|(i, v)| (v.name.as_str(), i))
        .collect();
    for (name, &v) in &file.values {
        let id = *index
            .get(name.as_str())
            .ok_or_else(|| IlpError::UnknownVariable(name.clone()))?;
        let rounded = v.round();
        if (v - rounded).abs() > 1e-4 {
            return Err(IlpError::Fractional {
                name: name.clone(),
                value: v,
            });
        }
        values[id] = rounded as i64;
    }
    Ok(values)
}
