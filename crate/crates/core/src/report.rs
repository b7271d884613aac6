//! Synthesis reports in JSON and plain text.
//!
//! A JSON report doubles as a solution file: it carries the benchmark spec,
//! the full profile library and every placement, so [`Report::restore`] can
//! rebuild the tree for standalone re-verification.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::benchgen::{BenchError, Benchmark};
use crate::bitheap::{BitHeap, HeapError};
use crate::gpclib::{library_to_string, parse_library, AdderSpan, ArchProfile, GpcError};
use crate::solver::{CostBreakdown, Placement, Solution};
use crate::verify::ValidationReport;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("report: {0}")]
    Json(#[from] serde_json::Error),
    #[error("report benchmark: {0}")]
    Bench(#[from] BenchError),
    #[error("report library: {0}")]
    Library(#[from] GpcError),
    #[error("report stage heap: {0}")]
    Heap(#[from] HeapError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub benchmark: String,
    pub spec: String,
    pub profile: String,
    pub solver: String,
    pub status: String,
    pub stages: usize,
    pub le: CostBreakdown,
    pub usage: IndexMap<String, u32>,
    /// Heap literals, most-significant column first, input heap first.
    pub stage_heaps: Vec<String>,
    pub placements: Vec<Placement>,
    pub final_adder: Option<AdderSpan>,
    /// Absent when verification was skipped.
    pub verification: Option<ValidationReport>,
    pub solve_time_ms: u64,
    pub library: serde_json::Value,
}

impl Report {
    pub fn new(
        benchmark: &Benchmark,
        profile: &ArchProfile,
        solution: &Solution,
        solver: &str,
        status: &str,
        verification: Option<ValidationReport>,
        solve_time_ms: u64,
    ) -> Self {
        Report {
            benchmark: benchmark.name(),
            spec: benchmark.spec(),
            profile: profile.name().to_string(),
            solver: solver.to_string(),
            status: status.to_string(),
            stages: solution.stage_count,
            le: solution.cost,
            usage: solution.usage(),
            stage_heaps: solution.stage_heaps.iter().map(BitHeap::to_literal).collect(),
            placements: solution.placements.clone(),
            final_adder: solution.final_adder,
            verification,
            solve_time_ms,
            library: serde_json::from_str(&library_to_string(profile)).expect("library JSON is valid"),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Headline as printed in text reports.
    pub fn headline(&self) -> String {
        format!("LE={} stages={}", self.le.total, self.stages)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{} ({}) on {}, solver {}, status {}\n",
            self.benchmark, self.spec, self.profile, self.solver, self.status
        ));
        out.push_str(&self.headline());
        out.push('\n');
        out.push_str(&format!(
            "LE breakdown: primary={} compression={} final_adder={}\n",
            self.le.primary, self.le.compression, self.le.final_adder
        ));
        out.push_str("usage:");
        if self.usage.is_empty() {
            out.push_str(" none");
        }
        for (g, n) in &self.usage {
            out.push_str(&format!(" {g}={n}"));
        }
        out.push('\n');
        for (s, lit) in self.stage_heaps.iter().enumerate() {
            out.push_str(&format!("stage {s} heap [{lit}]\n"));
            if let Ok(h) = BitHeap::parse(lit) {
                out.push_str(&h.render_dots());
            }
            if s < self.stages {
                for p in self.placements.iter().filter(|p| p.stage == s) {
                    out.push_str(&format!("  {} x{} @ column {}\n", p.gpc, p.count, p.anchor));
                }
            }
        }
        match self.final_adder {
            Some(a) => out.push_str(&format!("final adder: columns {}..={} cost={}\n", a.lo, a.hi, a.cost)),
            None => out.push_str("final adder: none\n"),
        }
        match &self.verification {
            Some(v) => out.push_str(&v.to_text()),
            None => out.push_str("verification: skipped (--unsafe)\n"),
        }
        out.push_str(&format!("solve_time_ms={}\n", self.solve_time_ms));
        out
    }

    /// Rebuilds the benchmark, profile and tree the report describes.
    pub fn restore(&self) -> Result<(Benchmark, ArchProfile, Solution), ReportError> {
        let benchmark = Benchmark::parse(&self.spec)?;
        let profile = parse_library(&self.library.to_string())?;
        let stage_heaps = self
            .stage_heaps
            .iter()
            .map(|l| BitHeap::parse(l))
            .collect::<Result<Vec<_>, _>>()?;
        let solution = Solution {
            stage_count: self.stages,
            placements: self.placements.clone(),
            stage_heaps,
            final_adder: self.final_adder,
            cost: self.le,
        };
        Ok((benchmark, profile, solution))
    }
}
