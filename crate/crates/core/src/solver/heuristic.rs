//! Greedy stage-by-stage compression.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::benchgen::Benchmark;
use crate::bitheap::MAX_COLUMNS;
use crate::gpclib::{ArchProfile, Gpc};

use super::{Placement, Solution, SolveError};

/// Ranking used to pick the next counter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    Efficiency,
    Strength,
    Product,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Efficiency, Metric::Strength, Metric::Product];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Efficiency => "efficiency",
            Metric::Strength => "strength",
            Metric::Product => "product",
        }
    }

    /// Score of a counter that covers `covered` live bits. Both efficiency
    /// and strength are taken over covered bits, so a counter left partly
    /// empty ranks lower than a full one.
    fn score(self, g: &Gpc, covered: u32) -> Ratio<i64> {
        let p = i64::from(covered);
        let q = i64::from(g.q());
        let e = Ratio::new(p - q, i64::from(g.cost()));
        let s = Ratio::new(p, q);
        match self {
            Metric::Efficiency => e,
            Metric::Strength => s,
            Metric::Product => e * s,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown metric {s:?}, expected efficiency, strength or product"))
    }
}

/// Greedy counter placement. Each stage repeatedly places the counter and
/// anchor with the best score over still-uncovered bits, as long as the
/// counter covers more bits than it emits; the rest is forwarded. Stages are
/// added until the residue meets the final-adder rule.
pub fn heuristic_synthesize(
    benchmark: &Benchmark,
    profile: &ArchProfile,
    metric: Metric,
) -> Result<Solution, SolveError> {
    let gpcs: Vec<&Gpc> = profile.active_gpcs().filter(|g| !g.is_pseudo_wire()).collect();
    let mut heap: Vec<u32> = benchmark.heap().columns().to_vec();
    let rule = profile.final_rule();
    let mut counters = Vec::new();
    let mut stage = 0;
    while !rule.holds(&heap) {
        let mut left = heap.clone();
        let mut next = vec![0u32; MAX_COLUMNS];
        let mut placed_any = false;
        loop {
            let mut best: Option<(Ratio<i64>, u32, &str, usize, &Gpc)> = None;
            for g in &gpcs {
                let width = g.input_width().max(g.output_width());
                for anchor in 0..left.len() {
                    if anchor + width > MAX_COLUMNS {
                        break;
                    }
                    let covered: u32 = g
                        .inputs()
                        .iter()
                        .enumerate()
                        .map(|(i, &m)| m.min(left.get(anchor + i).copied().unwrap_or(0)))
                        .sum();
                    if covered <= g.q() {
                        continue;
                    }
                    let score = metric.score(g, covered);
                    let better = match &best {
                        None => true,
                        Some((bs, bc, bn, ba, _)) => {
                            (score, covered, std::cmp::Reverse(g.name()), std::cmp::Reverse(anchor))
                                > (*bs, *bc, std::cmp::Reverse(*bn), std::cmp::Reverse(*ba))
                        }
                    };
                    if better {
                        best = Some((score, covered, g.name(), anchor, g));
                    }
                }
            }
            let Some((_, _, _, anchor, g)) = best else { break };
            for (i, &m) in g.inputs().iter().enumerate() {
                if let Some(h) = left.get_mut(anchor + i) {
                    *h -= m.min(*h);
                }
            }
            for (j, &q) in g.outputs().iter().enumerate() {
                next[anchor + j] += q;
            }
            counters.push(Placement {
                stage,
                gpc: g.name().to_string(),
                anchor,
                count: 1,
            });
            placed_any = true;
        }
        if !placed_any {
            return Err(SolveError::Internal(format!(
                "heuristic stalled at stage {stage} on a heap violating the final rule"
            )));
        }
        for (c, &rest) in left.iter().enumerate() {
            next[c] += rest;
        }
        let last = next.iter().rposition(|&h| h > 0).map_or(0, |i| i + 1);
        next.truncate(last);
        heap = next;
        stage += 1;
    }
    let merged = merge(counters);
    Solution::from_counters(benchmark, profile, stage, &merged)
}

fn merge(list: Vec<Placement>) -> Vec<Placement> {
    let mut out: Vec<Placement> = Vec::new();
    for p in list {
        match out
            .iter_mut()
            .find(|q| q.stage == p.stage && q.gpc == p.gpc && q.anchor == p.anchor)
        {
            Some(q) => q.count += p.count,
            None => out.push(p),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gpclib::{builtin_library, ProfileKind};

    #[test]
    fn s6_single_c6() {
        for metric in Metric::ALL {
            let b = Benchmark::parse("S:6").unwrap();
            let s = heuristic_synthesize(&b, &builtin_library(ProfileKind::XilinxBaseline), metric).unwrap();
            assert_eq!(s.stage_count, 1, "{metric}");
            assert_eq!(s.counters(), [Placement { stage: 0, gpc: "C6:111".into(), anchor: 0, count: 1 }]);
            assert_eq!(s.cost.total, 3);
        }
    }

    #[test]
    fn already_final() {
        let b = Benchmark::parse("HEAP:3,4").unwrap();
        let s = heuristic_synthesize(&b, &builtin_library(ProfileKind::XilinxBaseline), Metric::Efficiency).unwrap();
        assert_eq!(s.stage_count, 0);
        assert_eq!(s.cost.final_adder, 2);
    }

    #[test]
    fn terminates_everywhere() {
        for kind in ProfileKind::BUILTIN {
            for spec in ["S:128", "D:64", "ADD:6x7", "MAC3:4", "BNN:99"] {
                let b = Benchmark::parse(spec).unwrap();
                for metric in Metric::ALL {
                    let s = heuristic_synthesize(&b, &builtin_library(kind), metric).unwrap();
                    let residue = s.stage_heaps.last().unwrap();
                    assert!(builtin_library(kind).final_rule().holds(residue.columns()), "{spec} {kind}");
                }
            }
        }
    }
}
