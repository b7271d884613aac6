use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::benchgen::Benchmark;
use crate::bitheap::BitHeap;
use crate::gpclib::{final_adder, AdderSpan, ArchProfile};
use crate::ilp::{IlpModel, Slot};

use super::SolveError;

/// `count` copies of a counter anchored at column `anchor` in stage `stage`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Placement {
    pub stage: usize,
    pub gpc: String,
    pub anchor: usize,
    pub count: u32,
}

/// LE totals of a solution.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub primary: u32,
    pub compression: u32,
    pub final_adder: u32,
    pub total: u32,
}

/// A staged compressor tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub stage_count: usize,
    /// Pseudo-wires included, sorted by stage, profile order, anchor.
    pub placements: Vec<Placement>,
    /// `stage_count + 1` heaps; the first is the input, the last the residue.
    pub stage_heaps: Vec<BitHeap>,
    pub final_adder: Option<AdderSpan>,
    pub cost: CostBreakdown,
}

impl Solution {
    /// Assembles a solution from placements of real counters, adding the
    /// pseudo-wires that forward every uncovered bit.
    pub fn from_counters(
        benchmark: &Benchmark,
        profile: &ArchProfile,
        stage_count: usize,
        counters: &[Placement],
    ) -> Result<Self, SolveError> {
        let wire = profile
            .gpcs()
            .iter()
            .find(|g| g.is_pseudo_wire())
            .expect("profiles always hold C1:1")
            .name()
            .to_string();
        let mut heap = benchmark.heap().columns().to_vec();
        let mut heaps = vec![BitHeap::new(heap.clone()).map_err(SolveError::internal)?];
        let mut placements = Vec::new();
        for s in 0..stage_count {
            let mut cap = vec![0u32; heap.len()];
            let mut next = vec![0u32; heap.len()];
            for p in counters.iter().filter(|p| p.stage == s && p.count > 0) {
                let g = profile
                    .gpc(&p.gpc)
                    .ok_or_else(|| SolveError::Internal(format!("{} not in profile", p.gpc)))?;
                if g.is_pseudo_wire() {
                    continue;
                }
                let width = p.anchor + g.input_width().max(g.output_width());
                if cap.len() < width {
                    cap.resize(width, 0);
                    next.resize(width, 0);
                    heap.resize(width, 0);
                }
                for (i, &m) in g.inputs().iter().enumerate() {
                    cap[p.anchor + i] += m * p.count;
                }
                for (j, &q) in g.outputs().iter().enumerate() {
                    next[p.anchor + j] += q * p.count;
                }
                placements.push(p.clone());
            }
            for c in 0..heap.len() {
                let rest = heap[c].saturating_sub(cap[c]);
                if rest > 0 {
                    placements.push(Placement {
                        stage: s,
                        gpc: wire.clone(),
                        anchor: c,
                        count: rest,
                    });
                }
                next[c] += rest;
            }
            heap = next;
            heaps.push(BitHeap::new(heap.clone()).map_err(SolveError::internal)?);
        }
        Ok(Self::assemble(benchmark, profile, stage_count, placements, heaps))
    }

    fn assemble(
        benchmark: &Benchmark,
        profile: &ArchProfile,
        stage_count: usize,
        mut placements: Vec<Placement>,
        stage_heaps: Vec<BitHeap>,
    ) -> Self {
        let order: IndexMap<&str, usize> = profile.gpcs().iter().enumerate().map(|(i, g)| (g.name(), i)).collect();
        placements.sort_by_key(|p| (p.stage, order.get(p.gpc.as_str()).copied().unwrap_or(usize::MAX), p.anchor));
        let compression = placements
            .iter()
            .map(|p| profile.gpc(&p.gpc).map_or(0, |g| g.cost()) * p.count)
            .sum();
        let residue = stage_heaps.last().expect("at least the input heap");
        let adder = final_adder(residue.columns());
        let primary = benchmark.primary_cost(profile);
        let final_cost = adder.map_or(0, |a| a.cost);
        Solution {
            stage_count,
            placements,
            stage_heaps: stage_heaps.iter().map(BitHeap::normalized).collect(),
            final_adder: adder,
            cost: CostBreakdown {
                primary,
                compression,
                final_adder: final_cost,
                total: primary + compression + final_cost,
            },
        }
    }

    /// Decodes the placement variables of a model assignment.
    pub fn decode(
        benchmark: &Benchmark,
        profile: &ArchProfile,
        model: &IlpModel,
        values: &[i64],
    ) -> Result<Self, SolveError> {
        let counts = model.placements(values);
        let placements: Vec<Placement> = counts
            .iter()
            .map(|(slot, &count)| Placement {
                stage: slot.stage,
                gpc: model.gpcs()[slot.gpc].name().to_string(),
                anchor: slot.anchor,
                count,
            })
            .collect();
        let heaps = (0..=model.stages())
            .map(|s| {
                let cols = (0..model.columns()).map(|c| values[model.n_var(s, c)] as u32).collect();
                BitHeap::new(cols).map_err(SolveError::internal)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::assemble(benchmark, profile, model.stages(), placements, heaps))
    }

    /// Placement counts keyed by model slot, pseudo-wires left out.
    pub fn slots(&self, model: &IlpModel) -> Option<IndexMap<Slot, u32>> {
        let mut out = IndexMap::new();
        for p in &self.placements {
            let t = model.gpcs().iter().position(|g| g.name() == p.gpc)?;
            if model.gpcs()[t].is_pseudo_wire() {
                continue;
            }
            let slot = Slot {
                stage: p.stage,
                gpc: t,
                anchor: p.anchor,
            };
            model.slot(slot.stage, slot.gpc, slot.anchor)?;
            *out.entry(slot).or_insert(0) += p.count;
        }
        Some(out)
    }

    /// Real counters only.
    pub fn counters(&self) -> Vec<Placement> {
        self.placements.iter().filter(|p| p.gpc != "C1:1").cloned().collect()
    }

    /// Copies of each real counter, in first-use order.
    pub fn usage(&self) -> IndexMap<String, u32> {
        let mut out = IndexMap::new();
        for p in self.counters() {
            *out.entry(p.gpc).or_insert(0) += p.count;
        }
        out
    }

    /// Same tree with `extra` forwarding-only stages appended.
    pub fn padded_to(&self, benchmark: &Benchmark, profile: &ArchProfile, stages: usize) -> Result<Self, SolveError> {
        Self::from_counters(benchmark, profile, stages.max(self.stage_count), &self.counters())
    }
}
