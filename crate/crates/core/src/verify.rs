//! Independent checks of counters and synthesized trees.

use std::collections::VecDeque;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::benchgen::{xnor_popcount_unit, Benchmark};
use crate::bitheap::{BitAssignment, MAX_COLUMNS};
use crate::gpclib::{final_adder, ArchProfile, Gpc};
use crate::solver::{Placement, Solution};

/// Largest input count checked exhaustively.
pub const EXHAUSTIVE_GPC_INPUTS: u32 = 20;
/// Largest raw input width simulated exhaustively.
pub const EXHAUSTIVE_SIM_BITS: u32 = 16;
/// Samples drawn per seeded batch; batch `k` uses stream `k` of the root seed.
const BATCH: u64 = 1024;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("{0}: arithmetic slack negative, semantics undefined")]
    NegativeSlack(String),
    #[error("{name}: {p} inputs is too many for an exhaustive check (limit {EXHAUSTIVE_GPC_INPUTS})")]
    TooWide { name: String, p: u32 },
    #[error("{name}: input value {input} encoded as {output}")]
    Mismatch { name: String, input: u64, output: u64 },
    #[error("{name}: {reason}")]
    Evaluate { name: String, reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SemanticsMode {
    Exhaustive,
    Sampled { n: u64, seed: u64 },
}

impl SemanticsMode {
    /// Exhaustive up to 20 inputs, else 10^5 seeded samples.
    pub fn auto(g: &Gpc, seed: u64) -> Self {
        if g.p() <= EXHAUSTIVE_GPC_INPUTS {
            SemanticsMode::Exhaustive
        } else {
            SemanticsMode::Sampled { n: 100_000, seed }
        }
    }
}

/// Number of input assignments a semantics check went through.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SemanticsReport {
    pub cases: u64,
    pub exhaustive: bool,
}

/// Checks that the counter's output bits, read as a binary number, equal
/// the weighted sum of its input bits on every tried assignment.
pub fn check_gpc_semantics(g: &Gpc, mode: SemanticsMode) -> Result<SemanticsReport, VerifyError> {
    if g.slack() < num_rational::Ratio::from_integer(0) {
        return Err(VerifyError::NegativeSlack(g.name().to_string()));
    }
    let p = g.p();
    let one = |bits: &dyn Fn(usize) -> bool| -> Result<(), VerifyError> {
        let mut k = 0;
        let mut input = 0u64;
        let columns: Vec<Vec<bool>> = g
            .inputs()
            .iter()
            .enumerate()
            .map(|(i, &m)| {
                (0..m)
                    .map(|_| {
                        let b = bits(k);
                        k += 1;
                        input += u64::from(b) << i;
                        b
                    })
                    .collect()
            })
            .collect();
        let out = g.evaluate(&columns).map_err(|e| VerifyError::Evaluate {
            name: g.name().to_string(),
            reason: e.to_string(),
        })?;
        let output: u64 = out
            .iter()
            .enumerate()
            .map(|(j, bits)| (bits.iter().filter(|&&b| b).count() as u64) << j)
            .sum();
        if output != input {
            return Err(VerifyError::Mismatch {
                name: g.name().to_string(),
                input,
                output,
            });
        }
        Ok(())
    };
    match mode {
        SemanticsMode::Exhaustive => {
            if p > EXHAUSTIVE_GPC_INPUTS {
                return Err(VerifyError::TooWide {
                    name: g.name().to_string(),
                    p,
                });
            }
            let cases = 1u64 << p;
            for index in 0..cases {
                one(&|k| (index >> k) & 1 == 1)?;
            }
            Ok(SemanticsReport {
                cases,
                exhaustive: true,
            })
        }
        SemanticsMode::Sampled { n, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..n {
                let bits: Vec<bool> = (0..p).map(|_| rng.gen()).collect();
                one(&|k| bits[k])?;
            }
            Ok(SemanticsReport {
                cases: n,
                exhaustive: false,
            })
        }
    }
}

/// One violated structural rule. Column-free rules (cost) leave `column` empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub stage: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn diag(stage: usize, column: usize, message: String) -> Diagnostic {
    Diagnostic {
        stage: Some(stage),
        column: Some(column),
        message,
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuralReport {
    pub pass: bool,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionalReport {
    pub pass: bool,
    pub samples: u64,
    pub mismatches: u64,
    pub exhaustive: bool,
    /// First failing case, if any.
    pub first_failure: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub structural: StructuralReport,
    /// Absent when the structural check failed.
    pub functional: Option<FunctionalReport>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.structural.pass && self.functional.as_ref().is_some_and(|f| f.pass)
    }

    /// One line per check.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if self.structural.pass {
            out.push_str("structural: pass\n");
        } else {
            out.push_str("structural: FAIL\n");
            for d in &self.structural.diagnostics {
                out.push_str(&format!("  {d}\n"));
            }
        }
        match &self.functional {
            None => out.push_str("functional: skipped\n"),
            Some(f) => {
                out.push_str(&format!(
                    "functional: {} ({} {} samples, {} mismatches)\n",
                    if f.pass { "pass" } else { "FAIL" },
                    f.samples,
                    if f.exhaustive { "exhaustive" } else { "random" },
                    f.mismatches
                ));
                if let Some(first) = &f.first_failure {
                    out.push_str(&format!("  {first}\n"));
                }
            }
        }
        out
    }
}

/// Checks coverage, production, the final rule and the declared cost of a
/// solution, stage by stage.
pub fn validate_structure(solution: &Solution, benchmark: &Benchmark, profile: &ArchProfile) -> StructuralReport {
    let mut diags = Vec::new();
    let st = solution.stage_count;
    if solution.stage_heaps.len() != st + 1 {
        diags.push(Diagnostic {
            stage: None,
            column: None,
            message: format!("{} stage heaps listed for {st} stages", solution.stage_heaps.len()),
        });
        return StructuralReport {
            pass: false,
            diagnostics: diags,
        };
    }
    let width = |s: usize| solution.stage_heaps[s].len();
    let input = benchmark.heap().columns();
    for c in 0..input.len().max(width(0)) {
        let (want, got) = (input.get(c).copied().unwrap_or(0), solution.stage_heaps[0].height(c));
        if want != got {
            diags.push(diag(0, c, format!("input heap ({}, {c}): {got} bits listed, benchmark has {want}", 0)));
        }
    }
    let mut compression = 0u32;
    for p in &solution.placements {
        let Some(g) = profile.gpc(&p.gpc) else {
            diags.push(diag(p.stage, p.anchor, format!("unknown counter {} at ({}, {})", p.gpc, p.stage, p.anchor)));
            continue;
        };
        if !g.enabled() {
            diags.push(diag(p.stage, p.anchor, format!("disabled counter {} at ({}, {})", p.gpc, p.stage, p.anchor)));
        }
        if p.stage >= st {
            diags.push(diag(p.stage, p.anchor, format!("placement {} at ({}, {}) beyond the last stage", p.gpc, p.stage, p.anchor)));
        }
        if p.anchor + g.input_width().max(g.output_width()) > MAX_COLUMNS {
            diags.push(diag(p.stage, p.anchor, format!("footprint of {} at ({}, {}) leaves the heap", p.gpc, p.stage, p.anchor)));
        }
        compression += g.cost() * p.count;
    }
    if !diags.is_empty() {
        return StructuralReport {
            pass: false,
            diagnostics: diags,
        };
    }
    for s in 0..st {
        let mut cap = vec![0u32; MAX_COLUMNS];
        let mut produced = vec![0u32; MAX_COLUMNS];
        for p in solution.placements.iter().filter(|p| p.stage == s) {
            let g = profile.gpc(&p.gpc).expect("checked above");
            for (i, &m) in g.inputs().iter().enumerate() {
                cap[p.anchor + i] += m * p.count;
            }
            for (j, &q) in g.outputs().iter().enumerate() {
                produced[p.anchor + j] += q * p.count;
            }
        }
        let heap = &solution.stage_heaps[s];
        for c in 0..heap.len() {
            let h = heap.height(c);
            if cap[c] < h {
                diags.push(diag(s, c, format!("uncovered bit ({s}, {c}): {} of {h} bits reach no counter", h - cap[c])));
            }
        }
        let next = &solution.stage_heaps[s + 1];
        for c in 0..MAX_COLUMNS.max(next.len()) {
            let (made, listed) = (produced.get(c).copied().unwrap_or(0), next.height(c));
            if made != listed {
                diags.push(diag(
                    s + 1,
                    c,
                    format!("production mismatch ({}, {c}): counters emit {made} bits, heap lists {listed}", s + 1),
                ));
            }
        }
    }
    let residue = solution.stage_heaps[st].columns();
    if let Err(v) = profile.final_rule().check(residue) {
        diags.push(diag(
            st,
            v.column,
            format!("final rule ({st}, {}): {} bits with {} carries, {}", v.column, v.bits, v.carries, v.reason),
        ));
    }
    let adder = final_adder(residue);
    if adder != solution.final_adder {
        diags.push(Diagnostic {
            stage: Some(st),
            column: None,
            message: format!("final adder mismatch: declared {:?}, residue needs {adder:?}", solution.final_adder),
        });
    }
    let primary = benchmark.primary_cost(profile);
    let total = primary + compression + adder.map_or(0, |a| a.cost);
    let c = &solution.cost;
    if c.total != total || c.compression != compression || c.primary != primary || c.primary + c.compression + c.final_adder != c.total {
        diags.push(Diagnostic {
            stage: None,
            column: None,
            message: format!("cost mismatch: declared {} LEs, placements imply {total}", c.total),
        });
    }
    StructuralReport {
        pass: diags.is_empty(),
        diagnostics: diags,
    }
}

/// Value of every stage heap and the final sum for one input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub stage_values: Vec<u128>,
    pub output: u128,
}

/// Pushes concrete bits through every placement. Counters take bits first,
/// pseudo-wires forward what remains; missing inputs read as zero. The final
/// adder is exact addition of the residue.
pub fn propagate(solution: &Solution, profile: &ArchProfile, input: &BitAssignment) -> Result<Trace, String> {
    let mut heap: Vec<VecDeque<bool>> = input.columns().iter().map(|c| c.iter().copied().collect()).collect();
    heap.resize(MAX_COLUMNS, VecDeque::new());
    let value = |h: &[VecDeque<bool>]| -> u128 {
        h.iter()
            .enumerate()
            .map(|(c, bits)| (bits.iter().filter(|&&b| b).count() as u128) << c)
            .sum()
    };
    let mut stage_values = vec![value(&heap)];
    for s in 0..solution.stage_count {
        let mut next = vec![VecDeque::new(); MAX_COLUMNS];
        let placements: Vec<(&Placement, &Gpc)> = solution
            .placements
            .iter()
            .filter(|p| p.stage == s)
            .map(|p| profile.gpc(&p.gpc).map(|g| (p, g)).ok_or_else(|| format!("unknown counter {}", p.gpc)))
            .collect::<Result<_, _>>()?;
        let ordered = placements
            .iter()
            .filter(|(_, g)| !g.is_pseudo_wire())
            .chain(placements.iter().filter(|(_, g)| g.is_pseudo_wire()));
        for (p, g) in ordered {
            if p.anchor + g.input_width().max(g.output_width()) > MAX_COLUMNS {
                return Err(format!("{} at ({s}, {}) leaves the heap", p.gpc, p.anchor));
            }
            for _ in 0..p.count {
                let wired: Vec<Vec<bool>> = g
                    .inputs()
                    .iter()
                    .enumerate()
                    .map(|(i, &m)| {
                        let col = &mut heap[p.anchor + i];
                        let take = (m as usize).min(col.len());
                        col.drain(..take).collect()
                    })
                    .collect();
                let out = g.evaluate(&wired).map_err(|e| e.to_string())?;
                for (j, bits) in out.into_iter().enumerate() {
                    next[p.anchor + j].extend(bits);
                }
            }
        }
        if let Some(c) = heap.iter().position(|col| !col.is_empty()) {
            return Err(format!("uncovered bit ({s}, {c}): {} bits left behind", heap[c].len()));
        }
        heap = next;
        stage_values.push(value(&heap));
    }
    let output = value(&heap);
    Ok(Trace { stage_values, output })
}

/// Runs one raw input through the primary stage and the tree. Returns a
/// description of the first failure.
pub fn simulate_raw(solution: &Solution, benchmark: &Benchmark, profile: &ArchProfile, raw: &[bool]) -> Result<u128, String> {
    let (bits, expected) = benchmark.evaluate_raw(raw);
    let trace = propagate(solution, profile, &bits)?;
    if trace.output == expected {
        return Ok(expected);
    }
    let stage = trace.stage_values.iter().position(|&v| v != expected).unwrap_or(solution.stage_count);
    Err(format!(
        "input {}: expected {expected}, tree gives {}; first differing stage {stage}",
        raw.iter().rev().map(|&b| if b { '1' } else { '0' }).collect::<String>(),
        trace.output
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimOptions {
    /// Random samples when the input is too wide to enumerate.
    pub samples: u64,
    pub seed: u64,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            samples: 10_000,
            seed: 0,
        }
    }
}

/// Simulates exhaustively when the raw input has at most 16 bits, otherwise
/// on seeded random inputs.
pub fn simulate(solution: &Solution, benchmark: &Benchmark, profile: &ArchProfile, opts: SimOptions) -> FunctionalReport {
    let n = benchmark.raw_bit_count();
    let mut report = FunctionalReport {
        exhaustive: n <= EXHAUSTIVE_SIM_BITS,
        ..Default::default()
    };
    let run = |raw: &[bool], report: &mut FunctionalReport| {
        report.samples += 1;
        if let Err(e) = simulate_raw(solution, benchmark, profile, raw) {
            report.mismatches += 1;
            report.first_failure.get_or_insert(e);
        }
    };
    if report.exhaustive {
        for index in 0..1u64 << n {
            let raw: Vec<bool> = (0..n).map(|i| (index >> i) & 1 == 1).collect();
            run(&raw, &mut report);
        }
    } else {
        let mut done = 0;
        let mut batch = 0;
        while done < opts.samples {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(batch);
            for _ in 0..BATCH.min(opts.samples - done) {
                let raw: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
                run(&raw, &mut report);
                done += 1;
            }
            batch += 1;
        }
    }
    report.pass = report.mismatches == 0 && report.samples > 0;
    report
}

/// Structural check, then simulation if the structure holds.
pub fn validate(solution: &Solution, benchmark: &Benchmark, profile: &ArchProfile, opts: SimOptions) -> ValidationReport {
    let structural = validate_structure(solution, benchmark, profile);
    let functional = structural.pass.then(|| simulate(solution, benchmark, profile, opts));
    ValidationReport { structural, functional }
}

/// Outcome of the fused XNOR popcount identity sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub cases: u32,
    pub failures: u32,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases == 64
    }
}

/// Compares three XNORs followed by a full adder with a single 6-input
/// function of the complemented weights and the activations, over all 64
/// inputs.
pub fn xnorpopcount_identity() -> IdentityReport {
    let mut failures = 0;
    for index in 0u32..64 {
        let w: Vec<bool> = (0..3).map(|i| (index >> i) & 1 == 1).collect();
        let x: Vec<bool> = (0..3).map(|i| (index >> (3 + i)) & 1 == 1).collect();
        let e: Vec<bool> = (0..3).map(|i| !(w[i] ^ x[i])).collect();
        let sum = e[0] ^ e[1] ^ e[2];
        let carry = (e[0] && e[1]) || (e[0] && e[2]) || (e[1] && e[2]);
        let xor6 = !w[0] ^ x[0] ^ !w[1] ^ x[1] ^ !w[2] ^ x[2];
        let lut_carry = (0..3).filter(|&i| !w[i] ^ x[i]).count() >= 2;
        let fused = xnor_popcount_unit(&w, &x);
        let count = e.iter().filter(|&&b| b).count() as u32;
        let ok = sum == xor6
            && carry == lut_carry
            && fused == (sum, carry)
            && u32::from(sum) + 2 * u32::from(carry) == count;
        if !ok {
            failures += 1;
        }
    }
    IdentityReport { cases: 64, failures }
}

/// Copy of `solution` with one placement moved to another anchor or swapped
/// for another counter of the profile. Heaps and costs are left as declared.
/// Returns `None` when no mutation is possible.
pub fn inject_fault<R: Rng + ?Sized>(solution: &Solution, profile: &ArchProfile, rng: &mut R) -> Option<Solution> {
    if solution.placements.is_empty() {
        return None;
    }
    let gpcs: Vec<&Gpc> = profile.active_gpcs().collect();
    for _ in 0..64 {
        let mut out = solution.clone();
        let k = rng.gen_range(0..out.placements.len());
        let p = &mut out.placements[k];
        if rng.gen_bool(0.5) {
            let g = profile.gpc(&p.gpc)?;
            let room = MAX_COLUMNS - g.input_width().max(g.output_width());
            let moved = if p.anchor == 0 || (p.anchor < room && rng.gen_bool(0.5)) {
                p.anchor + 1
            } else {
                p.anchor - 1
            };
            p.anchor = moved;
        } else {
            let other = gpcs
                .iter()
                .filter(|g| g.name() != p.gpc && p.anchor + g.input_width().max(g.output_width()) <= MAX_COLUMNS)
                .collect::<Vec<_>>();
            let Some(g) = other.choose(rng) else { continue };
            p.gpc = g.name().to_string();
        }
        return Some(out);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gpclib::{builtin_library, GpcKind, ProfileKind};
    use crate::solver::{heuristic_synthesize, CostBreakdown, Metric};

    fn gpc(name: &str) -> Gpc {
        let (p, q) = Gpc::parse_name(name).unwrap();
        Gpc::from_tuples(&p, &q, 1, GpcKind::LutBased).unwrap()
    }

    #[test]
    fn small_counters_exhaustive() {
        let r = check_gpc_semantics(&gpc("C3:11"), SemanticsMode::Exhaustive).unwrap();
        assert_eq!(r.cases, 8);
        let r = check_gpc_semantics(&gpc("C1325:11111"), SemanticsMode::Exhaustive).unwrap();
        assert_eq!(r.cases, 1 << 11);
    }

    #[test]
    fn wide_counter_sampled() {
        let g = gpc("C06060606:111111111");
        assert!(matches!(
            check_gpc_semantics(&g, SemanticsMode::Exhaustive),
            Err(VerifyError::TooWide { p: 24, .. })
        ));
        assert_eq!(SemanticsMode::auto(&g, 1), SemanticsMode::Sampled { n: 100_000, seed: 1 });
        let r = check_gpc_semantics(&g, SemanticsMode::Sampled { n: 2000, seed: 1 }).unwrap();
        assert!(!r.exhaustive);
    }

    #[test]
    fn identity_holds() {
        let r = xnorpopcount_identity();
        assert!(r.passed(), "{r:?}");
        assert_eq!(xnor_popcount_unit(&[false; 3], &[false; 3]), (true, true));
        assert_eq!(xnor_popcount_unit(&[true; 3], &[true; 3]), (true, true));
    }

    fn s6() -> (Solution, Benchmark, ArchProfile) {
        let b = Benchmark::parse("S:6").unwrap();
        let p = builtin_library(ProfileKind::XilinxBaseline);
        let s = Solution::from_counters(
            &b,
            &p,
            1,
            &[Placement { stage: 0, gpc: "C6:111".into(), anchor: 0, count: 1 }],
        )
        .unwrap();
        (s, b, p)
    }

    #[test]
    fn s6_passes() {
        let (s, b, p) = s6();
        let r = validate(&s, &b, &p, SimOptions::default());
        assert!(r.passed(), "{}", r.to_text());
        let f = r.functional.unwrap();
        assert!(f.exhaustive);
        assert_eq!(f.samples, 64);
    }

    #[test]
    fn orphan_bit_constructed() {
        let b = Benchmark::parse("HEAP:1,2,3").unwrap();
        let p = builtin_library(ProfileKind::IntelBaseline);
        let mut s = Solution::from_counters(
            &b,
            &p,
            2,
            &[Placement { stage: 0, gpc: "C3:11".into(), anchor: 0, count: 1 }],
        )
        .unwrap();
        assert!(validate_structure(&s, &b, &p).pass);
        let k = s.placements.iter().position(|q| q.stage == 1 && q.anchor == 2).unwrap();
        s.placements[k].count -= 1;
        if s.placements[k].count == 0 {
            s.placements.remove(k);
        }
        let r = validate_structure(&s, &b, &p);
        assert!(!r.pass);
        assert!(r.diagnostics.iter().any(|d| d.message.starts_with("uncovered bit (1, 2)")), "{r:?}");
        assert!(r.diagnostics.iter().all(|d| d.stage.is_some()));
    }

    #[test]
    fn understated_cost_rejected() {
        let (mut s, b, p) = s6();
        s.cost = CostBreakdown {
            compression: s.cost.compression - 1,
            total: s.cost.total - 1,
            ..s.cost
        };
        let r = validate(&s, &b, &p, SimOptions::default());
        assert!(!r.passed());
        assert!(r.functional.is_none());
        assert!(r.structural.diagnostics.iter().any(|d| d.message.starts_with("cost mismatch")));
    }

    #[test]
    fn zero_and_all_ones() {
        let b = Benchmark::parse("ADD:3x3").unwrap();
        let p = builtin_library(ProfileKind::XilinxBaseline);
        let s = heuristic_synthesize(&b, &p, Metric::Product).unwrap();
        let zeros = vec![false; 9];
        assert_eq!(simulate_raw(&s, &b, &p, &zeros), Ok(0));
        assert_eq!(simulate_raw(&s, &b, &p, &[true; 9]), Ok(21));
    }

    #[test]
    fn heuristic_trees_simulate() {
        for kind in ProfileKind::BUILTIN {
            let p = builtin_library(kind);
            for spec in ["S:24", "D:12", "ADD:6x7", "MAC3:3", "BNN:20", "FIR3:2"] {
                let b = Benchmark::parse(spec).unwrap();
                let s = heuristic_synthesize(&b, &p, Metric::Efficiency).unwrap();
                let r = validate(&s, &b, &p, SimOptions { samples: 300, seed: 7 });
                assert!(r.passed(), "{spec} {kind:?}\n{}", r.to_text());
            }
        }
    }

    #[test]
    fn wrong_tree_caught_by_simulation() {
        let b = Benchmark::parse("S:6").unwrap();
        let p = builtin_library(ProfileKind::XilinxBaseline);
        let (s, _, _) = s6();
        let out = propagate(&s, &p, &BitAssignment::from_columns(vec![vec![], vec![true; 6]]));
        assert_eq!(out.unwrap_err(), "uncovered bit (0, 1): 6 bits left behind");
        let bad = Benchmark::parse("S:5").unwrap();
        assert!(validate(&s, &bad, &p, SimOptions::default()).structural.diagnostics[0]
            .message
            .starts_with("input heap (0, 0)"));
        assert!(simulate(&s, &b, &p, SimOptions::default()).pass);
    }

    #[test]
    fn injected_faults_detected() {
        let b = Benchmark::parse("D:8").unwrap();
        let p = builtin_library(ProfileKind::XLuxorPlus);
        let s = heuristic_synthesize(&b, &p, Metric::Efficiency).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let m = inject_fault(&s, &p, &mut rng).unwrap();
            assert_ne!(m, s);
            assert!(!validate(&m, &b, &p, SimOptions::default()).passed(), "{:?}", m.placements);
        }
    }

    #[test]
    fn seeded_sampling_is_reproducible() {
        let b = Benchmark::parse("S:40").unwrap();
        let p = builtin_library(ProfileKind::ILuxor);
        let s = heuristic_synthesize(&b, &p, Metric::Strength).unwrap();
        let o = SimOptions { samples: 2500, seed: 11 };
        let r = simulate(&s, &b, &p, o);
        assert!(!r.exhaustive);
        assert_eq!(r.samples, 2500);
        assert_eq!(r, simulate(&s, &b, &p, o));
    }
}
