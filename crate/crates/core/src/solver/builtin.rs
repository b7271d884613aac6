//! Exact combinatorial solver for the compressor tree model.
//!
//! The search runs stage by stage. Within a stage, placements are chosen
//! column by column, lowest anchor first; the state carried between columns
//! is the coverage already provided (clipped to the column height) and the
//! outputs already produced for the next few columns. Uncovered bits are
//! forwarded by pseudo-wires, so the next heap is
//! `max(0, h - coverage) + outputs`.
//!
//! The last stage is a dynamic program that checks the final-adder rule and
//! prices the adder while columns are closed. Earlier stages yield the
//! Pareto-minimal (next heap, cost) pairs, which are explored depth first
//! with memoisation and branch-and-bound. A componentwise smaller heap never
//! costs more to finish, which justifies both the Pareto filter and the
//! coverage-saturation of the state.

use std::collections::HashMap;
use std::rc::Rc;
use std::time::{Duration, Instant};

use indexmap::IndexMap;

use crate::gpclib::FinalRule;
use crate::ilp::{IlpModel, ObjectiveMode, Slot};

/// Cost units: counter LEs are scaled by this so that adder LEs can carry a
/// slightly higher weight and win ties deterministically.
const SCALE: u64 = 128;
/// Live search states allowed in one column sweep before giving up.
const STATE_LIMIT: usize = 1 << 20;
/// Memo entries kept before the table is flushed.
const MEMO_LIMIT: usize = 1 << 18;

#[derive(Clone, Debug)]
struct Cand {
    gpc: usize,
    inputs: Vec<u32>,
    outputs: Vec<u32>,
    cost: u64,
}

#[derive(Debug)]
struct Node {
    stage: usize,
    gpc: usize,
    anchor: usize,
    count: u32,
    next: Plan,
}

type Plan = Option<Rc<Node>>;

fn cons(plan: &Plan, stage: usize, gpc: usize, anchor: usize, count: u32) -> Plan {
    if count == 0 {
        return plan.clone();
    }
    Some(Rc::new(Node {
        stage,
        gpc,
        anchor,
        count,
        next: plan.clone(),
    }))
}

fn concat(front: &Plan, back: &Plan) -> Plan {
    let mut items = Vec::new();
    let mut cur = front.clone();
    while let Some(n) = cur {
        items.push((n.stage, n.gpc, n.anchor, n.count));
        cur = n.next.clone();
    }
    let mut out = back.clone();
    for (s, g, a, k) in items.into_iter().rev() {
        out = cons(&out, s, g, a, k);
    }
    out
}

#[derive(Clone, Debug)]
enum Memo {
    Exact(Option<(u64, Plan)>),
    AtLeast(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Optimal,
    /// Search stopped on its time or state budget; the result, if any, is
    /// the best found.
    TimedOut,
}

#[derive(Debug)]
struct Timeout;

/// Placement counts plus search status.
pub struct BuiltinResult {
    pub counts: Option<IndexMap<Slot, u32>>,
    pub outcome: Outcome,
    pub explored: u64,
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Window {
    cap: Vec<u32>,
    out: Vec<u32>,
}

impl Window {
    fn new(width: usize) -> Self {
        Self {
            cap: vec![0; width],
            out: vec![0; width],
        }
    }

    fn shift(&mut self) {
        self.cap.rotate_left(1);
        self.out.rotate_left(1);
        *self.cap.last_mut().unwrap() = 0;
        *self.out.last_mut().unwrap() = 0;
    }
}

struct Search {
    stages: usize,
    columns: usize,
    width: usize,
    rule: FinalRule,
    adder_weight: u64,
    by_anchor: Vec<Vec<Cand>>,
    min_cost: u64,
    memo: HashMap<(Vec<u32>, usize), Memo>,
    deadline: Instant,
    ticks: u64,
}

impl Search {
    fn new(model: &IlpModel, deadline: Instant) -> Self {
        let columns = model.columns();
        let mut by_anchor = vec![Vec::new(); columns];
        let mut width = 1;
        for (t, g) in model.gpcs().iter().enumerate() {
            if g.is_pseudo_wire() {
                continue;
            }
            let w = g.input_width().max(g.output_width());
            width = width.max(w);
            for (c, list) in by_anchor.iter_mut().enumerate() {
                if c + w <= columns {
                    list.push(Cand {
                        gpc: t,
                        inputs: g.inputs().to_vec(),
                        outputs: g.outputs().to_vec(),
                        cost: u64::from(g.cost()) * SCALE,
                    });
                }
            }
        }
        let min_cost = by_anchor.iter().flatten().map(|c| c.cost).min().unwrap_or(u64::MAX);
        let adder_weight = match model.mode() {
            ObjectiveMode::Total => SCALE + 1,
            ObjectiveMode::Gpc => 1,
        };
        Self {
            stages: model.stages(),
            columns,
            width,
            rule: model.final_rule(),
            adder_weight,
            by_anchor,
            min_cost,
            memo: HashMap::new(),
            deadline,
            ticks: 0,
        }
    }

    fn tick(&mut self) -> Result<(), Timeout> {
        self.ticks += 1;
        if self.ticks % 1024 == 0 && Instant::now() >= self.deadline {
            return Err(Timeout);
        }
        Ok(())
    }

    /// Scaled cost of handing `heap` to the final adder, or `None` when the
    /// rule is violated.
    fn residue_cost(&self, heap: &[u32]) -> Option<u64> {
        if !self.rule.holds(heap) {
            return None;
        }
        let adder = crate::gpclib::final_adder_cost(heap);
        Some(u64::from(adder) * self.adder_weight)
    }

    fn lower_bound(&self, heap: &[u32]) -> u64 {
        if self.rule.holds(heap) {
            0
        } else {
            self.min_cost
        }
    }

    /// Copies of `cand` at `anchor` worth considering given the remaining
    /// uncovered bits: beyond this every extra copy is redundant.
    fn max_copies(&self, cand: &Cand, heap: &[u32], anchor: usize, cap: &[u32]) -> u32 {
        let mut k = 0;
        for (i, &m) in cand.inputs.iter().enumerate() {
            if m == 0 {
                continue;
            }
            let rest = heap[anchor + i] - cap[i];
            k = k.max(rest.div_ceil(m));
        }
        k
    }

    /// Expands every state by all useful counts of each candidate anchored at `c`.
    fn place_column<T: Clone + Eq + std::hash::Hash>(
        &mut self,
        heap: &[u32],
        c: usize,
        stage: usize,
        states: Vec<(Window, T, u64, Plan)>,
        bound: u64,
    ) -> Result<Vec<(Window, T, u64, Plan)>, Timeout> {
        let cands = self.by_anchor[c].clone();
        let mut states = states;
        for cand in &cands {
            // equal (window, acc) pairs differ only in cost, keep the cheapest
            let mut next: IndexMap<(Window, T), (u64, Plan)> = IndexMap::with_capacity(states.len());
            for (win, acc, cost, plan) in states {
                let kmax = self.max_copies(cand, heap, c, &win.cap);
                for k in 0..=kmax {
                    self.tick()?;
                    let total = cost + cand.cost * u64::from(k);
                    if total >= bound {
                        break;
                    }
                    let mut w = win.clone();
                    for (i, &m) in cand.inputs.iter().enumerate() {
                        w.cap[i] = (w.cap[i] + m * k).min(heap[c + i]);
                    }
                    for (j, &q) in cand.outputs.iter().enumerate() {
                        w.out[j] += q * k;
                    }
                    match next.entry((w, acc.clone())) {
                        indexmap::map::Entry::Occupied(mut e) => {
                            if total < e.get().0 {
                                e.insert((total, cons(&plan, stage, cand.gpc, c, k)));
                            }
                        }
                        indexmap::map::Entry::Vacant(e) => {
                            e.insert((total, cons(&plan, stage, cand.gpc, c, k)));
                        }
                    }
                }
                if next.len() > STATE_LIMIT {
                    return Err(Timeout);
                }
            }
            states = next.into_iter().map(|((w, acc), (cost, plan))| (w, acc, cost, plan)).collect();
        }
        Ok(states)
    }

    /// Cheapest last stage turning `heap` into an acceptable residue.
    fn last_stage(&mut self, heap: &[u32], bound: u64) -> Result<Option<(u64, Plan)>, Timeout> {
        let stage = self.stages - 1;
        // accumulator: (carry into the column, adder started, empty columns since last bit)
        type Acc = (u32, bool, u32);
        let mut states: Vec<(Window, Acc, u64, Plan)> = vec![(Window::new(self.width), (0, false, 0), 0, None)];
        for c in 0..self.columns {
            let expanded = self.place_column(heap, c, stage, states, bound)?;
            let mut best: HashMap<(Window, Acc), (u64, Plan)> = HashMap::new();
            for (mut w, (carry, started, gap), cost, plan) in expanded {
                let n = heap[c] - w.cap[0] + w.out[0];
                let ok = match self.rule {
                    FinalRule::RaggedCpa => n <= 4 && carry <= 2 && n + carry <= 5,
                    FinalRule::Ternary => n <= 3,
                };
                if !ok {
                    continue;
                }
                let (started2, gap2, extra) = match (started, n) {
                    (false, n) if n >= 2 => (true, 0, 1),
                    (false, _) => (false, 0, 0),
                    (true, 0) => (true, gap + 1, 0),
                    (true, _) => (true, 0, gap + 1),
                };
                let cost = cost + u64::from(extra) * self.adder_weight;
                if cost >= bound {
                    continue;
                }
                w.shift();
                let key = (w, ((carry + n) / 2, started2, gap2));
                match best.get(&key) {
                    Some((old, _)) if *old <= cost => {}
                    _ => {
                        best.insert(key, (cost, plan));
                    }
                }
            }
            states = best.into_iter().map(|((w, acc), (cost, plan))| (w, acc, cost, plan)).collect();
            // deterministic order regardless of hashing
            states.sort_by(|a, b| a.2.cmp(&b.2).then_with(|| a.1.cmp(&b.1)).then_with(|| a.0.cap.cmp(&b.0.cap)).then_with(|| a.0.out.cmp(&b.0.out)));
        }
        Ok(states.into_iter().map(|(_, _, cost, plan)| (cost, plan)).min_by_key(|(cost, _)| *cost))
    }

    /// Pareto-minimal (next heap, cost) pairs for an intermediate stage.
    fn stage_options(&mut self, heap: &[u32], stage: usize, bound: u64) -> Result<Vec<(Vec<u32>, u64, Plan)>, Timeout> {
        let mut states: Vec<(Window, Vec<u32>, u64, Plan)> = vec![(Window::new(self.width), Vec::new(), 0, None)];
        for c in 0..self.columns {
            let expanded = self.place_column(heap, c, stage, states, bound)?;
            let mut groups: IndexMap<Window, Vec<(Vec<u32>, u64, Plan)>> = IndexMap::new();
            for (mut w, mut prefix, cost, plan) in expanded {
                prefix.push(heap[c] - w.cap[0] + w.out[0]);
                w.shift();
                groups.entry(w).or_default().push((prefix, cost, plan));
            }
            states = Vec::new();
            for (w, list) in groups {
                for (prefix, cost, plan) in pareto(list) {
                    states.push((w.clone(), prefix, cost, plan));
                }
            }
        }
        let all: Vec<(Vec<u32>, u64, Plan)> = states.into_iter().map(|(_, p, c, plan)| (p, c, plan)).collect();
        Ok(pareto(all))
    }

    /// Cheapest completion of `heap` with `k` stages left, if cheaper than `bound`.
    fn best(&mut self, heap: &[u32], k: usize, bound: u64) -> Result<Option<(u64, Plan)>, Timeout> {
        if k == 0 {
            return Ok(self.residue_cost(heap).filter(|&c| c < bound).map(|c| (c, None)));
        }
        let key = (heap.to_vec(), k);
        match self.memo.get(&key) {
            Some(Memo::Exact(found)) => {
                return Ok(found.clone().filter(|(c, _)| *c < bound));
            }
            Some(Memo::AtLeast(lb)) if *lb >= bound => return Ok(None),
            _ => {}
        }
        let found = if k == 1 {
            self.last_stage(heap, bound)?
        } else {
            let stage = self.stages - k;
            let mut options = self.stage_options(heap, stage, bound)?;
            options.sort_by(|a, b| {
                (a.1 + self.lower_bound(&a.0))
                    .cmp(&(b.1 + self.lower_bound(&b.0)))
                    .then_with(|| a.0.cmp(&b.0))
            });
            let mut limit = bound;
            let mut found: Option<(u64, Plan)> = None;
            for (next, cost, plan) in options {
                if cost + self.lower_bound(&next) >= limit {
                    break;
                }
                if let Some((rest, tail)) = self.best(&next, k - 1, limit - cost)? {
                    limit = cost + rest;
                    found = Some((limit, concat(&plan, &tail)));
                }
            }
            found
        };
        let entry = match &found {
            Some(_) => Memo::Exact(found.clone()),
            None => Memo::AtLeast(bound),
        };
        if self.memo.len() >= MEMO_LIMIT {
            self.memo.clear();
        }
        self.memo.insert(key, entry);
        Ok(found)
    }

    fn scaled_cost(&self, model: &IlpModel, counts: &IndexMap<Slot, u32>) -> Option<u64> {
        let values = model.complete(counts)?;
        model.check(&values).ok()?;
        let gpc: u64 = counts
            .iter()
            .map(|(slot, &k)| u64::from(model.gpcs()[slot.gpc].cost()) * u64::from(k) * SCALE)
            .sum();
        let residue: Vec<u32> = (0..model.columns())
            .map(|c| values[model.n_var(model.stages(), c)] as u32)
            .collect();
        Some(gpc + self.residue_cost(&residue)?)
    }
}

fn pareto<P: Clone>(mut list: Vec<(Vec<u32>, u64, P)>) -> Vec<(Vec<u32>, u64, P)> {
    list.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    let mut kept: Vec<(Vec<u32>, u64, P)> = Vec::new();
    for item in list {
        let dominated = kept
            .iter()
            .any(|(h, c, _)| *c <= item.1 && h.iter().zip(&item.0).all(|(a, b)| a <= b));
        if !dominated {
            kept.push(item);
        }
    }
    kept
}

/// Minimises the model objective by exhaustive search. `incumbent` seeds the
/// bound and is returned if nothing cheaper exists.
pub fn solve(model: &IlpModel, time_budget: Duration, incumbent: Option<&IndexMap<Slot, u32>>) -> BuiltinResult {
    let deadline = Instant::now() + time_budget;
    let mut search = Search::new(model, deadline);
    let heap: Vec<u32> = (0..model.columns()).map(|c| model.heap().height(c)).collect();
    let seeded = incumbent.and_then(|inc| search.scaled_cost(model, inc).map(|c| (c, inc.clone())));
    let bound = seeded.as_ref().map_or(u64::MAX, |(c, _)| *c);
    let result = search.best(&heap, model.stages(), bound);
    let explored = search.ticks;
    match result {
        Ok(Some((_, plan))) => BuiltinResult {
            counts: Some(plan_counts(&plan)),
            outcome: Outcome::Optimal,
            explored,
        },
        Ok(None) => BuiltinResult {
            counts: seeded.map(|(_, c)| c),
            outcome: Outcome::Optimal,
            explored,
        },
        Err(Timeout) => BuiltinResult {
            counts: seeded.map(|(_, c)| c),
            outcome: Outcome::TimedOut,
            explored,
        },
    }
}

fn plan_counts(plan: &Plan) -> IndexMap<Slot, u32> {
    let mut items = Vec::new();
    let mut cur = plan.clone();
    while let Some(n) = cur {
        items.push((
            Slot {
                stage: n.stage,
                gpc: n.gpc,
                anchor: n.anchor,
            },
            n.count,
        ));
        cur = n.next.clone();
    }
    items.sort();
    let mut out = IndexMap::new();
    for (slot, k) in items {
        *out.entry(slot).or_insert(0) += k;
    }
    out
}

/// Exported for tests: the scaled objective the search minimises.
pub fn scaled_objective(model: &IlpModel, counts: &IndexMap<Slot, u32>) -> Option<u64> {
    Search::new(model, Instant::now() + Duration::from_secs(1)).scaled_cost(model, counts)
}
