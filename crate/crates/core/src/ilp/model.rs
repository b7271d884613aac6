use std::fmt;

use indexmap::IndexMap;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::benchgen::Benchmark;
use crate::bitheap::BitHeap;
use crate::gpclib::{ArchProfile, FinalRule, Gpc};

pub type Coef = Ratio<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    Integer,
    Binary,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: i64,
    pub upper: Option<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(usize, Coef)>,
    pub sense: Sense,
    pub rhs: Coef,
}

/// What the objective counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectiveMode {
    /// Counter LEs plus final-adder LEs. Among equal totals a smaller adder wins.
    #[default]
    Total,
    /// Counter LEs only.
    Gpc,
}

impl ObjectiveMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ObjectiveMode::Total => "total",
            ObjectiveMode::Gpc => "gpc",
        }
    }
}

impl std::str::FromStr for ObjectiveMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "total" => Ok(ObjectiveMode::Total),
            "gpc" => Ok(ObjectiveMode::Gpc),
            other => Err(format!("unknown objective {other:?}, expected total or gpc")),
        }
    }
}

/// Weight of one final-adder LE in the objective. Slightly above one so
/// that, at equal LE totals, the solution with the smaller adder is preferred.
pub const ADDER_WEIGHT: (i64, i64) = (129, 128);

/// One placement slot: counter `t` anchored at column `c` in stage `s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slot {
    pub stage: usize,
    pub gpc: usize,
    pub anchor: usize,
}

/// Integer program for one (heap, profile, stage budget) triple.
///
/// Stage `0` holds the input heap; placements of stage `s` consume
/// `N_s` and produce `N_{s+1}`; `N_St` is the residue handed to the final
/// adder.
#[derive(Clone, Debug)]
pub struct IlpModel {
    stages: usize,
    columns: usize,
    heap: BitHeap,
    gpcs: Vec<Gpc>,
    final_rule: FinalRule,
    mode: ObjectiveMode,
    vars: Vec<Variable>,
    n: Vec<Vec<usize>>,
    cb: Vec<Vec<usize>>,
    r: IndexMap<Slot, usize>,
    adder: Option<(Vec<usize>, Vec<usize>)>,
    constraints: Vec<Constraint>,
    objective: Vec<(usize, Coef)>,
}

/// `C = bits(max_value) + 1`.
pub fn column_count(heap: &BitHeap) -> usize {
    let max = heap.max_value();
    (128 - max.leading_zeros()) as usize + 1
}

fn int(v: i64) -> Coef {
    Ratio::from_integer(v)
}

impl IlpModel {
    /// Builds the model for `benchmark` under `profile` with `stages`
    /// compression stages.
    pub fn build(benchmark: &Benchmark, profile: &ArchProfile, stages: usize, mode: ObjectiveMode) -> Self {
        Self::for_heap(benchmark.heap(), profile, stages, mode)
    }

    pub fn for_heap(heap: &BitHeap, profile: &ArchProfile, stages: usize, mode: ObjectiveMode) -> Self {
        let columns = column_count(heap);
        let gpcs: Vec<Gpc> = profile.active_gpcs().cloned().collect();
        let mut m = IlpModel {
            stages,
            columns,
            heap: heap.normalized(),
            gpcs,
            final_rule: profile.final_rule(),
            mode,
            vars: Vec::new(),
            n: Vec::new(),
            cb: Vec::new(),
            r: IndexMap::new(),
            adder: None,
            constraints: Vec::new(),
            objective: Vec::new(),
        };
        m.declare();
        m.constrain();
        m
    }

    fn var(&mut self, name: String, kind: VarKind, upper: Option<i64>) -> usize {
        self.vars.push(Variable {
            name,
            kind,
            lower: 0,
            upper,
        });
        self.vars.len() - 1
    }

    fn declare(&mut self) {
        let (st, cols) = (self.stages, self.columns);
        for s in 0..=st {
            let row = (0..cols).map(|c| self.var(format!("N_{s}_{c}"), VarKind::Integer, None)).collect();
            self.n.push(row);
        }
        for s in 0..=st {
            let row = (0..cols)
                .map(|c| {
                    let upper = (c == 0).then_some(0);
                    self.var(format!("Cb_{s}_{c}"), VarKind::Integer, upper)
                })
                .collect();
            self.cb.push(row);
        }
        for s in 0..st {
            for t in 0..self.gpcs.len() {
                let g = &self.gpcs[t];
                let width = g.input_width().max(g.output_width());
                if width > cols {
                    continue;
                }
                for c in 0..=cols - width {
                    let id = self.var(format!("R_{s}_{t}_{c}"), VarKind::Integer, None);
                    self.r.insert(
                        Slot {
                            stage: s,
                            gpc: t,
                            anchor: c,
                        },
                        id,
                    );
                    self.objective.push((id, int(i64::from(self.gpcs[t].cost()))));
                }
            }
        }
        if self.mode == ObjectiveMode::Total {
            let a: Vec<usize> = (0..cols).map(|c| self.var(format!("A_{c}"), VarKind::Binary, Some(1))).collect();
            let y: Vec<usize> = (0..cols).map(|c| self.var(format!("Y_{c}"), VarKind::Binary, Some(1))).collect();
            for &id in &a {
                self.objective.push((id, Ratio::new(ADDER_WEIGHT.0, ADDER_WEIGHT.1)));
            }
            self.adder = Some((a, y));
        }
        self.objective.retain(|(_, k)| *k != int(0));
    }

    fn push(&mut self, name: String, terms: Vec<(usize, Coef)>, sense: Sense, rhs: Coef) {
        self.constraints.push(Constraint { name, terms, sense, rhs });
    }

    fn constrain(&mut self) {
        let (st, cols) = (self.stages, self.columns);
        for c in 0..cols {
            let x = i64::from(self.heap.height(c));
            self.push(format!("in_{c}"), vec![(self.n[0][c], int(1))], Sense::Eq, int(x));
        }
        for s in 1..=st {
            for c in 0..cols {
                let mut cover = Vec::new();
                let mut produce = Vec::new();
                for (slot, &id) in &self.r {
                    if slot.stage != s - 1 || slot.anchor > c {
                        continue;
                    }
                    let g = &self.gpcs[slot.gpc];
                    let m = g.input(c - slot.anchor);
                    if m > 0 {
                        cover.push((id, int(i64::from(m))));
                    }
                    let k = g.output(c - slot.anchor);
                    if k > 0 {
                        produce.push((id, int(i64::from(k))));
                    }
                }
                cover.push((self.n[s - 1][c], int(-1)));
                produce.push((self.n[s][c], int(-1)));
                self.push(format!("cov_{s}_{c}"), cover, Sense::Ge, int(0));
                self.push(format!("prod_{s}_{c}"), produce, Sense::Eq, int(0));
            }
        }
        let half = Ratio::new(-1, 2);
        for s in 0..=st {
            for c in 1..cols {
                let terms = vec![(self.cb[s][c], int(1)), (self.cb[s][c - 1], half), (self.n[s][c - 1], half)];
                self.push(format!("cylo_{s}_{c}"), terms.clone(), Sense::Ge, Ratio::new(-999, 1000));
                self.push(format!("cyhi_{s}_{c}"), terms, Sense::Le, int(0));
            }
        }
        for c in 0..cols {
            let (n, cb) = (self.n[st][c], self.cb[st][c]);
            match self.final_rule {
                FinalRule::RaggedCpa => {
                    self.push(format!("fin_n_{c}"), vec![(n, int(1))], Sense::Le, int(4));
                    self.push(format!("fin_cb_{c}"), vec![(cb, int(1))], Sense::Le, int(2));
                    self.push(format!("fin_sum_{c}"), vec![(n, int(1)), (cb, int(1))], Sense::Le, int(5));
                }
                FinalRule::Ternary => {
                    self.push(format!("fin_n_{c}"), vec![(n, int(1))], Sense::Le, int(3));
                }
            }
        }
        if let Some((a, y)) = self.adder.clone() {
            let top = i64::from(self.final_rule.max_height());
            for c in 0..cols {
                let n = self.n[st][c];
                self.push(format!("ynz_{c}"), vec![(n, int(1)), (y[c], int(-top))], Sense::Le, int(0));
                if c + 1 < cols {
                    self.push(format!("ypre_{c}"), vec![(y[c], int(1)), (y[c + 1], int(-1))], Sense::Ge, int(0));
                }
                self.push(format!("aon_{c}"), vec![(n, int(1)), (a[c], int(1 - top))], Sense::Le, int(1));
                if c > 0 {
                    self.push(
                        format!("arun_{c}"),
                        vec![(a[c], int(1)), (a[c - 1], int(-1)), (y[c], int(-1))],
                        Sense::Ge,
                        int(-1),
                    );
                }
            }
        }
    }

    pub fn stages(&self) -> usize {
        self.stages
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn heap(&self) -> &BitHeap {
        &self.heap
    }

    /// Counters indexed by the `t` of `R_s_t_c`.
    pub fn gpcs(&self) -> &[Gpc] {
        &self.gpcs
    }

    pub fn final_rule(&self) -> FinalRule {
        self.final_rule
    }

    pub fn mode(&self) -> ObjectiveMode {
        self.mode
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &[(usize, Coef)] {
        &self.objective
    }

    pub fn slots(&self) -> impl Iterator<Item = (Slot, usize)> + '_ {
        self.r.iter().map(|(s, &id)| (*s, id))
    }

    pub fn slot(&self, stage: usize, gpc: usize, anchor: usize) -> Option<usize> {
        self.r.get(&Slot { stage, gpc, anchor }).copied()
    }

    pub fn n_var(&self, stage: usize, column: usize) -> usize {
        self.n[stage][column]
    }

    pub fn cb_var(&self, stage: usize, column: usize) -> usize {
        self.cb[stage][column]
    }

    pub fn placement_var_count(&self) -> usize {
        self.r.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    pub fn objective_value(&self, values: &[i64]) -> Coef {
        self.objective.iter().map(|&(id, k)| k * values[id]).sum()
    }

    /// Checks an integer point against every bound and constraint.
    pub fn check(&self, values: &[i64]) -> Result<(), ModelViolation> {
        if values.len() != self.vars.len() {
            return Err(ModelViolation(format!(
                "assignment has {} values for {} variables",
                values.len(),
                self.vars.len()
            )));
        }
        for (v, &x) in self.vars.iter().zip(values) {
            if x < v.lower || v.upper.is_some_and(|u| x > u) {
                return Err(ModelViolation(format!("{} = {x} outside its bounds", v.name)));
            }
        }
        for con in &self.constraints {
            let lhs: Coef = con.terms.iter().map(|&(id, k)| k * values[id]).sum();
            let ok = match con.sense {
                Sense::Le => lhs <= con.rhs,
                Sense::Ge => lhs >= con.rhs,
                Sense::Eq => lhs == con.rhs,
            };
            if !ok {
                return Err(ModelViolation(format!(
                    "{}: left side {} {} {}",
                    con.name,
                    lhs,
                    con.sense.symbol(),
                    con.rhs
                )));
            }
        }
        Ok(())
    }

    /// Completes counts of real counters into a full assignment: pseudo-wires
    /// forward whatever stays uncovered, and stage heights, carries and adder
    /// indicators are derived. Pseudo-wire entries in `counts` are ignored.
    /// Returns `None` when a count refers to a slot outside the model.
    pub fn complete(&self, counts: &IndexMap<Slot, u32>) -> Option<Vec<i64>> {
        let mut values = vec![0i64; self.vars.len()];
        let mut heights = vec![vec![0i64; self.columns]; self.stages + 1];
        for c in 0..self.columns {
            heights[0][c] = i64::from(self.heap.height(c));
        }
        let wire = self.gpcs.iter().position(|g| g.is_pseudo_wire());
        for s in 0..self.stages {
            let mut cap = vec![0i64; self.columns];
            for (slot, &k) in counts {
                let id = *self.r.get(slot)?;
                if slot.stage != s || Some(slot.gpc) == wire {
                    continue;
                }
                values[id] = i64::from(k);
                let g = &self.gpcs[slot.gpc];
                for (i, &m) in g.inputs().iter().enumerate() {
                    cap[slot.anchor + i] += i64::from(m) * i64::from(k);
                }
                for (j, &q) in g.outputs().iter().enumerate() {
                    heights[s + 1][slot.anchor + j] += i64::from(q) * i64::from(k);
                }
            }
            // forward every bit left uncovered
            for c in 0..self.columns {
                let rest = (heights[s][c] - cap[c]).max(0);
                if rest > 0 {
                    values[self.r[&Slot { stage: s, gpc: wire?, anchor: c }]] = rest;
                    heights[s + 1][c] += rest;
                }
            }
        }
        for s in 0..=self.stages {
            let mut carry = 0i64;
            for c in 0..self.columns {
                values[self.n[s][c]] = heights[s][c];
                values[self.cb[s][c]] = carry;
                carry = (carry + heights[s][c]) / 2;
            }
        }
        if let Some((a, y)) = &self.adder {
            let last = &heights[self.stages];
            let hi = last.iter().rposition(|&h| h > 0);
            let lo = last.iter().position(|&h| h >= 2);
            for c in 0..self.columns {
                values[y[c]] = i64::from(hi.is_some_and(|hi| c <= hi));
                values[a[c]] = i64::from(matches!((lo, hi), (Some(lo), Some(hi)) if lo <= c && c <= hi));
            }
        }
        Some(values)
    }

    /// Placement counts recorded in an assignment.
    pub fn placements(&self, values: &[i64]) -> IndexMap<Slot, u32> {
        self.r
            .iter()
            .filter(|(_, &id)| values[id] > 0)
            .map(|(slot, &id)| (*slot, values[id] as u32))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelViolation(pub String);

impl fmt::Display for ModelViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}
