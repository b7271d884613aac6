//! Micro-benchmark bit heaps.
//!
//! Spec strings: `S:128`, `D:256`, `ADD:6x7`, `MAC3:8`, `FIR3:8`,
//! `BNN:3x3x256` (or `BNN:2304`), `HEAP:0,6,0,6`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitheap::{BitAssignment, BitHeap, HeapError, MAX_TOTAL_BITS};
use crate::gpclib::ArchProfile;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BenchError {
    #[error("invalid benchmark spec {spec:?}: {reason}")]
    Spec { spec: String, reason: String },
    #[error("{0}")]
    Range(String),
    #[error(transparent)]
    Heap(#[from] HeapError),
}

/// Generator family plus parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BenchKind {
    Popcount { n: u32 },
    DoublePopcount { n: u32 },
    MultiAdd { k: u32, b: u32 },
    Mac3 { n: u32 },
    Fir3 { n: u32 },
    Bnn { n: u32, shape: Option<Vec<u32>> },
    Heap { heap: BitHeap },
}

/// A heap ready for compressor tree synthesis, with the primary stage that
/// produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Benchmark {
    kind: BenchKind,
    heap: BitHeap,
    fused_units: u32,
    fixed_primary_cost: u32,
    primary_desc: String,
}

fn range(msg: impl Into<String>) -> BenchError {
    BenchError::Range(msg.into())
}

/// Single-column popcount of `n` bits.
pub fn popcount(n: u32) -> Result<Benchmark, BenchError> {
    if !(1..=MAX_TOTAL_BITS).contains(&n) {
        return Err(range(format!("popcount size {n} outside 1..={MAX_TOTAL_BITS}")));
    }
    Benchmark::plain(BenchKind::Popcount { n }, vec![n])
}

/// Two-column count: `n` bits in each of columns 0 and 1.
pub fn double_popcount(n: u32) -> Result<Benchmark, BenchError> {
    if n == 0 || 2 * u64::from(n) > u64::from(MAX_TOTAL_BITS) {
        return Err(range(format!("double popcount size {n} outside 1..={}", MAX_TOTAL_BITS / 2)));
    }
    Benchmark::plain(BenchKind::DoublePopcount { n }, vec![n, n])
}

/// `k` operands of `b` bits each.
pub fn multi_add(k: u32, b: u32) -> Result<Benchmark, BenchError> {
    if k == 0 || b == 0 {
        return Err(range("multi-addition needs at least one operand of one bit"));
    }
    Benchmark::plain(BenchKind::MultiAdd { k, b }, vec![k; b as usize])
}

/// Number of partial products `a_i * b_j` with `i + j = c` for two `n`-bit operands.
fn products_in_column(n: u32, c: u32) -> u32 {
    let lo = c.saturating_sub(n - 1);
    let hi = c.min(n - 1);
    if hi < lo {
        0
    } else {
        hi - lo + 1
    }
}

/// Raw partial-product heap of a 3-term multiply-accumulate of `n`-bit operands.
pub fn mac3_raw(n: u32) -> Vec<u32> {
    (0..2 * n - 1).map(|c| 3 * products_in_column(n, c)).collect()
}

fn mac3_like(n: u32, fir: bool) -> Result<Benchmark, BenchError> {
    if n == 0 {
        return Err(range("MAC3 operand width must be at least 1"));
    }
    if n > 31 {
        return Err(range(format!("MAC3 operand width {n} exceeds 31")));
    }
    let raw = mac3_raw(n);
    let mut heap = vec![0u32; raw.len() + 1];
    let mut units = 0;
    for (c, &h) in raw.iter().enumerate() {
        let f = h / 3;
        heap[c] += f + h % 3;
        heap[c + 1] += f;
        units += f;
    }
    let kind = if fir { BenchKind::Fir3 { n } } else { BenchKind::Mac3 { n } };
    let approx = if fir { " (FIR-3 approximated by MAC3)" } else { "" };
    Ok(Benchmark {
        kind,
        heap: BitHeap::new(heap)?,
        fused_units: 0,
        fixed_primary_cost: 2 * units,
        primary_desc: format!("{units} AND-product full adders at 2 LEs{approx}"),
    })
}

/// `A0*B0 + A1*B1 + A2*B2` with `n`-bit unsigned operands. Same-rank product
/// triples are fused into full adders before tree synthesis.
pub fn mac3(n: u32) -> Result<Benchmark, BenchError> {
    mac3_like(n, false)
}

/// Three-tap FIR, modelled as [`mac3`].
pub fn fir3(n: u32) -> Result<Benchmark, BenchError> {
    mac3_like(n, true)
}

/// XnorPopcount over `n` weight/activation pairs. Groups of three pairs
/// become one fused sum/carry unit; one or two leftover pairs cost one LE
/// each and add a bit to column 0.
pub fn bnn_xnorpopcount(n: u32) -> Result<Benchmark, BenchError> {
    bnn(n, None)
}

fn bnn(n: u32, shape: Option<Vec<u32>>) -> Result<Benchmark, BenchError> {
    if n < 3 {
        return Err(range(format!("XnorPopcount needs at least 3 pairs, got {n}")));
    }
    let f = n / 3;
    let r = n % 3;
    let desc = if r == 0 {
        format!("{f} fused XnorPopcount units")
    } else {
        format!("{f} fused XnorPopcount units, {r} single XNOR LEs")
    };
    Ok(Benchmark {
        kind: BenchKind::Bnn { n, shape },
        heap: BitHeap::new(vec![f + r, f])?,
        fused_units: f,
        fixed_primary_cost: r,
        primary_desc: desc,
    })
}

/// Custom heap, taken as is.
pub fn custom(heap: BitHeap) -> Benchmark {
    Benchmark {
        kind: BenchKind::Heap { heap: heap.clone() },
        heap,
        fused_units: 0,
        fixed_primary_cost: 0,
        primary_desc: String::new(),
    }
}

impl Benchmark {
    fn plain(kind: BenchKind, columns: Vec<u32>) -> Result<Self, BenchError> {
        Ok(Self {
            kind,
            heap: BitHeap::new(columns)?,
            fused_units: 0,
            fixed_primary_cost: 0,
            primary_desc: String::new(),
        })
    }

    /// Parses a spec string such as `ADD:6x7`.
    pub fn parse(spec: &str) -> Result<Self, BenchError> {
        let bad = |reason: &str| BenchError::Spec {
            spec: spec.to_string(),
            reason: reason.to_string(),
        };
        let (family, args) = spec.trim().split_once(':').ok_or_else(|| bad("expected FAMILY:ARGS"))?;
        let int = |s: &str| -> Result<u32, BenchError> {
            s.trim().parse().map_err(|_| bad(&format!("{s:?} is not a non-negative integer")))
        };
        let dims = |s: &str| -> Result<Vec<u32>, BenchError> { s.split(['x', 'X']).map(int).collect() };
        match family.trim().to_ascii_uppercase().as_str() {
            "S" => popcount(int(args)?),
            "D" => double_popcount(int(args)?),
            "ADD" => match dims(args)?.as_slice() {
                [k, b] => multi_add(*k, *b),
                _ => Err(bad("expected ADD:<operands>x<bits>")),
            },
            "MAC3" => mac3(int(args)?),
            "FIR3" => fir3(int(args)?),
            "BNN" => {
                let d = dims(args)?;
                let n = d.iter().try_fold(1u32, |acc, &x| acc.checked_mul(x)).ok_or_else(|| bad("size overflow"))?;
                bnn(n, (d.len() > 1).then_some(d))
            }
            "HEAP" => Ok(custom(BitHeap::parse(args)?)),
            _ => Err(bad("unknown family, expected S, D, ADD, MAC3, FIR3, BNN or HEAP")),
        }
    }

    pub fn kind(&self) -> &BenchKind {
        &self.kind
    }

    /// Heap left after the primary stage.
    pub fn heap(&self) -> &BitHeap {
        &self.heap
    }

    /// Short name as used in result tables, e.g. `S128`.
    pub fn name(&self) -> String {
        match &self.kind {
            BenchKind::Popcount { n } => format!("S{n}"),
            BenchKind::DoublePopcount { n } => format!("D{n}"),
            BenchKind::MultiAdd { k, b } => format!("ADD{k}x{b}"),
            BenchKind::Mac3 { n } => format!("MAC3x{n}"),
            BenchKind::Fir3 { n } => format!("FIR3x{n}"),
            BenchKind::Bnn { n, shape } => match shape {
                Some(d) => format!("BNN{}", join(d, "x")),
                None => format!("BNN{n}"),
            },
            BenchKind::Heap { heap } => format!("HEAP[{}]", heap.to_literal()),
        }
    }

    /// Spec string that [`Benchmark::parse`] maps back to this benchmark.
    pub fn spec(&self) -> String {
        match &self.kind {
            BenchKind::Popcount { n } => format!("S:{n}"),
            BenchKind::DoublePopcount { n } => format!("D:{n}"),
            BenchKind::MultiAdd { k, b } => format!("ADD:{k}x{b}"),
            BenchKind::Mac3 { n } => format!("MAC3:{n}"),
            BenchKind::Fir3 { n } => format!("FIR3:{n}"),
            BenchKind::Bnn { n, shape } => match shape {
                Some(d) => format!("BNN:{}", join(d, "x")),
                None => format!("BNN:{n}"),
            },
            BenchKind::Heap { heap } => format!("HEAP:{}", heap.to_literal()),
        }
    }

    /// LEs spent in the primary stage under `profile`.
    pub fn primary_cost(&self, profile: &ArchProfile) -> u32 {
        self.fused_units * profile.fused_unit_cost() + self.fixed_primary_cost
    }

    /// Fused XnorPopcount units, costed per profile.
    pub fn fused_units(&self) -> u32 {
        self.fused_units
    }

    pub fn primary_desc(&self) -> &str {
        &self.primary_desc
    }

    /// Number of independent input bits before the primary stage.
    pub fn raw_bit_count(&self) -> u32 {
        match &self.kind {
            BenchKind::Mac3 { n } | BenchKind::Fir3 { n } => 6 * n,
            BenchKind::Bnn { n, .. } => 2 * n,
            _ => self.heap.total_bits(),
        }
    }

    /// Runs the primary stage on concrete inputs. Returns the bits entering
    /// the compressor tree and the exact result the whole circuit must
    /// produce.
    ///
    /// Raw bit layout: plain heaps take bits column by column, lowest column
    /// first. MAC3 takes `a0, b0, a1, b1, a2, b2`, each `n` bits lsb first.
    /// BNN takes all `n` weights, then all `n` activations.
    pub fn evaluate_raw(&self, raw: &[bool]) -> (BitAssignment, u128) {
        assert_eq!(raw.len(), self.raw_bit_count() as usize, "raw input width");
        match &self.kind {
            BenchKind::Mac3 { n } | BenchKind::Fir3 { n } => {
                let n = *n as usize;
                let word = |t: usize| &raw[t * n..(t + 1) * n];
                let value = |bits: &[bool]| -> u128 {
                    bits.iter().enumerate().map(|(i, &b)| u128::from(b) << i).sum()
                };
                let expected = (0..3).map(|k| value(word(2 * k)) * value(word(2 * k + 1))).sum();
                let mut columns = vec![Vec::new(); self.heap.len()];
                let mut carries = vec![Vec::new(); self.heap.len()];
                for c in 0..2 * n - 1 {
                    let lo = c.saturating_sub(n - 1);
                    for i in lo..=c.min(n - 1) {
                        let j = c - i;
                        let p: Vec<bool> = (0..3).map(|k| word(2 * k)[i] && word(2 * k + 1)[j]).collect();
                        let (sum, carry) = full_add(p[0], p[1], p[2]);
                        columns[c].push(sum);
                        carries[c + 1].push(carry);
                    }
                }
                for (col, cs) in columns.iter_mut().zip(carries) {
                    col.extend(cs);
                }
                (BitAssignment::from_columns(columns), expected)
            }
            BenchKind::Bnn { n, .. } => {
                let n = *n as usize;
                let (w, x) = raw.split_at(n);
                let e: Vec<bool> = w.iter().zip(x).map(|(&w, &x)| w == x).collect();
                let expected = e.iter().filter(|&&b| b).count() as u128;
                let mut sums = Vec::new();
                let mut carries = Vec::new();
                let groups = n / 3;
                for u in 0..groups {
                    let (s, c) = xnor_popcount_unit(&w[3 * u..3 * u + 3], &x[3 * u..3 * u + 3]);
                    sums.push(s);
                    carries.push(c);
                }
                sums.extend_from_slice(&e[3 * groups..]);
                (BitAssignment::from_columns(vec![sums, carries]), expected)
            }
            _ => {
                let mut columns = Vec::with_capacity(self.heap.len());
                let mut rest = raw;
                for &h in self.heap.columns() {
                    let (col, tail) = rest.split_at(h as usize);
                    columns.push(col.to_vec());
                    rest = tail;
                }
                let a = BitAssignment::from_columns(columns);
                let v = a.value();
                (a, v)
            }
        }
    }

    /// Primary stage on uniformly random inputs.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (BitAssignment, u128) {
        let raw: Vec<bool> = (0..self.raw_bit_count()).map(|_| rng.gen()).collect();
        self.evaluate_raw(&raw)
    }

    /// Primary stage on the inputs encoded by the bits of `index`.
    pub fn from_index(&self, index: u64) -> (BitAssignment, u128) {
        let raw: Vec<bool> = (0..self.raw_bit_count()).map(|i| i < 64 && (index >> i) & 1 == 1).collect();
        self.evaluate_raw(&raw)
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Benchmark {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

fn join(v: &[u32], sep: &str) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

fn full_add(a: bool, b: bool, c: bool) -> (bool, bool) {
    (a ^ b ^ c, (a && b) || (a && c) || (b && c))
}

/// One fused unit: the popcount of three XNORs as (sum, carry).
pub fn xnor_popcount_unit(w: &[bool], x: &[bool]) -> (bool, bool) {
    let e: Vec<bool> = w.iter().zip(x).map(|(&w, &x)| w == x).collect();
    full_add(e[0], e[1], e[2])
}
