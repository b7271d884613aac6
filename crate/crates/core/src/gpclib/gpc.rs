use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::GpcError;

/// Implementation style of a counter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GpcKind {
    LutBased,
    SliceBased,
    /// `C1:1`, a bit forwarded unchanged to the next stage.
    PseudoWire,
    /// A chained compressor modelled by a single-column placement proxy.
    Compressor,
}

impl GpcKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GpcKind::LutBased => "lut-based",
            GpcKind::SliceBased => "slice-based",
            GpcKind::PseudoWire => "pseudo-wire",
            GpcKind::Compressor => "compressor",
        }
    }
}

/// A generalized parallel counter with its cost under one architecture.
///
/// `inputs[i]` is the number of input bits of weight `2^i` relative to the
/// anchor column, `outputs[j]` the number of output bits of weight `2^j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gpc {
    name: String,
    inputs: Vec<u32>,
    outputs: Vec<u32>,
    cost: u32,
    delay_ps: Option<u32>,
    kind: GpcKind,
    enabled: bool,
}

impl Gpc {
    /// Builds a counter from most-significant-first tuples, the way they are
    /// written in `C<p>:<q>` names.
    pub fn from_tuples(
        inputs_msb: &[u32],
        outputs_msb: &[u32],
        cost: u32,
        kind: GpcKind,
    ) -> Result<Self, GpcError> {
        let inputs: Vec<u32> = inputs_msb.iter().rev().copied().collect();
        let outputs: Vec<u32> = outputs_msb.iter().rev().copied().collect();
        Self::from_ranked(inputs, outputs, cost, kind)
    }

    /// Builds a counter from rank-indexed (least-significant-first) tuples.
    pub fn from_ranked(
        inputs: Vec<u32>,
        outputs: Vec<u32>,
        cost: u32,
        kind: GpcKind,
    ) -> Result<Self, GpcError> {
        let name = canonical_name(&inputs, &outputs);
        let p: u32 = inputs.iter().sum();
        let q: u32 = outputs.iter().sum();
        if p == 0 || q == 0 {
            return Err(GpcError::Empty(name));
        }
        if inputs.iter().chain(&outputs).any(|&n| n > 9) {
            return Err(GpcError::Shape {
                name,
                reason: "column counts above 9 cannot be written in tuple notation".into(),
            });
        }
        if inputs.first() == Some(&0) {
            return Err(GpcError::Shape {
                name,
                reason: "the anchor column must take at least one input".into(),
            });
        }
        if outputs.iter().any(|&n| n == 0) {
            return Err(GpcError::Shape {
                name,
                reason: "output columns must be contiguous".into(),
            });
        }
        let gpc = Self {
            name,
            inputs,
            outputs,
            cost,
            delay_ps: None,
            kind,
            enabled: true,
        };
        if gpc.max_input() > gpc.max_output() {
            return Err(GpcError::NegativeSlack(gpc.name));
        }
        if kind == GpcKind::PseudoWire && (gpc.name != "C1:1" || cost != 0) {
            return Err(GpcError::Shape {
                name: gpc.name,
                reason: "a pseudo-wire is exactly C1:1 with cost 0".into(),
            });
        }
        if kind != GpcKind::PseudoWire && cost == 0 {
            return Err(GpcError::Shape {
                name: gpc.name,
                reason: "only the pseudo-wire may have zero cost".into(),
            });
        }
        Ok(gpc)
    }

    /// Parses a canonical name such as `C1325:11111` into counts per column,
    /// most-significant first.
    pub fn parse_name(name: &str) -> Result<(Vec<u32>, Vec<u32>), GpcError> {
        let bad = || GpcError::Name(name.to_string());
        let body = name.strip_prefix('C').ok_or_else(bad)?;
        let (p, q) = body.split_once(':').ok_or_else(bad)?;
        let digits = |s: &str| -> Result<Vec<u32>, GpcError> {
            if s.is_empty() {
                return Err(bad());
            }
            s.chars().map(|ch| ch.to_digit(10).ok_or_else(bad)).collect()
        };
        Ok((digits(p)?, digits(q)?))
    }

    pub fn pseudo_wire() -> Self {
        Self::from_ranked(vec![1], vec![1], 0, GpcKind::PseudoWire).expect("C1:1 is valid")
    }

    pub fn with_delay_ps(mut self, delay_ps: Option<u32>) -> Self {
        self.delay_ps = delay_ps;
        self
    }

    pub fn with_cost(mut self, cost: u32) -> Self {
        self.cost = cost;
        self
    }

    pub fn with_enabled(mut self, enabled: bool) -> Self {
        self.enabled = enabled;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Input counts per column, rank-indexed from the anchor.
    pub fn inputs(&self) -> &[u32] {
        &self.inputs
    }

    /// Output counts per column, rank-indexed from the anchor.
    pub fn outputs(&self) -> &[u32] {
        &self.outputs
    }

    pub fn inputs_msb_first(&self) -> Vec<u32> {
        self.inputs.iter().rev().copied().collect()
    }

    pub fn outputs_msb_first(&self) -> Vec<u32> {
        self.outputs.iter().rev().copied().collect()
    }

    pub fn input_width(&self) -> usize {
        self.inputs.len()
    }

    pub fn output_width(&self) -> usize {
        self.outputs.len()
    }

    /// Input count of column `i` relative to the anchor; zero outside.
    pub fn input(&self, i: usize) -> u32 {
        self.inputs.get(i).copied().unwrap_or(0)
    }

    pub fn output(&self, j: usize) -> u32 {
        self.outputs.get(j).copied().unwrap_or(0)
    }

    /// Total input bits `p`.
    pub fn p(&self) -> u32 {
        self.inputs.iter().sum()
    }

    /// Total output bits `q`.
    pub fn q(&self) -> u32 {
        self.outputs.iter().sum()
    }

    pub fn cost(&self) -> u32 {
        self.cost
    }

    pub fn delay_ps(&self) -> Option<u32> {
        self.delay_ps
    }

    pub fn kind(&self) -> GpcKind {
        self.kind
    }

    pub fn enabled(&self) -> bool {
        self.enabled
    }

    pub fn is_pseudo_wire(&self) -> bool {
        self.kind == GpcKind::PseudoWire
    }

    pub fn max_input(&self) -> u64 {
        weighted(&self.inputs)
    }

    pub fn max_output(&self) -> u64 {
        weighted(&self.outputs)
    }

    /// Arithmetic slack `1 - (1 + max_in) / (1 + max_out)`.
    pub fn slack(&self) -> Ratio<i64> {
        Ratio::from_integer(1)
            - Ratio::new(1 + self.max_input() as i64, 1 + self.max_output() as i64)
    }

    /// Splits `value` over the output columns, filling the most significant
    /// column first. Returns the number of asserted bits in each output column,
    /// or `None` when the value is not representable.
    pub fn encode(&self, value: u64) -> Option<Vec<u32>> {
        let mut rest = value;
        let mut ones = vec![0; self.outputs.len()];
        for j in (0..self.outputs.len()).rev() {
            let n = (rest >> j).min(u64::from(self.outputs[j]));
            ones[j] = n as u32;
            rest -= n << j;
        }
        (rest == 0).then_some(ones)
    }

    /// Computes the counter on concrete bits: `columns[i]` holds the bits
    /// wired into input column `i` (missing bits read as zero). Returns the
    /// output bits per output column.
    pub fn evaluate(&self, columns: &[Vec<bool>]) -> Result<Vec<Vec<bool>>, GpcError> {
        let mut value = 0u64;
        for (i, bits) in columns.iter().enumerate() {
            if bits.len() > self.input(i) as usize {
                return Err(GpcError::Shape {
                    name: self.name.clone(),
                    reason: format!("{} bits wired into input column {i}", bits.len()),
                });
            }
            value += (bits.iter().filter(|&&b| b).count() as u64) << i;
        }
        let ones = self
            .encode(value)
            .ok_or_else(|| GpcError::NegativeSlack(self.name.clone()))?;
        Ok(self
            .outputs
            .iter()
            .zip(ones)
            .map(|(&width, n)| (0..width).map(|k| k < n).collect())
            .collect())
    }
}

impl fmt::Display for Gpc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

fn weighted(counts: &[u32]) -> u64 {
    counts
        .iter()
        .enumerate()
        .map(|(i, &n)| u64::from(n) << i)
        .sum()
}

pub(crate) fn canonical_name(inputs: &[u32], outputs: &[u32]) -> String {
    let digits = |v: &[u32]| v.iter().rev().map(|n| n.to_string()).collect::<String>();
    format!("C{}:{}", digits(inputs), digits(outputs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gpc(name: &str) -> Gpc {
        let (p, q) = Gpc::parse_name(name).unwrap();
        Gpc::from_tuples(&p, &q, 1, GpcKind::LutBased).unwrap()
    }

    #[test]
    fn names_round_trip() {
        for name in ["C6:111", "C25:121", "C1325:11111", "C06060606:111111111", "C3:11"] {
            assert_eq!(gpc(name).name(), name);
        }
        assert_eq!(Gpc::pseudo_wire().name(), "C1:1");
    }

    #[test]
    fn tuples_are_rank_indexed_internally() {
        let g = gpc("C1325:11111");
        assert_eq!(g.inputs(), &[5, 2, 3, 1]);
        assert_eq!(g.p(), 11);
        assert_eq!(g.q(), 5);
        assert_eq!(g.max_input(), 29);
        assert_eq!(g.max_output(), 31);
        let c25 = gpc("C25:121");
        assert_eq!(c25.outputs(), &[1, 2, 1]);
        assert_eq!(c25.max_input(), 9);
        assert_eq!(c25.max_output(), 9);
    }

    #[test]
    fn negative_slack_rejected() {
        let err = Gpc::from_tuples(&[7], &[1, 1], 1, GpcKind::LutBased).unwrap_err();
        assert!(err.to_string().contains("arithmetic slack negative"), "{err}");
    }

    #[test]
    fn bad_names_rejected() {
        for name in ["6:111", "C6111", "C:1", "C6:", "C6:1x1"] {
            assert!(Gpc::parse_name(name).is_err(), "{name}");
        }
    }

    #[test]
    fn pseudo_wire_rules() {
        assert!(Gpc::from_tuples(&[1], &[1], 1, GpcKind::PseudoWire).is_err());
        assert!(Gpc::from_tuples(&[3], &[1, 1], 0, GpcKind::LutBased).is_err());
    }

    #[test]
    fn encode_fills_high_columns_first() {
        let c25 = gpc("C25:121");
        assert_eq!(c25.encode(9), Some(vec![1, 2, 1]));
        assert_eq!(c25.encode(3), Some(vec![1, 1, 0]));
        assert_eq!(c25.encode(10), None);
        let c6 = gpc("C6:111");
        assert_eq!(c6.encode(6), Some(vec![0, 1, 1]));
    }

    #[test]
    fn evaluate_zero_pads() {
        let c6 = gpc("C6:111");
        let out = c6.evaluate(&[vec![true, true, true, true, true]]).unwrap();
        assert_eq!(out, vec![vec![true], vec![false], vec![true]]);
        assert!(c6.evaluate(&[vec![true; 7]]).is_err());
    }
}
