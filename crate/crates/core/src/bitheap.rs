//! Dot-notation bit heaps.
//!
//! A heap is a list of column heights stored least-significant first: column
//! `c` holds bits of weight `2^c`. Textual literals are written the other way
//! round (most-significant first), e.g. `"0,6,0,6"`.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest total number of bits accepted in one heap.
pub const MAX_TOTAL_BITS: u32 = 4096;

/// Largest number of columns accepted in one heap. Keeps every weighted value
/// below `4096 * 2^64`, so `u128` arithmetic never overflows.
pub const MAX_COLUMNS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HeapError {
    #[error("heap holds {0} bits, limit is {MAX_TOTAL_BITS}")]
    TooManyBits(u64),
    #[error("heap spans {0} columns, limit is {MAX_COLUMNS}")]
    TooManyColumns(usize),
    #[error("invalid heap literal {literal:?}: {reason}")]
    Literal { literal: String, reason: String },
    #[error("assignment shape mismatch at column {column}: expected {expected} bits, got {actual}")]
    ShapeMismatch { column: usize, expected: u32, actual: usize },
}

/// Column heights of a multi-operand addition problem.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct BitHeap {
    columns: Vec<u32>,
}

impl BitHeap {
    /// Builds a heap from least-significant-first heights.
    pub fn new(columns: Vec<u32>) -> Result<Self, HeapError> {
        if columns.len() > MAX_COLUMNS {
            // Trailing zero columns beyond the limit are harmless; strip them first.
            let last = columns.iter().rposition(|&h| h != 0).map_or(0, |i| i + 1);
            if last > MAX_COLUMNS {
                return Err(HeapError::TooManyColumns(last));
            }
            return Self::new(columns[..last].to_vec());
        }
        let total: u64 = columns.iter().map(|&h| u64::from(h)).sum();
        if total > u64::from(MAX_TOTAL_BITS) {
            return Err(HeapError::TooManyBits(total));
        }
        Ok(Self { columns })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a heap from most-significant-first heights (the tuple notation).
    pub fn from_msb_first(heights: &[u32]) -> Result<Self, HeapError> {
        Self::new(heights.iter().rev().copied().collect())
    }

    /// Parses a comma-separated, most-significant-first literal such as `"0,6,0,6"`.
    pub fn parse(literal: &str) -> Result<Self, HeapError> {
        let err = |reason: &str| HeapError::Literal {
            literal: literal.to_string(),
            reason: reason.to_string(),
        };
        let trimmed = literal.trim();
        if trimmed.is_empty() {
            return Err(err("empty literal"));
        }
        let mut heights = Vec::new();
        for part in trimmed.split(',') {
            let part = part.trim();
            let h: u32 = part
                .parse()
                .map_err(|_| err(&format!("{part:?} is not a non-negative integer")))?;
            heights.push(h);
        }
        Self::from_msb_first(&heights)
    }

    /// Most-significant-first literal, the inverse of [`BitHeap::parse`].
    pub fn to_literal(&self) -> String {
        if self.columns.is_empty() {
            return "0".to_string();
        }
        self.columns
            .iter()
            .rev()
            .map(|h| h.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn columns(&self) -> &[u32] {
        &self.columns
    }

    /// Height of column `c`; zero beyond the stored columns.
    pub fn height(&self, c: usize) -> u32 {
        self.columns.get(c).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.iter().all(|&h| h == 0)
    }

    pub fn total_bits(&self) -> u32 {
        self.columns.iter().sum()
    }

    /// Largest value the heap can represent: `sum_c h_c * 2^c`.
    pub fn max_value(&self) -> u128 {
        self.columns
            .iter()
            .enumerate()
            .map(|(c, &h)| u128::from(h) << c)
            .sum()
    }

    pub fn is_normalized(&self) -> bool {
        self.columns.last().map_or(true, |&h| h != 0)
    }

    /// Drops trailing zero columns.
    pub fn normalized(&self) -> Self {
        let last = self.columns.iter().rposition(|&h| h != 0).map_or(0, |i| i + 1);
        Self {
            columns: self.columns[..last].to_vec(),
        }
    }

    /// Zero-extends the heap to at least `len` columns.
    pub fn padded(&self, len: usize) -> Self {
        let mut columns = self.columns.clone();
        if columns.len() < len {
            columns.resize(len, 0);
        }
        Self { columns }
    }

    /// Columnwise sum of heights.
    pub fn merge(&self, other: &BitHeap) -> Result<Self, HeapError> {
        let len = self.len().max(other.len());
        Self::new((0..len).map(|c| self.height(c) + other.height(c)).collect())
    }

    /// Renders the heap in dot notation: one `o` per bit, most-significant
    /// column leftmost, columns separated by one space, dots hanging from the
    /// top row. Every line has the same width.
    pub fn render_dots(&self) -> String {
        let heap = self.normalized();
        let rows = heap.columns.iter().copied().max().unwrap_or(0);
        let mut out = String::new();
        for r in 0..rows {
            let line: Vec<&str> = heap
                .columns
                .iter()
                .rev()
                .map(|&h| if h > r { "o" } else { " " })
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

impl TryFrom<Vec<u32>> for BitHeap {
    type Error = HeapError;

    fn try_from(columns: Vec<u32>) -> Result<Self, Self::Error> {
        Self::new(columns)
    }
}

impl From<BitHeap> for Vec<u32> {
    fn from(heap: BitHeap) -> Self {
        heap.columns
    }
}

impl fmt::Display for BitHeap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.to_literal())
    }
}

/// Concrete bit values for every dot of a heap, least-significant column first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitAssignment {
    columns: Vec<Vec<bool>>,
}

impl BitAssignment {
    pub fn from_columns(columns: Vec<Vec<bool>>) -> Self {
        Self { columns }
    }

    pub fn zeros(heap: &BitHeap) -> Self {
        Self::filled(heap, false)
    }

    pub fn ones(heap: &BitHeap) -> Self {
        Self::filled(heap, true)
    }

    fn filled(heap: &BitHeap, bit: bool) -> Self {
        Self {
            columns: heap.columns().iter().map(|&h| vec![bit; h as usize]).collect(),
        }
    }

    pub fn random<R: Rng + ?Sized>(heap: &BitHeap, rng: &mut R) -> Self {
        Self {
            columns: heap
                .columns()
                .iter()
                .map(|&h| (0..h).map(|_| rng.gen::<bool>()).collect())
                .collect(),
        }
    }

    /// Assignment number `index` of the `2^total_bits` possible ones; bit `k`
    /// of `index` drives the `k`-th dot in column-major order.
    pub fn from_index(heap: &BitHeap, index: u64) -> Self {
        let mut k = 0;
        let columns = heap
            .columns()
            .iter()
            .map(|&h| {
                (0..h)
                    .map(|_| {
                        let bit = (index >> k) & 1 == 1;
                        k += 1;
                        bit
                    })
                    .collect()
            })
            .collect();
        Self { columns }
    }

    pub fn columns(&self) -> &[Vec<bool>] {
        &self.columns
    }

    pub fn into_columns(self) -> Vec<Vec<bool>> {
        self.columns
    }

    /// Weighted popcount `sum_c 2^c * |{true bits in column c}|`.
    pub fn value(&self) -> u128 {
        self.columns
            .iter()
            .enumerate()
            .map(|(c, bits)| (bits.iter().filter(|&&b| b).count() as u128) << c)
            .sum()
    }

    /// Weighted popcount after checking the assignment matches `heap`.
    pub fn value_in(&self, heap: &BitHeap) -> Result<u128, HeapError> {
        self.check_shape(heap)?;
        Ok(self.value())
    }

    pub fn check_shape(&self, heap: &BitHeap) -> Result<(), HeapError> {
        let len = self.columns.len().max(heap.len());
        for c in 0..len {
            let actual = self.columns.get(c).map_or(0, Vec::len);
            let expected = heap.height(c);
            if actual != expected as usize {
                return Err(HeapError::ShapeMismatch {
                    column: c,
                    expected,
                    actual,
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn heap(msb: &[u32]) -> BitHeap {
        BitHeap::from_msb_first(msb).unwrap()
    }

    #[test]
    fn max_value_examples() {
        assert_eq!(heap(&[6]).max_value(), 6);
        assert_eq!(heap(&[6, 0, 6]).max_value(), 30);
        // rank-indexed input shape of C1325
        assert_eq!(BitHeap::new(vec![5, 2, 3, 1]).unwrap().max_value(), 29);
        assert_eq!(heap(&[1, 3, 2, 5]).max_value(), 29);
    }

    #[test]
    fn literal_is_msb_first() {
        let h = BitHeap::parse("0,6,0,6").unwrap();
        assert_eq!(h.columns(), &[6, 0, 6, 0]);
        assert_eq!(h.to_literal(), "0,6,0,6");
        assert!(BitHeap::parse("").is_err());
        assert!(BitHeap::parse("3,-1").is_err());
        assert!(BitHeap::parse("3,x").is_err());
    }

    #[test]
    fn ceiling_enforced() {
        assert!(BitHeap::new(vec![4096]).is_ok());
        assert_eq!(BitHeap::new(vec![4096, 1]), Err(HeapError::TooManyBits(4097)));
        let mut wide = vec![0; 70];
        wide[65] = 1;
        assert!(matches!(BitHeap::new(wide), Err(HeapError::TooManyColumns(66))));
        let mut padded = vec![1; 3];
        padded.resize(80, 0);
        assert_eq!(BitHeap::new(padded).unwrap().len(), 3);
    }

    #[test]
    fn value_examples() {
        let h = BitHeap::new(vec![3, 3]).unwrap();
        assert_eq!(BitAssignment::zeros(&h).value_in(&h).unwrap(), 0);
        assert_eq!(BitAssignment::ones(&h).value_in(&h).unwrap(), 9);
        let a = BitAssignment::from_columns(vec![vec![true, false, true], vec![false, true, false]]);
        assert_eq!(a.value_in(&h).unwrap(), 4);
    }

    #[test]
    fn value_rejects_shape_mismatch() {
        let h = BitHeap::new(vec![3, 3]).unwrap();
        let a = BitAssignment::from_columns(vec![vec![true, false], vec![false, true, false]]);
        assert_eq!(
            a.value_in(&h),
            Err(HeapError::ShapeMismatch {
                column: 0,
                expected: 3,
                actual: 2
            })
        );
    }

    #[test]
    fn render_examples() {
        assert_eq!(heap(&[1]).render_dots(), "o\n");
        assert_eq!(heap(&[3, 3, 3]).render_dots(), "o o o\no o o\no o o\n");
        assert_eq!(BitHeap::empty().render_dots(), "");
        assert_eq!(heap(&[0]).render_dots(), "");
        // msb column on the left, dots hang from the top row
        assert_eq!(heap(&[1, 0, 2]).render_dots(), "o   o\n    o\n");
    }

    #[test]
    fn from_index_enumerates_all_assignments() {
        let h = BitHeap::new(vec![2, 1]).unwrap();
        let values: Vec<u128> = (0..8).map(|i| BitAssignment::from_index(&h, i).value()).collect();
        assert_eq!(values, vec![0, 1, 1, 2, 2, 3, 3, 4]);
    }

    fn arb_heap() -> impl Strategy<Value = BitHeap> {
        prop::collection::vec(0u32..20, 0..10).prop_map(|v| BitHeap::new(v).unwrap())
    }

    proptest! {
        #[test]
        fn assignment_value_bounded(h in arb_heap(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = BitAssignment::random(&h, &mut rng);
            prop_assert!(a.value_in(&h).unwrap() <= h.max_value());
            prop_assert_eq!(BitAssignment::ones(&h).value(), h.max_value());
        }

        #[test]
        fn merge_adds_max_values(a in arb_heap(), b in arb_heap()) {
            let m = a.merge(&b).unwrap();
            prop_assert_eq!(m.max_value(), a.max_value() + b.max_value());
            prop_assert_eq!(m.total_bits(), a.total_bits() + b.total_bits());
        }

        #[test]
        fn render_injective(a in arb_heap(), b in arb_heap()) {
            let (a, b) = (a.normalized(), b.normalized());
            if a != b {
                prop_assert_ne!(a.render_dots(), b.render_dots());
            }
        }

        #[test]
        fn literal_round_trip(h in arb_heap()) {
            let h = h.normalized();
            let back = BitHeap::parse(&h.to_literal()).unwrap().normalized();
            prop_assert_eq!(back, h);
        }
    }
}
