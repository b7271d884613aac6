//! Slice-based counters built by chaining two-column atoms along a slice
//! carry chain.

use super::{Gpc, GpcError, GpcKind, ProfileKind};

/// LEs in one Xilinx slice.
pub const SLICE_LES: u32 = 4;

/// Two-column primitive occupying part of a slice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    A06,
    A14,
    A22,
}

impl Atom {
    pub const ALL: [Atom; 3] = [Atom::A06, Atom::A14, Atom::A22];

    pub fn tag(self) -> &'static str {
        match self {
            Atom::A06 => "06",
            Atom::A14 => "14",
            Atom::A22 => "22",
        }
    }

    /// Inputs as `[lower column, upper column]`. The lowest atom of a chain
    /// takes one extra bit in its lower column, except `06`.
    pub fn inputs(self, lowest: bool) -> [u32; 2] {
        let bonus = u32::from(lowest && self != Atom::A06);
        match self {
            Atom::A06 => [6, 0],
            Atom::A14 => [4 + bonus, 1],
            Atom::A22 => [2 + bonus, 2],
        }
    }

    /// LEs the atom occupies inside a slice. Routing the XOR6 output into the
    /// carry chain lets `06` fit in a single LE.
    pub fn cost(self, profile: ProfileKind) -> u32 {
        match (self, profile) {
            (Atom::A06, ProfileKind::XLuxorPlus) => 1,
            _ => 2,
        }
    }
}

/// All chains of `width` atoms drawn from `atoms` that fit in one slice under
/// `profile`, lowest atom first in the iteration order. Each chain becomes a
/// slice-based counter costing one slice with `2 * width + 1` single-bit
/// output columns. For width 2 the non-decomposable `C1325:11111` is added.
pub fn compose_couples(atoms: &[Atom], width: usize, profile: ProfileKind) -> Result<Vec<Gpc>, GpcError> {
    if !profile.is_xilinx() {
        return Err(GpcError::Couple(format!(
            "{} has no slice carry chain for atoms",
            profile.name()
        )));
    }
    if width == 0 {
        return Err(GpcError::Couple("width must be at least one atom".into()));
    }
    let mut atoms: Vec<Atom> = atoms.to_vec();
    atoms.sort();
    atoms.dedup();
    if atoms.is_empty() {
        return Ok(Vec::new());
    }

    let mut out = Vec::new();
    let mut chain = vec![0usize; width];
    loop {
        let picked: Vec<Atom> = chain.iter().map(|&i| atoms[i]).collect();
        let les: u32 = picked.iter().map(|a| a.cost(profile)).sum();
        if les <= SLICE_LES {
            let mut inputs = Vec::with_capacity(2 * width);
            for (pos, atom) in picked.iter().enumerate() {
                inputs.extend_from_slice(&atom.inputs(pos == 0));
            }
            let outputs = vec![1; 2 * width + 1];
            out.push(Gpc::from_ranked(inputs, outputs, SLICE_LES, GpcKind::SliceBased)?);
        }
        // odometer over atom choices, lowest position varying slowest
        let mut pos = width;
        loop {
            if pos == 0 {
                if out.is_empty() {
                    return Err(GpcError::Couple(format!(
                        "no chain of {width} atoms fits in {SLICE_LES} LEs under {}",
                        profile.name()
                    )));
                }
                if width == 2 && atoms.len() == Atom::ALL.len() {
                    out.push(Gpc::from_tuples(&[1, 3, 2, 5], &[1; 5], SLICE_LES, GpcKind::SliceBased)?);
                }
                return Ok(out);
            }
            pos -= 1;
            chain[pos] += 1;
            if chain[pos] < atoms.len() {
                break;
            }
            chain[pos] = 0;
        }
    }
}
