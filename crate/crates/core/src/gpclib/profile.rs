use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::couples::{compose_couples, Atom};
use super::{Gpc, GpcError, GpcKind};

/// Which of the built-in architectures a profile derives from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProfileKind {
    XilinxBaseline,
    XLuxor,
    XLuxorPlus,
    IntelBaseline,
    ILuxor,
    ILuxorPlus,
    Custom,
}

impl ProfileKind {
    pub const BUILTIN: [ProfileKind; 6] = [
        ProfileKind::XilinxBaseline,
        ProfileKind::XLuxor,
        ProfileKind::XLuxorPlus,
        ProfileKind::IntelBaseline,
        ProfileKind::ILuxor,
        ProfileKind::ILuxorPlus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProfileKind::XilinxBaseline => "xilinx-baseline",
            ProfileKind::XLuxor => "x-luxor",
            ProfileKind::XLuxorPlus => "x-luxor-plus",
            ProfileKind::IntelBaseline => "intel-baseline",
            ProfileKind::ILuxor => "i-luxor",
            ProfileKind::ILuxorPlus => "i-luxor-plus",
            ProfileKind::Custom => "custom",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::BUILTIN.into_iter().find(|k| k.name() == name)
    }

    pub fn is_xilinx(self) -> bool {
        matches!(
            self,
            ProfileKind::XilinxBaseline | ProfileKind::XLuxor | ProfileKind::XLuxorPlus
        )
    }

    pub fn is_intel(self) -> bool {
        matches!(
            self,
            ProfileKind::IntelBaseline | ProfileKind::ILuxor | ProfileKind::ILuxorPlus
        )
    }

    pub fn is_luxor(self) -> bool {
        !matches!(
            self,
            ProfileKind::XilinxBaseline | ProfileKind::IntelBaseline | ProfileKind::Custom
        )
    }

    /// The baseline of the same vendor, used as the reference in sweeps.
    pub fn baseline(self) -> Option<Self> {
        if self.is_xilinx() {
            Some(ProfileKind::XilinxBaseline)
        } else if self.is_intel() {
            Some(ProfileKind::IntelBaseline)
        } else {
            None
        }
    }
}

impl fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Residue constraint the final carry-propagate adder imposes on the last
/// compression stage.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FinalRule {
    /// Xilinx relaxed ternary adder: per column at most 4 bits, at most 2
    /// incoming carries, and at most 5 of both together.
    RaggedCpa,
    /// Intel ternary adder: at most 3 bits per column.
    Ternary,
}

/// A violated final-stage condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleViolation {
    pub column: usize,
    pub bits: u32,
    pub carries: u32,
    pub reason: &'static str,
}

impl fmt::Display for RuleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "column {} holds {} bits with {} carries: {}",
            self.column, self.bits, self.carries, self.reason
        )
    }
}

impl FinalRule {
    pub fn as_str(self) -> &'static str {
        match self {
            FinalRule::RaggedCpa => "ragged-cpa",
            FinalRule::Ternary => "ternary",
        }
    }

    /// Largest column height the adder accepts.
    pub fn max_height(self) -> u32 {
        match self {
            FinalRule::RaggedCpa => 4,
            FinalRule::Ternary => 3,
        }
    }

    /// Carry counts per column: `carries[0] = 0`,
    /// `carries[c] = floor((carries[c-1] + heights[c-1]) / 2)`.
    pub fn carries(heights: &[u32]) -> Vec<u32> {
        let mut out = Vec::with_capacity(heights.len());
        let mut carry = 0u32;
        for &h in heights {
            out.push(carry);
            carry = (carry + h) / 2;
        }
        out
    }

    /// First column breaking the rule, if any.
    pub fn check(self, heights: &[u32]) -> Result<(), RuleViolation> {
        let carries = Self::carries(heights);
        for (c, (&n, &cb)) in heights.iter().zip(&carries).enumerate() {
            let reason = match self {
                FinalRule::RaggedCpa if n > 4 => Some("more than 4 bits"),
                FinalRule::RaggedCpa if cb > 2 => Some("more than 2 carries"),
                FinalRule::RaggedCpa if n + cb > 5 => Some("bits plus carries exceed 5"),
                FinalRule::Ternary if n > 3 => Some("more than 3 bits"),
                _ => None,
            };
            if let Some(reason) = reason {
                return Err(RuleViolation {
                    column: c,
                    bits: n,
                    carries: cb,
                    reason,
                });
            }
        }
        Ok(())
    }

    pub fn holds(self, heights: &[u32]) -> bool {
        self.check(heights).is_ok()
    }
}

impl FromStr for FinalRule {
    type Err = GpcError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ragged-cpa" => Ok(FinalRule::RaggedCpa),
            "ternary" => Ok(FinalRule::Ternary),
            other => Err(GpcError::UnknownRule(other.to_string())),
        }
    }
}

/// Column span and LE cost of the final carry-propagate adder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdderSpan {
    pub lo: usize,
    pub hi: usize,
    pub cost: u32,
}

/// The final adder covers every column from the lowest one holding two or
/// more bits up to the highest nonzero column, at one LE (or ALM) each.
/// A residue with at most one bit per column needs no adder.
pub fn final_adder(heights: &[u32]) -> Option<AdderSpan> {
    let lo = heights.iter().position(|&h| h >= 2)?;
    let hi = heights.iter().rposition(|&h| h > 0)?;
    Some(AdderSpan {
        lo,
        hi,
        cost: (hi - lo + 1) as u32,
    })
}

pub fn final_adder_cost(heights: &[u32]) -> u32 {
    final_adder(heights).map_or(0, |a| a.cost)
}

/// Informational area and delay ratios of the modified logic cell relative
/// to its vendor baseline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Overhead {
    pub area: f64,
    pub delay: f64,
}

/// A named architecture: counters with their costs plus the final-stage rule.
#[derive(Clone, Debug, PartialEq)]
pub struct ArchProfile {
    name: String,
    kind: ProfileKind,
    final_rule: FinalRule,
    gpcs: Vec<Gpc>,
    fused_unit_cost: u32,
    overhead: Option<Overhead>,
}

impl ArchProfile {
    /// Assembles and validates a profile. `C1:1` is prepended when absent.
    pub fn new(
        name: impl Into<String>,
        final_rule: FinalRule,
        mut gpcs: Vec<Gpc>,
        fused_unit_cost: u32,
        overhead: Option<Overhead>,
    ) -> Result<Self, GpcError> {
        let name = name.into();
        let kind = ProfileKind::from_name(&name).unwrap_or(ProfileKind::Custom);
        if !gpcs.iter().any(|g| g.is_pseudo_wire()) {
            gpcs.insert(0, Gpc::pseudo_wire());
        }
        for (i, g) in gpcs.iter().enumerate() {
            if gpcs[..i].iter().any(|h| h.name() == g.name()) {
                return Err(GpcError::Duplicate(g.name().to_string()));
            }
        }
        for required in ["C3:11", "C6:111"] {
            if !gpcs.iter().any(|g| g.name() == required) {
                return Err(GpcError::MissingRequired {
                    profile: name,
                    gpc: required,
                });
            }
        }
        if fused_unit_cost == 0 {
            return Err(GpcError::Profile(format!("{name}: fused unit cost must be positive")));
        }
        Ok(Self {
            name,
            kind,
            final_rule,
            gpcs,
            fused_unit_cost,
            overhead,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn final_rule(&self) -> FinalRule {
        self.final_rule
    }

    /// Every counter of the profile, disabled ones included.
    pub fn gpcs(&self) -> &[Gpc] {
        &self.gpcs
    }

    /// Counters available to synthesis.
    pub fn active_gpcs(&self) -> impl Iterator<Item = &Gpc> {
        self.gpcs.iter().filter(|g| g.enabled())
    }

    pub fn gpc(&self, name: &str) -> Option<&Gpc> {
        self.gpcs.iter().find(|g| g.name() == name)
    }

    /// LEs per fused XnorPopcount unit in the primary stage.
    pub fn fused_unit_cost(&self) -> u32 {
        self.fused_unit_cost
    }

    pub fn overhead(&self) -> Option<Overhead> {
        self.overhead
    }

    /// Turns every compressor proxy on or off.
    pub fn with_compressors(mut self, enabled: bool) -> Self {
        for g in &mut self.gpcs {
            if g.kind() == GpcKind::Compressor {
                *g = g.clone().with_enabled(enabled);
            }
        }
        self
    }
}

fn lut(inputs: &[u32], outputs: &[u32], cost: u32) -> Gpc {
    Gpc::from_tuples(inputs, outputs, cost, GpcKind::LutBased).expect("built-in GPC")
}

fn intel(inputs: &[u32], outputs: &[u32], cost: u32, delay_ps: u32) -> Gpc {
    lut(inputs, outputs, cost).with_delay_ps(Some(delay_ps))
}

/// The built-in profile of `kind`. `Custom` yields an empty-named copy of
/// the Xilinx baseline.
pub fn builtin_library(kind: ProfileKind) -> ArchProfile {
    let mut gpcs = vec![Gpc::pseudo_wire()];
    let (rule, fused, overhead) = match kind {
        ProfileKind::XilinxBaseline | ProfileKind::XLuxor | ProfileKind::XLuxorPlus | ProfileKind::Custom => {
            let c6 = if kind == ProfileKind::XilinxBaseline || kind == ProfileKind::Custom { 3 } else { 2 };
            gpcs.push(lut(&[3], &[1, 1], 1));
            gpcs.push(lut(&[6], &[1, 1, 1], c6));
            gpcs.push(lut(&[2, 5], &[1, 2, 1], 2));
            gpcs.extend(
                compose_couples(&Atom::ALL, 2, ProfileKind::XilinxBaseline).expect("baseline couples"),
            );
            if kind == ProfileKind::XLuxorPlus {
                for width in [3, 4] {
                    gpcs.extend(compose_couples(&Atom::ALL, width, kind).expect("luxor chains"));
                }
            }
            gpcs.push(
                Gpc::from_tuples(&[5], &[2, 1], 1, GpcKind::Compressor)
                    .expect("compressor proxy")
                    .with_enabled(false),
            );
            let (fused, overhead) = match kind {
                ProfileKind::XLuxor => (1, Overhead { area: 0.99, delay: 1.06 }),
                ProfileKind::XLuxorPlus => (1, Overhead { area: 1.06, delay: 1.09 }),
                _ => (2, Overhead { area: 1.0, delay: 1.0 }),
            };
            (FinalRule::RaggedCpa, fused, overhead)
        }
        ProfileKind::IntelBaseline | ProfileKind::ILuxor | ProfileKind::ILuxorPlus => {
            let (c6, c6_delay) = match kind {
                ProfileKind::IntelBaseline => (3, 380),
                _ => (2, 390),
            };
            let (c25, c25_delay) = match kind {
                ProfileKind::ILuxorPlus => (1, 390),
                _ => (2, 380),
            };
            gpcs.push(lut(&[3], &[1, 1], 1));
            gpcs.push(intel(&[6], &[1, 1, 1], c6, c6_delay));
            gpcs.push(intel(&[1, 5], &[1, 1, 1], 3, 380));
            gpcs.push(intel(&[2, 3], &[1, 1, 1], 2, 380));
            gpcs.push(intel(&[2, 5], &[1, 2, 1], c25, c25_delay));
            let (fused, overhead) = match kind {
                ProfileKind::ILuxor => (1, Overhead { area: 1.0, delay: 1.01 }),
                ProfileKind::ILuxorPlus => (1, Overhead { area: 1.05, delay: 1.03 }),
                _ => (2, Overhead { area: 1.0, delay: 1.0 }),
            };
            (FinalRule::Ternary, fused, overhead)
        }
    };
    ArchProfile::new(kind.name(), rule, gpcs, fused, Some(overhead)).expect("built-in profile")
}

/// Built-in profile by name.
pub fn builtin_profile(name: &str) -> Result<ArchProfile, GpcError> {
    ProfileKind::from_name(name)
        .map(builtin_library)
        .ok_or_else(|| GpcError::UnknownProfile(name.to_string()))
}
