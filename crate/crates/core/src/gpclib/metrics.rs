use num_rational::Ratio;
use serde::Serialize;

use super::{ArchProfile, Gpc, GpcError};

/// The four quality figures of a counter under one cost assignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GpcMetrics {
    /// `(p - q) / k`
    pub efficiency: Ratio<i64>,
    /// `p / q`
    pub strength: Ratio<i64>,
    /// `(p - q)^2 / (k * d)` with `d` in nanoseconds; absent without a delay.
    pub apd: Option<Ratio<i64>>,
    /// `1 - (1 + max_in) / (1 + max_out)`
    pub slack: Ratio<i64>,
}

/// Display form of [`GpcMetrics`], rounded half-up.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MetricsRow {
    pub name: String,
    pub p: u32,
    pub q: u32,
    pub cost: u32,
    pub delay_ns: Option<String>,
    pub efficiency: String,
    pub strength: String,
    pub apd: Option<String>,
    pub slack: String,
}

impl GpcMetrics {
    /// Metrics of `gpc` at the cost and delay it carries.
    pub fn of(gpc: &Gpc) -> Self {
        Self::with_cost(gpc, gpc.cost(), gpc.delay_ps())
    }

    /// Metrics of `gpc` at an explicit cost `k` (LEs) and delay (picoseconds).
    pub fn with_cost(gpc: &Gpc, k: u32, delay_ps: Option<u32>) -> Self {
        let p = i64::from(gpc.p());
        let q = i64::from(gpc.q());
        let k = i64::from(k);
        let efficiency = if k == 0 {
            Ratio::from_integer(0)
        } else {
            Ratio::new(p - q, k)
        };
        let apd = match delay_ps {
            Some(d) if k > 0 && d > 0 => Some(Ratio::new((p - q) * (p - q) * 1000, k * i64::from(d))),
            _ => None,
        };
        Self {
            efficiency,
            strength: Ratio::new(p, q),
            apd,
            slack: gpc.slack(),
        }
    }

    pub fn row(&self, gpc: &Gpc, cost: u32, delay_ps: Option<u32>) -> MetricsRow {
        MetricsRow {
            name: gpc.name().to_string(),
            p: gpc.p(),
            q: gpc.q(),
            cost,
            delay_ns: delay_ps.map(|d| round_half_up(Ratio::new(i64::from(d), 1000), 2)),
            efficiency: round_half_up(self.efficiency, 2),
            strength: round_half_up(self.strength, 2),
            apd: self.apd.map(|a| round_half_up(a, 1)),
            slack: round_half_up(self.slack, 3),
        }
    }
}

/// Metrics of the counter named like `gpc` under `profile`'s cost and delay.
pub fn metrics(gpc: &Gpc, profile: &ArchProfile) -> Result<GpcMetrics, GpcError> {
    let own = profile
        .gpc(gpc.name())
        .ok_or_else(|| GpcError::ProfileMismatch {
            gpc: gpc.name().to_string(),
            profile: profile.name().to_string(),
        })?;
    Ok(GpcMetrics::with_cost(gpc, own.cost(), own.delay_ps()))
}

/// Arithmetic slack of a counter.
pub fn slack(gpc: &Gpc) -> Ratio<i64> {
    gpc.slack()
}

/// Decimal rendering of a non-negative rational, rounded half-up to
/// `decimals` places.
pub fn round_half_up(value: Ratio<i64>, decimals: u32) -> String {
    let negative = value < Ratio::from_integer(0);
    let magnitude = if negative { -value } else { value };
    let scale = 10i128.pow(decimals);
    let numer = i128::from(*magnitude.numer());
    let denom = i128::from(*magnitude.denom());
    let scaled = (2 * numer * scale + denom) / (2 * denom);
    let int_part = scaled / scale;
    let frac = scaled % scale;
    let sign = if negative && scaled != 0 { "-" } else { "" };
    if decimals == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac:0width$}", width = decimals as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gpclib::{builtin_library, GpcKind, ProfileKind};
    use proptest::prelude::*;

    fn gpc(name: &str, cost: u32) -> Gpc {
        let (p, q) = Gpc::parse_name(name).unwrap();
        Gpc::from_tuples(&p, &q, cost, GpcKind::LutBased).unwrap()
    }

    #[test]
    fn rounding_is_half_up() {
        assert_eq!(round_half_up(Ratio::new(1, 16), 3), "0.063");
        assert_eq!(round_half_up(Ratio::new(1, 32), 3), "0.031");
        assert_eq!(round_half_up(Ratio::new(1, 8), 2), "0.13");
        assert_eq!(round_half_up(Ratio::new(24, 9), 2), "2.67");
        assert_eq!(round_half_up(Ratio::new(15, 4), 2), "3.75");
        assert_eq!(round_half_up(Ratio::new(5, 2), 0), "3");
        assert_eq!(round_half_up(Ratio::from_integer(0), 3), "0.000");
    }

    #[test]
    fn widest_slice_counter() {
        let m = GpcMetrics::of(&gpc("C06060606:111111111", 4));
        assert_eq!(m.efficiency, Ratio::new(15, 4));
        assert_eq!(round_half_up(m.strength, 2), "2.67");
        assert_eq!(round_half_up(m.slack, 3), "0.002");
        assert_eq!(m.apd, None);
    }

    #[test]
    fn apd_on_intel_baseline() {
        let profile = builtin_library(ProfileKind::IntelBaseline);
        let c6 = profile.gpc("C6:111").unwrap();
        let m = metrics(c6, &profile).unwrap();
        assert_eq!(round_half_up(m.apd.unwrap(), 1), "7.9");
    }

    #[test]
    fn pseudo_wire_metrics() {
        let m = GpcMetrics::of(&Gpc::pseudo_wire());
        assert_eq!(m.efficiency, Ratio::from_integer(0));
        assert_eq!(m.strength, Ratio::from_integer(1));
        assert_eq!(m.slack, Ratio::from_integer(0));
    }

    #[test]
    fn slack_examples() {
        assert_eq!(round_half_up(slack(&gpc("C15:111", 3)), 3), "0.000");
        assert_eq!(round_half_up(slack(&gpc("C1325:11111", 4)), 3), "0.063");
        assert_eq!(round_half_up(slack(&gpc("C3:11", 1)), 3), "0.000");
    }

    #[test]
    fn missing_cost_is_profile_mismatch() {
        let profile = builtin_library(ProfileKind::IntelBaseline);
        let err = metrics(&gpc("C06060606:111111111", 4), &profile).unwrap_err();
        assert!(matches!(err, GpcError::ProfileMismatch { .. }));
    }

    proptest! {
        #[test]
        fn doubling_cost_halves_efficiency_and_apd(k in 1u32..16, d in 1u32..2000, idx in 0usize..5) {
            let names = ["C6:111", "C25:121", "C1325:11111", "C3:11", "C060606:1111111"];
            let g = gpc(names[idx], 1);
            let once = GpcMetrics::with_cost(&g, k, Some(d));
            let twice = GpcMetrics::with_cost(&g, 2 * k, Some(d));
            prop_assert_eq!(twice.efficiency * 2, once.efficiency);
            prop_assert_eq!(twice.apd.unwrap() * 2, once.apd.unwrap());
            prop_assert_eq!(twice.strength, once.strength);
            prop_assert_eq!(twice.slack, once.slack);
        }
    }
}
