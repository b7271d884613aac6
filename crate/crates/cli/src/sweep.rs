//! Benchmark-by-profile cost matrix.

use std::fmt::Write as _;

use ctsynth::benchgen::Benchmark;
use ctsynth::gpclib::ArchProfile;
use ctsynth::solver::SynthOptions;
use ctsynth::verify::SimOptions;
use rayon::prelude::*;
use serde::Serialize;

use crate::{run_synth, Failure};

#[derive(Clone, Debug, Serialize)]
pub struct Cell {
    pub profile: String,
    pub le: Option<u32>,
    pub stages: Option<usize>,
    pub status: String,
    pub exit_code: u8,
    pub error: Option<String>,
    /// Percent saved against the reference profile of the same vendor.
    pub reduction_pct: Option<f64>,
    /// Fewer stages than the reference.
    pub fewer_stages: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub benchmark: String,
    pub spec: String,
    pub cells: Vec<Cell>,
    /// Cost never rises from baseline to LUXOR to LUXOR+ within a vendor.
    pub monotonic: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Table {
    pub profiles: Vec<String>,
    /// Reference profile for each column.
    pub references: Vec<String>,
    pub rows: Vec<Row>,
}

/// The vendor baseline when it is swept, otherwise the first swept profile
/// of the same vendor.
fn reference(profiles: &[ArchProfile], i: usize) -> usize {
    let kind = profiles[i].kind();
    let same = |j: &usize| profiles[*j].kind().is_xilinx() == kind.is_xilinx();
    (0..profiles.len())
        .filter(same)
        .find(|&j| Some(profiles[j].kind()) == kind.baseline())
        .or_else(|| (0..profiles.len()).find(same))
        .unwrap_or(i)
}

pub fn run(
    benches: &[Benchmark],
    profiles: &[ArchProfile],
    opts: &SynthOptions,
    sim: Option<SimOptions>,
    jobs: usize,
) -> Result<Table, Failure> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(Failure::other)?;
    let work: Vec<(usize, usize)> = (0..benches.len())
        .flat_map(|b| (0..profiles.len()).map(move |p| (b, p)))
        .collect();
    let cells: Vec<Cell> = pool.install(|| {
        work.par_iter()
            .map(|&(b, p)| {
                let (bench, profile) = (&benches[b], &profiles[p]);
                let cell = match run_synth(bench, profile, opts, sim) {
                    Ok((report, code)) => Cell {
                        profile: profile.name().to_string(),
                        le: Some(report.le.total),
                        stages: Some(report.stages),
                        status: report.status.clone(),
                        exit_code: code,
                        error: (code != 0).then(|| format!("exit code {code}")),
                        reduction_pct: None,
                        fewer_stages: false,
                    },
                    Err(f) => Cell {
                        profile: profile.name().to_string(),
                        le: None,
                        stages: None,
                        status: "error".into(),
                        exit_code: f.code,
                        error: Some(f.message),
                        reduction_pct: None,
                        fewer_stages: false,
                    },
                };
                eprintln!(
                    "{} on {}: {}",
                    bench.name(),
                    profile.name(),
                    cell.le.map_or_else(|| cell.status.clone(), |le| format!("LE={le}"))
                );
                cell
            })
            .collect()
    });
    let references: Vec<usize> = (0..profiles.len()).map(|i| reference(profiles, i)).collect();
    let rows = benches
        .iter()
        .zip(cells.chunks(profiles.len()))
        .map(|(bench, chunk)| {
            let mut cells = chunk.to_vec();
            for i in 0..cells.len() {
                let base = &chunk[references[i]];
                if let (Some(le), Some(base_le), Some(st), Some(base_st)) = (cells[i].le, base.le, cells[i].stages, base.stages) {
                    if base_le > 0 {
                        cells[i].reduction_pct = Some(100.0 * (f64::from(base_le) - f64::from(le)) / f64::from(base_le));
                    } else {
                        cells[i].reduction_pct = Some(0.0);
                    }
                    cells[i].fewer_stages = st < base_st;
                }
            }
            let monotonic = monotonic(profiles, &cells);
            Row {
                benchmark: bench.name(),
                spec: bench.spec(),
                cells,
                monotonic,
            }
        })
        .collect();
    Ok(Table {
        profiles: profiles.iter().map(|p| p.name().to_string()).collect(),
        references: references.iter().map(|&r| profiles[r].name().to_string()).collect(),
        rows,
    })
}

fn monotonic(profiles: &[ArchProfile], cells: &[Cell]) -> bool {
    let mut order: Vec<usize> = (0..profiles.len()).collect();
    order.sort_by_key(|&i| profiles[i].kind());
    order.windows(2).all(|w| {
        let (a, b) = (&profiles[w[0]], &profiles[w[1]]);
        if a.kind().is_xilinx() != b.kind().is_xilinx() {
            return true;
        }
        match (cells[w[0]].le, cells[w[1]].le) {
            (Some(x), Some(y)) => y <= x,
            _ => true,
        }
    })
}

impl Table {
    pub fn to_text(&self) -> String {
        let mut s = format!("{:<16}", "benchmark");
        for p in &self.profiles {
            let _ = write!(s, " {:>22}", p);
        }
        s.push('\n');
        for row in &self.rows {
            let _ = write!(s, "{:<16}", row.benchmark);
            for c in &row.cells {
                let cell = match (c.le, c.stages, c.reduction_pct) {
                    (Some(le), Some(st), Some(r)) => {
                        format!("{le}/{st} {r:>5.1}%{}", if c.fewer_stages { "*" } else { " " })
                    }
                    _ => c.status.clone(),
                };
                let _ = write!(s, " {cell:>22}");
            }
            if !row.monotonic {
                s.push_str("  (cost rises from baseline to LUXOR+)");
            }
            s.push('\n');
        }
        s.push_str("cells: LE/stages, reduction against the vendor reference; * marks fewer stages\n");
        for (p, r) in self.profiles.iter().zip(&self.references) {
            let _ = writeln!(s, "reference for {p}: {r}");
        }
        for row in &self.rows {
            for c in row.cells.iter().filter(|c| c.error.is_some()) {
                let _ = writeln!(s, "{} on {}: {}", row.benchmark, c.profile, c.error.as_deref().unwrap_or(""));
            }
        }
        s
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("table serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("benchmark,spec,profile,reference,le,stages,reduction_pct,fewer_stages,status\n");
        for row in &self.rows {
            for (c, r) in row.cells.iter().zip(&self.references) {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{}",
                    row.benchmark,
                    row.spec,
                    c.profile,
                    r,
                    c.le.map_or(String::new(), |v| v.to_string()),
                    c.stages.map_or(String::new(), |v| v.to_string()),
                    c.reduction_pct.map_or(String::new(), |v| format!("{v:.1}")),
                    c.fewer_stages,
                    c.status
                );
            }
        }
        s
    }

    /// First nonzero cell exit code in row-major order.
    pub fn exit_code(&self) -> u8 {
        self.rows
            .iter()
            .flat_map(|r| &r.cells)
            .map(|c| c.exit_code)
            .find(|&c| c != 0)
            .unwrap_or(0)
    }
}
