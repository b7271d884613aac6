//! Acceptance criteria, one PASS/FAIL/SKIP line each.
//!
//! Run with `cargo test -p ctsynth-core --test acceptance -- --nocapture`.
//! Criterion 7 and part of criterion 5 need an external MILP solver, given as
//! a command template in CTSYNTH_SOLVER_CMD, for example
//! `cbc {lp} sec {time} solve solu {sol}`.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use ctsynth::benchgen::Benchmark;
use ctsynth::gpclib::{builtin_library, compose_couples, round_half_up, Atom, GpcMetrics, ProfileKind};
use ctsynth::ilp::{IlpModel, ObjectiveMode, SolveStatus};
use ctsynth::report::Report;
use ctsynth::solver::{
    heuristic_synthesize, solve_builtin, synthesize, Metric, Solution, SolverChoice, SynthOptions, SOLVER_CMD_ENV,
    TIME_BUDGET_ENV,
};
use ctsynth::verify::{
    check_gpc_semantics, inject_fault, validate, xnorpopcount_identity, SemanticsMode, SimOptions,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// LE tolerance for the large-instance LE comparison, as a fraction.
const LARGE_LE_TOLERANCE: f64 = 0.02;
/// Samples per functional check when the input is too wide to enumerate.
const SIM_SAMPLES: u64 = 10_000;
/// Criteria whose failure is recorded rather than fatal.
const MAY_FAIL: &[u32] = &[7];

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn line(id: u32, title: &str, v: &Verdict, t: Duration) {
    let (tag, detail) = match v {
        Verdict::Pass(d) => ("PASS", d),
        Verdict::Fail(d) => ("FAIL", d),
        Verdict::Skip(d) => ("SKIP", d),
    };
    println!("criterion {id} {title}: {tag} ({:.2}s) {detail}", t.as_secs_f64());
}

fn within(t: Duration, limit: Duration, detail: String) -> Verdict {
    if t <= limit {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(format!("{detail}; runtime {:.1}s over {:.0}s", t.as_secs_f64(), limit.as_secs_f64()))
    }
}

fn decimals(printed: &str) -> u32 {
    printed.split_once('.').map_or(0, |(_, f)| f.len() as u32)
}

/// Printed value vs. computed value rounded to the printed precision.
fn same(printed: &str, value: num_rational::Ratio<i64>) -> bool {
    round_half_up(value, decimals(printed)) == printed
}

fn c1_metrics() -> Verdict {
    // name, LEs, E, S, A
    let xilinx_rows: [(&str, u32, &str, &str, &str); 18] = [
        ("C0606:11111", 4, "1.75", "2.40", "0.031"),
        ("C1415:11111", 4, "1.50", "2.20", "0.000"),
        ("C2215:11111", 4, "1.25", "2.00", "0.000"),
        ("C0615:11111", 4, "1.75", "2.40", "0.000"),
        ("C1423:11111", 4, "1.25", "2.00", "0.000"),
        ("C2223:11111", 4, "1.00", "1.80", "0.000"),
        ("C0623:11111", 4, "1.50", "2.20", "0.000"),
        ("C1406:11111", 4, "1.50", "2.20", "0.031"),
        ("C2206:11111", 4, "1.25", "2.00", "0.031"),
        ("C1325:11111", 4, "1.50", "2.20", "0.063"),
        ("C06060606:111111111", 4, "3.75", "2.67", "0.002"),
        ("C140606:1111111", 4, "2.50", "2.43", "0.008"),
        ("C220606:1111111", 4, "2.25", "2.29", "0.008"),
        ("C060606:1111111", 4, "2.75", "2.57", "0.008"),
        ("C060615:1111111", 4, "2.75", "2.57", "0.000"),
        ("C060623:1111111", 4, "2.50", "2.43", "0.000"),
        ("C061406:1111111", 4, "2.50", "2.43", "0.008"),
        ("C062206:1111111", 4, "2.25", "2.29", "0.008"),
    ];
    // name, S, A, delay ns, LEs, APD
    let intel_rows: [(&str, &str, &str, &str, u32, &str); 4] = [
        ("C6:111", "2", "0.13", "0.38", 3, "7.9"),
        ("C15:111", "2", "0", "0.38", 3, "7.9"),
        ("C23:111", "1.67", "0", "0.38", 2, "5.3"),
        ("C25:121", "1.75", "0", "0.38", 2, "11.8"),
    ];
    let mut bad = Vec::new();
    let xp = builtin_library(ProfileKind::XLuxorPlus);
    for (name, k, e, s, a) in xilinx_rows {
        let Some(g) = xp.gpc(name) else {
            bad.push(format!("{name} missing"));
            continue;
        };
        let m = GpcMetrics::of(g);
        if g.cost() != k || !same(e, m.efficiency) || !same(s, m.strength) || !same(a, m.slack) {
            bad.push(format!(
                "{name}: k={} E={} S={} A={}",
                g.cost(),
                round_half_up(m.efficiency, 2),
                round_half_up(m.strength, 2),
                round_half_up(m.slack, 3)
            ));
        }
    }
    let ib = builtin_library(ProfileKind::IntelBaseline);
    for (name, s, a, d, k, apd) in intel_rows {
        let Some(g) = ib.gpc(name) else {
            bad.push(format!("{name} missing"));
            continue;
        };
        let m = GpcMetrics::of(g);
        let delay = g.delay_ps().map(|p| num_rational::Ratio::new(i64::from(p), 1000));
        let ok = g.cost() == k
            && same(s, m.strength)
            && same(a, m.slack)
            && delay.is_some_and(|x| same(d, x))
            && m.apd.is_some_and(|x| same(apd, x));
        if !ok {
            bad.push(format!("{name}: k={} S={} A={} APD={:?}", g.cost(), m.strength, m.slack, m.apd));
        }
    }
    if bad.is_empty() {
        Verdict::Pass("18 Xilinx metric rows, 4 Intel metric rows".into())
    } else {
        Verdict::Fail(bad.join("; "))
    }
}

fn c2_couples() -> Verdict {
    let names = |v: Vec<ctsynth::gpclib::Gpc>| v.into_iter().map(|g| g.name().to_string()).collect::<BTreeSet<_>>();
    let base = compose_couples(&Atom::ALL, 2, ProfileKind::XilinxBaseline).map(names);
    let plus3 = compose_couples(&Atom::ALL, 3, ProfileKind::XLuxorPlus).map(names);
    let plus4 = compose_couples(&Atom::ALL, 4, ProfileKind::XLuxorPlus).map(names);
    let (Ok(base), Ok(plus3), Ok(plus4)) = (base, plus3, plus4) else {
        return Verdict::Fail("composition error".into());
    };
    let want_base: BTreeSet<String> = [
        "C0606:11111", "C1415:11111", "C2215:11111", "C0615:11111", "C1423:11111", "C2223:11111",
        "C0623:11111", "C1406:11111", "C2206:11111", "C1325:11111",
    ]
    .map(String::from)
    .into();
    let want_plus: BTreeSet<String> = [
        "C06060606:111111111", "C140606:1111111", "C220606:1111111", "C060606:1111111",
        "C060615:1111111", "C060623:1111111", "C061406:1111111", "C062206:1111111",
    ]
    .map(String::from)
    .into();
    let plus: BTreeSet<String> = plus3.union(&plus4).cloned().collect();
    if base == want_base && plus == want_plus {
        Verdict::Pass("10 baseline, 8 X-LUXOR+ names".into())
    } else {
        Verdict::Fail(format!("baseline {base:?}, X-LUXOR+ {plus:?}"))
    }
}

fn c3_semantics() -> Verdict {
    let mut seen = BTreeSet::new();
    let (mut exhaustive, mut sampled) = (0, 0);
    for kind in ProfileKind::BUILTIN {
        for g in builtin_library(kind).gpcs() {
            if !seen.insert(g.name().to_string()) {
                continue;
            }
            match check_gpc_semantics(g, SemanticsMode::auto(g, 0x5eed)) {
                Ok(r) if r.exhaustive => exhaustive += 1,
                Ok(_) => sampled += 1,
                Err(e) => return Verdict::Fail(e.to_string()),
            }
        }
    }
    Verdict::Pass(format!("{exhaustive} exhaustive, {sampled} sampled at 10^5"))
}

fn c4_identity() -> Verdict {
    let r = xnorpopcount_identity();
    if r.passed() {
        Verdict::Pass(format!("{} cases", r.cases))
    } else {
        Verdict::Fail(format!("{} of {} cases disagree", r.failures, r.cases))
    }
}

fn small_set() -> Vec<String> {
    let mut v: Vec<String> = (4..=24).map(|n| format!("S:{n}")).collect();
    v.extend((4..=12).map(|n| format!("D:{n}")));
    v.push("ADD:3x3".into());
    v.push("ADD:6x7".into());
    v
}

fn external() -> Option<(String, Duration)> {
    let cmd = std::env::var(SOLVER_CMD_ENV).ok().filter(|c| !c.trim().is_empty())?;
    let secs = std::env::var(TIME_BUDGET_ENV).ok().and_then(|s| s.parse().ok()).unwrap_or(300);
    Some((cmd, Duration::from_secs(secs)))
}

fn c5_small_optimality() -> Verdict {
    let mut bad = Vec::new();
    let mut le_only = Vec::new();
    let mut solved = 0;
    let ext = external();
    let mut agreed = 0;
    for kind in ProfileKind::BUILTIN {
        let profile = builtin_library(kind);
        for spec in small_set() {
            let b = Benchmark::parse(&spec).unwrap();
            let r = match synthesize(&b, &profile, &SynthOptions::default()) {
                Ok(r) => r,
                Err(e) => {
                    bad.push(format!("{spec}/{}: {e}", kind.name()));
                    continue;
                }
            };
            solved += 1;
            let s = &r.solution;
            let v = validate(s, &b, &profile, SimOptions { samples: SIM_SAMPLES, seed: 5 });
            if !v.passed() {
                bad.push(format!("{spec}/{}: verification\n{}", kind.name(), v.to_text()));
            }
            for m in Metric::ALL {
                let h = heuristic_synthesize(&b, &profile, m).unwrap();
                if (s.stage_count, s.cost.total) > (h.stage_count, h.cost.total) {
                    bad.push(format!(
                        "{spec}/{}: {}/{} stages worse than {m} {}/{}",
                        kind.name(),
                        s.cost.total,
                        s.stage_count,
                        h.cost.total,
                        h.stage_count
                    ));
                }
                if s.cost.total > h.cost.total {
                    // The heuristic spent more stages. Compare at its stage budget.
                    let model = IlpModel::build(&b, &profile, h.stage_count, ObjectiveMode::Total);
                    let out = solve_builtin(&model, Duration::from_secs(300), None);
                    let proven = out.status == SolveStatus::Optimal;
                    let at = out
                        .values
                        .map(|v| Solution::decode(&b, &profile, &model, &v).unwrap().cost.total);
                    le_only.push(format!(
                        "{spec}/{}: {}LE@{} vs {m} {}LE@{}, best at {} stages: {}",
                        kind.name(),
                        s.cost.total,
                        s.stage_count,
                        h.cost.total,
                        h.stage_count,
                        h.stage_count,
                        match (at, proven) {
                            (Some(x), true) => format!("{x}LE optimal"),
                            (Some(x), false) => format!("{x}LE unproven"),
                            (None, _) => "none found within the search budget".into(),
                        }
                    ));
                    if proven && at.is_some_and(|x| x > h.cost.total) {
                        bad.push(format!("{spec}/{}: equal-stage optimum above {m}", kind.name()));
                    }
                }
            }
            if let Some((cmd, budget)) = &ext {
                let opts = SynthOptions {
                    solver: SolverChoice::External(cmd.clone()),
                    time_budget: *budget,
                    ..SynthOptions::default()
                };
                match synthesize(&b, &profile, &opts) {
                    Ok(x) if (x.solution.stage_count, x.solution.cost.total) == (s.stage_count, s.cost.total) => agreed += 1,
                    Ok(x) => bad.push(format!(
                        "{spec}/{}: external {}/{} vs builtin {}/{}",
                        kind.name(),
                        x.solution.cost.total,
                        x.solution.stage_count,
                        s.cost.total,
                        s.stage_count
                    )),
                    Err(e) => bad.push(format!("{spec}/{}: external: {e}", kind.name())),
                }
            }
        }
    }
    for l in &le_only {
        println!("  note 5(b): heuristic cheaper in LE only by using more stages: {l}");
    }
    let ext_note = match ext {
        Some(_) => format!(", external agrees on {agreed}"),
        None => ", external comparison skipped (no solver configured)".into(),
    };
    if bad.is_empty() {
        Verdict::Pass(format!("{solved} instances over 6 profiles verified and dominant{ext_note}"))
    } else {
        Verdict::Fail(bad.join("; "))
    }
}

fn c6_known_costs() -> Verdict {
    let mut bad = Vec::new();
    let s6 = Benchmark::parse("S:6").unwrap();
    for (kind, want) in [(ProfileKind::XilinxBaseline, 3), (ProfileKind::XLuxor, 2), (ProfileKind::XLuxorPlus, 2)] {
        let r = synthesize(&s6, &builtin_library(kind), &SynthOptions::default()).unwrap();
        if r.solution.cost.compression != want {
            bad.push(format!("S:6 on {}: {} LEs", kind.name(), r.solution.cost.compression));
        }
    }
    let d5 = Benchmark::parse("D:5").unwrap();
    let first_stage = |kind: ProfileKind| {
        let p = builtin_library(kind);
        let r = synthesize(&d5, &p, &SynthOptions::default()).unwrap();
        let stage0: Vec<_> = r.solution.counters().into_iter().filter(|c| c.stage == 0).collect();
        let c25: u32 = stage0.iter().filter(|c| c.gpc == "C25:121").map(|c| c.count).sum();
        let unit = p.gpc("C25:121").unwrap().cost();
        let cost: u32 = stage0.iter().map(|c| p.gpc(&c.gpc).unwrap().cost() * c.count).sum();
        (c25, unit, cost)
    };
    let (n_base, unit_base, cost_base) = first_stage(ProfileKind::IntelBaseline);
    let (n_plus, unit_plus, cost_plus) = first_stage(ProfileKind::ILuxorPlus);
    let ok = n_base > 0
        && n_base == n_plus
        && (unit_base, unit_plus) == (2, 1)
        && cost_base - cost_plus == n_base * (unit_base - unit_plus);
    if !ok {
        bad.push(format!(
            "D:5 stage 0: baseline {n_base}xC25:121 at {unit_base} ({cost_base} ALMs), i-luxor-plus {n_plus} at {unit_plus} ({cost_plus})"
        ));
    }
    if bad.is_empty() {
        Verdict::Pass(format!(
            "S:6 3/2/2 LEs; D:5 C25:121 {unit_base}->{unit_plus} ALM, stage 0 {cost_base}->{cost_plus}"
        ))
    } else {
        Verdict::Fail(bad.join("; "))
    }
}

fn c7_large_instances() -> Verdict {
    let Some((cmd, budget)) = external() else {
        return Verdict::Skip(format!("{SOLVER_CMD_ENV} not set"));
    };
    let targets = [
        ("S:128", ProfileKind::XilinxBaseline, 100, 3),
        ("S:128", ProfileKind::XLuxor, 79, 3),
        ("S:128", ProfileKind::XLuxorPlus, 78, 3),
        ("S:256", ProfileKind::XilinxBaseline, 195, 4),
        ("S:256", ProfileKind::XLuxor, 159, 4),
        ("S:256", ProfileKind::XLuxorPlus, 154, 4),
        ("D:128", ProfileKind::XilinxBaseline, 168, 4),
        ("D:128", ProfileKind::XLuxor, 156, 4),
        ("D:128", ProfileKind::XLuxorPlus, 150, 4),
    ];
    let opts = SynthOptions {
        solver: SolverChoice::External(cmd),
        time_budget: budget,
        ..SynthOptions::default()
    };
    let mut rows = Vec::new();
    let mut fails = 0;
    for (spec, kind, le, st) in targets {
        let b = Benchmark::parse(spec).unwrap();
        let p = builtin_library(kind);
        match synthesize(&b, &p, &opts) {
            Ok(r) => {
                let got = r.solution.cost.total;
                let dev = (f64::from(got) - f64::from(le)) / f64::from(le);
                let ok = dev.abs() <= LARGE_LE_TOLERANCE + 1e-12 && r.solution.stage_count == st;
                if !ok {
                    fails += 1;
                }
                rows.push(format!(
                    "{spec}/{}={got}/{} ({:+.1}% vs {le}/{st}, {}){}",
                    kind.name(),
                    r.solution.stage_count,
                    100.0 * dev,
                    r.status.as_str(),
                    if ok { "" } else { " MISS" }
                ));
            }
            Err(e) => {
                fails += 1;
                rows.push(format!("{spec}/{}: {e} MISS", kind.name()));
            }
        }
    }
    if fails == 0 {
        Verdict::Pass(rows.join("; "))
    } else {
        Verdict::Fail(rows.join("; "))
    }
}

fn c8_heuristic() -> Verdict {
    let mut bad = Vec::new();
    let s128 = Benchmark::parse("S:128").unwrap();
    let xb = builtin_library(ProfileKind::XilinxBaseline);
    let h = heuristic_synthesize(&s128, &xb, Metric::Efficiency).unwrap();
    if !(100..=110).contains(&h.cost.total) || h.stage_count > 5 {
        bad.push(format!("S:128 efficiency {}/{}", h.cost.total, h.stage_count));
    }
    let mut checked = 0;
    let mut specs = small_set();
    specs.extend(["S:128", "S:256", "D:128", "MAC3:4", "FIR3:3", "BNN:3x3x16"].map(String::from));
    for kind in ProfileKind::BUILTIN {
        let p = builtin_library(kind);
        for spec in &specs {
            let b = Benchmark::parse(spec).unwrap();
            for m in Metric::ALL {
                let s = heuristic_synthesize(&b, &p, m).unwrap();
                let v = validate(&s, &b, &p, SimOptions { samples: 1000, seed: 8 });
                checked += 1;
                if !v.passed() {
                    bad.push(format!("{spec}/{}/{m}\n{}", kind.name(), v.to_text()));
                }
            }
        }
    }
    if bad.is_empty() {
        Verdict::Pass(format!(
            "S:128 efficiency {} LEs in {} stages; {checked} heuristic trees verified",
            h.cost.total, h.stage_count
        ))
    } else {
        Verdict::Fail(bad.join("; "))
    }
}

fn c9_properties() -> Verdict {
    let mut bad = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let cases = [
        ("D:8", ProfileKind::XLuxorPlus),
        ("S:12", ProfileKind::XilinxBaseline),
        ("ADD:5x4", ProfileKind::IntelBaseline),
        ("BNN:12", ProfileKind::ILuxorPlus),
        ("MAC3:3", ProfileKind::XLuxor),
    ];
    let mut caught = 0;
    let mut total = 0;
    for (i, (spec, kind)) in cases.iter().cycle().take(50).enumerate() {
        let b = Benchmark::parse(spec).unwrap();
        let p = builtin_library(*kind);
        let s = synthesize(&b, &p, &SynthOptions::default()).unwrap().solution;
        let Some(m) = inject_fault(&s, &p, &mut rng) else {
            bad.push(format!("mutant {i}: nothing to mutate"));
            continue;
        };
        total += 1;
        if !validate(&m, &b, &p, SimOptions::default()).passed() {
            caught += 1;
        } else {
            bad.push(format!("mutant {i} of {spec} undetected"));
        }
    }
    let report = |spec: &str, kind: ProfileKind| {
        let b = Benchmark::parse(spec).unwrap();
        let p = builtin_library(kind);
        let r = synthesize(&b, &p, &SynthOptions::default()).unwrap();
        let v = validate(&r.solution, &b, &p, SimOptions::default());
        Report::new(&b, &p, &r.solution, &r.solver, r.status.as_str(), Some(v), 0).to_json()
    };
    let mut same = 0;
    for (spec, kind) in [("ADD:6x7", ProfileKind::XLuxorPlus), ("S:24", ProfileKind::IntelBaseline), ("D:12", ProfileKind::ILuxor)] {
        if report(spec, kind) == report(spec, kind) {
            same += 1;
        } else {
            bad.push(format!("{spec}/{} reports differ", kind.name()));
        }
    }
    if bad.is_empty() {
        Verdict::Pass(format!("{caught}/{total} mutants caught; {same} report pairs byte-identical"))
    } else {
        Verdict::Fail(bad.join("; "))
    }
}

#[test]
fn acceptance() {
    let criteria: [(u32, &str, fn() -> Verdict, u64); 9] = [
        (1, "metrics reproduction", c1_metrics, 1),
        (2, "couple generation", c2_couples, 1),
        (3, "GPC semantics", c3_semantics, 60),
        (4, "XnorPopcount identity", c4_identity, 1),
        (5, "small-instance optimality", c5_small_optimality, 600),
        (6, "known small costs", c6_known_costs, 60),
        (7, "large-instance LE targets", c7_large_instances, u64::MAX / 4),
        (8, "heuristic sanity", c8_heuristic, 600),
        (9, "property suite", c9_properties, 600),
    ];
    let mut failed = Vec::new();
    for (id, title, check, limit) in criteria {
        let t0 = Instant::now();
        let verdict = check();
        let t = t0.elapsed();
        let verdict = match verdict {
            Verdict::Pass(d) => within(t, Duration::from_secs(limit), d),
            other => other,
        };
        line(id, title, &verdict, t);
        if matches!(verdict, Verdict::Fail(_)) {
            failed.push(id);
        }
    }
    let fatal: Vec<u32> = failed.iter().copied().filter(|id| !MAY_FAIL.contains(id)).collect();
    assert!(fatal.is_empty(), "criteria failed: {fatal:?}");
}
