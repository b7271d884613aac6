use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ctsynth::benchgen::Benchmark;
use ctsynth::gpclib::{builtin_profile, library_to_string, load_library, ArchProfile, GpcMetrics, ProfileKind};
use ctsynth::ilp::{to_lp_file, IlpModel, ObjectiveMode, SolveStatus};
use ctsynth::report::Report;
use ctsynth::solver::{
    synthesize, SolveError, SolverChoice, SynthOptions, DEFAULT_BUILTIN_MAX_BITS, SOLVER_CMD_ENV, TIME_BUDGET_ENV,
};
use ctsynth::verify::{validate, SimOptions};

mod sweep;

const EXIT_OTHER: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_TIMEOUT: u8 = 3;
const EXIT_VERIFY: u8 = 4;
const EXIT_CONFIG: u8 = 5;

/// Compressor tree synthesis for FPGA logic cell profiles.
#[derive(Parser, Debug)]
#[command(name = "ctsynth", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize one benchmark, verify it and print a report.
    Synth {
        /// Benchmark spec, e.g. S:128, D:64, ADD:6x7, MAC3:8, BNN:3x3x256, HEAP:2,3,6.
        spec: String,
        #[command(flatten)]
        arch: ArchArgs,
        #[command(flatten)]
        solve: SolveArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Synthesize every benchmark on every profile and compare costs.
    Sweep {
        /// Benchmark specs.
        #[arg(required = true)]
        specs: Vec<String>,
        /// Comma-separated profile names.
        #[arg(long, value_delimiter = ',', default_value = "xilinx-baseline,x-luxor,x-luxor-plus")]
        profiles: Vec<String>,
        #[command(flatten)]
        solve: SolveArgs,
        /// Parallel jobs (0 = one per core).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long, value_enum, default_value_t = SweepFormat::Text)]
        format: SweepFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the counter metrics of a profile.
    Metrics {
        #[command(flatten)]
        arch: ArchArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-verify a JSON report written by `synth`.
    Verify {
        report: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random samples when the input is too wide to enumerate.
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
    },
    /// Write the LP model of one stage budget.
    ExportLp {
        spec: String,
        #[command(flatten)]
        arch: ArchArgs,
        /// Number of compression stages.
        #[arg(long)]
        stages: usize,
        #[arg(long, default_value = "total")]
        objective: ObjectiveMode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a built-in profile as an editable library file.
    Library {
        #[arg(long, default_value = "xilinx-baseline")]
        profile: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
struct ArchArgs {
    /// Built-in profile name.
    #[arg(long, default_value = "xilinx-baseline", conflicts_with = "library")]
    profile: String,
    /// JSON library file replacing the built-in profile.
    #[arg(long)]
    library: Option<PathBuf>,
    /// Also offer the C5:21 stand-in for the 4:2 compressor.
    #[arg(long)]
    enable_c42: bool,
}

impl ArchArgs {
    fn load(&self) -> Result<ArchProfile, Failure> {
        let p = match &self.library {
            Some(path) => load_library(path).map_err(Failure::config)?,
            None => builtin_profile(&self.profile).map_err(Failure::config)?,
        };
        Ok(if self.enable_c42 { p.with_compressors(true) } else { p })
    }
}

#[derive(Args, Debug, Clone)]
struct SolveArgs {
    /// builtin, external (command from the environment), external:<command>
    /// or heuristic[:efficiency|strength|product].
    #[arg(long, default_value = "builtin")]
    solver: String,
    #[arg(long, default_value_t = ctsynth::solver::DEFAULT_STAGES_MAX)]
    stages_max: usize,
    /// Seconds per stage budget.
    #[arg(long, env = TIME_BUDGET_ENV, default_value_t = 300)]
    time_budget: u64,
    #[arg(long, default_value = "total")]
    objective: ObjectiveMode,
    /// Largest heap the built-in solver accepts.
    #[arg(long, default_value_t = DEFAULT_BUILTIN_MAX_BITS)]
    builtin_max_bits: u32,
    /// Seed for random simulation inputs.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    /// Skip verification.
    #[arg(long = "unsafe")]
    skip_verify: bool,
}

impl SolveArgs {
    fn options(&self) -> Result<SynthOptions, Failure> {
        let solver = if self.solver == "external" {
            let cmd = std::env::var(SOLVER_CMD_ENV)
                .map_err(|_| Failure::config(format!("--solver external needs {SOLVER_CMD_ENV} to be set")))?;
            SolverChoice::External(cmd)
        } else {
            self.solver.parse().map_err(Failure::config)?
        };
        Ok(SynthOptions {
            solver,
            stages_max: self.stages_max,
            time_budget: Duration::from_secs(self.time_budget),
            objective: self.objective,
            builtin_max_bits: self.builtin_max_bits,
        })
    }

    fn sim(&self) -> SimOptions {
        SimOptions {
            samples: self.samples,
            seed: self.seed,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct OutArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SweepFormat {
    Text,
    Json,
    Csv,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(e: impl ToString) -> Self {
        Failure {
            code: EXIT_CONFIG,
            message: e.to_string(),
        }
    }

    fn other(e: impl ToString) -> Self {
        Failure {
            code: EXIT_OTHER,
            message: e.to_string(),
        }
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        let code = match e {
            SolveError::Infeasible(_) => EXIT_INFEASIBLE,
            SolveError::Timeout { .. } => EXIT_TIMEOUT,
            SolveError::TooLarge { .. } | SolveError::Config(_) => EXIT_CONFIG,
            _ => EXIT_OTHER,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::other(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Synthesizes and verifies one benchmark. The exit code is nonzero when
/// verification fails or the solver stopped on its time budget.
pub(crate) fn run_synth(
    benchmark: &Benchmark,
    profile: &ArchProfile,
    opts: &SynthOptions,
    sim: Option<SimOptions>,
) -> Result<(Report, u8), Failure> {
    let result = synthesize(benchmark, profile, opts)?;
    let verification = sim.map(|o| validate(&result.solution, benchmark, profile, o));
    let code = match (&verification, result.status, &opts.solver) {
        (Some(v), _, _) if !v.passed() => EXIT_VERIFY,
        (_, SolveStatus::Feasible, SolverChoice::Builtin | SolverChoice::External(_)) => EXIT_TIMEOUT,
        _ => 0,
    };
    let report = Report::new(
        benchmark,
        profile,
        &result.solution,
        &result.solver,
        result.status.as_str(),
        verification,
        result.wall.as_millis() as u64,
    );
    Ok((report, code))
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Synth { spec, arch, solve, out } => {
            let benchmark = Benchmark::parse(&spec).map_err(Failure::config)?;
            let profile = arch.load()?;
            let opts = solve.options()?;
            let sim = (!solve.skip_verify).then(|| solve.sim());
            let (report, code) = run_synth(&benchmark, &profile, &opts, sim)?;
            let text = match out.format {
                Format::Text => report.to_text(),
                Format::Json => report.to_json(),
            };
            emit(&out.out, &text)?;
            if code == EXIT_VERIFY {
                eprintln!("error: verification failed");
            }
            Ok(code)
        }
        Command::Sweep {
            specs,
            profiles,
            solve,
            jobs,
            format,
            out,
        } => {
            let benches = specs
                .iter()
                .map(|s| Benchmark::parse(s).map_err(Failure::config))
                .collect::<Result<Vec<_>, _>>()?;
            let profiles = profiles
                .iter()
                .map(|p| builtin_profile(p).map_err(Failure::config))
                .collect::<Result<Vec<_>, _>>()?;
            let opts = solve.options()?;
            let sim = (!solve.skip_verify).then(|| solve.sim());
            let table = sweep::run(&benches, &profiles, &opts, sim, jobs)?;
            let text = match format {
                SweepFormat::Text => table.to_text(),
                SweepFormat::Json => table.to_json(),
                SweepFormat::Csv => table.to_csv(),
            };
            emit(&out, &text)?;
            Ok(table.exit_code())
        }
        Command::Metrics { arch, format, out } => {
            let profile = arch.load()?;
            let rows: Vec<_> = profile
                .gpcs()
                .iter()
                .filter(|g| !g.is_pseudo_wire())
                .map(|g| GpcMetrics::of(g).row(g, g.cost(), g.delay_ps()))
                .collect();
            let text = match format {
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&rows).map_err(Failure::other)?;
                    s.push('\n');
                    s
                }
                Format::Text => {
                    let mut s = format!(
                        "{:<22} {:>3} {:>3} {:>4} {:>6} {:>5} {:>5} {:>6} {:>6}\n",
                        "GPC", "p", "q", "cost", "delay", "E", "S", "APD", "A"
                    );
                    for r in &rows {
                        let dash = || "-".to_string();
                        let _ = writeln!(
                            s,
                            "{:<22} {:>3} {:>3} {:>4} {:>6} {:>5} {:>5} {:>6} {:>6}",
                            r.name,
                            r.p,
                            r.q,
                            r.cost,
                            r.delay_ns.clone().unwrap_or_else(dash),
                            r.efficiency,
                            r.strength,
                            r.apd.clone().unwrap_or_else(dash),
                            r.slack
                        );
                    }
                    s
                }
            };
            emit(&out, &text)?;
            Ok(0)
        }
        Command::Verify { report, seed, samples } => {
            let text = fs::read_to_string(&report).map_err(|e| Failure::config(format!("{}: {e}", report.display())))?;
            let parsed = Report::from_json(&text).map_err(Failure::config)?;
            let (benchmark, profile, solution) = parsed.restore().map_err(Failure::config)?;
            let v = validate(&solution, &benchmark, &profile, SimOptions { samples, seed });
            print!("{}", v.to_text());
            if v.passed() {
                println!("{} {}: verified", parsed.benchmark, parsed.headline());
                Ok(0)
            } else {
                Ok(EXIT_VERIFY)
            }
        }
        Command::ExportLp {
            spec,
            arch,
            stages,
            objective,
            out,
        } => {
            let benchmark = Benchmark::parse(&spec).map_err(Failure::config)?;
            let profile = arch.load()?;
            let model = IlpModel::build(&benchmark, &profile, stages, objective);
            emit(&out, &to_lp_file(&model))?;
            Ok(0)
        }
        Command::Library { profile, out } => {
            let kind = ProfileKind::from_name(&profile)
                .ok_or_else(|| Failure::config(format!("unknown profile {profile:?}")))?;
            emit(&out, &library_to_string(&ctsynth::gpclib::builtin_library(kind)))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
