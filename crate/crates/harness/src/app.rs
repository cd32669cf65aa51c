//! Argument parsing and command dispatch for the `gma` binary.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gma_core::sketch::{Pipeline, SketchPlan};

use crate::bench::{
    run_bench, summarize, write_csv, write_summary_csv, BenchConfig, BenchMethod, COLUMNS, SUMMARY_COLUMNS,
};
use crate::solve::{run_solve, SolveArgs, SolveMethod};
use crate::suite::{run_default_suite, SuiteConfig};
use crate::Failure;

#[derive(Parser)]
#[command(name = "gma", version, about = "Sketched solvers for min_X ‖A − M·X·N‖_F")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem read from Matrix Market files.
    Solve(SolveCmd),
    /// Run seeded synthetic trials and write per-trial CSV plus a summary.
    #[command(after_help = bench_help())]
    Bench(BenchCmd),
    /// Run the property-verification suite; exits 1 if any check fails.
    Verify(VerifyCmd),
}

#[derive(Args)]
struct PlanArgs {
    /// Target relative accuracy ε in (0, 1).
    #[arg(long, default_value_t = 0.25)]
    epsilon: f64,
    /// Seed for all randomness.
    #[arg(long, env = "GMA_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 4.0)]
    c_embed: f64,
    #[arg(long, default_value_t = 4.0)]
    c_prod: f64,
    #[arg(long, default_value_t = 2.0)]
    c_log: f64,
}

impl PlanArgs {
    fn plan(&self) -> SketchPlan {
        SketchPlan {
            c_embed: self.c_embed,
            c_prod: self.c_prod,
            c_log: self.c_log,
            ..SketchPlan::new(self.epsilon, self.seed)
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PipelineArg {
    SparseGaussian,
    Leverage,
}

impl From<PipelineArg> for Pipeline {
    fn from(p: PipelineArg) -> Self {
        match p {
            PipelineArg::SparseGaussian => Pipeline::SparseGaussian,
            PipelineArg::Leverage => Pipeline::Leverage,
        }
    }
}

#[derive(Args)]
struct SolveCmd {
    /// A (m×n), coordinate or array format.
    #[arg(long)]
    a: PathBuf,
    /// M (m×c), array format.
    #[arg(long)]
    m: PathBuf,
    /// N (r×n), array format. Optional for the symmetric method.
    #[arg(long)]
    n: Option<PathBuf>,
    #[arg(long, value_enum)]
    method: SolveMethod,
    /// Pipeline used by the symmetric method.
    #[arg(long, value_enum, default_value = "sparse-gaussian")]
    pipeline: PipelineArg,
    #[command(flatten)]
    plan: PlanArgs,
    /// Where to write X (array format).
    #[arg(long)]
    out: PathBuf,
    /// Where to write the JSON report; stdout when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct BenchCmd {
    #[arg(long, default_value_t = 1000)]
    m: usize,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 8)]
    c: usize,
    #[arg(long, default_value_t = 8)]
    r: usize,
    /// Noise level η relative to ‖M·X₀·N‖_F.
    #[arg(long, default_value_t = 0.5)]
    noise: f64,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "sparse-gaussian,leverage")]
    methods: Vec<BenchMethod>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// Store A sparse with this fraction of entries kept.
    #[arg(long)]
    density: Option<f64>,
    /// Symmetric instances (n = m, r = c) solved by the symmetric variant.
    #[arg(long)]
    symmetric: bool,
    #[command(flatten)]
    plan: PlanArgs,
    /// Worker threads for trial-level parallelism.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Per-trial CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-method summary CSV; stderr when omitted.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyCmd {
    /// Trials per sketch-property check.
    #[arg(long, default_value_t = 200)]
    trials: usize,
    /// Trials per relative-error check.
    #[arg(long, default_value_t = 20)]
    gma_trials: usize,
    #[arg(long, env = "GMA_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// JSON-lines report; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn bench_help() -> String {
    format!(
        "Per-trial CSV columns, in order:\n  {}\n\nSummary CSV columns, in order:\n  {}\n\n\
         Floats carry 17 significant digits. With identical arguments and seed the output \
         is identical except for the time_* columns.",
        COLUMNS.join(","),
        SUMMARY_COLUMNS.join(",")
    )
}

fn sink<'a>(path: Option<&PathBuf>, fallback: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>, Failure> {
    Ok(match path {
        Some(p) => {
            Box::new(BufWriter::new(File::create(p).map_err(|e| Failure::input(format!("{}: {e}", p.display())))?))
        }
        None => Box::new(fallback),
    })
}

fn solve(cmd: SolveCmd, stdout: &mut dyn Write) -> Result<(), Failure> {
    let args = SolveArgs {
        a: cmd.a,
        m: cmd.m,
        n: cmd.n,
        method: cmd.method,
        pipeline: cmd.pipeline.into(),
        plan: cmd.plan.plan(),
        out: cmd.out,
    };
    let record = run_solve(&args)?;
    let mut w = sink(cmd.report.as_ref(), stdout)?;
    serde_json::to_writer(&mut w, &record).map_err(|e| Failure::Input(e.into()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn bench(cmd: BenchCmd, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    let plan = cmd.plan;
    let config = BenchConfig {
        m: cmd.m,
        n: cmd.n,
        c: cmd.c,
        r: cmd.r,
        epsilon: plan.epsilon,
        noise: cmd.noise,
        methods: cmd.methods,
        trials: cmd.trials,
        seed: plan.seed,
        c_embed: plan.c_embed,
        c_prod: plan.c_prod,
        c_log: plan.c_log,
        density: cmd.density,
        symmetric: cmd.symmetric,
    };
    let reports = run_bench(&config, cmd.threads)?;
    write_csv(sink(cmd.out.as_ref(), stdout)?, &reports)?;
    write_summary_csv(sink(cmd.summary.as_ref(), stderr)?, &summarize(&reports))?;
    Ok(())
}

fn verify(cmd: VerifyCmd, stdout: &mut dyn Write) -> Result<(), Failure> {
    let cfg = SuiteConfig { trials: cmd.trials, gma_trials: cmd.gma_trials, seed: cmd.seed };
    if cfg.trials == 0 || cfg.gma_trials == 0 {
        return Err(Failure::input("trial counts must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cmd.threads.max(1))
        .build()
        .map_err(|e| Failure::Input(e.into()))?;
    let reports = pool.install(|| run_default_suite(&cfg))?;
    let mut w = sink(cmd.out.as_ref(), stdout)?;
    for r in &reports {
        serde_json::to_writer(&mut w, r).map_err(|e| Failure::Input(e.into()))?;
        writeln!(w)?;
    }
    w.flush()?;
    let failed: Vec<String> =
        reports.iter().filter(|r| !r.verdict).map(|r| format!("{} [{}]", r.property, r.subject)).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verdict(format!("failed checks: {}", failed.join("; "))))
    }
}

/// Parses `args` (program name first) and runs the command. Returns the process
/// exit code: 0 on success, 1 when a verification check fails, 2 for input and
/// usage errors, 3 for numerical failures.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return e.exit_code();
        }
    };
    let result = match cli.command {
        Command::Solve(c) => solve(c, stdout),
        Command::Bench(c) => bench(c, stdout, stderr),
        Command::Verify(c) => verify(c, stdout),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
