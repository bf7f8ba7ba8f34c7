use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use dyncolor::arb::ArbPipelineConfig;
use dyncolor::bench::{self, BinsOpts, GeneralOpts, OracleKind, RunSummary, WORKERS_ENV};
use dyncolor::bins::Variant;
use dyncolor::gen::{GenKind, TraceGenerator};
use dyncolor::interval::EngineConfig;
use dyncolor::lds::LdsConfig;
use dyncolor::suite::{run_suite, SuiteConfig};
use dyncolor::trace::UpdateTrace;

/// Fully dynamic graph coloring engines and their benchmark harness.
#[derive(Parser)]
#[command(name = "dyncolor", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Hierarchical-interval engine on an arbitrary dynamic graph.
    General(GeneralArgs),
    /// Layered engine for bounded-arboricity graphs.
    Lds(LdsArgs),
    /// Interval engine with orientation-backed degeneracy colorings.
    Arb(ArbArgs),
    /// The balls-and-bins game against a scripted Player 1.
    Bins(BinsArgs),
    /// Generate an update trace.
    Gen(GenArgs),
    /// Run a parameter grid from a key = value config file.
    Suite(SuiteArgs),
}

/// Where updates come from: a trace file, or a generated trace.
#[derive(Args)]
struct Source {
    /// Trace file (`n <count>` on the first line, then `+ u v` / `- u v`).
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Vertex count for a generated trace.
    #[arg(long, default_value_t = 256)]
    n: usize,
    /// Generator used when no trace file is given.
    #[arg(long = "gen", default_value = "random_graph")]
    generator: String,
    /// Length of a generated trace.
    #[arg(long, default_value_t = 10_000)]
    steps: usize,
    /// Seed for the generator and for randomized engines.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Source {
    fn load(&self) -> Result<UpdateTrace> {
        match &self.trace {
            Some(p) => UpdateTrace::read(p).with_context(|| format!("reading {}", p.display())),
            None => {
                let kind = GenKind::with_defaults(&self.generator, self.n)
                    .with_context(|| format!("unknown generator `{}`", self.generator))?;
                Ok(TraceGenerator::new(kind, self.n, self.steps, self.seed).generate())
            }
        }
    }
}

#[derive(Args)]
struct GeneralArgs {
    #[command(flatten)]
    src: Source,
    /// Trade-off parameter: ell = round(log2 n / beta).
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// det or rand.
    #[arg(long, default_value = "det")]
    mode: Variant,
    /// Spread each static recoloring over the following interval.
    #[arg(long)]
    deamortized: bool,
    /// Static oracle: greedy or degeneracy.
    #[arg(long, default_value = "greedy")]
    oracle: OracleKind,
    /// Arboricity assumed by the degeneracy oracle.
    #[arg(long, default_value_t = 1)]
    alpha: usize,
    /// Per-update metrics CSV (stdout when omitted).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct LdsArgs {
    #[command(flatten)]
    src: Source,
    #[arg(long, default_value_t = 1)]
    alpha: usize,
    /// Up-degree target after a move (default 4·alpha).
    #[arg(long)]
    d: Option<usize>,
    /// Up-degree ceiling; the rise threshold is delta/2.
    #[arg(long)]
    delta: Option<usize>,
    /// Full invariant check period (0: only at the end).
    #[arg(long, default_value_t = 0)]
    check_every: u64,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct ArbArgs {
    #[command(flatten)]
    src: Source,
    #[arg(long, default_value_t = 1)]
    alpha: usize,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// det or rand.
    #[arg(long, default_value = "det")]
    mode: Variant,
    #[arg(long)]
    deamortized: bool,
    /// Orientation out-degree cap (default 4·alpha).
    #[arg(long)]
    cap: Option<usize>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct BinsArgs {
    #[arg(long, default_value_t = 256)]
    n_bins: usize,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 10_000)]
    steps: usize,
    /// det or rand.
    #[arg(long, default_value = "det")]
    variant: Variant,
    /// focus, fresh, leveling or harmonic.
    #[arg(long, default_value = "harmonic")]
    adversary: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// random_graph, random_forest, union_of_forests, sliding_window,
    /// adversarial_star or adversarial_path.
    #[arg(long, default_value = "random_graph")]
    kind: String,
    #[arg(long, default_value_t = 256)]
    n: usize,
    #[arg(long, default_value_t = 10_000)]
    steps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Arboricity for union_of_forests.
    #[arg(long)]
    alpha: Option<usize>,
    /// Deletion probability for the forest generators.
    #[arg(long)]
    delete_prob: Option<f64>,
    /// Window length for sliding_window.
    #[arg(long)]
    window: Option<usize>,
    /// Output file (stdout when omitted).
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SuiteArgs {
    /// Config file of key = value lines.
    config: PathBuf,
    /// Override the config's out_dir.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, env = WORKERS_ENV)]
    workers: Option<usize>,
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(bytes: Vec<u8>, summary: &RunSummary, csv: &Option<PathBuf>) -> Result<()> {
    let mut w = sink(csv)?;
    w.write_all(&bytes)?;
    w.flush()?;
    if csv.is_some() {
        print_summary(summary);
    }
    Ok(())
}

fn print_summary(s: &RunSummary) {
    eprintln!(
        "steps={} recolorings={} static_calls={} max_gprime={} fallbacks={} colors_ever_used={} flips={} layer_moves={} max_layer={} wall_ms={:.1}",
        s.steps,
        s.total_recolorings,
        s.total_static_calls,
        s.max_gprime,
        s.fallbacks,
        s.colors_ever_used,
        s.total_flips,
        s.total_layer_moves,
        s.max_layer,
        s.wall_time_ns as f64 / 1e6
    );
}

fn gen_kind(a: &GenArgs) -> Result<GenKind> {
    let mut kind = GenKind::with_defaults(&a.kind, a.n).with_context(|| format!("unknown generator `{}`", a.kind))?;
    match &mut kind {
        GenKind::RandomForest { delete_prob } => {
            if let Some(p) = a.delete_prob {
                *delete_prob = p;
            }
        }
        GenKind::UnionOfForests { alpha, delete_prob } => {
            if let Some(x) = a.alpha {
                *alpha = x;
            }
            if let Some(p) = a.delete_prob {
                *delete_prob = p;
            }
        }
        GenKind::SlidingWindow { window } => {
            if let Some(w) = a.window {
                *window = w;
            }
        }
        _ => {}
    }
    Ok(kind)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::General(a) => {
            let trace = a.src.load()?;
            let cfg = EngineConfig::new(trace.n, a.beta).mode(a.mode).deamortized(a.deamortized).seed(a.src.seed);
            let opts = GeneralOpts { oracle: a.oracle, alpha: a.alpha, ..GeneralOpts::new(cfg) };
            let out = bench::run_general(&trace, &opts)?;
            emit(out.csv_bytes()?, &out.summary, &a.csv)?;
        }
        Cmd::Lds(a) => {
            let trace = a.src.load()?;
            let mut cfg = LdsConfig::new(trace.n, a.alpha);
            if let Some(d) = a.d {
                cfg = cfg.with_d(d);
            }
            if let Some(delta) = a.delta {
                cfg = cfg.with_delta(delta);
            }
            let out = bench::run_lds(&trace, cfg, a.check_every)?;
            emit(out.csv_bytes()?, &out.summary, &a.csv)?;
        }
        Cmd::Arb(a) => {
            let trace = a.src.load()?;
            let engine = EngineConfig::new(trace.n, a.beta).mode(a.mode).deamortized(a.deamortized).seed(a.src.seed);
            let mut cfg = ArbPipelineConfig::new(trace.n, a.alpha, a.beta).engine(engine);
            if let Some(c) = a.cap {
                cfg = cfg.cap(c);
            }
            let out = bench::run_arb(&trace, &cfg, 1024)?;
            emit(out.csv_bytes()?, &out.summary, &a.csv)?;
        }
        Cmd::Bins(a) => {
            let opts = BinsOpts {
                n_bins: a.n_bins,
                k: a.k,
                steps: a.steps,
                variant: a.variant,
                adversary: a.adversary,
                seed: a.seed,
            };
            let out = bench::run_bins(&opts)?;
            emit(out.csv_bytes()?, &out.summary, &a.csv)?;
        }
        Cmd::Gen(a) => {
            let kind = gen_kind(&a)?;
            let trace = TraceGenerator::new(kind, a.n, a.steps, a.seed).generate();
            let mut w = sink(&a.out)?;
            w.write_all(trace.to_text().as_bytes())?;
            w.flush()?;
        }
        Cmd::Suite(a) => {
            let mut cfg = SuiteConfig::read(&a.config).with_context(|| format!("reading {}", a.config.display()))?;
            if let Some(d) = a.out_dir {
                cfg.out_dir = d;
            }
            let workers = a.workers.unwrap_or_else(bench::workers_from_env);
            let report = run_suite(&cfg, workers)?;
            print!("{}", report.summary_table());
            write_summary(&cfg.out_dir, &report.summary_table())?;
            return Ok(report.passed());
        }
    }
    Ok(true)
}

fn write_summary(dir: &Path, text: &str) -> Result<()> {
    let p = dir.join("summary.txt");
    std::fs::write(&p, text).with_context(|| format!("writing {}", p.display()))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
