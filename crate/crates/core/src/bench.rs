//! Engine runners: replay a trace, check the coloring as it evolves, and
//! collect one metrics row per update.

use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::arb::{ArbError, ArbPipeline, ArbPipelineConfig};
use crate::bins::{adversary_by_name, run_adversary, BinsError, Variant};
use crate::graph::{EdgeOp, VertexId};
use crate::interval::{EngineConfig, EngineError, IntervalEngine};
use crate::lds::{Lds, LdsConfig, LdsError};
use crate::static_color::{DegeneracyOracle, GreedyStatic, StaticColoringOracle};
use crate::trace::UpdateTrace;

/// Environment variable holding the suite's worker count.
pub const WORKERS_ENV: &str = "DYNCOLOR_WORKERS";

pub fn workers_from_env() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .filter(|&w: &usize| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |p| p.get()))
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Lds(#[from] LdsError),
    #[error(transparent)]
    Arb(#[from] ArbError),
    #[error(transparent)]
    Bins(#[from] BinsError),
    #[error("step {step}: edge {u}-{v} is monochromatic")]
    Improper { step: u64, u: VertexId, v: VertexId },
    #[error("step {step}: {what}")]
    Invariant { step: u64, what: String },
    #[error("unknown {what} `{name}`")]
    Unknown { what: &'static str, name: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    Greedy,
    Degeneracy,
}

impl FromStr for OracleKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "greedy" => Ok(OracleKind::Greedy),
            "degeneracy" => Ok(OracleKind::Degeneracy),
            _ => Err(format!("unknown oracle `{s}` (expected greedy or degeneracy)")),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct GeneralRow {
    pub step: u64,
    pub recolorings: usize,
    pub static_calls: usize,
    pub colors_in_use: usize,
    pub gprime_maxdeg: usize,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct ArbRow {
    pub step: u64,
    pub recolorings: usize,
    pub static_calls: usize,
    pub colors_in_use: usize,
    pub gprime_maxdeg: usize,
    pub flips: u64,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct LdsRow {
    pub step: u64,
    pub flips: usize,
    pub layer_moves: usize,
    pub recolorings: usize,
    pub colors_in_use: usize,
    pub max_layer: usize,
    pub max_dup: usize,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct BinsRow {
    pub step: u64,
    pub max_bin: usize,
}

/// Whole-run figures. Wall time is kept here, never in the CSV rows, so the
/// CSVs stay byte-identical across runs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunSummary {
    pub steps: u64,
    pub total_recolorings: u64,
    pub total_static_calls: u64,
    pub max_step_recolorings: usize,
    pub max_gprime: usize,
    pub fallbacks: u64,
    pub colors_ever_used: usize,
    /// Non-fallback steps whose recolorings exceeded the worst-case bound
    /// (deamortized runs only).
    pub over_worst_case: u64,
    pub worst_case_bound: usize,
    pub ell: usize,
    pub log_n: usize,
    pub palette_size: usize,
    pub total_flips: u64,
    pub total_layer_moves: u64,
    pub max_layer: usize,
    pub max_dup: usize,
    pub max_out_degree: usize,
    pub max_bin: usize,
    pub wall_time_ns: u128,
}

#[derive(Debug, Clone)]
pub struct RunOutput<R> {
    pub rows: Vec<R>,
    pub summary: RunSummary,
}

impl<R: Serialize> RunOutput<R> {
    pub fn csv_bytes(&self) -> Result<Vec<u8>, BenchError> {
        csv_bytes(&self.rows)
    }
}

pub fn csv_bytes<R: Serialize>(rows: &[R]) -> Result<Vec<u8>, BenchError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    w.into_inner().map_err(|e| BenchError::Io(e.into_error()))
}

pub fn write_csv<R: Serialize>(rows: &[R], mut out: impl Write) -> Result<(), BenchError> {
    out.write_all(&csv_bytes(rows)?)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralOpts {
    pub engine: EngineConfig,
    pub oracle: OracleKind,
    /// Arboricity handed to the degeneracy oracle.
    pub alpha: usize,
    /// Full properness scan period; touched vertices are checked every step.
    pub full_check_every: u64,
}

impl GeneralOpts {
    pub fn new(engine: EngineConfig) -> Self {
        GeneralOpts { engine, oracle: OracleKind::Greedy, alpha: 1, full_check_every: 1024 }
    }
}

fn make_oracle(kind: OracleKind, alpha: usize) -> Box<dyn StaticColoringOracle> {
    match kind {
        OracleKind::Greedy => Box::new(GreedyStatic),
        OracleKind::Degeneracy => Box::new(DegeneracyOracle::new(alpha)),
    }
}

fn improper(step: u64, bad: &[(VertexId, VertexId)]) -> Result<(), BenchError> {
    match bad.first() {
        Some(&(u, v)) => Err(BenchError::Improper { step, u, v }),
        None => Ok(()),
    }
}

fn check_engine(e: &IntervalEngine, touched: &[VertexId], full: bool) -> Result<(), BenchError> {
    let bad = if full { e.check_properness() } else { e.check_properness_at(touched) };
    improper(e.step(), &bad)
}

pub fn run_general(trace: &UpdateTrace, opts: &GeneralOpts) -> Result<RunOutput<GeneralRow>, BenchError> {
    let start = Instant::now();
    let mut e = IntervalEngine::new(opts.engine.clone(), make_oracle(opts.oracle, opts.alpha))?;
    let mut rows = Vec::with_capacity(trace.len());
    let mut s = RunSummary {
        worst_case_bound: e.worst_case_bound(),
        ell: e.ell(),
        log_n: opts.engine.log_n(),
        palette_size: e.palette_size(),
        ..RunSummary::default()
    };
    for ev in &trace.events {
        let r = e.process_update(ev, None)?;
        let mut touched = r.touched.clone();
        touched.extend([ev.u, ev.v]);
        let full = r.fallback || (opts.full_check_every > 0 && r.step % opts.full_check_every == 0);
        check_engine(&e, &touched, full)?;
        s.max_step_recolorings = s.max_step_recolorings.max(r.recolorings);
        s.max_gprime = s.max_gprime.max(r.gprime_maxdeg);
        if opts.engine.deamortized && !r.fallback && r.recolorings > s.worst_case_bound {
            s.over_worst_case += 1;
        }
        rows.push(GeneralRow {
            step: r.step,
            recolorings: r.recolorings,
            static_calls: r.static_calls.len(),
            colors_in_use: e.colors_in_use(),
            gprime_maxdeg: r.gprime_maxdeg,
        });
    }
    check_engine(&e, &[], true)?;
    s.steps = e.step();
    s.total_recolorings = e.total_recolorings();
    s.total_static_calls = e.total_static_calls();
    s.fallbacks = e.fallbacks();
    s.colors_ever_used = e.colors_ever_used();
    s.wall_time_ns = start.elapsed().as_nanos();
    Ok(RunOutput { rows, summary: s })
}

pub fn run_arb(
    trace: &UpdateTrace,
    cfg: &ArbPipelineConfig,
    full_check_every: u64,
) -> Result<RunOutput<ArbRow>, BenchError> {
    let start = Instant::now();
    let mut p = ArbPipeline::new(cfg.clone())?;
    let mut rows = Vec::with_capacity(trace.len());
    let mut s = RunSummary {
        worst_case_bound: p.engine().worst_case_bound(),
        ell: p.engine().ell(),
        log_n: cfg.engine.log_n(),
        palette_size: p.engine().palette_size(),
        ..RunSummary::default()
    };
    for ev in &trace.events {
        let r = p.pipeline_update(ev)?;
        let step = r.engine.step;
        let mut touched = r.engine.touched.clone();
        touched.extend([ev.u, ev.v]);
        let full = r.engine.fallback || (full_check_every > 0 && step % full_check_every == 0);
        check_engine(p.engine(), &touched, full)?;
        let o = p.orientation();
        for x in [ev.u, ev.v] {
            if o.out_degree(x) > o.cap() {
                return Err(BenchError::Invariant { step, what: format!("out-degree of {x} above cap {}", o.cap()) });
            }
        }
        s.max_out_degree = s.max_out_degree.max(o.out_degree(ev.u)).max(o.out_degree(ev.v));
        s.max_gprime = s.max_gprime.max(r.engine.gprime_maxdeg);
        s.max_step_recolorings = s.max_step_recolorings.max(r.engine.recolorings);
        s.total_flips += r.flips;
        rows.push(ArbRow {
            step,
            recolorings: r.engine.recolorings,
            static_calls: r.engine.static_calls.len(),
            colors_in_use: p.engine().colors_in_use(),
            gprime_maxdeg: r.engine.gprime_maxdeg,
            flips: r.flips,
        });
    }
    check_engine(p.engine(), &[], true)?;
    let e = p.engine();
    s.max_out_degree = p.orientation().max_out_degree().max(s.max_out_degree);
    s.steps = e.step();
    s.total_recolorings = e.total_recolorings();
    s.total_static_calls = e.total_static_calls();
    s.fallbacks = e.fallbacks();
    s.colors_ever_used = e.colors_ever_used();
    s.wall_time_ns = start.elapsed().as_nanos();
    Ok(RunOutput { rows, summary: s })
}

/// `check_every`: full invariant check period (0 disables; the final state
/// is always checked). Touched endpoints are checked for properness every
/// step.
pub fn run_lds(trace: &UpdateTrace, cfg: LdsConfig, check_every: u64) -> Result<RunOutput<LdsRow>, BenchError> {
    let start = Instant::now();
    let mut lds = Lds::new(cfg)?;
    let mut rows = Vec::with_capacity(trace.len());
    let mut s = RunSummary { log_n: cfg.k_cap - 1, palette_size: cfg.palette_width(), ..RunSummary::default() };
    let full = |lds: &Lds, step: u64| -> Result<(), BenchError> {
        match lds.check_lds_invariants().first() {
            Some(v) => Err(BenchError::Invariant { step, what: v.to_string() }),
            None => Ok(()),
        }
    };
    for (i, ev) in trace.events.iter().enumerate() {
        let step = i as u64 + 1;
        let r = match ev.op {
            EdgeOp::Insert => lds.insert(ev.u, ev.v)?,
            EdgeOp::Delete => lds.delete(ev.u, ev.v)?,
        };
        for x in [ev.u, ev.v] {
            if let Some(y) = lds.graph().neighbors(x).find(|&y| lds.color_of(y) == lds.color_of(x)) {
                return Err(BenchError::Improper { step, u: x, v: y });
            }
        }
        if check_every > 0 && step.is_multiple_of(check_every) {
            full(&lds, step)?;
        }
        let max_dup = lds.max_dup();
        s.max_dup = s.max_dup.max(max_dup);
        s.max_layer = s.max_layer.max(lds.max_layer());
        s.max_step_recolorings = s.max_step_recolorings.max(r.recolorings);
        rows.push(LdsRow {
            step,
            flips: r.flips,
            layer_moves: r.layer_moves,
            recolorings: r.recolorings,
            colors_in_use: lds.colors_in_use(),
            max_layer: lds.max_layer(),
            max_dup,
        });
    }
    full(&lds, trace.len() as u64)?;
    s.steps = trace.len() as u64;
    s.total_flips = lds.total_flips();
    s.total_layer_moves = lds.total_layer_moves();
    s.total_recolorings = lds.total_recolorings();
    s.colors_ever_used = lds.colors_ever_used();
    s.wall_time_ns = start.elapsed().as_nanos();
    Ok(RunOutput { rows, summary: s })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinsOpts {
    pub n_bins: usize,
    pub k: usize,
    pub steps: usize,
    pub variant: Variant,
    pub adversary: String,
    pub seed: u64,
}

pub fn run_bins(opts: &BinsOpts) -> Result<RunOutput<BinsRow>, BenchError> {
    let start = Instant::now();
    let mut adv = adversary_by_name(&opts.adversary)
        .ok_or_else(|| BenchError::Unknown { what: "adversary", name: opts.adversary.clone() })?;
    let maxes = run_adversary(opts.n_bins, opts.k, opts.steps, adv.as_mut(), opts.variant, opts.seed)?;
    let rows: Vec<BinsRow> =
        maxes.iter().enumerate().map(|(i, &m)| BinsRow { step: i as u64 + 1, max_bin: m }).collect();
    let summary = RunSummary {
        steps: opts.steps as u64,
        max_bin: maxes.iter().copied().max().unwrap_or(0),
        wall_time_ns: start.elapsed().as_nanos(),
        ..RunSummary::default()
    };
    Ok(RunOutput { rows, summary })
}
