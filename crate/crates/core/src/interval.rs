//! Hierarchical-interval recoloring for general graphs.
//!
//! The update sequence is cut into level-0 blocks of `n·ℓ` updates, each
//! halved recursively down to level `log2 n` (length `ℓ`). Of all intervals
//! sharing an endpoint only the lowest-level one is kept, so exactly one
//! interval ends every `ℓ` updates. At each end a static coloring instance
//! recolors a small input set with its level's palette; edges inserted since
//! an endpoint's last static recoloring live in the residual graph `G′`,
//! which a greedy colorer keeps proper. A vertex's color is the pair
//! (static color, residual color).
//!
//! With `deamortized` set, only the designated vertices are recolored at an
//! interval end and the rest of the instance's output is drained gradually,
//! level `i` draining only after updates `k ≡ i (mod ℓ)`. Level 0 then
//! alternates between two palettes so consecutive full passes never meet.

use std::collections::{HashMap, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bins::Variant;
use crate::bucket::BucketCounter;
use crate::graph::{edge_key, DynamicGraph, EdgeOp, GraphError, UpdateEvent, VertexId};
use crate::greedy::{ColorError, GreedyColorer};
use crate::orientation::Orientation;
use crate::static_color::{StaticColorError, StaticColoring, StaticColoringOracle};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Static(#[from] StaticColorError),
    #[error(transparent)]
    Color(#[from] ColorError),
    #[error("static oracle `{oracle}` returned color {color}, outside its palette of {palette}")]
    PaletteOverflow { oracle: &'static str, color: usize, palette: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    /// Requested vertex count; the engine pads up to a power of two.
    pub n: usize,
    pub beta: f64,
    pub mode: Variant,
    pub deamortized: bool,
    pub seed: u64,
    /// `G′` degree above which the randomized engine recolors everything.
    /// `None` picks [`EngineConfig::default_gprime_bound`] in randomized mode
    /// and disables the fallback in deterministic mode.
    pub gprime_bound: Option<usize>,
}

impl EngineConfig {
    pub fn new(n: usize, beta: f64) -> Self {
        EngineConfig { n, beta, mode: Variant::Deterministic, deamortized: false, seed: 0, gprime_bound: None }
    }

    pub fn mode(mut self, mode: Variant) -> Self {
        self.mode = mode;
        self
    }

    pub fn deamortized(mut self, on: bool) -> Self {
        self.deamortized = on;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn gprime_bound(mut self, bound: usize) -> Self {
        self.gprime_bound = Some(bound);
        self
    }

    pub fn padded_n(&self) -> usize {
        self.n.max(2).next_power_of_two()
    }

    pub fn log_n(&self) -> usize {
        self.padded_n().trailing_zeros() as usize
    }

    /// `max(1, round(log2 n / beta))`.
    pub fn ell(&self) -> usize {
        ((self.log_n() as f64 / self.beta).round() as usize).max(1)
    }

    /// `4·ℓ·(log2 log2 n + log2 ℓ + 4)`, rounded up.
    pub fn default_gprime_bound(&self) -> usize {
        let ell = self.ell() as f64;
        let loglog = (self.log_n() as f64).max(1.0).log2();
        (4.0 * ell * (loglog + ell.log2() + 4.0)).ceil() as usize
    }

    fn effective_gprime_bound(&self) -> Option<usize> {
        match (self.gprime_bound, self.mode) {
            (Some(b), _) => Some(b),
            (None, Variant::Randomized) => Some(self.default_gprime_bound()),
            (None, Variant::Deterministic) => None,
        }
    }
}

/// Endpoint layout of the pruned interval hierarchy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntervalSchedule {
    pub n: usize,
    pub ell: usize,
    pub log_n: usize,
}

impl IntervalSchedule {
    pub fn new(n: usize, ell: usize) -> Self {
        assert!(n.is_power_of_two() && ell >= 1);
        IntervalSchedule { n, ell, log_n: n.trailing_zeros() as usize }
    }

    pub fn block_length(&self) -> u64 {
        (self.n * self.ell) as u64
    }

    pub fn levels(&self) -> usize {
        self.log_n + 1
    }

    /// Level of the interval ending at position `p ∈ [1, n]` (in units of
    /// `ℓ` within a block).
    pub fn endpoint_level(&self, p: usize) -> usize {
        assert!(p >= 1 && p <= self.n);
        if p == self.n {
            0
        } else {
            self.log_n - p.trailing_zeros() as usize
        }
    }

    /// Level of the interval ending right after update `t` (1-based), if any.
    pub fn level_after(&self, t: u64) -> Option<usize> {
        let ell = self.ell as u64;
        if t == 0 || !t.is_multiple_of(ell) {
            return None;
        }
        let p = ((t / ell - 1) % self.n as u64) as usize + 1;
        Some(self.endpoint_level(p))
    }

    /// Length in updates of a level-`i` interval.
    pub fn interval_length(&self, level: usize) -> u64 {
        self.block_length() >> level
    }
}

/// The static half of a vertex color, tagged with the instance that produced
/// it and the update count at which that instance ran.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StaticColor {
    pub palette: usize,
    pub color: usize,
    pub instance: u64,
    pub time: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaticCallRecord {
    pub time: u64,
    pub level: usize,
    pub palette: usize,
    pub instance: u64,
    /// `None` for a fallback pass.
    pub v: Option<VertexId>,
    /// The sampled vertex and the 0-based index of its ball among the
    /// last turn's placements (two per insertion, in order).
    pub u: Option<(VertexId, usize)>,
    pub input_size: usize,
    pub fallback: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UpdateReport {
    pub step: u64,
    pub recolorings: usize,
    pub greedy_recolorings: usize,
    pub static_recolorings: usize,
    pub static_calls: Vec<StaticCallRecord>,
    /// Queued recolorings applied this step (deamortized mode).
    pub drained: usize,
    pub fallback: bool,
    /// Largest `G′` degree seen during the step, before any fallback.
    pub gprime_maxdeg: usize,
    /// Vertices whose color pair was reassigned this step.
    pub touched: Vec<VertexId>,
}

#[derive(Debug, Clone, Copy)]
struct Queued {
    v: VertexId,
    sc: StaticColor,
}

pub struct IntervalEngine {
    cfg: EngineConfig,
    sched: IntervalSchedule,
    oracle: Box<dyn StaticColoringOracle>,
    palette: usize,
    gprime_bound: Option<usize>,
    rng: ChaCha8Rng,
    t: u64,

    g: DynamicGraph,
    gp: DynamicGraph,
    gp_deg: BucketCounter,
    greedy: GreedyColorer,
    ins_time: HashMap<(VertexId, VertexId), u64>,
    reset_time: Vec<u64>,
    recent: BucketCounter,
    window: VecDeque<(u64, VertexId, VertexId)>,

    c1: Vec<StaticColor>,
    ids: Vec<u64>,
    id_count: HashMap<u64, usize>,
    ever_used: HashSet<u64>,
    next_instance: u64,
    last_level0_parity: usize,

    pending: Vec<Vec<VertexId>>,
    last_input: Vec<Vec<VertexId>>,
    queues: Vec<VecDeque<Queued>>,
    quota: Vec<usize>,

    report: UpdateReport,
    total_recolorings: u64,
    total_static_calls: u64,
    fallbacks: u64,
}

impl IntervalEngine {
    pub fn new(cfg: EngineConfig, oracle: Box<dyn StaticColoringOracle>) -> Result<Self, EngineError> {
        if !(cfg.beta > 0.0 && cfg.beta.is_finite()) {
            return Err(EngineError::Config(format!("beta must be positive, got {}", cfg.beta)));
        }
        let n = cfg.padded_n();
        let sched = IntervalSchedule::new(n, cfg.ell());
        let levels = sched.levels();
        let palette = oracle.palette_bound(n);
        let initial = StaticColor { palette: 0, color: 0, instance: 0, time: 0 };
        let mut e = IntervalEngine {
            gprime_bound: cfg.effective_gprime_bound(),
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            sched,
            oracle,
            palette,
            t: 0,
            g: DynamicGraph::new(n),
            gp: DynamicGraph::new(n),
            gp_deg: BucketCounter::new(n),
            greedy: GreedyColorer::new(n),
            ins_time: HashMap::new(),
            reset_time: vec![0; n],
            recent: BucketCounter::new(n),
            window: VecDeque::new(),
            c1: vec![initial; n],
            ids: vec![0; n],
            id_count: HashMap::from([(0, n)]),
            ever_used: HashSet::from([0]),
            next_instance: 1,
            last_level0_parity: 0,
            pending: vec![Vec::new(); levels],
            last_input: vec![Vec::new(); levels],
            queues: vec![VecDeque::new(); levels],
            quota: vec![0; levels],
            report: UpdateReport::default(),
            total_recolorings: 0,
            total_static_calls: 0,
            fallbacks: 0,
            cfg,
        };
        for v in 0..n {
            e.ids[v] = e.flatten(v);
        }
        Ok(e)
    }

    pub fn config(&self) -> &EngineConfig {
        &self.cfg
    }

    pub fn schedule(&self) -> &IntervalSchedule {
        &self.sched
    }

    /// Padded vertex count.
    pub fn n(&self) -> usize {
        self.g.n()
    }

    pub fn ell(&self) -> usize {
        self.sched.ell
    }

    pub fn levels(&self) -> usize {
        self.sched.levels()
    }

    /// Palettes in use: one per level, plus a second level-0 palette when
    /// deamortized.
    pub fn palettes(&self) -> usize {
        self.levels() + usize::from(self.cfg.deamortized)
    }

    /// Colors per static palette, as advertised by the oracle.
    pub fn palette_size(&self) -> usize {
        self.palette
    }

    pub fn oracle_name(&self) -> &'static str {
        self.oracle.name()
    }

    pub fn step(&self) -> u64 {
        self.t
    }

    pub fn graph(&self) -> &DynamicGraph {
        &self.g
    }

    pub fn residual_graph(&self) -> &DynamicGraph {
        &self.gp
    }

    pub fn gprime_maxdeg(&self) -> usize {
        self.gp_deg.max_value()
    }

    pub fn gprime_bound(&self) -> Option<usize> {
        self.gprime_bound
    }

    pub fn recent_degree(&self, v: VertexId) -> usize {
        self.recent.get(v)
    }

    pub fn recent_degrees(&self) -> &[usize] {
        self.recent.values()
    }

    pub fn static_color(&self, v: VertexId) -> StaticColor {
        self.c1[v]
    }

    pub fn residual_color(&self, v: VertexId) -> usize {
        self.greedy.color(v)
    }

    /// Flattened color id of `v`.
    pub fn color_of(&self, v: VertexId) -> u64 {
        self.ids[v]
    }

    pub fn colors_in_use(&self) -> usize {
        self.id_count.len()
    }

    pub fn colors_ever_used(&self) -> usize {
        self.ever_used.len()
    }

    pub fn total_recolorings(&self) -> u64 {
        self.total_recolorings
    }

    pub fn total_static_calls(&self) -> u64 {
        self.total_static_calls
    }

    pub fn fallbacks(&self) -> u64 {
        self.fallbacks
    }

    pub fn queued(&self) -> usize {
        self.queues.iter().map(VecDeque::len).sum()
    }

    /// Per-update recoloring cap in deamortized mode, outside fallback steps.
    pub fn worst_case_bound(&self) -> usize {
        let qmax = match self.cfg.mode {
            Variant::Deterministic => 1,
            Variant::Randomized => 2,
        };
        3 + self.levels().div_ceil(self.ell()) * qmax
    }

    fn flatten(&self, v: VertexId) -> u64 {
        let sc = self.c1[v];
        let n = self.n() as u64;
        ((sc.palette * self.palette + sc.color) as u64) * n + self.greedy.color(v) as u64
    }

    fn level_palette(&self, level: usize, parity: usize) -> usize {
        match (level, self.cfg.deamortized) {
            (0, true) => parity,
            (0, false) => 0,
            (i, true) => i + 1,
            (i, false) => i,
        }
    }

    /// Recomputes `v`'s flattened id; returns whether it changed.
    fn refresh(&mut self, v: VertexId) -> bool {
        self.report.touched.push(v);
        let new = self.flatten(v);
        let old = self.ids[v];
        if new == old {
            return false;
        }
        if let Some(c) = self.id_count.get_mut(&old) {
            *c -= 1;
            if *c == 0 {
                self.id_count.remove(&old);
            }
        }
        *self.id_count.entry(new).or_insert(0) += 1;
        self.ever_used.insert(new);
        self.ids[v] = new;
        true
    }

    fn gp_remove(&mut self, u: VertexId, v: VertexId) {
        if self.gp.remove_edge(u, v).is_ok() {
            self.gp_deg.dec(u);
            self.gp_deg.dec(v);
        }
    }

    /// Installs a static color computed at `sc.time` and drops the `G′`
    /// edges it accounts for.
    fn apply_static(&mut self, v: VertexId, sc: StaticColor) {
        self.c1[v] = sc;
        let stale: Vec<VertexId> =
            self.gp.neighbors(v).filter(|&x| self.ins_time[&edge_key(v, x)] <= sc.time).collect();
        for x in stale {
            self.gp_remove(v, x);
        }
        if self.refresh(v) {
            self.report.static_recolorings += 1;
        }
    }

    fn reset_recent(&mut self, v: VertexId) {
        self.recent.reset(v);
        self.reset_time[v] = self.t;
    }

    fn run_oracle(&mut self, s: &[VertexId], orientation: Option<&Orientation>) -> Result<StaticColoring, EngineError> {
        let col = self.oracle.color(&self.g, s, orientation)?;
        if let Some(&(_, c)) = col.colors.iter().find(|&&(_, c)| c >= self.palette) {
            return Err(EngineError::PaletteOverflow { oracle: self.oracle.name(), color: c, palette: self.palette });
        }
        self.total_static_calls += 1;
        Ok(col)
    }

    /// Processes one update. `orientation`, when given, must already reflect
    /// `ev` and is handed to the static oracle.
    pub fn process_update(
        &mut self,
        ev: &UpdateEvent,
        orientation: Option<&Orientation>,
    ) -> Result<UpdateReport, EngineError> {
        self.g.validate(ev)?;
        self.report = UpdateReport::default();
        self.g.apply(ev)?;
        self.t += 1;
        let (u, v) = (ev.u, ev.v);
        match ev.op {
            EdgeOp::Insert => {
                self.ins_time.insert(edge_key(u, v), self.t);
                self.recent.inc(u);
                self.recent.inc(v);
                self.gp.insert_edge(u, v)?;
                self.gp_deg.inc(u);
                self.gp_deg.inc(v);
                if let Some(w) = self.greedy.on_insert(&self.gp, u, v)? {
                    if self.refresh(w) {
                        self.report.greedy_recolorings += 1;
                    }
                }
                self.window.push_back((self.t, u, v));
            }
            EdgeOp::Delete => {
                let ins = self.ins_time.remove(&edge_key(u, v)).expect("tracked edge");
                for x in [u, v] {
                    if ins > self.reset_time[x] {
                        self.recent.dec(x);
                    }
                }
                self.gp_remove(u, v);
            }
        }
        let ell = self.ell() as u64;
        while self.window.front().is_some_and(|&(s, _, _)| s + ell <= self.t) {
            self.window.pop_front();
        }
        self.report.gprime_maxdeg = self.gp_deg.max_value();

        if self.cfg.deamortized {
            self.drain();
        }
        if let Some(level) = self.sched.level_after(self.t) {
            self.end_interval(level, orientation)?;
        }
        self.report.gprime_maxdeg = self.report.gprime_maxdeg.max(self.gp_deg.max_value());
        if self.gprime_bound.is_some_and(|b| self.gp_deg.max_value() > b) {
            self.fallback(orientation)?;
        }

        let mut report = std::mem::take(&mut self.report);
        report.step = self.t;
        report.recolorings = report.greedy_recolorings + report.static_recolorings;
        report.touched.sort_unstable();
        report.touched.dedup();
        self.total_recolorings += report.recolorings as u64;
        Ok(report)
    }

    fn drain(&mut self) {
        let ell = self.ell() as u64;
        for level in 0..self.levels() {
            if self.t % ell != level as u64 % ell {
                continue;
            }
            let mut budget = self.quota[level];
            while budget > 0 {
                let Some(q) = self.queues[level].pop_front() else { break };
                if self.c1[q.v].time > q.sc.time {
                    continue;
                }
                self.apply_static(q.v, q.sc);
                self.report.drained += 1;
                budget -= 1;
            }
        }
    }

    fn end_interval(&mut self, level: usize, orientation: Option<&Orientation>) -> Result<(), EngineError> {
        let (_, v_i) = self.recent.max().expect("non-empty vertex set");
        let u_i = match self.cfg.mode {
            Variant::Randomized if !self.window.is_empty() => {
                let r = self.rng.gen_range(0..self.window.len());
                let e = self.rng.gen_range(0..2usize);
                let (_, y, z) = self.window[r];
                Some((if e == 0 { y } else { z }, 2 * r + e))
            }
            _ => None,
        };

        let mut s: Vec<VertexId> = if level == 0 {
            (0..self.n()).collect()
        } else {
            let mut s = std::mem::take(&mut self.pending[level]);
            s.push(v_i);
            s.extend(u_i.map(|(x, _)| x));
            s.sort_unstable();
            s.dedup();
            s
        };
        s.shrink_to_fit();

        let col = self.run_oracle(&s, orientation)?;
        let parity = ((self.t / self.sched.block_length()) % 2) as usize;
        if level == 0 {
            self.last_level0_parity = parity;
        }
        let instance = self.next_instance;
        self.next_instance += 1;
        let palette = self.level_palette(level, parity);
        let now = self.t;
        let sc = |c: usize| StaticColor { palette, color: c, instance, time: now };

        for &w in &s {
            self.reset_recent(w);
        }

        if self.cfg.deamortized {
            let designated: Vec<VertexId> = std::iter::once(v_i).chain(u_i.map(|(x, _)| x)).collect();
            for &w in &designated {
                let c = col.get(w).expect("designated vertex is in the input");
                self.apply_static(w, sc(c));
            }
            // Each remaining vertex is redone by the next interval on the
            // deepest level whose last input contained it.
            let mut owner: HashMap<VertexId, usize> = HashMap::new();
            for i in level + 1..self.levels() {
                for &w in &self.last_input[i] {
                    owner.insert(w, i);
                }
            }
            let default_level = if level == 0 { 0 } else { self.sched.log_n };
            for &(w, c) in &col.colors {
                if designated.contains(&w) {
                    continue;
                }
                let q = owner.get(&w).copied().unwrap_or(default_level);
                self.queues[q].push_back(Queued { v: w, sc: sc(c) });
            }
            for i in level..self.levels() {
                let span = (self.n() >> i).max(1);
                self.quota[i] = self.queues[i].len().div_ceil(span);
            }
            for i in level + 1..self.levels() {
                self.last_input[i].clear();
            }
            self.last_input[level] = s.clone();
        } else {
            for &(w, c) in &col.colors {
                self.apply_static(w, sc(c));
            }
        }

        for j in 0..level {
            self.pending[j].push(v_i);
            self.pending[j].extend(u_i.map(|(x, _)| x));
        }
        for p in &mut self.pending[level..] {
            p.clear();
        }

        self.report.static_calls.push(StaticCallRecord {
            time: self.t,
            level,
            palette,
            instance,
            v: Some(v_i),
            u: u_i,
            input_size: s.len(),
            fallback: false,
        });
        Ok(())
    }

    /// Ends every interval at once: recolors all vertices with a full
    /// level-0 pass and empties `G′`.
    fn fallback(&mut self, orientation: Option<&Orientation>) -> Result<(), EngineError> {
        let s: Vec<VertexId> = (0..self.n()).collect();
        let col = self.run_oracle(&s, orientation)?;
        let instance = self.next_instance;
        self.next_instance += 1;
        let palette = self.level_palette(0, self.last_level0_parity);
        for q in &mut self.queues {
            q.clear();
        }
        for p in self.pending.iter_mut().chain(self.last_input.iter_mut()) {
            p.clear();
        }
        for &(w, c) in &col.colors {
            self.reset_recent(w);
            self.apply_static(w, StaticColor { palette, color: c, instance, time: self.t });
        }
        debug_assert_eq!(self.gp.edge_count(), 0);
        self.fallbacks += 1;
        self.report.fallback = true;
        self.report.static_calls.push(StaticCallRecord {
            time: self.t,
            level: 0,
            palette,
            instance,
            v: None,
            u: None,
            input_size: s.len(),
            fallback: true,
        });
        Ok(())
    }

    /// Edges whose endpoints share a flattened color.
    pub fn check_properness(&self) -> Vec<(VertexId, VertexId)> {
        self.g.edges().filter(|&(u, v)| self.ids[u] == self.ids[v]).collect()
    }

    /// Edges at any of `vs` whose endpoints share a flattened color.
    pub fn check_properness_at(&self, vs: &[VertexId]) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::new();
        for &u in vs {
            for v in self.g.neighbors(u) {
                if self.ids[u] == self.ids[v] {
                    out.push(edge_key(u, v));
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    fn clashes(&self, u: VertexId, v: VertexId) -> bool {
        let (a, b) = (self.c1[u], self.c1[v]);
        a.palette == b.palette && a.instance != b.instance
    }

    /// Edges whose endpoints carry static colors from two different
    /// instances sharing a palette.
    pub fn check_exclusivity(&self) -> Vec<(VertexId, VertexId)> {
        self.g.edges().filter(|&(u, v)| self.clashes(u, v)).collect()
    }

    pub fn check_exclusivity_at(&self, vs: &[VertexId]) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::new();
        for &u in vs {
            for v in self.g.neighbors(u) {
                if self.clashes(u, v) {
                    out.push(edge_key(u, v));
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Overwrites `v`'s static color as if a fresh instance had produced it.
    #[doc(hidden)]
    pub fn corrupt_static_color(&mut self, v: VertexId, palette: usize, color: usize) {
        let instance = self.next_instance;
        self.next_instance += 1;
        self.c1[v] = StaticColor { palette, color, instance, time: self.t };
        self.refresh(v);
        self.report.touched.clear();
    }
}
