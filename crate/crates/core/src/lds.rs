//! Layered data structure for bounded-arboricity graphs.
//!
//! Vertices sit in layers `1..=k`. Cross-layer edges always point to the
//! higher layer, so a vertex's up-degree is `d⁺(v) + d_L⁻(v)`. A vertex whose
//! out-degree or same-layer in-degree passes `d′` rises to the lowest layer
//! where its up-degree is at most `d`; a vertex that could sit lower with
//! up-degree at most `d` drops. Each layer's induced graph is colored by its
//! own greedy colorer over a private palette of `2d′ + 1` colors.

use std::collections::{HashMap, HashSet};
use std::fmt;

use indexmap::IndexSet;
use thiserror::Error;

use crate::graph::{edge_key, DynamicGraph, GraphError, VertexId};
use crate::greedy::{ColorError, GreedyColorer};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LdsError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("vertex {vertex} would move to layer {layer}, above the cap {cap}: arboricity promise violated")]
    LayerCapExceeded { vertex: VertexId, layer: usize, cap: usize },
    #[error(transparent)]
    Color(#[from] ColorError),
    #[error("invalid configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LdsConfig {
    pub n: usize,
    pub alpha: usize,
    pub d: usize,
    pub delta: usize,
    pub d_prime: usize,
    pub k_cap: usize,
}

fn ceil_log2(n: usize) -> usize {
    n.max(1).next_power_of_two().trailing_zeros() as usize
}

impl LdsConfig {
    /// `d = 4α`, `Δ = 16(d·k_cap + α·⌈log2 n⌉)`, `d′ = Δ/2`,
    /// `k_cap = ⌈log2 n⌉ + 1`.
    pub fn new(n: usize, alpha: usize) -> Self {
        let alpha = alpha.max(1);
        let d = 4 * alpha;
        let k_cap = ceil_log2(n) + 1;
        let d_est = alpha * ceil_log2(n);
        let delta = 16 * (d * k_cap + d_est);
        LdsConfig { n, alpha, d, delta, d_prime: delta / 2, k_cap }
    }

    /// Smaller `d′ = 8α·⌈log2 n⌉` so that rises actually happen at desk
    /// scale.
    pub fn test_scale(n: usize, alpha: usize) -> Self {
        let c = LdsConfig::new(n, alpha);
        c.with_d_prime(8 * c.alpha * ceil_log2(n).max(1))
    }

    /// Tightest valid setting, `d′ = 2d + 1`: maximal layer churn.
    pub fn stress(n: usize, alpha: usize) -> Self {
        let c = LdsConfig::new(n, alpha);
        c.with_d_prime(2 * c.d + 1)
    }

    pub fn with_d(mut self, d: usize) -> Self {
        self.d = d;
        self
    }

    /// Sets `Δ` and `d′ = Δ/2`.
    pub fn with_delta(mut self, delta: usize) -> Self {
        self.delta = delta;
        self.d_prime = delta / 2;
        self
    }

    /// Sets `d′` and `Δ = 2d′`.
    pub fn with_d_prime(mut self, d_prime: usize) -> Self {
        self.d_prime = d_prime;
        self.delta = 2 * d_prime;
        self
    }

    pub fn palette_width(&self) -> usize {
        2 * self.d_prime + 1
    }

    pub fn validate(&self) -> Result<(), LdsError> {
        if self.d < 2 * self.alpha + 1 {
            return Err(LdsError::Config(format!("d = {} must be at least 2α + 1 = {}", self.d, 2 * self.alpha + 1)));
        }
        if self.d_prime <= 2 * self.d {
            return Err(LdsError::Config(format!("d′ = {} must exceed 2d = {}", self.d_prime, 2 * self.d)));
        }
        self.validate_minimal()
    }

    fn validate_minimal(&self) -> Result<(), LdsError> {
        if self.d == 0 || self.d_prime < self.d || self.k_cap == 0 {
            return Err(LdsError::Config(format!(
                "need d ≥ 1, d′ ≥ d and k_cap ≥ 1 (d = {}, d′ = {}, k_cap = {})",
                self.d, self.d_prime, self.k_cap
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LdsReport {
    pub rises: usize,
    pub drops: usize,
    pub flips: usize,
    pub layer_moves: usize,
    pub recolorings: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LdsViolation {
    /// Cross-layer edge pointing down, as `(tail, head)`.
    DownwardEdge(VertexId, VertexId),
    OutDegree {
        vertex: VertexId,
        d_plus: usize,
    },
    SameLayerIn {
        vertex: VertexId,
        d_l_minus: usize,
    },
    AboveLmax {
        vertex: VertexId,
        layer: usize,
        l_max: usize,
    },
    UpDegree {
        vertex: VertexId,
        d_up: usize,
    },
    LayerCap {
        vertex: VertexId,
        layer: usize,
    },
    Bookkeeping {
        vertex: VertexId,
        what: &'static str,
    },
    LayerGraph {
        layer: usize,
    },
    Improper(VertexId, VertexId),
}

impl fmt::Display for LdsViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LdsViolation::DownwardEdge(t, h) => write!(f, "cross-layer edge {t}->{h} points down"),
            LdsViolation::OutDegree { vertex, d_plus } => write!(f, "d+({vertex}) = {d_plus} exceeds d'"),
            LdsViolation::SameLayerIn { vertex, d_l_minus } => write!(f, "d_L-({vertex}) = {d_l_minus} exceeds d'"),
            LdsViolation::AboveLmax { vertex, layer, l_max } => {
                write!(f, "vertex {vertex} in layer {layer} above L_max {l_max}")
            }
            LdsViolation::UpDegree { vertex, d_up } => write!(f, "d_up({vertex}) = {d_up} exceeds Delta"),
            LdsViolation::LayerCap { vertex, layer } => write!(f, "vertex {vertex} in layer {layer} above the cap"),
            LdsViolation::Bookkeeping { vertex, what } => write!(f, "vertex {vertex}: {what} disagrees with the graph"),
            LdsViolation::LayerGraph { layer } => write!(f, "layer {layer} graph is not the induced subgraph"),
            LdsViolation::Improper(u, v) => write!(f, "edge {u}-{v} is monochromatic"),
        }
    }
}

#[derive(Debug, Clone)]
struct Layer {
    g: DynamicGraph,
    colorer: GreedyColorer,
}

#[derive(Debug, Clone)]
pub struct Lds {
    cfg: LdsConfig,
    g: DynamicGraph,
    layer: Vec<usize>,
    out: Vec<IndexSet<VertexId>>,
    lin: Vec<IndexSet<VertexId>>,
    /// `lower[v][i - 1]`: neighbors of `v` in layer `i < L(v)`.
    lower: Vec<Vec<IndexSet<VertexId>>>,
    layers: Vec<Layer>,
    layer_size: Vec<usize>,
    /// Inserted edge kept out of the layer graphs until its cascade ends.
    deferred: Option<(VertexId, VertexId)>,

    ids: Vec<u64>,
    id_count: HashMap<u64, usize>,
    ever_used: HashSet<u64>,
    report: LdsReport,

    total_flips: u64,
    total_moves: u64,
    total_recolorings: u64,
    max_lin_at_rise: usize,
    max_dup_after_move: usize,
    max_drop_flips: usize,
}

impl Lds {
    pub fn new(cfg: LdsConfig) -> Result<Self, LdsError> {
        cfg.validate()?;
        Ok(Lds::build(cfg))
    }

    /// Skips the `d ≥ 2α+1`, `d′ > 2d` checks; for hand-sized examples.
    pub fn new_unchecked(cfg: LdsConfig) -> Result<Self, LdsError> {
        cfg.validate_minimal()?;
        Ok(Lds::build(cfg))
    }

    fn build(cfg: LdsConfig) -> Self {
        let n = cfg.n;
        let mut lds = Lds {
            cfg,
            g: DynamicGraph::new(n),
            layer: vec![1; n],
            out: vec![IndexSet::new(); n],
            lin: vec![IndexSet::new(); n],
            lower: vec![Vec::new(); n],
            layers: Vec::new(),
            layer_size: vec![0, n],
            deferred: None,
            ids: vec![0; n],
            id_count: HashMap::new(),
            ever_used: HashSet::new(),
            report: LdsReport::default(),
            total_flips: 0,
            total_moves: 0,
            total_recolorings: 0,
            max_lin_at_rise: 0,
            max_dup_after_move: 0,
            max_drop_flips: 0,
        };
        lds.ensure_layer(1);
        if n > 0 {
            lds.id_count.insert(0, n);
            lds.ever_used.insert(0);
        }
        lds
    }

    pub fn config(&self) -> &LdsConfig {
        &self.cfg
    }

    pub fn n(&self) -> usize {
        self.cfg.n
    }

    pub fn graph(&self) -> &DynamicGraph {
        &self.g
    }

    pub fn layer(&self, v: VertexId) -> usize {
        self.layer[v]
    }

    pub fn d_plus(&self, v: VertexId) -> usize {
        self.out[v].len()
    }

    pub fn d_l_minus(&self, v: VertexId) -> usize {
        self.lin[v].len()
    }

    pub fn d_up(&self, v: VertexId) -> usize {
        self.out[v].len() + self.lin[v].len()
    }

    /// Neighbors of `v` in layer `i < L(v)`.
    pub fn d_lower(&self, v: VertexId, i: usize) -> usize {
        self.lower[v].get(i.wrapping_sub(1)).map_or(0, IndexSet::len)
    }

    pub fn is_oriented(&self, tail: VertexId, head: VertexId) -> bool {
        self.out[tail].contains(&head)
    }

    pub fn max_layer(&self) -> usize {
        (1..self.layer_size.len()).rev().find(|&i| self.layer_size[i] > 0).unwrap_or(1)
    }

    pub fn max_dup(&self) -> usize {
        (0..self.n()).map(|v| self.d_up(v)).max().unwrap_or(0)
    }

    pub fn color_of(&self, v: VertexId) -> u64 {
        self.ids[v]
    }

    pub fn colors_in_use(&self) -> usize {
        self.id_count.len()
    }

    pub fn colors_ever_used(&self) -> usize {
        self.ever_used.len()
    }

    pub fn total_flips(&self) -> u64 {
        self.total_flips
    }

    pub fn total_layer_moves(&self) -> u64 {
        self.total_moves
    }

    pub fn total_recolorings(&self) -> u64 {
        self.total_recolorings
    }

    /// Largest `d_L⁻` seen at the start of an insertion-triggered rise.
    pub fn max_lin_at_rise(&self) -> usize {
        self.max_lin_at_rise
    }

    /// Largest up-degree of a vertex right after it changed layers.
    pub fn max_dup_after_move(&self) -> usize {
        self.max_dup_after_move
    }

    pub fn max_drop_flips(&self) -> usize {
        self.max_drop_flips
    }

    fn ensure_layer(&mut self, l: usize) {
        while self.layers.len() < l {
            self.layers.push(Layer {
                g: DynamicGraph::new(self.cfg.n),
                colorer: GreedyColorer::with_cap(self.cfg.n, self.cfg.palette_width()),
            });
        }
        if self.layer_size.len() <= l {
            self.layer_size.resize(l + 1, 0);
        }
    }

    fn flatten(&self, v: VertexId) -> u64 {
        let l = self.layer[v];
        ((l - 1) * self.cfg.palette_width() + self.layers[l - 1].colorer.color(v)) as u64
    }

    fn refresh(&mut self, v: VertexId) {
        let new = self.flatten(v);
        let old = self.ids[v];
        if new == old {
            return;
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
        self.report.recolorings += 1;
    }

    fn is_deferred(&self, u: VertexId, v: VertexId) -> bool {
        self.deferred == Some(edge_key(u, v))
    }

    /// Moves `v`'s layer-graph edges from `from` to `to` and recolors it in
    /// the destination palette. Bookkeeping must already reflect the move.
    fn migrate(&mut self, v: VertexId, from: usize, to: usize) -> Result<(), LdsError> {
        self.layers[from - 1].g.isolate(v);
        let same: Vec<VertexId> = self.out[v]
            .iter()
            .copied()
            .filter(|&u| self.layer[u] == to)
            .chain(self.lin[v].iter().copied())
            .filter(|&u| !self.is_deferred(u, v))
            .collect();
        let lg = &mut self.layers[to - 1];
        for u in same {
            lg.g.insert_edge(v, u)?;
        }
        lg.colorer.recolor_to_fresh(&lg.g, v)?;
        self.layer_size[from] -= 1;
        self.layer_size[to] += 1;
        self.refresh(v);
        self.report.layer_moves += 1;
        self.max_dup_after_move = self.max_dup_after_move.max(self.d_up(v));
        Ok(())
    }

    fn violates_out_or_in(&self, v: VertexId) -> bool {
        self.out[v].len() > self.cfg.d_prime || self.lin[v].len() > self.cfg.d_prime
    }

    /// `L_max(v) < L(v)`, in O(1).
    pub fn drop_needed(&self, v: VertexId) -> bool {
        let l = self.layer[v];
        l > 1 && self.d_up(v) + self.lower[v][l - 2].len() <= self.cfg.d
    }

    /// Lowest layer where `v`'s up-degree would be at most `d`.
    pub fn l_max(&self, v: VertexId) -> usize {
        let mut layers: Vec<usize> = self.g.neighbors(v).map(|u| self.layer[u]).collect();
        if layers.len() <= self.cfg.d {
            return 1;
        }
        let idx = layers.len() - self.cfg.d - 1;
        *layers.select_nth_unstable(idx).1 + 1
    }

    pub fn insert(&mut self, u: VertexId, v: VertexId) -> Result<LdsReport, LdsError> {
        self.g.insert_edge(u, v)?;
        self.report = LdsReport::default();
        let (lu, lv) = (self.layer[u], self.layer[v]);
        if lu != lv {
            let (low, high) = if lu < lv { (u, v) } else { (v, u) };
            self.out[low].insert(high);
            self.lower[high][self.layer[low] - 1].insert(low);
        } else {
            let (du, dv) = (self.out[u].len(), self.out[v].len());
            let (tail, head) = if du < dv || (du == dv && u < v) { (u, v) } else { (v, u) };
            self.out[tail].insert(head);
            self.lin[head].insert(tail);
        }
        self.deferred = Some(edge_key(u, v));
        for w in [u, v] {
            if self.violates_out_or_in(w) {
                self.max_lin_at_rise = self.max_lin_at_rise.max(self.lin[w].len());
                self.rise_cascade(w)?;
            }
        }
        self.deferred = None;
        if self.layer[u] == self.layer[v] {
            let lg = &mut self.layers[self.layer[u] - 1];
            lg.g.insert_edge(u, v)?;
            if let Some(w) = lg.colorer.on_insert(&lg.g, u, v)? {
                self.refresh(w);
            }
        }
        Ok(self.finish())
    }

    pub fn delete(&mut self, u: VertexId, v: VertexId) -> Result<LdsReport, LdsError> {
        self.g.remove_edge(u, v)?;
        self.report = LdsReport::default();
        let (tail, head) = if self.out[u].contains(&v) { (u, v) } else { (v, u) };
        self.out[tail].swap_remove(&head);
        let (lt, lh) = (self.layer[tail], self.layer[head]);
        if lt == lh {
            self.lin[head].swap_remove(&tail);
            self.layers[lt - 1].g.remove_edge(u, v)?;
        } else {
            self.lower[head][lt - 1].swap_remove(&tail);
        }
        for w in [u, v] {
            if self.drop_needed(w) {
                self.drop_cascade(w)?;
            }
        }
        Ok(self.finish())
    }

    fn finish(&mut self) -> LdsReport {
        let r = std::mem::take(&mut self.report);
        self.total_flips += r.flips as u64;
        self.total_moves += r.layer_moves as u64;
        self.total_recolorings += r.recolorings as u64;
        r
    }

    fn rise_cascade(&mut self, v: VertexId) -> Result<(), LdsError> {
        let mut stack = vec![self.rise_once(v)?.into_iter()];
        while let Some(top) = stack.last_mut() {
            match top.next() {
                Some(u) if self.out[u].len() > self.cfg.d_prime => {
                    let s = self.rise_once(u)?;
                    stack.push(s.into_iter());
                }
                Some(_) => {}
                None => {
                    stack.pop();
                }
            }
        }
        Ok(())
    }

    /// Moves `v` up to `L_max(v)`; returns the flipped set in ascending id.
    fn rise_once(&mut self, v: VertexId) -> Result<Vec<VertexId>, LdsError> {
        self.report.rises += 1;
        let l_old = self.layer[v];
        let d = self.cfg.d;
        let mut ups: Vec<usize> =
            self.out[v].iter().map(|&u| self.layer[u]).chain(self.lin[v].iter().map(|_| l_old)).collect();
        assert!(ups.len() > d, "rise called on vertex {v} with up-degree {}", ups.len());
        let idx = ups.len() - d - 1;
        let l_new = *ups.select_nth_unstable(idx).1 + 1;
        if l_new > self.cfg.k_cap {
            return Err(LdsError::LayerCapExceeded { vertex: v, layer: l_new, cap: self.cfg.k_cap });
        }
        self.ensure_layer(l_new);

        let mut s: Vec<VertexId> = self.out[v].iter().copied().filter(|&u| self.layer[u] <= l_new).collect();
        s.sort_unstable();
        self.lower[v].resize_with(l_new - 1, IndexSet::new);
        let lin_old = std::mem::take(&mut self.lin[v]);
        self.lower[v][l_old - 1].extend(lin_old);
        for &u in &s {
            self.out[v].swap_remove(&u);
            let lu = self.layer[u];
            if lu == l_old {
                self.lin[u].swap_remove(&v);
            } else {
                self.lower[u][l_old - 1].swap_remove(&v);
            }
            self.out[u].insert(v);
            if lu == l_new {
                self.lin[v].insert(u);
            } else {
                self.lower[v][lu - 1].insert(u);
            }
        }
        self.report.flips += s.len();
        let above: Vec<VertexId> = self.out[v].iter().copied().collect();
        for u in above {
            self.lower[u][l_old - 1].swap_remove(&v);
            self.lower[u][l_new - 1].insert(v);
        }
        self.layer[v] = l_new;
        self.migrate(v, l_old, l_new)?;
        Ok(s)
    }

    fn drop_cascade(&mut self, v: VertexId) -> Result<(), LdsError> {
        let mut stack = vec![self.drop_once(v)?.into_iter()];
        while let Some(top) = stack.last_mut() {
            match top.next() {
                Some(u) if self.drop_needed(u) => {
                    let s = self.drop_once(u)?;
                    stack.push(s.into_iter());
                }
                Some(_) => {}
                None => {
                    stack.pop();
                }
            }
        }
        Ok(())
    }

    /// Moves `v` down to `L_max(v)`; returns the neighbors that may now need
    /// to drop, in ascending id.
    fn drop_once(&mut self, v: VertexId) -> Result<Vec<VertexId>, LdsError> {
        self.report.drops += 1;
        let l_old = self.layer[v];
        let mut sum = self.d_up(v);
        let mut l_new = l_old;
        while l_new > 1 && sum + self.lower[v][l_new - 2].len() <= self.cfg.d {
            sum += self.lower[v][l_new - 2].len();
            l_new -= 1;
        }

        let old_out: Vec<VertexId> = self.out[v].iter().copied().collect();
        for &u in &old_out {
            if self.layer[u] == l_old {
                self.lin[u].swap_remove(&v);
            } else {
                self.lower[u][l_old - 1].swap_remove(&v);
            }
            self.lower[u][l_new - 1].insert(v);
        }

        let mut s: Vec<VertexId> = std::mem::take(&mut self.lin[v]).into_iter().collect();
        for i in l_new + 1..l_old {
            s.extend(std::mem::take(&mut self.lower[v][i - 1]));
        }
        for &u in &s {
            self.out[u].swap_remove(&v);
            self.lower[u][l_new - 1].insert(v);
            self.out[v].insert(u);
        }
        self.report.flips += s.len();
        self.max_drop_flips = self.max_drop_flips.max(s.len());
        self.lin[v] = std::mem::take(&mut self.lower[v][l_new - 1]);
        self.lower[v].truncate(l_new - 1);
        self.layer[v] = l_new;
        self.migrate(v, l_old, l_new)?;

        let mut s_plus: Vec<VertexId> = self.out[v].iter().copied().filter(|&u| self.layer[u] <= l_old + 1).collect();
        s_plus.sort_unstable();
        Ok(s_plus)
    }

    /// Exhaustive check of the four invariants, the up-degree and layer
    /// bounds, bookkeeping, layer graphs and coloring.
    pub fn check_lds_invariants(&self) -> Vec<LdsViolation> {
        let mut out = Vec::new();
        let c = &self.cfg;
        for v in 0..self.n() {
            let l = self.layer[v];
            let mut want_out = 0;
            let mut want_lin = 0;
            let mut want_lower = 0;
            let mut up = 0;
            let mut from_below_one = 0;
            for u in self.g.neighbors(v) {
                let lu = self.layer[u];
                up += usize::from(lu >= l);
                from_below_one += usize::from(lu + 1 >= l);
                let (vu, uv) = (self.out[v].contains(&u), self.out[u].contains(&v));
                if vu == uv {
                    out.push(LdsViolation::Bookkeeping { vertex: v, what: "edge direction" });
                    continue;
                }
                if lu != l {
                    let (tail, head) = if vu { (v, u) } else { (u, v) };
                    if self.layer[tail] > self.layer[head] && v < u {
                        out.push(LdsViolation::DownwardEdge(tail, head));
                    }
                }
                if vu {
                    want_out += 1;
                } else if lu == l {
                    want_lin += 1;
                    if !self.lin[v].contains(&u) {
                        out.push(LdsViolation::Bookkeeping { vertex: v, what: "same-layer in-set" });
                    }
                }
                if lu < l {
                    want_lower += 1;
                    if !self.lower[v][lu - 1].contains(&u) {
                        out.push(LdsViolation::Bookkeeping { vertex: v, what: "lower-layer set" });
                    }
                }
            }
            if want_out != self.out[v].len() {
                out.push(LdsViolation::Bookkeeping { vertex: v, what: "out-set" });
            }
            if want_lin != self.lin[v].len() {
                out.push(LdsViolation::Bookkeeping { vertex: v, what: "same-layer in-set size" });
            }
            let have_lower: usize = self.lower[v].iter().map(IndexSet::len).sum();
            if self.lower[v].len() + 1 != l || have_lower != want_lower {
                out.push(LdsViolation::Bookkeeping { vertex: v, what: "lower-layer counts" });
            }
            if self.out[v].len() > c.d_prime {
                out.push(LdsViolation::OutDegree { vertex: v, d_plus: self.out[v].len() });
            }
            if self.lin[v].len() > c.d_prime {
                out.push(LdsViolation::SameLayerIn { vertex: v, d_l_minus: self.lin[v].len() });
            }
            if up > c.delta {
                out.push(LdsViolation::UpDegree { vertex: v, d_up: up });
            }
            // v could sit one layer lower.
            if l > 1 && from_below_one <= c.d {
                out.push(LdsViolation::AboveLmax { vertex: v, layer: l, l_max: self.l_max(v) });
            }
            if l > c.k_cap {
                out.push(LdsViolation::LayerCap { vertex: v, layer: l });
            }
        }
        for (i, lg) in self.layers.iter().enumerate() {
            let l = i + 1;
            let ok = (0..self.n()).all(|v| {
                if self.layer[v] != l {
                    return lg.g.degree(v) == 0;
                }
                let same = self.g.neighbors(v).filter(|&u| self.layer[u] == l).count();
                same == lg.g.degree(v) && lg.g.neighbors(v).all(|u| self.layer[u] == l && self.g.has_edge(u, v))
            });
            if !ok {
                out.push(LdsViolation::LayerGraph { layer: l });
            }
        }
        for (u, v) in self.g.edges() {
            if self.color_of(u) == self.color_of(v) {
                out.push(LdsViolation::Improper(u, v));
            }
        }
        out
    }

    /// Reverses one edge in the out-sets without any other bookkeeping.
    #[doc(hidden)]
    pub fn corrupt_flip(&mut self, tail: VertexId, head: VertexId) {
        if self.out[tail].swap_remove(&head) {
            self.out[head].insert(tail);
        }
    }
}
