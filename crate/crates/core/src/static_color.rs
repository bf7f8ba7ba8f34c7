//! Static coloring oracles: color the induced subgraph `G[S]` from scratch.
//!
//! [`GreedyStatic`] is the general-graph default. [`DegeneracyOracle`] peels
//! `G[S]` at threshold `2α` and colors in reverse peeling order with at most
//! `2α + 1` colors; given an [`Orientation`] it builds `G[S]` from out-lists
//! only.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::graph::{DynamicGraph, VertexId};
use crate::orientation::Orientation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum StaticColorError {
    #[error("peeling stalled with {remaining} vertices of residual degree > {threshold}: arboricity exceeds {alpha}")]
    ArborityExceeded { alpha: usize, threshold: usize, remaining: usize },
}

/// Colors for the vertices of `S`, sorted by vertex id.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StaticColoring {
    pub colors: Vec<(VertexId, usize)>,
    /// Number of colors the oracle promised for this call.
    pub advertised_c: usize,
}

impl StaticColoring {
    pub fn get(&self, v: VertexId) -> Option<usize> {
        self.colors.binary_search_by_key(&v, |&(w, _)| w).ok().map(|i| self.colors[i].1)
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn distinct_colors(&self) -> usize {
        let mut cs: Vec<usize> = self.colors.iter().map(|&(_, c)| c).collect();
        cs.sort_unstable();
        cs.dedup();
        cs.len()
    }

    /// Edges of `G[S]` whose endpoints got the same color, checked straight
    /// against `g`'s adjacency.
    pub fn conflicts(&self, g: &DynamicGraph) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::new();
        for &(v, c) in &self.colors {
            for w in g.neighbors(v) {
                if v < w && self.get(w) == Some(c) {
                    out.push((v, w));
                }
            }
        }
        out
    }
}

pub trait StaticColoringOracle: Send + Sync {
    fn name(&self) -> &'static str;

    /// Colors used on any input over an `n`-vertex graph are below this.
    fn palette_bound(&self, n: usize) -> usize;

    fn color(
        &self,
        g: &DynamicGraph,
        s: &[VertexId],
        orientation: Option<&Orientation>,
    ) -> Result<StaticColoring, StaticColorError>;
}

/// `G[S]` relabelled to `0..|S|`; `verts[i]` is the original id of local `i`.
#[derive(Debug, Clone)]
pub struct Subgraph {
    pub verts: Vec<VertexId>,
    pub adj: Vec<Vec<usize>>,
}

impl Subgraph {
    fn index(s: &[VertexId]) -> (Vec<VertexId>, HashMap<VertexId, usize>) {
        let mut verts = s.to_vec();
        verts.sort_unstable();
        verts.dedup();
        let local = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        (verts, local)
    }

    /// Scans every neighbor of every vertex of `S`.
    pub fn from_adjacency(g: &DynamicGraph, s: &[VertexId]) -> Self {
        let (verts, local) = Subgraph::index(s);
        let mut adj = vec![Vec::new(); verts.len()];
        for (i, &v) in verts.iter().enumerate() {
            for w in g.neighbors(v) {
                if let Some(&j) = local.get(&w) {
                    adj[i].push(j);
                }
            }
        }
        Subgraph { verts, adj }
    }

    /// Scans out-neighborhoods only; every edge of `G[S]` is found exactly
    /// once, from its tail.
    pub fn from_orientation(o: &Orientation, s: &[VertexId]) -> Self {
        let (verts, local) = Subgraph::index(s);
        let mut adj = vec![Vec::new(); verts.len()];
        for (i, &v) in verts.iter().enumerate() {
            for w in o.out_neighbors(v) {
                if let Some(&j) = local.get(&w) {
                    adj[i].push(j);
                    adj[j].push(i);
                }
            }
        }
        Subgraph { verts, adj }
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Greedy smallest-absent over local indices in `order`.
    fn color_in(&self, order: impl Iterator<Item = usize>) -> Vec<usize> {
        const NONE: usize = usize::MAX;
        let mut col = vec![NONE; self.len()];
        let mut used = Vec::new();
        for i in order {
            used.clear();
            used.resize(self.adj[i].len() + 1, false);
            for &j in &self.adj[i] {
                if col[j] < used.len() {
                    used[col[j]] = true;
                }
            }
            col[i] = used.iter().position(|&u| !u).unwrap();
        }
        col
    }

    fn into_coloring(self, col: Vec<usize>, advertised_c: usize) -> StaticColoring {
        StaticColoring { colors: self.verts.into_iter().zip(col).collect(), advertised_c }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegeneracyOrder {
    pub order: Vec<VertexId>,
    /// Each vertex has at most this many `G[S]`-neighbors later in `order`.
    pub back_degree_bound: usize,
}

/// Greedy smallest-absent in ascending id order. Uses at most
/// `1 + maxdeg(G[S])` colors.
pub fn greedy_static(g: &DynamicGraph, s: &[VertexId]) -> StaticColoring {
    let sub = Subgraph::from_adjacency(g, s);
    let c = sub.max_degree() + 1;
    let col = sub.color_in(0..sub.len());
    sub.into_coloring(col, c)
}

fn peel(sub: &Subgraph, alpha: usize) -> Result<Vec<usize>, StaticColorError> {
    let threshold = 2 * alpha;
    let mut deg: Vec<usize> = sub.adj.iter().map(Vec::len).collect();
    let mut removed = vec![false; sub.len()];
    let mut queued = vec![false; sub.len()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for i in 0..sub.len() {
        if deg[i] <= threshold {
            queued[i] = true;
            queue.push_back(i);
        }
    }
    let mut order = Vec::with_capacity(sub.len());
    while let Some(i) = queue.pop_front() {
        removed[i] = true;
        order.push(i);
        for &j in &sub.adj[i] {
            if !removed[j] {
                deg[j] -= 1;
                if !queued[j] && deg[j] <= threshold {
                    queued[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    if order.len() < sub.len() {
        return Err(StaticColorError::ArborityExceeded { alpha, threshold, remaining: sub.len() - order.len() });
    }
    Ok(order)
}

/// Bucket peeling of `G[S]` at threshold `2α`. With an orientation, `G[S]`
/// is built from out-lists.
pub fn degeneracy_order(
    g: &DynamicGraph,
    s: &[VertexId],
    orientation: Option<&Orientation>,
    alpha: usize,
) -> Result<DegeneracyOrder, StaticColorError> {
    let sub = match orientation {
        Some(o) => Subgraph::from_orientation(o, s),
        None => Subgraph::from_adjacency(g, s),
    };
    let order = peel(&sub, alpha)?;
    Ok(DegeneracyOrder { order: order.into_iter().map(|i| sub.verts[i]).collect(), back_degree_bound: 2 * alpha })
}

/// Colors the vertices of `order` in reverse, smallest color absent among
/// already-colored neighbors. Colors stay below `back_degree_bound + 1`.
pub fn color_by_order(g: &DynamicGraph, order: &DegeneracyOrder) -> StaticColoring {
    let sub = Subgraph::from_adjacency(g, &order.order);
    let pos: HashMap<VertexId, usize> = sub.verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let local: Vec<usize> = order.order.iter().map(|v| pos[v]).collect();
    let col = sub.color_in(local.into_iter().rev());
    sub.into_coloring(col, order.back_degree_bound + 1)
}

/// `G[S]` found by scanning out-neighborhoods only. Same vertex id space as
/// `DynamicGraph::induced_subgraph`.
pub fn induced_via_orientation(n: usize, s: &[VertexId], o: &Orientation) -> DynamicGraph {
    let sub = Subgraph::from_orientation(o, s);
    let mut out = DynamicGraph::new(n);
    for (i, nbrs) in sub.adj.iter().enumerate() {
        for &j in nbrs {
            if i < j {
                out.insert_edge(sub.verts[i], sub.verts[j]).expect("subgraph edges are simple");
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, Default)]
pub struct GreedyStatic;

impl StaticColoringOracle for GreedyStatic {
    fn name(&self) -> &'static str {
        "greedy"
    }

    fn palette_bound(&self, n: usize) -> usize {
        n.max(1)
    }

    fn color(
        &self,
        g: &DynamicGraph,
        s: &[VertexId],
        _orientation: Option<&Orientation>,
    ) -> Result<StaticColoring, StaticColorError> {
        Ok(greedy_static(g, s))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DegeneracyOracle {
    pub alpha: usize,
}

impl DegeneracyOracle {
    pub fn new(alpha: usize) -> Self {
        DegeneracyOracle { alpha: alpha.max(1) }
    }
}

impl StaticColoringOracle for DegeneracyOracle {
    fn name(&self) -> &'static str {
        "degeneracy"
    }

    fn palette_bound(&self, _n: usize) -> usize {
        2 * self.alpha + 1
    }

    fn color(
        &self,
        g: &DynamicGraph,
        s: &[VertexId],
        orientation: Option<&Orientation>,
    ) -> Result<StaticColoring, StaticColorError> {
        let sub = match orientation {
            Some(o) => Subgraph::from_orientation(o, s),
            None => Subgraph::from_adjacency(g, s),
        };
        let order = peel(&sub, self.alpha)?;
        let col = sub.color_in(order.into_iter().rev());
        Ok(sub.into_coloring(col, 2 * self.alpha + 1))
    }
}
