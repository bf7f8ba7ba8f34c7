//! Seeded update-trace generators.
//!
//! Every generator replays validly from the empty graph. The forest variants
//! keep each forest acyclic with a union-find that is rebuilt after deletions,
//! so `UnionOfForests { alpha }` has arboricity at most `alpha` at every prefix.

use std::fmt;
use std::str::FromStr;

use indexmap::{IndexMap, IndexSet};
use petgraph::unionfind::UnionFind;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{edge_key, UpdateEvent, VertexId};
use crate::trace::UpdateTrace;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GenKind {
    /// Erdos-Renyi style churn: insert a random non-edge with probability
    /// `insert_prob` (while below `max_edges`), otherwise delete a random edge.
    RandomGraph {
        insert_prob: f64,
        max_edges: usize,
    },
    /// One dynamic forest; deletions happen with probability `delete_prob`
    /// and are forced once the forest spans.
    RandomForest {
        delete_prob: f64,
    },
    UnionOfForests {
        alpha: usize,
        delete_prob: f64,
    },
    /// Every inserted edge is deleted exactly `window` steps later.
    SlidingWindow {
        window: usize,
    },
    /// Stars built and torn down around a rotating center.
    AdversarialStar,
    /// Paths over fresh random vertex orders, built and torn down.
    AdversarialPath,
}

impl GenKind {
    pub const NAMES: [&'static str; 6] =
        ["random_graph", "random_forest", "union_of_forests", "sliding_window", "adversarial_star", "adversarial_path"];

    pub fn name(&self) -> &'static str {
        match self {
            GenKind::RandomGraph { .. } => "random_graph",
            GenKind::RandomForest { .. } => "random_forest",
            GenKind::UnionOfForests { .. } => "union_of_forests",
            GenKind::SlidingWindow { .. } => "sliding_window",
            GenKind::AdversarialStar => "adversarial_star",
            GenKind::AdversarialPath => "adversarial_path",
        }
    }

    /// Default parameters for `name` on `n` vertices.
    pub fn with_defaults(name: &str, n: usize) -> Option<GenKind> {
        Some(match name {
            "random_graph" => GenKind::RandomGraph { insert_prob: 0.6, max_edges: 4 * n },
            "random_forest" => GenKind::RandomForest { delete_prob: 0.3 },
            "union_of_forests" => GenKind::UnionOfForests { alpha: 2, delete_prob: 0.3 },
            "sliding_window" => GenKind::SlidingWindow { window: 100 },
            "adversarial_star" => GenKind::AdversarialStar,
            "adversarial_path" => GenKind::AdversarialPath,
            _ => return None,
        })
    }
}

impl fmt::Display for GenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownGenerator(pub String);

impl fmt::Display for UnknownGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown generator `{}` (expected one of {})", self.0, GenKind::NAMES.join(", "))
    }
}

impl std::error::Error for UnknownGenerator {}

impl FromStr for GenKind {
    type Err = UnknownGenerator;

    /// Parses a bare name with default parameters; `n`-dependent defaults use
    /// `n = 0` here, so callers usually prefer [`GenKind::with_defaults`].
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GenKind::with_defaults(s, 0).ok_or_else(|| UnknownGenerator(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceGenerator {
    pub kind: GenKind,
    pub n: usize,
    pub steps: usize,
    pub seed: u64,
}

impl TraceGenerator {
    pub fn new(kind: GenKind, n: usize, steps: usize, seed: u64) -> Self {
        TraceGenerator { kind, n, steps, seed }
    }

    pub fn generate(&self) -> UpdateTrace {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let (n, steps) = (self.n, self.steps);
        let events = if n < 2 {
            Vec::new()
        } else {
            match self.kind {
                GenKind::RandomGraph { insert_prob, max_edges } => {
                    random_graph(n, steps, insert_prob, max_edges, &mut rng)
                }
                GenKind::RandomForest { delete_prob } => forests(n, steps, 1, delete_prob, &mut rng),
                GenKind::UnionOfForests { alpha, delete_prob } => {
                    forests(n, steps, alpha.max(1), delete_prob, &mut rng)
                }
                GenKind::SlidingWindow { window } => sliding_window(n, steps, window.max(1), &mut rng),
                GenKind::AdversarialStar => adversarial_star(n, steps),
                GenKind::AdversarialPath => adversarial_path(n, steps, &mut rng),
            }
        };
        UpdateTrace { n, events }
    }
}

fn max_pairs(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Uniform random pair not in `edges`, by rejection. `None` if the graph is
/// too dense for rejection to be cheap.
fn random_non_edge(
    n: usize,
    edges: &IndexSet<(VertexId, VertexId)>,
    rng: &mut ChaCha8Rng,
) -> Option<(VertexId, VertexId)> {
    if edges.len() >= max_pairs(n) {
        return None;
    }
    for _ in 0..64 {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v && !edges.contains(&edge_key(u, v)) {
            return Some(edge_key(u, v));
        }
    }
    None
}

fn random_graph(n: usize, steps: usize, insert_prob: f64, max_edges: usize, rng: &mut ChaCha8Rng) -> Vec<UpdateEvent> {
    let mut edges: IndexSet<(VertexId, VertexId)> = IndexSet::new();
    let mut out = Vec::with_capacity(steps);
    while out.len() < steps {
        let want_insert = edges.is_empty() || (edges.len() < max_edges && rng.gen_bool(insert_prob));
        let fresh = if want_insert { random_non_edge(n, &edges, rng) } else { None };
        match fresh {
            Some((u, v)) => {
                edges.insert((u, v));
                out.push(UpdateEvent::insert(u, v));
            }
            None if !edges.is_empty() => {
                let i = rng.gen_range(0..edges.len());
                let (u, v) = edges.swap_remove_index(i).unwrap();
                out.push(UpdateEvent::delete(u, v));
            }
            None => break,
        }
    }
    out
}

fn rebuild(n: usize, edges: impl Iterator<Item = (VertexId, VertexId)>) -> UnionFind<usize> {
    let mut uf = UnionFind::new(n);
    for (u, v) in edges {
        uf.union(u, v);
    }
    uf
}

fn forests(n: usize, steps: usize, alpha: usize, delete_prob: f64, rng: &mut ChaCha8Rng) -> Vec<UpdateEvent> {
    // edge -> forest index
    let mut edges: IndexMap<(VertexId, VertexId), usize> = IndexMap::new();
    let mut sizes = vec![0usize; alpha];
    let mut ufs: Vec<UnionFind<usize>> = (0..alpha).map(|_| UnionFind::new(n)).collect();
    let full = alpha * (n - 1);
    let mut order: Vec<usize> = (0..alpha).collect();
    let mut out = Vec::with_capacity(steps);
    while out.len() < steps {
        let mut inserted = false;
        if edges.len() < full && !(!edges.is_empty() && rng.gen_bool(delete_prob)) {
            'tries: for _ in 0..64 {
                let u = rng.gen_range(0..n);
                let v = rng.gen_range(0..n);
                if u == v || edges.contains_key(&edge_key(u, v)) {
                    continue;
                }
                order.shuffle(rng);
                for &f in &order {
                    if sizes[f] < n - 1 && !ufs[f].equiv(u, v) {
                        ufs[f].union(u, v);
                        sizes[f] += 1;
                        edges.insert(edge_key(u, v), f);
                        out.push(UpdateEvent::insert(u, v));
                        inserted = true;
                        break 'tries;
                    }
                }
            }
        }
        if inserted {
            continue;
        }
        if edges.is_empty() {
            break;
        }
        let i = rng.gen_range(0..edges.len());
        let ((u, v), f) = edges.swap_remove_index(i).unwrap();
        sizes[f] -= 1;
        ufs[f] = rebuild(n, edges.iter().filter(|&(_, &g)| g == f).map(|(&e, _)| e));
        out.push(UpdateEvent::delete(u, v));
    }
    out
}

fn sliding_window(n: usize, steps: usize, window: usize, rng: &mut ChaCha8Rng) -> Vec<UpdateEvent> {
    let mut edges: IndexSet<(VertexId, VertexId)> = IndexSet::new();
    let mut out: Vec<UpdateEvent> = Vec::with_capacity(steps);
    while out.len() < steps {
        let t = out.len();
        if t >= window && out[t - window].is_insert() {
            let old = out[t - window];
            edges.swap_remove(&edge_key(old.u, old.v));
            out.push(UpdateEvent::delete(old.u, old.v));
            continue;
        }
        match random_non_edge(n, &edges, rng) {
            Some((u, v)) => {
                edges.insert((u, v));
                out.push(UpdateEvent::insert(u, v));
            }
            // Too dense to insert: the window cannot be honoured any further.
            None => break,
        }
    }
    out
}

fn adversarial_star(n: usize, steps: usize) -> Vec<UpdateEvent> {
    let mut out = Vec::with_capacity(steps);
    let mut center = 0;
    while out.len() < steps {
        let leaves: Vec<VertexId> = (0..n).filter(|&x| x != center).collect();
        for &leaf in &leaves {
            out.push(UpdateEvent::insert(center, leaf));
        }
        for &leaf in &leaves {
            out.push(UpdateEvent::delete(center, leaf));
        }
        center = (center + 1) % n;
    }
    out.truncate(steps);
    out
}

fn adversarial_path(n: usize, steps: usize, rng: &mut ChaCha8Rng) -> Vec<UpdateEvent> {
    let mut out = Vec::with_capacity(steps);
    let mut perm: Vec<VertexId> = (0..n).collect();
    while out.len() < steps {
        perm.shuffle(rng);
        for w in perm.windows(2) {
            out.push(UpdateEvent::insert(w[0], w[1]));
        }
        for w in perm.windows(2) {
            out.push(UpdateEvent::delete(w[0], w[1]));
        }
    }
    out.truncate(steps);
    out
}
