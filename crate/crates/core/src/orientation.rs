//! Online bounded out-degree edge orientation.
//!
//! A new edge leaves the endpoint with the smaller out-degree (lower id on
//! ties). Any vertex pushed above `cap` then has all of its out-edges reversed,
//! which may cascade; on graphs of arboricity α the cascade settles for
//! `cap >= 2α + 1`, and the default `cap = 4α` leaves ample slack.

use indexmap::IndexSet;
use thiserror::Error;

use crate::graph::{DynamicGraph, GraphError, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum OrientationError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("flip cascade exceeded its budget of {budget} flips (cap {cap} too small for this graph)")]
    CapTooSmall { cap: usize, budget: u64 },
}

#[derive(Debug, Clone)]
pub struct Orientation {
    out: Vec<IndexSet<VertexId>>,
    inn: Vec<IndexSet<VertexId>>,
    cap: usize,
    flip_count: u64,
    flip_budget: u64,
    stack: Vec<VertexId>,
}

impl Orientation {
    pub fn new(n: usize, cap: usize) -> Self {
        let log_n = (n.max(2) as f64).log2().ceil() as u64;
        Orientation {
            out: (0..n).map(|_| IndexSet::new()).collect(),
            inn: (0..n).map(|_| IndexSet::new()).collect(),
            cap,
            flip_count: 0,
            flip_budget: 64 * cap.max(1) as u64 * log_n,
            stack: Vec::new(),
        }
    }

    /// Default cap `4α`.
    pub fn for_arboricity(n: usize, alpha: usize) -> Self {
        Orientation::new(n, 4 * alpha.max(1))
    }

    /// Orients every edge of `g`, inserting in `g.edges()` order.
    pub fn from_graph(g: &DynamicGraph, cap: usize) -> Result<Self, OrientationError> {
        let mut o = Orientation::new(g.n(), cap);
        for (u, v) in g.edges() {
            o.orient_insert(u, v)?;
        }
        Ok(o)
    }

    pub fn n(&self) -> usize {
        self.out.len()
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn flip_count(&self) -> u64 {
        self.flip_count
    }

    pub fn flip_budget(&self) -> u64 {
        self.flip_budget
    }

    pub fn set_flip_budget(&mut self, budget: u64) {
        self.flip_budget = budget;
    }

    #[inline]
    pub fn out_degree(&self, v: VertexId) -> usize {
        self.out[v].len()
    }

    pub fn max_out_degree(&self) -> usize {
        self.out.iter().map(IndexSet::len).max().unwrap_or(0)
    }

    pub fn out_neighbors(&self, v: VertexId) -> impl ExactSizeIterator<Item = VertexId> + '_ {
        self.out[v].iter().copied()
    }

    pub fn in_neighbors(&self, v: VertexId) -> impl ExactSizeIterator<Item = VertexId> + '_ {
        self.inn[v].iter().copied()
    }

    /// `true` iff the edge is present and points `tail -> head`.
    pub fn is_oriented(&self, tail: VertexId, head: VertexId) -> bool {
        self.out[tail].contains(&head)
    }

    fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.out[u].contains(&v) || self.out[v].contains(&u)
    }

    fn flip(&mut self, tail: VertexId, head: VertexId) {
        self.out[tail].swap_remove(&head);
        self.inn[head].swap_remove(&tail);
        self.out[head].insert(tail);
        self.inn[tail].insert(head);
        self.flip_count += 1;
    }

    /// Orients a newly inserted edge and restores the cap. Returns the number
    /// of cascade flips.
    pub fn orient_insert(&mut self, u: VertexId, v: VertexId) -> Result<u64, OrientationError> {
        if u == v {
            return Err(GraphError::SelfLoop(u).into());
        }
        if self.has_edge(u, v) {
            return Err(GraphError::DuplicateEdge(u, v).into());
        }
        let (du, dv) = (self.out_degree(u), self.out_degree(v));
        let (tail, head) = if du < dv || (du == dv && u < v) { (u, v) } else { (v, u) };
        self.out[tail].insert(head);
        self.inn[head].insert(tail);

        let start = self.flip_count;
        self.stack.clear();
        if self.out_degree(tail) > self.cap {
            self.stack.push(tail);
        }
        while let Some(w) = self.stack.pop() {
            if self.out_degree(w) <= self.cap {
                continue;
            }
            let targets: Vec<VertexId> = self.out[w].iter().copied().collect();
            for x in targets {
                self.flip(w, x);
                if self.out_degree(x) == self.cap + 1 {
                    self.stack.push(x);
                }
            }
            if self.flip_count - start > self.flip_budget {
                return Err(OrientationError::CapTooSmall { cap: self.cap, budget: self.flip_budget });
            }
        }
        Ok(self.flip_count - start)
    }

    pub fn orient_delete(&mut self, u: VertexId, v: VertexId) -> Result<(), OrientationError> {
        let (tail, head) = if self.out[u].contains(&v) {
            (u, v)
        } else if self.out[v].contains(&u) {
            (v, u)
        } else {
            return Err(GraphError::MissingEdge(u, v).into());
        };
        self.out[tail].swap_remove(&head);
        self.inn[head].swap_remove(&tail);
        Ok(())
    }

    /// Vertices whose out- and in-sets disagree with `g`'s adjacency, or whose
    /// out-degree exceeds the cap.
    pub fn violations(&self, g: &DynamicGraph) -> Vec<VertexId> {
        (0..self.n())
            .filter(|&v| {
                let ok_sizes = self.out[v].len() + self.inn[v].len() == g.degree(v);
                let ok_members = g.neighbors(v).all(|w| {
                    self.out[v].contains(&w) != self.inn[v].contains(&w)
                        && self.out[v].contains(&w) == self.inn[w].contains(&v)
                });
                !(ok_sizes && ok_members && self.out[v].len() <= self.cap)
            })
            .collect()
    }
}
