//! Undirected simple graph over a fixed vertex set, mutated one edge at a time.

use indexmap::IndexSet;
use thiserror::Error;

/// Vertex ids are dense indices in `0..n`.
pub type VertexId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeOp {
    Insert,
    Delete,
}

/// A single edge insertion or deletion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct UpdateEvent {
    pub op: EdgeOp,
    pub u: VertexId,
    pub v: VertexId,
}

impl UpdateEvent {
    pub fn insert(u: VertexId, v: VertexId) -> Self {
        UpdateEvent { op: EdgeOp::Insert, u, v }
    }

    pub fn delete(u: VertexId, v: VertexId) -> Self {
        UpdateEvent { op: EdgeOp::Delete, u, v }
    }

    pub fn is_insert(&self) -> bool {
        self.op == EdgeOp::Insert
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop on vertex {0}")]
    SelfLoop(VertexId),
    #[error("edge ({0}, {1}) already present")]
    DuplicateEdge(VertexId, VertexId),
    #[error("edge ({0}, {1}) not present")]
    MissingEdge(VertexId, VertexId),
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: VertexId, n: usize },
}

/// Canonical `(min, max)` key of an undirected edge.
#[inline]
pub fn edge_key(u: VertexId, v: VertexId) -> (VertexId, VertexId) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Adjacency-set graph. Neighbor sets iterate in a deterministic order that
/// depends only on the sequence of edits applied.
#[derive(Debug, Clone, Default)]
pub struct DynamicGraph {
    adj: Vec<IndexSet<VertexId>>,
    edge_count: usize,
}

impl PartialEq for DynamicGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n() == other.n()
            && self.edge_count == other.edge_count
            && self.adj.iter().zip(&other.adj).all(|(a, b)| a.len() == b.len() && a.iter().all(|x| b.contains(x)))
    }
}

impl Eq for DynamicGraph {}

impl DynamicGraph {
    pub fn new(n: usize) -> Self {
        DynamicGraph { adj: (0..n).map(|_| IndexSet::new()).collect(), edge_count: 0 }
    }

    pub fn from_edges(n: usize, edges: &[(VertexId, VertexId)]) -> Result<Self, GraphError> {
        let mut g = DynamicGraph::new(n);
        for &(u, v) in edges {
            g.insert_edge(u, v)?;
        }
        Ok(g)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    #[inline]
    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        u < self.n() && self.adj[u].contains(&v)
    }

    pub fn neighbors(&self, v: VertexId) -> impl ExactSizeIterator<Item = VertexId> + '_ {
        self.adj[v].iter().copied()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(IndexSet::len).max().unwrap_or(0)
    }

    /// Every edge once, as `(min, max)`.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, nb)| nb.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    fn check_pair(&self, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        let n = self.n();
        for vertex in [u, v] {
            if vertex >= n {
                return Err(GraphError::VertexOutOfRange { vertex, n });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        Ok(())
    }

    pub fn insert_edge(&mut self, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        self.check_pair(u, v)?;
        if self.adj[u].contains(&v) {
            return Err(GraphError::DuplicateEdge(u, v));
        }
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        self.edge_count += 1;
        Ok(())
    }

    pub fn remove_edge(&mut self, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        self.check_pair(u, v)?;
        if !self.adj[u].swap_remove(&v) {
            return Err(GraphError::MissingEdge(u, v));
        }
        self.adj[v].swap_remove(&u);
        self.edge_count -= 1;
        Ok(())
    }

    /// Checks `ev` against the current graph without applying it.
    pub fn validate(&self, ev: &UpdateEvent) -> Result<(), GraphError> {
        self.check_pair(ev.u, ev.v)?;
        let present = self.adj[ev.u].contains(&ev.v);
        match ev.op {
            EdgeOp::Insert if present => Err(GraphError::DuplicateEdge(ev.u, ev.v)),
            EdgeOp::Delete if !present => Err(GraphError::MissingEdge(ev.u, ev.v)),
            _ => Ok(()),
        }
    }

    pub fn apply(&mut self, ev: &UpdateEvent) -> Result<(), GraphError> {
        match ev.op {
            EdgeOp::Insert => self.insert_edge(ev.u, ev.v),
            EdgeOp::Delete => self.remove_edge(ev.u, ev.v),
        }
    }

    /// Removes every edge incident to `v`, returning the former neighbors.
    pub fn isolate(&mut self, v: VertexId) -> Vec<VertexId> {
        let nbrs: Vec<VertexId> = self.adj[v].drain(..).collect();
        for &w in &nbrs {
            self.adj[w].swap_remove(&v);
        }
        self.edge_count -= nbrs.len();
        nbrs
    }

    /// The subgraph induced by `subset`, on the same vertex id space: vertices
    /// outside `subset` are kept but isolated.
    pub fn induced_subgraph(&self, subset: &[VertexId]) -> DynamicGraph {
        let mut member = vec![false; self.n()];
        for &v in subset {
            member[v] = true;
        }
        let mut sub = DynamicGraph::new(self.n());
        for &u in subset {
            for &v in &self.adj[u] {
                if member[v] && u < v {
                    sub.adj[u].insert(v);
                    sub.adj[v].insert(u);
                    sub.edge_count += 1;
                }
            }
        }
        sub
    }

    /// Sorted edge list; convenient for structural comparisons in tests.
    pub fn sorted_edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut e: Vec<_> = self.edges().collect();
        e.sort_unstable();
        e
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> DynamicGraph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        DynamicGraph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn insert_then_delete() {
        let mut g = DynamicGraph::new(3);
        g.apply(&UpdateEvent::insert(0, 1)).unwrap();
        assert_eq!(g.neighbors(0).collect::<Vec<_>>(), vec![1]);
        assert_eq!(g.neighbors(1).collect::<Vec<_>>(), vec![0]);
        assert_eq!(g.edge_count(), 1);
        g.apply(&UpdateEvent::delete(0, 1)).unwrap();
        assert_eq!(g, DynamicGraph::new(3));
    }

    #[test]
    fn precondition_errors() {
        let mut g = DynamicGraph::from_edges(3, &[(0, 1)]).unwrap();
        assert_eq!(g.apply(&UpdateEvent::insert(0, 1)), Err(GraphError::DuplicateEdge(0, 1)));
        assert_eq!(g.apply(&UpdateEvent::delete(1, 2)), Err(GraphError::MissingEdge(1, 2)));
        assert_eq!(g.apply(&UpdateEvent::insert(2, 2)), Err(GraphError::SelfLoop(2)));
        assert!(matches!(g.apply(&UpdateEvent::insert(0, 3)), Err(GraphError::VertexOutOfRange { vertex: 3, n: 3 })));
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn degrees() {
        assert_eq!(DynamicGraph::new(4).degree(0), 0);
        let star = DynamicGraph::from_edges(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]).unwrap();
        assert_eq!(star.degree(0), 5);
        assert_eq!(path(3).degree(1), 2);
    }

    #[test]
    fn induced_examples() {
        let tri = DynamicGraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(tri.induced_subgraph(&[0, 1]).sorted_edges(), vec![(0, 1)]);
        assert_eq!(tri.induced_subgraph(&[]).edge_count(), 0);
        assert_eq!(path(4).induced_subgraph(&[0, 2, 3]).sorted_edges(), vec![(2, 3)]);
        let all: Vec<_> = (0..3).collect();
        assert_eq!(tri.induced_subgraph(&all), tri);
    }

    #[test]
    fn isolate_removes_incident_edges() {
        let mut g = DynamicGraph::from_edges(4, &[(0, 1), (0, 2), (2, 3)]).unwrap();
        let mut nb = g.isolate(0);
        nb.sort();
        assert_eq!(nb, vec![1, 2]);
        assert_eq!(g.sorted_edges(), vec![(2, 3)]);
        assert_eq!(g.edge_count(), 1);
    }
}
