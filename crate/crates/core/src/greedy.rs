//! Dynamic (Δ+1)-coloring with at most one recoloring per insertion.
//!
//! When an insertion makes an edge monochromatic, the endpoint of lower degree
//! (lower id on ties) takes the smallest color absent from its neighborhood.
//! Deletions never recolor.

use thiserror::Error;

use crate::graph::{DynamicGraph, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ColorError {
    #[error("no free color below cap {cap} for vertex {vertex}")]
    PaletteExhausted { vertex: VertexId, cap: usize },
}

#[derive(Debug, Clone)]
pub struct GreedyColorer {
    colors: Vec<usize>,
    cap: Option<usize>,
    recolor_count: u64,
    scratch: Vec<bool>,
}

impl GreedyColorer {
    /// Every vertex starts with color 0, which is proper on the empty graph.
    pub fn new(n: usize) -> Self {
        GreedyColorer { colors: vec![0; n], cap: None, recolor_count: 0, scratch: Vec::new() }
    }

    pub fn with_cap(n: usize, cap: usize) -> Self {
        GreedyColorer { cap: Some(cap), ..GreedyColorer::new(n) }
    }

    #[inline]
    pub fn color(&self, v: VertexId) -> usize {
        self.colors[v]
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn cap(&self) -> Option<usize> {
        self.cap
    }

    pub fn recolor_count(&self) -> u64 {
        self.recolor_count
    }

    /// Overwrites a color without counting a recoloring.
    pub fn set_color(&mut self, v: VertexId, c: usize) {
        self.colors[v] = c;
    }

    /// Smallest color not used by any neighbor of `v` in `g`.
    pub fn smallest_absent(&mut self, g: &DynamicGraph, v: VertexId) -> usize {
        let deg = g.degree(v);
        self.scratch.clear();
        self.scratch.resize(deg + 1, false);
        for w in g.neighbors(v) {
            let c = self.colors[w];
            if c <= deg {
                self.scratch[c] = true;
            }
        }
        self.scratch.iter().position(|&used| !used).unwrap_or(deg + 1)
    }

    /// Call after `(u, v)` has been added to `g`.
    pub fn on_insert(&mut self, g: &DynamicGraph, u: VertexId, v: VertexId) -> Result<Option<VertexId>, ColorError> {
        if self.colors[u] != self.colors[v] {
            return Ok(None);
        }
        let (du, dv) = (g.degree(u), g.degree(v));
        let target = if du < dv || (du == dv && u < v) { u } else { v };
        self.recolor_to_fresh(g, target)?;
        Ok(Some(target))
    }

    /// Call after `(u, v)` has been removed from `g`. Never recolors.
    pub fn on_delete(&mut self, _g: &DynamicGraph, _u: VertexId, _v: VertexId) {}

    /// Moves `v` to the smallest color absent from its neighborhood, counting
    /// one recoloring.
    pub fn recolor_to_fresh(&mut self, g: &DynamicGraph, v: VertexId) -> Result<usize, ColorError> {
        let c = self.smallest_absent(g, v);
        if let Some(cap) = self.cap {
            if c >= cap {
                return Err(ColorError::PaletteExhausted { vertex: v, cap });
            }
        }
        self.colors[v] = c;
        self.recolor_count += 1;
        Ok(c)
    }

    /// Edges of `g` whose endpoints share a color.
    pub fn conflicts(&self, g: &DynamicGraph) -> Vec<(VertexId, VertexId)> {
        g.edges().filter(|&(u, v)| self.colors[u] == self.colors[v]).collect()
    }
}
