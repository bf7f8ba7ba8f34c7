//! Dynamic graph coloring with bounded recourse.

pub mod arb;
pub mod bench;
pub mod bins;
pub mod bucket;
pub mod gen;
pub mod graph;
pub mod greedy;
pub mod interval;
pub mod lds;
pub mod orientation;
pub mod static_color;
pub mod suite;
pub mod trace;
