//! Network clustering coefficient ρ: subgraph counts, the closed-form
//! ρ(r) curve for block models, random graph generators, inference
//! (confidence intervals and a two-sample test), subsampling, and
//! snapshot-series ingest.
//!
//! Everything data-parallel goes through [`exec::Exec`]; with the
//! `parallel` feature off every entry point runs sequentially and produces
//! the same output.

// Range checks are written `!(x >= lo)` on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod exec;
pub mod generators;
pub mod graph;
pub mod inference;
pub mod io;
pub mod sampling;
pub mod stats;
pub mod theory;

pub use error::{Boundary, Error, Result};
pub use exec::Exec;
pub use graph::{build_graph, DedupPolicy, Graph, NodeLabeling, Subgraph};
pub use stats::{count_subgraphs, graph_stats, GraphStats, SubgraphCounts};
