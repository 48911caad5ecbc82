//! Exact edge, wedge and triangle counts and the statistics built on them.
//!
//! With `M` edges, `W` wedges (unordered 2-paths) and `Δ` triangles on `N`
//! nodes:
//!
//! * `Ê = M / C(N,2)`
//! * `V̂ = W / (3·C(N,3))`
//! * `T̂ = Δ / C(N,3)`
//! * `ρ̂ = T̂·Ê³ / V̂³`
//!
//! `ρ̂` and both clustering coefficients are undefined when `W = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgraphCounts {
    pub m_edges: u64,
    pub wedges: u64,
    pub triangles: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub n: usize,
    pub edges: u64,
    pub wedges: u64,
    pub triangles: u64,
    pub e_hat: f64,
    pub v_hat: f64,
    pub t_hat: f64,
    /// Normalized clustering coefficient; `None` when there are no wedges.
    pub rho_hat: Option<f64>,
    /// Global clustering coefficient `3Δ / W`.
    pub cc_hat: Option<f64>,
    /// `3·T̂ / V̂ = 9Δ / W`, the form that tends to `3p` under Erdős–Rényi.
    pub cc_ratio: Option<f64>,
}

impl GraphStats {
    pub fn counts(&self) -> SubgraphCounts {
        SubgraphCounts {
            m_edges: self.edges,
            wedges: self.wedges,
            triangles: self.triangles,
        }
    }
}

/// Edges, wedges and triangles with the default execution strategy.
pub fn count_subgraphs(g: &Graph) -> SubgraphCounts {
    count_subgraphs_with(g, Exec::default())
}

pub fn count_subgraphs_with(g: &Graph, exec: Exec) -> SubgraphCounts {
    let wedges = g
        .degrees()
        .map(|d| {
            let d = d as u64;
            d * d.saturating_sub(1) / 2
        })
        .sum();
    SubgraphCounts {
        m_edges: g.edge_count() as u64,
        wedges,
        triangles: count_triangles(g, exec),
    }
}

/// Triangle count by sorted-list intersection over a degree orientation.
///
/// Each edge is directed from the lower-ranked to the higher-ranked
/// endpoint, ranking by `(degree, id)`. Every triangle is then found exactly
/// once at its lowest-ranked vertex, and out-degrees are `O(√M)`.
pub fn count_triangles(g: &Graph, exec: Exec) -> u64 {
    let n = g.n();
    let rank_less = |a: usize, b: usize| (g.degree(a), a) < (g.degree(b), b);
    let mut out_offsets = Vec::with_capacity(n + 1);
    out_offsets.push(0usize);
    let mut out: Vec<u32> = Vec::with_capacity(g.edge_count());
    for u in 0..n {
        out.extend(g.neighbors(u).iter().copied().filter(|&v| rank_less(u, v as usize)));
        out_offsets.push(out.len());
    }
    let out_of = |u: usize| &out[out_offsets[u]..out_offsets[u + 1]];
    exec::sum_indexed(n, exec, |u| {
        let nu = out_of(u);
        nu.iter().map(|&v| intersect_count(nu, out_of(v as usize))).sum()
    })
}

/// Size of the intersection of two ascending slices.
pub(crate) fn intersect_count(a: &[u32], b: &[u32]) -> u64 {
    let (mut i, mut j, mut c) = (0, 0, 0u64);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

fn choose2(n: usize) -> f64 {
    let n = n as f64;
    n * (n - 1.0) / 2.0
}

fn choose3(n: usize) -> f64 {
    let n = n as f64;
    n * (n - 1.0) * (n - 2.0) / 6.0
}

/// Statistics from precomputed counts on `n` nodes.
pub fn stats_from_counts(n: usize, c: SubgraphCounts) -> Result<GraphStats> {
    if n < 3 {
        return Err(Error::DegenerateGraph { n });
    }
    let c2 = choose2(n);
    let c3 = choose3(n);
    let e_hat = c.m_edges as f64 / c2;
    let v_hat = c.wedges as f64 / (3.0 * c3);
    let t_hat = c.triangles as f64 / c3;
    let (rho_hat, cc_hat, cc_ratio) = if c.wedges == 0 {
        (None, None, None)
    } else {
        let ratio = e_hat / v_hat;
        let w = c.wedges as f64;
        let tri = c.triangles as f64;
        (
            Some(t_hat * ratio * ratio * ratio),
            Some(3.0 * tri / w),
            Some(9.0 * tri / w),
        )
    };
    Ok(GraphStats {
        n,
        edges: c.m_edges,
        wedges: c.wedges,
        triangles: c.triangles,
        e_hat,
        v_hat,
        t_hat,
        rho_hat,
        cc_hat,
        cc_ratio,
    })
}

pub fn graph_stats(g: &Graph) -> Result<GraphStats> {
    stats_from_counts(g.n(), count_subgraphs(g))
}

pub fn graph_stats_with(g: &Graph, exec: Exec) -> Result<GraphStats> {
    stats_from_counts(g.n(), count_subgraphs_with(g, exec))
}

/// Trace and quadratic-form quantities of the adjacency matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatrixMoments {
    /// `tr(A³)`: closed walks of length three.
    pub trace_a3: u64,
    /// `tr(A²)`: sum of degrees.
    pub trace_a2: u64,
    /// `1'A1`: sum of all entries.
    pub ones_a_ones: u64,
    /// `1'A²1`: sum of squared degrees.
    pub ones_a2_ones: u64,
}

/// Matrix moments computed from the adjacency lists without building `A`.
///
/// `tr(A³)` is accumulated as `Σ_v Σ_{u∈N(v)} |N(u) ∩ N(v)|`, independent
/// of the oriented triangle count.
pub fn matrix_moments(g: &Graph) -> MatrixMoments {
    let mut trace_a3 = 0u64;
    let mut ones_a2_ones = 0u64;
    let mut ones_a_ones = 0u64;
    for v in 0..g.n() {
        let nv = g.neighbors(v);
        let d = nv.len() as u64;
        ones_a_ones += d;
        ones_a2_ones += d * d;
        for &u in nv {
            trace_a3 += intersect_count(nv, g.neighbors(u as usize));
        }
    }
    MatrixMoments {
        trace_a3,
        trace_a2: ones_a_ones,
        ones_a_ones,
        ones_a2_ones,
    }
}

/// `ρ̂` through the trace form
/// `(N−2)²·tr(A³)·(1'A1)³ / [N(N−1)·(1'A²1 − tr(A²))³]`.
pub fn rho_matrix_form(g: &Graph) -> Result<f64> {
    let n = g.n();
    if n < 3 {
        return Err(Error::DegenerateGraph { n });
    }
    let mm = matrix_moments(g);
    let paths2 = mm.ones_a2_ones - mm.trace_a2;
    if paths2 == 0 {
        return Err(Error::DegenerateStatistic("no wedges, rho undefined".into()));
    }
    let nf = n as f64;
    let s = mm.ones_a_ones as f64 / paths2 as f64;
    Ok((nf - 2.0) * (nf - 2.0) * mm.trace_a3 as f64 * s * s * s / (nf * (nf - 1.0)))
}
