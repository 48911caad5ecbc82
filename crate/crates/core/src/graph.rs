//! Simple undirected graphs in compressed sparse row form.

use crate::error::{Error, Result};

/// An immutable simple undirected graph on nodes `0..n`.
///
/// Neighbor lists are sorted ascending, contain no self-loops and no
/// duplicates, and adjacency is symmetric. Isolated nodes are kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
}

/// How `build_graph` treats self-loops and repeated edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DedupPolicy {
    /// Drop loops, merge duplicates, and report how many of each were seen.
    #[default]
    Merge,
    /// Reject any loop or duplicate.
    Strict,
}

/// A graph together with the cleanup counters from construction.
#[derive(Debug, Clone)]
pub struct BuildOutcome {
    pub graph: Graph,
    pub self_loops: usize,
    pub duplicates: usize,
}

/// Per-node community or party ids, dense in `0..k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeLabeling {
    labels: Vec<u32>,
    k: usize,
}

impl NodeLabeling {
    /// Labels must be dense ids; `k` is taken as one more than the largest.
    pub fn new(labels: Vec<u32>) -> Self {
        let k = labels.iter().max().map_or(0, |&m| m as usize + 1);
        NodeLabeling { labels, k }
    }

    pub fn with_k(labels: Vec<u32>, k: usize) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&l| l as usize >= k) {
            return Err(Error::Domain {
                what: "label",
                value: bad as f64,
                range: "[0, k)",
            });
        }
        Ok(NodeLabeling { labels, k })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> u32 {
        self.labels[v]
    }
}

/// Multigraph with loops and parallel edges, as produced by preferential
/// attachment before simplification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiGraphDraft {
    pub n: usize,
    pub edges: Vec<(u32, u32)>,
}

impl MultiGraphDraft {
    pub fn new(n: usize) -> Self {
        MultiGraphDraft { n, edges: Vec::new() }
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

/// A subgraph plus the map from its dense ids back to the parent's ids.
#[derive(Debug, Clone)]
pub struct Subgraph {
    pub graph: Graph,
    /// `mapping[new_id] = parent_id`, ascending.
    pub mapping: Vec<u32>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            offsets: vec![0; n + 1],
            neighbors: Vec::new(),
        }
    }

    /// Build from pairs that are already known to be loop-free and unique
    /// as unordered pairs.
    fn from_unique_pairs(n: usize, pairs: &[(u32, u32)]) -> Self {
        let mut deg = vec![0usize; n];
        for &(u, v) in pairs {
            deg[u as usize] += 1;
            deg[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &deg {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut neighbors = vec![0u32; offsets[n]];
        for &(u, v) in pairs {
            neighbors[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
            neighbors[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }
        for v in 0..n {
            neighbors[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        Graph { offsets, neighbors }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.offsets.windows(2).map(|w| w[1] - w[0])
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && v < self.n() && self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&v| v as usize > u)
                .map(move |&v| (u as u32, v))
        })
    }

    /// Average degree `2M / n`; zero for the empty node set.
    pub fn average_degree(&self) -> f64 {
        if self.n() == 0 {
            0.0
        } else {
            2.0 * self.edge_count() as f64 / self.n() as f64
        }
    }

    fn check_node(&self, v: usize) -> Result<()> {
        if v >= self.n() {
            Err(Error::InvalidNode { id: v, n: self.n() })
        } else {
            Ok(())
        }
    }

    /// Induced subgraph on `nodes` (any order, duplicates ignored). New ids
    /// follow ascending parent ids.
    pub fn induced_subgraph(&self, nodes: &[u32]) -> Result<Subgraph> {
        let mut mapping = nodes.to_vec();
        mapping.sort_unstable();
        mapping.dedup();
        if let Some(&bad) = mapping.last().filter(|&&v| v as usize >= self.n()) {
            return Err(Error::InvalidNode {
                id: bad as usize,
                n: self.n(),
            });
        }
        let mut index = vec![u32::MAX; self.n()];
        for (new, &old) in mapping.iter().enumerate() {
            index[old as usize] = new as u32;
        }
        let mut offsets = Vec::with_capacity(mapping.len() + 1);
        offsets.push(0);
        let mut neighbors = Vec::new();
        for &old in &mapping {
            // Parent lists are sorted and the remap is monotone, so the
            // filtered list stays sorted.
            neighbors.extend(
                self.neighbors(old as usize)
                    .iter()
                    .map(|&w| index[w as usize])
                    .filter(|&w| w != u32::MAX),
            );
            offsets.push(neighbors.len());
        }
        Ok(Subgraph {
            graph: Graph { offsets, neighbors },
            mapping,
        })
    }

    /// One-step ego network: the subgraph induced by `center` and its neighbors.
    pub fn ego_network(&self, center: usize) -> Result<Subgraph> {
        self.check_node(center)?;
        let mut nodes = self.neighbors(center).to_vec();
        nodes.push(center as u32);
        self.induced_subgraph(&nodes)
    }
}

/// Build a simple graph from an edge list.
///
/// `n` defaults to one more than the largest id seen. Edge order does not
/// affect the result.
pub fn build_graph(edges: &[(usize, usize)], n: Option<usize>, policy: DedupPolicy) -> Result<BuildOutcome> {
    let needed = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    let n = match n {
        Some(n) if n < needed => return Err(Error::NodeCountTooSmall { n, needed }),
        Some(n) => n,
        None => needed,
    };
    if n > u32::MAX as usize {
        return Err(Error::Rejected(format!("{n} nodes exceeds the u32 id space")));
    }
    let mut self_loops = 0;
    let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(edges.len());
    for &(u, v) in edges {
        if u == v {
            if policy == DedupPolicy::Strict {
                return Err(Error::Rejected(format!("self-loop at node {u}")));
            }
            self_loops += 1;
            continue;
        }
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        pairs.push((a as u32, b as u32));
    }
    pairs.sort_unstable();
    let before = pairs.len();
    pairs.dedup();
    let duplicates = before - pairs.len();
    if duplicates > 0 && policy == DedupPolicy::Strict {
        return Err(Error::Rejected(format!("{duplicates} duplicate edge(s)")));
    }
    Ok(BuildOutcome {
        graph: Graph::from_unique_pairs(n, &pairs),
        self_loops,
        duplicates,
    })
}

/// Collapse a multigraph to its simple image: drop loops, merge parallel edges.
pub fn simplify(draft: &MultiGraphDraft) -> Graph {
    let mut pairs: Vec<(u32, u32)> = draft
        .edges
        .iter()
        .filter(|(u, v)| u != v)
        .map(|&(u, v)| if u < v { (u, v) } else { (v, u) })
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    Graph::from_unique_pairs(draft.n, &pairs)
}

/// Build from unique unordered pairs produced by the generators.
pub(crate) fn from_generated_pairs(n: usize, mut pairs: Vec<(u32, u32)>) -> Graph {
    for p in pairs.iter_mut() {
        if p.0 > p.1 {
            *p = (p.1, p.0);
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    Graph::from_unique_pairs(n, &pairs)
}

/// Deterministic first-seen map from arbitrary string ids to dense integers.
#[derive(Debug, Clone, Default)]
pub struct SymbolTable {
    names: Vec<String>,
    index: std::collections::HashMap<String, u32>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), id);
        id
    }

    pub fn get(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: u32) -> &str {
        &self.names[id as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn into_names(self) -> Vec<String> {
        self.names
    }
}

/// Standard small graphs used across tests and examples.
pub mod families {
    use super::*;

    pub fn complete(n: usize) -> Graph {
        let pairs: Vec<(u32, u32)> = (0..n as u32)
            .flat_map(|u| (u + 1..n as u32).map(move |v| (u, v)))
            .collect();
        Graph::from_unique_pairs(n, &pairs)
    }

    pub fn path(n: usize) -> Graph {
        let pairs: Vec<(u32, u32)> = (1..n as u32).map(|v| (v - 1, v)).collect();
        Graph::from_unique_pairs(n, &pairs)
    }

    /// Star with hub 0 and `n - 1` leaves.
    pub fn star(n: usize) -> Graph {
        let pairs: Vec<(u32, u32)> = (1..n as u32).map(|v| (0, v)).collect();
        Graph::from_unique_pairs(n, &pairs)
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Graph {
        let pairs: Vec<(u32, u32)> = (0..a as u32)
            .flat_map(|u| (a as u32..(a + b) as u32).map(move |v| (u, v)))
            .collect();
        Graph::from_unique_pairs(a + b, &pairs)
    }
}
