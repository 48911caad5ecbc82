//! Snapshot series statistics, the label-based in-out-ratio, and the
//! weighted-propensity-to-cosponsor (WPC) network builder.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::graph::{build_graph, DedupPolicy, Graph, NodeLabeling};
use crate::stats::graph_stats;

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub tag: String,
    pub graph: Graph,
    pub labels: Option<NodeLabeling>,
}

/// Snapshots in caller order; tags are opaque and unique.
#[derive(Debug, Clone, Default)]
pub struct SnapshotSeries {
    snapshots: Vec<Snapshot>,
}

impl SnapshotSeries {
    pub fn new(snapshots: Vec<Snapshot>) -> Result<Self> {
        let mut seen = HashSet::new();
        for s in &snapshots {
            if !seen.insert(s.tag.as_str()) {
                return Err(Error::DuplicateTag(s.tag.clone()));
            }
            if let Some(l) = &s.labels {
                if l.len() != s.graph.n() {
                    return Err(Error::LabelMismatch {
                        got: l.len(),
                        n: s.graph.n(),
                    });
                }
            }
        }
        Ok(SnapshotSeries { snapshots })
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub tag: String,
    pub n: usize,
    pub edges: u64,
    pub rho_hat: Option<f64>,
    pub cc_hat: Option<f64>,
    pub true_in_out_ratio: Option<f64>,
}

/// One row per snapshot; statistics that are undefined come out as `None`.
pub fn series_stats(series: &SnapshotSeries) -> Vec<SeriesRow> {
    exec::map_indexed(series.len(), Exec::default(), |i| {
        let s = &series.snapshots[i];
        let stats = graph_stats(&s.graph).ok();
        SeriesRow {
            tag: s.tag.clone(),
            n: s.graph.n(),
            edges: s.graph.edge_count() as u64,
            rho_hat: stats.and_then(|st| st.rho_hat),
            cc_hat: stats.and_then(|st| st.cc_hat),
            true_in_out_ratio: s
                .labels
                .as_ref()
                .and_then(|l| true_in_out_ratio(&s.graph, l).ok().flatten()),
        }
    })
}

/// Within-label edge count over between-label edge count; `None` when no
/// edge crosses labels.
pub fn true_in_out_ratio(g: &Graph, labels: &NodeLabeling) -> Result<Option<f64>> {
    if labels.len() != g.n() {
        return Err(Error::LabelMismatch {
            got: labels.len(),
            n: g.n(),
        });
    }
    let (mut within, mut between) = (0u64, 0u64);
    for (u, v) in g.edges() {
        if labels.label(u as usize) == labels.label(v as usize) {
            within += 1;
        } else {
            between += 1;
        }
    }
    Ok((between > 0).then(|| within as f64 / between as f64))
}

/// One bill: its sponsor and the set of cosponsors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SponsorshipRecord {
    pub sponsor: String,
    pub bill: String,
    pub cosponsors: BTreeSet<String>,
}

/// How the two directed WPC scores of a pair become one undirected edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetrize {
    /// Edge when either direction reaches the threshold.
    #[default]
    Or,
    /// Edge when both directions reach the threshold.
    And,
}

pub const DEFAULT_WPC_THRESHOLD: f64 = 0.1;

/// Directed WPC scores keyed by `(cosponsor i, sponsor j)`:
///
/// `WPC_ij = Σ_k (Y_ij(k) / c_j(k)) / Σ_k (1 / c_j(k))`
///
/// over sponsor `j`'s bills `k` with at least one cosponsor. Pairs with a
/// zero score are omitted. Bills are folded in sorted order, so the result
/// does not depend on record order.
pub fn wpc_scores(records: &[SponsorshipRecord]) -> BTreeMap<(String, String), f64> {
    // sponsor -> bill -> cosponsors (merging rows of the same bill)
    let mut bills: BTreeMap<&str, BTreeMap<&str, BTreeSet<&str>>> = BTreeMap::new();
    for r in records {
        let entry = bills.entry(&r.sponsor).or_default().entry(&r.bill).or_default();
        entry.extend(r.cosponsors.iter().map(String::as_str).filter(|c| *c != r.sponsor));
    }
    let mut out = BTreeMap::new();
    for (sponsor, sponsored) in &bills {
        let mut denom = 0.0;
        let mut num: BTreeMap<&str, f64> = BTreeMap::new();
        for cos in sponsored.values() {
            if cos.is_empty() {
                continue;
            }
            let w = 1.0 / cos.len() as f64;
            denom += w;
            for c in cos {
                *num.entry(c).or_default() += w;
            }
        }
        if denom == 0.0 {
            continue;
        }
        for (c, v) in num {
            out.insert((c.to_owned(), (*sponsor).to_owned()), v / denom);
        }
    }
    out
}

/// WPC network plus the id of each node.
#[derive(Debug, Clone)]
pub struct WpcNetwork {
    pub graph: Graph,
    /// Node names, sorted; node `v` is `names[v]`.
    pub names: Vec<String>,
}

/// Threshold WPC scores into an unweighted undirected graph. Nodes are
/// every id that appears in any record, numbered in sorted order.
pub fn build_wpc_network(records: &[SponsorshipRecord], threshold: f64, rule: Symmetrize) -> Result<WpcNetwork> {
    if records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::Domain {
            what: "threshold",
            value: threshold,
            range: "(0, 1]",
        });
    }
    let mut ids: BTreeSet<&str> = BTreeSet::new();
    for r in records {
        ids.insert(&r.sponsor);
        ids.extend(r.cosponsors.iter().map(String::as_str));
    }
    let names: Vec<String> = ids.iter().map(|s| (*s).to_owned()).collect();
    let index: BTreeMap<&str, usize> = ids.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let scores = wpc_scores(records);
    let score = |a: &str, b: &str| scores.get(&(a.to_owned(), b.to_owned())).copied().unwrap_or(0.0);
    let mut edges = Vec::new();
    for (i, j) in scores.keys() {
        let (a, b) = (index[i.as_str()], index[j.as_str()]);
        if a == b {
            continue;
        }
        let (s_ij, s_ji) = (score(i, j), score(j, i));
        let keep = match rule {
            Symmetrize::Or => s_ij >= threshold || s_ji >= threshold,
            Symmetrize::And => s_ij >= threshold && s_ji >= threshold,
        };
        if keep {
            edges.push((a, b));
        }
    }
    let graph = build_graph(&edges, Some(names.len()), DedupPolicy::Merge)?.graph;
    Ok(WpcNetwork { graph, names })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families::*;

    fn rec(sponsor: &str, bill: &str, cos: &[&str]) -> SponsorshipRecord {
        SponsorshipRecord {
            sponsor: sponsor.into(),
            bill: bill.into(),
            cosponsors: cos.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn ratio_examples() {
        let k3 = complete(3);
        assert_eq!(true_in_out_ratio(&k3, &NodeLabeling::new(vec![0, 0, 0])).unwrap(), None);
        let k22 = complete_bipartite(2, 2);
        assert_eq!(
            true_in_out_ratio(&k22, &NodeLabeling::new(vec![0, 0, 1, 1])).unwrap(),
            Some(0.0)
        );
        let k4 = complete(4);
        assert_eq!(
            true_in_out_ratio(&k4, &NodeLabeling::new(vec![0, 0, 1, 1])).unwrap(),
            Some(0.5)
        );
        assert!(true_in_out_ratio(&k4, &NodeLabeling::new(vec![0, 1])).is_err());
    }

    #[test]
    fn series_rows() {
        let snap = |tag: &str| Snapshot {
            tag: tag.into(),
            graph: complete(3),
            labels: Some(NodeLabeling::new(vec![0, 0, 0])),
        };
        let series = SnapshotSeries::new(vec![snap("93"), snap("94")]).unwrap();
        let rows = series_stats(&series);
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].rho_hat, Some(1.0));
        assert_eq!(rows[0].true_in_out_ratio, None);
        assert_eq!(rows[0].rho_hat, rows[1].rho_hat);
        assert_eq!(rows[0].cc_hat, rows[1].cc_hat);
        assert!(SnapshotSeries::new(vec![snap("93"), snap("93")]).is_err());
    }

    #[test]
    fn wpc_hand_example() {
        let records = vec![rec("j", "b1", &["i", "x"]), rec("j", "b2", &["x"])];
        let s = wpc_scores(&records);
        assert!((s[&("i".to_string(), "j".to_string())] - 1.0 / 3.0).abs() < 1e-15);
        assert!((s[&("x".to_string(), "j".to_string())] - 1.0).abs() < 1e-15);
        let net = build_wpc_network(&records, 0.1, Symmetrize::Or).unwrap();
        assert_eq!(net.names, vec!["i", "j", "x"]);
        assert!(net.graph.has_edge(0, 1));
        assert!(net.graph.has_edge(1, 2));
        assert!(!net.graph.has_edge(0, 2));
        // i never cosponsors x (x sponsors nothing): no edge
        let and = build_wpc_network(&records, 0.1, Symmetrize::And).unwrap();
        assert_eq!(and.graph.edge_count(), 0);
    }

    #[test]
    fn wpc_full_and_zero() {
        let records = vec![rec("j", "b1", &["i"]), rec("j", "b2", &["i", "y"])];
        let s = wpc_scores(&records);
        assert_eq!(s[&("i".to_string(), "j".to_string())], 1.0);
        assert!(!s.contains_key(&("j".to_string(), "i".to_string())));
    }

    #[test]
    fn wpc_skips_cosponsorless_bills_and_errors() {
        let records = vec![rec("j", "b1", &[]), rec("j", "b2", &["i"])];
        assert_eq!(wpc_scores(&records)[&("i".to_string(), "j".to_string())], 1.0);
        assert!(matches!(
            build_wpc_network(&[], 0.1, Symmetrize::Or),
            Err(Error::EmptyRecords)
        ));
        assert!(build_wpc_network(&records, 0.0, Symmetrize::Or).is_err());
        let only_empty = vec![rec("j", "b1", &[])];
        let net = build_wpc_network(&only_empty, 0.1, Symmetrize::Or).unwrap();
        assert_eq!((net.graph.n(), net.graph.edge_count()), (1, 0));
    }

    #[test]
    fn wpc_order_invariant() {
        let records = vec![
            rec("a", "1", &["b", "c"]),
            rec("a", "2", &["c"]),
            rec("b", "3", &["a", "c", "d"]),
            rec("c", "4", &["d"]),
            rec("d", "5", &["a"]),
            rec("a", "6", &["d", "b", "c"]),
        ];
        let mut rev = records.clone();
        rev.reverse();
        let a = build_wpc_network(&records, 0.3, Symmetrize::Or).unwrap();
        let b = build_wpc_network(&rev, 0.3, Symmetrize::Or).unwrap();
        assert_eq!(a.graph, b.graph);
        assert_eq!(wpc_scores(&records), wpc_scores(&rev));
    }
}
