//! Text formats: edge lists, label files, series manifests, sponsorship
//! CSV and the series statistics table.
//!
//! Edge list: one edge per line as two whitespace-separated tokens; lines
//! starting with `#` are comments; a `%n=<count>` line forces the node
//! count. When every token is a non-negative integer the tokens are used
//! as node ids directly, otherwise ids are assigned in first-seen order.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use crate::dynamics::{SeriesRow, Snapshot, SnapshotSeries, SponsorshipRecord};
use crate::error::{Error, Result};
use crate::graph::{build_graph, DedupPolicy, Graph, NodeLabeling, SymbolTable};

/// A parsed edge list.
#[derive(Debug, Clone)]
pub struct EdgeListFile {
    pub graph: Graph,
    /// Original token of each node when ids were symbolic; `None` for
    /// numeric files, where node `v` is written as `v`.
    pub names: Option<Vec<String>>,
    pub self_loops: usize,
    pub duplicates: usize,
}

impl EdgeListFile {
    /// Resolve a token from the file to a node id.
    pub fn resolve(&self, token: &str) -> Option<usize> {
        match &self.names {
            Some(names) => names.iter().position(|n| n == token),
            None => token.parse::<usize>().ok().filter(|&v| v < self.graph.n()),
        }
    }

    pub fn name_of(&self, v: usize) -> String {
        match &self.names {
            Some(names) => names[v].clone(),
            None => v.to_string(),
        }
    }
}

fn parse_directive(line: &str, lineno: usize) -> Result<Option<usize>> {
    let Some(rest) = line.strip_prefix('%') else {
        return Ok(None);
    };
    let value = rest.trim().strip_prefix("n=").ok_or_else(|| Error::Parse {
        line: lineno,
        msg: format!("unknown directive {line:?}"),
    })?;
    value.trim().parse::<usize>().map(Some).map_err(|_| Error::Parse {
        line: lineno,
        msg: format!("bad node count in {line:?}"),
    })
}

pub fn parse_edge_list<R: Read>(reader: R, policy: DedupPolicy) -> Result<EdgeListFile> {
    let mut forced_n = None;
    let mut raw: Vec<(String, String)> = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(n) = parse_directive(line, lineno)? {
            forced_n = Some(n);
            continue;
        }
        let mut tokens = line.split_whitespace();
        match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(a), Some(b), None) => raw.push((a.to_owned(), b.to_owned())),
            _ => {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected two tokens, got {line:?}"),
                })
            }
        }
    }
    let numeric = raw
        .iter()
        .all(|(a, b)| a.parse::<u32>().is_ok() && b.parse::<u32>().is_ok());
    let (edges, names) = if numeric {
        let edges: Vec<(usize, usize)> = raw
            .iter()
            .map(|(a, b)| (a.parse::<usize>().unwrap(), b.parse::<usize>().unwrap()))
            .collect();
        (edges, None)
    } else {
        let mut table = SymbolTable::new();
        let edges: Vec<(usize, usize)> = raw
            .iter()
            .map(|(a, b)| (table.intern(a) as usize, table.intern(b) as usize))
            .collect();
        (edges, Some(table.into_names()))
    };
    let n = match (&names, forced_n) {
        (Some(names), Some(n)) if n < names.len() => return Err(Error::NodeCountTooSmall { n, needed: names.len() }),
        (Some(names), None) => Some(names.len()),
        (_, forced) => forced,
    };
    let out = build_graph(&edges, n, policy)?;
    let names = names.map(|mut v| {
        // extra nodes forced by %n get synthetic names
        let have = v.len();
        v.extend((have..out.graph.n()).map(|i| format!("_isolated{i}")));
        v
    });
    Ok(EdgeListFile {
        graph: out.graph,
        names,
        self_loops: out.self_loops,
        duplicates: out.duplicates,
    })
}

pub fn read_edge_list(path: &Path) -> Result<EdgeListFile> {
    let f = File::open(path).map_err(|e| with_path(e, path))?;
    parse_edge_list(f, DedupPolicy::Merge)
}

fn with_path(e: std::io::Error, path: &Path) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

/// Write `g` as a numeric edge list with a `%n` directive.
pub fn write_edge_list<W: Write>(g: &Graph, mut w: W) -> Result<()> {
    writeln!(w, "# nodes {} edges {}", g.n(), g.edge_count())?;
    writeln!(w, "%n={}", g.n())?;
    for (u, v) in g.edges() {
        writeln!(w, "{u} {v}")?;
    }
    Ok(())
}

/// Read `node label` lines. Node tokens are resolved against `file`;
/// label tokens get dense ids in first-seen order.
pub fn read_labels(path: &Path, file: &EdgeListFile) -> Result<NodeLabeling> {
    let f = File::open(path).map_err(|e| with_path(e, path))?;
    parse_labels(f, file)
}

pub fn parse_labels<R: Read>(reader: R, file: &EdgeListFile) -> Result<NodeLabeling> {
    let n = file.graph.n();
    let mut labels: Vec<Option<u32>> = vec![None; n];
    let mut table = SymbolTable::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let (Some(node), Some(label), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected `node label`, got {line:?}"),
            });
        };
        let v = file.resolve(node).ok_or_else(|| Error::Parse {
            line: lineno,
            msg: format!("unknown node {node:?}"),
        })?;
        labels[v] = Some(table.intern(label));
    }
    let missing = labels.iter().filter(|l| l.is_none()).count();
    if missing > 0 {
        return Err(Error::LabelMismatch { got: n - missing, n });
    }
    NodeLabeling::with_k(labels.into_iter().map(Option::unwrap).collect(), table.len())
}

/// Write labels as `node label` lines using the dense label ids.
pub fn write_labels<W: Write>(labels: &NodeLabeling, mut w: W) -> Result<()> {
    for (v, l) in labels.labels().iter().enumerate() {
        writeln!(w, "{v} {l}")?;
    }
    Ok(())
}

/// One manifest entry: `tag, edgelist-path[, labels-path]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub tag: String,
    pub edges: PathBuf,
    pub labels: Option<PathBuf>,
}

/// Parse a manifest; relative paths are resolved against `base`.
pub fn parse_manifest<R: Read>(reader: R, base: &Path) -> Result<Vec<ManifestEntry>> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if !(2..=3).contains(&fields.len()) || fields.iter().any(|f| f.is_empty()) {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("expected `tag, edges[, labels]`, got {line:?}"),
            });
        }
        out.push(ManifestEntry {
            tag: fields[0].to_owned(),
            edges: base.join(fields[1]),
            labels: fields.get(2).map(|p| base.join(p)),
        });
    }
    Ok(out)
}

/// Load every snapshot listed in a manifest file.
pub fn read_series(manifest: &Path) -> Result<SnapshotSeries> {
    let f = File::open(manifest).map_err(|e| with_path(e, manifest))?;
    let base = manifest.parent().unwrap_or_else(|| Path::new("."));
    let mut snapshots = Vec::new();
    for entry in parse_manifest(f, base)? {
        let file = read_edge_list(&entry.edges)?;
        let labels = entry.labels.as_deref().map(|p| read_labels(p, &file)).transpose()?;
        snapshots.push(Snapshot {
            tag: entry.tag,
            graph: file.graph,
            labels,
        });
    }
    SnapshotSeries::new(snapshots)
}

/// Sponsorship CSV with header `sponsor,bill,cosponsor`, one row per
/// (bill, cosponsor). An empty cosponsor field records a bill without
/// cosponsors.
pub fn parse_sponsorship_csv<R: Read>(reader: R) -> Result<Vec<SponsorshipRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| Error::Parse {
            line: 1,
            msg: format!("missing column {name:?}"),
        })
    };
    let (cs, cb, cc) = (col("sponsor")?, col("bill")?, col("cosponsor")?);
    let mut bills: BTreeMap<(String, String), SponsorshipRecord> = BTreeMap::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let get = |c: usize| row.get(c).unwrap_or("").to_owned();
        let (sponsor, bill, cos) = (get(cs), get(cb), get(cc));
        if sponsor.is_empty() || bill.is_empty() {
            return Err(Error::Parse {
                line: i + 2,
                msg: "empty sponsor or bill".into(),
            });
        }
        let rec = bills
            .entry((sponsor.clone(), bill.clone()))
            .or_insert_with(|| SponsorshipRecord {
                sponsor: sponsor.clone(),
                bill,
                cosponsors: Default::default(),
            });
        if !cos.is_empty() && cos != sponsor {
            rec.cosponsors.insert(cos);
        }
    }
    Ok(bills.into_values().collect())
}

pub fn read_sponsorship_csv(path: &Path) -> Result<Vec<SponsorshipRecord>> {
    let f = File::open(path).map_err(|e| with_path(e, path))?;
    parse_sponsorship_csv(f)
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:?}")).unwrap_or_default()
}

/// Series table as CSV; undefined values are empty fields.
pub fn write_series_csv<W: Write>(rows: &[SeriesRow], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["tag", "n", "edges", "rho_hat", "cc_hat", "true_in_out_ratio"])?;
    for r in rows {
        wtr.write_record([
            r.tag.clone(),
            r.n.to_string(),
            r.edges.to_string(),
            fmt_opt(r.rho_hat),
            fmt_opt(r.cc_hat),
            fmt_opt(r.true_in_out_ratio),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_series_csv<R: Read>(reader: R) -> Result<Vec<SeriesRow>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let bad = |msg: &str| Error::Parse {
            line: i + 2,
            msg: msg.to_owned(),
        };
        if rec.len() != 6 {
            return Err(bad("expected 6 columns"));
        }
        let opt = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| bad("bad number"))
            }
        };
        rows.push(SeriesRow {
            tag: rec[0].to_owned(),
            n: rec[1].parse().map_err(|_| bad("bad n"))?,
            edges: rec[2].parse().map_err(|_| bad("bad edge count"))?,
            rho_hat: opt(&rec[3])?,
            cc_hat: opt(&rec[4])?,
            true_in_out_ratio: opt(&rec[5])?,
        });
    }
    Ok(rows)
}
