//! Sub-network sampling and a `ρ̂`-fidelity evaluator.
//!
//! All samplers return the subgraph induced by the chosen node set, with
//! `round(f·n)` nodes (edge sampling may stop one short).

use rand::seq::index;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Exec, Rng};
use crate::graph::{Graph, Subgraph};
use crate::stats::graph_stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SampleMethod {
    /// Random node sampling.
    Ns,
    /// Random edge sampling.
    Es,
    /// Random walk.
    Rws,
    /// Random walk with fly-back to the start node.
    Rwfs,
    /// Random walk with uniform jumps.
    Rwjs,
    /// Forest fire.
    Ff,
    /// Snowball.
    Ss,
}

impl SampleMethod {
    pub const ALL: [SampleMethod; 7] = [
        SampleMethod::Ns,
        SampleMethod::Es,
        SampleMethod::Rws,
        SampleMethod::Rwfs,
        SampleMethod::Rwjs,
        SampleMethod::Ff,
        SampleMethod::Ss,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SampleMethod::Ns => "NS",
            SampleMethod::Es => "ES",
            SampleMethod::Rws => "RWS",
            SampleMethod::Rwfs => "RWFS",
            SampleMethod::Rwjs => "RWJS",
            SampleMethod::Ff => "FF",
            SampleMethod::Ss => "SS",
        }
    }
}

impl std::str::FromStr for SampleMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SampleMethod::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidSpec(format!("unknown sampling method {s:?}")))
    }
}

impl std::fmt::Display for SampleMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub method: SampleMethod,
    pub fraction: f64,
    /// Per-step return probability for RWFS.
    pub flyback_p: f64,
    /// Per-step teleport probability for RWJS.
    pub jump_p: f64,
    /// Forest-fire forward burning probability.
    pub forward_p: f64,
    /// Walk steps without a new node before restarting; `None` means `100·s`.
    pub max_stall_steps: Option<usize>,
    pub seed: u64,
}

impl SampleSpec {
    pub fn new(method: SampleMethod, fraction: f64, seed: u64) -> Self {
        SampleSpec {
            method,
            fraction,
            flyback_p: 0.15,
            jump_p: 0.15,
            forward_p: 0.7,
            max_stall_steps: None,
            seed,
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        SampleSpec { seed, ..self }
    }

    /// Target node count `round(f·n)`.
    pub fn target_size(&self, n: usize) -> Result<usize> {
        if !(self.fraction > 0.0 && self.fraction <= 1.0) {
            return Err(Error::InvalidSpec(format!("fraction {} not in (0, 1]", self.fraction)));
        }
        for (name, p) in [
            ("flyback_p", self.flyback_p),
            ("jump_p", self.jump_p),
            ("forward_p", self.forward_p),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidSpec(format!("{name} = {p} not in [0, 1]")));
            }
        }
        if self.forward_p >= 1.0 {
            return Err(Error::InvalidSpec("forward_p must be < 1".into()));
        }
        let s = (self.fraction * n as f64).round() as usize;
        if s == 0 {
            return Err(Error::InvalidSpec(format!(
                "fraction {} of {n} nodes rounds to 0",
                self.fraction
            )));
        }
        if s > n {
            return Err(Error::InvalidSpec(format!("target {s} exceeds {n} nodes")));
        }
        Ok(s)
    }
}

/// Nodes not yet taken, with O(1) removal and uniform choice.
struct NodePool {
    items: Vec<u32>,
    pos: Vec<u32>,
}

impl NodePool {
    fn new(n: usize) -> Self {
        NodePool {
            items: (0..n as u32).collect(),
            pos: (0..n as u32).collect(),
        }
    }

    fn remove(&mut self, v: u32) {
        let i = self.pos[v as usize] as usize;
        let last = *self.items.last().unwrap();
        self.items.swap_remove(i);
        if last != v {
            self.pos[last as usize] = i as u32;
        }
        self.pos[v as usize] = u32::MAX;
    }

    fn pick(&self, rng: &mut Rng) -> u32 {
        self.items[rng.random_range(0..self.items.len())]
    }
}

/// Ordered set of chosen nodes.
struct Chosen {
    flag: Vec<bool>,
    order: Vec<u32>,
    pool: NodePool,
}

impl Chosen {
    fn new(n: usize) -> Self {
        Chosen {
            flag: vec![false; n],
            order: Vec::new(),
            pool: NodePool::new(n),
        }
    }

    fn contains(&self, v: u32) -> bool {
        self.flag[v as usize]
    }

    /// Returns true if `v` was new.
    fn insert(&mut self, v: u32) -> bool {
        if self.flag[v as usize] {
            return false;
        }
        self.flag[v as usize] = true;
        self.order.push(v);
        self.pool.remove(v);
        true
    }

    fn len(&self) -> usize {
        self.order.len()
    }

    /// Uniform node not yet chosen.
    fn fresh(&self, rng: &mut Rng) -> u32 {
        self.pool.pick(rng)
    }
}

/// Draw one sub-network.
pub fn sample(g: &Graph, spec: &SampleSpec) -> Result<Subgraph> {
    let nodes = sample_nodes(g, spec)?;
    g.induced_subgraph(&nodes)
}

/// The node set chosen by `spec` (unsorted, in selection order).
pub fn sample_nodes(g: &Graph, spec: &SampleSpec) -> Result<Vec<u32>> {
    let n = g.n();
    if n == 0 {
        return Err(Error::InvalidSpec("cannot sample from an empty graph".into()));
    }
    let s = spec.target_size(n)?;
    let mut rng = exec::rng_from_seed(spec.seed);
    let nodes = match spec.method {
        SampleMethod::Ns => index::sample(&mut rng, n, s).into_iter().map(|v| v as u32).collect(),
        SampleMethod::Es => edge_sample(g, s, &mut rng),
        SampleMethod::Rws => walk_sample(g, s, spec, Teleport::None, &mut rng),
        SampleMethod::Rwfs => walk_sample(g, s, spec, Teleport::FlyBack(spec.flyback_p), &mut rng),
        SampleMethod::Rwjs => walk_sample(g, s, spec, Teleport::Jump(spec.jump_p), &mut rng),
        SampleMethod::Ff => forest_fire(g, s, spec.forward_p, &mut rng),
        SampleMethod::Ss => snowball(g, s, &mut rng),
    };
    Ok(nodes)
}

/// Edges in uniform random order until their endpoints cover `s` nodes.
///
/// An edge that would add two new endpoints when only one slot is left is
/// skipped, so the result can end at `s − 1`. If the edges cannot cover
/// even `s − 1` nodes, the set is topped up to `s` with uniform uncovered
/// nodes.
fn edge_sample(g: &Graph, s: usize, rng: &mut Rng) -> Vec<u32> {
    let mut edges: Vec<(u32, u32)> = g.edges().collect();
    let mut chosen = Chosen::new(g.n());
    let mut remaining = edges.len();
    while chosen.len() < s && remaining > 0 {
        let i = rng.random_range(0..remaining);
        remaining -= 1;
        edges.swap(i, remaining);
        let (u, v) = edges[remaining];
        let new = !chosen.contains(u) as usize + !chosen.contains(v) as usize;
        if chosen.len() + new > s {
            continue;
        }
        chosen.insert(u);
        chosen.insert(v);
    }
    if chosen.len() + 1 < s {
        while chosen.len() < s {
            let v = chosen.fresh(rng);
            chosen.insert(v);
        }
    }
    chosen.order
}

#[derive(Clone, Copy)]
enum Teleport {
    None,
    FlyBack(f64),
    Jump(f64),
}

/// Random walk collecting distinct nodes. A walk that goes
/// `max_stall_steps` moves without a new node, or reaches a node with no
/// neighbors, restarts from a uniform unvisited node.
fn walk_sample(g: &Graph, s: usize, spec: &SampleSpec, teleport: Teleport, rng: &mut Rng) -> Vec<u32> {
    let max_stall = spec.max_stall_steps.unwrap_or(100 * s).max(1);
    let mut chosen = Chosen::new(g.n());
    let mut start = chosen.fresh(rng);
    chosen.insert(start);
    let mut cur = start;
    let mut stall = 0usize;
    while chosen.len() < s {
        let nb = g.neighbors(cur as usize);
        if nb.is_empty() || stall >= max_stall {
            start = chosen.fresh(rng);
            chosen.insert(start);
            cur = start;
            stall = 0;
            continue;
        }
        cur = match teleport {
            Teleport::FlyBack(p) if rng.random::<f64>() < p => start,
            Teleport::Jump(p) if rng.random::<f64>() < p => rng.random_range(0..g.n() as u32),
            _ => nb[rng.random_range(0..nb.len())],
        };
        if chosen.insert(cur) {
            stall = 0;
        } else {
            stall += 1;
        }
    }
    chosen.order
}

/// Geometric number of failures before a success, mean `p / (1 − p)`.
fn geometric_count(rng: &mut Rng, p: f64) -> usize {
    if p <= 0.0 {
        return 0;
    }
    let u: f64 = 1.0 - rng.random::<f64>();
    (u.ln() / p.ln()).floor() as usize
}

/// Forest fire: from each burning node, burn `x ~ Geometric(mean p/(1−p))`
/// unvisited neighbors chosen uniformly, breadth first; reignite at a
/// uniform unvisited node when the fire dies.
fn forest_fire(g: &Graph, s: usize, forward_p: f64, rng: &mut Rng) -> Vec<u32> {
    let mut chosen = Chosen::new(g.n());
    let mut queue = std::collections::VecDeque::new();
    let mut candidates = Vec::new();
    while chosen.len() < s {
        let Some(v) = queue.pop_front() else {
            let seed = chosen.fresh(rng);
            chosen.insert(seed);
            queue.push_back(seed);
            continue;
        };
        let x = geometric_count(rng, forward_p);
        if x == 0 {
            continue;
        }
        candidates.clear();
        candidates.extend(g.neighbors(v as usize).iter().copied().filter(|&w| !chosen.contains(w)));
        let take = x.min(candidates.len());
        // partial Fisher-Yates for a uniform subset
        for i in 0..take {
            let j = rng.random_range(i..candidates.len());
            candidates.swap(i, j);
        }
        for &w in &candidates[..take] {
            if chosen.len() >= s {
                break;
            }
            chosen.insert(w);
            queue.push_back(w);
        }
    }
    chosen.order
}

/// Snowball: breadth-first waves from a uniform seed, taking whole waves
/// while they fit and filling the last one uniformly at random. A new seed
/// starts when a component is exhausted.
fn snowball(g: &Graph, s: usize, rng: &mut Rng) -> Vec<u32> {
    let mut chosen = Chosen::new(g.n());
    let mut wave: Vec<u32> = Vec::new();
    while chosen.len() < s {
        if wave.is_empty() {
            let seed = chosen.fresh(rng);
            chosen.insert(seed);
            wave.push(seed);
            continue;
        }
        let mut next: Vec<u32> = wave
            .iter()
            .flat_map(|&v| g.neighbors(v as usize).iter().copied())
            .filter(|&w| !chosen.contains(w))
            .collect();
        next.sort_unstable();
        next.dedup();
        let room = s - chosen.len();
        if next.len() > room {
            let pick = index::sample(rng, next.len(), room);
            next = pick.into_iter().map(|i| next[i]).collect();
        }
        for &w in &next {
            chosen.insert(w);
        }
        wave = next;
    }
    chosen.order
}

/// Summary of `ρ̂` over repeated samples for one spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: SampleMethod,
    pub fraction: f64,
    pub reps: usize,
    /// Replicates with defined `ρ̂_s`.
    pub defined: usize,
    pub undefined: usize,
    pub mean: Option<f64>,
    /// Sample standard deviation (`n − 1` denominator); 0 for one value.
    pub sd: Option<f64>,
    /// `|mean(ρ̂_s) − ρ̂|`.
    pub abs_bias: Option<f64>,
    /// One entry per replicate, `None` where `ρ̂_s` is undefined.
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleReport {
    pub original_rho: Option<f64>,
    pub master_seed: u64,
    pub methods: Vec<MethodSummary>,
}

/// Seed of replicate `rep` of spec number `spec_index`.
pub fn replicate_seed(master_seed: u64, spec_index: usize, rep: usize) -> u64 {
    exec::derive_seed(exec::derive_seed(master_seed, spec_index as u64), rep as u64)
}

fn rho_of_sample(g: &Graph, spec: &SampleSpec) -> Result<Option<f64>> {
    let sub = sample(g, spec)?;
    match graph_stats(&sub.graph) {
        Ok(s) => Ok(s.rho_hat),
        Err(Error::DegenerateGraph { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Compare each sampler's `ρ̂_s` with the original graph's `ρ̂`.
///
/// The `seed` field of each spec is ignored; replicate seeds come from
/// [`replicate_seed`].
pub fn evaluate_samplers(g: &Graph, specs: &[SampleSpec], reps: usize, master_seed: u64) -> Result<SampleReport> {
    let original_rho = match graph_stats(g) {
        Ok(s) => s.rho_hat,
        Err(Error::DegenerateGraph { .. }) => None,
        Err(e) => return Err(e),
    };
    for spec in specs {
        spec.target_size(g.n())?;
    }
    let jobs = specs.len() * reps;
    let values = exec::map_indexed(jobs, Exec::default(), |job| {
        let (si, rep) = (job / reps.max(1), job % reps.max(1));
        rho_of_sample(g, &specs[si].with_seed(replicate_seed(master_seed, si, rep)))
    });
    let values: Vec<Option<f64>> = values.into_iter().collect::<Result<_>>()?;
    let methods = specs
        .iter()
        .enumerate()
        .map(|(si, spec)| {
            let vals = values[si * reps..(si + 1) * reps].to_vec();
            summarize(spec, vals, original_rho)
        })
        .collect();
    Ok(SampleReport {
        original_rho,
        master_seed,
        methods,
    })
}

fn summarize(spec: &SampleSpec, values: Vec<Option<f64>>, original: Option<f64>) -> MethodSummary {
    let defined: Vec<f64> = values.iter().flatten().copied().collect();
    let k = defined.len();
    let mean = (k > 0).then(|| defined.iter().sum::<f64>() / k as f64);
    let sd = mean.map(|m| {
        if k < 2 {
            0.0
        } else {
            (defined.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (k - 1) as f64).sqrt()
        }
    });
    let abs_bias = match (mean, original) {
        (Some(m), Some(o)) => Some((m - o).abs()),
        _ => None,
    };
    MethodSummary {
        method: spec.method,
        fraction: spec.fraction,
        reps: values.len(),
        defined: k,
        undefined: values.len() - k,
        mean,
        sd,
        abs_bias,
        values,
    }
}
