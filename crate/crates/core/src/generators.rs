//! Seeded random-graph generators: Erdős–Rényi, the degree-corrected block
//! model and the LCD preferential-attachment process.
//!
//! Every generator is a pure function of its parameters, including the
//! seed. Bernoulli pair sampling uses geometric skipping, so the cost is
//! proportional to the number of candidate edges, not to `C(n,2)`.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Rng};
use crate::graph::{self, Graph, MultiGraphDraft, NodeLabeling};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErParams {
    pub n: usize,
    pub p: f64,
    pub seed: u64,
}

/// Number of failures before the next success of a Bernoulli(`c`) stream.
fn geometric_skip(rng: &mut Rng, c: f64) -> u64 {
    if c >= 1.0 {
        return 0;
    }
    // 1 - U lies in (0, 1], keeping ln finite.
    let u: f64 = 1.0 - rng.random::<f64>();
    let s = (u.ln() / (-c).ln_1p()).floor();
    if s >= u64::MAX as f64 {
        u64::MAX
    } else {
        s as u64
    }
}

/// Visit every unordered pair `(i, j)`, `j < i < size`, independently with
/// probability `c`.
fn for_each_pair_in_triangle(rng: &mut Rng, size: usize, c: f64, mut emit: impl FnMut(&mut Rng, usize, usize)) {
    if size < 2 || c <= 0.0 {
        return;
    }
    let (mut v, mut w) = (1u64, -1i64);
    let size = size as u64;
    loop {
        let skip = geometric_skip(rng, c);
        w = w.saturating_add(1).saturating_add(skip.min(i64::MAX as u64 / 2) as i64);
        while w as u64 >= v && v < size {
            w -= v as i64;
            v += 1;
        }
        if v >= size {
            break;
        }
        emit(rng, v as usize, w as usize);
    }
}

/// Visit every cell of an `a × b` grid independently with probability `c`.
fn for_each_pair_in_rect(rng: &mut Rng, a: usize, b: usize, c: f64, mut emit: impl FnMut(&mut Rng, usize, usize)) {
    if a == 0 || b == 0 || c <= 0.0 {
        return;
    }
    let total = a as u64 * b as u64;
    let mut idx: u64 = 0;
    let mut first = true;
    loop {
        let skip = geometric_skip(rng, c);
        let step = if first { skip } else { skip.saturating_add(1) };
        first = false;
        idx = idx.saturating_add(step);
        if idx >= total {
            break;
        }
        emit(rng, (idx / b as u64) as usize, (idx % b as u64) as usize);
    }
}

/// Erdős–Rényi graph: every pair independently with probability `p`.
pub fn gen_er(params: &ErParams) -> Result<Graph> {
    if !(0.0..=1.0).contains(&params.p) {
        return Err(Error::Domain {
            what: "p",
            value: params.p,
            range: "[0, 1]",
        });
    }
    let mut rng = exec::rng_from_seed(params.seed);
    let mut pairs = Vec::new();
    for_each_pair_in_triangle(&mut rng, params.n, params.p, |_, i, j| pairs.push((j as u32, i as u32)));
    Ok(graph::from_generated_pairs(params.n, pairs))
}

/// Distribution of the degree-correction weights `θ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum ThetaLaw {
    /// `θ ≡ 1`.
    Constant,
    /// Finite discrete law.
    TwoPoint { values: Vec<f64>, probs: Vec<f64> },
    /// Pareto law with density `α·x_m^α / x^(α+1)` on `x ≥ x_m`.
    PowerLaw { shape: f64, lower: f64 },
}

/// A θ law plus whether draws are rescaled to unit second moment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaSpec {
    #[serde(flatten)]
    pub law: ThetaLaw,
    #[serde(default)]
    pub normalize_second_moment: bool,
}

impl Default for ThetaSpec {
    fn default() -> Self {
        ThetaSpec::constant()
    }
}

impl ThetaSpec {
    pub fn constant() -> Self {
        ThetaSpec {
            law: ThetaLaw::Constant,
            normalize_second_moment: false,
        }
    }

    /// A discrete law used as given (no second-moment rescaling).
    pub fn two_point(values: Vec<f64>, probs: Vec<f64>) -> Self {
        ThetaSpec {
            law: ThetaLaw::TwoPoint { values, probs },
            normalize_second_moment: false,
        }
    }

    /// Pareto law with lower bound 1, rescaled so that `E[θ²] = 1`.
    pub fn power_law(shape: f64) -> Self {
        ThetaSpec {
            law: ThetaLaw::PowerLaw { shape, lower: 1.0 },
            normalize_second_moment: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.law {
            ThetaLaw::Constant => Ok(()),
            ThetaLaw::TwoPoint { values, probs } => {
                if values.is_empty() || values.len() != probs.len() {
                    return Err(Error::InvalidDistribution(
                        "values and probs must be non-empty and equally long".into(),
                    ));
                }
                if values.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
                    return Err(Error::InvalidDistribution(
                        "theta values must be finite and >= 0".into(),
                    ));
                }
                if probs.iter().any(|&p| !(p >= 0.0)) || (probs.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidDistribution("probs must be >= 0 and sum to 1".into()));
                }
                if self.raw_second_moment() <= 0.0 {
                    return Err(Error::InvalidDistribution("theta law is identically zero".into()));
                }
                Ok(())
            }
            ThetaLaw::PowerLaw { shape, lower } => {
                if !(*shape > 2.0) || !shape.is_finite() {
                    return Err(Error::InvalidDistribution(format!(
                        "power-law shape {shape} must exceed 2 for a finite second moment"
                    )));
                }
                if !(*lower > 0.0) || !lower.is_finite() {
                    return Err(Error::InvalidDistribution("power-law lower bound must be > 0".into()));
                }
                Ok(())
            }
        }
    }

    fn raw_mean(&self) -> f64 {
        match &self.law {
            ThetaLaw::Constant => 1.0,
            ThetaLaw::TwoPoint { values, probs } => values.iter().zip(probs).map(|(v, p)| v * p).sum(),
            ThetaLaw::PowerLaw { shape, lower } => shape * lower / (shape - 1.0),
        }
    }

    fn raw_second_moment(&self) -> f64 {
        match &self.law {
            ThetaLaw::Constant => 1.0,
            ThetaLaw::TwoPoint { values, probs } => values.iter().zip(probs).map(|(v, p)| v * v * p).sum(),
            ThetaLaw::PowerLaw { shape, lower } => shape * lower * lower / (shape - 2.0),
        }
    }

    fn scale(&self) -> f64 {
        if self.normalize_second_moment {
            1.0 / self.raw_second_moment().sqrt()
        } else {
            1.0
        }
    }

    /// `E[θ]` of the law as sampled (after any rescaling).
    pub fn mean(&self) -> f64 {
        self.scale() * self.raw_mean()
    }

    /// `E[θ²]` of the law as sampled.
    pub fn second_moment(&self) -> f64 {
        let s = self.scale();
        s * s * self.raw_second_moment()
    }

    pub fn sample(&self, rng: &mut Rng) -> f64 {
        let raw = match &self.law {
            ThetaLaw::Constant => 1.0,
            ThetaLaw::TwoPoint { values, probs } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut out = *values.last().unwrap();
                for (v, p) in values.iter().zip(probs) {
                    acc += p;
                    if u < acc {
                        out = *v;
                        break;
                    }
                }
                out
            }
            ThetaLaw::PowerLaw { shape, lower } => {
                let u: f64 = 1.0 - rng.random::<f64>();
                lower * u.powf(-1.0 / shape)
            }
        };
        raw * self.scale()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DcbmParams {
    pub n: usize,
    pub k: usize,
    /// Block proportions; uniform `1/k` when constructed with [`DcbmParams::balanced`].
    pub pi: Vec<f64>,
    pub p: f64,
    pub q: f64,
    #[serde(default)]
    pub theta: ThetaSpec,
    pub seed: u64,
}

impl DcbmParams {
    pub fn balanced(n: usize, k: usize, p: f64, q: f64, theta: ThetaSpec, seed: u64) -> Self {
        DcbmParams {
            n,
            k,
            pi: vec![1.0 / k as f64; k],
            p,
            q,
            theta,
            seed,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        DcbmParams { seed, ..self.clone() }
    }

    pub fn r(&self) -> f64 {
        self.p / self.q
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.pi.len() != self.k {
            return Err(Error::InvalidDistribution(format!(
                "pi has {} entries for k = {}",
                self.pi.len(),
                self.k
            )));
        }
        if self.pi.iter().any(|&x| !(x >= 0.0)) || (self.pi.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDistribution("pi must be >= 0 and sum to 1".into()));
        }
        if !(self.q > 0.0 && self.q <= self.p && self.p <= 1.0) {
            return Err(Error::Domain {
                what: "p,q",
                value: self.p,
                range: "0 < q <= p <= 1",
            });
        }
        self.theta.validate()
    }
}

/// One DCBM draw.
#[derive(Debug, Clone, PartialEq)]
pub struct DcbmSample {
    pub graph: Graph,
    pub labels: NodeLabeling,
    pub theta: Vec<f64>,
    /// Node pairs whose `θ_i θ_j B` exceeded 1 and was clamped.
    pub clamped_pairs: u64,
}

fn count_clamped_rect(a: &[f64], sorted_b: &[f64], b: f64) -> u64 {
    a.iter()
        .filter(|&&ta| ta > 0.0)
        .map(|&ta| {
            let limit = 1.0 / (b * ta);
            (sorted_b.len() - sorted_b.partition_point(|&x| x <= limit)) as u64
        })
        .sum()
}

fn count_clamped_tri(sorted: &[f64], b: f64) -> u64 {
    sorted
        .iter()
        .enumerate()
        .filter(|(_, &t)| t > 0.0)
        .map(|(i, &t)| {
            let limit = 1.0 / (b * t);
            let first = sorted.partition_point(|&x| x <= limit).max(i + 1);
            (sorted.len().saturating_sub(first)) as u64
        })
        .sum()
}

/// Draw from the DCBM: `z_i ~ Categorical(π)`, `θ_i ~ Θ`, and
/// `A_ij ~ Bernoulli(min(1, θ_i θ_j B_{z_i z_j}))` with `B = p` on the
/// diagonal and `q` off it.
pub fn gen_dcbm(params: &DcbmParams) -> Result<DcbmSample> {
    params.validate()?;
    let n = params.n;
    let mut rng = exec::rng_from_seed(params.seed);

    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut z = params.k - 1;
        for (b, &pb) in params.pi.iter().enumerate() {
            acc += pb;
            if u < acc {
                z = b;
                break;
            }
        }
        labels.push(z as u32);
    }
    let theta: Vec<f64> = (0..n).map(|_| params.theta.sample(&mut rng)).collect();

    let mut members: Vec<Vec<u32>> = vec![Vec::new(); params.k];
    for (v, &z) in labels.iter().enumerate() {
        members[z as usize].push(v as u32);
    }
    let theta_max: Vec<f64> = members
        .iter()
        .map(|m| m.iter().map(|&v| theta[v as usize]).fold(0.0, f64::max))
        .collect();
    let sorted_theta: Vec<Vec<f64>> = members
        .iter()
        .map(|m| {
            let mut t: Vec<f64> = m.iter().map(|&v| theta[v as usize]).collect();
            t.sort_by(f64::total_cmp);
            t
        })
        .collect();

    let mut pairs: Vec<(u32, u32)> = Vec::new();
    let mut clamped_pairs = 0u64;
    for a in 0..params.k {
        for b in a..params.k {
            let base = if a == b { params.p } else { params.q };
            let bound = (theta_max[a] * theta_max[b] * base).min(1.0);
            if bound <= 0.0 {
                continue;
            }
            let (ma, mb) = (&members[a], &members[b]);
            let mut accept = |rng: &mut Rng, u: u32, v: u32| {
                let prob = (theta[u as usize] * theta[v as usize] * base).min(1.0);
                if prob >= bound || rng.random::<f64>() * bound < prob {
                    pairs.push((u, v));
                }
            };
            if a == b {
                clamped_pairs += count_clamped_tri(&sorted_theta[a], base);
                for_each_pair_in_triangle(&mut rng, ma.len(), bound, |rng, i, j| accept(rng, ma[j], ma[i]));
            } else {
                clamped_pairs += count_clamped_rect(&sorted_theta[a], &sorted_theta[b], base);
                for_each_pair_in_rect(&mut rng, ma.len(), mb.len(), bound, |rng, i, j| {
                    accept(rng, ma[i], mb[j])
                });
            }
        }
    }
    Ok(DcbmSample {
        graph: graph::from_generated_pairs(n, pairs),
        labels: NodeLabeling::with_k(labels, params.k)?,
        theta,
        clamped_pairs,
    })
}

/// Balanced DCBM parameters for a target average degree `lambda` and
/// in-out-ratio `r`: `q = p / r` with
/// `λ = (n−1)·E[θ]²·(p + (K−1)q) / K`.
pub fn dcbm_from_degree(n: usize, k: usize, r: f64, lambda: f64, theta: ThetaSpec, seed: u64) -> Result<DcbmParams> {
    if n < 2 || k == 0 {
        return Err(Error::Domain {
            what: "n",
            value: n as f64,
            range: "n >= 2, k >= 1",
        });
    }
    if !(r >= 1.0) || !r.is_finite() {
        return Err(Error::Domain {
            what: "r",
            value: r,
            range: "r >= 1",
        });
    }
    if !(lambda > 0.0) {
        return Err(Error::Domain {
            what: "lambda",
            value: lambda,
            range: "lambda > 0",
        });
    }
    theta.validate()?;
    let kf = k as f64;
    let mt = theta.mean();
    let p = lambda * kf * r / ((n as f64 - 1.0) * mt * mt * (r + kf - 1.0));
    if p > 1.0 {
        return Err(Error::Infeasible(format!(
            "lambda = {lambda} needs p = {p:.4} > 1 at n = {n}, r = {r}"
        )));
    }
    Ok(DcbmParams::balanced(n, k, p, p / r, theta, seed))
}

/// Average degree, fixed or drawn per network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LambdaSpec {
    Fixed(f64),
    Uniform { lo: f64, hi: f64 },
}

/// A DCBM family specified by average degree rather than `(p, q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeDesign {
    pub n: usize,
    pub k: usize,
    pub r: f64,
    pub lambda: LambdaSpec,
    #[serde(default)]
    pub theta: ThetaSpec,
}

impl DegreeDesign {
    /// Concrete parameters for one network; `seed` drives both the `λ`
    /// draw and the graph.
    pub fn params(&self, seed: u64) -> Result<DcbmParams> {
        let lambda = match self.lambda {
            LambdaSpec::Fixed(l) => l,
            LambdaSpec::Uniform { lo, hi } => {
                let mut rng = exec::rng_from_seed(exec::derive_seed(seed, 0x001A_3BDA));
                lo + (hi - lo) * rng.random::<f64>()
            }
        };
        dcbm_from_degree(self.n, self.k, self.r, lambda, self.theta.clone(), seed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LcdParams {
    pub n: usize,
    pub m: u32,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LcdSample {
    pub draft: MultiGraphDraft,
    pub graph: Graph,
}

/// The LCD process `G_m^(n)`.
///
/// Each of the `m` edges of step `t` first attaches a half-edge to `v_t`
/// and then picks its other end uniformly among all half-edges placed so
/// far, i.e. proportional to running degree, `v_t` included. Step 1 thus
/// yields a single vertex with `m` self-loops.
pub fn gen_lcd(params: &LcdParams) -> Result<LcdSample> {
    if params.m == 0 || params.n == 0 {
        return Err(Error::Domain {
            what: "m,n",
            value: params.m as f64,
            range: "m >= 1, n >= 1",
        });
    }
    let m = params.m as usize;
    let mut rng = exec::rng_from_seed(params.seed);
    let mut half_edges: Vec<u32> = Vec::with_capacity(2 * m * params.n);
    let mut edges = Vec::with_capacity(m * params.n);
    for t in 0..params.n as u32 {
        for _ in 0..m {
            half_edges.push(t);
            let target = half_edges[rng.random_range(0..half_edges.len())];
            half_edges.push(target);
            edges.push((t, target));
        }
    }
    let draft = MultiGraphDraft { n: params.n, edges };
    let graph = graph::simplify(&draft);
    Ok(LcdSample { draft, graph })
}
