//! Asymptotic inference for `ρ̂`: normal-approximation confidence
//! intervals, the two-sample in-out-ratio test, and Monte Carlo
//! size/power harnesses.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::generators::{gen_dcbm, DcbmParams};
use crate::graph::Graph;
use crate::stats::{graph_stats, GraphStats};

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Standard normal CDF.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

// Acklam's rational approximation coefficients.
const A: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_69e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239,
];
const B: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const C: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838,
    -2.549_732_539_343_734,
    4.374_664_141_464_968,
    2.938_163_982_698_783,
];
const D: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996,
    3.754_408_661_907_416,
];

fn acklam_lower(u: f64) -> f64 {
    const P_LOW: f64 = 0.02425;
    if u < P_LOW {
        let q = (-2.0 * u.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = u - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// Inverse standard normal CDF for `u` in `(0, 1)`.
///
/// Rational approximation followed by one Newton step against an
/// `erfc`-based CDF. The upper half is mapped onto the lower half so the
/// result is exactly antisymmetric.
pub fn inv_norm_cdf(u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain {
            what: "u",
            value: u,
            range: "(0, 1)",
        });
    }
    if u > 0.5 {
        return Ok(-lower_quantile(1.0 - u));
    }
    Ok(lower_quantile(u))
}

fn lower_quantile(u: f64) -> f64 {
    if u == 0.5 {
        return 0.0;
    }
    let x = acklam_lower(u);
    let err = norm_cdf(x) - u;
    x - err * SQRT_2PI * (0.5 * x * x).exp()
}

/// Plug-in normal interval for `ρ̂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoEstimate {
    pub rho_hat: f64,
    pub n: usize,
    pub t_hat: f64,
    pub triangles: u64,
    /// `ρ̂ / √(C(n,3)·T̂)`, which equals `ρ̂ / √Δ`.
    pub std_err: f64,
    pub alpha: f64,
    pub z: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain {
            what: "alpha",
            value: alpha,
            range: "(0, 1]",
        });
    }
    Ok(())
}

/// Two-sided standard normal critical value `Φ⁻¹(1 − α/2)`.
pub fn critical_value(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if alpha == 1.0 {
        return Ok(0.0);
    }
    inv_norm_cdf(1.0 - alpha / 2.0)
}

pub fn rho_estimate_from_stats(s: &GraphStats, alpha: f64) -> Result<RhoEstimate> {
    let z = critical_value(alpha)?;
    let rho_hat = s
        .rho_hat
        .ok_or_else(|| Error::DegenerateStatistic("no wedges, rho undefined".into()))?;
    if s.triangles == 0 {
        return Err(Error::DegenerateStatistic(
            "no triangles, standard error undefined".into(),
        ));
    }
    let std_err = rho_hat / (s.triangles as f64).sqrt();
    Ok(RhoEstimate {
        rho_hat,
        n: s.n,
        t_hat: s.t_hat,
        triangles: s.triangles,
        std_err,
        alpha,
        z,
        ci_low: (rho_hat - z * std_err).max(0.0),
        ci_high: rho_hat + z * std_err,
    })
}

/// Interval `ρ̂·(1 ± z/√(C(n,3)·T̂))`, clipped below at 0.
pub fn rho_confidence_interval(g: &Graph, alpha: f64) -> Result<RhoEstimate> {
    let s = graph_stats(g)?;
    rho_estimate_from_stats(&s, alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub rho1_hat: f64,
    pub rho2_hat: f64,
    pub d1: f64,
    pub d2: f64,
    pub k: usize,
    pub alpha: f64,
    /// `Φ⁻¹(1−α/2)·K·√6·√(1/d₁³ + 1/d₂³)`.
    pub threshold: f64,
    /// `|ρ̂₁ − ρ̂₂|`.
    pub statistic: f64,
    pub reject: bool,
    /// Plug-in standard errors `ρ̂ᵢ/√Δᵢ`, `None` for triangle-free graphs.
    pub plugin_se1: Option<f64>,
    pub plugin_se2: Option<f64>,
    /// `|ρ̂₁ − ρ̂₂| / √(se₁² + se₂²)` when both standard errors exist.
    pub plugin_z: Option<f64>,
}

/// Rejection threshold of the two-sample test.
pub fn test_threshold(alpha: f64, k: usize, d1: f64, d2: f64) -> Result<f64> {
    let z = critical_value(alpha)?;
    Ok(z * k as f64 * 6f64.sqrt() * (1.0 / (d1 * d1 * d1) + 1.0 / (d2 * d2 * d2)).sqrt())
}

/// The test from already computed statistics.
pub fn two_sample_from_stats(s1: &GraphStats, s2: &GraphStats, k: usize, alpha: f64) -> Result<TestResult> {
    if k < 2 {
        return Err(Error::Domain {
            what: "k",
            value: k as f64,
            range: "k >= 2",
        });
    }
    let rho = |s: &GraphStats, which: &str| {
        s.rho_hat
            .ok_or_else(|| Error::DegenerateStatistic(format!("rho undefined for graph {which}")))
    };
    let (rho1_hat, rho2_hat) = (rho(s1, "1")?, rho(s2, "2")?);
    let (d1, d2) = (2.0 * s1.edges as f64 / s1.n as f64, 2.0 * s2.edges as f64 / s2.n as f64);
    if !(d1 > 0.0 && d2 > 0.0) {
        return Err(Error::DegenerateStatistic("zero average degree".into()));
    }
    let threshold = test_threshold(alpha, k, d1, d2)?;
    let statistic = (rho1_hat - rho2_hat).abs();
    let se = |s: &GraphStats, r: f64| (s.triangles > 0).then(|| r / (s.triangles as f64).sqrt());
    let (plugin_se1, plugin_se2) = (se(s1, rho1_hat), se(s2, rho2_hat));
    let plugin_z = match (plugin_se1, plugin_se2) {
        (Some(a), Some(b)) => Some(statistic / (a * a + b * b).sqrt()),
        _ => None,
    };
    Ok(TestResult {
        rho1_hat,
        rho2_hat,
        d1,
        d2,
        k,
        alpha,
        threshold,
        statistic,
        reject: statistic > threshold,
        plugin_se1,
        plugin_se2,
        plugin_z,
    })
}

/// Test `H₀: r₁ = r₂` for two networks using `K` as the upper bound on `ρ`.
pub fn two_sample_test(g1: &Graph, g2: &Graph, k: usize, alpha: f64) -> Result<TestResult> {
    two_sample_from_stats(&graph_stats(g1)?, &graph_stats(g2)?, k, alpha)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerReport {
    pub reps: usize,
    pub rejections: usize,
    /// Replicates where a statistic was undefined; counted as non-rejections.
    pub degenerate: usize,
    pub power: f64,
    pub master_seed: u64,
}

/// Fraction of replicates in which [`two_sample_test`] rejects for
/// independent draws from `first` and `second`.
///
/// Replicate `i` uses seeds derived from `(master_seed, 2i)` and
/// `(master_seed, 2i+1)`; the `seed` fields of the inputs are ignored.
pub fn power_experiment(
    first: &DcbmParams,
    second: &DcbmParams,
    k: usize,
    alpha: f64,
    reps: usize,
    master_seed: u64,
) -> Result<PowerReport> {
    first.validate()?;
    second.validate()?;
    check_alpha(alpha)?;
    power_experiment_with(reps, master_seed, k, alpha, |seed, which| {
        let base = if which == 0 { first } else { second };
        Ok(base.with_seed(seed))
    })
}

/// Power harness over arbitrary per-replicate parameter factories.
/// `make(seed, which)` builds the parameters of network `which ∈ {0, 1}`.
pub fn power_experiment_with<F>(reps: usize, master_seed: u64, k: usize, alpha: f64, make: F) -> Result<PowerReport>
where
    F: Fn(u64, usize) -> Result<DcbmParams> + Sync + Send,
{
    let outcomes = exec::map_indexed(reps, Exec::default(), |i| -> Result<Option<bool>> {
        let s1 = exec::derive_seed(master_seed, 2 * i as u64);
        let s2 = exec::derive_seed(master_seed, 2 * i as u64 + 1);
        let g1 = gen_dcbm(&make(s1, 0)?)?.graph;
        let g2 = gen_dcbm(&make(s2, 1)?)?.graph;
        match two_sample_test(&g1, &g2, k, alpha) {
            Ok(t) => Ok(Some(t.reject)),
            Err(Error::DegenerateStatistic(_)) | Err(Error::DegenerateGraph { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    });
    let (mut rejections, mut degenerate) = (0, 0);
    for o in outcomes {
        match o? {
            Some(true) => rejections += 1,
            Some(false) => {}
            None => degenerate += 1,
        }
    }
    Ok(PowerReport {
        reps,
        rejections,
        degenerate,
        power: if reps == 0 {
            0.0
        } else {
            rejections as f64 / reps as f64
        },
        master_seed,
    })
}

/// One-sample Kolmogorov–Smirnov test against `N(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsOutcome {
    pub statistic: f64,
    pub p_value: f64,
}

pub fn ks_test_standard_normal(samples: &[f64]) -> KsOutcome {
    let mut x: Vec<f64> = samples.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    let d = x
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = norm_cdf(v);
            (f - i as f64 / n).max((i as f64 + 1.0) / n - f)
        })
        .fold(0.0, f64::max);
    let sqrt_n = n.sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    KsOutcome {
        statistic: d,
        p_value: kolmogorov_survival(lambda),
    }
}

/// `P(K > λ)` for the Kolmogorov distribution.
fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let jf = j as f64;
        let term = (-2.0 * jf * jf * lambda * lambda).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Rank-based AUC: `P(X > Y) + ½·P(X = Y)` for `X` from `positives`
/// and `Y` from `negatives`.
pub fn rank_auc(positives: &[f64], negatives: &[f64]) -> f64 {
    if positives.is_empty() || negatives.is_empty() {
        return f64::NAN;
    }
    let mut neg = negatives.to_vec();
    neg.sort_by(f64::total_cmp);
    let mut score = 0.0;
    for &x in positives {
        let below = neg.partition_point(|&y| y < x);
        let not_above = neg.partition_point(|&y| y <= x);
        score += below as f64 + 0.5 * (not_above - below) as f64;
    }
    score / (positives.len() as f64 * neg.len() as f64)
}
