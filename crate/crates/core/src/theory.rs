//! Population values of the normalized clustering coefficient under the
//! degree-corrected block model and the LCD preferential-attachment model,
//! their inverses, and a coarse model classifier.

use serde::{Deserialize, Serialize};

use crate::error::{Boundary, Error, Result};

fn check_k(k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::Domain {
            what: "k",
            value: k as f64,
            range: "k >= 2",
        });
    }
    Ok(k as f64)
}

/// Population `ρ` of a `k`-block DCBM with in-out-ratio `r = p/q`:
/// `(K r³ + 3K(K−1) r + K(K−1)(K−2)) / (r + K − 1)³`.
pub fn rho_of_r(r: f64, k: usize) -> Result<f64> {
    let kf = check_k(k)?;
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain {
            what: "r",
            value: r,
            range: "r > 0",
        });
    }
    Ok(rho_of_r_unchecked(r, kf))
}

fn rho_of_r_unchecked(r: f64, k: f64) -> f64 {
    let num = k * r * r * r + 3.0 * k * (k - 1.0) * r + k * (k - 1.0) * (k - 2.0);
    let d = r + k - 1.0;
    num / (d * d * d)
}

/// Derivative `dρ/dr = 3K(K−1)(r−1)² / (r+K−1)⁴`.
pub fn rho_of_r_derivative(r: f64, k: usize) -> Result<f64> {
    let kf = check_k(k)?;
    let d = r + kf - 1.0;
    Ok(3.0 * kf * (kf - 1.0) * (r - 1.0) * (r - 1.0) / (d * d * d * d))
}

/// Invert [`rho_of_r`] on `r ≥ 1` by bisection.
///
/// The bracket starts at `[1, 2]` and the upper end doubles until it
/// encloses the root. Requires `1 < rho < k`.
pub fn r_of_rho(rho: f64, k: usize) -> Result<f64> {
    let kf = check_k(k)?;
    if rho.is_nan() {
        return Err(Error::Domain {
            what: "rho",
            value: rho,
            range: "(1, k)",
        });
    }
    if rho <= 1.0 {
        return Err(Error::OutOfRange {
            rho,
            boundary: Boundary::Lower,
        });
    }
    if rho >= kf {
        return Err(Error::OutOfRange {
            rho,
            boundary: Boundary::Unbounded,
        });
    }
    let f = |r: f64| rho_of_r_unchecked(r, kf) - rho;
    let (mut lo, mut hi) = (1.0f64, 2.0f64);
    while f(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::OutOfRange {
                rho,
                boundary: Boundary::Unbounded,
            });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Closed-form DCBM population quantities for balanced blocks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DcbmClosedForm {
    pub p: f64,
    pub q: f64,
    pub k: usize,
    pub mean_theta: f64,
    pub e_pop: f64,
    pub v_pop: f64,
    pub t_pop: f64,
    pub rho_pop: f64,
    pub cc_pop: f64,
}

impl DcbmClosedForm {
    pub fn r(&self) -> f64 {
        self.p / self.q
    }
}

/// Edge, wedge and triangle probabilities of a balanced DCBM with
/// `E[θ²] = 1`, plus `ρ = T E³ / V³` and `cc = 3T / V`.
pub fn dcbm_population(p: f64, q: f64, k: usize, mean_theta: f64) -> Result<DcbmClosedForm> {
    let kf = check_k(k)?;
    if !(q > 0.0 && q <= p && p <= 1.0) {
        return Err(Error::Domain {
            what: "p,q",
            value: p,
            range: "0 < q <= p <= 1",
        });
    }
    if !(mean_theta > 0.0) {
        return Err(Error::Domain {
            what: "mean_theta",
            value: mean_theta,
            range: "> 0",
        });
    }
    let mt2 = mean_theta * mean_theta;
    let block_mean = p / kf + (kf - 1.0) * q / kf;
    let e_pop = mt2 * block_mean;
    let v_pop = mt2 * block_mean * block_mean;
    let t_pop = (p * p * p + 3.0 * (kf - 1.0) * p * q * q + (kf - 1.0) * (kf - 2.0) * q * q * q) / (kf * kf);
    let rho_pop = t_pop * (e_pop / v_pop).powi(3);
    let cc_pop = 3.0 * t_pop / v_pop;
    Ok(DcbmClosedForm {
        p,
        q,
        k,
        mean_theta,
        e_pop,
        v_pop,
        t_pop,
        rho_pop,
        cc_pop,
    })
}

/// Large-`N` limit of `E[ρ̂]` under the LCD model with `m` edges per step:
/// `3m(m−1) / (4(m+1)²)`.
pub fn lcd_rho_asymptote(m: u32) -> f64 {
    let m = m as f64;
    3.0 * m * (m - 1.0) / (4.0 * (m + 1.0) * (m + 1.0))
}

/// Supremum of [`lcd_rho_asymptote`].
pub const LCD_RHO_SUP: f64 = 0.75;

/// The `m ≥ 1` whose LCD asymptote is nearest to `rho`, ties to smaller `m`.
pub fn m_of_rho(rho: f64) -> Result<u32> {
    if rho.is_nan() || rho < 0.0 {
        return Err(Error::OutOfRange {
            rho,
            boundary: Boundary::Lower,
        });
    }
    if rho >= LCD_RHO_SUP {
        return Err(Error::OutOfRange {
            rho,
            boundary: Boundary::Unbounded,
        });
    }
    // The asymptote is increasing in m and tends to 3/4, so the scan stops.
    let mut m = 1u32;
    while lcd_rho_asymptote(m) < rho {
        m += 1;
    }
    if m > 1 && (rho - lcd_rho_asymptote(m - 1)) <= (lcd_rho_asymptote(m) - rho) {
        m -= 1;
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    PreferentialAttachment,
    ErdosRenyi,
    CommunityStructure,
    Indeterminate,
}

/// Band edges used by [`classify_model`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelBands {
    /// `ρ̂` below this is preferential attachment.
    pub pa_upper: f64,
    pub er_lower: f64,
    pub er_upper: f64,
}

impl ModelBands {
    /// Bands for an Erdős–Rényi half-width; the ER band never reaches
    /// below the preferential-attachment supremum.
    pub fn new(er_halfwidth: f64) -> Self {
        let hw = er_halfwidth.max(0.0);
        ModelBands {
            pa_upper: LCD_RHO_SUP,
            er_lower: (1.0 - hw).max(LCD_RHO_SUP),
            er_upper: 1.0 + hw,
        }
    }
}

pub const DEFAULT_ER_HALFWIDTH: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelClass {
    pub kind: ModelKind,
    pub rho: Option<f64>,
    pub bands: ModelBands,
}

/// Rough generative-model guess from `ρ̂`: LCD gives `[0, 3/4)`,
/// Erdős–Rényi gives 1 and a `K`-block DCBM gives `(1, K)`.
pub fn classify_model(rho: Option<f64>, er_halfwidth: f64) -> ModelClass {
    let bands = ModelBands::new(er_halfwidth);
    let kind = match rho {
        None => ModelKind::Indeterminate,
        Some(r) if r.is_nan() => ModelKind::Indeterminate,
        Some(r) if r < bands.pa_upper => ModelKind::PreferentialAttachment,
        Some(r) if r >= bands.er_lower && r <= bands.er_upper => ModelKind::ErdosRenyi,
        Some(r) if r > bands.er_upper => ModelKind::CommunityStructure,
        Some(_) => ModelKind::Indeterminate,
    };
    ModelClass { kind, rho, bands }
}
