//! Tail machinery for the combined SNR over L independent Rayleigh
//! branches. With per-branch power `σ_h²` and mean combined SNR `β`, the
//! combined SNR factors as `ρ = β · Z_L`, where `Z_L = χ²_{2L} / (2L)` is
//! a normalized chi-squared variable that concentrates at 1 as the
//! diversity order grows.
//!
//! Three evaluations of `Pr(Z_L < z)` are provided: the exact CDF via the
//! regularized incomplete gamma, the Chernoff bound `U_L(z) = (z e^{1-z})^L`,
//! and the corrected bound `B_L(z) = (c_L z e^{1 - z c_L})^L` whose
//! correction term `c_L = L e^{-1} (L!)^{-1/L}` makes it asymptotically
//! exact as `z → 0`. `B_L <= U_L` holds on `[0, 1)`; that `B_L` also
//! dominates the exact CDF is supported numerically (and monitored by the
//! test suite) but not proven.

use crate::error::{Error, Result};
use crate::numerics::{log_factorial, reg_lower_gamma, Probability};
use serde::{Deserialize, Serialize};

/// Diversity and power configuration of the multichannel link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkConfig {
    /// Number of frequency/time bins combined at the receiver, `L >= 1`.
    pub bins: u32,
    /// Mean per-branch channel power `E[|h|²]`, strictly positive.
    pub sigma_h2: f64,
    /// Per-bin transmit SNR `P/N₀` in dB.
    pub snr_db: f64,
}

impl LinkConfig {
    pub fn new(bins: u32, sigma_h2: f64, snr_db: f64) -> Result<LinkConfig> {
        let link = LinkConfig {
            bins,
            sigma_h2,
            snr_db,
        };
        link.validate()?;
        Ok(link)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bins < 1 {
            return Err(Error::InvalidConfig("bins must be >= 1".into()));
        }
        if !(self.sigma_h2 > 0.0) || !self.sigma_h2.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "sigma_h2 must be positive and finite, got {}",
                self.sigma_h2
            )));
        }
        if !self.snr_db.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "snr_db must be finite, got {}",
                self.snr_db
            )));
        }
        Ok(())
    }

    /// Linear per-bin SNR `P/N₀`.
    #[inline]
    pub fn snr_linear(&self) -> f64 {
        10f64.powf(self.snr_db / 10.0)
    }
}

/// Which evaluation of the outage tail `Pr(Z_L < z)` to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutageModelKind {
    /// Exact chi-squared CDF via the regularized incomplete gamma.
    Exact,
    /// Chernoff bound `U_L(z)`.
    #[serde(rename = "chernoff")]
    ChernoffU,
    /// Corrected Chernoff bound `B_L(z)`, exact as `z → 0`.
    #[serde(rename = "corrected")]
    CorrectedB,
    /// Leading term of the small-z series, `(Lz)^L / L!`.
    #[serde(rename = "asymptotic")]
    AsymptoticSeries,
}

impl std::fmt::Display for OutageModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            OutageModelKind::Exact => "exact",
            OutageModelKind::ChernoffU => "chernoff",
            OutageModelKind::CorrectedB => "corrected",
            OutageModelKind::AsymptoticSeries => "asymptotic",
        };
        f.write_str(name)
    }
}

/// Mean combined SNR `β = L · (P/N₀) · σ_h²`, so that `ρ = β · Z_L`.
pub fn beta(link: &LinkConfig) -> f64 {
    f64::from(link.bins) * link.snr_linear() * link.sigma_h2
}

/// Exact outage CDF `Pr(Z_L < z)`, i.e. the regularized lower incomplete
/// gamma at `(L, Lz)`.
pub fn outage_exact(bins: u32, z: f64) -> Result<Probability> {
    if !z.is_finite() || z < 0.0 {
        return Err(Error::Domain(format!(
            "outage requires finite z >= 0, got {z}"
        )));
    }
    reg_lower_gamma(bins, f64::from(bins) * z)
}

/// Chernoff bound `U_L(z) = (z e^{1-z})^L`, valid for `z ∈ [0, 1)` where
/// `z e^{1-z}` is increasing.
pub fn chernoff_bound(bins: u32, z: f64) -> Result<Probability> {
    check_bins(bins)?;
    if !(0.0..1.0).contains(&z) {
        return Err(Error::Domain(format!(
            "Chernoff bound requires 0 <= z < 1, got {z}"
        )));
    }
    if z == 0.0 {
        return Ok(Probability::ZERO);
    }
    Ok(Probability::clamped(
        (f64::from(bins) * (z.ln() + 1.0 - z)).exp(),
    ))
}

/// Correction term `c_L = L e^{-1} (L!)^{-1/L}`, in `(e^{-1}, 1)`; computed
/// as `exp(ln L − 1 − ln(L!)/L)` so large diversity orders stay exact.
pub fn correction_term(bins: u32) -> Result<f64> {
    check_bins(bins)?;
    let l = f64::from(bins);
    Ok((l.ln() - 1.0 - log_factorial(bins)? / l).exp())
}

/// Corrected bound `B_L(z) = (c_L z e^{1 - z c_L})^L`.
///
/// Defined wherever the rescaled argument satisfies `c_L z < 1`; since
/// `c_L < 1` that covers all of `[0, 1)` plus the stretch `[1, 1/c_L)`,
/// where the formula stays finite (extrapolation beyond the Chernoff
/// comparison range).
pub fn corrected_bound(bins: u32, z: f64) -> Result<Probability> {
    check_bins(bins)?;
    if !z.is_finite() || z < 0.0 {
        return Err(Error::Domain(format!(
            "corrected bound requires finite z >= 0, got {z}"
        )));
    }
    let c = correction_term(bins)?;
    if z * c >= 1.0 {
        return Err(Error::Domain(format!(
            "corrected bound requires c_L * z < 1, got z = {z} with c_L = {c}"
        )));
    }
    if z == 0.0 {
        return Ok(Probability::ZERO);
    }
    let zc = z * c;
    Ok(Probability::clamped(
        (f64::from(bins) * (zc.ln() + 1.0 - zc)).exp(),
    ))
}

/// Leading small-z series term `(Lz)^L / L!` of the exact CDF, assembled
/// in the log domain. Only meaningful for small `Lz`; the value is
/// clamped into the unit interval where the series leaves it.
pub fn outage_series_leading(bins: u32, z: f64) -> Result<Probability> {
    check_bins(bins)?;
    if !z.is_finite() || z < 0.0 {
        return Err(Error::Domain(format!(
            "series term requires finite z >= 0, got {z}"
        )));
    }
    if z == 0.0 {
        return Ok(Probability::ZERO);
    }
    let l = f64::from(bins);
    Ok(Probability::clamped(
        (l * (l * z).ln() - log_factorial(bins)?).exp(),
    ))
}

fn check_bins(bins: u32) -> Result<()> {
    if bins < 1 {
        return Err(Error::Domain("diversity order must be >= 1".into()));
    }
    Ok(())
}
