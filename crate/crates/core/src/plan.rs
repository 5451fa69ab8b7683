//! The inverse problem: given a PER target, find the smallest diversity
//! order or the lowest SNR whose ε-minimized bound meets it.
//!
//! The planner leans on the empirical monotonicity of the bound (in L at
//! fixed per-bin power, and in SNR) but re-verifies the bracketing
//! inequality before returning, so a non-monotone surprise surfaces as an
//! error instead of a wrong plan.

use crate::bound::minimize_bound;
use crate::error::{Error, Result};
use crate::finite_blocklength::CodeParams;
use crate::numerics::Probability;
use crate::outage::{LinkConfig, OutageModelKind};
use serde::{Deserialize, Serialize};

/// Which parameter the planner is free to choose.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FreeParameter {
    /// Smallest integer diversity order in `[lo, hi]` meeting the target
    /// (per-bin power held fixed, so more bins means more total power
    /// and more diversity).
    MinBins,
    /// Lowest per-bin SNR in `[lo, hi]` dB meeting the target, resolved
    /// to 0.01 dB by bisection.
    MinSnrDb,
}

/// A planning request. The `free` field of the embedded configuration is
/// ignored and replaced by the search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanQuery {
    pub target_per: Probability,
    pub free: FreeParameter,
    pub lo: f64,
    pub hi: f64,
    pub link: LinkConfig,
    pub code: CodeParams,
    pub model: OutageModelKind,
}

/// Plan result: the chosen parameter and the bound it achieves, or an
/// infeasible verdict carrying the best bound seen in the search range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlanOutcome {
    pub feasible: bool,
    pub free: FreeParameter,
    /// Chosen value (bins or dB) when feasible.
    pub parameter: Option<f64>,
    /// Bound at the chosen parameter, or the best achieved if infeasible.
    pub achieved_bound: Probability,
    pub model: OutageModelKind,
}

/// Solve a [`PlanQuery`].
pub fn plan_parameters(query: &PlanQuery) -> Result<PlanOutcome> {
    let target = query.target_per.value();
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "target PER must lie strictly inside (0,1), got {target}"
        )));
    }
    if !(query.lo < query.hi) {
        return Err(Error::InvalidConfig(format!(
            "search range needs lo < hi, got [{}, {}]",
            query.lo, query.hi
        )));
    }
    query.code.validate()?;
    match query.free {
        FreeParameter::MinBins => plan_min_bins(query, target),
        FreeParameter::MinSnrDb => plan_min_snr(query, target),
    }
}

fn bound_at(query: &PlanQuery, link: &LinkConfig) -> Result<f64> {
    Ok(minimize_bound(&query.code, link, query.model)?
        .per_bound
        .value())
}

fn plan_min_bins(query: &PlanQuery, target: f64) -> Result<PlanOutcome> {
    if query.lo < 1.0 || query.lo.fract() != 0.0 || query.hi.fract() != 0.0 {
        return Err(Error::InvalidConfig(
            "bins search range must consist of integers >= 1".into(),
        ));
    }
    let (lo, hi) = (query.lo as u32, query.hi as u32);
    let mut best = f64::INFINITY;
    for bins in lo..=hi {
        let link = LinkConfig { bins, ..query.link };
        link.validate()?;
        let bound = bound_at(query, &link)?;
        best = best.min(bound);
        if bound <= target {
            // Ascending scan: every smaller order already failed, which is
            // exactly the bracketing inequality.
            return Ok(PlanOutcome {
                feasible: true,
                free: FreeParameter::MinBins,
                parameter: Some(f64::from(bins)),
                achieved_bound: Probability::clamped(bound),
                model: query.model,
            });
        }
    }
    Ok(PlanOutcome {
        feasible: false,
        free: FreeParameter::MinBins,
        parameter: None,
        achieved_bound: Probability::clamped(best),
        model: query.model,
    })
}

const SNR_RESOLUTION_DB: f64 = 0.01;

fn plan_min_snr(query: &PlanQuery, target: f64) -> Result<PlanOutcome> {
    let link_at = |snr_db: f64| LinkConfig {
        snr_db,
        ..query.link
    };
    let bound_hi = bound_at(query, &link_at(query.hi))?;
    if bound_hi > target {
        return Ok(PlanOutcome {
            feasible: false,
            free: FreeParameter::MinSnrDb,
            parameter: None,
            achieved_bound: Probability::clamped(bound_hi),
            model: query.model,
        });
    }
    let bound_lo = bound_at(query, &link_at(query.lo))?;
    if bound_lo <= target {
        return Ok(PlanOutcome {
            feasible: true,
            free: FreeParameter::MinSnrDb,
            parameter: Some(query.lo),
            achieved_bound: Probability::clamped(bound_lo),
            model: query.model,
        });
    }

    let (mut lo, mut hi) = (query.lo, query.hi);
    while hi - lo > SNR_RESOLUTION_DB {
        let mid = 0.5 * (lo + hi);
        if bound_at(query, &link_at(mid))? <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    let achieved = bound_at(query, &link_at(hi))?;
    // Bisection invariant, re-verified on the actual bound evaluations.
    if achieved > target {
        return Err(Error::Convergence(format!(
            "bisection left a bound of {achieved} above the target {target}"
        )));
    }
    let below = bound_at(query, &link_at(hi - 2.0 * SNR_RESOLUTION_DB))?;
    if below <= target && hi - 2.0 * SNR_RESOLUTION_DB >= query.lo {
        return Err(Error::Convergence(
            "bound is not monotone across the bisection bracket".into(),
        ));
    }
    Ok(PlanOutcome {
        feasible: true,
        free: FreeParameter::MinSnrDb,
        parameter: Some(hi),
        achieved_bound: Probability::clamped(achieved),
        model: query.model,
    })
}
