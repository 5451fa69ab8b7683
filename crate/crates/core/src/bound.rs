//! The ε-minimized packet-error-rate upper bound.
//!
//! For a nominal error probability ε, decoding fails with probability at
//! most ε whenever the combined SNR clears the threshold `τ(ε)`, and is
//! counted as certain failure below it:
//!
//! ```text
//! PER <= ε + (1 − ε) · Pr(ρ < τ(ε))
//! ```
//!
//! Minimizing the right-hand side over ε gives the reported bound. The
//! outage factor is evaluated under a selectable tail model; the corrected
//! Chernoff bound keeps the whole expression closed-form, which is what
//! makes the one-dimensional search cheap.
//!
//! The objective is not proven unimodal, so the search brackets every
//! local minimum of a 200-point log-spaced ε grid and refines each by
//! golden-section before taking the best - deterministic and robust.

use crate::error::{Error, Result};
use crate::finite_blocklength::{snr_threshold_raw, CodeParams};
use crate::numerics::{q_inv, Probability};
use crate::outage::{
    beta, chernoff_bound, corrected_bound, correction_term, outage_exact, outage_series_leading,
    LinkConfig, OutageModelKind,
};
use serde::Serialize;

/// Search domain for ε: truncated away from {0, 1} where `Q⁻¹` diverges.
/// At the endpoints the objective tends to 1 analytically (outage
/// certainty on the left, the ε term on the right), so the minimum is
/// interior whenever the bound is non-degenerate.
const EPS_LO: f64 = 1e-12;
const EPS_HI: f64 = 1.0 - 1e-6;
/// Coarse bracketing grid size.
const GRID_POINTS: usize = 200;
/// Golden-section termination width on ln ε.
const REFINE_TOL: f64 = 1e-4;

/// Result of the ε-minimization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundResult {
    /// Minimizing nominal error probability.
    pub eps_star: Probability,
    /// Minimized PER upper bound `ε* + (1−ε*)·outage`.
    pub per_bound: Probability,
    /// SNR threshold at the minimizer.
    pub tau_star: f64,
    /// Outage factor at the minimizer.
    pub outage_at_star: Probability,
    /// Tail model used for the outage factor.
    pub model: OutageModelKind,
    /// Number of objective evaluations spent by the search.
    pub evaluations: u64,
    /// Set when the objective is 1 everywhere on the search domain
    /// (the bound carries no information).
    pub degenerate: bool,
}

struct ObjectiveParts {
    objective: f64,
    tau: f64,
    outage: f64,
}

/// Shared evaluation context: everything that does not change with ε.
struct Objective {
    rate: f64,
    n: f64,
    beta: f64,
    bins: u32,
    model: OutageModelKind,
    /// `c_L`, precomputed for the corrected model.
    correction: f64,
}

impl Objective {
    fn new(code: &CodeParams, link: &LinkConfig, model: OutageModelKind) -> Result<Objective> {
        code.validate()?;
        link.validate()?;
        let correction = match model {
            OutageModelKind::CorrectedB => correction_term(link.bins)?,
            _ => 1.0,
        };
        Ok(Objective {
            rate: code.rate,
            n: f64::from(code.n),
            beta: beta(link),
            bins: link.bins,
            model,
            correction,
        })
    }

    fn eval(&self, eps: f64) -> Result<ObjectiveParts> {
        let qi = q_inv(Probability::new(eps)?)?;
        let tau = snr_threshold_raw(self.rate, self.n, qi);
        if !tau.is_finite() {
            return Err(Error::Overflow(format!(
                "snr threshold overflowed at eps = {eps}"
            )));
        }
        let z = tau / self.beta;
        // A non-positive threshold makes the outage event empty; an
        // argument outside a bound's validity region pins that factor at
        // the trivial value 1.
        let outage = if z <= 0.0 {
            0.0
        } else {
            match self.model {
                OutageModelKind::Exact => outage_exact(self.bins, z)?.value(),
                OutageModelKind::ChernoffU => {
                    if z < 1.0 {
                        chernoff_bound(self.bins, z)?.value()
                    } else {
                        1.0
                    }
                }
                OutageModelKind::CorrectedB => {
                    if z * self.correction < 1.0 {
                        corrected_bound(self.bins, z)?.value()
                    } else {
                        1.0
                    }
                }
                OutageModelKind::AsymptoticSeries => outage_series_leading(self.bins, z)?.value(),
            }
        };
        Ok(ObjectiveParts {
            objective: (eps + (1.0 - eps) * outage).min(1.0),
            tau,
            outage,
        })
    }
}

/// The bound objective `ε + (1−ε)·F(τ(ε)/β)` at a single ε, under the
/// selected tail model `F`.
///
/// Always at least `ε` and at least the outage factor. Where the
/// Chernoff-family argument leaves its validity region the outage factor
/// is pinned at 1 rather than erroring, so the search can traverse it.
pub fn per_objective(
    eps: Probability,
    code: &CodeParams,
    link: &LinkConfig,
    model: OutageModelKind,
) -> Result<Probability> {
    if eps.value() <= 0.0 || eps.value() >= 1.0 {
        return Err(Error::Domain(format!(
            "objective requires 0 < eps < 1, got {}",
            eps.value()
        )));
    }
    let objective = Objective::new(code, link, model)?;
    Ok(Probability::clamped(objective.eval(eps.value())?.objective))
}

/// Minimize the bound objective over ε.
///
/// Deterministic: a fixed 200-point grid on ln ε brackets every local
/// minimum, each bracket is refined by golden-section to `1e-4` width on
/// ln ε, and ties resolve toward the smallest ε. If the objective is 1
/// across the whole domain the result is flagged degenerate.
pub fn minimize_bound(
    code: &CodeParams,
    link: &LinkConfig,
    model: OutageModelKind,
) -> Result<BoundResult> {
    let objective = Objective::new(code, link, model)?;
    let mut evaluations: u64 = 0;

    let t_lo = EPS_LO.ln();
    let t_hi = EPS_HI.ln();
    let step = (t_hi - t_lo) / (GRID_POINTS - 1) as f64;

    let mut grid = [0.0f64; GRID_POINTS];
    let mut values = [0.0f64; GRID_POINTS];
    for i in 0..GRID_POINTS {
        let t = t_lo + step * i as f64;
        grid[i] = t;
        values[i] = objective.eval(t.exp())?.objective;
        evaluations += 1;
    }

    // Every grid-local minimum gets refined; scanning in ascending ε makes
    // tie-breaking deterministic toward the smallest ε.
    let mut best_t = grid[0];
    let mut best_value = f64::INFINITY;
    for i in 0..GRID_POINTS {
        let left_higher = i == 0 || values[i - 1] >= values[i];
        let right_higher = i + 1 == GRID_POINTS || values[i + 1] >= values[i];
        if !(left_higher && right_higher) {
            continue;
        }
        let a = if i == 0 { grid[0] } else { grid[i - 1] };
        let b = if i + 1 == GRID_POINTS {
            grid[GRID_POINTS - 1]
        } else {
            grid[i + 1]
        };
        let (t, value, used) = golden_section(
            |t| {
                objective
                    .eval(t.exp())
                    .map(|p| p.objective)
                    .unwrap_or(f64::INFINITY)
            },
            a,
            b,
            REFINE_TOL,
        );
        evaluations += used;
        // Keep the grid candidate if refinement somehow regressed.
        let (t, value) = if values[i] < value {
            (grid[i], values[i])
        } else {
            (t, value)
        };
        if value < best_value {
            best_value = value;
            best_t = t;
        }
    }

    let eps_star = best_t.exp();
    let parts = objective.eval(eps_star)?;
    evaluations += 1;
    let degenerate = parts.objective >= 1.0;
    Ok(BoundResult {
        eps_star: Probability::clamped(eps_star),
        per_bound: Probability::clamped(if degenerate { 1.0 } else { parts.objective }),
        tau_star: parts.tau,
        outage_at_star: Probability::clamped(parts.outage),
        model,
        evaluations,
        degenerate,
    })
}

/// Large-blocklength limit of the PER: the plain outage probability at the
/// capacity threshold `τ = 2^R − 1`, evaluated with the exact CDF.
pub fn per_asymptotic(code: &CodeParams, link: &LinkConfig) -> Result<Probability> {
    code.validate()?;
    link.validate()?;
    let tau0 = (std::f64::consts::LN_2 * code.rate).exp_m1();
    outage_exact(link.bins, tau0 / beta(link))
}

/// Golden-section minimization of `f` on `[a, b]`; returns the better of
/// the two interior probes once the interval shrinks below `tol`.
fn golden_section(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64, u64) {
    const INV_PHI: f64 = 0.381_966_011_250_105_2; // 2 - golden ratio

    let mut x1 = a + INV_PHI * (b - a);
    let mut x2 = b - INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut evals = 2;

    while b - a > tol {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = b - INV_PHI * (b - a);
            f2 = f(x2);
        }
        evals += 1;
    }

    if f1 < f2 {
        (x1, f1, evals)
    } else {
        (x2, f2, evals)
    }
}
