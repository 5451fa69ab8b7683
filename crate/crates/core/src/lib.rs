//! Packet-error-rate upper bounds for short-packet transmission over
//! L-fold multichannel Rayleigh fading with maximal ratio combining,
//! plus a Monte Carlo link simulator to validate them.
//!
//! The pipeline, bottom to top:
//!
//! - [`numerics`] — Gaussian tail `Q`/`Q⁻¹`, regularized lower incomplete
//!   gamma, log-factorial.
//! - [`finite_blocklength`] — normal-approximation rate, channel dispersion,
//!   the SNR threshold `τ(ε)`, and the inverted conditional error
//!   probability `ε(ρ)` used as the decoder model.
//! - [`outage`] — the combined-SNR tail: exact chi-squared CDF, the Chernoff
//!   bound `U_L`, and the corrected bound `B_L` that is exact as `z → 0`.
//! - [`bound`] — the ε-minimized PER upper bound and its n → ∞ limit.
//! - [`montecarlo`] — seeded, shard-invariant PER estimation.
//! - [`sweep`] / [`plan`] — parameter sweeps (CSV) and the inverse problem:
//!   smallest diversity order or SNR meeting a PER target.
//!
//! All numeric operations are pure and deterministic; simulations are
//! reproducible from a single 64-bit seed regardless of shard count.

// Rational-approximation tables and frozen oracle values keep their
// published digit counts.
#![allow(clippy::excessive_precision)]

pub mod bound;
pub mod error;
pub mod finite_blocklength;
pub mod montecarlo;
pub mod numerics;
pub mod outage;
pub mod plan;
pub mod sweep;

pub use bound::{minimize_bound, per_asymptotic, per_objective, BoundResult};
pub use error::{Error, Result};
pub use finite_blocklength::{CodeParams, DispersionValue, V_BAR};
pub use montecarlo::{estimate_per, Estimator, PerEstimate, SimSpec};
pub use numerics::Probability;
pub use outage::{LinkConfig, OutageModelKind};
pub use plan::{plan_parameters, FreeParameter, PlanOutcome, PlanQuery};
pub use sweep::{preset, run_sweep, Axis, OutputKind, PowerMode, SweepSpec, SweepTable};
