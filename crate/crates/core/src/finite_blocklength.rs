//! Normal-approximation rate machinery for finite-length codes over a
//! complex Gaussian channel: channel dispersion, the achievable rate, a
//! dispersion-free lower bound on it, the SNR threshold `τ(ε)`, and the
//! inversion `ε(ρ)` that serves as the simulator's decoder model.

use crate::error::{Error, Result};
use crate::numerics::{q_inv, q_raw, Probability};
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

/// Supremum of the Gaussian-channel dispersion: `1 / (ln 2)^2 ≈ 2.0814`
/// bits² per symbol. Decouples the rate penalty from the SNR in the
/// lower-bound form.
pub const V_BAR: f64 = 1.0 / (LN_2 * LN_2);

/// Blocklength and code rate of the transmitted packet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodeParams {
    /// Codeword length in symbols, at least 2.
    pub n: u32,
    /// Code rate in bits per symbol, strictly positive.
    pub rate: f64,
}

impl CodeParams {
    pub fn new(n: u32, rate: f64) -> Result<CodeParams> {
        let params = CodeParams { n, rate };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidConfig(format!(
                "blocklength must be >= 2, got {}",
                self.n
            )));
        }
        if !(self.rate > 0.0) || !self.rate.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "code rate must be positive and finite, got {}",
                self.rate
            )));
        }
        Ok(())
    }

    /// `log2(n) / (2n)`, the higher-order rate correction term.
    #[inline]
    pub(crate) fn log_term(&self) -> f64 {
        let n = f64::from(self.n);
        n.log2() / (2.0 * n)
    }
}

/// Channel dispersion value, in `[0, V_BAR)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DispersionValue(f64);

impl DispersionValue {
    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Channel dispersion `V(ρ) = ρ(2+ρ)/(1+ρ)² · (log2 e)²`.
///
/// Strictly increasing in `ρ` with supremum [`V_BAR`]; the result is kept
/// strictly below the supremum even where rounding at extreme SNR would
/// land exactly on it.
pub fn dispersion(rho: f64) -> Result<DispersionValue> {
    if !rho.is_finite() || rho < 0.0 {
        return Err(Error::Domain(format!(
            "dispersion requires finite rho >= 0, got {rho}"
        )));
    }
    Ok(DispersionValue(dispersion_raw(rho)))
}

#[inline]
pub(crate) fn dispersion_raw(rho: f64) -> f64 {
    // Factored so neither term overflows at extreme SNR.
    let ratio = (rho / (1.0 + rho)) * ((2.0 + rho) / (1.0 + rho));
    let v = ratio * V_BAR;
    if v >= V_BAR {
        V_BAR.next_down()
    } else {
        v
    }
}

/// Achievable rate of an `(n, ε)` code at combined SNR `ρ`:
/// `log2(1+ρ) − sqrt(V(ρ)/n)·Q⁻¹(ε) + log2(n)/(2n)` bits per symbol.
///
/// May be negative for small `ρ` and demanding `ε`.
pub fn achievable_rate(rho: f64, code: &CodeParams, eps: Probability) -> Result<f64> {
    code.validate()?;
    let v = dispersion(rho)?.value();
    let qi = q_inv_open(eps)?;
    let n = f64::from(code.n);
    Ok(rho.ln_1p() / LN_2 - (v / n).sqrt() * qi + code.log_term())
}

/// Dispersion-free lower bound on the achievable rate:
/// `log2(1+ρ) − sqrt(V_BAR/n)·Q⁻¹(ε)`.
///
/// For `ε < 1/2` this never exceeds [`achievable_rate`] at the same
/// arguments, since `V(ρ) < V_BAR` and the log term is positive.
pub fn rate_lower_bound(rho: f64, code: &CodeParams, eps: Probability) -> Result<f64> {
    code.validate()?;
    if !rho.is_finite() || rho < 0.0 {
        return Err(Error::Domain(format!(
            "rate_lower_bound requires finite rho >= 0, got {rho}"
        )));
    }
    let qi = q_inv_open(eps)?;
    let n = f64::from(code.n);
    Ok(rho.ln_1p() / LN_2 - (V_BAR / n).sqrt() * qi)
}

/// SNR threshold `τ(ε) = 2^{R + sqrt(V_BAR/n)·Q⁻¹(ε)} − 1`: the combined
/// SNR below which the rate lower bound drops under the code rate.
///
/// Strictly decreasing in `ε`, approaching `2^R − 1` as `n → ∞`. Computed
/// as `expm1(ln2 · exponent)` so values near zero keep full precision.
/// The formula goes negative once `ε` is large enough that the penalty
/// term outweighs the rate; a non-positive threshold means the outage
/// event is empty.
pub fn snr_threshold(code: &CodeParams, eps: Probability) -> Result<f64> {
    code.validate()?;
    let qi = q_inv_open(eps)?;
    let tau = snr_threshold_raw(code.rate, f64::from(code.n), qi);
    if !tau.is_finite() {
        return Err(Error::Overflow(format!(
            "snr threshold overflowed at rate {}, eps {}",
            code.rate,
            eps.value()
        )));
    }
    Ok(tau)
}

#[inline]
pub(crate) fn snr_threshold_raw(rate: f64, n: f64, q_inv_eps: f64) -> f64 {
    (LN_2 * (rate + (V_BAR / n).sqrt() * q_inv_eps)).exp_m1()
}

/// Conditional error probability of the finite-length code at fixed
/// combined SNR: the inversion of the achievable-rate expression,
/// `ε(ρ) = Q( sqrt(n/V(ρ)) · (log2(1+ρ) − R + log2(n)/(2n)) )`,
/// clamped to `[0, 1]` where the Q argument over- or underflows.
///
/// This variant, including the `log2(n)/(2n)` term, is the default
/// decoder model of the simulator.
pub fn conditional_error_prob(rho: f64, code: &CodeParams) -> Result<Probability> {
    if !rho.is_finite() || rho < 0.0 {
        return Err(Error::Domain(format!(
            "conditional error probability requires finite rho >= 0, got {rho}"
        )));
    }
    code.validate()?;
    Ok(Probability::clamped(
        ConditionalErrorFn::new(code).eval(rho),
    ))
}

/// Sensitivity-study variant of [`conditional_error_prob`] built on the
/// dispersion-free lower bound instead:
/// `ε(ρ) = Q( sqrt(n/V_BAR) · (log2(1+ρ) − R) )`.
pub fn conditional_error_prob_vbar(rho: f64, code: &CodeParams) -> Result<Probability> {
    if !rho.is_finite() || rho < 0.0 {
        return Err(Error::Domain(format!(
            "conditional error probability requires finite rho >= 0, got {rho}"
        )));
    }
    code.validate()?;
    let n = f64::from(code.n);
    let arg = (n / V_BAR).sqrt() * (rho.ln_1p() / LN_2 - code.rate);
    Ok(Probability::clamped(clamped_q(arg)))
}

/// Precomputed `ε(ρ)` evaluator for hot loops (one instance per sweep
/// point, millions of evaluations per instance).
#[derive(Debug, Clone, Copy)]
pub struct ConditionalErrorFn {
    n: f64,
    /// `log2(n)/(2n) − R`, folded once.
    offset: f64,
}

impl ConditionalErrorFn {
    pub fn new(code: &CodeParams) -> ConditionalErrorFn {
        ConditionalErrorFn {
            n: f64::from(code.n),
            offset: code.log_term() - code.rate,
        }
    }

    /// `ε(ρ)` as a bare f64 in `[0, 1]`; caller guarantees `ρ >= 0`.
    #[inline]
    pub fn eval(&self, rho: f64) -> f64 {
        let diff = rho.ln_1p() / LN_2 + self.offset;
        let v = dispersion_raw(rho);
        if v == 0.0 {
            // Zero SNR carries no information: certain error whenever the
            // rate exceeds the log term.
            return if diff > 0.0 {
                0.0
            } else if diff < 0.0 {
                1.0
            } else {
                0.5
            };
        }
        clamped_q((self.n / v).sqrt() * diff)
    }
}

#[inline]
fn clamped_q(arg: f64) -> f64 {
    if arg.is_finite() {
        q_raw(arg)
    } else if arg > 0.0 {
        0.0
    } else {
        1.0
    }
}

fn q_inv_open(eps: Probability) -> Result<f64> {
    if eps.value() <= 0.0 || eps.value() >= 1.0 {
        return Err(Error::Domain(format!(
            "nominal error probability must lie strictly inside (0,1), got {}",
            eps.value()
        )));
    }
    q_inv(eps)
}
