//! Statistical fidelity of the Monte Carlo estimator against independent
//! deterministic oracles: quadrature over the combined-SNR density,
//! estimator cross-agreement, distributional tests of the sampled SNR,
//! and the shard-invariance contract.

use perbound::montecarlo::{block_rng, sample_mrc_snr};
use perbound::outage::beta;
use perbound::{
    estimate_per, minimize_bound, CodeParams, Estimator, LinkConfig, OutageModelKind, SimSpec,
};

mod support;
use support::simpson;

fn anchor_link() -> LinkConfig {
    LinkConfig::new(4, 1.0, 3.0).unwrap()
}

fn anchor_code() -> CodeParams {
    CodeParams::new(4096, 0.5).unwrap()
}

/// E[eps(beta Z_L)] by adaptive Simpson over the normalized chi-squared
/// density, entirely in test code (the density and the integration are
/// independent of the sampling path under test).
fn expected_per_quadrature(link: &LinkConfig, code: &CodeParams) -> f64 {
    let bins = link.bins;
    let b = beta(link);
    let log_fact: f64 = (2..=u64::from(bins.saturating_sub(1)))
        .map(|i| (i as f64).ln())
        .sum();
    let l = f64::from(bins);
    let density = move |z: f64| -> f64 {
        if z <= 0.0 {
            return 0.0;
        }
        (l * l.ln() + (l - 1.0) * z.ln() - l * z - log_fact).exp()
    };
    let eps = perbound::finite_blocklength::ConditionalErrorFn::new(code);
    let integrand = move |z: f64| eps.eval(b * z) * density(z);

    let breakpoints = [
        0.0, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 0.1, 0.3, 1.0, 2.0, 5.0, 10.0, 30.0,
    ];
    breakpoints
        .windows(2)
        .map(|w| simpson(&integrand, w[0], w[1], 1e-14))
        .sum()
}

#[test]
fn analytic_average_matches_quadrature_oracle() {
    let link = anchor_link();
    let code = anchor_code();

    let oracle = expected_per_quadrature(&link, &code);
    // The same expectation from an offline high-precision integration;
    // guards the test-side quadrature itself.
    assert!(
        (oracle - 6.5371537e-5).abs() / 6.5371537e-5 < 1e-4,
        "quadrature oracle drifted: {oracle}"
    );

    let est = estimate_per(&SimSpec {
        link,
        code,
        trials: 10_000_000,
        seed: 42,
        estimator: Estimator::AnalyticAverage,
        shards: 1,
    })
    .unwrap();

    let diff = (est.per.value() - oracle).abs();
    assert!(
        diff <= 3.0 * est.ci_halfwidth_95,
        "simulation {} vs quadrature {} differs by {} > 3 x {}",
        est.per.value(),
        oracle,
        diff,
        est.ci_halfwidth_95
    );
}

#[test]
fn bernoulli_and_analytic_estimate_the_same_expectation() {
    let base = SimSpec {
        link: anchor_link(),
        code: anchor_code(),
        trials: 10_000_000,
        seed: 42,
        estimator: Estimator::AnalyticAverage,
        shards: 1,
    };
    let a = estimate_per(&base).unwrap();
    let b = estimate_per(&SimSpec {
        estimator: Estimator::Bernoulli,
        ..base
    })
    .unwrap();
    let combined = (a.ci_halfwidth_95.powi(2) + b.ci_halfwidth_95.powi(2)).sqrt();
    assert!(
        (a.per.value() - b.per.value()).abs() <= 3.0 * combined,
        "analytic {} vs bernoulli {} (combined 3ci {})",
        a.per.value(),
        b.per.value(),
        3.0 * combined
    );
}

#[test]
fn sampled_snr_passes_ks_against_exact_cdf() {
    for bins in [1u32, 2, 4, 8] {
        let link = LinkConfig::new(bins, 1.0, 3.0).unwrap();
        let b = beta(&link);
        let n = 100_000usize;
        let mut z: Vec<f64> = Vec::with_capacity(n);
        let mut block = 0u64;
        while z.len() < n {
            let mut rng = block_rng(2024, block);
            for _ in 0..4096 {
                if z.len() == n {
                    break;
                }
                z.push(sample_mrc_snr(&mut rng, &link) / b);
            }
            block += 1;
        }
        z.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut d: f64 = 0.0;
        for (i, &zi) in z.iter().enumerate() {
            let f = perbound::outage::outage_exact(bins, zi).unwrap().value();
            d = d.max(((i + 1) as f64 / n as f64 - f).max(f - i as f64 / n as f64));
        }
        let critical = 1.6276 / (n as f64).sqrt();
        assert!(
            d <= critical,
            "L = {bins}: KS statistic {d} above the 1% critical value {critical}"
        );
    }
}

#[test]
fn estimates_are_bit_identical_across_shard_counts() {
    // Trial count deliberately not a multiple of the block size.
    for estimator in [Estimator::AnalyticAverage, Estimator::Bernoulli] {
        let reference = estimate_per(&SimSpec {
            link: anchor_link(),
            code: anchor_code(),
            trials: 1_000_123,
            seed: 7,
            estimator,
            shards: 1,
        })
        .unwrap();
        for shards in [2u32, 5, 32, 1000] {
            let est = estimate_per(&SimSpec {
                link: anchor_link(),
                code: anchor_code(),
                trials: 1_000_123,
                seed: 7,
                estimator,
                shards,
            })
            .unwrap();
            assert_eq!(
                reference.per.value().to_bits(),
                est.per.value().to_bits(),
                "mean differs at shards = {shards}"
            );
            assert_eq!(
                reference.ci_halfwidth_95.to_bits(),
                est.ci_halfwidth_95.to_bits(),
                "ci differs at shards = {shards}"
            );
        }
    }
}

#[test]
fn bound_dominates_simulation_with_sampling_slack() {
    // Spot configurations across the operating range; the full preset
    // sweeps run in the acceptance suite.
    let cases = [
        (4u32, 3.0, 4096u32, 0.5),
        (4, 0.0, 4096, 0.5),
        (2, 6.0, 1024, 0.8),
        (8, -3.0, 8192, 0.3),
    ];
    for (bins, snr_db, n, rate) in cases {
        let link = LinkConfig::new(bins, 1.0, snr_db).unwrap();
        let code = CodeParams::new(n, rate).unwrap();
        let bound = minimize_bound(&code, &link, OutageModelKind::CorrectedB)
            .unwrap()
            .per_bound
            .value();
        let est = estimate_per(&SimSpec {
            link,
            code,
            trials: 1_000_000,
            seed: 9,
            estimator: Estimator::AnalyticAverage,
            shards: 1,
        })
        .unwrap();
        assert!(
            est.per.value() - 3.0 * est.ci_halfwidth_95 <= bound,
            "bound {bound} undercut by simulation {} (ci {}) at L={bins}, snr={snr_db}, n={n}, R={rate}",
            est.per.value(),
            est.ci_halfwidth_95
        );
    }
}
